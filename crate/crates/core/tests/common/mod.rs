//! Shared oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Complete elliptic integral K(k) by the arithmetic-geometric mean.
pub fn agm_k(k: f64) -> f64 {
    let (mut a, mut b) = (1.0, (1.0 - k * k).sqrt());
    for _ in 0..60 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        a = an;
        b = bn;
    }
    std::f64::consts::PI / (2.0 * a)
}

/// Exact per-length capacitance of a single zero-thickness CPW on a
/// half-space substrate [F/m].
pub fn single_cpw_capacitance(width: f64, gap: f64, eps_r: f64) -> f64 {
    let k = width / (width + 2.0 * gap);
    let kp = (1.0 - k * k).sqrt();
    2.0 * 8.854_187_812_8e-12 * (eps_r + 1.0) * agm_k(k) / agm_k(kp)
}

/// Graded 1-D grid through `keys` (sorted): spacing starts at `h_min` at every
/// key and grows by `ratio` up to `h_max` away from it.
fn graded_axis(keys: &[f64], h_min: f64, ratio: f64, h_max: f64) -> Vec<f64> {
    let mut out = vec![keys[0]];
    for w in keys.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        // Symmetric grading from both ends towards the middle.
        let mut left = Vec::new();
        let (mut x, mut h) = (0.0, h_min);
        while x + h < 0.5 * len {
            x += h;
            left.push(x);
            h = (h * ratio).min(h_max);
        }
        let mut pts: Vec<f64> = left.iter().map(|d| lo + d).collect();
        let mid = 0.5 * (lo + hi);
        if pts.last().is_none_or(|p| mid - p > 0.25 * h) {
            pts.push(mid);
        }
        pts.extend(left.iter().rev().map(|d| hi - d).filter(|p| *p > mid + 1e-3 * h_min));
        out.extend(pts);
        out.push(hi);
    }
    out
}

/// Per-length capacitance matrix of an n-line CPW from a finite-volume
/// solution of Laplace's equation.
///
/// Conductors are zero-thickness strips on y = 0, air above, substrate below,
/// and the outer box boundary is grounded. Line charges come from the
/// discrete Gauss law at conductor nodes. `refine` scales the grid density.
pub fn fd_capacitance(line_widths: &[f64], gap_widths: &[f64], eps_r: f64, refine: f64) -> DMatrix<f64> {
    let n = line_widths.len();
    let span: f64 = line_widths.iter().chain(gap_widths).sum();
    // Edge points a0 < b0 < a1 < ... < bn, centred on 0.
    let mut edges = Vec::new();
    let mut x = -0.5 * span;
    for i in 0..=n {
        edges.push(x);
        x += gap_widths[i];
        edges.push(x);
        if i < n {
            x += line_widths[i];
        }
    }
    let box_half = 60.0 * span;
    let smallest = line_widths.iter().chain(gap_widths).cloned().fold(f64::INFINITY, f64::min);
    let h_min = smallest * 1e-3 / refine;
    let h_max = smallest * 0.1 / refine;
    let ratio = 1.0 + 0.3 / refine;
    let far_ratio = 1.0 + 0.3 / refine;
    let xs = {
        let inner = graded_axis(&edges, h_min, ratio, h_max);
        let far = |from: f64, to: f64| -> Vec<f64> {
            let mut v = Vec::new();
            let (mut p, mut h) = (from, h_max);
            let dir = (to - from).signum();
            while (to - p) * dir > 1.5 * h {
                h = (h * far_ratio).min(0.05 * box_half);
                p += dir * h;
                v.push(p);
            }
            v
        };
        let mut left = far(edges[0], -box_half);
        left.reverse();
        let mut all = vec![-box_half];
        all.extend(left);
        all.extend(inner);
        all.extend(far(*edges.last().unwrap(), box_half));
        all.push(box_half);
        all
    };
    let ys = {
        let mut up = Vec::new();
        let (mut p, mut h) = (0.0, h_min);
        while p + 1.5 * h < box_half {
            p += h;
            up.push(p);
            h = if p < span { (h * ratio).min(h_max) } else { (h * far_ratio).min(0.05 * box_half) };
        }
        up.push(box_half);
        let mut all: Vec<f64> = up.iter().rev().map(|v| -v).collect();
        all.push(0.0);
        all.extend(up);
        all
    };
    let (nx, ny) = (xs.len(), ys.len());
    let j0 = ys.iter().position(|y| *y == 0.0).unwrap();

    // Conductor id per x-node on the interface row; usize::MAX = gap.
    let tol = 1e-9 * span;
    let conductor = |x: f64| -> usize {
        if x <= edges[0] + tol || x >= edges[2 * n + 1] - tol {
            return n; // ground
        }
        for i in 0..n {
            if x >= edges[2 * i + 1] - tol && x <= edges[2 * i + 2] + tol {
                return i;
            }
        }
        usize::MAX
    };
    let cond_row: Vec<usize> = xs.iter().map(|x| conductor(*x)).collect();

    let is_fixed = |i: usize, j: usize| i == 0 || j == 0 || i == nx - 1 || j == ny - 1 || (j == j0 && cond_row[i] != usize::MAX);
    let eps_row = |j: usize| if ys[j] >= 0.0 { 1.0 } else { eps_r }; // row between y_j and y_{j+1}

    // Edge weights.
    let wx = |i: usize, j: usize| -> f64 {
        // edge (i,j)-(i+1,j)
        let dx = xs[i + 1] - xs[i];
        let below = if j > 0 { eps_row(j - 1) * 0.5 * (ys[j] - ys[j - 1]) } else { 0.0 };
        let above = if j + 1 < ny { eps_row(j) * 0.5 * (ys[j + 1] - ys[j]) } else { 0.0 };
        (below + above) / dx
    };
    let wy = |i: usize, j: usize| -> f64 {
        // edge (i,j)-(i,j+1)
        let dy = ys[j + 1] - ys[j];
        let left = if i > 0 { 0.5 * (xs[i] - xs[i - 1]) } else { 0.0 };
        let right = if i + 1 < nx { 0.5 * (xs[i + 1] - xs[i]) } else { 0.0 };
        eps_row(j) * (left + right) / dy
    };
    // Order unknowns along the shorter axis so the band is as narrow as
    // possible.
    let (inner_len, swap) = if nx <= ny { (nx, false) } else { (ny, true) };
    let size = nx * ny;
    let pos = |i: usize, j: usize| if swap { i * inner_len + j } else { j * inner_len + i };
    let bw = inner_len;
    // Lower band: band[k][bw - d] = A(k, k - d).
    let mut band = vec![vec![0.0; bw + 1]; size];
    let mut coupling: Vec<Vec<(usize, f64)>> = vec![Vec::new(); size];
    let add = |band: &mut Vec<Vec<f64>>, coupling: &mut Vec<Vec<(usize, f64)>>, a: (usize, usize), b: (usize, usize), w: f64| {
        let (ka, kb) = (pos(a.0, a.1), pos(b.0, b.1));
        let (fa, fb) = (is_fixed(a.0, a.1), is_fixed(b.0, b.1));
        if !fa {
            band[ka][bw] += w;
        }
        if !fb {
            band[kb][bw] += w;
        }
        match (fa, fb) {
            (false, false) => {
                let (hi, lo) = if ka > kb { (ka, kb) } else { (kb, ka) };
                band[hi][bw - (hi - lo)] -= w;
            }
            // Free node coupled to a Dirichlet node: moves to the right side.
            (false, true) => coupling[ka].push((kb, w)),
            (true, false) => coupling[kb].push((ka, w)),
            (true, true) => {}
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                add(&mut band, &mut coupling, (i, j), (i + 1, j), wx(i, j));
            }
            if j + 1 < ny {
                add(&mut band, &mut coupling, (i, j), (i, j + 1), wy(i, j));
            }
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            if is_fixed(i, j) {
                band[pos(i, j)][bw] = 1.0;
            }
        }
    }
    // Banded Cholesky in place.
    for k in 0..size {
        let lo_k = k.saturating_sub(bw);
        for j in lo_k..k {
            let lo = lo_k.max(j.saturating_sub(bw));
            let mut s = band[k][bw - (k - j)];
            for i in lo..j {
                s -= band[k][bw - (k - i)] * band[j][bw - (j - i)];
            }
            band[k][bw - (k - j)] = s / band[j][bw];
        }
        let mut d = band[k][bw];
        for i in lo_k..k {
            d -= band[k][bw - (k - i)].powi(2);
        }
        band[k][bw] = d.sqrt();
    }
    let solve = |rhs: &mut Vec<f64>| {
        for k in 0..size {
            let mut s = rhs[k];
            for i in k.saturating_sub(bw)..k {
                s -= band[k][bw - (k - i)] * rhs[i];
            }
            rhs[k] = s / band[k][bw];
        }
        for k in (0..size).rev() {
            rhs[k] /= band[k][bw];
            let v = rhs[k];
            for i in k.saturating_sub(bw)..k {
                rhs[i] -= band[k][bw - (k - i)] * v;
            }
        }
    };

    let mut c = DMatrix::zeros(n, n);
    for m in 0..n {
        let mut phi = vec![0.0; size];
        for i in 0..nx {
            if cond_row[i] == m {
                phi[pos(i, j0)] = 1.0;
            }
        }
        let mut rhs = vec![0.0; size];
        for k in 0..size {
            for &(f, w) in &coupling[k] {
                rhs[k] += w * phi[f];
            }
        }
        for j in 0..ny {
            for i in 0..nx {
                if is_fixed(i, j) {
                    rhs[pos(i, j)] = phi[pos(i, j)];
                }
            }
        }
        solve(&mut rhs);
        // Charge on each conductor node: Σ w (φ_node − φ_nbr).
        for i in 0..nx {
            let cid = cond_row[i];
            if cid >= n {
                continue;
            }
            let k = pos(i, j0);
            let mut q = 0.0;
            let mut flux = |other: (usize, usize), w: f64| q += w * (rhs[k] - rhs[pos(other.0, other.1)]);
            if i + 1 < nx {
                flux((i + 1, j0), wx(i, j0));
            }
            if i > 0 {
                flux((i - 1, j0), wx(i - 1, j0));
            }
            flux((i, j0 + 1), wy(i, j0));
            flux((i, j0 - 1), wy(i, j0 - 1));
            c[(cid, m)] += q * 8.854_187_812_8e-12;
        }
    }
    if std::env::var_os("FD_DEBUG").is_some() {
        eprintln!("fd grid {nx} x {ny}");
    }
    c
}

/// Three-level Richardson extrapolation of [`fd_capacitance`]; the order is
/// estimated from the first diagonal entry.
pub fn fd_capacitance_extrapolated(line_widths: &[f64], gap_widths: &[f64], eps_r: f64) -> DMatrix<f64> {
    let c1 = fd_capacitance(line_widths, gap_widths, eps_r, 0.25);
    let c2 = fd_capacitance(line_widths, gap_widths, eps_r, 0.5);
    let c3 = fd_capacitance(line_widths, gap_widths, eps_r, 1.0);
    let ratio = (c1[(0, 0)] - c2[(0, 0)]) / (c2[(0, 0)] - c3[(0, 0)]);
    let factor = ratio.clamp(1.5, 8.0) - 1.0;
    &c3 + (&c3 - &c2) / factor
}
