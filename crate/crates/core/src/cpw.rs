//! Per-unit-length capacitance of multi-line coplanar waveguides (zero metal
//! thickness, substrate half-space) by Schwarz–Christoffel mapping onto a
//! parallel-plate capacitor.
//!
//! For driven line m the map
//!
//! w(x) = ∫ Π_j (x − c_j) / √(Π_k (x − a_k)(x − b_k)) dx
//!
//! sends every conductor onto a horizontal segment and every gap onto a
//! vertical one. Placing one point c_j inside each gap not adjacent to line m
//! closes those gaps, so all grounded conductors land on one plate and line m
//! on the other.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{EPSILON_0, SPEED_OF_LIGHT};
use crate::elements::{CouplerMatrices, WaveParameters};
use crate::error::{Error, Result};
use crate::numerics::{elliptic_k, singular_quadrature_offsets, Endpoints};

/// Cross-section of n coplanar lines between two ground planes.
#[derive(Debug, Clone, PartialEq)]
pub struct CpwCrossSection {
    /// Line widths left to right [m].
    pub line_widths: Vec<f64>,
    /// n + 1 gaps: ground–line 0, between lines, line n−1–ground [m].
    pub gap_widths: Vec<f64>,
    pub eps_r: f64,
}

impl CpwCrossSection {
    pub fn new(line_widths: Vec<f64>, gap_widths: Vec<f64>, eps_r: f64) -> Result<Self> {
        let cs = Self { line_widths, gap_widths, eps_r };
        cs.validate()?;
        Ok(cs)
    }

    /// Single line of width `w` with gap `g` on both sides.
    pub fn single(width: f64, gap: f64, eps_r: f64) -> Result<Self> {
        Self::new(vec![width], vec![gap, gap], eps_r)
    }

    pub fn n(&self) -> usize {
        self.line_widths.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.line_widths.len();
        if !(1..=3).contains(&n) {
            return Err(Error::Geometry(format!("{n} lines; 1 to 3 supported")));
        }
        if self.gap_widths.len() != n + 1 {
            return Err(Error::Geometry(format!("{} gaps for {n} lines; expected {}", self.gap_widths.len(), n + 1)));
        }
        let all = self.line_widths.iter().map(|w| ("line_width", *w)).chain(self.gap_widths.iter().map(|g| ("gap_width", *g)));
        for (parameter, value) in all.chain([("eps_r", self.eps_r)]) {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositive { component: "cpw".into(), parameter: parameter.into(), value });
            }
        }
        Ok(())
    }

    /// The same cross-section seen from the other side.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        out.line_widths.reverse();
        out.gap_widths.reverse();
        out
    }

    /// Every width and gap multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            line_widths: self.line_widths.iter().map(|w| w * s).collect(),
            gap_widths: self.gap_widths.iter().map(|g| g * s).collect(),
            eps_r: self.eps_r,
        }
    }
}

/// Conductor edges: the left ground plane ends at a[0], line i spans
/// [b[i], a[i+1]], the right ground plane starts at b[n] and gap i is
/// (a[i], b[i]).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCoordinates {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl EdgeCoordinates {
    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    /// a[0], b[0], a[1], ..., b[n] in increasing order.
    pub fn points(&self) -> Vec<f64> {
        self.a.iter().zip(&self.b).flat_map(|(a, b)| [*a, *b]).collect()
    }

    pub fn span(&self) -> f64 {
        self.b[self.n()] - self.a[0]
    }
}

pub fn edges_from_geometry(cs: &CpwCrossSection) -> EdgeCoordinates {
    let n = cs.n();
    let span: f64 = cs.line_widths.iter().chain(&cs.gap_widths).sum();
    let mut x = -0.5 * span;
    let (mut a, mut b) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
    for i in 0..=n {
        a.push(x);
        x += cs.gap_widths[i];
        b.push(x);
        if i < n {
            x += cs.line_widths[i];
        }
    }
    EdgeCoordinates { a, b }
}

/// Zeros of the map derivative for one driven line.
#[derive(Debug, Clone, PartialEq)]
pub struct GapPoints {
    pub driven: usize,
    /// (gap index, abscissa) for every gap not adjacent to the driven line.
    pub points: Vec<(usize, f64)>,
}

impl GapPoints {
    fn none(driven: usize) -> Self {
        Self { driven, points: Vec::new() }
    }

    fn abscissas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

const QUAD_RTOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 200;

/// Relative accuracy of the mapping quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapOptions {
    pub rtol: f64,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self { rtol: QUAD_RTOL }
    }
}

/// Real integral of Π(x − c)·g(x) / √Π|x − p| over a piece [lo, hi] of the
/// real axis lying between consecutive edge points; `lo_idx` / `hi_idx` name
/// the edge points the piece ends on, whose distances are then taken from the
/// quadrature offsets.
#[allow(clippy::too_many_arguments)]
fn piece_integral(
    points: &[f64],
    zeros: &[f64],
    lo: f64,
    hi: f64,
    lo_idx: Option<usize>,
    hi_idx: Option<usize>,
    weight: &dyn Fn(f64, f64) -> f64,
    rtol: f64,
) -> Result<f64> {
    // the map increments scale as 1/span; near-zero results need an absolute floor
    let atol = rtol / (points[points.len() - 1] - points[0]);
    let ends = match (lo_idx.is_some(), hi_idx.is_some()) {
        (true, true) => Endpoints::Both,
        (true, false) => Endpoints::Left,
        (false, true) => Endpoints::Right,
        (false, false) => Endpoints::Neither,
    };
    let f = |x: f64, da: f64, db: f64| {
        let mut den = 1.0;
        for (i, p) in points.iter().enumerate() {
            den *= if Some(i) == lo_idx {
                da
            } else if Some(i) == hi_idx {
                db
            } else {
                (x - p).abs()
            };
        }
        let num: f64 = zeros.iter().map(|c| x - c).product();
        num * weight(x, da) / den.sqrt()
    };
    let q = singular_quadrature_offsets(f, lo, hi, ends, rtol, atol)?;
    Ok(q.value)
}

fn unit(_: f64, _: f64) -> f64 {
    1.0
}

/// Map increment w(x_to) − w(x_from) along the real axis. Between consecutive
/// edge points the square root contributes the phase (−j)^k, k being the
/// number of edge points to the right.
pub fn sc_map(edges: &EdgeCoordinates, c_points: &GapPoints, x_from: f64, x_to: f64) -> Result<Complex64> {
    sc_map_with(edges, c_points, x_from, x_to, MapOptions::default())
}

pub fn sc_map_with(edges: &EdgeCoordinates, c_points: &GapPoints, x_from: f64, x_to: f64, opts: MapOptions) -> Result<Complex64> {
    if x_to < x_from {
        return Ok(-sc_map_with(edges, c_points, x_to, x_from, opts)?);
    }
    let pts = edges.points();
    let zeros = c_points.abscissas();
    let mut breaks = vec![x_from];
    breaks.extend(pts.iter().copied().filter(|p| *p > x_from && *p < x_to));
    breaks.push(x_to);
    let mut total = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let lo_idx = pts.iter().position(|p| *p == lo);
        let hi_idx = pts.iter().position(|p| *p == hi);
        let val = piece_integral(&pts, &zeros, lo, hi, lo_idx, hi_idx, &unit, opts.rtol)?;
        let right = pts.iter().filter(|p| **p >= hi).count();
        total += val * Complex64::new(0.0, -1.0).powu(right as u32);
    }
    Ok(total)
}

/// Real integral over edge interval k = [p_k, p_{k+1}].
fn interval_integral(pts: &[f64], zeros: &[f64], k: usize, weight: &dyn Fn(f64, f64) -> f64, rtol: f64) -> Result<f64> {
    piece_integral(pts, zeros, pts[k], pts[k + 1], Some(k), Some(k + 1), weight, rtol)
}

/// Places one zero in every gap j ∉ {m, m+1} so that the map increment over
/// that gap vanishes. The increment is linear in its own c_j, so each sweep
/// sets c_j to the weighted mean of x over gap j with the other zeros fixed;
/// sweeps repeat until the points move by less than 1e−13 of the span.
pub fn solve_gap_points(edges: &EdgeCoordinates, m: usize) -> Result<GapPoints> {
    solve_gap_points_with(edges, m, MapOptions::default())
}

pub fn solve_gap_points_with(edges: &EdgeCoordinates, m: usize, opts: MapOptions) -> Result<GapPoints> {
    let n = edges.n();
    if m >= n {
        return Err(Error::Geometry(format!("driven line {m} out of range for {n} lines")));
    }
    let gaps: Vec<usize> = (0..=n).filter(|j| *j != m && *j != m + 1).collect();
    if gaps.is_empty() {
        return Ok(GapPoints::none(m));
    }
    let pts = edges.points();
    let mut c: Vec<f64> = gaps.iter().map(|&j| 0.5 * (edges.a[j] + edges.b[j])).collect();
    let tol = 1e-13 * edges.span();
    for _ in 0..MAX_SWEEPS {
        let mut moved: f64 = 0.0;
        for (idx, &j) in gaps.iter().enumerate() {
            let others: Vec<f64> = c.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, v)| *v).collect();
            let k = 2 * j;
            let den = interval_integral(&pts, &others, k, &unit, opts.rtol)?;
            let num = interval_integral(&pts, &others, k, &|_, da| da, opts.rtol)?;
            if den == 0.0 {
                return Err(Error::NoSignChange(j));
            }
            let next = edges.a[j] + num / den;
            if !(next > edges.a[j] && next < edges.b[j]) {
                return Err(Error::NoSignChange(j));
            }
            moved = moved.max((next - c[idx]).abs());
            c[idx] = next;
        }
        if moved < tol {
            return Ok(GapPoints { driven: m, points: gaps.into_iter().zip(c).collect() });
        }
    }
    Err(Error::MaxIterations(MAX_SWEEPS))
}

/// One column of the capacitance matrix, from the plate picture.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedColumn {
    pub driven: usize,
    pub gap_points: GapPoints,
    /// Plate separation: |increment| over gap m.
    pub height: f64,
    /// |increment| over each line; entry m is the driven plate width.
    pub widths: Vec<f64>,
    /// Largest |increment| over a closed gap relative to the plate height.
    pub closure_residual: f64,
}

pub fn map_column(edges: &EdgeCoordinates, m: usize, opts: MapOptions) -> Result<MappedColumn> {
    let gp = solve_gap_points_with(edges, m, opts)?;
    let pts = edges.points();
    let zeros = gp.abscissas();
    let n = edges.n();
    let height = interval_integral(&pts, &zeros, 2 * m, &unit, opts.rtol)?.abs();
    let widths = (0..n)
        .map(|i| interval_integral(&pts, &zeros, 2 * i + 1, &unit, opts.rtol).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    let mut closure_residual: f64 = 0.0;
    for &(j, _) in &gp.points {
        let r = interval_integral(&pts, &zeros, 2 * j, &unit, opts.rtol)?;
        closure_residual = closure_residual.max(r.abs() / height);
    }
    Ok(MappedColumn { driven: m, gap_points: gp, height, widths, closure_residual })
}

/// Capacitance matrix together with the per-line capacitance to the outer
/// ground planes and the asymmetry removed by symmetrization.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitanceAnalysis {
    /// Symmetrized C [F/m].
    pub c_pul: DMatrix<f64>,
    /// Capacitance of each line to the two ground planes [F/m]; together with
    /// the off-diagonals it makes up the diagonal.
    pub ground: Vec<f64>,
    /// max|C − Cᵀ| / max diag before symmetrization.
    pub asymmetry: f64,
}

/// C[i][m] = −(ε_r+1)ε0·W_i/H for i ≠ m and C[m][m] = (ε_r+1)ε0·W_m/H, with
/// the plate widths W and height H of the map for driven line m.
pub fn capacitance_matrix(cs: &CpwCrossSection) -> Result<DMatrix<f64>> {
    Ok(capacitance_analysis(cs, MapOptions::default())?.c_pul)
}

pub fn capacitance_analysis(cs: &CpwCrossSection, opts: MapOptions) -> Result<CapacitanceAnalysis> {
    cs.validate()?;
    let edges = edges_from_geometry(cs);
    let n = cs.n();
    let eps = (cs.eps_r + 1.0) * EPSILON_0;
    let columns = (0..n).into_par_iter().map(|m| map_column(&edges, m, opts)).collect::<Result<Vec<_>>>()?;
    let mut raw = DMatrix::zeros(n, n);
    let mut ground = vec![0.0; n];
    for col in &columns {
        let m = col.driven;
        let mut others = 0.0;
        for i in 0..n {
            let v = eps * col.widths[i] / col.height;
            if i == m {
                raw[(i, m)] = v;
            } else {
                raw[(i, m)] = -v;
                others += v;
            }
        }
        ground[m] = raw[(m, m)] - others;
    }
    let scale = (0..n).map(|i| raw[(i, i)]).fold(0.0, f64::max);
    let asymmetry = (&raw - raw.transpose()).amax() / scale;
    if asymmetry > 1e-6 {
        return Err(Error::AsymmetryTooLarge(asymmetry));
    }
    let c_pul = (&raw + raw.transpose()) * 0.5;
    Ok(CapacitanceAnalysis { c_pul, ground, asymmetry })
}

/// L, Z and Y_c of the coupler from the mapped capacitance; Z is cross-checked
/// against the symmetric square root of L·C⁻¹.
pub fn coupler_matrices(cs: &CpwCrossSection) -> Result<CouplerMatrices> {
    let c = capacitance_matrix(cs)?;
    let mats = CouplerMatrices::from_capacitance(c, WaveParameters::from_eps_r(cs.eps_r))?;
    let c_inv = mats.c_pul.clone().try_inverse().ok_or(Error::Singular)?;
    let eig = (&mats.l_pul * &c_inv).symmetric_eigen();
    if eig.eigenvalues.iter().any(|l| *l <= 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let mismatch = (&root - &mats.z_char).amax() / mats.z_char.amax();
    if mismatch > 1e-10 {
        return Err(Error::Geometry(format!("impedance square root mismatch {mismatch:e}")));
    }
    Ok(mats)
}

/// Closed-form Z0 of a single zero-thickness CPW line:
/// (η0/4√ε_eff)·K(k′)/K(k), k = w/(w+2g), ε_eff = (ε_r+1)/2, with η0/4 =
/// 1/(4cε0) ≈ 30π Ω.
pub fn single_line_z0(width: f64, gap: f64, eps_r: f64) -> Result<f64> {
    for (parameter, value) in [("width", width), ("gap", gap), ("eps_r", eps_r)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositive { component: "cpw".into(), parameter: parameter.into(), value });
        }
    }
    let k = width / (width + 2.0 * gap);
    let kp = (1.0 - k * k).sqrt();
    let eps_eff = 0.5 * (eps_r + 1.0);
    Ok(0.25 / (SPEED_OF_LIGHT * EPSILON_0 * eps_eff.sqrt()) * elliptic_k(kp)? / elliptic_k(k)?)
}
