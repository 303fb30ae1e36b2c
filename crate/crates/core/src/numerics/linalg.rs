use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Determinant by LU factorization with partial pivoting.
pub fn det_complex(m: &CMatrix) -> Complex64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = a[(k, k)].norm();
        for r in (k + 1)..n {
            let v = a[(r, k)].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != k {
            a.swap_rows(piv, k);
            det = -det;
        }
        let pivot = a[(k, k)];
        det *= pivot;
        for r in (k + 1)..n {
            let f = a[(r, k)] / pivot;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in (k + 1)..n {
                let t = a[(k, c)];
                a[(r, c)] -= f * t;
            }
        }
    }
    det
}

/// Result of [`null_vector`].
#[derive(Debug, Clone)]
pub struct NullVector {
    pub vector: CVector,
    /// σ_min / σ_max of the input matrix.
    pub sigma_ratio: f64,
    /// Set when σ_min / σ_max exceeds 1e-6.
    pub poorly_converged: bool,
}

/// Unit right singular vector of the smallest singular value, with the
/// largest-magnitude entry rotated to be real and positive.
pub fn null_vector(m: &CMatrix) -> NullVector {
    let n = m.ncols();
    if n == 1 {
        let s = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        return NullVector {
            vector: CVector::from_element(1, Complex64::new(1.0, 0.0)),
            sigma_ratio: if s == 0.0 { 0.0 } else { 1.0 },
            poorly_converged: false,
        };
    }
    let (vecs, ratios) = right_singular(m);
    let mut v = vecs[0].clone();
    fix_phase(&mut v);
    NullVector { vector: v, sigma_ratio: ratios[0], poorly_converged: ratios[0] > 1e-6 }
}

/// Orthonormal basis of the numerical kernel (singular values with
/// σ/σ_max below `rel_tol`), localized so that each basis vector is pinned to
/// its own dominant node. Always returns at least one vector.
pub fn kernel_basis(m: &CMatrix, rel_tol: f64) -> Vec<CVector> {
    if m.ncols() == 1 {
        return vec![CVector::from_element(1, Complex64::new(1.0, 0.0))];
    }
    let (vecs, ratios) = right_singular(m);
    let dim = ratios.iter().take_while(|&&r| r < rel_tol).count().max(1);
    localized_basis(m.ncols(), vecs, dim)
}

/// As [`kernel_basis`] with an absolute threshold on the singular values, for
/// matrices already normalized to a known scale.
pub fn kernel_basis_abs(m: &CMatrix, abs_tol: f64) -> Vec<CVector> {
    if m.ncols() == 1 {
        return vec![CVector::from_element(1, Complex64::new(1.0, 0.0))];
    }
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let (vecs, ratios) = right_singular(m);
    let dim = ratios.iter().take_while(|&&r| r * smax < abs_tol).count().max(1);
    localized_basis(m.ncols(), vecs, dim)
}

fn localized_basis(n: usize, vecs: Vec<CVector>, dim: usize) -> Vec<CVector> {
    if dim == 1 {
        let mut v = vecs[0].clone();
        fix_phase(&mut v);
        return vec![v];
    }
    // Pivoted elimination on the basis rows picks `dim` pinning nodes; each
    // output vector is 1 at its pinning node and 0 at the others.
    let mut k = CMatrix::zeros(n, dim);
    for (j, v) in vecs.iter().take(dim).enumerate() {
        k.set_column(j, v);
    }
    let mut rows = Vec::with_capacity(dim);
    let mut work = k.clone();
    for col in 0..dim {
        let mut best = (0, -1.0);
        for r in 0..n {
            if rows.contains(&r) {
                continue;
            }
            let mag = work[(r, col)].norm();
            if mag > best.1 {
                best = (r, mag);
            }
        }
        let r = best.0;
        rows.push(r);
        let pivot = work[(r, col)];
        for c in (col + 1)..dim {
            let f = work[(r, c)] / pivot;
            for i in 0..n {
                let t = work[(i, col)];
                work[(i, c)] -= f * t;
            }
        }
    }
    let mut sub = CMatrix::zeros(dim, dim);
    for (i, &r) in rows.iter().enumerate() {
        sub.set_row(i, &k.row(r));
    }
    let inv = sub.clone().try_inverse().unwrap_or_else(|| CMatrix::identity(dim, dim));
    let mut out: Vec<CVector> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = &k * inv.column(j);
        for prev in &out {
            let proj = prev.dotc(&v);
            v -= prev * proj;
        }
        let norm = v.norm();
        if norm > 0.0 {
            v /= Complex64::new(norm, 0.0);
        }
        fix_phase(&mut v);
        out.push(v);
    }
    out
}

/// Right singular vectors sorted by ascending singular value, together with
/// σ_i / σ_max.
fn right_singular(m: &CMatrix) -> (Vec<CVector>, Vec<f64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sv = svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&a, &b| sv[a].partial_cmp(&sv[b]).unwrap());
    let mut vecs = Vec::with_capacity(idx.len());
    let mut ratios = Vec::with_capacity(idx.len());
    for &i in &idx {
        let row = v_t.row(i);
        let v = CVector::from_iterator(row.len(), row.iter().map(|z| z.conj()));
        vecs.push(v);
        ratios.push(if smax == 0.0 { 0.0 } else { sv[i] / smax });
    }
    (vecs, ratios)
}

fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].norm() > v[best].norm() {
            best = i;
        }
    }
    let mag = v[best].norm();
    if mag > 0.0 {
        let rot = v[best].conj() / mag;
        for x in v.iter_mut() {
            *x *= rot;
        }
        v[best] = Complex64::new(v[best].re, 0.0);
    }
}
