use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Outcome of a root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootReport<T> {
    pub root: T,
    /// |f(root)|.
    pub residual: f64,
    pub iterations: usize,
    /// Bracket `(a, b)` for bracketing methods, `(seed, seed)` for Newton.
    pub start: (T, T),
}

/// Brent's method: inverse quadratic / secant steps safeguarded by bisection.
///
/// Terminates when the bracket is narrower than `xtol` (plus a few ulps of the
/// current iterate) or an exact zero is hit.
pub fn bracketed_root<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<RootReport<f64>>
where
    F: FnMut(f64) -> f64,
{
    const MAX_ITER: usize = 200;
    let (mut xpre, mut xcur) = (a, b);
    let (mut fpre, mut fcur) = (f(xpre), f(xcur));
    if fpre == 0.0 {
        return Ok(RootReport { root: xpre, residual: 0.0, iterations: 0, start: (a, b) });
    }
    if fcur == 0.0 {
        return Ok(RootReport { root: xcur, residual: 0.0, iterations: 0, start: (a, b) });
    }
    if fpre.signum() == fcur.signum() || fpre.is_nan() || fcur.is_nan() {
        return Err(Error::NoBracket { a, b });
    }
    let (mut xblk, mut fblk) = (0.0, 0.0);
    let (mut spre, mut scur) = (0.0f64, 0.0f64);
    for iter in 1..=MAX_ITER {
        if fpre != 0.0 && fcur != 0.0 && fpre.signum() != fcur.signum() {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }
        let delta = (xtol + 4.0 * f64::EPSILON * xcur.abs()) / 2.0;
        let sbis = (xblk - xcur) / 2.0;
        if fcur == 0.0 || sbis.abs() < delta {
            return Ok(RootReport {
                root: xcur,
                residual: fcur.abs(),
                iterations: iter,
                start: (a, b),
            });
        }
        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                // secant
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                // inverse quadratic interpolation
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }
        xpre = xcur;
        fpre = fcur;
        if scur.abs() > delta {
            xcur += scur;
        } else {
            xcur += if sbis > 0.0 { delta } else { -delta };
        }
        fcur = f(xcur);
    }
    Err(Error::MaxIterations(MAX_ITER))
}

/// Settings for [`newton_complex`]. Defaults are tuned for angular
/// frequencies around 1e10 rad/s.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Stop when |Δz| falls below this [rad/s].
    pub ztol: f64,
    pub max_iter: usize,
    /// Relative derivative step.
    pub rel_step: f64,
    /// Floor for the derivative step [rad/s].
    pub min_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { ztol: 2.0 * PI, max_iter: 50, rel_step: 1e-7, min_step: 2.0 * PI * 1e3 }
    }
}

/// Newton–Raphson on an analytic complex function with a central-difference
/// derivative.
pub fn newton_complex<F>(mut f: F, seed: Complex64, opts: NewtonOptions) -> Result<RootReport<Complex64>>
where
    F: FnMut(Complex64) -> Complex64,
{
    let diverged = || Error::Diverged { seed_re: seed.re, seed_im: seed.im };
    let limit = 10.0 * seed.norm();
    let mut z = seed;
    for iter in 1..=opts.max_iter {
        let fz = f(z);
        if fz == Complex64::new(0.0, 0.0) {
            return Ok(RootReport { root: z, residual: 0.0, iterations: iter, start: (seed, seed) });
        }
        let h = (opts.rel_step * z.norm()).max(opts.min_step);
        let dfz = (f(z + h) - f(z - h)) / (2.0 * h);
        if dfz.norm() == 0.0 || !dfz.is_finite() || !fz.is_finite() {
            return Err(diverged());
        }
        let step = fz / dfz;
        z -= step;
        if !z.is_finite() || z.norm() > limit {
            return Err(diverged());
        }
        if step.norm() < opts.ztol {
            let residual = f(z).norm();
            return Ok(RootReport { root: z, residual, iterations: iter, start: (seed, seed) });
        }
    }
    Err(diverged())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = bracketed_root(|x| x - 2.0, 0.0, 5.0, 1e-12).unwrap();
        assert!((r.root - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_root() {
        let r = bracketed_root(f64::cos, 0.0, PI, 1e-13).unwrap();
        assert!((r.root - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn no_bracket() {
        assert!(matches!(bracketed_root(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(Error::NoBracket { .. })));
    }

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> f64 {
        let fa = f(a);
        while b - a > xtol {
            let m = 0.5 * (a + b);
            if f(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn cluster_matches_bisection() {
        // roots at 1.0, 1.001, 1.002; bracket contains only the middle one
        let p = |x: f64| (x - 1.0) * (x - 1.001) * (x - 1.002);
        let xtol = 1e-12;
        let brent = bracketed_root(p, 1.0005, 1.0015, xtol).unwrap();
        let bis = bisect(p, 1.0005, 1.0015, xtol);
        assert!((brent.root - bis).abs() < 2.0 * xtol);
        assert!((brent.root - 1.001).abs() < 2.0 * xtol);
    }

    #[test]
    fn newton_unit_imaginary() {
        let opts = NewtonOptions { ztol: 1e-14, min_step: 1e-7, ..Default::default() };
        let r = newton_complex(|z| z * z + 1.0, Complex64::new(0.0, 1.1), opts).unwrap();
        assert!((r.root - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn newton_linear() {
        let target = Complex64::new(-0.5, 3.0);
        let opts = NewtonOptions { ztol: 1e-14, min_step: 1e-7, ..Default::default() };
        let r = newton_complex(|z| z - target, Complex64::new(-0.4, 3.2), opts).unwrap();
        assert!((r.root - target).norm() < 1e-12);
    }

    #[test]
    fn newton_divergence_reported() {
        let r = newton_complex(|z| z.exp(), Complex64::new(1.0, 0.0), NewtonOptions { ztol: 1e-12, min_step: 1e-6, ..Default::default() });
        assert!(matches!(r, Err(Error::Diverged { .. })));
    }
}
