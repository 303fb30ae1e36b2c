use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss–Legendre nodes and weights on [-1, 1]. Rules are cached.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_rule(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = ((i as f64 + 0.75) / (n as f64 + 0.5) * PI).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Which endpoints carry an inverse-square-root singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoints {
    Neither,
    Left,
    Right,
    Both,
}

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// |difference| between the last two orders.
    pub error: f64,
    pub order: usize,
}

const START_ORDER: usize = 16;
const MAX_ORDER: usize = 4096;

/// ∫_a^b f(x) dx for integrands with at worst 1/√ singularities at the flagged
/// endpoints.
///
/// Both ends: x = mid + half·sin θ. One end: x = a + (b−a)t² (mirrored for the
/// right end). The transformed integrand is smooth and is integrated with
/// Gauss–Legendre, doubling the order until the relative change is below
/// `rtol` or the absolute change below `atol`.
pub fn singular_quadrature<F>(f: F, a: f64, b: f64, ends: Endpoints, rtol: f64, atol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    singular_quadrature_offsets(|x, _, _| f(x), a, b, ends, rtol, atol)
}

/// Like [`singular_quadrature`], but the integrand also receives the
/// distances x − a and b − x computed without cancellation, so endpoint
/// singularities can be evaluated to full relative precision.
pub fn singular_quadrature_offsets<F>(f: F, a: f64, b: f64, ends: Endpoints, rtol: f64, atol: f64) -> Result<Quadrature>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let mut prev = integrate_fixed(&f, a, b, ends, START_ORDER);
    let mut order = START_ORDER;
    let mut last_err = f64::INFINITY;
    while order < MAX_ORDER {
        order *= 2;
        let cur = integrate_fixed(&f, a, b, ends, order);
        let err = (cur - prev).abs();
        if err <= rtol * cur.abs() || err <= atol {
            return Ok(Quadrature { value: cur, error: err, order });
        }
        last_err = err;
        prev = cur;
    }
    Err(Error::NotConverged { estimate: prev, error: last_err })
}

fn integrate_fixed<F: Fn(f64, f64, f64) -> f64>(f: &F, a: f64, b: f64, ends: Endpoints, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (xs, ws) = (&rule.0, &rule.1);
    let len = b - a;
    let mut acc = 0.0;
    match ends {
        Endpoints::Neither => {
            let (mid, half) = (0.5 * (a + b), 0.5 * len);
            for (x, w) in xs.iter().zip(ws) {
                let (da, db) = (half * (1.0 + x), half * (1.0 - x));
                acc += w * f(mid + half * x, da, db);
            }
            acc * half
        }
        Endpoints::Both => {
            let (mid, half) = (0.5 * (a + b), 0.5 * len);
            for (x, w) in xs.iter().zip(ws) {
                let th = 0.5 * PI * x;
                let sa = (0.25 * PI + 0.5 * th).sin();
                let sb = (0.25 * PI - 0.5 * th).sin();
                acc += w * f(mid + half * th.sin(), len * sa * sa, len * sb * sb) * th.cos();
            }
            acc * half * 0.5 * PI
        }
        Endpoints::Left | Endpoints::Right => {
            for (x, w) in xs.iter().zip(ws) {
                let t = 0.5 * (x + 1.0);
                let near = len * t * t;
                // 1 - t² = (1 - t)(1 + t), with 1 - t = (1 - x)/2
                let far = len * 0.5 * (1.0 - x) * (1.0 + t);
                let val = if ends == Endpoints::Left { f(a + near, near, far) } else { f(b - near, far, near) };
                acc += w * val * 2.0 * len * t;
            }
            acc * 0.5
        }
    }
}
