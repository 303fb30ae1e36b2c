//! Eigenmodes of a circuit: roots of det Y(z).
//!
//! Lossless circuits are scanned along z = jω with a real, pole-free scan
//! function; lossy circuits are solved by seeding complex Newton iterations
//! with the modes of their lossless companion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, ComplexFrequency};
use crate::error::{Error, Result};
use crate::numerics::{bracketed_root, det_complex, kernel_basis_abs, newton_complex, null_vector, CMatrix, CVector, NewtonOptions};

/// Frequency window and tolerances of the lossless scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanConfig {
    pub f_min: f64,
    pub f_max: f64,
    /// Grid step [Hz]; bracketing intervals span two steps.
    pub step: f64,
    /// Largest |scan function| accepted at a root.
    pub det_zero_threshold: f64,
    /// Roots closer than this are merged [Hz].
    pub dedup_tol: f64,
}

impl ScanConfig {
    pub fn new(f_min: f64, f_max: f64) -> Self {
        let step = 1e8;
        Self { f_min, f_max, step, det_zero_threshold: 1e-3, dedup_tol: step * 1e-6 }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self.dedup_tol = step * 1e-6;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_min > 0.0 && self.f_max > self.f_min && self.f_max.is_finite()) {
            return Err(Error::Domain(format!("scan window [{}, {}] Hz", self.f_min, self.f_max)));
        }
        if !(self.step > 0.0) {
            return Err(Error::Domain(format!("scan step {} Hz", self.step)));
        }
        Ok(())
    }
}

/// One eigenmode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mode {
    #[serde(skip)]
    pub z: ComplexFrequency,
    /// ω/2π [Hz].
    pub frequency: f64,
    /// κ/2π [Hz].
    pub linewidth: f64,
    /// ω/κ; infinite for lossless modes.
    pub q: f64,
    #[serde(skip)]
    pub node_voltages: CVector,
    /// ‖D⁻¹ Y V‖ for unit V, D the positive row scales of Y.
    pub residual: f64,
    /// False when the lossy refinement failed and the lossless value is kept.
    pub refined: bool,
    pub label: Option<String>,
}

impl Mode {
    fn new(z: ComplexFrequency, node_voltages: CVector, residual: f64, refined: bool) -> Self {
        let kappa = 2.0 * z.kappa_half;
        let q = if kappa == 0.0 { f64::INFINITY } else { z.omega / kappa };
        Self {
            z,
            frequency: z.frequency_hz(),
            linewidth: z.linewidth_hz(),
            q,
            node_voltages,
            residual,
            refined,
            label: None,
        }
    }

    /// Decay time 1/κ [s].
    pub fn lifetime(&self) -> f64 {
        1.0 / (2.0 * self.z.kappa_half)
    }
}

/// Non-fatal events of a mode search.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// A bracketed root sat on a component pole or failed the threshold.
    RejectedRoot { frequency: f64, value: f64, reason: String },
    /// Two distinct modes closer than 1e−6 relative.
    NearDegenerate { f1: f64, f2: f64 },
    /// Exactly degenerate root with a multi-dimensional kernel.
    Degenerate { frequency: f64, multiplicity: usize },
    /// Null vector with scaled residual above 1e−6.
    PoorNullVector { frequency: f64, residual: f64 },
    /// Lossy Newton refinement failed; the lossless value is reported.
    NewtonFailed { frequency: f64, error: String },
    /// Refined root with κ < 0 in a passive circuit.
    NegativeDamping { frequency: f64, kappa_half: f64 },
    /// Scan function evaluation error at a grid point.
    Evaluation { frequency: f64, error: String },
}

/// Modes sorted by frequency with the diagnostics collected on the way.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeScan {
    pub modes: Vec<Mode>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Y(s) with each row divided by its positive pole-free magnitude.
pub fn scaled_admittance(circuit: &Circuit, s: Complex64) -> Result<CMatrix> {
    let mut y = circuit.admittance(s)?;
    for (i, sc) in circuit.row_scales(s).into_iter().enumerate() {
        for v in y.row_mut(i).iter_mut() {
            *v /= sc;
        }
    }
    Ok(y)
}

/// det Y(s) with every component pole multiplied away and each row scaled by
/// a positive pole-free magnitude.
pub fn scaled_det(circuit: &Circuit, z: Complex64) -> Result<Complex64> {
    let y = circuit.admittance(z)?;
    let scales = circuit.row_scales(z);
    let mut d = det_complex(&y) * circuit.pole_factor(z);
    for s in scales {
        d /= s;
    }
    Ok(d)
}

/// Scan function at z = j2πf before projection to the real axis; for a
/// lossless circuit its phase is j^0 up to rounding.
pub fn normalized_det_complex(circuit: &Circuit, f: f64) -> Result<Complex64> {
    let z = Complex64::new(0.0, 2.0 * PI * f);
    let d = scaled_det(circuit, z)?;
    let power = (circuit.node_count() as u32 + circuit.pole_factor_j_power()) % 4;
    Ok(d * Complex64::new(0.0, -1.0).powu(power))
}

/// Real scan function of a lossless circuit: zero exactly at the modes,
/// continuous through the poles of the distributed components.
pub fn normalized_det(circuit: &Circuit, f: f64) -> Result<f64> {
    match normalized_det_complex(circuit, f) {
        Ok(v) => Ok(v.re),
        // sitting exactly on a component pole: the function is continuous there
        Err(Error::Pole(_)) => Ok(normalized_det_complex(circuit, f * (1.0 + 1e-12))?.re),
        Err(e) => Err(e),
    }
}

/// Unit null vector of Y at a root, largest entry real and positive.
pub fn mode_voltages(circuit: &Circuit, z: ComplexFrequency) -> Result<CVector> {
    Ok(null_vector(&scaled_admittance(circuit, z.laplace())?).vector)
}

/// ‖D⁻¹ Y V‖ / ‖V‖ with D the row scales.
pub fn mode_residual(circuit: &Circuit, s: Complex64, v: &CVector) -> Result<f64> {
    let y = scaled_admittance(circuit, s)?;
    Ok((&y * v).norm() / v.norm())
}

/// Candidate root from the scan: a frequency and whether it is a double root.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    f: f64,
    double: bool,
}

/// Minimizes a unimodal function on [a, b] by golden-section search.
fn golden_min(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while b - a > 1e-13 * b {
        if g1 < g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - r * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + r * (b - a);
            g2 = g(x2);
        }
    }
    0.5 * (a + b)
}

/// Relative frequency offset used to evaluate a root that coincides with a
/// component pole.
const ON_POLE_SHIFT: f64 = 1e-8;

/// Lossless modes between `cfg.f_min` and `cfg.f_max`.
///
/// The scan function is sampled on the grid f_min + k·step; every interval
/// [f_k, f_{k+2}] with a sign change is solved by Brent's method. Grid points
/// where the function touches zero without changing sign are searched for a
/// double root or a close pair of roots.
pub fn find_modes_lossless(circuit: &Circuit, cfg: &ScanConfig) -> Result<ModeScan> {
    cfg.validate()?;
    if circuit.has_resistors() {
        return Err(Error::Domain("circuit contains resistors; use refine_modes_lossy".into()));
    }
    let count = ((cfg.f_max - cfg.f_min) / cfg.step).ceil() as usize;
    let grid: Vec<f64> = (0..=count.max(2)).map(|k| cfg.f_min + k as f64 * cfg.step).collect();
    let values: Vec<Result<f64>> = grid.par_iter().map(|&f| normalized_det(circuit, f)).collect();
    let mut diagnostics = Vec::new();
    let mut vals = Vec::with_capacity(values.len());
    for (f, v) in grid.iter().zip(values) {
        match v {
            Ok(x) => vals.push(x),
            Err(e) => {
                diagnostics.push(Diagnostic::Evaluation { frequency: *f, error: e.to_string() });
                vals.push(f64::NAN);
            }
        }
    }
    let scan = |f: f64| normalized_det(circuit, f).unwrap_or(f64::NAN);

    let searches: Vec<Vec<Candidate>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let mut out = Vec::new();
            if vals[k] == 0.0 {
                out.push(Candidate { f: grid[k], double: false });
            }
            if k + 2 < grid.len() && vals[k] * vals[k + 2] < 0.0 {
                if let Ok(r) = bracketed_root(scan, grid[k], grid[k + 2], 1e-13 * grid[k + 2]) {
                    out.push(Candidate { f: r.root, double: false });
                }
            }
            if k >= 1 && k + 1 < grid.len() {
                let (l, c, r) = (vals[k - 1], vals[k], vals[k + 1]);
                let s = c.signum();
                if c != 0.0 && l * s > 0.0 && r * s > 0.0 && c.abs() <= l.abs() && c.abs() <= r.abs() {
                    let g = |f: f64| s * scan(f);
                    let fm = golden_min(&g, grid[k - 1], grid[k + 1]);
                    let gm = g(fm);
                    if gm < 0.0 {
                        for (a, b) in [(grid[k - 1], fm), (fm, grid[k + 1])] {
                            if let Ok(root) = bracketed_root(scan, a, b, 1e-13 * b) {
                                out.push(Candidate { f: root.root, double: false });
                            }
                        }
                    } else if gm < 1e-9 * l.abs().max(r.abs()) {
                        out.push(Candidate { f: fm, double: true });
                    }
                }
            }
            out
        })
        .collect();

    let mut cands: Vec<Candidate> = searches
        .into_iter()
        .flatten()
        .filter(|c| c.f >= cfg.f_min && c.f <= cfg.f_max)
        .collect();
    cands.sort_by(|a, b| a.f.partial_cmp(&b.f).unwrap());
    let mut merged: Vec<Candidate> = Vec::new();
    for c in cands {
        match merged.last_mut() {
            Some(last) if c.f - last.f <= cfg.dedup_tol => last.double |= c.double,
            _ => merged.push(c),
        }
    }

    let mut modes = Vec::new();
    for c in merged {
        let value = scan(c.f);
        let mut z = Complex64::new(0.0, 2.0 * PI * c.f);
        // A line resonating on its own sits on its admittance pole. The
        // voltages are taken just off the pole and kept only if they solve Y.
        let on_pole = circuit.pole_proximity(z) < 1e-9;
        if on_pole {
            z *= 1.0 + ON_POLE_SHIFT;
        }
        if !(value.abs() < cfg.det_zero_threshold) {
            diagnostics.push(Diagnostic::RejectedRoot { frequency: c.f, value, reason: "above threshold".into() });
            continue;
        }
        let y = scaled_admittance(circuit, z)?;
        let vectors = if c.double {
            let basis = kernel_basis_abs(&y, 1e-6);
            diagnostics.push(Diagnostic::Degenerate { frequency: c.f, multiplicity: basis.len() });
            basis
        } else {
            vec![null_vector(&y).vector]
        };
        if on_pole && vectors.iter().any(|v| (&y * v).norm() > 1e-6) {
            diagnostics.push(Diagnostic::RejectedRoot { frequency: c.f, value, reason: "component pole".into() });
            continue;
        }
        for v in vectors {
            let residual = (&y * &v).norm();
            if residual > 1e-6 {
                diagnostics.push(Diagnostic::PoorNullVector { frequency: c.f, residual });
            }
            modes.push(Mode::new(ComplexFrequency::from_laplace(z), v, residual, true));
        }
    }
    for w in modes.windows(2) {
        if w[1].frequency != w[0].frequency && w[1].frequency - w[0].frequency < 1e-6 * w[1].frequency {
            diagnostics.push(Diagnostic::NearDegenerate { f1: w[0].frequency, f2: w[1].frequency });
        }
    }
    Ok(ModeScan { modes, diagnostics })
}

/// Complex modes of a circuit with grounded resistors.
///
/// Seeds come from the lossless modes of the circuit with its resistors
/// shorted to ground and, when that leaves no node isolated, with them
/// removed; each seed starts a Newton iteration on the pole-free determinant
/// of the full circuit. Converged roots are merged when they coincide.
/// A shorted-companion seed that fails is reported unrefined, unless the
/// open companion also supplied seeds: a large resistor is badly modelled by
/// a short, so its stray seeds stay diagnostics only.
pub fn refine_modes_lossy(circuit: &Circuit, cfg: &ScanConfig) -> Result<ModeScan> {
    if !circuit.has_resistors() {
        return find_modes_lossless(circuit, cfg);
    }
    let shorted = circuit.reduce_lossless()?;
    let stage1 = if shorted.node_count() > 0 {
        find_modes_lossless(&shorted, cfg)?
    } else {
        ModeScan { modes: Vec::new(), diagnostics: Vec::new() }
    };
    let mut diagnostics = stage1.diagnostics;
    let mut seeds: Vec<(Mode, bool)> = stage1
        .modes
        .into_iter()
        .map(|m| {
            let v = lift_voltages(circuit, &shorted, &m.node_voltages);
            (Mode { node_voltages: v, ..m }, true)
        })
        .collect();
    let mut open_seeded = false;
    if let Ok(open) = circuit.without_resistors() {
        let extra = find_modes_lossless(&open, cfg)?;
        open_seeded = !extra.modes.is_empty();
        seeds.extend(extra.modes.into_iter().map(|m| (m, false)));
    }

    let results: Vec<Result<Complex64>> = seeds
        .par_iter()
        .map(|(m, _)| {
            let seed = m.z.laplace();
            let scale: f64 = circuit.row_scales(seed).iter().product();
            let f = |s: Complex64| match circuit.admittance(s) {
                Ok(y) => det_complex(&y) * circuit.pole_factor(s) / scale,
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            };
            newton_complex(f, seed, NewtonOptions::default()).map(|r| r.root)
        })
        .collect();

    let mut roots: Vec<Complex64> = Vec::new();
    let mut failed: Vec<(Mode, String)> = Vec::new();
    for ((seed, primary), res) in seeds.into_iter().zip(results) {
        match res {
            Ok(s) if s.im > 0.0 => {
                if !roots.iter().any(|r| (r - s).norm() < 1e-7 * s.norm()) {
                    roots.push(s);
                }
            }
            Ok(s) => diagnostics.push(Diagnostic::NewtonFailed {
                frequency: seed.frequency,
                error: format!("converged to non-oscillating root {s}"),
            }),
            Err(e) => {
                diagnostics.push(Diagnostic::NewtonFailed { frequency: seed.frequency, error: e.to_string() });
                if primary && !open_seeded {
                    failed.push((seed, e.to_string()));
                }
            }
        }
    }

    let mut modes = Vec::with_capacity(roots.len() + failed.len());
    for mut s in roots {
        // Decoupled modes come back with κ at rounding level, either sign.
        if s.re > 0.0 && s.re <= 1e-12 * s.im.abs() {
            s.re = 0.0;
        }
        let z = ComplexFrequency::from_laplace(s);
        if z.kappa_half < 0.0 {
            diagnostics.push(Diagnostic::NegativeDamping { frequency: z.frequency_hz(), kappa_half: z.kappa_half });
        }
        let y = scaled_admittance(circuit, s)?;
        let v = null_vector(&y).vector;
        let residual = (&y * &v).norm();
        if residual > 1e-6 {
            diagnostics.push(Diagnostic::PoorNullVector { frequency: z.frequency_hz(), residual });
        }
        modes.push(Mode::new(z, v, residual, true));
    }
    for (seed, _) in failed {
        // keep the seed only if no refined root landed near it
        if !modes.iter().any(|m| (m.frequency - seed.frequency).abs() < 1e-3 * seed.frequency) {
            modes.push(Mode { refined: false, residual: f64::NAN, ..seed });
        }
    }
    modes.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap());
    Ok(ModeScan { modes, diagnostics })
}

/// Embeds node voltages of the reduced circuit into the node set of the full
/// circuit; merged nodes get 0 V.
pub fn lift_voltages(full: &Circuit, reduced: &Circuit, v: &CVector) -> CVector {
    CVector::from_fn(full.node_count(), |i, _| {
        reduced.node_index(&full.nodes()[i]).map(|j| v[j]).unwrap_or_default()
    })
}

/// Mode counts for `cfg` and for half its step; equal counts indicate a
/// converged scan.
pub fn step_halving_counts(circuit: &Circuit, cfg: &ScanConfig) -> Result<(usize, usize)> {
    let a = find_modes_lossless(circuit, cfg)?.modes.len();
    let b = find_modes_lossless(circuit, &cfg.with_step(cfg.step / 2.0))?.modes.len();
    Ok((a, b))
}
