use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector};

/// Propagation on a quasi-TEM CPW line with a uniform half-space substrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParameters {
    /// Phase velocity [m/s].
    pub v: f64,
    /// Effective relative permittivity (ε_r + 1)/2.
    pub eps_eff: f64,
}

impl WaveParameters {
    pub fn from_eps_r(eps_r: f64) -> Self {
        let eps_eff = 0.5 * (eps_r + 1.0);
        Self { v: SPEED_OF_LIGHT / eps_eff.sqrt(), eps_eff }
    }

    /// Complex propagation constant z/v (equals jk on the imaginary axis).
    pub fn gamma(&self, z: Complex64) -> Complex64 {
        z / self.v
    }
}

/// Pole test for sinh(θ): |sinh θ| < 1e-12·cosh(|Re θ|).
pub fn is_pole(theta: Complex64) -> bool {
    theta.sinh().norm() < 1e-12 * theta.re.abs().cosh()
}

/// ∫_0^ℓ e^{βx} dx, with a series for small |βℓ|.
pub fn integrate_exp(beta: Complex64, length: f64) -> Complex64 {
    let t = beta * length;
    if t.norm() < 1e-4 {
        // ℓ (1 + t/2 + t²/6 + t³/24)
        length * (1.0 + t / 2.0 + t * t / 6.0 + t * t * t / 24.0)
    } else {
        (t.exp() - 1.0) / beta
    }
}

/// Per-unit-length matrices of an n-line coupler.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplerMatrices {
    pub n: usize,
    /// Capacitance per unit length [F/m].
    pub c_pul: DMatrix<f64>,
    /// Inductance per unit length [H/m].
    pub l_pul: DMatrix<f64>,
    /// Characteristic impedance matrix [Ω].
    pub z_char: DMatrix<f64>,
    /// Characteristic admittance Z⁻¹ = v·C [S].
    pub y_char: DMatrix<f64>,
    pub wave: WaveParameters,
}

impl CouplerMatrices {
    /// Derives L = C⁻¹/v² and Z = C⁻¹/v from a symmetric positive-definite
    /// capacitance matrix.
    pub fn from_capacitance(c_pul: DMatrix<f64>, wave: WaveParameters) -> Result<Self> {
        let n = c_pul.nrows();
        let chol = c_pul.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let c_inv = chol.inverse();
        let v = wave.v;
        let l_pul = &c_inv / (v * v);
        let z_char = &c_inv / v;
        let y_char = &c_pul * v;
        Ok(Self { n, c_pul, l_pul, z_char, y_char, wave })
    }
}

/// Forward/backward wave amplitudes on an n-line section.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelingWaveState {
    pub v_plus: CVector,
    pub v_minus: CVector,
    pub i_plus: CVector,
    pub i_minus: CVector,
    /// z/v [1/m].
    pub gamma: Complex64,
    pub length: f64,
}

impl TravelingWaveState {
    /// Solves V(0) = V⁺ + V⁻, V(ℓ) = V⁺e^{−γℓ} + V⁻e^{γℓ} and applies
    /// I± = ±Y_c V±. The 2n×2n boundary system is block-scalar, so each line is
    /// solved with the same 2×2 inverse.
    pub fn from_endpoints(
        y_char: &DMatrix<f64>,
        gamma: Complex64,
        length: f64,
        v_start: &CVector,
        v_end: &CVector,
    ) -> Result<Self> {
        let theta = gamma * length;
        if is_pole(theta) {
            return Err(Error::Pole("transmission section".into()));
        }
        let (ep, em) = (theta.exp(), (-theta).exp());
        let det = ep - em;
        let v_plus = (v_start * ep - v_end) / det;
        let v_minus = (v_end - v_start * em) / det;
        let yc = y_char.map(|x| Complex64::new(x, 0.0));
        let i_plus = &yc * &v_plus;
        let i_minus = -(&yc * &v_minus);
        Ok(Self { v_plus, v_minus, i_plus, i_minus, gamma, length })
    }

    pub fn voltage(&self, x: f64) -> CVector {
        &self.v_plus * (-self.gamma * x).exp() + &self.v_minus * (self.gamma * x).exp()
    }

    pub fn current(&self, x: f64) -> CVector {
        &self.i_plus * (-self.gamma * x).exp() + &self.i_minus * (self.gamma * x).exp()
    }

    /// Currents flowing into the section at its left (x = 0) and right
    /// (x = ℓ) ends.
    pub fn port_currents(&self) -> (CVector, CVector) {
        (self.current(0.0), -self.current(self.length))
    }

    /// ½ ∫_0^ℓ I(x)† L I(x) dx evaluated in closed form.
    pub fn inductive_energy(&self, l_pul: &DMatrix<f64>) -> f64 {
        let l = l_pul.map(|x| Complex64::new(x, 0.0));
        let quad = |a: &CVector, b: &CVector| -> Complex64 { a.dotc(&(&l * b)) };
        let a = quad(&self.i_plus, &self.i_plus).re;
        let b = quad(&self.i_minus, &self.i_minus).re;
        let x = quad(&self.i_plus, &self.i_minus);
        let g = self.gamma.re;
        let k2 = Complex64::new(0.0, 2.0 * self.gamma.im);
        let ell = self.length;
        let total = a * integrate_exp(Complex64::new(-2.0 * g, 0.0), ell).re
            + b * integrate_exp(Complex64::new(2.0 * g, 0.0), ell).re
            + 2.0 * (x * integrate_exp(k2, ell)).re;
        0.5 * total.max(0.0)
    }
}

pub(crate) fn to_cvec(values: &[Complex64]) -> CVector {
    DVector::from_column_slice(values)
}

pub(crate) fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}
