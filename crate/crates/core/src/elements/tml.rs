use nalgebra::DMatrix;
use num_complex::Complex64;

use super::wave::{is_pole, to_cvec, TravelingWaveState, WaveParameters};
use crate::error::{Error, Result};

/// Two-port admittance of a lossless line of impedance `z0` and length
/// `length`, continued to complex frequency:
/// Y = [[cosh θ, −1], [−1, cosh θ]] / (Z0 sinh θ), θ = zℓ/v.
pub fn tml_admittance(z0: f64, length: f64, wave: &WaveParameters, z: Complex64) -> Result<[[Complex64; 2]; 2]> {
    let theta = wave.gamma(z) * length;
    if is_pole(theta) {
        return Err(Error::Pole("transmission line".into()));
    }
    let s = theta.sinh() * z0;
    let diag = theta.cosh() / s;
    let off = -1.0 / s;
    Ok([[diag, off], [off, diag]])
}

/// Wave amplitudes on a single line fixed by its two end voltages.
pub fn tml_wave_state(
    z0: f64,
    length: f64,
    wave: &WaveParameters,
    z: Complex64,
    v_start: Complex64,
    v_end: Complex64,
) -> Result<TravelingWaveState> {
    let yc = DMatrix::from_element(1, 1, 1.0 / z0);
    TravelingWaveState::from_endpoints(&yc, wave.gamma(z), length, &to_cvec(&[v_start]), &to_cvec(&[v_end]))
}

/// (L/2)∫|I(x)|² dx along the line with L = Z0/v, in closed form.
pub fn tml_inductive_energy(
    z0: f64,
    length: f64,
    wave: &WaveParameters,
    z: Complex64,
    v_start: Complex64,
    v_end: Complex64,
) -> Result<f64> {
    let state = tml_wave_state(z0, length, wave, z, v_start, v_end)?;
    let l_pul = DMatrix::from_element(1, 1, z0 / wave.v);
    Ok(state.inductive_energy(&l_pul))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{singular_quadrature, Endpoints};
    use std::f64::consts::PI;

    fn silicon() -> WaveParameters {
        WaveParameters::from_eps_r(11.9)
    }

    #[test]
    fn velocity_on_silicon() {
        assert!((silicon().v - 1.18043e8).abs() < 1e3);
    }

    #[test]
    fn short_line_is_a_short() {
        let z = Complex64::new(0.0, 2.0 * PI * 5e9);
        let w = silicon();
        let y = tml_admittance(50.0, 1e-9, &w, z).unwrap();
        // series inductance Z0·ℓ/v
        let l = 50.0 * 1e-9 / w.v;
        assert!(y[0][1].norm() > 50.0);
        assert!((y[0][1] + 1.0 / (z * l)).norm() < 1e-6 * y[0][1].norm());
    }

    #[test]
    fn symmetric_entries() {
        let z = Complex64::new(3e7, 2.0 * PI * 7.3e9);
        let y = tml_admittance(66.0, 3.2e-3, &silicon(), z).unwrap();
        assert_eq!(y[0][0], y[1][1]);
        assert_eq!(y[0][1], y[1][0]);
    }

    #[test]
    fn half_wave_resonance_of_open_line() {
        // Open-open line: the antisymmetric vector (1, −1) is a null vector
        // when Y11 − Y12 = coth(θ/2)/Z0 vanishes, i.e. at θ = π.
        let w = silicon();
        let f0 = w.v / (2.0 * 6e-3);
        assert!((f0 - 9.837e9).abs() < 1e6);
        let odd = |f: f64| {
            let y = tml_admittance(50.0, 6e-3, &w, Complex64::new(0.0, 2.0 * PI * f)).unwrap();
            (y[0][0] - y[0][1]).im
        };
        assert!(odd(f0 * 0.999).signum() != odd(f0 * 1.001).signum());
    }

    #[test]
    fn pole_flag() {
        let w = silicon();
        let f = w.v / (2.0 * 6e-3);
        let z = Complex64::new(0.0, 2.0 * PI * f);
        // nudge to an exact multiple of π in θ
        let theta = (z / w.v * 6e-3).im;
        let z = z * (PI / theta);
        assert!(matches!(tml_admittance(50.0, 6e-3, &w, z), Err(Error::Pole(_))));
    }

    #[test]
    fn quarter_wave_energy_matches_quadrature() {
        let w = silicon();
        let ell = 9.8e-3;
        let f = w.v / (4.0 * ell);
        let z = Complex64::new(0.0, 2.0 * PI * f);
        // open end at x = 0, shorted at x = ℓ
        let v0 = Complex64::new(1.0, 0.0);
        let state = tml_wave_state(50.0, ell, &w, z * (1.0 + 1e-9), v0, Complex64::new(0.0, 0.0)).unwrap();
        let l_pul = 50.0 / w.v;
        let closed = tml_inductive_energy(50.0, ell, &w, z * (1.0 + 1e-9), v0, Complex64::new(0.0, 0.0)).unwrap();
        let q = singular_quadrature(|x| state.current(x)[0].norm_sqr(), 0.0, ell, Endpoints::Neither, 1e-14, 0.0).unwrap();
        let numeric = 0.5 * l_pul * q.value;
        assert!((closed - numeric).abs() < 1e-10 * numeric, "{closed} vs {numeric}");
    }

    #[test]
    fn lossy_energy_matches_quadrature() {
        let w = silicon();
        let ell = 4.1e-3;
        let z = Complex64::new(2.0 * PI * 4e6, 2.0 * PI * 6.2e9);
        let (a, b) = (Complex64::new(0.4, -0.3), Complex64::new(-0.7, 0.2));
        let state = tml_wave_state(62.0, ell, &w, z, a, b).unwrap();
        let closed = tml_inductive_energy(62.0, ell, &w, z, a, b).unwrap();
        let q = singular_quadrature(|x| state.current(x)[0].norm_sqr(), 0.0, ell, Endpoints::Neither, 1e-14, 0.0).unwrap();
        let numeric = 0.5 * 62.0 / w.v * q.value;
        assert!((closed - numeric).abs() < 1e-10 * numeric);
    }

    #[test]
    fn zero_field_zero_energy() {
        let z = Complex64::new(0.0, 2.0 * PI * 4e9);
        let e = tml_inductive_energy(50.0, 1e-3, &silicon(), z, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn lumped_limit_of_short_line() {
        // kℓ ≪ 1 with ends (V, 0): the line behaves as an inductor L_pul ℓ.
        let w = silicon();
        let (z0, ell) = (50.0, 10e-6);
        let z = Complex64::new(0.0, 2.0 * PI * 1e8);
        let v = Complex64::new(1.0, 0.0);
        let e = tml_inductive_energy(z0, ell, &w, z, v, Complex64::new(0.0, 0.0)).unwrap();
        let l_tot = z0 / w.v * ell;
        let expected = 0.5 * l_tot * (v / (z * l_tot)).norm_sqr();
        assert!((e - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn port_currents_reproduce_admittance() {
        let w = silicon();
        let z = Complex64::new(1e6, 2.0 * PI * 3.3e9);
        let (a, b) = (Complex64::new(0.4, -0.3), Complex64::new(-0.7, 0.2));
        let y = tml_admittance(50.0, 7e-3, &w, z).unwrap();
        let st = tml_wave_state(50.0, 7e-3, &w, z, a, b).unwrap();
        let (il, ir) = st.port_currents();
        assert!((il[0] - (y[0][0] * a + y[0][1] * b)).norm() < 1e-12 * il[0].norm());
        assert!((ir[0] - (y[1][0] * a + y[1][1] * b)).norm() < 1e-12 * ir[0].norm());
    }
}
