use num_complex::Complex64;

use super::wave::{is_pole, real_to_complex, CouplerMatrices, TravelingWaveState};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector};

/// Indices of the two signal lines inside the n-line cross-section.
fn signal_lines(mats: &CouplerMatrices, grounded_center: bool) -> Result<(usize, usize)> {
    match (mats.n, grounded_center) {
        (2, false) => Ok((0, 1)),
        (3, true) => Ok((0, 2)),
        (n, g) => Err(Error::Geometry(format!(
            "coupler with {n} lines is incompatible with grounded_center = {g}"
        ))),
    }
}

/// Line-end voltage vectors for port voltages ordered
/// (line1-left, line1-right, line2-left, line2-right); the grounded center
/// line, if any, is held at 0 V at both ends.
fn end_voltages(mats: &CouplerMatrices, grounded_center: bool, ports: &[Complex64; 4]) -> Result<(CVector, CVector)> {
    let (l1, l2) = signal_lines(mats, grounded_center)?;
    let mut start = CVector::zeros(mats.n);
    let mut end = CVector::zeros(mats.n);
    start[l1] = ports[0];
    end[l1] = ports[1];
    start[l2] = ports[2];
    end[l2] = ports[3];
    Ok((start, end))
}

/// Traveling-wave amplitudes on the coupler for the given port voltages.
pub fn coupler_wave_state(
    mats: &CouplerMatrices,
    length: f64,
    z: Complex64,
    grounded_center: bool,
    ports: &[Complex64; 4],
) -> Result<TravelingWaveState> {
    let (start, end) = end_voltages(mats, grounded_center, ports)?;
    TravelingWaveState::from_endpoints(&mats.y_char, mats.wave.gamma(z), length, &start, &end)
        .map_err(|e| match e {
            Error::Pole(_) => Error::Pole("coupler".into()),
            other => other,
        })
}

/// 4×4 admittance of a coupler, assembled column by column: port i is driven
/// with 1 V while the other ports (and the center conductor, when grounded)
/// are held at 0 V, and the resulting port currents form column i. Currents
/// flowing into the coupler are positive.
pub fn coupler_admittance(mats: &CouplerMatrices, length: f64, z: Complex64, grounded_center: bool) -> Result<CMatrix> {
    let (l1, l2) = signal_lines(mats, grounded_center)?;
    let mut y = CMatrix::zeros(4, 4);
    for col in 0..4 {
        let mut ports = [Complex64::new(0.0, 0.0); 4];
        ports[col] = Complex64::new(1.0, 0.0);
        let state = coupler_wave_state(mats, length, z, grounded_center, &ports)?;
        let (left, right) = state.port_currents();
        y[(0, col)] = left[l1];
        y[(1, col)] = right[l1];
        y[(2, col)] = left[l2];
        y[(3, col)] = right[l2];
    }
    Ok(y)
}

/// Closed-form coupler admittance [[Y_c coth θ, −Y_c csch θ], [−Y_c csch θ,
/// Y_c coth θ]] restricted to the signal-line ports.
pub fn coupler_admittance_closed_form(
    mats: &CouplerMatrices,
    length: f64,
    z: Complex64,
    grounded_center: bool,
) -> Result<CMatrix> {
    let (l1, l2) = signal_lines(mats, grounded_center)?;
    let theta = mats.wave.gamma(z) * length;
    if is_pole(theta) {
        return Err(Error::Pole("coupler".into()));
    }
    let coth = theta.cosh() / theta.sinh();
    let csch = 1.0 / theta.sinh();
    let yc = real_to_complex(&mats.y_char);
    let lines = [l1, l1, l2, l2];
    let left = [true, false, true, false];
    Ok(CMatrix::from_fn(4, 4, |r, c| {
        let base = yc[(lines[r], lines[c])];
        if left[r] == left[c] {
            base * coth
        } else {
            -base * csch
        }
    }))
}

/// ½∫ I(x)† L I(x) dx over the coupler for the given port voltages.
pub fn coupler_inductive_energy(
    mats: &CouplerMatrices,
    length: f64,
    z: Complex64,
    grounded_center: bool,
    ports: &[Complex64; 4],
) -> Result<f64> {
    let state = coupler_wave_state(mats, length, z, grounded_center, ports)?;
    Ok(state.inductive_energy(&mats.l_pul))
}
