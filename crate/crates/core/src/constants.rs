//! Physical constants (CODATA 2018, SI).

/// Speed of light in vacuum [m/s].
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant [J·s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant [J·s].
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge [C].
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity [F/m].
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Relative permittivity of silicon, the default substrate.
pub const DEFAULT_EPS_R: f64 = 11.9;

/// Reduced flux quantum ħ/2e [Wb].
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELECTRON_CHARGE);

/// Physical constants carried by a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub eps_r: f64,
    pub c: f64,
    pub hbar: f64,
    pub e: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { eps_r: DEFAULT_EPS_R, c: SPEED_OF_LIGHT, hbar: HBAR, e: ELECTRON_CHARGE }
    }
}

impl PhysicalConstants {
    pub fn with_eps_r(eps_r: f64) -> Self {
        Self { eps_r, ..Self::default() }
    }
}
