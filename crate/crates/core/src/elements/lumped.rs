use num_complex::Complex64;

/// Two-terminal lumped element kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LumpedKind {
    Resistor,
    Capacitor,
    Inductor,
    /// Junction array, stamped through its total linear inductance.
    Junction,
}

/// Y(z) of a lumped element: 1/R, zC or 1/(zL).
pub fn lumped_admittance(kind: LumpedKind, value: f64, z: Complex64) -> Complex64 {
    match kind {
        LumpedKind::Resistor => Complex64::new(1.0 / value, 0.0),
        LumpedKind::Capacitor => z * value,
        LumpedKind::Inductor | LumpedKind::Junction => 1.0 / (z * value),
    }
}

/// ½L|I|² with I = Y·V_drop. Non-inductive elements store no inductive energy.
pub fn lumped_inductive_energy(kind: LumpedKind, value: f64, v_drop: Complex64, z: Complex64) -> f64 {
    match kind {
        LumpedKind::Inductor | LumpedKind::Junction => {
            let i = lumped_admittance(kind, value, z) * v_drop;
            0.5 * value * i.norm_sqr()
        }
        LumpedKind::Resistor | LumpedKind::Capacitor => 0.0,
    }
}

/// Linear inductance used to stamp an array of `count` identical junctions
/// with total inductance `l_total`. The count only enters the Kerr terms.
pub fn equivalent_junction(l_total: f64, count: u32) -> f64 {
    debug_assert!(count >= 1);
    l_total
}
