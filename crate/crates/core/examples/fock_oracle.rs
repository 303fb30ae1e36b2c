//! First-order Kerr parameters against exact diagonalization of the quartic
//! Hamiltonian, for a transmon coupled to an LC resonator. The agreement
//! degrades as the junction's zero-point phase grows.
use std::f64::consts::PI;

use lumpline::epr::{oracle_diagonalize, quantize, JunctionMeta};
use lumpline::modes::{find_modes_lossless, ScanConfig};
use lumpline::Circuit;

fn main() -> lumpline::Result<()> {
    // Same 6 GHz bare frequency, rising impedance.
    for lj in [1e-9, 3e-9, 8e-9] {
        let cq = 1.0 / ((2.0 * PI * 6e9).powi(2) * lj);
        let circuit = Circuit::builder()
            .ground("gnd")
            .nodes(["q", "r"])
            .capacitor("Cq", "q", "gnd", cq)
            .junction("J", "q", "gnd", lj, 1)
            .capacitor("Cg", "q", "r", 4e-15)
            .capacitor("Cr", "r", "gnd", 400e-15)
            .inductor("Lr", "r", "gnd", 1e-9)
            .build()?;
        let mut modes = find_modes_lossless(&circuit, &ScanConfig::new(1e9, 20e9))?.modes;
        let (_, h) = quantize(&circuit, &mut modes)?;
        let omegas: Vec<f64> = modes.iter().map(|m| 2.0 * PI * m.frequency).collect();
        let exact = oracle_diagonalize(&omegas, &h.phi_zpf, &JunctionMeta::from_circuit(&circuit), 10)?;
        let q = (0..modes.len()).max_by(|&a, &b| h.alpha[a].total_cmp(&h.alpha[b])).unwrap_or(0);
        let r = 1 - q;
        println!("L_J = {} nH, max φ_zpf = {:.3}", lj * 1e9, h.phi_zpf.amax());
        println!("  α  = {:9.4} MHz, exact {:9.4} MHz", h.alpha[q] * 1e-6, exact.anharmonicities[q] * 1e-6);
        println!("  χ  = {:9.4} MHz, exact {:9.4} MHz", h.chi[(q, r)] * 1e-6, exact.cross_kerr[(q, r)] * 1e-6);
    }
    Ok(())
}
