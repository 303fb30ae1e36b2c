//! Modes of a lossless LC, then of an RLC, against the textbook values.
use std::f64::consts::PI;

use lumpline::modes::{find_modes_lossless, refine_modes_lossy, ScanConfig};
use lumpline::Circuit;

fn main() -> lumpline::Result<()> {
    let (c, l, r) = (100e-15, 10e-9, 5e4);
    let cfg = ScanConfig::new(1e9, 10e9);

    let lc = Circuit::builder().ground("gnd").node("a").capacitor("C", "a", "gnd", c).inductor("L", "a", "gnd", l).build()?;
    let f0 = 1.0 / (2.0 * PI * (l * c).sqrt());
    let m = &find_modes_lossless(&lc, &cfg)?.modes[0];
    println!("LC:  f = {:.6} GHz (1/2π√LC = {:.6} GHz)", m.frequency * 1e-9, f0 * 1e-9);

    let rlc = Circuit::builder()
        .ground("gnd")
        .node("a")
        .capacitor("C", "a", "gnd", c)
        .inductor("L", "a", "gnd", l)
        .resistor("R", "a", "gnd", r)
        .build()?;
    let m = &refine_modes_lossy(&rlc, &cfg)?.modes[0];
    // Parallel RLC: κ = 1/RC, ω = √(ω0² − κ²/4).
    let kappa = 1.0 / (r * c);
    let f_damped = ((2.0 * PI * f0).powi(2) - 0.25 * kappa * kappa).sqrt() / (2.0 * PI);
    println!("RLC: f = {:.6} GHz (expected {:.6} GHz)", m.frequency * 1e-9, f_damped * 1e-9);
    println!("     κ/2π = {:.4} MHz (expected {:.4} MHz), Q = {:.1}", m.linewidth * 1e-6, kappa / (2.0 * PI) * 1e-6, m.q);
    Ok(())
}
