//! A transmon coupled to a long multimode resonator: qubit Lamb shift summed
//! mode by mode.
use lumpline::analysis::cmd_modes;
use lumpline::netlist::parse_netlist;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/netlists/multimode_usc.json");
    let doc = parse_netlist(&std::fs::read_to_string(path)?)?;
    let report = cmd_modes(&doc, None)?;
    let q = report.modes.iter().position(|m| m.label.starts_with("junction")).ok_or("no qubit mode")?;
    println!("qubit mode at {:.4} GHz", report.modes[q].frequency * 1e-9);
    let mut total = 0.0;
    for (m, chi) in report.modes.iter().zip(&report.chi[q]) {
        total += 0.5 * chi;
        println!("  up to {:7.3} GHz: Δ = {:8.3} MHz", m.frequency * 1e-9, total * 1e-6);
    }
    Ok(())
}
