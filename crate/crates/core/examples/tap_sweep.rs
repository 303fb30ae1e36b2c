//! Linewidth of two multiplexed readout resonators as their feedline tap
//! points move along a standing wave.
use lumpline::analysis::cmd_sweep;
use lumpline::netlist::parse_netlist;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/netlists/multiplexed_readout.json");
    let doc = parse_netlist(&std::fs::read_to_string(path)?)?;
    for spec in &doc.analysis.sweeps {
        let table = cmd_sweep(&doc, spec)?;
        println!("{}", spec.name.as_deref().unwrap_or("sweep"));
        for (x, kappa) in table.series(0) {
            println!("  {:6.3} mm  κ/2π = {:8.4} MHz", x * 1e3, kappa * 1e-6);
        }
    }
    Ok(())
}
