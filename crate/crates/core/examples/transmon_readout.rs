//! Transmon, readout resonator and Purcell filter read from a netlist: the
//! full mode table with linewidths, participations and Kerr terms.
use lumpline::analysis::cmd_modes;
use lumpline::netlist::parse_netlist;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/netlists/purcell_pole.json");
    let doc = parse_netlist(&std::fs::read_to_string(path)?)?;
    let report = cmd_modes(&doc, None)?;
    print!("{}", report.render_text());
    for m in report.raw_modes.iter().filter(|m| m.linewidth > 0.0) {
        println!("T1 limit of the {:.3} GHz mode: {:.3e} s", m.frequency * 1e-9, m.lifetime());
    }
    Ok(())
}
