//! Transimpedance of a coupled-line notch filter: locate the zero of Im Z12
//! between the two resonances.
use lumpline::analysis::{cmd_response, linear_grid};
use lumpline::netlist::parse_netlist;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/netlists/notch_filter.json");
    let doc = parse_netlist(&std::fs::read_to_string(path)?)?;
    let ports: Vec<String> = doc.analysis.ports.iter().map(|p| p.name.clone()).collect();
    let pair = vec![(ports[0].clone(), ports[1].clone())];
    let table = cmd_response(&doc, &pair, &linear_grid(7e9, 11e9, 801)?)?;
    let series = table.series(0);
    for w in series.windows(2) {
        let (a, b) = (w[0].1.im, w[1].1.im);
        if a.signum() != b.signum() {
            let kind = if (a - b).abs() > 1e3 { "pole" } else { "zero" };
            println!("Im Z12 sign change ({kind}) between {:.4} and {:.4} GHz", w[0].0 * 1e-9, w[1].0 * 1e-9);
        }
    }
    Ok(())
}
