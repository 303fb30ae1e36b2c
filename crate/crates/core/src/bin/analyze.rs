use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lumpline::analysis::{
    cmd_cpw, cmd_modes, cmd_response, cmd_sweep, configure_threads_from_env, parse_grid, upper_pairs,
    CouplerGeometryFile, SweepTable,
};
use lumpline::netlist::{parse_json, parse_netlist, parse_sweep_spec, NetlistDocument, ScanSpec};
use lumpline::{Error, Result};

/// Eigenmodes, impedance and Kerr parameters of superconducting circuits
/// built from lumped elements and transmission lines.
#[derive(Parser)]
#[command(name = "analyze", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mode table with linewidths, participations, α and χ.
    Modes {
        netlist: PathBuf,
        #[arg(long)]
        fmin: Option<f64>,
        #[arg(long)]
        fmax: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Port impedance matrix on a frequency grid (CSV unless --json).
    Response {
        netlist: PathBuf,
        /// Comma-separated port names (declared ports or bare node names).
        #[arg(long, value_delimiter = ',', required = true)]
        ports: Vec<String>,
        /// start:stop:count in Hz.
        #[arg(long)]
        fgrid: String,
        #[arg(long)]
        json: bool,
    },
    /// Parameter sweep (CSV unless --json). Without --spec, runs every sweep
    /// declared in the netlist.
    Sweep {
        netlist: PathBuf,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Single-line impedance or coupler matrices.
    Cpw(CpwArgs),
}

#[derive(Args)]
struct CpwArgs {
    /// Center-strip width [m].
    #[arg(long, requires = "gap")]
    width: Option<f64>,
    /// Gap to ground [m].
    #[arg(long, requires = "width")]
    gap: Option<f64>,
    #[arg(long, default_value_t = 11.9)]
    eps_r: f64,
    /// JSON file with line_widths, gap_widths and optional eps_r.
    #[arg(long)]
    coupler_geometry: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<NetlistDocument> {
    let doc = parse_netlist(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
        other => other,
    })?;
    for w in doc.unit_warnings() {
        eprintln!("warning: {w}");
    }
    Ok(doc)
}

/// Ok(true) when the run completed with solver failures.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Modes { netlist, fmin, fmax, step, json } => {
            let doc = load(&netlist)?;
            let scan = match (fmin, fmax) {
                (Some(f_min), Some(f_max)) => Some(ScanSpec { f_min, f_max, step }),
                (None, None) => doc.analysis.scan.map(|s| ScanSpec { step: step.or(s.step), ..s }),
                _ => return Err(Error::Parse("--fmin and --fmax must be given together".into())),
            };
            let report = cmd_modes(&doc, scan)?;
            print!("{}", if json { report.to_json() + "\n" } else { report.render_text() });
            Ok(report.has_solver_failures())
        }
        Command::Response { netlist, ports, fgrid, json } => {
            let doc = load(&netlist)?;
            let grid = parse_grid(&fgrid)?;
            let table = cmd_response(&doc, &upper_pairs(&ports), &grid)?;
            if json {
                println!("{}", table.to_json());
            } else {
                print!("{}", table.to_csv()?);
            }
            if table.singular_count() > 0 {
                eprintln!("warning: {} singular points flagged", table.singular_count());
            }
            Ok(false)
        }
        Command::Sweep { netlist, spec, json } => {
            let doc = load(&netlist)?;
            let specs = match spec {
                Some(p) => vec![parse_sweep_spec(&read(&p)?)?],
                None if doc.analysis.sweeps.is_empty() => {
                    return Err(Error::Schema("no --spec given and the netlist declares no sweeps".into()))
                }
                None => doc.analysis.sweeps.clone(),
            };
            let tables: Vec<SweepTable> = specs.iter().map(|s| cmd_sweep(&doc, s)).collect::<Result<_>>()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&tables).expect("tables serialize"));
            } else {
                for (k, t) in tables.iter().enumerate() {
                    if k > 0 {
                        println!();
                    }
                    print!("{}", t.to_csv()?);
                }
            }
            Ok(tables.iter().any(|t| t.lost_rows() > 0))
        }
        Command::Cpw(args) => {
            let geometry: Option<CouplerGeometryFile> = match &args.coupler_geometry {
                Some(p) => Some(parse_json(&read(p)?)?),
                None => None,
            };
            let wg = args.width.zip(args.gap);
            let report = cmd_cpw(wg, geometry.as_ref(), args.eps_r)?;
            print!("{}", if args.json { report.to_json() + "\n" } else { report.render_text() });
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("warning: solver did not converge everywhere; partial results written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
