//! The four workflows behind the `analyze` binary: mode tables, multi-port
//! impedance, parameter sweeps and CPW geometry queries.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::circuit::{Circuit, NodeRef};
use crate::cpw::{coupler_matrices, single_line_z0, CpwCrossSection};
use crate::epr::{quantize, EprTable, HamiltonianParams};
use crate::error::{Error, Result};
use crate::modes::{refine_modes_lossy, Diagnostic, Mode, ScanConfig};
use crate::netlist::{
    build_circuit, Extremum, ModeSelector, NetlistDocument, Observable, ResponsePart, ScanSpec, SweepSpec, GROUND,
};
use crate::numerics::{CMatrix, CVector};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "LUMPLINE_THREADS";

/// Configures the global rayon pool from `LUMPLINE_THREADS`. Returns the cap
/// that was applied, if any.
pub fn configure_threads_from_env() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(None) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Parse(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    // A second call (pool already built) is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

fn scan_config(spec: ScanSpec) -> Result<ScanConfig> {
    let mut cfg = ScanConfig::new(spec.f_min, spec.f_max);
    if let Some(step) = spec.step {
        cfg = cfg.with_step(step);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_scan(doc: &NetlistDocument, scan: Option<ScanSpec>) -> Result<ScanConfig> {
    let spec = scan
        .or(doc.analysis.scan)
        .ok_or_else(|| Error::Schema("no scan window: set `analysis.scan` or pass one explicitly".into()))?;
    scan_config(spec)
}

fn serialize_q<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if q.is_finite() {
        s.serialize_f64(*q)
    } else {
        s.serialize_str("inf")
    }
}

fn format_q(q: f64) -> String {
    if q.is_finite() {
        format!("{q:.4e}")
    } else {
        "inf".into()
    }
}

/// One line of a mode table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    pub index: usize,
    /// [Hz]
    pub frequency: f64,
    /// κ/2π [Hz]
    pub linewidth: f64,
    #[serde(serialize_with = "serialize_q")]
    pub q: f64,
    pub label: String,
    /// Participation per junction array, in `ModesReport::junctions` order.
    pub participations: Vec<f64>,
    pub refined: bool,
    /// Share of the mode's inductive energy per component.
    #[serde(skip)]
    pub energy_fractions: BTreeMap<String, f64>,
}

/// Output of [`cmd_modes`]. All frequencies in Hz.
#[derive(Debug, Clone, Serialize)]
pub struct ModesReport {
    pub modes: Vec<ModeRow>,
    pub junctions: Vec<String>,
    pub alpha: Vec<f64>,
    pub chi: Vec<Vec<f64>>,
    pub lamb_shift: Vec<f64>,
    pub diagnostics: Vec<Diagnostic>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub raw_modes: Vec<Mode>,
    #[serde(skip)]
    pub epr: Option<EprTable>,
    #[serde(skip)]
    pub hamiltonian: Option<HamiltonianParams>,
}

impl ModesReport {
    /// True when a solver stage failed and some values are unrefined.
    pub fn has_solver_failures(&self) -> bool {
        self.diagnostics.iter().any(|d| matches!(d, Diagnostic::NewtonFailed { .. }))
            || self.modes.iter().any(|m| !m.refined)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>3}  {:>14}  {:>14}  {:>11}  {:<20}", "#", "f [GHz]", "κ/2π [MHz]", "Q", "label");
        for j in &self.junctions {
            let _ = write!(out, "  {:>8}", format!("p[{j}]"));
        }
        out.push('\n');
        for m in &self.modes {
            let _ = write!(
                out,
                "{:>3}  {:>14.9}  {:>14.6e}  {:>11}  {:<20}",
                m.index,
                m.frequency / 1e9,
                m.linewidth / 1e6,
                format_q(m.q),
                m.label
            );
            for p in &m.participations {
                let _ = write!(out, "  {p:>8.5}");
            }
            if !m.refined {
                out.push_str("  (unrefined)");
            }
            out.push('\n');
        }
        if !self.junctions.is_empty() && !self.modes.is_empty() {
            out.push_str("\nanharmonicity α [MHz]:");
            for a in &self.alpha {
                let _ = write!(out, " {:.6}", a / 1e6);
            }
            out.push_str("\nLamb shift Δ [MHz]:");
            for d in &self.lamb_shift {
                let _ = write!(out, " {:.6}", d / 1e6);
            }
            out.push_str("\ncross-Kerr χ [MHz]:\n");
            for row in &self.chi {
                for v in row {
                    let _ = write!(out, " {:>14.6e}", v / 1e6);
                }
                out.push('\n');
            }
        }
        for d in &self.diagnostics {
            let _ = writeln!(out, "diagnostic: {}", serde_json::to_string(d).unwrap_or_default());
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

/// Modes, participations, labels and Kerr parameters of a built circuit.
pub fn analyze_circuit(circuit: &Circuit, cfg: &ScanConfig) -> Result<ModesReport> {
    let scan = refine_modes_lossy(circuit, cfg)?;
    let mut modes = scan.modes;
    let mut warnings = Vec::new();
    let (epr, ham) = match quantize(circuit, &mut modes) {
        Ok((e, h)) => (Some(e), Some(h)),
        Err(e) => {
            warnings.push(format!("quantization skipped: {e}"));
            (None, None)
        }
    };
    let junctions = epr.as_ref().map(|e| e.junctions.clone()).unwrap_or_default();
    let rows = modes
        .iter()
        .enumerate()
        .map(|(k, m)| ModeRow {
            index: k,
            frequency: m.frequency,
            linewidth: m.linewidth,
            q: m.q,
            label: m.label.clone().unwrap_or_default(),
            participations: epr.as_ref().map(|e| e.p.row(k).iter().copied().collect()).unwrap_or_default(),
            refined: m.refined,
            energy_fractions: epr
                .as_ref()
                .map(|e| {
                    let total = e.inductive_energy_total[k];
                    e.per_component_energy[k].iter().map(|(n, v)| (n.clone(), v / total)).collect()
                })
                .unwrap_or_default(),
        })
        .collect();
    let (alpha, chi, lamb_shift) = match &ham {
        Some(h) => (
            h.alpha.clone(),
            (0..h.chi.nrows()).map(|i| h.chi.row(i).iter().copied().collect()).collect(),
            h.lamb_shift.clone(),
        ),
        None => Default::default(),
    };
    Ok(ModesReport {
        modes: rows,
        junctions,
        alpha,
        chi,
        lamb_shift,
        diagnostics: scan.diagnostics,
        warnings,
        raw_modes: modes,
        epr,
        hamiltonian: ham,
    })
}

/// Mode table for a netlist. `scan` overrides the document's scan window.
pub fn cmd_modes(doc: &NetlistDocument, scan: Option<ScanSpec>) -> Result<ModesReport> {
    let cfg = resolve_scan(doc, scan)?;
    let circuit = build_circuit(doc)?;
    let mut report = analyze_circuit(&circuit, &cfg)?;
    let mut w = doc.unit_warnings();
    w.append(&mut report.warnings);
    report.warnings = w;
    Ok(report)
}

/// Injection vector of a port: +1 at `plus`, −1 at `minus`, ground dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub name: String,
    pub plus: NodeRef,
    pub minus: NodeRef,
}

impl Port {
    pub fn new(circuit: &Circuit, name: &str, plus: &str, minus: &str) -> Result<Self> {
        let node = |n: &str| -> Result<NodeRef> {
            if n == circuit.ground_name() {
                Ok(NodeRef::Ground)
            } else {
                circuit.node_index(n).map(NodeRef::Node).ok_or_else(|| Error::DanglingNode(n.to_string()))
            }
        };
        Ok(Self { name: name.to_string(), plus: node(plus)?, minus: node(minus)? })
    }

    fn vector(&self, n: usize) -> CVector {
        let mut e = CVector::zeros(n);
        if let NodeRef::Node(i) = self.plus {
            e[i] += 1.0;
        }
        if let NodeRef::Node(i) = self.minus {
            e[i] -= 1.0;
        }
        e
    }
}

/// Port impedance matrix Z = Eᵀ Y⁻¹ E at frequency `f`; None when Y is
/// singular or an element sits on a pole.
pub fn impedance_matrix(circuit: &Circuit, ports: &[Port], f: f64) -> Option<CMatrix> {
    let s = Complex64::new(0.0, 2.0 * PI * f);
    let y = circuit.admittance(s).ok()?;
    let n = circuit.node_count();
    let e = CMatrix::from_columns(&ports.iter().map(|p| p.vector(n)).collect::<Vec<_>>());
    let x = y.lu().solve(&e)?;
    let z = e.transpose() * x;
    z.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then_some(z)
}

fn resolve_ports(doc: &NetlistDocument, circuit: &Circuit, names: &[String]) -> Result<Vec<Port>> {
    names
        .iter()
        .map(|name| match doc.analysis.ports.iter().find(|p| &p.name == name) {
            Some(p) => Port::new(circuit, &p.name, &p.plus, &p.minus),
            // A bare node name is a port to ground.
            None if circuit.node_index(name).is_some() => Port::new(circuit, name, name, GROUND),
            None => Err(Error::Schema(format!("unknown port `{name}`"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseRow {
    pub frequency: f64,
    /// One complex entry per requested pair; None where the reduction is
    /// singular.
    pub values: Vec<Option<Complex64>>,
}

/// Z(f) table for requested (row, column) port pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseTable {
    pub entries: Vec<(String, String)>,
    pub rows: Vec<ResponseRow>,
}

impl ResponseTable {
    pub fn singular_count(&self) -> usize {
        self.rows.iter().map(|r| r.values.iter().filter(|v| v.is_none()).count()).sum()
    }

    /// Column `k` as (f, value) pairs, skipping flagged points.
    pub fn series(&self, k: usize) -> Vec<(f64, Complex64)> {
        self.rows.iter().filter_map(|r| r.values[k].map(|v| (r.frequency, v))).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["frequency_hz".to_string()];
        for (a, b) in &self.entries {
            header.push(format!("re_z_{a}_{b}"));
            header.push(format!("im_z_{a}_{b}"));
        }
        header.push("flags".into());
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![format!("{:e}", r.frequency)];
            let mut flags = Vec::new();
            for ((a, b), v) in self.entries.iter().zip(&r.values) {
                match v {
                    Some(z) => {
                        rec.push(format!("{:e}", z.re));
                        rec.push(format!("{:e}", z.im));
                    }
                    None => {
                        rec.push(String::new());
                        rec.push(String::new());
                        flags.push(format!("singular z_{a}_{b}"));
                    }
                }
            }
            rec.push(flags.join("; "));
            w.write_record(&rec).map_err(csv_err)?;
        }
        finish_csv(w)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Entry<'a> {
            row: &'a str,
            col: &'a str,
            frequency: Vec<f64>,
            re: Vec<Option<f64>>,
            im: Vec<Option<f64>>,
        }
        let entries: Vec<Entry> = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, (a, b))| Entry {
                row: a,
                col: b,
                frequency: self.rows.iter().map(|r| r.frequency).collect(),
                re: self.rows.iter().map(|r| r.values[k].map(|v| v.re)).collect(),
                im: self.rows.iter().map(|r| r.values[k].map(|v| v.im)).collect(),
            })
            .collect();
        serde_json::to_string_pretty(&entries).expect("response serializes")
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Parses `a:b:n` into n evenly spaced frequencies from a to b inclusive.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Parse(format!("frequency grid `{text}`: expected start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    linear_grid(a, b, n)
}

pub fn linear_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(b > a) || !(a > 0.0) {
        return Err(Error::Domain(format!("grid {a}:{b}:{n} must be positive, increasing, with at least 2 points")));
    }
    Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
}

fn response_on(circuit: &Circuit, ports: &[Port], pairs: &[(usize, usize)], f_grid: &[f64]) -> Vec<ResponseRow> {
    f_grid
        .par_iter()
        .map(|&f| {
            let z = impedance_matrix(circuit, ports, f);
            ResponseRow { frequency: f, values: pairs.iter().map(|&(a, b)| z.as_ref().map(|z| z[(a, b)])).collect() }
        })
        .collect()
}

/// Z-parameters between named ports on a strictly increasing grid.
pub fn cmd_response(doc: &NetlistDocument, port_pairs: &[(String, String)], f_grid: &[f64]) -> Result<ResponseTable> {
    if f_grid.windows(2).any(|w| !(w[1] > w[0])) || f_grid.first().is_some_and(|f| !(*f > 0.0)) {
        return Err(Error::Domain("frequency grid must be positive and strictly increasing".into()));
    }
    let circuit = build_circuit(doc)?;
    let mut names: Vec<String> = Vec::new();
    for (a, b) in port_pairs {
        for p in [a, b] {
            if !names.contains(p) {
                names.push(p.clone());
            }
        }
    }
    let ports = resolve_ports(doc, &circuit, &names)?;
    let idx = |p: &String| names.iter().position(|n| n == p).unwrap();
    let pairs: Vec<(usize, usize)> = port_pairs.iter().map(|(a, b)| (idx(a), idx(b))).collect();
    Ok(ResponseTable { entries: port_pairs.to_vec(), rows: response_on(&circuit, &ports, &pairs, f_grid) })
}

/// All (a, b) pairs with a ≤ b over a port list.
pub fn upper_pairs(names: &[String]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i..] {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// Row of a sweep table. `status` is `ok`, `ModeLost: …` or `error: …`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub observables: Vec<Option<f64>>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub name: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Column `k` as (x, y) pairs over rows where it resolved.
    pub fn series(&self, k: usize) -> Vec<(f64, f64)> {
        self.rows.iter().filter_map(|r| r.observables[k].map(|y| (r.value, y))).collect()
    }

    pub fn lost_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "ok").count()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["value".to_string()];
        header.extend(self.columns.iter().cloned());
        header.push("status".into());
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![format!("{:e}", r.value)];
            rec.extend(r.observables.iter().map(|v| v.map(|x| format!("{x:e}")).unwrap_or_default()));
            rec.push(r.status.clone());
            w.write_record(&rec).map_err(csv_err)?;
        }
        finish_csv(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep serializes")
    }
}

fn selector_name(s: &ModeSelector) -> String {
    match s {
        ModeSelector::Label(l) => l.clone(),
        ModeSelector::Near(f) => format!("near {:.4} GHz", f / 1e9),
        ModeSelector::Index(k) => format!("mode {k}"),
        ModeSelector::Component(c) => format!("mode in {c}"),
    }
}

fn observable_name(o: &Observable) -> String {
    match o {
        Observable::Frequency { mode } => format!("frequency_hz[{}]", selector_name(mode)),
        Observable::Linewidth { mode } => format!("linewidth_hz[{}]", selector_name(mode)),
        Observable::PurcellTime { mode } => format!("decay_time_s[{}]", selector_name(mode)),
        Observable::Anharmonicity { mode } => format!("alpha_hz[{}]", selector_name(mode)),
        Observable::Chi { a, b } => format!("chi_hz[{},{}]", selector_name(a), selector_name(b)),
        Observable::ResponseExtremum { row, col, part, extremum, .. } => {
            format!("{:?}_{:?}_z_{row}_{col}_frequency_hz", extremum, part).to_lowercase()
        }
    }
}

/// Relative frequency jump beyond which a nearest-frequency match counts as
/// lost.
const MAX_TRACK_JUMP: f64 = 0.25;

/// Picks a mode index and updates the tracking state (last frequency).
fn select(sel: &ModeSelector, modes: &[ModeRow], prev: &mut Option<f64>) -> std::result::Result<usize, String> {
    let nearest = |cands: Vec<usize>, target: f64| {
        cands.into_iter().min_by(|&a, &b| {
            (modes[a].frequency - target).abs().total_cmp(&(modes[b].frequency - target).abs())
        })
    };
    let picked = match sel {
        ModeSelector::Label(l) => {
            let cands: Vec<usize> = modes.iter().filter(|m| &m.label == l).map(|m| m.index).collect();
            match *prev {
                Some(f) => nearest(cands, f),
                None => cands.first().copied(),
            }
        }
        ModeSelector::Near(f0) => {
            let target = prev.unwrap_or(*f0);
            nearest((0..modes.len()).collect(), target)
                .filter(|&k| (modes[k].frequency - target).abs() <= MAX_TRACK_JUMP * target)
        }
        ModeSelector::Index(k) => (*k < modes.len()).then_some(*k),
        ModeSelector::Component(c) => {
            let share = |k: usize| modes[k].energy_fractions.get(c).copied().unwrap_or(0.0);
            (0..modes.len()).filter(|&k| share(k) > 0.0).max_by(|&a, &b| share(a).total_cmp(&share(b)))
        }
    };
    match picked {
        Some(k) => {
            *prev = Some(modes[k].frequency);
            Ok(k)
        }
        None => Err(selector_name(sel)),
    }
}

struct PointData {
    modes: Option<ModesReport>,
    responses: Vec<Option<f64>>,
}

fn needs_modes(spec: &SweepSpec) -> bool {
    spec.observables.iter().any(|o| !matches!(o, Observable::ResponseExtremum { .. }))
}

fn evaluate_point(doc: &NetlistDocument, spec: &SweepSpec, cfg: Option<&ScanConfig>, x: f64) -> Result<PointData> {
    let point = doc.with_sweep_value(&spec.targets, x)?;
    let circuit = build_circuit(&point)?;
    let modes = match cfg {
        Some(cfg) => Some(analyze_circuit(&circuit, cfg)?),
        None => None,
    };
    let mut responses = Vec::new();
    for o in &spec.observables {
        if let Observable::ResponseExtremum { row, col, f_min, f_max, points, part, extremum } = o {
            let names = vec![row.clone(), col.clone()];
            let ports = resolve_ports(doc, &circuit, &names)?;
            let grid = linear_grid(*f_min, *f_max, *points)?;
            let rows = response_on(&circuit, &ports, &[(0, 1)], &grid);
            let value = |z: Complex64| match part {
                ResponsePart::Re => z.re,
                ResponsePart::Im => z.im,
                ResponsePart::Abs => z.norm(),
            };
            let sign = if *extremum == Extremum::Max { 1.0 } else { -1.0 };
            let best = rows
                .iter()
                .filter_map(|r| r.values[0].map(|z| (r.frequency, sign * value(z))))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(f, _)| f);
            responses.push(best);
        }
    }
    Ok(PointData { modes, responses })
}

/// Runs a sweep. Points are evaluated in parallel; mode tracking runs in
/// value order afterwards, so output is deterministic. Every value yields a
/// row even when tracking or evaluation fails.
pub fn cmd_sweep(doc: &NetlistDocument, spec: &SweepSpec) -> Result<SweepTable> {
    doc.check_sweep(spec)?;
    let cfg = if needs_modes(spec) { Some(resolve_scan(doc, spec.scan)?) } else { None };
    let values = spec.values.values();
    let points: Vec<Result<PointData>> =
        values.par_iter().map(|&x| evaluate_point(doc, spec, cfg.as_ref(), x)).collect();

    let mut trackers: Vec<[Option<f64>; 2]> = vec![[None, None]; spec.observables.len()];
    let mut rows = Vec::with_capacity(values.len());
    for (&x, point) in values.iter().zip(points) {
        let point = match point {
            Ok(p) => p,
            Err(e) => {
                rows.push(SweepRow { value: x, observables: vec![None; spec.observables.len()], status: format!("error: {e}") });
                continue;
            }
        };
        let mut lost = Vec::new();
        let mut resp = point.responses.into_iter();
        let mut obs = Vec::with_capacity(spec.observables.len());
        for (o, track) in spec.observables.iter().zip(trackers.iter_mut()) {
            let v = match (o, &point.modes) {
                (Observable::ResponseExtremum { .. }, _) => resp.next().flatten(),
                (_, None) => None,
                (Observable::Chi { a, b }, Some(r)) => {
                    let [ta, tb] = track;
                    match (select(a, &r.modes, ta), select(b, &r.modes, tb)) {
                        (Ok(i), Ok(j)) => r.chi.get(i).and_then(|row| row.get(j)).copied(),
                        (ia, ib) => {
                            lost.extend(ia.err());
                            lost.extend(ib.err());
                            None
                        }
                    }
                }
                (
                    Observable::Frequency { mode }
                    | Observable::Linewidth { mode }
                    | Observable::PurcellTime { mode }
                    | Observable::Anharmonicity { mode },
                    Some(r),
                ) => match select(mode, &r.modes, &mut track[0]) {
                    Ok(k) => {
                        let m = &r.modes[k];
                        match o {
                            Observable::Frequency { .. } => Some(m.frequency),
                            Observable::Linewidth { .. } => Some(m.linewidth),
                            Observable::PurcellTime { .. } => Some(1.0 / (2.0 * PI * m.linewidth)),
                            _ => r.alpha.get(k).copied(),
                        }
                    }
                    Err(name) => {
                        lost.push(name);
                        None
                    }
                },
            };
            obs.push(v);
        }
        let status = if lost.is_empty() { "ok".to_string() } else { format!("ModeLost: {}", lost.join(", ")) };
        rows.push(SweepRow { value: x, observables: obs, status });
    }
    Ok(SweepTable { name: spec.name.clone(), columns: spec.observables.iter().map(observable_name).collect(), rows })
}

/// Coupler cross-section file for `analyze cpw --coupler-geometry`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerGeometryFile {
    pub line_widths: Vec<f64>,
    pub gap_widths: Vec<f64>,
    #[serde(default)]
    pub eps_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplerReport {
    pub line_widths: Vec<f64>,
    pub gap_widths: Vec<f64>,
    /// [F/m]
    pub c_pul: Vec<Vec<f64>>,
    /// [H/m]
    pub l_pul: Vec<Vec<f64>>,
    /// [Ω]
    pub z_char: Vec<Vec<f64>>,
    /// max |L·C·v² − I|
    pub lc_identity_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpwReport {
    pub eps_r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_line: Option<SingleLineReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupler: Option<CouplerReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleLineReport {
    pub width: f64,
    pub gap: f64,
    pub z0: f64,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Single-line impedance and/or coupler matrices.
pub fn cmd_cpw(
    width_gap: Option<(f64, f64)>,
    coupler: Option<&CouplerGeometryFile>,
    eps_r: f64,
) -> Result<CpwReport> {
    if width_gap.is_none() && coupler.is_none() {
        return Err(Error::Geometry("give --width and --gap, or a coupler geometry".into()));
    }
    let single_line = match width_gap {
        Some((w, g)) => Some(SingleLineReport { width: w, gap: g, z0: single_line_z0(w, g, eps_r)? }),
        None => None,
    };
    let coupler = match coupler {
        Some(g) => {
            let eps = g.eps_r.unwrap_or(eps_r);
            let cs = CpwCrossSection::new(g.line_widths.clone(), g.gap_widths.clone(), eps)?;
            let m = coupler_matrices(&cs)?;
            let v2 = m.wave.v * m.wave.v;
            let prod = &m.l_pul * &m.c_pul * v2 - DMatrix::identity(m.n, m.n);
            Some(CouplerReport {
                line_widths: g.line_widths.clone(),
                gap_widths: g.gap_widths.clone(),
                c_pul: rows_of(&m.c_pul),
                l_pul: rows_of(&m.l_pul),
                z_char: rows_of(&m.z_char),
                lc_identity_error: prod.amax(),
            })
        }
        None => None,
    };
    Ok(CpwReport { eps_r, single_line, coupler })
}

impl CpwReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cpw report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ε_r = {}", self.eps_r);
        if let Some(s) = &self.single_line {
            let _ = writeln!(out, "w = {:.3} µm, g = {:.3} µm: Z0 = {:.4} Ω", s.width * 1e6, s.gap * 1e6, s.z0);
        }
        if let Some(c) = &self.coupler {
            let um = |v: &[f64]| v.iter().map(|x| format!("{:.3}", x * 1e6)).collect::<Vec<_>>().join(", ");
            let _ = writeln!(out, "coupler lines [µm]: {}; gaps [µm]: {}", um(&c.line_widths), um(&c.gap_widths));
            let block = |out: &mut String, title: &str, m: &[Vec<f64>], scale: f64| {
                let _ = writeln!(out, "{title}");
                for row in m {
                    let cells: Vec<String> = row.iter().map(|v| format!("{:>12.5}", v * scale)).collect();
                    let _ = writeln!(out, "  {}", cells.join(" "));
                }
            };
            block(&mut out, "C [pF/m]:", &c.c_pul, 1e12);
            block(&mut out, "L [nH/m]:", &c.l_pul, 1e9);
            block(&mut out, "Z [Ω]:", &c.z_char, 1.0);
            let _ = writeln!(out, "max |L·C·v² − I| = {:.2e}", c.lc_identity_error);
        }
        out
    }
}
