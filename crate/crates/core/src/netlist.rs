//! JSON netlist documents.
//!
//! Values are plain SI numbers (ohms, farads, henries, meters, hertz). The
//! node name `gnd` is the ground and may be listed in `nodes` or left implicit.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "nodes": ["n1"],
//!   "components": [
//!     {"kind": "capacitor", "name": "C1", "nodes": ["n1", "gnd"], "capacitance": 1e-13},
//!     {"kind": "inductor", "name": "L1", "nodes": ["n1", "gnd"], "inductance": 1e-8}
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, ComponentKind};
use crate::constants::DEFAULT_EPS_R;
use crate::cpw::{coupler_matrices, CpwCrossSection};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const GROUND: &str = "gnd";

fn default_eps_r() -> f64 {
    DEFAULT_EPS_R
}

fn default_count() -> u32 {
    1
}

fn default_ground() -> String {
    GROUND.to_string()
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default = "default_eps_r")]
    pub eps_r: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { eps_r: DEFAULT_EPS_R }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    Resistor { name: String, nodes: Vec<String>, resistance: f64 },
    Capacitor { name: String, nodes: Vec<String>, capacitance: f64 },
    Inductor { name: String, nodes: Vec<String>, inductance: f64 },
    Junction {
        name: String,
        nodes: Vec<String>,
        inductance: f64,
        #[serde(default = "default_count")]
        count: u32,
    },
    Line { name: String, nodes: Vec<String>, z0: f64, length: f64 },
    /// Nodes are (line1-left, line1-right, line2-left, line2-right).
    Coupler {
        name: String,
        nodes: Vec<String>,
        geometry: String,
        length: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        grounded_center: bool,
    },
}

impl ComponentSpec {
    pub fn name(&self) -> &str {
        match self {
            ComponentSpec::Resistor { name, .. }
            | ComponentSpec::Capacitor { name, .. }
            | ComponentSpec::Inductor { name, .. }
            | ComponentSpec::Junction { name, .. }
            | ComponentSpec::Line { name, .. }
            | ComponentSpec::Coupler { name, .. } => name,
        }
    }

    pub fn nodes(&self) -> &[String] {
        match self {
            ComponentSpec::Resistor { nodes, .. }
            | ComponentSpec::Capacitor { nodes, .. }
            | ComponentSpec::Inductor { nodes, .. }
            | ComponentSpec::Junction { nodes, .. }
            | ComponentSpec::Line { nodes, .. }
            | ComponentSpec::Coupler { nodes, .. } => nodes,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ComponentSpec::Resistor { .. } => "resistor",
            ComponentSpec::Capacitor { .. } => "capacitor",
            ComponentSpec::Inductor { .. } => "inductor",
            ComponentSpec::Junction { .. } => "junction",
            ComponentSpec::Line { .. } => "line",
            ComponentSpec::Coupler { .. } => "coupler",
        }
    }

    /// Numeric parameters that a sweep may target.
    pub fn parameter_names(&self) -> &'static [&'static str] {
        match self {
            ComponentSpec::Resistor { .. } => &["resistance"],
            ComponentSpec::Capacitor { .. } => &["capacitance"],
            ComponentSpec::Inductor { .. } => &["inductance"],
            ComponentSpec::Junction { .. } => &["inductance", "count"],
            ComponentSpec::Line { .. } => &["z0", "length"],
            ComponentSpec::Coupler { .. } => &["length"],
        }
    }

    pub fn parameter(&self, param: &str) -> Option<f64> {
        match (self, param) {
            (ComponentSpec::Resistor { resistance, .. }, "resistance") => Some(*resistance),
            (ComponentSpec::Capacitor { capacitance, .. }, "capacitance") => Some(*capacitance),
            (ComponentSpec::Inductor { inductance, .. }, "inductance") => Some(*inductance),
            (ComponentSpec::Junction { inductance, .. }, "inductance") => Some(*inductance),
            (ComponentSpec::Junction { count, .. }, "count") => Some(*count as f64),
            (ComponentSpec::Line { z0, .. }, "z0") => Some(*z0),
            (ComponentSpec::Line { length, .. }, "length") => Some(*length),
            (ComponentSpec::Coupler { length, .. }, "length") => Some(*length),
            _ => None,
        }
    }

    /// Sets a numeric parameter. Junction counts are rounded to the nearest
    /// integer.
    pub fn set_parameter(&mut self, param: &str, value: f64) -> Result<()> {
        let slot: &mut f64 = match (&mut *self, param) {
            (ComponentSpec::Junction { count, .. }, "count") => {
                let r = value.round();
                if !(r >= 1.0 && r <= u32::MAX as f64) {
                    return Err(Error::Schema(format!("junction count {value} out of range")));
                }
                *count = r as u32;
                return Ok(());
            }
            (ComponentSpec::Resistor { resistance, .. }, "resistance") => resistance,
            (ComponentSpec::Capacitor { capacitance, .. }, "capacitance") => capacitance,
            (ComponentSpec::Inductor { inductance, .. }, "inductance")
            | (ComponentSpec::Junction { inductance, .. }, "inductance") => inductance,
            (ComponentSpec::Line { z0, .. }, "z0") => z0,
            (ComponentSpec::Line { length, .. }, "length") | (ComponentSpec::Coupler { length, .. }, "length") => length,
            _ => {
                return Err(Error::Schema(format!(
                    "component `{}` ({}) has no numeric parameter `{param}`",
                    self.name(),
                    self.kind_name()
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Line and gap widths of a CPW cross-section [m]; the permittivity comes
/// from the document constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub line_widths: Vec<f64>,
    pub gap_widths: Vec<f64>,
}

impl GeometrySpec {
    pub fn cross_section(&self, eps_r: f64) -> Result<CpwCrossSection> {
        CpwCrossSection::new(self.line_widths.clone(), self.gap_widths.clone(), eps_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub f_min: f64,
    pub f_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

/// A port between two nodes; current is injected at `plus`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortSpec {
    pub name: String,
    pub plus: String,
    #[serde(default = "default_ground")]
    pub minus: String,
}

/// `{"list": [...]}` or `{"linspace": {"start", "stop", "count"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepValues {
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, count: usize },
}

impl SweepValues {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            SweepValues::List(ref v) => v.clone(),
            SweepValues::Linspace { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..count).map(|k| start + (stop - start) * k as f64 / (count - 1) as f64).collect(),
            },
        }
    }
}

/// Sets `component.parameter = offset + scale·x` for the sweep variable x.
/// Several targets let one variable move a tap point along a resonator while
/// keeping its total length fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTarget {
    pub component: String,
    pub parameter: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub offset: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl SweepTarget {
    pub fn new(component: impl Into<String>, parameter: impl Into<String>) -> Self {
        Self { component: component.into(), parameter: parameter.into(), scale: 1.0, offset: 0.0 }
    }
}

/// How a mode is picked out at each sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSelector {
    /// Mode label, e.g. `junction:J1` or `resonator-like`; ties go to the
    /// mode nearest the previous point.
    Label(String),
    /// Mode nearest this frequency at the first point, then nearest the
    /// previous point.
    Near(f64),
    /// Position in the frequency-sorted mode list.
    Index(usize),
    /// Mode storing the largest fraction of its inductive energy in this
    /// component, e.g. a resonator line.
    Component(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponsePart {
    Re,
    Im,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    Frequency { mode: ModeSelector },
    Linewidth { mode: ModeSelector },
    /// 1/κ [s].
    PurcellTime { mode: ModeSelector },
    Anharmonicity { mode: ModeSelector },
    Chi { a: ModeSelector, b: ModeSelector },
    /// Frequency of the extremum of one Z entry on a grid.
    ResponseExtremum {
        row: String,
        col: String,
        f_min: f64,
        f_max: f64,
        points: usize,
        part: ResponsePart,
        extremum: Extremum,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub targets: Vec<SweepTarget>,
    pub values: SweepValues,
    pub observables: Vec<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ports: Vec<PortSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<SweepSpec>,
}

impl AnalysisSpec {
    fn is_empty(&self) -> bool {
        self == &Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetlistDocument {
    pub schema_version: u32,
    #[serde(default)]
    pub constants: Constants,
    pub nodes: Vec<String>,
    pub components: Vec<ComponentSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cpw_geometries: BTreeMap<String, GeometrySpec>,
    #[serde(default, skip_serializing_if = "AnalysisSpec::is_empty")]
    pub analysis: AnalysisSpec,
}

/// Parses and cross-checks a document. Syntax errors carry line and column;
/// schema errors name the offending field path.
pub fn parse_netlist(text: &str) -> Result<NetlistDocument> {
    let doc: NetlistDocument = parse_json(text)?;
    doc.validate()?;
    Ok(doc)
}

/// Deserializes any JSON document with path-qualified error messages.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        // serde_json messages end with "at line L column C"
        if inner.is_syntax() || inner.is_eof() {
            Error::Parse(inner.to_string())
        } else {
            Error::Schema(format!("field `{path}`: {inner}"))
        }
    })
}

pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec> {
    parse_json(text)
}

impl NetlistDocument {
    /// Pretty-printed JSON.
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("netlist documents always serialize")
    }

    pub fn component(&self, name: &str) -> Option<&ComponentSpec> {
        self.components.iter().find(|c| c.name() == name)
    }

    pub fn component_mut(&mut self, name: &str) -> Option<&mut ComponentSpec> {
        self.components.iter_mut().find(|c| c.name() == name)
    }

    /// Checks version, node declarations and cross-references. Physical
    /// positivity is checked when the circuit is built.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "field `schema_version`: unsupported version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let mut declared: HashSet<&str> = HashSet::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if !declared.insert(n) {
                return Err(Error::Schema(format!("field `nodes[{i}]`: duplicate node `{n}`")));
            }
        }
        declared.insert(GROUND);
        for (i, c) in self.components.iter().enumerate() {
            for (k, n) in c.nodes().iter().enumerate() {
                if !declared.contains(n.as_str()) {
                    return Err(Error::Schema(format!(
                        "field `components[{i}].nodes[{k}]`: {}",
                        Error::DanglingNode(n.clone())
                    )));
                }
            }
            if let ComponentSpec::Coupler { geometry, .. } = c {
                if !self.cpw_geometries.contains_key(geometry) {
                    return Err(Error::Schema(format!(
                        "field `components[{i}].geometry`: {}",
                        Error::UnknownGeometry(geometry.clone())
                    )));
                }
            }
        }
        for (i, p) in self.analysis.ports.iter().enumerate() {
            for (field, n) in [("plus", &p.plus), ("minus", &p.minus)] {
                if !declared.contains(n.as_str()) {
                    return Err(Error::Schema(format!("field `analysis.ports[{i}].{field}`: undeclared node `{n}`")));
                }
            }
        }
        for (i, s) in self.analysis.sweeps.iter().enumerate() {
            self.check_sweep(s).map_err(|e| Error::Schema(format!("field `analysis.sweeps[{i}]`: {e}")))?;
        }
        Ok(())
    }

    /// Verifies that every sweep target names an existing numeric parameter.
    pub fn check_sweep(&self, spec: &SweepSpec) -> Result<()> {
        if spec.targets.is_empty() {
            return Err(Error::Schema("sweep has no targets".into()));
        }
        for t in &spec.targets {
            let comp = self
                .component(&t.component)
                .ok_or_else(|| Error::Schema(format!("sweep target `{}` is not a component", t.component)))?;
            if comp.parameter(&t.parameter).is_none() {
                return Err(Error::Schema(format!(
                    "component `{}` ({}) has no numeric parameter `{}`; expected one of {:?}",
                    t.component,
                    comp.kind_name(),
                    t.parameter,
                    comp.parameter_names()
                )));
            }
        }
        for o in &spec.observables {
            if let Observable::ResponseExtremum { row, col, .. } = o {
                for p in [row, col] {
                    if !self.analysis.ports.iter().any(|q| &q.name == p) {
                        return Err(Error::Schema(format!("response observable references unknown port `{p}`")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Values that are legal but almost certainly in the wrong unit.
    pub fn unit_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: &str, what: &str, v: f64, lo: f64, hi: f64, unit: &str| {
            if v > hi || (v > 0.0 && v < lo) {
                out.push(format!("component `{name}`: {what} = {v:e} {unit} looks implausible (expected {lo:e}..{hi:e})"));
            }
        };
        for c in &self.components {
            let n = c.name();
            match *c {
                ComponentSpec::Resistor { resistance, .. } => check(n, "resistance", resistance, 1e-3, 1e12, "Ω"),
                ComponentSpec::Capacitor { capacitance, .. } => check(n, "capacitance", capacitance, 1e-18, 1e-6, "F"),
                ComponentSpec::Inductor { inductance, .. } | ComponentSpec::Junction { inductance, .. } => {
                    check(n, "inductance", inductance, 1e-13, 1e-3, "H")
                }
                ComponentSpec::Line { z0, length, .. } => {
                    check(n, "z0", z0, 1.0, 1e3, "Ω");
                    check(n, "length", length, 1e-7, 1.0, "m");
                }
                ComponentSpec::Coupler { length, .. } => check(n, "length", length, 1e-7, 1.0, "m"),
            }
        }
        for (g, spec) in &self.cpw_geometries {
            for &w in spec.line_widths.iter().chain(&spec.gap_widths) {
                check(g, "width", w, 1e-8, 1e-2, "m");
            }
        }
        out
    }

    /// Returns a copy with each sweep target set for the variable `x`.
    pub fn with_sweep_value(&self, targets: &[SweepTarget], x: f64) -> Result<NetlistDocument> {
        let mut doc = self.clone();
        for t in targets {
            let comp = doc
                .component_mut(&t.component)
                .ok_or_else(|| Error::Schema(format!("sweep target `{}` is not a component", t.component)))?;
            comp.set_parameter(&t.parameter, t.offset + t.scale * x)?;
        }
        Ok(doc)
    }
}

/// Builds a validated [`Circuit`]. Coupler cross-sections are mapped once per
/// referenced geometry.
pub fn build_circuit(doc: &NetlistDocument) -> Result<Circuit> {
    doc.validate()?;
    let eps_r = doc.constants.eps_r;
    if !(eps_r >= 1.0 && eps_r.is_finite()) {
        return Err(Error::Schema(format!("field `constants.eps_r`: {eps_r} must be at least 1")));
    }
    let used: Vec<&String> = {
        let mut v: Vec<&String> = doc
            .components
            .iter()
            .filter_map(|c| match c {
                ComponentSpec::Coupler { geometry, .. } => Some(geometry),
                _ => None,
            })
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let matrices: HashMap<String, Arc<_>> = used
        .par_iter()
        .map(|g| {
            let cs = doc.cpw_geometries[*g].cross_section(eps_r)?;
            Ok(((*g).clone(), Arc::new(coupler_matrices(&cs)?)))
        })
        .collect::<Result<_>>()?;

    let mut b = Circuit::builder().ground(GROUND).eps_r(eps_r);
    b = b.nodes(doc.nodes.iter().filter(|n| *n != GROUND).cloned());
    for c in &doc.components {
        let kind = match c {
            ComponentSpec::Resistor { resistance, .. } => ComponentKind::Resistor { resistance: *resistance },
            ComponentSpec::Capacitor { capacitance, .. } => ComponentKind::Capacitor { capacitance: *capacitance },
            ComponentSpec::Inductor { inductance, .. } => ComponentKind::Inductor { inductance: *inductance },
            ComponentSpec::Junction { inductance, count, .. } => {
                ComponentKind::JunctionArray { inductance: *inductance, count: *count }
            }
            ComponentSpec::Line { z0, length, .. } => ComponentKind::TransmissionLine { z0: *z0, length: *length },
            ComponentSpec::Coupler { geometry, length, grounded_center, .. } => ComponentKind::CpwCoupler {
                geometry: geometry.clone(),
                matrices: matrices[geometry].clone(),
                length: *length,
                grounded_center: *grounded_center,
            },
        };
        b = b.component(c.name(), kind, c.nodes().iter().cloned());
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LC: &str = r#"{
        "schema_version": 1,
        "nodes": ["gnd", "n1"],
        "components": [
            {"kind": "capacitor", "name": "C", "nodes": ["gnd", "n1"], "capacitance": 100e-15},
            {"kind": "inductor", "name": "L", "nodes": ["gnd", "n1"], "inductance": 10e-9}
        ]
    }"#;

    #[test]
    fn minimal_lc() {
        let doc = parse_netlist(LC).unwrap();
        assert_eq!(doc.components.len(), 2);
        assert_eq!(doc.constants.eps_r, 11.9);
        let c = build_circuit(&doc).unwrap();
        assert_eq!(c.node_count(), 1);
    }

    #[test]
    fn misspelled_kind_names_field() {
        let bad = LC.replace("\"capacitor\"", "\"capacitr\"");
        let err = parse_netlist(&bad).unwrap_err().to_string();
        assert!(err.contains("components[0]"), "{err}");
        assert!(err.contains("capacitr"), "{err}");
        assert!(err.contains("line 5"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let bad = LC.replace("\"capacitance\"", "\"capacitanse\"");
        let err = parse_netlist(&bad).unwrap_err().to_string();
        assert!(err.contains("capacitanse") && err.contains("components[0]"), "{err}");
    }

    #[test]
    fn syntax_error_has_line() {
        let bad = LC.replace("\"L\",", "\"L\"");
        match parse_netlist(&bad) {
            Err(Error::Parse(msg)) => assert!(msg.contains("line 6"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_node() {
        let bad = LC.replace("[\"gnd\", \"n1\"], \"inductance\"", "[\"gnd\", \"n9\"], \"inductance\"");
        let err = parse_netlist(&bad).unwrap_err().to_string();
        assert!(err.contains("n9") && err.contains("components[1].nodes[1]"), "{err}");
    }

    #[test]
    fn unit_warning_for_microfarads() {
        let doc = parse_netlist(&LC.replace("100e-15", "2e-6")).unwrap();
        let w = doc.unit_warnings();
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("capacitance"));
        assert!(parse_netlist(LC).unwrap().unit_warnings().is_empty());
    }

    #[test]
    fn render_round_trip() {
        let text = r#"{
            "schema_version": 1,
            "constants": {"eps_r": 11.45},
            "nodes": ["a", "b", "c", "d"],
            "components": [
                {"kind": "junction", "name": "J", "nodes": ["a", "gnd"], "inductance": 9.2e-9, "count": 3},
                {"kind": "coupler", "name": "K", "nodes": ["a", "b", "c", "d"], "geometry": "g", "length": 7e-4, "grounded_center": true},
                {"kind": "resistor", "name": "R", "nodes": ["d", "gnd"], "resistance": 50.0},
                {"kind": "line", "name": "T", "nodes": ["b", "gnd"], "z0": 50.0, "length": 0.1234567891234}
            ],
            "cpw_geometries": {"g": {"line_widths": [5e-6, 5.5e-6, 5e-6], "gap_widths": [7.5e-6, 3e-6, 3e-6, 7.5e-6]}},
            "analysis": {
                "scan": {"f_min": 1e9, "f_max": 1e10},
                "ports": [{"name": "p1", "plus": "a"}],
                "sweeps": [{
                    "targets": [{"component": "T", "parameter": "length", "scale": -1.0, "offset": 0.01}],
                    "values": {"linspace": {"start": 0.001, "stop": 0.002, "count": 5}},
                    "observables": [
                        {"kind": "linewidth", "mode": {"label": "junction:J"}},
                        {"kind": "chi", "a": {"index": 0}, "b": {"near": 7e9}},
                        {"kind": "response_extremum", "row": "p1", "col": "p1", "f_min": 1e9, "f_max": 2e9, "points": 11, "part": "im", "extremum": "max"}
                    ]
                }]
            }
        }"#;
        let doc = parse_netlist(text).unwrap();
        let again = parse_netlist(&doc.render()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(doc.analysis.ports[0].minus, "gnd");
        match &doc.components[0] {
            ComponentSpec::Junction { count, .. } => assert_eq!(*count, 3),
            _ => unreachable!(),
        }
    }

    #[test]
    fn sweep_targets_checked() {
        let mut doc = parse_netlist(LC).unwrap();
        let spec = SweepSpec {
            name: None,
            targets: vec![SweepTarget::new("C", "length")],
            values: SweepValues::List(vec![1.0]),
            observables: vec![],
            scan: None,
        };
        let err = doc.check_sweep(&spec).unwrap_err().to_string();
        assert!(err.contains("capacitance"), "{err}");
        let ok = SweepSpec { targets: vec![SweepTarget::new("C", "capacitance")], ..spec };
        doc.check_sweep(&ok).unwrap();
        let moved = doc.with_sweep_value(&ok.targets, 2e-13).unwrap();
        assert_eq!(moved.component("C").unwrap().parameter("capacitance"), Some(2e-13));
        doc.component_mut("L").unwrap().set_parameter("inductance", 1e-9).unwrap();
        assert!(doc.component_mut("L").unwrap().set_parameter("z0", 1.0).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let v = SweepValues::Linspace { start: 1.0, stop: 2.0, count: 5 }.values();
        assert_eq!(v, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn unknown_geometry_rejected() {
        let text = r#"{"schema_version": 1, "nodes": ["a","b","c","d"], "components": [
            {"kind": "coupler", "name": "K", "nodes": ["a","b","c","d"], "geometry": "nope", "length": 1e-3}]}"#;
        let err = parse_netlist(text).unwrap_err().to_string();
        assert!(err.contains("nope"), "{err}");
    }
}
