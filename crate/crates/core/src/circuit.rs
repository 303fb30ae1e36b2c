//! Circuit graph over named nodes and assembly of the nodal admittance matrix
//! Y(z) at complex frequency z = κ/2 + jω.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::elements::{
    coupler_admittance, lumped_admittance, tml_admittance, CouplerMatrices, LumpedKind, WaveParameters,
};
use crate::error::{Error, Result};
use crate::numerics::CMatrix;

/// Complex mode frequency: angular frequency ω and damping rate κ/2.
///
/// Admittances are evaluated at the Laplace variable s = −κ/2 + jω, so a
/// passive circuit has κ ≥ 0 at its roots.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexFrequency {
    /// κ/2 [rad/s].
    pub kappa_half: f64,
    /// ω [rad/s].
    pub omega: f64,
}

impl ComplexFrequency {
    pub fn new(kappa_half: f64, omega: f64) -> Self {
        Self { kappa_half, omega }
    }

    /// Lossless point z = j2πf.
    pub fn from_hz(f: f64) -> Self {
        Self { kappa_half: 0.0, omega: 2.0 * PI * f }
    }

    pub fn from_laplace(s: Complex64) -> Self {
        // + 0.0 turns a lossless -0.0 into 0.0
        Self { kappa_half: -s.re + 0.0, omega: s.im }
    }

    pub fn laplace(self) -> Complex64 {
        Complex64::new(-self.kappa_half, self.omega)
    }

    /// ω/2π [Hz].
    pub fn frequency_hz(self) -> f64 {
        self.omega / (2.0 * PI)
    }

    /// κ/2π [Hz].
    pub fn linewidth_hz(self) -> f64 {
        2.0 * self.kappa_half / (2.0 * PI)
    }
}

/// A terminal connection: the ground node or an index into the non-ground
/// node list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRef {
    Ground,
    Node(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Resistor { resistance: f64 },
    Capacitor { capacitance: f64 },
    Inductor { inductance: f64 },
    /// `count` identical junctions in series with total linear inductance
    /// `inductance`.
    JunctionArray { inductance: f64, count: u32 },
    TransmissionLine { z0: f64, length: f64 },
    /// Terminals: (line1-left, line1-right, line2-left, line2-right).
    CpwCoupler { geometry: String, matrices: Arc<CouplerMatrices>, length: f64, grounded_center: bool },
}

impl ComponentKind {
    pub fn terminal_count(&self) -> usize {
        match self {
            ComponentKind::CpwCoupler { .. } => 4,
            _ => 2,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            ComponentKind::Resistor { .. } => "resistor",
            ComponentKind::Capacitor { .. } => "capacitor",
            ComponentKind::Inductor { .. } => "inductor",
            ComponentKind::JunctionArray { .. } => "junction",
            ComponentKind::TransmissionLine { .. } => "line",
            ComponentKind::CpwCoupler { .. } => "coupler",
        }
    }

    pub fn is_distributed(&self) -> bool {
        matches!(self, ComponentKind::TransmissionLine { .. } | ComponentKind::CpwCoupler { .. })
    }

    fn lumped(&self) -> Option<(LumpedKind, f64)> {
        match *self {
            ComponentKind::Resistor { resistance } => Some((LumpedKind::Resistor, resistance)),
            ComponentKind::Capacitor { capacitance } => Some((LumpedKind::Capacitor, capacitance)),
            ComponentKind::Inductor { inductance } => Some((LumpedKind::Inductor, inductance)),
            ComponentKind::JunctionArray { inductance, .. } => Some((LumpedKind::Junction, inductance)),
            _ => None,
        }
    }

    fn positive_parameters(&self) -> Vec<(&'static str, f64)> {
        match self {
            ComponentKind::Resistor { resistance } => vec![("resistance", *resistance)],
            ComponentKind::Capacitor { capacitance } => vec![("capacitance", *capacitance)],
            ComponentKind::Inductor { inductance } => vec![("inductance", *inductance)],
            ComponentKind::JunctionArray { inductance, count } => {
                vec![("inductance", *inductance), ("count", *count as f64)]
            }
            ComponentKind::TransmissionLine { z0, length } => vec![("z0", *z0), ("length", *length)],
            ComponentKind::CpwCoupler { length, .. } => vec![("length", *length)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentInstance {
    pub name: String,
    pub kind: ComponentKind,
    pub terminals: Vec<NodeRef>,
}

impl ComponentInstance {
    /// Electrical length zℓ/v of a distributed component.
    fn theta(&self, line_wave: &WaveParameters, z: Complex64) -> Option<Complex64> {
        match &self.kind {
            ComponentKind::TransmissionLine { length, .. } => Some(line_wave.gamma(z) * *length),
            ComponentKind::CpwCoupler { matrices, length, .. } => Some(matrices.wave.gamma(z) * *length),
            _ => None,
        }
    }

    /// Stamp over this component's own terminals.
    pub fn stamp(&self, line_wave: &WaveParameters, z: Complex64) -> Result<CMatrix> {
        if let Some((kind, value)) = self.kind.lumped() {
            let y = lumped_admittance(kind, value, z);
            return Ok(CMatrix::from_row_slice(2, 2, &[y, -y, -y, y]));
        }
        let named = |e: Error| match e {
            Error::Pole(_) => Error::Pole(self.name.clone()),
            other => other,
        };
        match &self.kind {
            ComponentKind::TransmissionLine { z0, length } => {
                let y = tml_admittance(*z0, *length, line_wave, z).map_err(named)?;
                Ok(CMatrix::from_row_slice(2, 2, &[y[0][0], y[0][1], y[1][0], y[1][1]]))
            }
            ComponentKind::CpwCoupler { matrices, length, grounded_center, .. } => {
                coupler_admittance(matrices, *length, z, *grounded_center).map_err(named)
            }
            _ => unreachable!(),
        }
    }

    /// Row magnitudes of the stamp with its sinh θ pole removed.
    fn cleared_row_magnitudes(&self, line_wave: &WaveParameters, z: Complex64) -> Vec<f64> {
        if let Some((kind, value)) = self.kind.lumped() {
            let y = lumped_admittance(kind, value, z).norm();
            return vec![2.0 * y, 2.0 * y];
        }
        let theta = self.theta(line_wave, z).unwrap();
        let ch = theta.cosh().norm() + 1.0;
        match &self.kind {
            ComponentKind::TransmissionLine { z0, .. } => vec![ch / z0; 2],
            ComponentKind::CpwCoupler { matrices, grounded_center, .. } => {
                let (l1, l2) = if *grounded_center { (0, 2) } else { (0, 1) };
                let row = |l: usize| ch * matrices.y_char.row(l).iter().map(|x| x.abs()).sum::<f64>();
                vec![row(l1), row(l1), row(l2), row(l2)]
            }
            _ => unreachable!(),
        }
    }

    /// (line index, left end?) for each port of a distributed component.
    fn port_layout(&self) -> Vec<(usize, bool)> {
        match self.kind {
            ComponentKind::TransmissionLine { .. } => vec![(0, true), (0, false)],
            ComponentKind::CpwCoupler { .. } => vec![(0, true), (0, false), (1, true), (1, false)],
            _ => Vec::new(),
        }
    }
}

/// Validated, immutable circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    ground: String,
    nodes: Vec<String>,
    components: Vec<ComponentInstance>,
    constants: PhysicalConstants,
    line_wave: WaveParameters,
    /// Multiplicities (r₊, r₋) of the poles of det Y at cosh θ = ±1 for each
    /// component; (0, 0) for lumped elements.
    pole_orders: Vec<(u32, u32)>,
}

impl Circuit {
    pub fn builder() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    pub fn ground_name(&self) -> &str {
        &self.ground
    }

    /// Non-ground node names in matrix index order.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn components(&self) -> &[ComponentInstance] {
        &self.components
    }

    pub fn component(&self, name: &str) -> Option<&ComponentInstance> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// Wave parameters of single transmission lines.
    pub fn line_wave(&self) -> &WaveParameters {
        &self.line_wave
    }

    pub fn has_resistors(&self) -> bool {
        self.components.iter().any(|c| matches!(c.kind, ComponentKind::Resistor { .. }))
    }

    /// Indices of junction-array components.
    pub fn junction_indices(&self) -> Vec<usize> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, c)| matches!(c.kind, ComponentKind::JunctionArray { .. }))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn terminal_name(&self, t: NodeRef) -> &str {
        match t {
            NodeRef::Ground => &self.ground,
            NodeRef::Node(i) => &self.nodes[i],
        }
    }

    /// Total admittance matrix over the non-ground nodes at Laplace variable s.
    pub fn admittance(&self, z: Complex64) -> Result<CMatrix> {
        let n = self.nodes.len();
        let mut y = CMatrix::zeros(n, n);
        for comp in &self.components {
            let s = comp.stamp(&self.line_wave, z)?;
            for (a, ta) in comp.terminals.iter().enumerate() {
                let NodeRef::Node(i) = *ta else { continue };
                for (b, tb) in comp.terminals.iter().enumerate() {
                    let NodeRef::Node(j) = *tb else { continue };
                    y[(i, j)] += s[(a, b)];
                }
            }
        }
        Ok(y)
    }

    /// Product over distributed components of sinh(θ/2)^{r₊} cosh(θ/2)^{r₋};
    /// multiplying det Y by it removes every pole of the determinant.
    pub fn pole_factor(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (comp, &(rp, rm)) in self.components.iter().zip(&self.pole_orders) {
            if rp == 0 && rm == 0 {
                continue;
            }
            let half = comp.theta(&self.line_wave, z).unwrap() * 0.5;
            acc *= half.sinh().powu(rp) * half.cosh().powu(rm);
        }
        acc
    }

    /// Σ r₊ over components: the power of j carried by [`Self::pole_factor`]
    /// on the imaginary axis.
    pub fn pole_factor_j_power(&self) -> u32 {
        self.pole_orders.iter().map(|p| p.0).sum()
    }

    /// Positive per-row scales built from pole-free stamp magnitudes.
    pub fn row_scales(&self, z: Complex64) -> Vec<f64> {
        let mut s = vec![0.0; self.nodes.len()];
        for comp in &self.components {
            let mags = comp.cleared_row_magnitudes(&self.line_wave, z);
            for (t, m) in comp.terminals.iter().zip(mags) {
                if let NodeRef::Node(i) = *t {
                    s[i] += m;
                }
            }
        }
        s
    }

    /// Smallest relative distance |sinh θ| / cosh|Re θ| to a pole over the
    /// distributed components (∞ if there are none).
    pub fn pole_proximity(&self, z: Complex64) -> f64 {
        self.components
            .iter()
            .zip(&self.pole_orders)
            .filter(|(_, p)| p.0 + p.1 > 0)
            .map(|(c, _)| {
                let th = c.theta(&self.line_wave, z).unwrap();
                th.sinh().norm() / th.re.abs().cosh()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The circuit with every resistor removed, when no node is left isolated.
    pub fn without_resistors(&self) -> Result<Circuit> {
        let components: Vec<ComponentInstance> =
            self.components.iter().filter(|c| !matches!(c.kind, ComponentKind::Resistor { .. })).cloned().collect();
        check_connected(&self.nodes, &components)?;
        let pole_orders = components.iter().map(pole_orders).collect();
        Ok(Circuit { components, pole_orders, ..self.clone() })
    }

    /// Lossless companion: every resistor is shorted by merging its off-ground
    /// node into ground and removing it.
    pub fn reduce_lossless(&self) -> Result<Circuit> {
        let mut merged: HashSet<usize> = HashSet::new();
        for comp in &self.components {
            if let ComponentKind::Resistor { .. } = comp.kind {
                match (comp.terminals[0], comp.terminals[1]) {
                    (NodeRef::Ground, NodeRef::Node(i)) | (NodeRef::Node(i), NodeRef::Ground) => {
                        merged.insert(i);
                    }
                    (NodeRef::Ground, NodeRef::Ground) => {}
                    _ => return Err(Error::FloatingResistor(comp.name.clone())),
                }
            }
        }
        if merged.is_empty() && !self.has_resistors() {
            return Ok(self.clone());
        }
        let mut remap = Vec::with_capacity(self.nodes.len());
        let mut nodes = Vec::new();
        for (i, name) in self.nodes.iter().enumerate() {
            if merged.contains(&i) {
                remap.push(NodeRef::Ground);
            } else {
                remap.push(NodeRef::Node(nodes.len()));
                nodes.push(name.clone());
            }
        }
        let components: Vec<ComponentInstance> = self
            .components
            .iter()
            .filter(|c| !matches!(c.kind, ComponentKind::Resistor { .. }))
            .map(|c| ComponentInstance {
                name: c.name.clone(),
                kind: c.kind.clone(),
                terminals: c
                    .terminals
                    .iter()
                    .map(|t| match *t {
                        NodeRef::Ground => NodeRef::Ground,
                        NodeRef::Node(i) => remap[i],
                    })
                    .collect(),
            })
            .collect();
        let pole_orders = components.iter().map(pole_orders).collect();
        Ok(Circuit {
            ground: self.ground.clone(),
            nodes,
            components,
            constants: self.constants,
            line_wave: self.line_wave,
            pole_orders,
        })
    }
}

/// Rank of the divergent part of a distributed stamp at cosh θ = +1 and −1,
/// folded onto the non-ground nodes.
fn pole_orders(comp: &ComponentInstance) -> (u32, u32) {
    if !comp.kind.is_distributed() {
        return (0, 0);
    }
    let layout = comp.port_layout();
    let n_lines = layout.iter().map(|p| p.0).max().unwrap() + 1;
    let rank_for = |even: bool| -> u32 {
        let mut rows: HashMap<usize, Vec<f64>> = HashMap::new();
        for (t, &(line, left)) in comp.terminals.iter().zip(&layout) {
            let NodeRef::Node(i) = *t else { continue };
            let u = if left || !even { 1.0 } else { -1.0 };
            rows.entry(i).or_insert_with(|| vec![0.0; n_lines])[line] += u;
        }
        let mut keys: Vec<usize> = rows.keys().copied().collect();
        keys.sort_unstable();
        let m: Vec<Vec<f64>> = keys.into_iter().map(|k| rows.remove(&k).unwrap()).collect();
        matrix_rank(m, n_lines)
    };
    (rank_for(true), rank_for(false))
}

fn matrix_rank(mut m: Vec<Vec<f64>>, cols: usize) -> u32 {
    let mut rank = 0;
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap()) else {
            break;
        };
        if m[p][c].abs() < 1e-9 {
            continue;
        }
        m.swap(row, p);
        for r in (row + 1)..m.len() {
            let f = m[r][c] / m[row][c];
            for k in c..cols {
                m[r][k] -= f * m[row][k];
            }
        }
        row += 1;
        rank += 1;
    }
    rank
}

/// Evaluates the total admittance matrix at `z`.
pub fn assemble_admittance(circuit: &Circuit, z: ComplexFrequency) -> Result<CMatrix> {
    circuit.admittance(z.laplace())
}

/// Incremental construction of a [`Circuit`].
#[derive(Debug, Clone, Default)]
pub struct CircuitBuilder {
    ground: Vec<String>,
    nodes: Vec<String>,
    constants: PhysicalConstants,
    components: Vec<(String, ComponentKind, Vec<String>)>,
}

impl CircuitBuilder {
    pub fn ground(mut self, name: impl Into<String>) -> Self {
        self.ground.push(name.into());
        self
    }

    pub fn node(mut self, name: impl Into<String>) -> Self {
        self.nodes.push(name.into());
        self
    }

    pub fn nodes<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.nodes.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn eps_r(mut self, eps_r: f64) -> Self {
        self.constants.eps_r = eps_r;
        self
    }

    pub fn constants(mut self, constants: PhysicalConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn component<S: Into<String>>(mut self, name: impl Into<String>, kind: ComponentKind, terminals: impl IntoIterator<Item = S>) -> Self {
        self.components.push((name.into(), kind, terminals.into_iter().map(Into::into).collect()));
        self
    }

    pub fn resistor(self, name: &str, a: &str, b: &str, resistance: f64) -> Self {
        self.component(name, ComponentKind::Resistor { resistance }, [a, b])
    }

    pub fn capacitor(self, name: &str, a: &str, b: &str, capacitance: f64) -> Self {
        self.component(name, ComponentKind::Capacitor { capacitance }, [a, b])
    }

    pub fn inductor(self, name: &str, a: &str, b: &str, inductance: f64) -> Self {
        self.component(name, ComponentKind::Inductor { inductance }, [a, b])
    }

    pub fn junction(self, name: &str, a: &str, b: &str, inductance: f64, count: u32) -> Self {
        self.component(name, ComponentKind::JunctionArray { inductance, count }, [a, b])
    }

    pub fn line(self, name: &str, a: &str, b: &str, z0: f64, length: f64) -> Self {
        self.component(name, ComponentKind::TransmissionLine { z0, length }, [a, b])
    }

    pub fn coupler(
        self,
        name: &str,
        terminals: [&str; 4],
        geometry: &str,
        matrices: Arc<CouplerMatrices>,
        length: f64,
        grounded_center: bool,
    ) -> Self {
        let kind = ComponentKind::CpwCoupler { geometry: geometry.to_string(), matrices, length, grounded_center };
        self.component(name, kind, terminals)
    }

    pub fn build(self) -> Result<Circuit> {
        let ground = match self.ground.as_slice() {
            [] => return Err(Error::MissingGround),
            [g] => g.clone(),
            _ => return Err(Error::DuplicateGround),
        };
        let mut nodes: Vec<String> = Vec::new();
        let mut seen = HashSet::new();
        for n in self.nodes {
            if n == ground {
                continue;
            }
            if !seen.insert(n.clone()) {
                return Err(Error::DuplicateName(n));
            }
            nodes.push(n);
        }
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut names = HashSet::new();
        let mut components = Vec::with_capacity(self.components.len());
        for (name, kind, terms) in self.components {
            if !names.insert(name.clone()) {
                return Err(Error::DuplicateName(name));
            }
            if terms.len() != kind.terminal_count() {
                return Err(Error::TerminalCount { component: name, expected: kind.terminal_count(), got: terms.len() });
            }
            for (parameter, value) in kind.positive_parameters() {
                if !(value > 0.0) || !value.is_finite() {
                    return Err(Error::NonPositive { component: name, parameter: parameter.into(), value });
                }
            }
            let mut terminals = Vec::with_capacity(terms.len());
            for t in &terms {
                if *t == ground {
                    terminals.push(NodeRef::Ground);
                } else if let Some(&i) = index.get(t.as_str()) {
                    terminals.push(NodeRef::Node(i));
                } else {
                    return Err(Error::DanglingNode(t.clone()));
                }
            }
            components.push(ComponentInstance { name, kind, terminals });
        }
        check_connected(&nodes, &components)?;
        let pole_orders = components.iter().map(pole_orders).collect();
        Ok(Circuit {
            ground,
            nodes,
            components,
            line_wave: WaveParameters::from_eps_r(self.constants.eps_r),
            constants: self.constants,
            pole_orders,
        })
    }
}

fn check_connected(nodes: &[String], components: &[ComponentInstance]) -> Result<()> {
    // union-find with ground at index n
    let n = nodes.len();
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let idx = |t: &NodeRef| match t {
        NodeRef::Ground => n,
        NodeRef::Node(i) => *i,
    };
    for c in components {
        // Distributed elements carry their own ground return.
        let first = if c.kind.is_distributed() { n } else { idx(&c.terminals[0]) };
        for t in &c.terminals[..] {
            let (a, b) = (find(&mut parent, first), find(&mut parent, idx(t)));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, n);
    for (i, name) in nodes.iter().enumerate() {
        if find(&mut parent, i) != root {
            return Err(Error::Disconnected(name.clone()));
        }
    }
    Ok(())
}
