//! Energy-participation ratios of junction arrays and the dispersive
//! Hamiltonian parameters derived from them.
//!
//! For mode m and array i, p_mi = E_i^ind / E^ind_total, the reduced-flux
//! zero-point fluctuation is φ_mi² = p_mi ħω_m / 2E_i with E_i = (ħ/2e)²/L_i,
//! and the cross-Kerr matrix is
//!
//! χ_mn = Σ_i ħ ω_m ω_n p_mi p_ni / (4 E_i N_i²),
//!
//! reported as χ/2π. Anharmonicities are α_m = χ_mm/2 and Lamb shifts
//! Δ_m = ½ Σ_n χ_mn.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{Circuit, ComponentKind, NodeRef};
use crate::constants::{HBAR, PLANCK, REDUCED_FLUX_QUANTUM};
use crate::elements::{coupler_inductive_energy, lumped_inductive_energy, tml_inductive_energy, LumpedKind};
use crate::error::{Error, Result};
use crate::modes::Mode;
use crate::numerics::CVector;

/// Linearized junction array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JunctionMeta {
    pub name: String,
    /// Total linear inductance of the array [H].
    pub inductance: f64,
    pub count: u32,
    /// (ħ/2e)²/L [J].
    pub energy: f64,
}

impl JunctionMeta {
    pub fn new(name: impl Into<String>, inductance: f64, count: u32) -> Self {
        Self { name: name.into(), inductance, count, energy: REDUCED_FLUX_QUANTUM.powi(2) / inductance }
    }

    /// Junction arrays of a circuit in component order.
    pub fn from_circuit(circuit: &Circuit) -> Vec<Self> {
        circuit
            .components()
            .iter()
            .filter_map(|c| match c.kind {
                ComponentKind::JunctionArray { inductance, count } => Some(Self::new(&c.name, inductance, count)),
                _ => None,
            })
            .collect()
    }
}

/// Inductive energy of every component for the given node voltages, keyed by
/// component name [J].
pub fn component_energies(circuit: &Circuit, mode: &Mode) -> Result<BTreeMap<String, f64>> {
    component_energies_at(circuit, mode.z.laplace(), &mode.node_voltages)
}

pub fn component_energies_at(circuit: &Circuit, s: Complex64, v: &CVector) -> Result<BTreeMap<String, f64>> {
    let volt = |t: &NodeRef| match *t {
        NodeRef::Ground => Complex64::new(0.0, 0.0),
        NodeRef::Node(i) => v[i],
    };
    let mut out = BTreeMap::new();
    for comp in circuit.components() {
        let t = &comp.terminals;
        let e = match &comp.kind {
            ComponentKind::Inductor { inductance } => {
                lumped_inductive_energy(LumpedKind::Inductor, *inductance, volt(&t[0]) - volt(&t[1]), s)
            }
            ComponentKind::JunctionArray { inductance, .. } => {
                lumped_inductive_energy(LumpedKind::Junction, *inductance, volt(&t[0]) - volt(&t[1]), s)
            }
            ComponentKind::Resistor { .. } | ComponentKind::Capacitor { .. } => 0.0,
            ComponentKind::TransmissionLine { z0, length } => {
                tml_inductive_energy(*z0, *length, circuit.line_wave(), s, volt(&t[0]), volt(&t[1]))?
            }
            ComponentKind::CpwCoupler { matrices, length, grounded_center, .. } => {
                let ports = [volt(&t[0]), volt(&t[1]), volt(&t[2]), volt(&t[3])];
                coupler_inductive_energy(matrices, *length, s, *grounded_center, &ports)?
            }
        };
        out.insert(comp.name.clone(), e);
    }
    Ok(out)
}

/// Participation row of one mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticipationRow {
    /// p_i per junction array, in [`JunctionMeta::from_circuit`] order.
    pub p: Vec<f64>,
    pub total: f64,
    pub energies: BTreeMap<String, f64>,
}

pub fn participation(circuit: &Circuit, mode: &Mode) -> Result<ParticipationRow> {
    let energies = component_energies(circuit, mode)?;
    let total: f64 = energies.values().sum();
    let scale = mode.node_voltages.norm_squared();
    if !(total > 1e-30 * scale) {
        return Err(Error::ZeroInductiveEnergy);
    }
    let p = JunctionMeta::from_circuit(circuit).iter().map(|j| energies[&j.name] / total).collect();
    Ok(ParticipationRow { p, total, energies })
}

/// Participations of all junction arrays in all modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EprTable {
    pub junctions: Vec<String>,
    /// p[(m, i)].
    #[serde(serialize_with = "serialize_rows")]
    pub p: DMatrix<f64>,
    pub inductive_energy_total: Vec<f64>,
    pub per_component_energy: Vec<BTreeMap<String, f64>>,
}

fn serialize_rows<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

pub fn epr_table(circuit: &Circuit, modes: &[Mode]) -> Result<EprTable> {
    let junctions: Vec<String> = JunctionMeta::from_circuit(circuit).into_iter().map(|j| j.name).collect();
    let rows = modes.par_iter().map(|m| participation(circuit, m)).collect::<Result<Vec<_>>>()?;
    let mut p = DMatrix::zeros(modes.len(), junctions.len());
    for (m, row) in rows.iter().enumerate() {
        for (i, v) in row.p.iter().enumerate() {
            p[(m, i)] = *v;
        }
    }
    Ok(EprTable {
        junctions,
        p,
        inductive_energy_total: rows.iter().map(|r| r.total).collect(),
        per_component_energy: rows.into_iter().map(|r| r.energies).collect(),
    })
}

/// φ = √(p ħω / 2E).
pub fn zero_point_flux(p: f64, omega: f64, junction: &JunctionMeta) -> f64 {
    (p * HBAR * omega / (2.0 * junction.energy)).sqrt()
}

/// Dispersive Hamiltonian parameters, all frequencies in Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HamiltonianParams {
    #[serde(serialize_with = "serialize_rows")]
    pub chi: DMatrix<f64>,
    pub alpha: Vec<f64>,
    pub lamb_shift: Vec<f64>,
    pub bare_frequencies: Vec<f64>,
    pub dressed_frequencies: Vec<f64>,
    #[serde(serialize_with = "serialize_rows")]
    pub phi_zpf: DMatrix<f64>,
}

pub fn kerr_matrix(modes: &[Mode], epr: &EprTable, junctions: &[JunctionMeta]) -> HamiltonianParams {
    let omegas: Vec<f64> = modes.iter().map(|m| m.z.omega).collect();
    kerr_from_participations(&omegas, &epr.p, junctions)
}

/// χ and φ from angular frequencies and a participation matrix.
pub fn kerr_from_participations(omegas: &[f64], p: &DMatrix<f64>, junctions: &[JunctionMeta]) -> HamiltonianParams {
    let m = omegas.len();
    let mut chi = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            for (i, j) in junctions.iter().enumerate() {
                let n = j.count as f64;
                acc += HBAR * omegas[a] * omegas[b] * p[(a, i)] * p[(b, i)] / (4.0 * j.energy * n * n);
            }
            chi[(a, b)] = acc / (2.0 * PI);
        }
    }
    let phi_zpf = DMatrix::from_fn(m, junctions.len(), |a, i| zero_point_flux(p[(a, i)], omegas[a], &junctions[i]));
    let alpha: Vec<f64> = (0..m).map(|a| 0.5 * chi[(a, a)]).collect();
    let lamb_shift: Vec<f64> = (0..m).map(|a| 0.5 * chi.row(a).sum()).collect();
    let bare: Vec<f64> = omegas.iter().map(|w| w / (2.0 * PI)).collect();
    let dressed = bare.iter().zip(&lamb_shift).map(|(f, d)| f - d).collect();
    HamiltonianParams { chi, alpha, lamb_shift, bare_frequencies: bare, dressed_frequencies: dressed, phi_zpf }
}

/// "junction:<name>" when one array holds more than half of the mode's
/// inductive energy, "resonator-like" otherwise.
pub fn label_modes(epr: &EprTable, modes: &mut [Mode]) -> Vec<String> {
    let labels: Vec<String> = (0..modes.len())
        .map(|m| {
            epr.junctions
                .iter()
                .enumerate()
                .find(|(i, _)| epr.p[(m, *i)] > 0.5)
                .map(|(_, name)| format!("junction:{name}"))
                .unwrap_or_else(|| "resonator-like".to_string())
        })
        .collect();
    for (mode, l) in modes.iter_mut().zip(&labels) {
        mode.label = Some(l.clone());
    }
    labels
}

/// Participations, labels and Hamiltonian parameters for a set of modes.
pub fn quantize(circuit: &Circuit, modes: &mut [Mode]) -> Result<(EprTable, HamiltonianParams)> {
    let epr = epr_table(circuit, modes)?;
    label_modes(&epr, modes);
    let h = kerr_matrix(modes, &epr, &JunctionMeta::from_circuit(circuit));
    Ok((epr, h))
}

/// Spectroscopic quantities from exact diagonalization, in Hz.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSpectrum {
    /// (E(1_m) − E(0))/h.
    pub transitions: Vec<f64>,
    /// −(E(2_m) − 2E(1_m) + E(0))/h.
    pub anharmonicities: Vec<f64>,
    /// −(E(1_m 1_n) − E(1_m) − E(1_n) + E(0))/h off the diagonal; 2α on it.
    #[serde(serialize_with = "serialize_rows")]
    pub cross_kerr: DMatrix<f64>,
    pub warnings: Vec<String>,
}

/// Diagonalizes H/h = Σ f_m a†a − Σ_i (E_i/h)/(24N_i²) (Σ_m φ_mi (a_m + a_m†))⁴
/// in the Fock product basis with `cutoff` levels per mode. The quartic
/// operator is applied exactly before truncation.
pub fn oracle_diagonalize(
    omegas: &[f64],
    phi_zpf: &DMatrix<f64>,
    junctions: &[JunctionMeta],
    cutoff: usize,
) -> Result<OracleSpectrum> {
    let m = omegas.len();
    if m == 0 || m > 3 {
        return Err(Error::Domain(format!("oracle supports 1 to 3 modes, got {m}")));
    }
    if !(4..=12).contains(&cutoff) {
        return Err(Error::Domain(format!("oracle cutoff {cutoff} outside 4..=12")));
    }
    let fine = oracle_once(omegas, phi_zpf, junctions, cutoff);
    let coarse = oracle_once(omegas, phi_zpf, junctions, cutoff - 2);
    let mut warnings = Vec::new();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-300);
    for k in 0..m {
        if rel(fine.transitions[k], coarse.transitions[k]) > 1e-3 || rel(fine.anharmonicities[k], coarse.anharmonicities[k]) > 1e-3 {
            warnings.push(format!("mode {k}: results shift by more than 0.1% between cutoffs {} and {cutoff}", cutoff - 2));
        }
    }
    Ok(OracleSpectrum { warnings, ..fine })
}

fn oracle_once(omegas: &[f64], phi: &DMatrix<f64>, junctions: &[JunctionMeta], cutoff: usize) -> OracleSpectrum {
    let m = omegas.len();
    let dim = cutoff.pow(m as u32);
    let index = |occ: &[usize]| occ.iter().fold(0, |acc, &n| acc * cutoff + n);
    let states: Vec<Vec<usize>> = (0..dim)
        .map(|mut k| {
            let mut occ = vec![0; m];
            for slot in occ.iter_mut().rev() {
                *slot = k % cutoff;
                k /= cutoff;
            }
            occ
        })
        .collect();
    let freqs: Vec<f64> = omegas.iter().map(|w| w / (2.0 * PI)).collect();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (k, occ) in states.iter().enumerate() {
        h[(k, k)] += occ.iter().zip(&freqs).map(|(n, f)| *n as f64 * f).sum::<f64>();
    }
    for (i, j) in junctions.iter().enumerate() {
        let n = j.count as f64;
        let pref = j.energy / PLANCK / (24.0 * n * n);
        let coeffs: Vec<f64> = (0..m).map(|a| phi[(a, i)]).collect();
        for (col, occ) in states.iter().enumerate() {
            let mut vec: HashMap<Vec<usize>, f64> = HashMap::from([(occ.clone(), 1.0)]);
            for _ in 0..4 {
                let mut next: HashMap<Vec<usize>, f64> = HashMap::new();
                for (st, amp) in &vec {
                    for (a, c) in coeffs.iter().enumerate() {
                        if *c == 0.0 {
                            continue;
                        }
                        let na = st[a];
                        let mut up = st.clone();
                        up[a] += 1;
                        *next.entry(up).or_default() += amp * c * ((na + 1) as f64).sqrt();
                        if na > 0 {
                            let mut down = st.clone();
                            down[a] -= 1;
                            *next.entry(down).or_default() += amp * c * (na as f64).sqrt();
                        }
                    }
                }
                vec = next;
            }
            for (st, amp) in vec {
                if st.iter().all(|&x| x < cutoff) {
                    h[(index(&st), col)] -= pref * amp;
                }
            }
        }
    }
    let eig = h.symmetric_eigen();
    let overlap_energy = |occ: &[usize]| -> f64 {
        let k = index(occ);
        let best = (0..dim)
            .max_by(|&x, &y| eig.eigenvectors[(k, x)].abs().partial_cmp(&eig.eigenvectors[(k, y)].abs()).unwrap())
            .unwrap();
        eig.eigenvalues[best]
    };
    let unit = |a: usize, count: usize| {
        let mut o = vec![0; m];
        o[a] = count;
        o
    };
    let e0 = overlap_energy(&vec![0; m]);
    let e1: Vec<f64> = (0..m).map(|a| overlap_energy(&unit(a, 1))).collect();
    let e2: Vec<f64> = (0..m).map(|a| overlap_energy(&unit(a, 2))).collect();
    let transitions = e1.iter().map(|e| e - e0).collect();
    let anharmonicities: Vec<f64> = (0..m).map(|a| -(e2[a] - 2.0 * e1[a] + e0)).collect();
    let cross_kerr = DMatrix::from_fn(m, m, |a, b| {
        if a == b {
            2.0 * anharmonicities[a]
        } else {
            let mut o = vec![0; m];
            o[a] = 1;
            o[b] = 1;
            -(overlap_energy(&o) - e1[a] - e1[b] + e0)
        }
    });
    OracleSpectrum { transitions, anharmonicities, cross_kerr, warnings: Vec::new() }
}

/// Rescales a mode's voltages by a complex factor; participations are
/// unchanged.
pub fn rescaled(mode: &Mode, factor: Complex64) -> Mode {
    Mode { node_voltages: &mode.node_voltages * factor, ..mode.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ELECTRON_CHARGE;
    use crate::modes::{find_modes_lossless, ScanConfig};
    use proptest::prelude::*;

    fn transmon(c: f64, l: f64) -> Circuit {
        Circuit::builder().ground("gnd").node("q").capacitor("Cq", "q", "gnd", c).junction("J", "q", "gnd", l, 1).build().unwrap()
    }

    fn modes_of(c: &Circuit, fmin: f64, fmax: f64) -> Vec<Mode> {
        find_modes_lossless(c, &ScanConfig::new(fmin, fmax)).unwrap().modes
    }

    #[test]
    fn lone_transmon_participates_fully() {
        let c = transmon(80e-15, 10e-9);
        let mut modes = modes_of(&c, 1e9, 10e9);
        let (epr, h) = quantize(&c, &mut modes).unwrap();
        assert!((epr.p[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(modes[0].label.as_deref(), Some("junction:J"));
        // α of an isolated transmon is the charging energy e²/2C
        let ec = ELECTRON_CHARGE.powi(2) / (2.0 * 80e-15) / PLANCK;
        assert!((h.alpha[0] - ec).abs() < 1e-9 * ec);
    }

    #[test]
    fn series_inductor_halves_participation() {
        let c = Circuit::builder()
            .ground("gnd")
            .nodes(["a", "b"])
            .capacitor("C", "a", "gnd", 100e-15)
            .junction("J", "a", "b", 5e-9, 1)
            .inductor("L", "b", "gnd", 5e-9)
            .build()
            .unwrap();
        let modes = modes_of(&c, 1e9, 10e9);
        assert_eq!(modes.len(), 1);
        let row = participation(&c, &modes[0]).unwrap();
        assert!((row.p[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_point_flux_values() {
        let j = JunctionMeta::new("J", 10e-9, 1);
        let w = 2.0 * PI * 5e9;
        assert_eq!(zero_point_flux(0.0, w, &j), 0.0);
        // φ² = 2e²ωL/ħ for p = 1
        let expected = (2.0 * ELECTRON_CHARGE.powi(2) * w * 10e-9 / HBAR).sqrt();
        assert!((zero_point_flux(1.0, w, &j) - expected).abs() < 1e-12);
        assert!((expected - 0.391).abs() < 1e-3);
        let j2 = JunctionMeta::new("J", 20e-9, 1);
        assert!((zero_point_flux(0.3, w, &j2) / zero_point_flux(0.3, w, &j) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn anharmonicity_hand_value() {
        // E/h = 20 GHz, 6 GHz, p = 1: χ = f²/(4E/h) = 450 MHz
        let l = REDUCED_FLUX_QUANTUM.powi(2) / (20e9 * PLANCK);
        let j = JunctionMeta::new("J", l, 1);
        let p = DMatrix::from_element(1, 1, 1.0);
        let h = kerr_from_participations(&[2.0 * PI * 6e9], &p, &[j]);
        assert!((h.alpha[0] - 225e6).abs() < 1e-9 * 225e6);
        let j2 = JunctionMeta::new("J", l, 2);
        let h2 = kerr_from_participations(&[2.0 * PI * 6e9], &p, &[j2]);
        assert!((h2.chi[(0, 0)] - h.chi[(0, 0)] / 4.0).abs() < 1e-9 * h.chi[(0, 0)]);
    }

    fn transmon_resonator(cq: f64, lj: f64, cg: f64, cr: f64, lr: f64) -> Circuit {
        Circuit::builder()
            .ground("gnd")
            .nodes(["q", "r"])
            .capacitor("Cq", "q", "gnd", cq)
            .junction("J", "q", "gnd", lj, 1)
            .capacitor("Cg", "q", "r", cg)
            .capacitor("Cr", "r", "gnd", cr)
            .inductor("Lr", "r", "gnd", lr)
            .build()
            .unwrap()
    }

    #[test]
    fn dispersive_pair_labels() {
        let c = transmon_resonator(80e-15, 12e-9, 4e-15, 400e-15, 1.0e-9);
        let mut modes = modes_of(&c, 1e9, 12e9);
        assert_eq!(modes.len(), 2);
        let (epr, h) = quantize(&c, &mut modes).unwrap();
        let labels: Vec<_> = modes.iter().map(|m| m.label.clone().unwrap()).collect();
        assert_eq!(labels.iter().filter(|l| l.starts_with("junction:")).count(), 1);
        for m in 0..2 {
            assert!((h.alpha[m] - 0.5 * h.chi[(m, m)]).abs() < 1e-12 * h.chi[(m, m)]);
            assert!((h.lamb_shift[m] - 0.5 * (h.chi[(m, 0)] + h.chi[(m, 1)])).abs() < 1e-9 * h.lamb_shift[m]);
        }
        assert_eq!(h.chi[(0, 1)], h.chi[(1, 0)]);
        assert!(epr.p.iter().all(|p| *p >= 0.0 && *p <= 1.0));
    }

    #[test]
    fn no_junctions_all_resonator_like() {
        let c = Circuit::builder().ground("gnd").node("n").capacitor("C", "n", "gnd", 1e-13).inductor("L", "n", "gnd", 1e-8).build().unwrap();
        let mut modes = modes_of(&c, 1e9, 10e9);
        let (_, h) = quantize(&c, &mut modes).unwrap();
        assert_eq!(modes[0].label.as_deref(), Some("resonator-like"));
        assert_eq!(h.chi[(0, 0)], 0.0);
    }

    #[test]
    fn explicit_chain_matches_array() {
        let n = 4u32;
        let l = 12e-9;
        let array = Circuit::builder()
            .ground("gnd")
            .nodes(["q", "r"])
            .capacitor("Cq", "q", "gnd", 70e-15)
            .junction("J", "q", "gnd", l, n)
            .capacitor("Cg", "q", "r", 5e-15)
            .capacitor("Cr", "r", "gnd", 300e-15)
            .inductor("Lr", "r", "gnd", 1.5e-9)
            .build()
            .unwrap();
        let mut b = Circuit::builder()
            .ground("gnd")
            .nodes(["q", "r", "j1", "j2", "j3"])
            .capacitor("Cq", "q", "gnd", 70e-15)
            .capacitor("Cg", "q", "r", 5e-15)
            .capacitor("Cr", "r", "gnd", 300e-15)
            .inductor("Lr", "r", "gnd", 1.5e-9);
        let chain = ["q", "j1", "j2", "j3", "gnd"];
        for k in 0..4 {
            b = b.junction(&format!("J{k}"), chain[k], chain[k + 1], l / n as f64, 1);
        }
        let explicit = b.build().unwrap();
        let cfg = ScanConfig::new(1e9, 15e9);
        let mut ma = find_modes_lossless(&array, &cfg).unwrap().modes;
        let mut mb = find_modes_lossless(&explicit, &cfg).unwrap().modes;
        assert_eq!(ma.len(), mb.len());
        let (_, ha) = quantize(&array, &mut ma).unwrap();
        let (_, hb) = quantize(&explicit, &mut mb).unwrap();
        assert!((&ha.chi - &hb.chi).amax() < 1e-6 * ha.chi.amax());
    }

    #[test]
    fn harmonic_limit_of_oracle() {
        let j = JunctionMeta::new("J", 10e-9, 1);
        let phi = DMatrix::zeros(2, 1);
        let w = [2.0 * PI * 5e9, 2.0 * PI * 7e9];
        let o = oracle_diagonalize(&w, &phi, &[j], 6).unwrap();
        assert!((o.transitions[0] - 5e9).abs() < 1e-3);
        assert!((o.transitions[1] - 7e9).abs() < 1e-3);
        assert!(o.anharmonicities.iter().all(|a| a.abs() < 1e-3));
    }

    #[test]
    fn single_mode_oracle_follows_second_order_series() {
        // H = ħω(n − λx⁴), λ = φ²/48: α = ω(12λ + 612λ² + O(λ³))
        for phi in [0.1, 0.2, 0.3] {
            let wq = 2.0 * PI * 6e9;
            let e = HBAR * wq / (2.0 * phi * phi);
            let j = JunctionMeta::new("J", REDUCED_FLUX_QUANTUM.powi(2) / e, 1);
            let h = kerr_from_participations(&[wq], &DMatrix::from_element(1, 1, 1.0), &[j.clone()]);
            let o = oracle_diagonalize(&[wq], &h.phi_zpf, &[j], 12).unwrap();
            let lam = phi * phi / 48.0;
            assert!((h.alpha[0] - 6e9 * 12.0 * lam).abs() < 1e-9 * h.alpha[0]);
            let second = 6e9 * (12.0 * lam + 612.0 * lam * lam);
            assert!((o.anharmonicities[0] - second).abs() < 0.25 * (second - h.alpha[0]));
        }
    }

    fn perturbative_vs_oracle(phi_q: f64, phi_r: f64) -> (HamiltonianParams, OracleSpectrum) {
        // choose E so that a transmon-like mode at 6 GHz has φ_q
        let wq = 2.0 * PI * 6e9;
        let wr = 2.0 * PI * 8e9;
        let e = HBAR * wq / (2.0 * phi_q * phi_q);
        let l = REDUCED_FLUX_QUANTUM.powi(2) / e;
        let j = JunctionMeta::new("J", l, 1);
        let pq = 1.0;
        let pr = phi_r * phi_r * 2.0 * e / (HBAR * wr);
        let p = DMatrix::from_row_slice(2, 1, &[pq, pr]);
        let h = kerr_from_participations(&[wq, wr], &p, &[j.clone()]);
        let o = oracle_diagonalize(&[wq, wr], &h.phi_zpf, &[j], 10).unwrap();
        (h, o)
    }

    #[test]
    fn oracle_confirms_first_order_two_mode() {
        let (h, o) = perturbative_vs_oracle(0.15, 0.05);
        assert!((o.anharmonicities[0] - h.alpha[0]).abs() < 0.05 * h.alpha[0]);
        assert!((o.cross_kerr[(0, 1)] - h.chi[(0, 1)]).abs() < 0.05 * h.chi[(0, 1)]);
        assert!((o.transitions[0] - h.dressed_frequencies[0]).abs() < 0.05 * h.lamb_shift[0] + 1e-3 * h.bare_frequencies[0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn epr_bounds(cq in 50e-15..120e-15f64, lj in 6e-9..20e-9f64, cg in 1e-15..10e-15f64, cr in 200e-15..600e-15f64, lr in 0.6e-9..2e-9f64) {
            let c = transmon_resonator(cq, lj, cg, cr, lr);
            let modes = find_modes_lossless(&c, &ScanConfig::new(0.5e9, 30e9)).unwrap().modes;
            prop_assert_eq!(modes.len(), 2);
            let epr = epr_table(&c, &modes).unwrap();
            for m in 0..2 {
                let p = epr.p[(m, 0)];
                prop_assert!(p >= -1e-9 && p <= 1.0 + 1e-9);
            }
            let h = kerr_matrix(&modes, &epr, &JunctionMeta::from_circuit(&c));
            for a in 0..2 {
                for b in 0..2 {
                    prop_assert!(h.chi[(a, b)] >= 0.0);
                    prop_assert!((h.chi[(a, b)] - h.chi[(b, a)]).abs() <= 1e-12 * h.chi.amax());
                }
            }
        }

        #[test]
        fn gauge_invariance(re in -3.0..3.0f64, im in -3.0..3.0f64) {
            prop_assume!(re.abs() + im.abs() > 1e-3);
            let c = transmon_resonator(80e-15, 12e-9, 4e-15, 400e-15, 1.0e-9);
            let modes = modes_of(&c, 1e9, 12e9);
            let scaled: Vec<Mode> = modes.iter().map(|m| rescaled(m, Complex64::new(re, im))).collect();
            let a = epr_table(&c, &modes).unwrap();
            let b = epr_table(&c, &scaled).unwrap();
            prop_assert!((&a.p - &b.p).amax() < 1e-12);
        }

        #[test]
        fn perturbative_within_five_percent(phi_q in 0.02..0.12f64, ratio in 0.05..0.5f64) {
            let (h, o) = perturbative_vs_oracle(phi_q, phi_q * ratio);
            prop_assert!((o.anharmonicities[0] - h.alpha[0]).abs() < 0.05 * h.alpha[0]);
            prop_assert!((o.anharmonicities[1] - h.alpha[1]).abs() < 0.05 * h.alpha[1]);
            prop_assert!((o.cross_kerr[(0, 1)] - h.chi[(0, 1)]).abs() < 0.05 * h.chi[(0, 1)]);
        }
    }

    #[test]
    fn sum_rule_when_only_junctions_are_inductive() {
        let c = Circuit::builder()
            .ground("gnd")
            .nodes(["a", "b"])
            .capacitor("Ca", "a", "gnd", 80e-15)
            .junction("Ja", "a", "gnd", 10e-9, 1)
            .capacitor("Cb", "b", "gnd", 90e-15)
            .junction("Jb", "b", "gnd", 11e-9, 1)
            .capacitor("Ck", "a", "b", 3e-15)
            .build()
            .unwrap();
        let modes = modes_of(&c, 1e9, 10e9);
        let epr = epr_table(&c, &modes).unwrap();
        for m in 0..modes.len() {
            assert!((epr.p.row(m).sum() - 1.0).abs() < 1e-9);
        }
    }
}
