//! Eigenmode analysis of superconducting circuits that mix lumped elements
//! with coplanar-waveguide (CPW) transmission lines and multi-line couplers.
//!
//! Modes are the roots of det Y(z) = 0 for the nodal admittance matrix Y at
//! complex frequency z = κ/2 + jω. Distributed elements enter Y through their
//! exact telegrapher-equation admittances, so no lumped discretization is
//! needed. From each mode's node-voltage eigenvector the inductive energy of
//! every component is evaluated, giving the energy-participation ratios of the
//! Josephson junction arrays and, from those, the cross-Kerr matrix,
//! anharmonicities and Lamb shifts of the dispersive Hamiltonian.
//!
//! Module map:
//!
//! - [`numerics`]: determinants, null vectors, Brent and Newton root finding,
//!   singular quadrature, elliptic integrals.
//! - [`elements`]: admittance stamps and inductive energies per component.
//! - [`cpw`]: conformal-mapping capacitance matrices of CPW cross-sections.
//! - [`circuit`]: the circuit graph and admittance assembly.
//! - [`modes`]: lossless scan and lossy Newton refinement of the modes.
//! - [`epr`]: participation ratios and Hamiltonian parameters, plus a Fock
//!   space diagonalization used as a test oracle.
//! - [`netlist`] and [`analysis`]: the JSON netlist format and the analysis
//!   workflows behind the `analyze` binary.

pub mod analysis;
pub mod circuit;
pub mod constants;
pub mod cpw;
pub mod elements;
pub mod epr;
pub mod error;
pub mod modes;
pub mod netlist;
pub mod numerics;

pub use circuit::{assemble_admittance, Circuit, CircuitBuilder, ComplexFrequency, ComponentInstance, ComponentKind, NodeRef};
pub use error::{Error, Result};
