//! Per-component physics: admittance stamps Y(z) and inductive-energy
//! evaluators for lumped elements, junction arrays, single CPW lines and
//! multi-line CPW couplers.

mod coupler;
mod lumped;
mod tml;
mod wave;

pub use coupler::{coupler_admittance, coupler_admittance_closed_form, coupler_inductive_energy, coupler_wave_state};
pub use lumped::{equivalent_junction, lumped_admittance, lumped_inductive_energy, LumpedKind};
pub use tml::{tml_admittance, tml_inductive_energy, tml_wave_state};
pub use wave::{integrate_exp, is_pole, CouplerMatrices, TravelingWaveState, WaveParameters};
