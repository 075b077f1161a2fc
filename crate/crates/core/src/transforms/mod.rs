//! Canonical transformations and regularizations of the Kepler problem.
//!
//! Every map acts pointwise on phase space; trajectory helpers map sample by
//! sample and tag failures with the sample index.

mod anomaly;
mod bohlin;
mod houri;
mod milnor;
mod moser;

pub use anomaly::{
    anomaly_epsilon, anomaly_system, lrl_vector, regularized_g, AnomalyRun, RegularizedFlow,
};
pub use bohlin::{
    bohlin_forward, bohlin_hamiltonian_map, bohlin_identity_residual, bohlin_trajectory,
    kepler_level, BohlinImage,
};
pub use houri::{
    houri_flow_field, houri_hamiltonian, houri_metric, houri_swap, onto_unit_level,
    quasi_hamiltonian_residual, HouriFlow,
};
pub use milnor::{milnor_check, milnor_invert, milnor_states, MilnorReport, MilnorState};
pub use moser::{moser_flow, moser_flow_equivalence, moser_quantities, moser_time_alignment, MoserData};

use serde::{Deserialize, Serialize};

use crate::geometry::SystemSpec;
use crate::{Error, Result};

/// Transforms selectable from scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Bohlin,
    Houri,
    Milnor,
    Moser,
    Anomaly,
}

impl TransformKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransformKind::Bohlin => "bohlin",
            TransformKind::Houri => "houri",
            TransformKind::Milnor => "milnor",
            TransformKind::Moser => "moser",
            TransformKind::Anomaly => "anomaly",
        }
    }
}

/// The coupling of a unit-mass Kepler system; the regularizations are stated
/// for `H = |p|²/2 - α/|x|`.
pub(crate) fn unit_mass_kepler(spec: &SystemSpec) -> Result<f64> {
    let alpha = spec.require_alpha()?;
    if spec.mass != 1.0 {
        return Err(Error::InvalidSpec(format!(
            "this construction assumes unit mass, got m = {}",
            spec.mass
        )));
    }
    Ok(alpha)
}
