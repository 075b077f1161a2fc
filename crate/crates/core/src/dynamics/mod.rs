//! Hamiltonian flows, integrators, clock changes and Jacobi geodesics.

mod geodesic;
mod hamiltonian;
mod integrate;
mod poisson;
mod reparam;
mod state;

pub use geodesic::{
    compare_trajectories, geodesic_against_reference, integrate_rescaled, jm_geodesic, newtonian_vs_geodesic, project_to_energy_surface,
    ComparisonConfig, Equivalence, SURFACE_PROJECTION_TOL,
};
pub use hamiltonian::{
    hamiltonian_flow_field, ClockRate, CustomHamiltonian, HamiltonianLabel, HamiltonianSystem,
    MOMENTUM_FLOOR, ORIGIN_FLOOR,
};
pub use integrate::{
    integrate, IntegratorConfig, Method, COLLISION_GUARD, IMPLICIT_MAX_ITER, IMPLICIT_TOL, MIN_STEP,
};
pub use poisson::{poisson_bracket, AngularMomentumZ, PhaseFunction};
pub use reparam::{reparameterize, Direction};
pub use state::{OrbitalElements, Parameter, PhaseState, Trajectory};
