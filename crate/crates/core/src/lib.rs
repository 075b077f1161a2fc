//! Jacobi–Maupertuis lift of natural mechanical systems and the canonical
//! transformation toolbox of the Kepler and Hooke problems.
//!
//! The crate is organised around five layers:
//!
//! * [`geometry`]: system parameters, conformal (Jacobi) metrics, Christoffel
//!   symbols and Gaussian curvature.
//! * [`dynamics`]: Hamiltonian systems, ODE integrators, the `t ↔ σ`
//!   reparameterization, Jacobi geodesics and Poisson brackets.
//! * [`transforms`]: Bohlin, Houri, Milnor, Moser and eccentric-anomaly maps.
//! * [`invariants`]: conserved-quantity evaluation and drift reports.
//! * [`cli`]: scenario files, CSV/JSON emission and the `jmlift` front end.
//!
//! ```
//! use jmlift::dynamics::{jm_geodesic, IntegratorConfig, OrbitalElements};
//!
//! let (spec, s0) = OrbitalElements::new(1.0, 0.0).initial_state(1.0, 1.0, 2).unwrap();
//! let config = IntegratorConfig::implicit_midpoint(1e-3);
//! let geodesic = jm_geodesic(&spec, &s0, (0.0, 0.1), &config).unwrap();
//! assert!(geodesic.samples.len() > 10);
//! ```

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod invariants;
pub mod numdiff;
pub mod transforms;

pub use error::{Error, Result};

/// Phase-space vectors are heap vectors of length 2 or 3.
pub type Vector = nalgebra::DVector<f64>;
/// Square matrices sized by the configuration dimension.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Builds a [`Vector`] from a slice.
pub fn vector(components: &[f64]) -> Vector {
    Vector::from_column_slice(components)
}
