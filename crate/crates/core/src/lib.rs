//! Numerical laboratory for Coulomb-type energy integrals
//! `∫_{B^d} |Σ α_k (x_k − x)/|x_k − x|^d| dm(x)` of weighted point charges
//! in the closed unit ball.
//!
//! * [`geometry`]: charge configurations and standard layouts
//! * [`field`]: point evaluation of field, potential and Cauchy transform
//! * [`quadrature`]: singular-integrand quadrature for the energy and the
//!   related single-fraction and two-pole integrals
//! * [`bounds`]: lower/upper bounds, proof inequalities and verdicts
//! * [`optimizer`]: local search for low-energy charge positions
//! * [`verify`]: the end-to-end check suite used by `chuilab verify-all`

pub mod bounds;
pub mod corpus;
pub mod cubature;
pub mod error;
pub mod field;
pub mod geometry;
pub mod optimizer;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    fibonacci_sphere_config, random_config, uniform_circle_config, weighted_arc_config, Arc,
    ArcPartition, Charge, ChargeConfiguration,
};
pub use par::Execution;
pub use quadrature::{chui_energy, QuadratureResult, QuadratureSpec};
