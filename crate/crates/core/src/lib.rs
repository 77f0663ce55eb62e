//! Exact domain-wall partition functions for the trigonometric Felderhof
//! free-fermion vertex model.
//!
//! Every closed-form route is implemented independently so the routes can be
//! checked against one another:
//!
//! * [`enumeration`]: configuration enumeration and transfer contraction,
//!   the reference oracle;
//! * [`izergin`]: the determinant, product, homogeneous and 2-Toda results
//!   at vanishing rapidities;
//! * [`bethe`]: monodromy operators, F-matrix twisting and the general
//!   product formula;
//! * [`harness`]: parameter documents, seeded generation and check suites.

pub mod bethe;
pub mod enumeration;
pub mod error;
pub mod harness;
pub mod izergin;
pub mod model;
pub mod numeric;

pub use error::{Error, Result};
pub use model::{
    checked_weights, general_weights, restricted_weights, vertex_weight, Line, ModelParams, RestrictedWeights,
    SixWeights, VertexKind,
};
pub use numeric::{BivariateJet, Matrix, Scalar};
pub use bethe::{dwpf_bethe, dwpf_product_general, dwpf_twisted};
pub use enumeration::{count_configurations, dwpf_brute, dwpf_transfer};
pub use harness::{compute, parse_params, run_suite, Method, Report, SuiteConfig};
pub use izergin::{dwpf_homogeneous, dwpf_restricted_det, dwpf_restricted_product, RestrictedParams};
