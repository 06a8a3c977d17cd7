//! Numerical laboratory for the weighted isoperimetric problem in hyperbolic
//! space with a radial log-convex density.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod density;
pub mod error;
pub mod functionals;
pub mod generating_curve;
pub mod hopf;
pub mod hyperbolic;
pub mod lemma_lab;
pub mod ode;
pub mod optimizer;
pub mod quadrature;
pub mod special;

pub use density::RadialDensity;
pub use error::{Error, Result};
