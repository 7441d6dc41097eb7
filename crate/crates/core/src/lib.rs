//! Laguerre beta-ensembles near the upper spectral edge.
//!
//! Samples the bidiagonal model, evaluates `log|det(T/m - gamma)|` through a
//! normalized ratio recursion that stays stable at any `n`, and checks the edge
//! central limit theorem and its supporting lemmas numerically.

pub mod decomposition;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod logdet;
pub mod marchenko_pastur;
pub mod numfmt;
pub mod seeding;
pub mod stats;
pub mod theory;

pub use ensemble::{build_tridiagonal, sample_bidiagonal, sample_chi_squared, EnsembleParams, TridiagonalSample};
pub use error::{EdgeError, Result};
pub use geometry::{edge_params, rho_pair, EdgeGeometry};
pub use logdet::{eigen_oracle, run_recursion, RecursionTrace};
pub use theory::{c_lambda, centering, standardize, CltConstants};
