//! Sparse linear regression under a generalized elastic-net penalty.
//!
//! The model pairs an `l_r` residual loss (`r` in {1, 2, inf}, chosen to suit
//! the noise) with a ridge term and a nonconvex `l_q` sparsity penalty
//! (`0 < q < 1`):
//!
//! ```text
//! minimize  ||X b - y||_r + lambda2 ||b||_2^2 + lambda1 sum_i |b_i|^q
//! ```
//!
//! The nonconvex penalty is handled by an iterative reweighted l1 scheme:
//! each outer iteration freezes per-coordinate weights
//! `w_i = min(u_eps, |b_i|^{q-1})` and solves the convex weighted subproblem
//!
//! ```text
//! minimize  ||X b - y||_r + lambda2 ||b||_2^2 + q lambda1 ||W b||_1
//! ```
//!
//! with one of two inner solvers:
//!
//! - [`admm`]: an alternating direction method of multipliers on the split
//!   reformulation, with a factorization-cached beta step;
//! - [`pmm_ssn`]: a proximal majorization of the subproblem whose dual is
//!   minimized by a semismooth Newton method with conjugate-gradient inner
//!   solves.
//!
//! Entry points:
//!
//! - [`driver::fit`] runs the full outer loop and returns a
//!   [`driver::FitReport`] with stationarity and support certificates.
//! - [`prox`] holds the proximal-mapping toolbox both solvers are built on.
//! - [`data`] generates synthetic benchmark instances, reads LIBSVM files,
//!   and computes trial-averaged accuracy metrics.
//! - [`cli`] backs the `genelnet` binary (`generate`, `fit`, `bench`,
//!   `prox-selftest`).
//!
//! The `examples/` directory contains one runnable walkthrough per major
//! capability; start with `cargo run --example reweighted_lq_fit`.

pub mod admm;
pub mod cli;
pub mod config;
pub mod data;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod penalty;
pub mod pmm_ssn;
pub mod problem;
pub mod prox;

pub use error::{Error, Result};
pub use penalty::{PenaltySpec, StationarityReport, WeightVector};
pub use problem::ProblemData;
pub use prox::NormKind;
