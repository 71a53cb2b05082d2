//! Multiple ergodic averages on unipotent nilmanifolds.
//!
//! The library realizes translations on compact quotients `U_n / Gamma`
//! (integer unitriangular lattice) and numerically verifies that the
//! non-conventional time average `(1/N) sum_n prod_j f_j(T^{jn} x)`
//! converges to an explicit product-of-Haar-measures integral, while the
//! algebraic scaffolding behind the convergence (the star group, its
//! lattice, the skew translation, the intertwining with the diagonal
//! action, and the ergodicity criteria) is verified in exact arithmetic
//! over rational combinations of square roots.
//!
//! Modules, bottom up:
//! - [`scalar`]: exact radical arithmetic and the shared scalar trait;
//! - [`linalg`]: rational/integer kernels and Hermite bases;
//! - [`group`]: the unitriangular group, lower central series, exp/log;
//! - [`nilmanifold`]: Mal'cev coordinates, fundamental-domain reduction,
//!   Haar sampling, test functions;
//! - [`star_group`]: the star product, skew translation, orbit embedding;
//! - [`ergodicity`]: structure constants, maximal-torus projections, and
//!   exact rational-independence tests;
//! - [`experiments`]: orbit averages, limit-integral estimators, reports;
//! - [`config`]: declarative experiment descriptions (JSON);
//! - [`verify`]: randomized exact verification suites.

pub mod config;
pub mod ergodicity;
pub mod experiments;
pub mod group;
pub mod linalg;
pub mod nilmanifold;
pub mod scalar;
pub mod star_group;
pub mod verify;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("cannot parse scalar {input:?}: {reason}")]
    ScalarParse { input: String, reason: String },

    #[error("bad matrix literal: {0}")]
    BadMatrix(String),

    #[error("invalid configuration: {0}")]
    BadConfig(String),

    #[error("lower-central-series level {level} out of range 1..={class}")]
    LevelOutOfRange { level: usize, class: usize },

    #[error("star closure violated: component {component} has degree {degree}")]
    StarClosure { component: usize, degree: String },

    #[error("tensor grid estimator supports nilpotency class <= 2, got {0}")]
    TensorGridUnsupported(usize),

    #[error("degenerate interpolation: degree bound {0} exceeded")]
    DegenerateInterpolation(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
