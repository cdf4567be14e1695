//! β-distance covariance.
//!
//! Exact values for finite discrete laws, plug-in estimators for samples,
//! a characteristic-function quadrature for scalar laws, a Gaussian
//! projection Monte Carlo estimator, the closed form at β = 2, and
//! inference utilities (permutation test, consistency sweeps, tail and
//! moment-regime diagnostics).

pub mod beta2;
pub mod charfn;
pub mod charrv;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod io;
pub mod metric;
pub mod par;
pub mod population;
pub mod quad;
pub mod rng;
pub mod sum;

pub use error::{DcovError, Result};
pub use estimators::{dcor, dcov_centered, dcov_plugin_d1, DcovEstimate, Method, PairedSample, SampleMatrices};
pub use metric::{
    norms_to_base, pairwise_distances, validate_table_metric, DistanceMatrix, MetricKind, MetricSpec,
    MetricViolation, Point, TableMetric,
};
pub use population::{dcov_exact, hhat_eval, projection_demo, ttilde_eval, DiscreteJoint, ExactMethod, Marginal};
pub use beta2::{cross_cov, dcov2_closed};
pub use charfn::{c_const, dcov_charfn_1d};
pub use charrv::{cb_const, dcov_charrv_mc, dcov_hm, CharRvConfig};
pub use quad::QuadConfig;
