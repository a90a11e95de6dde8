//! Fixed-point operators from first-order optimization, sampled
//! certification of generalized averaged nonexpansiveness (GAN), Picard
//! iteration with traces, and rate diagnostics.
//!
//! ```
//! use fixpoint_core::{certify, operators, NormSpec, OperatorClass, SamplingPlan, Vector};
//!
//! let t = operators::ProxFamily::l1(1.0).operator(1.0, 1);
//! let plan = SamplingPlan::with_default_scales(200, 7).unwrap();
//! let cert = certify::certify(&t, OperatorClass::Gan { gamma: 1.0, mu: 1.0 }, &NormSpec::L2, &plan, 1e-10).unwrap();
//! assert!(cert.passed());
//! # let _ = Vector::zeros(1);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod error;
pub mod iterate;
pub mod metrics;
pub mod operators;
pub mod problems;
pub mod report;

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

pub use certify::{GanCertificate, OperatorClass, SamplingPlan, Verdict};
pub use error::{Error, Result};
pub use iterate::{picard, IterationTrace, RateFit, RateModel, StopReason};
pub use metrics::{NormSpec, WeightedMetric};
pub use operators::{Operator, ProxFamily, VectorMap};
pub use problems::{ProblemKind, ProblemSpec};
