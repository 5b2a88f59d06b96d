//! Exact decision procedures for the satisfaction probability `σ(φ)` of k-CNF formulas: the
//! fraction of assignments that satisfy `φ`, compared against a rational threshold `δ`.
//!
//! * [`cnf`], [`dimacs`], [`oracle`]: formulas, restriction, parsing, exact model counting.
//! * [`combinatorics`]: packings and sunflowers.
//! * [`interval`]: probability intervals and the interval-based decisions.
//! * [`kernel`]: sunflower collapsing and the locality check.
//! * [`trichotomy`]: targets, the backdoor reduction for `>` and `=`, classification.
//! * [`spectrum`]: achievable probabilities, spectral gaps, figure export.
//! * [`majmaj`]: majority-of-majority via a single threshold question.

pub mod cnf;
pub mod combinatorics;
pub mod config;
pub mod decision;
pub mod dimacs;
pub mod dyadic;
pub mod error;
pub mod interval;
pub mod kernel;
pub mod lsat;
pub mod majmaj;
pub mod oracle;
pub mod search;
pub mod spectrum;
pub mod trichotomy;

pub use cnf::{link, restrict, unit_rule, Assignment, Clause, CnfFormula, Literal};
pub use config::Limits;
pub use decision::{Algorithm, Certificate, Decision, Mode, Verdict};
pub use dyadic::{compare_threshold, cp, Dyadic, Threshold};
pub use error::{Error, Result};
pub use interval::Interval;
pub use oracle::sigma_exact;
