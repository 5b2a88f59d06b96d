//! Verdicts, certificates, and their independent re-verification.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, CnfFormula};
use crate::dyadic::{compare_threshold, Dyadic, Threshold};
use crate::error::Result;
use crate::interval::Interval;
use crate::oracle::sigma_exact_capped;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    /// `σ(φ) ≥ δ`
    Ge,
    /// `σ(φ) < δ`
    Lt,
    /// `σ(φ) > δ`
    Gt,
    /// `σ(φ) = δ`
    Eq,
}

impl Verdict {
    /// Whether the verdict is consistent with the true ordering of `σ(φ)` against `δ`.
    pub fn agrees_with(self, ord: Ordering) -> bool {
        match self {
            Verdict::Ge => ord != Ordering::Less,
            Verdict::Lt => ord == Ordering::Less,
            Verdict::Gt => ord == Ordering::Greater,
            Verdict::Eq => ord == Ordering::Equal,
        }
    }

    /// The answer to the question the verdict addresses is "yes".
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Ge | Verdict::Gt | Verdict::Eq)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Ge => "σ(φ) ≥ δ",
            Verdict::Lt => "σ(φ) < δ",
            Verdict::Gt => "σ(φ) > δ",
            Verdict::Eq => "σ(φ) = δ",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SunflowerCollapsing,
    LocalityBased,
    IntervalBounding,
    IntervalReduction,
    ReduceToSat,
    Oracle,
}

/// Evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    None,
    /// A kernel produced by sunflower collapsing, with its exact probability.
    Kernel { kernel: CnfFormula, sigma: Dyadic },
    /// An interval guaranteed to contain `σ(φ)`.
    Interval { interval: Interval },
    /// A sub-formula with probability below the threshold.
    Subset { subset: CnfFormula, sigma: Dyadic },
    /// A model of `φ` that falsifies the kernel.
    Model { kernel: CnfFormula, kernel_sigma: Dyadic, model: Assignment },
    /// Exact probability from the oracle.
    Sigma { sigma: Dyadic },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub algorithm: Algorithm,
    pub gap_used: Option<Dyadic>,
    pub certificate: Certificate,
}

impl Decision {
    /// Re-checks the certificate from scratch against `φ` and `δ`.
    ///
    /// Certificate-local facts are verified first (containment, model checks, interval
    /// membership); the verdict is then compared with the oracle when `φ` fits the cap.
    pub fn verify(&self, phi: &CnfFormula, delta: &Threshold, cap: usize) -> Result<bool> {
        let local = match &self.certificate {
            Certificate::None => true,
            Certificate::Kernel { kernel, sigma } => {
                sigma_exact_capped(kernel, None, cap)? == *sigma
                    && self.verdict.agrees_with(compare_threshold(sigma, delta))
            }
            Certificate::Interval { interval } => {
                let s = sigma_exact_capped(phi, None, cap)?;
                interval.contains(&s)
                    && match self.verdict {
                        Verdict::Lt => delta.cmp_dyadic(interval.hi()) == Ordering::Less,
                        Verdict::Ge => delta.cmp_dyadic(interval.lo()) != Ordering::Less,
                        _ => false,
                    }
            }
            Certificate::Subset { subset, sigma } => {
                subset.clauses().iter().all(|c| phi.contains(c))
                    && sigma_exact_capped(subset, None, cap)? == *sigma
                    && delta.cmp_dyadic(sigma) == Ordering::Less
                    && self.verdict == Verdict::Lt
            }
            Certificate::Model { kernel, kernel_sigma, model } => {
                phi.satisfied_by(model)
                    && !kernel.satisfied_by(model)
                    && sigma_exact_capped(kernel, None, cap)? == *kernel_sigma
                    && delta.cmp_dyadic(kernel_sigma) == Ordering::Equal
                    && self.verdict == Verdict::Gt
            }
            Certificate::Sigma { sigma } => {
                sigma_exact_capped(phi, None, cap)? == *sigma
                    && self.verdict.agrees_with(compare_threshold(sigma, delta))
            }
        };
        if !local {
            return Ok(false);
        }
        let s = sigma_exact_capped(phi, None, cap)?;
        Ok(self.verdict.agrees_with(compare_threshold(&s, delta)))
    }
}

/// Threshold mode for the oracle decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Decide `σ ≥ δ` (answers GE or LT).
    Ge,
    /// Decide `σ > δ` (answers GT or LT/EQ).
    Gt,
    /// Decide `σ = δ` (answers EQ, LT or GT).
    Eq,
}

/// Reference decision using the exact oracle.
pub fn oracle_decide(phi: &CnfFormula, delta: &Threshold, mode: Mode, cap: usize) -> Result<Decision> {
    let sigma = sigma_exact_capped(phi, None, cap)?;
    let ord = compare_threshold(&sigma, delta);
    let verdict = match (mode, ord) {
        (Mode::Ge, Ordering::Less) => Verdict::Lt,
        (Mode::Ge, _) => Verdict::Ge,
        (_, Ordering::Less) => Verdict::Lt,
        (_, Ordering::Equal) => Verdict::Eq,
        (_, Ordering::Greater) => Verdict::Gt,
    };
    Ok(Decision {
        verdict,
        algorithm: Algorithm::Oracle,
        gap_used: None,
        certificate: Certificate::Sigma { sigma },
    })
}
