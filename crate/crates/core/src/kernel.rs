//! Sunflower collapsing and the locality-based decision.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::cnf::{link, Clause, CnfFormula};
use crate::combinatorics::{cp, find_sunflower, next_combination};
use crate::config::Limits;
use crate::decision::{Algorithm, Certificate, Decision, Verdict};
use crate::dyadic::{Dyadic, Threshold};
use crate::error::{Error, Result};
use crate::oracle::sigma_exact_capped;

/// Least `h ≥ 0` with `cp(k)^(h+1) < gap`.
pub fn collapse_threshold(k: u32, gap: &Dyadic) -> Result<u32> {
    if gap.is_zero() {
        return Err(Error::invalid("gap must be positive"));
    }
    let base = cp(k);
    let mut p = base.clone();
    let mut h = 0u32;
    while p >= *gap {
        p = &p * &base;
        h += 1;
    }
    Ok(h)
}

/// One collapse step: every clause containing `core` was replaced by `core`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseStep {
    pub core: Clause,
    pub link_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelResult {
    pub kernel: CnfFormula,
    pub h: u32,
    pub trace: Vec<CollapseStep>,
}

/// Collapses sunflowers with at least `h + 1` petals until none is left.
///
/// `h` is raised to 1 when given as 0. A formula containing the empty clause has kernel `{∅}`.
pub fn kernelize(phi: &CnfFormula, h: u32) -> KernelResult {
    let h = h.max(1);
    let k = phi.width_bound();
    if phi.contains_empty_clause() {
        let kernel = CnfFormula::with_width([Clause::empty()], k).expect("empty clause fits");
        return KernelResult { kernel, h, trace: Vec::new() };
    }
    let mut cur = phi.clone();
    let mut trace = Vec::new();
    while let Some(sf) = find_sunflower(&cur, h as usize + 1) {
        let linked = link(&cur, &sf.core);
        let mut next: Vec<Clause> =
            cur.clauses().iter().filter(|c| !sf.core.is_subset_of(c)).cloned().collect();
        next.push(sf.core.clone());
        trace.push(CollapseStep { core: sf.core, link_size: linked.len() });
        cur = CnfFormula::with_width(next, k).expect("collapsing never widens clauses");
        if cur.contains_empty_clause() {
            cur = CnfFormula::with_width([Clause::empty()], k).expect("empty clause fits");
            break;
        }
    }
    KernelResult { kernel: cur, h, trace }
}

/// `(2h)^k · k!`, the size bound on a kernel.
pub fn kernel_size_bound(k: u32, h: u32) -> BigUint {
    let fact: BigUint = (1..=k).fold(BigUint::one(), |a, i| a * i);
    BigUint::from(2 * h).pow(k) * fact
}

/// Decides `σ(φ) ≥ δ` by kernelizing with the collapse threshold for `gap` and asking the
/// oracle about the kernel.
pub fn sunflower_collapsing_decide(
    phi: &CnfFormula,
    delta: &Threshold,
    gap: &Dyadic,
    limits: &Limits,
) -> Result<Decision> {
    let h = collapse_threshold(phi.width_bound() as u32, gap)?;
    let kr = kernelize(phi, h);
    let sigma = sigma_exact_capped(&kr.kernel, None, limits.oracle_var_cap)?;
    let verdict = if delta.cmp_dyadic(&sigma) == Ordering::Less { Verdict::Lt } else { Verdict::Ge };
    Ok(Decision {
        verdict,
        algorithm: Algorithm::SunflowerCollapsing,
        gap_used: Some(gap.clone()),
        certificate: Certificate::Kernel { kernel: kr.kernel, sigma },
    })
}

/// How the locality constant is derived from `(k, gap)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalityPreset {
    /// `C = 1 + h`, with `h` the collapse threshold.
    Listing,
    /// `C = (2(1 + h))^k · k!`, the kernel-size bound. Sound for every gap.
    Lemma,
}

pub fn locality_constant(k: u32, gap: &Dyadic, preset: LocalityPreset) -> Result<u64> {
    let h = collapse_threshold(k, gap)?;
    Ok(match preset {
        LocalityPreset::Listing => 1 + h as u64,
        LocalityPreset::Lemma => kernel_size_bound(k, h + 1).to_u64().unwrap_or(u64::MAX),
    })
}

/// Decides `σ(φ) ≥ δ` by looking for a subset `ψ ⊆ φ` with `|ψ| ≤ C` and `σ(ψ) < δ`.
/// Subsets are visited by size, then in canonical combination order.
pub fn locality_decide(
    phi: &CnfFormula,
    delta: &Threshold,
    c: usize,
    limits: &Limits,
) -> Result<Decision> {
    if c == 0 {
        return Err(Error::invalid("locality constant must be at least 1"));
    }
    let m = phi.len();
    let c = c.min(m);
    let mut total: u64 = 0;
    let mut binom: u64 = 1;
    for i in 1..=c {
        binom = binom.saturating_mul((m - i + 1) as u64) / i as u64;
        total = total.saturating_add(binom);
    }
    if total > limits.enumeration_budget {
        return Err(Error::budget(
            format!("locality check over {total} subsets"),
            limits.enumeration_budget,
        ));
    }
    let clauses = phi.clauses();
    for size in 1..=c {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let psi = CnfFormula::with_width(idx.iter().map(|&i| clauses[i].clone()), phi.width_bound())?;
            let sigma = sigma_exact_capped(&psi, None, limits.oracle_var_cap)?;
            if delta.cmp_dyadic(&sigma) == Ordering::Less {
                return Ok(Decision {
                    verdict: Verdict::Lt,
                    algorithm: Algorithm::LocalityBased,
                    gap_used: None,
                    certificate: Certificate::Subset { subset: psi, sigma },
                });
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    Ok(Decision {
        verdict: Verdict::Ge,
        algorithm: Algorithm::LocalityBased,
        gap_used: None,
        certificate: Certificate::None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn star(m: i64) -> CnfFormula {
        let cs: Vec<Vec<i64>> = (0..m).map(|i| vec![1, i + 2]).collect();
        let refs: Vec<&[i64]> = cs.iter().map(|c| c.as_slice()).collect();
        CnfFormula::from_dimacs(&refs).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(collapse_threshold(2, &d("1/32")).unwrap(), 12);
        assert_eq!(collapse_threshold(1, &d("1/4")).unwrap(), 2);
        assert_eq!(collapse_threshold(3, &d("1")).unwrap(), 0);
        assert_eq!(collapse_threshold(3, &d("1/8")).unwrap(), 15);
        assert!(collapse_threshold(3, &Dyadic::zero()).is_err());
    }

    #[test]
    fn kernelize_star() {
        let kr = kernelize(&star(3), 2);
        assert_eq!(kr.kernel.to_signed(), vec![vec![1]]);
        assert_eq!(kr.trace.len(), 1);
        assert_eq!(kr.trace[0].link_size, 3);
        let kr = kernelize(&star(3), 3);
        assert_eq!(kr.kernel, star(3));
    }

    #[test]
    fn empty_clause_short_circuit() {
        let phi = CnfFormula::from_dimacs(&[&[], &[1, 2]]).unwrap();
        assert_eq!(kernelize(&phi, 1).kernel.to_signed(), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn sunflower_decision() {
        let half: Threshold = "1/2".parse().unwrap();
        let d6 = sunflower_collapsing_decide(&star(6), &half, &d("1/32"), &Limits::default()).unwrap();
        assert_eq!(d6.verdict, Verdict::Ge);
    }

    #[test]
    fn locality() {
        let half: Threshold = "1/2".parse().unwrap();
        let phi = CnfFormula::from_dimacs(&[&[1, 2], &[3, 4], &[3, 5]]).unwrap();
        let dec = locality_decide(&phi, &half, 3, &Limits::default()).unwrap();
        assert_eq!(dec.verdict, Verdict::Lt);
        assert_eq!(locality_decide(&phi, &half, 2, &Limits::default()).unwrap().verdict, Verdict::Ge);
        assert_eq!(locality_constant(2, &d("1/32"), LocalityPreset::Listing).unwrap(), 13);
        assert_eq!(locality_constant(1, &d("1/4"), LocalityPreset::Lemma).unwrap(), 6);
    }

    #[test]
    fn combinations() {
        let mut v = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut v, 4) {
            n += 1;
        }
        assert_eq!(n, 6);
    }
}
