//! Targets, backdoor reduction for the strict and exact threshold problems, and the
//! complexity classification of `(k, δ)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cnf::{link, Assignment, Clause, CnfFormula, Literal};
use crate::config::Limits;
use crate::decision::{Algorithm, Certificate, Decision, Verdict};
use crate::dyadic::{cp, Dyadic, Threshold};
use crate::error::{Error, Result};
use crate::kernel::{collapse_threshold, kernelize};
use crate::lsat::{complete_model, l_sat_solve, SatResult};
use crate::oracle::sigma_exact_capped;
use crate::search::{find_formula, CandidateSet, SearchOutcome};

/// Width predicates used to split a formula into short and long clauses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Width {
    Lt(i64),
    Le(i64),
    Gt(i64),
    Ge(i64),
}

impl Width {
    pub fn holds(self, w: usize) -> bool {
        let w = w as i64;
        match self {
            Width::Lt(t) => w < t,
            Width::Le(t) => w <= t,
            Width::Gt(t) => w > t,
            Width::Ge(t) => w >= t,
        }
    }
}

/// The clauses of `φ` whose width satisfies `pred`.
pub fn slice(phi: &CnfFormula, pred: Width) -> CnfFormula {
    phi.filter(|c| pred.holds(c.len()))
}

/// Evidence that `ω` is a `k`-target for `l`CNFs at threshold `δ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KTargetWitness {
    pub omega: CnfFormula,
    pub beta: Assignment,
    pub k: usize,
    pub l: usize,
    pub delta: Dyadic,
}

impl KTargetWitness {
    /// Re-checks all defining conditions.
    pub fn is_valid(&self, cap: usize) -> Result<bool> {
        let t = Threshold::from(&self.delta);
        Ok(is_k_target(&self.omega, &t, self.k, self.l, cap)?.is_some_and(|w| {
            let split = self.k as i64 - self.l as i64;
            slice(&self.omega, Width::Gt(split)).satisfied_by(&self.beta)
                && !slice(&self.omega, Width::Le(split)).satisfied_by(&self.beta)
                && w.omega == self.omega
        }))
    }
}

/// Checks whether `ω` is a `k`-target for `l`CNFs: `ω` has width at most `k`, `σ(ω) = δ`, and
/// some assignment satisfies every clause wider than `k − l` but not every shorter one.
pub fn is_k_target(
    omega: &CnfFormula,
    delta: &Threshold,
    k: usize,
    l: usize,
    cap: usize,
) -> Result<Option<KTargetWitness>> {
    if omega.max_width() > k {
        return Ok(None);
    }
    let Some(d) = delta.as_dyadic() else {
        return Ok(None);
    };
    if sigma_exact_capped(omega, None, cap)? != d {
        return Ok(None);
    }
    let split = k as i64 - l as i64;
    let long = slice(omega, Width::Gt(split));
    let short = slice(omega, Width::Le(split));
    if short.is_empty() {
        return Ok(None);
    }
    let vars: Vec<u32> = omega.vars().into_iter().collect();
    if vars.len() > cap.min(62) {
        return Err(Error::CapExceeded { vars: vars.len(), cap });
    }
    for bits in 0u64..(1u64 << vars.len()) {
        let beta = Assignment::from_bits(&vars, bits);
        if long.satisfied_by(&beta) && !short.satisfied_by(&beta) {
            let omega = omega.rebound(k)?;
            return Ok(Some(KTargetWitness { omega, beta, k, l, delta: d }));
        }
    }
    Ok(None)
}

/// Necessary condition for a `k`-target for `l`CNFs with at most `max_vars` variables.
///
/// `δ` must be dyadic with exponent at most `max_vars`. Take a short clause `c` of width
/// `w ≤ k − l` falsified by the witness assignment and split `σ(ω)` over the `2^w` assignments
/// of `vars(c)`. The falsifying one contributes `0`; every other restriction is either valid
/// (probability `1`) or keeps a clause of width at most `k` (probability at most `cp(k)`).
/// So `j ≤ δ·2^w ≤ j + (2^w − 1 − j)·cp(k)` for some integer `j`.
pub fn target_may_exist(k: usize, delta: &Threshold, l: usize, max_vars: usize) -> bool {
    let Some(d) = delta.as_dyadic() else {
        return false;
    };
    if d.exponent() as usize > max_vars {
        return false;
    }
    let split = k as i64 - l as i64;
    if split < 0 {
        return false;
    }
    let c = cp(k as u32);
    (0..=split as u32).any(|w| {
        let scaled = Dyadic::new(d.numerator().clone(), d.exponent()) * Dyadic::new(BigUint::from(1u32) << w, 0);
        let slots = (1u64 << w) - 1;
        (0..=slots).any(|j| {
            let lo = Dyadic::new(BigUint::from(j), 0);
            let hi = &lo + &(&Dyadic::new(BigUint::from(slots - j), 0) * &c);
            lo <= scaled && scaled <= hi
        })
    })
}

/// Searches canonical `k`-CNFs over at most `max_vars` variables for a `k`-target for `l`CNFs.
pub fn search_k_target(
    k: usize,
    delta: &Threshold,
    l: usize,
    max_vars: usize,
    budget: u64,
) -> Result<Option<KTargetWitness>> {
    if !target_may_exist(k, delta, l, max_vars) {
        return Ok(None);
    }
    let d = delta.as_dyadic().expect("checked dyadic");
    let set = CandidateSet::new(k, max_vars)?;
    let split = k as i64 - l as i64;
    let accept = |set: &CandidateSet, idx: &[usize]| -> bool {
        let mut long = set.full_mask();
        let mut short = set.full_mask();
        let mut any_short = false;
        for &i in idx {
            let c = &set.cands[i];
            let target = if (c.clause.len() as i64) > split {
                &mut long
            } else {
                any_short = true;
                &mut short
            };
            for (a, b) in target.iter_mut().zip(&c.models) {
                *a &= b;
            }
        }
        any_short && long.iter().zip(&short).any(|(a, b)| a & !b != 0)
    };
    match find_formula(&set, &d, budget, accept)? {
        SearchOutcome::Exhausted => Ok(None),
        SearchOutcome::Found(omega) => {
            let w = is_k_target(&omega, delta, k, l, max_vars)?;
            debug_assert!(w.is_some());
            Ok(w)
        }
    }
}

/// `ω = κ_{<k−l} ∪ ⋃_{c ∈ κ_{≥k−l}} link_φ(c)`.
pub fn build_omega(phi: &CnfFormula, kappa: &CnfFormula, k: usize, l: usize) -> CnfFormula {
    let split = k as i64 - l as i64;
    let mut cs: Vec<Clause> = slice(kappa, Width::Lt(split)).clauses().to_vec();
    for c in slice(kappa, Width::Ge(split)).clauses() {
        cs.extend(link(phi, c));
    }
    CnfFormula::with_width(cs, k.max(phi.width_bound()).max(kappa.width_bound()))
        .expect("clauses come from φ and κ")
}

/// Decides `σ(φ) > δ` and `σ(φ) = δ` for `δ` that is not a `k`-target for `l`CNFs.
///
/// Returns GT or LT from the kernel when its probability differs from `δ`. Otherwise every
/// assignment of `vars(κ)` falsifying `κ` is tried: a model of `ω|β` is a model of `φ` that
/// the kernel misses, giving GT; if there is none, `σ(φ) = δ`.
pub fn reduce_to_sat_decide(
    phi: &CnfFormula,
    delta: &Threshold,
    l: usize,
    gap: &Dyadic,
    limits: &Limits,
) -> Result<Decision> {
    let k = phi.width_bound();
    let h = collapse_threshold(k as u32, gap)?;
    let kr = kernelize(phi, h);
    let kappa = kr.kernel;
    let ks = sigma_exact_capped(&kappa, None, limits.oracle_var_cap)?;
    let decided = |verdict| Decision {
        verdict,
        algorithm: Algorithm::ReduceToSat,
        gap_used: Some(gap.clone()),
        certificate: Certificate::Kernel { kernel: kappa.clone(), sigma: ks.clone() },
    };
    match delta.cmp_dyadic(&ks) {
        Ordering::Greater => return Ok(decided(Verdict::Gt)),
        Ordering::Less => return Ok(decided(Verdict::Lt)),
        Ordering::Equal => {}
    }
    let omega = build_omega(phi, &kappa, k, l);
    let vars: Vec<u32> = kappa.vars().into_iter().collect();
    if vars.len() > limits.oracle_var_cap.min(62) {
        return Err(Error::CapExceeded { vars: vars.len(), cap: limits.oracle_var_cap });
    }
    let phi_vars = phi.vars();
    for bits in 0u64..(1u64 << vars.len()) {
        let beta = Assignment::from_bits(&vars, bits);
        if kappa.satisfied_by(&beta) {
            continue;
        }
        let r = crate::cnf::restrict(&omega, &beta);
        if let SatResult::Sat(m) = l_sat_solve(&r, r.max_width().max(l))? {
            let mut model = beta.clone();
            for (v, b) in m.iter() {
                model.set(v, b);
            }
            let model = complete_model(&model, &phi_vars);
            return Ok(Decision {
                verdict: Verdict::Gt,
                algorithm: Algorithm::ReduceToSat,
                gap_used: Some(gap.clone()),
                certificate: Certificate::Model { kernel: kappa, kernel_sigma: ks, model },
            });
        }
    }
    Ok(decided(Verdict::Eq))
}

/// `ρ = ω_{>k−l} ∪ {c ∪ d : c ∈ ω_{≤k−l}, d ∈ ψ}`, with `ψ` renamed onto fresh variables.
/// `σ(ρ) > δ` holds exactly when `ψ` is satisfiable.
pub fn hardness_reduction(witness: &KTargetWitness, psi: &CnfFormula) -> Result<CnfFormula> {
    let (k, l) = (witness.k, witness.l);
    if psi.max_width() > l {
        return Err(Error::WidthExceeded { bound: l, width: psi.max_width() });
    }
    let offset = witness.omega.max_var();
    let rename = |c: &Clause| -> Clause {
        Clause::new(c.literals().iter().map(|x| Literal::new(x.var() + offset, x.is_negated())))
            .expect("renaming preserves non-tautology")
    };
    let split = k as i64 - l as i64;
    let mut cs: Vec<Clause> = slice(&witness.omega, Width::Gt(split)).clauses().to_vec();
    let psi_renamed: Vec<Clause> = psi.clauses().iter().map(rename).collect();
    for c in slice(&witness.omega, Width::Le(split)).clauses() {
        for d in &psi_renamed {
            cs.push(c.union(d).expect("disjoint variables"));
        }
    }
    CnfFormula::with_width(cs, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Complexity {
    #[serde(rename = "AC0")]
    Ac0,
    #[serde(rename = "NL-complete")]
    NlComplete,
    #[serde(rename = "NP-complete")]
    NpComplete,
    #[serde(rename = "AC0-inconclusive")]
    Ac0Inconclusive,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::Ac0 => "AC0",
            Complexity::NlComplete => "NL-complete",
            Complexity::NpComplete => "NP-complete",
            Complexity::Ac0Inconclusive => "AC0-inconclusive",
        })
    }
}

/// Why a classification was reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassEvidence {
    Witness { witness: KTargetWitness },
    /// `δ` is not dyadic, so no formula has probability `δ`.
    NonDyadic,
    /// `δ` lies strictly between `cp(k)` and `1`, where `k`-CNF probabilities never fall.
    Hole,
    /// The short-clause counting condition rules out every 2-target.
    NoShortClauseDecomposition,
    /// No witness within the search bound.
    SearchBound { max_vars: usize, budget_exhausted: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub class: Complexity,
    pub evidence: ClassEvidence,
}

/// Complexity of deciding `σ(φ) > δ` for `k`-CNFs.
pub fn classify(k: usize, delta: &Threshold, max_vars: usize, budget: u64) -> Result<Classification> {
    let ac0 = |evidence| Ok(Classification { class: Complexity::Ac0, evidence });
    let Some(d) = delta.as_dyadic() else {
        return ac0(ClassEvidence::NonDyadic);
    };
    if cp(k as u32) < d && !d.is_one() {
        return ac0(ClassEvidence::Hole);
    }
    // The width split never exceeds k, so the variable bound only needs to admit δ.
    if !target_may_exist(k, delta, 2, (d.exponent() as usize).max(k)) {
        return ac0(ClassEvidence::NoShortClauseDecomposition);
    }
    let mut exhausted_budget = false;
    for (l, class) in [(3, Complexity::NpComplete), (2, Complexity::NlComplete)] {
        match search_k_target(k, delta, l, max_vars, budget) {
            Ok(Some(witness)) => {
                return Ok(Classification { class, evidence: ClassEvidence::Witness { witness } })
            }
            Ok(None) => {}
            Err(e) if e.is_resource_limit() => exhausted_budget = true,
            Err(e) => return Err(e),
        }
    }
    Ok(Classification {
        class: Complexity::Ac0Inconclusive,
        evidence: ClassEvidence::SearchBound { max_vars, budget_exhausted: exhausted_budget },
    })
}
