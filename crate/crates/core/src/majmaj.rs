//! Majority-of-majority: is `σ_Y(φ|β) ≥ 1/2` for at least half of the assignments `β` of `X`?
//!
//! The decision reduces to a single threshold question on a CNF `ω` over `X`. Write `ρ` for the
//! `Y`-projections of the clauses of `φ`. The inner probability drops below `1/2` exactly when
//! some small "bad" `ψ ⊆ ρ` (with `σ(ψ) < 1/2`) is fully present in `φ|β`, and a projected
//! clause `c` is absent exactly when `β` satisfies the `X`-part of every clause projecting to
//! `c`. So `ω` states, for each bad `ψ`, that some `c ∈ ψ` is absent.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, Clause, CnfFormula, Literal};
use crate::combinatorics::next_combination;
use crate::config::Limits;
use crate::decision::Verdict;
use crate::dyadic::{Dyadic, Threshold};
use crate::error::{Error, Result};
use crate::interval::interval_reduction_decide;
use crate::oracle::sigma_exact_capped;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajMajInstance {
    pub phi: CnfFormula,
    pub x_vars: BTreeSet<u32>,
}

impl MajMajInstance {
    pub fn new(phi: CnfFormula, x_vars: impl IntoIterator<Item = u32>) -> Self {
        MajMajInstance { phi, x_vars: x_vars.into_iter().collect() }
    }

    pub fn y_vars(&self) -> BTreeSet<u32> {
        self.phi.vars().difference(&self.x_vars).copied().collect()
    }

    fn split(&self, c: &Clause) -> (Clause, Clause) {
        let (x, y): (Vec<Literal>, Vec<Literal>) =
            c.literals().iter().partition(|l| self.x_vars.contains(&l.var()));
        (Clause::new(x).expect("subset of a clause"), Clause::new(y).expect("subset of a clause"))
    }

    /// `φ` restricted by an assignment of `X`, as a formula over `Y`.
    pub fn inner(&self, beta: &Assignment) -> CnfFormula {
        let cs = self.phi.clauses().iter().filter_map(|c| {
            let (x, y) = self.split(c);
            (!x.satisfied_by(beta)).then_some(y)
        });
        CnfFormula::from_clauses(cs)
    }

    /// `Y`-projections of the clauses, each with the `X`-parts of the clauses projecting to it.
    pub fn projections(&self) -> BTreeMap<Clause, Vec<Clause>> {
        let mut m: BTreeMap<Clause, Vec<Clause>> = BTreeMap::new();
        for c in self.phi.clauses() {
            let (x, y) = self.split(c);
            m.entry(y).or_default().push(x);
        }
        m
    }
}

/// Reference answer by enumerating `X`.
pub fn majmaj_oracle(inst: &MajMajInstance, limits: &Limits) -> Result<bool> {
    let xs: Vec<u32> = inst.x_vars.iter().copied().collect();
    let cap = limits.oracle_var_cap.min(62);
    if xs.len() > cap {
        return Err(Error::CapExceeded { vars: xs.len(), cap });
    }
    let half = Dyadic::inv_pow2(1);
    let mut good: u64 = 0;
    for bits in 0u64..(1u64 << xs.len()) {
        let beta = Assignment::from_bits(&xs, bits);
        if sigma_exact_capped(&inst.inner(&beta), None, limits.oracle_var_cap)? >= half {
            good += 1;
        }
    }
    Ok(2 * good >= 1u64 << xs.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajMajFormula {
    /// CNF over `X` whose probability is the outer majority fraction.
    pub omega: CnfFormula,
    /// Minimal bad subsets of the projections that produced clauses.
    pub bad_subsets: Vec<Vec<Clause>>,
}

/// Builds `ω` using bad subsets of size at most `c`.
///
/// Only inclusion-minimal bad subsets are expanded: a superset's constraint is implied by any
/// of its bad subsets, so dropping it leaves `ω` logically unchanged.
pub fn build_majmaj_formula(inst: &MajMajInstance, c: usize, limits: &Limits) -> Result<MajMajFormula> {
    if c == 0 {
        return Err(Error::invalid("C must be at least 1"));
    }
    let proj = inst.projections();
    let keys: Vec<&Clause> = proj.keys().collect();
    let m = keys.len();
    let c = c.min(m);
    let half = Dyadic::inv_pow2(1);
    let budget = limits.enumeration_budget;
    let mut visited: u64 = 0;
    let mut bad: Vec<Vec<usize>> = Vec::new();
    let mut clauses: BTreeSet<Clause> = BTreeSet::new();
    let k = inst.phi.width_bound();

    for size in 1..=c {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            visited += 1;
            if visited > budget {
                return Err(Error::budget("majority-of-majority subset enumeration", budget));
            }
            let minimal = !bad.iter().any(|b| b.iter().all(|i| idx.contains(i)));
            if minimal {
                let psi = CnfFormula::from_clauses(idx.iter().map(|&i| keys[i].clone()));
                if sigma_exact_capped(&psi, None, limits.oracle_var_cap)? < half {
                    expand_guard(&idx, &keys, &proj, &mut clauses, budget)?;
                    bad.push(idx.clone());
                }
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }
    let omega = CnfFormula::with_width(clauses, c * k.max(1))?;
    let bad_subsets = bad.into_iter().map(|b| b.into_iter().map(|i| keys[i].clone()).collect()).collect();
    Ok(MajMajFormula { omega, bad_subsets })
}

/// Adds the CNF of `⋁_{c∈ψ} ⋀_{e↦c} X(e)`: one clause per choice of an origin for each `c`.
fn expand_guard(
    idx: &[usize],
    keys: &[&Clause],
    proj: &BTreeMap<Clause, Vec<Clause>>,
    out: &mut BTreeSet<Clause>,
    budget: u64,
) -> Result<()> {
    let mut partial: Vec<Clause> = vec![Clause::empty()];
    for &i in idx {
        let origins = &proj[keys[i]];
        let mut next = Vec::with_capacity(partial.len() * origins.len());
        for p in &partial {
            for o in origins {
                if let Some(u) = p.union(o) {
                    next.push(u);
                }
            }
        }
        if next.len() as u64 > budget {
            return Err(Error::budget("majority-of-majority guard expansion", budget));
        }
        next.sort();
        next.dedup();
        partial = next;
    }
    out.extend(partial);
    Ok(())
}

/// Answers the majority-of-majority question via `ω` and an exact threshold decision at `1/2`.
pub fn majmaj_decide(inst: &MajMajInstance, c: usize, limits: &Limits) -> Result<bool> {
    let f = build_majmaj_formula(inst, c, limits)?;
    let half = Threshold::from_u64(1, 2).expect("valid");
    Ok(interval_reduction_decide(&f.omega, &half).verdict == Verdict::Ge)
}
