//! Probability intervals from packings, expansion by restriction, and the two
//! interval-based threshold decisions.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cnf::{restrict, Assignment, Clause, CnfFormula};
use crate::combinatorics::{cp, greedy_maximal_packing, packing_product};
use crate::decision::{Algorithm, Certificate, Decision, Verdict};
use crate::dyadic::{Dyadic, Threshold};
use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` of dyadic rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval bounds out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(Dyadic::zero())
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An interval containing `σ(φ)`, computed from the greedy maximal packing `π`.
///
/// A formula that contains the empty clause or a complementary unit pair gets `[0, 0]`.
/// When `φ` is itself a packing the result is the exact point `∏ cp(|c|)`; otherwise it is
/// `[0, ∏_{c∈π} cp(|c|)]`.
pub fn interval(phi: &CnfFormula) -> Interval {
    if phi.is_trivially_false() {
        return Interval::zero();
    }
    let pi = greedy_maximal_packing(phi);
    let bound = packing_product(pi.clauses());
    if pi.len() == phi.len() {
        Interval::point(bound)
    } else {
        Interval::new(Dyadic::zero(), bound)
    }
}

/// The restrictions `φ|β` over the variables `V` of the greedy packing, omitting the `β`
/// that falsify a packed clause (those restrictions contain the empty clause, so they
/// contribute exactly zero). Returns the restrictions and `|V|`.
///
/// Each `φ|β` keeps the units of `β`, so `σ(φ) = Σ_β σ(φ|β)` with no extra weight.
pub fn expand(phi: &CnfFormula) -> (Vec<CnfFormula>, usize) {
    let pi = greedy_maximal_packing(phi);
    let nvars: usize = pi.clauses().iter().map(Clause::len).sum();
    let mut out = Vec::new();
    let mut beta = Assignment::new();
    expand_rec(phi, pi.clauses(), &mut beta, &mut out);
    (out, nvars)
}

fn expand_rec(phi: &CnfFormula, rest: &[Clause], beta: &mut Assignment, out: &mut Vec<CnfFormula>) {
    let Some((c, tail)) = rest.split_first() else {
        out.push(restrict(phi, beta));
        return;
    };
    let lits = c.literals();
    // Every assignment of vars(c) except the single falsifying one.
    for bits in 0u64..(1 << lits.len()) {
        let mut sat = false;
        for (i, l) in lits.iter().enumerate() {
            let v = bits >> i & 1 == 1;
            beta.set(l.var(), v);
            sat |= l.eval(v);
        }
        if sat {
            expand_rec(phi, tail, beta, out);
        }
    }
    for l in lits {
        beta.unset(l.var());
    }
}

/// Exact `σ(φ)` by recursive expansion until every branch is a point interval.
/// Works beyond the oracle cap for formulas of small width.
pub fn sigma_by_expansion(phi: &CnfFormula) -> Dyadic {
    let i = interval(phi);
    if i.is_point() {
        return i.lo;
    }
    let (children, _) = expand(phi);
    children.iter().map(sigma_by_expansion).collect::<Vec<_>>().iter().sum()
}

/// Counters collected by [`bounded_interval_instrumented`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalStats {
    pub calls: u64,
    pub max_depth: usize,
    /// Largest `2^|V|` divided into at one node, as a power of two.
    pub max_fanout_log2: usize,
    /// Nodes whose fan-out `2^|V|` exceeded `2^{k·t(ε)}`, where `t(ε)` is the least `t` with
    /// `cp(k)^t < ε` at that node.
    pub fanout_violations: u64,
}

/// An interval of width below `ε` containing `σ(φ)`.
pub fn bounded_interval(phi: &CnfFormula, eps: &Dyadic) -> Result<Interval> {
    let mut stats = IntervalStats::default();
    bounded_interval_instrumented(phi, eps, &mut stats)
}

pub fn bounded_interval_instrumented(
    phi: &CnfFormula,
    eps: &Dyadic,
    stats: &mut IntervalStats,
) -> Result<Interval> {
    if eps.is_zero() {
        return Err(Error::invalid("ε must be positive"));
    }
    Ok(bounded_rec(phi, eps, 0, stats))
}

fn bounded_rec(phi: &CnfFormula, eps: &Dyadic, depth: usize, stats: &mut IntervalStats) -> Interval {
    stats.calls += 1;
    stats.max_depth = stats.max_depth.max(depth);
    let i = interval(phi);
    if i.width() < *eps {
        return i;
    }
    let (children, nvars) = expand(phi);
    stats.max_fanout_log2 = stats.max_fanout_log2.max(nvars);
    let k = phi.max_width() as u32;
    if (nvars as u64) > k as u64 * steps_below(k, eps) {
        stats.fanout_violations += 1;
    }
    let child_eps = eps.halve(nvars as u32);
    let mut lo = Dyadic::zero();
    let mut hi = Dyadic::zero();
    for c in &children {
        let ci = bounded_rec(c, &child_eps, depth + 1, stats);
        lo = &lo + ci.lo();
        hi = &hi + ci.hi();
    }
    Interval::new(lo, hi)
}

/// Least `t` with `cp(k)^t < ε`.
pub fn steps_below(k: u32, eps: &Dyadic) -> u64 {
    let base = cp(k);
    let mut p = Dyadic::one();
    let mut t = 0;
    while p >= *eps {
        p = &p * &base;
        t += 1;
    }
    t
}

/// Decides `σ(φ) ≥ δ` from one interval of width below `gap`.
pub fn interval_bounding_decide(phi: &CnfFormula, delta: &Threshold, gap: &Dyadic) -> Result<Decision> {
    let i = bounded_interval(phi, gap)?;
    let verdict = if delta.cmp_dyadic(i.hi()) == Ordering::Less { Verdict::Lt } else { Verdict::Ge };
    Ok(Decision {
        verdict,
        algorithm: Algorithm::IntervalBounding,
        gap_used: Some(gap.clone()),
        certificate: Certificate::Interval { interval: i },
    })
}

/// Decides `σ(φ) ≥ δ` without a gap by refining a worklist of weighted sub-formulas.
pub fn interval_reduction_decide(phi: &CnfFormula, delta: &Threshold) -> Decision {
    interval_reduction_impl(phi, delta, None)
}

#[derive(PartialEq, Eq)]
struct Entry {
    width: usize,
    formula: Reverse<CnfFormula>,
    interval: Interval,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width
            .cmp(&other.width)
            .then_with(|| self.formula.cmp(&other.formula))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// As [`interval_reduction_decide`], calling `observe` with the live worklist before each
/// stopping test. The worklist always satisfies `Σ σ(ψ) = σ(φ)`; items with interval `[0, 0]`
/// are dropped as soon as they appear.
pub fn interval_reduction_observed(
    phi: &CnfFormula,
    delta: &Threshold,
    mut observe: impl FnMut(&[CnfFormula]),
) -> Decision {
    interval_reduction_impl(phi, delta, Some(&mut observe))
}

fn interval_reduction_impl(
    phi: &CnfFormula,
    delta: &Threshold,
    mut observe: Option<&mut dyn FnMut(&[CnfFormula])>,
) -> Decision {
    let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
    let mut lo = Dyadic::zero();
    let mut hi = Dyadic::zero();
    let push = |heap: &mut BinaryHeap<Entry>, lo: &mut Dyadic, hi: &mut Dyadic, f: CnfFormula| {
        let i = interval(&f);
        if i.hi().is_zero() {
            return;
        }
        *lo = &*lo + i.lo();
        *hi = &*hi + i.hi();
        heap.push(Entry { width: f.max_width(), formula: Reverse(f), interval: i });
    };
    push(&mut heap, &mut lo, &mut hi, phi.clone());
    loop {
        if let Some(obs) = observe.as_mut() {
            let items: Vec<CnfFormula> = heap.iter().map(|e| e.formula.0.clone()).collect();
            obs(&items);
        }
        if delta.cmp_dyadic(&lo) != Ordering::Less {
            return finish(Verdict::Ge, lo, hi);
        }
        if delta.cmp_dyadic(&hi) == Ordering::Less {
            return finish(Verdict::Lt, lo, hi);
        }
        let top = heap.pop().expect("an open interval implies a non-point item");
        lo = &lo - top.interval.lo();
        hi = &hi - top.interval.hi();
        let (children, _) = expand(&top.formula.0);
        for c in children {
            push(&mut heap, &mut lo, &mut hi, c);
        }
    }
}

fn finish(verdict: Verdict, lo: Dyadic, hi: Dyadic) -> Decision {
    Decision {
        verdict,
        algorithm: Algorithm::IntervalReduction,
        gap_used: None,
        certificate: Certificate::Interval { interval: Interval::new(lo, hi) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sigma_exact;

    fn f(cs: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs(cs).unwrap()
    }

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn t(s: &str) -> Threshold {
        s.parse().unwrap()
    }

    #[test]
    fn interval_examples() {
        assert_eq!(interval(&f(&[&[1, 2], &[3, 4]])), Interval::point(d("9/16")));
        assert_eq!(interval(&f(&[&[1, 2], &[1, 3]])), Interval::new(Dyadic::zero(), d("3/4")));
        assert_eq!(interval(&f(&[&[1], &[-1], &[2, 3]])), Interval::zero());
        assert_eq!(interval(&CnfFormula::empty()), Interval::point(Dyadic::one()));
    }

    #[test]
    fn bounded_examples() {
        let phi = f(&[&[1, 2], &[3, 4], &[3, 5]]);
        let i = bounded_interval(&phi, &d("1/128")).unwrap();
        assert!(i.width() < d("1/128"));
        assert!(i.contains(&d("15/32")));
        let one_cnf = f(&[&[1], &[-2], &[3]]);
        assert!(bounded_interval(&one_cnf, &d("1/2")).unwrap().is_point());
        assert!(bounded_interval(&one_cnf, &Dyadic::zero()).is_err());
    }

    #[test]
    fn decisions() {
        let phi = f(&[&[1, 2], &[3, 4], &[3, 5]]);
        assert_eq!(interval_bounding_decide(&phi, &t("1/2"), &d("1/32")).unwrap().verdict, Verdict::Lt);
        assert_eq!(interval_reduction_decide(&phi, &t("15/32")).verdict, Verdict::Ge);
        assert_eq!(interval_reduction_decide(&phi, &t("1/2")).verdict, Verdict::Lt);
        assert_eq!(interval_reduction_decide(&f(&[&[]]), &t("0")).verdict, Verdict::Ge);
    }

    #[test]
    fn expansion_is_exact() {
        let phi = f(&[&[1, 2, -3], &[-1, 4], &[2, 5, 6], &[-4, -5], &[3, 6]]);
        assert_eq!(sigma_by_expansion(&phi), sigma_exact(&phi, None).unwrap());
    }

    #[test]
    fn steps() {
        assert_eq!(steps_below(2, &d("1/32")), 13);
        assert_eq!(steps_below(1, &d("1/4")), 3);
    }
}
