//! Orderly enumeration of small k-CNF formulas up to variable renaming and polarity flips.
//!
//! A formula is generated as a strictly increasing sequence of clauses (canonical order) in
//! which variables are introduced in id order and every variable's first occurrence is
//! positive. Every formula has such a representative: rename and flip it so that the
//! lexicographically least sorted clause list is reached, and that list has both properties.
//! Search proceeds by iterative deepening on the clause count and prunes any prefix whose
//! probability is already below the target, since adding clauses never raises it.

use crate::cnf::{Clause, CnfFormula, Literal};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Largest variable count the truth-table search supports.
pub const MAX_SEARCH_VARS: usize = 12;

pub struct Candidate {
    pub clause: Clause,
    /// Models of the clause over all `n` variables, one bit per assignment.
    pub models: Vec<u64>,
}

/// All clauses of width at most `k` over variables `1..=n`, with their model sets.
pub struct CandidateSet {
    pub n: usize,
    pub k: usize,
    pub cands: Vec<Candidate>,
    words: usize,
}

impl CandidateSet {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if n > MAX_SEARCH_VARS {
            return Err(Error::invalid(format!(
                "search supports at most {MAX_SEARCH_VARS} variables, got {n}"
            )));
        }
        let words = ((1usize << n) + 63) / 64;
        let mut clauses = Vec::new();
        let mut lits = Vec::new();
        gen_clauses(1, n as u32, k, &mut lits, &mut clauses);
        clauses.sort();
        let cands = clauses
            .into_iter()
            .map(|clause| {
                let models = clause_models(&clause, n, words);
                Candidate { clause, models }
            })
            .collect();
        Ok(CandidateSet { n, k, cands, words })
    }

    pub fn full_mask(&self) -> Vec<u64> {
        let mut m = vec![u64::MAX; self.words];
        let bits = 1usize << self.n;
        if bits < 64 {
            m[0] = (1u64 << bits) - 1;
        }
        m
    }

    pub fn words(&self) -> usize {
        self.words
    }
}

fn gen_clauses(from: u32, n: u32, k: usize, lits: &mut Vec<Literal>, out: &mut Vec<Clause>) {
    out.push(Clause::new(lits.iter().copied()).expect("distinct variables"));
    if lits.len() == k {
        return;
    }
    for v in from..=n {
        for neg in [false, true] {
            lits.push(Literal::new(v, neg));
            gen_clauses(v + 1, n, k, lits, out);
            lits.pop();
        }
    }
}

fn clause_models(c: &Clause, n: usize, words: usize) -> Vec<u64> {
    let mut m = vec![0u64; words];
    for a in 0..(1usize << n) {
        let sat = c.literals().iter().any(|l| l.eval(a >> (l.var() - 1) & 1 == 1));
        if sat {
            m[a / 64] |= 1 << (a % 64);
        }
    }
    m
}

pub fn popcount(m: &[u64]) -> u64 {
    m.iter().map(|w| w.count_ones() as u64).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(CnfFormula),
    /// Every canonical formula within the variable bound was examined.
    Exhausted,
}

/// Finds a formula with `σ = target` (and at most `n` variables) accepted by `accept`,
/// visiting formulas by clause count. `accept` receives the candidate indices of the clauses.
pub fn find_formula(
    set: &CandidateSet,
    target: &Dyadic,
    budget: u64,
    mut accept: impl FnMut(&CandidateSet, &[usize]) -> bool,
) -> Result<SearchOutcome> {
    if target.exponent() as usize > set.n {
        return Ok(SearchOutcome::Exhausted);
    }
    let target_count: u64 = {
        let shift = set.n as u32 - target.exponent();
        let num = target.scaled_numerator(target.exponent());
        let num: u64 = num.try_into().expect("numerator fits since exponent ≤ n ≤ 12");
        num << shift
    };
    let full = set.full_mask();
    if popcount(&full) == target_count && accept(set, &[]) {
        return Ok(SearchOutcome::Found(build(set, &[])));
    }
    let mut nodes: u64 = 0;
    for limit in 1..=set.cands.len() {
        let mut st = Dfs {
            set,
            target_count,
            limit,
            budget,
            nodes: &mut nodes,
            stack: Vec::new(),
            reached: false,
        };
        if let Some(found) = st.run(&full, 0, 0, &mut accept)? {
            return Ok(SearchOutcome::Found(build(set, &found)));
        }
        if !st.reached {
            return Ok(SearchOutcome::Exhausted);
        }
    }
    Ok(SearchOutcome::Exhausted)
}

fn build(set: &CandidateSet, idx: &[usize]) -> CnfFormula {
    CnfFormula::with_width(idx.iter().map(|&i| set.cands[i].clause.clone()), set.k)
        .expect("candidates respect the width bound")
}

struct Dfs<'a> {
    set: &'a CandidateSet,
    target_count: u64,
    limit: usize,
    budget: u64,
    nodes: &'a mut u64,
    stack: Vec<usize>,
    reached: bool,
}

impl Dfs<'_> {
    fn run(
        &mut self,
        models: &[u64],
        first: usize,
        introduced: u32,
        accept: &mut impl FnMut(&CandidateSet, &[usize]) -> bool,
    ) -> Result<Option<Vec<usize>>> {
        let mut next = vec![0u64; models.len()];
        for idx in first..self.set.cands.len() {
            let cand = &self.set.cands[idx];
            let Some(intro) = introduces(&cand.clause, introduced) else {
                continue;
            };
            for (w, (a, b)) in next.iter_mut().zip(models.iter().zip(&cand.models)) {
                *w = a & b;
            }
            let count = popcount(&next);
            if count < self.target_count {
                continue;
            }
            *self.nodes += 1;
            if *self.nodes > self.budget {
                return Err(Error::budget("canonical formula search", self.budget));
            }
            self.stack.push(idx);
            if self.stack.len() == self.limit {
                self.reached = true;
                if count == self.target_count && accept(self.set, &self.stack) {
                    return Ok(Some(self.stack.clone()));
                }
            } else if let Some(f) = self.run(&next, idx + 1, intro, accept)? {
                return Ok(Some(f));
            }
            self.stack.pop();
        }
        Ok(None)
    }
}

/// The new count of introduced variables if `c` may follow a prefix that introduced
/// variables `1..=introduced`, else `None`.
fn introduces(c: &Clause, introduced: u32) -> Option<u32> {
    let mut expect = introduced + 1;
    for l in c.literals() {
        if l.var() > introduced {
            if l.var() != expect || l.is_negated() {
                return None;
            }
            expect += 1;
        }
    }
    Some(expect - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sigma_exact;

    #[test]
    fn candidates() {
        let s = CandidateSet::new(2, 3).unwrap();
        // 1 + 6 + 12 clauses of width 0, 1, 2 over 3 variables.
        assert_eq!(s.cands.len(), 19);
        assert!(s.cands[0].clause.is_empty());
        assert_eq!(popcount(&s.full_mask()), 8);
    }

    #[test]
    fn finds_smallest_witnesses() {
        let s = CandidateSet::new(2, 5).unwrap();
        let t: Dyadic = "15/32".parse().unwrap();
        let SearchOutcome::Found(f) = find_formula(&s, &t, 1_000_000, |_, _| true).unwrap() else {
            panic!("15/32 is a 2-CNF value");
        };
        assert_eq!(f.len(), 3);
        assert_eq!(sigma_exact(&f, None).unwrap(), t);
    }

    #[test]
    fn exhausts_on_hole() {
        let s = CandidateSet::new(2, 4).unwrap();
        let t: Dyadic = "7/8".parse().unwrap();
        assert_eq!(find_formula(&s, &t, 1_000_000, |_, _| true).unwrap(), SearchOutcome::Exhausted);
    }

    #[test]
    fn canonical_introduction() {
        let c = Clause::from_dimacs(&[1, 3]).unwrap();
        assert_eq!(introduces(&c, 2), Some(3));
        assert_eq!(introduces(&c, 1), None);
        assert_eq!(introduces(&Clause::from_dimacs(&[-2]).unwrap(), 1), None);
    }
}
