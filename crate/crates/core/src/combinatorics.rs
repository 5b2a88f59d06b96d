//! Variable-disjoint packings and signed sunflowers over clause families.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, CnfFormula, Literal};
pub use crate::dyadic::cp;
use crate::dyadic::Dyadic;

/// Pairwise variable-disjoint clauses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    clauses: Vec<Clause>,
}

impl Packing {
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.clauses.iter().flat_map(|c| c.vars()).collect();
        v.sort_unstable();
        v
    }

    /// Pairwise variable-disjointness.
    pub fn is_valid(&self) -> bool {
        let mut seen = HashSet::new();
        self.clauses.iter().flat_map(|c| c.vars()).all(|v| seen.insert(v))
    }

    /// Maximality with respect to `phi`: every clause of `phi` shares a variable with the packing.
    pub fn is_maximal_in(&self, phi: &CnfFormula) -> bool {
        let used: HashSet<u32> = self.vars().into_iter().collect();
        phi.clauses()
            .iter()
            .all(|c| self.clauses.contains(c) || c.vars().any(|v| used.contains(&v)))
    }
}

/// Scan clauses in canonical order and keep each one that is variable-disjoint from those kept.
pub fn greedy_maximal_packing(phi: &CnfFormula) -> Packing {
    Packing { clauses: greedy_disjoint(phi.clauses().iter()).into_iter().cloned().collect() }
}

fn greedy_disjoint<'a>(clauses: impl Iterator<Item = &'a Clause>) -> Vec<&'a Clause> {
    let mut used: HashSet<u32> = HashSet::new();
    let mut out = Vec::new();
    for c in clauses {
        if c.vars().all(|v| !used.contains(&v)) {
            used.extend(c.vars());
            out.push(c);
        }
    }
    out
}

/// Upper bounds on `σ(φ)` implied by a packing of `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingBound {
    /// `∏ cp(|c|)` over the packed clauses; exact `σ` of the packing.
    pub product: Dyadic,
    /// `cp(k)^|π|`.
    pub uniform: Dyadic,
}

pub fn packing_bound(pi: &Packing, k: u32) -> PackingBound {
    PackingBound { product: packing_product(pi.clauses()), uniform: cp(k).pow(pi.len() as u32) }
}

/// `∏ cp(|c|)` over the given clauses.
pub fn packing_product(clauses: &[Clause]) -> Dyadic {
    clauses.iter().fold(Dyadic::one(), |acc, c| &acc * &cp(c.len() as u32))
}

/// A family of clauses whose pairwise intersections all equal `core`, with variable-disjoint
/// petals `clause \ core`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sunflower {
    pub core: Clause,
    pub petals: Vec<Clause>,
}

impl Sunflower {
    pub fn len(&self) -> usize {
        self.petals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.petals.is_empty()
    }

    /// Every petal contains the core and the petals minus the core are variable-disjoint.
    pub fn is_valid(&self) -> bool {
        let mut seen = HashSet::new();
        self.petals.iter().all(|p| self.core.is_subset_of(p))
            && self
                .petals
                .iter()
                .flat_map(|p| p.minus(&self.core).vars().collect::<Vec<_>>())
                .all(|v| seen.insert(v))
            && self.core.vars().all(|v| !seen.contains(&v))
    }
}

/// `(2(size-1))^k · k!`: any family of more than this many clauses of width at most `k`
/// contains a sunflower with `size` petals.
pub fn sunflower_guarantee(k: u32, size: usize) -> BigUint {
    let h = BigUint::from(2 * size.saturating_sub(1));
    let fact: BigUint = (1..=k).fold(BigUint::one(), |a, i| a * i);
    h.pow(k) * fact
}

/// Finds a sunflower with at least `size` petals among the non-empty clauses of `phi`.
///
/// The search is the Erdős–Rado argument on signed literals: a greedy maximal packing of the
/// current residual family either has `size` members, or some literal on the packed variables
/// occurs in a large fraction of the family, and the search continues in that literal's link.
/// Candidates are tried by decreasing frequency, so the first branch alone already meets the
/// guarantee of [`sunflower_guarantee`].
pub fn find_sunflower(phi: &CnfFormula, size: usize) -> Option<Sunflower> {
    if size == 0 {
        return Some(Sunflower { core: Clause::empty(), petals: Vec::new() });
    }
    let family: Vec<&Clause> = phi.clauses().iter().filter(|c| !c.is_empty()).collect();
    search(&family, &Clause::empty(), size)
}

fn search(family: &[&Clause], core: &Clause, size: usize) -> Option<Sunflower> {
    if family.len() < size {
        return None;
    }
    let rests: Vec<Clause> = family.iter().map(|c| c.minus(core)).collect();
    let chosen = greedy_disjoint(rests.iter());
    if chosen.len() >= size {
        let picked: Vec<usize> = chosen
            .iter()
            .map(|r| rests.iter().position(|x| std::ptr::eq(x, *r)).unwrap())
            .collect();
        return Some(Sunflower {
            core: core.clone(),
            petals: picked.into_iter().map(|i| family[i].clone()).collect(),
        });
    }
    let mut counts: BTreeMap<Literal, usize> = BTreeMap::new();
    for r in &rests {
        for &l in r.literals() {
            *counts.entry(l).or_default() += 1;
        }
    }
    let mut candidates: Vec<(usize, Literal)> =
        counts.into_iter().filter(|&(_, n)| n >= size).map(|(l, n)| (n, l)).collect();
    candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, l) in candidates {
        let sub: Vec<&Clause> = family.iter().copied().filter(|c| c.contains(l)).collect();
        let next_core = core.union(&Clause::unit(l)).expect("literal is not in the core");
        if let Some(s) = search(&sub, &next_core, size) {
            return Some(s);
        }
    }
    None
}

/// Advances `idx` (strictly increasing indices into `0..n`) to the next combination in
/// lexicographic order. Returns `false` after the last one.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(cs: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs(cs).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let p = greedy_maximal_packing(&f(&[&[1, 2], &[3, 4], &[3, 5]]));
        assert_eq!(p.clauses().len(), 2);
        assert_eq!(p.clauses()[1].to_dimacs(), vec![3, 4]);
        let p = greedy_maximal_packing(&f(&[&[1], &[1, 2]]));
        assert_eq!(p.clauses()[0].to_dimacs(), vec![1]);
        assert_eq!(p.len(), 1);
        assert!(greedy_maximal_packing(&CnfFormula::empty()).is_empty());
    }

    #[test]
    fn bounds() {
        let phi = f(&[&[1], &[2, 3]]);
        let b = packing_bound(&greedy_maximal_packing(&phi), 2);
        assert_eq!(b.product, "3/8".parse().unwrap());
        assert_eq!(b.uniform, "9/16".parse().unwrap());
    }

    #[test]
    fn sunflower_examples() {
        // {{a,¬b,c},{a,¬b,¬d,¬e},{a,¬b,f}}
        let s = find_sunflower(&f(&[&[1, -2, 3], &[1, -2, -4, -5], &[1, -2, 6]]), 3).unwrap();
        assert_eq!(s.core.to_dimacs(), vec![1, -2]);
        assert!(s.is_valid());
        let s = find_sunflower(&f(&[&[1], &[2], &[3]]), 3).unwrap();
        assert!(s.core.is_empty());
        assert!(find_sunflower(&f(&[&[1, 2], &[1, 3]]), 3).is_none());
        // Opposite signs do not form a common core.
        assert!(find_sunflower(&f(&[&[1, 2], &[-1, 3], &[1, 4]]), 3).is_none());
    }

    #[test]
    fn guarantee_value() {
        assert_eq!(sunflower_guarantee(3, 3), BigUint::from(384u32));
        assert_eq!(sunflower_guarantee(2, 13), BigUint::from(1152u32));
    }
}
