//! Brute-force model counting over a bounded universe.
//!
//! Assignments are evaluated 64 at a time: the six lowest variables index bits of a machine
//! word, the rest index the outer loop. Large universes split the outer loop across rayon
//! workers; the count is an integer sum, so the result does not depend on scheduling.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::cnf::CnfFormula;
use crate::config::DEFAULT_ORACLE_VAR_CAP;
use crate::dyadic::{compare_threshold, Dyadic, Threshold};
use crate::error::{Error, Result};

/// Hard limit imposed by the 64-bit counter.
const MAX_COUNTABLE_VARS: usize = 62;
const PARALLEL_FROM_VARS: usize = 22;

const LOW_WORDS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// `σ(φ)` with the default variable cap.
pub fn sigma_exact(phi: &CnfFormula, universe: Option<&BTreeSet<u32>>) -> Result<Dyadic> {
    sigma_exact_capped(phi, universe, DEFAULT_ORACLE_VAR_CAP)
}

/// `σ(φ)`: the fraction of assignments to `universe ∪ vars(φ)` satisfying `φ`.
pub fn sigma_exact_capped(
    phi: &CnfFormula,
    universe: Option<&BTreeSet<u32>>,
    cap: usize,
) -> Result<Dyadic> {
    let mut vars = phi.vars();
    if let Some(u) = universe {
        vars.extend(u.iter().copied());
    }
    let vars: Vec<u32> = vars.into_iter().collect();
    let cap = cap.min(MAX_COUNTABLE_VARS);
    if vars.len() > cap {
        return Err(Error::CapExceeded { vars: vars.len(), cap });
    }
    let count = count_models(phi, &vars);
    Ok(Dyadic::from_count(count, vars.len() as u32))
}

/// Compare `σ(φ)` with `δ` using the oracle.
pub fn oracle_compare(phi: &CnfFormula, delta: &Threshold, cap: usize) -> Result<Ordering> {
    Ok(compare_threshold(&sigma_exact_capped(phi, None, cap)?, delta))
}

struct Packed {
    low_word: u64,
    high_pos: u64,
    high_neg: u64,
}

/// Number of assignments to `vars` (which must cover `vars(φ)`) that satisfy `φ`.
pub fn count_models(phi: &CnfFormula, vars: &[u32]) -> u64 {
    let n = vars.len();
    assert!(n <= MAX_COUNTABLE_VARS);
    if phi.contains_empty_clause() {
        return 0;
    }
    let index = |v: u32| vars.binary_search(&v).expect("universe must cover the formula");
    let packed: Vec<Packed> = phi
        .clauses()
        .iter()
        .map(|c| {
            let mut p = Packed { low_word: 0, high_pos: 0, high_neg: 0 };
            for l in c.literals() {
                let i = index(l.var());
                if i < 6 {
                    let w = LOW_WORDS[i];
                    p.low_word |= if l.is_negated() { !w } else { w };
                } else if l.is_negated() {
                    p.high_neg |= 1 << (i - 6);
                } else {
                    p.high_pos |= 1 << (i - 6);
                }
            }
            p
        })
        .collect();

    let low_bits = n.min(6);
    let low_mask: u64 = if low_bits == 6 { u64::MAX } else { (1u64 << (1 << low_bits)) - 1 };
    let high_blocks: u64 = 1 << n.saturating_sub(6);

    let block = |h: u64| -> u64 {
        let mut acc = low_mask;
        for p in &packed {
            if h & p.high_pos != 0 || !h & p.high_neg != 0 {
                continue;
            }
            acc &= p.low_word;
            if acc == 0 {
                return 0;
            }
        }
        acc.count_ones() as u64
    };

    if n >= PARALLEL_FROM_VARS {
        (0..high_blocks).into_par_iter().map(block).sum()
    } else {
        (0..high_blocks).map(block).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(cs: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs(cs).unwrap()
    }

    fn s(x: &str) -> Dyadic {
        x.parse().unwrap()
    }

    #[test]
    fn examples() {
        // {{a,b},{c,d},{c,e}}
        assert_eq!(sigma_exact(&f(&[&[1, 2], &[3, 4], &[3, 5]]), None).unwrap(), s("15/32"));
        assert_eq!(sigma_exact(&f(&[&[1, 2], &[3, 4], &[5, 6, 7]]), None).unwrap(), s("63/128"));
        assert_eq!(sigma_exact(&CnfFormula::empty(), None).unwrap(), Dyadic::one());
        assert_eq!(sigma_exact(&f(&[&[]]), None).unwrap(), Dyadic::zero());
        assert_eq!(sigma_exact(&f(&[&[1], &[-1]]), None).unwrap(), Dyadic::zero());
    }

    #[test]
    fn universe_independent() {
        let phi = f(&[&[1, 2], &[-2, 3]]);
        let u: BTreeSet<u32> = (1..=12).collect();
        assert_eq!(sigma_exact(&phi, Some(&u)).unwrap(), sigma_exact(&phi, None).unwrap());
    }

    #[test]
    fn cap() {
        let phi = f(&[&[1, 40]]);
        let u: BTreeSet<u32> = (1..=40).collect();
        assert!(matches!(
            sigma_exact_capped(&phi, Some(&u), 10),
            Err(Error::CapExceeded { vars: 40, cap: 10 })
        ));
    }

    #[test]
    fn high_variables_counted() {
        // A single clause of width 9 spanning both the word and the outer loop.
        let c: Vec<i64> = (1..=9).map(|v| if v % 2 == 0 { -v } else { v }).collect();
        let phi = f(&[&c]);
        assert_eq!(sigma_exact(&phi, None).unwrap(), s("511/512"));
    }
}
