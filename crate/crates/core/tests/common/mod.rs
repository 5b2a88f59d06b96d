//! Test-side helpers: seeded random formula families and a naive model counter that shares
//! no code with the library's oracle.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use satprob::{CnfFormula, Dyadic, Threshold};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Signed-integer clauses, as in DIMACS.
pub type Raw = Vec<Vec<i64>>;

pub fn to_formula(raw: &Raw, k: usize) -> CnfFormula {
    let refs: Vec<&[i64]> = raw.iter().map(|c| c.as_slice()).collect();
    CnfFormula::from_dimacs(&refs).unwrap().rebound(k).unwrap()
}

/// Counts satisfying assignments over the variables occurring in `raw`, one assignment at a time.
pub fn naive_count(raw: &Raw) -> (u64, u32) {
    let vars: Vec<i64> = raw.iter().flatten().map(|l| l.abs()).collect::<BTreeSet<_>>().into_iter().collect();
    let n = vars.len();
    assert!(n <= 24, "naive counter is for small formulas");
    let indexed: Vec<Vec<(usize, bool)>> = raw
        .iter()
        .map(|c| c.iter().map(|&l| (vars.binary_search(&l.abs()).unwrap(), l > 0)).collect())
        .collect();
    let mut count = 0;
    for bits in 0u64..(1 << n) {
        if indexed.iter().all(|c| c.iter().any(|&(i, pos)| (bits >> i & 1 == 1) == pos)) {
            count += 1;
        }
    }
    (count, n as u32)
}

/// `count / 2^n` as a dyadic.
pub fn naive_sigma(raw: &Raw) -> Dyadic {
    let (c, n) = naive_count(raw);
    Dyadic::from_count(c, n)
}

/// `σ ≥ δ` by cross-multiplying integers, independent of the library's comparison.
pub fn naive_ge(raw: &Raw, delta: (u64, u64)) -> bool {
    let (c, n) = naive_count(raw);
    (c as u128) * (delta.1 as u128) >= (delta.0 as u128) << n
}

pub fn naive_cmp(raw: &Raw, delta: (u64, u64)) -> std::cmp::Ordering {
    let (c, n) = naive_count(raw);
    ((c as u128) * (delta.1 as u128)).cmp(&((delta.0 as u128) << n))
}

pub fn threshold(p: u64, q: u64) -> Threshold {
    Threshold::from_u64(p, q).unwrap()
}

fn random_clause(r: &mut ChaCha8Rng, width: usize, nvars: usize) -> Vec<i64> {
    let mut vars: Vec<i64> = (1..=nvars as i64).collect();
    vars.shuffle(r);
    vars.truncate(width.min(nvars));
    vars.into_iter().map(|v| if r.gen_bool(0.5) { v } else { -v }).collect()
}

/// Clauses of width `1..=k` (weighted towards `k`) over variables `1..=nvars`.
pub fn random_kcnf(r: &mut ChaCha8Rng, k: usize, nvars: usize, nclauses: usize) -> Raw {
    (0..nclauses)
        .map(|_| {
            let w = if r.gen_bool(0.7) { k } else { r.gen_range(1..=k) };
            random_clause(r, w, nvars)
        })
        .collect()
}

/// Clauses that all contain a fixed short core, plus a few random clauses: rich in sunflowers.
pub fn star_kcnf(r: &mut ChaCha8Rng, k: usize, nvars: usize, nclauses: usize) -> Raw {
    let core_len = r.gen_range(1..k.max(2)).min(k.saturating_sub(1).max(1));
    let core = random_clause(r, core_len, nvars);
    let core_vars: BTreeSet<i64> = core.iter().map(|l| l.abs()).collect();
    let free: Vec<i64> = (1..=nvars as i64).filter(|v| !core_vars.contains(v)).collect();
    let mut out = Vec::new();
    for _ in 0..nclauses {
        if r.gen_bool(0.8) && !free.is_empty() {
            let mut c = core.clone();
            let mut f = free.clone();
            f.shuffle(r);
            for &v in f.iter().take(k.saturating_sub(core.len()).max(1)) {
                c.push(if r.gen_bool(0.5) { v } else { -v });
            }
            c.truncate(k);
            out.push(c);
        } else {
            let w = r.gen_range(1..=k);
            out.push(random_clause(r, w, nvars));
        }
    }
    out
}

/// Mixes the families above.
pub fn mixed_kcnf(r: &mut ChaCha8Rng, k: usize, max_vars: usize, max_clauses: usize) -> Raw {
    let nvars = r.gen_range(1..=max_vars);
    let nclauses = r.gen_range(0..=max_clauses);
    if r.gen_bool(0.5) {
        random_kcnf(r, k, nvars, nclauses)
    } else {
        star_kcnf(r, k, nvars, nclauses)
    }
}
