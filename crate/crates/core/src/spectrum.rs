//! Probability spectra of small k-CNFs, spectral gaps, and figure data export.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, CnfFormula};
use crate::dimacs::serialize_dimacs_line;
use crate::dyadic::{cp, Dyadic, Threshold};
use crate::error::{Error, Result};
use crate::search::{find_formula, CandidateSet, SearchOutcome};
use crate::trichotomy::{classify, Complexity};

/// Truth tables are `u128`, so exhaustive enumeration is limited to 7 variables.
pub const MAX_SPECTRUM_VARS: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub value: Dyadic,
    /// A formula with the fewest clauses attaining `value`, smallest in canonical order among
    /// those found at that clause count.
    pub witness: CnfFormula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub k: usize,
    pub max_vars: usize,
    /// Sorted by decreasing value.
    pub entries: Vec<SpectrumEntry>,
}

impl SpectrumSample {
    pub fn values(&self) -> impl Iterator<Item = &Dyadic> {
        self.entries.iter().map(|e| &e.value)
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        self.entries.iter().any(|e| &e.value == v)
    }

    /// Largest sampled value strictly below `delta`.
    pub fn largest_below(&self, delta: &Threshold) -> Option<&SpectrumEntry> {
        self.entries
            .iter()
            .find(|e| delta.cmp_dyadic(&e.value) == std::cmp::Ordering::Less)
    }
}

/// All values `σ(φ)` for `k`-CNFs `φ` over at most `max_vars` variables.
///
/// Breadth-first search over Boolean functions: layer `m` holds the functions first expressible
/// with `m` clauses. `budget` bounds the number of distinct functions.
pub fn enumerate_spectrum(k: usize, max_vars: usize, budget: u64) -> Result<SpectrumSample> {
    if max_vars > MAX_SPECTRUM_VARS {
        return Err(Error::invalid(format!(
            "exhaustive spectrum supports at most {MAX_SPECTRUM_VARS} variables"
        )));
    }
    let set = CandidateSet::new(k, max_vars)?;
    let masks: Vec<u128> = set
        .cands
        .iter()
        .map(|c| c.models.iter().enumerate().fold(0u128, |m, (i, w)| m | (*w as u128) << (64 * i)))
        .collect();
    let full: u128 = if max_vars == 7 { u128::MAX } else { (1u128 << (1 << max_vars)) - 1 };

    let mut parent: HashMap<u128, (u128, u32)> = HashMap::new();
    parent.insert(full, (full, u32::MAX));
    let mut best: BTreeMap<u32, CnfFormula> = BTreeMap::new();
    best.insert(full.count_ones(), CnfFormula::with_width([], k).expect("empty formula"));
    let mut frontier = vec![full];

    let rebuild = |parent: &HashMap<u128, (u128, u32)>, mut f: u128| -> CnfFormula {
        let mut cs: Vec<Clause> = Vec::new();
        while f != full {
            let (p, c) = parent[&f];
            cs.push(set.cands[c as usize].clause.clone());
            f = p;
        }
        CnfFormula::with_width(cs, k).expect("candidates respect the width bound")
    };

    while !frontier.is_empty() {
        let mut next = Vec::new();
        let mut layer_best: BTreeMap<u32, CnfFormula> = BTreeMap::new();
        for &f in &frontier {
            for (ci, &m) in masks.iter().enumerate() {
                let g = f & m;
                if parent.contains_key(&g) {
                    continue;
                }
                parent.insert(g, (f, ci as u32));
                if parent.len() as u64 > budget {
                    return Err(Error::budget("spectrum enumeration", budget));
                }
                next.push(g);
                let count = g.count_ones();
                if !best.contains_key(&count) {
                    let w = rebuild(&parent, g);
                    let slot = layer_best.entry(count).or_insert_with(|| w.clone());
                    if w < *slot {
                        *slot = w;
                    }
                }
            }
        }
        best.extend(layer_best);
        frontier = next;
    }

    let entries = best
        .into_iter()
        .rev()
        .map(|(count, witness)| SpectrumEntry {
            value: Dyadic::from_count(count as u64, max_vars as u32),
            witness,
        })
        .collect();
    Ok(SpectrumSample { k, max_vars, entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapProvenance {
    /// Follows from a proved description of the spectrum near `δ`.
    Certified,
    /// Read off an exhaustive sample; correct only if the sample reaches the true predecessor.
    Empirical,
    /// Supplied by the caller.
    Asserted,
}

impl fmt::Display for GapProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapProvenance::Certified => "certified",
            GapProvenance::Empirical => "empirical",
            GapProvenance::Asserted => "asserted",
        })
    }
}

/// A lower bound on the distance from `δ` down to the nearest spectrum value below it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapBound {
    pub gap: Dyadic,
    pub provenance: GapProvenance,
    pub citation: String,
}

/// Gaps that follow from known structure of the spectrum:
///
/// * `δ ∈ (cp(k), 1]`: no `k`-CNF has probability in `(cp(k), 1)`.
/// * `k = 1`, `δ ∈ (0, 1]`: the 1-CNF values are `0` and the powers `2^-i`.
/// * `k = 2`, `δ ∈ (15/32, 1]`: above `15/32` the 2-CNF values are `1`, `1/2 + 2^-e` for
///   `e ≥ 1`, and `1/2`.
///
/// For non-dyadic `δ` the gap is rounded down to a dyadic rational, which keeps it valid.
pub fn known_gap(k: usize, delta: &Threshold) -> Option<GapBound> {
    let certified = |below: Dyadic, citation: &str| {
        delta.dyadic_gap_above(&below).map(|gap| GapBound {
            gap,
            provenance: GapProvenance::Certified,
            citation: citation.to_string(),
        })
    };
    if delta.is_zero() {
        return None;
    }
    let c = cp(k as u32);
    if delta.cmp_dyadic(&c) == std::cmp::Ordering::Less {
        return certified(c, "no k-CNF probability lies strictly between 1 - 2^-k and 1");
    }
    match k {
        0 | 1 => {
            let mut p = Dyadic::one();
            while delta.cmp_dyadic(&p) != std::cmp::Ordering::Less {
                p = p.halve(1);
            }
            certified(p, "1-CNF probabilities are 0 and powers of 1/2")
        }
        2 => {
            let half = Dyadic::inv_pow2(1);
            let fifteen: Dyadic = Dyadic::new(15u32.into(), 5);
            let cite = "2-CNF probabilities above 15/32 are 1, 1/2 + 2^-e and 1/2";
            match delta.cmp_dyadic(&fifteen) {
                std::cmp::Ordering::Less => {}
                _ => return None,
            }
            if delta.cmp_dyadic(&half) != std::cmp::Ordering::Less {
                return certified(fifteen, cite);
            }
            let mut e = 1;
            loop {
                let v = &half + &Dyadic::inv_pow2(e);
                if delta.cmp_dyadic(&v) == std::cmp::Ordering::Less {
                    return certified(v, cite);
                }
                e += 1;
            }
        }
        _ => None,
    }
}

/// Gap read from an exhaustive sample over `max_vars` variables.
pub fn empirical_gap(k: usize, delta: &Threshold, max_vars: usize, budget: u64) -> Result<Option<GapBound>> {
    let sample = enumerate_spectrum(k, max_vars, budget)?;
    Ok(sample.largest_below(delta).and_then(|e| {
        delta.dyadic_gap_above(&e.value).map(|gap| GapBound {
            gap,
            provenance: GapProvenance::Empirical,
            citation: format!("largest {k}-CNF value below δ over {max_vars} variables is {}", e.value),
        })
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    /// Proved absent from the spectrum.
    No,
    /// Absent from every formula over the searched variable count.
    NoneWithinBound,
    Unknown,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Yes => "yes",
            Membership::No => "no",
            Membership::NoneWithinBound => "none-within-bound",
            Membership::Unknown => "unknown",
        })
    }
}

/// Whether some `k`-CNF over at most `max_vars` variables has probability `δ`.
pub fn spectrum_membership(
    k: usize,
    delta: &Threshold,
    max_vars: usize,
    budget: u64,
) -> Result<(Membership, Option<CnfFormula>)> {
    let Some(d) = delta.as_dyadic() else {
        return Ok((Membership::No, None));
    };
    if cp(k as u32) < d && !d.is_one() {
        return Ok((Membership::No, None));
    }
    if d.exponent() as usize > max_vars {
        return Ok((Membership::Unknown, None));
    }
    let set = CandidateSet::new(k, max_vars)?;
    match find_formula(&set, &d, budget, |_, _| true) {
        Ok(SearchOutcome::Found(f)) => Ok((Membership::Yes, Some(f))),
        Ok(SearchOutcome::Exhausted) => Ok((Membership::NoneWithinBound, None)),
        Err(e) if e.is_resource_limit() => Ok((Membership::Unknown, None)),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureRow {
    pub delta: Threshold,
    pub in_spectrum: Membership,
    pub class: Complexity,
    pub witness: Option<CnfFormula>,
}

/// `m / 2^e` for `m = 0..=2^e`.
pub fn dyadic_grid(e: u32) -> Vec<Threshold> {
    (0..=(1u64 << e)).map(|m| Threshold::from_u64(m, 1 << e).expect("m ≤ 2^e")).collect()
}

pub fn export_figure_data(
    k: usize,
    max_vars: usize,
    grid: &[Threshold],
    budget: u64,
) -> Result<Vec<FigureRow>> {
    grid.iter()
        .map(|delta| {
            let (in_spectrum, witness) = spectrum_membership(k, delta, max_vars, budget)?;
            let class = classify(k, delta, max_vars, budget)?.class;
            Ok(FigureRow { delta: delta.clone(), in_spectrum, class, witness })
        })
        .collect()
}

pub const FIGURE_CSV_HEADER: [&str; 5] = ["delta_num", "delta_den", "in_spectrum", "class", "witness_dimacs"];

/// Writes UTF-8 CSV with LF line endings.
pub fn write_figure_csv<W: Write>(rows: &[FigureRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::new(std::io::ErrorKind::Other, e));
    w.write_record(FIGURE_CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        let witness = r.witness.as_ref().map(serialize_dimacs_line).unwrap_or_default();
        w.write_record([
            r.delta.numer().to_string(),
            r.delta.denom().to_string(),
            r.in_spectrum.to_string(),
            r.class.to_string(),
            witness,
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sigma_exact;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn t(s: &str) -> Threshold {
        s.parse().unwrap()
    }

    #[test]
    fn one_cnf_spectrum() {
        let s = enumerate_spectrum(1, 3, 1_000_000).unwrap();
        let vals: Vec<String> = s.values().map(|v| v.to_string()).collect();
        assert_eq!(vals, vec!["1", "1/2", "1/4", "1/8", "0"]);
        for e in &s.entries {
            assert_eq!(sigma_exact(&e.witness, None).unwrap(), e.value);
        }
    }

    #[test]
    fn two_cnf_spectrum() {
        let s = enumerate_spectrum(2, 4, 1_000_000).unwrap();
        for v in ["1", "3/4", "5/8", "9/16", "1/2"] {
            assert!(s.contains(&d(v)), "{v}");
        }
        assert!(!s.contains(&d("7/8")));
        let s5 = enumerate_spectrum(2, 5, 5_000_000).unwrap();
        assert!(s5.contains(&d("15/32")));
        assert_eq!(s5.largest_below(&t("1/2")).unwrap().value, d("15/32"));
    }

    #[test]
    fn known_gaps() {
        assert_eq!(known_gap(3, &t("1")).unwrap().gap, d("1/8"));
        assert_eq!(known_gap(2, &t("1/2")).unwrap().gap, d("1/32"));
        assert_eq!(known_gap(1, &t("1/2")).unwrap().gap, d("1/4"));
        assert_eq!(known_gap(2, &t("3/4")).unwrap().gap, d("1/8"));
        assert_eq!(known_gap(2, &t("9/16")).unwrap().gap, d("1/32"));
        assert_eq!(known_gap(1, &t("3/8")).unwrap().gap, d("1/8"));
        assert!(known_gap(3, &t("3/4")).is_none());
        assert!(known_gap(2, &t("15/32")).is_none());
        assert_eq!(known_gap(3, &t("1")).unwrap().provenance, GapProvenance::Certified);
    }

    #[test]
    fn empirical_gaps() {
        assert_eq!(empirical_gap(1, &t("1/2"), 2, 10_000).unwrap().unwrap().gap, d("1/4"));
        assert_eq!(empirical_gap(1, &t("1/16"), 2, 10_000).unwrap().unwrap().gap, d("1/16"));
    }

    #[test]
    fn membership_and_csv() {
        let (m, w) = spectrum_membership(1, &t("1/4"), 3, 100_000).unwrap();
        assert_eq!(m, Membership::Yes);
        assert_eq!(sigma_exact(&w.unwrap(), None).unwrap(), d("1/4"));
        assert_eq!(spectrum_membership(3, &t("15/16"), 4, 100_000).unwrap().0, Membership::No);
        let rows = export_figure_data(1, 3, &[t("1/4")], 100_000).unwrap();
        assert_eq!(rows[0].class, Complexity::Ac0);
        let mut buf = Vec::new();
        write_figure_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("delta_num,delta_den,in_spectrum,class,witness_dimacs\n1,4,yes,AC0,p cnf 2 2 1 0 2 0\n"));
        assert!(!text.contains('\r'));
    }
}
