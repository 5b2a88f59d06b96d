//! Literals, clauses, CNF formulas, partial assignments, and the syntactic operations on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A signed variable. Ordered by variable, then positive before negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variable ids start at 1");
        Literal { var, negated }
    }

    pub fn pos(var: u32) -> Self {
        Literal::new(var, false)
    }

    pub fn neg(var: u32) -> Self {
        Literal::new(var, true)
    }

    /// From a DIMACS-style signed integer. Zero is not a literal.
    pub fn from_dimacs(x: i64) -> Option<Self> {
        if x == 0 || x.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal::new(x.unsigned_abs() as u32, x < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn negate(self) -> Self {
        Literal { var: self.var, negated: !self.negated }
    }

    /// The value of this literal when its variable is set to `value`.
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A non-tautological set of literals, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(Vec<Literal>);

impl Clause {
    /// Builds a clause, removing duplicates. Fails on a complementary pair.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Result<Self> {
        let mut v: Vec<Literal> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        for w in v.windows(2) {
            if w[0].var == w[1].var {
                return Err(Error::Tautology { var: w[0].var });
            }
        }
        Ok(Clause(v))
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Self> {
        let mut v = Vec::with_capacity(lits.len());
        for &x in lits {
            v.push(Literal::from_dimacs(x).ok_or_else(|| Error::invalid("0 is not a literal"))?);
        }
        Clause::new(v)
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn unit(l: Literal) -> Self {
        Clause(vec![l])
    }

    /// Caller guarantees the literals are sorted, distinct, and non-complementary.
    fn from_sorted(v: Vec<Literal>) -> Self {
        Clause(v)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_unit(&self) -> Option<Literal> {
        match self.0.as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|l| l.var)
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.0.binary_search(&l).is_ok()
    }

    pub fn contains_var(&self, var: u32) -> bool {
        self.0.iter().any(|l| l.var == var)
    }

    /// Signed-literal containment.
    pub fn is_subset_of(&self, other: &Clause) -> bool {
        let mut it = other.0.iter();
        'outer: for l in &self.0 {
            for m in it.by_ref() {
                if m == l {
                    continue 'outer;
                }
                if m > l {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn shares_var(&self, other: &Clause) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i].var, other.0[j].var);
            if a == b {
                return true;
            }
            if a < b {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    /// `self \ other` as literal sets.
    pub fn minus(&self, other: &Clause) -> Clause {
        Clause::from_sorted(self.0.iter().copied().filter(|l| !other.contains(*l)).collect())
    }

    pub fn without(&self, l: Literal) -> Clause {
        Clause::from_sorted(self.0.iter().copied().filter(|m| *m != l).collect())
    }

    /// Literal union, or `None` when the result would be tautological.
    pub fn union(&self, other: &Clause) -> Option<Clause> {
        Clause::new(self.0.iter().chain(other.0.iter()).copied()).ok()
    }

    /// True when some literal of the clause is true under a total assignment of its variables.
    pub fn satisfied_by(&self, beta: &Assignment) -> bool {
        self.0.iter().any(|l| beta.get(l.var).is_some_and(|v| l.eval(v)))
    }

    pub fn to_dimacs(&self) -> Vec<i64> {
        self.0.iter().map(|l| l.to_dimacs()).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Clause {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_dimacs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Clause {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        Clause::from_dimacs(&v).map_err(serde::de::Error::custom)
    }
}

/// A finite set of clauses with a declared width bound `k`.
///
/// Clauses are stored in canonical order without duplicates, so two formulas with the
/// same clause set compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CnfFormula {
    clauses: Vec<Clause>,
    width: usize,
}

impl CnfFormula {
    /// Formula whose width bound is its maximum clause width.
    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        clauses.sort_unstable();
        clauses.dedup();
        let width = clauses.iter().map(Clause::len).max().unwrap_or(0);
        CnfFormula { clauses, width }
    }

    /// Formula with an explicit width bound; fails if a clause is wider.
    pub fn with_width(clauses: impl IntoIterator<Item = Clause>, k: usize) -> Result<Self> {
        let mut f = CnfFormula::from_clauses(clauses);
        if f.width > k {
            return Err(Error::WidthExceeded { bound: k, width: f.width });
        }
        f.width = k;
        Ok(f)
    }

    /// Convenience constructor from signed integers, e.g. `&[&[1, -2], &[3]]`.
    pub fn from_dimacs(clauses: &[&[i64]]) -> Result<Self> {
        let cs = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(CnfFormula::from_clauses(cs))
    }

    pub fn empty() -> Self {
        CnfFormula::default()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// The declared bound `k`.
    pub fn width_bound(&self) -> usize {
        self.width
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::len).max().unwrap_or(0)
    }

    /// Same clauses with a different bound. Fails if a clause is wider.
    pub fn rebound(&self, k: usize) -> Result<Self> {
        CnfFormula::with_width(self.clauses.iter().cloned(), k)
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        self.clauses.iter().flat_map(|c| c.vars()).collect()
    }

    pub fn max_var(&self) -> u32 {
        self.clauses.iter().flat_map(|c| c.vars()).max().unwrap_or(0)
    }

    pub fn contains(&self, c: &Clause) -> bool {
        self.clauses.binary_search(c).is_ok()
    }

    pub fn contains_empty_clause(&self) -> bool {
        self.clauses.first().is_some_and(Clause::is_empty)
    }

    pub fn has_complementary_units(&self) -> bool {
        let units: BTreeSet<Literal> = self.clauses.iter().filter_map(Clause::as_unit).collect();
        units.iter().any(|l| !l.negated && units.contains(&l.negate()))
    }

    /// Trivially unsatisfiable: contains the empty clause or a pair `{x}`, `{¬x}`.
    pub fn is_trivially_false(&self) -> bool {
        self.contains_empty_clause() || self.has_complementary_units()
    }

    /// Clauses whose width satisfies the predicate, keeping the width bound.
    pub fn filter(&self, mut keep: impl FnMut(&Clause) -> bool) -> CnfFormula {
        CnfFormula {
            clauses: self.clauses.iter().filter(|c| keep(c)).cloned().collect(),
            width: self.width,
        }
    }

    pub fn union(&self, other: &CnfFormula) -> CnfFormula {
        let mut f = CnfFormula::from_clauses(self.clauses.iter().chain(&other.clauses).cloned());
        f.width = f.width.max(self.width).max(other.width);
        f
    }

    /// Whether `beta` satisfies every clause. Unassigned variables count as false literals.
    pub fn satisfied_by(&self, beta: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(beta))
    }

    pub fn to_signed(&self) -> Vec<Vec<i64>> {
        self.clauses.iter().map(Clause::to_dimacs).collect()
    }

    fn with_same_width(&self, clauses: Vec<Clause>) -> CnfFormula {
        let mut f = CnfFormula::from_clauses(clauses);
        f.width = f.width.max(self.width);
        f
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Wire format for fixtures and JSON output: `{"k": int, "clauses": [[signed ints]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FormulaJson {
    pub k: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl From<&CnfFormula> for FormulaJson {
    fn from(f: &CnfFormula) -> Self {
        FormulaJson { k: f.width, clauses: f.to_signed() }
    }
}

impl TryFrom<FormulaJson> for CnfFormula {
    type Error = Error;
    fn try_from(j: FormulaJson) -> Result<Self> {
        let cs = j
            .clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>>>()?;
        CnfFormula::with_width(cs, j.k)
    }
}

impl Serialize for CnfFormula {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormulaJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CnfFormula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FormulaJson::deserialize(d)?;
        CnfFormula::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// A partial map from variables to truth values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(BTreeMap<u32, bool>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    /// The assignment over `vars` (in iteration order) whose i-th variable takes bit i of `bits`.
    pub fn from_bits(vars: &[u32], bits: u64) -> Self {
        Assignment(vars.iter().enumerate().map(|(i, &v)| (v, bits >> i & 1 == 1)).collect())
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.0.insert(var, value);
    }

    pub fn unset(&mut self, var: u32) {
        self.0.remove(&var);
    }

    pub fn get(&self, var: u32) -> Option<bool> {
        self.0.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.0.iter().map(|(&v, &b)| (v, b))
    }

    /// Literals that are true under the assignment.
    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.iter().map(|(v, b)| Literal::new(v, !b))
    }

    /// The unit clauses `{x}` for `x ↦ 1` and `{¬x}` for `x ↦ 0`.
    pub fn unit_clauses(&self) -> Vec<Clause> {
        self.literals().map(Clause::unit).collect()
    }
}

impl FromIterator<(u32, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (u32, bool)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// Applies the unit rule once to the initial unit clauses, without propagation.
///
/// Units are processed in canonical order. Processing `{l}` removes every other clause
/// containing `l` and deletes `¬l` from every remaining clause. A unit that an earlier step
/// already rewrote (for instance `{¬l}` turned into the empty clause) is not processed.
pub fn unit_rule(phi: &CnfFormula) -> CnfFormula {
    let initial_units: Vec<Literal> = phi.clauses.iter().filter_map(Clause::as_unit).collect();
    if initial_units.is_empty() {
        return phi.clone();
    }
    // Work on a list of optional clauses so that position identifies "this unit".
    let mut work: Vec<Option<Clause>> = phi.clauses.iter().cloned().map(Some).collect();
    for l in initial_units {
        let Some(pos) = work.iter().position(|c| c.as_ref().and_then(Clause::as_unit) == Some(l))
        else {
            continue;
        };
        let neg = l.negate();
        for (i, slot) in work.iter_mut().enumerate() {
            if i == pos {
                continue;
            }
            if let Some(c) = slot {
                if c.contains(l) {
                    *slot = None;
                } else if c.contains(neg) {
                    *c = c.without(neg);
                }
            }
        }
    }
    phi.with_same_width(work.into_iter().flatten().collect())
}

/// `phi|beta`: the unit rule applied to `phi` together with the units of `beta`.
pub fn restrict(phi: &CnfFormula, beta: &Assignment) -> CnfFormula {
    let mut cs = phi.clauses.clone();
    cs.extend(beta.unit_clauses());
    unit_rule(&phi.with_same_width(cs))
}

/// All clauses of `phi` that contain `c` (as signed literal sets).
pub fn link(phi: &CnfFormula, c: &Clause) -> Vec<Clause> {
    phi.clauses.iter().filter(|d| c.is_subset_of(d)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Letters a..h map to variables 1..8.
    fn f(cs: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs(cs).unwrap()
    }

    #[test]
    fn clause_construction() {
        let c = Clause::from_dimacs(&[3, -1, 3]).unwrap();
        assert_eq!(c.to_dimacs(), vec![-1, 3]);
        assert!(matches!(
            Clause::from_dimacs(&[1, -1]),
            Err(Error::Tautology { var: 1 })
        ));
        assert!(Clause::from_dimacs(&[1, 2]).unwrap().is_subset_of(&Clause::from_dimacs(&[1, 2, -3]).unwrap()));
        assert!(!Clause::from_dimacs(&[1, -2]).unwrap().is_subset_of(&Clause::from_dimacs(&[1, 2]).unwrap()));
        assert!(Clause::empty().is_subset_of(&Clause::from_dimacs(&[4]).unwrap()));
    }

    #[test]
    fn canonical_order_and_dedup() {
        let g = f(&[&[2, 3], &[1], &[2, 3], &[]]);
        assert_eq!(g.to_signed(), vec![vec![], vec![1], vec![2, 3]]);
        assert!(g.contains_empty_clause());
        assert_eq!(g.width_bound(), 2);
    }

    #[test]
    fn unit_rule_single_pass() {
        // {{b},{a,b},{¬b,c}} -> {{b},{c}}
        assert_eq!(unit_rule(&f(&[&[2], &[1, 2], &[-2, 3]])).to_signed(), vec![vec![2], vec![3]]);
        // {{b},{¬b}} -> {{b},{}}
        assert_eq!(unit_rule(&f(&[&[2], &[-2]])).to_signed(), vec![vec![], vec![2]]);
        assert_eq!(unit_rule(&CnfFormula::empty()), CnfFormula::empty());
        // The produced unit {c} is not processed again.
        let g = unit_rule(&f(&[&[1], &[-1, 3], &[-3, 4]]));
        assert_eq!(g.to_signed(), vec![vec![1], vec![3], vec![-3, 4]]);
    }

    #[test]
    fn restrict_examples() {
        // {{a,b},{¬b,c,¬f},{d,e,f,g}} with b↦1, c↦0, h↦0
        let phi = f(&[&[1, 2], &[-2, 3, -6], &[4, 5, 6, 7]]);
        let beta: Assignment = [(2, true), (3, false), (8, false)].into_iter().collect();
        let want = f(&[&[-6], &[4, 5, 6, 7], &[2], &[-3], &[-8]]);
        assert_eq!(restrict(&phi, &beta).clauses(), want.clauses());

        // {{a,b},{¬b,c,¬f},{d,e,g}} with b↦1, d↦0
        let phi = f(&[&[1, 2], &[-2, 3, -6], &[4, 5, 7]]);
        let beta: Assignment = [(2, true), (4, false)].into_iter().collect();
        let want = f(&[&[3, -6], &[5, 7], &[2], &[-4]]);
        assert_eq!(restrict(&phi, &beta).clauses(), want.clauses());

        let beta: Assignment = [(1, false)].into_iter().collect();
        assert!(restrict(&f(&[&[1]]), &beta).contains_empty_clause());
    }

    #[test]
    fn link_is_signed() {
        let phi = f(&[&[1, 2], &[1, 3], &[-1, 4], &[5]]);
        let l = link(&phi, &Clause::from_dimacs(&[1]).unwrap());
        assert_eq!(l.len(), 2);
        assert_eq!(link(&phi, &Clause::empty()).len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let phi = f(&[&[1, -2], &[3]]).rebound(3).unwrap();
        let s = serde_json::to_string(&phi).unwrap();
        assert_eq!(s, r#"{"k":3,"clauses":[[1,-2],[3]]}"#);
        let back: CnfFormula = serde_json::from_str(&s).unwrap();
        assert_eq!(back, phi);
        assert!(serde_json::from_str::<CnfFormula>(r#"{"k":1,"clauses":[[1,2]]}"#).is_err());
    }
}
