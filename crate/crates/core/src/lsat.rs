//! Satisfiability for formulas of width at most 1 or 2, with a small backtracking fallback.

use std::collections::{BTreeMap, BTreeSet};

use crate::cnf::{Assignment, CnfFormula, Literal};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

/// Solves `φ` when every clause has width at most `l`.
///
/// `l = 1` is a direct check, `l = 2` uses strongly connected components of the implication
/// graph, and larger `l` uses backtracking search. Models assign every variable of `φ`.
pub fn l_sat_solve(phi: &CnfFormula, l: usize) -> Result<SatResult> {
    let w = phi.max_width();
    if w > l {
        return Err(Error::WidthExceeded { bound: l, width: w });
    }
    if phi.contains_empty_clause() {
        return Ok(SatResult::Unsat);
    }
    match w {
        0 | 1 => Ok(solve_units(phi)),
        2 => Ok(solve_2sat(phi)),
        _ => Ok(solve_backtrack(phi)),
    }
}

fn solve_units(phi: &CnfFormula) -> SatResult {
    if phi.has_complementary_units() {
        return SatResult::Unsat;
    }
    let mut beta = Assignment::new();
    for c in phi.clauses() {
        let l = c.as_unit().expect("width ≤ 1 and no empty clause");
        beta.set(l.var(), !l.is_negated());
    }
    SatResult::Sat(beta)
}

fn solve_2sat(phi: &CnfFormula) -> SatResult {
    let vars: Vec<u32> = phi.vars().into_iter().collect();
    let n = vars.len();
    let node = |l: Literal| -> usize {
        let i = vars.binary_search(&l.var()).unwrap();
        2 * i + l.is_negated() as usize
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n];
    for c in phi.clauses() {
        match c.literals() {
            [a] => adj[node(a.negate())].push(node(*a)),
            [a, b] => {
                adj[node(a.negate())].push(node(*b));
                adj[node(b.negate())].push(node(*a));
            }
            _ => unreachable!(),
        }
    }
    let comp = tarjan_scc(&adj);
    let mut beta = Assignment::new();
    for (i, &v) in vars.iter().enumerate() {
        let (p, q) = (comp[2 * i], comp[2 * i + 1]);
        if p == q {
            return SatResult::Unsat;
        }
        // Tarjan numbers components in reverse topological order; a literal is true when its
        // component comes later in topological order than its negation's.
        beta.set(v, p < q);
    }
    SatResult::Sat(beta)
}

/// Iterative Tarjan. Returns the component index of each node, in reverse topological order.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![NONE; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei == 0 && index[v] == NONE {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if *ei < adj[v].len() {
                let w = adj[v][*ei];
                *ei += 1;
                if index[w] == NONE {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

fn solve_backtrack(phi: &CnfFormula) -> SatResult {
    let vars: Vec<u32> = phi.vars().into_iter().collect();
    let mut beta: BTreeMap<u32, bool> = BTreeMap::new();
    if backtrack(phi, &vars, 0, &mut beta) {
        SatResult::Sat(beta.into_iter().collect())
    } else {
        SatResult::Unsat
    }
}

fn backtrack(phi: &CnfFormula, vars: &[u32], i: usize, beta: &mut BTreeMap<u32, bool>) -> bool {
    // Fail early when some clause is fully assigned and false.
    for c in phi.clauses() {
        let mut open = false;
        let mut sat = false;
        for l in c.literals() {
            match beta.get(&l.var()) {
                Some(&v) => sat |= l.eval(v),
                None => open = true,
            }
        }
        if !sat && !open {
            return false;
        }
    }
    if i == vars.len() {
        return true;
    }
    for v in [false, true] {
        beta.insert(vars[i], v);
        if backtrack(phi, vars, i + 1, beta) {
            return true;
        }
    }
    beta.remove(&vars[i]);
    false
}

/// Extends `beta` to every variable in `vars`, setting the missing ones to false.
pub fn complete_model(beta: &Assignment, vars: &BTreeSet<u32>) -> Assignment {
    let mut out = beta.clone();
    for &v in vars {
        if out.get(v).is_none() {
            out.set(v, false);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(cs: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs(cs).unwrap()
    }

    fn check(phi: &CnfFormula, l: usize) -> bool {
        match l_sat_solve(phi, l).unwrap() {
            SatResult::Sat(m) => {
                assert!(phi.satisfied_by(&m), "model must satisfy {phi}");
                true
            }
            SatResult::Unsat => false,
        }
    }

    #[test]
    fn units() {
        assert!(check(&f(&[&[1], &[-2]]), 1));
        assert!(!check(&f(&[&[1], &[-1]]), 1));
        assert!(!check(&f(&[&[]]), 1));
        assert!(check(&CnfFormula::empty(), 1));
    }

    #[test]
    fn two_sat() {
        assert!(check(&f(&[&[1, 2], &[-1, 2], &[1, -2]]), 2));
        assert!(!check(&f(&[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]), 2));
        assert!(!check(&f(&[&[1], &[-1, 2], &[-2, 3], &[-3]]), 2));
        assert!(check(&f(&[&[1], &[-1, 2], &[-2, 3]]), 2));
        assert!(l_sat_solve(&f(&[&[1, 2, 3]]), 2).is_err());
    }

    #[test]
    fn backtracking() {
        assert!(check(&f(&[&[1, 2, 3], &[-1, -2], &[-3]]), 3));
        let all: Vec<Vec<i64>> = (0..8)
            .map(|b| (1..=3).map(|v| if b >> (v - 1) & 1 == 1 { v } else { -v }).collect())
            .collect();
        let refs: Vec<&[i64]> = all.iter().map(|c| c.as_slice()).collect();
        assert!(!check(&f(&refs), 3));
    }
}
