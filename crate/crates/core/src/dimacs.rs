//! DIMACS CNF reading and writing.
//!
//! The reader is token based: a clause may share a line with the `p cnf` header, so a whole
//! formula fits on one line. Lines starting with `c` are comments, and a line starting with
//! `%` ends the input. A comment of the form `c x-vars 1 2 5` declares counting variables for
//! the majority-of-majority front end.

use log::warn;

use crate::cnf::{Clause, CnfFormula, Literal};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Drop tautological clauses instead of rejecting the input.
    pub drop_tautologies: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedDimacs {
    pub formula: CnfFormula,
    pub declared_vars: usize,
    pub declared_clauses: usize,
    /// Variables listed on `c x-vars` comment lines, if any.
    pub x_vars: Option<Vec<u32>>,
    pub warnings: Vec<String>,
}

pub fn parse_dimacs(input: &[u8]) -> Result<CnfFormula> {
    Ok(parse_dimacs_with(input, ParseOptions::default())?.formula)
}

pub fn parse_dimacs_with(input: &[u8], opts: ParseOptions) -> Result<ParsedDimacs> {
    let text = std::str::from_utf8(input)
        .map_err(|e| Error::Parse { line: 0, msg: format!("input is not UTF-8: {e}") })?;

    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<(i64, usize)> = Vec::new();
    let mut x_vars: Option<Vec<u32>> = None;
    let mut warnings = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('c') {
            let mut toks = trimmed.split_whitespace();
            toks.next();
            if toks.next() == Some("x-vars") {
                let list = x_vars.get_or_insert_with(Vec::new);
                for t in toks {
                    let v: u32 = t.parse().map_err(|_| Error::Parse {
                        line,
                        msg: format!("bad x-vars entry `{t}`"),
                    })?;
                    if v == 0 {
                        return Err(Error::Parse { line, msg: "x-vars entry 0".into() });
                    }
                    list.push(v);
                }
            }
            continue;
        }
        let mut toks = trimmed.split_whitespace().peekable();
        if toks.peek() == Some(&"p") {
            if header.is_some() {
                return Err(Error::Parse { line, msg: "duplicate problem line".into() });
            }
            toks.next();
            if toks.next() != Some("cnf") {
                return Err(Error::Parse { line, msg: "expected `p cnf <vars> <clauses>`".into() });
            }
            let mut num = |what: &str| -> Result<usize> {
                toks.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse { line, msg: format!("missing or bad {what} count") })
            };
            let nv = num("variable")?;
            let nc = num("clause")?;
            header = Some((nv, nc));
            // Remaining tokens on the header line are clause literals.
        } else if header.is_none() {
            return Err(Error::Parse { line, msg: "clause before problem line".into() });
        }
        for t in toks {
            let x: i64 = t
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("bad literal `{t}`") })?;
            if x == 0 {
                let start = current.first().map(|&(_, l)| l).unwrap_or(line);
                let lits: Vec<Literal> = current
                    .drain(..)
                    .map(|(x, l)| {
                        Literal::from_dimacs(x)
                            .ok_or_else(|| Error::Parse { line: l, msg: format!("literal {x} out of range") })
                    })
                    .collect::<Result<_>>()?;
                match Clause::new(lits) {
                    Ok(c) => clauses.push(c),
                    Err(Error::Tautology { var }) => {
                        if opts.drop_tautologies {
                            warnings.push(format!("line {start}: dropped tautological clause on variable {var}"));
                        } else {
                            return Err(Error::TautologicalClause { line: start, var });
                        }
                    }
                    Err(e) => return Err(e),
                }
            } else {
                current.push((x, line));
            }
        }
    }

    let Some((nv, nc)) = header else {
        return Err(Error::Parse { line: 0, msg: "missing problem line".into() });
    };
    if !current.is_empty() {
        let line = current[0].1;
        return Err(Error::Parse { line, msg: "unterminated clause (missing 0)".into() });
    }
    let read = clauses.len() + warnings.len();
    if read != nc {
        warnings.push(format!("header declares {nc} clauses, read {read}"));
    }
    let formula = CnfFormula::from_clauses(clauses);
    if formula.max_var() as usize > nv {
        warnings.push(format!(
            "variable {} exceeds header count {nv}",
            formula.max_var()
        ));
    }
    for w in &warnings {
        warn!("{w}");
    }
    Ok(ParsedDimacs { formula, declared_vars: nv, declared_clauses: nc, x_vars, warnings })
}

/// Multi-line DIMACS with a `p cnf` header whose variable count is the largest variable id.
pub fn serialize_dimacs(phi: &CnfFormula) -> String {
    let mut s = format!("p cnf {} {}\n", phi.max_var(), phi.len());
    for c in phi.clauses() {
        for l in c.literals() {
            s.push_str(&l.to_dimacs().to_string());
            s.push(' ');
        }
        s.push_str("0\n");
    }
    s
}

/// The same content on a single line, as used in CSV witness columns.
pub fn serialize_dimacs_line(phi: &CnfFormula) -> String {
    serialize_dimacs(phi).trim_end().replace('\n', " ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_file() {
        let src = b"c example\np cnf 3 2\n1 -2 0\n2 3\n0\n";
        let phi = parse_dimacs(src).unwrap();
        assert_eq!(phi.to_signed(), vec![vec![1, -2], vec![2, 3]]);
    }

    #[test]
    fn one_line_and_percent_terminator() {
        let phi = parse_dimacs(b"p cnf 7 3 1 2 0 3 4 0 5 6 7 0\n%\n0\n").unwrap();
        assert_eq!(phi.len(), 3);
        assert_eq!(serialize_dimacs_line(&phi), "p cnf 7 3 1 2 0 3 4 0 5 6 7 0");
    }

    #[test]
    fn rejects_tautology_with_line() {
        let err = parse_dimacs(b"p cnf 2 2\n1 2 0\n1 -1 0\n").unwrap_err();
        assert!(matches!(err, Error::TautologicalClause { line: 3, var: 1 }));
        let ok = parse_dimacs_with(
            b"p cnf 2 2\n1 2 0\n1 -1 0\n",
            ParseOptions { drop_tautologies: true },
        )
        .unwrap();
        assert_eq!(ok.formula.len(), 1);
        assert_eq!(ok.warnings.len(), 1);
    }

    #[test]
    fn errors_and_warnings() {
        assert!(parse_dimacs(b"1 2 0\n").is_err());
        assert!(parse_dimacs(b"p cnf 2 1\n1 2\n").is_err());
        assert!(parse_dimacs(b"p cnf 2 1\n1 x 0\n").is_err());
        let p = parse_dimacs_with(b"p cnf 1 1\n1 5 0\n", ParseOptions::default()).unwrap();
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn empty_clause_and_x_vars() {
        let p = parse_dimacs_with(b"c x-vars 1 2\nc x-vars 5\np cnf 5 2\n0\n1 3 0\n", ParseOptions::default())
            .unwrap();
        assert!(p.formula.contains_empty_clause());
        assert_eq!(p.x_vars, Some(vec![1, 2, 5]));
    }

    #[test]
    fn round_trip() {
        let phi = CnfFormula::from_dimacs(&[&[1, -3], &[2], &[]]).unwrap();
        assert_eq!(parse_dimacs(serialize_dimacs(&phi).as_bytes()).unwrap(), phi);
    }
}
