//! Decoding optimal flows into checkable satisfiability certificates.
//!
//! Unsatisfiability shows up as some variable whose commodity and its
//! negation's commodity both route their unit: the two flows trace
//! implication paths from the literal to its negation and back. Otherwise a
//! satisfying assignment is grown over the implication graph: literals whose
//! commodity routed are false, truth propagates along implications, and
//! leftover literals are set true lowest-code-first.

use crate::formula::{Formula, Literal};
use crate::implication::build_implication_graph;
use crate::lp_model::{arc_column, clause_of_arc, counts, source_column};
use crate::simplex::{Scalar, SolveResult, SolveStatus};
use crate::{Error, Result};

/// Satisfiability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        })
    }
}

/// A checkable certificate: a satisfying assignment, or a witness variable
/// with implication paths (as literal codes) to its negation and back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Sat {
        assignment: Vec<bool>,
    },
    Unsat {
        witness: u32,
        path_out: Vec<u32>,
        path_back: Vec<u32>,
    },
}

impl Certificate {
    pub fn verdict(&self) -> Verdict {
        match self {
            Certificate::Sat { .. } => Verdict::Sat,
            Certificate::Unsat { .. } => Verdict::Unsat,
        }
    }

    /// Stable text schema consumed by the CLI and [`Certificate::parse`].
    pub fn to_text(&self, n: u32) -> String {
        let mut out = String::from("c flowsat certificate\n");
        match self {
            Certificate::Sat { assignment } => {
                out.push_str("verdict SAT\n");
                out.push_str(&format!("n {n}\n"));
                out.push_str("assignment ");
                for &b in assignment {
                    out.push(if b { '1' } else { '0' });
                }
                out.push('\n');
            }
            Certificate::Unsat {
                witness,
                path_out,
                path_back,
            } => {
                out.push_str("verdict UNSAT\n");
                out.push_str(&format!("n {n}\n"));
                out.push_str(&format!("witness {witness}\n"));
                for path in [path_out, path_back] {
                    out.push_str("path");
                    for code in path {
                        out.push_str(&format!(" {code}"));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Certificate> {
        let mut verdict = None;
        let mut assignment = None;
        let mut witness = None;
        let mut paths: Vec<Vec<u32>> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "verdict" => verdict = Some(rest.to_string()),
                "n" => {}
                "assignment" => {
                    let bits: Result<Vec<bool>> = rest
                        .chars()
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            _ => Err(Error::parse(lineno, "assignment must be 0/1 bits")),
                        })
                        .collect();
                    assignment = Some(bits?);
                }
                "witness" => {
                    witness = Some(
                        rest.parse::<u32>()
                            .map_err(|_| Error::parse(lineno, "invalid witness index"))?,
                    );
                }
                "path" => {
                    let codes: Result<Vec<u32>> = rest
                        .split_whitespace()
                        .map(|t| {
                            t.parse::<u32>()
                                .map_err(|_| Error::parse(lineno, "invalid literal code in path"))
                        })
                        .collect();
                    paths.push(codes?);
                }
                _ => return Err(Error::parse(lineno, format!("unknown field '{key}'"))),
            }
        }
        match verdict.as_deref() {
            Some("SAT") => Ok(Certificate::Sat {
                assignment: assignment
                    .ok_or_else(|| Error::parse(0, "SAT certificate lacks an assignment"))?,
            }),
            Some("UNSAT") => {
                if paths.len() != 2 {
                    return Err(Error::parse(0, "UNSAT certificate needs two paths"));
                }
                let path_back = paths.pop().expect("two paths");
                let path_out = paths.pop().expect("two paths");
                Ok(Certificate::Unsat {
                    witness: witness
                        .ok_or_else(|| Error::parse(0, "UNSAT certificate lacks a witness"))?,
                    path_out,
                    path_back,
                })
            }
            _ => Err(Error::parse(0, "missing or unknown verdict")),
        }
    }
}

/// Read a flow value that must be 0 or 1. In float mode anything in
/// (0.1, 0.9) is a decode error, not rounding material: vertices are exactly
/// 0/1, so a mid-range value signals a solver fault.
fn flow_bit<T: Scalar>(v: &T) -> Result<bool> {
    if T::EXACT {
        if v.is_zero() {
            Ok(false)
        } else if *v == T::one() {
            Ok(true)
        } else {
            Err(Error::Decode(format!("flow value {v} is not 0/1")))
        }
    } else {
        let x = v.to_f64();
        if x <= 0.1 {
            Ok(false)
        } else if x >= 0.9 {
            Ok(true)
        } else {
            Err(Error::Decode(format!("flow value {x} is not near 0/1")))
        }
    }
}

/// Decode an optimal solution of the penalty (or face-fixed) LP for `f`.
pub fn decide_from_solution<T: Scalar>(sol: &SolveResult<T>, f: &Formula) -> Result<Certificate> {
    if sol.status != SolveStatus::Optimal {
        return Err(Error::domain(format!(
            "solution status is {:?}, not Optimal",
            sol.status
        )));
    }
    let n = f.n();
    let (vars, _, _) = counts(n);
    if sol.primal.len() != vars {
        return Err(Error::domain(format!(
            "solution has {} variables but the LP for n = {n} has {vars}",
            sol.primal.len()
        )));
    }
    for i in 1..=n {
        let fwd = flow_bit(&sol.primal[source_column(i, n)])?;
        let bwd = flow_bit(&sol.primal[source_column(i + n, n)])?;
        if fwd && bwd {
            return Ok(Certificate::Unsat {
                witness: i,
                path_out: extract_path(sol, i, n)?,
                path_back: extract_path(sol, i + n, n)?,
            });
        }
    }
    Ok(Certificate::Sat {
        assignment: extract_assignment_flow(sol, f)?,
    })
}

/// Walk the saturated commodity-`k` arcs from literal `k` to its negation,
/// cancelling cycles, and return the simple path as literal codes.
pub fn extract_path<T: Scalar>(sol: &SolveResult<T>, k: u32, n: u32) -> Result<Vec<u32>> {
    let tn = 2 * n;
    if !flow_bit(&sol.primal[source_column(k, n)])? {
        return Err(Error::domain(format!(
            "commodity {k} routed no flow; no path to extract"
        )));
    }
    let target = (k - 1 + n) % tn + 1;
    let mut path = vec![k];
    let mut used: Vec<(u32, u32)> = Vec::new();
    let step_cap = (tn as usize) * (tn as usize) + 2;
    for _ in 0..step_cap {
        let cur = *path.last().expect("path never empties");
        let mut next = None;
        for j in 1..=tn {
            if j == cur || used.contains(&(cur, j)) {
                continue;
            }
            if flow_bit(&sol.primal[arc_column(k, cur, j, n)])? {
                next = Some(j);
                break;
            }
        }
        let Some(j) = next else {
            return Err(Error::Internal(format!(
                "conservation violated: no saturated arc leaves {cur} for commodity {k}"
            )));
        };
        used.push((cur, j));
        if let Some(pos) = path.iter().position(|&v| v == j) {
            path.truncate(pos + 1); // cancel the cycle
        } else {
            path.push(j);
        }
        if j == target {
            return Ok(path);
        }
    }
    Err(Error::Internal(format!(
        "path extraction for commodity {k} did not terminate"
    )))
}

/// The satisfying-assignment construction from the optimal flows: every
/// literal whose commodity routed is false, truth closes forward over the
/// implication edges, and remaining literals are set true lowest-code-first.
pub fn extract_assignment_flow<T: Scalar>(sol: &SolveResult<T>, f: &Formula) -> Result<Vec<bool>> {
    let n = f.n();
    let tn = 2 * n;
    let g = build_implication_graph(f);
    let mut value: Vec<Option<bool>> = vec![None; tn as usize];
    let mut queue: Vec<u32> = Vec::new();

    let set_true = |lit: u32, value: &mut Vec<Option<bool>>, queue: &mut Vec<u32>| -> Result<()> {
        let neg = (lit - 1 + n) % tn + 1;
        match value[(lit - 1) as usize] {
            Some(true) => Ok(()),
            Some(false) => Err(Error::Internal(format!(
                "propagation conflict: literal {lit} forced both true and false"
            ))),
            None => {
                value[(lit - 1) as usize] = Some(true);
                value[(neg - 1) as usize] = Some(false);
                queue.push(lit);
                Ok(())
            }
        }
    };

    for k in 1..=tn {
        if flow_bit(&sol.primal[source_column(k, n)])? {
            let neg = (k - 1 + n) % tn + 1;
            set_true(neg, &mut value, &mut queue)?;
        }
    }
    loop {
        while let Some(u) = queue.pop() {
            for &v in g.out_neighbors(u - 1) {
                set_true(v + 1, &mut value, &mut queue)?;
            }
        }
        match (1..=tn).find(|&c| value[(c - 1) as usize].is_none()) {
            Some(c) => set_true(c, &mut value, &mut queue)?,
            None => break,
        }
    }
    Ok((1..=n)
        .map(|i| value[(i - 1) as usize].expect("assignment is total"))
        .collect())
}

/// Check a certificate against the formula: a SAT assignment must satisfy
/// every clause; UNSAT paths must be implication chains over present clauses
/// with endpoints (x_i, not-x_i) and (not-x_i, x_i).
pub fn verify_certificate(f: &Formula, cert: &Certificate) -> bool {
    let n = f.n();
    match cert {
        Certificate::Sat { assignment } => f.is_satisfied_by(assignment),
        Certificate::Unsat {
            witness,
            path_out,
            path_back,
        } => {
            if *witness == 0 || *witness > n {
                return false;
            }
            let pos = *witness;
            let neg = witness + n;
            let valid_chain = |path: &[u32], from: u32, to: u32| -> bool {
                if path.first() != Some(&from) || path.last() != Some(&to) || path.len() < 2 {
                    return false;
                }
                path.iter().all(|&c| c >= 1 && c <= 2 * n)
                    && path.windows(2).all(|w| {
                        let tail = Literal::new(w[0], n).expect("checked range");
                        let head = Literal::new(w[1], n).expect("checked range");
                        match clause_of_arc(tail, head, n) {
                            Ok(Some(c)) => f.contains(&c),
                            _ => false,
                        }
                    })
            };
            valid_chain(path_out, pos, neg) && valid_chain(path_back, neg, pos)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::lp_model::{self, CapacityMode};
    use crate::simplex::{solve, SolverOptions};
    use num::BigRational;

    fn unsat_full_n2() -> Formula {
        Formula::from_dimacs_pairs(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]).unwrap()
    }

    fn solve_penalty(f: &Formula) -> SolveResult<BigRational> {
        let lp = lp_model::build_for_formula(f, CapacityMode::UnitCapped).unwrap();
        solve::<BigRational>(&lp, &SolverOptions::default()).unwrap()
    }

    #[test]
    fn decide_unsat_with_lowest_witness() {
        let f = unsat_full_n2();
        let cert = decide_from_solution(&solve_penalty(&f), &f).unwrap();
        match &cert {
            Certificate::Unsat {
                witness,
                path_out,
                path_back,
            } => {
                assert_eq!(*witness, 1);
                assert_eq!(path_out.first(), Some(&1));
                assert_eq!(path_out.last(), Some(&3));
                assert_eq!(path_back.first(), Some(&3));
                assert_eq!(path_back.last(), Some(&1));
            }
            _ => panic!("expected unsat"),
        }
        assert!(verify_certificate(&f, &cert));
    }

    #[test]
    fn decide_sat_single_clause() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let cert = decide_from_solution(&solve_penalty(&f), &f).unwrap();
        match &cert {
            Certificate::Sat { assignment } => assert!(f.is_satisfied_by(assignment)),
            _ => panic!("expected sat"),
        }
        assert!(verify_certificate(&f, &cert));
    }

    #[test]
    fn decide_sat_empty_formula() {
        let f = Formula::empty(2);
        let cert = decide_from_solution(&solve_penalty(&f), &f).unwrap();
        match &cert {
            // No implications, so the tie-break makes everything true.
            Certificate::Sat { assignment } => assert_eq!(assignment, &vec![true, true]),
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn assignment_propagates_forced_chain() {
        let f = Formula::from_dimacs_pairs(3, &[(-1, 2), (-2, 3)]).unwrap();
        let cert = decide_from_solution(&solve_penalty(&f), &f).unwrap();
        match &cert {
            Certificate::Sat { assignment } => {
                // Tie-break sets x1 true; x2, x3 follow by propagation.
                assert_eq!(assignment, &vec![true, true, true]);
                assert!(f.is_satisfied_by(assignment));
            }
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn extract_path_requires_routed_commodity() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let sol = solve_penalty(&f);
        assert!(extract_path(&sol, 1, 2).is_err());
    }

    #[test]
    fn extract_path_arcs_come_from_present_clauses() {
        let f = unsat_full_n2();
        let sol = solve_penalty(&f);
        for k in 1..=4u32 {
            let path = extract_path(&sol, k, 2).unwrap();
            for w in path.windows(2) {
                let tail = Literal::new(w[0], 2).unwrap();
                let head = Literal::new(w[1], 2).unwrap();
                let clause = clause_of_arc(tail, head, 2).unwrap().unwrap();
                assert!(f.contains(&clause));
            }
        }
    }

    #[test]
    fn non_integral_solution_is_a_decode_error() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let mut sol = solve_penalty(&f);
        sol.primal[0] = BigRational::new(1.into(), 2.into());
        assert!(matches!(
            decide_from_solution(&sol, &f),
            Err(Error::Decode(_))
        ));
    }

    #[test]
    fn verify_rejects_tampered_certificates() {
        let f = unsat_full_n2();
        let cert = decide_from_solution(&solve_penalty(&f), &f).unwrap();
        if let Certificate::Unsat {
            witness,
            mut path_out,
            path_back,
        } = cert
        {
            // A direct flip arc comes from no clause: invalid chain.
            path_out = vec![witness, witness + 2];
            let bad = Certificate::Unsat {
                witness,
                path_out,
                path_back,
            };
            assert!(!verify_certificate(&f, &bad));
        }
        let bad_sat = Certificate::Sat {
            assignment: vec![false, false],
        };
        assert!(!verify_certificate(&f, &bad_sat));

        let f2 = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        assert!(!verify_certificate(
            &f2,
            &Certificate::Sat {
                assignment: vec![false, false]
            }
        ));
        assert!(verify_certificate(
            &f2,
            &Certificate::Sat {
                assignment: vec![true, false]
            }
        ));
    }

    #[test]
    fn certificate_text_round_trip() {
        let sat = Certificate::Sat {
            assignment: vec![true, false, true],
        };
        assert_eq!(Certificate::parse(&sat.to_text(3)).unwrap(), sat);
        let unsat = Certificate::Unsat {
            witness: 1,
            path_out: vec![1, 2, 3],
            path_back: vec![3, 4, 1],
        };
        assert_eq!(Certificate::parse(&unsat.to_text(2)).unwrap(), unsat);
    }
}
