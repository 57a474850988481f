//! The explicit multicommodity-flow LP.
//!
//! For `n` variables the network has `2n` literal vertices plus a terminal
//! pair per commodity. Commodity `k` (one per literal) wants to route one
//! unit from literal `k` to its negation. Per commodity and literal vertex
//! there is one flow-conservation equality, giving `4n^2` rows over
//! `8n^3 - 4n^2 + 4n` variables: a bounded source variable and a sink
//! variable per commodity plus one variable per commodity and ordered vertex
//! pair.
//!
//! A formula enters through the objective: every arc whose originating
//! clause is absent is penalized by `-(2n+1)`, so optima use only arcs the
//! formula provides. Arcs from a literal straight to its negation have no
//! originating two-literal clause at all and are therefore always penalized
//! (or fixed to zero in face mode).

use crate::formula::{Clause, Formula, Literal};
use crate::{Error, Result};

/// One LP column: a flow variable of commodity `k`.
///
/// `Source(k)` is the flow on the terminal edge into literal vertex `k`
/// (capacity one); `Sink(k)` the flow on the terminal edge out of vertex
/// `negate(k)`; `Arc(k, i, j)` the commodity-`k` flow on the literal arc
/// `i -> j`. All of `k`, `i`, `j` are literal codes in `[1, 2n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowVar {
    Source { k: u32 },
    Sink { k: u32 },
    Arc { k: u32, tail: u32, head: u32 },
}

/// Capacity regime for non-source variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMode {
    /// Only source variables are capped at one; everything else is free
    /// above. The feasible set then has unbounded circulation directions.
    PaperFaithful,
    /// Every variable is capped at one. Same optimal values, bounded
    /// region; the solver default.
    UnitCapped,
}

/// Sink vertex of commodity `k`: the negation of literal `k`.
pub fn sink_node(k: u32, n: u32) -> u32 {
    (k - 1 + n) % (2 * n) + 1
}

pub fn source_column(k: u32, n: u32) -> usize {
    debug_assert!(1 <= k && k <= 2 * n);
    (k - 1) as usize
}

pub fn sink_column(k: u32, n: u32) -> usize {
    debug_assert!(1 <= k && k <= 2 * n);
    (2 * n + k - 1) as usize
}

fn arc_offset(tail: u32, head: u32, n: u32) -> usize {
    debug_assert!(tail != head);
    let t = (tail - 1) as usize;
    let h = if head > tail { head - 2 } else { head - 1 } as usize;
    t * (2 * n as usize - 1) + h
}

pub fn arc_column(k: u32, tail: u32, head: u32, n: u32) -> usize {
    let per_commodity = 2 * n as usize * (2 * n as usize - 1);
    4 * n as usize + (k - 1) as usize * per_commodity + arc_offset(tail, head, n)
}

/// Conservation row index for commodity `k` at literal vertex `i`
/// (commodity-major).
pub fn row_index(k: u32, i: u32, n: u32) -> usize {
    ((k - 1) * 2 * n + (i - 1)) as usize
}

/// Closed-form sizes of the paper-faithful LP:
/// (variables, equalities, inequalities).
pub fn counts(n: u32) -> (usize, usize, usize) {
    let n = n as usize;
    let vars = 8 * n * n * n - 4 * n * n + 4 * n;
    let eqs = 4 * n * n;
    let ineqs = 8 * n * n * n - 4 * n * n + 6 * n;
    (vars, eqs, ineqs)
}

/// A sparse LP: equality rows (rhs zero for flow instances), per-variable
/// bounds `[0, upper]`, and a maximization objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpInstance {
    pub n: u32,
    pub capacity: CapacityMode,
    /// `None` for the monolithic LP; `Some(k)` for a single-commodity slice.
    pub commodity: Option<u32>,
    pub num_vars: usize,
    /// Sparse equality rows; coefficients are always -1 or +1.
    pub rows: Vec<Vec<(u32, i8)>>,
    pub rhs: Vec<i64>,
    /// Upper bound per variable; `None` means unbounded. Lower bounds are 0.
    pub upper: Vec<Option<i64>>,
    pub objective: Vec<i64>,
}

impl LpInstance {
    pub fn equality_count(&self) -> usize {
        self.rows.len()
    }

    /// Lower bounds plus finite upper bounds. Matches `8n^3 - 4n^2 + 6n` for
    /// a paper-faithful build.
    pub fn inequality_count(&self) -> usize {
        self.num_vars + self.upper.iter().filter(|u| u.is_some()).count()
    }

    /// The flow variable behind a column index.
    pub fn var_of_column(&self, col: usize) -> FlowVar {
        let n = self.n;
        match self.commodity {
            None => {
                let tn = 2 * n as usize;
                if col < tn {
                    FlowVar::Source { k: col as u32 + 1 }
                } else if col < 2 * tn {
                    FlowVar::Sink {
                        k: (col - tn) as u32 + 1,
                    }
                } else {
                    let per = tn * (tn - 1);
                    let rest = col - 2 * tn;
                    let k = (rest / per) as u32 + 1;
                    let off = rest % per;
                    let tail = (off / (tn - 1)) as u32 + 1;
                    let h = (off % (tn - 1)) as u32;
                    let head = if h + 1 >= tail { h + 2 } else { h + 1 };
                    FlowVar::Arc { k, tail, head }
                }
            }
            Some(k) => {
                let tn = 2 * n as usize;
                match col {
                    0 => FlowVar::Source { k },
                    1 => FlowVar::Sink { k },
                    _ => {
                        let off = col - 2;
                        let tail = (off / (tn - 1)) as u32 + 1;
                        let h = (off % (tn - 1)) as u32;
                        let head = if h + 1 >= tail { h + 2 } else { h + 1 };
                        FlowVar::Arc { k, tail, head }
                    }
                }
            }
        }
    }

    /// Column index of a flow variable, if it belongs to this instance.
    pub fn column_of_var(&self, v: FlowVar) -> Option<usize> {
        let n = self.n;
        match self.commodity {
            None => Some(match v {
                FlowVar::Source { k } => source_column(k, n),
                FlowVar::Sink { k } => sink_column(k, n),
                FlowVar::Arc { k, tail, head } => arc_column(k, tail, head, n),
            }),
            Some(kc) => match v {
                FlowVar::Source { k } if k == kc => Some(0),
                FlowVar::Sink { k } if k == kc => Some(1),
                FlowVar::Arc { k, tail, head } if k == kc => Some(2 + arc_offset(tail, head, n)),
                _ => None,
            },
        }
    }
}

/// Build the flow LP for `n` variables with a zero objective.
pub fn build(n: u32, cap: CapacityMode) -> Result<LpInstance> {
    if n < 2 {
        return Err(Error::domain(format!(
            "flow LP needs n >= 2, got {n}"
        )));
    }
    let (num_vars, num_rows, _) = counts(n);
    let tn = 2 * n;

    let mut rows = Vec::with_capacity(num_rows);
    for k in 1..=tn {
        for i in 1..=tn {
            let mut row: Vec<(u32, i8)> = Vec::with_capacity(tn as usize * 2);
            if i == k {
                row.push((source_column(k, n) as u32, 1));
            }
            for j in 1..=tn {
                if j != i {
                    row.push((arc_column(k, j, i, n) as u32, 1)); // inflow j -> i
                    row.push((arc_column(k, i, j, n) as u32, -1)); // outflow i -> j
                }
            }
            if i == sink_node(k, n) {
                row.push((sink_column(k, n) as u32, -1));
            }
            row.sort_unstable_by_key(|&(c, _)| c);
            rows.push(row);
        }
    }

    let mut upper = vec![
        match cap {
            CapacityMode::PaperFaithful => None,
            CapacityMode::UnitCapped => Some(1),
        };
        num_vars
    ];
    for k in 1..=tn {
        upper[source_column(k, n)] = Some(1);
    }

    Ok(LpInstance {
        n,
        capacity: cap,
        commodity: None,
        num_vars,
        rows,
        rhs: vec![0; num_rows],
        upper,
        objective: vec![0; num_vars],
    })
}

/// The clause whose implication the arc `tail -> head` carries:
/// `{negate(tail), head}`. `None` when that pair degenerates to a single
/// literal (the direct literal-to-negation arcs), which no two-literal
/// clause produces.
pub fn clause_of_arc(tail: Literal, head: Literal, n: u32) -> Result<Option<Clause>> {
    if tail.code() == head.code() {
        return Err(Error::domain("arc endpoints must differ"));
    }
    let a = tail.negate(n)?;
    if head.code() > 2 * n {
        return Err(Error::domain("arc head out of range"));
    }
    if a.code() == head.code() {
        return Ok(None);
    }
    Ok(Some(Clause::new(a, head, n).expect(
        "pair with distinct literals and head != tail cannot be tautological",
    )))
}

fn arc_is_free(tail: u32, head: u32, f: &Formula) -> bool {
    let n = f.n();
    let t = Literal::new(tail, n).expect("arc tail in range");
    let h = Literal::new(head, n).expect("arc head in range");
    match clause_of_arc(t, h, n).expect("endpoints differ") {
        Some(c) => f.contains(&c),
        None => false,
    }
}

/// The penalty objective for `f`: +1 on every source, `-(2n+1)` on every arc
/// whose clause is missing from `f` (direct flip arcs included).
pub fn build_objective(f: &Formula, lp: &LpInstance) -> Result<Vec<i64>> {
    if f.n() != lp.n {
        return Err(Error::domain(format!(
            "formula has n = {} but LP was built for n = {}",
            f.n(),
            lp.n
        )));
    }
    if lp.commodity.is_some() {
        return Err(Error::domain("objective construction needs the monolithic LP"));
    }
    let n = lp.n;
    let tn = 2 * n;
    let penalty = -((2 * n as i64) + 1);
    let mut obj = vec![0i64; lp.num_vars];
    for k in 1..=tn {
        obj[source_column(k, n)] = 1;
    }
    for tail in 1..=tn {
        for head in 1..=tn {
            if tail == head || arc_is_free(tail, head, f) {
                continue;
            }
            for k in 1..=tn {
                obj[arc_column(k, tail, head, n)] = penalty;
            }
        }
    }
    Ok(obj)
}

/// Build plus objective in one step.
pub fn build_for_formula(f: &Formula, cap: CapacityMode) -> Result<LpInstance> {
    let mut lp = build(f.n(), cap)?;
    lp.objective = build_objective(f, &lp)?;
    Ok(lp)
}

/// Restrict to the face of `f`: upper bound 0 on every arc whose clause is
/// missing, and the plain sum-of-sources objective (no penalties needed).
pub fn apply_face_fixing(lp: &LpInstance, f: &Formula) -> Result<LpInstance> {
    if f.n() != lp.n {
        return Err(Error::domain(format!(
            "formula has n = {} but LP was built for n = {}",
            f.n(),
            lp.n
        )));
    }
    if lp.commodity.is_some() {
        return Err(Error::domain("face fixing needs the monolithic LP"));
    }
    let n = lp.n;
    let tn = 2 * n;
    let mut fixed = lp.clone();
    for tail in 1..=tn {
        for head in 1..=tn {
            if tail == head || arc_is_free(tail, head, f) {
                continue;
            }
            for k in 1..=tn {
                fixed.upper[arc_column(k, tail, head, n)] = Some(0);
            }
        }
    }
    let mut obj = vec![0i64; lp.num_vars];
    for k in 1..=tn {
        obj[source_column(k, n)] = 1;
    }
    fixed.objective = obj;
    Ok(fixed)
}

/// Split the monolithic LP into its `2n` independent single-commodity LPs.
/// The objective has no cross-commodity terms, so the sub-optima sum to the
/// monolithic optimum.
pub fn decompose(lp: &LpInstance) -> Result<Vec<LpInstance>> {
    let n = lp.n;
    let (expect_vars, expect_rows, _) = counts(n);
    if lp.commodity.is_some() || lp.num_vars != expect_vars || lp.rows.len() != expect_rows {
        return Err(Error::domain(
            "decompose expects the monolithic flow LP (foreign rows present)",
        ));
    }
    let tn = 2 * n;
    let sub_vars = 2 + (tn as usize) * (tn as usize - 1);
    let mut subs = Vec::with_capacity(tn as usize);
    for k in 1..=tn {
        let mut rows = Vec::with_capacity(tn as usize);
        for i in 1..=tn {
            let global = &lp.rows[row_index(k, i, n)];
            let mut row = Vec::with_capacity(global.len());
            for &(col, coef) in global {
                let var = lp.var_of_column(col as usize);
                let local = match var {
                    FlowVar::Source { k: vk } | FlowVar::Sink { k: vk } => {
                        if vk != k {
                            return Err(Error::domain("row references a foreign commodity"));
                        }
                        if matches!(var, FlowVar::Source { .. }) {
                            0
                        } else {
                            1
                        }
                    }
                    FlowVar::Arc { k: vk, tail, head } => {
                        if vk != k {
                            return Err(Error::domain("row references a foreign commodity"));
                        }
                        2 + arc_offset(tail, head, n)
                    }
                };
                row.push((local as u32, coef));
            }
            row.sort_unstable_by_key(|&(c, _)| c);
            rows.push(row);
        }
        let mut upper = vec![None; sub_vars];
        let mut objective = vec![0i64; sub_vars];
        let sub_proto = LpInstance {
            n,
            capacity: lp.capacity,
            commodity: Some(k),
            num_vars: sub_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
        };
        for local in 0..sub_vars {
            let var = sub_proto.var_of_column(local);
            let global = lp.column_of_var(var).expect("monolithic holds every var");
            upper[local] = lp.upper[global];
            objective[local] = lp.objective[global];
        }
        subs.push(LpInstance {
            n,
            capacity: lp.capacity,
            commodity: Some(k),
            num_vars: sub_vars,
            rows,
            rhs: vec![0; tn as usize],
            upper,
            objective,
        });
    }
    Ok(subs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    #[test]
    fn counts_closed_forms() {
        assert_eq!(counts(2), (56, 16, 60));
        assert_eq!(counts(3), (192, 36, 198));
        assert_eq!(counts(10), (7640, 400, 7660));
    }

    #[test]
    fn build_matches_counts() {
        for n in 2..=6u32 {
            let lp = build(n, CapacityMode::PaperFaithful).unwrap();
            let (vars, eqs, ineqs) = counts(n);
            assert_eq!(lp.num_vars, vars);
            assert_eq!(lp.equality_count(), eqs);
            assert_eq!(lp.inequality_count(), ineqs);
        }
        assert!(build(1, CapacityMode::UnitCapped).is_err());
    }

    #[test]
    fn column_bijection_round_trips() {
        for n in 2..=4u32 {
            let lp = build(n, CapacityMode::UnitCapped).unwrap();
            for col in 0..lp.num_vars {
                let var = lp.var_of_column(col);
                assert_eq!(lp.column_of_var(var), Some(col));
            }
        }
    }

    #[test]
    fn rows_are_incidence_structured() {
        // Per commodity: each arc appears once +1 (at its head) and once -1
        // (at its tail); the source appears once +1, the sink once -1.
        for n in 2..=6u32 {
            let lp = build(n, CapacityMode::UnitCapped).unwrap();
            let mut appearances = vec![Vec::new(); lp.num_vars];
            for (r, row) in lp.rows.iter().enumerate() {
                for &(col, coef) in row {
                    assert!(coef == 1 || coef == -1);
                    appearances[col as usize].push((r, coef));
                }
            }
            for col in 0..lp.num_vars {
                let app = &appearances[col];
                assert!(app.len() <= 2, "variable in more than two rows");
                match lp.var_of_column(col) {
                    FlowVar::Source { .. } => {
                        assert_eq!(app.len(), 1);
                        assert_eq!(app[0].1, 1);
                    }
                    FlowVar::Sink { .. } => {
                        assert_eq!(app.len(), 1);
                        assert_eq!(app[0].1, -1);
                    }
                    FlowVar::Arc { .. } => {
                        assert_eq!(app.len(), 2);
                        let coefs: Vec<i8> = app.iter().map(|&(_, c)| c).collect();
                        assert!(coefs.contains(&1) && coefs.contains(&-1));
                    }
                }
            }
        }
    }

    #[test]
    fn clause_of_arc_examples() {
        let n = 2;
        let l = |c: u32| Literal::new(c, n).unwrap();
        // not-x1 -> x2 carries clause (x1 or x2)
        let c = clause_of_arc(l(3), l(2), n).unwrap().unwrap();
        assert_eq!((c.lo().code(), c.hi().code()), (1, 2));
        // x1 -> x2 carries clause (not-x1 or x2)
        let c = clause_of_arc(l(1), l(2), n).unwrap().unwrap();
        assert_eq!((c.lo().code(), c.hi().code()), (2, 3));
        // not-x1 -> x1 degenerates
        assert!(clause_of_arc(l(3), l(1), n).unwrap().is_none());
        assert!(clause_of_arc(l(1), l(1), n).is_err());
    }

    #[test]
    fn objective_empty_formula_penalizes_every_arc() {
        let f = Formula::empty(2);
        let lp = build(2, CapacityMode::UnitCapped).unwrap();
        let obj = build_objective(&f, &lp).unwrap();
        for col in 0..lp.num_vars {
            match lp.var_of_column(col) {
                FlowVar::Source { .. } => assert_eq!(obj[col], 1),
                FlowVar::Sink { .. } => assert_eq!(obj[col], 0),
                FlowVar::Arc { .. } => assert_eq!(obj[col], -5),
            }
        }
    }

    #[test]
    fn objective_full_formula_penalizes_only_flip_arcs() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]).unwrap();
        let lp = build(2, CapacityMode::UnitCapped).unwrap();
        let obj = build_objective(&f, &lp).unwrap();
        for col in 0..lp.num_vars {
            if let FlowVar::Arc { tail, head, .. } = lp.var_of_column(col) {
                let flip = (tail + 2 - 1) % 4 + 1 == head;
                if flip {
                    assert_eq!(obj[col], -5, "flip arc {tail}->{head} must be penalized");
                } else {
                    assert_eq!(obj[col], 0, "clause arc {tail}->{head} must be free");
                }
            }
        }
    }

    #[test]
    fn objective_penalty_tracks_missing_clause() {
        // Arc x1 -> x2 comes from clause (not-x1 or x2): penalized iff missing.
        let with = Formula::from_dimacs_pairs(2, &[(-1, 2)]).unwrap();
        let without = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let lp = build(2, CapacityMode::UnitCapped).unwrap();
        let col = arc_column(1, 1, 2, 2);
        assert_eq!(build_objective(&with, &lp).unwrap()[col], 0);
        assert_eq!(build_objective(&without, &lp).unwrap()[col], -5);
    }

    #[test]
    fn objective_rejects_mismatched_n() {
        let f = Formula::empty(3);
        let lp = build(2, CapacityMode::UnitCapped).unwrap();
        assert!(build_objective(&f, &lp).is_err());
    }

    #[test]
    fn face_fixing_empty_formula_fixes_all_arcs() {
        let f = Formula::empty(2);
        let lp = build(2, CapacityMode::UnitCapped).unwrap();
        let fixed = apply_face_fixing(&lp, &f).unwrap();
        for col in 0..fixed.num_vars {
            match fixed.var_of_column(col) {
                FlowVar::Arc { .. } => assert_eq!(fixed.upper[col], Some(0)),
                FlowVar::Source { .. } => {
                    assert_eq!(fixed.upper[col], Some(1));
                    assert_eq!(fixed.objective[col], 1);
                }
                FlowVar::Sink { .. } => assert_eq!(fixed.upper[col], Some(1)),
            }
        }
    }

    #[test]
    fn face_fixing_full_formula_keeps_clause_arcs() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]).unwrap();
        let lp = build(2, CapacityMode::UnitCapped).unwrap();
        let fixed = apply_face_fixing(&lp, &f).unwrap();
        for col in 0..fixed.num_vars {
            if let FlowVar::Arc { tail, head, .. } = fixed.var_of_column(col) {
                let flip = (tail + 2 - 1) % 4 + 1 == head;
                assert_eq!(fixed.upper[col], Some(if flip { 0 } else { 1 }));
            }
        }
    }

    #[test]
    fn decompose_shapes_and_objective_split() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let lp = build_for_formula(&f, CapacityMode::UnitCapped).unwrap();
        let subs = decompose(&lp).unwrap();
        assert_eq!(subs.len(), 4);
        let mut total_obj_terms = 0usize;
        for sub in &subs {
            assert_eq!(sub.num_vars, 14);
            assert_eq!(sub.rows.len(), 4);
            for local in 0..sub.num_vars {
                let var = sub.var_of_column(local);
                let global = lp.column_of_var(var).unwrap();
                assert_eq!(sub.objective[local], lp.objective[global]);
                assert_eq!(sub.upper[local], lp.upper[global]);
            }
            total_obj_terms += sub.objective.iter().filter(|&&c| c != 0).count();
        }
        assert_eq!(
            total_obj_terms,
            lp.objective.iter().filter(|&&c| c != 0).count()
        );
        // A sub-LP is not decomposable again.
        assert!(decompose(&subs[0]).is_err());
    }
}
