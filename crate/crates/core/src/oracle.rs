//! Desk-scale ground truth: exhaustive satisfiability oracles and an
//! explicit vertex model of the hull of (formula, satisfying assignment)
//! pairs.
//!
//! The hull is only ever represented by its vertex list; a linear objective
//! over a polytope peaks at a vertex, so maximizing over the enumeration is
//! the LP oracle at this scale. Enumeration is capped at n = 3, where the
//! non-tautological universe has 12 slots and the candidate space is
//! 4096 * 8 pairs.

use num::BigRational;

use crate::certificate::{Certificate, Verdict};
use crate::formula::{clause_universe, universe_size, Formula, FormulaIndicator};
use crate::implication::unsat_witness;
use crate::{Error, Result};

/// Hard cap for hull enumeration.
pub const MAX_HULL_N: u32 = 3;
/// Hard cap for the 2^n brute-force oracles.
pub const MAX_BRUTE_N: u32 = 24;

/// One hull vertex: a satisfiable formula's indicator together with one of
/// its satisfying assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullVertex {
    pub indicator: FormulaIndicator,
    pub assignment: Vec<bool>,
}

/// Integer weights for the maximum-weight variant; `total` is the sum of
/// absolute weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSpec {
    weights: Vec<i64>,
}

impl WeightSpec {
    pub fn new(weights: Vec<i64>) -> Self {
        WeightSpec { weights }
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn total(&self) -> i64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }
}

/// Outcome of the weighted brute-force oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightedOutcome {
    Satisfiable { weight: i64, assignment: Vec<bool> },
    Unsatisfiable,
}

/// Shared bit conventions: assignments are masks whose numeric order is the
/// lexicographic order of (x_1, ..., x_n) with false < true, i.e. x_i is bit
/// (n - i).
fn assignment_bit(mask: u32, i: u32, n: u32) -> bool {
    mask >> (n - i) & 1 == 1
}

fn assignment_vec(mask: u32, n: u32) -> Vec<bool> {
    (1..=n).map(|i| assignment_bit(mask, i, n)).collect()
}

/// Per-universe-slot data for the fast enumeration loops.
struct SlotTable {
    n: u32,
    /// Universe slot index of each usable (non-tautological) slot.
    usable_slots: Vec<usize>,
    /// For each usable slot, the set of assignment masks FALSIFYING it,
    /// as a bitset over masks.
    falsified_by: Vec<u32>,
}

impl SlotTable {
    fn build(n: u32) -> Self {
        let mut usable_slots = Vec::new();
        let mut falsified_by = Vec::new();
        for (idx, slot) in clause_universe(n).into_iter().enumerate() {
            if slot.is_tautology(n) {
                continue;
            }
            let mut fal = 0u32;
            for mask in 0..1u32 << n {
                let a = assignment_vec(mask, n);
                let lo_true = slot.lo.is_true_under(&a, n);
                let hi_true = slot.hi.is_true_under(&a, n);
                if !lo_true && !hi_true {
                    fal |= 1 << mask;
                }
            }
            usable_slots.push(idx);
            falsified_by.push(fal);
        }
        SlotTable {
            n,
            usable_slots,
            falsified_by,
        }
    }

    fn usable_count(&self) -> usize {
        self.usable_slots.len()
    }

    /// Assignment masks satisfying the formula selected by `fmask` (a bitmask
    /// over usable slots), as a bitset over masks.
    fn satisfying_set(&self, fmask: u32) -> u32 {
        let count = 1u32 << self.n;
        let all = if count >= 32 {
            u32::MAX
        } else {
            (1u32 << count) - 1
        };
        let mut falsified = 0u32;
        let mut rest = fmask;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            falsified |= self.falsified_by[s];
            rest &= rest - 1;
        }
        all & !falsified
    }

    /// Full-universe indicator mask of the formula selected by `fmask`.
    fn full_mask(&self, fmask: u32) -> u64 {
        let mut full = 0u64;
        let mut rest = fmask;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            full |= 1u64 << self.usable_slots[s];
            rest &= rest - 1;
        }
        full
    }

    fn vertex(&self, fmask: u32, amask: u32) -> HullVertex {
        let mut bits = vec![false; universe_size(self.n)];
        let mut rest = fmask;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            bits[self.usable_slots[s]] = true;
            rest &= rest - 1;
        }
        HullVertex {
            indicator: FormulaIndicator::from_bits(self.n, bits).expect("universe-sized bits"),
            assignment: assignment_vec(amask, self.n),
        }
    }
}

fn check_hull_cap(n: u32) -> Result<()> {
    if n > MAX_HULL_N {
        let slots = 2 * (n as u64) * (n as u64) - 2 * n as u64;
        return Err(Error::TooLarge(format!(
            "hull enumeration is capped at n = {MAX_HULL_N}; n = {n} would mean \
             2^{slots} formulas times 2^{n} assignments"
        )));
    }
    Ok(())
}

/// Every (satisfiable formula, satisfying assignment) pair over the
/// non-tautological universe, in deterministic (formula mask, assignment
/// mask) order.
pub fn enumerate_hull_vertices(n: u32) -> Result<impl Iterator<Item = HullVertex>> {
    check_hull_cap(n)?;
    if n == 0 {
        return Err(Error::domain("variable count must be positive"));
    }
    let table = SlotTable::build(n);
    let formulas = 1u32 << table.usable_count();
    let assignments = 1u32 << n;
    let mut fmask = 0u32;
    let mut sat_set = table.satisfying_set(0);
    let mut amask = 0u32;
    Ok(std::iter::from_fn(move || loop {
        if fmask >= formulas {
            return None;
        }
        while amask < assignments {
            let a = amask;
            amask += 1;
            if sat_set >> a & 1 == 1 {
                return Some(table.vertex(fmask, a));
            }
        }
        fmask += 1;
        amask = 0;
        if fmask < formulas {
            sat_set = table.satisfying_set(fmask);
        }
    }))
}

/// Decide satisfiability by one linear optimization over the enumerated
/// hull: objective +1 on the formula's own clause coordinates, -1 on every
/// other clause coordinate. The optimum hits the clause count exactly when
/// the formula is satisfiable and falls at least one short otherwise.
pub fn decide_by_hull_lp(f: &Formula) -> Result<(i64, HullVertex, Verdict)> {
    let n = f.n();
    check_hull_cap(n)?;
    let table = SlotTable::build(n);
    let yf = f
        .to_indicator()
        .as_mask()
        .expect("capped universes fit in 64 bits");
    let m = f.clause_count() as i64;

    let mut best: Option<(i64, u32, u32)> = None;
    for fmask in 0..1u32 << table.usable_count() {
        let sat_set = table.satisfying_set(fmask);
        if sat_set == 0 {
            continue;
        }
        let y = table.full_mask(fmask);
        let z = 2 * (y & yf).count_ones() as i64 - y.count_ones() as i64;
        if best.as_ref().map_or(true, |&(zb, _, _)| z > zb) {
            best = Some((z, fmask, sat_set.trailing_zeros()));
        }
    }
    let (z, fmask, amask) = best.expect("the empty formula is always satisfiable");
    let verdict = if z == m {
        Verdict::Sat
    } else {
        debug_assert!(z <= m - 1);
        Verdict::Unsat
    };
    Ok((z, table.vertex(fmask, amask), verdict))
}

/// The weighted variant: maximize `c.y + w.x / (3W)` over the hull. The
/// optimum lands at or above `m - 1/3` exactly when satisfiable and at or
/// below `m - 2/3` otherwise; in the satisfiable case the maximizing
/// assignment has maximum weight. Comparisons are exact: the value is
/// carried as an integer scaled by `3W`.
pub fn max_weight_by_hull_lp(
    f: &Formula,
    w: &WeightSpec,
) -> Result<(BigRational, Option<Vec<bool>>, Verdict)> {
    let n = f.n();
    check_hull_cap(n)?;
    if w.weights().len() != n as usize {
        return Err(Error::domain(format!(
            "weight vector has length {}, formula has n = {n}",
            w.weights().len()
        )));
    }
    let big_w = w.total();
    if big_w == 0 {
        // Degenerate weights: fall back to the unweighted reduction.
        let (z, vertex, verdict) = decide_by_hull_lp(f)?;
        let x = match verdict {
            Verdict::Sat => Some(vertex.assignment),
            Verdict::Unsat => None,
        };
        return Ok((BigRational::from_integer(z.into()), x, verdict));
    }

    let table = SlotTable::build(n);
    let yf = f
        .to_indicator()
        .as_mask()
        .expect("capped universes fit in 64 bits");
    let m = f.clause_count() as i64;
    let scale = 3 * big_w;

    let weight_of = |amask: u32| -> i64 {
        (1..=n)
            .map(|i| {
                if assignment_bit(amask, i, n) {
                    w.weights()[(i - 1) as usize]
                } else {
                    0
                }
            })
            .sum()
    };

    let mut best: Option<(i64, u32, u32)> = None;
    for fmask in 0..1u32 << table.usable_count() {
        let sat_set = table.satisfying_set(fmask);
        if sat_set == 0 {
            continue;
        }
        let y = table.full_mask(fmask);
        let cy = 2 * (y & yf).count_ones() as i64 - y.count_ones() as i64;
        for amask in 0..1u32 << n {
            if sat_set >> amask & 1 == 0 {
                continue;
            }
            let scaled = scale * cy + weight_of(amask);
            if best.as_ref().map_or(true, |&(zb, _, _)| scaled > zb) {
                best = Some((scaled, fmask, amask));
            }
        }
    }
    let (scaled, _, amask) = best.expect("the empty formula is always satisfiable");

    // Thresholds scaled by 3W: Sat at or above 3Wm - W, Unsat at or below
    // 3Wm - 2W. The gap between them is empty.
    let zstar = BigRational::new(scaled.into(), scale.into());
    if scaled >= scale * m - big_w {
        Ok((zstar, Some(assignment_vec(amask, n)), Verdict::Sat))
    } else if scaled <= scale * m - 2 * big_w {
        Ok((zstar, None, Verdict::Unsat))
    } else {
        Err(Error::Internal(format!(
            "weighted optimum {zstar} falls inside the forbidden dichotomy gap"
        )))
    }
}

fn check_brute_cap(n: u32) -> Result<()> {
    if n > MAX_BRUTE_N {
        return Err(Error::TooLarge(format!(
            "brute force is capped at n = {MAX_BRUTE_N}; got n = {n}"
        )));
    }
    Ok(())
}

fn satisfies_mask(f: &Formula, mask: u32) -> bool {
    let n = f.n();
    f.clauses().iter().all(|c| {
        let lo = c.lo().code();
        let hi = c.hi().code();
        let lit_true = |code: u32| {
            if code <= n {
                assignment_bit(mask, code, n)
            } else {
                !assignment_bit(mask, code - n, n)
            }
        };
        lit_true(lo) || lit_true(hi)
    })
}

/// Exhaustive satisfiability: the lexicographically first satisfying
/// assignment, or an unsatisfiability witness from the implication graph.
pub fn brute_force_sat(f: &Formula) -> Result<Certificate> {
    check_brute_cap(f.n())?;
    let n = f.n();
    for mask in 0..1u64 << n {
        if satisfies_mask(f, mask as u32) {
            return Ok(Certificate::Sat {
                assignment: assignment_vec(mask as u32, n),
            });
        }
    }
    unsat_witness(f).ok_or_else(|| {
        Error::Internal("brute force found no assignment yet no witness exists".into())
    })
}

/// Exhaustive maximum-weight satisfying assignment; ties go to the
/// lexicographically first assignment.
pub fn brute_force_weighted(f: &Formula, w: &WeightSpec) -> Result<WeightedOutcome> {
    check_brute_cap(f.n())?;
    let n = f.n();
    if w.weights().len() != n as usize {
        return Err(Error::domain(format!(
            "weight vector has length {}, formula has n = {n}",
            w.weights().len()
        )));
    }
    let mut best: Option<(i64, u32)> = None;
    for mask in 0..1u64 << n {
        let mask = mask as u32;
        if !satisfies_mask(f, mask) {
            continue;
        }
        let weight: i64 = (1..=n)
            .map(|i| {
                if assignment_bit(mask, i, n) {
                    w.weights()[(i - 1) as usize]
                } else {
                    0
                }
            })
            .sum();
        if best.as_ref().map_or(true, |&(bw, _)| weight > bw) {
            best = Some((weight, mask));
        }
    }
    Ok(match best {
        Some((weight, mask)) => WeightedOutcome::Satisfiable {
            weight,
            assignment: assignment_vec(mask, n),
        },
        None => WeightedOutcome::Unsatisfiable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    fn unsat_full_n2() -> Formula {
        Formula::from_dimacs_pairs(2, &[(1, 2), (1, -2), (-1, 2), (-1, -2)]).unwrap()
    }

    #[test]
    fn hull_n1_has_two_vertices() {
        let vertices: Vec<_> = enumerate_hull_vertices(1).unwrap().collect();
        assert_eq!(vertices.len(), 2);
        for v in &vertices {
            assert_eq!(v.indicator.popcount(), 0);
            assert_eq!(v.indicator.len(), 1);
        }
        assert_eq!(vertices[0].assignment, vec![false]);
        assert_eq!(vertices[1].assignment, vec![true]);
    }

    #[test]
    fn hull_n2_count_matches_direct_enumeration() {
        // Independent count: for each of the 16 formulas, count satisfying
        // assignments with the Formula-level evaluator.
        let slots: Vec<_> = clause_universe(2)
            .into_iter()
            .filter(|s| !s.is_tautology(2))
            .collect();
        let mut expected = 0usize;
        for fmask in 0..16u32 {
            let clauses: Vec<_> = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| fmask >> i & 1 == 1)
                .map(|(_, s)| s.to_clause(2).unwrap())
                .collect();
            let f = Formula::new(2, clauses).unwrap();
            for amask in 0..4u32 {
                let a = assignment_vec(amask, 2);
                if f.is_satisfied_by(&a) {
                    expected += 1;
                }
            }
        }
        let got = enumerate_hull_vertices(2).unwrap().count();
        assert_eq!(got, expected);
    }

    #[test]
    fn hull_vertices_are_consistent_pairs() {
        for v in enumerate_hull_vertices(2).unwrap() {
            // Rebuild the formula from the indicator and check the pair.
            let clauses: Vec<_> = clause_universe(2)
                .into_iter()
                .enumerate()
                .filter(|(i, _)| v.indicator.bits()[*i])
                .map(|(_, s)| s.to_clause(2).unwrap())
                .collect();
            let f = Formula::new(2, clauses).unwrap();
            assert!(f.is_satisfied_by(&v.assignment));
        }
    }

    #[test]
    fn hull_cap_enforced() {
        assert!(matches!(
            enumerate_hull_vertices(4),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn unweighted_reduction_examples() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let (z, vertex, verdict) = decide_by_hull_lp(&f).unwrap();
        assert_eq!(z, 1);
        assert_eq!(verdict, Verdict::Sat);
        assert_eq!(vertex.indicator, f.to_indicator());

        let (z, _, verdict) = decide_by_hull_lp(&unsat_full_n2()).unwrap();
        assert!(z <= 3);
        assert_eq!(verdict, Verdict::Unsat);

        let (z, vertex, verdict) = decide_by_hull_lp(&Formula::empty(2)).unwrap();
        assert_eq!(z, 0);
        assert_eq!(verdict, Verdict::Sat);
        assert_eq!(vertex.indicator.popcount(), 0);
    }

    #[test]
    fn weighted_reduction_examples() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        let (_, x, verdict) = max_weight_by_hull_lp(&f, &WeightSpec::new(vec![1, -1])).unwrap();
        assert_eq!(verdict, Verdict::Sat);
        assert_eq!(x, Some(vec![true, false]));

        let (_, x, verdict) =
            max_weight_by_hull_lp(&unsat_full_n2(), &WeightSpec::new(vec![5, -3])).unwrap();
        assert_eq!(verdict, Verdict::Unsat);
        assert_eq!(x, None);

        // Zero weights fall back to the unweighted reduction.
        let (z, x, verdict) = max_weight_by_hull_lp(&f, &WeightSpec::new(vec![0, 0])).unwrap();
        assert_eq!(z, BigRational::from_integer(1.into()));
        assert_eq!(verdict, Verdict::Sat);
        assert!(x.is_some());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(
            brute_force_sat(&unsat_full_n2()).unwrap().verdict(),
            Verdict::Unsat
        );
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        match brute_force_sat(&f).unwrap() {
            Certificate::Sat { assignment } => {
                // Lexicographically first satisfying assignment: (F, T).
                assert_eq!(assignment, vec![false, true]);
            }
            _ => panic!("expected sat"),
        }
        match brute_force_sat(&Formula::empty(3)).unwrap() {
            Certificate::Sat { assignment } => assert_eq!(assignment, vec![false; 3]),
            _ => panic!("expected sat"),
        }
    }

    #[test]
    fn brute_force_weighted_examples() {
        let f = Formula::from_dimacs_pairs(2, &[(1, 2)]).unwrap();
        assert_eq!(
            brute_force_weighted(&f, &WeightSpec::new(vec![2, 3])).unwrap(),
            WeightedOutcome::Satisfiable {
                weight: 5,
                assignment: vec![true, true]
            }
        );
        assert_eq!(
            brute_force_weighted(&unsat_full_n2(), &WeightSpec::new(vec![1, 1])).unwrap(),
            WeightedOutcome::Unsatisfiable
        );
        assert_eq!(
            brute_force_weighted(&Formula::empty(2), &WeightSpec::new(vec![-4, -7])).unwrap(),
            WeightedOutcome::Satisfiable {
                weight: 0,
                assignment: vec![false, false]
            }
        );
    }

    #[test]
    fn hull_verdicts_match_brute_force_exhaustively_n2() {
        let slots: Vec<_> = clause_universe(2)
            .into_iter()
            .filter(|s| !s.is_tautology(2))
            .collect();
        for fmask in 0..16u32 {
            let clauses: Vec<_> = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| fmask >> i & 1 == 1)
                .map(|(_, s)| s.to_clause(2).unwrap())
                .collect();
            let f = Formula::new(2, clauses).unwrap();
            let (z, _, hull) = decide_by_hull_lp(&f).unwrap();
            let brute = brute_force_sat(&f).unwrap().verdict();
            assert_eq!(hull, brute, "fmask {fmask}");
            let m = f.clause_count() as i64;
            match hull {
                Verdict::Sat => assert_eq!(z, m),
                Verdict::Unsat => assert!(z <= m - 1),
            }
        }
    }
}
