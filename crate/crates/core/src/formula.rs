//! 2SAT formulas: literals, clauses, the clause universe, DIMACS I/O and
//! indicator vectors.
//!
//! Literals are coded `1..=2n`: codes `1..=n` are the positive literals
//! `x_1..x_n`, codes `n+1..=2n` are their negations. Negation is a shift by
//! `n` taken mod `2n`, so it is an involution. Clauses are unordered pairs of
//! distinct literals stored with the lower code first; tautologies
//! (`x or not-x`) are excluded.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// A literal, coded as an integer in `[1, 2n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal(u32);

impl Literal {
    pub fn new(code: u32, n: u32) -> Result<Self> {
        if code == 0 || code > 2 * n {
            return Err(Error::domain(format!(
                "literal code {code} out of range [1, {}]",
                2 * n
            )));
        }
        Ok(Literal(code))
    }

    pub fn code(self) -> u32 {
        self.0
    }

    /// 0-based vertex index of this literal in graphs and bit vectors.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    /// The complementary literal: code shifted by `n`, wrapped into `[1, 2n]`.
    pub fn negate(self, n: u32) -> Result<Self> {
        if self.0 == 0 || self.0 > 2 * n {
            return Err(Error::domain(format!(
                "literal code {} out of range [1, {}]",
                self.0,
                2 * n
            )));
        }
        Ok(if self.0 + n <= 2 * n {
            Literal(self.0 + n)
        } else {
            Literal(self.0 - n)
        })
    }

    /// True under `assignment` (truth value per variable, length `n`)?
    pub fn is_true_under(self, assignment: &[bool], n: u32) -> bool {
        if self.0 <= n {
            assignment[self.0 as usize - 1]
        } else {
            !assignment[(self.0 - n) as usize - 1]
        }
    }

    /// From a signed DIMACS literal: `v` means `x_v`, `-v` means its negation.
    pub fn from_dimacs(v: i64, n: u32) -> Result<Self> {
        let a = v.unsigned_abs();
        if v == 0 || a > n as u64 {
            return Err(Error::domain(format!(
                "dimacs literal {v} out of range for {n} variables"
            )));
        }
        Ok(if v > 0 {
            Literal(a as u32)
        } else {
            Literal(a as u32 + n)
        })
    }

    pub fn to_dimacs(self, n: u32) -> i64 {
        if self.0 <= n {
            self.0 as i64
        } else {
            -((self.0 - n) as i64)
        }
    }
}

/// An unordered pair of distinct, non-complementary literals, stored with
/// `lo.code() < hi.code()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    lo: Literal,
    hi: Literal,
}

impl Clause {
    pub fn new(a: Literal, b: Literal, n: u32) -> Result<Self> {
        if a.code() == 0 || a.code() > 2 * n || b.code() == 0 || b.code() > 2 * n {
            return Err(Error::domain("clause literal out of range".to_string()));
        }
        if a.code() == b.code() {
            return Err(Error::domain(
                "clause must contain two distinct literals".to_string(),
            ));
        }
        let (lo, hi) = if a.code() < b.code() { (a, b) } else { (b, a) };
        if hi.code() == lo.code() + n {
            return Err(Error::domain(format!(
                "tautological clause (x{0} or not x{0})",
                lo.code()
            )));
        }
        Ok(Clause { lo, hi })
    }

    pub fn lo(self) -> Literal {
        self.lo
    }

    pub fn hi(self) -> Literal {
        self.hi
    }

    pub fn is_satisfied_by(self, assignment: &[bool], n: u32) -> bool {
        self.lo.is_true_under(assignment, n) || self.hi.is_true_under(assignment, n)
    }

    /// The two implications forced by this clause: `not lo => hi` and
    /// `not hi => lo`, as (tail, head) literal pairs.
    pub fn implications(self, n: u32) -> [(Literal, Literal); 2] {
        let nl = self.lo.negate(n).expect("clause literal in range");
        let nh = self.hi.negate(n).expect("clause literal in range");
        [(nl, self.hi), (nh, self.lo)]
    }
}

/// One slot of the clause universe: an unordered pair of distinct literals,
/// tautological slots included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseSlot {
    pub lo: Literal,
    pub hi: Literal,
}

impl ClauseSlot {
    /// A slot is tautological exactly when `hi = lo + n`.
    pub fn is_tautology(self, n: u32) -> bool {
        self.hi.code() == self.lo.code() + n
    }

    /// The validated clause for a non-tautological slot.
    pub fn to_clause(self, n: u32) -> Result<Clause> {
        Clause::new(self.lo, self.hi, n)
    }
}

/// Number of slots in the clause universe: `2n^2 - n` unordered pairs.
pub fn universe_size(n: u32) -> usize {
    let n = n as usize;
    2 * n * n - n
}

/// Number of non-tautological slots: `2n^2 - 2n`.
pub fn usable_universe_size(n: u32) -> usize {
    let n = n as usize;
    2 * n * n - 2 * n
}

/// All clause slots in lexicographic order of (lo, hi) literal codes.
pub fn clause_universe(n: u32) -> Vec<ClauseSlot> {
    let mut slots = Vec::with_capacity(universe_size(n));
    for a in 1..=2 * n {
        for b in a + 1..=2 * n {
            slots.push(ClauseSlot {
                lo: Literal(a),
                hi: Literal(b),
            });
        }
    }
    debug_assert_eq!(slots.len(), universe_size(n));
    slots
}

/// Lexicographic index of the slot `{lo, hi}` in [`clause_universe`].
pub fn slot_index(lo: Literal, hi: Literal, n: u32) -> usize {
    debug_assert!(lo.code() < hi.code() && hi.code() <= 2 * n);
    let (a, b, tn) = (lo.code() as usize, hi.code() as usize, 2 * n as usize);
    // Slots with first code < a, then offset inside the block of first code a.
    (a - 1) * tn - (a - 1) * a / 2 + (b - a - 1)
}

/// A 2SAT formula: variable count plus a canonical, duplicate-free clause set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    n: u32,
    clauses: Vec<Clause>,
}

/// Bookkeeping from [`Formula::parse_dimacs`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseStats {
    /// Clause count announced by the `p cnf` header.
    pub header_clauses: usize,
    /// Clauses actually kept after canonicalization.
    pub kept_clauses: usize,
    /// Tautological clauses dropped with a warning.
    pub tautologies_dropped: usize,
    /// Repeated clauses silently deduplicated.
    pub duplicates_dropped: usize,
}

impl Formula {
    pub fn new(n: u32, clauses: impl IntoIterator<Item = Clause>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("variable count must be positive"));
        }
        let mut clauses: Vec<Clause> = clauses.into_iter().collect();
        for c in &clauses {
            if c.hi.code() > 2 * n {
                return Err(Error::domain(format!(
                    "clause literal code {} exceeds 2n = {}",
                    c.hi.code(),
                    2 * n
                )));
            }
        }
        clauses.sort();
        clauses.dedup();
        Ok(Formula { n, clauses })
    }

    pub fn empty(n: u32) -> Self {
        Formula {
            n,
            clauses: Vec::new(),
        }
    }

    /// Build from signed DIMACS literal pairs; rejects tautologies.
    pub fn from_dimacs_pairs(n: u32, pairs: &[(i64, i64)]) -> Result<Self> {
        let mut clauses = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            clauses.push(Clause::new(
                Literal::from_dimacs(a, n)?,
                Literal::from_dimacs(b, n)?,
                n,
            )?);
        }
        Formula::new(n, clauses)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn contains(&self, c: &Clause) -> bool {
        self.clauses.binary_search(c).is_ok()
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.n as usize
            && self
                .clauses
                .iter()
                .all(|c| c.is_satisfied_by(assignment, self.n))
    }

    /// The 0/1 indicator of this formula over the clause universe.
    pub fn to_indicator(&self) -> FormulaIndicator {
        let mut bits = vec![false; universe_size(self.n)];
        for c in &self.clauses {
            bits[slot_index(c.lo, c.hi, self.n)] = true;
        }
        FormulaIndicator { n: self.n, bits }
    }

    /// Canonical DIMACS text: header, then clauses in canonical order.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p cnf {} {}", self.n, self.clauses.len());
        for c in &self.clauses {
            let _ = writeln!(
                out,
                "{} {} 0",
                c.lo.to_dimacs(self.n),
                c.hi.to_dimacs(self.n)
            );
        }
        out
    }

    /// Parse DIMACS CNF. Strict 2SAT: every clause must have exactly two
    /// distinct literals. Tautologies are dropped (counted), duplicates are
    /// deduplicated (counted).
    pub fn parse_dimacs(text: &str) -> Result<(Formula, ParseStats)> {
        let mut header: Option<(u32, usize)> = None;
        let mut stats = ParseStats::default();
        let mut clauses: Vec<Clause> = Vec::new();
        let mut pending: Vec<i64> = Vec::new();
        let mut pending_line = 0usize;

        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            if trimmed.starts_with('p') {
                if header.is_some() {
                    return Err(Error::parse(lineno, "duplicate problem header"));
                }
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                    return Err(Error::parse(lineno, "malformed header, expected 'p cnf n m'"));
                }
                let n: u32 = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "invalid variable count"))?;
                let m: usize = fields[3]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "invalid clause count"))?;
                if n == 0 {
                    return Err(Error::parse(lineno, "variable count must be positive"));
                }
                header = Some((n, m));
                continue;
            }
            let (n, _) = header.ok_or_else(|| Error::parse(lineno, "clause before header"))?;
            for tok in trimmed.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("invalid token '{tok}'")))?;
                if v == 0 {
                    let line_of = if pending.is_empty() { lineno } else { pending_line };
                    finish_clause(
                        &mut pending,
                        line_of,
                        n,
                        &mut clauses,
                        &mut stats,
                    )?;
                } else {
                    if pending.is_empty() {
                        pending_line = lineno;
                    }
                    if v.unsigned_abs() > n as u64 {
                        return Err(Error::parse(
                            lineno,
                            format!("variable index {} exceeds n = {n}", v.abs()),
                        ));
                    }
                    pending.push(v);
                }
            }
        }

        let (n, m) = header.ok_or_else(|| Error::parse(text.lines().count(), "missing header"))?;
        if !pending.is_empty() {
            return Err(Error::parse(pending_line, "unterminated clause at end of input"));
        }
        stats.header_clauses = m;
        let before = clauses.len();
        let formula = Formula::new(n, clauses)?;
        stats.duplicates_dropped = before - formula.clause_count();
        stats.kept_clauses = formula.clause_count();
        Ok((formula, stats))
    }

    /// A uniformly random formula: `m` clauses drawn without replacement from
    /// the non-tautological universe.
    pub fn random(n: u32, m: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut usable: Vec<ClauseSlot> = clause_universe(n)
            .into_iter()
            .filter(|s| !s.is_tautology(n))
            .collect();
        if m > usable.len() {
            return Err(Error::domain(format!(
                "requested {m} clauses but only {} non-tautological slots exist",
                usable.len()
            )));
        }
        let (picked, _) = usable.partial_shuffle(rng, m);
        let clauses: Result<Vec<Clause>> = picked.iter().map(|s| s.to_clause(n)).collect();
        Formula::new(n, clauses?)
    }
}

fn finish_clause(
    pending: &mut Vec<i64>,
    lineno: usize,
    n: u32,
    clauses: &mut Vec<Clause>,
    stats: &mut ParseStats,
) -> Result<()> {
    let lits = std::mem::take(pending);
    if lits.len() != 2 {
        return Err(Error::parse(
            lineno,
            format!("clause has {} literals; strict 2SAT requires exactly 2", lits.len()),
        ));
    }
    let a = Literal::from_dimacs(lits[0], n).map_err(|e| Error::parse(lineno, e.to_string()))?;
    let b = Literal::from_dimacs(lits[1], n).map_err(|e| Error::parse(lineno, e.to_string()))?;
    if a.code() == b.code() {
        return Err(Error::parse(
            lineno,
            "clause repeats a literal; strict 2SAT requires two distinct literals",
        ));
    }
    if a.negate(n).map_err(|e| Error::parse(lineno, e.to_string()))?.code() == b.code() {
        stats.tautologies_dropped += 1;
        return Ok(());
    }
    clauses.push(Clause::new(a, b, n).map_err(|e| Error::parse(lineno, e.to_string()))?);
    Ok(())
}

/// The formula's 0/1 vector over the clause universe; tautology coordinates
/// are permanently zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaIndicator {
    n: u32,
    bits: Vec<bool>,
}

impl FormulaIndicator {
    /// From raw bits; the length must match the universe and tautology
    /// coordinates must be zero.
    pub fn from_bits(n: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != universe_size(n) {
            return Err(Error::domain(format!(
                "indicator length {} does not match the universe size {}",
                bits.len(),
                universe_size(n)
            )));
        }
        for (i, slot) in clause_universe(n).into_iter().enumerate() {
            if slot.is_tautology(n) && bits[i] {
                return Err(Error::domain("tautology coordinates must be zero"));
            }
        }
        Ok(FormulaIndicator { n, bits })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Bit mask with slot `i` in bit `i`; only for universes of at most 64
    /// slots (n <= 5).
    pub fn as_mask(&self) -> Option<u64> {
        if self.bits.len() > 64 {
            return None;
        }
        let mut m = 0u64;
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                m |= 1 << i;
            }
        }
        Some(m)
    }
}
