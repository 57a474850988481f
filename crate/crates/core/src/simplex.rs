//! Bounded-variable primal simplex in floating-point or exact rational
//! arithmetic.
//!
//! The flow LPs solved here have all-zero right-hand sides, so the all-zero
//! point is feasible and the solver starts phase-2 directly from an
//! artificial identity basis. General right-hand sides go through a
//! phase-1 artificial objective first. Bounds are handled implicitly:
//! nonbasic variables rest at either bound, and the basis stays square in
//! the equality rows only.

use num::bigint::Sign;
use num::{BigRational, One, Zero};

use crate::lp_model::{decompose, LpInstance};
use crate::{Error, Result};

/// Arithmetic the solver is generic over. `EXACT` switches every tolerance
/// off; fast paths for 0 and +-1 factors matter because the basis inverses
/// of these totally unimodular systems stay in {-1, 0, 1}.
pub trait Scalar: Clone + PartialOrd + std::fmt::Debug + std::fmt::Display {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    /// `self -= a * b`.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self);
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

fn big_is_neg_one(v: &BigRational) -> bool {
    v.denom().is_one() && v.numer().bits() == 1 && v.numer().sign() == Sign::Minus
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        if Zero::is_zero(rhs) {
            self.clone()
        } else if Zero::is_zero(self) {
            rhs.clone()
        } else {
            self + rhs
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        if Zero::is_zero(rhs) {
            self.clone()
        } else {
            self - rhs
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        if Zero::is_zero(self) || Zero::is_zero(rhs) {
            Zero::zero()
        } else if self.is_one() {
            rhs.clone()
        } else if rhs.is_one() {
            self.clone()
        } else {
            self * rhs
        }
    }
    fn div(&self, rhs: &Self) -> Self {
        if Zero::is_zero(self) {
            Zero::zero()
        } else if rhs.is_one() {
            self.clone()
        } else if big_is_neg_one(rhs) {
            -self.clone()
        } else {
            self / rhs
        }
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn abs(&self) -> Self {
        num::Signed::abs(self)
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if Zero::is_zero(a) || Zero::is_zero(b) {
            return;
        }
        if a.is_one() {
            *self -= b;
        } else if big_is_neg_one(a) {
            *self += b;
        } else if b.is_one() {
            *self -= a;
        } else if big_is_neg_one(b) {
            *self += a;
        } else {
            *self -= a * b;
        }
    }
    fn to_f64(&self) -> f64 {
        num::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Dantzig pricing, switching to Bland after a run of degenerate pivots.
    DantzigWithBlandFallback,
    /// Bland's rule throughout: slower, termination guaranteed.
    Bland,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Feasibility/optimality tolerance in float mode; ignored when exact.
    pub feas_tol: f64,
    pub pivot_rule: PivotRule,
    /// Consecutive degenerate pivots before falling back to Bland.
    pub degenerate_threshold: u32,
    /// Defaults to `50 * (rows + cols)` when `None`.
    pub max_iters: Option<u64>,
    /// Basis changes between dense refactorizations (float mode only).
    pub refactor_interval: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feas_tol: 1e-7,
            pivot_rule: PivotRule::DantzigWithBlandFallback,
            degenerate_threshold: 50,
            max_iters: None,
            refactor_interval: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    IterationLimit,
    Infeasible,
    Unbounded,
}

/// An optimal (or terminal) basic solution.
#[derive(Debug, Clone)]
pub struct SolveResult<T> {
    pub status: SolveStatus,
    /// Objective value recomputed as `c . x` from the returned point.
    pub objective: T,
    /// One value per structural column.
    pub primal: Vec<T>,
    /// Basic column per row; values >= `num_vars` are artificials.
    pub basis: Vec<usize>,
    /// Simplex iterations (basis changes plus bound flips).
    pub pivots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Simplex<'a, T: Scalar> {
    lp: &'a LpInstance,
    opts: SolverOptions,
    m: usize,
    nv: usize,
    ncols: usize,
    /// Structural columns as sparse (row, coef) lists.
    cols: Vec<Vec<(u32, i8)>>,
    lower: Vec<T>,
    upper: Vec<Option<T>>,
    cost: Vec<T>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: Vec<Vec<T>>,
    xb: Vec<T>,
    d: Vec<T>,
    z: T,
    pivots: u64,
    degen_run: u32,
    bland_active: bool,
    since_refactor: u64,
    alpha: Vec<T>,
}

enum LoopExit {
    Optimal,
    Unbounded,
    IterationLimit,
}

enum Leave {
    BoundFlip,
    Row { r: usize, to_upper: bool },
}

impl<'a, T: Scalar> Simplex<'a, T> {
    fn new(lp: &'a LpInstance, opts: &SolverOptions) -> Result<Self> {
        let m = lp.rows.len();
        let nv = lp.num_vars;
        if lp.rhs.len() != m || lp.upper.len() != nv || lp.objective.len() != nv {
            return Err(Error::domain("inconsistent LP dimensions"));
        }
        let mut cols: Vec<Vec<(u32, i8)>> = vec![Vec::new(); nv];
        for (r, row) in lp.rows.iter().enumerate() {
            for &(c, coef) in row {
                if c as usize >= nv {
                    return Err(Error::domain("row references a column out of range"));
                }
                if coef != 1 && coef != -1 {
                    return Err(Error::domain("row coefficients must be -1 or +1"));
                }
                cols[c as usize].push((r as u32, coef));
            }
        }
        let ncols = nv + m;
        let mut lower = vec![T::zero(); ncols];
        let mut upper: Vec<Option<T>> = Vec::with_capacity(ncols);
        for u in &lp.upper {
            upper.push(u.map(T::from_int));
        }
        // Artificial for row r starts basic at rhs[r]; bounds straddle it
        // until phase 1 drives it to zero.
        for r in 0..m {
            let b = lp.rhs[r];
            if b >= 0 {
                upper.push(Some(T::from_int(b)));
            } else {
                lower[nv + r] = T::from_int(b);
                upper.push(Some(T::zero()));
            }
        }
        let mut binv = Vec::with_capacity(m);
        for r in 0..m {
            let mut row = vec![T::zero(); m];
            row[r] = T::one();
            binv.push(row);
        }
        let state: Vec<VarState> = (0..nv)
            .map(|_| VarState::AtLower)
            .chain((0..m).map(VarState::Basic))
            .collect();
        Ok(Simplex {
            lp,
            opts: opts.clone(),
            m,
            nv,
            ncols,
            cols,
            lower,
            upper,
            cost: vec![T::zero(); ncols],
            state,
            basis: (nv..ncols).collect(),
            binv,
            xb: lp.rhs.iter().map(|&b| T::from_int(b)).collect(),
            d: vec![T::zero(); ncols],
            z: T::zero(),
            pivots: 0,
            degen_run: 0,
            bland_active: false,
            since_refactor: 0,
            alpha: vec![T::zero(); m],
        })
    }

    fn max_iters(&self) -> u64 {
        self.opts
            .max_iters
            .unwrap_or(50 * (self.m as u64 + self.nv as u64))
    }

    fn pos(&self, v: &T) -> bool {
        if T::EXACT {
            *v > T::zero()
        } else {
            v.to_f64() > self.opts.feas_tol
        }
    }

    fn neg(&self, v: &T) -> bool {
        if T::EXACT {
            *v < T::zero()
        } else {
            v.to_f64() < -self.opts.feas_tol
        }
    }

    fn nonzero_dir(&self, v: &T) -> bool {
        if T::EXACT {
            !v.is_zero()
        } else {
            v.to_f64().abs() > 1e-11
        }
    }

    /// Column coefficient application: `out += sign * binv-term` for each
    /// entry of column `j` (artificials are identity columns).
    fn compute_alpha(&mut self, j: usize) {
        for v in &mut self.alpha {
            *v = T::zero();
        }
        if j < self.nv {
            // Clone the shared rows out of binv one scalar at a time to keep
            // the borrow checker happy without copying whole rows.
            for idx in 0..self.cols[j].len() {
                let (r, coef) = self.cols[j][idx];
                let r = r as usize;
                for i in 0..self.m {
                    let term = self.binv[i][r].clone();
                    if term.is_zero() {
                        continue;
                    }
                    if coef == 1 {
                        self.alpha[i] = self.alpha[i].add(&term);
                    } else {
                        self.alpha[i] = self.alpha[i].sub(&term);
                    }
                }
            }
        } else {
            let r = j - self.nv;
            for i in 0..self.m {
                self.alpha[i] = self.binv[i][r].clone();
            }
        }
    }

    fn nonbasic_value(&self, j: usize) -> T {
        match self.state[j] {
            VarState::AtLower => self.lower[j].clone(),
            VarState::AtUpper => self
                .upper[j]
                .clone()
                .expect("variable at upper bound must have one"),
            VarState::Basic(r) => self.xb[r].clone(),
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        match &self.upper[j] {
            Some(u) => *u == self.lower[j],
            None => false,
        }
    }

    fn price(&self) -> Option<usize> {
        let bland = self.bland_active || self.opts.pivot_rule == PivotRule::Bland;
        let mut best: Option<(usize, T)> = None;
        for j in 0..self.ncols {
            let eligible = match self.state[j] {
                VarState::Basic(_) => false,
                VarState::AtLower => !self.is_fixed(j) && self.pos(&self.d[j]),
                VarState::AtUpper => self.neg(&self.d[j]),
            };
            if !eligible {
                continue;
            }
            if bland {
                return Some(j);
            }
            let score = self.d[j].abs();
            match &best {
                Some((_, s)) if *s >= score => {}
                _ => best = Some((j, score)),
            }
        }
        best.map(|(j, _)| j)
    }

    /// Ratio test for entering column `j` moving off its bound. Returns the
    /// step and what limited it, or `None` when unbounded.
    fn ratio_test(&self, j: usize, increasing: bool) -> Option<(T, Leave)> {
        let mut best: Option<(T, Leave, T)> = self.upper[j].as_ref().map(|u| {
            let span = u.sub(&self.lower[j]);
            (span, Leave::BoundFlip, T::zero())
        });
        for i in 0..self.m {
            if !self.nonzero_dir(&self.alpha[i]) {
                continue;
            }
            // rate at which basic i decreases per unit step
            let rate = if increasing {
                self.alpha[i].clone()
            } else {
                self.alpha[i].neg()
            };
            let (limit, to_upper) = if rate > T::zero() {
                let room = self.xb[i].sub(&self.lower[self.basis[i]]);
                (room.div(&rate), false)
            } else {
                match &self.upper[self.basis[i]] {
                    Some(u) => {
                        let room = u.sub(&self.xb[i]);
                        (room.div(&rate.neg()), true)
                    }
                    None => continue,
                }
            };
            let limit = if limit < T::zero() { T::zero() } else { limit };
            let mag = self.alpha[i].abs();
            let replace = match &best {
                None => true,
                Some((t, _, m)) => {
                    limit < *t
                        || (limit == *t
                            && match &best.as_ref().unwrap().1 {
                                Leave::BoundFlip => false,
                                Leave::Row { r, .. } => {
                                    mag > *m || (mag == *m && self.basis[i] < self.basis[*r])
                                }
                            })
                }
            };
            if replace {
                best = Some((limit, Leave::Row { r: i, to_upper }, mag));
            }
        }
        best.map(|(t, l, _)| (t, l))
    }

    fn apply_step(&mut self, j: usize, increasing: bool, t: &T) {
        if t.is_zero() {
            return;
        }
        for i in 0..self.m {
            if self.alpha[i].is_zero() {
                continue;
            }
            let delta = self.alpha[i].mul(t);
            if increasing {
                self.xb[i] = self.xb[i].sub(&delta);
            } else {
                self.xb[i] = self.xb[i].add(&delta);
            }
        }
        let gain = self.d[j].mul(t);
        self.z = if increasing {
            self.z.add(&gain)
        } else {
            self.z.sub(&gain)
        };
    }

    fn pivot_basis(&mut self, j: usize, r: usize, to_upper: bool, t: &T, increasing: bool) {
        let leaving = self.basis[r];
        self.state[leaving] = if to_upper {
            VarState::AtUpper
        } else {
            VarState::AtLower
        };
        let entering_value = {
            let base = self.nonbasic_value(j);
            let step = if increasing { t.clone() } else { t.neg() };
            base.add(&step)
        };

        // Normalize pivot row, then eliminate.
        let apiv = self.alpha[r].clone();
        if apiv != T::one() {
            let inv = T::one().div(&apiv);
            for k in 0..self.m {
                if !self.binv[r][k].is_zero() {
                    self.binv[r][k] = self.binv[r][k].mul(&inv);
                }
            }
        }
        for i in 0..self.m {
            if i == r || self.alpha[i].is_zero() {
                continue;
            }
            let factor = self.alpha[i].clone();
            for k in 0..self.m {
                let term = self.binv[r][k].clone();
                if term.is_zero() {
                    continue;
                }
                self.binv[i][k].sub_mul_assign(&factor, &term);
            }
        }

        self.xb[r] = entering_value;
        self.basis[r] = j;
        self.state[j] = VarState::Basic(r);

        // Reduced-cost update off the fresh pivot row of binv.
        let dq = self.d[j].clone();
        if !dq.is_zero() {
            for col in 0..self.ncols {
                if col == j {
                    continue;
                }
                let ratio = if col < self.nv {
                    let mut acc = T::zero();
                    for &(row, coef) in &self.cols[col] {
                        let term = &self.binv[r][row as usize];
                        if term.is_zero() {
                            continue;
                        }
                        if coef == 1 {
                            acc = acc.add(term);
                        } else {
                            acc = acc.sub(term);
                        }
                    }
                    acc
                } else {
                    self.binv[r][col - self.nv].clone()
                };
                if !ratio.is_zero() {
                    self.d[col].sub_mul_assign(&dq, &ratio);
                }
            }
        }
        self.d[j] = T::zero();
        self.since_refactor += 1;
    }

    /// Dense Gauss-Jordan refactorization plus full recompute of basic
    /// values, duals and the objective. Also used at the phase switch.
    fn refresh(&mut self) {
        // Inverse of the basis matrix.
        let mut mat: Vec<Vec<T>> = (0..self.m)
            .map(|_| vec![T::zero(); self.m])
            .collect();
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < self.nv {
                for &(r, coef) in &self.cols[bj] {
                    mat[r as usize][i] = T::from_int(coef as i64);
                }
            } else {
                mat[bj - self.nv][i] = T::one();
            }
        }
        let mut inv: Vec<Vec<T>> = (0..self.m)
            .map(|r| {
                let mut row = vec![T::zero(); self.m];
                row[r] = T::one();
                row
            })
            .collect();
        for col in 0..self.m {
            let mut piv = col;
            let mut best = mat[col][col].abs();
            for r in col + 1..self.m {
                let cand = mat[r][col].abs();
                if cand > best {
                    best = cand;
                    piv = r;
                }
            }
            mat.swap(col, piv);
            inv.swap(col, piv);
            let diag = mat[col][col].clone();
            debug_assert!(!diag.is_zero(), "singular basis");
            if diag != T::one() {
                let dinv = T::one().div(&diag);
                for k in 0..self.m {
                    if !mat[col][k].is_zero() {
                        mat[col][k] = mat[col][k].mul(&dinv);
                    }
                    if !inv[col][k].is_zero() {
                        inv[col][k] = inv[col][k].mul(&dinv);
                    }
                }
            }
            for r in 0..self.m {
                if r == col || mat[r][col].is_zero() {
                    continue;
                }
                let factor = mat[r][col].clone();
                for k in 0..self.m {
                    let t = mat[col][k].clone();
                    if !t.is_zero() {
                        mat[r][k].sub_mul_assign(&factor, &t);
                    }
                    let t = inv[col][k].clone();
                    if !t.is_zero() {
                        inv[r][k].sub_mul_assign(&factor, &t);
                    }
                }
            }
        }
        self.binv = inv;

        // Effective rhs: b minus nonbasic contributions.
        let mut rhs: Vec<T> = self.lp.rhs.iter().map(|&b| T::from_int(b)).collect();
        for j in 0..self.ncols {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let val = self.nonbasic_value(j);
            if val.is_zero() {
                continue;
            }
            if j < self.nv {
                for &(r, coef) in &self.cols[j] {
                    if coef == 1 {
                        rhs[r as usize] = rhs[r as usize].sub(&val);
                    } else {
                        rhs[r as usize] = rhs[r as usize].add(&val);
                    }
                }
            } else {
                rhs[j - self.nv] = rhs[j - self.nv].sub(&val);
            }
        }
        for i in 0..self.m {
            let mut acc = T::zero();
            for r in 0..self.m {
                if !self.binv[i][r].is_zero() && !rhs[r].is_zero() {
                    acc = acc.add(&self.binv[i][r].mul(&rhs[r]));
                }
            }
            self.xb[i] = acc;
        }

        // Duals and reduced costs.
        let mut y = vec![T::zero(); self.m];
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = &self.cost[bj];
            if cb.is_zero() {
                continue;
            }
            for r in 0..self.m {
                if !self.binv[i][r].is_zero() {
                    y[r] = y[r].add(&cb.mul(&self.binv[i][r]));
                }
            }
        }
        for j in 0..self.ncols {
            let mut dj = self.cost[j].clone();
            if j < self.nv {
                for &(r, coef) in &self.cols[j] {
                    let t = &y[r as usize];
                    if t.is_zero() {
                        continue;
                    }
                    if coef == 1 {
                        dj = dj.sub(t);
                    } else {
                        dj = dj.add(t);
                    }
                }
            } else {
                dj = dj.sub(&y[j - self.nv]);
            }
            self.d[j] = dj;
        }
        for &bj in &self.basis {
            self.d[bj] = T::zero();
        }

        // Objective value.
        let mut z = T::zero();
        for j in 0..self.ncols {
            let val = self.nonbasic_value(j);
            if !val.is_zero() && !self.cost[j].is_zero() {
                z = z.add(&self.cost[j].mul(&val));
            }
        }
        self.z = z;
        self.since_refactor = 0;
    }

    fn optimize(&mut self) -> LoopExit {
        let cap = self.max_iters();
        loop {
            if self.pivots >= cap {
                return LoopExit::IterationLimit;
            }
            let Some(j) = self.price() else {
                return LoopExit::Optimal;
            };
            let increasing = matches!(self.state[j], VarState::AtLower);
            self.compute_alpha(j);
            let Some((t, leave)) = self.ratio_test(j, increasing) else {
                return LoopExit::Unbounded;
            };
            let degenerate = t.is_zero();
            self.apply_step(j, increasing, &t);
            match leave {
                Leave::BoundFlip => {
                    self.state[j] = if increasing {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                }
                Leave::Row { r, to_upper } => {
                    self.pivot_basis(j, r, to_upper, &t, increasing);
                    if !T::EXACT && self.since_refactor >= self.opts.refactor_interval {
                        self.refresh();
                    }
                }
            }
            self.pivots += 1;
            if degenerate {
                self.degen_run += 1;
                if self.degen_run >= self.opts.degenerate_threshold {
                    self.bland_active = true;
                }
            } else {
                self.degen_run = 0;
                if self.opts.pivot_rule == PivotRule::DantzigWithBlandFallback {
                    self.bland_active = false;
                }
            }
        }
    }

    fn needs_phase1(&self) -> bool {
        self.lp.rhs.iter().any(|&b| b != 0)
    }

    fn run(mut self) -> Result<SolveResult<T>> {
        if self.needs_phase1() {
            // Phase 1: drive artificials to zero.
            for r in 0..self.m {
                let b = self.lp.rhs[r];
                self.cost[self.nv + r] = T::from_int(-b.signum());
            }
            self.refresh();
            match self.optimize() {
                LoopExit::Optimal => {}
                LoopExit::IterationLimit => return Ok(self.finish(SolveStatus::IterationLimit)),
                LoopExit::Unbounded => {
                    return Err(Error::Internal(
                        "phase-1 objective is bounded by construction".into(),
                    ))
                }
            }
            if self.neg(&self.z.clone()) {
                return Ok(self.finish(SolveStatus::Infeasible));
            }
            // Pin artificials to zero and install the real objective.
            for r in 0..self.m {
                self.lower[self.nv + r] = T::zero();
                self.upper[self.nv + r] = Some(T::zero());
                self.cost[self.nv + r] = T::zero();
                if let VarState::AtUpper = self.state[self.nv + r] {
                    self.state[self.nv + r] = VarState::AtLower;
                }
            }
        }
        for j in 0..self.nv {
            self.cost[j] = T::from_int(self.lp.objective[j]);
        }
        self.refresh();
        let status = match self.optimize() {
            LoopExit::Optimal => SolveStatus::Optimal,
            LoopExit::IterationLimit => SolveStatus::IterationLimit,
            LoopExit::Unbounded => SolveStatus::Unbounded,
        };
        Ok(self.finish(status))
    }

    fn finish(self, status: SolveStatus) -> SolveResult<T> {
        let mut primal = Vec::with_capacity(self.nv);
        for j in 0..self.nv {
            primal.push(self.nonbasic_value(j));
        }
        let mut objective = T::zero();
        for j in 0..self.nv {
            if self.lp.objective[j] != 0 && !primal[j].is_zero() {
                let c = T::from_int(self.lp.objective[j]);
                objective = objective.add(&c.mul(&primal[j]));
            }
        }
        SolveResult {
            status,
            objective,
            primal,
            basis: self.basis,
            pivots: self.pivots,
        }
    }
}

/// Solve an [`LpInstance`] to an optimal basic solution.
pub fn solve<T: Scalar>(lp: &LpInstance, opts: &SolverOptions) -> Result<SolveResult<T>> {
    Simplex::<T>::new(lp, opts)?.run()
}

/// Solve by commodity decomposition and merge the sub-solutions back into a
/// full-length primal vector. Sub-optima are summed; pivot counts add up.
pub fn solve_decomposed<T: Scalar>(
    lp: &LpInstance,
    opts: &SolverOptions,
) -> Result<SolveResult<T>> {
    let subs = decompose(lp)?;
    let mut primal = vec![T::zero(); lp.num_vars];
    let mut objective = T::zero();
    let mut pivots = 0u64;
    let mut basis = Vec::with_capacity(lp.rows.len());
    let mut status = SolveStatus::Optimal;
    let tn = 2 * lp.n as usize;
    for (ki, sub) in subs.iter().enumerate() {
        let res = solve::<T>(sub, opts)?;
        if res.status != SolveStatus::Optimal && status == SolveStatus::Optimal {
            status = res.status;
        }
        for (local, val) in res.primal.iter().enumerate() {
            let var = sub.var_of_column(local);
            let global = lp.column_of_var(var).expect("monolithic holds every var");
            primal[global] = val.clone();
        }
        for (local_row, &bj) in res.basis.iter().enumerate() {
            let global = if bj < sub.num_vars {
                lp.column_of_var(sub.var_of_column(bj))
                    .expect("monolithic holds every var")
            } else {
                lp.num_vars + ki * tn + (bj - sub.num_vars)
            };
            let _ = local_row;
            basis.push(global);
        }
        objective = objective.add(&res.objective);
        pivots += res.pivots;
    }
    Ok(SolveResult {
        status,
        objective,
        primal,
        basis,
        pivots,
    })
}

/// Every equality within `tol` and every bound within `tol`
/// (exact comparisons when `T::EXACT`).
pub fn verify_feasible<T: Scalar>(lp: &LpInstance, primal: &[T], tol: f64) -> bool {
    if primal.len() != lp.num_vars {
        return false;
    }
    let ok_zero = |v: &T| {
        if T::EXACT {
            v.is_zero()
        } else {
            v.to_f64().abs() <= tol
        }
    };
    for (row, &b) in lp.rows.iter().zip(&lp.rhs) {
        let mut acc = T::from_int(-b);
        for &(c, coef) in row {
            let x = &primal[c as usize];
            if x.is_zero() {
                continue;
            }
            if coef == 1 {
                acc = acc.add(x);
            } else {
                acc = acc.sub(x);
            }
        }
        if !ok_zero(&acc) {
            return false;
        }
    }
    for (j, x) in primal.iter().enumerate() {
        let lo_ok = if T::EXACT {
            *x >= T::zero()
        } else {
            x.to_f64() >= -tol
        };
        if !lo_ok {
            return false;
        }
        if let Some(u) = lp.upper[j] {
            let ub = T::from_int(u);
            let hi_ok = if T::EXACT {
                *x <= ub
            } else {
                x.to_f64() <= u as f64 + tol
            };
            if !hi_ok {
                return false;
            }
        }
    }
    true
}

/// Every coordinate within `tol` of 0 or 1 (exactly 0 or 1 when exact).
pub fn verify_integral<T: Scalar>(primal: &[T], tol: f64) -> bool {
    primal.iter().all(|x| {
        if T::EXACT {
            x.is_zero() || *x == T::one()
        } else {
            let v = x.to_f64();
            v.abs() <= tol || (v - 1.0).abs() <= tol
        }
    })
}
