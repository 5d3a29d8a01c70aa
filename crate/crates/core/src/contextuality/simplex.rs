//! Revised primal simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`.
//!
//! The slack basis is feasible, so no phase one is needed. Columns can be
//! appended between solves, which is all column generation requires.
//! Pricing is Dantzig's largest-reduced-cost rule; after a run of
//! degenerate pivots it falls back to Bland's rule, which cannot cycle, on
//! the heavily degenerate problems that arise when `b` has many zeros.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub trait LpScalar: Clone + PartialOrd + Signed + std::fmt::Debug {
    /// Values at or below this magnitude count as zero.
    fn eps() -> Self;
    /// Whether accumulated round-off calls for periodic refactorisation.
    const INEXACT: bool;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
}

impl LpScalar for f64 {
    fn eps() -> Self {
        1e-11
    }
    const INEXACT: bool = true;
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn eps() -> Self {
        num_traits::Zero::zero()
    }
    const INEXACT: bool = false;
    /// Exact binary value of the float.
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite value")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Slack(usize),
    Column(usize),
}

const REFACTOR_EVERY: usize = 50;
const MAX_PIVOTS: usize = 200_000;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Debug)]
pub struct Simplex<T: LpScalar> {
    m: usize,
    b: Vec<T>,
    columns: Vec<Vec<T>>,
    costs: Vec<T>,
    basis: Vec<Var>,
    binv: Vec<Vec<T>>,
    xb: Vec<T>,
    pivots_since_refactor: usize,
    degenerate_run: usize,
    pub pivots: usize,
}

impl<T: LpScalar> Simplex<T> {
    pub fn new(b: Vec<T>) -> Result<Self> {
        if b.iter().any(|v| v.is_negative()) {
            return Err(Error::Lp("right-hand side must be nonnegative".into()));
        }
        let m = b.len();
        let binv =
            (0..m).map(|r| (0..m).map(|c| if r == c { T::one() } else { T::zero() }).collect()).collect();
        Ok(Simplex {
            m,
            xb: b.clone(),
            b,
            columns: Vec::new(),
            costs: Vec::new(),
            basis: (0..m).map(Var::Slack).collect(),
            binv,
            pivots_since_refactor: 0,
            degenerate_run: 0,
            pivots: 0,
        })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[T] {
        &self.columns[k]
    }

    pub fn add_column(&mut self, a: Vec<T>, cost: T) -> Result<usize> {
        if a.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: a.len() });
        }
        self.columns.push(a);
        self.costs.push(cost);
        Ok(self.columns.len() - 1)
    }

    fn var_column(&self, v: Var) -> Vec<T> {
        match v {
            Var::Slack(r) => (0..self.m).map(|i| if i == r { T::one() } else { T::zero() }).collect(),
            Var::Column(k) => self.columns[k].clone(),
        }
    }

    fn var_index(&self, v: Var) -> usize {
        match v {
            Var::Slack(r) => r,
            Var::Column(k) => self.m + k,
        }
    }

    fn var_cost(&self, v: Var) -> T {
        match v {
            Var::Slack(_) => T::zero(),
            Var::Column(k) => self.costs[k].clone(),
        }
    }

    /// `y = c_B B^{-1}`.
    pub fn duals(&self) -> Vec<T> {
        let mut y = vec![T::zero(); self.m];
        for (r, &v) in self.basis.iter().enumerate() {
            let cb = self.var_cost(v);
            if cb.is_zero() {
                continue;
            }
            for (yi, binv) in y.iter_mut().zip(&self.binv[r]) {
                *yi = yi.clone() + cb.clone() * binv.clone();
            }
        }
        y
    }

    fn ftran(&self, a: &[T]) -> Vec<T> {
        self.binv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(a)
                    .filter(|(_, ai)| !ai.is_zero())
                    .fold(T::zero(), |acc, (bij, aj)| acc + bij.clone() * aj.clone())
            })
            .collect()
    }

    fn reduced_cost(&self, v: Var, y: &[T]) -> T {
        match v {
            Var::Slack(r) => -y[r].clone(),
            Var::Column(k) => {
                let ya = self.columns[k]
                    .iter()
                    .zip(y)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::zero(), |acc, (a, yi)| acc + a.clone() * yi.clone());
                self.costs[k].clone() - ya
            }
        }
    }

    /// Rebuild `B^{-1}` from the basis columns by Gauss-Jordan elimination.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut aug: Vec<Vec<T>> = vec![vec![T::zero(); 2 * m]; m];
        for (c, &v) in self.basis.iter().enumerate() {
            for (r, val) in self.var_column(v).into_iter().enumerate() {
                aug[r][c] = val;
            }
        }
        for (r, row) in aug.iter_mut().enumerate() {
            row[m + r] = T::one();
        }
        for col in 0..m {
            let pivot = (col..m)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).expect("comparable"))
                .expect("nonempty");
            if aug[pivot][col].abs() <= T::eps() {
                return Err(Error::Lp("basis matrix became singular".into()));
            }
            aug.swap(col, pivot);
            let p = aug[col][col].clone();
            for v in aug[col].iter_mut() {
                *v = v.clone() / p.clone();
            }
            let pivot_row = aug[col].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        self.binv = aug.into_iter().map(|row| row[m..].to_vec()).collect();
        self.xb = self.ftran(&self.b.clone());
        for v in self.xb.iter_mut() {
            if v.is_negative() && v.abs() <= T::eps() {
                *v = T::zero();
            }
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, row: usize, entering: Var, d: &[T]) {
        let p = d[row].clone();
        let pivot_row: Vec<T> = self.binv[row].iter().map(|v| v.clone() / p.clone()).collect();
        let mut x_pivot = self.xb[row].clone() / p;
        if x_pivot.is_negative() {
            x_pivot = T::zero();
        }
        for r in 0..self.m {
            if r == row || d[r].is_zero() {
                continue;
            }
            let f = d[r].clone();
            for (v, pv) in self.binv[r].iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            self.xb[r] = self.xb[r].clone() - f * x_pivot.clone();
            if self.xb[r].is_negative() && self.xb[r].abs() <= Self::slack_tol() {
                self.xb[r] = T::zero();
            }
        }
        self.binv[row] = pivot_row;
        self.xb[row] = x_pivot;
        self.basis[row] = entering;
        self.pivots += 1;
        self.pivots_since_refactor += 1;
    }

    /// Minimum-ratio row, ties broken by the lowest basic variable.
    fn bland_row(&self, d: &[T]) -> Option<(usize, T)> {
        let mut leave: Option<(usize, T)> = None;
        for r in 0..self.m {
            if d[r] <= T::eps() {
                continue;
            }
            let ratio = self.xb[r].clone() / d[r].clone();
            leave = match leave {
                None => Some((r, ratio)),
                Some((lr, lratio)) => {
                    let diff = ratio.clone() - lratio.clone();
                    if diff < -T::eps() || (diff.abs() <= T::eps() && self.basis[r] < self.basis[lr]) {
                        Some((r, ratio))
                    } else {
                        Some((lr, lratio))
                    }
                }
            };
        }
        leave
    }

    /// Two-pass ratio test: among rows within a small tolerance of the
    /// minimum ratio, take the one with the largest pivot element.
    fn harris_row(&self, d: &[T]) -> Option<(usize, T)> {
        let tol = Self::slack_tol();
        let mut theta: Option<T> = None;
        for r in 0..self.m {
            if d[r] > tol {
                let t = (self.xb[r].clone() + tol.clone()) / d[r].clone();
                if theta.as_ref().is_none_or(|th| t < *th) {
                    theta = Some(t);
                }
            }
        }
        let theta = theta?;
        let mut best: Option<usize> = None;
        for r in 0..self.m {
            if d[r] > tol && self.xb[r].clone() / d[r].clone() <= theta && best.is_none_or(|b| d[r] > d[b]) {
                best = Some(r);
            }
        }
        best.map(|r| {
            let step = self.xb[r].clone() / d[r].clone();
            (r, if step.is_negative() { T::zero() } else { step })
        })
    }

    fn slack_tol() -> T {
        T::eps() * T::from_f64(100.0)
    }

    /// Optimise over the current columns.
    pub fn solve(&mut self) -> Result<()> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Lp("pivot limit exceeded".into()));
            }
            if T::INEXACT && self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let y = self.duals();
            let mut in_basis = vec![false; self.m + self.columns.len()];
            for &v in &self.basis {
                in_basis[self.var_index(v)] = true;
            }
            let candidates = (0..self.m)
                .map(Var::Slack)
                .chain((0..self.columns.len()).map(Var::Column))
                .filter(|&v| !in_basis[self.var_index(v)]);
            let entering = if self.degenerate_run < DEGENERATE_RUN {
                let mut best: Option<(Var, T)> = None;
                for v in candidates {
                    let rc = self.reduced_cost(v, &y);
                    if rc > T::eps() && best.as_ref().is_none_or(|(_, b)| rc > *b) {
                        best = Some((v, rc));
                    }
                }
                best.map(|(v, _)| v)
            } else {
                let mut candidates = candidates;
                candidates.find(|&v| self.reduced_cost(v, &y) > T::eps())
            };
            let Some(entering) = entering else { return Ok(()) };
            let d = self.ftran(&self.var_column(entering));
            let leave =
                if self.degenerate_run < DEGENERATE_RUN { self.harris_row(&d) } else { self.bland_row(&d) };
            let Some((row, step)) = leave else {
                return Err(Error::Lp("objective is unbounded".into()));
            };
            if step > T::eps() {
                self.degenerate_run = 0;
            } else {
                self.degenerate_run += 1;
            }
            self.pivot(row, entering, &d);
        }
    }

    /// Values of the structural variables.
    pub fn primal(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.columns.len()];
        for (r, &v) in self.basis.iter().enumerate() {
            if let Var::Column(k) = v {
                x[k] = self.xb[r].clone();
            }
        }
        x
    }

    pub fn objective(&self) -> T {
        self.primal().iter().zip(&self.costs).fold(T::zero(), |acc, (x, c)| acc + x.clone() * c.clone())
    }

    pub fn rhs(&self) -> &[T] {
        &self.b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(p: i64, r: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(r))
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y; x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6).
        let mut s = Simplex::new(vec![q(4, 1), q(12, 1), q(18, 1)]).unwrap();
        s.add_column(vec![q(1, 1), q(0, 1), q(3, 1)], q(3, 1)).unwrap();
        s.add_column(vec![q(0, 1), q(2, 1), q(2, 1)], q(5, 1)).unwrap();
        s.solve().unwrap();
        assert_eq!(s.objective(), q(36, 1));
        assert_eq!(s.primal(), vec![q(2, 1), q(6, 1)]);
        let y = s.duals();
        let dual: BigRational = y.iter().zip(s.rhs()).map(|(a, b)| a * b).sum();
        assert_eq!(dual, q(36, 1));
    }

    #[test]
    fn float_matches_exact() {
        let b = [0.5, 0.25, 1.0, 0.0];
        let cols = [[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 1.0, 0.0], [1.0, 1.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]];
        let mut f = Simplex::new(b.to_vec()).unwrap();
        let mut e =
            Simplex::new(b.iter().map(|&v| <BigRational as FromPrimitive>::from_f64(v).unwrap()).collect())
                .unwrap();
        for c in cols {
            f.add_column(c.to_vec(), 1.0).unwrap();
            e.add_column(
                c.iter().map(|&v| <BigRational as FromPrimitive>::from_f64(v).unwrap()).collect(),
                q(1, 1),
            )
            .unwrap();
        }
        f.solve().unwrap();
        e.solve().unwrap();
        assert_eq!(e.objective(), q(1, 1));
        assert!((f.objective() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incremental_columns() {
        let mut s = Simplex::new(vec![1.0, 1.0]).unwrap();
        s.add_column(vec![1.0, 0.0], 1.0).unwrap();
        s.solve().unwrap();
        assert!((s.objective() - 1.0).abs() < 1e-12);
        s.add_column(vec![0.0, 1.0], 1.0).unwrap();
        s.solve().unwrap();
        assert!((s.objective() - 2.0).abs() < 1e-12);
        s.refactor().unwrap();
        assert!((s.objective() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_rhs_and_unbounded() {
        assert!(Simplex::new(vec![-1.0]).is_err());
        let mut s = Simplex::new(vec![1.0]).unwrap();
        s.add_column(vec![0.0], 1.0).unwrap();
        assert!(matches!(s.solve(), Err(Error::Lp(_))));
    }
}
