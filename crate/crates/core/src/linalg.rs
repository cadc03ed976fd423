//! Dense complex matrices (backed by nalgebra) and the few operations the sewing code needs.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Determinant through partially pivoted LU.
pub fn det(m: &CMat) -> C64 {
    m.clone().lu().determinant()
}

/// One LU factorisation reused for several right-hand sides.
pub struct Factored {
    lu: nalgebra::linalg::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Factored {
    pub fn new(m: &CMat) -> Self {
        Factored { lu: m.clone().lu() }
    }

    pub fn det(&self) -> C64 {
        self.lu.determinant()
    }

    pub fn solve(&self, b: &CVec) -> Result<CVec> {
        self.lu.solve(b).ok_or_else(|| Error::domain("singular system"))
    }
}

/// Stop rule for a sequence of truncations: accept when the last change, or its
/// geometric extrapolation, is below `tol`.
pub fn converged(prev_change: Option<f64>, change: f64, tol: f64) -> bool {
    if change <= tol {
        return true;
    }
    match prev_change {
        Some(p) if p > 0.0 && change < p => {
            let r = change / p;
            change * r / (1.0 - r) <= tol
        }
        _ => false,
    }
}

/// Solve `m x = b`; fails on a singular pivot.
pub fn solve(m: &CMat, b: &CVec) -> Result<CVec> {
    m.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::domain("singular system"))
}

/// Unit vector `e_i` of length `n`.
pub fn unit(n: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// `sum_{n>=0} m^n` applied to `b`, stopped when the increment is below `tol`.
/// Only meaningful when the spectral radius is below one; used as an oracle.
pub fn neumann_apply(m: &CMat, b: &CVec, tol: f64, max_terms: usize) -> Result<CVec> {
    let mut acc = b.clone();
    let mut term = b.clone();
    for _ in 0..max_terms {
        term = m * term;
        acc += &term;
        if term.norm() <= tol * acc.norm() {
            return Ok(acc);
        }
    }
    Err(Error::NonConvergence {
        what: "Neumann series".into(),
        terms: max_terms,
        tail: term.norm(),
    })
}

/// `(x/|x|)^i` for `i = 0..=m`.
pub fn phases(x: C64, m: usize) -> Vec<C64> {
    let p = if x.norm() == 0.0 { C64::new(1.0, 0.0) } else { x / x.norm() };
    let mut v = vec![C64::new(1.0, 0.0); m + 1];
    for i in 1..=m {
        v[i] = v[i - 1] * p;
    }
    v
}
