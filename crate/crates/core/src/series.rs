//! Truncated Laurent series `sum_{n >= v} c_n x^n + O(x^order)` with complex coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::modular_forms::binom;
use crate::{Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    val: i64,
    coeffs: Vec<C64>,
    order: i64,
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

impl TruncatedSeries {
    /// Coefficients of `x^val, x^{val+1}, ...`; missing ones up to `order` are zero,
    /// extra ones are dropped.
    pub fn new(val: i64, coeffs: Vec<C64>, order: i64) -> Self {
        let len = (order - val).max(0) as usize;
        let mut c = coeffs;
        c.resize(len, zero());
        TruncatedSeries {
            val: val.min(order),
            coeffs: c,
            order,
        }
    }

    /// Power series from coefficients of `x^0, x^1, ...`.
    pub fn from_coeffs(coeffs: &[C64], order: i64) -> Self {
        Self::new(0, coeffs.to_vec(), order)
    }

    pub fn from_real(coeffs: &[f64], order: i64) -> Self {
        Self::new(0, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(), order)
    }

    pub fn constant(c: C64, order: i64) -> Self {
        Self::new(0, vec![c], order)
    }

    pub fn zero(order: i64) -> Self {
        Self::new(0, vec![], order)
    }

    /// The series `x + O(x^order)`.
    pub fn x(order: i64) -> Self {
        Self::new(1, vec![C64::new(1.0, 0.0)], order)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest stored exponent (its coefficient may be zero).
    pub fn start(&self) -> i64 {
        self.val
    }

    /// Coefficient of `x^n`; `None` when `n >= order`.
    pub fn coeff(&self, n: i64) -> Option<C64> {
        if n >= self.order {
            None
        } else if n < self.val {
            Some(zero())
        } else {
            Some(self.coeffs[(n - self.val) as usize])
        }
    }

    /// Coefficients of `x^0 .. x^{order-1}`.
    pub fn power_coeffs(&self) -> Vec<C64> {
        (0..self.order.max(0)).map(|n| self.coeff(n).unwrap()).collect()
    }

    /// Exponent of the first coefficient with `|c| > 0`, if any.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| c.norm() > 0.0)
            .map(|i| self.val + i as i64)
    }

    pub fn truncate(&self, order: i64) -> Self {
        let o = order.min(self.order);
        Self::new(self.val, self.coeffs.clone(), o)
    }

    fn normalized(&self) -> Result<(i64, C64, TruncatedSeries)> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::ValuationError("series is zero to its order".into()))?;
        let lead = self.coeff(v).unwrap();
        // self = lead x^v (1 + h)
        let rel = self.order - v;
        let c: Vec<C64> = (0..rel).map(|i| self.coeff(v + i).unwrap() / lead).collect();
        let mut h = Self::new(0, c, rel);
        h.coeffs[0] = zero();
        Ok((v, lead, h))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.val, self.coeffs.iter().map(|c| c * s).collect(), self.order)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.val + k, self.coeffs.clone(), self.order + k)
    }

    pub fn derivative(&self) -> Self {
        let c: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (self.val + i as i64) as f64)
            .collect();
        Self::new(self.val - 1, c, self.order - 1)
    }

    /// Evaluate the stored polynomial part at `x`.
    pub fn eval(&self, x: C64) -> C64 {
        let mut s = zero();
        for c in self.coeffs.iter().rev() {
            s = s * x + c;
        }
        s * x.powi(self.val as i32)
    }

    pub fn inv(&self) -> Result<Self> {
        let (v, lead, h) = self.normalized()?;
        let n = h.order;
        // 1/(1+h) by the recurrence g_0 = 1, g_m = -sum_{i=1..m} h_i g_{m-i}
        let mut g = vec![zero(); n as usize];
        if n > 0 {
            g[0] = C64::new(1.0, 0.0);
        }
        for m in 1..n as usize {
            let mut s = zero();
            for i in 1..=m {
                s -= h.coeffs[i] * g[m - i];
            }
            g[m] = s;
        }
        Ok(Self::new(0, g, n).scale(1.0 / lead).shift(-v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// `exp(f)`; needs no negative powers.
    pub fn exp(&self) -> Result<Self> {
        if self.coeffs.iter().enumerate().any(|(i, c)| self.val + (i as i64) < 0 && c.norm() > 0.0) {
            return Err(Error::ValuationError("exp of a series with a pole".into()));
        }
        let n = self.order.max(0) as usize;
        let c0 = self.coeff(0).unwrap_or(zero());
        let a: Vec<C64> = (0..n).map(|i| self.coeff(i as i64).unwrap()).collect();
        // g' = f' g
        let mut g = vec![zero(); n];
        if n > 0 {
            g[0] = c0.exp();
        }
        for m in 1..n {
            let mut s = zero();
            for k in 1..=m {
                s += a[k] * g[m - k] * k as f64;
            }
            g[m] = s / m as f64;
        }
        Ok(Self::new(0, g, self.order))
    }

    /// Principal `log(f)`; needs valuation 0.
    pub fn log(&self) -> Result<Self> {
        let (v, lead, h) = self.normalized()?;
        if v != 0 {
            return Err(Error::BranchError(format!("log needs a nonzero constant term (valuation {v})")));
        }
        let n = h.order as usize;
        // (log(1+h))' = h'/(1+h)
        let one_h = &h + &Self::constant(C64::new(1.0, 0.0), h.order);
        let dl = h.derivative().div(&one_h)?;
        let mut c = vec![zero(); n];
        if n > 0 {
            c[0] = lead.ln();
        }
        for m in 1..n {
            c[m] = dl.coeff(m as i64 - 1).unwrap_or(zero()) / m as f64;
        }
        Ok(Self::new(0, c, self.order))
    }

    /// Principal `f^alpha`; `alpha * valuation` must be an integer.
    pub fn pow(&self, alpha: C64) -> Result<Self> {
        let (v, lead, h) = self.normalized()?;
        let av = alpha * v as f64;
        if av.im.abs() > 1e-12 || (av.re - av.re.round()).abs() > 1e-12 {
            return Err(Error::BranchError(format!(
                "x^{v} raised to {alpha} is not a Laurent series"
            )));
        }
        let one_h = &h + &Self::constant(C64::new(1.0, 0.0), h.order);
        let body = one_h.log()?.scale(alpha).exp()?;
        Ok(body.scale(lead.powc(alpha)).shift(av.re.round() as i64))
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            let mut r = Self::constant(C64::new(1.0, 0.0), self.order.max(0) + self.val.min(0) * n);
            for _ in 0..n {
                r = &r * self;
            }
            Ok(r)
        } else {
            self.inv()?.powi(-n)
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Result<Self> {
        self.pow(C64::new(0.5, 0.0))
    }

    /// `f(g(x))` for `g` with positive valuation.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let vg = match g.valuation() {
            Some(v) if v >= 1 => v,
            Some(v) => {
                return Err(Error::ValuationError(format!(
                    "inner series has valuation {v}, need >= 1"
                )))
            }
            None => g.order.max(1),
        };
        let mut order = self.order.saturating_mul(vg).min(g.order);
        let lo = self.val.min(0);
        if lo < 0 {
            // poles of f amplify the error of g
            order = order.min(g.order + (lo - 1) * vg);
        }
        let gt = g.truncate(order + vg.max(1) * (-lo).max(0) + 1);
        let ginv = if lo < 0 { Some(gt.inv()?) } else { None };
        let mut acc = Self::zero(order);
        // positive part by Horner
        for n in (0..self.order.max(0)).rev() {
            let c = self.coeff(n).unwrap();
            acc = &(&acc * &gt) + &Self::constant(c, order);
            acc = acc.truncate(order);
        }
        if let Some(gi) = ginv {
            let mut p = Self::constant(C64::new(1.0, 0.0), order);
            for n in 1..=(-lo) {
                p = (&p * &gi).truncate(order);
                let c = self.coeff(-n).unwrap();
                acc = &acc + &p.scale(c).truncate(order);
            }
        }
        Ok(acc.truncate(order))
    }

    /// Compositional inverse of `f = a_1 x + a_2 x^2 + ...` with `a_1 != 0`.
    pub fn reversion(&self) -> Result<Self> {
        if self.valuation() != Some(1) || self.val < 1 && self.coeffs[..(1 - self.val) as usize].iter().any(|c| c.norm() > 0.0) {
            return Err(Error::ValuationError("reversion needs valuation exactly 1".into()));
        }
        let a1 = self.coeff(1).unwrap();
        let order = self.order;
        let x = Self::x(order);
        let mut g = x.scale(1.0 / a1);
        // each pass fixes one more coefficient
        for _ in 0..order {
            let fg = self.compose(&g)?;
            let r = &fg - &x;
            g = &g - &r.scale(1.0 / a1);
        }
        Ok(g.truncate(order))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let o = self.order.min(other.order);
        let lo = self.val.min(other.val);
        (lo..o)
            .map(|n| (self.coeff(n).unwrap() - other.coeff(n).unwrap()).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm() > 0.0 {
                write!(f, "({c})x^{} + ", self.val + i as i64)?;
            }
        }
        write!(f, "O(x^{})", self.order)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order.min(o.order);
        let val = self.val.min(o.val);
        let c = (val..order)
            .map(|n| self.coeff(n).unwrap() + o.coeff(n).unwrap())
            .collect();
        TruncatedSeries::new(val, c, order)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        self + &(-o)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        let order = (self.order + o.val).min(o.order + self.val);
        let val = (self.val + o.val).min(order);
        let mut c = vec![zero(); (order - val).max(0) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= c.len() {
                    break;
                }
                c[k] += a * b;
            }
        }
        TruncatedSeries::new(val, c, order)
    }
}

/// `f(chi) = (1 - sqrt(1 - 4 chi)) / (2 chi) - 1 = chi + 2 chi^2 + 5 chi^3 + ...`,
/// computed from the closed form with series arithmetic.
pub fn catalan_f(order: i64) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::constant(C64::new(1.0, 0.0), order + 1);
    let x = TruncatedSeries::x(order + 1);
    let s = (&one - &x.scale(C64::new(4.0, 0.0))).sqrt()?;
    let g = (&one - &s).shift(-1).scale(C64::new(0.5, 0.0));
    let f = (&g - &TruncatedSeries::constant(C64::new(1.0, 0.0), order)).truncate(order);
    Ok(TruncatedSeries::from_coeffs(&f.power_coeffs(), order))
}

/// `f^m = sum_{n >= m} (m/n) binom(2n, n+m) chi^n` (for `m >= 1`).
pub fn catalan_power_binomial(m: usize, order: i64) -> TruncatedSeries {
    let c: Vec<C64> = (0..order.max(0) as usize)
        .map(|n| {
            if n >= m && m > 0 {
                C64::new(m as f64 / n as f64 * binom(2 * n, n + m), 0.0)
            } else if m == 0 && n == 0 {
                C64::new(1.0, 0.0)
            } else {
                zero()
            }
        })
        .collect();
    TruncatedSeries::new(0, c, order)
}

/// Value of `f(chi)` for `|chi| < 1/4` from the closed form (principal root).
pub fn catalan_f_value(chi: C64) -> C64 {
    if chi.norm() == 0.0 {
        return zero();
    }
    let one = C64::new(1.0, 0.0);
    (one - (one - chi * 4.0).sqrt()) / (chi * 2.0) - one
}
