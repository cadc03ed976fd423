//! Eisenstein series, Dedekind eta, Weierstrass-type `P_k` functions, the
//! prime form and the moment kernels `C(k,l)` and `D(k,l,z)`.
//!
//! `E_k(q) = -B_k/k! + 2/(k-1)! sum_n sigma_{k-1}(n) q^n` for even `k >= 2`,
//! zero for odd `k`. The `P_k` are evaluated from their Laurent series at
//! `z = 0`, so they are only available on the disc `|z| < D(q)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result, C64, TWO_PI_I};

/// Truncation controls for the q- and z-series.
///
/// `tol` is relative to the size of the value being summed; `max_terms`
/// caps the number of series terms before `NonConvergence` is raised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalPolicy {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        EvalPolicy {
            tol: 1e-17,
            max_terms: 20_000,
        }
    }
}

/// A point `tau` in the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    tau: C64,
}

impl TorusPoint {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.re.is_finite() && tau.im.is_finite()) || tau.im <= 0.0 {
            return Err(Error::domain(format!("tau = {tau} is not in the upper half plane")));
        }
        Ok(TorusPoint { tau })
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn q(&self) -> C64 {
        (TWO_PI_I * self.tau).exp()
    }

    pub fn min_lattice_distance(&self) -> f64 {
        min_lattice_distance(self.tau)
    }
}

/// `D(q) = min |2 pi i (m tau + n)|` over nonzero `(m, n)`, scanning `|m|, |n| <= 50`.
pub fn min_lattice_distance(tau: C64) -> f64 {
    let mut best = f64::INFINITY;
    for m in -50i32..=50 {
        for n in -50i32..=50 {
            if m == 0 && n == 0 {
                continue;
            }
            let v = (tau * m as f64 + n as f64).norm();
            if v < best {
                best = v;
            }
        }
    }
    2.0 * PI * best
}

/// Upper bound for `sum' (D/|lambda|)^3` over the lattice `2 pi i (Z tau + Z)`.
///
/// Since `|lambda| >= D`, this also bounds `sum' (D/|lambda|)^j` for `j >= 3`,
/// hence `|E_j| <= K D^{-j}` for even `j >= 4`.
fn cubic_lattice_constant(tau: C64, d: f64) -> f64 {
    const M: i32 = 40;
    let mut s = 0.0;
    for m in -M..=M {
        for n in -M..=M {
            if m == 0 && n == 0 {
                continue;
            }
            let l = 2.0 * PI * (tau * m as f64 + n as f64).norm();
            s += (d / l).powi(3);
        }
    }
    // shell max(|m|,|n|) = s has 8s points, each of modulus >= 2 pi s mu
    let mut mu = tau.im;
    for i in 0..=200 {
        let x = -1.0 + 2.0 * i as f64 / 200.0;
        mu = mu.min((tau * x + 1.0).norm());
    }
    // the sampled minimum may overshoot slightly
    mu *= 0.99;
    s + 8.0 * (d / (2.0 * PI * mu)).powi(3) / M as f64
}

/// Bernoulli number `B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> BigRational {
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let d = &a[j - 1] - &a[j];
            a[j - 1] = d * BigRational::from_integer(BigInt::from(j));
        }
    }
    let b = a[0].clone();
    if n == 1 {
        -b
    } else {
        b
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `B_n / n!` as a float. Exact rationals up to `n = 60`, then the zeta formula.
pub fn bernoulli_over_factorial(n: usize) -> f64 {
    if n == 1 {
        return -0.5;
    }
    if n % 2 == 1 {
        return 0.0;
    }
    if n <= 60 {
        let r = bernoulli(n) / BigRational::from_integer(factorial(n));
        return r.to_f64().unwrap_or(0.0);
    }
    let zeta: f64 = (1..=12).map(|m| (m as f64).powi(-(n as i32))).sum();
    let sign = if (n / 2) % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * zeta * (-(n as f64) * (2.0 * PI).ln()).exp()
}

/// `(sign, ln |B_n / n!|)` for even `n >= 2`.
fn ln_bernoulli_over_factorial(n: usize) -> (f64, f64) {
    let sign = if (n / 2) % 2 == 1 { 1.0 } else { -1.0 };
    if n <= 60 {
        return (sign, bernoulli_over_factorial(n).abs().ln());
    }
    let zeta: f64 = (1..=12).map(|m| (m as f64).powi(-(n as i32))).sum();
    (sign, (2.0 * zeta).ln() - n as f64 * (2.0 * PI).ln())
}

fn signed_exp((sign, ln): (f64, f64), shift: f64) -> f64 {
    sign * (ln + shift).exp()
}

/// Exact q-expansion coefficients `[q^0 .. q^nmax]` of `E_k` (even `k >= 2`).
pub fn eisenstein_q_coefficients(k: usize, nmax: usize) -> Result<Vec<BigRational>> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::IndexError(format!("E_{k}: need even k >= 2")));
    }
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(-bernoulli(k) / BigRational::from_integer(factorial(k)));
    let scale = BigRational::new(BigInt::from(2), factorial(k - 1));
    for n in 1..=nmax {
        let mut sigma = BigInt::zero();
        for d in 1..=n {
            if n % d == 0 {
                sigma += BigInt::from(d).pow((k - 1) as u32);
            }
        }
        out.push(&scale * BigRational::from_integer(sigma));
    }
    Ok(out)
}

/// Integer coefficients `[q^0 .. q^nmax]` of `prod_{n>=1} (1 - q^n)`.
pub fn euler_product_q_coefficients(nmax: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); nmax + 1];
    c[0] = BigInt::one();
    for n in 1..=nmax {
        for i in (n..=nmax).rev() {
            let t = c[i - n].clone();
            c[i] -= t;
        }
    }
    c
}

/// Cached `E_k(tau)` for even `k` up to a growing maximum.
#[derive(Clone, Debug)]
pub struct EisensteinTable {
    tau: C64,
    policy: EvalPolicy,
    vals: Vec<C64>,
    /// `E_k D^k`, `D` the minimal lattice distance; stays O(1) where `E_k` underflows
    scaled: Vec<C64>,
    ln_d: f64,
    ln_fact: Vec<f64>,
}

impl EisensteinTable {
    pub fn new(tau: C64, kmax: usize, policy: EvalPolicy) -> Result<Self> {
        TorusPoint::new(tau)?;
        let mut t = EisensteinTable {
            tau,
            policy,
            vals: vec![C64::new(0.0, 0.0); 2],
            scaled: vec![C64::new(0.0, 0.0); 2],
            ln_d: min_lattice_distance(tau).ln(),
            ln_fact: vec![0.0],
        };
        t.extend(kmax)?;
        Ok(t)
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    pub fn kmax(&self) -> usize {
        self.vals.len() - 1
    }

    /// `E_k(tau)`; `k` must not exceed `kmax()`.
    pub fn get(&self, k: usize) -> C64 {
        if k % 2 == 1 {
            C64::new(0.0, 0.0)
        } else {
            self.vals[k]
        }
    }

    /// `E_k D^k` with `D = min_lattice_distance(tau)`; `k` must not exceed `kmax()`.
    pub fn scaled(&self, k: usize) -> C64 {
        self.scaled[k]
    }

    /// `ln D`.
    pub fn ln_d(&self) -> f64 {
        self.ln_d
    }

    /// `E_k`, extending the table if needed.
    pub fn e(&mut self, k: usize) -> Result<C64> {
        if k > self.kmax() {
            self.extend(k.max(2 * self.kmax()))?;
        }
        Ok(self.get(k))
    }

    pub fn extend(&mut self, kmax: usize) -> Result<()> {
        while self.ln_fact.len() <= kmax {
            let n = self.ln_fact.len();
            let prev = self.ln_fact[n - 1];
            self.ln_fact.push(prev + (n as f64).ln());
        }
        let lq = -2.0 * PI * self.tau.im;
        let q_abs = lq.exp();
        for k in self.vals.len()..=kmax {
            if k % 2 == 1 {
                self.vals.push(C64::new(0.0, 0.0));
                self.scaled.push(C64::new(0.0, 0.0));
                continue;
            }
            let kd = k as f64 * self.ln_d;
            let c0 = C64::new(-signed_exp(ln_bernoulli_over_factorial(k), kd), 0.0);
            let mut sum = C64::new(0.0, 0.0);
            let km1 = (k - 1) as f64;
            let dstar = (km1 / -lq).ceil() as usize;
            let mut d = 1usize;
            loop {
                if d > self.policy.max_terms {
                    return Err(Error::NonConvergence {
                        what: format!("E_{k} q-series"),
                        terms: d,
                        tail: f64::NAN,
                    });
                }
                let df = d as f64;
                let lmag = km1 * df.ln() - self.ln_fact[k - 1] + lq * df + kd;
                let qd = (TWO_PI_I * self.tau * df).exp();
                let phase = C64::from_polar(1.0, 2.0 * PI * df * self.tau.re);
                let term = phase * lmag.exp() / (C64::new(1.0, 0.0) - qd) * 2.0;
                sum += term;
                if d >= dstar {
                    let r = ((df + 1.0) / df).powf(km1) * q_abs;
                    if r < 1.0 {
                        let bound = 2.0 * lmag.exp() / (1.0 - q_abs.powf(df));
                        let tail = bound * r / (1.0 - r);
                        let scale = (sum + c0).norm();
                        if tail <= self.policy.tol * scale || tail < 1e-300 {
                            break;
                        }
                    }
                }
                d += 1;
            }
            let v = c0 + sum;
            self.scaled.push(v);
            self.vals.push(v * (-kd).exp());
        }
        Ok(())
    }
}

/// `E_k(tau)`; zero for odd `k`.
pub fn eisenstein(k: usize, tau: C64, policy: &EvalPolicy) -> Result<C64> {
    if k == 0 {
        return Err(Error::IndexError("E_0 is not defined here".into()));
    }
    if k % 2 == 1 {
        TorusPoint::new(tau)?;
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(EisensteinTable::new(tau, k, *policy)?.get(k))
}

/// `eta(tau) = q^{1/24} prod (1 - q^n)`, with `q^{1/24} = exp(2 pi i tau / 24)`.
pub fn dedekind_eta(tau: C64, policy: &EvalPolicy) -> Result<C64> {
    let pt = TorusPoint::new(tau)?;
    let q = pt.q();
    let qa = q.norm();
    let mut prod = C64::new(1.0, 0.0);
    let mut qn = C64::new(1.0, 0.0);
    for n in 1..=policy.max_terms {
        qn *= q;
        prod *= C64::new(1.0, 0.0) - qn;
        let tail = qa.powi(n as i32 + 1) / (1.0 - qa).powi(2);
        if tail < policy.tol {
            return Ok((TWO_PI_I * tau / 24.0).exp() * prod);
        }
    }
    Err(Error::NonConvergence {
        what: "eta product".into(),
        terms: policy.max_terms,
        tail: qa.powi(policy.max_terms as i32),
    })
}

/// Binomial coefficient as a float.
pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// `(k+l-1)! / ((k-1)! (l-1)!)` for `k, l >= 1`.
pub fn kernel_factor(k: usize, l: usize) -> f64 {
    (k + l - 1) as f64 * binom(k + l - 2, k - 1)
}

const LN_FACT_TABLE: usize = 1 << 14;

/// `ln n!`; tabulated below 16384, Stirling series above.
pub fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; LN_FACT_TABLE];
        for i in 1..LN_FACT_TABLE {
            v[i] = v[i - 1] + (i as f64).ln();
        }
        v
    });
    if n < LN_FACT_TABLE {
        return t[n];
    }
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x)
}

/// `ln binom(n, k)` for `k <= n`.
pub fn ln_binom(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `kernel_factor(k, l) r^(k+l) / sqrt(k l)` for `r > 0`, evaluated in logs so that
/// large truncations neither overflow the factorials nor underflow the power.
pub fn weighted_kernel_factor(k: usize, l: usize, ln_r: f64) -> f64 {
    let m = k + l;
    let ln = ln_factorial(m - 1) - ln_factorial(k - 1) - ln_factorial(l - 1) + m as f64 * ln_r
        - 0.5 * ((k * l) as f64).ln();
    ln.exp()
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A torus with cached Eisenstein values, used to evaluate `P_k`, `K` and the kernels.
#[derive(Clone, Debug)]
pub struct Torus {
    pt: TorusPoint,
    d_min: f64,
    k3: f64,
    policy: EvalPolicy,
    table: EisensteinTable,
}

impl Torus {
    pub fn new(tau: C64, policy: &EvalPolicy) -> Result<Self> {
        let pt = TorusPoint::new(tau)?;
        let d_min = pt.min_lattice_distance();
        Ok(Torus {
            pt,
            d_min,
            k3: cubic_lattice_constant(tau, d_min),
            policy: *policy,
            table: EisensteinTable::new(tau, 64, *policy)?,
        })
    }

    pub fn tau(&self) -> C64 {
        self.pt.tau()
    }

    pub fn q(&self) -> C64 {
        self.pt.q()
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn policy(&self) -> &EvalPolicy {
        &self.policy
    }

    pub fn e(&mut self, k: usize) -> Result<C64> {
        self.table.e(k)
    }

    pub fn ensure(&mut self, kmax: usize) -> Result<()> {
        if kmax > self.table.kmax() {
            self.table.extend(kmax)?;
        }
        Ok(())
    }

    pub fn table(&self) -> &EisensteinTable {
        &self.table
    }

    fn check_z(&self, z: C64) -> Result<()> {
        let r = z.norm();
        if !(r.is_finite()) || r >= self.d_min {
            return Err(Error::domain(format!(
                "|z| = {r} is not inside the series disc |z| < D(q) = {}",
                self.d_min
            )));
        }
        if r <= 1e-6 * self.d_min {
            return Err(Error::domain(format!("z = {z} is inside the exclusion radius")));
        }
        Ok(())
    }

    /// `sum_{j >= j0, j even} c(j) E_j z^j` with a majorant-based stop.
    /// The ratio `c(j+2)/c(j)` must be monotone in `j`.
    /// `sum_{j >= j0, j even} c_j E_j z^j` with `ln c_j` given by `ln_coef`; terms are
    /// formed in logs because `c_j` and `E_j` leave the double range at large `j`.
    fn z_series(
        &mut self,
        z: C64,
        j0: usize,
        ln_coef: impl Fn(usize) -> f64,
        what: &str,
    ) -> Result<C64> {
        let r = z.norm() / self.d_min;
        let mut j = if j0 % 2 == 1 { j0 + 1 } else { j0 };
        let mut sum = C64::new(0.0, 0.0);
        let ph = if z.norm() == 0.0 { C64::new(1.0, 0.0) } else { z / z.norm() };
        let ph2 = ph * ph;
        let mut zph = ph.powu(j as u32);
        let ln_r = r.ln();
        loop {
            if j > self.policy.max_terms {
                return Err(Error::NonConvergence {
                    what: what.into(),
                    terms: j,
                    tail: f64::NAN,
                });
            }
            self.e(j)?;
            let e = self.table.scaled(j);
            if e.norm() > 0.0 {
                let mag = (e.norm().ln() + ln_coef(j) + ln_r * j as f64).exp();
                sum += e / e.norm() * zph * mag;
            }
            // majorant for the next even term: |E_j z^j| <= K r^j (j >= 4)
            let jn = j + 2;
            if jn >= 4 {
                let lcn = ln_coef(jn);
                let ratio = ((ln_coef(jn + 2) - lcn).exp() * r * r).max(r * r);
                if ratio < 1.0 {
                    let next = self.k3 * (lcn + ln_r * jn as f64).exp();
                    let tail = next / (1.0 - ratio);
                    if tail <= self.policy.tol * sum.norm().max(1.0) || tail < 1e-300 {
                        break;
                    }
                }
            }
            zph *= ph2;
            j += 2;
        }
        Ok(sum)
    }

    /// `z^k P_k(tau, z)` for `k >= 1`.
    pub fn p_scaled(&mut self, k: usize, z: C64) -> Result<C64> {
        if k == 0 {
            return Err(Error::IndexError("p_scaled needs k >= 1".into()));
        }
        self.check_z(z)?;
        let s = self.z_series(
            z,
            k.max(2),
            |j| ln_binom(j - 1, k - 1),
            &format!("P_{k} z-series"),
        )?;
        Ok(C64::new(1.0, 0.0) + s * sign(k))
    }

    /// `P_k(tau, z)`; `k = 0` gives `P_0 = -log z + sum E_k z^k / k`.
    pub fn p(&mut self, k: usize, z: C64) -> Result<C64> {
        if k == 0 {
            self.check_z(z)?;
            let s = self.z_series(z, 2, |j| -(j as f64).ln(), "P_0 z-series")?;
            return Ok(-z.ln() + s);
        }
        Ok(self.p_scaled(k, z)? / z.powu(k as u32))
    }

    /// Prime form `K(tau, z) = exp(-P_0) = z exp(-sum E_k z^k / k)`.
    pub fn prime_form(&mut self, z: C64) -> Result<C64> {
        self.check_z(z)?;
        let s = self.z_series(z, 2, |j| -(j as f64).ln(), "prime form z-series")?;
        Ok(z * (-s).exp())
    }

    /// `C(k, l, tau)`; `C(k, 0) = (-1)^{k+1} E_k`.
    pub fn c_kernel(&mut self, k: usize, l: usize) -> Result<C64> {
        match (k, l) {
            (0, 0) => Err(Error::IndexError("C(0,0) is not defined".into())),
            (k, 0) | (0, k) => Ok(self.e(k)? * -sign(k)),
            _ => Ok(self.e(k + l)? * (-sign(k) * kernel_factor(k, l))),
        }
    }

    /// `D(k, l, tau, z)`; `D(k, 0, z) = (-1)^{k+1} P_k(z)`.
    pub fn d_kernel(&mut self, k: usize, l: usize, z: C64) -> Result<C64> {
        match (k, l) {
            (0, 0) => Err(Error::IndexError("D(0,0) is not defined".into())),
            (k, 0) => Ok(self.p(k, z)? * -sign(k)),
            (0, l) => Ok(self.p(l, z)? * -sign(l) * sign(l)),
            _ => Ok(self.p(k + l, z)? * (-sign(k) * kernel_factor(k, l))),
        }
    }
}

/// `P_k(tau, z)` on the disc `|z| < D(q)`.
pub fn p_function(k: usize, tau: C64, z: C64, policy: &EvalPolicy) -> Result<C64> {
    Torus::new(tau, policy)?.p(k, z)
}

/// Prime form `K(tau, z)`.
pub fn prime_form(tau: C64, z: C64, policy: &EvalPolicy) -> Result<C64> {
    Torus::new(tau, policy)?.prime_form(z)
}

/// Moment kernel `C(k, l, tau)`.
pub fn c_kernel(k: usize, l: usize, tau: C64, policy: &EvalPolicy) -> Result<C64> {
    Torus::new(tau, policy)?.c_kernel(k, l)
}

/// Moment kernel `D(k, l, tau, z)`.
pub fn d_kernel(k: usize, l: usize, tau: C64, z: C64, policy: &EvalPolicy) -> Result<C64> {
    Torus::new(tau, policy)?.d_kernel(k, l, z)
}

/// Multiplier of `eta^{-2}` for `gamma = (a b; c d)`:
/// `eta(gamma tau)^{-2} = chi(gamma) eta(tau)^{-2} (c tau + d)^{-1}`, computed at `tau`.
pub fn eta_inverse_square_multiplier(
    abcd: [i64; 4],
    tau: C64,
    policy: &EvalPolicy,
) -> Result<C64> {
    let [a, b, c, d] = abcd;
    if a * d - b * c != 1 {
        return Err(Error::input("matrix is not in SL(2, Z)"));
    }
    let ct = tau * c as f64 + d as f64;
    let gt = (tau * a as f64 + b as f64) / ct;
    let lhs = dedekind_eta(gt, policy)?.powi(-2);
    let rhs = dedekind_eta(tau, policy)?.powi(-2) / ct;
    Ok(lhs / rhs)
}
