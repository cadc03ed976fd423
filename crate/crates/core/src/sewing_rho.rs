//! Self-sewing one torus: a handle of size `rho` attached at `0` and `w`.
//!
//! The block moment matrix `R` is `2N x 2N`; row `(a, k)` sits at `a N + k - 1` for
//! copies `a = 0, 1` (the two sewing points) and `k = 1..N`.

use crate::linalg::{converged, identity, phases, unit, CMat, CVec, Factored};
use crate::modular_forms::{
    binom, dedekind_eta, kernel_factor, weighted_kernel_factor, EisensteinTable, EvalPolicy, Torus,
    TorusPoint,
};
use crate::series::{catalan_f_value, TruncatedSeries};
use crate::sewing_eps::{check_sl2, z1_boson, PeriodMatrix, SewPolicy};
use crate::{Error, Result, C64, TWO_PI_I};

/// `(tau, w, rho)` with `|w - lambda| > 2 |rho|^{1/2}` for every lattice point.
///
/// `sqrt_rho` fixes the square root used in every `rho^{k/2}`; determinants and
/// period matrices do not depend on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoPoint {
    pub tau: C64,
    pub w: C64,
    pub rho: C64,
    pub sqrt_rho: C64,
}

impl RhoPoint {
    pub fn new(tau: C64, w: C64, rho: C64) -> Result<Self> {
        Self::with_sqrt(tau, w, rho.sqrt(), rho)
    }

    /// The point `rho = -chi w^2` with `rho^{1/2} = w (-chi)^{1/2}`.
    pub fn from_chi(tau: C64, w: C64, chi: C64) -> Result<Self> {
        let u = (-chi).sqrt();
        Self::with_sqrt(tau, w, u * w, -chi * w * w)
    }

    fn with_sqrt(tau: C64, w: C64, sqrt_rho: C64, rho: C64) -> Result<Self> {
        TorusPoint::new(tau)?;
        if rho.norm() == 0.0 || !rho.norm().is_finite() {
            return Err(Error::domain("rho must be nonzero"));
        }
        let r = 2.0 * rho.norm().sqrt();
        for m in -50i32..=50 {
            for n in -50i32..=50 {
                let lam = TWO_PI_I * (tau * m as f64 + n as f64);
                if (w - lam).norm() <= r {
                    return Err(Error::domain(format!(
                        "|w - lambda| = {} is not above 2|rho|^(1/2) = {r} at lambda = {lam}",
                        (w - lam).norm()
                    )));
                }
            }
        }
        Ok(RhoPoint { tau, w, rho, sqrt_rho })
    }

    pub fn chi(&self) -> C64 {
        -self.rho / (self.w * self.w)
    }
}

/// `R` at a fixed truncation.
#[derive(Clone, Debug)]
pub struct BlockMomentMatrix {
    pub n: usize,
    pub r: CMat,
}

impl BlockMomentMatrix {
    /// `R_{ab}(k, l)` with `a, b` in `{0, 1}`.
    pub fn get(&self, a: usize, b: usize, k: usize, l: usize) -> C64 {
        self.r[(a * self.n + k - 1, b * self.n + l - 1)]
    }

    /// `R` with the copy index of the columns exchanged, `R^vee_{ab} = R_{a bbar}`.
    pub fn vee(&self) -> CMat {
        &self.r * copy_swap(self.n)
    }
}

/// Row vector `b` of length `2N`.
#[derive(Clone, Debug)]
pub struct BVector {
    pub n: usize,
    pub b: CVec,
}

impl BVector {
    /// `bbar_a = b_abar`.
    pub fn bar(&self) -> CVec {
        &copy_swap(self.n) * &self.b
    }
}

/// Permutation exchanging the two copies.
pub fn copy_swap(n: usize) -> CMat {
    let mut p = CMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        p[(k, n + k)] = C64::new(1.0, 0.0);
        p[(n + k, k)] = C64::new(1.0, 0.0);
    }
    p
}

/// Result of a rho evaluation.
#[derive(Clone, Debug)]
pub struct RhoEvaluation {
    pub det: C64,
    pub omega: PeriodMatrix,
    pub n: usize,
}

/// Evaluator holding the torus.
#[derive(Clone, Debug)]
pub struct RhoSewing {
    pub pt: RhoPoint,
    torus: Torus,
    policy: SewPolicy,
    ps: Vec<C64>,
}

impl RhoSewing {
    pub fn new(pt: RhoPoint, policy: &SewPolicy) -> Result<Self> {
        let mut torus = Torus::new(pt.tau, &policy.eval)?;
        if pt.w.norm() >= torus.d_min() {
            return Err(Error::domain(format!(
                "|w| = {} must be below D(q) = {} for the series evaluation",
                pt.w.norm(),
                torus.d_min()
            )));
        }
        torus.ensure(64)?;
        Ok(RhoSewing {
            pt,
            torus,
            policy: *policy,
            ps: vec![C64::new(1.0, 0.0)],
        })
    }

    /// `w^n P_n(tau, w)` for `n = 1..=m` (cached).
    fn scaled_p(&mut self, m: usize) -> Result<()> {
        while self.ps.len() <= m {
            let n = self.ps.len();
            let v = self.torus.p_scaled(n, self.pt.w)?;
            self.ps.push(v);
        }
        Ok(())
    }

    pub fn moments(&mut self, n: usize) -> Result<(BlockMomentMatrix, BVector)> {
        self.scaled_p(2 * n)?;
        self.torus.ensure(2 * n)?;
        let s = self.pt.sqrt_rho;
        let u = s / self.pt.w;
        let mut upw = vec![C64::new(1.0, 0.0); 2 * n + 1];
        let mut spw = vec![C64::new(1.0, 0.0); 2 * n + 1];
        for i in 1..=2 * n {
            upw[i] = upw[i - 1] * u;
            spw[i] = spw[i - 1] * s;
        }
        let (ln_u, ln_s) = (u.norm().ln(), s.norm().ln());
        let ln_d = self.torus.table().ln_d();
        let (ph_u, ph_s) = (phases(u, 2 * n), phases(s, 2 * n));
        let mut r = CMat::zeros(2 * n, 2 * n);
        for k in 1..=n {
            for l in 1..=n {
                let m = k + l;
                let sk = if k % 2 == 1 { 1.0 } else { -1.0 };
                let sl = if l % 2 == 1 { 1.0 } else { -1.0 };
                let dpart = ph_u[m] * self.ps[m] * weighted_kernel_factor(k, l, ln_u);
                r[(k - 1, l - 1)] = -dpart * sk;
                r[(n + k - 1, n + l - 1)] = -dpart * sl;
                if m % 2 == 0 {
                    let f = weighted_kernel_factor(k, l, ln_s - ln_d);
                    let c = -ph_s[m] * self.torus.table().scaled(m) * f * sk;
                    r[(k - 1, n + l - 1)] = c;
                    r[(n + k - 1, l - 1)] = c;
                }
            }
        }
        let mut b = CVec::zeros(2 * n);
        for k in 1..=n {
            let v = (upw[k] * self.ps[k] - spw[k] * self.torus.table().get(k)) / (k as f64).sqrt();
            b[k - 1] = -v;
            b[n + k - 1] = if k % 2 == 0 { v } else { -v };
        }
        Ok((BlockMomentMatrix { n, r }, BVector { n, b }))
    }

    pub fn at_truncation(&mut self, n: usize) -> Result<RhoEvaluation> {
        let (r, b) = self.moments(n)?;
        let m = Factored::new(&(&identity(2 * n) - &r.r));
        let x0 = m.solve(&unit(2 * n, 0))?;
        let x1 = m.solve(&unit(2 * n, n))?;
        let y = m.solve(&b.bar())?;
        let sig_t11 = x0[0] + x0[n] + x1[0] + x1[n];
        let sig_bt1 = b.b.dot(&x0) + b.b.dot(&x1);
        let btb = b.b.dot(&y);
        let pt = self.pt;
        let k = self.torus.prime_form(pt.w)?;
        let o11 = pt.tau - pt.rho * sig_t11 / TWO_PI_I;
        let o12 = (pt.w - pt.sqrt_rho * sig_bt1) / TWO_PI_I;
        let o22 = ((-pt.rho / (k * k)).ln() - btb) / TWO_PI_I;
        Ok(RhoEvaluation {
            det: m.det(),
            omega: PeriodMatrix::new(o11, o12, o22),
            n,
        })
    }

    pub fn evaluate(&mut self) -> Result<RhoEvaluation> {
        let mut n = self.policy.n_start.max(1);
        let mut prev = self.at_truncation(n)?;
        let mut last: Option<f64> = None;
        loop {
            let n2 = 2 * n;
            if n2 > self.policy.cap {
                return Err(Error::CapExceeded(format!(
                    "rho truncation not stable at N = {n} (cap {})",
                    self.policy.cap
                )));
            }
            let cur = self.at_truncation(n2)?;
            let scale = 1.0 + cur.omega.o11.norm() + cur.omega.o22.norm();
            let change = ((cur.det - prev.det).norm() / cur.det.norm())
                .max(cur.omega.max_diff(&prev.omega) / scale);
            if converged(last, change, self.policy.tol) {
                return Ok(cur);
            }
            last = Some(change);
            prev = cur;
            n = n2;
        }
    }

    pub fn torus(&mut self) -> &mut Torus {
        &mut self.torus
    }
}

/// `R` and `b` at truncation `n`.
pub fn moment_matrix_rho(pt: &RhoPoint, n: usize, policy: &SewPolicy) -> Result<(BlockMomentMatrix, BVector)> {
    RhoSewing::new(*pt, policy)?.moments(n)
}

pub fn det_i_minus_r(pt: &RhoPoint, policy: &SewPolicy) -> Result<C64> {
    Ok(RhoSewing::new(*pt, policy)?.evaluate()?.det)
}

pub fn period_matrix_rho(pt: &RhoPoint, policy: &SewPolicy) -> Result<PeriodMatrix> {
    Ok(RhoSewing::new(*pt, policy)?.evaluate()?.omega)
}

/// `Z = Z^(1)(tau)^c det(I - R)^{-c/2}` for `c` free bosons (principal powers).
pub fn z2_boson_rho(pt: &RhoPoint, c: f64, policy: &SewPolicy) -> Result<C64> {
    let ev = RhoSewing::new(*pt, policy)?.evaluate()?;
    Ok(z1_boson(pt.tau, &policy.eval)?.powf(c) * (-0.5 * c * ev.det.ln()).exp())
}

/// `Z_mod = 1 / (eta(tau)^2 det(I - R))` (rank two boson).
pub fn z2_boson_rho_modular(pt: &RhoPoint, policy: &SewPolicy) -> Result<C64> {
    let ev = RhoSewing::new(*pt, policy)?.evaluate()?;
    let e = dedekind_eta(pt.tau, &policy.eval)?;
    Ok((e * e * ev.det).inv())
}

/// `(tau, w, rho) -> (gamma tau, w/(c tau + d), rho/(c tau + d)^2)`.
pub fn gamma1_action(m: [i64; 4], pt: &RhoPoint) -> Result<RhoPoint> {
    check_sl2(&m)?;
    let [a, b, c, d] = m;
    let ct = pt.tau * c as f64 + d as f64;
    let tau = (pt.tau * a as f64 + b as f64) / ct;
    RhoPoint::with_sqrt(tau, pt.w / ct, pt.sqrt_rho / ct, pt.rho / (ct * ct))
}

/// `w -> w + 2 pi i (a tau + b)`.
pub fn jacobi_action(a: i64, b: i64, pt: &RhoPoint) -> Result<RhoPoint> {
    let w = pt.w + TWO_PI_I * (pt.tau * a as f64 + b as f64);
    RhoPoint::with_sqrt(pt.tau, w, pt.sqrt_rho, pt.rho)
}

/// Coefficients of `w^0, w^2, w^4` of `R`, `b` and `T = (I - R)^{-1}` along
/// `rho = -chi w^2` (with `rho^{1/2} = w (-chi)^{1/2}`), at truncation `n`.
#[derive(Clone, Debug)]
pub struct RhoWExpansion {
    pub n: usize,
    pub r: [CMat; 3],
    pub b: [CVec; 3],
    pub t: [CMat; 3],
}

/// See [`RhoWExpansion`]; `order` is the highest power of `w` kept (0, 2 or 4).
pub fn rho_w_expansion(tau: C64, chi: C64, n: usize, order: usize, policy: &EvalPolicy) -> Result<RhoWExpansion> {
    if order > 4 || order % 2 == 1 {
        return Err(Error::input("order must be 0, 2 or 4"));
    }
    let mut tab = EisensteinTable::new(tau, 2 * n + 4, *policy)?;
    let u = (-chi).sqrt();
    let mut upw = vec![C64::new(1.0, 0.0); 2 * n + 1];
    for i in 1..=2 * n {
        upw[i] = upw[i - 1] * u;
    }
    let mut r = [CMat::zeros(2 * n, 2 * n), CMat::zeros(2 * n, 2 * n), CMat::zeros(2 * n, 2 * n)];
    let mut bv = [CVec::zeros(2 * n), CVec::zeros(2 * n), CVec::zeros(2 * n)];
    for (idx, m2) in [0usize, 2, 4].into_iter().enumerate() {
        if m2 > order {
            break;
        }
        let e_m2 = if m2 > 0 { tab.e(m2)? } else { C64::new(0.0, 0.0) };
        // coefficient of w^{m2} in w^m P_m(w)
        let pcoef = |m: usize| -> C64 {
            if m2 == 0 {
                C64::new(1.0, 0.0)
            } else if m2 >= m {
                let sg = if m % 2 == 0 { 1.0 } else { -1.0 };
                e_m2 * (sg * binom(m2 - 1, m - 1))
            } else {
                C64::new(0.0, 0.0)
            }
        };
        for k in 1..=n {
            for l in 1..=n {
                let m = k + l;
                let f = kernel_factor(k, l) / ((k * l) as f64).sqrt();
                let sk = if k % 2 == 1 { 1.0 } else { -1.0 };
                let sl = if l % 2 == 1 { 1.0 } else { -1.0 };
                let dpart = upw[m] * pcoef(m) * f;
                r[idx][(k - 1, l - 1)] = -dpart * sk;
                r[idx][(n + k - 1, n + l - 1)] = -dpart * sl;
                if m == m2 {
                    let c = -upw[m] * tab.e(m)? * f * sk;
                    r[idx][(k - 1, n + l - 1)] = c;
                    r[idx][(n + k - 1, l - 1)] = c;
                }
            }
            let mut v = upw[k] * pcoef(k);
            if k == m2 {
                v -= upw[k] * tab.e(k)?;
            }
            v /= (k as f64).sqrt();
            bv[idx][k - 1] = -v;
            bv[idx][n + k - 1] = if k % 2 == 0 { v } else { -v };
        }
    }
    let id = identity(2 * n);
    let t0 = (&id - &r[0])
        .try_inverse()
        .ok_or_else(|| Error::domain("I - R^(0) is singular"))?;
    let t2 = &t0 * &r[1] * &t0;
    let t4 = &t0 * &r[1] * &t0 * &r[1] * &t0 + &t0 * &r[2] * &t0;
    Ok(RhoWExpansion { n, r, b: bv, t: [t0, t2, t4] })
}

/// `E_k` as a function of the nome `q` (`0 <= |q| < 1`); `q = 0` gives the constant term.
pub fn eisenstein_at_nome(k: usize, q: C64, policy: &EvalPolicy) -> Result<C64> {
    if q.norm() == 0.0 {
        return Ok(C64::new(-crate::modular_forms::bernoulli_over_factorial(k), 0.0));
    }
    if q.norm() >= 1.0 {
        return Err(Error::domain("|q| must be below 1"));
    }
    let tau = q.ln() / TWO_PI_I;
    crate::modular_forms::eisenstein(k, tau, policy)
}

/// `G(chi) = 1/12 + E_2(f(chi))`.
pub fn g_of_chi(chi: C64, policy: &EvalPolicy) -> Result<C64> {
    Ok(eisenstein_at_nome(2, catalan_f_value(chi), policy)? + 1.0 / 12.0)
}

/// Small-`w` expansions of `2 pi i Omega_ij` along `rho = -chi w^2`.
#[derive(Clone, Debug)]
pub struct ChiExpansion {
    /// `2 pi i Omega_11 + O(w^6)`
    pub o11: TruncatedSeries,
    /// `2 pi i Omega_12 + O(w^5)`
    pub o12: TruncatedSeries,
    /// `2 pi i Omega_22 + O(w^6)`, with the principal `log f(chi)`
    pub o22: TruncatedSeries,
}

pub fn period_matrix_chi_expansion(tau: C64, chi: C64, policy: &EvalPolicy) -> Result<ChiExpansion> {
    let e2 = crate::modular_forms::eisenstein(2, tau, policy)?;
    let e4 = crate::modular_forms::eisenstein(4, tau, policy)?;
    let g = g_of_chi(chi, policy)?;
    let f = catalan_f_value(chi);
    if f.norm() == 0.0 {
        return Err(Error::domain("chi = 0 has no handle"));
    }
    let a = C64::new(1.0, 0.0) - chi * 4.0;
    let z = C64::new(0.0, 0.0);
    let o11 = TruncatedSeries::from_coeffs(&[TWO_PI_I * tau, z, a * g, z, a * a * g * g * e2], 6);
    let sa = a.sqrt();
    let o12 = TruncatedSeries::from_coeffs(&[z, sa, z, sa * a * g * e2], 5);
    let o22 = TruncatedSeries::from_coeffs(&[f.ln(), z, a * e2, z, a * a * (g * e2 * e2 + e4 * 0.5)], 6);
    Ok(ChiExpansion { o11, o12, o22 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn domain_checks() {
        let tau = c(0.0, 2.0);
        assert!(RhoPoint::new(tau, c(0.3, 0.0), c(-0.005, 0.0)).is_ok());
        assert!(matches!(RhoPoint::new(tau, c(0.3, 0.0), c(0.05, 0.0)), Err(Error::DomainError(_))));
        assert!(matches!(RhoPoint::new(tau, c(0.3, 0.0), c(0.0, 0.0)), Err(Error::DomainError(_))));
    }

    #[test]
    fn block_symmetry() {
        // R_ab(k,l) = R_{abar bbar}(l,k)
        let pt = RhoPoint::new(c(0.1, 1.5), c(0.3, 0.1), c(-0.004, 0.001)).unwrap();
        let (r, _) = moment_matrix_rho(&pt, 6, &SewPolicy::default()).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for k in 1..=6 {
                    for l in 1..=6 {
                        let x = r.get(a, b, k, l);
                        let y = r.get(1 - a, 1 - b, l, k);
                        assert!((x - y).norm() <= 1e-14 * x.norm().max(1e-300));
                    }
                }
            }
        }
    }

    #[test]
    fn sqrt_choice_is_invisible() {
        let p = SewPolicy::default();
        let pt = RhoPoint::new(c(0.0, 2.0), c(0.3, 0.0), c(-0.005, 0.0)).unwrap();
        let mut alt = pt;
        alt.sqrt_rho = -pt.sqrt_rho;
        let a = RhoSewing::new(pt, &p).unwrap().evaluate().unwrap();
        let b = RhoSewing::new(alt, &p).unwrap().evaluate().unwrap();
        assert!((a.det - b.det).norm() < 1e-14);
        assert!(a.omega.max_diff(&b.omega) < 1e-14);
    }

    #[test]
    fn vee_permutation_on_alternate_factors() {
        let pt = RhoPoint::new(c(0.0, 1.5), c(0.4, 0.2), c(-0.01, 0.003)).unwrap();
        for n in [4usize, 8, 16] {
            let (r, _) = moment_matrix_rho(&pt, n, &SewPolicy::default()).unwrap();
            let id = identity(2 * n);
            let p = copy_swap(n);
            let d1 = det(&(&id - &r.r));
            let d2 = det(&(&id - &r.vee() * &p));
            assert!((d1 - d2).norm() < 1e-15);
        }
    }
}
