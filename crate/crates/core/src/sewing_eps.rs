//! Sewing two tori with a complex parameter `eps`.
//!
//! Moment matrices `A_a(k,l) = eps^{(k+l)/2} / sqrt(kl) C(k, l, tau_a)`, truncated to
//! `k, l <= N`; `N` doubles from `n_start` until the determinant and the period
//! matrix are stable.

use crate::linalg::{converged, identity, phases, unit, CMat, Factored};
use crate::modular_forms::{dedekind_eta, weighted_kernel_factor, EvalPolicy, Torus, TorusPoint};
use crate::{Error, Result, C64, TWO_PI_I};

pub use crate::modular_forms::min_lattice_distance;

/// `(tau_1, tau_2, eps)` with `|eps| < D(q_1) D(q_2) / 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsPoint {
    pub tau1: C64,
    pub tau2: C64,
    pub eps: C64,
}

impl EpsPoint {
    pub fn new(tau1: C64, tau2: C64, eps: C64) -> Result<Self> {
        let d1 = TorusPoint::new(tau1)?.min_lattice_distance();
        let d2 = TorusPoint::new(tau2)?.min_lattice_distance();
        if !(eps.norm() < 0.25 * d1 * d2) {
            return Err(Error::domain(format!(
                "|eps| = {} is not below D(q1) D(q2) / 4 = {}",
                eps.norm(),
                0.25 * d1 * d2
            )));
        }
        Ok(EpsPoint { tau1, tau2, eps })
    }
}

/// Truncation controls for the sewing determinants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SewPolicy {
    pub eval: EvalPolicy,
    /// relative stability demanded between successive truncations
    pub tol: f64,
    pub n_start: usize,
    pub cap: usize,
}

impl Default for SewPolicy {
    fn default() -> Self {
        SewPolicy {
            eval: EvalPolicy::default(),
            tol: 1e-14,
            n_start: 8,
            cap: 128,
        }
    }
}

/// A symmetric 2x2 period matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodMatrix {
    pub o11: C64,
    pub o12: C64,
    pub o22: C64,
}

impl PeriodMatrix {
    pub fn new(o11: C64, o12: C64, o22: C64) -> Self {
        PeriodMatrix { o11, o12, o22 }
    }

    pub fn to_array(&self) -> [[C64; 2]; 2] {
        [[self.o11, self.o12], [self.o12, self.o22]]
    }

    /// `Im Omega` is positive definite.
    pub fn in_siegel_space(&self) -> bool {
        let (a, b, c) = (self.o11.im, self.o12.im, self.o22.im);
        a > 0.0 && a * c - b * b > 0.0
    }

    /// Largest componentwise distance.
    pub fn max_diff(&self, o: &PeriodMatrix) -> f64 {
        (self.o11 - o.o11)
            .norm()
            .max((self.o12 - o.o12).norm())
            .max((self.o22 - o.o22).norm())
    }

    pub fn act(&self, g: &Sp4) -> Result<PeriodMatrix> {
        g.act(self)
    }
}

/// An integer symplectic 4x4 matrix `[[A, B], [C, D]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sp4 {
    pub m: [[i64; 4]; 4],
}

impl Sp4 {
    /// `Gamma_1` embedding of `(a b; c d)` acting on the first handle.
    pub fn gamma1([a, b, c, d]: [i64; 4]) -> Self {
        Sp4 {
            m: [[a, 0, b, 0], [0, 1, 0, 0], [c, 0, d, 0], [0, 0, 0, 1]],
        }
    }

    pub fn gamma2([a, b, c, d]: [i64; 4]) -> Self {
        Sp4 {
            m: [[1, 0, 0, 0], [0, a, 0, b], [0, 0, 1, 0], [0, c, 0, d]],
        }
    }

    /// Handle interchange.
    pub fn beta() -> Self {
        Sp4 {
            m: [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        }
    }

    pub fn mul(&self, o: &Sp4) -> Sp4 {
        let mut m = [[0i64; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = (0..4).map(|k| self.m[i][k] * o.m[k][j]).sum();
            }
        }
        Sp4 { m }
    }

    pub fn is_symplectic(&self) -> bool {
        let j = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];
        let mut t = [[0i64; 4]; 4];
        // M^T J M
        for i in 0..4 {
            for k in 0..4 {
                t[i][k] = (0..4)
                    .map(|a| (0..4).map(|b| self.m[a][i] * j[a][b] * self.m[b][k]).sum::<i64>())
                    .sum();
            }
        }
        t == j
    }

    fn block(&self, r: usize, c: usize) -> [[C64; 2]; 2] {
        let f = |i: usize, j: usize| C64::new(self.m[2 * r + i][2 * c + j] as f64, 0.0);
        [[f(0, 0), f(0, 1)], [f(1, 0), f(1, 1)]]
    }

    /// `C Omega + D`.
    pub fn c_omega_d(&self, o: &PeriodMatrix) -> [[C64; 2]; 2] {
        add2(&mul2(&self.block(1, 0), &o.to_array()), &self.block(1, 1))
    }

    pub fn det_c_omega_d(&self, o: &PeriodMatrix) -> C64 {
        det2(&self.c_omega_d(o))
    }

    /// `(A Omega + B)(C Omega + D)^{-1}`.
    pub fn act(&self, o: &PeriodMatrix) -> Result<PeriodMatrix> {
        let num = add2(&mul2(&self.block(0, 0), &o.to_array()), &self.block(0, 1));
        let den = self.c_omega_d(o);
        let d = det2(&den);
        if d.norm() == 0.0 {
            return Err(Error::domain("C Omega + D is singular"));
        }
        let inv = [[den[1][1] / d, -den[0][1] / d], [-den[1][0] / d, den[0][0] / d]];
        let r = mul2(&num, &inv);
        Ok(PeriodMatrix::new(r[0][0], 0.5 * (r[0][1] + r[1][0]), r[1][1]))
    }
}

fn mul2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut r = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

fn add2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn det2(a: &[[C64; 2]; 2]) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// `A(k,l) = eps^{(k+l)/2} / sqrt(kl) C(k,l,tau)` for `1 <= k, l <= n`
/// (principal square root of `eps`, used consistently for every entry).
pub fn moment_matrix_eps(torus: &mut Torus, eps: C64, n: usize) -> Result<CMat> {
    torus.ensure(2 * n)?;
    let s = eps.sqrt();
    let ph = phases(s, 2 * n);
    let ln_s = s.norm().ln();
    let ln_d = torus.table().ln_d();
    let mut a = CMat::zeros(n, n);
    for k in 1..=n {
        for l in 1..=n {
            if (k + l) % 2 == 1 {
                continue;
            }
            // eps^{(k+l)/2} C(k, l) / sqrt(k l), with C(k, l) = (-1)^{k+1} kernel_factor E_{k+l}
            let sg = if k % 2 == 1 { 1.0 } else { -1.0 };
            let e = torus.table().scaled(k + l);
            a[(k - 1, l - 1)] = ph[k + l] * e * (sg * weighted_kernel_factor(k, l, ln_s - ln_d));
        }
    }
    Ok(a)
}

/// Moment matrices at a fixed truncation.
#[derive(Clone, Debug)]
pub struct MomentMatrix {
    pub n: usize,
    pub a1: CMat,
    pub a2: CMat,
}

/// Everything the epsilon scheme produces at one point.
#[derive(Clone, Debug)]
pub struct EpsEvaluation {
    pub det: C64,
    pub omega: PeriodMatrix,
    /// truncation at which the result was accepted
    pub n: usize,
}

/// Evaluator holding the two tori.
#[derive(Clone, Debug)]
pub struct EpsSewing {
    pub pt: EpsPoint,
    t1: Torus,
    t2: Torus,
    policy: SewPolicy,
}

impl EpsSewing {
    pub fn new(pt: EpsPoint, policy: &SewPolicy) -> Result<Self> {
        let pt = EpsPoint::new(pt.tau1, pt.tau2, pt.eps)?;
        Ok(EpsSewing {
            pt,
            t1: Torus::new(pt.tau1, &policy.eval)?,
            t2: Torus::new(pt.tau2, &policy.eval)?,
            policy: *policy,
        })
    }

    pub fn moments(&mut self, n: usize) -> Result<MomentMatrix> {
        Ok(MomentMatrix {
            n,
            a1: moment_matrix_eps(&mut self.t1, self.pt.eps, n)?,
            a2: moment_matrix_eps(&mut self.t2, self.pt.eps, n)?,
        })
    }

    /// Determinant and period matrix at truncation `n`.
    pub fn at_truncation(&mut self, n: usize) -> Result<EpsEvaluation> {
        let m = self.moments(n)?;
        let id = identity(n);
        let m12 = &id - &m.a1 * &m.a2;
        let m21 = &id - &m.a2 * &m.a1;
        let e1 = unit(n, 0);
        let f12 = Factored::new(&m12);
        let x = f12.solve(&e1)?;
        let y = Factored::new(&m21).solve(&e1)?;
        let eps = self.pt.eps;
        let a2x = (&m.a2 * &x)[0];
        let a1y = (&m.a1 * &y)[0];
        let o11 = self.pt.tau1 + eps * a2x / TWO_PI_I;
        let o22 = self.pt.tau2 + eps * a1y / TWO_PI_I;
        let o12 = -eps * x[0] / TWO_PI_I;
        Ok(EpsEvaluation {
            det: f12.det(),
            omega: PeriodMatrix::new(o11, o12, o22),
            n,
        })
    }

    /// Adaptive evaluation: double `N` until two successive truncations agree.
    pub fn evaluate(&mut self) -> Result<EpsEvaluation> {
        let mut n = self.policy.n_start.max(1);
        let mut prev = self.at_truncation(n)?;
        let mut last: Option<f64> = None;
        loop {
            let n2 = 2 * n;
            if n2 > self.policy.cap {
                return Err(Error::CapExceeded(format!(
                    "eps truncation not stable at N = {n} (cap {})",
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

    pub fn eta_pair(&self) -> Result<(C64, C64)> {
        Ok((
            dedekind_eta(self.pt.tau1, &self.policy.eval)?,
            dedekind_eta(self.pt.tau2, &self.policy.eval)?,
        ))
    }
}

/// `Z^(1)_M(tau) = q^{1/24} / eta(tau) = prod (1 - q^n)^{-1}`.
pub fn z1_boson(tau: C64, policy: &EvalPolicy) -> Result<C64> {
    let q = TorusPoint::new(tau)?.q();
    let qa = q.norm();
    let mut prod = C64::new(1.0, 0.0);
    let mut qn = C64::new(1.0, 0.0);
    for n in 1..=policy.max_terms {
        qn *= q;
        prod *= C64::new(1.0, 0.0) - qn;
        if qa.powi(n as i32 + 1) / (1.0 - qa).powi(2) < policy.tol {
            return Ok(prod.inv());
        }
    }
    Err(Error::NonConvergence {
        what: "boson character".into(),
        terms: policy.max_terms,
        tail: qa.powi(policy.max_terms as i32),
    })
}

/// `det(I - A_1 A_2)` with adaptive truncation.
pub fn det_i_minus_a1a2(pt: &EpsPoint, policy: &SewPolicy) -> Result<C64> {
    Ok(EpsSewing::new(*pt, policy)?.evaluate()?.det)
}

/// Genus two period matrix of the epsilon-sewn surface.
pub fn period_matrix_eps(pt: &EpsPoint, policy: &SewPolicy) -> Result<PeriodMatrix> {
    Ok(EpsSewing::new(*pt, policy)?.evaluate()?.omega)
}

/// `Z = (Z^(1)(tau_1) Z^(1)(tau_2))^c det(I - A_1 A_2)^{-c/2}` for `c` free bosons
/// (principal powers).
pub fn z2_boson_eps(pt: &EpsPoint, c: f64, policy: &SewPolicy) -> Result<C64> {
    let ev = EpsSewing::new(*pt, policy)?.evaluate()?;
    let z1 = z1_boson(pt.tau1, &policy.eval)?;
    let z2 = z1_boson(pt.tau2, &policy.eval)?;
    Ok((z1 * z2).powf(c) * (-0.5 * c * ev.det.ln()).exp())
}

/// `Z_mod = 1 / (eta(tau_1)^2 eta(tau_2)^2 det(I - A_1 A_2))` (rank two boson).
pub fn z2_boson_eps_modular(pt: &EpsPoint, policy: &SewPolicy) -> Result<C64> {
    let mut s = EpsSewing::new(*pt, policy)?;
    let ev = s.evaluate()?;
    let (e1, e2) = s.eta_pair()?;
    Ok((e1 * e1 * e2 * e2 * ev.det).inv())
}

/// Generators of the group acting on the epsilon domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GElement {
    Gamma1([i64; 4]),
    Gamma2([i64; 4]),
    Beta,
}

impl GElement {
    pub const S1: GElement = GElement::Gamma1([0, -1, 1, 0]);
    pub const T1: GElement = GElement::Gamma1([1, 1, 0, 1]);
    pub const S2: GElement = GElement::Gamma2([0, -1, 1, 0]);
    pub const T2: GElement = GElement::Gamma2([1, 1, 0, 1]);
}

fn mobius([a, b, c, d]: [i64; 4], tau: C64) -> (C64, C64) {
    let ct = tau * c as f64 + d as f64;
    ((tau * a as f64 + b as f64) / ct, ct)
}

/// Action on `(tau_1, tau_2, eps)`.
pub fn g_action(g: &GElement, pt: &EpsPoint) -> Result<EpsPoint> {
    match g {
        GElement::Gamma1(m) => {
            check_sl2(m)?;
            let (t, ct) = mobius(*m, pt.tau1);
            EpsPoint::new(t, pt.tau2, pt.eps / ct)
        }
        GElement::Gamma2(m) => {
            check_sl2(m)?;
            let (t, ct) = mobius(*m, pt.tau2);
            EpsPoint::new(pt.tau1, t, pt.eps / ct)
        }
        GElement::Beta => EpsPoint::new(pt.tau2, pt.tau1, pt.eps),
    }
}

/// The image of `g` in `Sp(4, Z)`.
pub fn g_action_h2(g: &GElement) -> Sp4 {
    match g {
        GElement::Gamma1(m) => Sp4::gamma1(*m),
        GElement::Gamma2(m) => Sp4::gamma2(*m),
        GElement::Beta => Sp4::beta(),
    }
}

pub(crate) fn check_sl2(m: &[i64; 4]) -> Result<()> {
    if m[0] * m[3] - m[1] * m[2] != 1 {
        return Err(Error::input(format!("{m:?} is not in SL(2, Z)")));
    }
    Ok(())
}
