//! Even lattices, theta functions and lattice VOA partition functions.

use serde::{Deserialize, Serialize};

use crate::graphs::RhoGraphSums;
use crate::modular_forms::{EvalPolicy, Torus, TorusPoint};
use crate::sewing_eps::{z1_boson, EpsPoint, EpsSewing, PeriodMatrix, SewPolicy};
use crate::sewing_rho::{RhoPoint, RhoSewing};
use crate::voa_fock::{lattice_one_point_sum, liz_norm, FockPartition};
use crate::{Error, Result, C64, TWO_PI_I};

/// Positive definite even lattice given by its Gram matrix on a fixed basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct EvenLattice {
    gram: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    rank: usize,
    gram: Vec<Vec<i64>>,
}

impl TryFrom<LatticeJson> for EvenLattice {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<Self> {
        if j.gram.len() != j.rank {
            return Err(Error::input(format!(
                "rank {} but the Gram matrix has {} rows",
                j.rank,
                j.gram.len()
            )));
        }
        EvenLattice::new(j.gram)
    }
}

impl From<EvenLattice> for LatticeJson {
    fn from(l: EvenLattice) -> Self {
        LatticeJson {
            rank: l.rank(),
            gram: l.gram,
        }
    }
}

impl EvenLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let l = gram.len();
        if l == 0 {
            return Err(Error::input("rank must be positive"));
        }
        for (i, row) in gram.iter().enumerate() {
            if row.len() != l {
                return Err(Error::input("Gram matrix is not square"));
            }
            if row[i] % 2 != 0 {
                return Err(Error::input(format!("diagonal entry {} is odd", row[i])));
            }
            for j in 0..l {
                if gram[j][i] != row[j] {
                    return Err(Error::input("Gram matrix is not symmetric"));
                }
            }
        }
        // leading principal minors, Bareiss elimination in exact integers
        let mut m: Vec<Vec<i128>> = gram.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut prev = 1i128;
        for k in 0..l {
            if m[k][k] <= 0 {
                return Err(Error::input(format!("leading minor {} is not positive", k + 1)));
            }
            for i in k + 1..l {
                for j in k + 1..l {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        Ok(EvenLattice { gram })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::input(format!("lattice JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("lattice serializes")
    }

    pub fn a1() -> Self {
        EvenLattice { gram: vec![vec![2]] }
    }

    /// Root lattice of a simply laced Dynkin diagram given by its edges.
    pub fn root_lattice(rank: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = vec![vec![0; rank]; rank];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(i, j) in edges {
            if i >= rank || j >= rank || i == j {
                return Err(Error::input("bad Dynkin edge"));
            }
            g[i][j] = -1;
            g[j][i] = -1;
        }
        Self::new(g)
    }

    pub fn e8() -> Self {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)];
        Self::root_lattice(8, &edges).expect("E8 Gram matrix is valid")
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn determinant(&self) -> f64 {
        crate::linalg::det(&crate::linalg::CMat::from_fn(self.rank(), self.rank(), |i, j| {
            C64::new(self.gram[i][j] as f64, 0.0)
        }))
        .re
    }

    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                s += ai * self.gram[i][j] * bj;
            }
        }
        s
    }

    pub fn norm(&self, a: &[i64]) -> i64 {
        self.inner(a, a)
    }

    /// Lower triangular `L` with `gram = L L^T`; row `j` holds generator `j` in an
    /// orthonormal frame.
    pub fn cholesky(&self) -> Vec<Vec<f64>> {
        let l = self.rank();
        let mut c = vec![vec![0.0; l]; l];
        for i in 0..l {
            for j in 0..=i {
                let mut s = self.gram[i][j] as f64;
                for k in 0..j {
                    s -= c[i][k] * c[j][k];
                }
                c[i][j] = if i == j { s.sqrt() } else { s / c[j][j] };
            }
        }
        c
    }

    /// Coordinates of `alpha` in the orthonormal frame, i.e. `(a_i, alpha)`.
    pub fn frame_coordinates(&self, alpha: &[i64]) -> Vec<f64> {
        let c = self.cholesky();
        let l = self.rank();
        (0..l)
            .map(|i| (0..l).map(|j| alpha[j] as f64 * c[j][i]).sum())
            .collect()
    }

    /// All `alpha` with `(alpha, alpha) <= bound`, each once, by Fincke-Pohst
    /// enumeration on the quadratic form completed from the last coordinate.
    pub fn short_vectors(&self, bound: i64) -> Vec<Vec<i64>> {
        let l = self.rank();
        if bound < 0 {
            return Vec::new();
        }
        // q_ii, q_ij with Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
        let g: Vec<Vec<f64>> = self.gram.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let mut q = g.clone();
        for i in 0..l {
            for j in i + 1..l {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..l {
                for j in k..l {
                    q[k][j] -= q[k][i] * q[i][j];
                }
            }
        }
        let slack = 1e-9 * (1.0 + bound as f64);
        let mut out = Vec::new();
        let mut x = vec![0i64; l];
        fn rec(
            i: usize,
            rem: f64,
            q: &[Vec<f64>],
            x: &mut Vec<i64>,
            slack: f64,
            lat: &EvenLattice,
            bound: i64,
            out: &mut Vec<Vec<i64>>,
        ) {
            let l = q.len();
            let c: f64 = -(i + 1..l).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
            let r = ((rem + slack).max(0.0) / q[i][i]).sqrt();
            let lo = (c - r).ceil() as i64;
            let hi = (c + r).floor() as i64;
            for v in lo..=hi {
                x[i] = v;
                let t = v as f64 - c;
                let left = rem - q[i][i] * t * t;
                if i == 0 {
                    if lat.norm(x) <= bound {
                        out.push(x.clone());
                    }
                } else {
                    rec(i - 1, left, q, x, slack, lat, bound, out);
                }
            }
            x[i] = 0;
        }
        rec(l - 1, bound as f64, &q, &mut x, slack, self, bound, &mut out);
        out.sort_by_key(|v| (self.norm(v), v.clone()));
        out
    }

    /// Cocycle `eps(alpha, beta) = (-1)^{B(alpha, beta)}` with `B` the lower
    /// triangle of the Gram matrix and half its diagonal.
    pub fn cocycle(&self, a: &[i64], b: &[i64]) -> i64 {
        let l = self.rank();
        let mut s = 0i64;
        for i in 0..l {
            s += a[i] * b[i] * (self.gram[i][i] / 2);
            for j in 0..i {
                s += a[i] * b[j] * self.gram[i][j];
            }
        }
        if s.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

/// Truncation control for theta sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaPolicy {
    /// absolute bound on the discarded tail
    pub tol: f64,
    /// largest norm bound tried before giving up
    pub max_norm: i64,
}

impl Default for ThetaPolicy {
    fn default() -> Self {
        ThetaPolicy {
            tol: 1e-15,
            max_norm: 64,
        }
    }
}

/// Upper bound on `#{alpha : (alpha, alpha) <= x}` in a rank `l` even lattice
/// (balls of radius `1/sqrt 2` around lattice points are disjoint).
fn count_bound(l: usize, x: f64) -> f64 {
    (1.0 + (2.0 * x).sqrt()).powi(l as i32)
}

/// Bound on `sum_{N > bound, N even} c(N) exp(-pi lam N)`, where `c(N)` counts
/// the terms whose exponent norm is `N` and `copies` vectors are summed.
fn gaussian_tail(l: usize, copies: i32, lam: f64, bound: i64) -> f64 {
    let mut s = 0.0;
    let mut n = bound + if bound % 2 == 0 { 2 } else { 1 };
    loop {
        let t = count_bound(l, n as f64).powi(copies) * (-std::f64::consts::PI * lam * n as f64).exp();
        s += t;
        let next = count_bound(l, n as f64 + 2.0).powi(copies) * (-std::f64::consts::PI * lam * (n + 2) as f64).exp();
        let ratio = next / t;
        if ratio < 0.5 && t < 1e-3 * s.max(1e-300) {
            // geometric remainder
            return s + next / (1.0 - ratio);
        }
        if n > 100_000 {
            return f64::INFINITY;
        }
        n += 2;
    }
}

/// Smallest even norm bound whose dropped tail is below `tol`.
fn norm_bound(l: usize, copies: i32, lam: f64, policy: &ThetaPolicy) -> Result<i64> {
    if lam <= 0.0 {
        return Err(Error::domain("imaginary part is not positive definite"));
    }
    let mut b = 0;
    loop {
        let tail = gaussian_tail(l, copies, lam, b);
        if tail < policy.tol {
            return Ok(b);
        }
        if b >= policy.max_norm {
            return Err(Error::NonConvergence {
                what: "theta series".into(),
                terms: b as usize,
                tail,
            });
        }
        b += 2;
    }
}

/// Genus one `theta_L(tau) = sum q^{(alpha, alpha)/2}`.
pub fn theta1(lat: &EvenLattice, tau: C64, policy: &ThetaPolicy) -> Result<C64> {
    let q = TorusPoint::new(tau)?.q();
    let b = norm_bound(lat.rank(), 1, tau.im, policy)?;
    let mut s = C64::new(0.0, 0.0);
    for v in lat.short_vectors(b) {
        s += q.powf(lat.norm(&v) as f64 / 2.0);
    }
    Ok(s)
}

/// Siegel theta function
/// `sum_{alpha, beta} exp(pi i ((alpha,alpha) O11 - 2 (alpha,beta) O12 + (beta,beta) O22))`.
pub fn siegel_theta2(lat: &EvenLattice, om: &PeriodMatrix, policy: &ThetaPolicy) -> Result<C64> {
    let (a, b, d) = (om.o11.im, om.o12.im, om.o22.im);
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
    let lam = 0.5 * (tr - disc);
    let bound = norm_bound(lat.rank(), 2, lam, policy)?;
    theta2_with_bound(lat, om, bound)
}

/// Siegel theta summed over `(alpha, alpha), (beta, beta) <= bound`.
pub fn theta2_with_bound(lat: &EvenLattice, om: &PeriodMatrix, bound: i64) -> Result<C64> {
    let vs = lat.short_vectors(bound);
    let pi_i = C64::new(0.0, std::f64::consts::PI);
    let norms: Vec<f64> = vs.iter().map(|v| lat.norm(v) as f64).collect();
    let e1: Vec<C64> = norms.iter().map(|n| (pi_i * om.o11 * *n).exp()).collect();
    let e2: Vec<C64> = norms.iter().map(|n| (pi_i * om.o22 * *n).exp()).collect();
    // (alpha, beta) = alpha^T G beta; precompute G beta
    let l = lat.rank();
    let gb: Vec<Vec<i64>> = vs
        .iter()
        .map(|v| (0..l).map(|i| (0..l).map(|j| lat.gram[i][j] * v[j]).sum()).collect())
        .collect();
    let cross = (-2.0 * pi_i * om.o12).exp();
    let max_ab = bound.max(1) as i64;
    let powers: Vec<C64> = (-max_ab..=max_ab).map(|k| cross.powi(k as i32)).collect();
    let mut s = C64::new(0.0, 0.0);
    for (i, a) in vs.iter().enumerate() {
        let mut row = C64::new(0.0, 0.0);
        for (j, g) in gb.iter().enumerate() {
            let ab: i64 = a.iter().zip(g).map(|(x, y)| x * y).sum();
            row += e2[j] * powers[(ab + max_ab) as usize];
        }
        s += e1[i] * row;
    }
    Ok(s)
}

/// `Z_{V_L} = Z_M^{(2)}(eps)^l theta_L^{(2)}(F^eps)`, together with the period matrix.
pub fn z2_lattice_eps(
    lat: &EvenLattice,
    pt: &EpsPoint,
    sew: &SewPolicy,
    theta: &ThetaPolicy,
) -> Result<(C64, PeriodMatrix)> {
    let ev = EpsSewing::new(*pt, sew)?.evaluate()?;
    let l = lat.rank() as f64;
    let z1 = z1_boson(pt.tau1, &sew.eval)? * z1_boson(pt.tau2, &sew.eval)?;
    let boson = z1.powf(l) * (-0.5 * l * ev.det.ln()).exp();
    Ok((boson * siegel_theta2(lat, &ev.omega, theta)?, ev.omega))
}

/// `Z_{V_L} = Z_M^{(2)}(rho)^l theta_L^{(2)}(F^rho)`, together with the period matrix.
pub fn z2_lattice_rho(
    lat: &EvenLattice,
    pt: &RhoPoint,
    sew: &SewPolicy,
    theta: &ThetaPolicy,
) -> Result<(C64, PeriodMatrix)> {
    let ev = RhoSewing::new(*pt, sew)?.evaluate()?;
    let l = lat.rank() as f64;
    let boson = z1_boson(pt.tau, &sew.eval)?.powf(l) * (-0.5 * l * ev.det.ln()).exp();
    Ok((boson * siegel_theta2(lat, &ev.omega, theta)?, ev.omega))
}

/// Genus one `Z_{V_L}(tau) = Z_M(tau)^l theta_L(tau)`.
pub fn z1_lattice(lat: &EvenLattice, tau: C64, eval: &EvalPolicy, theta: &ThetaPolicy) -> Result<C64> {
    Ok(z1_boson(tau, eval)?.powf(lat.rank() as f64) * theta1(lat, tau, theta)?)
}

/// `2 pi i` times the exponent `(beta,beta) O11 + 2 (alpha,beta) O12 + (alpha,alpha) O22`
/// of the rho-sewn theta term, assembled from the graph sums: the `(beta, beta)`
/// block from necklaces with two end nodes on copy one, the cross block from the
/// end node weights `rho^{1/2} b`, and the `(alpha, alpha)` block from `b R b`.
pub fn rho_theta_exponent(
    sums: &RhoGraphSums,
    pt: &RhoPoint,
    torus: &mut Torus,
    alpha_sq: i64,
    alpha_beta: i64,
    beta_sq: i64,
) -> Result<C64> {
    let k = torus.prime_form(pt.w)?;
    let e11 = TWO_PI_I * pt.tau - pt.rho * sums.omega_11;
    let e12 = pt.w - pt.sqrt_rho * sums.omega_b1;
    let e22 = (-pt.rho / (k * k)).ln() - sums.omega_bbbar;
    Ok(e11 * beta_sq as f64 + e12 * (2 * alpha_beta) as f64 + e22 * alpha_sq as f64)
}

/// Fock states of `M^l` of weight `n`: one partition per colour.
fn coloured_partitions(l: usize, n: usize) -> Vec<Vec<FockPartition>> {
    if l == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for k in 0..=n {
        for p in FockPartition::all_of_weight(k) {
            for mut rest in coloured_partitions(l - 1, n - k) {
                rest.insert(0, p.clone());
                out.push(rest);
            }
        }
    }
    out
}

/// Largest rank accepted by [`brute_z2_lattice_eps`].
pub const BRUTE_RANK_CAP: usize = 2;

/// `Z_{V_L} / (Z_M(tau_1) Z_M(tau_2))^l` through `eps^{n_max}` from genus one
/// 1-point functions on `M^l (x) e^alpha`, colour by colour; lattice vectors with
/// norm at most `norm_cap` are summed on each torus.
pub fn brute_z2_lattice_eps(
    lat: &EvenLattice,
    n_max: usize,
    norm_cap: i64,
    tau1: C64,
    tau2: C64,
    policy: &EvalPolicy,
) -> Result<crate::series::TruncatedSeries> {
    let l = lat.rank();
    if l > BRUTE_RANK_CAP {
        return Err(Error::CapExceeded(format!(
            "brute lattice oracle takes rank <= {BRUTE_RANK_CAP}, got {l}"
        )));
    }
    let cap = if l == 1 { crate::voa_fock::EPS_ORDER_CAP } else { 4 };
    if n_max > cap {
        return Err(Error::CapExceeded(format!(
            "epsilon order {n_max} above the rank {l} oracle cap {cap}"
        )));
    }
    let mut t1 = Torus::new(tau1, policy)?;
    let mut t2 = Torus::new(tau2, policy)?;
    let q1 = t1.q();
    let q2 = t2.q();
    let states: Vec<Vec<Vec<FockPartition>>> = (0..=n_max).map(|n| coloured_partitions(l, n)).collect();
    // per torus and lattice vector: q^{alpha^2/2} prod_colours Gamma sums
    let side = |t: &mut Torus, q: C64| -> Result<Vec<Vec<Vec<C64>>>> {
        let mut per_vec = Vec::new();
        for v in lat.short_vectors(norm_cap) {
            let fr = lat.frame_coordinates(&v);
            let qa = q.powf(lat.norm(&v) as f64 / 2.0);
            let mut by_n = Vec::new();
            for st in &states {
                let mut vals = Vec::new();
                for s in st {
                    let mut g = qa;
                    for (lam, a) in s.iter().zip(&fr) {
                        g *= lattice_one_point_sum(lam, *a, t)?;
                    }
                    vals.push(g);
                }
                by_n.push(vals);
            }
            per_vec.push(by_n);
        }
        Ok(per_vec)
    };
    let s1 = side(&mut t1, q1)?;
    let s2 = side(&mut t2, q2)?;
    let mut c = vec![C64::new(0.0, 0.0); n_max + 1];
    for (n, st) in states.iter().enumerate() {
        for (i, s) in st.iter().enumerate() {
            let norm: C64 = s.iter().map(liz_norm).product();
            let a: C64 = s1.iter().map(|v| v[n][i]).sum();
            let b: C64 = s2.iter().map(|v| v[n][i]).sum();
            c[n] += a * b / norm;
        }
    }
    Ok(crate::series::TruncatedSeries::from_coeffs(&c, n_max as i64 + 1))
}
