//! Fock space oracles for the rank one free boson.
//!
//! States are the square-bracket Fock vectors `a[-1]^{e_1} ... a[-p]^{e_p} 1`,
//! indexed by partitions. Genus one 1- and 2-point functions are sums over
//! involutions of the labelled set `Phi_lambda`, and the genus two partition
//! functions are assembled order by order from them.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::linalg::CMat;
use crate::modular_forms::{binom, EvalPolicy, Torus, TorusPoint};
use crate::series::TruncatedSeries;
use crate::sewing_eps::z1_boson;
use crate::{Error, Result, C64};

/// Largest epsilon order accepted by [`brute_z2_eps`].
pub const EPS_ORDER_CAP: usize = 8;
/// Largest rho order accepted by [`brute_z2_rho`].
pub const RHO_ORDER_CAP: usize = 6;

/// Partition `{1^{e_1} 2^{e_2} ...}` stored as multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockPartition {
    mult: Vec<usize>,
}

impl FockPartition {
    /// `mult[i]` is the multiplicity of the part `i + 1`.
    pub fn new(mult: &[usize]) -> Self {
        let mut m = mult.to_vec();
        while m.last() == Some(&0) {
            m.pop();
        }
        FockPartition { mult: m }
    }

    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        let mut m = Vec::new();
        for &p in parts {
            if p == 0 {
                return Err(Error::input("parts must be positive"));
            }
            if m.len() < p {
                m.resize(p, 0);
            }
            m[p - 1] += 1;
        }
        Ok(FockPartition { mult: m })
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.mult
    }

    /// `n = sum i e_i`.
    pub fn weight(&self) -> usize {
        self.mult.iter().enumerate().map(|(i, e)| (i + 1) * e).sum()
    }

    /// Labels of `Phi_lambda` in increasing order.
    pub fn labels(&self) -> Vec<usize> {
        self.mult
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat(i + 1).take(e))
            .collect()
    }

    /// All partitions of `n`.
    pub fn all_of_weight(n: usize) -> Vec<FockPartition> {
        fn go(left: usize, maxp: usize, cur: &mut Vec<usize>, out: &mut Vec<FockPartition>) {
            if left == 0 {
                out.push(FockPartition::from_parts(cur).expect("positive parts"));
                return;
            }
            for p in (1..=left.min(maxp)).rev() {
                cur.push(p);
                go(left - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }
}

/// `<v, v> = prod (-i)^{e_i} e_i!`.
pub fn liz_norm(lambda: &FockPartition) -> C64 {
    let mut v = 1.0;
    for (i, &e) in lambda.mult.iter().enumerate() {
        let part = -((i + 1) as f64);
        for j in 1..=e {
            v *= part * j as f64;
        }
    }
    C64::new(v, 0.0)
}

/// Involution of `{0, .., n-1}`: its 2-cycles and fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub pairs: Vec<(usize, usize)>,
    pub fixed: Vec<usize>,
}

impl Involution {
    pub fn as_permutation(&self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for &(a, b) in &self.pairs {
            p[a] = b;
            p[b] = a;
        }
        p
    }
}

/// Involutions of `{0..n-1}` whose fixed points all satisfy `may_fix`, built by
/// pairing the smallest free element first.
pub fn involutions_with(n: usize, may_fix: &dyn Fn(usize) -> bool) -> Vec<Involution> {
    fn go(
        free: &mut Vec<usize>,
        cur: &mut Involution,
        may_fix: &dyn Fn(usize) -> bool,
        out: &mut Vec<Involution>,
    ) {
        let Some(&x) = free.first() else {
            out.push(cur.clone());
            return;
        };
        free.remove(0);
        if may_fix(x) {
            cur.fixed.push(x);
            go(free, cur, may_fix, out);
            cur.fixed.pop();
        }
        for i in 0..free.len() {
            let y = free.remove(i);
            cur.pairs.push((x, y));
            go(free, cur, may_fix, out);
            cur.pairs.pop();
            free.insert(i, y);
        }
        free.insert(0, x);
    }
    let mut out = Vec::new();
    let mut free: Vec<usize> = (0..n).collect();
    go(
        &mut free,
        &mut Involution {
            pairs: Vec::new(),
            fixed: Vec::new(),
        },
        may_fix,
        &mut out,
    );
    out
}

/// `F(Phi)`: fixed point free involutions of `n` points.
pub fn fixed_point_free_involutions(n: usize) -> Vec<Involution> {
    involutions_with(n, &|_| false)
}

/// `Inv_1(Phi_lambda)`: fixed points must carry the label 1.
pub fn label_one_involutions(labels: &[usize]) -> Vec<Involution> {
    involutions_with(labels.len(), &|i| labels[i] == 1)
}

/// `sum_{phi in F(Phi_lambda)} prod C(r, s, tau)`.
pub fn one_point_sum(lambda: &FockPartition, torus: &mut Torus) -> Result<C64> {
    let labels = lambda.labels();
    if labels.len() % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut s = C64::new(0.0, 0.0);
    for inv in fixed_point_free_involutions(labels.len()) {
        let mut g = C64::new(1.0, 0.0);
        for &(r, t) in &inv.pairs {
            g *= torus.c_kernel(labels[r], labels[t])?;
        }
        s += g;
    }
    Ok(s)
}

/// Genus one 1-point function `Z^(1)(v(lambda), tau)`.
pub fn one_point_boson(lambda: &FockPartition, tau: C64, policy: &EvalPolicy) -> Result<C64> {
    let mut t = Torus::new(tau, policy)?;
    Ok(z1_boson(tau, policy)? * one_point_sum(lambda, &mut t)?)
}

/// `sum_{phi in F(Phi_{lambda,2})} prod xi(r, s, w, tau)` where the two copies of
/// `Phi_lambda` sit at `0..m` and `m..2m`.
pub fn two_point_sum(lambda: &FockPartition, w: C64, torus: &mut Torus) -> Result<C64> {
    let labels = lambda.labels();
    let m = labels.len();
    let mut s = C64::new(0.0, 0.0);
    for inv in fixed_point_free_involutions(2 * m) {
        let mut g = C64::new(1.0, 0.0);
        for &(r, t) in &inv.pairs {
            // r < t, so a cross pair has r in the first copy
            let (k, l) = (labels[r % m], labels[t % m]);
            g *= if (r < m) == (t < m) {
                torus.c_kernel(k, l)?
            } else {
                torus.d_kernel(k, l, w)?
            };
        }
        s += g;
    }
    Ok(s)
}

/// Genus one 2-point function `Z^(1)(v(lambda), v(lambda), w, tau)`.
pub fn two_point_boson(lambda: &FockPartition, w: C64, tau: C64, policy: &EvalPolicy) -> Result<C64> {
    let mut t = Torus::new(tau, policy)?;
    Ok(z1_boson(tau, policy)? * two_point_sum(lambda, w, &mut t)?)
}

/// `Z^(2) / (Z^(1)(tau_1) Z^(1)(tau_2))` through `eps^{n_max}` from the sum over
/// partitions (the result has order `n_max + 1`).
pub fn brute_z2_eps(n_max: usize, tau1: C64, tau2: C64, policy: &EvalPolicy) -> Result<TruncatedSeries> {
    if n_max > EPS_ORDER_CAP {
        return Err(Error::CapExceeded(format!(
            "epsilon order {n_max} above the oracle cap {EPS_ORDER_CAP}"
        )));
    }
    let mut t1 = Torus::new(tau1, policy)?;
    let mut t2 = Torus::new(tau2, policy)?;
    let mut c = vec![C64::new(0.0, 0.0); n_max + 1];
    for (n, cn) in c.iter_mut().enumerate() {
        for lam in FockPartition::all_of_weight(n) {
            // E(lambda) factorizes over the two tori
            let e = one_point_sum(&lam, &mut t1)? * one_point_sum(&lam, &mut t2)?;
            *cn += e / liz_norm(&lam);
        }
    }
    Ok(TruncatedSeries::from_coeffs(&c, n_max as i64 + 1))
}

/// `Z^(2)(tau, w, rho)` through `rho^{order}` from genus one 2-point functions.
pub fn brute_z2_rho(order: usize, tau: C64, w: C64, policy: &EvalPolicy) -> Result<TruncatedSeries> {
    if order > RHO_ORDER_CAP {
        return Err(Error::CapExceeded(format!(
            "rho order {order} above the oracle cap {RHO_ORDER_CAP}"
        )));
    }
    let mut t = Torus::new(tau, policy)?;
    let z1 = z1_boson(tau, policy)?;
    let mut c = vec![C64::new(0.0, 0.0); order + 1];
    for (n, cn) in c.iter_mut().enumerate() {
        for lam in FockPartition::all_of_weight(n) {
            *cn += z1 * two_point_sum(&lam, w, &mut t)? / liz_norm(&lam);
        }
    }
    Ok(TruncatedSeries::from_coeffs(&c, order as i64 + 1))
}

/// `sum_{phi in Inv_1(Phi_lambda)} prod Gamma(Xi)` with `Gamma({1}) = (a, alpha)`.
pub fn lattice_one_point_sum(lambda: &FockPartition, a_alpha: f64, torus: &mut Torus) -> Result<C64> {
    let labels = lambda.labels();
    let mut s = C64::new(0.0, 0.0);
    for inv in label_one_involutions(&labels) {
        let mut g = C64::new(a_alpha.powi(inv.fixed.len() as i32), 0.0);
        for &(r, t) in &inv.pairs {
            g *= torus.c_kernel(labels[r], labels[t])?;
        }
        s += g;
    }
    Ok(s)
}

/// Rank one `Z^(1)_{M (x) e^alpha}(v(lambda), tau)`, where `a_alpha = (a, alpha)`
/// for the unit vector `a` and `alpha_sq = (alpha, alpha)`.
pub fn one_point_lattice(
    lambda: &FockPartition,
    a_alpha: f64,
    alpha_sq: f64,
    tau: C64,
    policy: &EvalPolicy,
) -> Result<C64> {
    let mut t = Torus::new(tau, policy)?;
    let q = TorusPoint::new(tau)?.q();
    Ok(z1_boson(tau, policy)? * q.powf(alpha_sq / 2.0) * lattice_one_point_sum(lambda, a_alpha, &mut t)?)
}

/// `Z_{V_L} / (Z^(1)(tau_1) Z^(1)(tau_2))` through `eps^{n_max}` for the rank one
/// lattice with generator of norm `gen_norm`, summing `alpha, beta = m g` for
/// `|m| <= m_max`.
pub fn brute_z2_lattice_eps(
    n_max: usize,
    gen_norm: u32,
    m_max: i64,
    tau1: C64,
    tau2: C64,
    policy: &EvalPolicy,
) -> Result<TruncatedSeries> {
    if n_max > EPS_ORDER_CAP {
        return Err(Error::CapExceeded(format!(
            "epsilon order {n_max} above the oracle cap {EPS_ORDER_CAP}"
        )));
    }
    let mut t1 = Torus::new(tau1, policy)?;
    let mut t2 = Torus::new(tau2, policy)?;
    let q1 = TorusPoint::new(tau1)?.q();
    let q2 = TorusPoint::new(tau2)?.q();
    let nrm = gen_norm as f64;
    let parts: Vec<Vec<FockPartition>> = (0..=n_max).map(FockPartition::all_of_weight).collect();
    let mut c = vec![C64::new(0.0, 0.0); n_max + 1];
    let mut g1 = Vec::new();
    let mut g2 = Vec::new();
    for m in -m_max..=m_max {
        let aa = m as f64 * nrm.sqrt();
        let mut row1 = Vec::new();
        let mut row2 = Vec::new();
        for ps in &parts {
            let mut r1 = Vec::new();
            let mut r2 = Vec::new();
            for lam in ps {
                r1.push(lattice_one_point_sum(lam, aa, &mut t1)?);
                r2.push(lattice_one_point_sum(lam, aa, &mut t2)?);
            }
            row1.push(r1);
            row2.push(r2);
        }
        let e = (m * m) as f64 * nrm / 2.0;
        g1.push((q1.powf(e), row1));
        g2.push((q2.powf(e), row2));
    }
    for (qa, r1) in &g1 {
        for (qb, r2) in &g2 {
            for n in 0..=n_max {
                for (i, lam) in parts[n].iter().enumerate() {
                    c[n] += qa * qb * r1[n][i] * r2[n][i] / liz_norm(lam);
                }
            }
        }
    }
    Ok(TruncatedSeries::from_coeffs(&c, n_max as i64 + 1))
}

/// Residual of the self-sewing identity
/// `1 + sum_m p_m f(chi)^m = 1 + sum_n chi^n sum_{m<=n} (m/n) binom(2n, m+n) p_m`
/// through `chi^order`, with `f` from its closed form.
pub fn catalan_selfsew_identity(p: &[f64], order: usize) -> Result<f64> {
    let ord = order as i64 + 1;
    let f = crate::series::catalan_f(ord)?;
    let mut lhs = TruncatedSeries::constant(C64::new(1.0, 0.0), ord);
    let mut fm = TruncatedSeries::constant(C64::new(1.0, 0.0), ord);
    for m in 1..=order {
        fm = &fm * &f;
        let pm = p.get(m).copied().unwrap_or(0.0);
        lhs = &lhs + &fm.scale(C64::new(pm, 0.0));
    }
    let mut rhs = vec![C64::new(0.0, 0.0); order + 1];
    rhs[0] = C64::new(1.0, 0.0);
    for (n, r) in rhs.iter_mut().enumerate().skip(1) {
        for m in 1..=n {
            let pm = p.get(m).copied().unwrap_or(0.0);
            *r += C64::new(m as f64 / n as f64 * binom(2 * n, m + n) * pm, 0.0);
        }
    }
    Ok(lhs.max_abs_diff(&TruncatedSeries::from_coeffs(&rhs, ord)))
}

fn big_binom(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n || n < 0 {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `sum_r binom(n-m, r) binom(n+m-1, r) = binom(2n-1, n-m)` for `1 <= m <= n <= n_max`.
pub fn binomial_identity_holds(n_max: i64) -> bool {
    for n in 1..=n_max {
        for m in 1..=n {
            let lhs: BigInt = (0..=n - m)
                .map(|r| big_binom(n - m, r) * big_binom(n + m - 1, r))
                .sum();
            if lhs != big_binom(2 * n - 1, n - m) {
                return false;
            }
        }
    }
    true
}

/// `binom(2n-1, n-m) - binom(2n-1, n-m-1) = (m/n) binom(2n, m+n)` in integers
/// (multiplied through by `n`).
pub fn catalan_coefficient_identity_holds(n_max: i64) -> bool {
    for n in 1..=n_max {
        for m in 1..=n {
            let lhs = (big_binom(2 * n - 1, n - m) - big_binom(2 * n - 1, n - m - 1)) * BigInt::from(n);
            let rhs = big_binom(2 * n, m + n) * BigInt::from(m);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Partition numbers `p_0 .. p_n`.
pub fn partition_numbers(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    for k in 1..=n {
        for j in k..=n {
            p[j] += p[j - k];
        }
    }
    p
}

/// Trace over the rank one Fock module `M (x) e^beta` of
/// `Y(x1^{L0} e^alpha, x1) Y(x2^{L0} e^{-alpha}, x2) q^{L0}` with `x_i = e^{z_i}`
/// and `z_1 - z_2 = w`, computed mode by mode in a truncated occupation basis.
///
/// `cocycle` is `eps(alpha, -alpha)`. Modes `1..=modes` with occupation numbers
/// below `occupancy` are kept.
#[allow(clippy::too_many_arguments)]
pub fn lattice_two_point_trace(
    alpha_sq: i64,
    alpha_beta: i64,
    beta_sq: i64,
    cocycle: f64,
    w: C64,
    tau: C64,
    modes: usize,
    occupancy: usize,
) -> Result<C64> {
    let q = TorusPoint::new(tau)?.q();
    if w.re <= 0.0 || w.re >= -(q.norm().ln()) {
        return Err(Error::domain("the trace needs 0 < Re w < 2 pi Im tau"));
    }
    let nrm = alpha_sq as f64;
    // zero modes: cocycles, x1^{(alpha, beta - alpha)} x2^{-(alpha, beta)} and the L0 weights
    let zero = w * ((alpha_beta as f64) - nrm / 2.0);
    let mut total = q.powf(beta_sq as f64 / 2.0) * zero.exp() * cocycle;
    // b^dagger and b on |0>, .., |occupancy - 1>
    let ladder = |k: usize| {
        let mut up = CMat::zeros(k, k);
        let mut down = CMat::zeros(k, k);
        for j in 0..k.saturating_sub(1) {
            let s = ((j + 1) as f64).sqrt();
            up[(j + 1, j)] = C64::new(s, 0.0);
            down[(j, j + 1)] = C64::new(s, 0.0);
        }
        (up, down)
    };
    let expm = |m: &CMat, c: C64| -> CMat {
        // nilpotent, so the series terminates
        let k = m.nrows();
        let mut acc = CMat::identity(k, k);
        let mut term = CMat::identity(k, k);
        for j in 1..k {
            term = &term * m * (c / j as f64);
            acc += &term;
        }
        acc
    };
    // x1 = e^{w/2}, x2 = e^{-w/2}; a common shift of z1, z2 does not change the trace
    for n in 1..=modes {
        // entries grow like |x1/x2|^{n j}; keep them inside f64 range
        let k = ((600.0 / (n as f64 * w.re + 1.0)) as usize).clamp(2, occupancy.max(2));
        let (up, down) = ladder(k);
        let g = (nrm / n as f64).sqrt();
        let xn = (w * (n as f64 / 2.0)).exp();
        let op = expm(&up, xn * g) * expm(&down, -g / xn) * expm(&up, -g / xn) * expm(&down, xn * g);
        let qn = q.powu(n as u32);
        let mut tr = C64::new(0.0, 0.0);
        let mut qp = C64::new(1.0, 0.0);
        for j in 0..k {
            tr += op[(j, j)] * qp;
            qp *= qn;
        }
        total *= tr;
    }
    Ok(total)
}
