//! Check suites behind `genus2 verify` and the acceptance run.
//!
//! Each check compares a computed quantity with an independently obtained or
//! closed-form expectation and records the residual. A failing computation is
//! reported as a failed item, not an error.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::comparison::{comparison_policy, ratio_modular, ratio_unnormalized, RatioSampler, RATIO_RADII};
use crate::extract::{loglog_slope, taylor_coefficients};
use crate::graphs::{check_f_equivalence, necklace_sums, product_formula_det, trace_via_cycles};
use crate::lattice::{brute_z2_lattice_eps, siegel_theta2, theta1, EvenLattice, ThetaPolicy};
use crate::linalg::{det, identity};
use crate::modular_forms::{
    bernoulli, dedekind_eta, eisenstein, eisenstein_q_coefficients, min_lattice_distance, EvalPolicy,
};
use crate::series::{catalan_f, catalan_f_value};
use crate::sewing_eps::{
    det_i_minus_a1a2, g_action, g_action_h2, period_matrix_eps, z1_boson, EpsPoint, EpsSewing, GElement,
    PeriodMatrix, SewPolicy,
};
use crate::sewing_rho::{
    det_i_minus_r, gamma1_action, period_matrix_rho, z2_boson_rho, RhoPoint, RhoSewing,
};
use crate::voa_fock::{brute_z2_eps, brute_z2_rho, catalan_selfsew_identity, partition_numbers};
use crate::{Error, Result, C64, TWO_PI_I};

/// A value in a report.
#[derive(Clone, Debug, PartialEq)]
pub enum Quantity {
    Real(f64),
    Complex(C64),
    Text(String),
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Real(x)
    }
}

impl From<C64> for Quantity {
    fn from(x: C64) -> Self {
        Quantity::Complex(x)
    }
}

impl From<&str> for Quantity {
    fn from(x: &str) -> Self {
        Quantity::Text(x.into())
    }
}

impl From<String> for Quantity {
    fn from(x: String) -> Self {
        Quantity::Text(x)
    }
}

/// A real number printed with 17 significant digits; non-finite values become `null`.
pub fn json_number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    // -0 prints as 0
    let s = format!("{:.16e}", x + 0.0);
    Value::Number(s.parse().expect("formatted float is a JSON number"))
}

/// `[re, im]`.
pub fn json_complex(z: C64) -> Value {
    Value::Array(vec![json_number(z.re), json_number(z.im)])
}

impl Quantity {
    pub fn to_json(&self) -> Value {
        match self {
            Quantity::Real(x) => json_number(*x),
            Quantity::Complex(z) => json_complex(*z),
            Quantity::Text(s) => Value::String(s.clone()),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Quantity::Real(x) => format!("{x:.16e}"),
            Quantity::Complex(z) => format_complex(*z),
            Quantity::Text(s) => format!("\"{}\"", s.replace('"', "\"\"")),
        }
    }
}

/// `a+bi` with 17 significant digits in each part.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{sign}{:.16e}i", z.re, z.im.abs())
}

/// One row of a report.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckItem {
    pub name: String,
    pub expected: Quantity,
    pub got: Quantity,
    pub residual: f64,
    pub pass: bool,
}

impl CheckItem {
    /// Passes when `residual <= tol`.
    pub fn new(name: impl Into<String>, expected: impl Into<Quantity>, got: impl Into<Quantity>, residual: f64, tol: f64) -> Self {
        CheckItem {
            name: name.into(),
            expected: expected.into(),
            got: got.into(),
            residual,
            pass: residual <= tol,
        }
    }

    /// `|got - expected| / |expected|` against `tol`.
    pub fn relative(name: impl Into<String>, expected: C64, got: C64, tol: f64) -> Self {
        let r = (got - expected).norm() / expected.norm();
        CheckItem::new(name, expected, got, r, tol)
    }

    /// `|got - expected|` against `tol`.
    pub fn absolute(name: impl Into<String>, expected: C64, got: C64, tol: f64) -> Self {
        CheckItem::new(name, expected, got, (got - expected).norm(), tol)
    }

    /// A check whose computation failed.
    pub fn failed(name: impl Into<String>, err: &Error) -> Self {
        CheckItem {
            name: name.into(),
            expected: Quantity::Text("computable".into()),
            got: Quantity::Text(err.to_string()),
            residual: f64::INFINITY,
            pass: false,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("expected".into(), self.expected.to_json());
        m.insert("got".into(), self.got.to_json());
        m.insert("residual".into(), json_number(self.residual));
        m.insert("pass".into(), Value::Bool(self.pass));
        Value::Object(m)
    }
}

/// `{suite, items, pass}`, items sorted by name.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: String,
    pub items: Vec<CheckItem>,
    pub pass: bool,
}

impl Report {
    pub fn new(suite: impl Into<String>, mut items: Vec<CheckItem>) -> Self {
        items.sort_by(|a, b| a.name.cmp(&b.name));
        let pass = !items.is_empty() && items.iter().all(|i| i.pass);
        Report {
            suite: suite.into(),
            items,
            pass,
        }
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "suite": self.suite,
            "items": self.items.iter().map(CheckItem::to_json).collect::<Vec<_>>(),
            "pass": self.pass,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("suite,name,expected,got,residual,pass\n");
        for i in &self.items {
            s.push_str(&format!(
                "{},{},{},{},{:.16e},{}\n",
                self.suite,
                i.name,
                i.expected.to_csv(),
                i.got.to_csv(),
                i.residual,
                i.pass
            ));
        }
        s
    }

    /// Items that failed, for one-line summaries.
    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|i| !i.pass).collect()
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

// runs `f`, turning an error into a single failed item
fn guarded(name: &str, f: impl FnOnce() -> Result<Vec<CheckItem>>) -> Vec<CheckItem> {
    f().unwrap_or_else(|e| vec![CheckItem::failed(name, &e)])
}

fn tag(z: C64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// q-coefficients of `E_2, E_4, E_6` against `-B_k/k!` and `2 sigma_{k-1}(n)/(k-1)!`
/// in exact rationals, and `(1/2 pi i) d/dtau eta^{-2} = E_2 eta^{-2}`.
pub fn eisenstein_layer(policy: &EvalPolicy) -> Vec<CheckItem> {
    let mut items = Vec::new();
    let fact = |n: u64| -> BigInt { (1..=n).map(BigInt::from).product() };
    for k in [2usize, 4, 6] {
        items.extend(guarded("eisenstein.q_coefficients", || {
            let got = eisenstein_q_coefficients(k, 20)?;
            let mut bad = 0usize;
            if got[0] != -bernoulli(k) / BigRational::from_integer(fact(k as u64)) {
                bad += 1;
            }
            for n in 1..=20u64 {
                let sigma: BigInt = (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k as u32 - 1)).sum();
                if got[n as usize] != BigRational::new(sigma * 2, fact(k as u64 - 1)) {
                    bad += 1;
                }
            }
            Ok(vec![CheckItem::new(
                format!("eisenstein.E{k}.q_coefficients"),
                "21 of 21 exact",
                format!("{} of 21 exact", 21 - bad),
                bad as f64,
                0.0,
            )])
        }));
    }
    for tau in [c(0.0, 1.0), c(0.3, 0.9), c(-0.1, 1.6)] {
        let name = format!("eisenstein.eta_derivative.tau={}", tag(tau));
        items.extend(guarded(&name, || {
            let f = |t: C64| -> Result<C64> { Ok(dedekind_eta(t, policy)?.powi(-2)) };
            let h = 1e-4;
            let d = (f(tau + h)? * 8.0 - f(tau - h)? * 8.0 - f(tau + 2.0 * h)? + f(tau - 2.0 * h)?) / (12.0 * h) / TWO_PI_I;
            let want = eisenstein(2, tau, policy)? * f(tau)?;
            Ok(vec![CheckItem::relative(name.clone(), want, d, 1e-5)])
        }));
    }
    items
}

/// Brute-force Fock sum against `det(I - A1 A2)^{-1/2}` through `eps^6` at
/// `(2i, 1.5i)`, and the closed forms `E2 E2`, `E2^2 E2^2 + 54 E4 E4` for the `eps^2`, `eps^4` coefficients of `det^{-1}`.
pub fn eps_oracle(policy: &SewPolicy) -> Vec<CheckItem> {
    let (t1, t2) = (c(0.0, 2.0), c(0.0, 1.5));
    guarded("oracle_eps", || {
        let mut items = Vec::new();
        let brute = brute_z2_eps(6, t1, t2, &policy.eval)?;
        let coeffs = |power: f64| {
            taylor_coefficients(
                |e| Ok(det_i_minus_a1a2(&EpsPoint::new(t1, t2, e)?, policy)?.powf(power)),
                c(0.0, 0.0),
                0.5,
                64,
                6,
            )
        };
        let half = coeffs(-0.5)?;
        for (n, d) in half.iter().enumerate() {
            let b = brute.coeff(n as i64).ok_or_else(|| Error::input("oracle order too low"))?;
            let name = format!("oracle_eps.fock_sum.eps^{n}");
            items.push(if n % 2 == 0 {
                CheckItem::relative(name, *d, b, 1e-6)
            } else {
                CheckItem::absolute(name, *d, b, 1e-12)
            });
        }
        let full = coeffs(-1.0)?;
        let ev = &policy.eval;
        let (a2, b2) = (eisenstein(2, t1, ev)?, eisenstein(2, t2, ev)?);
        let (a4, b4) = (eisenstein(4, t1, ev)?, eisenstein(4, t2, ev)?);
        items.push(CheckItem::relative("oracle_eps.det_inverse.eps^2 = E2 E2", a2 * b2, full[2], 1e-6));
        items.push(CheckItem::relative(
            "oracle_eps.det_inverse.eps^4 = E2^2 E2^2 + 54 E4 E4",
            a2 * a2 * b2 * b2 + a4 * b4 * 54.0,
            full[4],
            1e-6,
        ));
        Ok(items)
    })
}

/// Brute-force two-point sum against `Z1 det(I - R)^{-1/2}` through `rho^4` at `(2i, 0.3)`.
pub fn rho_oracle(policy: &SewPolicy) -> Vec<CheckItem> {
    let (tau, w) = (c(0.0, 2.0), c(0.3, 0.0));
    guarded("oracle_rho", || {
        let z1 = z1_boson(tau, &policy.eval)?;
        let brute = brute_z2_rho(4, tau, w, &policy.eval)?;
        let det = taylor_coefficients(
            |r| Ok(z1 * det_i_minus_r(&RhoPoint::new(tau, w, r)?, policy)?.powf(-0.5)),
            c(0.0, 0.0),
            0.015,
            64,
            4,
        )?;
        Ok(det
            .iter()
            .enumerate()
            .map(|(n, d)| {
                let b = brute.coeff(n as i64).unwrap_or(c(f64::NAN, f64::NAN));
                CheckItem::relative(format!("oracle_rho.two_point_sum.rho^{n}"), *d, b, 1e-6)
            })
            .collect())
    })
}

/// Every label map on `1..=max` points, one per multiplicity pattern.
pub fn label_patterns(max: usize) -> Vec<Vec<usize>> {
    fn parts(n: usize, maxp: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(maxp)).rev() {
            cur.push(p);
            parts(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for n in 1..=max {
        let mut ps = Vec::new();
        parts(n, n, &mut Vec::new(), &mut ps);
        for p in ps {
            out.push(p.iter().enumerate().flat_map(|(i, &m)| std::iter::repeat(i + 1).take(m)).collect());
        }
    }
    out
}

/// Cycle product formula, necklace reconstruction of Omega, the trace identity
/// and the F-equivalence class sizes.
pub fn graph_identities(policy: &SewPolicy) -> Vec<CheckItem> {
    let mut items = guarded("graphs", || {
        let mut items = Vec::new();
        let tau = c(0.0, 2.0);
        let eps = c(0.2, 0.0);
        let pt = EpsPoint::new(tau, tau, eps)?;
        let mut s = EpsSewing::new(pt, policy)?;
        let m = s.moments(12)?;
        let lu = det(&(identity(12) - &m.a1 * &m.a2));
        let p = product_formula_det(&m.a1, &m.a2, 10)?;
        items.push(CheckItem::absolute("graphs.product_formula.cap10", lu, p, 1e-6));

        let om = s.evaluate()?.omega;
        let m = s.moments(16)?;
        let w = necklace_sums(&m.a1, &m.a2, 16)?.omega;
        let o11 = tau + eps * w[0][0] / TWO_PI_I;
        let o22 = tau + eps * w[1][1] / TWO_PI_I;
        let o12 = -eps * w[0][1] / TWO_PI_I;
        items.push(CheckItem::absolute("graphs.necklaces.omega_11", om.o11, o11, 1e-7));
        items.push(CheckItem::absolute("graphs.necklaces.omega_12", om.o12, o12, 1e-7));
        items.push(CheckItem::absolute("graphs.necklaces.omega_22", om.o22, o22, 1e-7));

        let pt = EpsPoint::new(c(0.1, 1.1), c(0.0, 1.3), c(0.7, 0.2))?;
        let m = EpsSewing::new(pt, policy)?.moments(4)?;
        let prod = &m.a1 * &m.a2;
        let mut pn = identity(4);
        for n in 1..=3 {
            pn = &pn * &prod;
            let tr = pn.trace();
            let g = trace_via_cycles(&m.a1, &m.a2, n)?;
            items.push(CheckItem::new(
                format!("graphs.trace_identity.n={n}"),
                tr,
                g,
                (tr - g).norm() / (1.0 + tr.norm()),
                1e-13,
            ));
        }
        Ok(items)
    });
    let pats = label_patterns(6);
    let bad = pats.iter().filter(|f| !check_f_equivalence(f).product_rule_holds()).count();
    let bad_fact = pats.iter().filter(|f| !check_f_equivalence(f).factorial_rule_holds()).count();
    items.push(CheckItem::new(
        "graphs.fequiv.class_size_prod_s",
        format!("all {} label maps with |T| <= 6", pats.len()),
        format!("{} of {} hold (class size prod s_i! holds for {})", pats.len() - bad, pats.len(), pats.len() - bad_fact),
        bad as f64,
        0.0,
    ));
    items
}

// Omega_22 comes from a principal log: compare modulo integers
fn omega_distance(a: &PeriodMatrix, b: &PeriodMatrix) -> f64 {
    let d22 = a.o22 - b.o22;
    let d22 = d22 - d22.re.round();
    (a.o11 - b.o11).norm().max((a.o12 - b.o12).norm()).max(d22.norm())
}

const S: [i64; 4] = [0, -1, 1, 0];
const T: [i64; 4] = [1, 1, 0, 1];

/// Equivariance of both period maps under S and T, and the determinant factors.
pub fn modular_equivariance(policy: &SewPolicy) -> Vec<CheckItem> {
    let mut items = Vec::new();
    let eps_pts = [
        (c(0.1, 1.1), c(-0.2, 1.3), c(0.05, 0.02)),
        (c(0.0, 1.0), c(0.3, 0.95), c(-0.08, 0.03)),
        (c(-0.3, 1.2), c(0.0, 1.5), c(0.02, -0.1)),
    ];
    for (i, &(t1, t2, e)) in eps_pts.iter().enumerate() {
        items.extend(guarded(&format!("equivariance.eps.point{i}"), || {
            let mut out = Vec::new();
            let pt = EpsPoint::new(t1, t2, e)?;
            let om = period_matrix_eps(&pt, policy)?;
            let d = det_i_minus_a1a2(&pt, policy)?;
            for (label, g) in [("S1", GElement::S1), ("T1", GElement::T1), ("S2", GElement::S2), ("T2", GElement::T2)] {
                let moved = g_action(&g, &pt)?;
                let lhs = period_matrix_eps(&moved, policy)?;
                let rhs = om.act(&g_action_h2(&g))?;
                out.push(CheckItem::new(
                    format!("equivariance.eps.point{i}.{label}"),
                    0.0,
                    lhs.max_diff(&rhs),
                    lhs.max_diff(&rhs),
                    1e-7,
                ));
            }
            for (label, g, [_, _, c1, d1]) in [("S1", GElement::S1, S), ("T1", GElement::T1, T)] {
                let dm = det_i_minus_a1a2(&g_action(&g, &pt)?, policy)?;
                let f = (om.o11 * c1 as f64 + d1 as f64) / (pt.tau1 * c1 as f64 + d1 as f64);
                out.push(CheckItem::absolute(format!("equivariance.eps.point{i}.det_{label}"), f * d, dm, 1e-7));
            }
            Ok(out)
        }));
    }
    let rho_pts = [
        (c(0.1, 1.1), c(0.3, 0.1), c(-0.004, 0.0)),
        (c(0.0, 1.0), c(-0.2, 0.4), c(0.002, 0.003)),
        (c(-0.3, 1.2), c(0.5, -0.2), c(-0.006, -0.002)),
    ];
    for (i, &(tau, w, r)) in rho_pts.iter().enumerate() {
        items.extend(guarded(&format!("equivariance.rho.point{i}"), || {
            let mut out = Vec::new();
            let pt = RhoPoint::new(tau, w, r)?;
            let om = period_matrix_rho(&pt, policy)?;
            let d = det_i_minus_r(&pt, policy)?;
            for (label, m) in [("S", S), ("T", T)] {
                let moved = gamma1_action(m, &pt)?;
                let lhs = period_matrix_rho(&moved, policy)?;
                let rhs = om.act(&g_action_h2(&GElement::Gamma1(m)))?;
                let dist = omega_distance(&lhs, &rhs);
                out.push(CheckItem::new(format!("equivariance.rho.point{i}.{label}"), 0.0, dist, dist, 1e-7));
                let dm = det_i_minus_r(&moved, policy)?;
                let f = (om.o11 * m[2] as f64 + m[3] as f64) / (pt.tau * m[2] as f64 + m[3] as f64);
                out.push(CheckItem::absolute(format!("equivariance.rho.point{i}.det_{label}"), f * d, dm, 1e-7));
            }
            Ok(out)
        }));
    }
    items
}

/// Catalan coefficients, the power formula, the self-sewing identity and the
/// `Omega_22` degeneration.
pub fn catalan_suite(policy: &SewPolicy) -> Vec<CheckItem> {
    let mut items = guarded("catalan.series", || {
        let mut items = Vec::new();
        let f = catalan_f(9)?;
        for (n, want) in [(1, 1.0), (2, 2.0), (3, 5.0), (4, 14.0)] {
            let got = f.coeff(n).unwrap_or(c(f64::NAN, 0.0));
            items.push(CheckItem::absolute(format!("catalan.f.chi^{n}"), c(want, 0.0), got, 0.0));
        }
        let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
        let mut worst = 0.0f64;
        for m in 1..=8usize {
            let fm = f.powi(m as i64)?;
            for n in m..=8 {
                let want = m as f64 / n as f64 * binom(2 * n, n + m);
                let got = fm.coeff(n as i64).unwrap_or(c(f64::NAN, 0.0));
                worst = worst.max((got - want).norm() / want);
            }
        }
        items.push(CheckItem::new("catalan.power_formula.order8", 0.0, worst, worst, 1e-12));
        let r = catalan_selfsew_identity(&partition_numbers(6), 6)?;
        items.push(CheckItem::new("catalan.selfsew_identity.order6", 0.0, r, r, 1e-12));
        Ok(items)
    });
    let (tau, chi, w) = (c(0.0, 2.0), c(0.1, 0.0), c(1e-3, 0.0));
    items.extend(guarded("catalan.omega22_degeneration", || {
        let om = period_matrix_rho(&RhoPoint::from_chi(tau, w, chi)?, policy)?;
        let want = catalan_f_value(chi).ln() / TWO_PI_I;
        Ok(vec![CheckItem::absolute("catalan.omega22_degeneration.w=1e-3", want, om.o22, 1e-5)])
    }));
    items
}

/// Degeneration: `|Z_rho - Z1(q) Z1(f)|` shrinks at least linearly in `w`.
pub fn degeneration_agreement(policy: &SewPolicy) -> Vec<CheckItem> {
    let (tau, chi) = (c(0.0, 2.0), c(0.1, 0.0));
    guarded("degeneration", || {
        let f = catalan_f_value(chi);
        let limit = z1_boson(tau, &policy.eval)? * z1_boson(f.ln() / TWO_PI_I, &policy.eval)?;
        let ws = [4e-2, 2e-2, 1e-2];
        let mut errs = Vec::new();
        for &w in &ws {
            let pt = RhoPoint::from_chi(tau, c(w, 0.0), chi)?;
            errs.push((z2_boson_rho(&pt, 1.0, policy)? - limit).norm());
        }
        let slope = loglog_slope(&ws, &errs)?;
        Ok(vec![CheckItem::new(
            "degeneration.slope",
            ">= 0.9",
            slope,
            (0.9 - slope).max(0.0),
            0.0,
        )])
    })
}

/// Brute lattice eps-series over the boson series against the Siegel theta
/// series (A1), sign-flip invariance and diagonal factorization.
pub fn lattice_factorization(policy: &SewPolicy) -> Vec<CheckItem> {
    let tp = ThetaPolicy::default();
    let mut items = guarded("lattice.brute_series", || {
        let (t1, t2) = (c(0.0, 1.0), c(0.1, 1.2));
        let lat = EvenLattice::a1();
        let brute = brute_z2_lattice_eps(&lat, 4, 18, t1, t2, &policy.eval)?;
        let boson = brute_z2_eps(4, t1, t2, &policy.eval)?;
        let ratio = brute.div(&boson)?;
        let th = taylor_coefficients(
            |e| siegel_theta2(&lat, &period_matrix_eps(&EpsPoint::new(t1, t2, e)?, policy)?, &tp),
            c(0.0, 0.0),
            0.3,
            32,
            4,
        )?;
        Ok(th
            .iter()
            .enumerate()
            .map(|(n, t)| {
                let r = ratio.coeff(n as i64).unwrap_or(c(f64::NAN, 0.0));
                // odd orders vanish, so measure against a floor of 1e-3
                let res = (r - t).norm() / t.norm().max(1e-3);
                CheckItem::new(format!("lattice.A1.theta_series.eps^{n}"), *t, r, res, 1e-5)
            })
            .collect())
    });
    items.extend(guarded("lattice.sign_flip", || {
        let om = period_matrix_eps(&EpsPoint::new(c(0.0, 2.0), c(0.0, 2.0), c(0.2, 0.0))?, policy)?;
        let flipped = PeriodMatrix::new(om.o11, -om.o12, om.o22);
        let lat = EvenLattice::a1();
        let a = siegel_theta2(&lat, &om, &tp)?;
        let b = siegel_theta2(&lat, &flipped, &tp)?;
        Ok(vec![CheckItem::absolute("lattice.A1.sign_flip", a, b, 1e-12)])
    }));
    items.extend(guarded("lattice.diagonal", || {
        let lat = EvenLattice::a1();
        let (t1, t2) = (c(0.1, 0.8), c(-0.3, 1.1));
        let th = siegel_theta2(&lat, &PeriodMatrix::new(t1, c(0.0, 0.0), t2), &tp)?;
        let f = theta1(&lat, t1, &tp)? * theta1(&lat, t2, &tp)?;
        Ok(vec![CheckItem::relative("lattice.A1.diagonal_factorization", f, th, 1e-10)])
    }));
    items
}

/// Default `chi` values for the comparison programme.
pub const COMPARISON_CHIS: [f64; 3] = [0.05, 0.1, 0.2];

/// The comparison fits at `tau` for each `chi`: the unnormalized `w^2`
/// coefficient, the vanishing modular `w^2` coefficient and the modular `w^4`
/// coefficient against `E4 (73/1440 + 39 H(chi)) (1 - 4 chi)^2`.
pub fn comparison_programme(tau: C64, chis: &[C64]) -> Vec<CheckItem> {
    let policy = comparison_policy();
    let mut items = Vec::new();
    for &chi in chis {
        let key = format!("comparison.chi={}", tag(chi));
        items.extend(guarded(&key, || {
            let mut s = RatioSampler::new(tau, chi, &policy)?;
            let u = ratio_unnormalized(&mut s, &RATIO_RADII)?;
            let m = ratio_modular(&mut s, &RATIO_RADII)?;
            let w2 = m.fitted_coeffs[0].value;
            Ok(vec![
                CheckItem::new(format!("{key}.unnormalized_w2"), u.paper_prediction, u.fitted_coeffs[0].value, u.residual, 0.01),
                CheckItem::new(format!("{key}.modular_w2"), c(0.0, 0.0), w2, w2.norm(), 1e-8),
                CheckItem::new(format!("{key}.modular_w4"), m.paper_prediction, m.fitted_coeffs[1].value, m.residual, 0.02),
            ])
        }));
    }
    items
}

/// `|det| > 1e-6` and stability under doubling the truncation on 27 points of each domain.
pub fn holomorphy(policy: &SewPolicy) -> Vec<CheckItem> {
    let taus = [c(0.0, 1.0), c(0.3, 0.8), c(-0.4, 1.5)];
    let fracs = [0.2, 0.5, 0.8];
    let p = SewPolicy {
        cap: policy.cap.max(512),
        tol: 1e-12,
        ..*policy
    };
    let mut eps_worst = (0.0f64, f64::INFINITY);
    let mut errors: Vec<CheckItem> = Vec::new();
    for &t1 in &taus {
        for &t2 in &taus {
            let bound = 0.25 * min_lattice_distance(t1) * min_lattice_distance(t2);
            for (i, frac) in fracs.into_iter().enumerate() {
                let eps = C64::from_polar(frac * bound, 0.7 * i as f64 + 0.3);
                let r = (|| -> Result<(f64, f64)> {
                    let mut s = EpsSewing::new(EpsPoint::new(t1, t2, eps)?, &p)?;
                    let e = s.evaluate()?;
                    let d2 = s.at_truncation(2 * e.n)?.det;
                    Ok(((d2 - e.det).norm() / e.det.norm(), e.det.norm()))
                })();
                match r {
                    Ok((change, size)) => eps_worst = (eps_worst.0.max(change), eps_worst.1.min(size)),
                    Err(e) => errors.push(CheckItem::failed(format!("holomorphy.eps.{}.{}.{eps}", tag(t1), tag(t2)), &e)),
                }
            }
        }
    }
    let ws = [c(0.5, 0.0), c(1.2, 0.8), c(-0.6, 1.5)];
    let mut rho_worst = (0.0f64, f64::INFINITY);
    for &tau in &taus {
        for &w in &ws {
            let mut dist = w.norm();
            for m in -3i32..=3 {
                for n in -3i32..=3 {
                    dist = dist.min((w - TWO_PI_I * (tau * m as f64 + n as f64)).norm());
                }
            }
            let bound = 0.25 * dist * dist;
            for (i, frac) in fracs.into_iter().enumerate() {
                let rho = C64::from_polar(frac * bound, 1.1 * i as f64 + 0.2);
                let r = (|| -> Result<(f64, f64)> {
                    let mut s = RhoSewing::new(RhoPoint::new(tau, w, rho)?, &p)?;
                    let e = s.evaluate()?;
                    let d2 = s.at_truncation(2 * e.n)?.det;
                    Ok(((d2 - e.det).norm() / e.det.norm(), e.det.norm()))
                })();
                match r {
                    Ok((change, size)) => rho_worst = (rho_worst.0.max(change), rho_worst.1.min(size)),
                    Err(e) => errors.push(CheckItem::failed(format!("holomorphy.rho.{}.{}.{rho}", tag(tau), tag(w)), &e)),
                }
            }
        }
    }
    let mut items = vec![
        CheckItem::new("holomorphy.eps.min_abs_det", "> 1e-6", eps_worst.1, (1e-6 - eps_worst.1).max(0.0), 0.0),
        CheckItem::new("holomorphy.eps.truncation_change", "<= 1e-9", eps_worst.0, eps_worst.0, 1e-9),
        CheckItem::new("holomorphy.rho.min_abs_det", "> 1e-6", rho_worst.1, (1e-6 - rho_worst.1).max(0.0), 0.0),
        CheckItem::new("holomorphy.rho.truncation_change", "<= 1e-9", rho_worst.0, rho_worst.0, 1e-9),
    ];
    items[0].pass = eps_worst.1 > 1e-6;
    items[2].pass = rho_worst.1 > 1e-6;
    items.extend(errors);
    items
}

/// Suite names accepted by [`run_suite`].
pub const SUITES: [&str; 6] = ["modular", "graphs", "oracle", "comparison", "catalan", "holomorphy"];

/// Optional overrides for a suite run.
#[derive(Clone, Debug, Default)]
pub struct SuiteParams {
    pub tau: Option<C64>,
    pub chi: Option<C64>,
    pub policy: Option<SewPolicy>,
}

/// Runs a named suite.
pub fn run_suite(name: &str, params: &SuiteParams) -> Result<Report> {
    let p = params.policy.unwrap_or_default();
    let items = match name {
        "modular" => {
            let mut v = eisenstein_layer(&p.eval);
            v.extend(modular_equivariance(&p));
            v
        }
        "graphs" => graph_identities(&p),
        "oracle" => {
            let mut v = eps_oracle(&p);
            v.extend(rho_oracle(&p));
            v.extend(lattice_factorization(&p));
            v
        }
        "comparison" => {
            let tau = params.tau.unwrap_or(c(0.0, 2.0));
            let chis: Vec<C64> = match params.chi {
                Some(x) => vec![x],
                None => COMPARISON_CHIS.iter().map(|&x| c(x, 0.0)).collect(),
            };
            comparison_programme(tau, &chis)
        }
        "catalan" => {
            let mut v = catalan_suite(&p);
            v.extend(degeneration_agreement(&p));
            v
        }
        "holomorphy" => holomorphy(&p),
        _ => {
            return Err(Error::input(format!(
                "unknown suite '{name}' (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(Report::new(name, items))
}

/// Short titles of the acceptance criteria.
pub const CRITERIA: [&str; 10] = [
    "Eisenstein/eta layer",
    "oracle equivalence (eps)",
    "oracle equivalence (rho)",
    "graph identities",
    "modular equivariance",
    "Catalan suite",
    "lattice factorization",
    "comparison programme",
    "degeneration agreement",
    "holomorphy witnesses",
];

/// The checks of acceptance criterion `n` (1 to 10) at default settings.
pub fn criterion(n: usize) -> Result<Report> {
    let p = SewPolicy::default();
    let items = match n {
        1 => eisenstein_layer(&p.eval),
        2 => eps_oracle(&p),
        3 => rho_oracle(&p),
        4 => graph_identities(&p),
        5 => modular_equivariance(&p),
        6 => catalan_suite(&p),
        7 => lattice_factorization(&p),
        8 => {
            let chis: Vec<C64> = COMPARISON_CHIS.iter().map(|&x| c(x, 0.0)).collect();
            comparison_programme(c(0.0, 2.0), &chis)
        }
        9 => degeneration_agreement(&p),
        10 => holomorphy(&p),
        _ => return Err(Error::IndexError(format!("criterion {n} does not exist"))),
    };
    Ok(Report::new(format!("criterion {n}"), items))
}
