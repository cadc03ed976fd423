//! Comparing the two sewing schemes near a two-tori degeneration point.
//!
//! Points are parametrized by `(tau, w, chi)` with `rho = -chi w^2`. The map to
//! `(tau_1, tau_2, eps)` is known to `O(w^4)`; ratios of the rank two boson
//! partition functions are then expanded in `w` by sampling on circles.

use serde::Serialize;

use crate::extract::taylor_coefficients;
use crate::modular_forms::{dedekind_eta, eisenstein, EvalPolicy, TorusPoint};
use crate::series::{catalan_f_value, TruncatedSeries};
use crate::sewing_eps::{z1_boson, EpsPoint, EpsSewing, PeriodMatrix, SewPolicy};
use crate::sewing_rho::{
    eisenstein_at_nome, period_matrix_chi_expansion, RhoPoint, RhoSewing,
};
use crate::{Error, Result, C64, TWO_PI_I};

/// `(tau, w, chi)` with `0 < |chi| < 1/4` and `(tau, w, -w^2 chi)` a valid rho point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiPoint {
    pub tau: C64,
    pub w: C64,
    pub chi: C64,
}

impl ChiPoint {
    pub fn new(tau: C64, w: C64, chi: C64) -> Result<Self> {
        check_chi(chi)?;
        TorusPoint::new(tau)?;
        if w.norm() == 0.0 {
            return Ok(ChiPoint { tau, w, chi });
        }
        RhoPoint::from_chi(tau, w, chi)?;
        Ok(ChiPoint { tau, w, chi })
    }

    pub fn rho_point(&self) -> Result<RhoPoint> {
        RhoPoint::from_chi(self.tau, self.w, self.chi)
    }
}

fn check_chi(chi: C64) -> Result<()> {
    let a = chi.norm();
    if !(a > 0.0 && a < 0.25) {
        return Err(Error::domain(format!("need 0 < |chi| < 1/4, got |chi| = {a}")));
    }
    Ok(())
}

/// `H(chi) = E_4(f(chi)) - 1/720`.
pub fn h_of_chi(chi: C64, policy: &EvalPolicy) -> Result<C64> {
    Ok(eisenstein_at_nome(4, catalan_f_value(chi), policy)? - 1.0 / 720.0)
}

/// Epsilon-scheme coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsCoords {
    pub tau1: C64,
    pub tau2: C64,
    pub eps: C64,
}

/// `(2 pi i tau_1, 2 pi i tau_2, eps)` as series in `w`.
#[derive(Clone, Debug)]
pub struct EpsCoordSeries {
    /// through `w^4`
    pub t1: TruncatedSeries,
    /// through `w^4`
    pub t2: TruncatedSeries,
    /// through `w^3`
    pub eps: TruncatedSeries,
}

impl EpsCoordSeries {
    pub fn eval(&self, w: C64) -> EpsCoords {
        EpsCoords {
            tau1: self.t1.eval(w) / TWO_PI_I,
            tau2: self.t2.eval(w) / TWO_PI_I,
            eps: self.eps.eval(w),
        }
    }

    pub fn max_abs_diff(&self, o: &EpsCoordSeries) -> f64 {
        self.t1
            .max_abs_diff(&o.t1)
            .max(self.t2.max_abs_diff(&o.t2))
            .max(self.eps.max_abs_diff(&o.eps))
    }
}

/// Closed form of the coordinate bridge:
/// `2 pi i tau_1 = 2 pi i tau + a w^2/12 + E_2 a^2 w^4/144`,
/// `2 pi i tau_2 = log f + E_4 a^2 w^4/12`,
/// `eps = -w sqrt(a) (1 + E_2 a w^2/12)` with `a = 1 - 4 chi`.
pub fn eps_coords_series(tau: C64, chi: C64, policy: &EvalPolicy) -> Result<EpsCoordSeries> {
    check_chi(chi)?;
    let e2 = eisenstein(2, tau, policy)?;
    let e4 = eisenstein(4, tau, policy)?;
    let f = catalan_f_value(chi);
    let a = C64::new(1.0, 0.0) - chi * 4.0;
    let sa = a.sqrt();
    let z = C64::new(0.0, 0.0);
    Ok(EpsCoordSeries {
        t1: TruncatedSeries::from_coeffs(&[TWO_PI_I * tau, z, a / 12.0, z, e2 * a * a / 144.0], 5),
        t2: TruncatedSeries::from_coeffs(&[f.ln(), z, z, z, e4 * a * a / 12.0], 5),
        eps: TruncatedSeries::from_coeffs(&[z, -sa, z, -sa * a * e2 / 12.0], 4),
    })
}

/// The bridge evaluated at the point.
pub fn eps_coords_from_chi(pt: &ChiPoint, policy: &EvalPolicy) -> Result<EpsCoords> {
    let c = eps_coords_series(pt.tau, pt.chi, policy)?.eval(pt.w);
    TorusPoint::new(c.tau1)?;
    TorusPoint::new(c.tau2)?;
    Ok(c)
}

/// Inverse of the epsilon period map near `Omega_12 = 0`, with `r = 2 pi i Omega_12`:
/// `2 pi i tau_1 = 2 pi i O11 - E_2(O22) r^2 + 5 E_2(O11) E_4(O22) r^4`,
/// `eps = -r + E_2(O11) E_2(O22) r^3`, and `tau_2` symmetrically.
pub fn omega_inverse_expansion(om: &PeriodMatrix, policy: &EvalPolicy) -> Result<EpsCoords> {
    let r = TWO_PI_I * om.o12;
    let e2a = eisenstein(2, om.o11, policy)?;
    let e2b = eisenstein(2, om.o22, policy)?;
    let e4a = eisenstein(4, om.o11, policy)?;
    let e4b = eisenstein(4, om.o22, policy)?;
    let r2 = r * r;
    let t1 = TWO_PI_I * om.o11 - e2b * r2 + e2a * e4b * r2 * r2 * 5.0;
    let t2 = TWO_PI_I * om.o22 - e2a * r2 + e2b * e4a * r2 * r2 * 5.0;
    Ok(EpsCoords {
        tau1: t1 / TWO_PI_I,
        tau2: t2 / TWO_PI_I,
        eps: -r + e2a * e2b * r2 * r,
    })
}

/// The same bridge obtained by substituting the rho-scheme `Omega(w)` expansions
/// into [`omega_inverse_expansion`] with series arithmetic; `E_k(Omega_ii)` are
/// expanded about `tau` and `f(chi)` with `D E_2 = 5 E_4 - E_2^2`.
pub fn eps_coords_via_inversion(tau: C64, chi: C64, policy: &EvalPolicy) -> Result<EpsCoordSeries> {
    check_chi(chi)?;
    let ex = period_matrix_chi_expansion(tau, chi, policy)?;
    let e2t = eisenstein(2, tau, policy)?;
    let e4t = eisenstein(4, tau, policy)?;
    let f = catalan_f_value(chi);
    let e2f = eisenstein_at_nome(2, f, policy)?;
    let e4f = eisenstein_at_nome(4, f, policy)?;
    let ord = 5;
    let cst = |v: C64| TruncatedSeries::constant(v, ord);
    // E_2 at 2 pi i tau + delta, to first order in delta = O(w^2)
    let shift = |s: &TruncatedSeries, base: C64| -> TruncatedSeries { s - &cst(base) };
    let e2_11 = &cst(e2t) + &shift(&ex.o11, TWO_PI_I * tau).scale(e4t * 5.0 - e2t * e2t);
    let e2_22 = &cst(e2f) + &shift(&ex.o22, f.ln()).scale(e4f * 5.0 - e2f * e2f);
    let r = ex.o12.truncate(ord);
    let r2 = &r * &r;
    let r4 = &r2 * &r2;
    let t1 = &(&ex.o11.truncate(ord) - &(&e2_22 * &r2)) + &r4.scale(e2t * e4f * 5.0);
    let t2 = &(&ex.o22.truncate(ord) - &(&e2_11 * &r2)) + &r4.scale(e2f * e4t * 5.0);
    let eps = &(-&r) + &(&(&r2 * &r).scale(e2t * e2f));
    Ok(EpsCoordSeries {
        t1,
        t2,
        eps: eps.truncate(4),
    })
}

/// Coefficients `c_0 .. c_nmax` of an analytic `g(w)` about 0, sampled at `m`
/// points on `|w| = radius`. Averaging over the phases removes all orders not
/// congruent modulo `m`.
pub fn w_coefficients<F>(g: F, radius: f64, m: usize, nmax: usize) -> Result<Vec<C64>>
where
    F: FnMut(C64) -> Result<C64>,
{
    taylor_coefficients(g, C64::new(0.0, 0.0), radius, m, nmax)
}

/// Extrapolated coefficient and its estimates on a halving radius grid.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientFit {
    pub power: usize,
    #[serde(serialize_with = "ser_c64")]
    pub value: C64,
    /// estimate at each radius
    pub by_radius: Vec<(f64, [f64; 2])>,
    /// relative spread between the two smallest radii
    pub spread: f64,
}

fn ser_c64<S: serde::Serializer>(v: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [v.re, v.im].serialize(s)
}

/// Fits the `w^power` coefficient of `g` on the radii `radii` (largest first).
/// Aliasing from order `power + m` shrinks like `radius^m`, so the smallest
/// radius is used; the spread to the next radius is the error estimate.
pub fn fit_coefficient<F>(mut g: F, power: usize, radii: &[f64], m: usize, max_spread: f64) -> Result<CoefficientFit>
where
    F: FnMut(C64) -> Result<C64>,
{
    if radii.len() < 2 {
        return Err(Error::FitError("need at least two radii".into()));
    }
    let mut by_radius = Vec::new();
    for &r in radii {
        let c = w_coefficients(&mut g, r, m, power)?;
        by_radius.push((r, [c[power].re, c[power].im]));
    }
    let k = by_radius.len();
    let last = C64::new(by_radius[k - 1].1[0], by_radius[k - 1].1[1]);
    let prev = C64::new(by_radius[k - 2].1[0], by_radius[k - 2].1[1]);
    let spread = (last - prev).norm() / last.norm().max(1e-300);
    if !(spread <= max_spread) {
        return Err(Error::FitError(format!(
            "w^{power} coefficient moved by {spread:.3e} between radii {} and {}",
            by_radius[k - 2].0,
            by_radius[k - 1].0
        )));
    }
    Ok(CoefficientFit {
        power,
        value: last,
        by_radius,
        spread,
    })
}

/// Policy for the comparison runs: the rho sewing at `|chi| ~ 0.2` converges like
/// `(4|chi|)^N`, so the truncation cap is raised.
pub fn comparison_policy() -> SewPolicy {
    SewPolicy {
        cap: 512,
        tol: 1e-15,
        ..SewPolicy::default()
    }
}

/// The three ratios compared near the degeneration point, at one `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioSample {
    /// `Z_{M^2,eps} / Z_{M^2,rho}`
    pub unnormalized: C64,
    /// `Z_{mod,eps} q_2^{1/12} / Z_{mod,rho}`
    pub modular_q2: C64,
    /// `Z_{mod,eps} / (Z_{mod,rho} f^{-1/12})`
    pub modular_f: C64,
    /// `Z_{M^2,eps} / (Z_{M^2}(q) Z_{M^2}(f))`
    pub eps_over_tori: C64,
    /// `Z_{M^2,rho} / (Z_{M^2}(q) Z_{M^2}(f))`
    pub rho_over_tori: C64,
}

/// Evaluates both rank two partition functions at `(tau, w, chi)`, with the eps
/// point taken from the bridge.
pub fn ratio_sample(tau: C64, chi: C64, w: C64, policy: &SewPolicy) -> Result<RatioSample> {
    let pt = ChiPoint::new(tau, w, chi)?;
    let c = eps_coords_from_chi(&pt, &policy.eval)?;
    let de = EpsSewing::new(EpsPoint::new(c.tau1, c.tau2, c.eps)?, policy)?.evaluate()?.det;
    let dr = RhoSewing::new(pt.rho_point()?, policy)?.evaluate()?.det;
    let z1 = |t: C64| z1_boson(t, &policy.eval);
    let eta = |t: C64| dedekind_eta(t, &policy.eval);
    let (a, b, t) = (z1(c.tau1)?, z1(c.tau2)?, z1(tau)?);
    let ze = a * a * b * b / de;
    let zr = t * t / dr;
    let (e1, e2, e) = (eta(c.tau1)?, eta(c.tau2)?, eta(tau)?);
    let zme = (e1 * e1 * e2 * e2 * de).inv();
    let zmr = (e * e * dr).inv();
    let q2_12 = (TWO_PI_I * c.tau2 / 12.0).exp();
    let f = catalan_f_value(chi);
    let f_12 = (f.ln() / 12.0).exp();
    let zf = z1(f.ln() / TWO_PI_I)?;
    let tori = t * t * zf * zf;
    Ok(RatioSample {
        eps_over_tori: ze / tori,
        rho_over_tori: zr / tori,
        unnormalized: ze / zr,
        modular_q2: zme * q2_12 / zmr,
        modular_f: zme * f_12 / zmr,
    })
}

/// Memoized [`ratio_sample`] over the sample circles.
pub struct RatioSampler {
    tau: C64,
    chi: C64,
    policy: SewPolicy,
    cache: Vec<(C64, RatioSample)>,
}

impl RatioSampler {
    pub fn new(tau: C64, chi: C64, policy: &SewPolicy) -> Result<Self> {
        check_chi(chi)?;
        TorusPoint::new(tau)?;
        Ok(RatioSampler {
            tau,
            chi,
            policy: *policy,
            cache: Vec::new(),
        })
    }

    pub fn at(&mut self, w: C64) -> Result<RatioSample> {
        if let Some((_, v)) = self.cache.iter().find(|(x, _)| *x == w) {
            return Ok(*v);
        }
        let v = ratio_sample(self.tau, self.chi, w, &self.policy)?;
        self.cache.push((w, v));
        Ok(v)
    }

    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }
}

/// Outcome of a comparison fit, in the report layout
/// `{tau, chi, fitted_coeffs, paper_prediction, residual}`.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub kind: String,
    #[serde(serialize_with = "ser_c64")]
    pub tau: C64,
    #[serde(serialize_with = "ser_c64")]
    pub chi: C64,
    pub fitted_coeffs: Vec<CoefficientFit>,
    #[serde(serialize_with = "ser_c64")]
    pub paper_prediction: C64,
    /// `|fitted - prediction| / |prediction|`
    pub residual: f64,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Default radii for the ratio fits.
pub const RATIO_RADII: [f64; 2] = [0.2, 0.1];
/// Samples per circle.
pub const RATIO_SAMPLES: usize = 16;

/// Fits `Z_eps / Z_rho - 1 = c_2 w^2 + O(w^4)`; prediction `(1 - 4 chi)/144`.
pub fn ratio_unnormalized(sampler: &mut RatioSampler, radii: &[f64]) -> Result<ComparisonReport> {
    let fit = fit_coefficient(|w| Ok(sampler.at(w)?.unnormalized), 2, radii, RATIO_SAMPLES, 0.02)?;
    let chi = sampler.chi;
    let pred = (C64::new(1.0, 0.0) - chi * 4.0) / 144.0;
    Ok(ComparisonReport {
        kind: "ratio_unnormalized".into(),
        tau: sampler.tau,
        chi,
        residual: (fit.value - pred).norm() / pred.norm(),
        fitted_coeffs: vec![fit],
        paper_prediction: pred,
    })
}

/// Predicted form of the modular `w^4` coefficient,
/// `E_4(tau) (73/1440 + 39 H(chi)) (1 - 4 chi)^2`.
pub fn modular_w4_prediction(tau: C64, chi: C64, policy: &EvalPolicy) -> Result<C64> {
    let e4 = eisenstein(4, tau, policy)?;
    let h = h_of_chi(chi, policy)?;
    let a = C64::new(1.0, 0.0) - chi * 4.0;
    Ok(e4 * (h * 39.0 + 73.0 / 1440.0) * a * a)
}

/// Fits the modular ratios: the `w^2` coefficient of `Z_mod,eps q_2^{1/12}/Z_mod,rho`
/// (first entry, expected 0) and the `w^4` coefficient of the `f^{-1/12}`
/// corrected ratio (second entry), compared with [`modular_w4_prediction`].
pub fn ratio_modular(sampler: &mut RatioSampler, radii: &[f64]) -> Result<ComparisonReport> {
    // the w^2 term should vanish, so its relative spread is not meaningful
    let w2 = fit_coefficient(|w| Ok(sampler.at(w)?.modular_q2), 2, radii, RATIO_SAMPLES, f64::INFINITY)?;
    let w4 = fit_coefficient(|w| Ok(sampler.at(w)?.modular_f), 4, radii, RATIO_SAMPLES, 0.02)?;
    let (tau, chi) = (sampler.tau, sampler.chi);
    let pred = modular_w4_prediction(tau, chi, &sampler.policy.eval)?;
    Ok(ComparisonReport {
        kind: "ratio_modular".into(),
        tau,
        chi,
        residual: (w4.value - pred).norm() / pred.norm(),
        fitted_coeffs: vec![w2, w4],
        paper_prediction: pred,
    })
}
