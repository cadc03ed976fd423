use genus2::extract::{loglog_slope, taylor_coefficients};
use genus2::linalg::{det, identity};
use genus2::modular_forms::{c_kernel, d_kernel, eisenstein, min_lattice_distance, prime_form, EvalPolicy};
use genus2::comparison::{comparison_policy, fit_coefficient};
use genus2::series::{catalan_f, catalan_f_value, TruncatedSeries};
use genus2::sewing_eps::{g_action_h2, z1_boson, GElement, PeriodMatrix, SewPolicy};
use genus2::sewing_rho::*;
use genus2::{Error, C64, TWO_PI_I};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pol() -> SewPolicy {
    SewPolicy::default()
}

fn ev() -> EvalPolicy {
    EvalPolicy::default()
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// Omega_22 is defined through a principal log, so compare it modulo integers
fn omega_diff(a: &PeriodMatrix, b: &PeriodMatrix) -> f64 {
    let d22 = a.o22 - b.o22;
    let d22 = d22 - d22.re.round();
    (a.o11 - b.o11).norm().max((a.o12 - b.o12).norm()).max(d22.norm())
}

#[test]
fn first_block_from_kernels() {
    let (tau, w, rho) = (c(0.0, 2.0), c(0.35, 0.0), c(-0.01, 0.0));
    let pt = RhoPoint::new(tau, w, rho).unwrap();
    let (r, b) = moment_matrix_rho(&pt, 4, &pol()).unwrap();
    let d11 = d_kernel(1, 1, tau, w, &ev()).unwrap();
    let c11 = c_kernel(1, 1, tau, &ev()).unwrap();
    let tol = 1e-15;
    assert!((r.get(0, 0, 1, 1) + rho * d11).norm() < tol);
    assert!((r.get(1, 1, 1, 1) + rho * d11).norm() < tol);
    assert!((r.get(0, 1, 1, 1) + rho * c11).norm() < tol);
    assert!((r.get(1, 0, 1, 1) + rho * c11).norm() < tol);
    // b(2) = (rho / sqrt 2)(P_2(w) - E_2) [-1, 1]
    let p2 = d_kernel(1, 1, tau, w, &ev()).unwrap();
    let e2 = eisenstein(2, tau, &ev()).unwrap();
    let want = rho / 2f64.sqrt() * (p2 - e2);
    assert!((b.b[1] + want).norm() < tol);
    assert!((b.b[4 + 1] - want).norm() < tol);
    assert_eq!(b.bar()[0], b.b[4]);
}

#[test]
fn log_trace_determinant() {
    let pt = RhoPoint::new(c(0.0, 2.0), c(0.3, 0.0), c(-0.005, 0.0)).unwrap();
    let n = 12;
    let (r, _) = moment_matrix_rho(&pt, n, &pol()).unwrap();
    let mut pw = identity(2 * n);
    let mut log = c(0.0, 0.0);
    for k in 1..=60 {
        pw = &pw * &r.r;
        log -= pw.trace() / k as f64;
    }
    let mut s = RhoSewing::new(pt, &pol()).unwrap();
    let lu = s.at_truncation(n).unwrap().det;
    assert!((log.exp() - lu).norm() < 1e-14 * lu.norm());
    let conv = s.evaluate().unwrap().det;
    assert!((conv - lu).norm() < 1e-8);
    let z = z2_boson_rho(&pt, 2.0, &pol()).unwrap();
    let z1 = z1_boson(pt.tau, &ev()).unwrap();
    assert!((z - z1 * z1 / conv).norm() < 1e-13 * z.norm());
}

#[test]
fn swapped_copy_form_has_same_determinant() {
    let pt = RhoPoint::new(c(0.1, 1.4), c(0.4, 0.2), c(-0.003, 0.002)).unwrap();
    for n in [4usize, 8, 16] {
        let (r, _) = moment_matrix_rho(&pt, n, &pol()).unwrap();
        let p = copy_swap(n);
        let lhs = det(&(identity(2 * n) - &r.r));
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = det(&(&p - &r.vee())) * sign;
        assert!((lhs - rhs).norm() < 1e-13);
    }
}

#[test]
fn degeneration_at_small_w() {
    let (tau, chi) = (c(0.0, 2.0), c(0.1, 0.0));
    let w = c(1e-3, 0.0);
    let om = period_matrix_rho(&RhoPoint::from_chi(tau, w, chi).unwrap(), &comparison_policy()).unwrap();
    let f = catalan_f_value(chi);
    assert!((om.o11 - tau).norm() < 1e-6);
    assert!((om.o22 - f.ln() / TWO_PI_I).norm() < 1e-6);
    let lead = (1.0 - chi * 4.0).sqrt() * w / TWO_PI_I;
    assert!((om.o12 - lead).norm() < 1e-8);
}

#[test]
fn exponential_of_omega22() {
    let pt = RhoPoint::new(c(0.0, 2.0), c(0.3, 0.1), c(-0.005, 0.002)).unwrap();
    let mut s = RhoSewing::new(pt, &pol()).unwrap();
    let evn = s.evaluate().unwrap();
    let (r, b) = s.moments(evn.n).unwrap();
    let y = (identity(2 * evn.n) - &r.r).try_inverse().unwrap() * b.bar();
    let btb = b.b.dot(&y);
    let k = prime_form(pt.tau, pt.w, &ev()).unwrap();
    let want = -pt.rho / (k * k) * (-btb).exp();
    let got = (TWO_PI_I * evn.omega.o22).exp();
    assert!((got - want).norm() < 1e-9 * want.norm());
}

fn sample_points() -> Vec<RhoPoint> {
    vec![
        RhoPoint::new(c(0.1, 1.1), c(0.3, 0.1), c(-0.004, 0.0)).unwrap(),
        RhoPoint::new(c(0.0, 1.0), c(-0.2, 0.4), c(0.002, 0.003)).unwrap(),
        RhoPoint::new(c(-0.3, 1.2), c(0.5, -0.2), c(-0.006, -0.002)).unwrap(),
    ]
}

const S: [i64; 4] = [0, -1, 1, 0];
const T: [i64; 4] = [1, 1, 0, 1];

#[test]
fn gamma1_equivariance() {
    for pt in sample_points() {
        let om = period_matrix_rho(&pt, &pol()).unwrap();
        for m in [S, T] {
            let lhs = period_matrix_rho(&gamma1_action(m, &pt).unwrap(), &pol()).unwrap();
            let rhs = om.act(&g_action_h2(&GElement::Gamma1(m))).unwrap();
            assert!(omega_diff(&lhs, &rhs) < 1e-7, "{m:?}: {lhs:?} vs {rhs:?}");
        }
    }
}

#[test]
fn gamma1_coordinates() {
    let pt = RhoPoint::new(c(0.0, 2.0), c(0.3, 0.0), c(-0.005, 0.0)).unwrap();
    assert_eq!(gamma1_action([1, 0, 0, 1], &pt).unwrap(), pt);
    let s = gamma1_action(S, &pt).unwrap();
    assert!((s.tau - c(0.0, 0.5)).norm() < 1e-15);
    assert!((s.chi() - pt.chi()).norm() < 1e-15);
    let j = jacobi_action(0, 1, &pt).unwrap();
    assert_eq!(j.w, pt.w + TWO_PI_I);
    assert_eq!(j.rho, pt.rho);
    let j = jacobi_action(1, 0, &pt).unwrap();
    assert!((j.w - pt.w - TWO_PI_I * pt.tau).norm() < 1e-15);
    assert!(matches!(gamma1_action([1, 1, 1, 1], &pt), Err(Error::InvalidInput(_)) | Err(Error::DomainError(_))));
}

#[test]
fn domain_predicate() {
    let tau = c(0.0, 2.0);
    let w = c(0.3, 0.0);
    // |w - 0| = 0.3 must exceed 2 |rho|^{1/2}
    assert!(RhoPoint::new(tau, w, c(-0.0224, 0.0)).is_ok());
    assert!(matches!(RhoPoint::new(tau, w, c(-0.0226, 0.0)), Err(Error::DomainError(_))));
    let near = c(0.0, 1.0) + TWO_PI_I;
    assert!(matches!(RhoPoint::new(tau, near, c(0.3, 0.0)), Err(Error::DomainError(_))));
}

#[test]
fn determinant_transformation() {
    for pt in sample_points() {
        let d = det_i_minus_r(&pt, &pol()).unwrap();
        let om = period_matrix_rho(&pt, &pol()).unwrap();
        for m in [S, T] {
            let [_, _, c1, d1] = m;
            let dm = det_i_minus_r(&gamma1_action(m, &pt).unwrap(), &pol()).unwrap();
            let factor = (om.o11 * c1 as f64 + d1 as f64) / (pt.tau * c1 as f64 + d1 as f64);
            assert!((dm - factor * d).norm() < 1e-7, "{m:?}");
        }
    }
}

#[test]
fn modular_partition_function_multipliers() {
    for pt in sample_points() {
        let z = z2_boson_rho_modular(&pt, &pol()).unwrap();
        let om = period_matrix_rho(&pt, &pol()).unwrap();
        for (m, want) in [(S, c(0.0, 1.0)), (T, C64::from_polar(1.0, -PI / 6.0))] {
            let zm = z2_boson_rho_modular(&gamma1_action(m, &pt).unwrap(), &pol()).unwrap();
            let ratio = zm * (om.o11 * m[2] as f64 + m[3] as f64) / z;
            assert!((ratio.norm() - 1.0).abs() < 1e-8);
            assert!((ratio.powi(12) - 1.0).norm() < 1e-7);
            assert!((ratio - want).norm() < 1e-8, "{m:?}: {ratio}");
        }
    }
}

#[test]
fn sphere_moments() {
    let (tau, chi) = (c(0.0, 2.0), c(0.07, 0.03));
    let n = 6;
    let x = rho_w_expansion(tau, chi, n, 4, &ev()).unwrap();
    let u = (-chi).sqrt();
    for k in 1..=n {
        for l in 1..=n {
            let mag = u.powu((k + l) as u32).norm() * (k + l - 1) as f64 * binom(k + l - 2, k - 1)
                / ((k * l) as f64).sqrt();
            for (row, col) in [(k - 1, l - 1), (n + k - 1, n + l - 1)] {
                assert!((x.r[0][(row, col)].norm() - mag).abs() < 1e-15 * mag.max(1.0));
            }
            assert_eq!(x.r[0][(k - 1, n + l - 1)], c(0.0, 0.0));
        }
    }
    // R^(2) is chi E_2 on the (1,1) block, zero elsewhere
    let e2 = eisenstein(2, tau, &ev()).unwrap();
    for i in 0..2 * n {
        for j in 0..2 * n {
            let want = if i % n == 0 && j % n == 0 { chi * e2 } else { c(0.0, 0.0) };
            assert!((x.r[1][(i, j)] - want).norm() < 1e-15, "({i},{j})");
        }
    }
    // R(w) - R^(0) - R^(2) w^2 - R^(4) w^4 = O(w^6)
    let mut prev = f64::NAN;
    for w in [c(0.08, 0.0), c(0.04, 0.0)] {
        let (r, _) = moment_matrix_rho(&RhoPoint::from_chi(tau, w, chi).unwrap(), n, &pol()).unwrap();
        let rem = (&r.r - &x.r[0] - &x.r[1] * (w * w) - &x.r[2] * w.powu(4)).norm();
        if prev.is_finite() {
            assert!(prev / rem > 2f64.powi(5), "{prev} / {rem}");
        }
        prev = rem;
    }
}

fn chi_coefficients(g: impl FnMut(C64) -> genus2::Result<C64>) -> Vec<C64> {
    taylor_coefficients(g, c(0.0, 0.0), 0.08, 32, 6).unwrap()
}

fn z_m2_of_f(order: i64) -> TruncatedSeries {
    let f = catalan_f(order).unwrap();
    let one = TruncatedSeries::constant(c(1.0, 0.0), order);
    let mut prod = one.clone();
    for k in 1..order {
        prod = &prod * &(&one - &f.powi(k).unwrap());
    }
    prod.powi(-2).unwrap()
}

#[test]
fn sphere_determinant_series() {
    let tau = c(0.0, 2.0);
    let n = 40;
    let got = chi_coefficients(|chi| {
        let x = rho_w_expansion(tau, chi, n, 0, &ev())?;
        Ok(det(&(identity(2 * n) - &x.r[0])).inv())
    });
    let want = z_m2_of_f(7);
    for k in 0..=6 {
        let w = want.coeff(k as i64).unwrap();
        assert!((got[k] - w).norm() < 1e-8 * w.norm().max(1.0), "chi^{k}: {} vs {w}", got[k]);
    }
}

#[test]
fn sphere_resolvent_sum() {
    let tau = c(0.0, 2.0);
    let n = 40;
    let got = chi_coefficients(|chi| {
        let x = rho_w_expansion(tau, chi, n, 0, &ev())?;
        let t = &x.t[0];
        Ok(chi * (t[(0, 0)] + t[(0, n)] + t[(n, 0)] + t[(n, n)]))
    });
    // (1 - 4 chi) G(chi) with G = 1/12 + E_2(f) = 2 sum sigma_1(m) f^m
    let mut e = vec![0.0; 7];
    for (m, slot) in e.iter_mut().enumerate().skip(1) {
        *slot = 2.0 * (1..=m).filter(|d| m % d == 0).sum::<usize>() as f64;
    }
    let g = TruncatedSeries::from_real(&e, 7).compose(&catalan_f(7).unwrap()).unwrap();
    let want = &TruncatedSeries::from_real(&[1.0, -4.0], 7) * &g;
    for k in 0..=6 {
        let w = want.coeff(k as i64).unwrap();
        assert!((got[k] - w).norm() < 1e-8 * w.norm().max(1.0), "chi^{k}: {} vs {w}", got[k]);
    }
    let chi = c(0.05, 0.01);
    let direct = (1.0 - chi * 4.0) * g_of_chi(chi, &ev()).unwrap();
    assert!((want.eval(chi) - direct).norm() < 1e-6);
}

#[test]
fn sphere_b_resolvent() {
    let chi = c(0.06, -0.02);
    let n = 60;
    let x = rho_w_expansion(c(0.0, 2.0), chi, n, 0, &ev()).unwrap();
    let f = catalan_f_value(chi);
    let big_x = chi * (1.0 + f);
    assert!(((1.0 - big_x * 2.0).powi(2) - (1.0 - chi * 4.0)).norm() < 1e-15);
    let bt = x.t[0].transpose() * &x.b[0];
    let tb = &x.t[0] * (&copy_swap(n) * &x.b[0]);
    let u = (-chi).sqrt();
    for k in 1..=5usize {
        for a in 0..2usize {
            // copies a = 0, 1 are the points labelled 1, 2
            let sg = if (k + 1) * (a + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let want = big_x.powu(k as u32) * sg / k as f64;
            let scale = u.powu(k as u32) / (k as f64).sqrt();
            let idx = a * n + k - 1;
            assert!((scale * bt[idx] - want).norm() < 1e-14, "k={k} a={a}");
            // R^T = P R P makes T bbar^T the copy-swapped b T
            let swapped = (1 - a) * n + k - 1;
            assert!((scale * tb[swapped] - want).norm() < 1e-14, "k={k} a={a}");
        }
    }
}

// S_{1,k} = 1 and S_{n,k} = sum_j chi^j C(k + j - 1, j) S_{n-1,j}
#[test]
fn nested_binomial_sums() {
    let order = 9usize;
    let f = catalan_f(order as i64).unwrap();
    for k in 1..=6usize {
        // s[j] holds the chi-coefficients of S_{n,j}, for j up to `order`
        let mut s: Vec<Vec<f64>> = (0..=order).map(|_| {
            let mut v = vec![0.0; order];
            v[0] = 1.0;
            v
        }).collect();
        let mut total = s[k].clone();
        for _ in 2..=order {
            let mut next = vec![vec![0.0; order]; order + 1];
            for (kk, slot) in next.iter_mut().enumerate().skip(1) {
                for j in 1..order {
                    let cb = binom(kk + j - 1, j);
                    for p in 0..order - j {
                        slot[p + j] += cb * s[j][p];
                    }
                }
            }
            s = next;
            for p in 0..order {
                total[p] += s[k][p];
            }
        }
        let want = (&TruncatedSeries::constant(c(1.0, 0.0), order as i64) + &f).powi(k as i64).unwrap();
        for (p, t) in total.iter().enumerate() {
            assert_eq!(c(*t, 0.0), want.coeff(p as i64).unwrap(), "k={k} chi^{p}");
        }
    }
}

#[test]
fn chi_expansion_matches_fits() {
    let (tau, chi) = (c(0.0, 2.0), c(0.1, 0.0));
    let x = period_matrix_chi_expansion(tau, chi, &ev()).unwrap();
    let a = 1.0 - chi * 4.0;
    let g = g_of_chi(chi, &ev()).unwrap();
    let e2 = eisenstein(2, tau, &ev()).unwrap();
    assert_eq!(x.o12.coeff(1).unwrap(), a.sqrt());
    assert_eq!(x.o22.coeff(0).unwrap(), catalan_f_value(chi).ln());
    assert!((x.o11.coeff(4).unwrap() - a * a * g * g * e2).norm() < 1e-15);

    let p = comparison_policy();
    let om = |w: C64| period_matrix_rho(&RhoPoint::from_chi(tau, w, chi)?, &p);
    let radii = [0.2, 0.1];
    let checks: [(usize, usize, &TruncatedSeries); 6] = [
        (0, 2, &x.o11),
        (0, 4, &x.o11),
        (1, 1, &x.o12),
        (1, 3, &x.o12),
        (2, 2, &x.o22),
        (2, 4, &x.o22),
    ];
    for (entry, power, series) in checks {
        let fit = fit_coefficient(
            |w| {
                let o = om(w)?;
                Ok(TWO_PI_I * [o.o11, o.o12, o.o22][entry])
            },
            power,
            &radii,
            16,
            1e-6,
        )
        .unwrap();
        let want = series.coeff(power as i64).unwrap();
        assert!((fit.value - want).norm() < 1e-7 * want.norm(), "entry {entry} w^{power}: {} vs {want}", fit.value);
    }
}

#[test]
fn partition_function_degenerates_linearly() {
    let (tau, chi) = (c(0.0, 2.0), c(0.1, 0.0));
    let f = catalan_f_value(chi);
    let limit = z1_boson(tau, &ev()).unwrap() * z1_boson(f.ln() / TWO_PI_I, &ev()).unwrap();
    let ws = [4e-2, 2e-2, 1e-2];
    let errs: Vec<f64> = ws
        .iter()
        .map(|&w| {
            let pt = RhoPoint::from_chi(tau, c(w, 0.0), chi).unwrap();
            (z2_boson_rho(&pt, 1.0, &comparison_policy()).unwrap() - limit).norm()
        })
        .collect();
    let slope = loglog_slope(&ws, &errs).unwrap();
    assert!(slope >= 0.9, "slope {slope}");
}

// 27 points: 3 moduli x 3 positions x 3 handle sizes in units of the domain bound
#[test]
fn holomorphy_sweep() {
    let taus = [c(0.0, 1.0), c(0.3, 0.8), c(-0.4, 1.5)];
    let ws = [c(0.5, 0.0), c(1.2, 0.8), c(-0.6, 1.5)];
    let p = SewPolicy { cap: 512, tol: 1e-12, ..pol() };
    for &tau in &taus {
        assert!(min_lattice_distance(tau) > 2.0 * 1.7);
        for &w in &ws {
            let mut dist = w.norm();
            for m in -3i32..=3 {
                for n in -3i32..=3 {
                    dist = dist.min((w - TWO_PI_I * (tau * m as f64 + n as f64)).norm());
                }
            }
            let bound = 0.25 * dist * dist;
            for (i, frac) in [0.2, 0.5, 0.8].into_iter().enumerate() {
                let rho = C64::from_polar(frac * bound, 1.1 * i as f64 + 0.2);
                let mut s = RhoSewing::new(RhoPoint::new(tau, w, rho).unwrap(), &p).unwrap();
                let e = s.evaluate().unwrap();
                assert!(e.det.norm() > 1e-6);
                let twice = s.at_truncation(2 * e.n).unwrap();
                assert!((twice.det - e.det).norm() < 1e-9 * e.det.norm(), "{tau} {w} {rho}");
                assert!(e.omega.in_siegel_space());
            }
        }
    }
}
