use genus2::extract::taylor_coefficients;
use genus2::linalg::{det, identity, CMat};
use genus2::modular_forms::{eisenstein, EvalPolicy, Torus};
use genus2::sewing_eps::*;
use genus2::{Error, C64, TWO_PI_I};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pol() -> SewPolicy {
    SewPolicy::default()
}

fn e(k: usize, tau: C64) -> C64 {
    eisenstein(k, tau, &EvalPolicy::default()).unwrap()
}

#[test]
fn moment_entries() {
    let (tau, eps) = (c(0.0, 2.0), c(0.1, 0.0));
    let mut t = Torus::new(tau, &EvalPolicy::default()).unwrap();
    let a = moment_matrix_eps(&mut t, eps, 6).unwrap();
    assert!((a[(0, 0)] - eps * e(2, tau)).norm() < 1e-15 * a[(0, 0)].norm());
    assert_eq!(a[(0, 1)], c(0.0, 0.0));
    assert!((a[(1, 1)] + eps * eps * e(4, tau) * 3.0).norm() < 1e-15 * a[(1, 1)].norm());
    for k in 0..6 {
        for l in 0..6 {
            if (k + l) % 2 == 1 {
                assert_eq!(a[(k, l)], c(0.0, 0.0));
            }
        }
    }
}

#[test]
fn determinant_is_even_in_eps() {
    let p = pol();
    for eps in [c(0.2, 0.0), c(0.1, 0.3), c(-0.5, 0.2)] {
        let a = det_i_minus_a1a2(&EpsPoint::new(c(0.0, 2.0), c(0.1, 1.5), eps).unwrap(), &p).unwrap();
        let b = det_i_minus_a1a2(&EpsPoint::new(c(0.0, 2.0), c(0.1, 1.5), -eps).unwrap(), &p).unwrap();
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn determinant_matches_log_trace() {
    let pt = EpsPoint::new(c(0.0, 2.0), c(0.0, 2.0), c(0.2, 0.0)).unwrap();
    let mut s = EpsSewing::new(pt, &pol()).unwrap();
    let m = s.moments(24).unwrap();
    let prod = &m.a1 * &m.a2;
    let mut pw = identity(24);
    let mut log = c(0.0, 0.0);
    for n in 1..=60 {
        pw = &pw * &prod;
        log -= pw.trace() / n as f64;
    }
    let lu = det_i_minus_a1a2(&pt, &pol()).unwrap();
    assert!((log.exp() - lu).norm() < 1e-14 * lu.norm());
}

#[test]
fn period_matrix_matches_neumann_series() {
    let pt = EpsPoint::new(c(0.0, 2.0), c(0.0, 2.0), c(0.2, 0.0)).unwrap();
    let mut s = EpsSewing::new(pt, &pol()).unwrap();
    let n = 24;
    let m = s.moments(n).unwrap();
    let sum = |x: &CMat, y: &CMat| {
        let p = x * y;
        let mut acc = identity(n);
        let mut pw = identity(n);
        for _ in 0..80 {
            pw = &pw * &p;
            acc += &pw;
        }
        acc
    };
    let t12 = sum(&m.a1, &m.a2);
    let t21 = sum(&m.a2, &m.a1);
    let eps = pt.eps;
    let o11 = pt.tau1 + eps * (&m.a2 * &t12)[(0, 0)] / TWO_PI_I;
    let o22 = pt.tau2 + eps * (&m.a1 * &t21)[(0, 0)] / TWO_PI_I;
    let o12 = -eps * t12[(0, 0)] / TWO_PI_I;
    let om = period_matrix_eps(&pt, &pol()).unwrap();
    assert!(om.max_diff(&PeriodMatrix::new(o11, o12, o22)) < 1e-15);
    assert!(om.in_siegel_space());
}

#[test]
fn off_diagonal_leading_terms() {
    // 2 pi i Omega_12 = -eps - E2(tau1) E2(tau2) eps^3 + O(eps^5)
    let (t1, t2) = (c(0.1, 1.2), c(-0.2, 0.9));
    let want = -e(2, t1) * e(2, t2);
    for eps in [c(0.02, 0.0), c(0.0, 0.01)] {
        let om = period_matrix_eps(&EpsPoint::new(t1, t2, eps).unwrap(), &pol()).unwrap();
        let cubic = (TWO_PI_I * om.o12 + eps) / (eps * eps * eps);
        assert!((cubic - want).norm() < 1e-2 * want.norm(), "{cubic} vs {want}");
    }
}

#[test]
fn domain_and_cap_errors() {
    let d = min_lattice_distance(c(0.0, 1.0));
    let edge = 0.25 * d * d;
    assert!(EpsPoint::new(c(0.0, 1.0), c(0.0, 1.0), c(0.99 * edge, 0.0)).is_ok());
    assert!(matches!(
        EpsPoint::new(c(0.0, 1.0), c(0.0, 1.0), c(edge, 0.0)),
        Err(Error::DomainError(_))
    ));
    let tight = SewPolicy { cap: 16, ..pol() };
    let pt = EpsPoint::new(c(0.0, 1.0), c(0.0, 1.0), c(0.9 * edge, 0.0)).unwrap();
    assert!(matches!(det_i_minus_a1a2(&pt, &tight), Err(Error::CapExceeded(_))));
}

fn sample_points() -> Vec<EpsPoint> {
    vec![
        EpsPoint::new(c(0.1, 1.1), c(-0.2, 1.3), c(0.05, 0.02)).unwrap(),
        EpsPoint::new(c(0.0, 1.0), c(0.3, 0.95), c(-0.08, 0.03)).unwrap(),
        EpsPoint::new(c(-0.3, 1.2), c(0.0, 1.5), c(0.02, -0.1)).unwrap(),
    ]
}

fn generators() -> Vec<GElement> {
    vec![GElement::T1, GElement::S1, GElement::T2, GElement::S2, GElement::Beta]
}

#[test]
fn period_map_is_equivariant() {
    for pt in sample_points() {
        let om = period_matrix_eps(&pt, &pol()).unwrap();
        for g in generators() {
            let moved = g_action(&g, &pt).unwrap();
            let lhs = period_matrix_eps(&moved, &pol()).unwrap();
            let rhs = om.act(&g_action_h2(&g)).unwrap();
            assert!(lhs.max_diff(&rhs) < 1e-8, "{g:?}: {lhs:?} vs {rhs:?}");
        }
    }
}

#[test]
fn identity_element_fixes_points() {
    let pt = sample_points()[0];
    assert_eq!(g_action(&GElement::Gamma1([1, 0, 0, 1]), &pt).unwrap(), pt);
    assert_eq!(g_action(&GElement::Beta, &pt).unwrap(), EpsPoint::new(pt.tau2, pt.tau1, pt.eps).unwrap());
    for g in generators() {
        assert!(g_action_h2(&g).is_symplectic());
    }
}

#[test]
fn determinant_transformation() {
    for pt in sample_points() {
        let d = det_i_minus_a1a2(&pt, &pol()).unwrap();
        let om = period_matrix_eps(&pt, &pol()).unwrap();
        for (g, m) in [(GElement::S1, [0i64, -1, 1, 0]), (GElement::T1, [1, 1, 0, 1])] {
            let [_, _, c1, d1] = m;
            let dm = det_i_minus_a1a2(&g_action(&g, &pt).unwrap(), &pol()).unwrap();
            let factor = (om.o11 * c1 as f64 + d1 as f64) / (pt.tau1 * c1 as f64 + d1 as f64);
            assert!((dm - factor * d).norm() < 1e-7, "{g:?}");
        }
    }
}

#[test]
fn modular_partition_function_multipliers() {
    let t = C64::from_polar(1.0, -PI / 6.0);
    let expected = [t, c(0.0, 1.0), t, c(0.0, 1.0), c(-1.0, 0.0)];
    for pt in sample_points() {
        let z = z2_boson_eps_modular(&pt, &pol()).unwrap();
        let om = period_matrix_eps(&pt, &pol()).unwrap();
        for (g, want) in generators().into_iter().zip(expected) {
            let zm = z2_boson_eps_modular(&g_action(&g, &pt).unwrap(), &pol()).unwrap();
            let ratio = zm * g_action_h2(&g).det_c_omega_d(&om) / z;
            assert!((ratio.norm() - 1.0).abs() < 1e-8);
            assert!((ratio.powi(12) - 1.0).norm() < 1e-7);
            assert!((ratio - want).norm() < 1e-8, "{g:?}: {ratio}");
        }
    }
}

#[test]
fn cofactor_identity() {
    let pt = EpsPoint::new(c(0.0, 2.0), c(0.0, 1.5), c(0.3, 0.1)).unwrap();
    let mut s = EpsSewing::new(pt, &pol()).unwrap();
    let n = 20;
    let m = s.moments(n).unwrap();
    let a = identity(n) - &m.a1 * &m.a2;
    let inv11 = a.clone().try_inverse().unwrap()[(0, 0)];
    let minor = a.view((1, 1), (n - 1, n - 1)).into_owned();
    assert!((inv11 * det(&a) - det(&minor)).norm() < 1e-8);
}

#[test]
fn partition_function_low_orders() {
    let (t1, t2) = (c(0.0, 2.0), c(0.0, 1.5));
    let ev = EvalPolicy::default();
    let z1 = z1_boson(t1, &ev).unwrap() * z1_boson(t2, &ev).unwrap();
    let zero = EpsPoint::new(t1, t2, c(0.0, 0.0)).unwrap();
    assert!((z2_boson_eps(&zero, 1.0, &pol()).unwrap() - z1).norm() < 1e-15);
    // Z / (Z1 Z1)^2 at c = 2 is det^{-1}; coefficients in eps from a Cauchy integral
    let co = taylor_coefficients(
        |x| Ok(z2_boson_eps(&EpsPoint::new(t1, t2, x)?, 2.0, &pol())? / (z1 * z1)),
        c(0.0, 0.0),
        0.5,
        32,
        6,
    )
    .unwrap();
    let (a2, b2, a4, b4) = (e(2, t1), e(2, t2), e(4, t1), e(4, t2));
    assert!((co[2] - a2 * b2).norm() < 1e-12);
    // 15 (not 54): see the determinant expansion in the graph tests
    let want4 = a2 * a2 * b2 * b2 + a4 * b4 * 15.0;
    assert!((co[4] - want4).norm() < 1e-9 * want4.norm(), "{} vs {want4}", co[4]);
}

#[test]
fn zero_eps_values() {
    let pt = EpsPoint::new(c(0.3, 1.1), c(0.0, 2.0), c(0.0, 0.0)).unwrap();
    let ev = EvalPolicy::default();
    let zm = z2_boson_eps_modular(&pt, &pol()).unwrap();
    let eta = |t| genus2::modular_forms::dedekind_eta(t, &ev).unwrap();
    let want = (eta(pt.tau1) * eta(pt.tau2)).powi(-2);
    assert!((zm - want).norm() < 1e-14 * want.norm());
}

// 27 points: 3 x 3 modulus pairs times 3 radii in units of the domain bound
#[test]
fn holomorphy_sweep() {
    let taus = [c(0.0, 1.0), c(0.3, 0.8), c(-0.4, 1.5)];
    let p = SewPolicy { cap: 256, tol: 1e-12, ..pol() };
    for &t1 in &taus {
        for &t2 in &taus {
            let bound = 0.25 * min_lattice_distance(t1) * min_lattice_distance(t2);
            for (i, frac) in [0.2, 0.5, 0.8].into_iter().enumerate() {
                let eps = C64::from_polar(frac * bound, 0.7 * i as f64 + 0.3);
                let mut s = EpsSewing::new(EpsPoint::new(t1, t2, eps).unwrap(), &p).unwrap();
                let ev = s.evaluate().unwrap();
                assert!(ev.det.norm() > 1e-6);
                let twice = s.at_truncation(2 * ev.n).unwrap();
                assert!((twice.det - ev.det).norm() < 1e-9 * ev.det.norm(), "{t1} {t2} {eps} n={} {} {}", ev.n, ev.det, twice.det);
                assert!(ev.omega.in_siegel_space());
            }
        }
    }
}
