use genus2::extract::taylor_coefficients;
use genus2::modular_forms::{binom, EvalPolicy, Torus};
use genus2::sewing_eps::{det_i_minus_a1a2, z1_boson, EpsPoint, SewPolicy};
use genus2::sewing_rho::{det_i_minus_r, RhoPoint};
use genus2::voa_fock::*;
use genus2::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn eps_oracle_matches_determinant() {
    let (t1, t2) = (c(0.0, 2.0), c(0.0, 1.5));
    let ev = EvalPolicy::default();
    let sp = SewPolicy::default();
    let brute = brute_z2_eps(6, t1, t2, &ev).unwrap();
    let det = taylor_coefficients(
        |e| Ok(det_i_minus_a1a2(&EpsPoint::new(t1, t2, e)?, &sp)?.powf(-0.5)),
        c(0.0, 0.0),
        0.5,
        64,
        6,
    )
    .unwrap();
    for (n, d) in det.iter().enumerate() {
        let b = brute.coeff(n as i64).unwrap();
        assert!((b - d).norm() <= 1e-9 * (1.0 + d.norm()) + 1e-12, "eps^{n}: {b} vs {d}");
    }
    // odd orders vanish identically
    assert_eq!(brute.coeff(3).unwrap(), c(0.0, 0.0));
}

#[test]
fn eps_oracle_second_order() {
    // weight two: {2} and {1,1}
    let tau = c(0.1, 1.2);
    let ev = EvalPolicy::default();
    let mut t = Torus::new(tau, &ev).unwrap();
    let e2 = t.e(2).unwrap();
    let c22 = t.c_kernel(1, 1).unwrap();
    assert!((c22 - e2).norm() < 1e-14);
    let brute = brute_z2_eps(2, tau, tau, &ev).unwrap();
    // {1,1} has norm 2 and {2} has no involution
    let expect = e2 * e2 / 2.0;
    assert!((brute.coeff(2).unwrap() - expect).norm() < 1e-13);
}

#[test]
fn rho_oracle_matches_determinant() {
    let tau = c(0.0, 2.0);
    let w = c(0.3, 0.0);
    let ev = EvalPolicy::default();
    let sp = SewPolicy::default();
    let z1 = z1_boson(tau, &ev).unwrap();
    let brute = brute_z2_rho(5, tau, w, &ev).unwrap();
    let det = taylor_coefficients(
        |r| Ok(z1 * det_i_minus_r(&RhoPoint::new(tau, w, r)?, &sp)?.powf(-0.5)),
        c(0.0, 0.0),
        0.015,
        64,
        5,
    )
    .unwrap();
    for (n, d) in det.iter().enumerate() {
        let b = brute.coeff(n as i64).unwrap();
        assert!((b - d).norm() <= 1e-9 * d.norm(), "rho^{n}: {b} vs {d}");
    }
    // first order is -Z1 P_2(w)
    let mut t = Torus::new(tau, &ev).unwrap();
    let p2 = t.p(2, w).unwrap();
    assert!((brute.coeff(1).unwrap() + z1 * p2).norm() < 1e-10 * p2.norm());
}

#[test]
fn rho_oracle_degenerates_to_catalan_series() {
    // at fixed chi = -rho/w^2 and w -> 0 the rho^n coefficient tends to
    // Z1 (-w^2)^{-n} sum_m (m/n) binom(2n, m+n) p(m)
    let tau = c(0.0, 2.0);
    let ev = EvalPolicy::default();
    let z1 = z1_boson(tau, &ev).unwrap();
    let pn = partition_numbers(5);
    let mut prev = f64::INFINITY;
    for wr in [0.1, 0.05, 0.025] {
        let brute = brute_z2_rho(5, tau, c(wr, 0.0), &ev).unwrap();
        let mut err = 0.0f64;
        for n in 1..=5usize {
            let got = brute.coeff(n as i64).unwrap() * (-wr * wr).powi(n as i32) / z1;
            let rhs: f64 = (1..=n)
                .map(|m| m as f64 / n as f64 * binom(2 * n, m + n) * pn[m])
                .sum();
            err = err.max((got - rhs).norm() / rhs);
        }
        assert!(err < prev / 3.0, "error {err} did not shrink like w^2");
        prev = err;
    }
    assert!(prev < 1e-3);
}

#[test]
fn catalan_identities() {
    let pn = partition_numbers(10);
    assert!(catalan_selfsew_identity(&pn, 10).unwrap() < 1e-9);
    let first: Vec<f64> = (1..=5usize)
        .map(|n| (1..=n).map(|m| m as f64 / n as f64 * binom(2 * n, m + n) * pn[m]).sum())
        .collect();
    assert_eq!(first, vec![1.0, 4.0, 16.0, 65.0, 266.0]);
    assert!(binomial_identity_holds(20));
    assert!(catalan_coefficient_identity_holds(20));
}

#[test]
fn lattice_one_point_small_states() {
    let tau = c(0.05, 1.1);
    let ev = EvalPolicy::default();
    let mut t = Torus::new(tau, &ev).unwrap();
    let z1 = z1_boson(tau, &ev).unwrap();
    let q = t.q();
    let e2 = t.e(2).unwrap();
    let (aa, n2) = (2.0f64.sqrt(), 2.0);
    let vac = one_point_lattice(&FockPartition::new(&[]), aa, n2, tau, &ev).unwrap();
    assert!((vac - z1 * q).norm() < 1e-14);
    let one = one_point_lattice(&FockPartition::new(&[1]), aa, n2, tau, &ev).unwrap();
    assert!((one - z1 * q * aa).norm() < 1e-14);
    let two = one_point_lattice(&FockPartition::new(&[2]), aa, n2, tau, &ev).unwrap();
    assert!((two - z1 * q * (aa * aa + e2)).norm() < 1e-13);
    // a[-2] has label 2, so it cannot be a fixed point
    let a2 = one_point_lattice(&FockPartition::new(&[0, 1]), aa, n2, tau, &ev).unwrap();
    assert_eq!(a2, c(0.0, 0.0));
}

#[test]
fn lattice_eps_series_zero_lattice_vector_reduces_to_boson() {
    let (t1, t2) = (c(0.0, 1.3), c(0.2, 1.6));
    let ev = EvalPolicy::default();
    let lat = brute_z2_lattice_eps(4, 2, 0, t1, t2, &ev).unwrap();
    let bos = brute_z2_eps(4, t1, t2, &ev).unwrap();
    assert!(lat.max_abs_diff(&bos) < 1e-14);
}

#[test]
fn mode_trace_matches_prime_form() {
    // A1 root lattice, alpha^2 = 2, eps(alpha, -alpha) = 1
    let tau = c(0.0, 2.0);
    let w = c(0.3, 0.0);
    let ev = EvalPolicy::default();
    let mut t = Torus::new(tau, &ev).unwrap();
    let k = t.prime_form(w).unwrap();
    let z1 = z1_boson(tau, &ev).unwrap();
    let q = t.q();
    for (ab, bb) in [(0i64, 0i64), (1, 2), (-1, 2), (2, 8)] {
        let tr = lattice_two_point_trace(2, ab, bb, 1.0, w, tau, 200, 30).unwrap();
        let f = q.powf(bb as f64 / 2.0) * (w * ab as f64).exp() / (k * k) * z1;
        assert!((tr / f - 1.0).norm() < 1e-12, "beta^2 = {bb}: {tr} vs {f}");
    }
    assert!(lattice_two_point_trace(2, 0, 0, 1.0, c(-0.3, 0.0), tau, 10, 10).is_err());
}

#[test]
fn partition_enumeration_counts() {
    let pn = partition_numbers(12);
    for (n, p) in pn.iter().enumerate() {
        let all = FockPartition::all_of_weight(n);
        assert_eq!(all.len() as f64, *p);
        assert!(all.iter().all(|l| l.weight() == n));
    }
}

proptest! {
    #[test]
    fn involution_count_is_double_factorial(n in 0usize..9) {
        let count = fixed_point_free_involutions(n).len();
        let expect = if n % 2 == 1 { 0 } else { (1..n).step_by(2).product::<usize>() };
        prop_assert_eq!(count, expect);
    }

    #[test]
    fn involutions_are_involutions(labels in proptest::collection::vec(1usize..3, 0..7)) {
        for inv in label_one_involutions(&labels) {
            let p = inv.as_permutation(labels.len());
            for i in 0..labels.len() {
                prop_assert_eq!(p[p[i]], i);
                if p[i] == i {
                    prop_assert_eq!(labels[i], 1);
                }
            }
        }
    }

    #[test]
    fn liz_norm_modulus_is_prod_part_power_factorial(parts in proptest::collection::vec(1usize..4, 0..6)) {
        let lam = FockPartition::from_parts(&parts).unwrap();
        let mut expect = 1.0;
        for (i, &e) in lam.multiplicities().iter().enumerate() {
            expect *= ((i + 1) as f64).powi(e as i32) * (1..=e).product::<usize>() as f64;
        }
        prop_assert!((liz_norm(&lam).norm() - expect).abs() < 1e-9);
    }
}

#[test]
fn one_and_two_point_examples() {
    let tau = c(0.07, 1.3);
    let w = c(0.4, 0.1);
    let ev = EvalPolicy::default();
    let mut t = Torus::new(tau, &ev).unwrap();
    let z1 = z1_boson(tau, &ev).unwrap();
    let e2 = t.e(2).unwrap();
    let close = |a: C64, b: C64| (a - b).norm() < 1e-12 * (1.0 + b.norm());
    assert_eq!(one_point_boson(&FockPartition::new(&[1, 1]), tau, &ev).unwrap(), c(0.0, 0.0));
    assert!(close(one_point_boson(&FockPartition::new(&[2]), tau, &ev).unwrap(), z1 * e2));
    assert!(close(one_point_boson(&FockPartition::new(&[4]), tau, &ev).unwrap(), z1 * e2 * e2 * 3.0));
    assert!(close(two_point_boson(&FockPartition::new(&[]), w, tau, &ev).unwrap(), z1));
    let p2 = t.p(2, w).unwrap();
    assert!(close(two_point_boson(&FockPartition::new(&[1]), w, tau, &ev).unwrap(), z1 * p2));
    // {1^2}: one pairing inside the copies, two across them
    let d11 = t.d_kernel(1, 1, w).unwrap();
    let d11m = t.d_kernel(1, 1, -w).unwrap();
    let expect = z1 * (e2 * e2 + d11 * d11 + d11 * d11m);
    assert!(close(two_point_boson(&FockPartition::new(&[2]), w, tau, &ev).unwrap(), expect));
    assert!((d11 - d11m).norm() < 1e-12 * d11.norm());
}

#[test]
fn diagram_recount_matches_eps_oracle() {
    use genus2::sewing_eps::moment_matrix_eps;
    let (t1, t2) = (c(0.0, 1.1), c(0.2, 1.4));
    let ev = EvalPolicy::default();
    let mut a = Torus::new(t1, &ev).unwrap();
    let mut b = Torus::new(t2, &ev).unwrap();
    // unit eps so that the graded sums are the eps coefficients
    let a1 = moment_matrix_eps(&mut a, c(1.0, 0.0), 4).unwrap();
    let a2 = moment_matrix_eps(&mut b, c(1.0, 0.0), 4).unwrap();
    let graded = genus2::graphs::diagram_sum_graded(&a1, &a2, 4).unwrap();
    let brute = brute_z2_eps(4, t1, t2, &ev).unwrap();
    for (n, g) in graded.iter().enumerate() {
        let want = brute.coeff(n as i64).unwrap();
        assert!((g - want).norm() < 1e-12 * (1.0 + want.norm()), "weight {n}: {g} vs {want}");
    }
}

#[test]
fn rho_oracle_near_two_tori_degeneration() {
    // w = 1e-3 at chi = 0.1: the truncated oracle against Z1(q) Z1(f(chi))
    let tau = c(0.0, 2.0);
    let ev = EvalPolicy::default();
    let (w, chi) = (1e-3, 0.1);
    let rho = c(-chi * w * w, 0.0);
    let brute = brute_z2_rho(6, tau, c(w, 0.0), &ev).unwrap();
    let z1 = z1_boson(tau, &ev).unwrap();
    let f = genus2::series::catalan_f_value(c(chi, 0.0));
    let z1f: C64 = partition_numbers(60)
        .iter()
        .enumerate()
        .map(|(m, p)| f.powu(m as u32) * *p)
        .sum();
    let got = brute.eval(rho);
    // dropped orders contribute about sum_{n > 6} 4^n chi^n ~ 2e-3
    let rel = ((got - z1 * z1f) / (z1 * z1f)).norm();
    assert!(rel < 5e-3, "relative gap {rel}");
}
