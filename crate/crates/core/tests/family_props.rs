mod common;

use common::{directional_fd, family, benchmark_family, rel_err, rotation, rotation_vector, unit_vec};
use proptest::prelude::*;
use so3_synergy::family::{
    certify, composed_rotation, composed_rotation_at_angle, gain_upper_bound, gap_bound_all_equal, solve_critical_points, FamilyConfig,
};
use so3_synergy::so3::{log_axis_angle, rotation_about};
use so3_synergy::{Mat3, SynergisticFamily, SpectrumCase, TraceShape, Vec3};

fn members() -> impl Strategy<Value = usize> {
    0usize..4
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rho_matches_finite_difference(x in rotation(), q in members(), w in unit_vec()) {
        let f = benchmark_family();
        let fd = directional_fd(|r| f.value(r, q), &x, w, 1e-5);
        let an = 2.0 * f.rho(&x, q).dot(&w);
        prop_assume!(fd.abs() > 1e-3);
        prop_assert!(rel_err(an, fd) < 1e-5, "analytic {an} fd {fd}");
    }

    #[test]
    fn psi_rho_matches_finite_difference(x in rotation(), w in unit_vec()) {
        let s = benchmark_family().shape().clone();
        let fd = directional_fd(|r| s.psi_value(r), &x, w, 1e-5);
        prop_assume!(fd.abs() > 1e-3);
        prop_assert!(rel_err(2.0 * s.psi_rho(&x).dot(&w), fd) < 1e-5);
    }

    #[test]
    fn theta_matrix_is_the_warp_velocity(x in rotation(), q in members(), w in unit_vec()) {
        let f = benchmark_family();
        let h = 1e-6;
        let t0 = f.warp(&x, q);
        let step = |s: f64| f.warp(&x.compose(&rotation_about(w, s)), q);
        let fd = (rotation_vector(&t0.transpose().compose(&step(h)))
            - rotation_vector(&t0.transpose().compose(&step(-h))))
            * (0.5 / h);
        let an = f.theta_matrix(&x, q) * w;
        prop_assert!((fd - an).norm() < 1e-5 * (an.norm() + 1e-12));
    }

    #[test]
    fn theta_matrix_is_invertible(x in rotation(), q in members(), frac in 0.01f64..0.999) {
        let k = frac * gain_upper_bound(0.75);
        let f = family([0.2, 0.4, 0.4], k);
        prop_assert!(f.theta_matrix(&x, q).det().abs() > 0.05);
    }

    #[test]
    fn potentials_are_positive_away_from_identity(x in rotation(), q in members()) {
        prop_assume!(x.angle() > 1e-6);
        prop_assert!(benchmark_family().value(&x, q) > 0.0);
    }

    #[test]
    fn full_gap_dominates_refined_gap(x in rotation(), q in members()) {
        let f = benchmark_family();
        let (refined, full) = (f.refined_gap(&x, q), f.full_gap(&x, q));
        prop_assert!(refined >= 0.0);
        prop_assert!(full >= refined);
    }

    #[test]
    fn warp_angle_stays_below_quarter_turn(x in rotation()) {
        let f = benchmark_family();
        let th = f.warp_angle(&x);
        prop_assert!((0.0..std::f64::consts::FRAC_PI_2).contains(&th));
        prop_assert!(th <= 2.0 * f.k().asin() + 1e-15);
    }

    #[test]
    fn warp_is_injective_on_pairs(x in rotation(), y in rotation(), q in members()) {
        prop_assume!(x.distance(&y) > 1e-6);
        let f = benchmark_family();
        prop_assert!(f.warp(&x, q).distance(&f.warp(&y, q)) > 0.0);
    }

    #[test]
    fn value_is_psi_of_warp(x in rotation(), q in members()) {
        let f = benchmark_family();
        let expect = f.shape().psi_value(&x.compose(&rotation_about(f.directions().direction(q), f.warp_angle(&x))));
        prop_assert!((f.value(&x, q) - expect).abs() < 1e-14);
    }

    #[test]
    fn delta_formula_matches_half_turn_expansion(t in 0.0f64..std::f64::consts::PI, u in unit_vec(), th in 0.1f64..1.5) {
        // Ψ_M(R_a(π, v) R_a(θ, u)) = 2λ^G − (1 − cos θ) Δ(v, u) on every branch
        let s = benchmark_family().shape().clone();
        for v in [Vec3::E1, Vec3::new(0.0, t.cos(), t.sin())] {
            let lhs = s.psi_value(&rotation_about(v, std::f64::consts::PI).compose(&rotation_about(u, th)));
            let rhs = 2.0 * s.lambda_g_of(&v).unwrap() - (1.0 - th.cos()) * s.delta_vu(&v, &u).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}

#[test]
fn critical_points_of_every_case() {
    for (diag, k, force) in [
        ([0.4, 0.4, 0.4], 0.3, None),
        ([0.2, 0.4, 0.4], 0.465, None),
        ([0.2, 0.4, 0.4], 0.465, Some(SpectrumCase::TwoLargeEqualAnyMin)),
        ([0.3, 0.3, 0.6], 0.4, None),
        ([0.1, 0.3, 0.6], 0.4, None),
    ] {
        let mut shape = TraceShape::from_matrix(&Mat3::diag(diag)).unwrap();
        if let Some(c) = force {
            shape = shape.with_case(c).unwrap();
        }
        let f = SynergisticFamily::new(shape, FamilyConfig::with_k(k)).unwrap();
        for q in 0..f.len() {
            for rec in solve_critical_points(&f, q, 36).unwrap() {
                assert!(rec.rho_norm < 1e-8, "{diag:?} q={q} ρ={}", rec.rho_norm);
                assert!(rec.theta_at_y > 0.0 && rec.theta_at_y < std::f64::consts::FRAC_PI_2);
                assert!(rec.refined_gap > f.gap_lower_bound(q) - 1e-9);
                assert!(rec.necessary_margin > 0.0);
                assert!((f.value(&rec.y, q) - 2.0 * f.shape().lambda_g_of(&rec.v).unwrap()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn item1_closed_form_is_tight() {
    let f = family([0.4, 0.4, 0.4], 0.3);
    let rep = certify(&f, 720).unwrap();
    let closed = gap_bound_all_equal(0.4, 0.3);
    assert!(rep.passed);
    assert!((rep.min_refined_gap - closed).abs() / closed < 0.01, "{} vs {closed}", rep.min_refined_gap);
}

#[test]
fn composed_rotation_opposite_directions_doubles_angle() {
    let f = benchmark_family();
    let y = rotation_about(Vec3::new(0.3, 0.5, 0.2).normalized().unwrap(), 2.5);
    let aa = composed_rotation(&f, &y, 1, 0).unwrap();
    assert!((aa.angle() - 2.0 * f.warp_angle(&y)).abs() < 1e-12);
    let oracle = log_axis_angle(&rotation_about(-f.directions().direction(0), f.warp_angle(&y))
        .compose(&rotation_about(f.directions().direction(1), f.warp_angle(&y)))).unwrap();
    assert!((oracle.axis() - aa.axis()).norm() < 1e-10);
}

#[test]
fn orthogonal_composition_at_sixty_degrees() {
    let target = std::f64::consts::FRAC_PI_3;
    let aa = composed_rotation_at_angle(target, Vec3::E3, Vec3::E2);
    let oracle = log_axis_angle(&rotation_about(-Vec3::E2, target).compose(&rotation_about(Vec3::E3, target))).unwrap();
    assert!((oracle.axis() - aa.axis()).norm() < 1e-10);
    assert!((oracle.angle() - aa.angle()).abs() < 1e-10);
}
