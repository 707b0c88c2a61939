use lempert_lab::ambient::{hermitian, AmbientDomain, Ball};
use lempert_lab::conformal::build_riemann_map;
use lempert_lab::disc::*;
use lempert_lab::domain::{build_domain, Domain, DomainSpec};
use lempert_lab::metrics::{lempert_ball_full, lempert_disc_full, lempert_planar_full};
use lempert_lab::{Error, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn domain(json: &str) -> Domain {
    build_domain(&DomainSpec::from_json(json).unwrap()).unwrap()
}

fn unit_disc() -> Domain {
    domain(r#"{"kind": "unit_disc"}"#)
}

fn ellipse() -> Domain {
    domain(r#"{"kind": "ellipse", "a": 2.0, "b": 1.0}"#)
}

/// `φ(t) = t + k (1 - t²)²`, which meets the disc's endpoint data for any `k`.
fn bent_identity(k: C64) -> PolynomialCurve {
    let m = vec![vec![k], vec![c(1.0)], vec![k * -2.0], vec![c(0.0)], vec![k]];
    PolynomialCurve::from_monomials(&m, vec![c(1.0)], vec![c(-1.0)], vec![c(-1.0)], vec![c(1.0)]).unwrap()
}

#[test]
fn disc_curve_meets_its_endpoint_data() {
    let d = unit_disc();
    let (curve, report) = lemma3_curve(&d, &[c(1.0)], &[c(-1.0)]).unwrap();
    assert!(curve.endpoint_error() < 1e-10);
    assert!(report.delta3 > 0.0);
    for j in 1..200 {
        let t = -1.0 + j as f64 / 100.0;
        assert!(d.contains(curve.value(c(t))[0]));
    }
}

#[test]
fn ellipse_curve_runs_inside() {
    let e = ellipse();
    let (curve, report) = lemma3_curve(&e, &[c(2.0)], &[c(-2.0)]).unwrap();
    assert!(curve.endpoint_error() < 1e-10);
    assert!(report.delta3 > 0.0);
    for j in 1..1000 {
        let t = -1.0 + j as f64 / 500.0;
        assert!(e.signed_distance(curve.value(c(t))[0]) > 0.0, "t = {t}");
    }
    // the data are real, so is the curve
    assert!(curve.value(c(0.3))[0].im.abs() < 1e-12);
}

#[test]
fn ball_curve_endpoint_conditions() {
    let b = Ball::new(2).unwrap();
    let a = [c(1.0), c(0.0)];
    let bb = [c(-1.0), c(0.0)];
    let (curve, _) = lemma3_curve(&b, &a, &bb).unwrap();
    let tol = 1e-10;
    let one = c(1.0);
    let close = |x: Vec<C64>, y: [C64; 2]| x.iter().zip(&y).all(|(p, q)| (p - q).norm() < tol);
    assert!(close(curve.value(one), a));
    assert!(close(curve.value(-one), bb));
    // φ'(1) = -n_a = a and φ'(-1) = n_b = -b
    assert!(close(curve.derivative(one), [c(1.0), c(0.0)]));
    assert!(close(curve.derivative(-one), [c(1.0), c(0.0)]));
}

#[test]
fn coincident_endpoints_go_through_a_waypoint() {
    for d in [unit_disc(), ellipse()] {
        let a = d.curve().point(0.1);
        let (curve, report) = lemma3_curve(&d, &[a], &[a]).unwrap();
        assert!(curve.endpoint_error() < 1e-10);
        assert!(report.delta3 > 0.0);
        assert!(d.signed_distance(curve.value(c(0.0))[0]) > 0.1);
    }
}

#[test]
fn admissibility_of_the_identity_curve() {
    let report = admissibility_check(&unit_disc(), &bent_identity(c(0.0)), 0.0).unwrap();
    // r(1 - t) = -2t + t² < -t/2 · |∇r(1)| = -t holds for t < 1
    assert!(report.delta1 > 0.5);
    assert!((report.scale_a - 2.0).abs() < 1e-12);
}

#[test]
fn curve_exiting_midway_is_rejected() {
    match admissibility_check(&unit_disc(), &bent_identity(C64::new(0.0, 2.0)), 0.0) {
        Err(Error::Admissibility { t, reason }) => {
            assert!(t.abs() < 0.9, "{t}");
            assert!(reason.contains("leaves"));
        }
        other => panic!("expected a rejection, got {other:?}"),
    }
}

#[test]
fn perturbation_vanishes_at_the_opposite_end() {
    let b = Ball::new(2).unwrap();
    let (curve, _) = lemma3_curve(&b, &[c(1.0), c(0.0)], &[c(-1.0), c(0.0)]).unwrap();
    let zero = vec![c(0.0); 2];
    let same = perturbed_disc(&curve, &zero, &zero).unwrap();
    assert_eq!(same.coefficients(), curve.coefficients());

    let s = C64::new(0.01, 0.02);
    let u = vec![c(0.0), s];
    let v = vec![c(0.0), C64::new(-0.03, 0.0)];
    let only_u = perturbed_disc(&curve, &u, &zero).unwrap();
    let only_v = perturbed_disc(&curve, &zero, &v).unwrap();
    let one = c(1.0);
    let diff = |x: Vec<C64>, y: Vec<C64>| x.iter().zip(&y).map(|(p, q)| p - q).collect::<Vec<_>>();
    let du = diff(only_u.value(one), curve.value(one));
    assert!((du[0]).norm() < 1e-14 && (du[1] - s).norm() < 1e-14);
    assert!(diff(only_u.value(-one), curve.value(-one)).iter().all(|x| x.norm() < 1e-14));
    assert!(diff(only_v.value(one), curve.value(one)).iter().all(|x| x.norm() < 1e-14));
    // φ_{u,0}(1) - a is tangent to the sphere at a
    assert!(hermitian(&du, &[c(1.0), c(0.0)]).norm() < 1e-14);
    assert!(perturbed_disc(&curve, &[c(0.1), c(0.0)], &zero).is_err());
}

#[test]
fn perturbation_is_exactly_quadratic() {
    let b = Ball::new(2).unwrap();
    let (curve, _) = lemma3_curve(&b, &[c(1.0), c(0.0)], &[c(-1.0), c(0.0)]).unwrap();
    let u = vec![c(0.0), C64::new(0.3, -0.1)];
    let v = vec![c(0.0), C64::new(0.2, 0.4)];
    let p = perturbed_disc(&curve, &u, &v).unwrap();
    let (base, pert) = (curve.coefficients(), p.coefficients());
    for k in 0..2 {
        // coefficients are indexed [degree][coordinate]
        let d = |j: usize| pert[j][k] - base.get(j).map(|b| b[k]).unwrap_or(c(0.0));
        assert!((d(0) - (u[k] + v[k]) * 0.375).norm() < 1e-14);
        assert!((d(1) - (u[k] - v[k]) * 0.5).norm() < 1e-14);
        assert!((d(2) - (u[k] + v[k]) * 0.125).norm() < 1e-14);
        assert!((3..pert.len()).all(|j| d(j).norm() < 1e-14));
    }
}

#[test]
fn interpolation_on_the_identity_curve() {
    let curve = bent_identity(c(0.0));
    let sol = solve_interpolation(&curve, &[c(0.99)], &[c(-0.99)]).unwrap();
    assert!((sol.zeta1 - 0.99).norm() < 1e-12);
    assert!((sol.zeta2 + 0.99).norm() < 1e-12);
    assert!(sol.u.iter().chain(&sol.v).all(|x| x.norm() < 1e-14));

    let fixed = solve_interpolation(&curve, &[c(1.0)], &[c(-1.0)]).unwrap();
    assert_eq!(fixed.iterations, 0);
    assert_eq!((fixed.zeta1, fixed.zeta2), (c(1.0), c(-1.0)));
}

#[test]
fn interpolation_in_the_ball() {
    let b = Ball::new(2).unwrap();
    let (curve, _) = lemma3_curve(&b, &[c(1.0), c(0.0)], &[c(-1.0), c(0.0)]).unwrap();
    let z = [c(0.99), c(0.005)];
    let w = [c(-0.99), c(0.0)];
    let system = InterpolationSystem::new(&curve);
    let sol = system.solve(&z, &w).unwrap();
    assert!(sol.residual < 1e-10);
    let disc = system.disc(&sol).unwrap();
    let check = |p: Vec<C64>, q: &[C64]| p.iter().zip(q).all(|(x, y)| (x - y).norm() < 1e-10);
    assert!(check(disc.value(sol.zeta1), &z));
    assert!(check(disc.value(sol.zeta2), &w));
    assert!(hermitian(&sol.u, &curve.n_a).norm() < 1e-12);
}

#[test]
fn jacobian_matches_differences() {
    let b = Ball::new(2).unwrap();
    let (curve, _) = lemma3_curve(&b, &[c(1.0), c(0.0)], &[c(-1.0), c(0.0)]).unwrap();
    let system = InterpolationSystem::new(&curve);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let x: Vec<C64> = system
            .anchor()
            .iter()
            .map(|a| a + C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)))
            .collect();
        assert!(system.jacobian_check(&x) < 1e-6);
    }
}

#[test]
fn pullback_of_the_identity_curve() {
    let d = unit_disc();
    let h = pullback_domain(&d, &bent_identity(c(0.0)), 0.2, 0.1).unwrap();
    assert!(h.contains_core_rectangle());
    // the end arcs are pieces of the unit circle
    for y in [-0.05, 0.0, 0.07] {
        assert!((h.right.x(y) - (1.0f64 - y * y).sqrt()).abs() < 1e-11);
        assert!((h.left.x(y) + (1.0f64 - y * y).sqrt()).abs() < 1e-11);
    }
    assert!(h.on_end_arc(C64::new(1.0, 0.0), 1e-9));
    assert!(!h.on_end_arc(C64::new(0.0, 0.1), 1e-9));
}

#[test]
fn ellipse_pullback_is_symmetric() {
    let e = ellipse();
    let (curve, _) = lemma3_curve(&e, &[c(2.0)], &[c(-2.0)]).unwrap();
    let h = pullback_domain(&e, &curve, 0.2, 0.1).unwrap();
    for j in 0..=20 {
        let y = 0.1 * j as f64 / 20.0;
        assert!((h.right.x(y) - h.right.x(-y)).abs() < 1e-8);
        assert!((h.left.x(y) - h.left.x(-y)).abs() < 1e-8);
    }
    assert!(h.contains_core_rectangle());
}

#[test]
fn node_count_must_align_with_the_joints() {
    let opts = UpperBoundOptions {
        nodes: 1000,
        ..UpperBoundOptions::default()
    };
    let r = lempert_upper_bound_with(&unit_disc(), &[c(0.9)], &[c(-0.9)], &[c(1.0)], &[c(-1.0)], &opts);
    assert!(matches!(r, Err(Error::OutOfRange(_))));
}

fn assert_certificate(cert: &DiscInterpolation, oracle: f64) {
    assert!(cert.upper_bound >= oracle - 1e-6, "{} < {oracle}", cert.upper_bound);
    assert!(cert.interpolation_error < 1e-6);
    assert!(cert.kappa > 0.0);
    assert!(cert.bound_holds);
    assert!(cert.gap >= cert.kappa * cert.d_z * cert.d_w);
    assert!(cert.p1.norm() < 1.0 && cert.p2.norm() < 1.0);
    assert!(cert.newton_residual < 1e-10);
}

#[test]
fn disc_certificate() {
    let (upper, cert) = lempert_upper_bound(&unit_disc(), &[c(0.9)], &[c(-0.9)], &[c(1.0)], &[c(-1.0)]).unwrap();
    assert_eq!(upper, cert.upper_bound);
    assert!(upper >= 1.8 / 1.81);
    assert_certificate(&cert, lempert_disc_full(c(0.9), c(-0.9)).unwrap().value);
    assert_eq!(cert.q_on_level_set, [true, true]);
    let json = serde_json::to_value(&cert).unwrap();
    assert!(json.get("curve_coefficients").is_some() && json.get("measured_c").is_some());
}

#[test]
fn ball_certificate() {
    let b = Ball::new(2).unwrap();
    for (z, w) in [
        ([c(0.9), c(0.0)], [c(-0.9), c(0.0)]),
        ([c(0.99), c(0.005)], [c(-0.99), c(0.0)]),
        ([c(0.9), C64::new(0.0, 0.2)], [c(-0.8), c(0.3)]),
    ] {
        let (_, cert) = lempert_upper_bound(&b, &z, &w, &[c(1.0), c(0.0)], &[c(-1.0), c(0.0)]).unwrap();
        assert_certificate(&cert, lempert_ball_full(&z, &w).unwrap().value);
    }
}

#[test]
fn ellipse_certificates() {
    let e = ellipse();
    let map = build_riemann_map(&e, c(0.0)).unwrap();
    for (z, w) in [
        (c(1.9), c(-1.9)),
        (C64::new(1.99, 0.02), c(-1.999)),
        (C64::new(1.5, 0.3), c(-1.2)),
    ] {
        let (_, cert) = lempert_upper_bound(&e, &[z], &[w], &[c(2.0)], &[c(-2.0)]).unwrap();
        assert_certificate(&cert, lempert_planar_full(&map, z, w).unwrap().value);
    }
}

#[test]
fn constructed_disc_maps_into_the_domain() {
    let e = ellipse();
    let disc = construct_disc(&e, &[c(1.9)], &[c(-1.9)], &[c(2.0)], &[c(-2.0)], &UpperBoundOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..1000 {
        let r = (1.0 - 1e-3) * rng.gen::<f64>().sqrt();
        let p = C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
        let q = disc.theta(p).unwrap();
        assert!(e.boundary_distance(&q) > 0.0, "θ({p}) = {:?}", q);
    }
}

#[test]
fn theorem1_constant_on_the_disc() {
    let d = unit_disc();
    let map = build_riemann_map(&d, c(0.0)).unwrap();
    let schedule = SampleSchedule {
        boundary_points: 8,
        distances: vec![1e-1, 1e-2, 1e-3, 1e-4],
    };
    let (est, samples) = theorem1_constant(&Oracle::Planar { domain: &d, map: &map }, &schedule).unwrap();
    assert!(est.c_estimate >= 0.49, "{}", est.c_estimate);
    assert_eq!(est.pairs + est.failures, 32 * 31 / 2);
    let min = samples.iter().map(|s| s.theorem1).fold(f64::INFINITY, f64::min);
    assert_eq!(min, est.c_estimate);

    let (ball, _) = theorem1_constant(&Oracle::Ball(Ball::new(2).unwrap()), &schedule).unwrap();
    assert!(ball.c_estimate >= 0.49);
}

#[test]
fn refined_schedule_doubles() {
    let s = SampleSchedule {
        boundary_points: 8,
        distances: vec![1e-1, 1e-2, 1e-3],
    };
    let r = s.refined();
    assert_eq!(r.boundary_points, 16);
    assert_eq!(r.distances.len(), 5);
    assert!((r.distances[1] - 10f64.powf(-1.5)).abs() < 1e-15);
}

#[test]
fn sphere_points_are_unit_vectors() {
    assert_eq!(sphere_point(2, 0), vec![c(1.0), c(0.0)]);
    assert_eq!(sphere_point(2, 1), vec![c(-1.0), c(0.0)]);
    for j in 2..50 {
        let p = sphere_point(3, j);
        assert!((p.iter().map(|x| x.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn disc_certificates_bound_the_oracle(
        s in 0.002f64..0.1, t in 0.002f64..0.1, y in -0.3f64..0.3,
    ) {
        let z = C64::new(1.0 - s, y * s);
        let w = C64::new(-(1.0 - t), 0.0);
        prop_assume!(z.norm() < 1.0);
        let d = unit_disc();
        let (_, cert) = lempert_upper_bound(&d, &[z], &[w], &[c(1.0)], &[c(-1.0)]).unwrap();
        let oracle = lempert_disc_full(z, w).unwrap();
        prop_assert!(cert.upper_bound >= oracle.value - 1e-6);
        prop_assert!(cert.gap <= oracle.gap * (1.0 + 1e-6));
        prop_assert!(cert.gap >= cert.kappa * cert.d_z * cert.d_w);
    }
}
