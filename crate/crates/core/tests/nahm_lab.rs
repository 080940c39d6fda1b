use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubegeom::algebras::builtin;
use tubegeom::complexify::{phi_map, TangentPoint};
use tubegeom::lie::{
    adjoint, group_exp, project_m, random_algebra_element, random_group_element, AlgebraElement,
    GroupElement, LieAlgebraContext,
};
use tubegeom::linalg::{dist, expm, frobenius, identity, CMat, C64};
use tubegeom::nahm::*;
use tubegeom::Error;

fn su2() -> Arc<LieAlgebraContext> {
    builtin("su2").unwrap()
}

fn scaled(m: &CMat, s: f64) -> CMat {
    m * C64::new(s, 0.0)
}

fn euler_top(ctx: &Arc<LieAlgebraContext>, c: [f64; 3], t0: &GaugePath) -> NahmConfiguration {
    let e: Vec<AlgebraElement> = (0..3)
        .map(|k| AlgebraElement::basis_vector(ctx, k).unwrap())
        .collect();
    let init = [e[0].scale(c[0]), e[1].scale(c[1]), e[2].scale(c[2])];
    nahm_integrate([&init[0], &init[1], &init[2]], t0, 1e6).unwrap()
}

#[test]
fn commuting_constants_solve_the_equations() {
    let ctx = builtin("su3").unwrap();
    let b = ctx.basis();
    // λ3 and λ8 directions commute.
    let (x, y) = (b[2].clone(), b[7].clone());
    let t = NahmConfiguration::from_fns(
        &ctx,
        8,
        [&|_| x.clone(), &|_| y.clone(), &|_| x.clone(), &|_| {
            y.clone()
        }],
    )
    .unwrap();
    assert!(residual_sup(&nahm_residual(&t).unwrap()) < 1e-13);
}

#[test]
fn conjugated_constant_solves_the_baby_equation() {
    let ctx = su2();
    let a = ctx.basis()[2].clone();
    let v = ctx.basis()[0].clone();
    let mut errors = Vec::new();
    for n in [20, 40, 80] {
        let t0 = GaugePath::constant(&ctx, PathKind::Algebra, n, &a).unwrap();
        let t1 = GaugePath::from_fn(&ctx, PathKind::Algebra, n, |t| {
            expm(&scaled(&a, -t)) * &v * expm(&scaled(&a, t))
        })
        .unwrap();
        errors.push(baby_nahm_residual(&t0, &t1).unwrap().sup_norm());
    }
    assert!(errors[2] < 1e-7);
    assert!((errors[1] / errors[2]).log2() > 3.5, "{errors:?}");
}

#[test]
fn abelian_baby_residual_is_the_derivative() {
    let ctx = builtin("t2").unwrap();
    let e = ctx.basis()[0].clone();
    let t0 = GaugePath::constant(&ctx, PathKind::Algebra, 16, &ctx.basis()[1]).unwrap();
    let t1 = GaugePath::from_fn(&ctx, PathKind::Algebra, 16, |t| scaled(&e, t * t)).unwrap();
    let r = baby_nahm_residual(&t0, &t1).unwrap();
    for (k, m) in r.values().iter().enumerate() {
        assert!(dist(m, &scaled(&e, 2.0 * r.time(k))) < 1e-12);
    }
}

#[test]
fn grid_mismatch_is_reported() {
    let ctx = su2();
    let p = GaugePath::trivial(&ctx, PathKind::Algebra, 10);
    let q = GaugePath::trivial(&ctx, PathKind::Algebra, 12);
    assert_eq!(
        baby_nahm_residual(&p, &q).unwrap_err(),
        Error::GridMismatch(10, 12)
    );
    assert!(matches!(
        NahmConfiguration::new([p.clone(), p.clone(), p, q]),
        Err(Error::GridMismatch(10, 12))
    ));
}

#[test]
fn euler_top_matches_integrator_and_conserves_energy() {
    let ctx = su2();
    let t0 = GaugePath::trivial(&ctx, PathKind::Algebra, 4000);
    let t = euler_top(&ctx, [0.3, -0.2, 0.25], &t0);
    let r = residual_sup(&nahm_residual(&t).unwrap());
    assert!(r <= 1e-8, "{r}");
    // f1² − f2² is conserved by f1' = −f2 f3, f2' = −f3 f1.
    let f = |j: usize, k: usize| ctx.coordinates(t.component(j).value(k)).0[j - 1];
    let c0 = f(1, 0).powi(2) - f(2, 0).powi(2);
    let c1 = f(1, 4000).powi(2) - f(2, 4000).powi(2);
    assert!((c0 - c1).abs() < 1e-12);
}

#[test]
fn zero_initial_data_stays_zero() {
    let ctx = su2();
    let t0 = GaugePath::trivial(&ctx, PathKind::Algebra, 50);
    let t = euler_top(&ctx, [0.0; 3], &t0);
    assert_eq!(
        t.sup_distance(&NahmConfiguration::zero(&ctx, 50)).unwrap(),
        0.0
    );
}

#[test]
fn blowup_is_detected() {
    let ctx = su2();
    let e: Vec<AlgebraElement> = (0..3)
        .map(|k| AlgebraElement::basis_vector(&ctx, k).unwrap())
        .collect();
    // f1 = f2 = f3 = −c solves f' = −f², which blows up at t = 1/c.
    let init = [e[0].scale(-4.0), e[1].scale(-4.0), e[2].scale(-4.0)];
    let t0 = GaugePath::trivial(&ctx, PathKind::Algebra, 1000);
    let err = nahm_integrate([&init[0], &init[1], &init[2]], &t0, 100.0).unwrap_err();
    match err {
        Error::BlowupDetected { t, .. } => assert!(t < 0.25 && t > 0.2, "{t}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn gauge_action_basic_cases() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t0 = GaugePath::constant(&ctx, PathKind::Algebra, 200, &ctx.basis()[2]).unwrap();
    let t = euler_top(&ctx, [0.2, 0.1, -0.3], &t0);
    let id = GaugePath::trivial(&ctx, PathKind::Group, 200);
    assert!(gauge_act(&id, &t).unwrap().sup_distance(&t).unwrap() < 1e-15);

    let g = random_group_element(&ctx, &mut rng, 3.0);
    let gc = GaugePath::constant(&ctx, PathKind::Group, 200, g.matrix()).unwrap();
    let gt = gauge_act(&gc, &t).unwrap();
    let expected = g.matrix() * t.component(0).value(17) * g.inverse().matrix();
    assert!(dist(gt.component(0).value(17), &expected) < 1e-13);
}

#[test]
fn gauge_action_composes() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let t0 = GaugePath::constant(&ctx, PathKind::Algebra, 400, &ctx.basis()[0]).unwrap();
    let t = euler_top(&ctx, [0.2, 0.1, -0.3], &t0);
    let g = random_smooth_gauge(&ctx, &mut rng, 400, 1.0, false).unwrap();
    let h = random_smooth_gauge(&ctx, &mut rng, 400, 1.0, false).unwrap();
    let lhs = gauge_act(&g.pointwise_mul(&h).unwrap(), &t).unwrap();
    let rhs = gauge_act(&g, &gauge_act(&h, &t).unwrap()).unwrap();
    assert!(lhs.sup_distance(&rhs).unwrap() < 1e-9);
}

#[test]
fn gauged_solutions_still_solve() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let t0 = GaugePath::constant(&ctx, PathKind::Algebra, 2000, &ctx.basis()[1]).unwrap();
    // A genuinely dynamic solution, so both residuals are truncation-limited.
    let t = euler_top(&ctx, [1.0, -0.75, 0.5], &t0);
    let base = residual_sup(&nahm_residual(&t).unwrap());
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let g = random_smooth_gauge(&ctx, &mut rng, 2000, 1.0, k % 2 == 0).unwrap();
        let r = residual_sup(&nahm_residual(&gauge_act(&g, &t).unwrap()).unwrap());
        worst = worst.max(r);
    }
    eprintln!("ungauged {base:.3e}, worst gauged {worst:.3e}");
    assert!(worst <= 10.0 * base);
}

#[test]
fn gauge_ode_solutions() {
    let ctx = su2();
    let zero = GaugePath::trivial(&ctx, PathKind::Algebra, 64);
    let g = solve_gauge_ode(&zero).unwrap();
    assert!(
        g.sup_distance(&GaugePath::trivial(&ctx, PathKind::Group, 64))
            .unwrap()
            == 0.0
    );

    let c = scaled(&ctx.basis()[0], 1.3) + scaled(&ctx.basis()[2], -0.4);
    let a = GaugePath::constant(&ctx, PathKind::Algebra, 64, &c).unwrap();
    let g = solve_gauge_ode(&a).unwrap();
    assert_eq!(g.kind(), PathKind::Group);
    for (k, m) in g.values().iter().enumerate() {
        assert!(dist(m, &expm(&scaled(&c, g.time(k) - 1.0))) < 1e-9);
        assert!(ctx.in_group(m, 1e-13));
    }
    let gauged = gauge_act(
        &g,
        &NahmConfiguration::new([a.clone(), zero.clone(), zero.clone(), zero]).unwrap(),
    )
    .unwrap();
    assert!(gauged.component(0).sup_norm() < 1e-8);
}

#[test]
fn gauge_ode_is_fourth_order() {
    let ctx = su2();
    let b = ctx.basis().to_vec();
    let a = move |t: f64| {
        scaled(&b[0], (2.0 * t).cos()) + scaled(&b[1], t * t) + scaled(&b[2], 1.0 - t)
    };
    let fine = solve_gauge_ode_curve(&ctx, &a, 4096, false);
    let errors: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            dist(
                solve_gauge_ode_curve(&ctx, &a, n, false).start(),
                fine.start(),
            )
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((3.8..4.3).contains(&order), "{errors:?}");
    }
    // Interpolated samples keep the order.
    let sampled: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let p = GaugePath::sample(&ctx, PathKind::Algebra, n, &a).unwrap();
            dist(solve_gauge_ode(&p).unwrap().start(), fine.start())
        })
        .collect();
    for w in sampled.windows(2) {
        assert!((w[0] / w[1]).log2() > 3.5, "{sampled:?}");
    }
}

#[test]
fn xi_gauge_makes_t1_constant() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..5 {
        let a = random_group_element(&ctx, &mut rng, 3.0);
        let v = random_algebra_element(&ctx, &mut rng, 2.0);
        let (t0, t1) = embed_tangent(&a, &v, None, 2000).unwrap();
        assert!(baby_nahm_residual(&t0, &t1).unwrap().sup_norm() < 1e-9);
        assert!(dist(t1.end(), v.matrix()) < 1e-14);
        let xi = solve_gauge_ode(&t0).unwrap();
        let zero = GaugePath::trivial(&ctx, PathKind::Algebra, 2000);
        let gauged = gauge_act(
            &xi,
            &NahmConfiguration::new([t0, t1, zero.clone(), zero]).unwrap(),
        )
        .unwrap();
        let p = gauged.component(1);
        let dev = p
            .values()
            .iter()
            .map(|m| dist(m, v.matrix()))
            .fold(0.0, f64::max);
        assert!(dev < 1e-6, "{dev}");
        assert!(dist(&xi.values()[0], a.inverse().matrix()) < 1e-9);
    }
}

#[test]
fn embed_tangent_trivial_cases() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = random_algebra_element(&ctx, &mut rng, 1.0);
    let (t0, t1) = embed_tangent(&GroupElement::identity(&ctx), &v, None, 10).unwrap();
    assert!(t0.sup_norm() < 1e-15);
    assert!(t1.values().iter().all(|m| dist(m, v.matrix()) < 1e-15));

    let torus = builtin("t2").unwrap();
    let l = random_algebra_element(&torus, &mut rng, 1.0);
    let w = random_algebra_element(&torus, &mut rng, 1.0);
    let (t0, t1) = embed_tangent(&group_exp(&l), &w, None, 10).unwrap();
    assert!(t0.values().iter().all(|m| dist(m, l.matrix()) < 1e-14));
    assert!(t1.values().iter().all(|m| dist(m, w.matrix()) < 1e-14));
}

#[test]
fn embed_tangent_checks_explicit_paths() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = random_group_element(&ctx, &mut rng, 2.0);
    let b = random_group_element(&ctx, &mut rng, 2.0);
    let v = random_algebra_element(&ctx, &mut rng, 1.0);
    let wrong = GeodesicHPath::new(&b).unwrap();
    assert!(matches!(
        embed_tangent(&a, &v, Some(&wrong), 10),
        Err(Error::MalformedInput(_))
    ));
}

#[test]
fn roundtrip_special_cases() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_group_element(&ctx, &mut rng, 3.0);
    let zero = AlgebraElement::zero(&ctx);
    let back = roundtrip_adapted(&a, &zero, 2000).unwrap();
    assert!(dist(back.matrix(), a.matrix()) < 1e-12);
    let v = random_algebra_element(&ctx, &mut rng, 2.0);
    let back = roundtrip_adapted(&GroupElement::identity(&ctx), &v, 2000).unwrap();
    let target = phi_map(&TangentPoint::new(GroupElement::identity(&ctx), v).unwrap());
    assert!(dist(back.matrix(), target.matrix()) < 1e-10);
}

#[test]
fn roundtrip_reaches_the_adapted_point_at_fourth_order() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let a = random_group_element(&ctx, &mut rng, 3.0);
        let v = random_algebra_element(&ctx, &mut rng, 2.0);
        let target = phi_map(&TangentPoint::new(a.clone(), v.clone()).unwrap());
        let err = |n: usize| {
            dist(
                roundtrip_adapted(&a, &v, n).unwrap().matrix(),
                target.matrix(),
            )
        };
        let e2000 = err(2000);
        assert!(e2000 < 1e-6, "{e2000}");
        let errors: Vec<f64> = [20, 40, 80, 160].iter().map(|&n| err(n)).collect();
        let order = (errors[2] / errors[3]).log2();
        eprintln!("errors {errors:?}, N=2000 {e2000:.2e}, order {order:.3}");
        assert!((3.8..=4.2).contains(&order), "{errors:?}");
    }
}

#[test]
fn roundtrip_does_not_depend_on_the_path() {
    let ctx = su3();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = random_group_element(&ctx, &mut rng, 2.0);
    let v = random_algebra_element(&ctx, &mut rng, 1.0);
    let y = random_algebra_element(&ctx, &mut rng, 1.0);
    let twisted = TwistedHPath::new(&a, &y).unwrap();
    let p = roundtrip_adapted(&a, &v, 1000).unwrap();
    let q = roundtrip_adapted_with_path(&a, &v, &twisted, 1000).unwrap();
    assert!(dist(p.matrix(), q.matrix()) < 1e-8);
    let (t0, t1) = embed_tangent(&a, &v, Some(&twisted), 1000).unwrap();
    assert!(baby_nahm_residual(&t0, &t1).unwrap().sup_norm() < 1e-8);
}

fn su3() -> Arc<LieAlgebraContext> {
    builtin("su3").unwrap()
}

fn random_config(
    ctx: &Arc<LieAlgebraContext>,
    rng: &mut ChaCha8Rng,
    n: usize,
) -> NahmConfiguration {
    let coeffs: Vec<[AlgebraElement; 3]> = (0..4)
        .map(|_| std::array::from_fn(|_| random_algebra_element(ctx, rng, 1.0)))
        .collect();
    let f = |j: usize| {
        let c = coeffs[j].clone();
        move |t: f64| {
            scaled(c[0].matrix(), 1.0)
                + scaled(c[1].matrix(), (3.0 * t).sin())
                + scaled(c[2].matrix(), t * t)
        }
    };
    let (f0, f1, f2, f3) = (f(0), f(1), f(2), f(3));
    NahmConfiguration::from_fns(ctx, n, [&f0, &f1, &f2, &f3]).unwrap()
}

#[test]
fn l2_and_omega_elementary_values() {
    let ctx = su2();
    let e1 = AlgebraElement::basis_vector(&ctx, 0).unwrap();
    let x = constant_direction(&e1, 1, 30).unwrap();
    assert!((l2_metric(&x, &x).unwrap() - 1.0).abs() < 1e-14);
    let x0 = constant_direction(&e1, 0, 30).unwrap();
    assert!((omega_i(&x0, &x).unwrap() - 1.0).abs() < 1e-14);
    let zero = NahmConfiguration::zero(&ctx, 30);
    assert_eq!(l2_metric(&zero, &x).unwrap(), 0.0);
}

#[test]
fn hyperkahler_identities() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let x = random_config(&ctx, &mut rng, 200);
    let y = random_config(&ctx, &mut rng, 200);
    assert_eq!(l2_metric(&x, &y).unwrap(), l2_metric(&y, &x).unwrap());
    assert!(l2_metric(&x, &x).unwrap() > 0.0);
    assert!(omega_i(&x, &x).unwrap().abs() < 1e-14);
    assert!((omega_i(&x, &y).unwrap() + omega_i(&y, &x).unwrap()).abs() < 1e-14);
    let (ix, iy) = (apply_i(&x), apply_i(&y));
    assert!((omega_i(&ix, &iy).unwrap() - omega_i(&x, &y).unwrap()).abs() < 1e-14);
    assert!((l2_metric(&ix, &iy).unwrap() - l2_metric(&x, &y).unwrap()).abs() < 1e-14);
    // ω_I(X, Y) = g(IX, Y).
    assert!((l2_metric(&ix, &y).unwrap() - omega_i(&x, &y).unwrap()).abs() < 1e-13);
    assert!(
        apply_i(&ix)
            .sup_distance(&x.combine(-1.0, &x, 0.0).unwrap())
            .unwrap()
            == 0.0
    );
}

#[test]
fn circle_action_is_an_isometry_fixing_omega_i() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = random_config(&ctx, &mut rng, 200);
    let x = random_config(&ctx, &mut rng, 200);
    let y = random_config(&ctx, &mut rng, 200);
    for theta in [0.3, 1.1, PI / 2.0, 4.0] {
        let (rx, ry) = (s1_action(theta, &x).unwrap(), s1_action(theta, &y).unwrap());
        assert!((l2_metric(&rx, &ry).unwrap() - l2_metric(&x, &y).unwrap()).abs() < 1e-14);
        assert!((omega_i(&rx, &ry).unwrap() - omega_i(&x, &y).unwrap()).abs() < 1e-14);
        let rb = s1_action(theta, &base).unwrap();
        assert!(
            (kahler_potential_f(&rb).unwrap() - kahler_potential_f(&base).unwrap()).abs() < 1e-14
        );
        // ω_J and ω_K rotate into each other.
        let (s, c) = theta.sin_cos();
        let (j, k) = (omega_j(&x, &y).unwrap(), omega_k(&x, &y).unwrap());
        assert!((omega_j(&rx, &ry).unwrap() - (c * j - s * k)).abs() < 1e-13);
        assert!((omega_k(&rx, &ry).unwrap() - (s * j + c * k)).abs() < 1e-13);
    }
    let quarter = s1_action(PI / 2.0, &x).unwrap();
    let t3 = x.component(3).combine(-1.0, x.component(3), 0.0).unwrap();
    assert!(quarter.component(2).sup_distance(&t3).unwrap() < 1e-15);
    assert!(quarter.component(3).sup_distance(x.component(2)).unwrap() < 1e-15);
    assert_eq!(s1_action(0.0, &x).unwrap().sup_distance(&x).unwrap(), 0.0);
}

#[test]
fn circle_action_commutes_with_gauge_and_preserves_solutions() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let t0 = GaugePath::constant(&ctx, PathKind::Algebra, 500, &ctx.basis()[2]).unwrap();
    let t = euler_top(&ctx, [0.3, 0.2, -0.1], &t0);
    let g = random_smooth_gauge(&ctx, &mut rng, 500, 1.0, false).unwrap();
    let a = s1_action(0.7, &gauge_act(&g, &t).unwrap()).unwrap();
    let b = gauge_act(&g, &s1_action(0.7, &t).unwrap()).unwrap();
    assert!(a.sup_distance(&b).unwrap() < 1e-14);
    let r0 = residual_sup(&nahm_residual(&t).unwrap());
    let r1 = residual_sup(&nahm_residual(&s1_action(0.7, &t).unwrap()).unwrap());
    assert!(r1 < 10.0 * r0.max(1e-12), "{r0} {r1}");
}

#[test]
fn potential_values() {
    let ctx = su2();
    assert_eq!(
        kahler_potential_f(&NahmConfiguration::zero(&ctx, 20)).unwrap(),
        0.0
    );
    let e1 = AlgebraElement::basis_vector(&ctx, 0).unwrap();
    assert!(
        (kahler_potential_f(&constant_direction(&e1, 1, 20).unwrap()).unwrap() - 0.5).abs() < 1e-15
    );
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let a = random_group_element(&ctx, &mut rng, 3.0);
        let v = random_algebra_element(&ctx, &mut rng, 2.0);
        let y = random_algebra_element(&ctx, &mut rng, 1.0);
        let twisted = TwistedHPath::new(&a, &y).unwrap();
        for path in [None, Some(&twisted as &dyn HPath)] {
            let (t0, t1) = embed_tangent(&a, &v, path, 500).unwrap();
            let zero = GaugePath::trivial(&ctx, PathKind::Algebra, 500);
            let f =
                kahler_potential_f(&NahmConfiguration::new([t0, t1, zero.clone(), zero]).unwrap())
                    .unwrap();
            assert!((f - 0.5 * v.norm().powi(2)).abs() < 1e-8);
        }
    }
}

#[test]
fn potential_identity_holds_on_the_grid() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let base = random_config(&ctx, &mut rng, 100);
    for _ in 0..5 {
        let x = random_config(&ctx, &mut rng, 100);
        let y = random_config(&ctx, &mut rng, 100);
        let lhs = d_i_df(kahler_potential_f, &base, &x, &y, 1e-2).unwrap();
        assert!((lhs - omega_i(&x, &y).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn potential_identity_converges_under_grid_refinement() {
    // Tangents X_j(t) = e^{λ_j t} A_j have ω_I(X, Y) in closed form.
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let lx = [0.7, -1.2, 1.5, 0.4];
    let ly = [1.1, 0.3, -0.8, 2.0];
    let ax: Vec<AlgebraElement> = (0..4)
        .map(|_| random_algebra_element(&ctx, &mut rng, 1.0))
        .collect();
    let ay: Vec<AlgebraElement> = (0..4)
        .map(|_| random_algebra_element(&ctx, &mut rng, 1.0))
        .collect();
    let integral = |l: f64| (l.exp() - 1.0) / l;
    let pair = |a: usize, b: usize| ax[a].inner(&ay[b]).unwrap() * integral(lx[a] + ly[b]);
    let exact = pair(0, 1) - pair(1, 0) + pair(2, 3) - pair(3, 2);
    let build = |a: &[AlgebraElement], l: [f64; 4], n: usize| {
        let f = |j: usize| {
            let m = a[j].matrix().clone();
            let lj = l[j];
            move |t: f64| scaled(&m, (lj * t).exp())
        };
        let (f0, f1, f2, f3) = (f(0), f(1), f(2), f(3));
        NahmConfiguration::from_fns(&ctx, n, [&f0, &f1, &f2, &f3]).unwrap()
    };
    let mut errors = Vec::new();
    for n in [10, 20, 40, 80] {
        let base = random_config(&ctx, &mut ChaCha8Rng::seed_from_u64(16), n);
        let x = build(&ax, lx, n);
        let y = build(&ay, ly, n);
        errors.push((d_i_df(kahler_potential_f, &base, &x, &y, 1e-2).unwrap() - exact).abs());
    }
    for w in errors.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.9, "{errors:?}");
    }
}

#[test]
fn moment_map_properties() {
    let ctx = builtin("su2-u1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = random_config(&ctx, &mut rng, 100);
    let e3 = AlgebraElement::basis_vector(&ctx, 2).unwrap();
    let x = constant_direction(&e3, 1, 100).unwrap();
    assert!(moment_map_h(&x).unwrap()[0].distance(&e3) < 1e-15);

    // Projecting the endpoints to m lands in the zero level.
    let m_end = NahmConfiguration::from_fns(
        &ctx,
        100,
        [
            &|s| t.component(0).value((s * 100.0).round() as usize).clone(),
            &|s| {
                project_m(&AlgebraElement::from_matrix(&ctx, &t.component(1).value(100)).unwrap())
                    .unwrap()
                    .matrix()
                    * C64::new(s, 0.0)
            },
            &|s| {
                project_m(&AlgebraElement::from_matrix(&ctx, &t.component(2).value(100)).unwrap())
                    .unwrap()
                    .matrix()
                    * C64::new(s * s, 0.0)
            },
            &|_| {
                project_m(&AlgebraElement::from_matrix(&ctx, &t.component(3).value(100)).unwrap())
                    .unwrap()
                    .matrix()
                    .clone()
            },
        ],
    )
    .unwrap();
    for phi in moment_map_h(&m_end).unwrap() {
        assert!(phi.norm() < 1e-12);
    }

    let before = moment_map_h(&t).unwrap();
    for pinned in [true, false] {
        let g = random_smooth_gauge(&ctx, &mut rng, 100, 1.0, pinned).unwrap();
        let after = moment_map_h(&gauge_act(&g, &t).unwrap()).unwrap();
        if pinned {
            for (p, q) in before.iter().zip(&after) {
                assert!(p.distance(q) < 1e-12);
            }
        }
    }

    // Gauges ending in H act on Φ by the adjoint action of g(1).
    let hgen = random_algebra_element(&ctx, &mut rng, 1.0);
    let hgen = tubegeom::lie::project_h(&hgen).unwrap();
    let g = GaugePath::from_fn(&ctx, PathKind::Group, 100, |s| {
        expm(&scaled(hgen.matrix(), s * s))
    })
    .unwrap();
    let g1 = GroupElement::new(&ctx, g.end().clone()).unwrap();
    let after = moment_map_h(&gauge_act(&g, &t).unwrap()).unwrap();
    for (p, q) in before.iter().zip(&after) {
        assert!(adjoint(&g1, p).unwrap().distance(q) < 1e-12);
    }
    assert!(matches!(
        moment_map_h(&NahmConfiguration::zero(&su2(), 4)),
        Err(Error::NoSplitConfigured(_))
    ));
}

#[test]
fn bundles_round_trip_through_csv() {
    let ctx = builtin("su2-u1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let t = random_config(&ctx, &mut rng, 40);
    let dir = tempfile::tempdir().unwrap();
    save_bundle(&t, dir.path()).unwrap();
    let back = load_bundle(dir.path(), None).unwrap();
    assert_eq!(back.sup_distance(&t).unwrap(), 0.0);
    let csv = path_to_csv(t.component(1)).unwrap();
    assert!(csv.starts_with("t,re_00,im_00,re_01,im_01,re_10,im_10,re_11,im_11\n"));
    let g = random_smooth_gauge(&ctx, &mut rng, 40, 1.0, false).unwrap();
    let g_back = path_from_csv(&ctx, PathKind::Group, &path_to_csv(&g).unwrap()).unwrap();
    assert_eq!(g_back.sup_distance(&g).unwrap(), 0.0);
}

#[test]
fn complexified_pairs() {
    let ctx = su2();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let t = random_config(&ctx, &mut rng, 10);
    let alpha = t.alpha();
    assert_eq!(alpha.kind(), PathKind::ComplexAlgebra);
    let k = 4;
    let expected = t.component(0).value(k) + t.component(1).value(k) * tubegeom::linalg::I;
    assert_eq!(alpha.value(k), &expected);
    assert!(frobenius(t.beta().value(k)) > 0.0);
    assert_eq!(identity(2).nrows(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn omega_is_antisymmetric_and_i_invariant(seed in any::<u64>()) {
        let ctx = su2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_config(&ctx, &mut rng, 32);
        let y = random_config(&ctx, &mut rng, 32);
        let w = omega_i(&x, &y).unwrap();
        prop_assert!((w + omega_i(&y, &x).unwrap()).abs() < 1e-14);
        prop_assert!((omega_i(&apply_i(&x), &apply_i(&y)).unwrap() - w).abs() < 1e-14);
    }

    #[test]
    fn roundtrip_small_grids_stay_close(seed in any::<u64>()) {
        let ctx = su2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_group_element(&ctx, &mut rng, 3.0);
        let v = random_algebra_element(&ctx, &mut rng, 1.0);
        let target = phi_map(&TangentPoint::new(a.clone(), v.clone()).unwrap());
        let back = roundtrip_adapted(&a, &v, 200).unwrap();
        prop_assert!(dist(back.matrix(), target.matrix()) < 1e-6);
    }
}
