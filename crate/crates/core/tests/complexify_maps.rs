use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubegeom::algebras::builtin;
use tubegeom::complexify::{
    coset_leaf_map, cr_residual, leaf_map, phi_inverse, phi_inverse_with_base, phi_map, psi_map,
    trivialize, CosetChart, TangentPoint,
};
use tubegeom::lie::{
    group_exp, random_algebra_element, random_group_element, random_m_element, AlgebraElement,
    GroupElement,
};
use tubegeom::linalg::{dist, frobenius, C64};
use tubegeom::Error;

fn random_point(name: &str, rng: &mut ChaCha8Rng, max_v: f64) -> TangentPoint {
    let ctx = builtin(name).unwrap();
    let a = random_group_element(&ctx, rng, 3.0);
    let v = random_algebra_element(&ctx, rng, max_v);
    TangentPoint::new(a, v).unwrap()
}

#[test]
fn phi_inverse_recovers_the_tangent_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for name in ["su2", "su3", "so3", "so4", "t2"] {
        for _ in 0..10 {
            let p = random_point(name, &mut rng, 2.0);
            let z = phi_map(&p);
            assert!(z.context().in_complex_group(z.matrix(), 1e-9));
            let q = phi_inverse(&z).unwrap();
            assert!(q.base().distance(p.base()) < 1e-10, "{name}");
            assert!(q.vector().distance(p.vector()) < 1e-10, "{name}");
        }
    }
}

#[test]
fn phi_inverse_with_known_base() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = random_point("su2", &mut rng, 1.0);
    let q = phi_inverse_with_base(p.base(), &phi_map(&p)).unwrap();
    assert!(q.vector().distance(p.vector()) < 1e-12);
}

#[test]
fn phi_is_left_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let p = random_point("su3", &mut rng, 1.5);
        let g = random_group_element(p.context(), &mut rng, 3.0);
        let lhs = phi_map(&p.left_translate(&g).unwrap());
        let rhs = g.mul(&phi_map(&p)).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12);
    }
}

#[test]
fn zero_vector_maps_to_the_base() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ctx = builtin("so3").unwrap();
    let a = random_group_element(&ctx, &mut rng, 3.0);
    let p = TangentPoint::new(a.clone(), AlgebraElement::zero(&ctx)).unwrap();
    assert!(dist(phi_map(&p).matrix(), a.matrix()) < 1e-15);
}

#[test]
fn trivialize_rejects_non_tangent_vectors() {
    let ctx = builtin("su2").unwrap();
    let a = GroupElement::identity(&ctx);
    let w = tubegeom::linalg::identity(2);
    assert!(matches!(trivialize(&a, &w), Err(Error::NotTangent(_))));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = random_group_element(&ctx, &mut rng, 3.0);
    let v = random_algebra_element(&ctx, &mut rng, 1.0);
    let p = trivialize(&b, &(b.matrix() * v.matrix())).unwrap();
    assert!(p.vector().distance(&v) < 1e-12);
}

#[test]
fn psi_is_equivariant_for_fifty_random_elements() {
    let ctx = builtin("su2-u1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let a = random_group_element(&ctx, &mut rng, 3.0);
        let v = random_m_element(&ctx, &mut rng, 2.0).unwrap();
        let p = TangentPoint::new_homogeneous(a, v).unwrap();
        let g = random_group_element(&ctx, &mut rng, 3.0);
        let lhs = psi_map(&p.left_translate(&g).unwrap()).unwrap();
        let rhs = psi_map(&p).unwrap().left_translate(&g).unwrap();
        assert!(lhs.same_coset(&rhs).unwrap());
    }
}

#[test]
fn psi_is_constant_on_right_isotropy_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ["su2-u1", "su3-u2", "so3-so2"] {
        let ctx = builtin(name).unwrap();
        for _ in 0..10 {
            let a = random_group_element(&ctx, &mut rng, 3.0);
            let v = random_m_element(&ctx, &mut rng, 1.5).unwrap();
            let p = TangentPoint::new_homogeneous(a, v).unwrap();
            let h = group_exp(&random_h_element(&ctx, &mut rng));
            let q = p.h_action(&h).unwrap();
            assert!(
                psi_map(&q)
                    .unwrap()
                    .same_coset(&psi_map(&p).unwrap())
                    .unwrap(),
                "{name}"
            );
        }
    }
}

fn random_h_element(
    ctx: &std::sync::Arc<tubegeom::lie::LieAlgebraContext>,
    rng: &mut ChaCha8Rng,
) -> AlgebraElement {
    let x = random_algebra_element(ctx, rng, 2.0);
    tubegeom::lie::project_h(&x).unwrap()
}

#[test]
fn left_isotropy_action_does_not_preserve_the_coset() {
    // (h a, Ad_h v) is not a second representative of the same tangent vector.
    let ctx = builtin("su2-u1").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut moved = 0;
    for _ in 0..10 {
        let a = random_group_element(&ctx, &mut rng, 3.0);
        let v = random_m_element(&ctx, &mut rng, 1.0).unwrap();
        let p = TangentPoint::new_homogeneous(a.clone(), v.clone()).unwrap();
        let h = group_exp(&random_h_element(&ctx, &mut rng));
        let vh = tubegeom::lie::adjoint(&h, &v).unwrap();
        let q = TangentPoint::new(h.mul(&a).unwrap(), vh).unwrap();
        if !psi_map(&q)
            .unwrap()
            .same_coset(&psi_map(&p).unwrap())
            .unwrap()
        {
            moved += 1;
        }
    }
    assert!(moved >= 9);
}

#[test]
fn psi_rejects_h_components() {
    let ctx = builtin("su2-u1").unwrap();
    let a = GroupElement::identity(&ctx);
    let v = AlgebraElement::basis_vector(&ctx, 2).unwrap();
    let p = TangentPoint::new(a.clone(), v.clone()).unwrap();
    assert!(matches!(psi_map(&p), Err(Error::VectorNotInM(_))));
    assert!(matches!(
        TangentPoint::new_homogeneous(a.clone(), v.clone()),
        Err(Error::VectorNotInM(_))
    ));
    assert!(matches!(
        coset_leaf_map(&a, &v, C64::new(0.1, 0.2)),
        Err(Error::VectorNotInM(_))
    ));
}

#[test]
fn psi_requires_a_split() {
    let ctx = builtin("su2").unwrap();
    let p = TangentPoint::new(GroupElement::identity(&ctx), AlgebraElement::zero(&ctx)).unwrap();
    assert!(matches!(psi_map(&p), Err(Error::NoSplitConfigured(_))));
}

#[test]
fn leaf_at_real_parameter_is_the_geodesic() {
    let ctx = builtin("su3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = random_group_element(&ctx, &mut rng, 3.0);
    let x = random_algebra_element(&ctx, &mut rng, 1.0);
    let c = leaf_map(&a, &x, C64::new(0.7, 0.0)).unwrap();
    assert!(ctx.in_group(c.matrix(), 1e-10));
    let at_i = leaf_map(&a, &x, C64::new(0.0, 0.7)).unwrap();
    let p = TangentPoint::new(a, x.scale(0.7)).unwrap();
    assert!(at_i.distance(&phi_map(&p)) < 1e-12);
}

fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn group_leaves_satisfy_cauchy_riemann_to_second_order() {
    let ctx = builtin("su2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let a = random_group_element(&ctx, &mut rng, 3.0);
    let x = random_algebra_element(&ctx, &mut rng, 1.0);
    let c = |t: f64, s: f64| -> Vec<C64> {
        leaf_map(&a, &x, C64::new(t, s))
            .unwrap()
            .matrix()
            .iter()
            .copied()
            .collect()
    };
    let errors: Vec<f64> = [0.1, 0.05, 0.025, 0.0125]
        .iter()
        .map(|&h| cr_residual(c, 0.3, 0.4, h))
        .collect();
    for order in observed_orders(&errors) {
        assert!(order >= 1.9, "{errors:?}");
    }
}

#[test]
fn swapped_parametrization_is_not_holomorphic() {
    let ctx = builtin("su2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_group_element(&ctx, &mut rng, 3.0);
    let x = random_algebra_element(&ctx, &mut rng, 1.0);
    let c = |t: f64, s: f64| -> Vec<C64> {
        leaf_map(&a, &x, C64::new(s, t))
            .unwrap()
            .matrix()
            .iter()
            .copied()
            .collect()
    };
    assert!(cr_residual(c, 0.3, 0.4, 0.01) > 0.1 * x.norm());
}

#[test]
fn coset_leaves_are_holomorphic_in_affine_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for name in ["su2-u1", "su3-u2", "so3-so2"] {
        let ctx = builtin(name).unwrap();
        let a = random_group_element(&ctx, &mut rng, 3.0);
        let y = random_m_element(&ctx, &mut rng, 1.0).unwrap();
        let (t0, s0) = (0.2, 0.3);
        let reference = coset_leaf_map(&a, &y, C64::new(t0, s0)).unwrap();
        let chart = CosetChart::at(
            reference.representative().matrix(),
            ctx.subgroup_model().unwrap(),
        )
        .unwrap();
        let c = |t: f64, s: f64| -> Vec<C64> {
            let p = coset_leaf_map(&a, &y, C64::new(t, s)).unwrap();
            chart.coordinates(p.representative().matrix()).unwrap()
        };
        let errors: Vec<f64> = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&h| cr_residual(c, t0, s0, h))
            .collect();
        for order in observed_orders(&errors) {
            assert!(order >= 1.9, "{name}: {errors:?}");
        }
    }
}

#[test]
fn chart_coordinates_ignore_the_coset_representative() {
    let ctx = builtin("su3-u2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a = random_group_element(&ctx, &mut rng, 3.0);
    let y = random_m_element(&ctx, &mut rng, 1.0).unwrap();
    let p = psi_map(&TangentPoint::new_homogeneous(a, y).unwrap()).unwrap();
    let chart = CosetChart::at(p.representative().matrix(), ctx.subgroup_model().unwrap()).unwrap();
    let h = group_exp(&random_h_element(&ctx, &mut rng).complexify());
    let z = p.representative().matrix();
    let before = chart.coordinates(z).unwrap();
    let after = chart.coordinates(&(z * h.matrix())).unwrap();
    let diff: f64 = before
        .iter()
        .zip(&after)
        .map(|(u, w)| (u - w).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-12 * (1.0 + frobenius(z)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn phi_roundtrip_su2(seed in any::<u64>(), max_v in 0.01f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_point("su2", &mut rng, max_v);
        let q = phi_inverse(&phi_map(&p)).unwrap();
        prop_assert!(q.base().distance(p.base()) < 1e-10);
        prop_assert!(q.vector().distance(p.vector()) < 1e-10);
    }
}
