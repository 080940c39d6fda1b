use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tubegeom::curvature::CurvatureTensor;
use tubegeom::kahler::{
    coordinate_planes, curvature_table, k_components_at_zero, k_oracle_from_jet,
    negative_plane_flag, plane_from_components, sectional_plane, table_to_csv, Plane,
};
use tubegeom::ma::potential_expansion;

fn sphere() -> CurvatureTensor {
    CurvatureTensor::constant_curvature(2, 1.0)
}

#[test]
fn flat_tensor_has_flat_tube() {
    let k = k_components_at_zero(&CurvatureTensor::zeros(3)).unwrap();
    assert_eq!(
        k.max_abs_difference(
            &k_oracle_from_jet(&potential_expansion(&CurvatureTensor::zeros(3)).unwrap()).unwrap()
        ),
        0.0
    );
    for p in coordinate_planes(3) {
        assert_eq!(plane_from_components(&k, p).unwrap(), 0.0);
    }
}

#[test]
fn sphere_plane_values() {
    let r = sphere();
    assert!((sectional_plane(&r, Plane::XY(0, 1)).unwrap() + 1.0 / 3.0).abs() < 1e-15);
    assert!((sectional_plane(&r, Plane::XY(1, 0)).unwrap() + 1.0 / 3.0).abs() < 1e-15);
    assert!((sectional_plane(&r, Plane::XX(0, 1)).unwrap() - 1.0).abs() < 1e-15);
    assert!((sectional_plane(&r, Plane::YY(0, 1)).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(sectional_plane(&r, Plane::Holomorphic(0)).unwrap(), 0.0);
}

#[test]
fn sphere_oracle_matches_hand_differentiation() {
    // ρ₄ = (z̄₁²z₂² − 2|z₁|²|z₂|² + z₁²z̄₂²)/12, so ∂₁∂̄₂∂₁∂̄₂ρ = 1/3 and ∂₁∂̄₂∂₂∂̄₁ρ = −1/6.
    let k = k_oracle_from_jet(&potential_expansion(&sphere()).unwrap()).unwrap();
    assert!((k.get(0, 1, 0, 1).re - 1.0 / 3.0).abs() < 1e-14);
    assert!((k.get(0, 1, 1, 0).re + 1.0 / 6.0).abs() < 1e-14);
    assert!(k.max_imaginary() < 1e-14);
}

#[test]
fn oracle_equals_closed_form_for_random_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..20 {
        let n = 2 + trial % 2;
        let r = CurvatureTensor::random(n, &mut rng, 1.0);
        let closed = k_components_at_zero(&r).unwrap();
        let oracle = k_oracle_from_jet(&potential_expansion(&r).unwrap()).unwrap();
        assert!(closed.max_abs_difference(&oracle) <= 1e-10);
        assert!(oracle.max_imaginary() <= 1e-12);
    }
}

#[test]
fn closed_form_components_by_substitution() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = CurvatureTensor::random(3, &mut rng, 1.0);
    let k = k_components_at_zero(&r).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            for kk in 0..3 {
                for l in 0..3 {
                    let z = k.get(i, j, kk, l);
                    assert_eq!(z.im, 0.0);
                    assert!((z.re - (r.get(i, j, kk, l) + r.get(i, l, kk, j)) / 6.0).abs() < 1e-15);
                }
            }
        }
        for j in 0..3 {
            if i != j {
                let s = r.get(i, j, i, j);
                assert!((k.get(i, j, i, j).re - s / 3.0).abs() < 1e-15);
                assert!((k.get(i, j, j, i).re + s / 6.0).abs() < 1e-15);
            }
        }
    }
    assert!(k.hermitian_defect() < 1e-15);
}

#[test]
fn multilinear_evaluator_agrees_with_component_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2, 3] {
        let r = CurvatureTensor::random(n, &mut rng, 1.0);
        let k = k_components_at_zero(&r).unwrap();
        for p in coordinate_planes(n) {
            let (u, v) = p.vectors(n);
            let general = k.sectional_of_real_vectors(&u, &v).unwrap();
            let formula = plane_from_components(&k, p).unwrap();
            assert!(
                (general - formula).abs() < 1e-14,
                "{p}: {general} vs {formula}"
            );
        }
    }
}

fn complex_line(u: &[f64]) -> Vec<f64> {
    // J ∂x_k = ∂y_k, J ∂y_k = −∂x_k.
    let n = u.len() / 2;
    (0..n)
        .map(|k| -u[n + k])
        .chain((0..n).map(|k| u[k]))
        .collect()
}

#[test]
fn complex_lines_through_real_directions_are_flat() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = CurvatureTensor::random(3, &mut rng, 1.0);
    let k = k_components_at_zero(&r).unwrap();
    let mut u: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    u.extend([0.0; 3]);
    let hol = k.sectional_of_real_vectors(&u, &complex_line(&u)).unwrap();
    assert!(hol.abs() < 1e-14, "{hol}");
}

#[test]
fn sphere_complex_line_along_one_i_is_curved() {
    // u = ∂x₁ + ∂y₂ has holomorphic coefficients a = (1, i). Both sums
    // Σ R_{ijkl} a_i ā_j a_k ā_l and Σ R_{ilkj} a_i ā_j a_k ā_l equal −4, so
    // K(a, ā, a, ā) = −4/3, the curvature form is 16/3 and the area is 4.
    let k = k_components_at_zero(&sphere()).unwrap();
    let u = [1.0, 0.0, 0.0, 1.0];
    let hol = k.sectional_of_real_vectors(&u, &complex_line(&u)).unwrap();
    assert!((hol - 4.0 / 3.0).abs() < 1e-14, "{hol}");
}

#[test]
fn negative_plane_flag_cases() {
    assert_eq!(
        negative_plane_flag(&CurvatureTensor::zeros(2)),
        (false, None)
    );
    let (flag, witness) = negative_plane_flag(&sphere());
    assert!(flag);
    let w = witness.unwrap();
    assert!((w.value + 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(sectional_plane(&sphere(), w.plane).unwrap(), w.value);
    let hyperbolic = CurvatureTensor::constant_curvature(3, -1.0);
    assert_eq!(negative_plane_flag(&hyperbolic), (false, None));
}

#[test]
fn nonnegative_gauss_tensors_trigger_the_flag() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let a = nalgebra::DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let h = &a * a.transpose();
        let r = CurvatureTensor::gauss(&h).unwrap();
        let (flag, witness) = negative_plane_flag(&r);
        assert!(flag);
        let w = witness.unwrap();
        assert!(w.value < 0.0);
    }
}

#[test]
fn csv_table_has_expected_rows() {
    let r = sphere();
    let rows = curvature_table(&r, &potential_expansion(&r).unwrap()).unwrap();
    assert_eq!(rows.len(), coordinate_planes(2).len());
    assert!(rows.iter().all(|row| row.abs_error < 1e-12));
    let csv = table_to_csv(&rows).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "i,j,plane,closed_form,oracle,abs_error"
    );
    assert_eq!(lines.count(), rows.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn y_planes_equal_x_planes(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = CurvatureTensor::random(n, &mut rng, 1.0);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let xx = sectional_plane(&r, Plane::XX(i, j)).unwrap();
                    let yy = sectional_plane(&r, Plane::YY(i, j)).unwrap();
                    prop_assert_eq!(xx, yy);
                    prop_assert!((xx - r.sectional(i, j).unwrap()).abs() < 1e-15);
                    let xy = sectional_plane(&r, Plane::XY(i, j)).unwrap();
                    prop_assert!((xy + r.sectional(i, j).unwrap() / 3.0).abs() < 1e-15);
                }
            }
            prop_assert!(sectional_plane(&r, Plane::Holomorphic(i)).unwrap().abs() < 1e-15);
        }
    }
}
