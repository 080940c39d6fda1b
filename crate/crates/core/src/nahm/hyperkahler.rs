use super::equations::{NahmConfiguration, PathTangent};
use super::path::{trapezoid, GaugePath, PathKind};
use crate::error::Result;
use crate::lie::{project_h, AlgebraElement};

fn pairing(x: &GaugePath, y: &GaugePath) -> Result<Vec<f64>> {
    x.check_grid(y)?;
    let ctx = x.context();
    Ok(x.values()
        .iter()
        .zip(y.values())
        .map(|(a, b)| ctx.inner(a, b))
        .collect())
}

/// Trapezoid integral of `Σ_j s_j ⟨X_{a_j}, Y_{b_j}⟩`.
fn integrate_pairings(
    x: &PathTangent,
    y: &PathTangent,
    terms: &[(f64, usize, usize)],
) -> Result<f64> {
    let n = x.intervals() + 1;
    let mut integrand = vec![0.0; n];
    for &(s, a, b) in terms {
        for (acc, p) in integrand
            .iter_mut()
            .zip(pairing(x.component(a), y.component(b))?)
        {
            *acc += s * p;
        }
    }
    Ok(trapezoid(&integrand))
}

/// `∫ Σ_j ⟨X_j, Y_j⟩ dt`.
pub fn l2_metric(x: &PathTangent, y: &PathTangent) -> Result<f64> {
    integrate_pairings(x, y, &[(1.0, 0, 0), (1.0, 1, 1), (1.0, 2, 2), (1.0, 3, 3)])
}

/// `ω_I = dT0∧dT1 + dT2∧dT3`.
pub fn omega_i(x: &PathTangent, y: &PathTangent) -> Result<f64> {
    integrate_pairings(
        x,
        y,
        &[(1.0, 0, 1), (-1.0, 1, 0), (1.0, 2, 3), (-1.0, 3, 2)],
    )
}

/// `ω_J = dT0∧dT2 + dT3∧dT1`.
pub fn omega_j(x: &PathTangent, y: &PathTangent) -> Result<f64> {
    integrate_pairings(
        x,
        y,
        &[(1.0, 0, 2), (-1.0, 2, 0), (1.0, 3, 1), (-1.0, 1, 3)],
    )
}

/// `ω_K = dT0∧dT3 + dT1∧dT2`.
pub fn omega_k(x: &PathTangent, y: &PathTangent) -> Result<f64> {
    integrate_pairings(
        x,
        y,
        &[(1.0, 0, 3), (-1.0, 3, 0), (1.0, 1, 2), (-1.0, 2, 1)],
    )
}

fn rearrange(x: &NahmConfiguration, signs: [(f64, usize); 4]) -> NahmConfiguration {
    let c = x.components();
    let part = |(s, j): (f64, usize)| {
        let p = &c[j];
        let kind = p.kind();
        p.map_unchecked(kind, |_, m| if s < 0.0 { -m } else { m.clone() })
    };
    NahmConfiguration::new(signs.map(part)).expect("components share a grid")
}

/// Complex structure `I`: multiplication by `i` on `α = T0 + iT1`, `β = T2 + iT3`.
pub fn apply_i(x: &PathTangent) -> PathTangent {
    rearrange(x, [(-1.0, 1), (1.0, 0), (-1.0, 3), (1.0, 2)])
}

/// Kähler potential `½∫|T1|² + ¼∫|T2|² + ¼∫|T3|²`.
pub fn kahler_potential_f(t: &NahmConfiguration) -> Result<f64> {
    integrate_pairings(t, t, &[(0.5, 1, 1), (0.25, 2, 2), (0.25, 3, 3)])
}

/// Finite-difference `d(I df)(X, Y)` at `base`, where `(I df)(Z) = −df(IZ)`.
///
/// Uses the four-point mixed second difference of `f` with step `eps`
/// along the flat directions of configuration space.
pub fn d_i_df(
    f: impl Fn(&NahmConfiguration) -> Result<f64>,
    base: &NahmConfiguration,
    x: &PathTangent,
    y: &PathTangent,
    eps: f64,
) -> Result<f64> {
    let hessian = |u: &PathTangent, v: &PathTangent| -> Result<f64> {
        let at =
            |a: f64, b: f64| -> Result<f64> { f(&base.combine(1.0, &u.combine(a, v, b)?, 1.0)?) };
        Ok((at(eps, eps)? - at(eps, -eps)? - at(-eps, eps)? + at(-eps, -eps)?) / (4.0 * eps * eps))
    };
    Ok(-hessian(x, &apply_i(y))? + hessian(y, &apply_i(x))?)
}

/// Rotation of `(T2, T3)` by `θ`.
pub fn s1_action(theta: f64, t: &NahmConfiguration) -> Result<NahmConfiguration> {
    let (s, c) = theta.sin_cos();
    let [t0, t1, t2, t3] = t.components().clone();
    let r2 = t2.combine(c, &t3, -s)?;
    let r3 = t2.combine(s, &t3, c)?;
    NahmConfiguration::new([t0, t1, r2, r3])
}

/// `Φ(T) = (π_h T1(1), π_h T2(1), π_h T3(1))`.
pub fn moment_map_h(t: &NahmConfiguration) -> Result<[AlgebraElement; 3]> {
    let ctx = t.context();
    let end = |j: usize| -> Result<AlgebraElement> {
        let (coeffs, _) = ctx.coordinates(t.component(j).end());
        project_h(&AlgebraElement::from_coeffs(ctx, coeffs)?)
    };
    Ok([end(1)?, end(2)?, end(3)?])
}

/// Constant tangent with `X_j ≡ x` in slot `j` and zero elsewhere.
pub fn constant_direction(
    x: &AlgebraElement,
    slot: usize,
    intervals: usize,
) -> Result<PathTangent> {
    let ctx = x.context();
    let paths: [GaugePath; 4] = std::array::from_fn(|j| {
        if j == slot {
            GaugePath::from_values_unchecked(
                ctx,
                PathKind::Algebra,
                vec![x.matrix().clone(); intervals + 1],
            )
        } else {
            GaugePath::trivial(ctx, PathKind::Algebra, intervals)
        }
    });
    NahmConfiguration::new(paths)
}
