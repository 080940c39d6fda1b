use std::sync::Arc;

use rand::Rng;

use super::path::{GaugePath, MatrixCurve, PathKind};
use crate::error::{Error, Result};
use crate::lie::{random_algebra_element, AlgebraElement, LieAlgebraContext};
use crate::linalg::{self, commutator, CMat, C64, I};

/// Nahm data `(T0, T1, T2, T3)` on a shared grid.
#[derive(Debug, Clone)]
pub struct NahmConfiguration {
    t: [GaugePath; 4],
}

/// Tangent vectors to the (flat) configuration space have the same shape.
pub type PathTangent = NahmConfiguration;

impl NahmConfiguration {
    pub fn new(t: [GaugePath; 4]) -> Result<Self> {
        for p in &t[1..] {
            t[0].check_grid(p)?;
        }
        if t.iter().any(|p| p.kind().is_group()) {
            return Err(Error::MalformedInput(
                "Nahm data must be algebra-valued".into(),
            ));
        }
        Ok(Self { t })
    }

    /// Configuration sampled from four algebra-valued functions.
    pub fn from_fns(
        ctx: &Arc<LieAlgebraContext>,
        intervals: usize,
        f: [&dyn Fn(f64) -> CMat; 4],
    ) -> Result<Self> {
        let paths = f.map(|fj| GaugePath::from_fn(ctx, PathKind::Algebra, intervals, fj));
        let [a, b, c, d] = paths;
        Self::new([a?, b?, c?, d?])
    }

    pub fn zero(ctx: &Arc<LieAlgebraContext>, intervals: usize) -> Self {
        let z = GaugePath::trivial(ctx, PathKind::Algebra, intervals);
        Self {
            t: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    pub fn component(&self, j: usize) -> &GaugePath {
        &self.t[j]
    }

    pub fn components(&self) -> &[GaugePath; 4] {
        &self.t
    }

    pub fn context(&self) -> &Arc<LieAlgebraContext> {
        self.t[0].context()
    }

    pub fn intervals(&self) -> usize {
        self.t[0].intervals()
    }

    pub fn is_complex(&self) -> bool {
        self.t.iter().any(|p| p.kind().is_complex())
    }

    /// `α = T0 + i T1`.
    pub fn alpha(&self) -> GaugePath {
        complex_pair(&self.t[0], &self.t[1])
    }

    /// `β = T2 + i T3`.
    pub fn beta(&self) -> GaugePath {
        complex_pair(&self.t[2], &self.t[3])
    }

    /// Componentwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for j in 0..4 {
            out.push(self.t[j].combine(a, &other.t[j], b)?);
        }
        let [p0, p1, p2, p3]: [GaugePath; 4] = out.try_into().expect("four components");
        Ok(Self {
            t: [p0, p1, p2, p3],
        })
    }

    /// Largest nodewise distance over the four components.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        let mut d: f64 = 0.0;
        for j in 0..4 {
            d = d.max(self.t[j].sup_distance(&other.t[j])?);
        }
        Ok(d)
    }
}

fn complex_pair(re: &GaugePath, im: &GaugePath) -> GaugePath {
    re.map_unchecked(PathKind::ComplexAlgebra, |k, m| m + im.value(k) * I)
}

/// Largest residual norm over the three Nahm residual paths.
pub fn residual_sup(residuals: &[GaugePath]) -> f64 {
    residuals
        .iter()
        .map(GaugePath::sup_norm)
        .fold(0.0, f64::max)
}

/// `T_a' + [T0, T_a] + [T_b, T_c]` for the cyclic triples `(a, b, c)`.
pub fn nahm_residual(t: &NahmConfiguration) -> Result<[GaugePath; 3]> {
    let d: Vec<Vec<CMat>> = (1..4).map(|j| t.t[j].derivative()).collect();
    let kind = if t.is_complex() {
        PathKind::ComplexAlgebra
    } else {
        PathKind::Algebra
    };
    let residual = |a: usize, b: usize, c: usize| {
        t.t[0].map_unchecked(kind, |k, t0| {
            &d[a - 1][k]
                + commutator(t0, t.t[a].value(k))
                + commutator(t.t[b].value(k), t.t[c].value(k))
        })
    };
    Ok([residual(1, 2, 3), residual(2, 3, 1), residual(3, 1, 2)])
}

/// `T1' + [T0, T1]`.
pub fn baby_nahm_residual(t0: &GaugePath, t1: &GaugePath) -> Result<GaugePath> {
    t0.check_grid(t1)?;
    let d = t1.derivative();
    let kind = if t0.kind().is_complex() || t1.kind().is_complex() {
        PathKind::ComplexAlgebra
    } else {
        PathKind::Algebra
    };
    Ok(t0.map_unchecked(kind, |k, a| &d[k] + commutator(a, t1.value(k))))
}

/// Gauge action `g·T0 = g T0 g⁻¹ − g' g⁻¹`, `g·Tj = g Tj g⁻¹`.
pub fn gauge_act(g: &GaugePath, t: &NahmConfiguration) -> Result<NahmConfiguration> {
    if !g.kind().is_group() {
        return Err(Error::MalformedInput(
            "gauge transformation must be group-valued".into(),
        ));
    }
    g.check_grid(&t.t[0])?;
    let inverses = g
        .values()
        .iter()
        .map(linalg::inverse)
        .collect::<Result<Vec<_>>>()?;
    let dg = g.derivative();
    let kind = if g.kind().is_complex() || t.is_complex() {
        PathKind::ComplexAlgebra
    } else {
        PathKind::Algebra
    };
    let conj = |p: &GaugePath| p.map_unchecked(kind, |k, m| g.value(k) * m * &inverses[k]);
    let t0 = t.t[0].map_unchecked(kind, |k, m| {
        g.value(k) * m * &inverses[k] - &dg[k] * &inverses[k]
    });
    Ok(NahmConfiguration {
        t: [t0, conj(&t.t[1]), conj(&t.t[2]), conj(&t.t[3])],
    })
}

/// Solves `g' = g·A(t)`, `g(1) = I`, backward by classical RK4 on `N` steps.
///
/// After each step the iterate is projected back onto `G` or `G^C`.
pub fn solve_gauge_ode_curve(
    ctx: &Arc<LieAlgebraContext>,
    a: &dyn MatrixCurve,
    intervals: usize,
    complexified: bool,
) -> GaugePath {
    let n = ctx.matrix_size();
    let h = 1.0 / intervals as f64;
    let tau = C64::new(-h, 0.0);
    let half = tau * 0.5;
    let mut values = vec![CMat::zeros(n, n); intervals + 1];
    let mut g = linalg::identity(n);
    values[intervals] = g.clone();
    for k in (0..intervals).rev() {
        let t = (k + 1) as f64 * h;
        let a0 = a.value(t);
        let am = a.value(t - 0.5 * h);
        let a1 = a.value(t - h);
        let k1 = &g * &a0;
        let k2 = (&g + &k1 * half) * &am;
        let k3 = (&g + &k2 * half) * &am;
        let k4 = (&g + &k3 * tau) * &a1;
        g += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (tau / 6.0);
        g = ctx.reproject(&g, complexified);
        values[k] = g.clone();
    }
    let kind = if complexified {
        PathKind::ComplexGroup
    } else {
        PathKind::Group
    };
    GaugePath::from_values_unchecked(ctx, kind, values)
}

/// [`solve_gauge_ode_curve`] with `A` interpolated from its grid samples.
pub fn solve_gauge_ode(a: &GaugePath) -> Result<GaugePath> {
    if a.kind().is_group() {
        return Err(Error::MalformedInput(
            "gauge ODE needs an algebra-valued path".into(),
        ));
    }
    Ok(solve_gauge_ode_curve(
        a.context(),
        a,
        a.intervals(),
        a.kind().is_complex(),
    ))
}

/// Integrates the three Nahm equations forward from `t = 0` with RK4,
/// treating `T0` as given data.
pub fn nahm_integrate_curve(
    initial: [&AlgebraElement; 3],
    t0: &dyn MatrixCurve,
    intervals: usize,
    bound: f64,
) -> Result<NahmConfiguration> {
    let ctx = initial[0].context().clone();
    for x in &initial[1..] {
        crate::lie::same_context(&ctx, x.context())?;
    }
    let rhs = |a: &CMat, y: &[CMat; 3]| -> [CMat; 3] {
        [
            -(commutator(a, &y[0]) + commutator(&y[1], &y[2])),
            -(commutator(a, &y[1]) + commutator(&y[2], &y[0])),
            -(commutator(a, &y[2]) + commutator(&y[0], &y[1])),
        ]
    };
    let axpy = |y: &[CMat; 3], k: &[CMat; 3], s: f64| -> [CMat; 3] {
        let s = C64::new(s, 0.0);
        [&y[0] + &k[0] * s, &y[1] + &k[1] * s, &y[2] + &k[2] * s]
    };
    let h = 1.0 / intervals as f64;
    let mut y = initial.map(|x| x.matrix().clone());
    let mut paths: [Vec<CMat>; 3] = [vec![y[0].clone()], vec![y[1].clone()], vec![y[2].clone()]];
    let mut t0_values = vec![t0.value(0.0)];
    for k in 0..intervals {
        let t = k as f64 * h;
        let a0 = t0.value(t);
        let am = t0.value(t + 0.5 * h);
        let a1 = t0.value(t + h);
        let k1 = rhs(&a0, &y);
        let k2 = rhs(&am, &axpy(&y, &k1, 0.5 * h));
        let k3 = rhs(&am, &axpy(&y, &k2, 0.5 * h));
        let k4 = rhs(&a1, &axpy(&y, &k3, h));
        for j in 0..3 {
            y[j] +=
                (&k1[j] + (&k2[j] + &k3[j]) * C64::new(2.0, 0.0) + &k4[j]) * C64::new(h / 6.0, 0.0);
        }
        let norm = y.iter().map(linalg::frobenius).fold(0.0, f64::max);
        if !norm.is_finite() || norm > bound {
            return Err(Error::BlowupDetected {
                t: t + h,
                norm,
                bound,
            });
        }
        for j in 0..3 {
            paths[j].push(y[j].clone());
        }
        t0_values.push(a1);
    }
    let [p1, p2, p3] = paths.map(|v| GaugePath::from_values_unchecked(&ctx, PathKind::Algebra, v));
    NahmConfiguration::new([
        GaugePath::from_values_unchecked(&ctx, PathKind::Algebra, t0_values),
        p1,
        p2,
        p3,
    ])
}

/// [`nahm_integrate_curve`] on the grid of a sampled `T0`.
pub fn nahm_integrate(
    initial: [&AlgebraElement; 3],
    t0: &GaugePath,
    bound: f64,
) -> Result<NahmConfiguration> {
    let mut out = nahm_integrate_curve(initial, t0, t0.intervals(), bound)?;
    out.t[0] = t0.clone();
    Ok(out)
}

/// Smooth gauge `g(t) = exp(φ₁(t)X₁)·exp(φ₂(t)X₂)·exp(φ₃(t)X₃)` with random
/// `X_k` of norm at most `amplitude`.
///
/// With `pinned` the profiles vanish at both ends, so `g` lies in the
/// based gauge group `𝒢₀`; otherwise `g(0) = I` and `g(1)` is generic.
pub fn random_smooth_gauge<R: Rng + ?Sized>(
    ctx: &Arc<LieAlgebraContext>,
    rng: &mut R,
    intervals: usize,
    amplitude: f64,
    pinned: bool,
) -> Result<GaugePath> {
    let xs: Vec<CMat> = (0..3)
        .map(|_| random_algebra_element(ctx, rng, amplitude).matrix().clone())
        .collect();
    let profiles: [fn(f64) -> f64; 3] = if pinned {
        [
            |t| (std::f64::consts::PI * t).sin(),
            |t| 4.0 * t * (1.0 - t),
            |t| t * t * (1.0 - t),
        ]
    } else {
        [|t| t, |t| (0.5 * std::f64::consts::PI * t).sin(), |t| t * t]
    };
    GaugePath::from_fn(ctx, PathKind::Group, intervals, |t| {
        let mut g = linalg::identity(ctx.matrix_size());
        for (x, phi) in xs.iter().zip(profiles) {
            g *= linalg::expm(&(x * C64::new(phi(t), 0.0)));
        }
        ctx.reproject(&g, false)
    })
}
