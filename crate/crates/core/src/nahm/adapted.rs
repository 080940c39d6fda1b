use std::f64::consts::PI;

use super::equations::solve_gauge_ode_curve;
use super::path::{GaugePath, MatrixCurve, PathKind};
use crate::error::{Error, Result};
use crate::lie::{group_log, same_context, AlgebraElement, GroupElement};
use crate::linalg::{self, CMat, OneParameterSubgroup, C64, I};

/// A path `h` in `G` from `h(0) = a` to `h(1) = I`, with its connection
/// form `−h'(t) h(t)⁻¹`.
pub trait HPath: Sync {
    fn value(&self, t: f64) -> CMat;
    fn connection(&self, t: f64) -> CMat;
}

/// `h(t) = exp((1 − t) log a)`.
#[derive(Debug, Clone)]
pub struct GeodesicHPath {
    log_a: CMat,
    flow: OneParameterSubgroup,
}

impl GeodesicHPath {
    pub fn new(a: &GroupElement) -> Result<Self> {
        let log_a = group_log(a)?.matrix().clone();
        Ok(Self {
            flow: OneParameterSubgroup::new(log_a.clone()),
            log_a,
        })
    }
}

impl HPath for GeodesicHPath {
    fn value(&self, t: f64) -> CMat {
        self.flow.at(1.0 - t)
    }

    fn connection(&self, _t: f64) -> CMat {
        self.log_a.clone()
    }
}

/// `h(t) = exp((1 − t) log a)·exp(sin(πt) Y)`, a second path with the same
/// endpoints.
#[derive(Debug, Clone)]
pub struct TwistedHPath {
    geodesic: GeodesicHPath,
    y: CMat,
    twist: OneParameterSubgroup,
}

impl TwistedHPath {
    pub fn new(a: &GroupElement, y: &AlgebraElement) -> Result<Self> {
        same_context(a.context(), y.context())?;
        Ok(Self {
            geodesic: GeodesicHPath::new(a)?,
            y: y.matrix().clone(),
            twist: OneParameterSubgroup::new(y.matrix().clone()),
        })
    }
}

impl HPath for TwistedHPath {
    fn value(&self, t: f64) -> CMat {
        self.geodesic.value(t) * self.twist.at((PI * t).sin())
    }

    fn connection(&self, t: f64) -> CMat {
        let e = self.geodesic.value(t);
        let e_inv = e.adjoint();
        &self.geodesic.log_a - e * &self.y * e_inv * C64::new(PI * (PI * t).cos(), 0.0)
    }
}

/// The pair `(T0, T1) = (−h'h⁻¹, h v h⁻¹)` as exact functions of `t`.
pub struct EmbeddedTangent<'a> {
    path: &'a dyn HPath,
    v: CMat,
}

impl<'a> EmbeddedTangent<'a> {
    pub fn new(path: &'a dyn HPath, v: &AlgebraElement) -> Self {
        Self {
            path,
            v: v.matrix().clone(),
        }
    }

    pub fn t0(&self, t: f64) -> CMat {
        self.path.connection(t)
    }

    pub fn t1(&self, t: f64) -> CMat {
        let h = self.path.value(t);
        let h_inv = h.adjoint();
        h * &self.v * h_inv
    }

    /// `α = T0 + i T1`.
    pub fn alpha(&self) -> impl MatrixCurve + '_ {
        move |t: f64| self.t0(t) + self.t1(t) * I
    }
}

/// Samples the baby-Nahm pair of the tangent vector `(a, v)` on `N` intervals.
///
/// Without an explicit path, `h(t) = exp((1 − t) log a)` is used.
pub fn embed_tangent(
    a: &GroupElement,
    v: &AlgebraElement,
    h_path: Option<&dyn HPath>,
    intervals: usize,
) -> Result<(GaugePath, GaugePath)> {
    same_context(a.context(), v.context())?;
    let default;
    let path: &dyn HPath = match h_path {
        Some(p) => {
            let tol = 1e-8 * (1.0 + linalg::frobenius(a.matrix()));
            let n = a.context().matrix_size();
            if linalg::dist(&p.value(0.0), a.matrix()) > tol
                || linalg::dist(&p.value(1.0), &linalg::identity(n)) > tol
            {
                return Err(Error::MalformedInput(
                    "h path must run from a to the identity".into(),
                ));
            }
            p
        }
        None => {
            default = GeodesicHPath::new(a)?;
            &default
        }
    };
    let e = EmbeddedTangent::new(path, v);
    let ctx = a.context();
    Ok((
        GaugePath::from_fn(ctx, PathKind::Algebra, intervals, |t| e.t0(t))?,
        GaugePath::from_fn(ctx, PathKind::Algebra, intervals, |t| e.t1(t))?,
    ))
}

/// Recovers the adapted-complexification point `a·exp(iv)` from Nahm data:
/// solves `g' = g α` with `g(1) = I` for `α = T0 + i T1` and returns `g(0)⁻¹`.
pub fn roundtrip_adapted_with_path(
    a: &GroupElement,
    v: &AlgebraElement,
    path: &dyn HPath,
    intervals: usize,
) -> Result<GroupElement> {
    same_context(a.context(), v.context())?;
    let ctx = a.context();
    let e = EmbeddedTangent::new(path, v);
    let g = solve_gauge_ode_curve(ctx, &e.alpha(), intervals, true);
    GroupElement::new_complex(ctx, linalg::inverse(g.start())?)
}

/// [`roundtrip_adapted_with_path`] along `h(t) = exp((1 − t) log a)`.
pub fn roundtrip_adapted(
    a: &GroupElement,
    v: &AlgebraElement,
    intervals: usize,
) -> Result<GroupElement> {
    let path = GeodesicHPath::new(a)?;
    roundtrip_adapted_with_path(a, v, &path, intervals)
}
