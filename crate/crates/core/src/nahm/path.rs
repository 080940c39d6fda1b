use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::LieAlgebraContext;
use crate::linalg::{self, CMat, C64};

/// What a path takes values in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    Group,
    Algebra,
    ComplexGroup,
    ComplexAlgebra,
}

impl PathKind {
    pub fn is_group(self) -> bool {
        matches!(self, PathKind::Group | PathKind::ComplexGroup)
    }

    pub fn is_complex(self) -> bool {
        matches!(self, PathKind::ComplexGroup | PathKind::ComplexAlgebra)
    }

    pub fn name(self) -> &'static str {
        match self {
            PathKind::Group => "group",
            PathKind::Algebra => "algebra",
            PathKind::ComplexGroup => "complex-group",
            PathKind::ComplexAlgebra => "complex-algebra",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "group" => Ok(PathKind::Group),
            "algebra" => Ok(PathKind::Algebra),
            "complex-group" => Ok(PathKind::ComplexGroup),
            "complex-algebra" => Ok(PathKind::ComplexAlgebra),
            other => Err(Error::Parse(format!("unknown path kind `{other}`"))),
        }
    }
}

/// A matrix-valued function on `[0, 1]`.
pub trait MatrixCurve: Sync {
    fn value(&self, t: f64) -> CMat;
}

impl<F: Fn(f64) -> CMat + Sync> MatrixCurve for F {
    fn value(&self, t: f64) -> CMat {
        self(t)
    }
}

/// Samples of a path on the uniform grid `t_k = k/N`, `k = 0..=N`.
#[derive(Debug, Clone)]
pub struct GaugePath {
    ctx: Arc<LieAlgebraContext>,
    kind: PathKind,
    values: Vec<CMat>,
}

const MEMBERSHIP_TOLERANCE: f64 = 1e-8;

impl GaugePath {
    /// Validated path; every node must lie in the space named by `kind`.
    pub fn from_values(
        ctx: &Arc<LieAlgebraContext>,
        kind: PathKind,
        values: Vec<CMat>,
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::MalformedInput(
                "a path needs at least two grid nodes".into(),
            ));
        }
        let n = ctx.matrix_size();
        for (k, m) in values.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::MalformedInput(format!(
                    "node {k} has the wrong shape"
                )));
            }
            let tol = MEMBERSHIP_TOLERANCE * (1.0 + linalg::frobenius(m));
            let ok = match kind {
                PathKind::Group => ctx.in_group(m, tol),
                PathKind::ComplexGroup => ctx.in_complex_group(m, tol),
                PathKind::Algebra => ctx.coordinates(m).1 <= tol,
                PathKind::ComplexAlgebra => ctx.complex_coordinates(m).1 <= tol,
            };
            if !ok {
                return Err(if kind.is_group() {
                    Error::NotInGroup(format!("path node {k}"))
                } else {
                    Error::ClosureViolation {
                        residual: ctx.coordinates(m).1,
                        tolerance: tol,
                    }
                });
            }
        }
        Ok(Self::from_values_unchecked(ctx, kind, values))
    }

    pub(crate) fn from_values_unchecked(
        ctx: &Arc<LieAlgebraContext>,
        kind: PathKind,
        values: Vec<CMat>,
    ) -> Self {
        Self {
            ctx: Arc::clone(ctx),
            kind,
            values,
        }
    }

    /// Samples `f` at the `N + 1` grid nodes.
    pub fn from_fn(
        ctx: &Arc<LieAlgebraContext>,
        kind: PathKind,
        intervals: usize,
        f: impl Fn(f64) -> CMat,
    ) -> Result<Self> {
        let values = grid(intervals).map(f).collect();
        Self::from_values(ctx, kind, values)
    }

    pub fn sample(
        ctx: &Arc<LieAlgebraContext>,
        kind: PathKind,
        intervals: usize,
        curve: &dyn MatrixCurve,
    ) -> Result<Self> {
        Self::from_fn(ctx, kind, intervals, |t| curve.value(t))
    }

    pub fn constant(
        ctx: &Arc<LieAlgebraContext>,
        kind: PathKind,
        intervals: usize,
        value: &CMat,
    ) -> Result<Self> {
        Self::from_values(ctx, kind, vec![value.clone(); intervals + 1])
    }

    /// Zero algebra path or identity group path.
    pub fn trivial(ctx: &Arc<LieAlgebraContext>, kind: PathKind, intervals: usize) -> Self {
        let n = ctx.matrix_size();
        let m = if kind.is_group() {
            linalg::identity(n)
        } else {
            CMat::zeros(n, n)
        };
        Self::from_values_unchecked(ctx, kind, vec![m; intervals + 1])
    }

    pub fn context(&self) -> &Arc<LieAlgebraContext> {
        &self.ctx
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    /// Number of grid intervals `N`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Number of grid nodes `N + 1`.
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.intervals() as f64
    }

    pub fn values(&self) -> &[CMat] {
        &self.values
    }

    pub fn value(&self, k: usize) -> &CMat {
        &self.values[k]
    }

    pub fn start(&self) -> &CMat {
        &self.values[0]
    }

    pub fn end(&self) -> &CMat {
        &self.values[self.intervals()]
    }

    pub(crate) fn check_grid(&self, other: &Self) -> Result<()> {
        crate::lie::same_context(&self.ctx, &other.ctx)?;
        if self.intervals() != other.intervals() {
            return Err(Error::GridMismatch(self.intervals(), other.intervals()));
        }
        Ok(())
    }

    /// Largest Frobenius norm over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(linalg::frobenius)
            .fold(0.0, f64::max)
    }

    /// Largest nodewise Frobenius distance.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| linalg::dist(a, b))
            .fold(0.0, f64::max))
    }

    /// Nodewise map that keeps the grid; the caller vouches for `kind`.
    pub(crate) fn map_unchecked(&self, kind: PathKind, f: impl Fn(usize, &CMat) -> CMat) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, m)| f(k, m))
            .collect();
        Self::from_values_unchecked(&self.ctx, kind, values)
    }

    /// Nodewise linear combination `a·self + b·other` of algebra paths.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_grid(other)?;
        if self.kind.is_group() || other.kind.is_group() {
            return Err(Error::MalformedInput(
                "linear combination of group-valued paths".into(),
            ));
        }
        let kind = if self.kind.is_complex() || other.kind.is_complex() {
            PathKind::ComplexAlgebra
        } else {
            PathKind::Algebra
        };
        let (a, b) = (C64::new(a, 0.0), C64::new(b, 0.0));
        Ok(self.map_unchecked(kind, |k, m| m * a + &other.values[k] * b))
    }

    /// Nodewise product `self(t)·other(t)` of group paths.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let kind = if self.kind.is_complex() || other.kind.is_complex() {
            PathKind::ComplexGroup
        } else {
            PathKind::Group
        };
        Ok(self.map_unchecked(kind, |k, m| m * &other.values[k]))
    }

    /// Derivative at every node.
    ///
    /// Fourth-order central differences in the interior and fourth-order
    /// one-sided stencils at the two nodes nearest each end; grids with
    /// fewer than four intervals fall back to second order.
    pub fn derivative(&self) -> Vec<CMat> {
        let n = self.intervals();
        let h = self.step();
        let f = &self.values;
        let lin = |terms: &[(f64, usize)], denom: f64| -> CMat {
            let mut acc = CMat::zeros(f[0].nrows(), f[0].ncols());
            for &(c, k) in terms {
                acc += &f[k] * C64::new(c, 0.0);
            }
            acc / C64::new(denom * h, 0.0)
        };
        if n == 1 {
            let d = lin(&[(-1.0, 0), (1.0, 1)], 1.0);
            return vec![d.clone(), d];
        }
        if n < 4 {
            return (0..=n)
                .map(|k| match k {
                    0 => lin(&[(-3.0, 0), (4.0, 1), (-1.0, 2)], 2.0),
                    k if k == n => lin(&[(3.0, n), (-4.0, n - 1), (1.0, n - 2)], 2.0),
                    k => lin(&[(-1.0, k - 1), (1.0, k + 1)], 2.0),
                })
                .collect();
        }
        (0..=n)
            .map(|k| match k {
                0 => lin(
                    &[(-25.0, 0), (48.0, 1), (-36.0, 2), (16.0, 3), (-3.0, 4)],
                    12.0,
                ),
                1 => lin(
                    &[(-3.0, 0), (-10.0, 1), (18.0, 2), (-6.0, 3), (1.0, 4)],
                    12.0,
                ),
                k if k == n => lin(
                    &[
                        (25.0, n),
                        (-48.0, n - 1),
                        (36.0, n - 2),
                        (-16.0, n - 3),
                        (3.0, n - 4),
                    ],
                    12.0,
                ),
                k if k == n - 1 => lin(
                    &[
                        (3.0, n),
                        (10.0, n - 1),
                        (-18.0, n - 2),
                        (6.0, n - 3),
                        (-1.0, n - 4),
                    ],
                    12.0,
                ),
                k => lin(
                    &[(1.0, k - 2), (-8.0, k - 1), (8.0, k + 1), (-1.0, k + 2)],
                    12.0,
                ),
            })
            .collect()
    }

    /// Derivative as a path; algebra paths stay algebra-valued.
    pub fn derivative_path(&self) -> Result<Self> {
        if self.kind.is_group() {
            return Err(Error::MalformedInput(
                "derivative of a group path is not group-valued".into(),
            ));
        }
        Ok(Self::from_values_unchecked(
            &self.ctx,
            self.kind,
            self.derivative(),
        ))
    }
}

/// Cubic Lagrange interpolation on the four nodes surrounding `t`.
impl MatrixCurve for GaugePath {
    fn value(&self, t: f64) -> CMat {
        let n = self.intervals();
        let h = self.step();
        if n < 3 {
            let j = ((t / h).floor() as usize).min(n - 1);
            let s = C64::new(t / h - j as f64, 0.0);
            return &self.values[j] * (C64::new(1.0, 0.0) - s) + &self.values[j + 1] * s;
        }
        let j = ((t / h).floor() as isize).clamp(1, n as isize - 2) as usize;
        let nodes = [j - 1, j, j + 1, j + 2];
        let mut acc = CMat::zeros(self.values[0].nrows(), self.values[0].ncols());
        for &a in &nodes {
            let mut w = 1.0;
            for &b in &nodes {
                if a != b {
                    w *= (t - b as f64 * h) / ((a as f64 - b as f64) * h);
                }
            }
            acc += &self.values[a] * C64::new(w, 0.0);
        }
        acc
    }
}

/// The grid nodes `k/N`.
pub fn grid(intervals: usize) -> impl Iterator<Item = f64> {
    (0..=intervals).map(move |k| k as f64 / intervals as f64)
}

/// Composite trapezoid rule for nodal values on the uniform grid.
pub fn trapezoid(samples: &[f64]) -> f64 {
    let n = samples.len() - 1;
    let h = 1.0 / n as f64;
    let interior: f64 = samples[1..n].iter().sum();
    h * (0.5 * (samples[0] + samples[n]) + interior)
}
