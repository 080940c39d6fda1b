//! Adapted complexification of compact groups and their homogeneous spaces.
//!
//! Tangent vectors are left-trivialized, `TG ≅ G × g`. The map
//! `φ(a, v) = a·exp(iv)` identifies the tube with `G^C`, and for `G/H` the
//! map `ψ(a, v) = a·exp(iv)·H^C` (with `v ∈ m`) lands in `G^C/H^C`.
//!
//! Leaf maps take an explicit complex parameter `w`; the convention is
//! `w = t + i s`, where `t` moves along the geodesic and `s` along the
//! fibre, so a leaf is holomorphic when `∂_s c = i ∂_t c`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::{
    project_h, same_context, AlgebraElement, GroupElement, LieAlgebraContext, SubgroupModel,
};
use crate::linalg::{self, CMat, C64, I};

/// Point `(a, v)` of the left-trivialized tangent bundle.
#[derive(Debug, Clone)]
pub struct TangentPoint {
    base: GroupElement,
    vector: AlgebraElement,
}

impl TangentPoint {
    pub fn new(base: GroupElement, vector: AlgebraElement) -> Result<Self> {
        same_context(base.context(), vector.context())?;
        Ok(Self { base, vector })
    }

    /// Tangent point of `G/H`; the vector must lie in `m`.
    pub fn new_homogeneous(base: GroupElement, vector: AlgebraElement) -> Result<Self> {
        let h_part = project_h(&vector)?.norm();
        if h_part > vector.context().tolerance() * (1.0 + vector.norm()) {
            return Err(Error::VectorNotInM(h_part));
        }
        Self::new(base, vector)
    }

    pub fn base(&self) -> &GroupElement {
        &self.base
    }

    pub fn vector(&self) -> &AlgebraElement {
        &self.vector
    }

    pub fn context(&self) -> &Arc<LieAlgebraContext> {
        self.base.context()
    }

    /// Left translation `g·(a, v) = (g a, v)`.
    pub fn left_translate(&self, g: &GroupElement) -> Result<Self> {
        Ok(Self {
            base: g.mul(&self.base)?,
            vector: self.vector.clone(),
        })
    }

    /// Right action of `h ∈ H` on representatives: `(a h⁻¹, Ad_h v)`.
    ///
    /// Both points describe the same tangent vector of `G/H`, and
    /// [`psi_map`] sends them to the same coset.
    pub fn h_action(&self, h: &GroupElement) -> Result<Self> {
        let vector = crate::lie::adjoint(h, &self.vector)?;
        Ok(Self {
            base: self.base.mul(&h.inverse())?,
            vector,
        })
    }
}

/// Membership predicate for the complexified isotropy group `H^C`.
pub type Membership = Arc<dyn Fn(&CMat) -> bool + Send + Sync>;

/// Default predicate from a subgroup model with a relative tolerance.
pub fn membership_from_model(model: SubgroupModel, tol: f64) -> Membership {
    Arc::new(move |z: &CMat| model.contains(z, tol))
}

/// Point `z·H^C` of `G^C/H^C`.
#[derive(Clone)]
pub struct CosetPoint {
    representative: GroupElement,
    membership: Membership,
}

impl fmt::Debug for CosetPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CosetPoint({:?})", self.representative)
    }
}

impl CosetPoint {
    pub fn new(representative: GroupElement, membership: Membership) -> Self {
        Self {
            representative,
            membership,
        }
    }

    /// Coset using the context's configured `H^C` model.
    pub fn from_context(representative: GroupElement) -> Result<Self> {
        let ctx = representative.context().clone();
        let model = ctx
            .subgroup_model()
            .cloned()
            .ok_or_else(|| Error::NoSplitConfigured(ctx.name().to_string()))?;
        Ok(Self::new(
            representative,
            membership_from_model(model, 1e-9),
        ))
    }

    pub fn representative(&self) -> &GroupElement {
        &self.representative
    }

    /// `p ≡ q` iff `rep(p)⁻¹ rep(q) ∈ H^C`.
    pub fn same_coset(&self, other: &Self) -> Result<bool> {
        same_context(
            self.representative.context(),
            other.representative.context(),
        )?;
        let inv = linalg::inverse(self.representative.matrix())?;
        Ok((self.membership)(&(inv * other.representative.matrix())))
    }

    /// Left action `g·(z H^C) = (g z) H^C`.
    pub fn left_translate(&self, g: &GroupElement) -> Result<Self> {
        Ok(Self {
            representative: g.mul(&self.representative)?,
            membership: Arc::clone(&self.membership),
        })
    }
}

/// Left-trivializes a matrix tangent vector `w` at `a`: returns `(a, a⁻¹w)`.
pub fn trivialize(a: &GroupElement, w: &CMat) -> Result<TangentPoint> {
    let ctx = a.context();
    let x = a.inverse().matrix() * w;
    let (coeffs, residual) = ctx.coordinates(&x);
    if residual > 1e-8 * (1.0 + linalg::frobenius(&x)) {
        return Err(Error::NotTangent(residual));
    }
    TangentPoint::new(a.clone(), AlgebraElement::from_coeffs(ctx, coeffs)?)
}

/// `φ(a, v) = a·exp(iv) ∈ G^C`.
pub fn phi_map(p: &TangentPoint) -> GroupElement {
    let m = p.base.matrix() * crate::lie::exp_i(&p.vector);
    GroupElement::from_parts_unchecked(p.context(), m, true)
}

/// Inverse of [`phi_map`] by polar decomposition `z = a·P`, `P = exp(iv)`.
pub fn phi_inverse(z: &GroupElement) -> Result<TangentPoint> {
    let ctx = z.context();
    let (u, p) = linalg::polar(z.matrix())?;
    let log_p = linalg::hermitian_log(&p);
    let v = AlgebraElement::from_matrix(ctx, &(log_p * (-I)))?;
    let base = GroupElement::new(ctx, u)?;
    TangentPoint::new(base, v)
}

/// Recovers `v` from a known base: `v = −i·log(a⁻¹ z)` on the principal branch.
pub fn phi_inverse_with_base(a: &GroupElement, z: &GroupElement) -> Result<TangentPoint> {
    let ctx = a.context();
    let q = a.inverse().matrix() * z.matrix();
    let log = linalg::logm(&q)?;
    let v = AlgebraElement::from_matrix(ctx, &(log * (-I))).map_err(|_| {
        Error::LogBranchFailure("a⁻¹z is not of the form exp(iv) with v in the algebra".into())
    })?;
    TangentPoint::new(a.clone(), v)
}

/// `ψ(a, v) = a·exp(iv)·H^C` for `v ∈ m`.
pub fn psi_map(p: &TangentPoint) -> Result<CosetPoint> {
    let h_part = project_h(&p.vector)?.norm();
    if h_part > p.context().tolerance() * (1.0 + p.vector.norm()) {
        return Err(Error::VectorNotInM(h_part));
    }
    CosetPoint::from_context(phi_map(p))
}

/// Complexified geodesic `w ↦ a·exp(wX)`, holomorphic in `w = t + i s`.
pub fn leaf_map(a: &GroupElement, x: &AlgebraElement, w: C64) -> Result<GroupElement> {
    same_context(a.context(), x.context())?;
    let m = a.matrix() * linalg::expm(&(x.matrix() * w));
    let complexified = w.im != 0.0;
    Ok(GroupElement::from_parts_unchecked(
        a.context(),
        m,
        complexified,
    ))
}

/// Leaf in `G^C/H^C` through `a` in the direction `Y ∈ m`.
pub fn coset_leaf_map(a: &GroupElement, y: &AlgebraElement, w: C64) -> Result<CosetPoint> {
    let h_part = project_h(y)?.norm();
    if h_part > y.context().tolerance() * (1.0 + y.norm()) {
        return Err(Error::VectorNotInM(h_part));
    }
    CosetPoint::from_context(leaf_map(a, y, w)?)
}

/// Central-difference Cauchy–Riemann residual `‖∂_s c − i ∂_t c‖` of a
/// vector-valued map `c(t, s)` at `(t, s)` with step `h`.
pub fn cr_residual(c: impl Fn(f64, f64) -> Vec<C64>, t: f64, s: f64, h: f64) -> f64 {
    let ds: Vec<C64> = c(t, s + h)
        .into_iter()
        .zip(c(t, s - h))
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect();
    let dt: Vec<C64> = c(t + h, s)
        .into_iter()
        .zip(c(t - h, s))
        .map(|(p, m)| (p - m) / (2.0 * h))
        .collect();
    ds.iter()
        .zip(&dt)
        .map(|(a, b)| (a - I * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Holomorphic affine chart on `G^C/H^C` for block-diagonal `H^C`.
///
/// The coset `z H^C` is determined by the column spans of the blocks of
/// `z`. For each block the chart picks, at a reference point, the rows with
/// the best-conditioned square minor `M` and records `Z_b M⁻¹` on the other
/// rows. The coordinates depend holomorphically on `z` and are constant on
/// cosets.
#[derive(Debug, Clone)]
pub struct CosetChart {
    blocks: Vec<(usize, usize)>,
    pivots: Vec<Vec<usize>>,
    n: usize,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl CosetChart {
    /// Chart adapted to the coset of `reference`.
    pub fn at(reference: &CMat, model: &SubgroupModel) -> Result<Self> {
        let n = reference.nrows();
        let sizes: Vec<usize> = match model {
            SubgroupModel::Trivial => {
                return Ok(Self {
                    blocks: vec![],
                    pivots: vec![],
                    n,
                })
            }
            SubgroupModel::Diagonal => vec![1; n],
            SubgroupModel::BlockDiagonal(b) => b.clone(),
        };
        if sizes.iter().sum::<usize>() != n {
            return Err(Error::MalformedInput(
                "block sizes do not match the matrix size".into(),
            ));
        }
        let mut blocks = Vec::new();
        let mut start = 0;
        for s in sizes {
            blocks.push((start, s));
            start += s;
        }
        let pivots = blocks
            .iter()
            .map(|&(c0, k)| {
                subsets(n, k)
                    .into_iter()
                    .max_by(|p, q| {
                        let det = |rows: &Vec<usize>| {
                            CMat::from_fn(k, k, |i, j| reference[(rows[i], c0 + j)])
                                .determinant()
                                .norm()
                        };
                        det(p).total_cmp(&det(q))
                    })
                    .expect("at least one row subset")
            })
            .collect();
        Ok(Self { blocks, pivots, n })
    }

    /// Holomorphic coordinates of the coset of `z`.
    pub fn coordinates(&self, z: &CMat) -> Result<Vec<C64>> {
        if self.blocks.is_empty() {
            return Ok(z.iter().copied().collect());
        }
        let mut out = Vec::new();
        for (&(c0, k), rows) in self.blocks.iter().zip(&self.pivots) {
            let minor = CMat::from_fn(k, k, |i, j| z[(rows[i], c0 + j)]);
            let inv = minor
                .try_inverse()
                .ok_or_else(|| Error::MalformedInput("coset chart minor is singular".into()))?;
            let block = z.columns(c0, k).into_owned();
            let normalized = block * inv;
            for r in 0..self.n {
                if !rows.contains(&r) {
                    out.extend(normalized.row(r).iter().copied());
                }
            }
        }
        Ok(out)
    }
}
