//! Matrix models of compact Lie algebras, their groups and complexifications.
//!
//! A [`LieAlgebraContext`] fixes a basis of skew-Hermitian matrices, an
//! Ad-invariant inner product given on that basis, and optionally an
//! orthogonal reductive split `g = h ⊕ m` described by index masks. All
//! algebra and group elements carry a shared handle to their context.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64, I};

/// Default numerical tolerance for structural checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Shape of the complexified subgroup `H^C` used for coset equality.
#[derive(Debug, Clone, PartialEq)]
pub enum SubgroupModel {
    /// Only the identity (H trivial).
    Trivial,
    /// Diagonal matrices (maximal tori).
    Diagonal,
    /// Block-diagonal matrices with the given block sizes.
    BlockDiagonal(Vec<usize>),
}

impl SubgroupModel {
    pub fn contains(&self, z: &CMat, tol: f64) -> bool {
        let scale = 1.0 + linalg::frobenius(z);
        match self {
            SubgroupModel::Trivial => linalg::dist(z, &linalg::identity(z.nrows())) <= tol * scale,
            SubgroupModel::Diagonal => {
                let mut off = 0.0f64;
                for i in 0..z.nrows() {
                    for j in 0..z.ncols() {
                        if i != j {
                            off = off.max(z[(i, j)].norm());
                        }
                    }
                }
                off <= tol * scale
            }
            SubgroupModel::BlockDiagonal(blocks) => {
                let mut block_of = Vec::with_capacity(z.nrows());
                for (b, &size) in blocks.iter().enumerate() {
                    block_of.extend(std::iter::repeat_n(b, size));
                }
                if block_of.len() != z.nrows() {
                    return false;
                }
                let mut off = 0.0f64;
                for i in 0..z.nrows() {
                    for j in 0..z.ncols() {
                        if block_of[i] != block_of[j] {
                            off = off.max(z[(i, j)].norm());
                        }
                    }
                }
                off <= tol * scale
            }
        }
    }
}

/// Structural flags of the basis, used for group-membership tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BasisShape {
    traceless: bool,
    real: bool,
    diagonal: bool,
}

#[derive(Debug, Clone)]
struct ReductiveSplit {
    h: Vec<usize>,
    m: Vec<usize>,
    subgroup: SubgroupModel,
}

/// Matrix model of a compact Lie algebra.
#[derive(Clone)]
pub struct LieAlgebraContext {
    name: String,
    matrix_size: usize,
    basis: Vec<CMat>,
    inner_product: DMatrix<f64>,
    split: Option<ReductiveSplit>,
    shape: BasisShape,
    tolerance: f64,
    real_gram_inv: DMatrix<f64>,
    complex_gram_inv: CMat,
}

impl fmt::Debug for LieAlgebraContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieAlgebraContext")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("matrix_size", &self.matrix_size)
            .field("split", &self.split.as_ref().map(|s| (&s.h, &s.m)))
            .finish()
    }
}

impl LieAlgebraContext {
    /// Builds a context and verifies every structural invariant.
    ///
    /// The basis must consist of linearly independent skew-Hermitian
    /// matrices closed under the commutator; the inner product must be
    /// symmetric positive-definite and Ad-invariant.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<CMat>,
        inner_product: DMatrix<f64>,
    ) -> Result<Self> {
        let name = name.into();
        let dim = basis.len();
        if dim == 0 {
            return Err(Error::InvalidContext("empty basis".into()));
        }
        let matrix_size = basis[0].nrows();
        if basis
            .iter()
            .any(|b| b.nrows() != matrix_size || b.ncols() != matrix_size)
        {
            return Err(Error::InvalidContext(
                "basis matrices differ in size".into(),
            ));
        }
        if inner_product.nrows() != dim || inner_product.ncols() != dim {
            return Err(Error::InvalidContext(format!(
                "inner product must be {dim}x{dim}"
            )));
        }
        for b in &basis {
            if linalg::dist(b, &(-b.adjoint())) > DEFAULT_TOLERANCE {
                return Err(Error::InvalidContext(
                    "basis matrices must be skew-Hermitian (compact real form)".into(),
                ));
            }
        }

        let mut real_gram = DMatrix::<f64>::zeros(dim, dim);
        let mut complex_gram = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let t = (basis[i].adjoint() * &basis[j]).trace();
                real_gram[(i, j)] = t.re;
                complex_gram[(i, j)] = t;
            }
        }
        let real_gram_inv = real_gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidContext("basis is linearly dependent".into()))?;
        let complex_gram_inv = complex_gram.try_inverse().ok_or_else(|| {
            Error::InvalidContext("basis is dependent over the complex numbers".into())
        })?;

        let shape = BasisShape {
            traceless: basis.iter().all(|b| b.trace().norm() <= DEFAULT_TOLERANCE),
            real: basis
                .iter()
                .all(|b| b.iter().all(|z| z.im.abs() <= DEFAULT_TOLERANCE)),
            diagonal: basis.iter().all(|b| {
                (0..matrix_size).all(|i| {
                    (0..matrix_size).all(|j| i == j || b[(i, j)].norm() <= DEFAULT_TOLERANCE)
                })
            }),
        };

        let ctx = Self {
            name,
            matrix_size,
            basis,
            inner_product,
            split: None,
            shape,
            tolerance: DEFAULT_TOLERANCE,
            real_gram_inv,
            complex_gram_inv,
        };
        ctx.check_inner_product()?;
        ctx.check_closure()?;
        ctx.check_ad_invariance()?;
        Ok(ctx)
    }

    /// Attaches an orthogonal reductive split `g = h ⊕ m` given by basis indices.
    pub fn with_split(mut self, h: Vec<usize>, subgroup: SubgroupModel) -> Result<Self> {
        let dim = self.dimension();
        if h.iter().any(|&k| k >= dim) {
            return Err(Error::InvalidContext("h-mask index out of range".into()));
        }
        let mut h = h;
        h.sort_unstable();
        h.dedup();
        let m: Vec<usize> = (0..dim).filter(|k| !h.contains(k)).collect();
        for &a in &h {
            for &b in &m {
                if self.inner_product[(a, b)].abs() > self.tolerance {
                    return Err(Error::InvalidContext(format!(
                        "h and m are not orthogonal: <e{a}, e{b}> = {}",
                        self.inner_product[(a, b)]
                    )));
                }
            }
        }
        self.split = Some(ReductiveSplit { h, m, subgroup });
        self.check_reductive()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    pub fn inner_product_matrix(&self) -> &DMatrix<f64> {
        &self.inner_product
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn has_split(&self) -> bool {
        self.split.is_some()
    }

    pub fn h_indices(&self) -> Option<&[usize]> {
        self.split.as_ref().map(|s| s.h.as_slice())
    }

    pub fn m_indices(&self) -> Option<&[usize]> {
        self.split.as_ref().map(|s| s.m.as_slice())
    }

    pub fn subgroup_model(&self) -> Option<&SubgroupModel> {
        self.split.as_ref().map(|s| &s.subgroup)
    }

    pub fn is_abelian(&self) -> bool {
        let d = self.dimension();
        (0..d).all(|a| {
            (0..d).all(|b| {
                linalg::frobenius(&linalg::commutator(&self.basis[a], &self.basis[b]))
                    <= self.tolerance
            })
        })
    }

    /// Real coordinates of `m` in the basis, with the residual of the re-expansion.
    pub fn coordinates(&self, m: &CMat) -> (DVector<f64>, f64) {
        let d = self.dimension();
        let rhs = DVector::from_iterator(
            d,
            self.basis.iter().map(|b| {
                b.iter()
                    .zip(m.iter())
                    .map(|(x, y)| (x.conj() * y).re)
                    .sum::<f64>()
            }),
        );
        let coeffs = &self.real_gram_inv * rhs;
        let residual = linalg::dist(&self.combine(&coeffs), m);
        (coeffs, residual)
    }

    /// Complex coordinates of `m` in the complexified algebra, with the residual.
    pub fn complex_coordinates(&self, m: &CMat) -> (DVector<C64>, f64) {
        let d = self.dimension();
        let rhs = DVector::from_iterator(
            d,
            self.basis.iter().map(|b| {
                b.iter()
                    .zip(m.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum::<C64>()
            }),
        );
        let coeffs = &self.complex_gram_inv * rhs;
        let mut rebuilt = CMat::zeros(self.matrix_size, self.matrix_size);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            rebuilt += b * *c;
        }
        let residual = linalg::dist(&rebuilt, m);
        (coeffs, residual)
    }

    pub fn combine(&self, coeffs: &DVector<f64>) -> CMat {
        let mut out = CMat::zeros(self.matrix_size, self.matrix_size);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if *c != 0.0 {
                out += b * C64::new(*c, 0.0);
            }
        }
        out
    }

    /// Inner product of two algebra-valued matrices via their coordinates.
    pub fn inner(&self, x: &CMat, y: &CMat) -> f64 {
        let (cx, _) = self.coordinates(x);
        let (cy, _) = self.coordinates(y);
        self.inner_coords(&cx, &cy)
    }

    pub fn inner_coords(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.inner_product * y)[(0, 0)]
    }

    /// Whether `m` lies in the algebra within tolerance.
    pub fn contains(&self, m: &CMat) -> bool {
        let (_, residual) = self.coordinates(m);
        residual <= self.tolerance * (1.0 + linalg::frobenius(m))
    }

    /// Projection of an algebra matrix onto `h` along `m` (coordinate masking).
    pub fn project_h_matrix(&self, x: &CMat) -> Result<CMat> {
        let split = self
            .split
            .as_ref()
            .ok_or_else(|| Error::NoSplitConfigured(self.name.clone()))?;
        let (c, _) = self.complex_coordinates(x);
        let mut out = CMat::zeros(self.matrix_size, self.matrix_size);
        for &k in &split.h {
            out += &self.basis[k] * c[k];
        }
        Ok(out)
    }

    /// Membership of `z` in the compact group G modeled by the basis.
    pub fn in_group(&self, z: &CMat, tol: f64) -> bool {
        let n = self.matrix_size;
        if z.nrows() != n || z.ncols() != n {
            return false;
        }
        let unitary = linalg::dist(&(z.adjoint() * z), &linalg::identity(n)) <= tol;
        unitary && self.shape_constraints(z, tol)
    }

    /// Membership of `z` in the complexification G^C.
    pub fn in_complex_group(&self, z: &CMat, tol: f64) -> bool {
        let n = self.matrix_size;
        if z.nrows() != n || z.ncols() != n {
            return false;
        }
        if z.determinant().norm() <= tol {
            return false;
        }
        if self.shape.traceless
            && (z.determinant() - C64::new(1.0, 0.0)).norm()
                > tol * (1.0 + linalg::frobenius(z)).powi(n as i32)
        {
            return false;
        }
        if self.shape.real
            && linalg::dist(&(z.transpose() * z), &linalg::identity(n))
                > tol * (1.0 + linalg::frobenius(z)).powi(2)
        {
            return false;
        }
        if self.shape.diagonal {
            return SubgroupModel::Diagonal.contains(z, tol);
        }
        true
    }

    fn shape_constraints(&self, z: &CMat, tol: f64) -> bool {
        if self.shape.traceless && (z.determinant() - C64::new(1.0, 0.0)).norm() > tol {
            return false;
        }
        if self.shape.real && z.iter().any(|c| c.im.abs() > tol) {
            return false;
        }
        if self.shape.diagonal && !SubgroupModel::Diagonal.contains(z, tol) {
            return false;
        }
        true
    }

    /// Projects a matrix that drifted slightly off G (or G^C) back onto it.
    pub fn reproject(&self, z: &CMat, complexified: bool) -> CMat {
        let mut out = if complexified {
            if self.shape.real {
                linalg::reorthogonalize_complex(z)
            } else {
                z.clone()
            }
        } else {
            let mut u = linalg::reunitarize(z);
            if self.shape.real {
                u = u.map(|c| C64::new(c.re, 0.0));
            }
            u
        };
        if self.shape.traceless {
            out = linalg::normalize_determinant(&out);
        }
        out
    }

    fn structure_residual(&self, a: usize, b: usize) -> (DVector<f64>, f64) {
        let c = linalg::commutator(&self.basis[a], &self.basis[b]);
        self.coordinates(&c)
    }

    fn check_inner_product(&self) -> Result<()> {
        let q = &self.inner_product;
        if linalg::frobenius(&linalg::from_real(&(q - q.transpose()))) > self.tolerance {
            return Err(Error::InvalidContext(
                "inner product is not symmetric".into(),
            ));
        }
        if q.clone().cholesky().is_none() {
            return Err(Error::InvalidContext(
                "inner product is not positive-definite".into(),
            ));
        }
        Ok(())
    }

    fn check_closure(&self) -> Result<()> {
        let d = self.dimension();
        for a in 0..d {
            for b in 0..d {
                let (_, residual) = self.structure_residual(a, b);
                if residual > self.tolerance {
                    return Err(Error::ClosureViolation {
                        residual,
                        tolerance: self.tolerance,
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest violation of ⟨[Z,X],Y⟩ + ⟨X,[Z,Y]⟩ = 0 over basis triples.
    pub fn ad_invariance_defect(&self) -> f64 {
        let d = self.dimension();
        let mut brackets = vec![vec![DVector::zeros(d); d]; d];
        for z in 0..d {
            for x in 0..d {
                brackets[z][x] = self.structure_residual(z, x).0;
            }
        }
        let unit = |k: usize| {
            let mut v = DVector::zeros(d);
            v[k] = 1.0;
            v
        };
        let mut worst = 0.0f64;
        for z in 0..d {
            for x in 0..d {
                for y in 0..d {
                    let lhs = self.inner_coords(&brackets[z][x], &unit(y))
                        + self.inner_coords(&unit(x), &brackets[z][y]);
                    worst = worst.max(lhs.abs());
                }
            }
        }
        worst
    }

    fn check_ad_invariance(&self) -> Result<()> {
        let defect = self.ad_invariance_defect();
        if defect > self.tolerance {
            return Err(Error::InvalidContext(format!(
                "inner product is not Ad-invariant (defect {defect:.3e})"
            )));
        }
        Ok(())
    }

    /// Largest h-component of [H, M] over basis pairs H ∈ h, M ∈ m.
    pub fn reductivity_defect(&self) -> Result<f64> {
        let split = self
            .split
            .as_ref()
            .ok_or_else(|| Error::NoSplitConfigured(self.name.clone()))?;
        let mut worst = 0.0f64;
        for &a in &split.h {
            for &b in &split.m {
                let (c, _) = self.structure_residual(a, b);
                for &k in &split.h {
                    worst = worst.max(c[k].abs());
                }
            }
        }
        Ok(worst)
    }

    fn check_reductive(&self) -> Result<()> {
        let defect = self.reductivity_defect()?;
        if defect > self.tolerance {
            return Err(Error::InvalidContext(format!(
                "[h, m] is not contained in m (defect {defect:.3e})"
            )));
        }
        Ok(())
    }
}

/// An element of the real Lie algebra, stored by coordinates and matrix.
#[derive(Clone)]
pub struct AlgebraElement {
    ctx: Arc<LieAlgebraContext>,
    coeffs: DVector<f64>,
    matrix: CMat,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "AlgebraElement[{}]({:?})",
            self.ctx.name,
            self.coeffs.as_slice()
        )
    }
}

impl AlgebraElement {
    pub fn from_coeffs(ctx: &Arc<LieAlgebraContext>, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != ctx.dimension() {
            return Err(Error::MalformedInput(format!(
                "expected {} coordinates, got {}",
                ctx.dimension(),
                coeffs.len()
            )));
        }
        let matrix = ctx.combine(&coeffs);
        Ok(Self {
            ctx: Arc::clone(ctx),
            coeffs,
            matrix,
        })
    }

    pub fn from_slice(ctx: &Arc<LieAlgebraContext>, coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(ctx, DVector::from_row_slice(coeffs))
    }

    /// Re-expands a matrix in the basis; fails with `ClosureViolation` off the algebra.
    pub fn from_matrix(ctx: &Arc<LieAlgebraContext>, m: &CMat) -> Result<Self> {
        let (coeffs, residual) = ctx.coordinates(m);
        let tolerance = ctx.tolerance * (1.0 + linalg::frobenius(m));
        if residual > tolerance {
            return Err(Error::ClosureViolation {
                residual,
                tolerance,
            });
        }
        Self::from_coeffs(ctx, coeffs)
    }

    pub fn zero(ctx: &Arc<LieAlgebraContext>) -> Self {
        Self::from_coeffs(ctx, DVector::zeros(ctx.dimension())).expect("dimension matches")
    }

    pub fn basis_vector(ctx: &Arc<LieAlgebraContext>, k: usize) -> Result<Self> {
        if k >= ctx.dimension() {
            return Err(Error::IndexOutOfRange {
                index: k,
                dimension: ctx.dimension(),
            });
        }
        let mut c = DVector::zeros(ctx.dimension());
        c[k] = 1.0;
        Self::from_coeffs(ctx, c)
    }

    pub fn context(&self) -> &Arc<LieAlgebraContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        same_context(&self.ctx, &other.ctx)?;
        Ok(self.ctx.inner_coords(&self.coeffs, &other.coeffs))
    }

    pub fn norm(&self) -> f64 {
        self.ctx.inner_coords(&self.coeffs, &self.coeffs).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_coeffs(&self.ctx, &self.coeffs * s).expect("dimension matches")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_context(&self.ctx, &other.ctx)?;
        Self::from_coeffs(&self.ctx, &self.coeffs + &other.coeffs)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_context(&self.ctx, &other.ctx)?;
        Self::from_coeffs(&self.ctx, &self.coeffs - &other.coeffs)
    }

    /// `i·X` as an element of the complexified algebra.
    pub fn times_i(&self) -> ComplexAlgebraElement {
        ComplexAlgebraElement::from_coeffs(&self.ctx, self.coeffs.map(|c| C64::new(0.0, c)))
            .expect("dimension matches")
    }

    pub fn complexify(&self) -> ComplexAlgebraElement {
        ComplexAlgebraElement::from_coeffs(&self.ctx, self.coeffs.map(|c| C64::new(c, 0.0)))
            .expect("dimension matches")
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::dist(&self.matrix, &other.matrix)
    }
}

/// An element of the complexified algebra g^C = g ⊕ i g.
#[derive(Clone)]
pub struct ComplexAlgebraElement {
    ctx: Arc<LieAlgebraContext>,
    coeffs: DVector<C64>,
    matrix: CMat,
}

impl fmt::Debug for ComplexAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ComplexAlgebraElement[{}]({:?})",
            self.ctx.name,
            self.coeffs.as_slice()
        )
    }
}

impl ComplexAlgebraElement {
    pub fn from_coeffs(ctx: &Arc<LieAlgebraContext>, coeffs: DVector<C64>) -> Result<Self> {
        if coeffs.len() != ctx.dimension() {
            return Err(Error::MalformedInput(format!(
                "expected {} coordinates, got {}",
                ctx.dimension(),
                coeffs.len()
            )));
        }
        let mut matrix = CMat::zeros(ctx.matrix_size, ctx.matrix_size);
        for (c, b) in coeffs.iter().zip(&ctx.basis) {
            matrix += b * *c;
        }
        Ok(Self {
            ctx: Arc::clone(ctx),
            coeffs,
            matrix,
        })
    }

    pub fn from_matrix(ctx: &Arc<LieAlgebraContext>, m: &CMat) -> Result<Self> {
        let (coeffs, residual) = ctx.complex_coordinates(m);
        let tolerance = ctx.tolerance * (1.0 + linalg::frobenius(m));
        if residual > tolerance {
            return Err(Error::ClosureViolation {
                residual,
                tolerance,
            });
        }
        Self::from_coeffs(ctx, coeffs)
    }

    /// `re + i·im` from two real algebra elements.
    pub fn from_parts(re: &AlgebraElement, im: &AlgebraElement) -> Result<Self> {
        same_context(&re.ctx, &im.ctx)?;
        let coeffs = re.coeffs.zip_map(&im.coeffs, C64::new);
        Self::from_coeffs(&re.ctx, coeffs)
    }

    pub fn context(&self) -> &Arc<LieAlgebraContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn real_part(&self) -> AlgebraElement {
        AlgebraElement::from_coeffs(&self.ctx, self.coeffs.map(|c| c.re))
            .expect("dimension matches")
    }

    pub fn imag_part(&self) -> AlgebraElement {
        AlgebraElement::from_coeffs(&self.ctx, self.coeffs.map(|c| c.im))
            .expect("dimension matches")
    }
}

/// Something that exponentiates into the group or its complexification.
pub trait Exponentiable {
    fn context(&self) -> &Arc<LieAlgebraContext>;
    fn generator(&self) -> &CMat;
    fn is_complexified(&self) -> bool;
}

impl Exponentiable for AlgebraElement {
    fn context(&self) -> &Arc<LieAlgebraContext> {
        &self.ctx
    }
    fn generator(&self) -> &CMat {
        &self.matrix
    }
    fn is_complexified(&self) -> bool {
        false
    }
}

impl Exponentiable for ComplexAlgebraElement {
    fn context(&self) -> &Arc<LieAlgebraContext> {
        &self.ctx
    }
    fn generator(&self) -> &CMat {
        &self.matrix
    }
    fn is_complexified(&self) -> bool {
        self.coeffs.iter().any(|c| c.im != 0.0)
    }
}

/// A point of the compact group G or of its complexification G^C.
#[derive(Clone)]
pub struct GroupElement {
    ctx: Arc<LieAlgebraContext>,
    matrix: CMat,
    complexified: bool,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.complexified { "G^C" } else { "G" };
        write!(
            f,
            "GroupElement[{} in {kind}]({})",
            self.ctx.name, self.matrix
        )
    }
}

impl GroupElement {
    /// Wraps a matrix of the compact group, checking membership.
    pub fn new(ctx: &Arc<LieAlgebraContext>, matrix: CMat) -> Result<Self> {
        let tol = 1e-8 * (ctx.matrix_size as f64);
        if !ctx.in_group(&matrix, tol) {
            return Err(Error::NotInGroup(format!(
                "matrix is not in the compact group of `{}`",
                ctx.name
            )));
        }
        Ok(Self {
            ctx: Arc::clone(ctx),
            matrix,
            complexified: false,
        })
    }

    /// Wraps a matrix of the complexified group, checking membership.
    pub fn new_complex(ctx: &Arc<LieAlgebraContext>, matrix: CMat) -> Result<Self> {
        let tol = 1e-8 * (ctx.matrix_size as f64);
        if !ctx.in_complex_group(&matrix, tol) {
            return Err(Error::NotInGroup(format!(
                "matrix is not in the complexified group of `{}`",
                ctx.name
            )));
        }
        Ok(Self {
            ctx: Arc::clone(ctx),
            matrix,
            complexified: true,
        })
    }

    pub(crate) fn from_parts_unchecked(
        ctx: &Arc<LieAlgebraContext>,
        matrix: CMat,
        complexified: bool,
    ) -> Self {
        Self {
            ctx: Arc::clone(ctx),
            matrix,
            complexified,
        }
    }

    pub fn identity(ctx: &Arc<LieAlgebraContext>) -> Self {
        Self::from_parts_unchecked(ctx, linalg::identity(ctx.matrix_size), false)
    }

    pub fn context(&self) -> &Arc<LieAlgebraContext> {
        &self.ctx
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn is_complexified(&self) -> bool {
        self.complexified
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_context(&self.ctx, &other.ctx)?;
        Ok(Self::from_parts_unchecked(
            &self.ctx,
            &self.matrix * &other.matrix,
            self.complexified || other.complexified,
        ))
    }

    pub fn inverse(&self) -> Self {
        let inv = if self.complexified {
            linalg::inverse(&self.matrix).expect("group elements are invertible")
        } else {
            self.matrix.adjoint()
        };
        Self::from_parts_unchecked(&self.ctx, inv, self.complexified)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        linalg::dist(&self.matrix, &other.matrix)
    }
}

pub(crate) fn same_context(a: &Arc<LieAlgebraContext>, b: &Arc<LieAlgebraContext>) -> Result<()> {
    if Arc::ptr_eq(a, b)
        || (a.name == b.name && a.dimension() == b.dimension() && a.matrix_size == b.matrix_size)
    {
        Ok(())
    } else {
        Err(Error::ContextMismatch(a.name.clone(), b.name.clone()))
    }
}

/// Lie bracket `XY − YX`, re-expanded in the basis.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    same_context(&x.ctx, &y.ctx)?;
    AlgebraElement::from_matrix(&x.ctx, &linalg::commutator(&x.matrix, &y.matrix))
}

/// Group exponential of a real or complexified algebra element.
pub fn group_exp(x: &impl Exponentiable) -> GroupElement {
    GroupElement::from_parts_unchecked(
        x.context(),
        linalg::expm(x.generator()),
        x.is_complexified(),
    )
}

/// Principal logarithm of a compact-group element, projected to the algebra.
pub fn group_log(a: &GroupElement) -> Result<AlgebraElement> {
    let log = linalg::logm(&a.matrix)?;
    let (coeffs, residual) = a.ctx.coordinates(&log);
    if residual > 1e-8 * (1.0 + linalg::frobenius(&log)) {
        return Err(Error::LogBranchFailure(format!(
            "principal logarithm leaves the algebra (residual {residual:.3e})"
        )));
    }
    AlgebraElement::from_coeffs(&a.ctx, coeffs)
}

/// Principal logarithm in the complexified algebra.
pub fn group_log_complex(a: &GroupElement) -> Result<ComplexAlgebraElement> {
    let log = linalg::logm(&a.matrix)?;
    let (coeffs, residual) = a.ctx.complex_coordinates(&log);
    if residual > 1e-8 * (1.0 + linalg::frobenius(&log)) {
        return Err(Error::LogBranchFailure(format!(
            "principal logarithm leaves the complexified algebra (residual {residual:.3e})"
        )));
    }
    ComplexAlgebraElement::from_coeffs(&a.ctx, coeffs)
}

/// Adjoint action `g X g⁻¹` of the compact group.
pub fn adjoint(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    same_context(&g.ctx, &x.ctx)?;
    let m = &g.matrix * &x.matrix * g.inverse().matrix;
    AlgebraElement::from_matrix(&x.ctx, &m)
}

/// Adjoint action of G^C on the complexified algebra.
pub fn adjoint_complex(
    g: &GroupElement,
    x: &ComplexAlgebraElement,
) -> Result<ComplexAlgebraElement> {
    same_context(&g.ctx, &x.ctx)?;
    let m = &g.matrix * &x.matrix * g.inverse().matrix;
    ComplexAlgebraElement::from_matrix(&x.ctx, &m)
}

fn masked(x: &AlgebraElement, keep: &[usize]) -> AlgebraElement {
    let mut c = DVector::zeros(x.coeffs.len());
    for &k in keep {
        c[k] = x.coeffs[k];
    }
    AlgebraElement::from_coeffs(&x.ctx, c).expect("dimension matches")
}

/// Orthogonal projection onto h.
pub fn project_h(x: &AlgebraElement) -> Result<AlgebraElement> {
    let split = x
        .ctx
        .split
        .as_ref()
        .ok_or_else(|| Error::NoSplitConfigured(x.ctx.name.clone()))?;
    Ok(masked(x, &split.h))
}

/// Orthogonal projection onto m.
pub fn project_m(x: &AlgebraElement) -> Result<AlgebraElement> {
    let split = x
        .ctx
        .split
        .as_ref()
        .ok_or_else(|| Error::NoSplitConfigured(x.ctx.name.clone()))?;
    Ok(masked(x, &split.m))
}

/// Random algebra element with uniformly distributed norm in `[0, max_norm]`.
pub fn random_algebra_element<R: Rng + ?Sized>(
    ctx: &Arc<LieAlgebraContext>,
    rng: &mut R,
    max_norm: f64,
) -> AlgebraElement {
    let d = ctx.dimension();
    loop {
        let c = DVector::from_iterator(d, (0..d).map(|_| rng.gen_range(-1.0..1.0)));
        let x = AlgebraElement::from_coeffs(ctx, c).expect("dimension matches");
        let n = x.norm();
        if n > 1e-3 {
            let r = rng.gen_range(0.0..=max_norm);
            return x.scale(r / n);
        }
    }
}

/// Random element of m (requires a split).
pub fn random_m_element<R: Rng + ?Sized>(
    ctx: &Arc<LieAlgebraContext>,
    rng: &mut R,
    max_norm: f64,
) -> Result<AlgebraElement> {
    let m = ctx
        .m_indices()
        .ok_or_else(|| Error::NoSplitConfigured(ctx.name.clone()))?
        .to_vec();
    loop {
        let mut c = DVector::zeros(ctx.dimension());
        for &k in &m {
            c[k] = rng.gen_range(-1.0..1.0);
        }
        let x = AlgebraElement::from_coeffs(ctx, c)?;
        let n = x.norm();
        if n > 1e-3 {
            let r = rng.gen_range(0.0..=max_norm);
            return Ok(x.scale(r / n));
        }
    }
}

/// Random group element `exp(X)` with `‖X‖ ≤ max_norm`.
pub fn random_group_element<R: Rng + ?Sized>(
    ctx: &Arc<LieAlgebraContext>,
    rng: &mut R,
    max_norm: f64,
) -> GroupElement {
    group_exp(&random_algebra_element(ctx, rng, max_norm))
}

/// `exp(i v)` as a matrix, for compact-algebra `v`.
pub fn exp_i(v: &AlgebraElement) -> CMat {
    linalg::expm(&(v.matrix() * I))
}
