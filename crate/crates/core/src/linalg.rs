//! Dense complex matrix functions used by the Lie-group layer.
//!
//! The exponential is the scaling-and-squaring method with a degree-13
//! Padé core. The logarithm uses inverse scaling and squaring: repeated
//! principal square roots (Denman-Beavers) bring the argument close to the
//! identity, where the `atanh` (Gregory) series converges quickly.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Maximum absolute column sum.
pub fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    frobenius(&(a - b))
}

pub fn from_real(a: &DMatrix<f64>) -> CMat {
    a.map(|x| C64::new(x, 0.0))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::MalformedInput("singular matrix".into()))
}

fn solve(lhs: CMat, rhs: &CMat) -> CMat {
    lhs.lu()
        .solve(rhs)
        .expect("Padé denominator is nonsingular for scaled arguments")
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = norm1(a);
    if norm == 0.0 {
        return identity(n);
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(0.5f64.powi(s), 0.0);
    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = &scaled * (inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let inner_v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    let mut r = solve(&v - &u, &(&v + &u));
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Eigenvalues through the complex Schur form.
pub fn eigenvalues(a: &CMat) -> Vec<C64> {
    match a.clone().schur().eigenvalues() {
        Some(ev) => ev.iter().copied().collect(),
        None => Vec::new(),
    }
}

/// Principal square root via the product form of the Denman-Beavers iteration.
pub fn sqrtm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let id = identity(n);
    let mut m = a.clone();
    let mut y = a.clone();
    for _ in 0..100 {
        let m_inv = inverse(&m)?;
        let half = C64::new(0.5, 0.0);
        let next_y = &y * (&id + &m_inv) * half;
        let next_m = (&id * C64::new(2.0, 0.0) + &m + &m_inv) * C64::new(0.25, 0.0);
        let delta = dist(&next_m, &id);
        y = next_y;
        m = next_m;
        if delta < 1e-15 * (n as f64) {
            return Ok(y);
        }
    }
    Err(Error::LogBranchFailure(
        "square-root iteration did not converge".into(),
    ))
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Fails when an eigenvalue lies on the closed negative real axis.
pub fn logm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let scale = norm1(a).max(1.0);
    for ev in eigenvalues(a) {
        if ev.norm() <= 1e-14 * scale {
            return Err(Error::LogBranchFailure("matrix is singular".into()));
        }
        if ev.re < 0.0 && ev.im.abs() <= 1e-12 * ev.norm() {
            return Err(Error::LogBranchFailure(format!(
                "eigenvalue {ev} on the negative real axis"
            )));
        }
    }
    let id = identity(n);
    let mut x = a.clone();
    let mut k = 0;
    while norm1(&(&x - &id)) > 0.25 {
        x = sqrtm(&x)?;
        k += 1;
        if k > 60 {
            return Err(Error::LogBranchFailure("too many square roots".into()));
        }
    }
    // log(x) = 2 atanh(z), z = (x - I)(x + I)^{-1}
    let z = (&x - &id) * inverse(&(&x + &id))?;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    for j in 1..40 {
        term = &term * &z2;
        let contrib = &term * C64::new(1.0 / (2 * j + 1) as f64, 0.0);
        let size = norm1(&contrib);
        sum += contrib;
        if size < 1e-18 {
            break;
        }
    }
    Ok(sum * C64::new(2.0 * 2f64.powi(k), 0.0))
}

/// Hermitian eigendecomposition applied as a spectral function.
fn hermitian_function(h: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let hermitian = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(hermitian);
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| C64::new(f(l), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Polar decomposition `z = u p` with `u` unitary and `p` Hermitian positive-definite.
pub fn polar(z: &CMat) -> Result<(CMat, CMat)> {
    let p = hermitian_function(&(z.adjoint() * z), f64::sqrt);
    let u = z * inverse(&p)?;
    Ok((u, p))
}

/// Logarithm of a Hermitian positive-definite matrix.
pub fn hermitian_log(p: &CMat) -> CMat {
    hermitian_function(p, f64::ln)
}

/// Projects a nearly unitary matrix onto the unitary group (Newton-Schulz steps).
pub fn reunitarize(u: &CMat) -> CMat {
    let n = u.nrows();
    let id = identity(n);
    let mut x = u.clone();
    for _ in 0..3 {
        let err = &id - x.adjoint() * &x;
        if norm1(&err) < 1e-15 {
            break;
        }
        x = &x * (&id * C64::new(1.5, 0.0) - x.adjoint() * &x * C64::new(0.5, 0.0));
    }
    x
}

/// Rescales a matrix to unit determinant using the principal n-th root.
pub fn normalize_determinant(g: &CMat) -> CMat {
    let n = g.nrows();
    let det = g.determinant();
    if det.norm() == 0.0 {
        return g.clone();
    }
    let root = det.powf(1.0 / n as f64);
    g / root
}

/// Nearest complex-orthogonal matrix `g (gᵀg)^{-1/2}` for `g` close to the group.
pub fn reorthogonalize_complex(g: &CMat) -> CMat {
    let n = g.nrows();
    let id = identity(n);
    let e = g.transpose() * g - &id;
    let e2 = &e * &e;
    let correction = &id - &e * C64::new(0.5, 0.0) + &e2 * C64::new(0.375, 0.0)
        - &e2 * &e * C64::new(0.3125, 0.0);
    g * correction
}

/// `exp(s X)` for a fixed generator, with a spectral fast path for skew-Hermitian `X`.
#[derive(Debug, Clone)]
pub struct OneParameterSubgroup {
    generator: CMat,
    spectral: Option<(CMat, Vec<f64>)>,
}

impl OneParameterSubgroup {
    pub fn new(generator: CMat) -> Self {
        let skew =
            dist(&generator, &(-generator.adjoint())) <= 1e-14 * (1.0 + frobenius(&generator));
        let spectral = skew.then(|| {
            // X = -i H with H Hermitian, so exp(sX) = V diag(e^{-i s λ}) V†.
            let h = &generator * I;
            let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(h);
            (eig.eigenvectors, eig.eigenvalues.iter().copied().collect())
        });
        Self {
            generator,
            spectral,
        }
    }

    pub fn generator(&self) -> &CMat {
        &self.generator
    }

    pub fn at(&self, s: f64) -> CMat {
        match &self.spectral {
            Some((v, lambdas)) => {
                let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                    lambdas.len(),
                    lambdas.iter().map(|l| C64::from_polar(1.0, -s * l)),
                ));
                v * d * v.adjoint()
            }
            None => expm(&(&self.generator * C64::new(s, 0.0))),
        }
    }
}
