//! Curvature of the Kähler metric `h = 2i∂∂̄ρ` along the zero section.
//!
//! Components are written `K_{i j̄ k l̄}` and are related to the Riemann
//! tensor at the base point by `K_{i j̄ k l̄} = (R_{ijkl} + R_{ilkj}) / 6`.
//! With `2ρ_{αβ̄}(0) = δ_{αβ}` the real coordinate frame `∂x_i, ∂y_i` is
//! treated as orthonormal, so plane curvatures carry no norm denominators.

use std::fmt;

use serde::Serialize;

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};
use crate::jet::{ComplexJet, RealJet};
use crate::linalg::{CMat, C64};
use crate::ma::{wirtinger_antiholomorphic, wirtinger_holomorphic};

/// Complex rank-4 array `K_{i j̄ k l̄}` at the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerCurvatureAtZero {
    n: usize,
    k: Vec<C64>,
    source: Option<CurvatureTensor>,
}

impl KahlerCurvatureAtZero {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> Option<&CurvatureTensor> {
        self.source.as_ref()
    }

    /// `K_{i j̄ k l̄}`.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.k[((i * self.n + j) * self.n + k) * self.n + l]
    }

    pub fn max_imaginary(&self) -> f64 {
        self.k.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Largest `|K_{i j̄ k l̄} − conj K_{j ī l k̄}|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        worst =
                            worst.max((self.get(i, j, k, l) - self.get(j, i, l, k).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.k
            .iter()
            .zip(&other.k)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Curvature form on four complex vectors given in the frame
    /// `(∂z_1 … ∂z_n, ∂z̄_1 … ∂z̄_n)`.
    ///
    /// Only slot types `(1,0),(0,1)` in each pair contribute; the mixed
    /// orderings reduce to stored components through
    /// `K(a, b̄, c̄, d) = −K_{a b̄ d c̄}`, `K(ā, b, c, d̄) = −K_{b ā c d̄}` and
    /// `K(ā, b, c̄, d) = K_{b ā d c̄}`.
    pub fn evaluate(&self, x: &[C64], y: &[C64], z: &[C64], w: &[C64]) -> C64 {
        let n = self.n;
        let hol = |v: &[C64], a: usize| v[a];
        let anti = |v: &[C64], a: usize| v[n + a];
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let kabcd = self.get(a, b, c, d);
                        // (a, b̄, c, d̄)
                        acc += hol(x, a) * anti(y, b) * hol(z, c) * anti(w, d) * kabcd;
                        // (a, b̄, c̄, d) = −K_{a b̄ d c̄}
                        acc -=
                            hol(x, a) * anti(y, b) * anti(z, c) * hol(w, d) * self.get(a, b, d, c);
                        // (ā, b, c, d̄) = −K_{b ā c d̄}
                        acc -=
                            anti(x, a) * hol(y, b) * hol(z, c) * anti(w, d) * self.get(b, a, c, d);
                        // (ā, b, c̄, d) = K_{b ā d c̄}
                        acc +=
                            anti(x, a) * hol(y, b) * anti(z, c) * hol(w, d) * self.get(b, a, d, c);
                    }
                }
            }
        }
        acc
    }

    /// Sectional curvature of the plane spanned by two real tangent vectors
    /// with components `(x_1 … x_n, y_1 … y_n)`.
    pub fn sectional_of_real_vectors(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let n = self.n;
        if u.len() != 2 * n || v.len() != 2 * n {
            return Err(Error::MalformedInput(format!(
                "real tangent vectors need {} components",
                2 * n
            )));
        }
        let to_complex = |r: &[f64]| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); 2 * n];
            for k in 0..n {
                out[k] = C64::new(r[k], r[n + k]);
                out[n + k] = C64::new(r[k], -r[n + k]);
            }
            out
        };
        let (cu, cv) = (to_complex(u), to_complex(v));
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let area = dot(u, u) * dot(v, v) - dot(u, v).powi(2);
        if area <= 1e-300 {
            return Err(Error::MalformedInput("vectors do not span a plane".into()));
        }
        Ok(self.evaluate(&cu, &cv, &cu, &cv).re / area)
    }
}

/// `K_{i j̄ k l̄}(0) = (R_{ijkl} + R_{ilkj}) / 6`.
pub fn k_components_at_zero(r: &CurvatureTensor) -> Result<KahlerCurvatureAtZero> {
    r.validate()?;
    let n = r.dimension();
    let mut k = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for l in 0..n {
                    k.push(C64::new(
                        (r.get(i, j, kk, l) + r.get(i, l, kk, j)) / 6.0,
                        0.0,
                    ));
                }
            }
        }
    }
    Ok(KahlerCurvatureAtZero {
        n,
        k,
        source: Some(r.clone()),
    })
}

/// Real 2-plane in the tangent space of the tube at a zero-section point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Plane {
    /// `∂x_i ∧ ∂y_j`, `i ≠ j`.
    XY(usize, usize),
    /// `∂x_i ∧ ∂x_j`, `i ≠ j`.
    XX(usize, usize),
    /// `∂y_i ∧ ∂y_j`, `i ≠ j`.
    YY(usize, usize),
    /// The complex line `∂x_i ∧ ∂y_i`.
    Holomorphic(usize),
}

impl Plane {
    pub fn indices(&self) -> (usize, usize) {
        match *self {
            Plane::XY(i, j) | Plane::XX(i, j) | Plane::YY(i, j) => (i, j),
            Plane::Holomorphic(i) => (i, i),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Plane::XY(..) => "x^y",
            Plane::XX(..) => "x^x",
            Plane::YY(..) => "y^y",
            Plane::Holomorphic(_) => "holomorphic",
        }
    }

    /// Spanning real vectors `(u, v)` in `(x, y)` components.
    pub fn vectors(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let e = |k: usize| {
            let mut v = vec![0.0; 2 * n];
            v[k] = 1.0;
            v
        };
        match *self {
            Plane::XY(i, j) => (e(i), e(n + j)),
            Plane::XX(i, j) => (e(i), e(j)),
            Plane::YY(i, j) => (e(n + i), e(n + j)),
            Plane::Holomorphic(i) => (e(i), e(n + i)),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let (i, j) = self.indices();
        for idx in [i, j] {
            if idx >= n {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    dimension: n,
                });
            }
        }
        if !matches!(self, Plane::Holomorphic(_)) && i == j {
            return Err(Error::EqualIndices(i));
        }
        Ok(())
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Plane::XY(i, j) => write!(f, "x{i}^y{j}"),
            Plane::XX(i, j) => write!(f, "x{i}^x{j}"),
            Plane::YY(i, j) => write!(f, "y{i}^y{j}"),
            Plane::Holomorphic(i) => write!(f, "x{i}^y{i}"),
        }
    }
}

/// Plane curvature from the components `K_{ij̄ij̄}`, `K_{ij̄jī}` and, for the
/// complex line, `K_{iīiī}`.
pub fn plane_from_components(k: &KahlerCurvatureAtZero, plane: Plane) -> Result<f64> {
    plane.check(k.dimension())?;
    let value = match plane {
        Plane::XY(i, j) => {
            let a = k.get(i, j, i, j);
            let b = k.get(i, j, j, i);
            -(a + b * 2.0 + a.conj())
        }
        Plane::XX(i, j) | Plane::YY(i, j) => {
            let a = k.get(i, j, i, j);
            let b = k.get(i, j, j, i);
            a - b * 2.0 + a.conj()
        }
        Plane::Holomorphic(i) => k.get(i, i, i, i) * -4.0,
    };
    Ok(value.re)
}

/// Sectional curvature of `h` on a coordinate plane at the base point.
pub fn sectional_plane(r: &CurvatureTensor, plane: Plane) -> Result<f64> {
    plane.check(r.dimension())?;
    plane_from_components(&k_components_at_zero(r)?, plane)
}

/// Evaluates `K = ρ_{ij̄kl̄} − Σ ρ^{νμ̄} ρ_{ikμ̄} ρ_{j̄l̄ν}` at the origin
/// from exact jet derivatives of a potential.
pub fn k_oracle_from_jet(rho: &RealJet) -> Result<KahlerCurvatureAtZero> {
    let nv = rho.nvars();
    if nv == 0 || !nv.is_multiple_of(2) {
        return Err(Error::MalformedInput(
            "potential jets need an even number of variables".into(),
        ));
    }
    let n = nv / 2;
    let rc = rho.to_complex();
    let d = |j: &ComplexJet, a: usize| wirtinger_holomorphic(j, a);
    let db = |j: &ComplexJet, a: usize| wirtinger_antiholomorphic(j, a);

    let first: Vec<ComplexJet> = (0..n).map(|a| d(&rc, a)).collect::<Result<_>>()?;
    let first_bar: Vec<ComplexJet> = (0..n).map(|a| db(&rc, a)).collect::<Result<_>>()?;

    // Hessian at 0: H_{αβ} = ρ_{αβ̄}; inverse P with Σ_β P_{αβ} H_{γβ} = δ.
    let h0 = CMat::from_fn(n, n, |a, b| {
        db(&first[a], b)
            .map(|j| j.constant_term())
            .unwrap_or_default()
    });
    let scale = h0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let smin = h0
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(scale > 0.0) || smin <= 1e-12 * scale {
        return Err(Error::DegenerateHessian);
    }
    let p = h0
        .transpose()
        .try_inverse()
        .ok_or(Error::DegenerateHessian)?;

    // ρ_{ikμ̄}(0) and ρ_{j̄l̄ν}(0).
    let mut hol_hol_anti = vec![C64::new(0.0, 0.0); n * n * n];
    let mut anti_anti_hol = vec![C64::new(0.0, 0.0); n * n * n];
    for i in 0..n {
        for k in 0..n {
            let dik = d(&first[i], k)?;
            let djl = db(&first_bar[i], k)?;
            for m in 0..n {
                hol_hol_anti[(i * n + k) * n + m] = db(&dik, m)?.constant_term();
                anti_anti_hol[(i * n + k) * n + m] = d(&djl, m)?.constant_term();
            }
        }
    }

    let mut out = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        let ri = &first[i];
        for j in 0..n {
            let rij = db(ri, j)?;
            for k in 0..n {
                let rijk = d(&rij, k)?;
                for l in 0..n {
                    let fourth = db(&rijk, l)?.constant_term();
                    let mut correction = C64::new(0.0, 0.0);
                    for nu in 0..n {
                        for mu in 0..n {
                            correction += p[(nu, mu)]
                                * hol_hol_anti[(i * n + k) * n + mu]
                                * anti_anti_hol[(j * n + l) * n + nu];
                        }
                    }
                    out.push(fourth - correction);
                }
            }
        }
    }
    Ok(KahlerCurvatureAtZero {
        n,
        k: out,
        source: None,
    })
}

/// Witness plane of negative curvature for a nonnegatively curved metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativePlaneWitness {
    pub plane: Plane,
    /// Curvature `−R_{ijij}/3` of the witness plane.
    pub value: f64,
}

/// Reports whether the tube metric necessarily has a negatively curved
/// plane at the base point: the curvature is not identically zero and some
/// coordinate sectional `R_{ijij}` is positive. The witness is the `x_i ∧ y_j`
/// plane over the most positively curved coordinate plane.
pub fn negative_plane_flag(r: &CurvatureTensor) -> (bool, Option<NegativePlaneWitness>) {
    if r.is_zero() {
        return (false, None);
    }
    let n = r.dimension();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let s = r.get(i, j, i, j);
                if s > 0.0 && best.is_none_or(|(_, _, b)| s > b) {
                    best = Some((i, j, s));
                }
            }
        }
    }
    match best {
        Some((i, j, s)) => (
            true,
            Some(NegativePlaneWitness {
                plane: Plane::XY(i, j),
                value: -s / 3.0,
            }),
        ),
        None => (false, None),
    }
}

/// All coordinate planes of an `n`-dimensional base, in table order.
pub fn coordinate_planes(n: usize) -> Vec<Plane> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(Plane::XY(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(Plane::XX(i, j));
            out.push(Plane::YY(i, j));
        }
    }
    out.extend((0..n).map(Plane::Holomorphic));
    out
}

/// One row of the plane-curvature comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureTableRow {
    pub i: usize,
    pub j: usize,
    pub plane: String,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_error: f64,
}

/// Compares closed-form plane curvatures with those of the jet oracle.
pub fn curvature_table(r: &CurvatureTensor, rho: &RealJet) -> Result<Vec<CurvatureTableRow>> {
    let closed = k_components_at_zero(r)?;
    let oracle = k_oracle_from_jet(rho)?;
    if oracle.dimension() != closed.dimension() {
        return Err(Error::MalformedInput(
            "potential and curvature tensor have different dimensions".into(),
        ));
    }
    coordinate_planes(r.dimension())
        .into_iter()
        .map(|plane| {
            let (i, j) = plane.indices();
            let c = plane_from_components(&closed, plane)?;
            let o = plane_from_components(&oracle, plane)?;
            Ok(CurvatureTableRow {
                i,
                j,
                plane: plane.kind().to_string(),
                closed_form: c,
                oracle: o,
                abs_error: (c - o).abs(),
            })
        })
        .collect()
}

/// CSV rendering with header `i,j,plane,closed_form,oracle,abs_error`.
pub fn table_to_csv(rows: &[CurvatureTableRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_components() {
        let k = k_components_at_zero(&CurvatureTensor::constant_curvature(2, 1.0)).unwrap();
        assert!((k.get(0, 1, 0, 1).re - 1.0 / 3.0).abs() < 1e-15);
        assert!((k.get(0, 1, 1, 0).re + 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn plane_index_errors() {
        let r = CurvatureTensor::zeros(2);
        assert_eq!(
            sectional_plane(&r, Plane::XY(1, 1)),
            Err(Error::EqualIndices(1))
        );
        assert!(sectional_plane(&r, Plane::Holomorphic(0)).is_ok());
        assert!(matches!(
            sectional_plane(&r, Plane::XX(0, 5)),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn labels() {
        assert_eq!(Plane::XY(0, 1).to_string(), "x0^y1");
        assert_eq!(Plane::Holomorphic(2).to_string(), "x2^y2");
    }
}
