//! Riemann curvature tensors at a point and metric charts around it.
//!
//! Slot convention: `R(X,Y,Z,W) = g(R(X,Y)W, Z)` with
//! `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, so `R_{ijij}` is the sectional
//! curvature of the orthonormal plane `(∂_i, ∂_j)` and the round unit sphere
//! has `R_{1212} = 1`. Every formula imported from elsewhere is re-indexed
//! into this convention inside [`curvature_from_chart`].
//!
//! Indices are zero-based throughout the API.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, JetMatrix, Monomial};

/// Symmetry tolerance relative to the largest component.
const SYMMETRY_TOL: f64 = 1e-9;

/// Rank-4 curvature tensor `R_{ijkl}` in an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    /// Wraps raw components (row-major in `i, j, k, l`) after validating them.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n.pow(4) {
            return Err(Error::MalformedInput(format!(
                "expected {} components for dimension {n}, got {}",
                n.pow(4),
                data.len()
            )));
        }
        let r = Self { n, data };
        r.validate()?;
        Ok(r)
    }

    fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n.pow(4)],
        }
    }

    /// Space form of constant sectional curvature `kappa`.
    pub fn constant_curvature(n: usize, kappa: f64) -> Self {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Self::from_fn(n, |i, j, k, l| {
            kappa * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
        })
    }

    /// Gauss-equation tensor `h_ik h_jl − h_il h_jk` of a hypersurface with
    /// second fundamental form `h`; nonnegatively curved when `h` is semidefinite.
    pub fn gauss(h: &DMatrix<f64>) -> Result<Self> {
        let n = h.nrows();
        if h.ncols() != n || (h - h.transpose()).amax() > SYMMETRY_TOL * (1.0 + h.amax()) {
            return Err(Error::MalformedInput(
                "second fundamental form must be a symmetric square matrix".into(),
            ));
        }
        let r = Self::from_fn(n, |i, j, k, l| {
            h[(i, k)] * h[(j, l)] - h[(i, l)] * h[(j, k)]
        });
        r.validate()?;
        Ok(r)
    }

    /// Random algebraic curvature tensor with largest component `scale`.
    ///
    /// Noise is antisymmetrized in both pairs, symmetrized under pair
    /// exchange and projected onto the kernel of the Bianchi map.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> Self {
        loop {
            let noise: Vec<f64> = (0..n.pow(4)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let raw = Self { n, data: noise };
            let anti = Self::from_fn(n, |i, j, k, l| {
                raw.get(i, j, k, l) - raw.get(j, i, k, l) - raw.get(i, j, l, k)
                    + raw.get(j, i, l, k)
            });
            let paired = Self::from_fn(n, |i, j, k, l| anti.get(i, j, k, l) + anti.get(k, l, i, j));
            let projected = Self::from_fn(n, |i, j, k, l| {
                paired.get(i, j, k, l)
                    - (paired.get(i, j, k, l) + paired.get(i, k, l, j) + paired.get(i, l, j, k))
                        / 3.0
            });
            let m = projected.max_abs();
            if m < 1e-6 {
                continue;
            }
            let r = projected.scaled(scale / m);
            if r.validate().is_ok() {
                return r;
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, k, l)]
    }

    pub fn components(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest violation of the algebraic curvature identities.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(i, k, l, j) + self.get(i, l, j, k)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Checks antisymmetry, pair exchange and the first Bianchi identity.
    pub fn validate(&self) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::SymmetryViolation("non-finite component".into()));
        }
        let defect = self.symmetry_defect();
        if defect > SYMMETRY_TOL * (1.0 + self.max_abs()) {
            return Err(Error::SymmetryViolation(format!(
                "largest identity defect {defect:.3e}"
            )));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::IndexOutOfRange {
                index: i,
                dimension: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Sectional curvature `R_{ijij}` of the coordinate plane `(∂_i, ∂_j)`.
    pub fn sectional(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::EqualIndices(i));
        }
        Ok(self.get(i, j, i, j))
    }

    /// Independent components `R_{ijkl}` with `i < j`, `k < l`, `(i,j) ≤ (k,l)`.
    pub fn independent_components(&self) -> Vec<([usize; 4], f64)> {
        let pairs: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .collect();
        let mut out = Vec::new();
        for (a, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[a..] {
                out.push(([i, j, k, l], self.get(i, j, k, l)));
            }
        }
        out
    }

    /// Rebuilds a tensor from its independent components.
    pub fn from_independent(n: usize, comps: &[([usize; 4], f64)]) -> Result<Self> {
        let mut r = Self::zeros(n);
        for &([i, j, k, l], v) in comps {
            for idx in [i, j, k, l] {
                r.check_index(idx)?;
            }
            if i >= j || k >= l || (i, j) > (k, l) {
                return Err(Error::MalformedInput(format!(
                    "component ({i},{j},{k},{l}) is not in canonical order"
                )));
            }
            for (a, b, c, d, s) in [
                (i, j, k, l, 1.0),
                (j, i, k, l, -1.0),
                (i, j, l, k, -1.0),
                (j, i, l, k, 1.0),
            ] {
                let o1 = r.offset(a, b, c, d);
                let o2 = r.offset(c, d, a, b);
                r.data[o1] = s * v;
                r.data[o2] = s * v;
            }
        }
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> Result<String> {
        let rec = TensorRecord {
            dimension: self.n,
            convention: CONVENTION.to_string(),
            components: self
                .independent_components()
                .into_iter()
                .map(|(index, value)| ComponentRecord { index, value })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&rec)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: TensorRecord = serde_json::from_str(s)?;
        let comps: Vec<_> = rec.components.iter().map(|c| (c.index, c.value)).collect();
        Self::from_independent(rec.dimension, &comps)
    }

    /// Text form: a `dimension n` header followed by `i j k l value` rows.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {CONVENTION}\ndimension {}\n", self.n);
        for ([i, j, k, l], v) in self.independent_components() {
            s.push_str(&format!("{i} {j} {k} {l} {v:e}\n"));
        }
        s
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty curvature text".into()))?;
        let n: usize = header
            .strip_prefix("dimension")
            .map(str::trim)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header `{header}`")))?;
        let mut comps = Vec::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 {
                return Err(Error::Parse(format!("bad component row `{line}`")));
            }
            let mut idx = [0usize; 4];
            for (slot, t) in idx.iter_mut().zip(&toks[..4]) {
                *slot = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index `{t}`")))?;
            }
            let v: f64 = toks[4]
                .parse()
                .map_err(|_| Error::Parse(format!("bad value `{}`", toks[4])))?;
            comps.push((idx, v));
        }
        Self::from_independent(n, &comps)
    }
}

const CONVENTION: &str = "R(X,Y,Z,W) = g(R(X,Y)W, Z)";

#[derive(Serialize, Deserialize)]
struct TensorRecord {
    dimension: usize,
    convention: String,
    components: Vec<ComponentRecord>,
}

#[derive(Serialize, Deserialize)]
struct ComponentRecord {
    index: [usize; 4],
    value: f64,
}

/// Sectional curvature of the coordinate plane `(∂_i, ∂_j)`.
pub fn sectional(r: &CurvatureTensor, i: usize, j: usize) -> Result<f64> {
    r.sectional(i, j)
}

/// A metric `x ↦ g_ij(x)` on a neighbourhood of the origin.
pub trait MetricChart: Sync {
    fn dimension(&self) -> usize;
    fn metric(&self, x: &[f64]) -> DMatrix<f64>;
}

/// Euclidean metric.
#[derive(Debug, Clone, Copy)]
pub struct FlatChart(pub usize);

impl MetricChart for FlatChart {
    fn dimension(&self) -> usize {
        self.0
    }
    fn metric(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.0, self.0)
    }
}

/// Chart from an arbitrary closure.
pub struct FnChart<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> DMatrix<f64> + Sync> FnChart<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(&[f64]) -> DMatrix<f64> + Sync> MetricChart for FnChart<F> {
    fn dimension(&self) -> usize {
        self.n
    }
    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        (self.f)(x)
    }
}

/// Matrix-valued polynomial metric in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    entries: JetMatrix<f64>,
}

impl MetricJet {
    pub fn dimension(&self) -> usize {
        self.entries.size()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Jet<f64> {
        self.entries.get(i, j)
    }

    pub fn matrix(&self) -> &JetMatrix<f64> {
        &self.entries
    }
}

impl MetricChart for MetricJet {
    fn dimension(&self) -> usize {
        self.entries.size()
    }
    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dimension();
        DMatrix::from_fn(n, n, |i, j| self.entries.get(i, j).eval(x))
    }
}

/// Quadratic form `Q_ij(x) = Σ_pq R_{ipjq} x_p x_q`.
fn curvature_quadratic(r: &CurvatureTensor, x: &[f64]) -> DMatrix<f64> {
    let n = r.dimension();
    DMatrix::from_fn(n, n, |i, j| {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += r.get(i, p, j, q) * x[p] * x[q];
            }
        }
        s
    })
}

/// Degree-2 metric jet `g_ij = δ_ij − ⅓ Σ_pq R_{ipjq} x_p x_q` in normal coordinates.
pub fn normal_metric_jet(r: &CurvatureTensor) -> Result<MetricJet> {
    r.validate()?;
    let n = r.dimension();
    let entries = JetMatrix::from_fn(n, |i, j| {
        let mut jet = Jet::zero(n, 2);
        if i == j {
            jet.add_term(Monomial::one(n), 1.0);
        }
        for p in 0..n {
            for q in 0..n {
                let c = r.get(i, p, j, q);
                if c != 0.0 {
                    jet.add_term(Monomial::from_vars(n, &[p, q]), -c / 3.0);
                }
            }
        }
        jet
    });
    Ok(MetricJet { entries })
}

/// Round space form of curvature `kappa` in geodesic normal coordinates:
/// `g = s δ + (1 − s) x xᵀ / r²` with `s = (sn_κ(r)/r)²`.
#[derive(Debug, Clone, Copy)]
pub struct SpaceFormChart {
    pub n: usize,
    pub kappa: f64,
}

impl SpaceFormChart {
    /// Returns `(s, (1 − s)/r²)` as functions of `u = −κ r²`.
    fn profile(&self, r2: f64) -> (f64, f64) {
        let u = -self.kappa * r2;
        if u.abs() <= 1.0 {
            // f(u) = Σ u^k/(2k+1)!, s = f², (1 − s)/r² = κ (s − 1)/u.
            let terms = 24;
            let mut a = vec![0.0; terms];
            let mut fact = 1.0;
            for (k, slot) in a.iter_mut().enumerate() {
                if k > 0 {
                    fact *= ((2 * k) * (2 * k + 1)) as f64;
                }
                *slot = 1.0 / fact;
            }
            let c = |m: usize| (0..=m).map(|k| a[k] * a[m - k]).sum::<f64>();
            let mut s = 0.0;
            let mut s_minus_one_over_u = 0.0;
            let mut upow = 1.0;
            for m in 0..terms {
                let cm = c(m);
                s += cm * upow;
                if m + 1 < terms {
                    s_minus_one_over_u += c(m + 1) * upow;
                }
                upow *= u;
            }
            (s, self.kappa * s_minus_one_over_u)
        } else {
            let r = r2.sqrt();
            let sn = if self.kappa > 0.0 {
                let k = self.kappa.sqrt();
                (k * r).sin() / k
            } else {
                let k = (-self.kappa).sqrt();
                (k * r).sinh() / k
            };
            let s = (sn / r).powi(2);
            (s, (1.0 - s) / r2)
        }
    }
}

impl MetricChart for SpaceFormChart {
    fn dimension(&self) -> usize {
        self.n
    }
    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let (s, w) = self.profile(r2);
        DMatrix::from_fn(self.n, self.n, |i, j| {
            let d = if i == j { s } else { 0.0 };
            d + w * x[i] * x[j]
        })
    }
}

/// Positive-definite metric `exp(−⅓ Q(x))` sharing its 2-jet with
/// [`normal_metric_jet`] but carrying nonzero higher-order terms.
#[derive(Debug, Clone)]
pub struct ExponentialJetChart {
    r: CurvatureTensor,
}

impl ExponentialJetChart {
    pub fn new(r: &CurvatureTensor) -> Result<Self> {
        r.validate()?;
        Ok(Self { r: r.clone() })
    }
}

impl MetricChart for ExponentialJetChart {
    fn dimension(&self) -> usize {
        self.r.dimension()
    }
    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let q = curvature_quadratic(&self.r, x) * (-1.0 / 3.0);
        let q = (&q + q.transpose()) * 0.5;
        let eig = SymmetricEigen::new(q);
        let d = eig.eigenvalues.map(f64::exp);
        &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
    }
}

/// Accuracy order of the central-difference stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    fn weights(self) -> (&'static [i32], &'static [f64], f64) {
        match self {
            StencilOrder::Second => (&[-1, 1], &[-1.0, 1.0], 2.0),
            StencilOrder::Fourth => (&[-2, -1, 1, 2], &[1.0, -8.0, 8.0, -1.0], 12.0),
        }
    }
}

/// Finite-difference settings for [`curvature_from_chart`].
#[derive(Debug, Clone, Copy)]
pub struct FiniteDifference {
    pub step: f64,
    pub order: StencilOrder,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self {
            step: 1e-3,
            order: StencilOrder::Fourth,
        }
    }
}

struct MetricSampler<'a> {
    chart: &'a dyn MetricChart,
    n: usize,
}

impl MetricSampler<'_> {
    fn at(&self, coords: &[(usize, f64)]) -> Result<DMatrix<f64>> {
        let mut x = vec![0.0; self.n];
        for &(k, v) in coords {
            x[k] += v;
        }
        let g = self.chart.metric(&x);
        if g.nrows() != self.n || g.ncols() != self.n {
            return Err(Error::MalformedInput(
                "chart returned a wrongly sized metric".into(),
            ));
        }
        let sym = (&g + g.transpose()) * 0.5;
        if sym.cholesky().is_none() {
            return Err(Error::SingularMetric(x));
        }
        Ok(g)
    }
}

/// Curvature at the origin of a chart by central differences of the metric.
///
/// Computes `∂g` and `∂²g` at 0, the Christoffel symbols and their first
/// derivatives, and assembles
/// `R_{ijkl} = g_kp (∂_iΓ^p_jl − ∂_jΓ^p_il + Γ^m_jl Γ^p_im − Γ^m_il Γ^p_jm)`.
/// The output is the raw finite-difference tensor; it satisfies the
/// curvature identities only up to discretization error.
pub fn curvature_from_chart(
    chart: &dyn MetricChart,
    fd: FiniteDifference,
) -> Result<CurvatureTensor> {
    let n = chart.dimension();
    let h = fd.step;
    let s = MetricSampler { chart, n };
    let (offsets, w, denom) = fd.order.weights();

    let g0 = s.at(&[])?;
    let ginv = g0
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric(vec![0.0; n]))?;

    // dg[a] = ∂_a g, ddg[a][b] = ∂_a ∂_b g.
    let mut dg = vec![DMatrix::zeros(n, n); n];
    let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
    let mut samples: std::collections::HashMap<(usize, i32, usize, i32), DMatrix<f64>> =
        std::collections::HashMap::new();
    let mut sample = |a: usize, sa: i32, b: usize, sb: i32| -> Result<DMatrix<f64>> {
        let key = if (a, sa) <= (b, sb) {
            (a, sa, b, sb)
        } else {
            (b, sb, a, sa)
        };
        if let Some(m) = samples.get(&key) {
            return Ok(m.clone());
        }
        let m = s.at(&[(a, sa as f64 * h), (b, sb as f64 * h)])?;
        samples.insert(key, m.clone());
        Ok(m)
    };
    for a in 0..n {
        let mut acc = DMatrix::zeros(n, n);
        for (&o, &wt) in offsets.iter().zip(w) {
            acc += sample(a, o, a, 0)? * wt;
        }
        dg[a] = acc / (denom * h);
        let pure = match fd.order {
            StencilOrder::Second => {
                (sample(a, 1, a, 0)? - &g0 * 2.0 + sample(a, -1, a, 0)?) / (h * h)
            }
            StencilOrder::Fourth => {
                (sample(a, 2, a, 0)? * -1.0 + sample(a, 1, a, 0)? * 16.0 - &g0 * 30.0
                    + sample(a, -1, a, 0)? * 16.0
                    - sample(a, -2, a, 0)?)
                    / (12.0 * h * h)
            }
        };
        ddg[a][a] = pure;
        for b in 0..a {
            let mut acc = DMatrix::zeros(n, n);
            for (&oa, &wa) in offsets.iter().zip(w) {
                for (&ob, &wb) in offsets.iter().zip(w) {
                    acc += sample(a, oa, b, ob)? * (wa * wb);
                }
            }
            let m = acc / (denom * denom * h * h);
            ddg[a][b] = m.clone();
            ddg[b][a] = m;
        }
    }

    // Γ^p_jl and ∂_i Γ^p_jl.
    let idx3 = |p: usize, j: usize, l: usize| (p * n + j) * n + l;
    let mut gamma = vec![0.0; n * n * n];
    let mut dgamma = vec![0.0; n * n * n * n];
    let dginv: Vec<DMatrix<f64>> = (0..n).map(|i| -(&ginv * &dg[i] * &ginv)).collect();
    for p in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut gsum = 0.0;
                for m in 0..n {
                    let first = dg[j][(m, l)] + dg[l][(m, j)] - dg[m][(j, l)];
                    gsum += 0.5 * ginv[(p, m)] * first;
                }
                gamma[idx3(p, j, l)] = gsum;
                for i in 0..n {
                    let mut d = 0.0;
                    for m in 0..n {
                        let first = dg[j][(m, l)] + dg[l][(m, j)] - dg[m][(j, l)];
                        let second = ddg[i][j][(m, l)] + ddg[i][l][(m, j)] - ddg[i][m][(j, l)];
                        d += 0.5 * (dginv[i][(p, m)] * first + ginv[(p, m)] * second);
                    }
                    dgamma[i * n * n * n + idx3(p, j, l)] = d;
                }
            }
        }
    }

    let mut data = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for p in 0..n {
                        let mut inner = dgamma[i * n * n * n + idx3(p, j, l)]
                            - dgamma[j * n * n * n + idx3(p, i, l)];
                        for m in 0..n {
                            inner += gamma[idx3(m, j, l)] * gamma[idx3(p, i, m)]
                                - gamma[idx3(m, i, l)] * gamma[idx3(p, j, m)];
                        }
                        v += g0[(k, p)] * inner;
                    }
                    data.push(v);
                }
            }
        }
    }
    Ok(CurvatureTensor { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn sphere_components() {
        let r = CurvatureTensor::constant_curvature(2, 1.0);
        assert_eq!(r.get(0, 1, 0, 1), 1.0);
        assert_eq!(r.get(1, 0, 1, 0), 1.0);
        assert_eq!(r.get(0, 1, 1, 0), -1.0);
        assert_eq!(r.get(1, 0, 0, 1), -1.0);
        assert_eq!(r.get(0, 0, 0, 0), 0.0);
    }

    #[test]
    fn sectional_rejects_bad_planes() {
        let r = CurvatureTensor::zeros(2);
        assert_eq!(r.sectional(1, 1), Err(Error::EqualIndices(1)));
        assert!(matches!(
            r.sectional(0, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn new_rejects_asymmetric_data() {
        let mut data = vec![0.0; 16];
        data[1] = 1.0;
        assert!(matches!(
            CurvatureTensor::new(2, data),
            Err(Error::SymmetryViolation(_))
        ));
    }

    #[test]
    fn sphere_jet_entries() {
        let g = normal_metric_jet(&CurvatureTensor::constant_curvature(2, 1.0)).unwrap();
        assert!((g.entry(0, 0).coefficient_of(&[1, 1]) + 1.0 / 3.0).abs() < 1e-15);
        assert!((g.entry(1, 1).coefficient_of(&[0, 0]) + 1.0 / 3.0).abs() < 1e-15);
        assert!((g.entry(0, 1).coefficient_of(&[0, 1]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.entry(0, 0).constant_term(), 1.0);
    }

    #[test]
    fn random_tensor_passes_checks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 2..=4 {
            let r = CurvatureTensor::random(n, &mut rng, 1.0);
            assert!(r.validate().is_ok());
            assert!((r.max_abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn space_form_profile_is_continuous_across_branches() {
        let c = SpaceFormChart { n: 2, kappa: 1.0 };
        let (s1, w1) = c.profile(1.0 - 1e-12);
        let (s2, w2) = c.profile(1.0 + 1e-12);
        assert!((s1 - s2).abs() < 1e-10 && (w1 - w2).abs() < 1e-10);
    }

    #[test]
    fn serialization_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let r = CurvatureTensor::random(3, &mut rng, 2.0);
        let j = CurvatureTensor::from_json(&r.to_json().unwrap()).unwrap();
        let t = CurvatureTensor::from_text(&r.to_text()).unwrap();
        assert!(r.max_abs_difference(&j) < 1e-15);
        assert!(r.max_abs_difference(&t) < 1e-15);
    }
}
