//! Quartic expansion of the Monge–Ampère potential on a tangent bundle.
//!
//! Jets for the potential live in `2n` real variables: `x_1 … x_n` are
//! indices `0 … n-1` and the fibre coordinates `y_1 … y_n` are `n … 2n-1`.
//! The complex coordinates are `z_α = x_α + i y_α`, and the potential solves
//! `Σ_α ρ^α ρ_α = 2ρ` with `ρ^α = Σ_β ρ^{αβ̄} ρ_β̄`, where `(ρ^{αβ̄})` is the
//! inverse of `(ρ_{αβ̄})` in the sense `Σ_β ρ^{αβ̄} ρ_{γβ̄} = δ_{αγ}`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::curvature::CurvatureTensor;
use crate::error::{Error, Result};
use crate::jet::{ComplexJet, Jet, JetMatrix, Monomial, RealJet};
use crate::linalg::{CMat, C64};

/// Coefficient `c` in `ρ|_{x=0} = c·Σ y_i²`.
///
/// Every formula for the quartic expansion and for the Kähler curvature at
/// the zero section assumes `c = 1`.
pub const FIBER_NORMALIZATION: f64 = 1.0;

/// Default degree bound: two orders above the quartic terms, so the
/// leading residual of a quartic jet is visible.
pub const DEFAULT_MAX_DEGREE: u32 = 6;

/// Index of `x_k` among the `2n` real variables.
pub fn xvar(_n: usize, k: usize) -> usize {
    k
}

/// Index of `y_k` among the `2n` real variables.
pub fn yvar(n: usize, k: usize) -> usize {
    n + k
}

fn half_dimension(rho_nvars: usize) -> Result<usize> {
    if rho_nvars == 0 || !rho_nvars.is_multiple_of(2) {
        return Err(Error::MalformedInput(format!(
            "potential jets need an even, positive number of variables, got {rho_nvars}"
        )));
    }
    Ok(rho_nvars / 2)
}

/// `ρ = Σ y_i² − ⅓ Σ R_{ipjq} x_p x_q y_i y_j` with the default degree bound.
pub fn potential_expansion(r: &CurvatureTensor) -> Result<RealJet> {
    potential_expansion_with_degree(r, DEFAULT_MAX_DEGREE)
}

pub fn potential_expansion_with_degree(r: &CurvatureTensor, max_degree: u32) -> Result<RealJet> {
    r.validate()?;
    let n = r.dimension();
    let nv = 2 * n;
    let mut rho = Jet::zero(nv, max_degree);
    for i in 0..n {
        rho.add_term(
            Monomial::from_vars(nv, &[yvar(n, i), yvar(n, i)]),
            FIBER_NORMALIZATION,
        );
    }
    for i in 0..n {
        for p in 0..n {
            for j in 0..n {
                for q in 0..n {
                    let c = r.get(i, p, j, q);
                    if c != 0.0 {
                        rho.add_term(
                            Monomial::from_vars(
                                nv,
                                &[xvar(n, p), xvar(n, q), yvar(n, i), yvar(n, j)],
                            ),
                            -c / 3.0,
                        );
                    }
                }
            }
        }
    }
    Ok(rho)
}

/// `ρ_α = ½(∂_{x_α} − i ∂_{y_α}) ρ`.
pub fn wirtinger_holomorphic(rho: &ComplexJet, alpha: usize) -> Result<ComplexJet> {
    let n = half_dimension(rho.nvars())?;
    let dx = rho.derivative(xvar(n, alpha));
    let dy = rho.derivative(yvar(n, alpha));
    Ok((&dx - &dy.scale(C64::new(0.0, 1.0))).scale(C64::new(0.5, 0.0)))
}

/// `ρ_ᾱ = ½(∂_{x_α} + i ∂_{y_α}) ρ`.
pub fn wirtinger_antiholomorphic(rho: &ComplexJet, alpha: usize) -> Result<ComplexJet> {
    let n = half_dimension(rho.nvars())?;
    let dx = rho.derivative(xvar(n, alpha));
    let dy = rho.derivative(yvar(n, alpha));
    Ok((&dx + &dy.scale(C64::new(0.0, 1.0))).scale(C64::new(0.5, 0.0)))
}

/// Complex Hessian `H_{αβ} = ∂_{z_α} ∂_{z̄_β} ρ`.
pub fn complex_hessian(rho: &ComplexJet) -> Result<JetMatrix<C64>> {
    let n = half_dimension(rho.nvars())?;
    let bar: Vec<ComplexJet> = (0..n)
        .map(|b| wirtinger_antiholomorphic(rho, b))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in bar.iter() {
            entries.push(wirtinger_holomorphic(b, a)?);
        }
    }
    let mut it = entries.into_iter();
    Ok(JetMatrix::from_fn(n, |_, _| it.next().expect("n² entries")))
}

fn constant_inverse(m: &JetMatrix<C64>) -> Result<CMat> {
    let n = m.size();
    let c = CMat::from_row_slice(n, n, &m.constant_part());
    let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let svd = c.clone().svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if !(scale > 0.0) || smin <= 1e-12 * scale {
        return Err(Error::DegenerateHessian);
    }
    c.try_inverse().ok_or(Error::DegenerateHessian)
}

fn left_multiply(c: &CMat, m: &JetMatrix<C64>) -> JetMatrix<C64> {
    let n = m.size();
    JetMatrix::from_fn(n, |i, j| {
        let mut acc = m.get(0, j).scale(c[(i, 0)]);
        for k in 1..n {
            acc = &acc + &m.get(k, j).scale(c[(i, k)]);
        }
        acc
    })
}

fn right_multiply(m: &JetMatrix<C64>, c: &CMat) -> JetMatrix<C64> {
    let n = m.size();
    JetMatrix::from_fn(n, |i, j| {
        let mut acc = m.get(i, 0).scale(c[(0, j)]);
        for k in 1..n {
            acc = &acc + &m.get(i, k).scale(c[(k, j)]);
        }
        acc
    })
}

/// Inverse of a jet matrix with invertible constant part, by Neumann series.
pub fn invert_jet_matrix(m: &JetMatrix<C64>) -> Result<JetMatrix<C64>> {
    let c_inv = constant_inverse(m)?;
    let unipotent = left_multiply(&c_inv, m);
    let inv = unipotent.neumann_inverse_unipotent()?;
    Ok(right_multiply(&inv, &c_inv))
}

/// `ρ^{αβ̄}` as a jet matrix `P` with `Σ_β P_{αβ} H_{γβ} = δ_{αγ}`.
pub fn inverse_complex_hessian(rho: &ComplexJet) -> Result<JetMatrix<C64>> {
    invert_jet_matrix(&complex_hessian(rho)?.transpose())
}

/// Left-hand side `Σ_{αβ} ρ^{αβ̄} ρ_β̄ ρ_α` as a truncated complex jet.
pub fn ma_lhs(rho: &RealJet) -> Result<ComplexJet> {
    let n = half_dimension(rho.nvars())?;
    let rc = rho.to_complex();
    let p = inverse_complex_hessian(&rc)?;
    let hol: Vec<ComplexJet> = (0..n)
        .map(|a| wirtinger_holomorphic(&rc, a))
        .collect::<Result<_>>()?;
    let anti: Vec<ComplexJet> = (0..n)
        .map(|a| wirtinger_antiholomorphic(&rc, a))
        .collect::<Result<_>>()?;
    let mut lhs = Jet::zero(rc.nvars(), rc.max_degree());
    for a in 0..n {
        let mut upper = Jet::zero(rc.nvars(), rc.max_degree());
        for b in 0..n {
            upper = &upper + &(p.get(a, b) * &anti[b]);
        }
        lhs = &lhs + &(&upper * &hol[a]);
    }
    Ok(lhs)
}

/// `Σ_α ρ^α ρ_α − 2ρ` as a complex jet (its imaginary part is roundoff).
pub fn ma_residual_complex(rho: &RealJet) -> Result<ComplexJet> {
    let lhs = ma_lhs(rho)?;
    Ok(&lhs - &rho.to_complex().scale(C64::new(2.0, 0.0)))
}

/// `Σ_α ρ^α ρ_α − 2ρ` truncated at the degree bound of `rho`.
pub fn ma_residual(rho: &RealJet) -> Result<RealJet> {
    Ok(ma_residual_complex(rho)?.real_part())
}

/// Pointwise evaluator of the Monge–Ampère residual of a polynomial potential.
///
/// Treats `rho` as an exact polynomial, evaluates its first and second
/// derivatives at a point, inverts the complex Hessian numerically and
/// returns `|Σ ρ^α ρ_α − 2ρ|`.
#[derive(Debug, Clone)]
pub struct PointwiseResidual {
    n: usize,
    rho: RealJet,
    first: Vec<RealJet>,
    second: Vec<Vec<RealJet>>,
}

impl PointwiseResidual {
    pub fn new(rho: &RealJet) -> Result<Self> {
        let n = half_dimension(rho.nvars())?;
        let nv = 2 * n;
        let first: Vec<RealJet> = (0..nv).map(|k| rho.derivative(k)).collect();
        let second = (0..nv)
            .map(|a| (0..nv).map(|b| first[a].derivative(b)).collect())
            .collect();
        Ok(Self {
            n,
            rho: rho.clone(),
            first,
            second,
        })
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let n = self.n;
        let d1: Vec<f64> = self.first.iter().map(|j| j.eval(point)).collect();
        let d2 = |a: usize, b: usize| self.second[a][b].eval(point);
        let h = CMat::from_fn(n, n, |a, b| {
            let (xa, ya, xb, yb) = (xvar(n, a), yvar(n, a), xvar(n, b), yvar(n, b));
            C64::new(d2(xa, xb) + d2(ya, yb), d2(xa, yb) - d2(ya, xb)) * 0.25
        });
        let p = h
            .transpose()
            .try_inverse()
            .ok_or(Error::DegenerateHessian)?;
        let hol: Vec<C64> = (0..n)
            .map(|a| C64::new(d1[xvar(n, a)], -d1[yvar(n, a)]) * 0.5)
            .collect();
        let anti: Vec<C64> = hol.iter().map(|z| z.conj()).collect();
        let mut lhs = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                lhs += p[(a, b)] * anti[b] * hol[a];
            }
        }
        Ok((lhs - C64::new(2.0 * self.rho.eval(point), 0.0)).norm())
    }
}

/// Pointwise residual `|Σ ρ^α ρ_α − 2ρ|` at a real point of `ℝ^{2n}`.
pub fn ma_residual_at(rho: &RealJet, point: &[f64]) -> Result<f64> {
    PointwiseResidual::new(rho)?.eval(point)
}

/// Checks that `m = δ + a` with every `a_ij` homogeneous of degree 2.
fn check_unipotent_quadratic(m: &JetMatrix<f64>) -> Result<()> {
    let n = m.size();
    for i in 0..n {
        for j in 0..n {
            let e = m.get(i, j);
            let expected = if i == j { 1.0 } else { 0.0 };
            if e.constant_term() != expected {
                return Err(Error::MalformedInput(format!(
                    "entry ({i},{j}) has constant term {} instead of {expected}",
                    e.constant_term()
                )));
            }
            if e.terms()
                .any(|(mono, _)| mono.degree() != 0 && mono.degree() != 2)
            {
                return Err(Error::MalformedInput(format!(
                    "entry ({i},{j}) is not δ plus a homogeneous quadratic"
                )));
            }
        }
    }
    Ok(())
}

/// Inverse of `δ_ij + a_ij(y)` with `a_ij` homogeneous quadratics, truncated
/// at the entries' degree bound.
pub fn inverse_jet(m: &JetMatrix<f64>) -> Result<JetMatrix<f64>> {
    check_unipotent_quadratic(m)?;
    m.neumann_inverse_unipotent()
}

/// Closed form through degree 2: `δ_ij − a_ij`.
pub fn inverse_jet_closed_form(m: &JetMatrix<f64>) -> Result<JetMatrix<f64>> {
    check_unipotent_quadratic(m)?;
    let n = m.size();
    Ok(JetMatrix::from_fn(n, |i, j| {
        let e = m.get(i, j);
        let quad = e.homogeneous_part(2);
        let c = Jet::constant(e.nvars(), e.max_degree(), if i == j { 1.0 } else { 0.0 });
        &c - &quad
    }))
}

/// Quartic fibre coefficients `𝒜_{ijkl}` of the potential, stored for
/// non-decreasing index quadruples only; every other ordering reads as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticCoefficients {
    n: usize,
    a: BTreeMap<[usize; 4], f64>,
}

/// All non-decreasing quadruples `i ≤ j ≤ k ≤ l` in `0..n`.
pub fn ordered_quadruples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                for l in k..n {
                    out.push([i, j, k, l]);
                }
            }
        }
    }
    out
}

fn is_ordered(q: &[usize; 4]) -> bool {
    q[0] <= q[1] && q[1] <= q[2] && q[2] <= q[3]
}

/// Distinct orderings of the multiset `{i, j, k, l}`.
pub fn distinct_rearrangements(q: [usize; 4]) -> Vec<[usize; 4]> {
    let mut sorted = q;
    sorted.sort_unstable();
    let mut out = vec![sorted];
    let mut cur = sorted;
    while next_permutation(&mut cur) {
        out.push(cur);
    }
    out
}

fn next_permutation(v: &mut [usize; 4]) -> bool {
    let Some(i) = (0..3).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..4)
        .rev()
        .find(|&j| v[j] > v[i])
        .expect("pivot exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

impl QuarticCoefficients {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: BTreeMap::new(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut q = Self::zeros(n);
        for idx in ordered_quadruples(n) {
            q.a.insert(idx, rng.gen_range(-1.0..1.0));
        }
        q
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, idx: [usize; 4], value: f64) -> Result<()> {
        if !is_ordered(&idx) {
            return Err(Error::UnorderedIndices(idx));
        }
        if let Some(&bad) = idx.iter().find(|&&k| k >= self.n) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dimension: self.n,
            });
        }
        self.a.insert(idx, value);
        Ok(())
    }

    /// `𝒜_{ijkl}`, zero unless `i ≤ j ≤ k ≤ l`.
    pub fn a(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let idx = [i, j, k, l];
        if is_ordered(&idx) {
            self.a.get(&idx).copied().unwrap_or(0.0)
        } else {
            0.0
        }
    }

    /// `B_{αijk} = 𝒜_{αijk} + 𝒜_{iαjk} + 𝒜_{ijαk} + 𝒜_{ijkα}`.
    pub fn b(&self, alpha: usize, i: usize, j: usize, k: usize) -> f64 {
        self.a(alpha, i, j, k)
            + self.a(i, alpha, j, k)
            + self.a(i, j, alpha, k)
            + self.a(i, j, k, alpha)
    }

    /// `C_{αβkl} = B_{βαkl} + B_{βkαl} + B_{βklα}`.
    pub fn c(&self, alpha: usize, beta: usize, k: usize, l: usize) -> f64 {
        self.b(beta, alpha, k, l) + self.b(beta, k, alpha, l) + self.b(beta, k, l, alpha)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn entries(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        self.a.iter().map(|(k, v)| (*k, *v))
    }

    /// Reads the pure-fibre quartic coefficients of a potential jet.
    pub fn from_potential(rho: &RealJet) -> Result<Self> {
        let n = half_dimension(rho.nvars())?;
        let mut q = Self::zeros(n);
        for idx in ordered_quadruples(n) {
            let vars: Vec<usize> = idx.iter().map(|&k| yvar(n, k)).collect();
            let c = rho.coefficient_of(&vars);
            if c != 0.0 {
                q.a.insert(idx, c);
            }
        }
        Ok(q)
    }

    /// Adds `Σ_{i≤j≤k≤l} 𝒜_{ijkl} y_i y_j y_k y_l` to a potential jet.
    pub fn add_to_potential(&self, rho: &RealJet) -> Result<RealJet> {
        let n = half_dimension(rho.nvars())?;
        if n != self.n {
            return Err(Error::MalformedInput(format!(
                "coefficients are for dimension {}, potential for {n}",
                self.n
            )));
        }
        let mut out = rho.clone();
        for (idx, v) in &self.a {
            let vars: Vec<usize> = idx.iter().map(|&k| yvar(n, k)).collect();
            out.add_term(Monomial::from_vars(2 * n, &vars), *v);
        }
        Ok(out)
    }
}

/// `Σ (B_{αβγδ} − ½ C_{δγαβ}) + 2𝒜_{ijkl}` over the distinct orderings
/// `(α,β,γ,δ)` of `{i,j,k,l}`; vanishes for every coefficient set.
pub fn rearrangement_identity(
    q: &QuarticCoefficients,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<f64> {
    let idx = [i, j, k, l];
    if !is_ordered(&idx) {
        return Err(Error::UnorderedIndices(idx));
    }
    if let Some(&bad) = idx.iter().find(|&&m| m >= q.n) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            dimension: q.n,
        });
    }
    let sum: f64 = distinct_rearrangements(idx)
        .into_iter()
        .map(|[a, b, c, d]| q.b(a, b, c, d) - 0.5 * q.c(d, c, a, b))
        .sum();
    Ok(sum + 2.0 * q.a(i, j, k, l))
}

/// `Σ (R_{αγβδ} + R_{αδβγ})` over the distinct orderings of `{i,j,k,l}`.
pub fn curvature_rearrangement_sum(r: &CurvatureTensor, idx: [usize; 4]) -> f64 {
    distinct_rearrangements(idx)
        .into_iter()
        .map(|[a, b, c, d]| r.get(a, c, b, d) + r.get(a, d, b, c))
        .sum()
}

/// Closed-form quartic coefficient `(1/18) Σ (R_{αγβδ} + R_{αδβγ})`.
pub fn quartic_coefficient_closed_form(r: &CurvatureTensor, idx: [usize; 4]) -> Result<f64> {
    if !is_ordered(&idx) {
        return Err(Error::UnorderedIndices(idx));
    }
    Ok(curvature_rearrangement_sum(r, idx) / 18.0)
}

/// Result of solving for the quartic fibre coefficients.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub coefficients: QuarticCoefficients,
    /// Degree-≤4 potential with the solved coefficients inserted.
    pub potential: RealJet,
    /// Linear system `M a = −r₀` imposed on the pure-fibre quartic residual.
    pub system: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

fn fibre_quartic_residual(r: &CurvatureTensor, q: &QuarticCoefficients) -> Result<DVector<f64>> {
    let n = r.dimension();
    let base = potential_expansion_with_degree(r, 4)?;
    let rho = q.add_to_potential(&base)?;
    let res = ma_residual(&rho)?;
    let quads = ordered_quadruples(n);
    Ok(DVector::from_iterator(
        quads.len(),
        quads.iter().map(|idx| {
            let vars: Vec<usize> = idx.iter().map(|&k| yvar(n, k)).collect();
            res.coefficient_of(&vars)
        }),
    ))
}

/// Solves for the quartic fibre coefficients by imposing the Monge–Ampère
/// equation on the degree-4 terms at `x = 0`, independently of any closed form.
///
/// The residual's pure-fibre quartic part is affine in `𝒜`; its matrix is
/// assembled column by column from unit coefficient sets and the square
/// system is solved directly.
pub fn series_solve_quartic(r: &CurvatureTensor) -> Result<SeriesSolution> {
    r.validate()?;
    let n = r.dimension();
    let quads = ordered_quadruples(n);
    let r0 = fibre_quartic_residual(r, &QuarticCoefficients::zeros(n))?;
    let mut m = DMatrix::zeros(quads.len(), quads.len());
    for (col, idx) in quads.iter().enumerate() {
        let mut unit = QuarticCoefficients::zeros(n);
        unit.set(*idx, 1.0)?;
        let rc = fibre_quartic_residual(r, &unit)?;
        m.set_column(col, &(rc - &r0));
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= 1e-10 * smax {
        return Err(Error::SingularSystem);
    }
    let rhs = -&r0;
    let sol = svd.solve(&rhs, 0.0).map_err(|_| Error::SingularSystem)?;
    let mut coefficients = QuarticCoefficients::zeros(n);
    for (idx, v) in quads.iter().zip(sol.iter()) {
        if *v != 0.0 {
            coefficients.set(*idx, *v)?;
        }
    }
    let potential = coefficients.add_to_potential(&potential_expansion_with_degree(r, 4)?)?;
    Ok(SeriesSolution {
        coefficients,
        potential,
        system: m,
        rhs,
    })
}
