//! Truncated multivariate polynomials ("jets") with real or complex coefficients.
//!
//! A [`Jet`] stores a sparse map from exponent vectors to coefficients and
//! drops every term whose total degree exceeds `max_degree`. Products and
//! matrix inverses truncate consistently, so identities hold exactly up to
//! the degree bound.

use std::collections::BTreeMap;
use std::fmt::{self, Debug};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Coefficient ring for jets.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for C64 {
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Exponent vector, ordered by total degree and then reverse-lexicographically
/// so that `x₁²` precedes `x₁x₂` precedes `x₂²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self(e)
    }

    /// Monomial `∏ x_{vars[k]}` (repeated variables raise the power).
    pub fn from_vars(nvars: usize, vars: &[usize]) -> Self {
        let mut e = vec![0; nvars];
        for &v in vars {
            e[v] += 1;
        }
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn times(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn eval<T: Scalar>(&self, point: &[T]) -> T {
        let mut acc = T::one();
        for (&e, &x) in self.0.iter().zip(point) {
            for _ in 0..e {
                acc = acc * x;
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse truncated polynomial in `nvars` variables.
#[derive(Clone, PartialEq)]
pub struct Jet<T: Scalar> {
    nvars: usize,
    max_degree: u32,
    terms: BTreeMap<Monomial, T>,
}

pub type RealJet = Jet<f64>;
pub type ComplexJet = Jet<C64>;

impl<T: Scalar> Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(vars={}, deg<={}) {{", self.nvars, self.max_degree)?;
        for (m, c) in &self.terms {
            write!(f, " {:?}*{:?}", c, m.0)?;
        }
        write!(f, " }}")
    }
}

impl<T: Scalar> Jet<T> {
    pub fn zero(nvars: usize, max_degree: u32) -> Self {
        Self {
            nvars,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, max_degree: u32, c: T) -> Self {
        let mut j = Self::zero(nvars, max_degree);
        j.add_term(Monomial::one(nvars), c);
        j
    }

    pub fn variable(nvars: usize, max_degree: u32, k: usize) -> Self {
        let mut j = Self::zero(nvars, max_degree);
        j.add_term(Monomial::var(nvars, k), T::one());
        j
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·m`, dropping the term if it exceeds the degree bound or cancels.
    pub fn add_term(&mut self, m: Monomial, c: T) {
        assert_eq!(m.0.len(), self.nvars, "monomial arity mismatch");
        if m.degree() > self.max_degree || c == T::zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == T::zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> T {
        self.terms.get(m).copied().unwrap_or_else(T::zero)
    }

    /// Coefficient of `∏ x_{vars[k]}`.
    pub fn coefficient_of(&self, vars: &[usize]) -> T {
        self.coefficient(&Monomial::from_vars(self.nvars, vars))
    }

    pub fn with_max_degree(&self, max_degree: u32) -> Self {
        Self {
            nvars: self.nvars,
            max_degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        self.filter(|m| m.degree() == degree)
    }

    /// Terms of total degree at most `degree`, keeping the degree bound.
    pub fn truncated(&self, degree: u32) -> Self {
        self.filter(|m| m.degree() <= degree)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self {
            nvars: self.nvars,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    /// Lowest degree present, or `None` for the zero jet.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .values()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = Self::zero(self.nvars, self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), *c * s);
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Jet<U> {
        let mut out = Jet::zero(self.nvars, self.max_degree);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(*c));
        }
        out
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "jets in different variable counts");
    }

    /// Partial derivative with respect to variable `k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.max_degree);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e > 0 {
                let mut d = m.0.clone();
                d[k] -= 1;
                out.add_term(Monomial(d), *c * T::from_f64(e as f64));
            }
        }
        out
    }

    /// Iterated partial derivative over the listed variables.
    pub fn derivative_multi(&self, vars: &[usize]) -> Self {
        vars.iter().fold(self.clone(), |acc, &k| acc.derivative(k))
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "evaluation point arity mismatch");
        self.terms
            .iter()
            .fold(T::zero(), |acc, (m, c)| acc + *c * m.eval(point))
    }

    /// Value at the origin.
    pub fn constant_term(&self) -> T {
        self.coefficient(&Monomial::one(self.nvars))
    }
}

impl Jet<f64> {
    pub fn to_complex(&self) -> Jet<C64> {
        self.map(|c| C64::new(c, 0.0))
    }

    pub fn eval_real(&self, point: &[f64]) -> f64 {
        self.eval(point)
    }
}

impl Jet<C64> {
    pub fn real_part(&self) -> Jet<f64> {
        self.map(|c| c.re)
    }

    pub fn imag_part(&self) -> Jet<f64> {
        self.map(|c| c.im)
    }

    /// Evaluates at a real point.
    pub fn eval_real(&self, point: &[f64]) -> C64 {
        let p: Vec<C64> = point.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.eval(&p)
    }
}

impl<T: Scalar> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &Jet<T>) -> Jet<T> {
        self.check_compatible(rhs);
        let mut out = self.clone();
        out.max_degree = self.max_degree.min(rhs.max_degree);
        out.terms.retain(|m, _| m.degree() <= out.max_degree);
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl<T: Scalar> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &Jet<T>) -> Jet<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &Jet<T>) -> Jet<T> {
        self.check_compatible(rhs);
        let max_degree = self.max_degree.min(rhs.max_degree);
        let mut acc: BTreeMap<Monomial, T> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &rhs.terms {
                if da + mb.degree() > max_degree {
                    continue;
                }
                let e = acc.entry(ma.times(mb)).or_insert_with(T::zero);
                *e = *e + *ca * *cb;
            }
        }
        acc.retain(|_, v| *v != T::zero());
        Jet {
            nvars: self.nvars,
            max_degree,
            terms: acc,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<T: Scalar> $tr for Jet<T> {
            type Output = Jet<T>;
            fn $f(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

/// Square matrix whose entries are jets.
#[derive(Debug, Clone, PartialEq)]
pub struct JetMatrix<T: Scalar> {
    n: usize,
    entries: Vec<Jet<T>>,
}

impl<T: Scalar> JetMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Jet<T>) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    pub fn identity(n: usize, nvars: usize, max_degree: u32) -> Self {
        Self::from_fn(n, |i, j| {
            if i == j {
                Jet::constant(nvars, max_degree, T::one())
            } else {
                Jet::zero(nvars, max_degree)
            }
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet<T> {
        &self.entries[i * self.n + j]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&Jet<T>) -> Jet<T>) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            let mut acc = self.get(i, 0) * other.get(0, j);
            for k in 1..self.n {
                acc = &acc + &(self.get(i, k) * other.get(k, j));
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j))
    }

    /// Constant (degree-0) matrix.
    pub fn constant_part(&self) -> Vec<T> {
        self.entries.iter().map(Jet::constant_term).collect()
    }

    /// Largest coefficient of `self − other`.
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).max_abs_coefficient())
            .fold(0.0, f64::max)
    }

    /// Inverse of `I + E` where every entry of `E` has positive valuation,
    /// by the truncated Neumann series `Σ (−E)^k`.
    pub fn neumann_inverse_unipotent(&self) -> Result<Self> {
        let nvars = self.entries.first().map_or(0, Jet::nvars);
        let max_degree = self.entries.iter().map(Jet::max_degree).min().unwrap_or(0);
        let id = Self::identity(self.n, nvars, max_degree);
        let e = self.sub(&id);
        if e.entries.iter().any(|j| j.constant_term() != T::zero()) {
            return Err(Error::MalformedInput(
                "matrix jet is not the identity at the origin".into(),
            ));
        }
        let minus_e = e.map(|j| -j);
        let mut term = id.clone();
        let mut sum = id;
        for _ in 0..max_degree {
            term = term.mul(&minus_e);
            if term.entries.iter().all(Jet::is_empty) {
                break;
            }
            sum = sum.add(&term);
        }
        Ok(sum)
    }
}

#[derive(Serialize, Deserialize)]
struct JetRecord {
    nvars: usize,
    max_degree: u32,
    terms: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponents: Vec<u32>,
    coefficient: f64,
}

impl Jet<f64> {
    pub fn to_json(&self) -> Result<String> {
        let rec = JetRecord {
            nvars: self.nvars,
            max_degree: self.max_degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermRecord {
                    exponents: m.0.clone(),
                    coefficient: *c,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&rec)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: JetRecord = serde_json::from_str(s)?;
        let mut out = Self::zero(rec.nvars, rec.max_degree);
        for t in rec.terms {
            if t.exponents.len() != rec.nvars {
                return Err(Error::Parse(format!(
                    "term has {} exponents, expected {}",
                    t.exponents.len(),
                    rec.nvars
                )));
            }
            let m = Monomial(t.exponents);
            if m.degree() > rec.max_degree {
                return Err(Error::Parse(format!(
                    "term of degree {} exceeds bound {}",
                    m.degree(),
                    rec.max_degree
                )));
            }
            out.add_term(m, t.coefficient);
        }
        Ok(out)
    }

    /// Text rows `e₁ … e_N coefficient`, preceded by a `nvars max_degree` header.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.nvars, self.max_degree);
        for (m, c) in &self.terms {
            let e: Vec<String> = m.0.iter().map(u32::to_string).collect();
            s.push_str(&format!("{} {:e}\n", e.join(" "), c));
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
            .ok_or_else(|| Error::Parse("empty jet text".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 2 {
            return Err(Error::Parse("jet header must be `nvars max_degree`".into()));
        }
        let nvars: usize = h[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad nvars `{}`", h[0])))?;
        let max_degree: u32 = h[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad max_degree `{}`", h[1])))?;
        let mut out = Self::zero(nvars, max_degree);
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != nvars + 1 {
                return Err(Error::Parse(format!("jet row `{line}` has wrong arity")));
            }
            let exps = toks[..nvars]
                .iter()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad exponent `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let c: f64 = toks[nvars]
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", toks[nvars])))?;
            let m = Monomial(exps);
            if m.degree() > max_degree {
                return Err(Error::Parse(format!(
                    "row `{line}` exceeds the degree bound"
                )));
            }
            out.add_term(m, c);
        }
        Ok(out)
    }
}
