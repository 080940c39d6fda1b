//! Built-in matrix Lie algebras and the plain-text structure file format.
//!
//! The text format is line oriented; `#` starts a comment:
//!
//! ```text
//! name su2-u1
//! dimension 3
//! matrix_size 2
//! basis 0
//! 0,0 0,-0.5
//! 0,-0.5 0,0
//! basis 1
//! ...
//! inner_product
//! 1 0 0
//! 0 1 0
//! 0 0 1
//! h_mask 2
//! h_complex diagonal
//! ```
//!
//! Matrix entries are `re,im` pairs, one matrix row per line. `h_mask` and
//! `h_complex` are optional; `h_complex` is `trivial`, `diagonal` or
//! `block <sizes...>` and defaults to `diagonal`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::{LieAlgebraContext, SubgroupModel};
use crate::linalg::{CMat, C64};

fn unit(n: usize, i: usize, j: usize, z: C64) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = z;
    m
}

/// Generalized Gell-Mann matrices in the standard ordering.
///
/// For n = 2 these are the Pauli matrices σ₁, σ₂, σ₃; for n = 3 the
/// Gell-Mann matrices λ₁ … λ₈.
pub fn gell_mann(n: usize) -> Vec<CMat> {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(n * n - 1);
    for k in 1..n {
        for j in 0..k {
            out.push(unit(n, j, k, one) + unit(n, k, j, one));
            out.push(unit(n, j, k, -i) + unit(n, k, j, i));
        }
        let scale = (2.0 / (k * (k + 1)) as f64).sqrt();
        let mut d = CMat::zeros(n, n);
        for l in 0..k {
            d[(l, l)] = C64::new(scale, 0.0);
        }
        d[(k, k)] = C64::new(-(k as f64) * scale, 0.0);
        out.push(d);
    }
    out
}

/// Gram matrix of `⟨X, Y⟩ = −c·Re tr(XY)` on a basis.
pub fn trace_form(basis: &[CMat], c: f64) -> DMatrix<f64> {
    let d = basis.len();
    DMatrix::from_fn(d, d, |a, b| -c * (&basis[a] * &basis[b]).trace().re)
}

/// su(n) with basis `−(i/2)λ_k` and `⟨X,Y⟩ = −2 tr(XY)`.
pub fn su(n: usize) -> Result<LieAlgebraContext> {
    if n < 2 {
        return Err(Error::InvalidContext("su(n) needs n >= 2".into()));
    }
    let basis: Vec<CMat> = gell_mann(n)
        .into_iter()
        .map(|l| l * C64::new(0.0, -0.5))
        .collect();
    let q = trace_form(&basis, 2.0);
    LieAlgebraContext::new(format!("su{n}"), basis, q)
}

/// so(n) with rotation generators and `⟨X,Y⟩ = −½ tr(XY)`.
///
/// so(3) uses `L_x, L_y, L_z` so that `[L_x, L_y] = L_z`; larger n use
/// `E_jk − E_kj` for `j < k` in lexicographic order.
pub fn so(n: usize) -> Result<LieAlgebraContext> {
    if n < 2 {
        return Err(Error::InvalidContext("so(n) needs n >= 2".into()));
    }
    let one = C64::new(1.0, 0.0);
    let gen = |j: usize, k: usize| unit(n, j, k, one) - unit(n, k, j, one);
    let basis: Vec<CMat> = if n == 3 {
        vec![gen(2, 1), gen(0, 2), gen(1, 0)]
    } else {
        let mut b = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                b.push(gen(j, k));
            }
        }
        b
    };
    let q = trace_form(&basis, 0.5);
    LieAlgebraContext::new(format!("so{n}"), basis, q)
}

/// Abelian algebra of the diagonal torus `U(1)^r` with basis `i E_kk`.
pub fn torus(r: usize) -> Result<LieAlgebraContext> {
    if r == 0 {
        return Err(Error::InvalidContext("torus rank must be positive".into()));
    }
    let basis: Vec<CMat> = (0..r).map(|k| unit(r, k, k, C64::new(0.0, 1.0))).collect();
    let q = trace_form(&basis, 1.0);
    LieAlgebraContext::new(format!("t{r}"), basis, q)
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "su2", "su2-u1", "su3", "su3-u2", "so3", "so3-so2", "so4", "so4-so3", "t1", "t2", "t3",
];

/// Looks up a built-in context by name.
pub fn builtin(name: &str) -> Result<Arc<LieAlgebraContext>> {
    let ctx = match name {
        "su2" => su(2)?,
        "su2-u1" => rename(su(2)?, "su2-u1").with_split(vec![2], SubgroupModel::Diagonal)?,
        "su3" => su(3)?,
        "su3-u2" => rename(su(3)?, "su3-u2")
            .with_split(vec![0, 1, 2, 7], SubgroupModel::BlockDiagonal(vec![2, 1]))?,
        "so3" => so(3)?,
        "so3-so2" => rename(so(3)?, "so3-so2")
            .with_split(vec![2], SubgroupModel::BlockDiagonal(vec![2, 1]))?,
        "so4" => so(4)?,
        "so4-so3" => rename(so(4)?, "so4-so3")
            .with_split(vec![0, 1, 3], SubgroupModel::BlockDiagonal(vec![3, 1]))?,
        other => {
            let rank = other
                .strip_prefix('t')
                .and_then(|r| r.parse::<usize>().ok())
                .ok_or_else(|| Error::InvalidContext(format!("unknown context `{other}`")))?;
            torus(rank)?
        }
    };
    Ok(Arc::new(ctx))
}

fn rename(ctx: LieAlgebraContext, name: &str) -> LieAlgebraContext {
    let basis = ctx.basis().to_vec();
    let q = ctx.inner_product_matrix().clone();
    LieAlgebraContext::new(name, basis, q).expect("renaming a valid context")
}

/// Serializes a context to the text structure format.
pub fn to_text(ctx: &LieAlgebraContext) -> String {
    let mut s = String::new();
    let n = ctx.matrix_size();
    writeln!(s, "name {}", ctx.name()).unwrap();
    writeln!(s, "dimension {}", ctx.dimension()).unwrap();
    writeln!(s, "matrix_size {n}").unwrap();
    for (k, b) in ctx.basis().iter().enumerate() {
        writeln!(s, "basis {k}").unwrap();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| format!("{:e},{:e}", b[(i, j)].re, b[(i, j)].im))
                .collect();
            writeln!(s, "{}", row.join(" ")).unwrap();
        }
    }
    writeln!(s, "inner_product").unwrap();
    let q = ctx.inner_product_matrix();
    for i in 0..q.nrows() {
        let row: Vec<String> = (0..q.ncols()).map(|j| format!("{:e}", q[(i, j)])).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    if let (Some(h), Some(model)) = (ctx.h_indices(), ctx.subgroup_model()) {
        let mask: Vec<String> = h.iter().map(|k| k.to_string()).collect();
        writeln!(s, "h_mask {}", mask.join(" ")).unwrap();
        let kind = match model {
            SubgroupModel::Trivial => "trivial".to_string(),
            SubgroupModel::Diagonal => "diagonal".to_string(),
            SubgroupModel::BlockDiagonal(b) => format!(
                "block {}",
                b.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        };
        writeln!(s, "h_complex {kind}").unwrap();
    }
    s
}

fn parse_num<T: std::str::FromStr>(tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("invalid {what}: `{tok}`")))
}

fn parse_complex(tok: &str) -> Result<C64> {
    let (re, im) = tok.split_once(',').unwrap_or((tok, "0"));
    Ok(C64::new(
        parse_num(re, "real part")?,
        parse_num(im, "imaginary part")?,
    ))
}

/// Parses the text structure format and validates the resulting context.
pub fn from_text(text: &str) -> Result<LieAlgebraContext> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .peekable();

    let mut name = String::from("custom");
    let mut dimension: Option<usize> = None;
    let mut matrix_size: Option<usize> = None;
    let mut basis: Vec<Option<CMat>> = Vec::new();
    let mut inner: Option<DMatrix<f64>> = None;
    let mut h_mask: Option<Vec<usize>> = None;
    let mut model = SubgroupModel::Diagonal;

    while let Some(line) = lines.next() {
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        match key {
            "name" => name = rest.join(" "),
            "dimension" => {
                let d: usize = parse_num(rest.first().copied().unwrap_or(""), "dimension")?;
                dimension = Some(d);
                basis = vec![None; d];
            }
            "matrix_size" => {
                matrix_size = Some(parse_num(
                    rest.first().copied().unwrap_or(""),
                    "matrix size",
                )?)
            }
            "basis" => {
                let n = matrix_size
                    .ok_or_else(|| Error::Parse("matrix_size must precede basis".into()))?;
                let k: usize = parse_num(rest.first().copied().unwrap_or(""), "basis index")?;
                if k >= basis.len() {
                    return Err(Error::Parse(format!("basis index {k} exceeds dimension")));
                }
                let mut m = CMat::zeros(n, n);
                for i in 0..n {
                    let row = lines
                        .next()
                        .ok_or_else(|| Error::Parse(format!("basis {k} is truncated")))?;
                    let entries: Vec<&str> = row.split_whitespace().collect();
                    if entries.len() != n {
                        return Err(Error::Parse(format!(
                            "basis {k} row {i} has {} entries, expected {n}",
                            entries.len()
                        )));
                    }
                    for (j, e) in entries.iter().enumerate() {
                        m[(i, j)] = parse_complex(e)?;
                    }
                }
                basis[k] = Some(m);
            }
            "inner_product" => {
                let d = dimension
                    .ok_or_else(|| Error::Parse("dimension must precede inner_product".into()))?;
                let mut q = DMatrix::zeros(d, d);
                for i in 0..d {
                    let row = lines
                        .next()
                        .ok_or_else(|| Error::Parse("inner_product is truncated".into()))?;
                    let entries: Vec<&str> = row.split_whitespace().collect();
                    if entries.len() != d {
                        return Err(Error::Parse(format!(
                            "inner_product row {i} has {} entries, expected {d}",
                            entries.len()
                        )));
                    }
                    for (j, e) in entries.iter().enumerate() {
                        q[(i, j)] = parse_num(e, "inner product entry")?;
                    }
                }
                inner = Some(q);
            }
            "h_mask" => {
                h_mask = Some(
                    rest.iter()
                        .map(|t| parse_num(t, "mask index"))
                        .collect::<Result<Vec<usize>>>()?,
                )
            }
            "h_complex" => {
                model = match rest.first().copied() {
                    Some("trivial") => SubgroupModel::Trivial,
                    Some("diagonal") => SubgroupModel::Diagonal,
                    Some("block") => SubgroupModel::BlockDiagonal(
                        rest[1..]
                            .iter()
                            .map(|t| parse_num(t, "block size"))
                            .collect::<Result<Vec<usize>>>()?,
                    ),
                    other => return Err(Error::Parse(format!("unknown h_complex kind {other:?}"))),
                }
            }
            other => return Err(Error::Parse(format!("unknown key `{other}`"))),
        }
    }

    dimension.ok_or_else(|| Error::Parse("missing dimension".into()))?;
    let basis = basis
        .into_iter()
        .enumerate()
        .map(|(k, b)| b.ok_or_else(|| Error::Parse(format!("missing basis {k}"))))
        .collect::<Result<Vec<_>>>()?;
    let q = match inner {
        Some(q) => q,
        None => trace_form(&basis, 1.0),
    };
    let ctx = LieAlgebraContext::new(name, basis, q)?;
    match h_mask {
        Some(h) => ctx.with_split(h, model),
        None => Ok(ctx),
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<LieAlgebraContext> {
    from_text(&std::fs::read_to_string(path)?)
}

pub fn save(ctx: &LieAlgebraContext, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_text(ctx))?;
    Ok(())
}

/// Resolves a built-in name or, failing that, a structure file path.
pub fn resolve(name_or_path: &str) -> Result<Arc<LieAlgebraContext>> {
    match builtin(name_or_path) {
        Ok(ctx) => Ok(ctx),
        Err(e) => {
            if Path::new(name_or_path).is_file() {
                Ok(Arc::new(load(name_or_path)?))
            } else {
                Err(e)
            }
        }
    }
}
