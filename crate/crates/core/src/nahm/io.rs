use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::equations::NahmConfiguration;
use super::path::{GaugePath, PathKind};
use crate::error::{Error, Result};
use crate::lie::LieAlgebraContext;
use crate::linalg::{CMat, C64};

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// CSV with a `t` column followed by `re_ij,im_ij` for each entry, row-major.
pub fn path_to_csv(path: &GaugePath) -> Result<String> {
    let n = path.context().matrix_size();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("re_{i}{j}"));
            header.push(format!("im_{i}{j}"));
        }
    }
    w.write_record(&header).map_err(csv_error)?;
    for (k, m) in path.values().iter().enumerate() {
        let mut row = vec![path.time(k).to_string()];
        for i in 0..n {
            for j in 0..n {
                row.push(m[(i, j)].re.to_string());
                row.push(m[(i, j)].im.to_string());
            }
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn path_from_csv(
    ctx: &Arc<LieAlgebraContext>,
    kind: PathKind,
    text: &str,
) -> Result<GaugePath> {
    let n = ctx.matrix_size();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let width = r.headers().map_err(csv_error)?.len();
    if width != 1 + 2 * n * n {
        return Err(Error::Parse(format!(
            "expected {} columns for {n}x{n} matrices, found {width}",
            1 + 2 * n * n
        )));
    }
    let mut values = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let nums = record
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(CMat::from_fn(n, n, |i, j| {
            let base = 1 + 2 * (i * n + j);
            C64::new(nums[base], nums[base + 1])
        }));
    }
    GaugePath::from_values(ctx, kind, values)
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    context: String,
    grid_size: usize,
    kind: String,
    files: Vec<String>,
}

const FILES: [&str; 4] = ["T0.csv", "T1.csv", "T2.csv", "T3.csv"];

/// Writes the four component paths and a `manifest.json` into `dir`.
pub fn save_bundle(t: &NahmConfiguration, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for (p, name) in t.components().iter().zip(FILES) {
        fs::write(dir.join(name), path_to_csv(p)?)?;
    }
    let kind = if t.is_complex() {
        PathKind::ComplexAlgebra
    } else {
        PathKind::Algebra
    };
    let manifest = Manifest {
        context: t.context().name().to_string(),
        grid_size: t.intervals() + 1,
        kind: kind.name().to_string(),
        files: FILES.iter().map(|s| s.to_string()).collect(),
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

/// Reads a bundle; the context is resolved from the manifest unless given.
pub fn load_bundle(
    dir: impl AsRef<Path>,
    ctx: Option<&Arc<LieAlgebraContext>>,
) -> Result<NahmConfiguration> {
    let dir = dir.as_ref();
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let ctx = match ctx {
        Some(c) => Arc::clone(c),
        None => crate::algebras::resolve(&manifest.context)?,
    };
    let kind = PathKind::parse(&manifest.kind)?;
    if manifest.files.len() != 4 {
        return Err(Error::Parse("bundle manifest must list four files".into()));
    }
    let mut paths = Vec::new();
    for f in &manifest.files {
        let p = path_from_csv(&ctx, kind, &fs::read_to_string(dir.join(f))?)?;
        if p.grid_size() != manifest.grid_size {
            return Err(Error::GridMismatch(p.intervals(), manifest.grid_size - 1));
        }
        paths.push(p);
    }
    let [a, b, c, d]: [GaugePath; 4] = paths.try_into().expect("four paths");
    NahmConfiguration::new([a, b, c, d])
}
