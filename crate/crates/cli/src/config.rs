use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::suites::Suite;

/// Fully resolved settings for one suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub context: String,
    pub grid_size: usize,
    pub ode_steps: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub rng_seed: u64,
    pub sweeps: BTreeMap<String, usize>,
    /// Record wall-clock milliseconds; off by default so reports are reproducible.
    pub timing: bool,
}

pub const DEFAULT_CONTEXT: &str = "su2-u1";
pub const DEFAULT_GRID: usize = 2000;
pub const DEFAULT_STEPS: usize = 2000;
pub const DEFAULT_SEED: u64 = 42;

impl SuiteConfig {
    pub fn defaults(suite: Suite) -> Self {
        Self {
            suite,
            context: DEFAULT_CONTEXT.to_string(),
            grid_size: DEFAULT_GRID,
            ode_steps: DEFAULT_STEPS,
            tolerances: suite
                .cases()
                .iter()
                .map(|c| (c.id.to_string(), c.tol))
                .collect(),
            rng_seed: DEFAULT_SEED,
            sweeps: suite
                .sweeps()
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            timing: false,
        }
    }

    pub fn tol(&self, case: &str) -> f64 {
        self.tolerances[case]
    }

    pub fn sweep(&self, key: &str) -> usize {
        self.sweeps[key]
    }

    /// Applies `o`. Keys that belong to other suites are ignored when
    /// `shared` is set and rejected otherwise.
    pub fn apply(&mut self, o: &Overrides, shared: bool) -> CliResult<()> {
        o.validate()?;
        if let Some(c) = &o.context {
            self.context = c.clone();
        }
        if let Some(g) = o.grid {
            self.grid_size = g;
        }
        if let Some(s) = o.steps {
            self.ode_steps = s;
        }
        if let Some(s) = o.seed {
            self.rng_seed = s;
        }
        for (k, &v) in &o.tol {
            match self.tolerances.get_mut(k) {
                Some(slot) => *slot = v,
                None if shared
                    && Suite::ALL
                        .iter()
                        .any(|s| s.cases().iter().any(|c| c.id == k)) => {}
                None => return Err(unknown_key("tolerance", k, self.suite)),
            }
        }
        for (k, &v) in &o.sweep {
            match self.sweeps.get_mut(k) {
                Some(slot) => *slot = v,
                None if shared
                    && Suite::ALL
                        .iter()
                        .any(|s| s.sweeps().iter().any(|c| c.0 == k)) => {}
                None => return Err(unknown_key("sweep", k, self.suite)),
            }
        }
        Ok(())
    }
}

fn unknown_key(what: &str, key: &str, suite: Suite) -> CliError {
    CliError::ConfigParse(format!(
        "unknown {what} key `{key}` for suite {}",
        suite.name()
    ))
}

/// A layer of settings from the config file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub context: Option<String>,
    pub grid: Option<usize>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub tol: BTreeMap<String, f64>,
    #[serde(default)]
    pub sweep: BTreeMap<String, usize>,
}

impl Overrides {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::ConfigParse(msg));
        if let Some(g) = self.grid {
            if g < 4 {
                return bad(format!("grid must be at least 4, got {g}"));
            }
        }
        if let Some(s) = self.steps {
            if s < 4 {
                return bad(format!("steps must be at least 4, got {s}"));
            }
        }
        for (k, &v) in &self.tol {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("tolerance `{k}` must be positive, got {v}"));
            }
        }
        for (k, &v) in &self.sweep {
            if v == 0 {
                return bad(format!("sweep size `{k}` must be positive"));
            }
        }
        Ok(())
    }
}

/// Parsed configuration file: global keys plus `[suite.NAME]` sections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub global: Overrides,
    pub sections: BTreeMap<Suite, Overrides>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let parse_err = |e: toml::de::Error| CliError::ConfigParse(e.message().to_string());
        let mut table: toml::Table = text.parse().map_err(parse_err)?;
        let sections = match table.remove("suite") {
            None => BTreeMap::new(),
            Some(toml::Value::Table(t)) => t
                .into_iter()
                .map(|(name, v)| {
                    let suite = Suite::from_name(&name)?;
                    let o: Overrides = v.try_into().map_err(parse_err)?;
                    o.validate()?;
                    Ok((suite, o))
                })
                .collect::<CliResult<_>>()?,
            Some(_) => return Err(CliError::ConfigParse("`suite` must be a table".into())),
        };
        let global: Overrides = toml::Value::Table(table).try_into().map_err(parse_err)?;
        global.validate()?;
        Ok(Self { global, sections })
    }

    pub fn load(path: impl AsRef<Path>) -> CliResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::ConfigParse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Settings for `suite`: defaults, then the file's global keys, then its
/// suite section, then command-line flags.
pub fn resolve(
    suite: Suite,
    file: Option<&ConfigFile>,
    flags: &Overrides,
    timing: bool,
) -> CliResult<SuiteConfig> {
    let mut cfg = SuiteConfig::defaults(suite);
    if let Some(f) = file {
        cfg.apply(&f.global, true)?;
        if let Some(s) = f.sections.get(&suite) {
            cfg.apply(s, false)?;
        }
    }
    cfg.apply(flags, true)?;
    cfg.timing = timing;
    Ok(cfg)
}

/// Splits `--tol.KEY=VAL` and `--sweep.KEY=VAL` out of `args`.
pub fn extract_dotted(args: Vec<String>) -> CliResult<(Vec<String>, Overrides)> {
    let mut rest = Vec::new();
    let mut o = Overrides::default();
    for arg in args {
        let (prefix, body) = if let Some(b) = arg.strip_prefix("--tol.") {
            ("tol", b)
        } else if let Some(b) = arg.strip_prefix("--sweep.") {
            ("sweep", b)
        } else {
            rest.push(arg);
            continue;
        };
        let (key, val) = body.split_once('=').ok_or_else(|| {
            CliError::ConfigParse(format!("expected --{prefix}.KEY=VALUE, got `{arg}`"))
        })?;
        let invalid =
            || CliError::ConfigParse(format!("invalid value `{val}` for --{prefix}.{key}"));
        if prefix == "tol" {
            o.tol
                .insert(key.to_string(), val.parse().map_err(|_| invalid())?);
        } else {
            o.sweep
                .insert(key.to_string(), val.parse().map_err(|_| invalid())?);
        }
    }
    o.validate()?;
    Ok((rest, o))
}
