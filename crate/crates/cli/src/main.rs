use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tubegeom::curvature::CurvatureTensor;
use tubegeom::ma::{ma_residual, potential_expansion};
use tubegeom_cli::{
    config, report, run_all, write_outputs, CliError, CliResult, ConfigFile, Format, Overrides,
    Suite,
};

#[derive(Parser)]
#[command(
    name = "tubegeom",
    version,
    about = "Verification suites for adapted complex structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and print a report. Also accepts --tol.CASE=VAL and --sweep.KEY=VAL.
    Run(RunArgs),
    /// List suites, cases, default tolerances and sweep sizes.
    Suites,
    /// Print the quartic potential jet of a curvature tensor.
    Jet(JetArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Suite name or `all`; may be repeated.
    #[arg(long, required = true)]
    suite: Vec<String>,
    /// Built-in context name or path to a context file.
    #[arg(long)]
    context: Option<String>,
    /// Grid intervals for path-space suites.
    #[arg(long)]
    grid: Option<usize>,
    /// RK4 steps for the roundtrip suite.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for the report file and CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// TOML file with global keys and `[suite.NAME]` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record per-case wall-clock milliseconds.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum JetFormat {
    Text,
    Json,
}

#[derive(clap::Args)]
struct JetArgs {
    /// Constant sectional curvature of the model space.
    #[arg(long, default_value_t = 1.0, conflicts_with = "curvature")]
    kappa: f64,
    #[arg(long, default_value_t = 2, conflicts_with = "curvature")]
    dimension: usize,
    /// Curvature tensor file, JSON if it ends in `.json`, text otherwise.
    #[arg(long)]
    curvature: Option<PathBuf>,
    /// Print the Monge–Ampère residual of the jet instead.
    #[arg(long)]
    residual: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: JetFormat,
}

fn run(args: RunArgs, dotted: Overrides) -> CliResult<bool> {
    let suites = Suite::expand(&args.suite)?;
    let file = args.config.as_deref().map(ConfigFile::load).transpose()?;
    let flags = Overrides {
        context: args.context,
        grid: args.grid,
        steps: args.steps,
        seed: args.seed,
        ..dotted
    };
    let output = run_all(&suites, file.as_ref(), &flags, args.timing)?;
    if let Some(dir) = &args.out {
        write_outputs(dir, &output, args.format)?;
    }
    print!("{}", report::render(&output.records, args.format)?);
    let (pass, fail, skip) = report::summary(&output.records);
    eprintln!("{pass} passed, {fail} failed, {skip} skipped");
    Ok(!report::any_failed(&output.records))
}

fn list_suites() {
    for suite in Suite::ALL {
        println!("{}", suite.name());
        for c in suite.cases() {
            println!("  {:<24} tol {:<8e} {}", c.id, c.tol, c.description);
        }
        let sweeps: Vec<String> = suite
            .sweeps()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!("  sweeps: {}", sweeps.join(", "));
    }
}

fn jet(args: JetArgs) -> CliResult<()> {
    let r = match &args.curvature {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            if path.extension().is_some_and(|e| e == "json") {
                CurvatureTensor::from_json(&text)?
            } else {
                CurvatureTensor::from_text(&text)?
            }
        }
        None => {
            if args.dimension < 2 {
                return Err(CliError::ConfigParse("dimension must be at least 2".into()));
            }
            CurvatureTensor::constant_curvature(args.dimension, args.kappa)
        }
    };
    let mut rho = potential_expansion(&r)?;
    if args.residual {
        rho = ma_residual(&rho)?;
    }
    match args.format {
        JetFormat::Text => print!("{}", rho.to_text()),
        JetFormat::Json => println!("{}", rho.to_json()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let (args, dotted) = match config::extract_dotted(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = Cli::parse_from(args);
    let dotted_given = dotted != Overrides::default();
    let result = match cli.command {
        Command::Run(a) => run(a, dotted),
        _ if dotted_given => Err(CliError::ConfigParse(
            "--tol and --sweep apply to `run` only".into(),
        )),
        Command::Suites => {
            list_suites();
            Ok(true)
        }
        Command::Jet(a) => jet(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
