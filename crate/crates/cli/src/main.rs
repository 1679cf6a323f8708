use biphoton::harness::cache::Cache;
use biphoton::harness::check;
use biphoton::harness::config::{Format, RunConfig};
use biphoton::harness::emit::{emit, EmitOptions};
use biphoton::harness::figures::{figure_config, Figure};
use biphoton::harness::sweep::run_sweep;
use biphoton::HarnessError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "biphoton", version, about = "Vortex-photon stimulated emission: TAM statistics and OAM coincidences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ΔJ_z against time for three packet widths (sodium).
    Fig2a(RunArgs),
    /// δJ_z against time for three packet widths (sodium).
    Fig2b(RunArgs),
    /// δJ_z against time for m_γ = 0..3 (sodium).
    Fig2c(RunArgs),
    /// δJ_z against m_γ at t = 10/Γ (sodium).
    Fig3(RunArgs),
    /// Pair coincidence probabilities against trap width (hydrogen).
    Pairprob(RunArgs),
    /// Arbitrary sweep described by a TOML file.
    Sweep(RunArgs),
    /// Run the acceptance checks.
    Check {
        /// Write the check results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run config; for figures, keys override the figure defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Atom preset (Na-3p3s, H-2p1s).
    #[arg(long)]
    preset: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    workers: Option<usize>,
    /// Skip the result cache for lookups (results are still stored).
    #[arg(long)]
    no_cache: bool,
    /// Relative tolerance of the channel integrals.
    #[arg(long)]
    tol: Option<f64>,
    /// Keep per-point wall times in the output.
    #[arg(long)]
    timing: bool,
}

fn read_table(path: &Path) -> Result<toml::Table, HarnessError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.display().to_string(), source: e })?;
    toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

fn build_config(figure: Option<Figure>, args: &RunArgs) -> Result<RunConfig, HarnessError> {
    let mut cfg = match (figure, &args.config) {
        (Some(f), Some(p)) => figure_config(f, &read_table(p)?)?,
        (Some(f), None) => f.config(),
        (None, Some(p)) => RunConfig::load(p)?,
        (None, None) => return Err(HarnessError::Config("sweep requires --config".into())),
    };
    if let Some(p) = &args.preset {
        cfg.preset = Some(p.clone());
    }
    if let Some(t) = args.tol {
        cfg.tolerance.rel = t;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(f) = args.format {
        cfg.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    } else if let Some(ext) = args.out.as_ref().and_then(|p| p.extension()) {
        if ext == "json" {
            cfg.output.format = Format::Json;
        }
    }
    if let Some(o) = &args.out {
        cfg.output.path = Some(o.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(figure: Option<Figure>, args: &RunArgs) -> Result<ExitCode, HarnessError> {
    let cfg = build_config(figure, args)?;
    let cache = Cache::from_env();
    let outcome = run_sweep(&cfg, Some(&cache), !args.no_cache)?;
    if outcome.cache_hit {
        eprintln!("cache hit {}", outcome.result.config_hash);
    } else {
        eprintln!("evaluated {} points", outcome.evaluations);
    }
    for r in &outcome.result.records {
        for w in &r.warnings {
            eprintln!("point {}: warning: {w}", r.index);
        }
        if let Some(e) = &r.error {
            eprintln!("point {}: error: {e}", r.index);
        }
    }
    let path = cfg.output.path.as_deref().map(Path::new);
    emit(&outcome.result, cfg.output.format, path, EmitOptions { timing: args.timing })?;
    Ok(if outcome.result.has_errors() { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn run_check(out: Option<&Path>) -> Result<ExitCode, HarnessError> {
    let results = check::run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if let Some(p) = out {
        let text = serde_json::to_string_pretty(&results).expect("results serialise");
        std::fs::write(p, text).map_err(|e| HarnessError::Io { path: p.display().to_string(), source: e })?;
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fig2a(a) => run(Some(Figure::Fig2a), a),
        Command::Fig2b(a) => run(Some(Figure::Fig2b), a),
        Command::Fig2c(a) => run(Some(Figure::Fig2c), a),
        Command::Fig3(a) => run(Some(Figure::Fig3), a),
        Command::Pairprob(a) => run(Some(Figure::Pairprob), a),
        Command::Sweep(a) => run(None, a),
        Command::Check { out } => run_check(out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
