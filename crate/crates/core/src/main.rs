use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wpnoma::cli::config::EvalMethod;
use wpnoma::cli::{self, OutputFormat, Overrides};
use wpnoma::Error;

#[derive(Parser)]
#[command(name = "wpnoma", version, about = "Outage analysis of a wireless-powered NOMA relay network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write CSV/SVG results.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (TOML).
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled figure preset.
    #[arg(long, value_parser = cli::PRESET_NAMES)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Monte Carlo trials per grid point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<MethodArg>>,
    #[arg(long, value_delimiter = ',', default_value = "csv,svg")]
    format: Vec<FormatArg>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

fn run(args: RunArgs) -> wpnoma::Result<()> {
    let (name, mut cfg) = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into());
            (stem, cli::load_config(path)?)
        }
        (None, Some(p)) => (p.clone(), cli::load_preset(p)?),
        (None, None) => unreachable!("clap requires a source"),
    };
    let overrides = Overrides {
        trials: args.trials,
        seed: args.seed,
        methods: args.methods.map(|ms| {
            ms.into_iter()
                .map(|m| match m {
                    MethodArg::Analytic => EvalMethod::Analytic,
                    MethodArg::Mc => EvalMethod::Mc,
                })
                .collect()
        }),
        workers: args.workers,
    };
    overrides.apply(&mut cfg)?;
    let formats: Vec<OutputFormat> = args
        .format
        .iter()
        .map(|f| match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Svg => OutputFormat::Svg,
        })
        .collect();

    log::info!(
        "{name}: {} curve(s) x {} point(s), trials {}, seed {}",
        cfg.sweep.curves.len(),
        cfg.sweep.grid.len(),
        cfg.sweep.trials,
        cfg.sweep.seed
    );
    let results = cli::run_experiment(&cfg, overrides.workers)?;
    let skipped: usize = results.iter().map(|r| r.errors.len()).sum();
    if skipped > 0 {
        log::warn!("{skipped} point(s) could not be evaluated and were left empty");
    }
    for path in cli::write_outputs(&name, &cfg, &results, &args.out, &formats)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Consistency(_) | Error::Domain { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
