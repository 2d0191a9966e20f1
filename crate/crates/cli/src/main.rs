use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use chronobell::bellops::ParticleKind;
use chronobell::hvsim::{MatchingScheme, ModelFamily};
use chronobell_cli::config::{ExperimentConfig, Format};
use chronobell_cli::experiments::{run_experiment, sweep_hysteretic, sweep_poll, REGISTRY};
use chronobell_cli::report::{emit_report, Report};
use chronobell_cli::verify::{summary, verify_all};
use chronobell_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

#[derive(Parser)]
#[command(
    name = "chronobell",
    version,
    about = "Bell-type inequalities with time-ordered measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List registered experiments.
    List,
    /// Run one experiment and emit its report.
    Run {
        experiment: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every experiment at its defaults; exit 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parameter sweeps over model families.
    Sweep {
        target: SweepTarget,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepTarget {
    Hysteretic,
    Poll,
}

/// Flags override the config file, which overrides built-in defaults.
#[derive(Args)]
struct RunOpts {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    /// classical_sign | collapse | hysteretic_collapse
    #[arg(long, value_parser = snake::<ModelFamily>)]
    model: Option<ModelFamily>,
    #[arg(long)]
    drag: Option<f64>,
    #[arg(long)]
    asymmetry: Option<f64>,
    /// result_match | input_match | output_chain
    #[arg(long, value_parser = snake::<MatchingScheme>)]
    scheme: Option<MatchingScheme>,
    #[arg(long)]
    alpha: Option<f64>,
    /// spin_half | photon
    #[arg(long, value_parser = snake::<ParticleKind>)]
    kind: Option<ParticleKind>,
    #[arg(long)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn snake<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

impl RunOpts {
    fn resolve(self, experiment: Option<String>) -> Result<(ExperimentConfig, Format, Option<PathBuf>), CliError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if experiment.is_some() {
            cfg.experiment = experiment;
        }
        let p = &mut cfg.params;
        p.n = self.n.or(p.n);
        p.seed = self.seed.or(p.seed);
        p.angles = self.angles.or(p.angles.take());
        p.scheme = self.scheme.or(p.scheme);
        p.alpha = self.alpha.or(p.alpha);
        p.kind = self.kind.or(p.kind);
        let m = &mut cfg.model;
        m.family = self.model.or(m.family);
        m.drag = self.drag.or(m.drag);
        m.asymmetry = self.asymmetry.or(m.asymmetry);
        let format = self.format.or(cfg.output.format).unwrap_or_default();
        let out = self.out.or(cfg.output.path.clone());
        Ok((cfg, format, out))
    }
}

fn write_out(text: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn emit(r: &Report, format: Format, out: Option<PathBuf>) -> Result<ExitCode, CliError> {
    write_out(&emit_report(r, format)?, out)?;
    Ok(if r.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::List => {
            let width = REGISTRY.iter().map(|e| e.name.len()).max().unwrap_or(0);
            let text: String = REGISTRY
                .iter()
                .map(|e| format!("{:<width$}  {}\n", e.name, e.summary))
                .collect();
            write_out(&text, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { experiment, opts } => {
            let (cfg, format, out) = opts.resolve(Some(experiment))?;
            emit(&run_experiment(&cfg)?, format, out)
        }
        Command::Verify { seed } => {
            let reports = verify_all(seed)?;
            write_out(&summary(&reports), None)?;
            Ok(if reports.iter().all(Report::all_pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Sweep { target, opts } => {
            let (cfg, format, out) = opts.resolve(None)?;
            let r = match target {
                SweepTarget::Hysteretic => sweep_hysteretic(&cfg)?,
                SweepTarget::Poll => sweep_poll(&cfg)?,
            };
            emit(&r, format, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("chronobell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
