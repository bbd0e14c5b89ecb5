use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use yorum::corpus::{generate_synthetic, load_csv, write_csv, write_csv_to};
use yorum::harness::{
    apply_variant, emit_report, load_rows_csv, run_experiment, train_single, tune, GridSpec, RESULTS_FILE,
};
use yorum::{
    Corpus, Error, ErrorKind, ExperimentConfig, KeyboardMatrix, ModelBundle, ModelKind, SyntheticSpec, VariantId,
};

#[derive(Parser)]
#[command(name = "yorum", version, about = "Turkish review sentiment toolkit")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize one dataset variant of a labeled CSV.
    Prepare {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        variant: VariantId,
        #[arg(long)]
        out: PathBuf,
        /// Experiment config whose [resources] table to use.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Train one model on one variant and report its test-split scores.
    Train {
        #[arg(long)]
        variant: VariantId,
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        config: PathBuf,
        /// Labeled CSV; overrides `corpus` in the config.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Where to write the model bundle.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validated grid search on the training split.
    Tune {
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "default")]
        variant: VariantId,
    },
    /// Run the configured variant × model matrix and write a run directory.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        runs: PathBuf,
    },
    /// Print the matrix of a run directory.
    Report {
        #[arg(long)]
        runs: PathBuf,
        /// Print the long-form CSV instead of the matrix.
        #[arg(long)]
        csv: bool,
    },
    /// Score a text with a trained model bundle.
    Predict {
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        text: String,
    },
    /// Generate a synthetic labeled corpus.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the injected typos as JSON lines.
        #[arg(long)]
        typos: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> anyhow::Result<ExperimentConfig> {
    match path {
        Some(p) => Ok(ExperimentConfig::load(p)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn load_corpus(flag: Option<PathBuf>, config: &ExperimentConfig) -> anyhow::Result<Corpus> {
    let path = flag
        .or_else(|| config.corpus.clone())
        .ok_or_else(|| Error::Config("no corpus given: pass --corpus or set `corpus` in the config".into()))?;
    Ok(load_csv(path)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Prepare {
            input,
            variant,
            out,
            config,
        } => {
            let config = load_config(config.as_deref())?;
            let (resources, _) = config.resources.load()?;
            let corpus = load_csv(&input)?;
            apply_variant(&corpus, variant, &resources)?.write_csv(&out)?;
            log::info!("wrote {} documents to {}", corpus.len(), out.display());
        }
        Command::Train {
            variant,
            model,
            config,
            corpus,
            out,
        } => {
            let config = ExperimentConfig::load(&config)?;
            let corpus = load_corpus(corpus, &config)?;
            let (row, bundle) = train_single(&corpus, &config, variant, model)?;
            println!("{}", emit_report(&[row])?.text.trim_end());
            if let Some(out) = out {
                bundle.save(&out)?;
                log::info!("model bundle written to {}", out.display());
            }
        }
        Command::Tune {
            model,
            grid,
            config,
            corpus,
            variant,
        } => {
            let config = load_config(config.as_deref())?;
            let corpus = load_corpus(corpus, &config)?;
            let grid = GridSpec::load(&grid)?;
            if grid.model != model {
                return Err(Error::Config(format!("grid file is for {}, not {model}", grid.model)).into());
            }
            let result = tune(&corpus, &config, variant, &grid)?;
            for (i, row) in result.rows.iter().enumerate() {
                let point: Vec<String> = row.point.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let mark = if i == result.best_index { " *" } else { "" };
                println!("{}\t{} {:.6}{mark}", point.join(" "), result.metric, row.mean);
            }
        }
        Command::Evaluate { config, corpus, runs } => {
            let config = ExperimentConfig::load(&config)?;
            let corpus = load_corpus(corpus, &config)?;
            let run = run_experiment(&corpus, &config)?;
            run.write(&runs)?;
            let failed = run.manifest.cells.len() - run.rows.len();
            if !run.rows.is_empty() {
                print!("{}", emit_report(&run.rows)?.text);
            }
            if failed > 0 {
                eprintln!("{failed} cell(s) failed; see {}", runs.join("manifest.json").display());
            }
            if run.rows.is_empty() {
                return Err(Error::Data("every cell failed".into()).into());
            }
        }
        Command::Report { runs, csv } => {
            let rows = load_rows_csv(runs.join(RESULTS_FILE))?;
            let report = emit_report(&rows)?;
            print!("{}", if csv { report.csv } else { report.text });
        }
        Command::Predict { model_file, text } => {
            let bundle = ModelBundle::load(&model_file)?;
            let p = bundle.predictor()?.predict(&text)?;
            let tokens: Vec<&str> = p.tokens.iter().map(|t| t.as_str()).collect();
            let out = serde_json::json!({
                "label": p.label.map(|l| l.as_u8()),
                "score": p.score,
                "tokens": tokens,
            });
            println!("{out}");
        }
        Command::Synth { spec, out, typos } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let spec = SyntheticSpec::from_toml(&text, &spec.display().to_string())?;
            let synth = generate_synthetic(&spec, &KeyboardMatrix::turkish_q())?;
            match out {
                Some(out) => write_csv(&synth.corpus, out)?,
                None => write_csv_to(&synth.corpus, std::io::stdout().lock())?,
            }
            if let Some(path) = typos {
                let mut lines = String::new();
                for t in &synth.typos {
                    lines.push_str(&serde_json::to_string(t).context("serializing typo")?);
                    lines.push('\n');
                }
                std::fs::write(&path, lines).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>().map(Error::kind) {
        Some(ErrorKind::Usage) => 1,
        Some(ErrorKind::Numeric) => 3,
        Some(ErrorKind::Data) | None => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
