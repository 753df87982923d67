use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use numeral_ocr::dataset::{generate_synthetic, write_dataset, PbmVariant};
use numeral_ocr::harness::{
    self, extract_samples, format_confusion, write_bench_report, write_feature_csv, write_sweep_report, DataSource,
    ExperimentConfig,
};
use numeral_ocr::mlp::{MlpModel, TrainConfig};
use numeral_ocr::FeatureSetId;

#[derive(Parser)]
#[command(
    name = "numeral-ocr",
    version,
    about = "Handwritten numeral features, MLP training and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset as PBM files plus manifest.csv
    Gen {
        #[arg(long)]
        per_class: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// PBM flavour: p1 (ASCII) or p4 (packed)
        #[arg(long, default_value = "p4")]
        format: String,
    },
    /// Extract one feature set to CSV
    Extract {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        set: FeatureSetId,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a network on every sample of the data source
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        set: FeatureSetId,
        /// Hidden neurons; defaults to the set's reference architecture
        #[arg(long)]
        hidden: Option<usize>,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        model_out: PathBuf,
    },
    /// Evaluate a saved model on every sample of the data source
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        set: FeatureSetId,
    },
    /// Train and test one network per feature set
    Bench {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        /// `all` or a comma-separated list such as Set1,Set7
        #[arg(long, default_value = "all")]
        sets: String,
        /// Override every set's hidden-layer size
        #[arg(long)]
        hidden: Option<usize>,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test accuracy as a function of hidden-layer size
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long)]
        set: FeatureSetId,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "20,25,30,33,35,40,45,50,54,55,60,65,70"
        )]
        hidden: Vec<usize>,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Manifest of `path,label` lines
    #[arg(long, conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// Generate this many synthetic samples per class instead
    #[arg(long)]
    synthetic: Option<usize>,
    /// Seed for synthetic generation
    #[arg(long, default_value_t = 1)]
    data_seed: u64,
}

impl DataArgs {
    fn source(&self) -> Result<DataSource> {
        match (&self.data, self.synthetic) {
            (Some(path), None) => Ok(DataSource::Manifest(path.clone())),
            (None, Some(per_class)) => Ok(DataSource::Synthetic {
                per_class,
                seed: self.data_seed,
            }),
            _ => bail!("give exactly one of --data MANIFEST or --synthetic N"),
        }
    }
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long, default_value_t = 200)]
    train_per_class: usize,
    #[arg(long, default_value_t = 100)]
    test_per_class: usize,
    #[arg(long, default_value_t = 1)]
    split_seed: u64,
    /// Independent initialisations per network; the best test accuracy is kept
    #[arg(long, default_value_t = 1)]
    restarts: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 0.8)]
    eta: f64,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    /// Stop once an epoch's mean per-sample SSE falls below this
    #[arg(long, default_value_t = 0.01)]
    sse_tol: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl TrainArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            eta: self.eta,
            alpha: self.alpha,
            max_epochs: self.epochs,
            sse_tol: self.sse_tol,
            seed: self.seed,
        }
    }
}

fn parse_sets(text: &str) -> Result<Vec<FeatureSetId>> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(FeatureSetId::ALL.to_vec());
    }
    text.split(',')
        .map(|s| s.parse::<FeatureSetId>().map_err(Into::into))
        .collect()
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn experiment(data: &DataArgs, split: &SplitArgs, train: &TrainArgs) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        data: data.source()?,
        train_per_class: split.train_per_class,
        test_per_class: split.test_per_class,
        split_seed: split.split_seed,
        train: train.config(),
        restarts: split.restarts,
        ..ExperimentConfig::default()
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            per_class,
            seed,
            out,
            format,
        } => {
            if per_class == 0 {
                bail!("--per-class must be at least 1");
            }
            let variant = match format.to_ascii_lowercase().as_str() {
                "p1" => PbmVariant::P1,
                "p4" => PbmVariant::P4,
                other => bail!("unknown PBM format `{other}` (expected p1 or p4)"),
            };
            let ds = generate_synthetic(per_class, seed);
            let manifest = write_dataset(&ds, &out, variant).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} samples, manifest {}", ds.len(), manifest.display());
        }
        Command::Extract { data, set, out } => {
            let ds = data.source()?.load()?;
            let samples = extract_samples(&ds, set)?;
            write_file(&out, write_feature_csv(&samples, set.spec().dimension))?;
            println!(
                "wrote {} rows of {} features to {}",
                samples.len(),
                set.spec().dimension,
                out.display()
            );
        }
        Command::Train {
            data,
            set,
            hidden,
            train,
            model_out,
        } => {
            let ds = data.source()?.load()?;
            let samples = extract_samples(&ds, set)?;
            let cfg = train.config();
            let hidden = hidden.unwrap_or_else(|| harness::default_hidden(set));
            let mut model = MlpModel::init(set.spec().dimension, hidden, 10, cfg.seed)?;
            let history = model.train(&samples, &cfg)?;
            let eval = model.evaluate(&samples)?;
            write_file(&model_out, model.save())?;
            println!(
                "{} trained {} epochs, final SSE {:.6}, training accuracy {:.2}%",
                model.architecture(),
                history.epochs_run(),
                history.epoch_sse.last().copied().unwrap_or(f64::NAN),
                eval.accuracy * 100.0
            );
        }
        Command::Eval { model, data, set } => {
            let text = std::fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let model = MlpModel::load(&text)?;
            let ds = data.source()?.load()?;
            let samples = extract_samples(&ds, set)?;
            let eval = model.evaluate(&samples)?;
            println!(
                "accuracy {:.2}% ({}/{})",
                eval.accuracy * 100.0,
                eval.correct(),
                eval.total()
            );
            print!("{}", format_confusion(&eval));
        }
        Command::Bench {
            data,
            split,
            sets,
            hidden,
            train,
            out,
        } => {
            let cfg = ExperimentConfig {
                sets: parse_sets(&sets)?,
                hidden,
                ..experiment(&data, &split, &train)?
            };
            let rows = harness::run_bench(&cfg)?;
            let report = write_bench_report(&rows);
            write_file(&out, &report)?;
            print!("{report}");
        }
        Command::Sweep {
            data,
            split,
            set,
            hidden,
            train,
            out,
        } => {
            let cfg = experiment(&data, &split, &train)?;
            let (rows, best) = harness::run_sweep(&cfg, set, &hidden)?;
            let report = write_sweep_report(&rows);
            write_file(&out, &report)?;
            print!("{report}");
            println!("best hidden size: {best}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
