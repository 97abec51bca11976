//! Command-line entrypoint: dataset generation, training, evaluation,
//! parameter sweeps, and complexity reports.
//!
//! A run is specified by a preset (`--preset paper|desk`), an optional TOML
//! overlay (`--config`), and an optional seed override (`--seed`). Identical
//! invocations produce bit-identical datasets, weight files, and CSVs.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O or file-format error,
//! 4 training divergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use scnet_core::config::{Preset, RunConfig};
use scnet_core::cvnn::complex_param_total;
use scnet_core::dataset::{generate, Dataset};
use scnet_core::error::Error;
use scnet_core::eval::{
    complex_flops, dataset_nmse, real_flops, run_sweep, train_split, write_sweep_outputs,
    ModelKind, TrainedModel,
};
use scnet_core::optim::{make_pool, write_metrics_csv};
use scnet_core::rng::derive_seed;

#[derive(Parser)]
#[command(
    name = "scnet",
    version,
    about = "Downlink CSI prediction from uplink estimates: data, training, evaluation, sweeps"
)]
struct Cli {
    /// TOML file overriding preset keys (unknown keys are rejected).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Base configuration: full-scale "paper" or laptop-scale "desk".
    #[arg(long, global = true, default_value = "paper", value_parser = parse_preset)]
    preset: Preset,

    /// Master seed override; all run randomness derives from it.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset file from the configured scenario.
    Generate {
        /// Output dataset path.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Train a model on a dataset file; writes weights and per-epoch CSV.
    Train {
        /// Input dataset path.
        #[arg(long, value_name = "PATH")]
        dataset: PathBuf,
        /// Output weight-file path.
        #[arg(long, value_name = "PATH")]
        model_out: PathBuf,
        /// Output per-epoch metrics CSV path.
        #[arg(long, value_name = "PATH")]
        metrics_out: PathBuf,
        /// Which model to train.
        #[arg(long, value_enum, default_value_t = KindArg::Scnet)]
        model: KindArg,
    },
    /// Evaluate a saved model (kind detected from the file) on a dataset.
    Eval {
        /// Input dataset path.
        #[arg(long, value_name = "PATH")]
        dataset: PathBuf,
        /// Saved model path (complex or baseline weights).
        #[arg(long, value_name = "PATH")]
        model: PathBuf,
        /// Portion of the file to evaluate.
        #[arg(long, value_enum, default_value_t = SplitArg::All)]
        split: SplitArg,
    },
    /// Sweep one control variable; writes aggregated CSV plus a sidecar.
    Sweep {
        /// Control variable: angular_spread, freq_diff, or path_count.
        #[arg(long, value_name = "NAME")]
        control: String,
        /// Output CSV path (metadata sidecar lands next to it).
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Report multiplication and parameter counts for both architectures.
    Flops,
}

/// CLI-facing model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Scnet,
    Fnn,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> ModelKind {
        match k {
            KindArg::Scnet => ModelKind::Scnet,
            KindArg::Fnn => ModelKind::Fnn,
        }
    }
}

/// Which part of a dataset file an evaluation covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    /// The whole file.
    All,
    /// The training portion of the configured split.
    Train,
    /// The held-out portion of the configured split.
    Eval,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse::<Preset>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Exit codes: file/format problems are distinguishable from bad settings
/// and from runs that blew up numerically.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::BadMagic { .. }
        | Error::UnsupportedVersion { .. }
        | Error::Truncated(_)
        | Error::Corrupt(_) => 3,
        Error::TrainingDiverged { .. } => 4,
        _ => 2,
    }
}

/// Prefixes bare I/O errors with the path they came from.
fn annotate_io(e: Error, path: &std::path::Path) -> Error {
    match e {
        Error::Io(io) => {
            Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display())))
        }
        other => other,
    }
}

fn load_dataset(path: &PathBuf) -> Result<Dataset, Error> {
    Dataset::load(path).map_err(|e| annotate_io(e, path))
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path, cli.preset)?,
        None => cli.preset.config(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = resolve_config(&cli)?;
    match &cli.command {
        Command::Generate { out } => cmd_generate(&cfg, out),
        Command::Train { dataset, model_out, metrics_out, model } => {
            cmd_train(&cfg, dataset, model_out, metrics_out, (*model).into())
        }
        Command::Eval { dataset, model, split } => cmd_eval(&cfg, dataset, model, *split),
        Command::Sweep { control, out } => cmd_sweep(&cfg, control, out),
        Command::Flops => cmd_flops(&cfg),
    }
}

// ---- Commands ----

fn cmd_generate(cfg: &RunConfig, out: &PathBuf) -> Result<(), Error> {
    let settings = cfg.run_settings()?;
    // Same derivation a training run uses, so a generated file feeds
    // `train` into the exact run an in-process pipeline would produce.
    let master = derive_seed(cfg.master_seed, "dataset", 0);
    let gen = generate(&settings.gen_params(master))?;
    gen.dataset.save(out)?;
    let meta = &gen.dataset.meta;
    println!(
        "wrote {} samples (M={}, P={}, f_up {:.4e} Hz, f_down {:.4e} Hz) to {}",
        meta.count,
        meta.num_antennas,
        meta.path_count,
        meta.f_up,
        meta.f_down,
        out.display()
    );
    Ok(())
}

fn cmd_train(
    cfg: &RunConfig,
    dataset: &PathBuf,
    model_out: &PathBuf,
    metrics_out: &PathBuf,
    kind: ModelKind,
) -> Result<(), Error> {
    let settings = cfg.run_settings()?;
    let full = load_dataset(dataset)?;
    if full.dim() != cfg.array.num_antennas {
        return Err(Error::InvalidConfiguration(format!(
            "dataset {} has M={} but the config expects M={}",
            dataset.display(),
            full.dim(),
            cfg.array.num_antennas
        )));
    }
    warn_on_meta_mismatch(cfg, &full);

    let (tr, ev) = full.split(cfg.dataset.train_fraction)?;
    let pool = make_pool(cfg.effective_workers()?)?;
    let (model, report, untrained_nmse) =
        train_split(&settings, kind, cfg.master_seed, &tr, &ev, &pool)?;

    model.save(model_out)?;
    write_metrics_csv(metrics_out, &report.epochs)?;

    let first = report.epochs.first().map_or(f64::NAN, |e| e.train_loss);
    let last = report.epochs.last().map_or(f64::NAN, |e| e.train_loss);
    println!(
        "trained {} for {} epochs on {} samples ({} held out)",
        model.kind_name(),
        report.epochs.len(),
        tr.len(),
        ev.len()
    );
    println!("train loss {first:.6e} -> {last:.6e}");
    println!("eval nmse {untrained_nmse:.6e} (untrained) -> {:.6e}", report.final_eval_nmse);
    println!("wrote {} and {}", model_out.display(), metrics_out.display());
    Ok(())
}

/// Flags config/file disagreements that change what the numbers mean but
/// would otherwise train silently (the sample data itself is fixed).
fn warn_on_meta_mismatch(cfg: &RunConfig, ds: &Dataset) {
    let meta = &ds.meta;
    let mut diffs: Vec<String> = Vec::new();
    if meta.f_up != cfg.dataset.f_up_hz {
        diffs.push(format!("f_up {} vs {}", meta.f_up, cfg.dataset.f_up_hz));
    }
    if meta.f_down != cfg.dataset.f_down_hz {
        diffs.push(format!("f_down {} vs {}", meta.f_down, cfg.dataset.f_down_hz));
    }
    if meta.path_count as usize != cfg.scenario.path_count {
        diffs.push(format!("path_count {} vs {}", meta.path_count, cfg.scenario.path_count));
    }
    if meta.angular_spread != cfg.scenario.angular_spread_deg.to_radians() {
        diffs.push(format!(
            "angular_spread {} rad vs {} rad",
            meta.angular_spread,
            cfg.scenario.angular_spread_deg.to_radians()
        ));
    }
    if meta.snr_db != cfg.estimation.snr_db {
        diffs.push(format!("snr_db {} vs {}", meta.snr_db, cfg.estimation.snr_db));
    }
    if !diffs.is_empty() {
        eprintln!(
            "warning: dataset header disagrees with the config ({}); training continues on the file's data",
            diffs.join(", ")
        );
    }
}

fn cmd_eval(
    cfg: &RunConfig,
    dataset: &PathBuf,
    model_path: &PathBuf,
    split: SplitArg,
) -> Result<(), Error> {
    let full = load_dataset(dataset)?;
    let ds = match split {
        SplitArg::All => full,
        SplitArg::Train => full.split(cfg.dataset.train_fraction)?.0,
        SplitArg::Eval => full.split(cfg.dataset.train_fraction)?.1,
    };
    let model = TrainedModel::load_auto(model_path).map_err(|e| annotate_io(e, model_path))?;
    let report = dataset_nmse(&model, &ds)?;
    println!(
        "model {}, samples {}, nmse {:.6e}{}",
        model.kind_name(),
        report.used,
        report.nmse,
        if report.excluded > 0 {
            format!(" ({} zero-power samples excluded)", report.excluded)
        } else {
            String::new()
        }
    );
    Ok(())
}

fn cmd_sweep(cfg: &RunConfig, control: &str, out: &PathBuf) -> Result<(), Error> {
    let spec = cfg.sweep_spec(cfg.sweep_control(control)?)?;
    let pool = make_pool(cfg.effective_workers()?)?;
    let result = run_sweep(&spec, &pool)?;
    write_sweep_outputs(out, &result)?;
    println!(
        "swept {} over {} rows ({} seeds per point); wrote {} and {}.meta.json",
        spec.control.name(),
        result.rows.len(),
        spec.seeds.len(),
        out.display(),
        out.display()
    );
    Ok(())
}

fn cmd_flops(cfg: &RunConfig) -> Result<(), Error> {
    let scnet = cfg.scnet_sizes();
    let fnn = cfg.fnn_sizes();
    let scnet_params = 2 * complex_param_total(&scnet);
    let fnn_params: usize = fnn.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
    println!(
        "scnet: sizes {:?}, flops {} ({} complex multiplies x 4), real parameters {}",
        scnet,
        complex_flops(&scnet),
        real_flops(&scnet),
        scnet_params
    );
    println!(
        "fnn:   sizes {:?}, flops {}, real parameters {}",
        fnn,
        real_flops(&fnn),
        fnn_params
    );
    Ok(())
}
