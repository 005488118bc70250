use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bos_core::app::{
    cmd_inspect, cmd_predict, cmd_report, cmd_sweep, cmd_train, init_thread_pool, write_predictions_csv, AppError,
    ModelBundle, RunConfig,
};
use bos_core::classifiers::Method;
use bos_core::corpus::SchemeKind;
use bos_core::evaluation::Modality;

#[derive(Parser)]
#[command(name = "bos", version, about = "Bag-of-sounds hate-speech classification from text and speech")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and validate one model.
    Train(TrainArgs),
    /// Train every task x modality x method cell for each language.
    Sweep(SweepArgs),
    /// Predict labels for a manifest with a saved model.
    Predict(BundleArgs),
    /// Score a saved model against a manifest with gold labels.
    Report(BundleArgs),
    /// Print class distribution, split sizes and feature shapes.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for cached speech features.
    #[arg(long)]
    feature_cache: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, value_parser = parse_task)]
    task: Option<SchemeKind>,
    #[arg(long)]
    modality: Option<Modality>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    language: Option<String>,
    #[command(flatten)]
    common: Common,
    /// Output directory for model.json and reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// LANGUAGE=PATH, once per language.
    #[arg(long, required = true, value_parser = parse_language_manifest)]
    manifest: Vec<(String, PathBuf)>,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BundleArgs {
    /// Saved model.json.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    feature_cache: Option<PathBuf>,
    /// Output file (predict) or directory (report); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, value_parser = parse_task)]
    task: Option<SchemeKind>,
    #[arg(long)]
    language: Option<String>,
    #[command(flatten)]
    common: Common,
}

fn parse_task(s: &str) -> Result<SchemeKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "binary" => Ok(SchemeKind::Binary),
        "multiclass" => Ok(SchemeKind::Multiclass),
        _ => Err(format!("unknown task `{s}` (expected binary or multiclass)")),
    }
}

fn parse_language_manifest(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((lang, path)) if !lang.is_empty() && !path.is_empty() => Ok((lang.to_string(), PathBuf::from(path))),
        _ => Err(format!("expected LANGUAGE=PATH, got `{s}`")),
    }
}

fn base_config(common: &Common) -> Result<RunConfig, AppError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    if common.feature_cache.is_some() {
        cfg.feature_cache = common.feature_cache.clone();
    }
    Ok(cfg)
}

fn require_manifest(cfg: &RunConfig) -> Result<(), AppError> {
    if cfg.manifest_path.as_os_str().is_empty() {
        return Err(AppError::Usage("no manifest given (use --manifest or the config file)".into()));
    }
    Ok(())
}

fn write_or_print(path: Option<&PathBuf>, contents: &str) -> Result<(), AppError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
            }
            std::fs::write(p, contents).map_err(|e| io_err(p, e))
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn io_err(path: &std::path::Path, e: std::io::Error) -> AppError {
    AppError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    init_thread_pool()?;
    match cli.command {
        Command::Train(a) => {
            let mut cfg = base_config(&a.common)?;
            if let Some(m) = a.manifest {
                cfg.manifest_path = m;
            }
            cfg.task = a.task.unwrap_or(cfg.task);
            cfg.modality = a.modality.unwrap_or(cfg.modality);
            cfg.method = a.method.unwrap_or(cfg.method);
            if a.language.is_some() {
                cfg.language = a.language;
            }
            if a.out.is_some() {
                cfg.output_dir = a.out;
            }
            require_manifest(&cfg)?;
            let out = cmd_train(&cfg)?;
            print!("{}", out.report.to_text());
        }
        Command::Sweep(a) => {
            let mut cfg = base_config(&a.common)?;
            cfg.output_dir = Some(a.out);
            let outcome = cmd_sweep(&a.manifest, &cfg)?;
            print!("{}", outcome.summary_text());
        }
        Command::Predict(a) => {
            let bundle = ModelBundle::load(&a.model)?;
            let rows = cmd_predict(&bundle, &a.manifest, a.feature_cache.as_deref())?;
            write_or_print(a.out.as_ref(), &write_predictions_csv(&rows))?;
        }
        Command::Report(a) => {
            let bundle = ModelBundle::load(&a.model)?;
            let report = cmd_report(&bundle, &a.manifest, a.feature_cache.as_deref())?;
            match &a.out {
                Some(dir) => {
                    write_or_print(Some(&dir.join("report.csv")), &report.to_csv())?;
                    write_or_print(Some(&dir.join("report.txt")), &report.to_text())?;
                }
                None => print!("{}", report.to_text()),
            }
        }
        Command::Inspect(a) => {
            let mut cfg = base_config(&a.common)?;
            if let Some(m) = a.manifest {
                cfg.manifest_path = m;
            }
            cfg.task = a.task.unwrap_or(cfg.task);
            if a.language.is_some() {
                cfg.language = a.language;
            }
            require_manifest(&cfg)?;
            print!("{}", cmd_inspect(&cfg)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = AppError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
