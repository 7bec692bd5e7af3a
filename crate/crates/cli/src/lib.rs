//! Command-line front end: config loading, run orchestration, exports and
//! the small inspection subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use eagga_core::data::{self, DataError};
use eagga_core::detectors;
use eagga_core::eagga::{self, EaggaError, Flavor, RunConfig};
use eagga_core::gbm::BoostedModel;
use eagga_core::groupstruct::GroupStructure;
use eagga_core::measures::{self, ObjectiveVector};
use eagga_core::moo;
use rand::SeedableRng;
use thiserror::Error;

pub mod export;
pub mod manifest;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Runtime(format!("i/o error: {e}")),
            _ => CliError::Data(format!("csv error: {e}")),
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<EaggaError> for CliError {
    fn from(e: EaggaError) -> Self {
        match e {
            EaggaError::Data(d) => CliError::Data(d.to_string()),
            EaggaError::InvalidConfig(_) | EaggaError::UnknownFlavor(_) | EaggaError::BudgetZero => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eagga", version, about = "Multi-objective tuning of constrained gradient boosted trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the optimizer and export the Pareto front, trace and models.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// One of eagga, random_search, no_crossover, no_mutation, no_cross_mut, no_detectors.
        #[arg(long)]
        flavor: Option<String>,
        /// Fix max_depth = 2 for every candidate.
        #[arg(long = "max-depth-2")]
        max_depth_2: bool,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write detectors.csv into the output directory.
        #[arg(long)]
        dump_detectors: bool,
    },
    /// Hypervolume of a front file against the reference point (0,1,1,1).
    Hv {
        #[arg(long)]
        front: PathBuf,
    },
    /// NF, NI and NNM of a dumped model under a group structure.
    Measures {
        #[arg(long)]
        model: PathBuf,
        /// File holding a group structure in text form (or the text itself).
        #[arg(long)]
        groups: String,
        #[arg(long)]
        p: usize,
    },
    /// Print filter, interaction and monotonicity detector outputs.
    Detect {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Reads a JSON run configuration; unknown keys are rejected.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, data, target, out: dir, seed, flavor, max_depth_2, workers, dump_detectors } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(f) = flavor {
                cfg.flavor = Flavor::named(&f)?;
            }
            if max_depth_2 {
                cfg.max_depth = Some(2);
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let summary = run_and_export(&cfg, &data, &target, &dir, dump_detectors)?;
            writeln!(out, "{summary}")?;
        }
        Command::Hv { front } => {
            let points = export::read_front(&front)?;
            let hv = moo::hypervolume(&points, &ObjectiveVector::REFERENCE);
            writeln!(out, "{}", export::num(hv))?;
        }
        Command::Measures { model, groups, p } => {
            let text = fs::read_to_string(&model)
                .map_err(|e| CliError::Data(format!("cannot read model {}: {e}", model.display())))?;
            let model = BoostedModel::from_json(&text).map_err(|e| CliError::Data(format!("invalid model: {e}")))?;
            let spec = match fs::read_to_string(&groups) {
                Ok(s) => s,
                Err(_) if !Path::new(&groups).exists() => groups.clone(),
                Err(e) => return Err(CliError::Data(format!("cannot read groups {groups}: {e}"))),
            };
            let g: GroupStructure =
                spec.trim().parse().map_err(|e| CliError::Data(format!("invalid group structure: {e}")))?;
            if !g.is_valid(p) {
                return Err(CliError::Data(format!("group structure is not a partition of 0..{p}")));
            }
            if model.n_features != p {
                return Err(CliError::Data(format!("model has {} features, --p is {p}", model.n_features)));
            }
            let (nf, ni, nnm) = measures::interpretability(&model, &g, p);
            writeln!(out, "nf,ni,nnm")?;
            writeln!(out, "{},{},{}", export::num(nf), export::num(ni), export::num(nnm))?;
        }
        Command::Detect { data, target, seed } => {
            let ds = data::load_csv(&data, &target)?;
            let det = detectors::run_detectors(
                &ds,
                &detectors::DetectorConfig::default(),
                &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed),
            );
            write_detectors(&det, ds.feature_names(), out)?;
        }
    }
    Ok(())
}

fn write_detectors(det: &detectors::Detectors, names: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["feature", "info_gain", "mono_signed", "mono_probability", "sign"])?;
    for (j, name) in names.iter().enumerate() {
        w.write_record([
            name.clone(),
            export::num(det.filter.scores[j]),
            export::num(det.monotonicity.signed[j]),
            export::num(det.monotonicity.probability[j]),
            det.monotonicity.sign[j].to_string(),
        ])?;
    }
    let mut bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    bytes.push(b'\n');
    let mut w = csv::Writer::from_writer(bytes);
    let mut header = vec!["interaction".to_string()];
    header.extend(names.iter().cloned());
    w.write_record(&header)?;
    for (j, name) in names.iter().enumerate() {
        let mut row = vec![name.clone()];
        row.extend(det.interactions.matrix[j].iter().map(|&v| export::num(v)));
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    out.write_all(&bytes)?;
    Ok(())
}

/// Loads the data, runs the optimizer and writes every export under `dir`.
/// Returns a one-line summary.
pub fn run_and_export(
    cfg: &RunConfig,
    data_path: &Path,
    target: &str,
    dir: &Path,
    dump_detectors: bool,
) -> Result<String, CliError> {
    cfg.validate()?;
    let ds = data::load_csv(data_path, target)?;
    let bytes = fs::read(data_path)?;
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::Usage(format!("--out {} is not a directory", dir.display())));
    }
    fs::create_dir_all(dir)?;
    let mut manifest = manifest::RunManifest::start(cfg, data_path, target, &ds, &bytes);
    manifest.write(dir)?;
    let result = eagga::run(&ds, cfg)?;
    export::export_run(&result, dir)?;
    if dump_detectors {
        if let Some(det) = &result.detectors {
            let mut file = fs::File::create(dir.join("detectors.csv"))?;
            write_detectors(det, ds.feature_names(), &mut file)?;
        }
    }
    manifest.finish(result.n_evals());
    manifest.write(dir)?;
    Ok(format!(
        "{} evaluations, {} archive entries, final hypervolume {}",
        result.n_evals(),
        result.archive.len(),
        export::num(result.final_hypervolume())
    ))
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("EAGGA_LOG", "error");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}
