//! The `esm` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 training failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use esm_core::metrics::RejectionScores;
use esm_core::{DualStep, Hyperparams, SdpMode};
use serde::Serialize;

use crate::data::{load_dataset, make_synthetic, split_train_test, write_svmlight, SynthSpec};
use crate::error::{EsmError, Result};
use crate::eval::{grid_search, predict_dataset, score_all, train_model, write_grid_csv, CvConfig, GridSpec, DEFAULT_RHOS};
use crate::model_file::{HyperparamsRecord, ModelFile};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_TRAINING: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "esm", version, about = "Ellipsoidal separation classifier with rejection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it with a JSON training report.
    Train(TrainArgs),
    /// Write `index,r_plus,r_minus,label` for every point of a dataset.
    Predict(PredictArgs),
    /// Score a model on a labelled dataset, one CSV row per rejection cost.
    Eval(EvalArgs),
    /// Split, cross-validate a grid, refit the best cell and test it.
    Gridsearch(GridArgs),
    /// Write a synthetic two-class dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DualStepArg {
    Diminishing,
    Adaptive,
}

#[derive(Debug, Clone, Args)]
pub struct HyperArgs {
    #[arg(long, default_value_t = 0.01)]
    pub c1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c2: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c3: f64,
    #[arg(long, default_value_t = 10.0)]
    pub c4: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps_gs: f64,
    #[arg(long, default_value_t = 2)]
    pub r_inner: usize,
    #[arg(long, default_value_t = 30)]
    pub max_bundle_it: usize,
    #[arg(long, default_value_t = esm_core::classifier::DEFAULT_EPS_CLS)]
    pub eps_cls: f64,
    #[arg(long, default_value_t = 50)]
    pub max_outer: usize,
    /// Pin the top-left entry of the lifted matrix to 1.
    #[arg(long)]
    pub fix_s: bool,
    /// Keep at most this many segment pairs (stride subsampling).
    #[arg(long)]
    pub max_pairs: Option<usize>,
    /// Minimize the SDP block directly instead of by dual ascent.
    #[arg(long)]
    pub exact_sdp: bool,
    /// Step rule of the dual ascent.
    #[arg(long, value_enum, default_value_t = DualStepArg::Diminishing)]
    pub dual_step: DualStepArg,
}

impl HyperArgs {
    pub fn to_hyperparams(&self) -> Hyperparams {
        Hyperparams {
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            c4: self.c4,
            eps_gs: self.eps_gs,
            r_inner: self.r_inner,
            max_bundle_it: self.max_bundle_it,
            eps_cls: self.eps_cls,
            max_outer: self.max_outer,
            fix_s: self.fix_s,
            max_pairs: self.max_pairs,
            sdp_mode: if self.exact_sdp { SdpMode::ExactPrimal } else { SdpMode::DualAscent },
            dual_step: match self.dual_step {
                DualStepArg::Diminishing => DualStep::Diminishing,
                DualStepArg::Adaptive => DualStep::Adaptive,
            },
            ..Hyperparams::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset file; `.csv` is read as dense CSV, anything else as sparse
    /// `label index:value` text.
    #[arg(long)]
    pub data: PathBuf,
    /// Accept 0/1 and 2/4 class labels.
    #[arg(long)]
    pub remap_labels: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub model: PathBuf,
    /// Training report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Min-max scale features to [0, 1] before training.
    #[arg(long)]
    pub scale: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Batch prediction threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rejection cost; repeat for several rows.
    #[arg(long = "rho")]
    pub rhos: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Output directory for `grid.csv`, `report.json` and `model.json`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "rho")]
    pub rhos: Vec<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 3)]
    pub folds: usize,
    #[arg(long, default_value_t = 0.7)]
    pub train_frac: f64,
    #[arg(long)]
    pub scale: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [0.001, 0.01, 0.1])]
    pub grid_c1: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0, 100.0])]
    pub grid_c2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0, 100.0])]
    pub grid_c3: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0, 100.0])]
    pub grid_c4: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [15, 30, 50])]
    pub grid_max_bundle_it: Vec<usize>,
    /// Settings shared by all cells; the C's and max_bundle_it come from the
    /// grid.
    #[command(flatten)]
    pub hyper: HyperArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 150)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 10)]
    pub n_features: usize,
    #[arg(long, default_value_t = 1.0)]
    pub class_sep: f64,
    #[arg(long, default_value_t = 2)]
    pub clusters: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// JSON form of [`RejectionScores`]; `acc` is `null` when everything was
/// rejected.
#[derive(Debug, Clone, Serialize)]
pub struct ScoresRecord {
    pub rho: f64,
    pub ar: f64,
    pub acc: Option<f64>,
    pub wc: f64,
    pub mc: f64,
    pub rej: f64,
    pub n_wc: usize,
    pub n_mc: usize,
    pub n_rej: usize,
    pub total: usize,
}

impl From<&RejectionScores> for ScoresRecord {
    fn from(s: &RejectionScores) -> Self {
        ScoresRecord {
            rho: s.rho,
            ar: s.ar,
            acc: s.acc,
            wc: s.wc,
            mc: s.mc,
            rej: s.rej,
            n_wc: s.n_wc,
            n_mc: s.n_mc,
            n_rej: s.n_rej,
            total: s.total,
        }
    }
}

#[derive(Debug, Serialize)]
struct SdpStepRecord {
    phi: f64,
    dual_bound: Option<f64>,
    gap: Option<f64>,
    inner_nonconverged: usize,
}

#[derive(Debug, Serialize)]
struct TrainReportJson {
    dataset: String,
    n_points: usize,
    feature_dim: usize,
    n_pairs: usize,
    hyperparams: HyperparamsRecord,
    seed: u64,
    scaled: bool,
    phi_history: Vec<f64>,
    sdp_steps: Vec<SdpStepRecord>,
    outer_iterations: usize,
    converged: bool,
    degenerate: bool,
    reduced_plus: usize,
    reduced_minus: usize,
}

#[derive(Debug, Serialize)]
struct GridBest {
    rho: f64,
    hyperparams: Option<HyperparamsRecord>,
    cv_mean_ar: Option<f64>,
    test: Option<ScoresRecord>,
    degenerate: Option<bool>,
}

#[derive(Debug, Serialize)]
struct GridReportJson {
    dataset: String,
    seed: u64,
    train_frac: f64,
    folds: usize,
    train_size: usize,
    test_size: usize,
    cells: usize,
    failed_cells: usize,
    scaled: bool,
    best: Vec<GridBest>,
}

fn write_output(path: Option<&Path>, content: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| EsmError::io(p, e)),
        None => std::io::stdout().write_all(content).map_err(|e| EsmError::io("<stdout>", e)),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("report serializes");
    s.push(b'\n');
    s
}

fn rho_list(rhos: &[f64]) -> Vec<f64> {
    if rhos.is_empty() {
        DEFAULT_RHOS.to_vec()
    } else {
        rhos.to_vec()
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let started = Instant::now();
    let ds = load_dataset(&args.data.data, args.data.remap_labels)?;
    let hp = args.hyper.to_hyperparams();
    let (file, out) = train_model(&ds, &hp, args.scale)?;
    file.save(&args.model)?;
    let report = &out.report;
    let nonconverged: usize = report.sdp_steps.iter().map(|s| s.inner_nonconverged).sum();
    if nonconverged > 0 {
        warn(&format!("{nonconverged} inner SDP solves hit the iteration cap"));
    }
    if !report.converged {
        warn("outer loop stopped at max_outer before meeting eps_gs");
    }
    if file.model.is_degenerate() {
        warn("trained model is degenerate and rejects every point");
    }
    let json = TrainReportJson {
        dataset: ds.name.clone(),
        n_points: ds.len(),
        feature_dim: ds.feature_dim,
        n_pairs: report.n_pairs,
        hyperparams: (&hp).into(),
        seed: args.seed,
        scaled: args.scale,
        phi_history: report.phi_history.clone(),
        sdp_steps: report
            .sdp_steps
            .iter()
            .map(|s| SdpStepRecord {
                phi: s.phi,
                dual_bound: s.dual_bound,
                gap: s.gap,
                inner_nonconverged: s.inner_nonconverged,
            })
            .collect(),
        outer_iterations: report.outer_iterations,
        converged: report.converged,
        degenerate: file.model.is_degenerate(),
        reduced_plus: file.model.xbar_plus().len(),
        reduced_minus: file.model.xbar_minus().len(),
    };
    write_output(args.out.as_deref(), &to_json(&json))?;
    eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let model = ModelFile::load(&args.model)?;
    let ds = load_dataset(&args.data.data, args.data.remap_labels)?;
    check_dim(&model, ds.feature_dim)?;
    if model.model.is_degenerate() {
        warn("model is degenerate: every point is rejected");
    }
    let points = model.prepare(&ds.points);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| EsmError::InvalidArgument(e.to_string()))?;
    let predictions = pool.install(|| {
        use rayon::prelude::*;
        points.par_iter().map(|p| model.model.predict_detailed(p)).collect::<std::result::Result<Vec<_>, _>>()
    })?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "r_plus", "r_minus", "label"])?;
    for (i, p) in predictions.iter().enumerate() {
        let (rp, rm) = match &p.scores {
            Some(s) => (s.r_plus.to_string(), s.r_minus.to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([i.to_string(), rp, rm, p.label.as_i8().to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| EsmError::InvalidArgument(e.to_string()))?;
    write_output(args.out.as_deref(), &bytes)
}

fn check_dim(model: &ModelFile, dim: usize) -> Result<()> {
    let expected = model.model.dim();
    if expected != dim {
        return Err(EsmError::Core(esm_core::Error::DimensionMismatch { expected, found: dim }));
    }
    Ok(())
}

/// Scores as CSV rows `rho,ar,acc,wc,mc,rej,n_wc,n_mc,n_rej,total`.
pub fn scores_csv(scores: &[RejectionScores]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rho", "ar", "acc", "wc", "mc", "rej", "n_wc", "n_mc", "n_rej", "total"])?;
    for s in scores {
        w.write_record([
            s.rho.to_string(),
            s.ar.to_string(),
            s.acc.map(|a| a.to_string()).unwrap_or_default(),
            s.wc.to_string(),
            s.mc.to_string(),
            s.rej.to_string(),
            s.n_wc.to_string(),
            s.n_mc.to_string(),
            s.n_rej.to_string(),
            s.total.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| EsmError::InvalidArgument(e.to_string()))
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let model = ModelFile::load(&args.model)?;
    let ds = load_dataset(&args.data.data, args.data.remap_labels)?;
    check_dim(&model, ds.feature_dim)?;
    let predicted = predict_dataset(&model, &ds)?;
    let scores = score_all(&ds.labels, &predicted, &rho_list(&args.rhos))?;
    write_output(args.out.as_deref(), &scores_csv(&scores)?)
}

pub fn cmd_gridsearch(args: &GridArgs) -> Result<()> {
    let started = Instant::now();
    let ds = load_dataset(&args.data.data, args.data.remap_labels)?;
    let (train, test) = split_train_test(&ds, args.train_frac, args.seed)?;
    let grid = GridSpec {
        c1: args.grid_c1.clone(),
        c2: args.grid_c2.clone(),
        c3: args.grid_c3.clone(),
        c4: args.grid_c4.clone(),
        max_bundle_it: args.grid_max_bundle_it.clone(),
    };
    let cfg = CvConfig { folds: args.folds, rhos: rho_list(&args.rhos), seed: args.seed, scale: args.scale };
    let base = args.hyper.to_hyperparams();
    let result = grid_search(&train, &grid, &base, &cfg, args.jobs)?;

    fs::create_dir_all(&args.out).map_err(|e| EsmError::io(&args.out, e))?;
    let grid_path = args.out.join("grid.csv");
    let mut table = Vec::new();
    write_grid_csv(&result, &mut table)?;
    fs::write(&grid_path, table).map_err(|e| EsmError::io(&grid_path, e))?;

    let mut best = Vec::new();
    let mut first_model: Option<ModelFile> = None;
    for (r, &rho) in cfg.rhos.iter().enumerate() {
        let Some(idx) = result.best[r] else {
            best.push(GridBest { rho, hyperparams: None, cv_mean_ar: None, test: None, degenerate: None });
            continue;
        };
        let row = &result.rows[idx];
        let cv = row.outcome.as_ref().expect("best cell succeeded");
        let (model, _) = train_model(&train, &row.hp, args.scale)?;
        let predicted = predict_dataset(&model, &test)?;
        let scores = esm_core::metrics::score(&test.labels, &predicted, rho)?;
        best.push(GridBest {
            rho,
            hyperparams: Some((&row.hp).into()),
            cv_mean_ar: Some(cv.mean_ar[r]),
            test: Some((&scores).into()),
            degenerate: Some(model.model.is_degenerate()),
        });
        if first_model.is_none() {
            first_model = Some(model);
        }
    }
    if let Some(m) = &first_model {
        m.save(&args.out.join("model.json"))?;
    } else {
        warn("every grid cell failed; no model written");
    }
    let report = GridReportJson {
        dataset: ds.name.clone(),
        seed: args.seed,
        train_frac: args.train_frac,
        folds: args.folds,
        train_size: train.len(),
        test_size: test.len(),
        cells: result.rows.len(),
        failed_cells: result.rows.iter().filter(|r| r.outcome.is_err()).count(),
        scaled: args.scale,
        best,
    };
    let report_path = args.out.join("report.json");
    fs::write(&report_path, to_json(&report)).map_err(|e| EsmError::io(&report_path, e))?;
    eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        n_samples: args.n_samples,
        n_features: args.n_features,
        class_sep: args.class_sep,
        n_clusters_per_class: args.clusters,
        seed: args.seed,
    };
    let ds = make_synthetic(&spec)?;
    let mut buf = Vec::new();
    write_svmlight(&ds, &mut buf).map_err(|e| EsmError::io(&args.out, e))?;
    fs::write(&args.out, buf).map_err(|e| EsmError::io(&args.out, e))
}

pub fn exit_code(err: &EsmError) -> i32 {
    if err.is_training_failure() {
        EXIT_TRAINING
    } else {
        EXIT_DATA
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Gridsearch(a) => cmd_gridsearch(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
