//! Command-line interface. `run` is the whole program minus process exit, so
//! tests can drive it in-process.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pacdmc_core::info::mutual_information;
use pacdmc_core::learners::{
    adversarial_channel, adversarial_channel_with_tau, optimal_alpha, rho, vsa_sample_size,
    vsa_sample_size_bound, vsee_conditions, vsee_nu, Adversary,
};
use pacdmc_core::lmrate::lm_rate;
use pacdmc_core::sampling::RNG_ALGORITHM;
use pacdmc_core::{
    DecodingMetric, ExchangeableLearner, PlugIn, SolverConfig, Status, VirtualSample, VseeParams,
};
use serde::Serialize;
use serde_json::json;

use crate::exact_par::{self, ExactError};
use crate::files::{self, ChannelSpec, FileError};
use crate::manifest::{manifest_path, RunManifest};
use crate::montecarlo::{self, ExperimentSpec};
use crate::output;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NOT_CERTIFIED: u8 = 3;
pub const EXIT_CAP: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "pacdmc", version, about = "Learn decoding metrics and code rates for DMCs")]
pub struct Cli {
    /// Worker threads for exact enumeration and Monte Carlo trials.
    #[arg(long, global = true, env = "PACDMC_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// LM rate of a decoding metric with its dual certificate.
    Lmrate(LmrateArgs),
    /// Exact distribution of the LM rate of a learner at sample size n.
    ExactCdf(ExactCdfArgs),
    /// Success probability of the virtual-sample learner over a grid of alpha.
    AlphaSweep(AlphaSweepArgs),
    /// Seeded VSEE trials: LM rate and estimated rate per trial.
    VseeMc(VseeMcArgs),
    /// Rule-of-thumb alpha and the worst-case sample-size conditions.
    SampleSize(SampleSizeArgs),
    /// Channel on which plug-in learners fail, with the failure bound.
    Adversary(AdversaryArgs),
    /// Replays the command recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-6)]
    pub gap_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub feas_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            gap_tol: self.gap_tol,
            feas_tol: self.feas_tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct LmrateArgs {
    /// Channel JSON file, or `paper-eq16` for the built-in 2 x 3 example.
    #[arg(long, default_value = files::BUILTIN_EQ16)]
    pub channel: String,
    /// `ml` for k = w, or a metric JSON file.
    #[arg(long, default_value = "ml")]
    pub metric: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write the certificate as JSON.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExactCdfArgs {
    #[arg(long, default_value = files::BUILTIN_EQ16)]
    pub channel: String,
    /// `plugin` or `vsa:ALPHA`.
    #[arg(long)]
    pub learner: String,
    #[arg(long)]
    pub n: u64,
    /// Refuse when the number of compositions exceeds this.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u128,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaSweepArgs {
    #[arg(long, default_value = files::BUILTIN_EQ16)]
    pub channel: String,
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Comma-separated; defaults to 0.5, 0.5325, 0.55, 0.6, ..., 0.95.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Trials per alpha when the sweep falls back to sampling.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = montecarlo::EXACT_SWEEP_CAP)]
    pub exact_cap: u128,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct VseeMcArgs {
    #[arg(long, default_value = files::BUILTIN_EQ16)]
    pub channel: String,
    #[arg(long, default_value_t = 3500)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5325)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.45)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleSizeArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub x_size: usize,
    #[arg(long, default_value_t = 3)]
    pub y_size: usize,
    /// Virtual-sample exponent; defaults to the rule-of-thumb value.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// VSEE margin exponent; enables the VSEE conditions.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Sample size at which to evaluate the VSEE conditions.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AdversaryArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 2)]
    pub x_size: usize,
    #[arg(long, default_value_t = 2)]
    pub y_size: usize,
    /// Noise level; defaults to the midpoint of the feasible interval.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Also compute the exact probability that the plug-in LM rate is zero.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Write to this path instead of the recorded output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Io(_) => 1,
        }
    }
}

impl From<pacdmc_core::Error> for CliError {
    fn from(e: pacdmc_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::TooManyCompositions { .. } => CliError::Cap(e.to_string()),
            ExactError::Core(e) => e.into(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// Outputs were written but some LM rate was not certified.
    NotCertified,
}

struct Report {
    outcome: Outcome,
    text: String,
    results: serde_json::Value,
    seed: Option<u64>,
    /// File written by the command itself, if any.
    data_output: Option<PathBuf>,
}

/// Parses `args` (without the program name) and runs the command, writing
/// the human-readable report to `out`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send)) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(std::iter::once(OsString::from("pacdmc")).chain(args.clone()))
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let args: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match cli.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Validation(e.to_string()))?;
            pool.install(|| execute(&cli.command, &args, out))
        }
        None => execute(&cli.command, &args, out),
    }
}

fn execute(command: &Command, args: &[String], out: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    if let Command::Rerun(r) = command {
        return rerun(r, out);
    }
    let start = Instant::now();
    let report = match command {
        Command::Lmrate(a) => cmd_lmrate(a)?,
        Command::ExactCdf(a) => cmd_exact_cdf(a)?,
        Command::AlphaSweep(a) => cmd_alpha_sweep(a)?,
        Command::VseeMc(a) => cmd_vsee_mc(a)?,
        Command::SampleSize(a) => cmd_sample_size(a)?,
        Command::Adversary(a) => cmd_adversary(a)?,
        Command::Rerun(_) => unreachable!(),
    };
    out.write_all(report.text.as_bytes())?;

    let report_output = match command {
        Command::Lmrate(a) => a.output.clone(),
        Command::SampleSize(a) => a.output.clone(),
        Command::Adversary(a) => a.output.clone(),
        _ => None,
    };
    if let Some(path) = &report_output {
        let text = serde_json::to_string_pretty(&report.results).map_err(io::Error::other)?;
        std::fs::write(path, text + "\n")?;
    }
    if let Some(path) = report.data_output.as_ref().or(report_output.as_ref()) {
        let params = serde_json::to_value(command).map_err(io::Error::other)?;
        let manifest = RunManifest {
            tool: "pacdmc".to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: params["command"].as_str().unwrap_or_default().to_owned(),
            args: args.to_vec(),
            params,
            seed: report.seed,
            rng: report.seed.map(|_| RNG_ALGORITHM.to_owned()),
            results: report.results,
            outputs: vec![path.display().to_string()],
            wall_time_seconds: start.elapsed().as_secs_f64(),
        };
        manifest.write(&manifest_path(path))?;
    }
    Ok(report.outcome)
}

fn rerun(r: &RerunArgs, out: &mut (dyn Write + Send)) -> Result<Outcome, CliError> {
    let manifest = RunManifest::read(&r.manifest)
        .map_err(|e| CliError::Validation(format!("{}: {e}", r.manifest.display())))?;
    let mut args = manifest.args.clone();
    if let Some(new) = &r.output {
        replace_output(&mut args, &new.display().to_string());
    }
    run(args, out)
}

fn replace_output(args: &mut Vec<String>, value: &str) {
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if (a == "--output" || a == "-o") && i + 1 < args.len() {
            args[i + 1] = value.to_owned();
            return;
        }
        if a.starts_with("--output=") {
            args[i] = format!("--output={value}");
            return;
        }
        i += 1;
    }
    args.push("--output".to_owned());
    args.push(value.to_owned());
}

fn load_metric(source: &str, spec: &ChannelSpec) -> Result<DecodingMetric, CliError> {
    if source == "ml" {
        return Ok(DecodingMetric::from_channel(&spec.w));
    }
    Ok(files::load_metric(Path::new(source))?)
}

fn cmd_lmrate(a: &LmrateArgs) -> Result<Report, CliError> {
    let spec = files::load_channel(&a.channel)?;
    let k = load_metric(&a.metric, &spec)?;
    let cert = lm_rate(&spec.p, &spec.w, &k, &a.solver.config())?;
    let info = mutual_information(&spec.p, &spec.w)?;
    let text = format!(
        "value         {}\n\
         dual_value    {}\n\
         gap           {:e}\n\
         status        {}\n\
         theta         {}\n\
         marginal_res  {:e}\n\
         metric_res    {:e}\n\
         iterations    {}\n\
         I(p,w)        {}\n",
        output::sig9(cert.value),
        output::sig9(cert.dual_value),
        cert.gap,
        cert.status.as_str(),
        output::sig9(cert.dual_theta),
        cert.marginal_residual,
        cert.metric_residual,
        cert.iterations,
        output::sig9(info),
    );
    let results = json!({
        "value": cert.value,
        "dual_value": cert.dual_value,
        "gap": cert.gap,
        "status": cert.status.as_str(),
        "dual_theta": cert.dual_theta,
        "dual_a": cert.dual_a,
        "marginal_residual": cert.marginal_residual,
        "metric_residual": cert.metric_residual,
        "iterations": cert.iterations,
        "mutual_information": info,
    });
    Ok(Report {
        outcome: if cert.status == Status::IterationLimit {
            Outcome::NotCertified
        } else {
            Outcome::Done
        },
        text,
        results,
        seed: None,
        data_output: None,
    })
}

fn parse_learner(id: &str) -> Result<Box<dyn ExchangeableLearner>, CliError> {
    if id == "plugin" {
        return Ok(Box::new(PlugIn));
    }
    if let Some(alpha) = id.strip_prefix("vsa:") {
        let alpha: f64 = alpha
            .parse()
            .map_err(|_| CliError::Validation(format!("bad alpha in learner `{id}`")))?;
        return Ok(Box::new(VirtualSample { alpha }));
    }
    Err(CliError::Validation(format!(
        "unknown learner `{id}`; expected `plugin` or `vsa:ALPHA`"
    )))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_exact_cdf(a: &ExactCdfArgs) -> Result<Report, CliError> {
    let spec = files::load_channel(&a.channel)?;
    let learner = parse_learner(&a.learner)?;
    let pmf = exact_par::exact_rate_pmf(
        learner.as_ref(),
        &spec.p,
        &spec.w,
        a.n,
        &a.solver.config(),
        a.cap,
    )?;
    output::write_exact_cdf(create(&a.output)?, &pmf)?;
    let info = mutual_information(&spec.p, &spec.w)?;
    let text = format!(
        "atoms              {}\n\
         P[rate = 0]        {}\n\
         uncertified mass   {}\n\
         I(p,w)             {}\n",
        pmf.atoms().len(),
        output::sig9(pmf.prob_zero()),
        output::sig9(pmf.uncertified_mass()),
        output::sig9(info),
    );
    Ok(Report {
        outcome: if pmf.uncertified_count() > 0 {
            Outcome::NotCertified
        } else {
            Outcome::Done
        },
        text,
        results: json!({
            "atoms": pmf.atoms().len(),
            "prob_zero": pmf.prob_zero(),
            "total_mass": pmf.total_mass(),
            "uncertified_mass": pmf.uncertified_mass(),
            "uncertified_count": pmf.uncertified_count(),
            "mutual_information": info,
        }),
        seed: None,
        data_output: Some(a.output.clone()),
    })
}

fn cmd_alpha_sweep(a: &AlphaSweepArgs) -> Result<Report, CliError> {
    let channel = files::load_channel(&a.channel)?;
    let alphas = a.alphas.clone().unwrap_or_else(montecarlo::default_alphas);
    let spec = ExperimentSpec {
        p: channel.p,
        w: channel.w,
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        epsilon: a.epsilon,
        solver: a.solver.config(),
    };
    let rows = montecarlo::run_vsa_sweep(&spec, &alphas, a.exact_cap)?;
    output::write_alpha_sweep(create(&a.output)?, &rows)?;
    let info = mutual_information(&spec.p, &spec.w)?;
    let mut text = String::from("alpha      success_prob\n");
    for r in &rows {
        text.push_str(&format!("{:<10} {}\n", output::sig9(r.alpha), output::sig9(r.success_prob)));
    }
    let sampled = rows
        .iter()
        .any(|r| r.method == montecarlo::SweepMethod::MonteCarlo);
    let uncertified = rows.iter().any(|r| r.uncertified > 0.0);
    Ok(Report {
        outcome: if uncertified {
            Outcome::NotCertified
        } else {
            Outcome::Done
        },
        text,
        results: json!({
            "mutual_information": info,
            "epsilon": a.epsilon,
            "method": if sampled { "monte-carlo" } else { "exact" },
        }),
        seed: sampled.then_some(a.seed),
        data_output: Some(a.output.clone()),
    })
}

fn cmd_vsee_mc(a: &VseeMcArgs) -> Result<Report, CliError> {
    let channel = files::load_channel(&a.channel)?;
    let spec = ExperimentSpec {
        p: channel.p,
        w: channel.w,
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        epsilon: a.epsilon,
        solver: a.solver.config(),
    };
    let params = VseeParams {
        alpha: a.alpha,
        beta: a.beta,
    };
    let summary = montecarlo::run_vsee_trials(&spec, params)?;
    output::write_vsee_trials(create(&a.output)?, &summary.records)?;
    let text = format!(
        "trials             {}\n\
         success fraction   {}\n\
         uncertified        {}\n\
         I(p,w)             {}\n",
        summary.records.len(),
        output::sig9(summary.success_fraction()),
        summary.uncertified,
        output::sig9(summary.mutual_information),
    );
    Ok(Report {
        outcome: if summary.uncertified > 0 {
            Outcome::NotCertified
        } else {
            Outcome::Done
        },
        text,
        results: json!({
            "mutual_information": summary.mutual_information,
            "epsilon": a.epsilon,
            "success_fraction": summary.success_fraction(),
            "successes": summary.successes,
            "uncertified": summary.uncertified,
        }),
        seed: Some(a.seed),
        data_output: Some(a.output.clone()),
    })
}

fn cmd_sample_size(a: &SampleSizeArgs) -> Result<Report, CliError> {
    let thumb = optimal_alpha(a.epsilon, a.delta, a.x_size, a.y_size)?;
    let alpha = a.alpha.unwrap_or(thumb.alpha);
    let bound = vsa_sample_size_bound(alpha, a.epsilon, a.delta, a.x_size, a.y_size)?;
    let n_vsa = vsa_sample_size(alpha, a.epsilon, a.delta, a.x_size, a.y_size).ok();
    let j = (a.x_size * a.y_size) as f64;
    let accuracy_term = (j / (a.epsilon * std::f64::consts::LN_2)).powf(1.0 / (1.0 - alpha));
    let confidence_term = (0.5 * (j / a.delta).ln()).powf(1.0 / (2.0 * alpha - 1.0));
    let mut text = format!(
        "zeta               {}\n\
         eta                {}\n\
         alpha*             {}\n\
         nu(alpha*)         {}\n\
         alpha              {}\n\
         accuracy term      {}\n\
         confidence term    {}\n\
         vsa sample size    {}\n",
        output::sig9(thumb.zeta),
        output::sig9(thumb.eta),
        output::sig9(thumb.alpha),
        output::sig9(thumb.nu),
        output::sig9(alpha),
        output::sig9(accuracy_term),
        output::sig9(confidence_term),
        n_vsa.map_or_else(|| "overflow".to_owned(), |n| n.to_string()),
    );
    let mut results = json!({
        "zeta": thumb.zeta,
        "eta": thumb.eta,
        "alpha_star": thumb.alpha,
        "nu_alpha_star": thumb.nu,
        "alpha": alpha,
        "accuracy_term": accuracy_term,
        "confidence_term": confidence_term,
        "vsa_sample_size_bound": bound,
        "vsa_sample_size": n_vsa,
    });
    if let Some(beta) = a.beta {
        let nu = vsee_nu(alpha, beta, a.epsilon, a.delta, a.x_size, a.y_size, 1 << 50)?;
        text.push_str(&format!(
            "vsee nu            {}\n",
            nu.map_or_else(|| "above 2^50".to_owned(), |n| n.to_string())
        ));
        results["vsee_nu"] = json!(nu);
        if let Some(n) = a.n {
            let c = vsee_conditions(n, alpha, beta, a.epsilon, a.delta, a.x_size, a.y_size)?;
            text.push_str(&format!(
                "rho(n)             {}\n\
                 margin condition   {}\n\
                 accuracy cond.     {}\n\
                 confidence cond.   {}\n",
                output::sig9(rho(n, a.delta, a.x_size, a.y_size)?),
                c.margin_ok,
                c.accuracy_ok,
                c.confidence_ok,
            ));
            results["vsee_at_n"] = json!({
                "n": n,
                "rho": c.rho,
                "margin_ok": c.margin_ok,
                "accuracy_ok": c.accuracy_ok,
                "confidence_ok": c.confidence_ok,
            });
        }
    }
    Ok(Report {
        outcome: Outcome::Done,
        text,
        results,
        seed: None,
        data_output: None,
    })
}

fn cmd_adversary(a: &AdversaryArgs) -> Result<Report, CliError> {
    let adv: Adversary = match a.tau {
        Some(tau) => adversarial_channel_with_tau(a.epsilon, a.delta, a.n, a.x_size, a.y_size, tau)?,
        None => adversarial_channel(a.epsilon, a.delta, a.n, a.x_size, a.y_size)?,
    };
    let info = mutual_information(&adv.p, &adv.w)?;
    let rows: Vec<Vec<f64>> = (0..adv.w.inputs()).map(|x| adv.w.row(x).to_vec()).collect();
    let mut text = format!(
        "p                  {:?}\n\
         w                  {:?}\n\
         tau                {}\n\
         tau limits         {} (entropy), {} (sample size)\n\
         I(p,w)             {}\n\
         lemma 2 bound      {}\n",
        adv.p.probs(),
        rows,
        output::sig9(adv.tau),
        output::sig9(adv.tau_entropy_limit),
        output::sig9(adv.tau_sample_limit),
        output::sig9(info),
        output::sig9(adv.zero_rate_bound),
    );
    let mut results = json!({
        "p": adv.p.probs(),
        "w": rows,
        "tau": adv.tau,
        "tau_entropy_limit": adv.tau_entropy_limit,
        "tau_sample_limit": adv.tau_sample_limit,
        "mutual_information": info,
        "zero_rate_bound": adv.zero_rate_bound,
    });
    let mut outcome = Outcome::Done;
    if a.exact {
        let pmf = exact_par::exact_rate_pmf(
            &PlugIn,
            &adv.p,
            &adv.w,
            a.n,
            &SolverConfig::default(),
            1_000_000,
        )?;
        text.push_str(&format!("P[rate = 0] exact  {}\n", output::sig9(pmf.prob_zero())));
        results["prob_zero"] = json!(pmf.prob_zero());
        if pmf.uncertified_count() > 0 {
            outcome = Outcome::NotCertified;
        }
    }
    Ok(Report {
        outcome,
        text,
        results,
        seed: None,
        data_output: None,
    })
}

/// Entry point used by the binary.
pub fn main_from_env() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().skip(1).collect();
    if let Err(e) = Cli::try_parse_from(std::iter::once(OsString::from("pacdmc")).chain(args.clone())) {
        // Help, version and usage errors are printed by clap with its own
        // exit code.
        e.exit();
    }
    let mut out = io::stdout();
    match run(args, &mut out) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotCertified) => {
            eprintln!("pacdmc: some LM rates were not certified");
            ExitCode::from(EXIT_NOT_CERTIFIED)
        }
        Err(e) => {
            eprintln!("pacdmc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
