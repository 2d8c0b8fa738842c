//! Command-line front end: configuration parsing, run orchestration, sweep
//! execution, and persistent run artifacts (manifest + CSV series).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::{lq_norm, GridFunction, GridSpec};
use crate::io;
use crate::kappa::{kappa_integral, KappaProfile, KappaRegime};
use crate::nonlinearity::Nonlinearity;
use crate::orlicz::{
    embedding_exp_bound, embedding_lq_bound, exp_lp_norm, exp_moment_bound, luxemburg_norm,
    norm_equivalence_reduced, OrliczGauge,
};
use crate::rng::{random_smooth_field, CounterRng};
use crate::semigroup::{exp_norm_nonexpansive, kernel_realspace, smoothing_estimate};
use crate::solver::{
    picard_continuation, step_evolve, EtdOptions, NormSample, Outcome, SolveConfig,
};
use crate::verify::{
    decay_fit, envelope_check, regime_classify, select_parameters, DecayTarget, SelectionVariant,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "fraclab", version, about = "Fractional heat semigroup laboratory")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the real-space kernel of e^{-t(-Delta)^{beta/2}} to CSV.
    Kernel(KernelArgs),
    /// Luxemburg norm of a field read from CSV.
    Norm(NormArgs),
    /// Evolve an initial condition and record a norm series.
    Evolve(EvolveArgs),
    /// Evolve and test the decay envelope ||u(t)||_q <= C t^{-sigma}.
    Decay(DecayArgs),
    /// Quantitative checks of the estimates.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Cartesian parameter sweep of evolve runs.
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Classify beta against n(p-1)/p and report the admissible q interval.
    Regime(RegimeArgs),
    /// Auxiliary exponent selection theta_k, rho_k, a, r per series index k.
    Params(ParamsArgs),
    /// L^r -> L^q smoothing slope and per-time constants.
    Smoothing(SmoothingArgs),
    /// Seeded random-field sweeps of the Orlicz inequalities.
    Orlicz(OrliczArgs),
    /// Integrability of the min-of-branches kernel bound.
    Kappa(KappaArgs),
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long = "L")]
    half_width: f64,
    #[arg(long = "N")]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct NormArgs {
    /// expLp | expLpReduced | power
    #[arg(long)]
    gauge: String,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args, Clone)]
struct EvolveArgs {
    /// Flat key = value file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<f64>,
    /// bump:amp=A,width=W | indicator:measure=V,amp=A | node:amp=A
    #[arg(long)]
    ic: Option<String>,
    /// Rescale the data so its exp L^p norm hits this target.
    #[arg(long)]
    amp_norm: Option<f64>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    /// picard | etd
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long = "N")]
    points: Option<usize>,
    /// Lebesgue index of the `lq` series column.
    #[arg(long, value_parser = parse_extended_real)]
    q: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DecayArgs {
    #[command(flatten)]
    evolve: EvolveArgs,
    /// Fit window `lo,hi`; defaults to [max(10 dt, T/100), T].
    #[arg(long)]
    window: Option<String>,
}

#[derive(Debug, Args)]
struct RegimeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    m: f64,
}

#[derive(Debug, Args)]
struct ParamsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    m: f64,
    #[arg(long, value_parser = parse_extended_real)]
    q: f64,
    /// Series indices, e.g. `0..20` or a single `k`.
    #[arg(long, default_value = "0..20")]
    k: String,
    /// bound | contraction
    #[arg(long, default_value = "bound")]
    variant: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SmoothingArgs {
    #[arg(long)]
    beta: f64,
    #[arg(long, value_parser = parse_extended_real)]
    r: f64,
    #[arg(long, value_parser = parse_extended_real)]
    q: f64,
    #[arg(long)]
    tmin: f64,
    #[arg(long)]
    tmax: f64,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long = "L", default_value_t = 100.0)]
    half_width: f64,
    #[arg(long = "N", default_value_t = 16384)]
    grid_points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OrliczArgs {
    #[arg(long, default_value_t = 100)]
    fields: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long = "L", default_value_t = 10.0)]
    half_width: f64,
    #[arg(long = "N", default_value_t = 256)]
    points: usize,
}

#[derive(Debug, Args)]
struct KappaArgs {
    /// subcritical | critical
    #[arg(long)]
    regime: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1e-8)]
    tmin: f64,
    #[arg(long, default_value_t = 1e6)]
    tmax: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated lists; the sweep is their cartesian product.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    amp: Option<String>,
    #[arg(long)]
    sign: Option<f64>,
    #[arg(long)]
    ic_width: Option<f64>,
    #[arg(long = "T")]
    horizon: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long = "N")]
    points: Option<usize>,
    #[arg(long, value_parser = parse_extended_real)]
    q: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_extended_real(s: &str) -> std::result::Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        other => other.parse::<f64>().map_err(|e| e.to_string()),
    }
}

/// Entry point used by the `fraclab` binary: parses, runs, prints.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let out = run_captured(args)?;
    if !out.is_empty() {
        print!("{out}");
    }
    Ok(())
}

/// Same as [`run`] but returns what would be printed to stdout.
pub fn run_captured<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            return Ok(e.to_string());
        }
        Err(e) => return Err(Error::Parse(e.to_string())),
    };
    match cli.command {
        Command::Kernel(args) => cmd_kernel(args),
        Command::Norm(args) => cmd_norm(args),
        Command::Evolve(args) => cmd_evolve(args).map(|_| String::new()),
        Command::Decay(args) => cmd_decay(args),
        Command::Verify(v) => match v {
            VerifyCommand::Regime(args) => cmd_verify_regime(args),
            VerifyCommand::Params(args) => cmd_verify_params(args),
            VerifyCommand::Smoothing(args) => cmd_verify_smoothing(args),
            VerifyCommand::Orlicz(args) => cmd_verify_orlicz(args),
            VerifyCommand::Kappa(args) => cmd_verify_kappa(args),
        },
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn cmd_kernel(args: KernelArgs) -> Result<String> {
    let spec = GridSpec::new(args.n, args.half_width, args.points)?;
    let kernel = kernel_realspace(&spec, args.beta, args.t)?;
    io::write_field(&args.out, &kernel)?;
    let mass = spec.node_measure() * kernel.values().iter().sum::<f64>();
    Ok(format!(
        "{}\n",
        json!({
            "beta": args.beta,
            "mass": mass,
            "min": kernel.values().iter().cloned().fold(f64::INFINITY, f64::min),
            "out": args.out.display().to_string(),
            "t": args.t,
        })
    ))
}

fn cmd_norm(args: NormArgs) -> Result<String> {
    let field = io::read_field(&args.input)?;
    let gauge = match args.gauge.as_str() {
        "expLp" => OrliczGauge::exp_lp(args.p)?,
        "expLpReduced" => OrliczGauge::exp_lp_reduced(args.p)?,
        "power" => OrliczGauge::power(args.p)?,
        other => return Err(Error::Parse(format!("unknown gauge `{other}`"))),
    };
    let result = luxemburg_norm(&field, gauge, args.tol)?;
    Ok(format!(
        "{}\n",
        json!({
            "gauge": args.gauge,
            "iterations": result.iterations,
            "norm": result.norm,
            "p": args.p,
        })
    ))
}

/// A fully validated evolve configuration.
#[derive(Debug, Clone)]
struct EvolvePlan {
    spec: GridSpec,
    f: Nonlinearity,
    beta: f64,
    ic: String,
    amp_norm: Option<f64>,
    horizon: f64,
    dt: f64,
    scheme: String,
    q: f64,
    seed: u64,
}

const EVOLVE_KEYS: &[&str] = &[
    "beta", "m", "p", "lambda", "sign", "ic", "amp_norm", "T", "scheme", "dt", "n", "L", "N", "q",
    "seed",
];

fn read_config_file(path: &Path, allowed: &[&str]) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_string();
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parse(format!("config line {}: unknown key `{key}`", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn overlay_f64(flag: Option<f64>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(v) => parse_extended_real(v)
            .map(Some)
            .map_err(|e| Error::Parse(format!("config key `{key}`: {e}"))),
        None => Ok(None),
    }
}

fn overlay_usize(flag: Option<usize>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(v) => v
            .parse::<usize>()
            .map(Some)
            .map_err(|e| Error::Parse(format!("config key `{key}`: {e}"))),
        None => Ok(None),
    }
}

fn overlay_string(flag: Option<String>, file: &BTreeMap<String, String>, key: &str) -> Option<String> {
    flag.or_else(|| file.get(key).cloned())
}

fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Parse(format!("missing required parameter `{key}`")))
}

/// Validates all module preconditions with human-readable diagnostics.
fn parse_evolve_config(args: &EvolveArgs) -> Result<EvolvePlan> {
    let file = match &args.config {
        Some(path) => read_config_file(path, EVOLVE_KEYS)?,
        None => BTreeMap::new(),
    };
    let beta = require(overlay_f64(args.beta, &file, "beta")?, "beta")?;
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::Hypothesis(format!("beta must lie in (0, 2]; got beta = {beta}")));
    }
    let m = overlay_f64(args.m, &file, "m")?.unwrap_or(1.0);
    let p = require(overlay_f64(args.p, &file, "p")?, "p")?;
    let lambda = overlay_f64(args.lambda, &file, "lambda")?.unwrap_or(1.0);
    let sign = overlay_f64(args.sign, &file, "sign")?.unwrap_or(1.0);
    let f = Nonlinearity::new(m, p, lambda, sign)?;
    let n = overlay_usize(args.n, &file, "n")?.unwrap_or(1);
    let half_width = overlay_f64(args.half_width, &file, "L")?.unwrap_or(40.0);
    let points = overlay_usize(args.points, &file, "N")?.unwrap_or(4096);
    let spec = GridSpec::new(n, half_width, points)?;
    if m > 1.0 {
        let lhs = n as f64 * (m - 1.0) / beta;
        if !(lhs >= p) {
            return Err(Error::Hypothesis(format!(
                "n(m-1)/beta >= p violated: n(m-1)/beta = {lhs}, p = {p}"
            )));
        }
    }
    let horizon = require(overlay_f64(args.horizon, &file, "T")?, "T")?;
    if !(horizon > 0.0) {
        return Err(Error::Hypothesis(format!("T must be > 0; got T = {horizon}")));
    }
    let dt = overlay_f64(args.dt, &file, "dt")?.unwrap_or(0.01);
    if !(dt > 0.0 && dt <= horizon) {
        return Err(Error::Hypothesis(format!("dt must satisfy 0 < dt <= T; got dt = {dt}")));
    }
    let scheme = overlay_string(args.scheme.clone(), &file, "scheme").unwrap_or_else(|| "etd".into());
    if scheme != "etd" && scheme != "picard" {
        return Err(Error::Parse(format!("scheme must be `etd` or `picard`; got `{scheme}`")));
    }
    let ic = require(overlay_string(args.ic.clone(), &file, "ic"), "ic")?;
    parse_ic(&ic)?; // validate early
    let q = overlay_f64(args.q, &file, "q")?.unwrap_or(2.0);
    if !(q >= 1.0) {
        return Err(Error::Hypothesis(format!("series index q must be >= 1; got q = {q}")));
    }
    let seed = overlay_usize(args.seed.map(|s| s as usize), &file, "seed")?.unwrap_or(0) as u64;
    Ok(EvolvePlan {
        spec,
        f,
        beta,
        ic,
        amp_norm: overlay_f64(args.amp_norm, &file, "amp_norm")?,
        horizon,
        dt,
        scheme,
        q,
        seed,
    })
}

#[derive(Debug, Clone, Copy)]
enum InitialCondition {
    Bump { amp: f64, width: f64, center: f64 },
    Indicator { measure: f64, amp: f64 },
    Node { amp: f64 },
}

fn parse_ic(s: &str) -> Result<InitialCondition> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut kv = BTreeMap::new();
    for part in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("ic fragment `{part}` is not key=value")))?;
        let parsed: f64 = v
            .parse()
            .map_err(|_| Error::Parse(format!("ic value `{v}` is not a number")))?;
        kv.insert(k.to_string(), parsed);
    }
    match kind {
        "bump" => Ok(InitialCondition::Bump {
            amp: *kv.get("amp").unwrap_or(&1.0),
            width: *kv.get("width").unwrap_or(&1.0),
            center: *kv.get("center").unwrap_or(&0.0),
        }),
        "indicator" => Ok(InitialCondition::Indicator {
            measure: *kv.get("measure").unwrap_or(&1.0),
            amp: *kv.get("amp").unwrap_or(&1.0),
        }),
        "node" => Ok(InitialCondition::Node { amp: *kv.get("amp").unwrap_or(&1.0) }),
        other => Err(Error::Parse(format!("unknown initial condition kind `{other}`"))),
    }
}

fn build_ic(spec: &GridSpec, ic: InitialCondition) -> Result<GridFunction> {
    match ic {
        InitialCondition::Bump { amp, width, center } => {
            Ok(GridFunction::bump(*spec, amp, width, &[center, center, center][..spec.dim()]))
        }
        InitialCondition::Indicator { measure, amp } => GridFunction::indicator(*spec, measure, amp),
        InitialCondition::Node { amp } => {
            GridFunction::indicator(*spec, spec.node_measure() / 2.0, amp)
        }
    }
}

fn grid_summary(spec: &GridSpec) -> Value {
    json!({
        "L": spec.half_width(),
        "N": spec.points_per_axis(),
        "h": spec.spacing(),
        "n": spec.dim(),
    })
}

fn plan_parameters(plan: &EvolvePlan, ic_scale: f64) -> Value {
    json!({
        "T": plan.horizon,
        "amp_norm": plan.amp_norm,
        "beta": plan.beta,
        "dt": plan.dt,
        "ic": plan.ic,
        "ic_scale": ic_scale,
        "lambda": plan.f.lambda,
        "m": plan.f.m,
        "p": plan.f.p,
        "q": plan.q,
        "scheme": plan.scheme,
        "seed": plan.seed,
        "sign": plan.f.sign,
    })
}

struct EvolveOutcome {
    series: Vec<NormSample>,
    status_json: Value,
    outcome: Outcome,
}

fn execute_plan(plan: &EvolvePlan) -> Result<(EvolveOutcome, f64)> {
    let mut u0 = build_ic(&plan.spec, parse_ic(&plan.ic)?)?;
    let mut ic_scale = 1.0;
    if let Some(target) = plan.amp_norm {
        let current = exp_lp_norm(&u0, plan.f.p)?;
        if current == 0.0 {
            return Err(Error::InvalidParam("cannot rescale a zero initial condition".into()));
        }
        ic_scale = target / current;
        u0 = u0.scale(ic_scale);
    }
    let steps = (plan.horizon / plan.dt).round().max(1.0) as usize;
    if plan.scheme == "etd" {
        let record_stride = (steps / 2000).max(1);
        let opts = EtdOptions {
            blow_threshold: 1e8,
            record_stride,
            snapshot_stride: usize::MAX,
            norm_q: plan.q,
            exp_p: plan.f.p,
            record_exp_norm: true,
        };
        let run = step_evolve(&u0, &plan.f, plan.beta, plan.dt, steps, &opts)?;
        let status_json = json!({
            "iterations": run.status.iterations,
            "max_dt_df": run.max_dt_df,
            "outcome": format!("{:?}", run.status.outcome),
            "t_max_estimate": finite_or_null(run.status.t_max_estimate),
        });
        Ok((EvolveOutcome { series: run.series, status_json, outcome: run.status.outcome }, ic_scale))
    } else {
        let cfg = SolveConfig {
            horizon: plan.horizon,
            picard_tol: 1e-8,
            max_iter: 80,
            quad_points_per_unit: (1.0 / plan.dt).max(8.0),
            blow_threshold: 1e8,
        };
        let run = picard_continuation(&u0, &plan.f, plan.beta, plan.horizon, &cfg, 1.0)?;
        let mut series = Vec::with_capacity(run.times.len());
        for (t, state) in run.times.iter().zip(run.states.iter()) {
            series.push(NormSample {
                t: *t,
                l1: lq_norm(state, 1.0)?,
                l2: lq_norm(state, 2.0)?,
                lq: lq_norm(state, plan.q)?,
                linf: lq_norm(state, f64::INFINITY)?,
                exp_lp: exp_lp_norm(state, plan.f.p)?,
            });
        }
        let status_json = json!({
            "iterations": run.status.iterations,
            "outcome": format!("{:?}", run.status.outcome),
            "t_max_estimate": finite_or_null(run.status.t_max_estimate),
            "windows": run.windows,
        });
        Ok((EvolveOutcome { series, status_json, outcome: run.status.outcome }, ic_scale))
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn cmd_evolve(args: EvolveArgs) -> Result<EvolveOutcome> {
    let plan = parse_evolve_config(&args)?;
    std::fs::create_dir_all(&args.out)?;
    let started = Instant::now();
    // Manifest before the run; finalized with statuses and wall time after.
    let mut manifest = json!({
        "command": "evolve",
        "grid": grid_summary(&plan.spec),
        "parameters": plan_parameters(&plan, 1.0),
        "statuses": [],
        "tool_version": TOOL_VERSION,
        "wall_time": Value::Null,
    });
    io::write_json(&args.out.join("manifest.json"), &manifest)?;

    let (outcome, ic_scale) = execute_plan(&plan)?;
    io::write_series(&args.out.join("series.csv"), &outcome.series)?;

    manifest["parameters"] = plan_parameters(&plan, ic_scale);
    manifest["statuses"] = json!([outcome.status_json]);
    manifest["wall_time"] = json!(started.elapsed().as_secs_f64());
    io::write_json(&args.out.join("manifest.json"), &manifest)?;
    Ok(outcome)
}

fn cmd_decay(args: DecayArgs) -> Result<String> {
    let plan = parse_evolve_config(&args.evolve)?;
    // The decay claim requires admissible (n, beta, p, m, q).
    let target = DecayTarget::new(plan.spec.dim(), plan.beta, plan.f.p, plan.f.m, plan.q)?;
    let window = match &args.window {
        Some(w) => {
            let (lo, hi) = w
                .split_once(',')
                .ok_or_else(|| Error::Parse("window must be `lo,hi`".into()))?;
            (
                parse_extended_real(lo).map_err(Error::Parse)?,
                parse_extended_real(hi).map_err(Error::Parse)?,
            )
        }
        None => ((10.0 * plan.dt).max(plan.horizon / 100.0), plan.horizon),
    };
    let outcome = cmd_evolve(args.evolve.clone())?;
    let series: Vec<(f64, f64)> = outcome.series.iter().map(|s| (s.t, s.lq)).collect();
    let (slope, stderr) = decay_fit(&series, window)?;
    let envelope = envelope_check(&series, window, target.sigma)?;
    let report = json!({
        "envelope_c": envelope.c_at_start,
        "envelope_max_ratio": envelope.max_ratio,
        "envelope_ok": envelope.ok,
        "regime": target.regime.to_string(),
        "sigma_target": target.sigma,
        "slope": slope,
        "slope_stderr": stderr,
        "window": [window.0, window.1],
    });
    io::write_json(&args.evolve.out.join("decay.json"), &report)?;
    Ok(format!("{report}\n"))
}

fn cmd_verify_regime(args: RegimeArgs) -> Result<String> {
    let (regime, interval) = regime_classify(args.n, args.beta, args.p, args.m)?;
    let crit = args.n as f64 * (args.p - 1.0) / args.p;
    Ok(format!(
        "{}\n",
        json!({
            "q_interval": [interval.lo, if interval.hi.is_finite() { json!(interval.hi) } else { json!("inf") }],
            "reasons": [
                format!("n(p-1)/p = {crit}, beta = {}", args.beta),
                format!("n(m-1)/beta = {} >= p = {}", args.n as f64 * (args.m - 1.0) / args.beta, args.p),
            ],
            "regime": regime.to_string(),
        })
    ))
}

fn parse_k_range(s: &str) -> Result<(usize, usize)> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.parse().map_err(|_| Error::Parse(format!("bad k range `{s}`")))?;
        let hi: usize = hi.parse().map_err(|_| Error::Parse(format!("bad k range `{s}`")))?;
        Ok((lo, hi))
    } else {
        let k: usize = s.parse().map_err(|_| Error::Parse(format!("bad k `{s}`")))?;
        Ok((k, k))
    }
}

fn cmd_verify_params(args: ParamsArgs) -> Result<String> {
    let target = DecayTarget::new(args.n, args.beta, args.p, args.m, args.q)?;
    let variant = match args.variant.as_str() {
        "bound" => SelectionVariant::Bound,
        "contraction" => SelectionVariant::Contraction,
        other => return Err(Error::Parse(format!("variant must be bound|contraction, got `{other}`"))),
    };
    let (k_lo, k_hi) = parse_k_range(&args.k)?;
    let mut csv = String::from("k,theta,rho,a,r,identity_residual\n");
    for k in k_lo..=k_hi {
        let sel = select_parameters(&target, k, variant)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sel.k,
            io::fmt17(sel.theta),
            io::fmt17(sel.rho),
            io::fmt17(sel.a),
            io::fmt17(sel.r),
            io::fmt17(sel.identity_residual)
        ));
    }
    emit(args.out.as_deref(), &csv)
}

fn cmd_verify_smoothing(args: SmoothingArgs) -> Result<String> {
    let spec = GridSpec::new(args.n, args.half_width, args.grid_points)?;
    let data = GridFunction::indicator(spec, spec.node_measure() / 2.0, 1.0)?;
    if !(args.tmin > 0.0 && args.tmax > args.tmin && args.points >= 2) {
        return Err(Error::InvalidParam("need 0 < tmin < tmax and points >= 2".into()));
    }
    let ts: Vec<f64> = (0..args.points)
        .map(|i| {
            let frac = i as f64 / (args.points - 1) as f64;
            args.tmin * (args.tmax / args.tmin).powf(frac)
        })
        .collect();
    let est = smoothing_estimate(&data, args.beta, args.r, args.q, &ts)?;
    let mut csv = String::from("t,lhs,bound_shape,ratio\n");
    for row in &est.rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            io::fmt17(row.t),
            io::fmt17(row.lhs),
            io::fmt17(row.bound_shape),
            io::fmt17(row.ratio)
        ));
    }
    eprintln!("slope = {} (bound exponent {})", est.slope, -(args.n as f64 / args.beta) * (1.0 / args.r - 1.0 / args.q));
    emit(args.out.as_deref(), &csv)
}

fn emit(path: Option<&Path>, text: &str) -> Result<String> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(String::new())
        }
        None => Ok(text.to_string()),
    }
}

fn cmd_verify_orlicz(args: OrliczArgs) -> Result<String> {
    let spec = GridSpec::new(args.n, args.half_width, args.points)?;
    let p = args.p;
    let mut rng = CounterRng::new(args.seed);
    let mut v_lq = 0usize;
    let mut v_exp = 0usize;
    let mut v_moment = 0usize;
    let mut v_nonexp = 0usize;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0f64;
    let slack = 1.0 + 1e-8;
    for _ in 0..args.fields {
        let u = random_smooth_field(&mut rng, spec);
        let (lhs, rhs) = embedding_lq_bound(&u, p, 2.0 * p)?;
        if lhs > rhs * slack {
            v_lq += 1;
        }
        let (lhs, rhs) = embedding_exp_bound(&u, p, p)?;
        if lhs > rhs * slack {
            v_exp += 1;
        }
        // Scale so the moment gate sits at 0.9.
        let k = exp_lp_norm(&u, p)?;
        if k > 0.0 {
            let lambda = 1.0f64;
            let q = 2.0f64;
            let scale = (0.9 / (lambda * q)).powf(1.0 / p) / k;
            let bound = exp_moment_bound(&u.scale(scale), p, lambda, q)?;
            if !bound.applicable || bound.lhs > bound.rhs * slack {
                v_moment += 1;
            }
            let ratio = norm_equivalence_reduced(&u, p)?;
            ratio_min = ratio_min.min(ratio);
            ratio_max = ratio_max.max(ratio);
        }
        for beta in [0.5, 1.0, 2.0] {
            v_nonexp += exp_norm_nonexpansive(&u, beta, p, &[0.01, 0.1, 1.0])?;
        }
    }
    Ok(format!(
        "{}\n",
        json!({
            "embedding_exp": {"checks": args.fields, "violations": v_exp},
            "embedding_lq": {"checks": args.fields, "violations": v_lq},
            "equivalence_ratio": {"max": ratio_max, "min": ratio_min},
            "exp_moment": {"checks": args.fields, "violations": v_moment},
            "fields": args.fields,
            "nonexpansive": {"checks": args.fields * 9, "violations": v_nonexp},
            "seed": args.seed,
        })
    ))
}

fn cmd_verify_kappa(args: KappaArgs) -> Result<String> {
    let regime = match args.regime.as_str() {
        "subcritical" => KappaRegime::Subcritical,
        "critical" => KappaRegime::Critical,
        other => return Err(Error::Parse(format!("regime must be subcritical|critical, got `{other}`"))),
    };
    let profile = KappaProfile::new(regime, args.n, args.beta, args.p, args.r, args.c)?;
    let a = kappa_integral(&profile, args.tmin, args.tmax)?;
    let b = kappa_integral(&profile, args.tmin, args.tmax * 10.0)?;
    Ok(format!(
        "{}\n",
        json!({
            "head": a.head,
            "increment_to_10x_tmax": b.total - a.total,
            "integral": a.total,
            "quadrature": a.quadrature,
            "tail": a.tail,
        })
    ))
}

fn parse_list(s: &str, key: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("list `{key}`: bad entry `{part}`")))
        })
        .collect()
}

const SWEEP_KEYS: &[&str] = &[
    "beta", "p", "m", "lambda", "amp", "sign", "ic_width", "T", "dt", "scheme", "n", "L", "N", "q",
];

#[derive(Debug, Clone)]
struct SweepTuple {
    index: usize,
    beta: f64,
    p: f64,
    m: f64,
    lambda: f64,
    amp: f64,
}

fn cmd_sweep(args: SweepArgs) -> Result<String> {
    let file = match &args.config {
        Some(path) => read_config_file(path, SWEEP_KEYS)?,
        None => BTreeMap::new(),
    };
    let list = |flag: &Option<String>, key: &str| -> Result<Vec<f64>> {
        match flag.clone().or_else(|| file.get(key).cloned()) {
            Some(s) => parse_list(&s, key),
            None => Ok(Vec::new()),
        }
    };
    let betas = list(&args.beta, "beta")?;
    let ps = list(&args.p, "p")?;
    let ms = list(&args.m, "m")?;
    let lambdas = list(&args.lambda, "lambda")?;
    let amps = list(&args.amp, "amp")?;
    let sign = args.sign.or(file.get("sign").and_then(|s| s.parse().ok())).unwrap_or(1.0);
    let ic_width = args.ic_width.or(file.get("ic_width").and_then(|s| s.parse().ok())).unwrap_or(1.0);
    let horizon = require(overlay_f64(args.horizon, &file, "T")?, "T")?;
    let dt = overlay_f64(args.dt, &file, "dt")?.unwrap_or(0.01);
    let scheme = overlay_string(args.scheme.clone(), &file, "scheme").unwrap_or_else(|| "etd".into());
    let n = overlay_usize(args.n, &file, "n")?.unwrap_or(1);
    let half_width = overlay_f64(args.half_width, &file, "L")?.unwrap_or(40.0);
    let points = overlay_usize(args.points, &file, "N")?.unwrap_or(2048);
    let q = overlay_f64(args.q, &file, "q")?.unwrap_or(2.0);

    let mut tuples = Vec::new();
    for &beta in &betas {
        for &p in &ps {
            for &m in &ms {
                for &lambda in &lambdas {
                    for &amp in &amps {
                        tuples.push(SweepTuple { index: tuples.len(), beta, p, m, lambda, amp });
                    }
                }
            }
        }
    }
    std::fs::create_dir_all(&args.out)?;

    type Slot = std::sync::Mutex<Option<String>>;
    let results: Vec<String> = {
        let slots: Vec<Slot> = (0..tuples.len()).map(|_| std::sync::Mutex::new(None)).collect();
        let next = std::sync::atomic::AtomicUsize::new(0);
        let workers = std::thread::available_parallelism().map(|c| c.get()).unwrap_or(1);
        let workers = workers.min(tuples.len().max(1)).min(4);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= tuples.len() {
                        break;
                    }
                    let row = run_sweep_tuple(
                        &tuples[i],
                        &args.out,
                        SweepShared {
                            sign,
                            ic_width,
                            horizon,
                            dt,
                            scheme: &scheme,
                            n,
                            half_width,
                            points,
                            q,
                        },
                    );
                    *slots[i].lock().unwrap() = Some(row);
                });
            }
        });
        slots.into_iter().map(|s| s.into_inner().unwrap().unwrap()).collect()
    };

    let mut summary = String::from("beta,p,m,lambda,amp,outcome,slope,sigma_target\n");
    for row in results {
        summary.push_str(&row);
        summary.push('\n');
    }
    std::fs::write(args.out.join("summary.csv"), summary)?;
    Ok(String::new())
}

#[derive(Clone, Copy)]
struct SweepShared<'a> {
    sign: f64,
    ic_width: f64,
    horizon: f64,
    dt: f64,
    scheme: &'a str,
    n: usize,
    half_width: f64,
    points: usize,
    q: f64,
}

fn run_sweep_tuple(tuple: &SweepTuple, out_root: &Path, shared: SweepShared<'_>) -> String {
    let dir = out_root.join(format!("run_{:03}", tuple.index));
    let args = EvolveArgs {
        config: None,
        beta: Some(tuple.beta),
        m: Some(tuple.m),
        p: Some(tuple.p),
        lambda: Some(tuple.lambda),
        sign: Some(shared.sign),
        ic: Some(format!("bump:amp={},width={}", tuple.amp, shared.ic_width)),
        amp_norm: None,
        horizon: Some(shared.horizon),
        scheme: Some(shared.scheme.to_string()),
        dt: Some(shared.dt),
        n: Some(shared.n),
        half_width: Some(shared.half_width),
        points: Some(shared.points),
        q: Some(shared.q),
        seed: Some(0),
        out: dir,
    };
    let prefix = format!(
        "{},{},{},{},{}",
        tuple.beta, tuple.p, tuple.m, tuple.lambda, tuple.amp
    );
    match cmd_evolve(args) {
        Ok(outcome) => {
            let series: Vec<(f64, f64)> = outcome.series.iter().map(|s| (s.t, s.lq)).collect();
            let window = ((10.0 * shared.dt).max(shared.horizon / 10.0), shared.horizon);
            let slope = decay_fit(&series, window).map(|(s, _)| s).unwrap_or(f64::NAN);
            let sigma = DecayTarget::new(shared.n, tuple.beta, tuple.p, tuple.m, shared.q)
                .map(|t| t.sigma)
                .unwrap_or(f64::NAN);
            format!("{prefix},{:?},{slope},{sigma}", outcome.outcome)
        }
        Err(e) => {
            let msg = e.to_string().replace([',', '\n'], ";");
            format!("{prefix},Error: {msg},nan,nan")
        }
    }
}
