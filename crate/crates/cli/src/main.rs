//! `resifront`: batch front end for the resistant free-boundary solver.
//!
//! Every subcommand reads a JSON or TOML config, writes deterministic
//! artifacts into an output directory, and prints a one-line summary on
//! stdout. Progress and advisory messages go to stderr so stdout stays
//! machine-friendly.
//!
//! Exit codes: 0 success, 1 invalid usage or configuration, 2 numerical
//! failure (or a violated ordering in `compare`), 3 inconclusive result.

mod artifacts;

use anyhow::{Context, Result};
use artifacts::{ensure_dir, fmt_f64, out_dir, write_json, write_run, write_text, Summary};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use resifront_core::classifier::{compare_runs, detect_outcome, spreading_speed};
use resifront_core::config::RunConfig;
use resifront_core::phase_plane::{self, StationaryCase};
use resifront_core::semiwave::{self, ShootConfig};
use resifront_core::solver::{run_from_config, Termination, Trajectory};
use resifront_core::threshold::{self, ThresholdOpts};
use resifront_core::{
    vanishing_certificate, ClassifierParams, CoreError, InitialData, Outcome, Verdict,
};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

const EXIT_OK: i32 = 0;
const EXIT_INVALID: i32 = 1;
const EXIT_NUMERICAL: i32 = 2;
const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "resifront",
    version,
    about = "Reaction-diffusion fronts with resistant free boundaries",
    after_help = "Output directory: --out flag, else $RESIFRONT_OUT, else ./resifront-out."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation and write series.csv, summary.json,
    /// trajectory.json and any profile CSVs.
    Simulate(ConfigArgs),
    /// Classify a finished run (or simulate then classify) into
    /// spreading / vanishing / transition / undetermined.
    Classify(ClassifyArgs),
    /// Run an ordered pair of configs and audit the comparison
    /// principle between them.
    Compare(CompareArgs),
    /// Classify the stationary problem at (f, alpha) and emit the
    /// compact profile when one exists.
    Stationary(StationaryArgs),
    /// Solve for the semi-wave speed c* by shooting and bisection.
    Semiwave(ConfigArgs),
    /// Bracket the sharp amplitude threshold sigma* by scan + bisection.
    Threshold(ConfigArgs),
    /// Check the a-priori vanishing certificates for a config.
    Certify(ConfigArgs),
    /// Run a sigma x alpha grid of simulations and aggregate verdicts.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Run configuration, JSON or TOML.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Run configuration to simulate and classify.
    #[arg(long, conflicts_with = "trajectory")]
    config: Option<PathBuf>,
    /// Previously written trajectory.json to classify as-is.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Config of the dominated run (smaller data, narrower interval).
    #[arg(long)]
    lo: PathBuf,
    /// Config of the dominating run.
    #[arg(long)]
    hi: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StationaryArgs {
    /// Run configuration (only the reaction, alpha and domain_cap are used).
    #[arg(long)]
    config: PathBuf,
    /// Sample count of the emitted profile.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep configuration: a [base] run plus sigmas/alphas lists.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: one per logical CPU).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `threshold` config document: the base run plus search controls.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdConfig {
    base: RunConfig,
    #[serde(default)]
    threshold: ThresholdOpts,
}

/// `sweep` config document: a base run and the grid to vary over it.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    base: RunConfig,
    /// Amplitudes to run; empty means just the base sigma.
    #[serde(default)]
    sigmas: Vec<f64>,
    /// Resistances to run; empty means just the base alpha.
    #[serde(default)]
    alphas: Vec<f64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_for(&err));
        }
    }
}

/// Map library errors onto the documented exit codes.
fn exit_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::Numerical(_)) => EXIT_NUMERICAL,
        Some(CoreError::Inconclusive(_)) => EXIT_INCONCLUSIVE,
        _ => EXIT_INVALID,
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Classify(a) => cmd_classify(a),
        Cmd::Compare(a) => cmd_compare(a),
        Cmd::Stationary(a) => cmd_stationary(a),
        Cmd::Semiwave(a) => cmd_semiwave(a),
        Cmd::Threshold(a) => cmd_threshold(a),
        Cmd::Certify(a) => cmd_certify(a),
        Cmd::Sweep(a) => cmd_sweep(a),
    }
}

/// Parse a JSON or TOML document, honouring the file extension.
fn read_doc<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{e}")),
        Some("toml") => toml::from_str(&text).map_err(|e| anyhow::anyhow!("{e}")),
        _ => serde_json::from_str(&text)
            .map_err(|e| anyhow::anyhow!("{e}"))
            .or_else(|json_err| {
                toml::from_str(&text)
                    .map_err(|toml_err| anyhow::anyhow!("not JSON ({json_err}); not TOML ({toml_err})"))
            }),
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let cfg: RunConfig = read_doc(path)?;
    cfg.validate()?;
    Ok(cfg)
}

fn termination_word(t: &Termination) -> &'static str {
    match t {
        Termination::ShrinkVanish { .. } => "shrink+vanish",
        Termination::HorizonReached => "horizon reached",
        Termination::DomainOverflow => "domain overflow",
        Termination::NumericalFailure => "numerical failure",
    }
}

fn verdict_word(v: &Verdict) -> &'static str {
    match v {
        Verdict::Spreading => "spreading",
        Verdict::Vanishing { .. } => "vanishing",
        Verdict::Transition { .. } => "transition",
        Verdict::Undetermined { .. } => "undetermined",
    }
}

fn cmd_simulate(a: ConfigArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    advisory_certificate(&cfg);
    let traj = run_from_config(&cfg)?;
    let dir = out_dir(a.out);
    write_run(&dir, &traj)?;
    let last = traj.final_snapshot();
    println!(
        "simulate: {} at t = {}, width = {}, max_u = {} -> {}",
        termination_word(&traj.termination),
        fmt_f64(last.t),
        fmt_f64(last.h - last.g),
        fmt_f64(last.max_u),
        dir.display()
    );
    Ok(match traj.termination {
        Termination::NumericalFailure => EXIT_NUMERICAL,
        _ => EXIT_OK,
    })
}

/// Certificates are advisory: print a fired one before simulating so a
/// user can skip runs with known outcomes, but never short-circuit.
fn advisory_certificate(cfg: &RunConfig) {
    let fired = cfg
        .nonlinearity
        .resolve(cfg.domain_cap)
        .and_then(|nl| {
            let data = InitialData::from_config(cfg)?;
            vanishing_certificate(&data, &nl, cfg.alpha)
        })
        .ok()
        .flatten();
    if let Some(cert) = fired {
        eprintln!(
            "certificate: vanishing is guaranteed a priori (margin {}): {}",
            fmt_f64(cert.margin),
            cert.detail
        );
    }
}

/// Shared classification path: stationary class and, when the semi-wave
/// problem is solvable at this (f, alpha), the reference speed c*.
fn classify_trajectory(traj: &Trajectory, params: &ClassifierParams) -> Result<Outcome> {
    let cfg = &traj.config;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap)?;
    let sc = phase_plane::classify_stationary(&nl, cfg.alpha)?;
    let cstar = semiwave::solve_cstar(&nl, cfg.alpha, &ShootConfig::default())
        .ok()
        .map(|w| w.c_star);
    let mut outcome = detect_outcome(traj, &nl, &sc, cstar, params);
    if let (Verdict::Spreading, Some(c)) = (&outcome.verdict, cstar) {
        if let Ok(speed) = spreading_speed(traj, c) {
            outcome.diagnostics.insert("cstar".into(), c);
            outcome.diagnostics.insert("right_slope".into(), speed.slope);
            outcome.diagnostics.insert("left_slope".into(), speed.left_slope);
            outcome
                .diagnostics
                .insert("speed_rel_err".into(), speed.rel_err.max(speed.left_rel_err));
        }
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    config: &'a RunConfig,
    termination: &'a Termination,
    t_end: f64,
    #[serde(flatten)]
    outcome: &'a Outcome,
}

fn cmd_classify(a: ClassifyArgs) -> Result<i32> {
    let traj: Trajectory = match (&a.config, &a.trajectory) {
        (Some(path), None) => {
            let cfg = load_config(path)?;
            run_from_config(&cfg)?
        }
        (None, Some(path)) => read_doc(path)?,
        _ => anyhow::bail!("classify needs exactly one of --config or --trajectory"),
    };
    let outcome = classify_trajectory(&traj, &ClassifierParams::default())?;
    let dir = out_dir(a.out);
    ensure_dir(&dir)?;
    write_json(
        &dir.join("outcome.json"),
        &ClassifyReport {
            config: &traj.config,
            termination: &traj.termination,
            t_end: traj.t_end(),
            outcome: &outcome,
        },
    )?;
    let detail = match &outcome.verdict {
        Verdict::Vanishing { t_star } => format!(" at t* = {}", fmt_f64(*t_star)),
        Verdict::Transition {
            width,
            profile_error,
        } => format!(
            " (width {}, profile error {})",
            fmt_f64(*width),
            fmt_f64(*profile_error)
        ),
        Verdict::Undetermined { reasons } => format!(": {}", reasons.join("; ")),
        Verdict::Spreading => String::new(),
    };
    println!(
        "classify: {}{detail} -> {}",
        verdict_word(&outcome.verdict),
        dir.display()
    );
    // An honest "cannot tell at this horizon" is a successful run.
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CompareReport<'a> {
    lo_config: &'a RunConfig,
    hi_config: &'a RunConfig,
    lo_summary: Summary<'a>,
    hi_summary: Summary<'a>,
    ordering: &'a resifront_core::classifier::OrderingReport,
}

fn cmd_compare(a: CompareArgs) -> Result<i32> {
    let mut lo_cfg = load_config(&a.lo)?;
    let mut hi_cfg = load_config(&a.hi)?;
    // Ordering is checked at the recorded checkpoints, so keep profiles
    // on both runs; every snapshot with node values is compared.
    if lo_cfg.profile_every == 0 {
        lo_cfg.profile_every = 1;
    }
    if hi_cfg.profile_every == 0 {
        hi_cfg.profile_every = 1;
    }
    let lo = run_from_config(&lo_cfg)?;
    let hi = run_from_config(&hi_cfg)?;
    let report = compare_runs(&lo, &hi)?;
    let dir = out_dir(a.out);
    ensure_dir(&dir)?;
    write_json(
        &dir.join("compare.json"),
        &CompareReport {
            lo_config: &lo_cfg,
            hi_config: &hi_cfg,
            lo_summary: Summary::of(&lo),
            hi_summary: Summary::of(&hi),
            ordering: &report,
        },
    )?;
    println!(
        "compare: ordering {} over {} checkpoints (worst g {}, h {}, u {}, tol {}) -> {}",
        if report.ordering_holds { "holds" } else { "VIOLATED" },
        report.checkpoints,
        fmt_f64(report.max_g_violation),
        fmt_f64(report.max_h_violation),
        fmt_f64(report.max_u_violation),
        fmt_f64(report.tol),
        dir.display()
    );
    Ok(if report.ordering_holds {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    })
}

fn cmd_stationary(a: StationaryArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap)?;
    let sc = phase_plane::classify_stationary(&nl, cfg.alpha)?;
    let dir = out_dir(a.out);
    ensure_dir(&dir)?;

    #[derive(Serialize)]
    struct StationaryReport<'a> {
        config: &'a RunConfig,
        #[serde(flatten)]
        class: &'a phase_plane::StationaryClass,
    }
    write_json(
        &dir.join("stationary.json"),
        &StationaryReport {
            config: &cfg,
            class: &sc,
        },
    )?;

    let line = match sc.case {
        StationaryCase::CompactSupport { peak, half_width } => {
            let prof = phase_plane::profile(&nl, cfg.alpha, a.n)?;
            let mut s = format!("# config: {}\n", serde_json::to_string(&cfg)?);
            s.push_str("x,v\n");
            for (x, v) in prof.xs.iter().zip(&prof.vs) {
                s.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(*v)));
            }
            write_text(&dir.join("stationary_profile.csv"), &s)?;
            format!(
                "compact arch, peak {}, half-width {}",
                fmt_f64(peak),
                fmt_f64(half_width)
            )
        }
        StationaryCase::InfinitePlateau { plateau } => {
            format!("monotone profile with plateau {plateau}")
        }
        StationaryCase::Unbounded { blowup_width } => {
            format!("no bounded profile (escape width {blowup_width})")
        }
    };
    println!(
        "stationary: alpha = {} vs alpha0 = {}: {line} -> {}",
        fmt_f64(sc.alpha),
        fmt_f64(sc.critical_alpha),
        dir.display()
    );
    Ok(EXIT_OK)
}

fn cmd_semiwave(a: ConfigArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap)?;
    let wave = semiwave::solve_cstar(&nl, cfg.alpha, &ShootConfig::default())?;
    let dir = out_dir(a.out);
    ensure_dir(&dir)?;

    #[derive(Serialize)]
    struct SemiwaveReport<'a> {
        config: &'a RunConfig,
        c_star: f64,
        residual: f64,
        bracket_width: f64,
        bracket: (f64, f64),
        z_end: f64,
    }
    write_json(
        &dir.join("semiwave.json"),
        &SemiwaveReport {
            config: &cfg,
            c_star: wave.c_star,
            residual: wave.residual_at_one,
            bracket_width: wave.bracket.1 - wave.bracket.0,
            bracket: wave.bracket,
            z_end: wave.z_end,
        },
    )?;

    let mut s = format!("# config: {}\n", serde_json::to_string(&cfg)?);
    s.push_str("z,q,qprime\n");
    for ((z, q), qp) in wave
        .profile
        .zs
        .iter()
        .zip(&wave.profile.qs)
        .zip(&wave.profile.qps)
    {
        s.push_str(&format!("{},{},{}\n", fmt_f64(*z), fmt_f64(*q), fmt_f64(*qp)));
    }
    write_text(&dir.join("semiwave_profile.csv"), &s)?;

    println!(
        "semiwave: c* = {} (bracket width {}, residual {}) -> {}",
        fmt_f64(wave.c_star),
        fmt_f64(wave.bracket.1 - wave.bracket.0),
        fmt_f64(wave.residual_at_one),
        dir.display()
    );
    Ok(EXIT_OK)
}

fn cmd_threshold(a: ConfigArgs) -> Result<i32> {
    let doc: ThresholdConfig = read_doc(&a.config)?;
    let (base, opts) = (doc.base, doc.threshold);
    base.validate()?;

    // Every probe is a full simulation, so say up front what the search
    // is likely to cost before committing to it.
    let bisections = (1.0 / opts.tol).log2().ceil().max(0.0);
    let scan_up = opts.sigma_cap.log2().ceil().max(0.0);
    let scan_down = (1.0 / opts.sigma_floor).log2().ceil().max(0.0);
    eprintln!(
        "threshold: probes simulate to t = {} (doubled up to {} times on ambiguity); \
         projected ~{} bisection probes after a scan of at most {} + {}",
        base.t_horizon, opts.max_doublings, bisections, scan_up, scan_down
    );
    let progress = |msg: &str| eprintln!("threshold: {msg}");
    let res = threshold::find_sigma_star_with(&base, &opts, Some(&progress))?;

    let dir = out_dir(a.out);
    ensure_dir(&dir)?;

    #[derive(Serialize)]
    struct ThresholdReport<'a> {
        config: &'a RunConfig,
        options: &'a ThresholdOpts,
        #[serde(flatten)]
        result: &'a threshold::ThresholdResult,
    }
    write_json(
        &dir.join("threshold.json"),
        &ThresholdReport {
            config: &base,
            options: &opts,
            result: &res,
        },
    )?;

    let mut s = format!("# config: {}\n", serde_json::to_string(&base)?);
    s.push_str("sigma,horizon,t_end,verdict\n");
    for ev in &res.evaluations {
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(ev.sigma),
            fmt_f64(ev.horizon),
            fmt_f64(ev.t_end),
            verdict_word(&ev.verdict)
        ));
    }
    write_text(&dir.join("evaluations.csv"), &s)?;

    let line = if res.sigma_star_infinite {
        format!(
            "sigma* = infinity (no spreading up to sigma = {})",
            fmt_f64(opts.sigma_cap)
        )
    } else {
        format!(
            "sigma* in [{}, {}] (relative width {})",
            fmt_f64(res.sigma_lo),
            fmt_f64(res.sigma_hi),
            fmt_f64(res.bracket_rel_width())
        )
    };
    println!(
        "threshold: {line}, {} evaluations{} -> {}",
        res.evaluations.len(),
        if res.inconclusive { ", INCONCLUSIVE" } else { "" },
        dir.display()
    );
    Ok(if res.inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}

fn cmd_certify(a: ConfigArgs) -> Result<i32> {
    let cfg = load_config(&a.config)?;
    let nl = cfg.nonlinearity.resolve(cfg.domain_cap)?;
    let data = InitialData::from_config(&cfg)?;
    let cert = vanishing_certificate(&data, &nl, cfg.alpha)?;
    let dir = out_dir(a.out);
    ensure_dir(&dir)?;

    #[derive(Serialize)]
    struct CertifyReport<'a> {
        config: &'a RunConfig,
        fired: bool,
        certificate: &'a Option<resifront_core::Certificate>,
    }
    write_json(
        &dir.join("certificate.json"),
        &CertifyReport {
            config: &cfg,
            fired: cert.is_some(),
            certificate: &cert,
        },
    )?;

    match &cert {
        Some(c) => println!(
            "certify: vanishing guaranteed (margin {}): {} -> {}",
            fmt_f64(c.margin),
            c.detail,
            dir.display()
        ),
        None => println!(
            "certify: no sufficient condition fired; simulation required -> {}",
            dir.display()
        ),
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(a: SweepArgs) -> Result<i32> {
    let doc: SweepConfig = read_doc(&a.config)?;
    let base = doc.base;
    base.validate()?;
    let mut sigmas = if doc.sigmas.is_empty() {
        vec![base.sigma]
    } else {
        doc.sigmas
    };
    let mut alphas = if doc.alphas.is_empty() {
        vec![base.alpha]
    } else {
        doc.alphas
    };
    // Aggregation is sorted by the sweep key, so canonicalise the axes up
    // front; point directories then share the row order.
    sigmas.sort_by(f64::total_cmp);
    alphas.sort_by(f64::total_cmp);

    // Large amplitudes need the reaction trusted a bit above the initial
    // peak; widen the cap per point instead of rejecting the run.
    let phi_sup = {
        let mut probe = base.clone();
        probe.sigma = 1.0;
        InitialData::from_config(&probe)?.sup_norm()
    };

    let mut points = Vec::new();
    for &alpha in &alphas {
        for &sigma in &sigmas {
            let mut cfg = base.clone();
            cfg.alpha = alpha;
            cfg.sigma = sigma;
            cfg.domain_cap = cfg.domain_cap.max(1.05 * sigma * phi_sup);
            cfg.validate()?;
            points.push(cfg);
        }
    }

    let dir = out_dir(a.out);
    ensure_dir(&dir)?;
    eprintln!(
        "sweep: {} points ({} sigma x {} alpha), horizon {} each",
        points.len(),
        sigmas.len(),
        alphas.len(),
        base.t_horizon
    );

    let work = |cfg: &RunConfig| -> Result<(Trajectory, Outcome)> {
        let traj = run_from_config(cfg)?;
        let outcome = classify_trajectory(&traj, &ClassifierParams::default())?;
        Ok((traj, outcome))
    };
    let results: Vec<Result<(Trajectory, Outcome)>> = match a.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .context("building the sweep worker pool")?;
            pool.install(|| {
                use rayon::prelude::*;
                points.par_iter().map(work).collect()
            })
        }
        None => {
            use rayon::prelude::*;
            points.par_iter().map(work).collect()
        }
    };

    let mut rows = String::new();
    rows.push_str(&format!("# config: {}\n", serde_json::to_string(&base)?));
    rows.push_str("sigma,alpha,verdict,t_star,width\n");
    let mut failed = false;
    for (i, (cfg, result)) in points.iter().zip(results).enumerate() {
        let point_dir = dir.join(format!("{i:04}_sigma_{}_alpha_{}", cfg.sigma, cfg.alpha));
        let (traj, outcome) = result
            .with_context(|| format!("sweep point sigma = {}, alpha = {}", cfg.sigma, cfg.alpha))?;
        write_run(&point_dir, &traj)?;
        write_json(&point_dir.join("outcome.json"), &outcome)?;
        if matches!(traj.termination, Termination::NumericalFailure) {
            failed = true;
        }
        let last = traj.final_snapshot();
        let t_star = match outcome.verdict {
            Verdict::Vanishing { t_star } => fmt_f64(t_star),
            _ => String::new(),
        };
        rows.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(cfg.sigma),
            fmt_f64(cfg.alpha),
            verdict_word(&outcome.verdict),
            t_star,
            fmt_f64(last.h - last.g)
        ));
    }
    write_text(&dir.join("sweep.csv"), &rows)?;
    println!(
        "sweep: {} points done{} -> {}",
        points.len(),
        if failed { ", with numerical failures" } else { "" },
        dir.display()
    );
    Ok(if failed { EXIT_NUMERICAL } else { EXIT_OK })
}
