//! Command-line front end.
//!
//! Each subcommand reads one JSON config (unknown fields are rejected) and
//! writes CSV or JSON to `--out` or stdout. Exit codes: 0 on success, 1 for
//! bad input or a domain error, 2 when an internal consistency check fails.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelDescriptor, Dmc};
use crate::error::{Error, Result};
use crate::exponent::{
    block_converse, check_assumption1, e1, e1_min_over_gamma, feedback_exponent_bsc_rz, gamma_balanced, one_hop_rate,
    trivial_converse, two_hop_rate, Assumption1Check, ExponentReport, GammaChoice, TiltedFamily,
};
use crate::harness::{exact_block_verification, write_csv, Experiment, ExperimentConfig, VerificationReport};
use crate::protocol::{f_fraction, g_bounds, ProtocolSpec};

/// Environment variable that overrides the seed in a config file.
pub const SEED_ENV: &str = "RELAY_EXP_SEED";

#[derive(Debug, Parser)]
#[command(name = "twohop", version, about = "2-hop noisy teaching and learning: exponents and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed, overriding the config and the environment.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for simulation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Achievable rates and converse bounds for a channel pair.
    Exponent,
    /// Error probability at each n of the grid.
    Simulate,
    /// Error probability over the grid plus a fitted exponent.
    Sweep,
    /// Exact single-block enumeration and numerical invariant checks.
    Verify,
    /// Compare min over gamma of E1 with the trivial converse.
    Converse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Config for `exponent` and `converse`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelPairConfig {
    pub p_channel: ChannelDescriptor,
    pub q_channel: ChannelDescriptor,
    /// Resolution of the gamma grid.
    #[serde(default = "default_gamma_steps")]
    pub gamma_steps: usize,
}

fn default_gamma_steps() -> usize {
    20
}

/// Config for `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub protocol: ProtocolSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaPoint {
    pub gamma: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentSummary {
    pub one_hop_p: ExponentReport,
    pub one_hop_q: ExponentReport,
    pub two_hop: ExponentReport,
    pub two_hop_flipped: ExponentReport,
    pub trivial_converse: ExponentReport,
    pub block_converse: Option<ExponentReport>,
    pub e1_curve: Vec<GammaPoint>,
    pub e1_min: GammaPoint,
    /// Present when P is a BSC and Q a reverse Z-channel.
    pub feedback_curve: Option<Vec<GammaPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseSummary {
    pub trivial_converse: f64,
    pub e1_min: GammaPoint,
    /// `trivial - min_gamma E1`; positive when feedback-free E1 is tighter.
    pub margin: f64,
    pub strictly_tighter: bool,
    pub two_hop: f64,
    pub assumption1_p: Assumption1Check,
    pub assumption1_q: Assumption1Check,
    pub gamma_balanced: Option<GammaChoice>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub worst_slack: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub block: VerificationReport,
    pub invariants: Vec<InvariantCheck>,
    pub passes: bool,
}

fn read_config<T: for<'de> Deserialize<'de>>(path: Option<&Path>) -> Result<T> {
    let path = path.ok_or_else(|| Error::Domain("--config is required".into()))?;
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Domain(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

fn exponent_summary(p: &Dmc, q: &Dmc, steps: usize) -> Result<ExponentSummary> {
    let e1_curve = (0..=steps)
        .map(|i| {
            let gamma = i as f64 / steps as f64;
            e1(p, q, gamma).map(|r| GammaPoint { gamma, rate: r.rate })
        })
        .collect::<Result<Vec<_>>>()?;
    let (gamma, best) = e1_min_over_gamma(p, q, steps)?;
    let feedback_curve = match (p.as_bsc(), q.row1() == [0.0, 1.0]) {
        (Some(bp), true) => Some(
            (0..=steps)
                .map(|i| {
                    let gamma = i as f64 / steps as f64;
                    feedback_exponent_bsc_rz(bp, q.prob(0, 1), gamma).map(|rate| GammaPoint { gamma, rate })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    Ok(ExponentSummary {
        one_hop_p: one_hop_rate(p),
        one_hop_q: one_hop_rate(q),
        two_hop: two_hop_rate(p, q, false),
        two_hop_flipped: two_hop_rate(p, q, true),
        trivial_converse: trivial_converse(p, q),
        block_converse: block_converse(p, q)?,
        e1_curve,
        e1_min: GammaPoint { gamma, rate: best.rate },
        feedback_curve,
    })
}

fn converse_summary(p: &Dmc, q: &Dmc, steps: usize) -> Result<ConverseSummary> {
    let trivial = trivial_converse(p, q).rate;
    let (gamma, best) = e1_min_over_gamma(p, q, steps)?;
    let a1p = check_assumption1(p, 1e-3)?;
    let a1q = check_assumption1(q, 1e-3)?;
    let balanced = if a1p.holds && a1q.holds { Some(gamma_balanced(p, q)?) } else { None };
    Ok(ConverseSummary {
        trivial_converse: trivial,
        e1_min: GammaPoint { gamma, rate: best.rate },
        margin: trivial - best.rate,
        strictly_tighter: best.rate < trivial,
        two_hop: two_hop_rate(p, q, false).rate,
        assumption1_p: a1p,
        assumption1_q: a1q,
        gamma_balanced: balanced,
    })
}

fn invariant_checks(protocol: &crate::protocol::Protocol) -> Result<Vec<InvariantCheck>> {
    let mut checks = Vec::new();
    let mut push = |name: &str, slack: f64| {
        checks.push(InvariantCheck { name: name.into(), worst_slack: slack, passes: slack >= -1e-9 });
    };
    for (name, ch) in [("p", protocol.p_channel()), ("q", protocol.q_channel())] {
        let fam = TiltedFamily::new(ch);
        let mu: Vec<f64> = (0..=1000).map(|i| fam.mu(i as f64 / 1000.0)).collect();
        let convex = mu.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::INFINITY, f64::min);
        push(&format!("mu_{name} convexity"), convex);
        push(&format!("mu_{name} non-positive"), -mu.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    if let Some(b) = protocol.bsc_block() {
        let worst = (0..=1000)
            .map(|i| {
                let a = i as f64 / 1000.0;
                let sym = 1e-12 - (f_fraction(a, b.e)? + f_fraction(1.0 - a, b.e)? - 1.0).abs();
                Ok(sym)
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        push("f symmetry", worst);
    }
    if let Some(d) = protocol.dmc_block() {
        let worst = g_bounds(&d.dist, protocol.k(), d.s_bar, d.mu_max)?
            .iter()
            .map(|b| b.upper - b.lower)
            .fold(f64::INFINITY, f64::min);
        push("g sandwich", worst);
    }
    Ok(checks)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn exponent_csv(s: &ExponentSummary) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["family", "s_star", "mu_star", "rate"])?;
    let mut reports = vec![s.one_hop_p, s.one_hop_q, s.two_hop, s.two_hop_flipped, s.trivial_converse];
    reports.extend(s.block_converse);
    for r in reports {
        let family = serde_json::to_value(r.family)?;
        w.write_record([
            family.as_str().unwrap_or_default().to_string(),
            r.s_star.to_string(),
            r.mu_star.to_string(),
            r.rate.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn resolve_seed(config_seed: u64, flag: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env {
        Some(v) => v.trim().parse().map_err(|_| Error::Domain(format!("{SEED_ENV} = {v:?} is not a u64"))),
        None => Ok(config_seed),
    }
}

/// Runs a parsed invocation. `env_seed` is the value of [`SEED_ENV`], if set.
pub fn execute(cli: &Cli, env_seed: Option<&str>) -> Result<()> {
    let out = cli.out.as_deref();
    let config = cli.config.as_deref();
    match cli.command {
        Command::Exponent | Command::Converse => {
            let cfg: ChannelPairConfig = read_config(config)?;
            if cfg.gamma_steps == 0 {
                return Err(Error::Domain("gamma_steps must be positive".into()));
            }
            let (p, q) = (cfg.p_channel.build()?, cfg.q_channel.build()?);
            if cli.command == Command::Exponent {
                let summary = exponent_summary(&p, &q, cfg.gamma_steps)?;
                match cli.format.unwrap_or(Format::Json) {
                    Format::Json => emit(out, &to_json(&summary)?),
                    Format::Csv => emit(out, &exponent_csv(&summary)?),
                }
            } else {
                if cli.format == Some(Format::Csv) {
                    return Err(Error::Domain("converse only writes JSON".into()));
                }
                emit(out, &to_json(&converse_summary(&p, &q, cfg.gamma_steps)?)?)
            }
        }
        Command::Simulate | Command::Sweep => {
            let mut cfg: ExperimentConfig = read_config(config)?;
            cfg.seed = resolve_seed(cfg.seed, cli.seed, env_seed)?;
            let experiment = Experiment::new(cfg.clone())?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads.unwrap_or(0))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            let format = cli.format.unwrap_or(Format::Csv);
            if cli.command == Command::Simulate {
                let points =
                    pool.install(|| cfg.n_grid.iter().map(|&n| experiment.run_point(n)).collect::<Result<Vec<_>>>())?;
                match format {
                    Format::Csv => {
                        let mut buf = Vec::new();
                        write_csv(&cfg.protocol, &points, &mut buf)?;
                        emit(out, &buf)
                    }
                    Format::Json => emit(out, &to_json(&serde_json::json!({ "config": cfg, "points": points }))?),
                }
            } else {
                let result = pool.install(|| experiment.sweep())?;
                match format {
                    Format::Csv => {
                        let mut buf = Vec::new();
                        write_csv(&cfg.protocol, &result.points, &mut buf)?;
                        emit(out, &buf)
                    }
                    Format::Json => {
                        let p = experiment.protocol();
                        let analytic = serde_json::json!({
                            "two_hop": two_hop_rate(p.p_channel(), p.q_channel(), false).rate,
                            "trivial_converse": trivial_converse(p.p_channel(), p.q_channel()).rate,
                        });
                        let summary = serde_json::json!({
                            "config": cfg,
                            "points": result.points,
                            "fit": result.fit,
                            "fit_error": result.fit_error,
                            "bounds": result.bounds,
                            "analytic": analytic,
                        });
                        emit(out, &to_json(&summary)?)
                    }
                }
            }
        }
        Command::Verify => {
            if cli.format == Some(Format::Csv) {
                return Err(Error::Domain("verify only writes JSON".into()));
            }
            let cfg: VerifyConfig = read_config(config)?;
            let protocol = cfg.protocol.compile()?;
            let block = exact_block_verification(&protocol)?;
            let invariants = invariant_checks(&protocol)?;
            let passes = block.passes && invariants.iter().all(|c| c.passes);
            let summary = VerifySummary { block, invariants, passes };
            emit(out, &to_json(&summary)?)?;
            if passes {
                Ok(())
            } else {
                Err(Error::Internal("verification failed; see report".into()))
            }
        }
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Internal(_) => 2,
        _ => 1,
    }
}

/// Parses `args`, runs the command and returns the process exit code.
/// Diagnostics go to stderr.
pub fn run<I, T>(args: I, env_seed: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, env_seed) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("twohop: {e}");
            exit_code(&e)
        }
    }
}
