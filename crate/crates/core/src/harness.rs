//! Monte Carlo experiments and exact block verification.
//!
//! Every trial draws from its own ChaCha8 stream, keyed by the master seed,
//! the block length `n` and the trial index, so results do not depend on
//! how trials are scheduled across threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::Symbol;
use crate::decoder::{block_llr_fast, decode_block_protocol, decode_majority, BlockLlrTables};
use crate::error::{domain, Error, Result};
use crate::exponent::binary_kl;
use crate::protocol::{Protocol, ProtocolKind, ProtocolSpec};

/// Largest number of student blocks [`exact_block_verification`] enumerates.
pub const MAX_ENUMERATION: usize = 1 << 20;

const Z95: f64 = 1.959_963_984_540_054;
const Z99: f64 = 2.575_829_303_548_900_4;

/// How the student turns its observations into an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DecoderKind {
    /// Maximum likelihood over the block protocol's latents.
    BlockMl,
    /// Majority of the last `ceil(epsilon * n)` symbols.
    Majority { epsilon: f64 },
}

fn default_min_errors() -> u64 {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolSpec,
    pub decoder: DecoderKind,
    pub n_grid: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Points with fewer errors are left out of the exponent fit.
    #[serde(default = "default_min_errors")]
    pub min_errors: u64,
}

/// Empirical error probability at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub n: usize,
    pub trials: u64,
    pub errors: u64,
    pub p_hat: f64,
    pub ci95: (f64, f64),
    pub ci99: (f64, f64),
    /// `-ln(p_hat) / n`, absent when no errors were seen.
    pub rate: Option<f64>,
}

/// Wilson score interval for `errors` out of `trials` at normal quantile `z`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

impl ErrorEstimate {
    pub fn new(n: usize, trials: u64, errors: u64) -> Self {
        let p_hat = if trials == 0 { 0.0 } else { errors as f64 / trials as f64 };
        Self {
            n,
            trials,
            errors,
            p_hat,
            ci95: wilson_interval(errors, trials, Z95),
            ci99: wilson_interval(errors, trials, Z99),
            rate: (errors > 0).then(|| -p_hat.ln() / n as f64),
        }
    }
}

/// A compiled experiment: protocol tables are built once and shared by
/// every trial.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    protocol: Protocol,
    tables: Option<BlockLlrTables>,
}

// Per-worker scratch buffers.
#[derive(Default)]
struct Scratch {
    y: Vec<Symbol>,
    z: Vec<Symbol>,
}

fn trial_rng(seed: u64, n: usize, trial: u64) -> Result<ChaCha8Rng> {
    if n as u64 >= 1 << 32 || trial >= 1 << 32 {
        return domain("n and trial index must stay below 2^32");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | trial);
    Ok(rng)
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        if config.trials == 0 {
            return domain("trials must be at least 1");
        }
        if config.n_grid.is_empty() || config.n_grid.contains(&0) {
            return domain("n_grid must hold positive lengths");
        }
        if config.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return domain("n_grid must be increasing");
        }
        let protocol = config.protocol.compile()?;
        let k = protocol.k();
        let block = protocol.kind().is_block();
        if block {
            if let Some(&n) = config.n_grid.iter().find(|&&n| n % k != 0 || n < 2 * k) {
                return domain(format!("n = {n} must be a multiple of k = {k} and at least 2k"));
            }
        }
        let tables = match config.decoder {
            DecoderKind::BlockMl if block => Some(BlockLlrTables::for_protocol(&protocol)?),
            DecoderKind::BlockMl => {
                return domain(format!("{} has no block decoder", protocol.kind().name()));
            }
            DecoderKind::Majority { epsilon } => {
                if !(epsilon > 0.0 && epsilon <= 1.0) {
                    return domain(format!("epsilon = {epsilon} outside (0, 1]"));
                }
                if protocol.q_channel().alphabet_size() != 2 {
                    return domain("majority decoding needs a binary-output student channel");
                }
                None
            }
        };
        Ok(Self { config, protocol, tables })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    fn run_trial(&self, n: usize, trial: u64, scratch: &mut Scratch) -> Result<bool> {
        let mut rng = trial_rng(self.config.seed, n, trial)?;
        let theta = u8::from(rng.random::<bool>());
        let (p, q) = (self.protocol.p_channel(), self.protocol.q_channel());
        scratch.y.clear();
        scratch.y.extend((0..n).map(|_| p.sample(theta, &mut rng)));
        if let Some(noise) = self.protocol.teacher_noise() {
            for y in scratch.y.iter_mut() {
                *y = noise.sample(*y as u8, &mut rng);
            }
        }
        let x = self.protocol.teach_stream(&scratch.y)?;
        scratch.z.clear();
        scratch.z.extend(x.iter().map(|&b| q.sample(b, &mut rng)));
        if let Some(noise) = self.protocol.student_noise() {
            for z in scratch.z.iter_mut() {
                *z = noise.sample(*z as u8, &mut rng);
            }
        }
        let estimate = match (&self.tables, self.config.decoder) {
            (Some(t), _) => decode_block_protocol(&scratch.z, t)?.bit,
            (None, DecoderKind::Majority { epsilon }) => decode_majority(&scratch.z, epsilon, &mut rng)?,
            (None, DecoderKind::BlockMl) => unreachable!("checked in Experiment::new"),
        };
        Ok(estimate != theta)
    }

    /// Runs all trials at one `n`.
    pub fn run_point(&self, n: usize) -> Result<ErrorEstimate> {
        let errors = (0..self.config.trials)
            .into_par_iter()
            .map_init(Scratch::default, |s, t| self.run_trial(n, t, s).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        Ok(ErrorEstimate::new(n, self.config.trials, errors))
    }

    /// Runs every point of the grid, fits the exponent and compares each
    /// point with the analytic block bound where one exists.
    pub fn sweep(&self) -> Result<SweepResult> {
        let points = self.config.n_grid.iter().map(|&n| self.run_point(n)).collect::<Result<Vec<_>>>()?;
        let (fit, fit_error) = match fit_exponent(&points, self.config.min_errors) {
            Ok(f) => (Some(f), None),
            Err(Error::Estimation(msg)) => (None, Some(msg)),
            Err(e) => return Err(e),
        };
        let bounds = points
            .iter()
            .map(|pt| {
                analytic_block_bound(&self.protocol, pt.n).map(|bound| BoundCheck {
                    n: pt.n,
                    bound,
                    ci99_lo: pt.ci99.0,
                    holds: pt.ci99.0 <= bound,
                })
            })
            .collect();
        Ok(SweepResult { points, fit, fit_error, bounds })
    }
}

/// Convenience wrapper: compile `config` and run one point.
pub fn run_point(config: &ExperimentConfig, n: usize) -> Result<ErrorEstimate> {
    Experiment::new(config.clone())?.run_point(n)
}

/// Slope of `-ln p_hat` against `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    /// Lengths of the points that entered the fit.
    pub used: Vec<usize>,
}

/// Weighted least squares of `-ln p_hat` on `n` with a free intercept.
///
/// Weights are the inverse delta-method variances `errors / (1 - p_hat)`.
/// Points with fewer than `min_errors` errors are dropped; fewer than three
/// remaining points is an estimation error.
pub fn fit_exponent(points: &[ErrorEstimate], min_errors: u64) -> Result<ExponentFit> {
    let used: Vec<&ErrorEstimate> = points.iter().filter(|p| p.errors >= min_errors.max(1) && p.p_hat < 1.0).collect();
    if used.len() < 3 {
        return Err(Error::Estimation(format!(
            "{} of {} points have at least {min_errors} errors; need 3",
            used.len(),
            points.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = used.iter().map(|p| -p.p_hat.ln()).collect();
    let ws: Vec<f64> = used.iter().map(|p| p.errors as f64 / (1.0 - p.p_hat)).collect();
    let sw: f64 = ws.iter().sum();
    let xbar = ws.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ybar = ws.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * (x - xbar).powi(2)).sum();
    let sxy: f64 = ws.iter().zip(xs.iter().zip(&ys)).map(|(w, (x, y))| w * (x - xbar) * (y - ybar)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::Estimation("all fitted points share one n".into()));
    }
    let slope = sxy / sxx;
    Ok(ExponentFit {
        slope,
        slope_se: (1.0 / sxx).sqrt(),
        intercept: ybar - slope * xbar,
        used: used.iter().map(|p| p.n).collect(),
    })
}

/// Per-block Bhattacharyya bound of a block protocol: `(k+1)^2 e^{-k D(1/2||e)}`
/// for `bsc-block`, `(k+1)^{2|Y|} e^{k mu_max}` for `dmc-block`.
pub fn block_rho_bound(protocol: &Protocol) -> Option<f64> {
    let k = protocol.k() as f64;
    if let Some(b) = protocol.bsc_block() {
        let d = binary_kl(0.5, b.e).expect("e in (0, 1/2)");
        return Some((k + 1.0).powi(2) * (-k * d).exp());
    }
    protocol.dmc_block().map(|d| {
        let m = protocol.p_channel().alphabet_size() as f64;
        (k + 1.0).powf(2.0 * m) * (k * d.mu_max).exp()
    })
}

/// Error bound `rho^(n/k - 1)` for a block protocol at length `n`, capped at 1.
pub fn analytic_block_bound(protocol: &Protocol, n: usize) -> Option<f64> {
    let rho = block_rho_bound(protocol)?;
    let blocks = (n / protocol.k()).saturating_sub(1) as i32;
    Some(rho.powi(blocks).min(1.0))
}

/// Empirical error against the analytic bound at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub n: usize,
    pub bound: f64,
    pub ci99_lo: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<ErrorEstimate>,
    pub fit: Option<ExponentFit>,
    pub fit_error: Option<String>,
    pub bounds: Vec<Option<BoundCheck>>,
}

/// Exact single-block quantities from enumerating every student block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: ProtocolKind,
    pub k: usize,
    /// Bhattacharyya coefficient between `W | theta = 0` and `W | theta = 1`.
    pub rho_w: f64,
    /// Tilted coefficient at `s_bar` (dmc-block only).
    pub rho_w_tilted: Option<f64>,
    /// Error of the single-block ML test with equal priors.
    pub ml_error: f64,
    pub bound: f64,
    /// `bound - checked coefficient`; positive when the bound holds.
    pub margin: f64,
    pub passes: bool,
}

/// Enumerates all student blocks of a block protocol and compares the exact
/// coefficient with the analytic per-block bound.
pub fn exact_block_verification(protocol: &Protocol) -> Result<VerificationReport> {
    let tables = BlockLlrTables::for_protocol(protocol)?;
    let k = protocol.k();
    let m = protocol.q_channel().alphabet_size();
    let states = (m as f64).powi(k as i32);
    if states > MAX_ENUMERATION as f64 {
        return Err(Error::Refused(format!("{m}^{k} student blocks exceed the limit of {MAX_ENUMERATION}")));
    }
    let s_bar = protocol.dmc_block().map(|d| d.s_bar);
    let mut w = vec![0usize; k];
    let (mut rho, mut tilted, mut err, mut mass0, mut mass1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for code in 0..states as usize {
        let mut c = code;
        for slot in w.iter_mut() {
            *slot = c % m;
            c /= m;
        }
        let l = block_llr_fast(&w, &tables)?.likelihood;
        let (p0, p1) = (l.log_p0.exp(), l.log_p1.exp());
        mass0 += p0;
        mass1 += p1;
        rho += (p0 * p1).sqrt();
        err += 0.5 * p0.min(p1);
        if let Some(s) = s_bar {
            if p0 > 0.0 && p1 > 0.0 {
                tilted += p0.powf(1.0 - s) * p1.powf(s);
            }
        }
    }
    if (mass0 - 1.0).abs() > 1e-9 || (mass1 - 1.0).abs() > 1e-9 {
        return crate::error::internal(format!("student block laws sum to {mass0} and {mass1}"));
    }
    let bound = block_rho_bound(protocol).expect("block protocol");
    let checked = if s_bar.is_some() { tilted } else { rho };
    Ok(VerificationReport {
        kind: protocol.kind(),
        k,
        rho_w: rho,
        rho_w_tilted: s_bar.map(|_| tilted),
        ml_error: err,
        bound,
        margin: bound - checked,
        passes: checked <= bound,
    })
}

/// One CSV row per point.
#[derive(Debug, Clone, Serialize)]
struct CsvRow<'a> {
    protocol: &'a str,
    #[serde(rename = "p_or_P")]
    p_or_p: String,
    #[serde(rename = "q_or_Q")]
    q_or_q: String,
    k: usize,
    n: usize,
    trials: u64,
    errors: u64,
    p_hat: f64,
    ci_lo: f64,
    ci_hi: f64,
}

/// Writes points as CSV with the 95% Wilson interval.
pub fn write_csv<W: Write>(spec: &ProtocolSpec, points: &[ErrorEstimate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for pt in points {
        w.serialize(CsvRow {
            protocol: spec.kind.name(),
            p_or_p: spec.p_channel.label(),
            q_or_q: spec.q_channel.label(),
            k: spec.k,
            n: pt.n,
            trials: pt.trials,
            errors: pt.errors,
            p_hat: pt.p_hat,
            ci_lo: pt.ci95.0,
            ci_hi: pt.ci95.1,
        })?;
    }
    w.flush()?;
    Ok(())
}
