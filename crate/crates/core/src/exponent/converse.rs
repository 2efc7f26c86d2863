//! Converse bounds and the two-round exponents used to compare against them.

use serde::Serialize;

use super::search::minimize_convex;
use super::{binary_kl, one_hop_rate, two_hop_rate, BoundFamily, ExponentReport, TiltedFamily};
use crate::channel::Dmc;
use crate::error::{domain, internal, Result};

/// Violations of `mu(s) <= mu(1 - s)` up to this size are treated as numerical noise.
const ASSUMPTION1_TOLERANCE: f64 = 1e-12;
/// `|mu'(s*)|` below this counts as a stationary point.
const STATIONARY_TOLERANCE: f64 = 1e-8;
/// `|mu_P(s*) - mu_Q(s*)|` below this counts as a crossing.
const CROSSING_TOLERANCE: f64 = 1e-7;

/// Data-processing converse `-max(min_s mu_P, min_s mu_Q)`.
pub fn trivial_converse(ch_p: &Dmc, ch_q: &Dmc) -> ExponentReport {
    let p = one_hop_rate(ch_p);
    let q = one_hop_rate(ch_q);
    let binding = if p.mu_star >= q.mu_star { p } else { q };
    ExponentReport { family: BoundFamily::TrivialConverse, ..binding }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assumption1Check {
    pub holds: bool,
    /// `max_s mu(s) - mu(1 - s)` over the grid on `[0, 1/2]`.
    pub worst_violation: f64,
}

/// Grid check of `mu(s) <= mu(1 - s)` for `s` in `[0, 1/2]`.
pub fn check_assumption1(ch: &Dmc, grid_step: f64) -> Result<Assumption1Check> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return domain(format!("grid step {grid_step} outside (0, 0.1]"));
    }
    let fam = TiltedFamily::new(ch);
    let steps = (0.5 / grid_step).floor() as usize;
    let worst = (0..=steps)
        .map(|i| i as f64 * grid_step)
        .chain(std::iter::once(0.5))
        .map(|s| fam.mu(s) - fam.mu(1.0 - s))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Assumption1Check { holds: worst <= ASSUMPTION1_TOLERANCE, worst_violation: worst })
}

/// Two-round exponent without feedback, `E_1(P, Q, gamma)`.
///
/// A fraction `gamma` of the block uses `P` and the rest uses `Q`. For
/// antipodal codewords with a fraction `beta` of ones on each channel the
/// exponent is `-min_s` of
///
/// ```text
/// gamma (beta_P mu_P(s) + (1 - beta_P) mu_P(1 - s))
///   + (1 - gamma) (beta_Q mu_Q(s) + (1 - beta_Q) mu_Q(1 - s))
/// ```
///
/// For fixed `s` this is linear in each `beta`, so its minimum over `s` is
/// concave in `beta` and the exponent is convex in `beta`. The best codeword
/// composition is therefore a vertex of `{0, 1}^2`, and only the four
/// vertices are searched.
pub fn e1(ch_p: &Dmc, ch_q: &Dmc, gamma: f64) -> Result<ExponentReport> {
    if !(0.0..=1.0).contains(&gamma) {
        return domain(format!("gamma = {gamma} outside [0, 1]"));
    }
    let fp = TiltedFamily::new(ch_p);
    let fq = TiltedFamily::new(ch_q);
    let oriented = |fam: &TiltedFamily, ones: bool, s: f64| if ones { fam.mu(s) } else { fam.mu(1.0 - s) };
    let best = [(true, true), (true, false), (false, true), (false, false)]
        .into_iter()
        .map(|(bp, bq)| {
            minimize_convex(|s| gamma * oriented(&fp, bp, s) + (1.0 - gamma) * oriented(&fq, bq, s), 0.0, 1.0)
        })
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("four vertices");
    Ok(ExponentReport::new(BoundFamily::E1Converse, best.x, best.value, 0.0, 1.0))
}

/// `min_gamma E_1(P, Q, gamma)` over `gamma = 0, 1/steps, ..., 1`.
/// Returns the minimizing `gamma` and its report.
pub fn e1_min_over_gamma(ch_p: &Dmc, ch_q: &Dmc, steps: usize) -> Result<(f64, ExponentReport)> {
    if steps == 0 {
        return domain("gamma grid needs at least one step");
    }
    let mut best: Option<(f64, ExponentReport)> = None;
    for i in 0..=steps {
        let gamma = i as f64 / steps as f64;
        let r = e1(ch_p, ch_q, gamma)?;
        if best.is_none_or(|(_, b)| r.rate < b.rate) {
            best = Some((gamma, r));
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// Which branch of the balancing argument produced `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BalanceCase {
    /// `mu_P` is the larger curve at `s*` and is globally minimized there.
    PMinimized,
    /// `mu_Q` is the larger curve at `s*` and is globally minimized there.
    QMinimized,
    /// The curves cross at `s*` with derivatives of opposite sign.
    DerivativeRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaChoice {
    pub gamma: f64,
    pub case: BalanceCase,
    pub s_star: f64,
    pub mu_star: f64,
}

/// Finds `gamma` with `gamma mu_P(s) + (1 - gamma) mu_Q(s) >= mu*` for all
/// `s`, where `mu* = min_s max(mu_P(s), mu_Q(s))`.
pub fn gamma_balanced(ch_p: &Dmc, ch_q: &Dmc) -> Result<GammaChoice> {
    let fp = TiltedFamily::new(ch_p);
    let fq = TiltedFamily::new(ch_q);
    let report = two_hop_rate(ch_p, ch_q, false);
    let s = report.s_star;
    let (mp, mq) = (fp.moments(s), fq.moments(s));
    let choice = |gamma, case| GammaChoice { gamma, case, s_star: s, mu_star: report.mu_star };

    if mp.mu >= mq.mu && globally_minimized(s, mp.mean) {
        return Ok(choice(1.0, BalanceCase::PMinimized));
    }
    if mq.mu >= mp.mu && globally_minimized(s, mq.mean) {
        return Ok(choice(0.0, BalanceCase::QMinimized));
    }
    if (mp.mu - mq.mu).abs() <= CROSSING_TOLERANCE && mp.mean * mq.mean <= 0.0 && mq.mean != mp.mean {
        let gamma = mq.mean / (mq.mean - mp.mean);
        return Ok(choice(gamma.clamp(0.0, 1.0), BalanceCase::DerivativeRatio));
    }
    internal(format!(
        "no balancing case applies at s* = {s}: mu_P = {}, mu_Q = {}, mu_P' = {}, mu_Q' = {}",
        mp.mu, mq.mu, mp.mean, mq.mean
    ))
}

fn globally_minimized(s: f64, derivative: f64) -> bool {
    if s <= 1e-9 {
        derivative >= -STATIONARY_TOLERANCE
    } else if s >= 1.0 - 1e-9 {
        derivative <= STATIONARY_TOLERANCE
    } else {
        derivative.abs() <= STATIONARY_TOLERANCE
    }
}

/// `min_s [gamma mu_P(s) + (1 - gamma) mu_Q(s)] - mu_star` over an `s` grid
/// with `steps + 1` points. Non-negative when `gamma` balances the pair.
pub fn gamma_defining_slack(ch_p: &Dmc, ch_q: &Dmc, gamma: f64, mu_star: f64, steps: usize) -> f64 {
    let fp = TiltedFamily::new(ch_p);
    let fq = TiltedFamily::new(ch_q);
    (0..=steps)
        .map(|i| {
            let s = i as f64 / steps as f64;
            gamma * fp.mu(s) + (1.0 - gamma) * fq.mu(s) - mu_star
        })
        .fold(f64::INFINITY, f64::min)
}

/// Exponent of the two-round feedback scheme with a BSC(`p`) first round
/// and a reverse Z-channel(`q`) second round:
/// `gamma D(1/2 || p) + (1 - gamma) ln(1/q)`.
pub fn feedback_exponent_bsc_rz(p: f64, q: f64, gamma: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return domain(format!("p = {p} outside (0, 1/2)"));
    }
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q = {q} outside (0, 1)"));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return domain(format!("gamma = {gamma} outside [0, 1]"));
    }
    Ok(gamma * binary_kl(0.5, p)? + (1.0 - gamma) * (1.0 / q).ln())
}

/// Converse for block-structured teaching,
/// `-min_{s in [0, 1/2]} max(mu_P(s), mu_Q(s))`.
///
/// Only valid when both channels satisfy `mu(s) <= mu(1 - s)` on `[0, 1/2]`
/// (see [`check_assumption1`]); returns `None` otherwise.
pub fn block_converse(ch_p: &Dmc, ch_q: &Dmc) -> Result<Option<ExponentReport>> {
    for ch in [ch_p, ch_q] {
        if !check_assumption1(ch, 1e-3)?.holds {
            return Ok(None);
        }
    }
    let fp = TiltedFamily::new(ch_p);
    let fq = TiltedFamily::new(ch_q);
    let m = minimize_convex(|s| fp.mu(s).max(fq.mu(s)), 0.0, 0.5);
    Ok(Some(ExponentReport::new(BoundFamily::BlockConverse, m.x, m.value, 0.0, 0.5)))
}

/// Natural log of the classical finite-n lower bound
/// `(1/8) exp(n mu(s*) - sqrt(2 n mu''(s*)))` on the 1-hop error probability.
pub fn sgb_log_lower_bound(ch: &Dmc, n: u64) -> Result<f64> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let r = one_hop_rate(ch);
    let curvature = TiltedFamily::new(ch).mu_double_prime(r.s_star);
    let n = n as f64;
    Ok((0.125f64).ln() + n * r.mu_star - (2.0 * n * curvature).sqrt())
}

/// [`sgb_log_lower_bound`] as a probability.
pub fn sgb_lower_bound(ch: &Dmc, n: u64) -> Result<f64> {
    sgb_log_lower_bound(ch, n).map(f64::exp)
}
