//! Analytic exponents: relative entropy, tilted Bhattacharyya coefficients,
//! the `mu` functions of a channel, achievable learning rates and converse
//! bounds.
//!
//! All quantities are in nats. Minimizations over the tilt `s` use
//! golden-section search, which is valid because `mu` is convex in `s` and
//! pointwise maxima and nonnegative combinations of convex functions stay
//! convex.

mod converse;
mod rates;
pub mod search;
mod tilted;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use converse::{
    block_converse, check_assumption1, e1, e1_min_over_gamma, feedback_exponent_bsc_rz, gamma_balanced,
    gamma_defining_slack, sgb_log_lower_bound, sgb_lower_bound, trivial_converse, Assumption1Check, BalanceCase,
    GammaChoice,
};
pub use rates::{one_hop_rate, two_hop_rate};
pub use tilted::{ExtLlr, TiltedFamily, TiltedMoments};

/// Tolerance used when validating probability vectors.
const SUM_TOLERANCE: f64 = 1e-12;

/// Which bound an [`ExponentReport`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    OneHop,
    TwoHopAchievable,
    TwoHopFlipped,
    TrivialConverse,
    BlockConverse,
    E1Converse,
}

/// Result of minimizing some `mu`-type objective over `s`.
///
/// `rate = -mu_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub family: BoundFamily,
    pub s_star: f64,
    pub mu_star: f64,
    pub rate: f64,
    /// Set when the minimizer sits on the boundary of the search interval.
    pub endpoint_minimizer: bool,
}

impl ExponentReport {
    pub(crate) fn new(family: BoundFamily, s_star: f64, mu_star: f64, lo: f64, hi: f64) -> Self {
        let endpoint_minimizer = (s_star - lo).abs() < 1e-9 || (hi - s_star).abs() < 1e-9;
        Self { family, s_star, mu_star, rate: -mu_star, endpoint_minimizer }
    }
}

/// Binary relative entropy `D(a || b)` in nats, with `0 ln 0 = 0`.
pub fn binary_kl(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return domain(format!("binary_kl: a = {a} outside [0, 1]"));
    }
    if !(b > 0.0 && b < 1.0) {
        return domain(format!("binary_kl: b = {b} outside (0, 1)"));
    }
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    Ok((term(a, b) + term(1.0 - a, 1.0 - b)).max(0.0))
}

/// Tilted Bhattacharyya coefficient `sum_x A(x)^(1-s) B(x)^s`.
///
/// The sum runs over the common support, which is the continuity extension
/// at `s = 0` and `s = 1` and agrees with the plain sum inside `(0, 1)`.
pub fn rho_s(dist_a: &[f64], dist_b: &[f64], s: f64) -> Result<f64> {
    if dist_a.len() != dist_b.len() {
        return domain(format!("alphabet sizes differ: {} vs {}", dist_a.len(), dist_b.len()));
    }
    if !(0.0..=1.0).contains(&s) {
        return domain(format!("tilt s = {s} outside [0, 1]"));
    }
    for dist in [dist_a, dist_b] {
        let sum: f64 = dist.iter().sum();
        if dist.iter().any(|p| !(0.0..=1.0).contains(p)) || (sum - 1.0).abs() > SUM_TOLERANCE {
            return domain(format!("not a probability vector (sum {sum})"));
        }
    }
    Ok(dist_a
        .iter()
        .zip(dist_b)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| a.powf(1.0 - s) * b.powf(s))
        .sum())
}
