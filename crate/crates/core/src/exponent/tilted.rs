use std::cmp::Ordering;

use crate::channel::{Dmc, Symbol};

/// A log-likelihood ratio on the extended real line.
///
/// Variant order gives the natural order: `NegInf < Finite(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtLlr {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtLlr {
    /// `ln(p1 / p0)`, or `None` when both probabilities vanish.
    pub fn log_ratio(p0: f64, p1: f64) -> Option<Self> {
        match (p0 > 0.0, p1 > 0.0) {
            (true, true) => Some(ExtLlr::Finite((p1 / p0).ln())),
            (false, true) => Some(ExtLlr::PosInf),
            (true, false) => Some(ExtLlr::NegInf),
            (false, false) => None,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtLlr::NegInf => f64::NEG_INFINITY,
            ExtLlr::Finite(x) => x,
            ExtLlr::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtLlr::Finite(_))
    }

    /// Sum of two ratios. `None` for `+inf + -inf`, which only arises for
    /// outcomes that are impossible under both hypotheses.
    pub fn checked_add(self, other: Self) -> Option<Self> {
        use ExtLlr::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => None,
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (NegInf, _) | (_, NegInf) => Some(NegInf),
        }
    }
}

impl PartialOrd for ExtLlr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtLlr::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
        }
    }
}

/// Per-symbol log-likelihood ratios of a channel together with the
/// tilted-family quantities built on them.
///
/// `mu(s) = ln sum_y P(y|0)^(1-s) P(y|1)^s`, summed over the common support
/// of the two rows. On `(0, 1)` this is the plain tilted sum; at the
/// endpoints it is the continuity extension, and the derivatives there are
/// the one-sided limits.
#[derive(Debug, Clone)]
pub struct TiltedFamily {
    channel: Dmc,
    log_ratios: Vec<Option<ExtLlr>>,
    // (ln P(y|0), l(y)) over symbols where both rows are positive
    common: Vec<(f64, f64)>,
}

/// Tilted mean and variance of the per-symbol log ratio at one `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedMoments {
    pub mu: f64,
    pub mean: f64,
    pub variance: f64,
}

impl TiltedFamily {
    pub fn new(channel: &Dmc) -> Self {
        let log_ratios: Vec<_> =
            channel.row0().iter().zip(channel.row1()).map(|(&p0, &p1)| ExtLlr::log_ratio(p0, p1)).collect();
        let common = channel
            .row0()
            .iter()
            .zip(&log_ratios)
            .filter_map(|(&p0, l)| match l {
                Some(ExtLlr::Finite(l)) => Some((p0.ln(), *l)),
                _ => None,
            })
            .collect();
        Self { channel: channel.clone(), log_ratios, common }
    }

    pub fn channel(&self) -> &Dmc {
        &self.channel
    }

    /// `l(y) = ln(P(y|1) / P(y|0))`; `None` outside the support of both rows.
    pub fn log_ratio(&self, y: Symbol) -> Option<ExtLlr> {
        self.log_ratios[y]
    }

    pub fn log_ratios(&self) -> &[Option<ExtLlr>] {
        &self.log_ratios
    }

    /// Whether both rows are positive everywhere.
    pub fn full_support(&self) -> bool {
        self.common.len() == self.channel.alphabet_size()
    }

    /// `mu`, `mu'` and `mu''` at `s`, computed from the tilted distribution
    /// `P(y|0)^(1-s) P(y|1)^s / rho(s)` on the common support.
    pub fn moments(&self, s: f64) -> TiltedMoments {
        if self.common.is_empty() {
            // disjoint supports: rho = 0
            return TiltedMoments { mu: f64::NEG_INFINITY, mean: 0.0, variance: 0.0 };
        }
        let exps: Vec<f64> = self.common.iter().map(|&(lp0, l)| lp0 + s * l).collect();
        let peak = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = exps.iter().map(|e| (e - peak).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mu = peak + total.ln();
        let mean = weights.iter().zip(&self.common).map(|(w, &(_, l))| w * l).sum::<f64>() / total;
        let variance = weights.iter().zip(&self.common).map(|(w, &(_, l))| w * (l - mean).powi(2)).sum::<f64>() / total;
        TiltedMoments { mu, mean, variance }
    }

    pub fn mu(&self, s: f64) -> f64 {
        self.moments(s).mu
    }

    pub fn mu_prime(&self, s: f64) -> f64 {
        self.moments(s).mean
    }

    pub fn mu_double_prime(&self, s: f64) -> f64 {
        self.moments(s).variance
    }

    /// `rho(s) = exp(mu(s))`.
    pub fn rho(&self, s: f64) -> f64 {
        self.mu(s).exp()
    }
}
