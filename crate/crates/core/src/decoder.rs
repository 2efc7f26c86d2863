//! Student-side decoding.
//!
//! For the block protocols each student block `W` is a noisy copy of a
//! sorted string whose transition point is a deterministic function of a
//! latent variable (the number of ones the teacher saw, or its block LLR).
//! `P(W | theta)` is the prior-weighted mixture over latents of
//! `P(W | threshold)`, which the fast path evaluates for every threshold in
//! one sweep over the block.

use rand::Rng;

use crate::channel::{make_bsc, Dmc, Symbol};
use crate::error::{domain, internal, Result};
use crate::protocol::{Protocol, ProtocolKind};

/// Latent priors, thresholds and emission tables for one block.
#[derive(Debug, Clone)]
pub struct BlockLlrTables {
    k: usize,
    /// Distinct thresholds in increasing order.
    thresholds: Vec<usize>,
    log_prior0: Vec<f64>,
    log_prior1: Vec<f64>,
    /// `ln Q(w | b)` for the bit `b` sent before the threshold.
    lead: Vec<f64>,
    /// `ln Q(w | 1 - b)`, for positions at or after the threshold.
    tail: Vec<f64>,
}

fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let peak = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    peak + xs.iter().map(|x| (x - peak).exp()).sum::<f64>().ln()
}

fn log_binomial_pmf(k: usize, prob: f64) -> Vec<f64> {
    let mut log_fact = vec![0.0f64; k + 1];
    for i in 1..=k {
        log_fact[i] = log_fact[i - 1] + (i as f64).ln();
    }
    (0..=k)
        .map(|j| {
            log_fact[k] - log_fact[j] - log_fact[k - j] + j as f64 * prob.ln() + (k - j) as f64 * (1.0 - prob).ln()
        })
        .collect()
}

impl BlockLlrTables {
    /// Builds tables from per-latent priors and thresholds. Latents sharing a
    /// threshold are merged. `lead_bit` is the bit the teacher sends before
    /// the threshold.
    pub fn new(
        log_prior0: &[f64],
        log_prior1: &[f64],
        thresholds: &[usize],
        lead_bit: u8,
        q: &Dmc,
        k: usize,
    ) -> Result<Self> {
        if log_prior0.len() != thresholds.len() || log_prior1.len() != thresholds.len() {
            return domain("priors and thresholds differ in length");
        }
        if thresholds.iter().any(|&t| t > k) || lead_bit > 1 {
            return domain("threshold above k or lead bit not a bit");
        }
        let mut order: Vec<usize> = (0..thresholds.len()).collect();
        order.sort_by_key(|&i| thresholds[i]);
        let mut merged: Vec<(usize, Vec<f64>, Vec<f64>)> = Vec::new();
        for i in order {
            match merged.last_mut() {
                Some(m) if m.0 == thresholds[i] => {
                    m.1.push(log_prior0[i]);
                    m.2.push(log_prior1[i]);
                }
                _ => merged.push((thresholds[i], vec![log_prior0[i]], vec![log_prior1[i]])),
            }
        }
        for (name, lp) in [("prior0", log_prior0), ("prior1", log_prior1)] {
            let total = log_sum_exp(lp.iter().copied()).exp();
            if (total - 1.0).abs() > 1e-9 {
                return internal(format!("{name} sums to {total}"));
            }
        }
        let log_row = |b: u8| q.row(b).iter().map(|p| p.ln()).collect::<Vec<f64>>();
        Ok(Self {
            k,
            thresholds: merged.iter().map(|m| m.0).collect(),
            log_prior0: merged.iter().map(|m| log_sum_exp(m.1.iter().copied())).collect(),
            log_prior1: merged.iter().map(|m| log_sum_exp(m.2.iter().copied())).collect(),
            lead: log_row(lead_bit),
            tail: log_row(1 - lead_bit),
        })
    }

    /// Tables for a compiled block protocol, matching the channel the
    /// student actually decodes from (after any student-side noise).
    pub fn for_protocol(protocol: &Protocol) -> Result<Self> {
        let k = protocol.k();
        match protocol.kind() {
            ProtocolKind::BscBlock => {
                let b = protocol.bsc_block().expect("bsc-block state");
                let q = make_bsc(b.e)?;
                let prior0 = log_binomial_pmf(k, b.e);
                let prior1 = log_binomial_pmf(k, 1.0 - b.e);
                Self::new(&prior0, &prior1, &b.thresholds, 1, &q, k)
            }
            ProtocolKind::DmcBlock => {
                let d = protocol.dmc_block().expect("dmc-block state");
                let ln = |v: &[f64]| v.iter().map(|p| p.ln()).collect::<Vec<f64>>();
                Self::new(&ln(&d.dist.pmf0), &ln(&d.dist.pmf1), &d.g.values, 0, protocol.q_channel(), k)
            }
            other => domain(format!("{} has no block decoder", other.name())),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of distinct thresholds after merging.
    pub fn latent_count(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    fn check(&self, w: &[Symbol]) -> Result<()> {
        if w.len() != self.k {
            return domain(format!("block has {} symbols, expected {}", w.len(), self.k));
        }
        if let Some(y) = w.iter().find(|&&y| y >= self.lead.len()) {
            return domain(format!("symbol {y} outside the output alphabet"));
        }
        Ok(())
    }

    fn mix(&self, log_w: &[f64]) -> BlockLikelihood {
        let log_p0 = log_sum_exp(self.log_prior0.iter().zip(log_w).map(|(a, b)| a + b));
        let log_p1 = log_sum_exp(self.log_prior1.iter().zip(log_w).map(|(a, b)| a + b));
        let llr = if log_p0 == f64::NEG_INFINITY && log_p1 == f64::NEG_INFINITY {
            // a block neither hypothesis can produce carries no evidence
            0.0
        } else {
            log_p1 - log_p0
        };
        BlockLikelihood { log_p0, log_p1, llr }
    }
}

/// `ln P(W | theta)` for both hypotheses and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockLikelihood {
    pub log_p0: f64,
    pub log_p1: f64,
    pub llr: f64,
}

/// Fast-path result with the number of per-position table reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastLlr {
    pub likelihood: BlockLikelihood,
    pub reads: usize,
}

// Running sum of log terms that may include -inf.
#[derive(Default)]
struct LogSum {
    finite: f64,
    neg_inf: usize,
}

impl LogSum {
    fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            self.neg_inf += 1;
        } else {
            self.finite += v;
        }
    }

    fn remove(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            self.neg_inf -= 1;
        } else {
            self.finite -= v;
        }
    }

    fn value(&self) -> f64 {
        if self.neg_inf > 0 {
            f64::NEG_INFINITY
        } else {
            self.finite
        }
    }
}

/// Block LLR in `O(k + latents)`.
///
/// `ln P(W | t)` is evaluated at the smallest threshold with one pass over
/// the block; moving to the next threshold only re-reads the positions
/// between the two. The read count is `k + t_max - t_min <= 2k`.
pub fn block_llr_fast(w: &[Symbol], tables: &BlockLlrTables) -> Result<FastLlr> {
    tables.check(w)?;
    let t0 = tables.thresholds[0];
    let mut sum = LogSum::default();
    for (i, &y) in w.iter().enumerate() {
        sum.add(if i < t0 { tables.lead[y] } else { tables.tail[y] });
    }
    let mut reads = w.len();
    let mut log_w = Vec::with_capacity(tables.latent_count());
    log_w.push(sum.value());
    for pair in tables.thresholds.windows(2) {
        for &y in &w[pair[0]..pair[1]] {
            sum.remove(tables.tail[y]);
            sum.add(tables.lead[y]);
            reads += 1;
        }
        log_w.push(sum.value());
    }
    Ok(FastLlr { likelihood: tables.mix(&log_w), reads })
}

/// Reference `O(k * latents)` evaluation of the same quantity.
pub fn block_llr_naive(w: &[Symbol], tables: &BlockLlrTables) -> Result<BlockLikelihood> {
    tables.check(w)?;
    let log_w: Vec<f64> = tables
        .thresholds
        .iter()
        .map(|&t| w.iter().enumerate().map(|(i, &y)| if i < t { tables.lead[y] } else { tables.tail[y] }).sum())
        .collect();
    Ok(tables.mix(&log_w))
}

/// Estimate of the source bit and the evidence behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub bit: u8,
    pub llr: f64,
    /// Informative blocks that contributed.
    pub blocks: usize,
}

/// Anytime block decoder: feed whole blocks as they arrive and ask for an
/// estimate at any point. The first block is filler and is skipped.
#[derive(Debug, Clone)]
pub struct StreamDecoder<'a> {
    tables: &'a BlockLlrTables,
    seen: usize,
    llr: f64,
}

impl<'a> StreamDecoder<'a> {
    pub fn new(tables: &'a BlockLlrTables) -> Self {
        Self { tables, seen: 0, llr: 0.0 }
    }

    pub fn push_block(&mut self, w: &[Symbol]) -> Result<()> {
        if self.seen == 0 {
            self.tables.check(w)?;
        } else {
            self.llr += block_llr_fast(w, self.tables)?.likelihood.llr;
        }
        self.seen += 1;
        Ok(())
    }

    /// Decides 1 when the total LLR is positive; ties go to 0.
    pub fn estimate(&self) -> Decision {
        Decision { bit: u8::from(self.llr > 0.0), llr: self.llr, blocks: self.seen.saturating_sub(1) }
    }
}

/// ML decision for a full student stream under a block protocol.
pub fn decode_block_protocol(z: &[Symbol], tables: &BlockLlrTables) -> Result<Decision> {
    let (n, k) = (z.len(), tables.k());
    if n % k != 0 {
        return domain(format!("stream length {n} is not a multiple of k = {k}"));
    }
    if n < 2 * k {
        return domain(format!("stream length {n} holds no informative block (k = {k})"));
    }
    let mut dec = StreamDecoder::new(tables);
    for block in z.chunks(k) {
        dec.push_block(block)?;
    }
    Ok(dec.estimate())
}

/// Majority of the last `ceil(epsilon * n)` symbols, ties broken by a fair
/// coin from `rng`.
pub fn decode_majority<R: Rng + ?Sized>(z: &[Symbol], epsilon: f64, rng: &mut R) -> Result<u8> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("epsilon = {epsilon} outside (0, 1]"));
    }
    let window = ((epsilon * z.len() as f64).ceil() as usize).min(z.len());
    if window == 0 {
        return domain("empty majority window");
    }
    let mut ones = 0usize;
    for &s in &z[z.len() - window..] {
        match s {
            0 => {}
            1 => ones += 1,
            _ => return domain(format!("symbol {s} is not a bit")),
        }
    }
    Ok(match (2 * ones).cmp(&window) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => u8::from(rng.random::<bool>()),
    })
}
