//! Teacher strategies.
//!
//! The block protocols re-encode each received length-`k` block into a
//! sorted binary string sent during the next block; block 0 carries filler
//! that the student ignores. The baselines forward or summarize the raw
//! observations symbol by symbol.

mod bsc;
mod gtable;
mod llr;

use serde::{Deserialize, Serialize};

pub use bsc::{bsc_threshold, f_fraction, teach_block_bsc};
pub use gtable::{build_g_table, g_bounds, GBounds, GTable};
pub use llr::{build_llr_distribution, LlrDistribution, LLR_MERGE_TOLERANCE, MAX_TYPES};

use crate::channel::{degrading_bsc, ChannelDescriptor, Dmc, Symbol};
use crate::error::{domain, Result};
use crate::exponent::{two_hop_rate, ExtLlr, TiltedFamily};

pub(crate) use bsc::sorted_block;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    SimpleForwarding,
    Cumulative,
    SqrtBlockMajority,
    BscBlock,
    DmcBlock,
}

impl ProtocolKind {
    pub fn is_block(self) -> bool {
        matches!(self, ProtocolKind::BscBlock | ProtocolKind::DmcBlock)
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::SimpleForwarding => "simple-forwarding",
            ProtocolKind::Cumulative => "cumulative",
            ProtocolKind::SqrtBlockMajority => "sqrt-block-majority",
            ProtocolKind::BscBlock => "bsc-block",
            ProtocolKind::DmcBlock => "dmc-block",
        }
    }
}

fn default_k() -> usize {
    1
}

/// Serializable description of a teaching strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    /// Block length; ignored by the baselines.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Channel from the source bit to the teacher.
    pub p_channel: ChannelDescriptor,
    /// Channel from the teacher to the student.
    pub q_channel: ChannelDescriptor,
    /// Tilt for `dmc-block`. Defaults to the minimizer of the 2-hop rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_bar: Option<f64>,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind, k: usize, p: ChannelDescriptor, q: ChannelDescriptor) -> Self {
        Self { kind, k, p_channel: p, q_channel: q, s_bar: None }
    }

    pub fn compile(&self) -> Result<Protocol> {
        Protocol::new(self)
    }
}

/// State of the BSC sorted-sequence encoder.
#[derive(Debug, Clone)]
pub struct BscBlock {
    /// Common crossover probability `max(p, q)` both hops are degraded to.
    pub e: f64,
    /// Leading ones sent for each count of received ones, `0..=k`.
    pub thresholds: Vec<usize>,
}

/// State of the general DMC encoder.
#[derive(Debug, Clone)]
pub struct DmcBlock {
    pub s_bar: f64,
    pub mu_max: f64,
    pub dist: LlrDistribution,
    pub g: GTable,
    llrs: Vec<Option<ExtLlr>>,
}

#[derive(Debug, Clone)]
enum Encoder {
    SimpleForwarding,
    Cumulative,
    SqrtBlockMajority,
    Bsc(BscBlock),
    Dmc(DmcBlock),
}

/// A [`ProtocolSpec`] with its channels built and tables precomputed.
#[derive(Debug, Clone)]
pub struct Protocol {
    spec: ProtocolSpec,
    p: Dmc,
    q: Dmc,
    teacher_noise: Option<Dmc>,
    student_noise: Option<Dmc>,
    encoder: Encoder,
}

impl Protocol {
    pub fn new(spec: &ProtocolSpec) -> Result<Self> {
        if spec.k == 0 {
            return domain("block length k must be positive");
        }
        let p = spec.p_channel.build()?;
        let q = spec.q_channel.build()?;
        let mut teacher_noise = None;
        let mut student_noise = None;
        let encoder = match spec.kind {
            ProtocolKind::SimpleForwarding | ProtocolKind::Cumulative | ProtocolKind::SqrtBlockMajority => {
                if p.alphabet_size() != 2 {
                    return domain("baseline teachers need a binary-output teacher channel");
                }
                match spec.kind {
                    ProtocolKind::SimpleForwarding => Encoder::SimpleForwarding,
                    ProtocolKind::Cumulative => Encoder::Cumulative,
                    _ => Encoder::SqrtBlockMajority,
                }
            }
            ProtocolKind::BscBlock => {
                let (Some(bp), Some(bq)) = (p.as_bsc(), q.as_bsc()) else {
                    return domain("bsc-block needs two binary symmetric channels");
                };
                let e = bp.max(bq);
                teacher_noise = degrading_bsc(bp, e)?;
                student_noise = degrading_bsc(bq, e)?;
                let thresholds = (0..=spec.k).map(|j| bsc_threshold(j, spec.k, e)).collect();
                Encoder::Bsc(BscBlock { e, thresholds })
            }
            ProtocolKind::DmcBlock => {
                let s_bar = match spec.s_bar {
                    Some(s) if (0.0..=1.0).contains(&s) => s,
                    Some(s) => return domain(format!("s_bar = {s} outside [0, 1]")),
                    None => two_hop_rate(&p, &q, false).s_star,
                };
                let mu_max = TiltedFamily::new(&p).mu(s_bar).max(TiltedFamily::new(&q).mu(s_bar));
                if mu_max.is_nan() || mu_max >= 0.0 {
                    return domain(format!("mu_max = {mu_max} at s_bar = {s_bar}; need a negative value"));
                }
                let dist = build_llr_distribution(&p, spec.k)?;
                let g = build_g_table(&dist, spec.k, s_bar, mu_max)?;
                Encoder::Dmc(DmcBlock { s_bar, mu_max, dist, g, llrs: llr::symbol_llrs(&p) })
            }
        };
        Ok(Self { spec: spec.clone(), p, q, teacher_noise, student_noise, encoder })
    }

    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn kind(&self) -> ProtocolKind {
        self.spec.kind
    }

    pub fn k(&self) -> usize {
        self.spec.k
    }

    pub fn p_channel(&self) -> &Dmc {
        &self.p
    }

    pub fn q_channel(&self) -> &Dmc {
        &self.q
    }

    /// Extra noise the teacher adds to its observations before encoding, so
    /// that both hops of `bsc-block` see the same crossover probability.
    pub fn teacher_noise(&self) -> Option<&Dmc> {
        self.teacher_noise.as_ref()
    }

    /// Extra noise the student adds to its observations before decoding.
    pub fn student_noise(&self) -> Option<&Dmc> {
        self.student_noise.as_ref()
    }

    pub fn bsc_block(&self) -> Option<&BscBlock> {
        match &self.encoder {
            Encoder::Bsc(b) => Some(b),
            _ => None,
        }
    }

    pub fn dmc_block(&self) -> Option<&DmcBlock> {
        match &self.encoder {
            Encoder::Dmc(d) => Some(d),
            _ => None,
        }
    }

    /// Encodes one received block (block kinds only).
    pub fn teach_block(&self, y_block: &[Symbol]) -> Result<Vec<u8>> {
        let k = self.spec.k;
        if y_block.len() != k {
            return domain(format!("block has {} symbols, expected {k}", y_block.len()));
        }
        match &self.encoder {
            Encoder::Bsc(b) => {
                let ones = y_block.iter().filter(|&&y| y == 1).count();
                Ok(sorted_block(k, b.thresholds[ones], 1))
            }
            Encoder::Dmc(_) => teach_block_dmc(y_block, self),
            _ => domain(format!("{} is not a block protocol", self.spec.kind.name())),
        }
    }

    /// Teacher output for a whole observation stream. `X_i` depends only on
    /// `Y_1..Y_i`.
    pub fn teach_stream(&self, y: &[Symbol]) -> Result<Vec<u8>> {
        let n = y.len();
        match &self.encoder {
            Encoder::SimpleForwarding => y.iter().map(|&s| as_bit(s)).collect(),
            Encoder::Cumulative => {
                let mut ones = 0usize;
                let mut prev = 0u8;
                let mut out = Vec::with_capacity(n);
                for (i, &s) in y.iter().enumerate() {
                    ones += as_bit(s)? as usize;
                    prev = majority_or(ones, i + 1, prev);
                    out.push(prev);
                }
                Ok(out)
            }
            Encoder::SqrtBlockMajority => {
                let b = sqrt_block_len(n);
                let mut out = Vec::with_capacity(n);
                let (mut ones, mut seen, mut current) = (0usize, 0usize, 0u8);
                for chunk in y.chunks(b) {
                    out.extend(std::iter::repeat_n(current, chunk.len()));
                    for &s in chunk {
                        ones += as_bit(s)? as usize;
                    }
                    seen += chunk.len();
                    current = majority_or(ones, seen, current);
                }
                Ok(out)
            }
            Encoder::Bsc(_) | Encoder::Dmc(_) => {
                let k = self.spec.k;
                if !n.is_multiple_of(k) {
                    return domain(format!("stream length {n} is not a multiple of k = {k}"));
                }
                let mut out = vec![0u8; n.min(k)];
                for block in y.chunks(k).take((n / k).saturating_sub(1)) {
                    out.extend(self.teach_block(block)?);
                }
                Ok(out)
            }
        }
    }
}

fn as_bit(s: Symbol) -> Result<u8> {
    match s {
        0 | 1 => Ok(s as u8),
        _ => domain(format!("symbol {s} is not a bit")),
    }
}

// Majority of `ones` out of `total`; ties keep `prev`.
fn majority_or(ones: usize, total: usize, prev: u8) -> u8 {
    match (2 * ones).cmp(&total) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => prev,
    }
}

/// Update period of the sqrt-block baseline: `ceil(sqrt(n))`.
pub fn sqrt_block_len(n: usize) -> usize {
    let mut b = (n as f64).sqrt().ceil() as usize;
    while b > 1 && (b - 1) * (b - 1) >= n {
        b -= 1;
    }
    while b * b < n {
        b += 1;
    }
    b.max(1)
}

/// DMC encoder: `g(l)` zeros followed by `k - g(l)` ones, where `l` is the
/// LLR of the received block.
pub fn teach_block_dmc(y_block: &[Symbol], protocol: &Protocol) -> Result<Vec<u8>> {
    let Encoder::Dmc(d) = &protocol.encoder else {
        return domain("teach_block_dmc needs a dmc-block protocol");
    };
    let k = protocol.spec.k;
    if y_block.len() != k {
        return domain(format!("block has {} symbols, expected {k}", y_block.len()));
    }
    let i = d.dist.index_of_block(&d.llrs, y_block)?;
    Ok(sorted_block(k, d.g.values[i], 0))
}
