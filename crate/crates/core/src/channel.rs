//! Binary-input discrete memoryless channels.
//!
//! A [`Dmc`] is a pair of probability rows over a finite output alphabet,
//! one row per input bit. Output symbols are integer indices; for
//! binary-output channels the index equals the received bit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Row sums and entry equality are checked to this tolerance.
pub const ROW_TOLERANCE: f64 = 1e-12;

/// An output symbol index in `0..alphabet_size`.
pub type Symbol = usize;

/// A binary-input discrete memoryless channel. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    rows: [Vec<f64>; 2],
    cdf: [Vec<f64>; 2],
}

impl Dmc {
    /// Builds a channel from its two transition rows.
    ///
    /// Rows whose sums are within [`ROW_TOLERANCE`] of one are renormalized;
    /// anything else is rejected, as are identical rows.
    pub fn new(row0: Vec<f64>, row1: Vec<f64>) -> Result<Self> {
        if row0.len() < 2 {
            return domain(format!("output alphabet must have at least 2 symbols, got {}", row0.len()));
        }
        if row0.len() != row1.len() {
            return domain(format!("row lengths differ: {} vs {}", row0.len(), row1.len()));
        }
        let row0 = normalize_row(row0, 0)?;
        let row1 = normalize_row(row1, 1)?;
        if row0.iter().zip(&row1).all(|(a, b)| (a - b).abs() <= ROW_TOLERANCE) {
            return domain("rows are identical; the channel carries no information");
        }
        let cdf = [cumulative(&row0), cumulative(&row1)];
        Ok(Self { rows: [row0, row1], cdf })
    }

    pub fn row(&self, input: u8) -> &[f64] {
        &self.rows[input as usize]
    }

    pub fn row0(&self) -> &[f64] {
        &self.rows[0]
    }

    pub fn row1(&self) -> &[f64] {
        &self.rows[1]
    }

    pub fn alphabet_size(&self) -> usize {
        self.rows[0].len()
    }

    /// Transition probability `P(y | input)`.
    pub fn prob(&self, input: u8, y: Symbol) -> f64 {
        self.rows[input as usize][y]
    }

    /// The same channel with its two inputs relabelled.
    pub fn swap_inputs(&self) -> Self {
        Self { rows: [self.rows[1].clone(), self.rows[0].clone()], cdf: [self.cdf[1].clone(), self.cdf[0].clone()] }
    }

    /// The same channel with output symbols permuted so that symbol `y`
    /// becomes `perm[y]`.
    pub fn permute_outputs(&self, perm: &[Symbol]) -> Result<Self> {
        let m = self.alphabet_size();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&y| y >= m || std::mem::replace(&mut seen[y], true)) {
            return domain("output permutation is not a permutation of the alphabet");
        }
        let mut rows = [vec![0.0; m], vec![0.0; m]];
        for (x, row) in rows.iter_mut().enumerate() {
            for (y, &target) in perm.iter().enumerate() {
                row[target] = self.rows[x][y];
            }
        }
        let [r0, r1] = rows;
        Dmc::new(r0, r1)
    }

    /// Draws one output symbol for `input`.
    pub fn sample<R: Rng + ?Sized>(&self, input: u8, rng: &mut R) -> Symbol {
        let u: f64 = rng.random();
        let cdf = &self.cdf[input as usize];
        match cdf.iter().position(|&c| u < c) {
            Some(y) => y,
            // u fell into the rounding gap above the final cumulative sum
            None => {
                self.rows[input as usize].iter().rposition(|&p| p > 0.0).expect("a validated row has positive mass")
            }
        }
    }

    /// Crossover probability when the channel is a BSC, `None` otherwise.
    pub fn as_bsc(&self) -> Option<f64> {
        if self.alphabet_size() != 2 {
            return None;
        }
        let p = self.rows[0][1];
        let symmetric = (self.rows[1][0] - p).abs() <= ROW_TOLERANCE;
        symmetric.then_some(p)
    }
}

fn normalize_row(row: Vec<f64>, input: u8) -> Result<Vec<f64>> {
    if let Some(bad) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return domain(format!("row {input} has entry {bad} outside [0, 1]"));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_TOLERANCE {
        return domain(format!("row {input} sums to {sum}, not 1"));
    }
    Ok(row.into_iter().map(|p| p / sum).collect())
}

fn cumulative(row: &[f64]) -> Vec<f64> {
    row.iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Binary symmetric channel with crossover probability `p`.
pub fn make_bsc(p: f64) -> Result<Dmc> {
    if !(p > 0.0 && p < 0.5) {
        return domain(format!("BSC crossover probability must lie in (0, 1/2), got {p}"));
    }
    Dmc::new(vec![1.0 - p, p], vec![p, 1.0 - p])
}

/// Reverse Z-channel: input 1 is received noiselessly, input 0 leaks to
/// output 1 with probability `q`.
pub fn make_reverse_z(q: f64) -> Result<Dmc> {
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("reverse Z-channel parameter must lie in (0, 1), got {q}"));
    }
    Dmc::new(vec![1.0 - q, q], vec![0.0, 1.0])
}

/// Cascade of two channels: the binary output of `first` drives the input
/// of `second`.
pub fn compose(first: &Dmc, second: &Dmc) -> Result<Dmc> {
    if first.alphabet_size() != 2 {
        return domain(format!(
            "the first channel of a cascade needs binary output, got {} symbols",
            first.alphabet_size()
        ));
    }
    let m = second.alphabet_size();
    let row = |x: u8| -> Vec<f64> {
        (0..m).map(|z| first.prob(x, 0) * second.prob(0, z) + first.prob(x, 1) * second.prob(1, z)).collect()
    };
    Dmc::new(row(0), row(1))
}

/// The BSC that turns BSC(`from`) into BSC(`to`) when cascaded after it.
/// Requires `from <= to < 1/2`.
pub fn degrading_bsc(from: f64, to: f64) -> Result<Option<Dmc>> {
    if !(from > 0.0 && from <= to && to < 0.5) {
        return domain(format!("cannot degrade BSC({from}) to BSC({to})"));
    }
    if to - from <= ROW_TOLERANCE {
        return Ok(None);
    }
    make_bsc((to - from) / (1.0 - 2.0 * from)).map(Some)
}

/// JSON description of a channel, e.g. `{"kind": "bsc", "p": 0.2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelDescriptor {
    Bsc { p: f64 },
    ReverseZ { q: f64 },
    General { row0: Vec<f64>, row1: Vec<f64> },
}

impl ChannelDescriptor {
    pub fn build(&self) -> Result<Dmc> {
        match self {
            ChannelDescriptor::Bsc { p } => make_bsc(*p),
            ChannelDescriptor::ReverseZ { q } => make_reverse_z(*q),
            ChannelDescriptor::General { row0, row1 } => Dmc::new(row0.clone(), row1.clone()),
        }
    }

    /// Short human-readable label used in CSV output.
    pub fn label(&self) -> String {
        match self {
            ChannelDescriptor::Bsc { p } => format!("bsc({p})"),
            ChannelDescriptor::ReverseZ { q } => format!("reverse_z({q})"),
            ChannelDescriptor::General { row0, row1 } => format!("general({row0:?};{row1:?})"),
        }
    }
}

impl TryFrom<&ChannelDescriptor> for Dmc {
    type Error = Error;

    fn try_from(d: &ChannelDescriptor) -> Result<Dmc> {
        d.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_rows(ch: &Dmc, row0: &[f64], row1: &[f64]) {
        for (a, b) in ch.row0().iter().zip(row0) {
            assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", ch.row0(), row0);
        }
        for (a, b) in ch.row1().iter().zip(row1) {
            assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", ch.row1(), row1);
        }
    }

    #[test]
    fn bsc_rows() {
        assert_rows(&make_bsc(0.2).unwrap(), &[0.8, 0.2], &[0.2, 0.8]);
        assert_eq!(make_bsc(0.2).unwrap().as_bsc(), Some(0.2));
    }

    #[test]
    fn bsc_range_is_open() {
        for p in [0.0, 0.5, 0.7, -0.1, f64::NAN] {
            assert!(matches!(make_bsc(p), Err(Error::Domain(_))), "p = {p}");
        }
    }

    #[test]
    fn reverse_z_rows() {
        assert_rows(&make_reverse_z(0.8).unwrap(), &[0.2, 0.8], &[0.0, 1.0]);
        assert!(make_reverse_z(1.0).is_err());
        assert!(make_reverse_z(0.0).is_err());
    }

    #[test]
    fn validation() {
        assert!(Dmc::new(vec![1.0], vec![1.0]).is_err());
        assert!(Dmc::new(vec![0.5, 0.5], vec![0.2, 0.3, 0.5]).is_err());
        assert!(Dmc::new(vec![0.5, 0.5], vec![0.5, 0.5]).is_err());
        assert!(Dmc::new(vec![0.6, 0.5], vec![0.5, 0.5]).is_err());
        assert!(Dmc::new(vec![1.2, -0.2], vec![0.5, 0.5]).is_err());
        // decimal-literal rounding is absorbed
        let ch = Dmc::new(vec![0.1, 0.2, 0.7], vec![0.3, 0.3, 0.4]).unwrap();
        assert!((ch.row0().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cascade_of_bscs() {
        let ch = compose(&make_bsc(0.1).unwrap(), &make_bsc(0.125).unwrap()).unwrap();
        assert_rows(&ch, &[0.8, 0.2], &[0.2, 0.8]);
    }

    #[test]
    fn cascade_rz_then_bsc() {
        // row1 = (0, 1) * BSC(0.2) = (0.2, 0.8); row0 = (0.2, 0.8) * BSC(0.2)
        let ch = compose(&make_reverse_z(0.8).unwrap(), &make_bsc(0.2).unwrap()).unwrap();
        assert_rows(&ch, &[0.2 * 0.8 + 0.8 * 0.2, 0.2 * 0.2 + 0.8 * 0.8], &[0.2, 0.8]);
    }

    #[test]
    fn cascade_needs_binary_first() {
        let wide = Dmc::new(vec![0.5, 0.3, 0.2], vec![0.1, 0.1, 0.8]).unwrap();
        assert!(compose(&wide, &make_bsc(0.1).unwrap()).is_err());
    }

    #[test]
    fn degrading_bsc_reaches_target() {
        let u = degrading_bsc(0.1, 0.3).unwrap().unwrap();
        let ch = compose(&make_bsc(0.1).unwrap(), &u).unwrap();
        assert!((ch.as_bsc().unwrap() - 0.3).abs() < 1e-12);
        assert!(degrading_bsc(0.2, 0.2).unwrap().is_none());
    }

    #[test]
    fn reverse_z_input_one_is_noiseless() {
        let ch = make_reverse_z(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..10_000).all(|_| ch.sample(1, &mut rng) == 1));
    }

    #[test]
    fn sampling_is_reproducible() {
        let ch = make_bsc(0.2).unwrap();
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..256).map(|_| ch.sample(1, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn bsc_flip_rate() {
        let ch = make_bsc(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let ones = (0..n).filter(|_| ch.sample(0, &mut rng) == 1).count();
        let rate = ones as f64 / n as f64;
        let sigma = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((rate - 0.3).abs() < 0.002, "rate {rate}");
        assert!((rate - 0.3).abs() < 3.0 * sigma, "rate {rate}");
    }

    #[test]
    fn descriptor_json() {
        let d: ChannelDescriptor = serde_json::from_str(r#"{"kind": "reverse_z", "q": 0.8}"#).unwrap();
        assert_eq!(d, ChannelDescriptor::ReverseZ { q: 0.8 });
        let g: ChannelDescriptor =
            serde_json::from_str(r#"{"kind": "general", "row0": [0.9, 0.1], "row1": [0.3, 0.7]}"#).unwrap();
        assert!(g.build().is_ok());
        assert!(serde_json::from_str::<ChannelDescriptor>(r#"{"kind": "bsc", "p": 0.2, "x": 1}"#).is_err());
    }
}
