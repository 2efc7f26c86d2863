use std::cmp::Ordering;

use crate::channel::{Dmc, Symbol};
use crate::error::{domain, internal, Result};
use crate::exponent::ExtLlr;

/// Sums closer than this are treated as the same LLR value. Large sums also
/// get a relative allowance of `1e-14`.
pub const LLR_MERGE_TOLERANCE: f64 = 1e-12;

/// Exact law of the block LLR `L = sum_i l(Y_i)` under both hypotheses.
///
/// `support` is strictly increasing. The tails are stored per support point:
/// `tail0_geq[i] = P(L0 >= support[i])`, `tail1_leq[i] = P(L1 <= support[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrDistribution {
    pub k: usize,
    pub support: Vec<ExtLlr>,
    pub pmf0: Vec<f64>,
    pub pmf1: Vec<f64>,
    pub tail0_geq: Vec<f64>,
    pub tail1_leq: Vec<f64>,
}

fn cmp_llr(a: &ExtLlr, b: &ExtLlr) -> Ordering {
    a.partial_cmp(b).expect("LLR values are never NaN")
}

fn snap(v: ExtLlr) -> ExtLlr {
    match v {
        ExtLlr::Finite(x) if x.abs() < LLR_MERGE_TOLERANCE => ExtLlr::Finite(0.0),
        other => other,
    }
}

fn same(a: ExtLlr, b: ExtLlr) -> bool {
    match (a, b) {
        (ExtLlr::Finite(x), ExtLlr::Finite(y)) => {
            // rounding in a k-term sum grows with its magnitude
            (x - y).abs() <= LLR_MERGE_TOLERANCE.max(1e-14 * x.abs().max(y.abs()))
        }
        _ => a == b,
    }
}

/// Sorts and merges `(value, mass0, mass1)` triples.
fn merge(mut atoms: Vec<(ExtLlr, f64, f64)>) -> Vec<(ExtLlr, f64, f64)> {
    atoms.sort_by(|a, b| cmp_llr(&a.0, &b.0));
    let mut out: Vec<(ExtLlr, f64, f64)> = Vec::with_capacity(atoms.len());
    for (v, m0, m1) in atoms {
        match out.last_mut() {
            Some(last) if same(last.0, v) => {
                last.1 += m0;
                last.2 += m1;
            }
            _ => out.push((v, m0, m1)),
        }
    }
    out
}

/// Per-symbol LLR of `ch`, `None` for symbols no input can produce.
pub(crate) fn symbol_llrs(ch: &Dmc) -> Vec<Option<ExtLlr>> {
    ch.row0().iter().zip(ch.row1()).map(|(&p0, &p1)| ExtLlr::log_ratio(p0, p1)).collect()
}

/// Largest number of output types [`build_llr_distribution`] will enumerate.
pub const MAX_TYPES: u64 = 1 << 22;

/// Number of compositions of `k` into `parts` nonnegative parts, saturating.
fn composition_count(k: usize, parts: usize) -> u64 {
    if parts == 0 {
        return u64::from(k == 0);
    }
    // C(k + parts - 1, parts - 1), built up one factor at a time
    let mut c: u64 = 1;
    for i in 1..parts as u64 {
        c = match c.checked_mul(k as u64 + i) {
            Some(v) => v / i,
            None => return u64::MAX,
        };
    }
    c
}

/// Exact law of the block LLR, built by enumerating the output types.
///
/// Symbols with equal LLR are pooled first. A block's LLR depends only on
/// how often each pooled value occurs, so every type is visited once and
/// its value is the plain weighted sum of its counts. Blocks containing an
/// infinite-LLR symbol are collected in closed form.
pub fn build_llr_distribution(ch: &Dmc, k: usize) -> Result<LlrDistribution> {
    if k == 0 {
        return domain("block length k must be positive");
    }
    let single: Vec<(ExtLlr, f64, f64)> = symbol_llrs(ch)
        .into_iter()
        .enumerate()
        .filter_map(|(y, l)| l.map(|l| (l, ch.prob(0, y), ch.prob(1, y))))
        .collect();
    let single = merge(single);
    let finite: Vec<(f64, f64, f64)> = single
        .iter()
        .filter_map(|&(l, a, b)| match l {
            ExtLlr::Finite(x) => Some((x, a, b)),
            _ => None,
        })
        .collect();
    let types = composition_count(k, finite.len());
    if types > MAX_TYPES {
        return Err(crate::Error::Refused(format!("{types} output types at k = {k} exceed the limit of {MAX_TYPES}")));
    }

    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=k).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let ln0: Vec<f64> = finite.iter().map(|f| f.1.ln()).collect();
    let ln1: Vec<f64> = finite.iter().map(|f| f.2.ln()).collect();
    let mut atoms: Vec<(ExtLlr, f64, f64)> = Vec::with_capacity(types as usize + 2);
    if !finite.is_empty() {
        // depth-first walk over counts; the last pooled value takes the rest
        let mut stack = vec![(0usize, k, 0.0f64, ln_fact[k], ln_fact[k])];
        while let Some((j, left, value, w0, w1)) = stack.pop() {
            if j + 1 == finite.len() {
                let c = left as f64;
                atoms.push((
                    snap(ExtLlr::Finite(value + c * finite[j].0)),
                    (w0 - ln_fact[left] + c * ln0[j]).exp(),
                    (w1 - ln_fact[left] + c * ln1[j]).exp(),
                ));
                continue;
            }
            for (c, lf) in ln_fact[..=left].iter().enumerate() {
                let cf = c as f64;
                stack.push((j + 1, left - c, value + cf * finite[j].0, w0 - lf + cf * ln0[j], w1 - lf + cf * ln1[j]));
            }
        }
    }
    let (fin0, fin1): (f64, f64) = (finite.iter().map(|f| f.1).sum(), finite.iter().map(|f| f.2).sum());
    let kk = k as i32;
    for (inf, a, b) in single.iter().filter(|s| !s.0.is_finite()) {
        // at least one infinite symbol of this sign and none of the other
        let (m0, m1) = match inf {
            ExtLlr::NegInf => ((fin0 + a).powi(kk) - fin0.powi(kk), 0.0),
            _ => (0.0, (fin1 + b).powi(kk) - fin1.powi(kk)),
        };
        atoms.push((*inf, m0, m1));
    }
    let mut atoms = merge(atoms);
    // finite types stay even when their mass underflows, so every block can be looked up
    atoms.retain(|&(l, m0, m1)| l.is_finite() || m0 > 0.0 || m1 > 0.0);

    let support: Vec<ExtLlr> = atoms.iter().map(|a| a.0).collect();
    let pmf0: Vec<f64> = atoms.iter().map(|a| a.1).collect();
    let pmf1: Vec<f64> = atoms.iter().map(|a| a.2).collect();
    let mut tail0_geq = pmf0.clone();
    for i in (0..tail0_geq.len().saturating_sub(1)).rev() {
        tail0_geq[i] += tail0_geq[i + 1];
    }
    let mut tail1_leq = pmf1.clone();
    for i in 1..tail1_leq.len() {
        tail1_leq[i] += tail1_leq[i - 1];
    }
    for (name, pmf) in [("pmf0", &pmf0), ("pmf1", &pmf1)] {
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return internal(format!("{name} of the block LLR sums to {total}"));
        }
    }
    Ok(LlrDistribution { k, support, pmf0, pmf1, tail0_geq, tail1_leq })
}

impl LlrDistribution {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Index of the support point equal to `l`, allowing `1e-9` of drift
    /// for finite values.
    pub fn index_of(&self, l: ExtLlr) -> Option<usize> {
        let i = self.support.partition_point(|s| cmp_llr(s, &l) == Ordering::Less);
        let gap = |j: usize| match (self.support.get(j), l) {
            (Some(ExtLlr::Finite(s)), ExtLlr::Finite(x)) => Some((s - x).abs()).filter(|g| *g <= 1e-9),
            (Some(s), _) => (*s == l).then_some(0.0),
            (None, _) => None,
        };
        match (gap(i), i.checked_sub(1).and_then(gap)) {
            (Some(a), Some(b)) => Some(if b < a { i - 1 } else { i }),
            (Some(_), None) => Some(i),
            (None, Some(_)) => Some(i - 1),
            (None, None) => None,
        }
    }

    /// Support index of the LLR of an observed block.
    pub fn index_of_block(&self, llrs: &[Option<ExtLlr>], block: &[Symbol]) -> Result<usize> {
        let mut total = ExtLlr::Finite(0.0);
        for &y in block {
            let l = llrs.get(y).copied().flatten();
            total = match l.and_then(|l| total.checked_add(l)) {
                Some(t) => t,
                None => return internal(format!("symbol {y} cannot occur under either input")),
            };
        }
        match self.index_of(snap(total)) {
            Some(i) => Ok(i),
            None => internal(format!("block LLR {total:?} not found in the support")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_bsc, make_reverse_z};

    /// Brute-force law of `L` over all `|Y|^k` blocks, keyed by value.
    fn enumerate(ch: &Dmc, k: usize) -> Vec<(f64, f64, f64)> {
        let m = ch.alphabet_size();
        let mut acc: Vec<(f64, f64, f64)> = Vec::new();
        for code in 0..m.pow(k as u32) {
            let (mut c, mut l, mut p0, mut p1) = (code, 0.0f64, 1.0, 1.0);
            for _ in 0..k {
                let y = c % m;
                c /= m;
                p0 *= ch.prob(0, y);
                p1 *= ch.prob(1, y);
                l += (ch.prob(1, y) / ch.prob(0, y)).ln();
            }
            if p0 == 0.0 && p1 == 0.0 {
                continue;
            }
            match acc.iter_mut().find(|a| a.0 == l || (a.0 - l).abs() < 1e-9) {
                Some(a) => {
                    a.1 += p0;
                    a.2 += p1;
                }
                None => acc.push((l, p0, p1)),
            }
        }
        acc.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        acc
    }

    fn check_against_enumeration(ch: &Dmc, k: usize) {
        let d = build_llr_distribution(ch, k).unwrap();
        let e = enumerate(ch, k);
        assert_eq!(d.len(), e.len());
        for (i, (l, p0, p1)) in e.into_iter().enumerate() {
            let v = d.support[i].to_f64();
            assert!(v == l || (v - l).abs() < 1e-9, "{v} vs {l}");
            assert!((d.pmf0[i] - p0).abs() < 1e-14, "{} vs {p0}", d.pmf0[i]);
            assert!((d.pmf1[i] - p1).abs() < 1e-14);
        }
    }

    #[test]
    fn single_symbol_bsc() {
        let d = build_llr_distribution(&make_bsc(0.2).unwrap(), 1).unwrap();
        let l = (0.2f64 / 0.8).ln();
        assert_eq!(d.support, vec![ExtLlr::Finite(l), ExtLlr::Finite(-l)]);
        assert_eq!(d.pmf1, vec![0.2, 0.8]);
        assert_eq!(d.pmf0, vec![0.8, 0.2]);
    }

    #[test]
    fn matches_enumeration() {
        check_against_enumeration(&make_bsc(0.3).unwrap(), 4);
        check_against_enumeration(&Dmc::new(vec![0.5, 0.3, 0.2], vec![0.1, 0.25, 0.65]).unwrap(), 4);
        check_against_enumeration(&Dmc::new(vec![0.4, 0.0, 0.6], vec![0.1, 0.9, 0.0]).unwrap(), 4);
        check_against_enumeration(&make_reverse_z(0.8).unwrap(), 4);
    }

    #[test]
    fn reverse_z_pair() {
        let d = build_llr_distribution(&make_reverse_z(0.8).unwrap(), 2).unwrap();
        // outputs (1,1) give 2 ln(1/0.8); anything containing a 0 gives -inf
        assert_eq!(d.support[0], ExtLlr::NegInf);
        assert_eq!(d.pmf1[0], 0.0);
        assert!((d.pmf0[0] - (1.0 - 0.64)).abs() < 1e-15);
        assert_eq!(d.len(), 2);
        assert!((d.pmf0[1] - 0.64).abs() < 1e-15);
        assert_eq!(d.pmf1[1], 1.0);
    }

    #[test]
    fn tails_and_support_size() {
        let ch = Dmc::new(vec![0.5, 0.3, 0.2], vec![0.1, 0.25, 0.65]).unwrap();
        for k in [1, 3, 8, 16] {
            let d = build_llr_distribution(&ch, k).unwrap();
            assert!(d.len() <= (k + 1).pow(3));
            assert!(d.support.windows(2).all(|w| w[0] < w[1]));
            assert!(d.tail0_geq.windows(2).all(|w| w[0] >= w[1]));
            assert!(d.tail1_leq.windows(2).all(|w| w[0] <= w[1]));
            assert!((d.tail0_geq[0] - 1.0).abs() < 1e-12);
            assert!((d.tail1_leq[d.len() - 1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn long_bsc_block_is_binomial() {
        let k = 300;
        let d = build_llr_distribution(&make_bsc(0.3).unwrap(), k).unwrap();
        assert_eq!(d.len(), k + 1);
        // support[i] has i outputs equal to 1; under input 0 that is Bin(k, 0.3)
        let mut pmf = vec![0.0f64; k + 1];
        pmf[0] = 1.0;
        for _ in 0..k {
            for i in (0..=k).rev() {
                pmf[i] = pmf[i] * 0.7 + if i > 0 { pmf[i - 1] * 0.3 } else { 0.0 };
            }
        }
        for (i, (got, want)) in d.pmf0.iter().zip(&pmf).enumerate() {
            assert!((got - want).abs() <= 1e-11 * want, "i = {i}: {got} vs {want}");
        }
    }

    #[test]
    fn composition_counts() {
        assert_eq!(composition_count(4, 1), 1);
        assert_eq!(composition_count(4, 2), 5);
        assert_eq!(composition_count(1000, 3), 501_501);
        assert_eq!(composition_count(5, 0), 0);
        assert_eq!(composition_count(10_000_000, 8), u64::MAX);
    }

    #[test]
    fn refuses_huge_type_counts() {
        let ch = Dmc::new(vec![0.3, 0.2, 0.1, 0.25, 0.15], vec![0.05, 0.1, 0.2, 0.3, 0.35]).unwrap();
        assert!(matches!(build_llr_distribution(&ch, 200), Err(crate::Error::Refused(_))));
    }

    #[test]
    fn block_lookup() {
        let ch = Dmc::new(vec![0.5, 0.3, 0.2], vec![0.1, 0.25, 0.65]).unwrap();
        let d = build_llr_distribution(&ch, 5).unwrap();
        let llrs = symbol_llrs(&ch);
        let i = d.index_of_block(&llrs, &[0, 2, 1, 2, 0]).unwrap();
        let j = d.index_of_block(&llrs, &[2, 0, 0, 1, 2]).unwrap();
        assert_eq!(i, j);
        assert!(d.index_of_block(&llrs, &[0, 0, 0, 0, 0]).unwrap() == 0);
    }
}
