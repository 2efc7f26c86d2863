use crate::error::{domain, Result};
use crate::exponent::binary_kl;

/// Fraction of leading ones the BSC teacher sends after observing a
/// fraction `alpha` of ones in a block.
///
/// ```text
/// f(a) = 0                          a <  p
///        D(a||p) / (2 D(1/2||p))    p <= a <= 1/2
///        1 - f(1 - a)               1/2 < a < 1 - p
///        1                          a >= 1 - p
/// ```
pub fn f_fraction(alpha: f64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha = {alpha} outside [0, 1]"));
    }
    if !(p > 0.0 && p < 0.5) {
        return domain(format!("p = {p} outside (0, 1/2)"));
    }
    Ok(f_unchecked(alpha, p))
}

fn f_unchecked(alpha: f64, p: f64) -> f64 {
    let half = |a: f64| {
        let num = binary_kl(a, p).expect("a in [p, 1/2]");
        let den = 2.0 * binary_kl(0.5, p).expect("p in (0, 1/2)");
        (num / den).min(0.5)
    };
    if alpha < p {
        0.0
    } else if alpha <= 0.5 {
        half(alpha)
    } else if alpha < 1.0 - p {
        1.0 - half(1.0 - alpha)
    } else {
        1.0
    }
}

/// Number of leading ones sent for a block with `ones` ones out of `k`.
pub fn bsc_threshold(ones: usize, k: usize, p: f64) -> usize {
    let f = f_unchecked(ones as f64 / k as f64, p);
    // guard against k * f landing a hair below an integer it equals exactly
    (((k as f64) * f + 1e-9).floor() as usize).min(k)
}

/// Sorted re-encoding of one received block: `floor(k f(alpha))` ones, then
/// zeros.
pub fn teach_block_bsc(y_block: &[u8], p: f64) -> Result<Vec<u8>> {
    if y_block.is_empty() {
        return domain("empty block");
    }
    if !(p > 0.0 && p < 0.5) {
        return domain(format!("p = {p} outside (0, 1/2)"));
    }
    let k = y_block.len();
    let ones = y_block.iter().filter(|&&b| b == 1).count();
    let t = bsc_threshold(ones, k, p);
    Ok(sorted_block(k, t, 1))
}

/// `lead` bits of value `first` followed by the complement.
pub(crate) fn sorted_block(k: usize, lead: usize, first: u8) -> Vec<u8> {
    let mut out = vec![1 - first; k];
    out[..lead].fill(first);
    out
}
