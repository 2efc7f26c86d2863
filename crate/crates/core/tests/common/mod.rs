#![allow(dead_code)]

use rand::Rng;
use twohop::channel::Dmc;
use twohop::exponent::{binary_kl, rho_s, TiltedFamily};
use twohop::protocol::{build_llr_distribution, f_fraction, g_bounds};

/// Random channel with every entry positive.
pub fn random_full_support<R: Rng>(rng: &mut R, m: usize) -> Dmc {
    loop {
        let row = |rng: &mut R| {
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(0.02..1.0)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<f64>>()
        };
        let (a, b) = (row(rng), row(rng));
        // keep the rows visibly apart so mu_max is well below zero
        if a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() > 0.1 {
            return Dmc::new(a, b).unwrap();
        }
    }
}

pub fn random_distribution<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Smallest second difference of `mu` on a `1e-3` grid.
pub fn mu_convexity_slack(ch: &Dmc) -> f64 {
    let fam = TiltedFamily::new(ch);
    let mu: Vec<f64> = (0..=1000).map(|i| fam.mu(i as f64 / 1000.0)).collect();
    mu.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::INFINITY, f64::min)
}

/// `max_s mu(s)`, which must be `<= 0`, together with `|mu(0)| + |mu(1)|`.
pub fn mu_sign(ch: &Dmc) -> (f64, f64) {
    let fam = TiltedFamily::new(ch);
    let top = (0..=1000).map(|i| fam.mu(i as f64 / 1000.0)).fold(f64::NEG_INFINITY, f64::max);
    (top, fam.mu(0.0).abs() + fam.mu(1.0).abs())
}

/// Largest gap between the analytic derivatives and central differences at
/// `s = 0.1, ..., 0.9`.
pub fn derivative_error(ch: &Dmc) -> f64 {
    let fam = TiltedFamily::new(ch);
    let mut worst = 0.0f64;
    for i in 1..=9 {
        let s = i as f64 / 10.0;
        let h1 = 1e-6;
        let d1 = (fam.mu(s + h1) - fam.mu(s - h1)) / (2.0 * h1);
        let h2 = 1e-4;
        let d2 = (fam.mu(s + h2) - 2.0 * fam.mu(s) + fam.mu(s - h2)) / (h2 * h2);
        worst = worst.max((d1 - fam.mu_prime(s)).abs()).max((d2 - fam.mu_double_prime(s)).abs());
    }
    worst
}

fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `|rho(A x A, B x B, s) - rho(A, B, s)^2|`.
pub fn tensorization_error(a: &[f64], b: &[f64], s: f64) -> f64 {
    let single = rho_s(a, b, s).unwrap();
    let double = rho_s(&product(a, a), &product(b, b), s).unwrap();
    (double - single * single).abs()
}

/// Slacks of the mixture bounds for `A = sum_i w_i A_i`, in both argument
/// orders: upper `sum_i w_i^(1-s) rho(A_i, B) - rho(A, B)` and lower
/// `rho(A, B) - min_i rho(A_i, B)`. Both must be `>= -1e-12`.
pub fn mixture_slacks(weights: &[f64], parts: &[Vec<f64>], b: &[f64], s: f64) -> [f64; 4] {
    let m = b.len();
    let mix: Vec<f64> = (0..m).map(|x| weights.iter().zip(parts).map(|(w, a)| w * a[x]).sum()).collect();
    let fwd = rho_s(&mix, b, s).unwrap();
    let bwd = rho_s(b, &mix, s).unwrap();
    let upper_fwd: f64 = weights.iter().zip(parts).map(|(w, a)| w.powf(1.0 - s) * rho_s(a, b, s).unwrap()).sum();
    let upper_bwd: f64 = weights.iter().zip(parts).map(|(w, a)| w.powf(s) * rho_s(b, a, s).unwrap()).sum();
    let min_fwd = parts.iter().map(|a| rho_s(a, b, s).unwrap()).fold(f64::INFINITY, f64::min);
    let min_bwd = parts.iter().map(|a| rho_s(b, a, s).unwrap()).fold(f64::INFINITY, f64::min);
    [upper_fwd - fwd, upper_bwd - bwd, fwd - min_fwd, bwd - min_bwd]
}

/// Worst slack of f's symmetry, monotonicity and upper bound on a `1e-3` grid.
pub fn f_slacks(p: f64) -> (f64, f64, f64) {
    let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    let f: Vec<f64> = grid.iter().map(|&a| f_fraction(a, p).unwrap()).collect();
    let sym = grid
        .iter()
        .zip(&f)
        .map(|(&a, &fa)| 1e-12 - (fa + f_fraction(1.0 - a, p).unwrap() - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    let mono = f.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let d_half = 2.0 * binary_kl(0.5, p).unwrap();
    let upper = grid
        .iter()
        .zip(&f)
        .map(|(&a, &fa)| binary_kl(a, p).unwrap() / d_half + 1e-12 - fa)
        .fold(f64::INFINITY, f64::min);
    (sym, mono, upper)
}

/// Worst slack of the g sandwich, `upper - lower`, over the LLR support.
pub fn g_sandwich_slack(p: &Dmc, k: usize, s_bar: f64, mu_max: f64) -> f64 {
    let d = build_llr_distribution(p, k).unwrap();
    g_bounds(&d, k, s_bar, mu_max).unwrap().iter().map(|b| b.upper - b.lower).fold(f64::INFINITY, f64::min)
}

/// Worst slack of the Chernoff tail bounds for the `k`-fold LLR at
/// `s = 0.1, ..., 0.9`:
/// `P(L0 >= k mu'(s)) <= exp(k (mu(s) - s mu'(s)))` and
/// `P(L1 <= k mu'(s)) <= exp(k (mu(s) + (1 - s) mu'(s)))`.
pub fn chernoff_tail_slack(ch: &Dmc, k: usize) -> f64 {
    let fam = TiltedFamily::new(ch);
    let d = build_llr_distribution(ch, k).unwrap();
    let kf = k as f64;
    let mut worst = f64::INFINITY;
    for i in 1..=9 {
        let s = i as f64 / 10.0;
        let m = fam.moments(s);
        let t = kf * m.mean;
        let mut tail0 = 0.0;
        let mut tail1 = 0.0;
        for (j, l) in d.support.iter().enumerate() {
            let l = l.to_f64();
            if l >= t - 1e-12 {
                tail0 += d.pmf0[j];
            }
            if l <= t + 1e-12 {
                tail1 += d.pmf1[j];
            }
        }
        worst =
            worst.min((kf * (m.mu - s * m.mean)).exp() - tail0).min((kf * (m.mu + (1.0 - s) * m.mean)).exp() - tail1);
    }
    worst
}
