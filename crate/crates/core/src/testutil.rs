//! Brute-force oracles shared by unit tests.

/// Minimum of `f` over `[lo, hi]` by exhaustive grid: a 1e-4 grid, then a
/// 1e-8 grid across the two coarse cells around the coarse minimizer.
pub fn grid_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let coarse = 1e-4;
    let n = ((hi - lo) / coarse).round() as usize;
    let (mut best_s, mut best) = (lo, f(lo));
    for i in 0..=n {
        let s = (lo + i as f64 * coarse).min(hi);
        let v = f(s);
        if v < best {
            best = v;
            best_s = s;
        }
    }
    let (a, b) = ((best_s - coarse).max(lo), (best_s + coarse).min(hi));
    let fine = 1e-8;
    let m = ((b - a) / fine).round() as usize;
    let mut refined = (best_s, best);
    for i in 0..=m {
        let s = (a + i as f64 * fine).min(b);
        let v = f(s);
        if v < refined.1 {
            refined = (s, v);
        }
    }
    refined
}
