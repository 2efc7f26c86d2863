use super::llr::LlrDistribution;
use crate::error::{domain, internal, Result};
use crate::exponent::ExtLlr;

/// Transition positions of the DMC teacher, one per LLR support point.
#[derive(Debug, Clone, PartialEq)]
pub struct GTable {
    /// Rounded and clamped `g`, non-decreasing along the support.
    pub values: Vec<usize>,
    /// `g` before rounding, after taking the running maximum.
    pub unrounded: Vec<f64>,
}

/// The two sides of the `g` sandwich at one support point:
/// `upper = (1 - s)/mu_max * ln P(L0 >= l)` and
/// `lower = k - s/mu_max * ln P(L1 <= l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GBounds {
    pub upper: f64,
    pub lower: f64,
}

// coef * ln(p) with 0 * inf taken as 0
fn scaled_log(coef: f64, p: f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * p.ln()
    }
}

fn check_params(s_bar: f64, mu_max: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s_bar) {
        return domain(format!("s_bar = {s_bar} outside [0, 1]"));
    }
    if mu_max.is_nan() || mu_max >= 0.0 {
        return domain(format!("mu_max = {mu_max} must be negative"));
    }
    Ok(())
}

/// Both sides of the sandwich at every support point of `dist`.
pub fn g_bounds(dist: &LlrDistribution, k: usize, s_bar: f64, mu_max: f64) -> Result<Vec<GBounds>> {
    check_params(s_bar, mu_max)?;
    Ok((0..dist.len())
        .map(|i| GBounds {
            upper: scaled_log((1.0 - s_bar) / mu_max, dist.tail0_geq[i]),
            lower: k as f64 - scaled_log(s_bar / mu_max, dist.tail1_leq[i]),
        })
        .collect())
}

/// Builds the `g` table.
///
/// For `l <= 0`, `g = min(k, upper)`; for `l > 0`, `g = max(0, lower)`.
/// Where the branch switches at `l = 0` the raw values can step down, so a
/// running maximum is taken; this keeps every entry inside the sandwich
/// because `upper` is itself non-decreasing. Values are then rounded to the
/// nearest integer (ties up) and clamped to `[0, k]`.
pub fn build_g_table(dist: &LlrDistribution, k: usize, s_bar: f64, mu_max: f64) -> Result<GTable> {
    let bounds = g_bounds(dist, k, s_bar, mu_max)?;
    let kf = k as f64;
    let mut unrounded = Vec::with_capacity(bounds.len());
    let mut running = f64::NEG_INFINITY;
    for (l, b) in dist.support.iter().zip(&bounds) {
        let raw = if *l <= ExtLlr::Finite(0.0) { b.upper.min(kf) } else { b.lower.max(0.0) };
        running = running.max(raw);
        unrounded.push(running);
    }
    let values: Vec<usize> = unrounded.iter().map(|&g| (g + 0.5).floor().clamp(0.0, kf) as usize).collect();
    if values.windows(2).any(|w| w[0] > w[1]) {
        return internal("g table is not monotone after rounding");
    }
    Ok(GTable { values, unrounded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Dmc;
    use crate::exponent::TiltedFamily;
    use crate::protocol::build_llr_distribution;

    fn setup(k: usize, s: f64) -> (LlrDistribution, f64) {
        let p = Dmc::new(vec![0.5, 0.3, 0.2], vec![0.1, 0.25, 0.65]).unwrap();
        let q = Dmc::new(vec![0.7, 0.3], vec![0.2, 0.8]).unwrap();
        let mu_max = TiltedFamily::new(&p).mu(s).max(TiltedFamily::new(&q).mu(s));
        (build_llr_distribution(&p, k).unwrap(), mu_max)
    }

    #[test]
    fn boundary_entries() {
        let k = 8;
        let (d, mu_max) = setup(k, 0.5);
        let g = build_g_table(&d, k, 0.5, mu_max).unwrap();
        assert_eq!(g.values[0], 0);
        assert_eq!(*g.values.last().unwrap(), k);
        assert!(g.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sandwich_holds_after_envelope() {
        for s in [0.2, 0.5, 0.8] {
            let k = 8;
            let (d, mu_max) = setup(k, s);
            let g = build_g_table(&d, k, s, mu_max).unwrap();
            for (u, b) in g.unrounded.iter().zip(g_bounds(&d, k, s, mu_max).unwrap()) {
                assert!(*u <= b.upper + 1e-9 && *u >= b.lower - 1e-9, "{u} {b:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let (d, _) = setup(4, 0.5);
        assert!(build_g_table(&d, 4, 0.5, 0.0).is_err());
        assert!(build_g_table(&d, 4, 1.5, -0.1).is_err());
    }
}
