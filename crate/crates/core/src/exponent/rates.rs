use super::search::minimize_convex;
use super::{BoundFamily, ExponentReport, TiltedFamily};
use crate::channel::Dmc;

/// Optimal 1-hop learning rate `-min_s mu(s)`.
pub fn one_hop_rate(ch: &Dmc) -> ExponentReport {
    let fam = TiltedFamily::new(ch);
    let m = minimize_convex(|s| fam.mu(s), 0.0, 1.0);
    ExponentReport::new(BoundFamily::OneHop, m.x, m.value, 0.0, 1.0)
}

/// Achievable 2-hop learning rate `-min_s max(mu_P(s), mu_Q(s))`.
///
/// With `flipped`, the teacher may also relabel the inputs of `Q`, which
/// replaces `mu_Q(s)` by `mu_Q(1 - s)`; the better orientation is taken.
/// Each orientation is a convex problem on its own.
pub fn two_hop_rate(ch_p: &Dmc, ch_q: &Dmc, flipped: bool) -> ExponentReport {
    let fp = TiltedFamily::new(ch_p);
    let fq = TiltedFamily::new(ch_q);
    let direct = minimize_convex(|s| fp.mu(s).max(fq.mu(s)), 0.0, 1.0);
    if !flipped {
        return ExponentReport::new(BoundFamily::TwoHopAchievable, direct.x, direct.value, 0.0, 1.0);
    }
    let swapped = minimize_convex(|s| fp.mu(s).max(fq.mu(1.0 - s)), 0.0, 1.0);
    let best = if swapped.value < direct.value { swapped } else { direct };
    ExponentReport::new(BoundFamily::TwoHopFlipped, best.x, best.value, 0.0, 1.0)
}
