//! Golden-section minimization of convex functions on a closed interval.

/// Interval width at which the search stops.
pub const S_TOLERANCE: f64 = 1e-10;

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
///
/// The endpoints are evaluated as well, so minimizers sitting on the
/// boundary are returned exactly rather than approached to within `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Minimum {
    debug_assert!(lo <= hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))].into_iter().fold(
        Minimum { x: mid, value: f64::INFINITY },
        |best, (x, v)| {
            if v < best.value {
                Minimum { x, value: v }
            } else {
                best
            }
        },
    )
}

/// Minimizes a convex function on `[lo, hi]` to [`S_TOLERANCE`].
pub fn minimize_convex<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Minimum {
    golden_section(f, lo, hi, S_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_interior() {
        let m = minimize_convex(|x| (x - 0.3).powi(2), 0.0, 1.0);
        assert!((m.x - 0.3).abs() < 1e-9);
        // with an offset the search can only resolve x to ~sqrt(eps)
        let m = minimize_convex(|x| (x - 0.3).powi(2) - 1.0, 0.0, 1.0);
        assert!((m.value + 1.0).abs() < 1e-15);
        assert!((m.x - 0.3).abs() < 1e-7);
    }

    #[test]
    fn boundary_minimizers_are_exact() {
        let m = minimize_convex(|x| x, 0.0, 1.0);
        assert_eq!(m.x, 0.0);
        let m = minimize_convex(|x| -2.0 * x, 0.0, 0.5);
        assert_eq!(m.x, 0.5);
        assert_eq!(m.value, -1.0);
    }

    #[test]
    fn kinked_function() {
        let m = minimize_convex(|x: f64| (x - 0.7).abs(), 0.0, 1.0);
        assert!((m.x - 0.7).abs() < 1e-9);
    }
}
