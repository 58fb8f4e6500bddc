//! One-dimensional bracketing searches used by the aperture inverse and motor sizing.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Bisection on a bracket `[lo, hi]` where `f(lo) <= 0 <= f(hi)` (or the reverse).
///
/// Stops once `|f(x)| < f_tol` or the bracket is narrower than `x_tol`, and
/// returns the midpoint of the final bracket in the latter case. Gives up after
/// `max_iter` halvings.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    f_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> f64 {
    let f_lo = f(lo);
    if f_lo.abs() < f_tol {
        return lo;
    }
    let f_hi = f(hi);
    if f_hi.abs() < f_tol {
        return hi;
    }
    let increasing = f_lo < f_hi;
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() < f_tol || (hi - lo) < x_tol {
            return mid;
        }
        if (f_mid < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Narrows the bracket until it is shorter than `x_tol`. Returns the best
/// `(x, f(x))` among all evaluated points, endpoints included, so a monotone `f`
/// yields its endpoint exactly.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
) -> (f64, f64) {
    let mut best = {
        let (fa, fb) = (f(a), f(b));
        if fb > fa {
            (b, fb)
        } else {
            (a, fa)
        }
    };
    if b - a <= x_tol {
        return best;
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > x_tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}
