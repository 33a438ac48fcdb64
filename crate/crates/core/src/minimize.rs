//! One-dimensional minimization of convex (unimodal) functions on an interval.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`, followed by one
/// parabolic refinement step. Returns `(argmin, min)`.
///
/// The endpoints are always compared against the interior estimate and win
/// ties, so a minimum attained at `lo` or `hi` is reported exactly there.
pub fn minimize_unimodal<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    debug_assert!(lo <= hi);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
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
    let (mut x, mut fx) = if fc <= fd { (c, fc) } else { (d, fd) };

    // Golden section alone only pins a smooth minimum to about sqrt(eps);
    // one parabola through three nearby samples recovers most of the rest.
    let h = 1e-5 * (hi - lo);
    if h > 0.0 && x - h >= lo && x + h <= hi {
        let (fm, fp) = (f(x - h), f(x + h));
        let curvature = fp - 2.0 * fx + fm;
        if curvature > 0.0 {
            let step = 0.5 * h * (fm - fp) / curvature;
            if step.abs() <= h {
                let xr = x + step;
                let fr = f(xr);
                if fr <= fx {
                    x = xr;
                    fx = fr;
                }
            }
        }
    }

    let (flo, fhi) = (f(lo), f(hi));
    if flo <= fx && flo <= fhi {
        (lo, flo)
    } else if fhi <= fx {
        (hi, fhi)
    } else {
        (x, fx)
    }
}
