//! Dense-grid scans with golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location and value of an extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Extremum {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        Extremum { x: x1, value: f1 }
    } else {
        Extremum { x: x2, value: f2 }
    }
}

/// Maximum of `f` over `points` evenly spaced samples of `[lo, hi]`
/// (`hi` excluded when `periodic`), refined inside the bracketing cells.
pub fn scan_max(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    points: usize,
    periodic: bool,
    tol: f64,
) -> Extremum {
    assert!(points >= 3, "scan needs at least three points");
    let step = if periodic {
        (hi - lo) / points as f64
    } else {
        (hi - lo) / (points - 1) as f64
    };
    let mut best = Extremum {
        x: lo,
        value: f64::NEG_INFINITY,
    };
    for i in 0..points {
        let x = lo + step * i as f64;
        let value = f(x);
        if value > best.value {
            best = Extremum { x, value };
        }
    }
    let (a, b) = if periodic {
        (best.x - step, best.x + step)
    } else {
        ((best.x - step).max(lo), (best.x + step).min(hi))
    };
    let refined = golden_max(&f, a, b, tol);
    if refined.value > best.value {
        refined
    } else {
        best
    }
}

/// Minimum counterpart of [`scan_max`] on a closed interval.
pub fn scan_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize, tol: f64) -> Extremum {
    let neg = scan_max(|x| -f(x), lo, hi, points, false, tol);
    Extremum {
        x: neg.x,
        value: -neg.value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let e = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 1e-10);
        assert!((e.x - 0.3).abs() < 1e-7);
        assert!((e.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_scan_handles_wraparound() {
        // peak at 0 == 2π
        let e = scan_max(|x| x.cos(), 0.0, std::f64::consts::TAU, 36, true, 1e-12);
        assert!((e.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_min_finds_kink() {
        let e = scan_min(|x| (x - 0.7).abs() + 1.0, 0.0, 2.0, 11, 1e-12);
        assert!((e.x - 0.7).abs() < 1e-9);
    }
}
