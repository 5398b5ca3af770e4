//! Global minimisation of smooth one-dimensional objectives on an interval.
//!
//! Used by the closest-point oracles of curve-like shapes: the squared
//! distance from a query to a parametrised curve is scanned on a uniform
//! grid, every grid-local minimum is polished by bisection on the
//! derivative, and all minimisers tying the global minimum are returned.

const GRID: usize = 4096;
const BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub arg: f64,
    pub value: f64,
}

/// All global minimisers of `f` on `[lo, hi]`, sorted by argument.
///
/// `df` must be the derivative of `f`. Two minima tie when their values
/// differ by at most `tie` (absolute).
pub fn global_minima<F, D>(f: F, df: D, lo: f64, hi: f64, tie: f64) -> Vec<Minimum>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if hi <= lo {
        return vec![Minimum {
            arg: lo,
            value: f(lo),
        }];
    }
    let step = (hi - lo) / GRID as f64;
    let xs: Vec<f64> = (0..=GRID)
        .map(|i| if i == GRID { hi } else { lo + step * i as f64 })
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let mut cands = Vec::new();
    for i in 0..=GRID {
        let left = if i == 0 { f64::INFINITY } else { fs[i - 1] };
        let right = if i == GRID { f64::INFINITY } else { fs[i + 1] };
        if fs[i] <= left && fs[i] <= right {
            let a = if i == 0 { xs[0] } else { xs[i - 1] };
            let b = if i == GRID { xs[GRID] } else { xs[i + 1] };
            cands.push(polish(&f, &df, a, b, xs[i]));
        }
    }

    let best = cands
        .iter()
        .map(|m| m.value)
        .fold(f64::INFINITY, f64::min);
    let mut out: Vec<Minimum> = cands
        .into_iter()
        .filter(|m| m.value <= best + tie)
        .collect();
    out.sort_by(|a, b| a.arg.total_cmp(&b.arg));
    out.dedup_by(|a, b| (a.arg - b.arg).abs() <= 1e-12 * (1.0 + b.arg.abs()));
    out
}

// Locate the minimum inside the bracket [a, b] that contains the grid
// minimum `x0`. Boundary minima (derivative pointing outward) are kept as is.
fn polish<F, D>(f: &F, df: &D, a: f64, b: f64, x0: f64) -> Minimum
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut best = Minimum { arg: x0, value: f(x0) };
    let mut consider = |x: f64| {
        let v = f(x);
        if v < best.value {
            best = Minimum { arg: x, value: v };
        }
    };
    consider(a);
    consider(b);

    // Derivative sign changes from - to + on [a, x0] or [x0, b].
    for (lo, hi) in [(a, x0), (x0, b)] {
        if hi <= lo {
            continue;
        }
        let (dl, dh) = (df(lo), df(hi));
        if dl < 0.0 && dh > 0.0 {
            consider(bisect_root(df, lo, hi));
        }
    }
    best
}

fn bisect_root<D: Fn(f64) -> f64>(df: &D, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if df(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum_to_machine_precision() {
        let m = global_minima(|x| (x - 0.3).powi(2), |x| 2.0 * (x - 0.3), 0.0, 1.0, 1e-15);
        assert_eq!(m.len(), 1);
        assert!((m[0].arg - 0.3).abs() < 1e-14);
    }

    #[test]
    fn keeps_boundary_minimum() {
        let m = global_minima(|x| x, |_| 1.0, 0.0, 1.0, 0.0);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].arg, 0.0);
    }

    #[test]
    fn reports_symmetric_ties() {
        let f = |x: f64| (x * x - 0.25).powi(2);
        let df = |x: f64| 4.0 * x * (x * x - 0.25);
        let m = global_minima(f, df, -1.0, 1.0, 1e-14);
        assert_eq!(m.len(), 2);
        assert!((m[0].arg + 0.5).abs() < 1e-12);
        assert!((m[1].arg - 0.5).abs() < 1e-12);
    }
}
