//! Summation and quadrature helpers.

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Number of distinct pairs above which squared differences are recomputed
/// on every pass instead of being cached (8M pairs is 64 MB).
const PAIR_CACHE_LIMIT: usize = 8_000_000;

/// Squared pairwise differences `(x_i - x_j)^2` over `i < j`, visited in a
/// fixed order so that every reduction over them is deterministic.
#[derive(Debug, Clone)]
pub struct PairSquares<'a> {
    values: &'a [f64],
    cached: Option<Vec<f64>>,
}

impl<'a> PairSquares<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        let n = values.len();
        let pairs = n * n.saturating_sub(1) / 2;
        let cached = (pairs <= PAIR_CACHE_LIMIT).then(|| {
            let mut out = Vec::with_capacity(pairs);
            for (i, &xi) in values.iter().enumerate() {
                for &xj in &values[i + 1..] {
                    let d = xi - xj;
                    out.push(d * d);
                }
            }
            out
        });
        Self { values, cached }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Compensated sum of `f(d^2)` over all pairs `i < j`.
    pub fn sum<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut acc = NeumaierSum::default();
        match &self.cached {
            Some(sq) => {
                for &d2 in sq {
                    acc.add(f(d2));
                }
            }
            None => {
                for (i, &xi) in self.values.iter().enumerate() {
                    for &xj in &self.values[i + 1..] {
                        let d = xi - xj;
                        acc.add(f(d * d));
                    }
                }
            }
        }
        acc.value()
    }

    /// `sum_i sum_j f(d_ij^2)` including the diagonal, i.e.
    /// `n f(0) + 2 sum_{i<j} f(d_ij^2)`.
    pub fn full_sum<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let diag = self.n() as f64 * f(0.0);
        diag + 2.0 * self.sum(f)
    }
}

/// Evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i == points - 1 {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect()
}

/// Composite trapezoid rule for samples `ys` taken with uniform spacing `dx`.
pub fn trapezoid_uniform(ys: &[f64], dx: f64) -> f64 {
    match ys.len() {
        0 | 1 => 0.0,
        m => {
            let mut acc = NeumaierSum::default();
            acc.add(0.5 * ys[0]);
            for &y in &ys[1..m - 1] {
                acc.add(y);
            }
            acc.add(0.5 * ys[m - 1]);
            acc.value() * dx
        }
    }
}

/// Composite trapezoid rule of `f` on `points` evenly spaced nodes.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> f64 {
    let xs = linspace(lo, hi, points);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    trapezoid_uniform(&ys, (hi - lo) / (points - 1) as f64)
}

/// Romberg integration: trapezoid refinements with Richardson extrapolation,
/// stopped once successive diagonal entries agree to `rel_tol`.
///
/// Returns the estimate and the last change observed.
pub fn romberg<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    const MAX_LEVELS: usize = 24;
    // start from a moderately fine grid so that narrow features are resolved
    // before extrapolation kicks in
    const INITIAL_INTERVALS: usize = 256;
    let mut intervals = INITIAL_INTERVALS;
    let mut h = (hi - lo) / intervals as f64;
    let mut t = {
        let inner: f64 = compensated_sum((1..intervals).map(|i| f(lo + h * i as f64)));
        h * (0.5 * (f(lo) + f(hi)) + inner)
    };
    let mut prev_row = vec![t];
    let mut change = f64::INFINITY;
    for _ in 1..MAX_LEVELS {
        let mids = compensated_sum((0..intervals).map(|i| f(lo + h * (i as f64 + 0.5))));
        t = 0.5 * (t + h * mids);
        intervals *= 2;
        h *= 0.5;
        let mut row = Vec::with_capacity(prev_row.len() + 1);
        row.push(t);
        let mut factor = 1.0;
        for (j, &p) in prev_row.iter().enumerate() {
            factor *= 4.0;
            let r = row[j] + (row[j] - p) / (factor - 1.0);
            row.push(r);
        }
        let best = *row.last().unwrap();
        change = (best - prev_row.last().unwrap()).abs();
        prev_row = row;
        if change <= rel_tol * best.abs().max(f64::MIN_POSITIVE) {
            return (best, change);
        }
    }
    (*prev_row.last().unwrap(), change)
}

/// Brent's bracketing root finder: inverse quadratic interpolation and
/// secant steps, falling back to bisection whenever they fail to shrink the
/// bracket. `f(a)` and `f(b)` must have opposite signs. Iterates until the
/// bracket is narrower than `rel_tol * |x|`.
pub fn brent_root<E, F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    rel_tol: f64,
) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    debug_assert!(fa * fb <= 0.0);
    const MAX_ITER: usize = 200;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}
