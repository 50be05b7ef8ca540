//! Small numerical helpers: stable log-sum-exp, compensated summation, and a
//! bracketed root solver for strictly decreasing functions.

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
    n: u64,
}

impl LogSumExp {
    pub fn new() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            sum: 0.0,
            n: 0,
        }
    }

    pub fn add(&mut self, x: f64) {
        self.n += 1;
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.sum = self.sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.sum += (x - self.max).exp();
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        self.n += other.n;
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        } else {
            self.sum += other.sum * (other.max - self.max).exp();
        }
    }

    /// log of the accumulated sum of exp.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

/// log(sum exp(x_i)) over a slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut acc = LogSumExp::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Kahan-compensated sum.
#[derive(Debug, Clone, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Finds the root of a strictly decreasing function by bracket expansion,
/// bisection, and Newton polish. `f` must be continuous with a sign change;
/// `df` is its derivative (strictly negative).
///
/// The absolute residual |f(root)| of the returned point is below `tol`
/// whenever the function is evaluable to that accuracy.
pub fn solve_decreasing(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    guess: f64,
    tol: f64,
) -> f64 {
    let guess = if guess.is_finite() { guess } else { 0.0 };
    let (mut lo, mut hi) = (guess - 1.0, guess + 1.0);
    let mut step = 1.0;
    // Expand until f(lo) >= 0 >= f(hi).
    for _ in 0..200 {
        if f(lo) < 0.0 {
            lo -= step;
            step *= 2.0;
        } else {
            break;
        }
    }
    step = 1.0;
    for _ in 0..200 {
        if f(hi) > 0.0 {
            hi += step;
            step *= 2.0;
        } else {
            break;
        }
    }
    debug_assert!(f(lo) >= 0.0 && f(hi) <= 0.0, "no bracket found");

    // Bisect down to a short interval, then let Newton finish.
    let mut x = 0.5 * (lo + hi);
    for _ in 0..80 {
        x = 0.5 * (lo + hi);
        let v = f(x);
        if v == 0.0 {
            return x;
        }
        if v > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo < 1e-3 * (1.0 + x.abs()) {
            break;
        }
    }
    for _ in 0..60 {
        let v = f(x);
        if v.abs() <= tol {
            return x;
        }
        if v > 0.0 {
            lo = lo.max(x);
        } else {
            hi = hi.min(x);
        }
        let d = df(x);
        let mut next = x - v / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < f64::EPSILON * (1.0 + x.abs()) {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct_sum() {
        let xs = [-3.0f64, -1.0, 0.5, 0.5];
        let direct: f64 = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-14);
    }

    #[test]
    fn lse_survives_large_offsets() {
        let xs = [-1000.0, -1000.0];
        assert!((log_sum_exp(&xs) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn lse_merge_is_order_independent() {
        let mut a = LogSumExp::new();
        let mut b = LogSumExp::new();
        for (k, x) in [-5.0, 1.0, 0.0, -2.5, 3.0].iter().enumerate() {
            if k % 2 == 0 {
                a.add(*x);
            } else {
                b.add(*x);
            }
        }
        let mut merged = a.clone();
        merged.merge(&b);
        let all = log_sum_exp(&[-5.0, 1.0, 0.0, -2.5, 3.0]);
        assert!((merged.value() - all).abs() < 1e-13);
    }

    #[test]
    fn solves_exponential_equation() {
        // 2 * (1/2)^t = 1 has root t = 1.
        let f = |t: f64| (2.0 * 0.5f64.powf(t)).ln();
        let df = |t: f64| {
            let _ = t;
            0.5f64.ln()
        };
        let root = solve_decreasing(f, df, 0.0, 1e-14);
        assert!((root - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solves_mixed_ratio_equation() {
        // (1/2)^t + (1/4)^t = 1, root = log((sqrt(5)-1)/2) / log(1/2).
        let f = |t: f64| (0.5f64.powf(t) + 0.25f64.powf(t)).ln();
        let df = |t: f64| {
            let a = 0.5f64.powf(t);
            let b = 0.25f64.powf(t);
            (a * 0.5f64.ln() + b * 0.25f64.ln()) / (a + b)
        };
        let root = solve_decreasing(f, df, 1.0, 1e-14);
        let expected = ((5f64.sqrt() - 1.0) / 2.0).ln() / 0.5f64.ln();
        assert!((root - expected).abs() < 1e-13);
    }
}
