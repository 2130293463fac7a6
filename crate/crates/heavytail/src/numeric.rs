//! Small numeric helpers shared across modules: stable log-space primitives,
//! compensated summation, Wilson intervals, least-squares fits and a
//! certified Riemann zeta evaluator.

/// ln(1 - e^a) for a <= 0, computed without catastrophic cancellation.
///
/// Splits at -ln 2 following the usual two-branch recipe: near zero the
/// expm1 form is accurate, far from zero the ln_1p form is.
pub(crate) fn log1mexp(a: f64) -> f64 {
    debug_assert!(a <= 0.0, "log1mexp domain: a <= 0, got {a}");
    if a > -std::f64::consts::LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}

/// Neumaier compensated accumulator for long sums of small terms.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
///
/// Returns `(lower, upper)` clamped to [0, 1]; behaves sensibly for zero
/// hits (lower bound exactly 0).
pub(crate) fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0, "wilson interval needs at least one trial");
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Ordinary least-squares fit y = intercept + slope * x.
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "linear fit needs at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Largest absolute residual of `ys` against the line `intercept + slope*x`.
pub(crate) fn max_abs_residual(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max)
}

/// Sum_{j >= j0} j^{-s} for s > 1, with a certified absolute error bound.
///
/// Direct summation up to a split point, then an Euler-Maclaurin tail whose
/// truncation error is bounded by the first omitted correction term.
pub(crate) fn zeta_tail(s: f64, j0: u64) -> (f64, f64) {
    debug_assert!(s > 1.0, "zeta tail requires s > 1, got {s}");
    debug_assert!(j0 >= 1);
    let split = j0.max(256);
    let mut acc = Accumulator::new();
    for j in j0..split {
        acc.add((j as f64).powf(-s));
    }
    let jf = split as f64;
    let em = jf.powf(1.0 - s) / (s - 1.0) + 0.5 * jf.powf(-s) + s * jf.powf(-s - 1.0) / 12.0;
    let err = s * (s + 1.0) * (s + 2.0) * jf.powf(-s - 3.0) / 720.0;
    (acc.value() + em, err)
}

/// Riemann zeta(s) for s > 1, accurate to ~1e-14 relative.
pub(crate) fn riemann_zeta(s: f64) -> f64 {
    zeta_tail(s, 1).0
}

/// ln n! via Stirling's series for large n, exact accumulation for small n.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    if n < 32 {
        let mut acc = 0.0;
        for k in 2..=n {
            acc += (k as f64).ln();
        }
        return acc;
    }
    let x = n as f64 + 1.0;
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    (x - 0.5) * x.ln() - x + 0.5 * ln_2pi + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x)
}
