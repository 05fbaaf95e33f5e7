//! Shared numerical utilities: compensated summation, Richardson
//! extrapolation on geometric ladders, and rigorous radial tail integrals
//! used to truncate momentum sums.

/// Neumaier's variant of compensated summation. Unlike plain Kahan, the
/// compensation also catches terms larger than the running sum, so the
/// result is faithful regardless of term ordering.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
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

    /// Multiply the accumulated sum (and its compensation) by a constant.
    pub fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

impl<'a> FromIterator<&'a f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = &'a f64>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

/// Compensated sum of a slice in its given order.
pub fn sum_exact(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<NeumaierSum>().value()
}

/// ln(n!) by direct accumulation. Exact to a few ulps for the moderate n
/// used in series tail bounds.
pub fn ln_factorial(n: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    for k in 2..=n {
        acc.add((k as f64).ln());
    }
    acc.value()
}

/// Extrapolated limit together with a heuristic error estimate (the change
/// produced by the final elimination stage).
#[derive(Clone, Copy, Debug)]
pub struct Extrapolation {
    pub value: f64,
    pub error_estimate: f64,
}

/// Richardson extrapolation of g(h) -> L as h -> 0 on a geometric ladder.
///
/// `samples` holds (h_k, g(h_k)) with h_k = h_0 r^{-k} for a fixed ratio
/// r > 1, largest h first. `exponents` lists the correction exponents of
/// the expansion g(h) = L + c_1 h^{e_1} + c_2 h^{e_2} + ... in increasing
/// order; each stage eliminates one of them. At most len(samples) - 1
/// exponents are consumed.
pub fn richardson(samples: &[(f64, f64)], exponents: &[f64]) -> Extrapolation {
    assert!(samples.len() >= 2, "need at least two samples");
    let ratio = samples[0].0 / samples[1].0;
    debug_assert!(ratio > 1.0);
    for w in samples.windows(2) {
        debug_assert!((w[0].0 / w[1].0 - ratio).abs() < 1e-9 * ratio);
    }

    let mut row: Vec<f64> = samples.iter().map(|&(_, g)| g).collect();
    let mut prev_best = row[row.len() - 1];
    for &e in exponents.iter().take(samples.len() - 1) {
        let rho = ratio.powf(-e);
        let mut next = Vec::with_capacity(row.len() - 1);
        for j in 0..row.len() - 1 {
            next.push((row[j + 1] - rho * row[j]) / (1.0 - rho));
        }
        prev_best = row[row.len() - 1];
        row = next;
    }
    let value = row[row.len() - 1];
    Extrapolation {
        value,
        error_estimate: (value - prev_best).abs() + f64::EPSILON * value.abs(),
    }
}

/// Surface area of the unit sphere S^{d-1} embedded in R^d.
pub fn unit_sphere_area(d: u32) -> f64 {
    use std::f64::consts::PI;
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        6 => PI * PI * PI,
        7 => 16.0 * PI * PI * PI / 15.0,
        8 => PI * PI * PI * PI / 3.0,
        _ => panic!("unit_sphere_area: dimension {d} out of table"),
    }
}

/// Upper bound on the radial integral  ∫_r^∞ u^k e^{-t u^2} du  for
/// integer k >= -2, r > 0, t >= 0.
///
/// For t = 0 only k = -2 converges (the bound is then exact); other k
/// return infinity so callers see a non-truncatable tail. For t > 0 the
/// bound follows from E_1(x) <= e^{-x}/x and integration by parts, and is
/// exact for odd k >= 1.
pub fn radial_tail_bound(k: i32, t: f64, r: f64) -> f64 {
    assert!(r > 0.0 && t >= 0.0 && k >= -2);
    if t == 0.0 {
        return if k == -2 { 1.0 / r } else { f64::INFINITY };
    }
    let x = t * r * r;
    match k {
        -2 => (-x).exp() / r,
        -1 => 0.5 * (-x).exp() / x,
        0 => (-x).exp() / (2.0 * t * r),
        _ => {
            r.powi(k - 1) * (-x).exp() / (2.0 * t)
                + (k - 1) as f64 / (2.0 * t) * radial_tail_bound(k - 2, t, r)
        }
    }
}

/// Exact value of  ∫_r^∞ u^k du  for k <= -2.
pub fn power_tail(k: i32, r: f64) -> f64 {
    assert!(k <= -2 && r > 0.0);
    r.powi(k + 1) / f64::from(-k - 1)
}
