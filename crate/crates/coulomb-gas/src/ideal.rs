//! Ideal neutral gas: the charge-constrained partition function Xi0, the
//! canonical suppression coefficients eta_q, and the screening length and
//! density they induce. Two independent evaluation routes are kept side
//! by side: periodic trapezoidal quadrature of the angular integral
//!
//! ```text
//! Xi0 = (2 pi)^{-1} ∫_0^{2pi} exp( sum_q Lambda'_q cos(q theta) ) d theta
//! ```
//!
//! and constant-term extraction from the exponential of the Laurent
//! polynomial sum_q Lambda'_q x^q.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{System, TiltedActivities};
use crate::numerics::NeumaierSum;

/// A partition-function value with its logarithm (authoritative when the
/// plain value overflows), a bound on the truncation error in value units,
/// and a work counter (quadrature nodes, series terms, or enumeration
/// leaves, depending on the producer).
#[derive(Clone, Copy, Debug)]
pub struct PartitionResult {
    pub value: f64,
    pub log_value: f64,
    pub tail_bound: f64,
    pub work: u64,
}

/// Suppression coefficients eta_q for q = 0..=q_max; eta_0 = 1 exactly.
///
/// eta_q is the ratio of the neutral ideal partition function with one
/// external charge q inserted to the plain one, and lies in [0, 1].
#[derive(Clone, Debug)]
pub struct EtaCoefficients {
    values: Vec<f64>,
}

impl EtaCoefficients {
    pub fn q_max(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    /// eta_{|q|}; None if |q| exceeds the computed range.
    pub fn get(&self, q: i32) -> Option<f64> {
        self.values.get(q.unsigned_abs() as usize).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

// ---------------------------------------------------------------------------
// Modified Bessel functions of the first kind, integer order.

/// Crossover between the ascending series and Miller's backward recurrence.
const BESSEL_SERIES_LIMIT: f64 = 15.0;

/// I_n(x) for n >= 0, x >= 0. Ascending series below x = 15, Miller's
/// normalized backward recurrence above; relative accuracy ~1e-14. May
/// overflow to infinity for x beyond ~709; use [`ln_bessel_i`] there.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_i requires x >= 0");
    if x <= BESSEL_SERIES_LIMIT {
        bessel_series(n, x)
    } else {
        bessel_miller(n, x) * x.exp()
    }
}

/// e^{-x} I_n(x), stable for large arguments.
pub fn bessel_i_scaled(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "bessel_i_scaled requires x >= 0");
    if x <= BESSEL_SERIES_LIMIT {
        bessel_series(n, x) * (-x).exp()
    } else {
        bessel_miller(n, x)
    }
}

/// ln I_n(x); finite for all x where I_n > 0.
pub fn ln_bessel_i(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "ln_bessel_i requires x >= 0");
    if x <= BESSEL_SERIES_LIMIT {
        bessel_series(n, x).ln()
    } else {
        x + bessel_miller(n, x).ln()
    }
}

/// sum_k (x/2)^{n+2k} / (k! (n+k)!), every term positive.
fn bessel_series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / f64::from(k);
        if term == 0.0 {
            return 0.0; // (x/2)^n underflows for huge n; I_n < tiny
        }
    }
    let mut acc = NeumaierSum::new();
    acc.add(term);
    let mut k = 1.0;
    loop {
        term *= half * half / (k * (f64::from(n) + k));
        acc.add(term);
        if term <= f64::EPSILON * acc.value() {
            return acc.value();
        }
        k += 1.0;
    }
}

/// Miller's algorithm: run I_{k-1} = I_{k+1} + (2k/x) I_k downward from a
/// trial order, then normalize with I_0 + 2 sum_{k>=1} I_k = e^x. Returns
/// e^{-x} I_n. The start order max(n, x) + 60 keeps the seeding error far
/// below 1e-15 for all x > 15.
fn bessel_miller(n: u32, x: f64) -> f64 {
    let start = (x.max(f64::from(n)) as usize) + 60;
    let mut above = 0.0f64; // I_{k+1}
    let mut here = 1e-280f64; // I_k, arbitrary seed scale
    let mut norm = NeumaierSum::new();
    let mut target = 0.0f64;
    let mut rescales = 0i32;
    let mut target_rescales = 0i32;
    for k in (1..=start).rev() {
        let below = above + 2.0 * k as f64 / x * here;
        norm.add(2.0 * here);
        if k as u32 == n {
            target = here;
            target_rescales = rescales;
        }
        above = here;
        here = below;
        if here > 1e250 {
            // Shrink every tracked quantity together so ratios survive.
            here *= 1e-250;
            above *= 1e-250;
            norm.scale(1e-250);
            rescales += 1;
        }
    }
    // here = I_0 candidate after the k = 1 step.
    if n == 0 {
        target = here;
        target_rescales = rescales;
    }
    norm.add(here);
    // norm = (I_0 + 2 sum_{k >= 1} I_k) * seed = e^x * seed in the final
    // scale; bring target to the same scale before dividing.
    target * f64::powi(1e-250, rescales - target_rescales) / norm.value()
}

// ---------------------------------------------------------------------------
// Angular quadrature.

/// Node-doubling cap for the periodic trapezoid rule.
const MAX_QUADRATURE_NODES: usize = 1 << 20;

/// Relative agreement between consecutive node counts that ends doubling.
const QUADRATURE_RTOL: f64 = 1e-14;

struct AngularMeans {
    /// log normalization S = sum_q Lambda'_q (the maximum of f).
    log_norm: f64,
    /// means[q] = (1/n) sum_j cos(q theta_j) e^{f(theta_j) - S}.
    means: Vec<f64>,
    /// Largest change of any component in the final doubling.
    last_change: f64,
    /// Total integrand evaluations.
    work: u64,
}

/// Periodic trapezoid means of cos(q theta) e^{f(theta) - S} for
/// q = 0..=q_max, where f(theta) = sum_q Lambda'_q cos(q theta).
/// Exponentially convergent in the node count for entire integrands; nodes
/// double until every component is stable to 1e-14 relative to the q = 0
/// mean. The start count resolves 4 (q_max + max|q|) oscillations so the
/// first agreement cannot be an aliasing artifact.
fn angular_means(masses: &BTreeMap<i32, f64>, q_max: u32) -> Result<AngularMeans> {
    let log_norm: f64 = masses.values().collect::<NeumaierSum>().value();
    let max_q = masses.keys().map(|q| q.unsigned_abs()).max().unwrap_or(0);
    let f = |theta: f64| -> f64 {
        let mut acc = NeumaierSum::new();
        for (&q, &m) in masses {
            acc.add(m * (f64::from(q) * theta).cos());
        }
        acc.value() - log_norm
    };

    let needed = 4 * (q_max + max_q).max(1) as usize;
    let mut nodes = 32usize;
    while nodes < needed {
        nodes *= 2;
    }

    let tau = std::f64::consts::TAU;
    // Raw sums at the current node count, refined by adding odd points.
    let mut sums: Vec<NeumaierSum> = vec![NeumaierSum::new(); q_max as usize + 1];
    for j in 0..nodes {
        let theta = tau * j as f64 / nodes as f64;
        let w = f(theta).exp();
        for (q, s) in sums.iter_mut().enumerate() {
            s.add(w * (q as f64 * theta).cos());
        }
    }
    let mut work = nodes as u64;
    let mut means: Vec<f64> = sums.iter().map(|s| s.value() / nodes as f64).collect();

    while nodes < MAX_QUADRATURE_NODES {
        let doubled = nodes * 2;
        for j in (1..doubled).step_by(2) {
            let theta = tau * j as f64 / doubled as f64;
            let w = f(theta).exp();
            for (q, s) in sums.iter_mut().enumerate() {
                s.add(w * (q as f64 * theta).cos());
            }
        }
        work += nodes as u64;
        let new_means: Vec<f64> = sums.iter().map(|s| s.value() / doubled as f64).collect();
        let change = means
            .iter()
            .zip(&new_means)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let scale = new_means[0];
        means = new_means;
        nodes = doubled;
        if change <= QUADRATURE_RTOL * scale {
            return Ok(AngularMeans { log_norm, means, last_change: change, work });
        }
    }
    Err(Error::NonConvergence(format!(
        "angular quadrature still moving at {MAX_QUADRATURE_NODES} nodes"
    )))
}

/// Xi0 by periodic trapezoidal quadrature of the angular integral.
pub fn ideal_partition_quadrature(tilt: &TiltedActivities) -> Result<PartitionResult> {
    let am = angular_means(tilt.masses(), 0)?;
    let mean = am.means[0];
    if mean <= 0.0 || mean.is_nan() {
        return Err(Error::Degenerate("angular mean collapsed to zero".into()));
    }
    let log_value = am.log_norm + mean.ln();
    Ok(PartitionResult {
        value: log_value.exp(),
        log_value,
        tail_bound: (am.last_change / mean) * log_value.exp(),
        work: am.work,
    })
}

/// eta_q for q = 0..=q_max by the same quadrature, normalized so
/// eta_0 = 1 exactly. Values are clamped into [0, 1] only within one
/// quadrature tolerance of the endpoints.
pub fn eta_hat(tilt: &TiltedActivities, q_max: u32) -> Result<EtaCoefficients> {
    let am = angular_means(tilt.masses(), q_max)?;
    let norm = am.means[0];
    if norm <= 0.0 || norm.is_nan() {
        return Err(Error::Degenerate("angular mean collapsed to zero".into()));
    }
    let mut values: Vec<f64> = am.means.iter().map(|m| m / norm).collect();
    values[0] = 1.0;
    for v in values.iter_mut() {
        if *v < 0.0 && *v > -1e-12 {
            *v = 0.0;
        } else if *v > 1.0 && *v < 1.0 + 1e-12 {
            *v = 1.0;
        }
    }
    Ok(EtaCoefficients { values })
}

// ---------------------------------------------------------------------------
// Laurent-series route.

/// exp of the Laurent polynomial P(x) = sum_q m_q x^q, truncated at
/// sum_{n <= n_max} P^n / n! with the factorial tail bound
/// S^{n_max+1}/(n_max+1)! * (1 - S/(n_max+2))^{-1}, S = sum_q m_q.
/// All coefficients are nonnegative, so no cancellation occurs and a
/// common rescaling (tracked in log_scale) prevents overflow.
struct SeriesExp {
    /// coeffs[half + j] is the coefficient of x^j, |j| <= half.
    coeffs: Vec<f64>,
    half: usize,
    log_scale: f64,
    /// Bound on the total omitted weight, in unscaled (value) units.
    tail: f64,
    terms: u64,
}

impl SeriesExp {
    fn coeff(&self, power: i64) -> f64 {
        let idx = self.half as i64 + power;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[idx as usize]
        }
    }
}

fn laurent_exp(masses: &BTreeMap<i32, f64>, ln_tail_target: f64) -> Result<SeriesExp> {
    let s: f64 = masses.values().collect::<NeumaierSum>().value();
    let max_q = masses.keys().map(|q| q.unsigned_abs()).max().unwrap_or(0) as usize;
    if max_q == 0 {
        return Err(Error::InvalidSpecies("no charges present".into()));
    }

    // Smallest n_max with a sub-target factorial tail (all in log space so
    // deeply subnormal targets stay representable).
    let mut ln_term = 0.0f64; // ln(S^n / n!) at n = 0
    let mut n_max = None;
    for n in 0..200_000u64 {
        // term for n+1
        let ln_next = ln_term + s.ln() - ((n + 1) as f64).ln();
        let geo = 1.0 - s / (n as f64 + 2.0);
        if geo > 0.1 {
            let ln_tail = ln_next - geo.ln();
            if ln_tail < ln_tail_target {
                n_max = Some(n);
                break;
            }
        }
        ln_term = ln_next;
    }
    let n_max = n_max.ok_or_else(|| {
        Error::TooLarge(format!("series truncation for total mass {s:.3e} is impractical"))
    })?;
    let geo = 1.0 - s / (n_max as f64 + 2.0);
    let tail =
        (ln_term + s.ln() - ((n_max + 1) as f64).ln() - geo.ln()).exp().max(f64::MIN_POSITIVE);

    let half = max_q * n_max as usize;
    let width = 2 * half + 1;
    let mut acc = vec![0.0f64; width];
    let mut term = vec![0.0f64; width];
    let mut next = vec![0.0f64; width];
    acc[half] = 1.0;
    term[half] = 1.0;
    // Occupied band of `term`, inclusive.
    let (mut lo, mut hi) = (half, half);
    let mut log_scale = 0.0f64;

    for n in 1..=n_max {
        let new_lo = lo.saturating_sub(max_q);
        let new_hi = (hi + max_q).min(width - 1);
        for slot in next[new_lo..=new_hi].iter_mut() {
            *slot = 0.0;
        }
        let inv_n = 1.0 / n as f64;
        for (&q, &m) in masses {
            let w = m * inv_n;
            // Band offset i: absolute index lo + i contributes to lo + i + q.
            for (i, &t) in term[lo..=hi].iter().enumerate() {
                let j = (lo + i) as i64 + i64::from(q);
                debug_assert!(j >= 0 && (j as usize) < width);
                next[j as usize] += w * t;
            }
        }
        lo = new_lo;
        hi = new_hi;
        term[lo..=hi].copy_from_slice(&next[lo..=hi]);
        let mut peak = 0.0f64;
        for i in lo..=hi {
            acc[i] += term[i];
            peak = peak.max(term[i]);
        }
        if peak > 1e250 {
            for slot in term[lo..=hi].iter_mut() {
                *slot *= 1e-250;
            }
            for slot in acc.iter_mut() {
                *slot *= 1e-250;
            }
            log_scale += 250.0 * std::f64::consts::LN_10;
        }
    }

    Ok(SeriesExp { coeffs: acc, half, log_scale, tail, terms: n_max })
}

/// ln of a floor for Xi0, used to convert a relative tolerance into an
/// absolute series tail target: the angular integrand is at least e^{-2S},
/// so Xi0 >= e^{-S} in the unscaled units of the series.
fn ln_xi0_floor(masses: &BTreeMap<i32, f64>) -> f64 {
    let s: f64 = masses.values().sum();
    -s
}

/// Xi0 as the constant term of exp(sum_q Lambda'_q x^q), an arbitrary-
/// precision-free cross-check of the quadrature route. `rel_tolerance`
/// bounds tail_bound / value.
pub fn ideal_partition_series(
    tilt: &TiltedActivities,
    rel_tolerance: f64,
) -> Result<PartitionResult> {
    let masses = tilt.masses();
    let target = rel_tolerance.ln() + ln_xi0_floor(masses);
    let se = laurent_exp(masses, target)?;
    let c0 = se.coeff(0);
    if c0 <= 0.0 || c0.is_nan() {
        return Err(Error::Degenerate("constant coefficient vanished".into()));
    }
    let log_value = se.log_scale + c0.ln();
    Ok(PartitionResult {
        value: log_value.exp(),
        log_value,
        tail_bound: se.tail,
        work: se.terms,
    })
}

/// eta_q for q = 0..=q_max as Laurent coefficient ratios
/// [x^{-q}] exp(P) / [x^0] exp(P).
pub fn eta_hat_series(
    tilt: &TiltedActivities,
    q_max: u32,
    rel_tolerance: f64,
) -> Result<EtaCoefficients> {
    let masses = tilt.masses();
    let target = rel_tolerance.ln() + ln_xi0_floor(masses);
    let se = laurent_exp(masses, target)?;
    let c0 = se.coeff(0);
    if c0 <= 0.0 || c0.is_nan() {
        return Err(Error::Degenerate("constant coefficient vanished".into()));
    }
    let mut values = Vec::with_capacity(q_max as usize + 1);
    values.push(1.0);
    for q in 1..=q_max {
        values.push(se.coeff(-i64::from(q)) / c0);
    }
    Ok(EtaCoefficients { values })
}

// ---------------------------------------------------------------------------
// Derived ideal-gas quantities.

/// Ideal-gas screening length
/// xi = ( beta sum_alpha e^2 q_alpha^2 z'_alpha eta_{q_alpha} )^{-1/2},
/// with z' the detilted activities.
pub fn correlation_length(system: &System, eta: &EtaCoefficients) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    for sp in system.species() {
        let e = eta.get(sp.charge).ok_or_else(|| {
            Error::Config(format!(
                "eta table stops at q = {}, species has charge {}",
                eta.q_max(),
                sp.charge
            ))
        })?;
        let q = f64::from(sp.charge);
        acc.add(q * q * system.detilted_activity(sp) * e);
    }
    let rate = system.coupling() * acc.value();
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Degenerate(format!(
            "screening rate must be positive and finite, got {rate}"
        )));
    }
    Ok(1.0 / rate.sqrt())
}

/// Grand canonical particle density of the neutral gas,
/// sum_alpha z'_alpha eta_{q_alpha}. Each term is the density of one
/// species suppressed by the charge-neutrality constraint.
pub fn suppressed_density(system: &System, eta: &EtaCoefficients) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    for sp in system.species() {
        let e = eta.get(sp.charge).ok_or_else(|| {
            Error::Config(format!(
                "eta table stops at q = {}, species has charge {}",
                eta.q_max(),
                sp.charge
            ))
        })?;
        acc.add(system.detilted_activity(sp) * e);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Ensemble, Geometry, KernelConfig, Species, U0Convention};

    /// I_n by the integral representation
    /// I_n(x) = (1/pi) ∫_0^pi e^{x cos t} cos(n t) dt,
    /// scaled by e^{-x} so it stays finite for large x. Independent of both
    /// production routes.
    fn bessel_scaled_by_integral(n: u32, x: f64) -> f64 {
        let m = 1 << 16;
        let h = std::f64::consts::PI / m as f64;
        let f = |t: f64| (x * (t.cos() - 1.0)).exp() * (f64::from(n) * t).cos();
        let mut acc = NeumaierSum::new();
        acc.add(0.5 * (f(0.0) + f(std::f64::consts::PI)));
        for j in 1..m {
            acc.add(f(j as f64 * h));
        }
        acc.value() * h / std::f64::consts::PI
    }

    fn symmetric_tilt(z_mass: f64) -> TiltedActivities {
        let sp = vec![
            Species { charge: 1, activity: z_mass },
            Species { charge: -1, activity: z_mass },
        ];
        TiltedActivities::solve(&sp, 1.0, 0.0, 0.0).unwrap()
    }

    fn lattice_system(z: f64, n: usize, coupling: f64) -> System {
        System::build(
            vec![Species { charge: 1, activity: z }, Species { charge: -1, activity: z }],
            Geometry::LatticeTorus { dimension: 1, side: 1.0, spacing: 1.0 / n as f64 },
            Ensemble { beta: coupling, elementary_charge: 1.0 },
            KernelConfig { t: 0.0, u0: U0Convention::Zero },
        )
        .unwrap()
    }

    #[test]
    fn bessel_small_arguments() {
        assert_eq!(bessel_i(0, 0.0), 1.0);
        assert_eq!(bessel_i(3, 0.0), 0.0);
        // Frozen reference values from the integral representation.
        assert!((bessel_i(0, 2.0) - 2.2795853023360673).abs() < 1e-14);
        assert!((bessel_i(1, 2.0) - 1.5906368546373288).abs() < 1e-14);
        let ratio = bessel_i(1, 2.0) / bessel_i(0, 2.0);
        assert!((ratio - 0.6977746579640078).abs() < 1e-14);
    }

    #[test]
    fn bessel_series_and_miller_match_integral_oracle() {
        for &(n, x) in &[
            (0u32, 0.3),
            (1, 0.3),
            (0, 2.0),
            (1, 2.0),
            (4, 7.5),
            (0, 14.9),
            (2, 14.9),
            (0, 15.1),
            (2, 15.1),
            (1, 20.0),
            (3, 42.0),
            (6, 120.0),
        ] {
            let oracle = bessel_scaled_by_integral(n, x);
            let got = bessel_i_scaled(n, x);
            assert!(
                (got - oracle).abs() <= 1e-13 * oracle.abs().max(1e-30),
                "I_{n}({x}): {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn bessel_routes_agree_at_crossover() {
        // Both routes evaluated at the same argument: the dispatch switch
        // must be invisible at working precision.
        let x = BESSEL_SERIES_LIMIT;
        for n in 0..6u32 {
            let series = bessel_series(n, x) * (-x).exp();
            let miller = bessel_miller(n, x);
            assert!(
                (series - miller).abs() < 1e-13 * series.max(miller),
                "I_{n}({x}): series {series} vs miller {miller}"
            );
        }
    }

    #[test]
    fn bessel_large_argument_ratio() {
        // I_1/I_0 -> 1 - 1/(2x) + O(x^{-2}); frozen value at x = 20 from
        // the integral representation, cross-checked against a 40-digit
        // evaluation of the defining series.
        let r = bessel_i_scaled(1, 20.0) / bessel_i_scaled(0, 20.0);
        let oracle = bessel_scaled_by_integral(1, 20.0) / bessel_scaled_by_integral(0, 20.0);
        assert!((r - oracle).abs() < 1e-13);
        assert!((r - 0.9746705078898071).abs() < 1e-13);
    }

    #[test]
    fn ln_bessel_consistent_with_scaled() {
        for &x in &[0.5, 14.0, 16.0, 300.0, 800.0] {
            let ln = ln_bessel_i(2, x);
            let rebuilt = x + bessel_i_scaled(2, x).ln();
            assert!((ln - rebuilt).abs() < 1e-12 * ln.abs().max(1.0));
        }
        assert!(bessel_i(0, 800.0).is_infinite());
        assert!(ln_bessel_i(0, 800.0).is_finite());
    }

    #[test]
    fn two_species_xi0_is_bessel() {
        // Xi0 = I_0(2 z |L|) for a +/-1 gas with equal masses z |L|.
        for &m in &[0.1, 1.0, 10.0] {
            let tilt = symmetric_tilt(m);
            let xi0 = ideal_partition_quadrature(&tilt).unwrap();
            let expect = bessel_i(0, 2.0 * m);
            assert!(
                (xi0.value - expect).abs() < 1e-12 * expect,
                "m = {m}: {} vs {expect}",
                xi0.value
            );
        }
    }

    #[test]
    fn two_species_eta_is_bessel_ratio() {
        for &m in &[0.1, 1.0, 10.0] {
            let tilt = symmetric_tilt(m);
            let eta = eta_hat(&tilt, 1).unwrap();
            let expect = bessel_i(1, 2.0 * m) / bessel_i(0, 2.0 * m);
            assert!(
                (eta.get(1).unwrap() - expect).abs() < 1e-12 * expect,
                "m = {m}: {} vs {expect}",
                eta.get(1).unwrap()
            );
        }
    }

    #[test]
    fn quadrature_matches_series_on_asymmetric_masses() {
        // Mixed |q| = 1 and 2 with a tilt; both routes must agree to 1e-12.
        let sp = vec![
            Species { charge: 1, activity: 0.8 * 0.3f64.exp() },
            Species { charge: -1, activity: 0.8 * (-0.3f64).exp() },
            Species { charge: 2, activity: 0.25 * 0.6f64.exp() },
            Species { charge: -2, activity: 0.25 * (-0.6f64).exp() },
        ];
        let tilt = TiltedActivities::solve(&sp, 1.3, 0.0, 0.0).unwrap();
        let a = ideal_partition_quadrature(&tilt).unwrap();
        let b = ideal_partition_series(&tilt, 1e-14).unwrap();
        assert!((a.value - b.value).abs() < 1e-12 * a.value, "{} vs {}", a.value, b.value);

        let ea = eta_hat(&tilt, 3).unwrap();
        let eb = eta_hat_series(&tilt, 3, 1e-14).unwrap();
        for q in 0..=3 {
            let (x, y) = (ea.values()[q], eb.values()[q]);
            assert!((x - y).abs() < 1e-12 * x.max(1e-6), "q = {q}: {x} vs {y}");
        }
    }

    #[test]
    fn series_tail_bound_is_honest() {
        let tilt = symmetric_tilt(1.5);
        let loose = ideal_partition_series(&tilt, 1e-6).unwrap();
        let tight = ideal_partition_series(&tilt, 1e-15).unwrap();
        assert!((loose.value - tight.value).abs() <= loose.tail_bound);
        assert!(tight.work >= loose.work);
    }

    #[test]
    fn eta_values_lie_in_unit_interval() {
        let sp = vec![
            Species { charge: 3, activity: 0.2 },
            Species { charge: -3, activity: 0.2 },
            Species { charge: 1, activity: 1.1 },
            Species { charge: -1, activity: 1.1 },
        ];
        let tilt = TiltedActivities::solve(&sp, 1.0, 0.0, 0.0).unwrap();
        let eta = eta_hat(&tilt, 9).unwrap();
        assert_eq!(eta.values()[0], 1.0);
        for (q, &v) in eta.values().iter().enumerate() {
            assert!((0.0..=1.0).contains(&v), "eta_{q} = {v}");
        }
    }

    #[test]
    fn eta_zero_when_charge_unreachable() {
        // Only +/-2 charges: odd insertions cannot be screened, eta_1 = 0.
        let sp = vec![
            Species { charge: 2, activity: 0.7 },
            Species { charge: -2, activity: 0.7 },
        ];
        let tilt = TiltedActivities::solve(&sp, 1.0, 0.0, 0.0).unwrap();
        let eta = eta_hat(&tilt, 2).unwrap();
        // Quadrature leaves rounding dust where the exact value is zero.
        assert!(eta.get(1).unwrap().abs() <= 1e-13);
        assert!(eta.get(2).unwrap() > 0.0);
        let se = eta_hat_series(&tilt, 2, 1e-14).unwrap();
        assert_eq!(se.get(1), Some(0.0));
        assert!((se.get(2).unwrap() - eta.get(2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn quadrature_is_invariant_under_activity_tilt() {
        // Tilting activities z -> e^{q c} z leaves the tilted masses, and
        // with them Xi0 and eta, exactly invariant.
        let base = vec![
            Species { charge: 1, activity: 0.9 },
            Species { charge: -1, activity: 0.9 },
            Species { charge: 2, activity: 0.2 },
            Species { charge: -2, activity: 0.2 },
        ];
        let tilted: Vec<Species> = base
            .iter()
            .map(|sp| Species {
                charge: sp.charge,
                activity: (f64::from(sp.charge) * 0.8).exp() * sp.activity,
            })
            .collect();
        let t0 = TiltedActivities::solve(&base, 1.0, 0.0, 0.0).unwrap();
        let t1 = TiltedActivities::solve(&tilted, 1.0, 0.0, 0.0).unwrap();
        for (q, m) in t0.masses() {
            assert!((m - t1.masses()[q]).abs() <= 1e-12 * m, "mass {q}");
        }
        let a = ideal_partition_quadrature(&t0).unwrap();
        let b = ideal_partition_quadrature(&t1).unwrap();
        assert!((a.value - b.value).abs() <= 1e-13 * a.value);
    }

    #[test]
    fn correlation_length_two_species_closed_form() {
        // xi = (2 beta e^2 z |L| I_1/I_0 / |L|)^{-1/2} on volume 1.
        let sys = lattice_system(0.5, 4, 0.2);
        let eta = eta_hat(sys.tilt(), 1).unwrap();
        let xi = correlation_length(&sys, &eta).unwrap();
        let ratio = bessel_i(1, 1.0) / bessel_i(0, 1.0);
        let expect = 1.0 / (0.2 * 2.0 * 0.5 * ratio).sqrt();
        assert!((xi - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn suppressed_density_two_species_closed_form() {
        let sys = lattice_system(0.5, 4, 0.2);
        let eta = eta_hat(sys.tilt(), 1).unwrap();
        let rho = suppressed_density(&sys, &eta).unwrap();
        let ratio = bessel_i(1, 1.0) / bessel_i(0, 1.0);
        assert!((rho - 2.0 * 0.5 * ratio).abs() < 1e-13);
    }

    #[test]
    fn density_grows_toward_unconstrained_value() {
        // As z |L| grows the neutrality constraint stops binding:
        // density -> 2z (from below, strictly increasing in z).
        let mut last = 0.0;
        for &z in &[0.1, 0.3, 1.0, 3.0, 10.0, 30.0] {
            let sys = lattice_system(z, 4, 0.2);
            let eta = eta_hat(sys.tilt(), 1).unwrap();
            let rho = suppressed_density(&sys, &eta).unwrap();
            assert!(rho > last, "density not increasing at z = {z}");
            assert!(rho < 2.0 * z);
            last = rho;
        }
        let sys = lattice_system(30.0, 4, 0.2);
        let eta = eta_hat(sys.tilt(), 1).unwrap();
        let rho = suppressed_density(&sys, &eta).unwrap();
        assert!(rho / 60.0 > 0.99);
    }

    #[test]
    fn correlation_length_requires_eta_coverage() {
        let sys = lattice_system(0.5, 4, 0.2);
        let eta = EtaCoefficients { values: vec![1.0] }; // q_max = 0
        assert!(correlation_length(&sys, &eta).is_err());
    }
}
