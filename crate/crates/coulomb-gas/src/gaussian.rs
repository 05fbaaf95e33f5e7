//! The Gaussian lower bound on the neutral partition function,
//!
//! ```text
//! Xi >= Xi2 = Xi0 exp[ u0 |L| / (2 xi^2)
//!                      - (1/2) sum_{p != 0} log(1 + u_hat(p) / xi^2) ]
//! ```
//!
//! evaluated along two independent routes (the dual momentum sum, and a
//! real-space log-determinant over the mean-zero subspace) together with
//! its zero-cutoff limit, where the self-energy counterterm E0 replaces
//! the divergent pieces.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ideal::{
    correlation_length, ideal_partition_quadrature, EtaCoefficients, PartitionResult,
};
use crate::model::{dual_modes, regularized_energy, Geometry, KernelConfig, System};
use crate::numerics::{power_tail, unit_sphere_area, NeumaierSum};
use crate::oracle::lattice_kernel;

/// Largest lattice the determinant route will factor.
pub const MAX_DETERMINANT_SITES: usize = 4096;

/// The Gaussian lower bound and the pieces it is assembled from.
#[derive(Clone, Debug)]
pub struct GaussianBound {
    /// The bound Xi2; `log_xi2` is authoritative if this overflows.
    pub xi2: f64,
    pub log_xi2: f64,
    /// The ideal-gas factor Xi0.
    pub ideal: PartitionResult,
    /// Screening length xi entering the bound.
    pub correlation_length: f64,
    /// sum_p log(1 + u_hat/xi^2), the equal log-determinant, or, in the
    /// zero-cutoff limit, sum_p [log(1 + 1/(xi^2 p^2)) - 1/(xi^2 p^2)].
    pub momentum_sum: f64,
    /// u0 |L| / (2 xi^2), or E0 |L| / xi^2 in the zero-cutoff limit.
    pub u0_term: f64,
    /// Absolute error cover for xi2: mode-truncation and quadrature tails,
    /// plus extrapolation error in the zero-cutoff limit. Truncating the
    /// momentum sum can only raise the computed value, so the true bound
    /// lies within [xi2 - tail_bound, xi2].
    pub tail_bound: f64,
    /// Modes summed, or the matrix dimension on the determinant route.
    pub work: u64,
}

fn assemble(
    ideal: PartitionResult,
    xi: f64,
    momentum_sum: f64,
    u0_term: f64,
    log_error: f64,
    work: u64,
) -> GaussianBound {
    let log_xi2 = ideal.log_value + u0_term - 0.5 * momentum_sum;
    let xi2 = log_xi2.exp();
    GaussianBound {
        xi2,
        log_xi2,
        ideal,
        correlation_length: xi,
        momentum_sum,
        u0_term,
        tail_bound: xi2 * log_error,
        work,
    }
}

/// Xi2 by direct summation over dual momenta. On lattice geometry the mode
/// set is exact; on the continuum it is truncated once the omitted
/// u_hat-mass drops below `tolerance * volume`.
pub fn gaussian_bound(
    system: &System,
    eta: &EtaCoefficients,
    tolerance: f64,
) -> Result<GaussianBound> {
    let xi = correlation_length(system, eta)?;
    let inv = 1.0 / (xi * xi);
    let ideal = ideal_partition_quadrature(system.tilt())?;
    let modes = dual_modes(system.geometry(), system.kernel(), tolerance)?;
    let mut acc = NeumaierSum::new();
    for m in &modes.modes {
        acc.add((inv * m.u_hat).ln_1p());
    }
    let u0_term = 0.5 * inv * system.u0() * system.volume();
    // log(1 + inv u_hat) <= inv u_hat bounds the omitted log terms.
    let log_error = 0.5 * inv * modes.tail_bound + ideal.tail_bound / ideal.value;
    Ok(assemble(ideal, xi, acc.value(), u0_term, log_error, modes.modes.len() as u64))
}

/// Xi2 on a lattice via the Gaussian determinant identity
///
/// ```text
/// prod_{p != 0} (1 + u_hat(p)/xi^2) = det( I + (l^d/xi^2) Q^T U Q )
/// ```
///
/// where U is the site-kernel matrix and Q an orthonormal basis of the
/// mean-zero subspace. Computed by Cholesky factorization in real space
/// (no Fourier step), which makes it an independent check of the momentum
/// route.
pub fn gaussian_bound_determinant(
    system: &System,
    eta: &EtaCoefficients,
) -> Result<GaussianBound> {
    let geometry = system.geometry();
    let n = geometry.site_count().ok_or_else(|| {
        Error::InvalidGeometry("determinant route requires lattice geometry".into())
    })?;
    if n > MAX_DETERMINANT_SITES {
        return Err(Error::TooLarge(format!(
            "{n} sites exceed the {MAX_DETERMINANT_SITES}-site determinant cap"
        )));
    }
    let xi = correlation_length(system, eta)?;
    let inv = 1.0 / (xi * xi);
    let ideal = ideal_partition_quadrature(system.tilt())?;
    let u0_term = 0.5 * inv * system.u0() * system.volume();
    let log_error = ideal.tail_bound / ideal.value;

    if n == 1 {
        // No nonzero modes: the Gaussian factor is the u0 term alone.
        return Ok(assemble(ideal, xi, 0.0, u0_term, log_error, 1));
    }

    let kernel = lattice_kernel(geometry, system.kernel())?;
    let spacing = geometry.spacing().unwrap();
    let w = inv * spacing.powi(geometry.dimension() as i32);

    // Site kernel; entry(x, x) is the translation-invariant (Fourier)
    // diagonal f0, and the u0 convention lives in the exponential
    // prefactor, not in the matrix being diagonalized.
    let u = |x: usize, y: usize| kernel.entry(x, y);

    // Helmert basis e_k, k = 1..n-1: (1, ..., 1, -k, 0, ...) / sqrt(k(k+1)),
    // an orthonormal spanning set of the mean-zero subspace.
    // (U Q)_{x,k} = c_k (prefix_{x,k} - k U_{x,k}) via column prefix sums.
    let mut uq = vec![0.0f64; n * (n - 1)];
    for x in 0..n {
        let mut prefix = NeumaierSum::new();
        for k in 1..n {
            prefix.add(u(x, k - 1));
            let ck = 1.0 / ((k as f64) * (k as f64 + 1.0)).sqrt();
            uq[x * (n - 1) + (k - 1)] = ck * (prefix.value() - k as f64 * u(x, k));
        }
    }
    // B = I + w Q^T (U Q), again with prefix sums over rows of UQ.
    let mut b = DMatrix::<f64>::identity(n - 1, n - 1);
    for j in 0..n - 1 {
        let mut prefix = NeumaierSum::new();
        for k in 1..n {
            prefix.add(uq[(k - 1) * (n - 1) + j]);
            let ck = 1.0 / ((k as f64) * (k as f64 + 1.0)).sqrt();
            b[(k - 1, j)] += w * ck * (prefix.value() - k as f64 * uq[k * (n - 1) + j]);
        }
    }

    let chol = nalgebra::linalg::Cholesky::new(b).ok_or_else(|| {
        Error::NonConvergence("Gaussian fluctuation matrix is not positive definite".into())
    })?;
    let mut lndet = NeumaierSum::new();
    let l = chol.l_dirty();
    for i in 0..n - 1 {
        lndet.add(l[(i, i)].ln());
    }
    Ok(assemble(ideal, xi, 2.0 * lndet.value(), u0_term, log_error, n as u64))
}

/// Tail of (1/2) sum_{|p| > radius} (inv/p^2)^2 over the dual lattice,
/// bounding the omitted |log(1+x) - x| <= x^2/2 terms of the zero-cutoff
/// momentum sum. Same cell-comparison argument as the kernel tail.
fn dh_tail_bound(dimension: u32, side: f64, inv: f64, radius: f64) -> f64 {
    let delta = f64::from(dimension).sqrt() * std::f64::consts::PI / side;
    let r0 = radius - 2.0 * delta;
    if r0 <= 0.0 {
        return f64::INFINITY;
    }
    let cells = (side / (2.0 * std::f64::consts::PI)).powi(dimension as i32);
    let spread = (1.0 + delta / r0).powi(dimension as i32 - 1);
    cells
        * unit_sphere_area(dimension)
        * spread
        * 0.5
        * inv
        * inv
        * power_tail(dimension as i32 - 5, r0)
}

const DH_MODE_CAP: f64 = 2e7;

/// The zero-cutoff (Debye-Huckel) limit of the Gaussian bound,
///
/// ```text
/// lim_{t -> 0} Xi2 = Xi0 exp{ E0 |L| / xi^2
///     - (1/2) sum_{p != 0} [ log(1 + 1/(xi^2 p^2)) - 1/(xi^2 p^2) ] }
/// ```
///
/// where E0 absorbs the divergent parts of the u0 term and the momentum
/// sum; every remaining summand is <= 0 and O(p^{-4}), so the sum
/// converges for d < 4. `tolerance` bounds the truncation error of the
/// log sum on the continuum.
pub fn debye_huckel_limit(
    system: &System,
    eta: &EtaCoefficients,
    tolerance: f64,
) -> Result<GaussianBound> {
    let geometry = system.geometry();
    let d = geometry.dimension();
    if d >= 4 {
        return Err(Error::DimensionUnsupported {
            dimension: d,
            context: "the zero-cutoff limit is evaluated only for d < 4".into(),
        });
    }
    let e0 = regularized_energy(geometry, system.kernel().u0)?;
    let xi = correlation_length(system, eta)?;
    let inv = 1.0 / (xi * xi);
    let ideal = ideal_partition_quadrature(system.tilt())?;
    let vol = geometry.volume();

    let summand = |norm_sq: f64| -> f64 {
        let x = inv / norm_sq;
        let g = x.ln_1p() - x;
        debug_assert!(g <= 1e-15, "zero-cutoff summand must be nonpositive, got {g}");
        g
    };

    let (dh_sum, sum_tail, work) = match geometry {
        Geometry::LatticeTorus { .. } => {
            let modes =
                dual_modes(geometry, &KernelConfig { t: 0.0, u0: system.kernel().u0 }, 0.0)?;
            let mut acc = NeumaierSum::new();
            for m in &modes.modes {
                acc.add(summand(m.norm_sq));
            }
            (acc.value(), 0.0, modes.modes.len() as u64)
        }
        Geometry::ContinuumTorus { .. } => {
            let a = geometry.side();
            let step = 2.0 * std::f64::consts::PI / a;
            let delta = f64::from(d).sqrt() * std::f64::consts::PI / a;
            let mut radius = (4.0 * delta).max(3.0 * step);
            let mut found = false;
            for _ in 0..500 {
                if dh_tail_bound(d, a, inv, radius) <= tolerance {
                    found = true;
                    break;
                }
                radius *= 1.25;
                let per_axis = 2.0 * (radius / step).floor() + 1.0;
                if per_axis.powi(d as i32) > DH_MODE_CAP {
                    return Err(Error::TooLarge(format!(
                        "zero-cutoff momentum sum needs over {DH_MODE_CAP:.0e} modes at \
                         tolerance {tolerance:.1e}; loosen it or use lattice geometry"
                    )));
                }
            }
            if !found {
                return Err(Error::NonConvergence("zero-cutoff truncation search".into()));
            }
            let m = (radius / step).floor() as i64;
            let width = 2 * m + 1;
            let r_sq = radius * radius;
            // Collect (norm_sq, index) and sum in (norm, lex) order.
            let mut items: Vec<(f64, Vec<i32>)> = Vec::new();
            let total = (width as usize).pow(d);
            for flat in 0..total {
                let mut rest = flat;
                let mut index = Vec::with_capacity(d as usize);
                for _ in 0..d {
                    index.push((rest % width as usize) as i64 - m);
                    rest /= width as usize;
                }
                if index.iter().all(|&v| v == 0) {
                    continue;
                }
                let norm_sq: f64 = index.iter().map(|&v| (v as f64 * step).powi(2)).sum();
                if norm_sq > r_sq {
                    continue;
                }
                items.push((norm_sq, index.iter().map(|&v| v as i32).collect()));
            }
            items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
            let mut acc = NeumaierSum::new();
            for (norm_sq, _) in &items {
                acc.add(summand(*norm_sq));
            }
            (acc.value(), dh_tail_bound(d, a, inv, radius), items.len() as u64)
        }
    };

    let u0_term = inv * e0.value * vol;
    let log_error = 0.5 * sum_tail + inv * vol * e0.error_estimate + ideal.tail_bound / ideal.value;
    Ok(assemble(ideal, xi, dh_sum, u0_term, log_error, work))
}
