//! System definition for a neutral Coulomb gas on a torus: charged species,
//! geometry, inverse temperature, the regularized interaction kernel, and
//! the activity tilt that makes the ensemble charge symmetric.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{radial_tail_bound, unit_sphere_area, NeumaierSum};

/// A particle species: integer charge (in units of the elementary charge)
/// and a positive activity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub charge: i32,
    pub activity: f64,
}

/// Domain of the gas. Both variants are periodic with linear size `side`;
/// the lattice variant restricts positions to `side/spacing` points per
/// axis and weights each site by `spacing^d` in configuration sums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    LatticeTorus { dimension: u32, side: f64, spacing: f64 },
    ContinuumTorus { dimension: u32, side: f64 },
}

impl Geometry {
    pub fn dimension(&self) -> u32 {
        match *self {
            Geometry::LatticeTorus { dimension, .. } => dimension,
            Geometry::ContinuumTorus { dimension, .. } => dimension,
        }
    }

    pub fn side(&self) -> f64 {
        match *self {
            Geometry::LatticeTorus { side, .. } => side,
            Geometry::ContinuumTorus { side, .. } => side,
        }
    }

    pub fn volume(&self) -> f64 {
        self.side().powi(self.dimension() as i32)
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, Geometry::LatticeTorus { .. })
    }

    pub fn spacing(&self) -> Option<f64> {
        match *self {
            Geometry::LatticeTorus { spacing, .. } => Some(spacing),
            Geometry::ContinuumTorus { .. } => None,
        }
    }

    /// Number of lattice points per axis.
    pub fn points_per_side(&self) -> Option<usize> {
        match *self {
            Geometry::LatticeTorus { side, spacing, .. } => {
                Some((side / spacing).round() as usize)
            }
            Geometry::ContinuumTorus { .. } => None,
        }
    }

    /// Total number of lattice sites, `(side/spacing)^d`.
    pub fn site_count(&self) -> Option<usize> {
        self.points_per_side()
            .map(|n| n.pow(self.dimension()))
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dimension();
        if d == 0 {
            return Err(Error::InvalidGeometry("dimension must be at least 1".into()));
        }
        if d > 8 {
            return Err(Error::DimensionUnsupported {
                dimension: d,
                context: "momentum enumeration tables stop at d = 8".into(),
            });
        }
        let a = self.side();
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidGeometry(format!("side must be positive, got {a}")));
        }
        if let Geometry::LatticeTorus { side, spacing, .. } = *self {
            if !(spacing.is_finite() && spacing > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "spacing must be positive, got {spacing}"
                )));
            }
            let ratio = side / spacing;
            if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
                return Err(Error::InvalidGeometry(format!(
                    "side/spacing must be a whole number of sites, got {ratio}"
                )));
            }
        }
        Ok(())
    }
}

/// Self-energy constant convention: `u(x,x) = u0`.
///
/// `InfiniteVolume` uses the d > 2 whole-space value
/// `2 / ((d-2) (4 pi)^{d/2} t^{(d-2)/2})`, which makes the cutoff kernel
/// independent of the torus size up to exponentially small corrections.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum U0Convention {
    #[default]
    Zero,
    InfiniteVolume,
    Custom(f64),
}

impl Serialize for U0Convention {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            U0Convention::Zero => s.serialize_str("zero"),
            U0Convention::InfiniteVolume => s.serialize_str("infinite_volume"),
            U0Convention::Custom(v) => s.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for U0Convention {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = U0Convention;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "\"zero\", \"infinite_volume\", or a number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<U0Convention, E> {
                match v {
                    "zero" => Ok(U0Convention::Zero),
                    "infinite_volume" => Ok(U0Convention::InfiniteVolume),
                    other => Err(E::custom(format!("unknown u0 convention {other:?}"))),
                }
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<U0Convention, E> {
                Ok(U0Convention::Custom(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<U0Convention, E> {
                Ok(U0Convention::Custom(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<U0Convention, E> {
                Ok(U0Convention::Custom(v as f64))
            }
        }
        d.deserialize_any(Visitor)
    }
}

/// Ultraviolet regularization of the Coulomb kernel: Fourier weight
/// `e^{-t |p|^2} / |p|^2` plus the on-diagonal convention `u0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Cutoff t >= 0. t = 0 is admitted only in one dimension, where the
    /// momentum sum converges without regularization.
    pub t: f64,
    #[serde(default)]
    pub u0: U0Convention,
}

/// Inverse temperature and elementary charge; the coupling in every energy
/// exponent is `beta * elementary_charge^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub beta: f64,
    pub elementary_charge: f64,
}

impl Ensemble {
    /// beta e^2, the prefactor of the reduced (charge-number) energy.
    pub fn coupling(&self) -> f64 {
        self.beta * self.elementary_charge * self.elementary_charge
    }
}

/// Result of tilting activities to the charge-symmetric point.
///
/// `c0` solves sum_q q e^{-q c0} Lambda_q = 0 where Lambda_q collects the
/// bare activity mass `volume * sum_{species with charge q} z`. The tilted
/// masses `Lambda'_q = e^{-q c0} Lambda_q` drive every ideal-gas formula;
/// the tilde masses carry the extra self-energy factor e^{q^2 coupling u0/2}
/// used by configuration sums.
#[derive(Clone, Debug)]
pub struct TiltedActivities {
    c0: f64,
    masses: BTreeMap<i32, f64>,
    tilde_masses: BTreeMap<i32, f64>,
}

impl TiltedActivities {
    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// q -> Lambda'_q, strictly positive entries only.
    pub fn masses(&self) -> &BTreeMap<i32, f64> {
        &self.masses
    }

    /// q -> e^{q^2 coupling u0 / 2} Lambda'_q.
    pub fn tilde_masses(&self) -> &BTreeMap<i32, f64> {
        &self.tilde_masses
    }

    pub fn max_charge(&self) -> u32 {
        self.masses.keys().map(|q| q.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn solve(species: &[Species], volume: f64, coupling: f64, u0: f64) -> Result<Self> {
        let bare = bare_masses(species, volume)?;
        let c0 = solve_detilt(&bare, (-1.0, 1.0))?;
        let mut masses = BTreeMap::new();
        let mut tilde_masses = BTreeMap::new();
        for (&q, &m) in &bare {
            let tilted = (-f64::from(q) * c0).exp() * m;
            let qq = f64::from(q) * f64::from(q);
            masses.insert(q, tilted);
            tilde_masses.insert(q, (0.5 * coupling * qq * u0).exp() * tilted);
        }
        Ok(TiltedActivities { c0, masses, tilde_masses })
    }
}

/// q -> volume * sum of activities of species with that charge.
pub fn bare_masses(species: &[Species], volume: f64) -> Result<BTreeMap<i32, f64>> {
    if species.is_empty() {
        return Err(Error::InvalidSpecies("species list is empty".into()));
    }
    let mut bare: BTreeMap<i32, f64> = BTreeMap::new();
    for sp in species {
        if sp.charge == 0 {
            return Err(Error::InvalidSpecies("charge must be nonzero".into()));
        }
        if !(sp.activity.is_finite() && sp.activity > 0.0) {
            return Err(Error::InvalidSpecies(format!(
                "activity must be positive and finite, got {}",
                sp.activity
            )));
        }
        *bare.entry(sp.charge).or_insert(0.0) += volume * sp.activity;
    }
    Ok(bare)
}

/// Root of f(c) = sum_q q e^{-q c} Lambda_q, which is strictly decreasing.
/// Bracket doubling from the seed interval, bisection to width 1e-14, then
/// Newton polish until the residual is below 1e-13 of the derivative scale.
fn solve_detilt(bare: &BTreeMap<i32, f64>, seed: (f64, f64)) -> Result<f64> {
    let has_pos = bare.keys().any(|&q| q > 0);
    let has_neg = bare.keys().any(|&q| q < 0);
    if !(has_pos && has_neg) {
        return Err(Error::NotSymmetrizable(
            "both positive and negative charges are required".into(),
        ));
    }

    let f = |c: f64| -> f64 {
        let mut acc = NeumaierSum::new();
        for (&q, &m) in bare {
            acc.add(f64::from(q) * (-f64::from(q) * c).exp() * m);
        }
        acc.value()
    };
    // Scale of |f|: sum_q |q| e^{-q c} Lambda_q, also -f'(c) / scale >= ...
    let scale = |c: f64| -> f64 {
        bare.iter()
            .map(|(&q, &m)| f64::from(q).abs() * (-f64::from(q) * c).exp() * m)
            .sum()
    };

    let (mut lo, mut hi) = seed;
    debug_assert!(lo < hi);
    // f is decreasing: widen until f(lo) > 0 > f(hi).
    let mut grow = 0;
    while f(lo) <= 0.0 {
        lo = if lo < 0.0 { 2.0 * lo } else { lo - (hi - lo) };
        grow += 1;
        if grow > 200 {
            return Err(Error::NonConvergence("tilt bracket expansion (low side)".into()));
        }
    }
    grow = 0;
    while f(hi) >= 0.0 {
        hi = if hi > 0.0 { 2.0 * hi } else { hi + (hi - lo) };
        grow += 1;
        if grow > 200 {
            return Err(Error::NonConvergence("tilt bracket expansion (high side)".into()));
        }
    }

    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid); // exact root; typical for charge-symmetric input
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut c = 0.5 * (lo + hi);
    for _ in 0..8 {
        if f(c).abs() <= 1e-13 * scale(c) {
            return Ok(c);
        }
        let fp: f64 = bare
            .iter()
            .map(|(&q, &m)| -f64::from(q) * f64::from(q) * (-f64::from(q) * c).exp() * m)
            .sum();
        let step = f(c) / fp;
        if !step.is_finite() {
            break;
        }
        c -= step;
    }
    if f(c).abs() <= 1e-13 * scale(c) {
        Ok(c)
    } else {
        Err(Error::NonConvergence("tilt residual after Newton polish".into()))
    }
}

/// Outcome of the charge-symmetry test on tilted masses: for every
/// magnitude m present, Lambda'_m must equal Lambda'_{-m}.
#[derive(Clone, Debug)]
pub struct SymmetryCheck {
    pub pass: bool,
    /// |q| -> relative mismatch |Lambda'_q - Lambda'_{-q}| / max(pair).
    pub residuals: BTreeMap<u32, f64>,
}

pub fn check_charge_symmetry(tilt: &TiltedActivities) -> SymmetryCheck {
    let mut residuals = BTreeMap::new();
    let mut pass = true;
    for (&q, &m) in tilt.masses() {
        let mag = q.unsigned_abs();
        if residuals.contains_key(&mag) {
            continue;
        }
        let partner = tilt.masses().get(&-q).copied().unwrap_or(0.0);
        let denom = m.max(partner);
        let res = if denom > 0.0 { (m - partner).abs() / denom } else { 0.0 };
        if res > 1e-12 {
            pass = false;
        }
        residuals.insert(mag, res);
    }
    SymmetryCheck { pass, residuals }
}

/// Value of the self-energy constant u0 for the given convention.
pub fn self_energy_constant(kernel: &KernelConfig, dimension: u32) -> Result<f64> {
    match kernel.u0 {
        U0Convention::Zero => Ok(0.0),
        U0Convention::Custom(v) => {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidKernel(format!("custom u0 must be finite, got {v}")))
            }
        }
        U0Convention::InfiniteVolume => {
            if dimension <= 2 {
                return Err(Error::DimensionUnsupported {
                    dimension,
                    context: "infinite-volume u0 exists only for d > 2".into(),
                });
            }
            if kernel.t <= 0.0 {
                return Err(Error::CutoffRequired(
                    "infinite-volume u0 diverges as t -> 0".into(),
                ));
            }
            let d = f64::from(dimension);
            let four_pi = 4.0 * std::f64::consts::PI;
            Ok(2.0 / ((d - 2.0) * four_pi.powf(d / 2.0) * kernel.t.powf((d - 2.0) / 2.0)))
        }
    }
}

/// One momentum of the dual torus lattice.
#[derive(Clone, Debug)]
pub struct Mode {
    /// Integer dual coordinates n; the momentum is p = 2 pi n / side.
    pub index: Vec<i32>,
    /// |p|^2.
    pub norm_sq: f64,
    /// Fourier coefficient e^{-t |p|^2} / |p|^2.
    pub u_hat: f64,
}

/// Nonzero momenta entering kernel sums, sorted by (|p|^2, index) so that
/// reductions are reproducible. For lattice geometry this is the exact
/// finite dual set (site_count - 1 modes, components folded into the first
/// Brillouin zone); for the continuum it is a ball truncated at
/// `truncation_radius` with `tail_bound` a rigorous bound on the omitted
/// sum of u_hat.
#[derive(Clone, Debug)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    pub truncation_radius: Option<f64>,
    pub tail_bound: f64,
}

impl ModeSet {
    /// Sum of u_hat over the retained modes.
    pub fn kernel_sum(&self) -> f64 {
        self.modes.iter().map(|m| m.u_hat).collect::<NeumaierSum>().value()
    }
}

fn sort_modes(modes: &mut [Mode]) {
    modes.sort_by(|a, b| {
        a.norm_sq
            .partial_cmp(&b.norm_sq)
            .unwrap()
            .then_with(|| a.index.cmp(&b.index))
    });
}

/// Tail of sum_{|p| > radius} e^{-t|p|^2}/|p|^2 over the dual lattice
/// (2 pi / side) Z^d, bounded by comparison with the radial integral:
/// each omitted point owns a cell of half-diagonal delta = sqrt(d) pi/side,
/// so the sum is at most
/// (side/2pi)^d S_{d-1} (1 + delta/r0)^{d-1} ∫_{r0}^∞ u^{d-3} e^{-tu^2} du
/// with r0 = radius - 2 delta.
fn mode_tail_bound(dimension: u32, side: f64, t: f64, radius: f64) -> f64 {
    let delta = (f64::from(dimension)).sqrt() * std::f64::consts::PI / side;
    let r0 = radius - 2.0 * delta;
    if r0 <= 0.0 {
        return f64::INFINITY;
    }
    let cells = (side / (2.0 * std::f64::consts::PI)).powi(dimension as i32);
    let spread = (1.0 + delta / r0).powi(dimension as i32 - 1);
    cells
        * unit_sphere_area(dimension)
        * spread
        * radial_tail_bound(dimension as i32 - 3, t, r0)
}

/// Hard cap on continuum modes enumerated before giving up.
const MODE_ENUMERATION_CAP: f64 = 2e7;

/// Enumerate the dual modes needed for kernel sums.
///
/// `tolerance` controls continuum truncation: the radius grows until the
/// tail bound drops below `tolerance * volume` (the natural scale of
/// volume^{-1} sum u_hat). Lattice geometry ignores it (the set is exact).
pub fn dual_modes(geometry: &Geometry, kernel: &KernelConfig, tolerance: f64) -> Result<ModeSet> {
    geometry.validate()?;
    if !(kernel.t >= 0.0 && kernel.t.is_finite()) {
        return Err(Error::InvalidKernel(format!("cutoff must be >= 0, got {}", kernel.t)));
    }
    let d = geometry.dimension();
    let a = geometry.side();
    let step = 2.0 * std::f64::consts::PI / a;

    match geometry {
        Geometry::LatticeTorus { .. } => {
            let n_side = geometry.points_per_side().unwrap();
            let count = geometry.site_count().unwrap();
            if count > 100_000_000 {
                return Err(Error::TooLarge(format!("{count} lattice sites")));
            }
            let half = n_side / 2;
            let mut modes = Vec::with_capacity(count - 1);
            let mut digits = vec![0usize; d as usize];
            for flat in 1..count {
                let mut rest = flat;
                for digit in digits.iter_mut() {
                    *digit = rest % n_side;
                    rest /= n_side;
                }
                // Fold into (-n_side/2, n_side/2]; the tie at n_side/2 stays positive.
                let index: Vec<i32> = digits
                    .iter()
                    .map(|&v| if v > half { v as i32 - n_side as i32 } else { v as i32 })
                    .collect();
                let norm_sq: f64 =
                    index.iter().map(|&n| (f64::from(n) * step).powi(2)).sum();
                let u_hat = (-kernel.t * norm_sq).exp() / norm_sq;
                modes.push(Mode { index, norm_sq, u_hat });
            }
            sort_modes(&mut modes);
            Ok(ModeSet { modes, truncation_radius: None, tail_bound: 0.0 })
        }
        Geometry::ContinuumTorus { .. } => {
            if kernel.t == 0.0 && d >= 2 {
                return Err(Error::CutoffRequired(format!(
                    "continuum momentum sum diverges at t = 0 in d = {d}"
                )));
            }
            let delta = (f64::from(d)).sqrt() * std::f64::consts::PI / a;
            let target = tolerance * geometry.volume();
            let mut radius = (4.0 * delta).max(3.0 * step);
            let mut found = false;
            for _ in 0..500 {
                if mode_tail_bound(d, a, kernel.t, radius) <= target {
                    found = true;
                    break;
                }
                radius *= 1.25;
                let per_axis = 2.0 * (radius / step).floor() + 1.0;
                if per_axis.powi(d as i32) > MODE_ENUMERATION_CAP {
                    return Err(Error::TooLarge(format!(
                        "continuum truncation at tolerance {tolerance:.1e} needs more than \
                         {MODE_ENUMERATION_CAP:.0e} modes; loosen the tolerance or raise t"
                    )));
                }
            }
            if !found {
                return Err(Error::NonConvergence("mode truncation radius search".into()));
            }
            let m = (radius / step).floor() as i64;
            let width = 2 * m + 1;
            if (width as f64).powi(d as i32) > MODE_ENUMERATION_CAP {
                return Err(Error::TooLarge(format!(
                    "continuum mode box of {width}^{d} points exceeds the enumeration cap"
                )));
            }
            let r_sq = radius * radius;
            let mut modes = Vec::new();
            let total = (width as usize).pow(d);
            for flat in 0..total {
                let mut rest = flat;
                let mut index = Vec::with_capacity(d as usize);
                for _ in 0..d {
                    index.push((rest % width as usize) as i64 - m);
                    rest /= width as usize;
                }
                if index.iter().all(|&n| n == 0) {
                    continue;
                }
                let norm_sq: f64 = index.iter().map(|&n| (n as f64 * step).powi(2)).sum();
                if norm_sq > r_sq {
                    continue;
                }
                let index: Vec<i32> = index.iter().map(|&n| n as i32).collect();
                let u_hat = (-kernel.t * norm_sq).exp() / norm_sq;
                modes.push(Mode { index, norm_sq, u_hat });
            }
            sort_modes(&mut modes);
            Ok(ModeSet {
                modes,
                truncation_radius: Some(radius),
                tail_bound: mode_tail_bound(d, a, kernel.t, radius),
            })
        }
    }
}

/// Zero-cutoff limit of the self-energy counterterm,
/// E0 = (1/2) lim_{t->0} [u0(t) - volume^{-1} sum_{p != 0} e^{-t|p|^2}/|p|^2],
/// with a bound on the extrapolation error.
#[derive(Clone, Copy, Debug)]
pub struct RegularizedEnergy {
    pub value: f64,
    pub error_estimate: f64,
}

/// Dual-lattice sum of e^{-t|p|^2}/|p|^2 divided by volume, truncated where
/// terms drop below e^{-60}; returns (sum/volume, truncation bound/volume).
fn kernel_sum_per_volume(geometry: &Geometry, t: f64) -> (f64, f64) {
    let d = geometry.dimension();
    let a = geometry.side();
    let step = 2.0 * std::f64::consts::PI / a;
    let m = ((60.0 / t).sqrt() / step).ceil() as i64 + 1;
    let width = 2 * m + 1;
    let mut acc = NeumaierSum::new();
    let total = (width as usize).pow(d);
    for flat in 0..total {
        let mut rest = flat;
        let mut zero = true;
        let mut norm_sq = 0.0;
        for _ in 0..d {
            let n = (rest % width as usize) as i64 - m;
            rest /= width as usize;
            zero &= n == 0;
            norm_sq += (n as f64 * step).powi(2);
        }
        if zero {
            continue;
        }
        acc.add((-t * norm_sq).exp() / norm_sq);
    }
    let radius = m as f64 * step;
    (acc.value() / geometry.volume(), mode_tail_bound(d, a, t, radius) / geometry.volume())
}

/// Evaluate E0 by Richardson extrapolation on the cutoff ladder
/// t_k = t0 2^{-k}. On the lattice the dual sum is finite, so the limit is
/// evaluated exactly at t = 0 (only for conventions with a t-independent
/// u0). Leading corrections: sqrt(t) then t in d = 1; t then t^2 for the
/// infinite-volume convention in d = 3, where the sqrt(t) singularities of
/// the two terms cancel. d = 2 admits no finite limit for any supported
/// convention, nor does the continuum in d = 3 with constant u0.
pub fn regularized_energy(geometry: &Geometry, u0: U0Convention) -> Result<RegularizedEnergy> {
    geometry.validate()?;
    let d = geometry.dimension();
    if d >= 4 {
        return Err(Error::DimensionUnsupported {
            dimension: d,
            context: "zero-cutoff limit is computed only for d < 4".into(),
        });
    }

    if geometry.is_lattice() {
        let constant = match u0 {
            U0Convention::Zero => 0.0,
            U0Convention::Custom(v) if v.is_finite() => v,
            U0Convention::Custom(v) => {
                return Err(Error::InvalidKernel(format!("custom u0 must be finite, got {v}")))
            }
            U0Convention::InfiniteVolume => {
                return Err(Error::NoFiniteLimit(
                    "infinite-volume u0 grows without bound as t -> 0 while the lattice \
                     dual sum stays finite"
                        .into(),
                ))
            }
        };
        let modes = dual_modes(geometry, &KernelConfig { t: 0.0, u0: U0Convention::Zero }, 0.0)?;
        let sum = modes.kernel_sum() / geometry.volume();
        return Ok(RegularizedEnergy { value: 0.5 * (constant - sum), error_estimate: 0.0 });
    }

    // Continuum.
    let a = geometry.side();
    let t0 = 0.01 * a * a;
    let exponents: [f64; 2] = match (d, u0) {
        (1, U0Convention::Zero) | (1, U0Convention::Custom(_)) => [0.5, 1.0],
        (1, U0Convention::InfiniteVolume) => {
            return Err(Error::DimensionUnsupported {
                dimension: 1,
                context: "infinite-volume u0 exists only for d > 2".into(),
            })
        }
        (2, _) => {
            return Err(Error::NoFiniteLimit(
                "the d = 2 momentum sum diverges logarithmically as t -> 0".into(),
            ))
        }
        (3, U0Convention::InfiniteVolume) => [1.0, 2.0],
        (3, _) => {
            return Err(Error::NoFiniteLimit(
                "in d = 3 the momentum sum grows like t^{-1/2}; only the infinite-volume \
                 u0 cancels it"
                    .into(),
            ))
        }
        _ => unreachable!("d < 4 checked above"),
    };

    let mut samples = Vec::with_capacity(4);
    let mut trunc_err: f64 = 0.0;
    for k in 0..4 {
        let t = t0 / f64::powi(2.0, k);
        let kernel = KernelConfig { t, u0 };
        let constant = self_energy_constant(&kernel, d)?;
        let (sum, tail) = kernel_sum_per_volume(geometry, t);
        trunc_err = trunc_err.max(tail);
        samples.push((t, constant - sum));
    }
    let ex = crate::numerics::richardson(&samples, &exponents);
    // Exponentially small finite-size terms survive the power-law stages;
    // e^{-a^2/(4 t0)} with the elimination weights is a safe cover.
    let residual = 64.0 * (-a * a / (4.0 * t0)).exp();
    Ok(RegularizedEnergy {
        value: 0.5 * ex.value,
        error_estimate: 0.5 * (ex.error_estimate + trunc_err + residual),
    })
}

/// A validated, charge-symmetrizable gas. Construction solves the activity
/// tilt and verifies per-magnitude symmetry of the tilted masses.
#[derive(Clone, Debug)]
pub struct System {
    species: Vec<Species>,
    geometry: Geometry,
    ensemble: Ensemble,
    kernel: KernelConfig,
    u0: f64,
    tilt: TiltedActivities,
}

impl System {
    pub fn build(
        species: Vec<Species>,
        geometry: Geometry,
        ensemble: Ensemble,
        kernel: KernelConfig,
    ) -> Result<Self> {
        geometry.validate()?;
        if !(ensemble.beta.is_finite() && ensemble.beta >= 0.0) {
            return Err(Error::Config(format!("beta must be >= 0, got {}", ensemble.beta)));
        }
        if !(ensemble.elementary_charge.is_finite() && ensemble.elementary_charge > 0.0) {
            return Err(Error::Config(format!(
                "elementary charge must be positive, got {}",
                ensemble.elementary_charge
            )));
        }
        if !(kernel.t.is_finite() && kernel.t >= 0.0) {
            return Err(Error::InvalidKernel(format!("cutoff must be >= 0, got {}", kernel.t)));
        }
        if kernel.t == 0.0 && geometry.dimension() != 1 {
            return Err(Error::InvalidKernel(
                "t = 0 is admitted only in one dimension".into(),
            ));
        }
        let u0 = self_energy_constant(&kernel, geometry.dimension())?;
        let tilt =
            TiltedActivities::solve(&species, geometry.volume(), ensemble.coupling(), u0)?;
        let sym = check_charge_symmetry(&tilt);
        if !sym.pass {
            let worst = sym
                .residuals
                .iter()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(&q, &r)| format!("|q| = {q} mismatch {r:.3e}"))
                .unwrap_or_default();
            return Err(Error::NotSymmetrizable(format!(
                "tilted masses are not symmetric per charge magnitude ({worst})"
            )));
        }
        Ok(System { species, geometry, ensemble, kernel, u0, tilt })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    /// Value of the self-energy constant under the configured convention.
    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn tilt(&self) -> &TiltedActivities {
        &self.tilt
    }

    pub fn volume(&self) -> f64 {
        self.geometry.volume()
    }

    /// beta e^2.
    pub fn coupling(&self) -> f64 {
        self.ensemble.coupling()
    }

    pub fn max_charge(&self) -> u32 {
        self.tilt.max_charge()
    }

    /// Detilted activity e^{-q c0} z of one species.
    pub fn detilted_activity(&self, sp: &Species) -> f64 {
        (-f64::from(sp.charge) * self.tilt.c0()).exp() * sp.activity
    }

    /// Self-energy weighted activity e^{q^2 coupling u0 / 2} z of one species.
    pub fn tilde_activity(&self, sp: &Species) -> f64 {
        let q = f64::from(sp.charge);
        (0.5 * self.coupling() * q * q * self.u0).exp() * sp.activity
    }

    /// The same gas with every activity scaled by e^{q c}. Grand canonical
    /// sums restricted to neutral configurations are invariant under this
    /// substitution.
    pub fn with_tilted_activities(&self, c: f64) -> Result<System> {
        let species = self
            .species
            .iter()
            .map(|sp| Species {
                charge: sp.charge,
                activity: (f64::from(sp.charge) * c).exp() * sp.activity,
            })
            .collect();
        System::build(species, self.geometry.clone(), self.ensemble, self.kernel)
    }
}
