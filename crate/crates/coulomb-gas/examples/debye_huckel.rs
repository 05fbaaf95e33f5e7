//! The zero-cutoff (Debye-Huckel) limit of the Gaussian bound.
//!
//! As the ultraviolet cutoff t -> 0, the u0 term and the momentum sum in
//! log Xi2 both diverge, but their divergences cancel into the finite
//! regularized self-energy E0 = (1/2) lim [u0(t) - vol^{-1} sum e^{-t p^2}/p^2].
//! On a one-dimensional circle of unit circumference with u0 = 0,
//! E0 = -1/24 (the Basel sum in disguise).

use coulomb_gas::{
    debye_huckel_limit, eta_hat, gaussian_bound, regularized_energy, Ensemble, Geometry,
    KernelConfig, Species, System, U0Convention,
};

fn continuum(t: f64) -> coulomb_gas::Result<System> {
    System::build(
        vec![Species { charge: 1, activity: 0.6 }, Species { charge: -1, activity: 0.6 }],
        Geometry::ContinuumTorus { dimension: 1, side: 1.0 },
        Ensemble { beta: 0.3, elementary_charge: 1.0 },
        KernelConfig { t, u0: U0Convention::Zero },
    )
}

fn main() -> coulomb_gas::Result<()> {
    // E0 on the unit circle: exact dual sum on the lattice, Richardson
    // ladder on the continuum; both must hit -1/24.
    let lattice = Geometry::LatticeTorus { dimension: 1, side: 1.0, spacing: 0.125 };
    let e0 = regularized_energy(&lattice, U0Convention::Zero)?;
    println!("E0 lattice (exact)        {:.17e}", e0.value);
    let circle = Geometry::ContinuumTorus { dimension: 1, side: 1.0 };
    let e0 = regularized_energy(&circle, U0Convention::Zero)?;
    println!("E0 continuum (extrapolated) {:.17e} +- {:.3e}", e0.value, e0.error_estimate);
    println!("-1/24                      {:.17e}", -1.0 / 24.0);
    println!();

    // The limit object itself, against the bound at shrinking cutoffs.
    // The gap closes like sqrt(t) in d = 1.
    let limit_system = continuum(0.0)?;
    let eta = eta_hat(limit_system.tilt(), limit_system.max_charge())?;
    let dh = debye_huckel_limit(&limit_system, &eta, 1e-10)?;
    println!("Debye-Huckel limit: log Xi2 -> {:.17e}", dh.log_xi2);
    println!();
    println!("{:>10} {:>22} {:>14} {:>12}", "t", "log Xi2(t)", "gap", "gap ratio");
    let mut previous_gap = f64::NAN;
    for k in 1..=4 {
        let t = 10f64.powi(-k);
        let system = continuum(t)?;
        let eta = eta_hat(system.tilt(), system.max_charge())?;
        let bound = gaussian_bound(&system, &eta, 1e-10)?;
        let gap = bound.log_xi2 - dh.log_xi2;
        let ratio = previous_gap / gap;
        if previous_gap.is_nan() {
            println!("{t:>10.0e} {:>22.15e} {gap:>14.6e} {:>12}", bound.log_xi2, "");
        } else {
            println!("{t:>10.0e} {:>22.15e} {gap:>14.6e} {ratio:>12.4}", bound.log_xi2);
        }
        previous_gap = gap;
    }
    println!("a decade in t shrinks the gap by about sqrt(10) = 3.16");
    println!();

    // On a lattice the t = 0 kernel is already finite, and the limit
    // coincides with the bound itself.
    let system = System::build(
        vec![Species { charge: 1, activity: 0.6 }, Species { charge: -1, activity: 0.6 }],
        lattice,
        Ensemble { beta: 0.3, elementary_charge: 1.0 },
        KernelConfig { t: 0.0, u0: U0Convention::Zero },
    )?;
    let eta = eta_hat(system.tilt(), system.max_charge())?;
    let bound = gaussian_bound(&system, &eta, 1e-12)?;
    let dh = debye_huckel_limit(&system, &eta, 1e-12)?;
    println!("lattice at t = 0: log Xi2 {:.17e}", bound.log_xi2);
    println!("lattice limit:    log Xi2 {:.17e}", dh.log_xi2);
    println!("difference        {:.3e}", (bound.log_xi2 - dh.log_xi2).abs());
    Ok(())
}
