//! The Gaussian lower bound Xi2, computed along two independent routes.
//!
//! log Xi2 = log Xi0 + u0 |L| / (2 xi^2) - (1/2) sum_{p != 0} log(1 + u_hat(p)/xi^2).
//!
//! On a lattice the momentum sum is a finite sum over the dual lattice,
//! and the same product of eigenvalues is a real-space determinant over
//! the mean-zero subspace of the site kernel. The two routes share no
//! code beyond the ideal factor, so their agreement is a strong check.

use coulomb_gas::{
    eta_hat, gaussian_bound, gaussian_bound_determinant, Ensemble, Geometry, KernelConfig,
    Species, System, U0Convention,
};

fn main() -> coulomb_gas::Result<()> {
    let system = System::build(
        vec![Species { charge: 1, activity: 0.4 }, Species { charge: -1, activity: 0.4 }],
        Geometry::LatticeTorus { dimension: 2, side: 1.0, spacing: 0.25 },
        Ensemble { beta: 0.3, elementary_charge: 1.0 },
        KernelConfig { t: 0.08, u0: U0Convention::Custom(0.05) },
    )?;
    let eta = eta_hat(system.tilt(), system.max_charge())?;

    let momentum = gaussian_bound(&system, &eta, 1e-12)?;
    let determinant = gaussian_bound_determinant(&system, &eta)?;

    println!("4x4 lattice torus, beta = 0.3, t = 0.08, u0 = 0.05");
    println!("Xi0                  {:.17e}", momentum.ideal.value);
    println!("correlation length   {:.17e}", momentum.correlation_length);
    println!("u0 term              {:.17e}", momentum.u0_term);
    println!();
    println!("momentum route:      Xi2 = {:.17e}  ({} modes)", momentum.xi2, momentum.work);
    println!("determinant route:   Xi2 = {:.17e}  ({} rows)", determinant.xi2, determinant.work);
    let rel = (momentum.xi2 - determinant.xi2).abs() / momentum.xi2;
    println!("relative difference  {rel:.3e}");
    println!(
        "momentum sums        {:.17e} vs {:.17e}",
        momentum.momentum_sum, determinant.momentum_sum
    );
    println!();

    // The bound is monotone in beta: a colder gas is pushed further below
    // its ideal value.
    println!("{:>6} {:>22} {:>22}", "beta", "Xi2", "Xi2 / Xi0");
    for &beta in &[0.05, 0.1, 0.2, 0.4, 0.8] {
        let system = System::build(
            vec![Species { charge: 1, activity: 0.4 }, Species { charge: -1, activity: 0.4 }],
            Geometry::LatticeTorus { dimension: 2, side: 1.0, spacing: 0.25 },
            Ensemble { beta, elementary_charge: 1.0 },
            KernelConfig { t: 0.08, u0: U0Convention::Zero },
        )?;
        let eta = eta_hat(system.tilt(), system.max_charge())?;
        let bound = gaussian_bound(&system, &eta, 1e-12)?;
        println!("{beta:>6.2} {:>22.15e} {:>22.15}", bound.xi2, bound.xi2 / bound.ideal.value);
    }
    Ok(())
}
