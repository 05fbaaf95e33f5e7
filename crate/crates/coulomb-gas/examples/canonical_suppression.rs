//! How the Coulomb interaction suppresses the partition function.
//!
//! At beta = 0 the neutral gas is ideal: Xi = Xi0. Because the energy
//! form is nonnegative, switching the interaction on can only lose
//! weight, level by level: every fixed-particle-number term of Xi sits
//! below its ideal counterpart, and the total obeys Xi2 <= Xi <= Xi0
//! (for u0 = 0), with the deficit growing linearly in beta for small
//! coupling.

use coulomb_gas::{
    exact_partition, exact_partition_terms, ideal_partition_quadrature, Ensemble, Geometry,
    KernelConfig, Species, System, U0Convention,
};

fn build(beta: f64) -> coulomb_gas::Result<System> {
    System::build(
        vec![Species { charge: 1, activity: 0.5 }, Species { charge: -1, activity: 0.5 }],
        Geometry::LatticeTorus { dimension: 1, side: 1.0, spacing: 0.125 },
        Ensemble { beta, elementary_charge: 1.0 },
        KernelConfig { t: 0.0, u0: U0Convention::Zero },
    )
}

fn main() -> coulomb_gas::Result<()> {
    // Level by level at fixed coupling: interacting vs ideal weights.
    // The ideal level of a +1/-1 gas is (z |L|)^n (n/2 choose n)^{-1}...
    // simplest to read off at beta = 0.
    let system = build(0.25)?;
    let free = build(0.0)?;
    let terms = exact_partition_terms(&system, 1e-12, 100_000_000)?;
    let ideal_terms = exact_partition_terms(&free, 1e-12, 100_000_000)?;
    println!("per-level weights, eight-site ring, beta = 0.25:");
    println!("{:>3} {:>22} {:>22} {:>10}", "n", "interacting", "ideal", "ratio");
    for n in (0..terms.terms.len().min(9)).step_by(2) {
        let a = terms.terms[n];
        let b = ideal_terms.terms[n];
        let ratio = if b > 0.0 { a / b } else { 1.0 };
        println!("{n:>3} {a:>22.15e} {b:>22.15e} {ratio:>10.6}");
        assert!(a <= b * (1.0 + 1e-12));
    }
    println!();

    // The total across couplings: 1 - Xi/Xi0 grows linearly in beta.
    println!("{:>6} {:>22} {:>12} {:>14}", "beta", "Xi", "1 - Xi/Xi0", "deficit/beta");
    let xi0 = ideal_partition_quadrature(build(0.0)?.tilt())?.value;
    for &beta in &[0.025, 0.05, 0.1, 0.2, 0.4] {
        let xi = exact_partition(&build(beta)?, 1e-12, 100_000_000)?;
        let deficit = 1.0 - xi.value / xi0;
        println!("{beta:>6.3} {:>22.15e} {deficit:>12.3e} {:>14.8}", xi.value, deficit / beta);
    }
    println!();
    println!("the deficit per unit beta approaches a constant as beta -> 0:");
    println!("canonical suppression is a first-order effect of the interaction.");
    Ok(())
}
