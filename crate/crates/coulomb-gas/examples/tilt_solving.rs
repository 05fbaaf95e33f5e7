//! Solve the activity tilt that makes a gas charge symmetric.
//!
//! Building a [`System`] detilts the activities: c0 is the unique root of
//! sum_q q e^{-q c} Lambda_q = 0, and the detilted masses
//! Lambda'_q = e^{-q c0} Lambda_q must balance between +q and -q, or the
//! gas has no neutral charge-symmetric description and is rejected.

use coulomb_gas::{
    check_charge_symmetry, Ensemble, Geometry, KernelConfig, Species, System, U0Convention,
};

fn main() -> coulomb_gas::Result<()> {
    // The same gas at a deliberate tilt: activities z_q = m_q e^{q c}
    // detilt back to the symmetric masses m_q for any c.
    let c: f64 = 0.8;
    let species = vec![
        Species { charge: 1, activity: 0.4 * c.exp() },
        Species { charge: -1, activity: 0.4 * (-c).exp() },
        Species { charge: 2, activity: 0.1 * (2.0 * c).exp() },
        Species { charge: -2, activity: 0.1 * (-2.0 * c).exp() },
    ];
    let geometry = Geometry::LatticeTorus { dimension: 1, side: 1.0, spacing: 0.125 };
    let system = System::build(
        species,
        geometry.clone(),
        Ensemble { beta: 0.2, elementary_charge: 1.0 },
        KernelConfig { t: 0.0, u0: U0Convention::Zero },
    )?;

    let tilt = system.tilt();
    println!("applied tilt   {c}");
    println!("recovered c0   {:.15}", tilt.c0());
    println!("detilted masses Lambda'_q (volume included):");
    for (q, m) in tilt.masses() {
        println!("  q = {q:+}: {m:.15}");
    }

    // Residual of the defining equation at the solved tilt.
    let residual: f64 = tilt.masses().iter().map(|(&q, &m)| f64::from(q) * m).sum();
    println!("sum_q q Lambda'_q = {residual:.3e}");

    let check = check_charge_symmetry(tilt);
    println!("charge symmetric: {} (residuals {:?})", check.pass, check.residuals);

    // A gas with doubly charged ions of one sign only cannot be balanced
    // by any tilt; System::build refuses it.
    let lopsided = System::build(
        vec![
            Species { charge: 1, activity: 0.4 },
            Species { charge: -1, activity: 0.4 },
            Species { charge: 2, activity: 0.1 },
        ],
        geometry,
        Ensemble { beta: 0.2, elementary_charge: 1.0 },
        KernelConfig { t: 0.0, u0: U0Convention::Zero },
    );
    match lopsided {
        Err(e) => println!("one-sided +2 species rejected: {e}"),
        Ok(_) => unreachable!("an unbalanced gas must not build"),
    }
    Ok(())
}
