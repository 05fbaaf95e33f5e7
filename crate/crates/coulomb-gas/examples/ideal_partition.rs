//! The neutral ideal gas two ways, checked against the Bessel closed form.
//!
//! For a two-species +1/-1 gas the neutral ideal partition function is
//! Xi0 = I_0(2 z |Lambda|), and the charge-q suppression coefficient is
//! eta_q = I_q / I_0. The quadrature route (periodic trapezoid over the
//! angular representation) and the Laurent-series route (constant term of
//! exp of a Laurent polynomial) must agree for any charge content.

use coulomb_gas::{
    bessel_i, eta_hat, eta_hat_series, ideal_partition_quadrature, ideal_partition_series,
    Ensemble, Geometry, KernelConfig, Species, System, U0Convention,
};

fn main() -> coulomb_gas::Result<()> {
    let z = 0.7;
    let system = System::build(
        vec![Species { charge: 1, activity: z }, Species { charge: -1, activity: z }],
        Geometry::ContinuumTorus { dimension: 2, side: 1.5 },
        Ensemble { beta: 0.1, elementary_charge: 1.0 },
        KernelConfig { t: 0.05, u0: U0Convention::Zero },
    )?;
    let tilt = system.tilt();
    let mass = z * system.volume();

    let quad = ideal_partition_quadrature(tilt)?;
    let series = ideal_partition_series(tilt, 1e-14)?;
    let bessel = bessel_i(0, 2.0 * mass);
    println!("Xi0 quadrature   {:.17e}  ({} nodes)", quad.value, quad.work);
    println!("Xi0 series       {:.17e}  ({} terms)", series.value, series.work);
    println!("I_0(2 z |L|)     {bessel:.17e}");
    println!("route difference {:.3e}", (quad.value - series.value).abs());
    println!();

    println!("suppression coefficients, both routes:");
    let eta_q = eta_hat(tilt, 4)?;
    let eta_s = eta_hat_series(tilt, 4, 1e-14)?;
    for q in 0..=4 {
        let a = eta_q.get(q).unwrap();
        let b = eta_s.get(q).unwrap();
        let closed = bessel_i(q as u32, 2.0 * mass) / bessel_i(0, 2.0 * mass);
        println!("  eta_{q}: {a:.15}  series {b:.15}  I_{q}/I_0 {closed:.15}");
    }
    println!();

    // A three-charge gas has no Bessel shortcut; the two routes keep each
    // other honest.
    let mixed = System::build(
        vec![
            Species { charge: 1, activity: 0.5 },
            Species { charge: -1, activity: 0.5 },
            Species { charge: 3, activity: 0.02 },
            Species { charge: -3, activity: 0.02 },
        ],
        Geometry::ContinuumTorus { dimension: 2, side: 1.5 },
        Ensemble { beta: 0.1, elementary_charge: 1.0 },
        KernelConfig { t: 0.05, u0: U0Convention::Zero },
    )?;
    let quad = ideal_partition_quadrature(mixed.tilt())?;
    let series = ideal_partition_series(mixed.tilt(), 1e-14)?;
    println!("charges {{1,3}}: quadrature {:.17e}", quad.value);
    println!("charges {{1,3}}: series     {:.17e}", series.value);
    println!("route difference {:.3e}", (quad.value - series.value).abs());
    Ok(())
}
