//! Both oracles: the radial finite-volume solve and the grid search over splits.

use std::f64::consts::PI;

use vpl_core::branch::DomainSpec;
use vpl_core::oracle::{envelope_report, radial_report, GridMvpOptions, DEFAULT_RADIAL_NODES};
use vpl_core::transition::{default_energy_grid, default_selectors, entropy_envelope};

fn main() -> vpl_core::Result<()> {
    let radial = radial_report(&[-7.0 * PI, -4.0 * PI, 0.0, 8.0 * PI], 1.0, DEFAULT_RADIAL_NODES)?;
    println!("radial: energy rel err {:.2e}, metadata {:?}", radial.max_rel_err, radial.metadata);

    let d = DomainSpec::disks(&[1.0, 0.8])?;
    let energies = default_energy_grid(&d, 6, 10.0);
    let env = entropy_envelope(&d, &default_selectors(&d), &energies)?;
    let s: Vec<f64> = env.points.iter().map(|p| p.entropy.unwrap_or(f64::NAN)).collect();
    let rep = envelope_report(&d, &energies, &s, GridMvpOptions::default())?;
    println!("envelope vs grid: max |dS| = {:.2e}", rep.max_abs_err);
    Ok(())
}
