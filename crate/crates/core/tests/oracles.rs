use std::f64::consts::PI;

use vpl_core::branch::DomainSpec;
use vpl_core::disk::{disk_energy_of_beta, stream_profile_of_beta};
use vpl_core::oracle::{envelope_report, radial_mfe_solve, radial_report, GridMvpOptions};
use vpl_core::transition::{default_energy_grid, default_selectors, entropy_envelope};

#[test]
fn radial_profiles_match_closed_form() {
    let betas: Vec<f64> = [-7.0, -4.0, -1.0, 0.0, 1.0, 8.0].iter().map(|b| b * PI).collect();
    let rep = radial_report(&betas, 1.0, 10_000).unwrap();
    assert!(rep.metadata["sup_psi_err"] <= 1e-8, "{:?}", rep.metadata);
    assert!(rep.max_rel_err <= 1e-8);
}

#[test]
fn radial_solve_at_other_areas() {
    let sol = radial_mfe_solve(-2.0 * PI, 3.0, 2000).unwrap();
    assert!((sol.energy / disk_energy_of_beta(-2.0 * PI).unwrap() - 1.0).abs() < 1e-8);
    let radii: Vec<f64> = sol.profile.samples.iter().map(|s| s.r).collect();
    let exact = stream_profile_of_beta(-2.0 * PI, sol.profile.radius, &radii).unwrap();
    assert!((exact.samples[0].psi - sol.profile.samples[0].psi).abs() < 1e-9);
    assert!((sol.partition - 3.0 / 0.75).abs() < 1e-8);
    assert!(radial_mfe_solve(-8.0 * PI, 1.0, 100).is_err());
}

#[test]
fn grid_search_reproduces_two_disk_envelope() {
    let d = DomainSpec::disks(&[1.0, 0.8]).unwrap();
    let energies = default_energy_grid(&d, 6, 20.0);
    let env = entropy_envelope(&d, &default_selectors(&d), &energies).unwrap();
    let s: Vec<f64> = env.points.iter().map(|p| p.entropy.unwrap()).collect();
    let rep = envelope_report(&d, &energies, &s, GridMvpOptions::default()).unwrap();
    assert!(rep.max_abs_err <= 1e-3, "{rep:?}");
}
