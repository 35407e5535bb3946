use std::f64::consts::PI;

use vpl_pde::appendix::{deformed_free_energy_check, disk_free_energy, slope_check};

#[test]
fn deformed_energy_increases_free_energy_quadratically() {
    let beta = -4.0 * PI;
    let f0 = disk_free_energy(beta).unwrap();
    let d = deformed_free_energy_check(0.1, beta, 1.0 / 64.0).unwrap();
    assert!(d.free_energy > f0);
    assert!(d.residual <= 1e-10);
}

// Observed slope is −g/(2β); see README for the factor.
#[test]
fn slope_matches_half_g_over_beta() {
    for beta in [-4.0 * PI, -PI] {
        let c = slope_check(beta, [0.02, 0.04], 1.0 / 128.0).unwrap();
        let target = -c.g / (2.0 * beta);
        assert!(c.relative_error(target) < 0.01, "β = {beta}: {} vs {target}", c.extrapolated);
    }
}
