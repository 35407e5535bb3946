//! Three identical disks: the 0-merged and 1-merged branches cross in entropy.

use vpl_core::branch::{default_mu_grid, merged_branch_point, DomainSpec};
use vpl_core::transition::{
    build_segments, default_energy_grid, default_selectors, envelope_from_segments, locate_transition, TransitionSource,
};

fn main() -> vpl_core::Result<()> {
    let n = 3;
    for k in 0..=n / 2 {
        let p = merged_branch_point(n, k, 0.5)?;
        println!("{k}-merged at mu = 1/2: beta/π = {:.12}", p.beta / std::f64::consts::PI);
    }
    let d = DomainSpec::disks(&[1.0; 3])?;
    let selectors = default_selectors(&d);
    let segments = build_segments(&d, &selectors, &default_mu_grid())?;
    let energies = default_energy_grid(&d, 800, 2.0);
    let env = envelope_from_segments(selectors, &segments, &energies)?;
    let found = locate_transition(TransitionSource::Envelope { envelope: &env, segments: &segments })?;
    for r in &found.reports {
        println!(
            "{} -> {} at E* = {:.12}: beta {:.5} -> {:.5}",
            r.left_selector, r.right_selector, r.e_star, r.beta_minus, r.beta_plus
        );
    }
    Ok(())
}
