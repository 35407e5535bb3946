//! Two nearly equal satellites next to a unit disk: the 0-branch folds twice and
//! the entropy jumps between its outer pieces.

use vpl_core::branch::{default_mu_grid, BranchSelector, DomainSpec};
use vpl_core::transition::{build_segments, locate_transition, TransitionSource};

fn main() -> vpl_core::Result<()> {
    for delta in [3e-5, 1e-5] {
        let a = 1.0 - delta;
        let d = DomainSpec::disks(&[1.0, a, a])?;
        let segments = build_segments(&d, &[BranchSelector::zero_branch()], &default_mu_grid())?;
        let found = locate_transition(TransitionSource::ZeroBranch(&segments))?;
        for r in &found.reports {
            println!("delta {delta:e}: E* = {:.12}  beta- = {:.6}  beta+ = {:.6}", r.e_star, r.beta_minus, r.beta_plus);
            if let Some(g) = &r.diagnostics {
                println!("  E0 = {:.12}  Ebar_c = {:.12}", g.e0, g.e_bar_c);
                println!("  gap ratio = {:.4e}", r.entropy_gap_scale.unwrap_or(f64::NAN));
            }
        }
    }
    Ok(())
}
