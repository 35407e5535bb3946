//! Samples the 0-branch and one k-branch of a three-disk domain.

use vpl_core::branch::{sample_branch, uniform_mu_grid, BranchSelector, DomainSpec};

fn main() -> vpl_core::Result<()> {
    let domain = DomainSpec::disks(&[1.0, 0.6, 0.2])?;
    let grid = uniform_mu_grid(11, 0.05, 0.95);

    for selector in [BranchSelector::zero_branch(), BranchSelector::k_branch([3])] {
        let curve = sample_branch(&domain, &selector, &grid)?;
        println!("{selector}: {} points, {} dropped", curve.points.len(), curve.dropped.len());
        for p in &curve.points {
            println!("  mu {:.3}  beta/π {:>9.5}  E {:.8}  S {:.8}  M {:?}", p.mu, p.beta / std::f64::consts::PI, p.energy, p.entropy, p.masses());
        }
    }
    Ok(())
}
