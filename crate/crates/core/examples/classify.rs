//! First or second kind, decided by how far β falls along the 0-branch.

use vpl_core::branch::{default_mu_grid, DomainSpec};
use vpl_core::transition::{classify_kind, zero_branch_min_beta};

fn main() -> vpl_core::Result<()> {
    for areas in [vec![1.0, 0.6, 0.2], vec![1.0, 0.9, 0.5], vec![1.0, 1.0 - 3e-5, 1.0 - 3e-5]] {
        let d = DomainSpec::disks(&areas)?;
        let min_beta = zero_branch_min_beta(&d, &default_mu_grid())?;
        println!("{areas:?}: {:?}  (min β = {:.6}·8π)", classify_kind(&d)?, min_beta / vpl_core::disk::EIGHT_PI);
    }
    Ok(())
}
