//! Three disks joined by thin channels.
//!
//! Lower-branch states against the disconnected 0-branch for shrinking
//! widths, then with `crossing` the two equal-energy states near E*.
//!
//! ```text
//! cargo run --release -p vpl-pde --example dumbbell -- 128
//! cargo run --release -p vpl-pde --example dumbbell -- 128 crossing
//! ```

use vpl_core::branch::{default_mu_grid, BranchSelector, DomainSpec};
use vpl_core::transition::{build_segments, locate_transition, TransitionSource};
use vpl_pde::dumbbell::{entropy_crossing_study, lower_branch_study, CrossingOptions, DEFAULT_GAP_FRACTION};

const AREAS: [f64; 3] = [1.0, 1.0 - 3e-5, 1.0 - 3e-5];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let inv_h: f64 = args.next().map_or(Ok(128.0), |a| a.parse())?;
    let h = 1.0 / inv_h;

    let study = lower_branch_study(&AREAS, &[0.2, 0.1, 0.05, 0.0], &[0.1, 0.2, 0.3], DEFAULT_GAP_FRACTION, h)?;
    println!("{:>6} {:>4} {:>8} {:>10} {:>10} {:>10} {:>10}", "width", "mu", "nodes", "err beta", "err Z", "err E", "err S");
    for r in &study.rows {
        let [b, z, e, s] = r.error;
        println!("{:6.3} {:4.2} {:8} {b:10.3e} {z:10.3e} {e:10.3e} {s:10.3e}", r.width_fraction, r.mu, r.nodes);
    }
    println!("monotone in width: {}", study.monotone());

    if args.next().as_deref() == Some("crossing") {
        let domain = DomainSpec::disks(&AREAS)?;
        let segments = build_segments(&domain, &[BranchSelector::zero_branch()], &default_mu_grid())?;
        let search = locate_transition(TransitionSource::ZeroBranch(&segments))?;
        let e_star = search.reports.first().ok_or("no transition on the disjoint disks")?.e_star;
        println!("disjoint E* = {e_star:.10}");
        let c = entropy_crossing_study(&AREAS, 0.05, DEFAULT_GAP_FRACTION, h, &CrossingOptions::new(e_star))?;
        for x in &c.crossings {
            println!(
                "crossing at E = {:.10} ({:+.3}% from E*): beta {:.5} -> {:.5}, |dU| = {:.3}, S gap {:+.3e} / {:+.3e}",
                x.energy,
                100.0 * x.shift,
                x.below.state.beta,
                x.above.state.beta,
                x.u_distance,
                x.gap_below,
                x.gap_above
            );
        }
    }
    Ok(())
}
