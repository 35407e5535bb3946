//! Second-order free-energy shift of the disk under z ↦ z + εz³.
//!
//! ```text
//! cargo run --release -p vpl-pde --example appendix_slope -- 256
//! ```

use std::f64::consts::PI;

use vpl_pde::appendix::{slope_check, DEFAULT_EPSILONS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inv_h: f64 = std::env::args().nth(1).map_or(Ok(128.0), |a| a.parse())?;
    for beta in [-4.0 * PI, -PI] {
        let c = slope_check(beta, DEFAULT_EPSILONS, 1.0 / inv_h)?;
        println!("beta = {beta:.6}  mu = {:.4}  nodes = {}", c.mu, c.reference.nodes);
        println!("  F0 = {:.10} (closed form {:.10})", c.reference.free_energy, c.exact_reference);
        for (d, q) in c.deformed.iter().zip(&c.quotients) {
            println!("  eps = {:.2}  F = {:.10}  (F - F0)/eps^2 = {q:.6}", d.epsilon, d.free_energy);
        }
        println!("  extrapolated {:.6}   -g/beta {:.6}   -g/(2 beta) {:.6}", c.extrapolated, -c.g / beta, -c.g / (2.0 * beta));
    }
    Ok(())
}
