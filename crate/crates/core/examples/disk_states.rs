//! Single-disk states along μ and β, plus the closed-form profile at μ = 0.9.

use vpl_core::disk::{disk_state, disk_state_of_beta, stream_profile, EIGHT_PI};

fn main() -> vpl_core::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "mu", "beta", "E", "S", "Z");
    for mu in [1e-6, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
        let s = disk_state(mu, 1.0)?;
        println!("{mu:>6} {:>14.8} {:>14.10} {:>14.10} {:>14.8}", s.beta, s.energy, s.entropy, s.partition);
    }
    // positive temperatures are outside the μ range
    let hot = disk_state_of_beta(EIGHT_PI, 1.0)?;
    println!("beta = 8π: E = {:.10}, Z = {:.6}", hot.energy, hot.partition);

    let grid: Vec<f64> = (0..=5).map(|i| i as f64 / 5.0).collect();
    let p = stream_profile(0.9, 1.0, &grid)?;
    for s in &p.samples {
        println!("r = {:.1}  psi = {:.8}  rho = {:.8}", s.r, s.psi, s.rho);
    }
    Ok(())
}
