use vpl_core::branch::DomainSpec;
use vpl_core::transition::{default_energy_grid, default_selectors, entropy_envelope};

fn main() -> vpl_core::Result<()> {
    let d = DomainSpec::disks(&[1.0, 0.8])?;
    let energies = default_energy_grid(&d, 12, 20.0);
    let env = entropy_envelope(&d, &default_selectors(&d), &energies)?;
    println!("E_m = {:.10}, ln|Λ| = {:.10}", d.uniform_energy(), d.uniform_entropy());
    for p in &env.points {
        println!("E {:.8}  S {:.10}  beta {:?}", p.energy, p.entropy.unwrap_or(f64::NAN), p.beta());
    }
    Ok(())
}
