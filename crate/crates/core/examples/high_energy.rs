use vpl_core::deformed::{locate_high_energy_transitions, plan_sequences, DEFAULT_WINDOW};

fn main() -> vpl_core::Result<()> {
    let plan = plan_sequences(3, 1e-3, DEFAULT_WINDOW)?;
    println!("alpha {:?}\nq {:?}\npredicted gamma* {:?}", plan.alpha, plan.q, plan.gamma_crossings);
    let scan = locate_high_energy_transitions(&plan.domain()?, &plan, None)?;
    println!("winners by increasing E: {:?}", scan.winners);
    for c in &scan.crossings {
        println!(
            "B{} -> B{}  E* = {:.10}  gamma = {:.6}  beta jump = {:.3e}",
            c.below,
            c.above,
            c.e_star,
            c.gamma(),
            c.beta_plus - c.beta_minus
        );
    }
    Ok(())
}
