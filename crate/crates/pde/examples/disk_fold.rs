//! Continue the unit-area disk through its fold at λ = 2π and print the
//! (λ, E) curve with the closed-form β along the way.

use std::f64::consts::PI;

use vpl_pde::continuation::{continue_branch, ContinuationOptions};
use vpl_pde::geometry::GeometrySpec;
use vpl_pde::mesh::rasterize;
use vpl_pde::solver::Problem;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = rasterize(&GeometrySpec::disk([0.0, 0.0], 1.0 / PI.sqrt()), 1.0 / 64.0)?;
    let problem = Problem::new(&mesh)?;
    let branch = continue_branch(
        &problem,
        &ContinuationOptions {
            lambda_start: 0.5,
            lambda_step: 0.5,
            u_max: 5.0,
            ..Default::default()
        },
    );
    println!("{} nodes, fold after point {:?}", mesh.len(), branch.fold_index);
    println!("{:>10} {:>12} {:>11} {:>8}", "lambda", "E", "beta", "tag");
    for s in &branch.solutions {
        println!("{:10.6} {:12.8} {:11.6} {:>8?}", s.lambda, s.energy, s.beta, s.tag);
    }
    println!("lambda_max = {:.6} (2π = {:.6})", branch.lambda_max(), 2.0 * PI);
    Ok(())
}
