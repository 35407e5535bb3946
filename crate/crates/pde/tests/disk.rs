use std::f64::consts::PI;

use vpl_core::disk::{e_of_mu, EIGHT_PI};
use vpl_pde::continuation::{continue_branch, ContinuationOptions};
use vpl_pde::geometry::GeometrySpec;
use vpl_pde::mesh::rasterize;
use vpl_pde::solver::{disk_seed, solve_lambda, Problem, Tag};

fn unit_area_disk() -> GeometrySpec {
    GeometrySpec::disk([0.0, 0.0], 1.0 / PI.sqrt())
}

fn solve_at_mu(h: f64, mu: f64) -> vpl_pde::solver::PdeSolution {
    let mesh = rasterize(&unit_area_disk(), h).unwrap();
    let mut seed = vec![0.0; mesh.len()];
    disk_seed(&mesh, [0.0, 0.0], 1.0 / PI.sqrt(), mu, &mut seed);
    solve_lambda(&mesh, EIGHT_PI * mu * (1.0 - mu), Some(&seed)).unwrap()
}

#[test]
fn beta_at_mu_03_is_second_order() {
    let exact = -EIGHT_PI * 0.3;
    let errs: Vec<f64> = [1.0 / 32.0, 1.0 / 64.0]
        .iter()
        .map(|&h| {
            let s = solve_at_mu(h, 0.3);
            assert!(s.residual <= 1e-10);
            assert!(s.u.iter().all(|&u| u > 0.0));
            assert!(s.energy_mismatch() <= 10.0 * h * h, "{}", s.energy_mismatch());
            ((s.beta - exact) / exact).abs()
        })
        .collect();
    assert!(errs[1] < 20.0 / 4096.0, "{errs:?}");
    assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
}

// Coarser levels are noisy because the boundary cut pattern changes with h.
#[test]
fn energy_converges_at_second_order() {
    let e: Vec<f64> = [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0]
        .iter()
        .map(|&h| solve_at_mu(h, 0.3).energy)
        .collect();
    let order = ((e[0] - e[1]) / (e[1] - e[2])).abs().log2();
    assert!((1.7..=2.3).contains(&order), "order {order}, {e:?}");
    let exact = e_of_mu(0.3).unwrap();
    for w in e.windows(2) {
        let q = ((w[0] - exact) / (w[1] - exact)).log2();
        assert!((1.7..=2.3).contains(&q), "order vs exact {q}");
    }
}

#[test]
fn linear_regime_small_lambda() {
    let mesh = rasterize(&GeometrySpec::disk([0.0, 0.0], 1.0), 1.0 / 32.0).unwrap();
    let lambda = 1e-6;
    let s = solve_lambda(&mesh, lambda, None).unwrap();
    let worst = (0..mesh.len())
        .map(|k| {
            let [x, y] = mesh.position(k);
            (s.u[k] - lambda * (1.0 - x * x - y * y) / 4.0).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-3 * lambda, "{worst}");
}

#[test]
fn no_lower_solution_above_critical_lambda() {
    let mesh = rasterize(&unit_area_disk(), 1.0 / 32.0).unwrap();
    let mut seed = vec![0.0; mesh.len()];
    disk_seed(&mesh, [0.0, 0.0], 1.0 / PI.sqrt(), 0.45, &mut seed);
    assert!(solve_lambda(&mesh, 2.0 * PI * 1.02, Some(&seed)).is_err());
    assert!(solve_lambda(&mesh, 2.0 * PI * 0.98, Some(&seed)).is_ok());
}

#[test]
fn unit_area_fold_near_two_pi() {
    let mesh = rasterize(&unit_area_disk(), 1.0 / 32.0).unwrap();
    let p = Problem::new(&mesh).unwrap();
    let b = continue_branch(
        &p,
        &ContinuationOptions {
            lambda_start: 0.5,
            lambda_step: 0.5,
            ds_max: 0.5,
            max_points: 80,
            u_max: 4.0,
            ..Default::default()
        },
    );
    assert!(b.failure.is_none(), "{:?}", b.failure);
    let fold = b.fold_index.unwrap();
    assert!((b.lambda_max() / (2.0 * PI) - 1.0).abs() < 5e-3, "{}", b.lambda_max());
    assert!(b.solutions[..fold].iter().all(|s| s.tag == Tag::Lower));
    assert!(b.solutions[fold..].iter().all(|s| s.tag == Tag::Upper));
    // Past the fold the states sit on the μ > ½ side.
    let last = b.solutions.last().unwrap();
    assert!(-last.beta / EIGHT_PI > 0.5);
    assert!(b.solutions.windows(2).all(|w| w[1].energy > w[0].energy));
}
