use proptest::prelude::*;

use vpl_core::branch::{branch_point, BranchSelector, DomainSpec};
use vpl_core::deformed::{perturbed_e, perturbed_z, plan_sequences, zeta_plus_tau_near_one};
use vpl_core::disk::{disk_state, disk_state_of_beta, e_of_mu, z_of_mu, EIGHT_PI};
use vpl_core::oracle::{component_entropy, disk_state_of_energy, grid_mvp, GridMvpOptions};
use vpl_core::transition::{default_selectors, entropy_envelope};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disk_energy_increases_with_mu(a in 0.001f64..0.99, b in 0.001f64..0.99) {
        prop_assume!(a < b);
        prop_assert!(e_of_mu(a).unwrap() < e_of_mu(b).unwrap());
    }

    #[test]
    fn energy_inversion_round_trips(beta in -25.0f64..200.0, area in 0.1f64..5.0) {
        let st = disk_state_of_beta(beta, area).unwrap();
        let back = disk_state_of_energy(st.energy, area).unwrap();
        prop_assert!((back.beta - beta).abs() < 1e-8 * beta.abs().max(1.0));
        prop_assert!((back.entropy - st.entropy).abs() < 1e-9 * st.entropy.abs().max(1.0));
    }

    #[test]
    fn disk_entropy_slope_is_beta(mu in 0.05f64..0.95) {
        let h = 1e-6;
        let lo = disk_state(mu - h, 1.0).unwrap();
        let hi = disk_state(mu + h, 1.0).unwrap();
        let slope = (hi.entropy - lo.entropy) / (hi.energy - lo.energy);
        prop_assert!((slope + EIGHT_PI * mu).abs() < 1e-5 * EIGHT_PI);
    }

    #[test]
    fn zero_branch_bookkeeping(a2 in 0.05f64..1.0, a3 in 0.05f64..1.0, mu in 0.01f64..0.99) {
        let d = DomainSpec::disks(&[1.0, a2, a3]).unwrap();
        if let Ok(p) = branch_point(&d, &BranchSelector::zero_branch(), mu) {
            let m = p.masses();
            prop_assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let sigma: f64 = p.component_mus().iter().sum();
            prop_assert!((p.beta + EIGHT_PI * sigma).abs() < 1e-12 * EIGHT_PI);
            prop_assert!((p.lambda - EIGHT_PI * p.gamma).abs() < 1e-14);
            let e: f64 = p.component_energies().iter().sum();
            prop_assert!((e - p.energy).abs() < 1e-14 * p.energy);
            // the branch is a split of the microcanonical problem
            let areas = d.areas();
            let s: f64 = (0..3).map(|i| component_entropy(m[i], p.component_energies()[i], areas[i])).sum();
            prop_assert!((s - p.entropy).abs() < 1e-9 * p.entropy.abs().max(1.0));
        }
    }

    #[test]
    fn zero_branch_masses_follow_areas(a2 in 0.05f64..0.95, mu in 0.01f64..0.99) {
        let d = DomainSpec::disks(&[1.0, a2]).unwrap();
        let p = branch_point(&d, &BranchSelector::zero_branch(), mu).unwrap();
        let m = p.masses();
        prop_assert!(m[1] <= m[0]);
    }

    #[test]
    fn envelope_dominates_candidates(a2 in 0.1f64..0.95, f in 1.0f64..10.0) {
        let d = DomainSpec::disks(&[1.0, a2]).unwrap();
        let e = f * d.uniform_energy();
        let env = entropy_envelope(&d, &default_selectors(&d), &[e]).unwrap();
        let s = env.points[0].entropy.unwrap();
        prop_assert!(s <= d.uniform_entropy() + 1e-12);
    }

    #[test]
    fn unperturbed_deformation_is_exact(mu in 0.001f64..0.999, area in 0.1f64..3.0) {
        prop_assert_eq!(perturbed_e(mu, 0.0).unwrap(), e_of_mu(mu).unwrap());
        prop_assert_eq!(perturbed_z(mu, 0.0, area).unwrap(), z_of_mu(mu, area).unwrap());
    }

    #[test]
    fn plans_keep_their_order(n in 2usize..7, eta in 1e-4f64..1e-3) {
        let plan = plan_sequences(n, eta, (0.002, 0.008)).unwrap();
        prop_assert!(plan.gamma_crossings.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(plan.alpha.windows(2).all(|w| w[1] < w[0]));
        prop_assert!(plan.slopes().windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(plan.comparator_winner(0.001), 1);
        prop_assert_eq!(plan.comparator_winner(0.01), n);
    }
}

#[test]
fn zeta_plus_tau_has_slope_36() {
    for x in [1e-3, 5e-4, 1e-4, 1e-6] {
        assert!((zeta_plus_tau_near_one(x) / x / 36.0 - 1.0).abs() < 0.01);
    }
}

#[test]
fn grid_optimum_orders_masses_by_area() {
    let d = DomainSpec::disks(&[1.0, 0.6, 0.2]).unwrap();
    for f in [1.2, 2.0, 4.0] {
        let s = grid_mvp(&d, f * d.uniform_energy(), GridMvpOptions { points: 60, ..Default::default() }).unwrap();
        assert!(s.masses[0] >= s.masses[1] && s.masses[1] >= s.masses[2], "{:?}", s.masses);
        // β from a lattice energy degrades like 1/m² on light components.
        let betas = s.lagrange_betas(&d).unwrap();
        let spread = betas
            .iter()
            .zip(&s.masses)
            .filter(|(_, &m)| m >= 0.1)
            .fold(0.0f64, |acc, (b, _)| acc.max((b - betas[0]).abs()));
        assert!(spread < 1e-2 * betas[0].abs().max(1.0), "{betas:?}");
    }
}
