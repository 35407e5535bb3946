use std::f64::consts::PI;

use vpl_core::branch::{branch_point, from_gamma, merged_branch_point, mu_pm, BranchSelector, DomainSpec, Root};
use vpl_core::deformed::{high_energy_mu, perturbed_z, plan_sequences, tau, zeta, DEFAULT_WINDOW};
use vpl_core::disk::{disk_energy_of_beta, e_of_mu, stream_profile, z_of_mu, EIGHT_PI};
use vpl_core::oracle::{disk_entropy_of_energy, grid_mvp, GridMvpOptions};
use vpl_core::transition::{classify_kind, Kind};

#[test]
fn disk_anchor_values() {
    assert!((e_of_mu(0.5).unwrap() - 0.0307403).abs() < 1e-7);
    assert!((disk_energy_of_beta(EIGHT_PI).unwrap() - 0.012211).abs() < 1e-5);
    assert_eq!(z_of_mu(0.5, 1.0).unwrap(), 2.0);
    let p = stream_profile(0.9, 1.0, &[0.0]).unwrap();
    assert!((p.samples[0].psi - 2.0 / (-EIGHT_PI * 0.9) * 0.1f64.ln()).abs() < 1e-15);
}

#[test]
fn three_disk_zero_branch_point() {
    let d = DomainSpec::disks(&[1.0, 0.6, 0.2]).unwrap();
    let p = branch_point(&d, &BranchSelector::zero_branch(), 0.3).unwrap();
    assert!((p.gamma - 0.21).abs() < 1e-15);
    let mus = p.component_mus();
    assert!((mus[1] - 0.5 * (1.0 - (1.0f64 - 0.504).sqrt())).abs() < 1e-15);
    assert!((mus[2] - 0.5 * (1.0 - (1.0f64 - 0.168).sqrt())).abs() < 1e-15);
    let sigma: f64 = mus.iter().sum();
    assert!((p.beta + EIGHT_PI * sigma).abs() < 1e-13);
    assert!((p.masses().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    // same point from γ
    let q = from_gamma(&d, 0.21, &[Root::Minus; 3]).unwrap();
    assert!((q.energy - p.energy).abs() < 1e-15);
    // and the grid oracle agrees on its entropy
    let g = grid_mvp(&d, p.energy, GridMvpOptions { points: 80, ..Default::default() }).unwrap();
    assert!((g.entropy - p.entropy).abs() < 1e-6, "{} vs {}", g.entropy, p.entropy);
}

#[test]
fn uniform_limits() {
    let d = DomainSpec::disks(&[1.0, 0.6, 0.2]).unwrap();
    assert!((d.uniform_entropy() - 1.8f64.ln()).abs() < 1e-15);
    let one = DomainSpec::disks(&[1.0]).unwrap();
    assert!((one.uniform_energy() - 1.0 / (16.0 * PI)).abs() < 1e-17);
    assert!(disk_entropy_of_energy(1.0 / (16.0 * PI), 1.0).unwrap().abs() < 1e-12);
}

#[test]
fn roots_and_classification() {
    assert!((mu_pm(0.25, 1.0, Root::Minus).unwrap() - 0.5).abs() < 1e-8);
    assert!(mu_pm(0.3, 1.0, Root::Plus).is_err());
    assert_eq!(classify_kind(&DomainSpec::disks(&[1.0, 0.6, 0.2]).unwrap()).unwrap(), Kind::First);
    assert_eq!(classify_kind(&DomainSpec::disks(&[1.0, 0.9, 0.5]).unwrap()).unwrap(), Kind::Second);
}

#[test]
fn merged_branches_meet_at_half() {
    for n in 2..=6 {
        for k in 0..=n / 2 {
            let p = merged_branch_point(n, k, 0.5).unwrap();
            assert!((p.beta + 4.0 * PI * n as f64).abs() < 1e-12 * n as f64 * 4.0 * PI, "n {n} k {k}");
        }
    }
    // N even, k = N/2: constant β
    for mu in [0.1, 0.3, 0.7, 0.95] {
        let p = merged_branch_point(4, 2, mu).unwrap();
        assert!((p.beta + 16.0 * PI).abs() < 1e-12 * 16.0 * PI);
    }
}

#[test]
fn deformation_examples() {
    assert_eq!(tau(0.0).unwrap(), 2.0);
    assert!((zeta(1.0).unwrap() + 18.0).abs() < 1e-13);
    let z = perturbed_z(0.3, 0.01, 1.0).unwrap();
    assert!((z - (1.0 + 0.01 * zeta(0.3).unwrap()) / 0.7).abs() < 1e-15);
    let r = high_energy_mu(0.01, 1.0, 0.01, Root::Plus).unwrap();
    assert!((r.mu - 0.99).abs() < 0.005);
    let plan = plan_sequences(2, 1e-3, DEFAULT_WINDOW).unwrap();
    assert_eq!(plan.gamma_crossings.len(), 1);
    assert_eq!(plan.comparator_winner(0.5 * DEFAULT_WINDOW.0), 1);
    assert_eq!(plan.comparator_winner(DEFAULT_WINDOW.1), 2);
}
