//! Disks deformed by the conformal map `z ↦ z + εz³` (rescaled to area `a`,
//! with `η = ε²`), kept to first order in `η`, and the high-energy transitions
//! they produce.
//!
//! First-order model:
//!
//! * `e_η(μ) = (1/8π)((−μ − ln(1−μ))/μ² − ητ(μ))`, `τ = 2/(1−2μ/3)²`
//! * `z_η(μ) = a/(1−μ)·(1 + ηζ(μ))`, `ζ = 6(1−2μ+2μ²/3)/(1−2μ/3)²`
//!
//! The branch `ℬᵢ` puts component `i` on the large root of
//! `μ(1−μ) = γa(1+ηζ(μ))` and every other component on the small root.

use serde::Serialize;

use crate::branch::{BranchPoint, Component, ComponentInput, DomainSpec, Root};
use crate::disk::{e_of_mu, q_of_mu, z_of_mu, EIGHT_PI};
use crate::error::{Error, Result};
use crate::numeric::{brent, RootOptions};

/// Validity guard on the deformation.
pub const ETA_MAX: f64 = 0.05;
/// Largest `γ` accepted by the high-energy construction.
pub const GAMMA_MAX: f64 = 0.05;
/// Coefficient of `qᵢ` in the reduced comparator `η(αᵢ + 2γ(κqᵢ − αᵢ))`,
/// obtained by expanding `e_η` and `z_η` at `μ⁺ = 1 − γa(1 − 3η)`.
pub const COMPARATOR_Q_COEFF: f64 = 6.0;
/// Default `γ` window for [`plan_sequences`].
pub const DEFAULT_WINDOW: (f64, f64) = (0.002, 0.008);
/// Largest deformation `max ηᵢ` allowed by the plan, relative to the low end
/// of the window, so that second-order terms stay below the `γ` effects.
pub const PLAN_ETA_FRACTION: f64 = 1e-3;

fn check_closed_unit(mu: f64) -> Result<()> {
    if (0.0..=1.0).contains(&mu) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "mu",
            value: mu,
            range: "[0, 1]",
        })
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=ETA_MAX).contains(&eta) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "eta",
            value: eta,
            range: "[0, 0.05]",
        })
    }
}

pub fn tau(mu: f64) -> Result<f64> {
    check_closed_unit(mu)?;
    Ok(tau_raw(mu))
}

pub fn zeta(mu: f64) -> Result<f64> {
    check_closed_unit(mu)?;
    Ok(zeta_raw(mu))
}

/// Free-energy correction `g = 6(1−μ)/(1−2μ/3)`, with `τ = −g'` and `ζ = g + μg'`.
pub fn g_correction(mu: f64) -> Result<f64> {
    check_closed_unit(mu)?;
    Ok(6.0 * (1.0 - mu) / (1.0 - 2.0 * mu / 3.0))
}

fn tau_raw(mu: f64) -> f64 {
    let d = 1.0 - 2.0 * mu / 3.0;
    2.0 / (d * d)
}

fn zeta_raw(mu: f64) -> f64 {
    let d = 1.0 - 2.0 * mu / 3.0;
    6.0 * (1.0 - 2.0 * mu + 2.0 * mu * mu / 3.0) / (d * d)
}

/// `ζ(1−x) + τ(1−x)` written without cancellation: `4x(1+x)/(1/3 + 2x/3)²`.
pub fn zeta_plus_tau_near_one(x: f64) -> f64 {
    let d = (1.0 + 2.0 * x) / 3.0;
    4.0 * x * (1.0 + x) / (d * d)
}

pub fn perturbed_e(mu: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    perturbed_e_unchecked(mu, eta)
}

/// As [`perturbed_e`] without the `η ≤ 0.05` guard.
pub fn perturbed_e_unchecked(mu: f64, eta: f64) -> Result<f64> {
    let e = e_of_mu(mu)?;
    if eta == 0.0 {
        return Ok(e);
    }
    Ok(e - eta * tau_raw(mu) / EIGHT_PI)
}

pub fn perturbed_z(mu: f64, eta: f64, area: f64) -> Result<f64> {
    check_eta(eta)?;
    perturbed_z_unchecked(mu, eta, area)
}

pub fn perturbed_z_unchecked(mu: f64, eta: f64, area: f64) -> Result<f64> {
    let z = z_of_mu(mu, area)?;
    if eta == 0.0 {
        return Ok(z);
    }
    Ok(z * (1.0 + eta * zeta_raw(mu)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeformedDiskSpec {
    pub area: f64,
    pub eta: f64,
}

impl DeformedDiskSpec {
    pub fn new(area: f64, eta: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::Domain {
                name: "area",
                value: area,
                range: "(0, ∞)",
            });
        }
        check_eta(eta)?;
        Ok(Self { area, eta })
    }

    /// Conformal amplitude `ε = √η`.
    pub fn epsilon(&self) -> f64 {
        self.eta.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighEnergyRoot {
    pub mu: f64,
    pub one_minus_mu: f64,
    /// `γa(1+6η)` for the small root, `1 − γa(1−18η)` for the large one
    /// (`ζ(0) = 6`, `ζ(1) = −18`).
    pub asymptotic: f64,
}

/// Root of `μ(1−μ) = γa(1 + ηζ(μ))` on the chosen side of `½`.
pub fn high_energy_mu(gamma: f64, area: f64, eta: f64, sign: Root) -> Result<HighEnergyRoot> {
    check_eta(eta)?;
    if !(gamma > 0.0 && gamma <= 0.25) {
        return Err(Error::Domain {
            name: "gamma",
            value: gamma,
            range: "(0, 1/4]",
        });
    }
    let ag = gamma * area;
    // x is the distance of the root from its end of (0,1)
    let mu_of = |x: f64| match sign {
        Root::Minus => x,
        Root::Plus => 1.0 - x,
    };
    let f = |x: f64| Ok(x * (1.0 - x) - ag * (1.0 + eta * zeta_raw(mu_of(x))));
    let f0 = f(0.0)?;
    let fh = f(0.5)?;
    if !(f0 < 0.0 && fh >= 0.0) {
        return Err(Error::NoRealRoot {
            component: 0,
            product: 4.0 * ag * (1.0 + eta * zeta_raw(0.5)),
        });
    }
    let x = brent(f, 0.0, 0.5, f0, fh, RootOptions::default())?;
    let (mu, one_minus_mu, asymptotic) = match sign {
        Root::Minus => (x, 1.0 - x, ag * (1.0 + 6.0 * eta)),
        Root::Plus => (1.0 - x, x, 1.0 - ag * (1.0 - 18.0 * eta)),
    };
    Ok(HighEnergyRoot {
        mu,
        one_minus_mu,
        asymptotic,
    })
}

/// Point of `ℬᵢ` (1-based `plus`) at parameter `γ` on a domain of deformed disks.
pub fn high_energy_branch_point(domain: &DomainSpec, plus: usize, gamma: f64) -> Result<BranchPoint> {
    if plus < 1 || plus > domain.len() {
        return Err(Error::InvalidSelector(format!("branch index {plus} outside 1..={}", domain.len())));
    }
    let mut comps = Vec::with_capacity(domain.len());
    for (j, c) in domain.components().iter().enumerate() {
        let (area, eta) = (c.area(), c.eta());
        let sign = if j + 1 == plus { Root::Plus } else { Root::Minus };
        let r = high_energy_mu(gamma, area, eta, sign).map_err(|e| match e {
            Error::NoRealRoot { product, .. } => Error::NoRealRoot {
                component: j + 1,
                product,
            },
            other => other,
        })?;
        let mu = r.mu;
        let q = q_of_mu(mu, r.one_minus_mu) - eta * mu * mu * tau_raw(mu) / EIGHT_PI;
        let partition = area * (1.0 + eta * zeta_raw(mu)) / r.one_minus_mu;
        comps.push(ComponentInput {
            mu,
            one_minus_mu: r.one_minus_mu,
            q,
            partition,
        });
    }
    Ok(BranchPoint::assemble(comps[0].mu, gamma, &comps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighEnergyPlan {
    pub n: usize,
    pub eta: f64,
    pub window: (f64, f64),
    /// Common factor applied to the unit sequences `αᵢ = −(i−1)` and `qᵢ`.
    pub alpha_scale: f64,
    pub alpha: Vec<f64>,
    pub q: Vec<f64>,
    /// Predicted crossings in the order met as `γ` decreases.
    pub gamma_crossings: Vec<f64>,
    /// Energies of the predicted crossings on the exact branches.
    pub e_crossings: Vec<f64>,
}

impl HighEnergyPlan {
    pub fn areas(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| 1.0 + a * self.eta).collect()
    }

    pub fn etas(&self) -> Vec<f64> {
        self.q.iter().map(|q| q * self.eta).collect()
    }

    pub fn domain(&self) -> Result<DomainSpec> {
        DomainSpec::new(
            self.areas()
                .into_iter()
                .zip(self.etas())
                .map(|(area, eta)| Component::DeformedDisk { area, eta })
                .collect(),
        )
    }

    /// `cᵢ = κqᵢ − αᵢ`.
    pub fn slopes(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.q)
            .map(|(a, q)| COMPARATOR_Q_COEFF * q - a)
            .collect()
    }

    /// Comparator winner (1-based) at `γ`; ties go to the smaller index.
    pub fn comparator_winner(&self, gamma: f64) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for i in 0..self.n {
            let v = comparator(self.eta, self.alpha[i], self.q[i], gamma);
            if v > best_v {
                best = i;
                best_v = v;
            }
        }
        best + 1
    }
}

fn comparator(eta: f64, alpha: f64, q: f64, gamma: f64) -> f64 {
    eta * (alpha + 2.0 * gamma * (COMPARATOR_Q_COEFF * q - alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HighEnergyEntropy {
    /// `ln aᵢ − 2γaᵢ(1 − 6ηᵢ)`, the only `i`-dependent part of the asymptotic
    /// entropy `Sᵢ = −8πE + 1 + γΣⱼaⱼ(1+6ηⱼ) + ln aᵢ − 2γaᵢ(1−6ηᵢ)`.
    pub offset: f64,
    /// Reduced comparator `η(αᵢ + 2γ(κqᵢ − αᵢ))`.
    pub comparator: f64,
}

/// Asymptotic entropy of `ℬᵢ` (1-based) relative to the shared reference.
pub fn high_energy_entropy(i: usize, gamma: f64, plan: &HighEnergyPlan) -> Result<HighEnergyEntropy> {
    if i < 1 || i > plan.n {
        return Err(Error::InvalidSelector(format!("branch index {i} outside 1..={}", plan.n)));
    }
    if !(gamma > 0.0 && gamma <= GAMMA_MAX) {
        return Err(Error::Domain {
            name: "gamma",
            value: gamma,
            range: "(0, 0.05]",
        });
    }
    let a = 1.0 + plan.alpha[i - 1] * plan.eta;
    let eta_i = plan.q[i - 1] * plan.eta;
    Ok(HighEnergyEntropy {
        offset: a.ln() - 2.0 * gamma * a * (1.0 - 6.0 * eta_i),
        comparator: comparator(plan.eta, plan.alpha[i - 1], plan.q[i - 1], gamma),
    })
}

/// Spaced crossings `γ*ₖ = lo + (hi−lo)k/N` with `αᵢ = −s(i−1)` and `cᵢ` built
/// so that adjacent comparators meet exactly there.
pub fn plan_sequences(n: usize, eta: f64, window: (f64, f64)) -> Result<HighEnergyPlan> {
    if n == 0 {
        return Err(Error::Infeasible("N must be at least 1".into()));
    }
    if !(eta > 0.0 && eta <= ETA_MAX) {
        return Err(Error::Infeasible(format!("eta = {eta} outside (0, {ETA_MAX}]")));
    }
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Infeasible(format!("window ({lo}, {hi}) is not an interval in (0, ∞)")));
    }
    if hi > GAMMA_MAX {
        return Err(Error::Infeasible(format!("window top {hi} exceeds γ_max = {GAMMA_MAX}")));
    }
    if n == 1 {
        return Ok(HighEnergyPlan {
            n,
            eta,
            window,
            alpha_scale: 1.0,
            alpha: vec![0.0],
            q: vec![0.0],
            gamma_crossings: Vec::new(),
            e_crossings: Vec::new(),
        });
    }
    let targets: Vec<f64> = (1..n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    let unit_alpha: Vec<f64> = (0..n).map(|i| -(i as f64)).collect();
    let mut unit_c = vec![0.0];
    for k in 0..n - 1 {
        let prev = unit_c[k];
        unit_c.push(prev + (unit_alpha[k] - unit_alpha[k + 1]) / (2.0 * targets[k]));
    }
    let unit_q: Vec<f64> = unit_c
        .iter()
        .zip(&unit_alpha)
        .map(|(c, a)| (c + a) / COMPARATOR_Q_COEFF)
        .collect();
    let q_max = unit_q.iter().copied().fold(0.0, f64::max);
    let scale = (PLAN_ETA_FRACTION * lo / (q_max * eta)).min(1.0);
    let mut plan = HighEnergyPlan {
        n,
        eta,
        window,
        alpha_scale: scale,
        alpha: unit_alpha.iter().map(|a| a * scale).collect(),
        q: unit_q.iter().map(|q| q * scale).collect(),
        gamma_crossings: targets.iter().rev().copied().collect(),
        e_crossings: Vec::new(),
    };
    if plan.q.iter().any(|&q| q < 0.0) {
        return Err(Error::Infeasible("negative deformation in the plan".into()));
    }
    validate_plan_order(&plan)?;
    let domain = plan.domain()?;
    plan.e_crossings = targets
        .iter()
        .rev()
        .enumerate()
        .map(|(k, &g)| high_energy_branch_point(&domain, n - k, g).map(|p| p.energy))
        .collect::<Result<_>>()?;
    Ok(plan)
}

/// Comparator winners must run `N, N−1, …, 1` as `γ` decreases over a grid
/// that brackets the window.
fn validate_plan_order(plan: &HighEnergyPlan) -> Result<()> {
    let (lo, hi) = plan.window;
    let points = 20_001;
    let top = (1.5 * hi).min(GAMMA_MAX);
    let bottom = 0.5 * lo;
    let mut seen = Vec::new();
    for k in 0..points {
        let g = top - (top - bottom) * k as f64 / (points - 1) as f64;
        let w = plan.comparator_winner(g);
        if seen.last() != Some(&w) {
            seen.push(w);
        }
    }
    let expected: Vec<usize> = (1..=plan.n).rev().collect();
    if seen != expected {
        return Err(Error::Infeasible(format!(
            "comparator winners {seen:?} instead of {expected:?}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighEnergyCrossing {
    pub e_star: f64,
    /// 1-based branch indices below and above `E*`.
    pub below: usize,
    pub above: usize,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub gamma_below: f64,
    pub gamma_above: f64,
    pub entropy: f64,
}

impl HighEnergyCrossing {
    pub fn gamma(&self) -> f64 {
        0.5 * (self.gamma_below + self.gamma_above)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HighEnergyScan {
    pub e_range: (f64, f64),
    pub crossings: Vec<HighEnergyCrossing>,
    /// Winners (1-based) in order of increasing energy.
    pub winners: Vec<usize>,
    /// Set when some predicted crossing energy lies outside `e_range`.
    pub partial: bool,
}

/// `ℬᵢ` at a given energy: `(entropy, β, γ)`.
fn branch_at_energy(domain: &DomainSpec, i: usize, energy: f64, g_lo: f64, g_hi: f64) -> Result<(f64, f64, f64)> {
    let e_of = |lg: f64| high_energy_branch_point(domain, i, lg.exp()).map(|p| p.energy - energy);
    let (a, b) = (g_lo.ln(), g_hi.ln());
    let fa = e_of(a)?;
    let fb = e_of(b)?;
    let opts = RootOptions {
        xtol: 1e-15,
        ftol: 0.0,
        max_iter: 300,
    };
    let lg = brent(e_of, a, b, fa, fb, opts)?;
    let p = high_energy_branch_point(domain, i, lg.exp())?;
    Ok((p.entropy, p.beta, p.gamma))
}

/// Scans the exact first-order branch entropies over an energy range and
/// returns every change of the winning branch.
pub fn locate_high_energy_transitions(domain: &DomainSpec, plan: &HighEnergyPlan, e_range: Option<(f64, f64)>) -> Result<HighEnergyScan> {
    let n = domain.len();
    if n != plan.n {
        return Err(Error::InvalidDomain(format!("domain has {n} components, plan {}", plan.n)));
    }
    let (lo, hi) = plan.window;
    let g_hi = (3.0 * hi).min(0.2);
    let g_lo = lo / 3.0;
    let e_top = high_energy_branch_point(domain, 1, g_lo)?.energy;
    let e_bottom = high_energy_branch_point(domain, 1, g_hi)?.energy;
    let (e_min, e_max) = e_range.unwrap_or((e_bottom, e_top));
    // search bracket in γ wide enough for every branch at these energies
    let (s_lo, s_hi) = (g_lo / 4.0, (4.0 * g_hi).min(0.24));
    const POINTS: usize = 400;
    let energies: Vec<f64> = (0..POINTS)
        .map(|k| e_min + (e_max - e_min) * k as f64 / (POINTS - 1) as f64)
        .collect();
    use rayon::prelude::*;
    let rows = energies
        .par_iter()
        .map(|&e| -> Result<Vec<f64>> {
            (1..=n).map(|i| branch_at_energy(domain, i, e, s_lo, s_hi).map(|r| r.0)).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let argmax = |row: &[f64]| {
        let mut best = 0;
        for (i, v) in row.iter().enumerate() {
            if *v > row[best] {
                best = i;
            }
        }
        best + 1
    };
    let mut winners = Vec::new();
    let mut crossings = Vec::new();
    let mut prev: Option<(usize, f64)> = None;
    for (row, &e) in rows.iter().zip(&energies) {
        let w = argmax(row);
        if winners.last() != Some(&w) {
            winners.push(w);
        }
        if let Some((pw, pe)) = prev {
            if pw != w {
                let diff = |x: f64| -> Result<f64> {
                    Ok(branch_at_energy(domain, pw, x, s_lo, s_hi)?.0 - branch_at_energy(domain, w, x, s_lo, s_hi)?.0)
                };
                let (l, h) = crate::numeric::bisect_sign(diff, pe, e, 200, |l, h| h - l <= 1e-13 * h)?;
                let e_star = 0.5 * (l + h);
                let (sb, bb, gb) = branch_at_energy(domain, pw, e_star, s_lo, s_hi)?;
                let (sa, ba, ga) = branch_at_energy(domain, w, e_star, s_lo, s_hi)?;
                crossings.push(HighEnergyCrossing {
                    e_star,
                    below: pw,
                    above: w,
                    beta_minus: bb,
                    beta_plus: ba,
                    gamma_below: gb,
                    gamma_above: ga,
                    entropy: 0.5 * (sa + sb),
                });
            }
        }
        prev = Some((w, e));
    }
    let partial = plan.e_crossings.iter().any(|&e| e < e_min || e > e_max);
    Ok(HighEnergyScan {
        e_range: (e_min, e_max),
        crossings,
        winners,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::mu_pm;

    #[test]
    fn closed_form_values() {
        assert_eq!(tau(0.0).unwrap(), 2.0);
        assert_eq!(zeta(0.0).unwrap(), 6.0);
        assert!((zeta(1.0).unwrap() + 18.0).abs() < 1e-12);
        assert!((tau(0.5).unwrap() - 4.5).abs() < 1e-14);
        assert!((g_correction(0.5).unwrap() - 4.5).abs() < 1e-14);
        assert!(tau(1.5).is_err());
    }

    #[test]
    fn unperturbed_limit_is_exact() {
        for &mu in &[0.01, 0.3, 0.9] {
            assert_eq!(perturbed_e(mu, 0.0).unwrap(), e_of_mu(mu).unwrap());
            assert_eq!(perturbed_z(mu, 0.0, 2.0).unwrap(), z_of_mu(mu, 2.0).unwrap());
        }
        let z = perturbed_z(0.3, 0.01, 1.0).unwrap();
        assert!((z - (1.0 / 0.7) * (1.0 + 0.01 * zeta(0.3).unwrap())).abs() < 1e-15);
        assert!(perturbed_e(0.3, 0.06).is_err());
    }

    #[test]
    fn derivative_structure_of_g() {
        for &mu in &[0.1, 0.4, 0.8] {
            let h = 1e-6;
            let dg = (g_correction(mu + h).unwrap() - g_correction(mu - h).unwrap()) / (2.0 * h);
            assert!((tau(mu).unwrap() + dg).abs() < 1e-8);
            assert!((zeta(mu).unwrap() - g_correction(mu).unwrap() - mu * dg).abs() < 1e-8);
        }
    }

    #[test]
    fn zeta_plus_tau_slope_near_one() {
        for &x in &[1e-3, 1e-4, 1e-6] {
            let direct = zeta(1.0 - x).unwrap() + tau(1.0 - x).unwrap();
            assert!((zeta_plus_tau_near_one(x) - direct).abs() < 1e-9);
            assert!((zeta_plus_tau_near_one(x) / x / 36.0 - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn high_energy_roots() {
        for &sign in &[Root::Minus, Root::Plus] {
            let r = high_energy_mu(0.1, 0.5, 0.0, sign).unwrap();
            assert!((r.mu - mu_pm(0.1, 0.5, sign).unwrap()).abs() < 1e-14);
        }
        let r = high_energy_mu(1e-5, 1.0, 0.01, Root::Minus).unwrap();
        assert!((r.mu / r.asymptotic - 1.0).abs() < 1e-4);
        let r = high_energy_mu(0.01, 1.0, 0.01, Root::Plus).unwrap();
        let lhs = r.mu * r.one_minus_mu;
        assert!((lhs - 0.01 * (1.0 + 0.01 * zeta(r.mu).unwrap())).abs() < 1e-16);
        assert!((r.mu - 0.99).abs() < 2e-3);
        assert!((r.one_minus_mu / (1.0 - r.asymptotic) - 1.0).abs() < 0.02);
        assert!(high_energy_mu(0.3, 1.0, 0.0, Root::Plus).is_err());
    }

    #[test]
    fn symmetric_plan_has_no_preference() {
        let plan = HighEnergyPlan {
            n: 3,
            eta: 1e-3,
            window: DEFAULT_WINDOW,
            alpha_scale: 1.0,
            alpha: vec![-0.5; 3],
            q: vec![0.2; 3],
            gamma_crossings: vec![],
            e_crossings: vec![],
        };
        let v: Vec<f64> = (1..=3).map(|i| high_energy_entropy(i, 0.01, &plan).unwrap().comparator).collect();
        assert!(v.iter().all(|&x| x == v[0]));
    }

    #[test]
    fn two_branch_comparator_crossing() {
        // α = (0, −1), q = (0, 1): c = (0, 7), crossing at 1/14
        let plan = HighEnergyPlan {
            n: 2,
            eta: 1e-3,
            window: (0.01, 0.05),
            alpha_scale: 1.0,
            alpha: vec![0.0, -1.0],
            q: vec![0.0, 1.0],
            gamma_crossings: vec![],
            e_crossings: vec![],
        };
        let c = plan.slopes();
        let g = (plan.alpha[0] - plan.alpha[1]) / (2.0 * (c[1] - c[0]));
        assert!((g - 1.0 / 14.0).abs() < 1e-15);
        assert_eq!(plan.comparator_winner(1e-4), 1);
        assert_eq!(plan.comparator_winner(0.2), 2);
    }

    #[test]
    fn plans() {
        let p = plan_sequences(1, 1e-3, DEFAULT_WINDOW).unwrap();
        assert!(p.gamma_crossings.is_empty());
        let p = plan_sequences(3, 1e-3, DEFAULT_WINDOW).unwrap();
        assert_eq!(p.gamma_crossings.len(), 2);
        assert!(p.gamma_crossings[0] > p.gamma_crossings[1]);
        assert!(p.alpha.windows(2).all(|w| w[1] < w[0]));
        assert!(p.slopes().windows(2).all(|w| w[1] > w[0]));
        assert!(plan_sequences(3, 1e-3, (0.01, 0.2)).is_err());
        assert!(plan_sequences(3, 1e-3, (0.02, 0.01)).is_err());
        assert!(plan_sequences(0, 1e-3, DEFAULT_WINDOW).is_err());
    }
}
