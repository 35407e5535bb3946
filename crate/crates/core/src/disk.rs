//! Closed-form mean-field states of a single disk and the mass rescaling law.
//!
//! On a disk of area `a` the solution of `−ΔΨ = e^{−βΨ}/Z` with `Ψ = 0` on the
//! boundary is explicit. With `μ = −β/8π ∈ (0,1)`:
//!
//! * energy per unit mass squared `e(μ) = (−μ − ln(1−μ)) / (8πμ²)`,
//! * partition function `z(μ) = a/(1−μ)`,
//! * entropy `S = ln Z + 2βE`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, log1p_remainder, neg_mu_minus_log1m, CompensatedSum};

pub const EIGHT_PI: f64 = 8.0 * PI;

/// Sampling clamp for the branch parameter; operations reject values outside
/// `(0, 1)` instead of extrapolating.
pub const MU_MIN: f64 = 1e-9;

/// Below this `|β|` the energy uses its Taylor polynomial.
const BETA_TAYLOR: f64 = 1e-4;

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "mu",
            value: mu,
            range: "(0, 1)",
        })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "(0, ∞)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskSpec {
    pub area: f64,
}

impl DiskSpec {
    pub fn new(area: f64) -> Result<Self> {
        check_positive("area", area)?;
        Ok(Self { area })
    }

    pub fn radius(&self) -> f64 {
        (self.area / PI).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    pub psi: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskProfile {
    pub mu: f64,
    pub radius: f64,
    pub samples: Vec<ProfileSample>,
}

impl DiskProfile {
    /// `2π ∫ ρ r dr` by the trapezoidal rule on the sample radii.
    /// `2π∫ρ r dr`: Simpson on pairs of intervals when they are uniform,
    /// trapezoid otherwise.
    pub fn total_mass(&self) -> f64 {
        let s = &self.samples;
        let f = |p: &ProfileSample| p.rho * p.r;
        let n = s.len().saturating_sub(1);
        let uniform = n >= 2
            && n % 2 == 0
            && s.windows(3).all(|w| ((w[2].r - w[1].r) - (w[1].r - w[0].r)).abs() <= 1e-9 * (w[2].r - w[0].r));
        let total = if uniform {
            let mut acc = CompensatedSum::new();
            for k in (0..n).step_by(2) {
                let h = 0.5 * (s[k + 2].r - s[k].r);
                acc.add(h / 3.0 * (f(&s[k]) + 4.0 * f(&s[k + 1]) + f(&s[k + 2])));
            }
            acc.value()
        } else {
            compensated_sum(s.windows(2).map(|w| 0.5 * (w[1].r - w[0].r) * (f(&w[0]) + f(&w[1]))))
        };
        2.0 * PI * total
    }
}

/// One mean-field state of a single component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassEnergyState {
    pub mass: f64,
    pub energy: f64,
    pub entropy: f64,
    pub beta: f64,
    pub partition: f64,
}

/// `(−μ − ln(1−μ)) / 8π`, i.e. `μ²·e(μ)`, from both `μ` and `1−μ`.
pub fn q_of_mu(mu: f64, one_minus: f64) -> f64 {
    neg_mu_minus_log1m(mu, one_minus) / EIGHT_PI
}

/// Energy of the unit-mass disk state at parameter `μ`; independent of the area.
pub fn e_of_mu(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(log1p_remainder(-mu) / EIGHT_PI)
}

pub fn z_of_mu(mu: f64, area: f64) -> Result<f64> {
    check_mu(mu)?;
    check_positive("area", area)?;
    Ok(area / (1.0 - mu))
}

/// `(8π/β²)(β/8π − ln(1 + β/8π))`, continuous through `β = 0`.
pub fn disk_energy_of_beta(beta: f64) -> Result<f64> {
    if !(beta > -EIGHT_PI) || !beta.is_finite() {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            range: "(−8π, ∞)",
        });
    }
    let x = beta / EIGHT_PI;
    if beta.abs() < BETA_TAYLOR {
        Ok((0.5 - x / 3.0 + x * x / 4.0 - x * x * x / 5.0) / EIGHT_PI)
    } else {
        Ok(log1p_remainder(x) / EIGHT_PI)
    }
}

/// Unit-mass state on a disk of the given area at parameter `μ`.
pub fn disk_state(mu: f64, area: f64) -> Result<MassEnergyState> {
    let energy = e_of_mu(mu)?;
    let partition = z_of_mu(mu, area)?;
    let beta = -EIGHT_PI * mu;
    Ok(MassEnergyState {
        mass: 1.0,
        energy,
        entropy: partition.ln() + 2.0 * beta * energy,
        beta,
        partition,
    })
}

/// Unit-mass state at inverse temperature `β > −8π`, positive values included.
pub fn disk_state_of_beta(beta: f64, area: f64) -> Result<MassEnergyState> {
    let energy = disk_energy_of_beta(beta)?;
    check_positive("area", area)?;
    let partition = area / (1.0 + beta / EIGHT_PI);
    Ok(MassEnergyState {
        mass: 1.0,
        energy,
        entropy: partition.ln() + 2.0 * beta * energy,
        beta,
        partition,
    })
}

/// Stream function and density of the disk solution on the given radii.
pub fn stream_profile(mu: f64, radius: f64, r_grid: &[f64]) -> Result<DiskProfile> {
    check_mu(mu)?;
    profile_unchecked(mu, radius, r_grid)
}

/// As [`stream_profile`] at inverse temperature `β > −8π`, so `μ = −β/8π` may
/// be zero or negative.
pub fn stream_profile_of_beta(beta: f64, radius: f64, r_grid: &[f64]) -> Result<DiskProfile> {
    if !(beta > -EIGHT_PI) || !beta.is_finite() {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            range: "(−8π, ∞)",
        });
    }
    profile_unchecked(-beta / EIGHT_PI, radius, r_grid)
}

fn profile_unchecked(mu: f64, radius: f64, r_grid: &[f64]) -> Result<DiskProfile> {
    check_positive("radius", radius)?;
    let area = PI * radius * radius;
    let mut samples = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r >= 0.0 && r <= radius * (1.0 + 1e-12)) {
            return Err(Error::Domain {
                name: "r",
                value: r,
                range: "[0, R]",
            });
        }
        let s = (1.0 - (r / radius).powi(2)).max(0.0);
        // −ln(1−μs)/μ = s + μs²·L(−μs)
        let psi = (s + mu * s * s * log1p_remainder(-mu * s)) / (4.0 * PI);
        let denom = 1.0 - mu * s;
        let rho = (1.0 - mu) / (area * denom * denom);
        samples.push(ProfileSample { r, psi, rho });
    }
    Ok(DiskProfile {
        mu,
        radius,
        samples,
    })
}

/// Entropy at mass `M` from the unit-mass entropy: `M·S(E/M²) − M ln M`.
pub fn scaled_entropy<F>(mass: f64, energy: f64, unit_entropy: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_positive("mass", mass)?;
    check_positive("energy", energy)?;
    Ok(mass * unit_entropy(energy / (mass * mass))? - mass * mass.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_limits_and_midpoint() {
        let uniform = 1.0 / (16.0 * PI);
        // E(μ) = (1/8π)(½ + μ/3 + …)
        assert!((e_of_mu(1e-12).unwrap() - uniform - 1e-12 / (3.0 * EIGHT_PI)).abs() < 1e-16);
        let mid = (2f64.ln() - 0.5) / (2.0 * PI);
        assert!((e_of_mu(0.5).unwrap() - mid).abs() < 1e-16);
        assert!(e_of_mu(1.0 - 1e-15).unwrap() > 1.0);
        assert!(e_of_mu(0.0).is_err());
        assert!(e_of_mu(1.0).is_err());
    }

    #[test]
    fn partition_examples() {
        assert_eq!(z_of_mu(0.5, 1.0).unwrap(), 2.0);
        assert_eq!(z_of_mu(0.75, 2.0).unwrap(), 8.0);
        assert!((z_of_mu(1e-14, 1.0).unwrap() - 1.0).abs() < 1e-13);
        assert!(z_of_mu(1.0, 1.0).is_err());
    }

    #[test]
    fn energy_of_beta_examples() {
        assert_eq!(disk_energy_of_beta(0.0).unwrap(), 1.0 / (16.0 * PI));
        let a = disk_energy_of_beta(-4.0 * PI).unwrap();
        assert!((a - e_of_mu(0.5).unwrap()).abs() < 1e-16);
        let b = disk_energy_of_beta(EIGHT_PI).unwrap();
        assert!((b - (1.0 - 2f64.ln()) / EIGHT_PI).abs() < 1e-16);
        assert!((b - 0.012211).abs() < 1e-5);
        assert!(disk_energy_of_beta(-EIGHT_PI).is_err());
    }

    #[test]
    fn taylor_switch_is_seamless() {
        let below = disk_energy_of_beta(0.99e-4).unwrap();
        let above = disk_energy_of_beta(1.01e-4).unwrap();
        let slope = (above - below) / 0.02e-4;
        // dE/dβ at 0 is −1/(3·64π²)
        assert!((slope + 1.0 / (192.0 * PI * PI)).abs() < 1e-8);
    }

    #[test]
    fn profile_examples() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let p = stream_profile(0.5, 1.0, &grid).unwrap();
        let first = p.samples[0];
        let last = p.samples[10];
        assert!((first.rho / last.rho - 4.0).abs() < 1e-12);
        assert_eq!(last.psi, 0.0);
        let p = stream_profile(0.9, 1.0, &[0.0]).unwrap();
        let expected = (2.0 / (-EIGHT_PI * 0.9)) * 0.1f64.ln();
        assert!((p.samples[0].psi - expected).abs() < 1e-15);
        assert!((p.samples[0].psi - 0.20359).abs() < 1e-5);
        let p = stream_profile(1e-12, 1.0, &[0.0, 0.5]).unwrap();
        assert!((p.samples[1].psi - 0.75 / (4.0 * PI)).abs() < 1e-12);
        assert!((p.samples[0].rho - 1.0 / PI).abs() < 1e-12);
        assert!(stream_profile(0.5, 1.0, &[1.5]).is_err());
    }

    #[test]
    fn profile_mass_is_one() {
        let n = 10_000;
        let radius = 0.8;
        let grid: Vec<f64> = (0..=n).map(|i| radius * i as f64 / n as f64).collect();
        for &mu in &[0.1, 0.5, 0.9] {
            let p = stream_profile(mu, radius, &grid).unwrap();
            assert!((p.total_mass() - 1.0).abs() < 1e-8, "mu {mu}: {}", p.total_mass());
        }
    }

    #[test]
    fn scaled_entropy_examples() {
        let unit = |e: f64| Ok(e.ln());
        assert_eq!(scaled_entropy(1.0, 3.0, unit).unwrap(), 3f64.ln());
        let v = scaled_entropy(2.0, 4.0 * 0.7, unit).unwrap();
        assert!((v - (2.0 * 0.7f64.ln() - 2.0 * 2f64.ln())).abs() < 1e-15);
        assert!(scaled_entropy(0.0, 1.0, unit).is_err());
    }

    #[test]
    fn entropy_slope_is_beta() {
        for &beta in &[-7.0 * PI, -PI, 0.5, 3.0 * PI] {
            let h = 1e-5 * beta.abs().max(1.0);
            let a = disk_state_of_beta(beta - h, 1.0).unwrap();
            let b = disk_state_of_beta(beta + h, 1.0).unwrap();
            let slope = (b.entropy - a.entropy) / (b.energy - a.energy);
            assert!(((slope - beta) / beta).abs() < 1e-6, "β {beta}: {slope}");
        }
    }
}
