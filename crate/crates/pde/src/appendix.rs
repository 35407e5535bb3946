//! Free energy of the disk deformed by `z ↦ z + εz³`, computed on the unit
//! disk after pulling the problem back through the map.
//!
//! The pulled-back equation is `−ΔΦ = (J/Z)e^{−βΦ}` with Jacobian
//! `J = 1 + 6ε(x² − y²) + 9ε²(x² + y²)²` and `Z = ∫J e^{−βΦ}`. With
//! `U = −βΦ` this is `−ΔU = λJeᵁ`, `λ = −β/Z`, solved at fixed `β`.

use serde::Serialize;
use vpl_core::deformed::g_correction;
use vpl_core::disk::{e_of_mu, EIGHT_PI};

use crate::error::{Error, Result};
use crate::geometry::{GeometrySpec, CONFORMAL_EPS_MAX};
use crate::mesh::{rasterize, Mesh};
use crate::solver::{disk_seed, Constraint, NewtonOptions, PdeSolution, Problem};

pub const DEFAULT_H: f64 = 1.0 / 512.0;
pub const DEFAULT_EPSILONS: [f64; 2] = [0.02, 0.04];

/// `|f′(z)|²` for `f(z) = z + εz³`.
pub fn jacobian(epsilon: f64, p: [f64; 2]) -> f64 {
    let (x2, y2) = (p[0] * p[0], p[1] * p[1]);
    let r2 = x2 + y2;
    1.0 + 6.0 * epsilon * (x2 - y2) + 9.0 * epsilon * epsilon * r2 * r2
}

#[derive(Debug, Clone, Serialize)]
pub struct DeformedFreeEnergy {
    pub epsilon: f64,
    pub beta: f64,
    pub h: f64,
    pub nodes: usize,
    /// `−E − ln Z / β`.
    pub free_energy: f64,
    pub energy: f64,
    pub z: f64,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl DeformedFreeEnergy {
    fn from_solution(epsilon: f64, beta: f64, mesh: &Mesh, s: &PdeSolution) -> Self {
        DeformedFreeEnergy {
            epsilon,
            beta,
            h: mesh.h(),
            nodes: mesh.len(),
            free_energy: s.free_energy(),
            energy: s.energy,
            z: s.z,
            lambda: s.lambda,
            residual: s.residual,
            iterations: s.iterations,
        }
    }
}

fn check_inputs(epsilon: f64, beta: f64) -> Result<()> {
    if !(beta > -EIGHT_PI && beta < 0.0) {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            range: "(−8π, 0)",
        });
    }
    if !(0.0..=CONFORMAL_EPS_MAX).contains(&epsilon) {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            range: "[0, 0.15]",
        });
    }
    Ok(())
}

/// Exact free energy of the undeformed unit disk at `β`.
pub fn disk_free_energy(beta: f64) -> Result<f64> {
    let mu = -beta / EIGHT_PI;
    let z = std::f64::consts::PI / (1.0 - mu);
    Ok(-e_of_mu(mu)? - z.ln() / beta)
}

/// Solves the pulled-back problem on `mesh` (a unit-disk raster) from the
/// seed `(u0, λ0)`.
fn solve_on(mesh: &Mesh, epsilon: f64, beta: f64, u0: &[f64], lambda0: f64) -> Result<PdeSolution> {
    let problem = Problem::with_kernel(mesh, |p| jacobian(epsilon, p))?;
    let opts = NewtonOptions {
        tol: 1e-12,
        ..Default::default()
    };
    problem.solve(&Constraint::Beta(beta), u0, lambda0, &opts)
}

fn disk_guess(mesh: &Mesh, beta: f64) -> (Vec<f64>, f64) {
    let mu = -beta / EIGHT_PI;
    let mut u = vec![0.0; mesh.len()];
    disk_seed(mesh, [0.0, 0.0], 1.0, mu, &mut u);
    (u, 8.0 * mu * (1.0 - mu))
}

/// `F_ε(β)` on the unit disk rasterized at spacing `h`.
pub fn deformed_free_energy_check(epsilon: f64, beta: f64, h: f64) -> Result<DeformedFreeEnergy> {
    check_inputs(epsilon, beta)?;
    let mesh = rasterize(&GeometrySpec::disk([0.0, 0.0], 1.0), h)?;
    let (u0, l0) = disk_guess(&mesh, beta);
    let s = solve_on(&mesh, epsilon, beta, &u0, l0)?;
    Ok(DeformedFreeEnergy::from_solution(epsilon, beta, &mesh, &s))
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeCheck {
    pub beta: f64,
    pub mu: f64,
    pub h: f64,
    pub reference: DeformedFreeEnergy,
    /// Closed-form free energy of the undeformed disk.
    pub exact_reference: f64,
    pub deformed: Vec<DeformedFreeEnergy>,
    /// `(F_ε − F₀)/ε²` per entry of `deformed`.
    pub quotients: Vec<f64>,
    /// `(4q(ε₁) − q(ε₂))/3` for `ε₂ = 2ε₁`.
    pub extrapolated: f64,
    /// `g(β) = 6(1−μ)/(1−2μ/3)`.
    pub g: f64,
}

impl SlopeCheck {
    /// Relative deviation of the extrapolated slope from `target`.
    pub fn relative_error(&self, target: f64) -> f64 {
        (self.extrapolated - target).abs() / target.abs()
    }
}

/// Difference quotients of the free energy in `ε²` at `ε₁` and `ε₂ = 2ε₁`,
/// all on one mesh so the discretization error largely cancels.
pub fn slope_check(beta: f64, epsilons: [f64; 2], h: f64) -> Result<SlopeCheck> {
    let [e1, e2] = epsilons;
    check_inputs(e2, beta)?;
    check_inputs(e1, beta)?;
    if !(e1 > 0.0 && (e2 - 2.0 * e1).abs() <= 1e-12 * e2) {
        return Err(Error::Domain {
            name: "epsilon ratio",
            value: e2 / e1,
            range: "{2}",
        });
    }
    let mesh = rasterize(&GeometrySpec::disk([0.0, 0.0], 1.0), h)?;
    let (u0, l0) = disk_guess(&mesh, beta);
    let s0 = solve_on(&mesh, 0.0, beta, &u0, l0)?;
    let reference = DeformedFreeEnergy::from_solution(0.0, beta, &mesh, &s0);
    let s1 = solve_on(&mesh, e1, beta, &s0.u, s0.lambda)?;
    let s2 = solve_on(&mesh, e2, beta, &s1.u, s1.lambda)?;
    let deformed = vec![
        DeformedFreeEnergy::from_solution(e1, beta, &mesh, &s1),
        DeformedFreeEnergy::from_solution(e2, beta, &mesh, &s2),
    ];
    let quotients: Vec<f64> = deformed
        .iter()
        .map(|d| (d.free_energy - reference.free_energy) / (d.epsilon * d.epsilon))
        .collect();
    let extrapolated = (4.0 * quotients[0] - quotients[1]) / 3.0;
    let mu = -beta / EIGHT_PI;
    Ok(SlopeCheck {
        beta,
        mu,
        h,
        exact_reference: disk_free_energy(beta)?,
        reference,
        deformed,
        quotients,
        extrapolated,
        g: g_correction(mu)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn jacobian_matches_conformal_derivative() {
        let eps = 0.1;
        let (x, y) = (0.3_f64, -0.7_f64);
        // f'(z) = 1 + 3εz².
        let (re, im) = (1.0 + 3.0 * eps * (x * x - y * y), 6.0 * eps * x * y);
        assert!((jacobian(eps, [x, y]) - (re * re + im * im)).abs() < 1e-14);
    }

    #[test]
    fn undeformed_matches_closed_form() {
        let d = deformed_free_energy_check(0.0, -PI, 1.0 / 64.0).unwrap();
        let exact = disk_free_energy(-PI).unwrap();
        assert!((d.free_energy - exact).abs() < 1e-3 * exact.abs(), "{} {exact}", d.free_energy);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(deformed_free_energy_check(0.2, -PI, 0.1).is_err());
        assert!(deformed_free_energy_check(0.0, 1.0, 0.1).is_err());
    }
}
