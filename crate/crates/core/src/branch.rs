//! k-branches and merged branches of mean-field solutions on a disjoint union
//! of disks.
//!
//! Every component carries a disk solution with parameter `μᵢ`, tied together
//! by `μᵢ(1−μᵢ) = aᵢγ`. Component 1 (the largest) always takes `μ₁ = μ` and
//! the curve is parametrized by `μ`; the others pick the small root `μ⁻` or,
//! for indices in the plus set, the large root `μ⁺`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::{check_mu, q_of_mu, EIGHT_PI};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum};

/// Areas closer than this (relative) count as identical.
pub const EQUAL_AREA_TOL: f64 = 1e-12;

/// Default number of samples and interval of the `μ` grid.
pub const DEFAULT_GRID_POINTS: usize = 2000;
pub const DEFAULT_GRID_LO: f64 = 1e-6;
pub const DEFAULT_GRID_HI: f64 = 1.0 - 1e-6;

/// Bisection levels used to resolve folds between grid samples.
pub const FOLD_REFINE_LEVELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component {
    Disk { area: f64 },
    DeformedDisk { area: f64, eta: f64 },
}

impl Component {
    pub fn area(&self) -> f64 {
        match *self {
            Component::Disk { area } | Component::DeformedDisk { area, .. } => area,
        }
    }

    pub fn eta(&self) -> f64 {
        match *self {
            Component::Disk { .. } => 0.0,
            Component::DeformedDisk { eta, .. } => eta,
        }
    }

    fn with_area(self, area: f64) -> Self {
        match self {
            Component::Disk { .. } => Component::Disk { area },
            Component::DeformedDisk { eta, .. } => Component::DeformedDisk { area, eta },
        }
    }
}

/// Components sorted by non-increasing area with the largest rescaled to 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainSpec {
    components: Vec<Component>,
    /// Area of the largest input component; every area was divided by it.
    scale: f64,
    /// Whether the input order had to be changed.
    reordered: bool,
}

impl DomainSpec {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDomain("no components".into()));
        }
        for (i, c) in components.iter().enumerate() {
            let a = c.area();
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidDomain(format!("component {} has area {a}", i + 1)));
            }
            let eta = c.eta();
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(Error::InvalidDomain(format!("component {} has eta {eta}", i + 1)));
            }
        }
        let mut sorted = components.clone();
        sorted.sort_by(|a, b| b.area().total_cmp(&a.area()));
        let reordered = sorted != components;
        let scale = sorted[0].area();
        let components = sorted.into_iter().map(|c| c.with_area(c.area() / scale)).collect();
        Ok(Self {
            components,
            scale,
            reordered,
        })
    }

    pub fn disks(areas: &[f64]) -> Result<Self> {
        Self::new(areas.iter().map(|&area| Component::Disk { area }).collect())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.components.iter().map(Component::area).collect()
    }

    pub fn total_area(&self) -> f64 {
        compensated_sum(self.components.iter().map(Component::area))
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn was_reordered(&self) -> bool {
        self.reordered
    }

    pub fn all_disks(&self) -> bool {
        self.components.iter().all(|c| matches!(c, Component::Disk { .. }))
    }

    /// All components are plain disks of the same area (within [`EQUAL_AREA_TOL`]).
    pub fn all_identical(&self) -> bool {
        self.all_disks()
            && self
                .components
                .iter()
                .all(|c| (c.area() - 1.0).abs() <= EQUAL_AREA_TOL)
    }

    /// Energy of the uniform state `ρ = 1/|Λ|`: `Σaᵢ² / (16π|Λ|²)`.
    pub fn uniform_energy(&self) -> f64 {
        let total = self.total_area();
        compensated_sum(self.components.iter().map(|c| c.area() * c.area()))
            / (2.0 * EIGHT_PI * total * total)
    }

    /// Entropy of the uniform state, `ln|Λ|`.
    pub fn uniform_entropy(&self) -> f64 {
        self.total_area().ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Root {
    Minus,
    Plus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BranchSelector {
    /// Components whose 1-based labels are in `plus` sit on `μ⁺`.
    KBranch { plus: BTreeSet<usize> },
    /// Identical components: `N − k` carry `μ`, the last `k` carry `1 − μ`.
    Merged { k: usize },
}

impl BranchSelector {
    pub fn zero_branch() -> Self {
        BranchSelector::KBranch { plus: BTreeSet::new() }
    }

    pub fn k_branch<I: IntoIterator<Item = usize>>(plus: I) -> Self {
        BranchSelector::KBranch {
            plus: plus.into_iter().collect(),
        }
    }

    pub fn is_zero_branch(&self) -> bool {
        matches!(self, BranchSelector::KBranch { plus } if plus.is_empty())
            || matches!(self, BranchSelector::Merged { k: 0 })
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        let n = domain.len();
        match self {
            BranchSelector::KBranch { plus } => {
                if !domain.all_disks() {
                    return Err(Error::InvalidSelector(
                        "k-branches need plain disks; deformed components use the deformed module".into(),
                    ));
                }
                if let Some(&bad) = plus.iter().find(|&&i| i < 2 || i > n) {
                    return Err(Error::InvalidSelector(format!(
                        "plus-set label {bad} outside 2..={n}"
                    )));
                }
            }
            BranchSelector::Merged { k } => {
                if !domain.all_identical() {
                    return Err(Error::InvalidSelector("merged branches need identical disks".into()));
                }
                if n < 2 || 2 * k > n {
                    return Err(Error::InvalidSelector(format!("k = {k} outside 0..={}", n / 2)));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for BranchSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchSelector::KBranch { plus } if plus.is_empty() => write!(f, "0-branch"),
            BranchSelector::KBranch { plus } => {
                let labels: Vec<String> = plus.iter().map(|i| i.to_string()).collect();
                write!(f, "{}-branch+{}", plus.len(), labels.join("+"))
            }
            BranchSelector::Merged { k } => write!(f, "{k}-merged"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentState {
    pub mu: f64,
    pub one_minus_mu: f64,
    pub mass: f64,
    pub energy: f64,
    pub partition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint {
    pub mu: f64,
    pub gamma: f64,
    pub beta: f64,
    pub lambda: f64,
    pub z: f64,
    pub energy: f64,
    pub entropy: f64,
    pub components: Vec<ComponentState>,
}

/// Per-component input to [`BranchPoint::assemble`].
#[derive(Debug, Clone, Copy)]
pub struct ComponentInput {
    pub mu: f64,
    pub one_minus_mu: f64,
    /// `μᵢ²·eᵢ(μᵢ)`, the component energy before division by `σ²`.
    pub q: f64,
    pub partition: f64,
}

impl BranchPoint {
    /// Global quantities from the per-component roots at a common `γ`.
    ///
    /// With `σ = Σμᵢ`: `β = −8πσ`, `Z = σ/γ`, `λ = 8πγ`, `E = Σqᵢ/σ²`,
    /// `S = ln σ − ln γ − 16πΣqᵢ/σ`.
    pub fn assemble(mu: f64, gamma: f64, comps: &[ComponentInput]) -> Self {
        let sigma = compensated_sum(comps.iter().map(|c| c.mu));
        let q_total = compensated_sum(comps.iter().map(|c| c.q));
        let energy = q_total / (sigma * sigma);
        let mut s = CompensatedSum::new();
        s.add(sigma.ln());
        s.add(-gamma.ln());
        s.add(-2.0 * EIGHT_PI * q_total / sigma);
        let components = comps
            .iter()
            .map(|c| ComponentState {
                mu: c.mu,
                one_minus_mu: c.one_minus_mu,
                mass: c.mu / sigma,
                energy: c.q / (sigma * sigma),
                partition: c.partition,
            })
            .collect();
        BranchPoint {
            mu,
            gamma,
            beta: -EIGHT_PI * sigma,
            lambda: EIGHT_PI * gamma,
            z: sigma / gamma,
            energy,
            entropy: s.value(),
            components,
        }
    }

    pub fn masses(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mass).collect()
    }

    pub fn component_energies(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.energy).collect()
    }

    pub fn component_mus(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.mu).collect()
    }
}

/// Roots of `μ(1−μ) = aγ`.
pub fn mu_pm(gamma: f64, area: f64, sign: Root) -> Result<f64> {
    root_pair(gamma, area, 1).map(|(small, big)| match sign {
        Root::Minus => small.0,
        Root::Plus => big.0,
    })
}

/// `((μ⁻, 1−μ⁻), (μ⁺, 1−μ⁺))` with both members accurate.
fn root_pair(gamma: f64, area: f64, component: usize) -> Result<((f64, f64), (f64, f64))> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain {
            name: "gamma",
            value: gamma,
            range: "(0, 1/4]",
        });
    }
    if !(area > 0.0) {
        return Err(Error::Domain {
            name: "area",
            value: area,
            range: "(0, ∞)",
        });
    }
    let product = 4.0 * area * gamma;
    if product > 1.0 {
        return Err(Error::NoRealRoot { component, product });
    }
    Ok(roots_from_discriminant(area * gamma, 1.0 - product))
}

fn roots_from_discriminant(a_gamma: f64, disc: f64) -> ((f64, f64), (f64, f64)) {
    let sq = disc.max(0.0).sqrt();
    let small = 2.0 * a_gamma / (1.0 + sq);
    let big = 0.5 * (1.0 + sq);
    ((small, big), (big, small))
}

/// A branch: a domain together with a selector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub domain: DomainSpec,
    pub selector: BranchSelector,
}

#[derive(Debug, Clone, Copy)]
struct Root1 {
    mu: f64,
    one_minus: f64,
    /// dμᵢ/dμ
    slope: f64,
}

impl Branch {
    pub fn new(domain: DomainSpec, selector: BranchSelector) -> Result<Self> {
        selector.validate(&domain)?;
        Ok(Self { domain, selector })
    }

    /// Whether the `μ → 0⁺` end of the branch is the uniform state.
    pub fn has_uniform_limit(&self) -> bool {
        self.selector.is_zero_branch()
    }

    fn roots(&self, mu: f64) -> Result<(f64, Vec<Root1>)> {
        let one_minus = 1.0 - mu;
        match &self.selector {
            BranchSelector::KBranch { plus } => {
                let areas = self.domain.areas();
                let a1 = areas[0];
                let gamma = mu * one_minus / a1;
                let dgamma = (1.0 - 2.0 * mu) / a1;
                let mut roots = Vec::with_capacity(areas.len());
                roots.push(Root1 {
                    mu,
                    one_minus,
                    slope: 1.0,
                });
                let centred = (1.0 - 2.0 * mu) * (1.0 - 2.0 * mu);
                for (i, &a) in areas.iter().enumerate().skip(1) {
                    // 1 − 4aγ written so that it stays accurate near μ = ½
                    let disc = centred + 4.0 * mu * one_minus * (a1 - a) / a1;
                    if disc < 0.0 {
                        return Err(Error::NoRealRoot {
                            component: i + 1,
                            product: 1.0 - disc,
                        });
                    }
                    let ((lo, lo_c), (hi, hi_c)) = roots_from_discriminant(a * gamma, disc);
                    let sq = disc.sqrt();
                    let r = if plus.contains(&(i + 1)) {
                        Root1 {
                            mu: hi,
                            one_minus: hi_c,
                            slope: -a * dgamma / sq,
                        }
                    } else {
                        Root1 {
                            mu: lo,
                            one_minus: lo_c,
                            slope: a * dgamma / sq,
                        }
                    };
                    roots.push(r);
                }
                Ok((gamma, roots))
            }
            BranchSelector::Merged { k } => {
                let n = self.domain.len();
                let gamma = mu * one_minus;
                let mut roots = Vec::with_capacity(n);
                for i in 0..n {
                    roots.push(if i < n - k {
                        Root1 {
                            mu,
                            one_minus,
                            slope: 1.0,
                        }
                    } else {
                        Root1 {
                            mu: one_minus,
                            one_minus: mu,
                            slope: -1.0,
                        }
                    });
                }
                Ok((gamma, roots))
            }
        }
    }

    /// Point at `μ ∈ (0,1)`.
    pub fn point(&self, mu: f64) -> Result<BranchPoint> {
        check_mu(mu)?;
        self.point_unchecked(mu)
    }

    fn point_unchecked(&self, mu: f64) -> Result<BranchPoint> {
        let (gamma, roots) = self.roots(mu)?;
        let areas = self.domain.areas();
        let comps: Vec<ComponentInput> = roots
            .iter()
            .zip(&areas)
            .map(|(r, &a)| ComponentInput {
                mu: r.mu,
                one_minus_mu: r.one_minus,
                q: q_of_mu(r.mu, r.one_minus),
                partition: a / r.one_minus,
            })
            .collect();
        Ok(BranchPoint::assemble(mu, gamma, &comps))
    }

    /// The `μ → 0⁺` limit of a 0-branch: the uniform state.
    pub fn uniform_point(&self) -> Option<BranchPoint> {
        if !self.has_uniform_limit() {
            return None;
        }
        let total = self.domain.total_area();
        let components = self
            .domain
            .areas()
            .iter()
            .map(|&a| ComponentState {
                mu: 0.0,
                one_minus_mu: 1.0,
                mass: a / total,
                energy: a * a / (2.0 * EIGHT_PI * total * total),
                partition: a,
            })
            .collect();
        Some(BranchPoint {
            mu: 0.0,
            gamma: 0.0,
            beta: 0.0,
            lambda: 0.0,
            z: total,
            energy: self.domain.uniform_energy(),
            entropy: total.ln(),
            components,
        })
    }

    /// Point at `μ ∈ [0,1)`, with `μ = 0` mapped to the uniform limit when the
    /// branch has one.
    pub(crate) fn point_or_limit(&self, mu: f64) -> Result<BranchPoint> {
        if mu == 0.0 {
            if let Some(p) = self.uniform_point() {
                return Ok(p);
            }
        }
        self.point(mu)
    }

    /// `(E, dE/dμ)` at `μ`.
    pub fn energy_and_slope(&self, mu: f64) -> Result<(f64, f64)> {
        check_mu(mu)?;
        let (_, roots) = self.roots(mu)?;
        let sigma = compensated_sum(roots.iter().map(|r| r.mu));
        let dsigma = compensated_sum(roots.iter().map(|r| r.slope));
        let q = compensated_sum(roots.iter().map(|r| q_of_mu(r.mu, r.one_minus)));
        let dq = compensated_sum(roots.iter().map(|r| r.mu / (EIGHT_PI * r.one_minus) * r.slope));
        let energy = q / (sigma * sigma);
        let slope = dq / (sigma * sigma) - 2.0 * q * dsigma / (sigma * sigma * sigma);
        Ok((energy, slope))
    }
}

pub fn branch_point(domain: &DomainSpec, selector: &BranchSelector, mu: f64) -> Result<BranchPoint> {
    Branch::new(domain.clone(), selector.clone())?.point(mu)
}

/// Point on the k-merged branch of `n` identical unit disks.
pub fn merged_branch_point(n: usize, k: usize, mu: f64) -> Result<BranchPoint> {
    let domain = DomainSpec::disks(&vec![1.0; n])?;
    branch_point(&domain, &BranchSelector::Merged { k }, mu)
}

/// Point built from `γ` and explicit per-component root choices.
pub fn from_gamma(domain: &DomainSpec, gamma: f64, signs: &[Root]) -> Result<BranchPoint> {
    if !domain.all_disks() {
        return Err(Error::InvalidDomain("from_gamma needs plain disks".into()));
    }
    if signs.len() != domain.len() {
        return Err(Error::InvalidSelector(format!(
            "{} signs for {} components",
            signs.len(),
            domain.len()
        )));
    }
    let mut comps = Vec::with_capacity(signs.len());
    for (i, (&a, &sign)) in domain.areas().iter().zip(signs).enumerate() {
        let (lo, hi) = root_pair(gamma, a, i + 1)?;
        let (mu, one_minus) = match sign {
            Root::Minus => lo,
            Root::Plus => hi,
        };
        comps.push(ComponentInput {
            mu,
            one_minus_mu: one_minus,
            q: q_of_mu(mu, one_minus),
            partition: a / one_minus,
        });
    }
    Ok(BranchPoint::assemble(comps[0].mu, gamma, &comps))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DroppedPoint {
    pub mu: f64,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCurve {
    pub branch: Branch,
    pub points: Vec<BranchPoint>,
    pub dropped: Vec<DroppedPoint>,
}

impl BranchCurve {
    pub fn selector(&self) -> &BranchSelector {
        &self.branch.selector
    }
}

pub fn uniform_mu_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn default_mu_grid() -> Vec<f64> {
    uniform_mu_grid(DEFAULT_GRID_POINTS, DEFAULT_GRID_LO, DEFAULT_GRID_HI)
}

/// Samples a branch on `mu_grid` and adds bisection points around every sign
/// change of `dE/dμ`.
pub fn sample_branch(domain: &DomainSpec, selector: &BranchSelector, mu_grid: &[f64]) -> Result<BranchCurve> {
    let branch = Branch::new(domain.clone(), selector.clone())?;
    sample(branch, mu_grid)
}

pub fn sample(branch: Branch, mu_grid: &[f64]) -> Result<BranchCurve> {
    if mu_grid.is_empty() {
        return Err(Error::Resolution("empty μ grid".into()));
    }
    for w in mu_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Resolution("μ grid must be strictly increasing".into()));
        }
    }
    for &mu in mu_grid {
        check_mu(mu)?;
    }
    let evaluated: Vec<Result<(BranchPoint, f64)>> = mu_grid
        .par_iter()
        .map(|&mu| {
            let p = branch.point(mu)?;
            let (_, slope) = branch.energy_and_slope(mu)?;
            Ok((p, slope))
        })
        .collect();
    let mut kept: Vec<(BranchPoint, f64)> = Vec::with_capacity(mu_grid.len());
    let mut dropped = Vec::new();
    for (r, &mu) in evaluated.into_iter().zip(mu_grid) {
        match r {
            Ok(v) => kept.push(v),
            Err(Error::NoRealRoot { component, .. }) => dropped.push(DroppedPoint { mu, component }),
            Err(e) => return Err(e),
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyBranch { dropped: dropped.len() });
    }
    let mut extra = Vec::new();
    for w in kept.windows(2) {
        let (a, sa) = (&w[0].0, w[0].1);
        let (b, sb) = (&w[1].0, w[1].1);
        if sa.signum() == sb.signum() || sa == 0.0 || sb == 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (a.mu, b.mu);
        for _ in 0..FOLD_REFINE_LEVELS {
            let mid = 0.5 * (lo + hi);
            let (_, sm) = branch.energy_and_slope(mid)?;
            extra.push(branch.point(mid)?);
            if sm.signum() == sa.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let mut points: Vec<BranchPoint> = kept.into_iter().map(|(p, _)| p).collect();
    points.extend(extra);
    points.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    points.dedup_by(|a, b| a.mu == b.mu);
    Ok(BranchCurve {
        branch,
        points,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{disk_state, e_of_mu};
    use std::f64::consts::PI;

    #[test]
    fn mu_pm_examples() {
        assert!((mu_pm(0.24, 1.0, Root::Minus).unwrap() - 0.4).abs() < 1e-15);
        assert!((mu_pm(0.24, 1.0, Root::Plus).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(mu_pm(0.25, 1.0, Root::Minus).unwrap(), 0.5);
        assert_eq!(mu_pm(0.25, 1.0, Root::Plus).unwrap(), 0.5);
        let expected = 0.5 * (1.0 - 0.8f64.sqrt());
        assert!((mu_pm(0.1, 0.5, Root::Minus).unwrap() - expected).abs() < 1e-15);
        assert!(matches!(
            mu_pm(0.3, 1.0, Root::Plus),
            Err(Error::NoRealRoot { .. })
        ));
    }

    #[test]
    fn domain_is_sorted_and_normalized() {
        let d = DomainSpec::disks(&[0.5, 2.0, 1.0]).unwrap();
        assert_eq!(d.areas(), vec![1.0, 0.5, 0.25]);
        assert_eq!(d.scale(), 2.0);
        assert!(d.was_reordered());
        assert!(DomainSpec::disks(&[1.0, -0.2]).is_err());
        assert!(DomainSpec::disks(&[]).is_err());
    }

    #[test]
    fn single_disk_reduces_to_closed_form() {
        let d = DomainSpec::disks(&[1.0]).unwrap();
        for &mu in &[0.1, 0.5, 0.93] {
            let p = branch_point(&d, &BranchSelector::zero_branch(), mu).unwrap();
            let s = disk_state(mu, 1.0).unwrap();
            assert!((p.beta - s.beta).abs() < 1e-13);
            assert!((p.energy - s.energy).abs() < 1e-15);
            assert!((p.entropy - s.entropy).abs() < 1e-13);
            assert!((p.z - s.partition).abs() < 1e-13);
        }
    }

    #[test]
    fn three_disk_point_by_hand() {
        let d = DomainSpec::disks(&[1.0, 0.6, 0.2]).unwrap();
        let p = branch_point(&d, &BranchSelector::zero_branch(), 0.3).unwrap();
        assert!((p.gamma - 0.21).abs() < 1e-15);
        let m2 = 0.5 * (1.0 - (1.0f64 - 0.504).sqrt());
        let m3 = 0.5 * (1.0 - (1.0f64 - 0.168).sqrt());
        let mus = p.component_mus();
        assert!((mus[1] - m2).abs() < 1e-15);
        assert!((mus[2] - m3).abs() < 1e-15);
        let sigma = 0.3 + m2 + m3;
        assert!((p.beta + 8.0 * PI * sigma).abs() < 1e-12);
        let e = (0.3f64.powi(2) * e_of_mu(0.3).unwrap()
            + m2 * m2 * e_of_mu(m2).unwrap()
            + m3 * m3 * e_of_mu(m3).unwrap())
            / (sigma * sigma);
        assert!((p.energy - e).abs() < 1e-15);
        assert!((p.entropy - (p.z.ln() + 2.0 * p.beta * p.energy)).abs() < 1e-12);
    }

    #[test]
    fn merged_common_point() {
        let a = merged_branch_point(3, 0, 0.5).unwrap();
        let b = merged_branch_point(3, 1, 0.5).unwrap();
        assert_eq!(a.beta, -12.0 * PI);
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.energy, b.energy);
        assert_eq!(a.entropy, b.entropy);
        for &mu in &[0.01, 0.3, 0.77] {
            assert_eq!(merged_branch_point(4, 2, mu).unwrap().beta, -16.0 * PI);
        }
        assert!(merged_branch_point(3, 2, 0.3).is_err());
        let uniform = merged_branch_point(5, 0, 1e-12).unwrap();
        assert!((uniform.entropy - 5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn from_gamma_matches_mu_parametrization() {
        let d = DomainSpec::disks(&[1.0]).unwrap();
        let a = from_gamma(&d, 0.21, &[Root::Minus]).unwrap();
        let b = branch_point(&d, &BranchSelector::zero_branch(), 0.3).unwrap();
        assert!((a.energy - b.energy).abs() < 1e-15);
        assert!((a.entropy - b.entropy).abs() < 1e-13);
        let d = DomainSpec::disks(&[1.0, 1.0]).unwrap();
        let p = from_gamma(&d, 0.21, &[Root::Minus, Root::Plus]).unwrap();
        assert!((p.beta + 8.0 * PI).abs() < 1e-12);
        let d = DomainSpec::disks(&[1.0, 1.0, 1.0]).unwrap();
        let p = from_gamma(&d, 0.25, &[Root::Minus, Root::Plus, Root::Minus]).unwrap();
        assert!(p.component_mus().iter().all(|&m| m == 0.5));
    }

    #[test]
    fn selectors_are_validated() {
        let d = DomainSpec::disks(&[1.0, 0.5]).unwrap();
        assert!(Branch::new(d.clone(), BranchSelector::k_branch([1])).is_err());
        assert!(Branch::new(d.clone(), BranchSelector::k_branch([3])).is_err());
        assert!(Branch::new(d, BranchSelector::Merged { k: 0 }).is_err());
    }

    #[test]
    fn analytic_slope_matches_finite_difference() {
        let d = DomainSpec::disks(&[1.0, 0.9, 0.5]).unwrap();
        for sel in [BranchSelector::zero_branch(), BranchSelector::k_branch([3])] {
            let b = Branch::new(d.clone(), sel).unwrap();
            for &mu in &[0.2, 0.45, 0.8] {
                let h = 1e-6;
                let (_, s) = b.energy_and_slope(mu).unwrap();
                let fd = (b.point(mu + h).unwrap().energy - b.point(mu - h).unwrap().energy) / (2.0 * h);
                assert!((s - fd).abs() < 1e-6 * fd.abs().max(1e-3), "{mu}: {s} vs {fd}");
            }
        }
    }

    #[test]
    fn sampling_single_disk() {
        let d = DomainSpec::disks(&[1.0]).unwrap();
        let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let c = sample_branch(&d, &BranchSelector::zero_branch(), &grid).unwrap();
        assert_eq!(c.points.len(), 9);
        assert!(c.points.windows(2).all(|w| w[1].energy > w[0].energy));
        assert!(sample_branch(&d, &BranchSelector::zero_branch(), &[]).is_err());
        assert!(sample_branch(&d, &BranchSelector::zero_branch(), &[0.5, 0.4]).is_err());
    }

    #[test]
    fn uniform_limit_values() {
        let d = DomainSpec::disks(&[1.0, 0.6, 0.2]).unwrap();
        let b = Branch::new(d.clone(), BranchSelector::zero_branch()).unwrap();
        let u = b.uniform_point().unwrap();
        let near = b.point(1e-10).unwrap();
        assert!((u.energy - near.energy).abs() < 1e-11);
        assert!((u.entropy - near.entropy).abs() < 1e-9);
        assert!((u.entropy - 1.8f64.ln()).abs() < 1e-15);
    }
}
