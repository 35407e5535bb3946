//! Independent checks: brute-force maximization of the split entropy over
//! mass/energy allocations, and a finite-volume solve of the radial disk
//! mean-field equation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::branch::DomainSpec;
use crate::disk::{DiskProfile, MassEnergyState, ProfileSample, EIGHT_PI};
use crate::error::{Error, Result};
use crate::numeric::{brent, compensated_sum, log1p_remainder, CompensatedSum, RootOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub target: String,
    pub reference: Vec<f64>,
    pub oracle: Vec<f64>,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub metadata: BTreeMap<String, f64>,
}

impl OracleReport {
    pub fn new(target: impl Into<String>, reference: Vec<f64>, oracle: Vec<f64>) -> Self {
        let mut max_abs_err = 0.0f64;
        let mut max_rel_err = 0.0f64;
        for (r, o) in reference.iter().zip(&oracle) {
            let d = (r - o).abs();
            max_abs_err = max_abs_err.max(d);
            if *r != 0.0 {
                max_rel_err = max_rel_err.max(d / r.abs());
            }
        }
        Self {
            target: target.into(),
            reference,
            oracle,
            max_abs_err,
            max_rel_err,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }
}

/// Unit-mass disk state of energy `E > 0`, by inverting the monotone map
/// `β ↦ E(β)` on `(−8π, ∞)`.
pub fn disk_state_of_energy(energy: f64, area: f64) -> Result<MassEnergyState> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::Domain {
            name: "energy",
            value: energy,
            range: "(0, ∞)",
        });
    }
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::Domain {
            name: "area",
            value: area,
            range: "(0, ∞)",
        });
    }
    let uniform = 1.0 / (2.0 * EIGHT_PI);
    let opts = RootOptions {
        xtol: 0.0,
        ftol: 0.0,
        max_iter: 400,
    };
    if energy >= uniform {
        // u = ln(1−μ) keeps 1−μ exact when μ crowds 1
        let e_of_u = |u: f64| {
            let mu = -u.exp_m1();
            if mu < 0.1 {
                log1p_remainder(-mu) / EIGHT_PI
            } else {
                (-mu - u) / (EIGHT_PI * mu * mu)
            }
        };
        let u_lo = -(EIGHT_PI * energy + 3.0);
        let u_hi = -1e-300;
        let f = |u: f64| Ok(e_of_u(u) - energy);
        let (fa, fb) = (f(u_lo)?, f(u_hi)?);
        let u = if fb >= 0.0 { u_hi } else { brent(f, u_lo, u_hi, fa, fb, opts)? };
        let mu = -u.exp_m1();
        let beta = -EIGHT_PI * mu;
        Ok(MassEnergyState {
            mass: 1.0,
            energy,
            entropy: area.ln() - u + 2.0 * beta * energy,
            beta,
            partition: area / u.exp(),
        })
    } else {
        // x = β/8π > 0 with E = L(x)/8π and L(x) ≈ 1/x for large x
        let f = |x: f64| Ok(log1p_remainder(x) / EIGHT_PI - energy);
        let x_hi = 2.0 / (EIGHT_PI * energy) + 10.0;
        let (fa, fb) = (f(0.0)?, f(x_hi)?);
        let x = brent(f, 0.0, x_hi, fa, fb, opts)?;
        let beta = EIGHT_PI * x;
        Ok(MassEnergyState {
            mass: 1.0,
            energy,
            entropy: area.ln() - x.ln_1p() + 2.0 * beta * energy,
            beta,
            partition: area / (1.0 + x),
        })
    }
}

pub fn disk_entropy_of_energy(energy: f64, area: f64) -> Result<f64> {
    Ok(disk_state_of_energy(energy, area)?.entropy)
}

/// `M·S_a(E/M²) − M ln M`, or `−∞` outside `M, E > 0`.
pub fn component_entropy(mass: f64, energy: f64, area: f64) -> f64 {
    if !(mass > 0.0 && energy > 0.0) {
        return f64::NEG_INFINITY;
    }
    match disk_entropy_of_energy(energy / (mass * mass), area) {
        Ok(s) => mass * s - mass * mass.ln(),
        Err(_) => f64::NEG_INFINITY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMvpOptions {
    /// Coarse points per free dimension.
    pub points: usize,
    pub refine_rounds: usize,
    /// Points per dimension in a refinement pass (odd).
    pub refine_points: usize,
    pub shrink: f64,
}

impl Default for GridMvpOptions {
    fn default() -> Self {
        Self {
            points: 200,
            refine_rounds: 3,
            refine_points: 21,
            shrink: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MvpSplit {
    pub masses: Vec<f64>,
    pub energies: Vec<f64>,
    pub entropy: f64,
    /// Final grid steps in mass and energy.
    pub mass_step: f64,
    pub energy_step: f64,
    pub exhaustive: bool,
}

impl MvpSplit {
    /// `β̂ᵢ = ∂S/∂Eᵢ` per component, which must agree at an interior optimum.
    pub fn lagrange_betas(&self, domain: &DomainSpec) -> Result<Vec<f64>> {
        self.masses
            .iter()
            .zip(&self.energies)
            .zip(domain.areas())
            .map(|((&m, &e), a)| Ok(disk_state_of_energy(e / (m * m), a)?.beta / m))
            .collect()
    }
}

/// Lattice for the free coordinates of components `2..N`: mass `m0 + j·dm` and
/// energy `e0 + k·de` for `j, k < count`. Component 1 takes the remainder.
#[derive(Debug, Clone, Copy)]
struct Lattice {
    m0: [f64; 2],
    e0: [f64; 2],
    dm: f64,
    de: f64,
    count: usize,
}

struct Best {
    value: f64,
    idx: [usize; 4],
}

fn better(a: Best, b: Best) -> Best {
    if b.value > a.value || (b.value == a.value && b.idx < a.idx) {
        b
    } else {
        a
    }
}

/// Cap on window slides across all refinement rounds.
const MAX_WINDOW_MOVES: usize = 20_000;
/// Extra shrink rounds allowed when the optimum sits next to `Mᵢ = 0` or `Eᵢ = 0`.
const MAX_FLOOR_ROUNDS: usize = 12;

/// Maximizes `Σ Sᵢ(Mᵢ, Eᵢ)` over `ΣMᵢ = 1`, `ΣEᵢ = E` on a lattice, `N ≤ 3`.
pub fn grid_mvp(domain: &DomainSpec, energy: f64, opts: GridMvpOptions) -> Result<MvpSplit> {
    let n = domain.len();
    if !(energy > 0.0) {
        return Err(Error::Domain {
            name: "energy",
            value: energy,
            range: "(0, ∞)",
        });
    }
    let areas = domain.areas();
    if n == 1 {
        return Ok(MvpSplit {
            masses: vec![1.0],
            energies: vec![energy],
            entropy: disk_entropy_of_energy(energy, areas[0])?,
            mass_step: 0.0,
            energy_step: 0.0,
            exhaustive: true,
        });
    }
    if n > 3 {
        return Err(Error::Unsupported(format!(
            "exhaustive grid search is limited to N ≤ 3 (got {n}); use the branch method or local_ascent_mvp"
        )));
    }
    if opts.points < 4 || opts.refine_points < 3 || opts.refine_points % 2 == 0 || !(opts.shrink > 1.0) {
        return Err(Error::Resolution(format!("invalid grid options {opts:?}")));
    }
    let free = n - 1;
    let p = opts.points;
    let mut lat = Lattice {
        m0: [1.0 / p as f64; 2],
        e0: [energy / p as f64; 2],
        dm: 1.0 / p as f64,
        de: energy / p as f64,
        count: p - 1,
    };
    let mut best = search(&areas, energy, &lat, free);
    let half = (opts.refine_points / 2) as f64;
    let mut moves = 0;
    let mut round = 0;
    // extra rounds while the optimum hugs the positivity floor of a coordinate
    let at_floor = |lat: &Lattice, best: &Best| {
        (0..free).any(|i| {
            lat.m0[i] + (best.idx[i] as f64 - 1.0) * lat.dm <= 0.5 * lat.dm
                || lat.e0[i] + (best.idx[2 + i] as f64 - 1.0) * lat.de <= 0.5 * lat.de
        })
    };
    while round < opts.refine_rounds || (at_floor(&lat, &best) && round < opts.refine_rounds + MAX_FLOOR_ROUNDS) {
        round += 1;
        let mut dm = lat.dm / opts.shrink;
        let mut de = lat.de / opts.shrink;
        loop {
            let mut next = Lattice {
                m0: [0.0; 2],
                e0: [0.0; 2],
                dm,
                de,
                count: opts.refine_points,
            };
            for i in 0..free {
                next.m0[i] = lat.m0[i] + best.idx[i] as f64 * lat.dm - half * dm;
                next.e0[i] = lat.e0[i] + best.idx[2 + i] as f64 * lat.de - half * de;
            }
            lat = next;
            best = search(&areas, energy, &lat, free);
            // optimum on the window edge: slide the window, keep the step
            let last = opts.refine_points - 1;
            let on_edge = (0..free).any(|i| {
                let (j, k) = (best.idx[i], best.idx[2 + i]);
                (j == 0 && lat.m0[i] - dm > 0.5 * dm)
                    || j == last
                    || (k == 0 && lat.e0[i] - de > 0.5 * de)
                    || k == last
            });
            if !on_edge || moves >= MAX_WINDOW_MOVES || !best.value.is_finite() {
                break;
            }
            moves += 1;
            dm = lat.dm;
            de = lat.de;
        }
    }
    if !best.value.is_finite() {
        return Err(Error::Infeasible(format!("no admissible split at E = {energy}")));
    }
    let mut masses = vec![0.0; n];
    let mut energies = vec![0.0; n];
    for i in 0..free {
        masses[i + 1] = lat.m0[i] + best.idx[i] as f64 * lat.dm;
        energies[i + 1] = lat.e0[i] + best.idx[2 + i] as f64 * lat.de;
    }
    masses[0] = 1.0 - masses[1..].iter().sum::<f64>();
    energies[0] = energy - energies[1..].iter().sum::<f64>();
    let entropy = compensated_sum((0..n).map(|i| component_entropy(masses[i], energies[i], areas[i])));
    Ok(MvpSplit {
        masses,
        energies,
        entropy,
        mass_step: lat.dm,
        energy_step: lat.de,
        exhaustive: true,
    })
}

fn search(areas: &[f64], energy: f64, lat: &Lattice, free: usize) -> Best {
    let c = lat.count;
    let table = |area: f64, m0: f64, e0: f64, dm: f64, de: f64, len: usize| -> Vec<f64> {
        (0..len * len)
            .into_par_iter()
            .map(|t| component_entropy(m0 + (t / len) as f64 * dm, e0 + (t % len) as f64 * de, area))
            .collect()
    };
    let others: Vec<Vec<f64>> = (0..free)
        .map(|i| table(areas[i + 1], lat.m0[i], lat.e0[i], lat.dm, lat.de, c))
        .collect();
    // component 1 is indexed by the summed lattice offsets
    let len1 = free * (c - 1) + 1;
    let m1_0 = 1.0 - lat.m0[..free].iter().sum::<f64>();
    let e1_0 = energy - lat.e0[..free].iter().sum::<f64>();
    let first = table(areas[0], m1_0, e1_0, -lat.dm, -lat.de, len1);
    let none = Best {
        value: f64::NEG_INFINITY,
        idx: [usize::MAX; 4],
    };
    if free == 1 {
        let f2 = &others[0];
        (0..c)
            .into_par_iter()
            .map(|j| {
                let mut b = Best { value: f64::NEG_INFINITY, idx: [usize::MAX; 4] };
                for k in 0..c {
                    let v = first[j * len1 + k] + f2[j * c + k];
                    if v > b.value {
                        b = Best { value: v, idx: [j, 0, k, 0] };
                    }
                }
                b
            })
            .reduce(|| Best { value: f64::NEG_INFINITY, idx: [usize::MAX; 4] }, better)
    } else {
        let (f2, f3) = (&others[0], &others[1]);
        let best = (0..c)
            .into_par_iter()
            .map(|j2| {
                let mut b = Best { value: f64::NEG_INFINITY, idx: [usize::MAX; 4] };
                for j3 in 0..c {
                    let row1 = &first[(j2 + j3) * len1..(j2 + j3 + 1) * len1];
                    if row1.iter().all(|v| *v == f64::NEG_INFINITY) {
                        continue;
                    }
                    let row2 = &f2[j2 * c..(j2 + 1) * c];
                    let row3 = &f3[j3 * c..(j3 + 1) * c];
                    for (k2, &v2) in row2.iter().enumerate() {
                        if v2 == f64::NEG_INFINITY {
                            continue;
                        }
                        for (k3, &v3) in row3.iter().enumerate() {
                            let v = row1[k2 + k3] + v2 + v3;
                            if v > b.value {
                                b = Best { value: v, idx: [j2, j3, k2, k3] };
                            }
                        }
                    }
                }
                b
            })
            .reduce(|| Best { value: f64::NEG_INFINITY, idx: [usize::MAX; 4] }, better);
        better(none, best)
    }
}

/// Multi-start coordinate ascent for any `N`. Not exhaustive: it returns the
/// best local maximum reached from the deterministic starts.
pub fn local_ascent_mvp(domain: &DomainSpec, energy: f64, tol: f64) -> Result<MvpSplit> {
    let n = domain.len();
    let areas = domain.areas();
    if n == 1 || !(energy > 0.0) {
        return grid_mvp(domain, energy, GridMvpOptions::default());
    }
    let total: f64 = areas.iter().sum();
    let objective = |m: &[f64], e: &[f64]| compensated_sum((0..n).map(|i| component_entropy(m[i], e[i], areas[i])));
    let mut starts: Vec<Vec<f64>> = vec![
        areas.iter().map(|a| a / total).collect(),
        vec![1.0 / n as f64; n],
    ];
    let sq: f64 = areas.iter().map(|a| a * a).sum();
    starts.push(areas.iter().map(|a| a * a / sq).collect());
    let mut best: Option<MvpSplit> = None;
    for masses in starts {
        let m2: f64 = masses.iter().map(|m| m * m).sum();
        let mut m = masses.clone();
        let mut e: Vec<f64> = masses.iter().map(|x| energy * x * x / m2).collect();
        let mut value = objective(&m, &e);
        let mut step = [0.1, 0.1 * energy];
        while step[0] > tol || step[1] > tol * energy {
            let mut improved = false;
            for which in 0..2 {
                for i in 1..n {
                    for sign in [1.0, -1.0] {
                        let (v, d) = if which == 0 { (&mut m, step[0]) } else { (&mut e, step[1]) };
                        v[i] += sign * d;
                        v[0] -= sign * d;
                        let trial = objective(&m, &e);
                        if trial > value {
                            value = trial;
                            improved = true;
                        } else {
                            let v = if which == 0 { &mut m } else { &mut e };
                            v[i] -= sign * d;
                            v[0] += sign * d;
                        }
                    }
                }
            }
            if !improved {
                step[0] *= 0.5;
                step[1] *= 0.5;
            }
        }
        let cand = MvpSplit {
            masses: m,
            energies: e,
            entropy: value,
            mass_step: step[0],
            energy_step: step[1],
            exhaustive: false,
        };
        if best.as_ref().map_or(true, |b| cand.entropy > b.entropy) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Infeasible("no start".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub beta: f64,
    pub profile: DiskProfile,
    pub partition: f64,
    pub energy: f64,
    pub nodes: usize,
    pub newton_iterations: usize,
}

pub const DEFAULT_RADIAL_NODES: usize = 20_000;
const RADIAL_MAX_NEWTON: usize = 200;

/// Finite-volume solve of `Ψ″ + Ψ′/r = −e^{−βΨ}/Z`, `Ψ′(0) = 0`, `Ψ(R) = 0`,
/// `∫ρ = 1`, with `(Ψ, ln Z)` found jointly by Newton. Values are Richardson
/// extrapolated from `nodes` and `2·nodes` cells.
pub fn radial_mfe_solve(beta: f64, area: f64, nodes: usize) -> Result<RadialSolution> {
    if !(beta > -EIGHT_PI) || !beta.is_finite() {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            range: "(−8π, ∞)",
        });
    }
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::Domain {
            name: "area",
            value: area,
            range: "(0, ∞)",
        });
    }
    if nodes < 8 {
        return Err(Error::Resolution(format!("{nodes} radial cells")));
    }
    let radius = (area / PI).sqrt();
    let coarse = RadialFv::new(radius, nodes).solve(beta)?;
    let fine = RadialFv::new(radius, 2 * nodes).solve(beta)?;
    let rich = |c: f64, f: f64| (4.0 * f - c) / 3.0;
    let h = radius / nodes as f64;
    let samples = (0..=nodes)
        .map(|j| {
            let r = if j == nodes { radius } else { j as f64 * h };
            let psi = rich(coarse.psi[j], fine.psi[2 * j]);
            ProfileSample {
                r,
                psi,
                rho: (-beta * psi).exp() / rich(coarse.partition, fine.partition),
            }
        })
        .collect();
    Ok(RadialSolution {
        beta,
        profile: DiskProfile {
            mu: -beta / EIGHT_PI,
            radius,
            samples,
        },
        partition: rich(coarse.partition, fine.partition),
        energy: rich(coarse.energy, fine.energy),
        nodes,
        newton_iterations: coarse.iterations.max(fine.iterations),
    })
}

struct RadialFv {
    h: f64,
    n: usize,
    /// Control volumes `∫r dr` of nodes `0..=n`.
    vol: Vec<f64>,
    /// `r_{j+½}/h` for `j = 0..n`.
    cond: Vec<f64>,
}

struct RadialRaw {
    psi: Vec<f64>,
    partition: f64,
    energy: f64,
    iterations: usize,
}

impl RadialFv {
    fn new(radius: f64, n: usize) -> Self {
        let h = radius / n as f64;
        let mut vol: Vec<f64> = (0..=n).map(|j| j as f64 * h * h).collect();
        vol[0] = h * h / 8.0;
        vol[n] = radius * h / 2.0 - h * h / 8.0;
        let cond = (0..n).map(|j| j as f64 + 0.5).collect();
        Self { h, n, vol, cond }
    }

    fn solve(&self, beta: f64) -> Result<RadialRaw> {
        let n = self.n;
        // uniform state, then continuation in μ = −β/8π with 1−μ shrinking by
        // at most 30% per step so that Newton stays in its basin near −8π
        let radius = self.h * n as f64;
        let mut psi: Vec<f64> = (0..n)
            .map(|j| {
                let r = j as f64 * self.h;
                (radius * radius - r * r) / (4.0 * PI * radius * radius)
            })
            .collect();
        let mut w = (PI * radius * radius).ln();
        let target = -beta / EIGHT_PI;
        let mut path = Vec::new();
        let mut mu = 0.0f64;
        while mu != target {
            let next = if target > mu {
                let capped = 1.0 - 0.7 * (1.0 - mu);
                target.min(capped).min(mu + 0.125)
            } else {
                target.max(mu - 0.125)
            };
            path.push(next);
            mu = next;
        }
        let mut iterations = 0;
        for m in path {
            iterations += self.newton(-EIGHT_PI * m, &mut psi, &mut w)?;
        }
        let mut energy = CompensatedSum::new();
        for j in 0..n {
            let next = if j + 1 < n { psi[j + 1] } else { 0.0 };
            let d = next - psi[j];
            energy.add(self.cond[j] * d * d);
        }
        let mut full = psi;
        full.push(0.0);
        Ok(RadialRaw {
            psi: full,
            partition: w.exp(),
            energy: PI * energy.value(),
            iterations,
        })
    }

    /// Residual of the discrete system, and optionally its bordered Jacobian.
    fn residual(&self, beta: f64, psi: &[f64], w: f64, jac: Option<&mut Jacobian>) -> (Vec<f64>, f64) {
        let n = self.n;
        let two_pi = 2.0 * PI;
        let mut f = vec![0.0; n];
        let mut mass = CompensatedSum::new();
        let mut jac = jac;
        for j in 0..n {
            let ex = (-beta * psi[j] - w).exp() * self.vol[j];
            let left = if j > 0 { self.cond[j - 1] } else { 0.0 };
            let right = self.cond[j];
            let pl = if j > 0 { psi[j - 1] } else { 0.0 };
            let pr = if j + 1 < n { psi[j + 1] } else { 0.0 };
            f[j] = (left + right) * psi[j] - left * pl - right * pr - ex;
            if let Some(m) = jac.as_deref_mut() {
                m.sub[j] = -left;
                m.sup[j] = -right;
                m.diag[j] = left + right + beta * ex;
                m.col[j] = ex;
                m.row[j] = -two_pi * beta * ex;
            }
            mass.add(ex);
        }
        mass.add((-w).exp() * self.vol[n]);
        if let Some(m) = jac {
            m.corner = -two_pi * mass.value();
        }
        (f, two_pi * mass.value() - 1.0)
    }

    fn residual_norm(&self, f: &[f64], g: f64) -> f64 {
        f.iter()
            .enumerate()
            .map(|(j, v)| (v / (2.0 * j as f64 + 1.0)).abs())
            .fold(g.abs(), f64::max)
    }

    fn newton(&self, beta: f64, psi: &mut [f64], w: &mut f64) -> Result<usize> {
        let n = self.n;
        let mut jac = Jacobian::new(n);
        let mut stalled = 0;
        let mut last_step = f64::INFINITY;
        for it in 0..RADIAL_MAX_NEWTON {
            let (f, g) = self.residual(beta, psi, *w, Some(&mut jac));
            let norm = self.residual_norm(&f, g);
            let mut dx: Vec<f64> = f.iter().map(|v| -v).collect();
            let Jacobian { sub, diag, sup, col, row, corner } = &mut jac;
            let dw = bordered_tridiagonal(sub, diag, sup, col, row, *corner, &mut dx, -g)?;
            // damped step: halve until the residual decreases or is tiny
            let mut t = 1.0;
            loop {
                let trial: Vec<f64> = psi.iter().zip(&dx).map(|(p, d)| p + t * d).collect();
                let (tf, tg) = self.residual(beta, &trial, *w + t * dw, None);
                let tn = self.residual_norm(&tf, tg);
                if tn.is_finite() && (tn < norm || norm < 1e-13) {
                    break;
                }
                t *= 0.5;
                if t < 1e-6 {
                    return Err(Error::NoConvergence {
                        what: "radial Newton line search",
                        iterations: it,
                    });
                }
            }
            for j in 0..n {
                psi[j] += t * dx[j];
            }
            *w += t * dw;
            let scale = psi.iter().fold(1.0f64, |m, p| m.max(p.abs()));
            let step = dx.iter().fold(dw.abs(), |m, d| m.max(d.abs())) * t / scale;
            if step < 1e-15 {
                return Ok(it + 1);
            }
            // rounding floor: quadratic convergence has stopped
            if step < 1e-8 && step > 0.25 * last_step {
                stalled += 1;
                if stalled >= 2 {
                    return Ok(it + 1);
                }
            }
            last_step = step;
        }
        Err(Error::NoConvergence {
            what: "radial Newton",
            iterations: RADIAL_MAX_NEWTON,
        })
    }
}

struct Jacobian {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    col: Vec<f64>,
    row: Vec<f64>,
    corner: f64,
}

impl Jacobian {
    fn new(n: usize) -> Self {
        Self {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            col: vec![0.0; n],
            row: vec![0.0; n],
            corner: 0.0,
        }
    }
}


/// Solves `[T c; rᵀ d] [x; y] = [b; g]` with tridiagonal `T`, using adjacent-row
/// partial pivoting so that a singular `T` (the fold of the fixed-`Z` problem)
/// is harmless. `x` overwrites `b`; returns `y`.
#[allow(clippy::too_many_arguments)]
fn bordered_tridiagonal(
    sub: &mut [f64],
    diag: &mut [f64],
    sup: &mut [f64],
    col: &mut [f64],
    row: &mut [f64],
    corner: f64,
    b: &mut [f64],
    g: f64,
) -> Result<f64> {
    let n = diag.len();
    // Row k after elimination: u0 at k, u1 at k+1, u2 at k+2, border col[k].
    let mut u2 = vec![0.0; n];
    let mut d = corner;
    let mut gg = g;
    // dense last row entries on columns k, k+1 while sweeping
    let mut r0 = row[0];
    let mut r1 = if n > 1 { row[1] } else { 0.0 };
    if n < 2 {
        return Err(Error::Resolution("bordered solve needs two rows".into()));
    }
    for k in 0..n - 1 {
        if sub[k + 1].abs() > diag[k].abs() {
            // swap rows k and k+1 (row k+1 has entries at k, k+1, k+2)
            let (a0, a1, a2, ac, ab) = (sub[k + 1], diag[k + 1], if k + 2 < n { sup[k + 1] } else { 0.0 }, col[k + 1], b[k + 1]);
            let (p0, p1, p2, pc, pb) = (diag[k], sup[k], u2[k], col[k], b[k]);
            diag[k] = a0;
            sup[k] = a1;
            u2[k] = a2;
            col[k] = ac;
            b[k] = ab;
            sub[k + 1] = p0;
            diag[k + 1] = p1;
            if k + 2 < n {
                sup[k + 1] = p2;
            }
            col[k + 1] = pc;
            b[k + 1] = pb;
        }
        let piv = diag[k];
        if piv == 0.0 {
            return Err(Error::NoConvergence {
                what: "radial linear solve",
                iterations: k,
            });
        }
        let l = sub[k + 1] / piv;
        diag[k + 1] -= l * sup[k];
        if k + 2 < n {
            sup[k + 1] -= l * u2[k];
        }
        col[k + 1] -= l * col[k];
        b[k + 1] -= l * b[k];
        sub[k + 1] = 0.0;
        // eliminate the dense row's entry on column k
        let l = r0 / piv;
        r0 = r1 - l * sup[k];
        r1 = if k + 2 < n { row[k + 2] - l * u2[k] } else { 0.0 };
        d -= l * col[k];
        gg -= l * b[k];
    }
    // remaining 2×2 system in (x_{n−1}, y)
    let last = n - 1;
    let det = diag[last] * d - col[last] * r0;
    if det == 0.0 || !det.is_finite() {
        return Err(Error::NoConvergence {
            what: "radial linear solve",
            iterations: n,
        });
    }
    let y = (diag[last] * gg - r0 * b[last]) / det;
    b[last] = (b[last] * d - col[last] * gg) / det;
    for k in (0..last).rev() {
        let mut s = b[k] - col[k] * y;
        if k + 1 < n {
            s -= sup[k] * b[k + 1];
        }
        if k + 2 < n {
            s -= u2[k] * b[k + 2];
        }
        b[k] = s / diag[k];
    }
    Ok(y)
}

/// Sup-norm and energy comparison of [`radial_mfe_solve`] with the closed form.
pub fn radial_report(betas: &[f64], area: f64, nodes: usize) -> Result<OracleReport> {
    let mut reference = Vec::new();
    let mut oracle = Vec::new();
    let mut sup_psi = 0.0f64;
    let mut sup_rho_rel = 0.0f64;
    for &beta in betas {
        let sol = radial_mfe_solve(beta, area, nodes)?;
        let radii: Vec<f64> = sol.profile.samples.iter().map(|s| s.r).collect();
        let exact = crate::disk::stream_profile_of_beta(beta, sol.profile.radius, &radii)?;
        for (a, b) in exact.samples.iter().zip(&sol.profile.samples) {
            sup_psi = sup_psi.max((a.psi - b.psi).abs());
            sup_rho_rel = sup_rho_rel.max((a.rho - b.rho).abs() / a.rho);
        }
        reference.push(crate::disk::disk_energy_of_beta(beta)?);
        oracle.push(sol.energy);
    }
    Ok(OracleReport::new("radial_mfe_solve", reference, oracle)
        .with("area", area)
        .with("nodes", nodes as f64)
        .with("sup_psi_err", sup_psi)
        .with("sup_rho_rel_err", sup_rho_rel))
}

/// Envelope entropies against [`grid_mvp`] at the given energies.
pub fn envelope_report(domain: &DomainSpec, energies: &[f64], envelope_entropy: &[f64], opts: GridMvpOptions) -> Result<OracleReport> {
    let oracle = energies
        .iter()
        .map(|&e| grid_mvp(domain, e, opts).map(|s| s.entropy))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport::new("entropy_envelope", envelope_entropy.to_vec(), oracle)
        .with("points", opts.points as f64)
        .with("refine_rounds", opts.refine_rounds as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::{disk_state_of_beta, e_of_mu};

    #[test]
    fn disk_entropy_examples() {
        let em = 1.0 / (16.0 * PI);
        assert!(disk_entropy_of_energy(em, 1.0).unwrap().abs() < 1e-12);
        assert!((disk_entropy_of_energy(em, 2.5).unwrap() - 2.5f64.ln()).abs() < 1e-12);
        let e = e_of_mu(0.5).unwrap();
        let s = disk_entropy_of_energy(e, 1.0).unwrap();
        assert!((s - (2f64.ln() - 8.0 * PI * e)).abs() < 1e-12);
        for &beta in &[-7.5 * PI, -PI, 3.0, 40.0] {
            let st = disk_state_of_beta(beta, 1.0).unwrap();
            let back = disk_state_of_energy(st.energy, 1.0).unwrap();
            assert!((back.beta - beta).abs() < 1e-9 * beta.abs().max(1.0), "{beta} {}", back.beta);
            assert!((back.entropy - st.entropy).abs() < 1e-11);
        }
    }

    #[test]
    fn entropy_slope_is_beta() {
        for &e in &[0.005, 0.02, 0.1] {
            let h = 1e-6 * e;
            let ds = (disk_entropy_of_energy(e + h, 1.0).unwrap() - disk_entropy_of_energy(e - h, 1.0).unwrap()) / (2.0 * h);
            let beta = disk_state_of_energy(e, 1.0).unwrap().beta;
            assert!((ds - beta).abs() < 1e-5 * beta.abs().max(1.0));
        }
    }

    #[test]
    fn half_mass_scaling() {
        let e = e_of_mu(0.5).unwrap();
        let s = component_entropy(0.5, e / 4.0, 1.0);
        let expect = 0.5 * disk_entropy_of_energy(e, 1.0).unwrap() + 0.5 * 2f64.ln();
        assert!((s - expect).abs() < 1e-12);
    }

    #[test]
    fn single_component_grid() {
        let d = DomainSpec::disks(&[1.0]).unwrap();
        let s = grid_mvp(&d, 0.03, GridMvpOptions::default()).unwrap();
        assert_eq!(s.masses, vec![1.0]);
        assert_eq!(s.entropy, disk_entropy_of_energy(0.03, 1.0).unwrap());
    }

    #[test]
    fn symmetric_split_for_identical_disks() {
        let d = DomainSpec::disks(&[1.0, 1.0]).unwrap();
        let em = d.uniform_energy();
        let s = grid_mvp(&d, 1.2 * em, GridMvpOptions { points: 60, ..Default::default() }).unwrap();
        assert!((s.masses[0] - 0.5).abs() < 1e-4, "{:?}", s.masses);
        assert!((s.energies[0] - s.energies[1]).abs() < 1e-4 * em);
    }

    #[test]
    fn uniform_state_is_the_grid_maximum() {
        let d = DomainSpec::disks(&[1.0, 0.6, 0.2]).unwrap();
        let s = grid_mvp(&d, d.uniform_energy(), GridMvpOptions { points: 40, ..Default::default() }).unwrap();
        assert!(s.entropy <= d.uniform_entropy() + 1e-12);
        assert!(d.uniform_entropy() - s.entropy < 1e-7);
    }

    #[test]
    fn grid_refuses_large_n() {
        let d = DomainSpec::disks(&[1.0; 4]).unwrap();
        assert!(matches!(grid_mvp(&d, 0.01, GridMvpOptions::default()), Err(Error::Unsupported(_))));
        let s = local_ascent_mvp(&d, d.uniform_energy(), 1e-10).unwrap();
        assert!((s.entropy - d.uniform_entropy()).abs() < 1e-8);
        assert!(!s.exhaustive);
    }

    #[test]
    fn radial_uniform_and_mid() {
        let sol = radial_mfe_solve(0.0, 1.0, 2000).unwrap();
        assert!((sol.energy - 1.0 / (16.0 * PI)).abs() < 1e-10);
        assert!((sol.partition - 1.0).abs() < 1e-10);
        let sol = radial_mfe_solve(-4.0 * PI, 1.0, 4000).unwrap();
        let radii: Vec<f64> = sol.profile.samples.iter().map(|s| s.r).collect();
        let exact = crate::disk::stream_profile(0.5, sol.profile.radius, &radii).unwrap();
        let err = exact
            .samples
            .iter()
            .zip(&sol.profile.samples)
            .map(|(a, b)| (a.psi - b.psi).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        let sol = radial_mfe_solve(8.0 * PI, 1.0, 2000).unwrap();
        assert!(sol.partition < 1.0);
        assert!(sol.energy < 1.0 / (16.0 * PI));
    }
}
