//! Chains of disks joined by capsule channels, and comparisons against the
//! closed-form branches of the disconnected union.

use std::f64::consts::PI;

use serde::Serialize;
use vpl_core::branch::{from_gamma, BranchPoint, DomainSpec, Root};
use vpl_core::disk::EIGHT_PI;

use crate::error::{Error, Result};
use crate::geometry::{GeometrySpec, Primitive};
use crate::mesh::Mesh;
use crate::solver::{disk_seed, PdeSolution};

/// Channel length between neighbouring disk rims, relative to the largest
/// radius.
pub const DEFAULT_GAP_FRACTION: f64 = 0.5;

/// Disks of the given areas on the x-axis, left to right, rims separated by
/// `gap_fraction·R_max`.
pub fn chain_disks(areas: &[f64], gap_fraction: f64) -> Result<Vec<([f64; 2], f64)>> {
    if areas.is_empty() || areas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::Geometry(format!("bad disk areas {areas:?}")));
    }
    if !(gap_fraction > 0.0 && gap_fraction.is_finite()) {
        return Err(Error::Domain {
            name: "gap_fraction",
            value: gap_fraction,
            range: "(0, ∞)",
        });
    }
    let radii: Vec<f64> = areas.iter().map(|a| (a / PI).sqrt()).collect();
    let gap = gap_fraction * radii.iter().copied().fold(0.0, f64::max);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(areas.len());
    for (i, &r) in radii.iter().enumerate() {
        if i > 0 {
            x += radii[i - 1] + gap + r;
        }
        out.push(([x, 0.0], r));
    }
    Ok(out)
}

/// Chain of disks joined centre to centre by channels of width
/// `width_fraction·R_max`; a zero width leaves the disks disjoint.
pub fn chain_geometry(areas: &[f64], width_fraction: f64, gap_fraction: f64) -> Result<GeometrySpec> {
    let disks = chain_disks(areas, gap_fraction)?;
    let r_max = disks.iter().map(|d| d.1).fold(0.0, f64::max);
    let mut prims: Vec<Primitive> = disks
        .iter()
        .map(|&(center, radius)| Primitive::Disk { center, radius })
        .collect();
    if width_fraction > 0.0 {
        for w in disks.windows(2) {
            prims.push(Primitive::Channel {
                from: w[0].0,
                to: w[1].0,
                width: width_fraction * r_max,
            });
        }
    } else if width_fraction < 0.0 || !width_fraction.is_finite() {
        return Err(Error::Domain {
            name: "width_fraction",
            value: width_fraction,
            range: "[0, ∞)",
        });
    }
    GeometrySpec::new(prims, width_fraction > 0.0)
}

/// Disk profiles with parameters `mus` inside each disk, zero in channels.
pub fn chain_seed(mesh: &Mesh, disks: &[([f64; 2], f64)], mus: &[f64]) -> Vec<f64> {
    let mut u = vec![0.0; mesh.len()];
    for (&(c, r), &mu) in disks.iter().zip(mus) {
        disk_seed(mesh, c, r, mu, &mut u);
    }
    u
}

/// `λ` shared by disk states `μᵢ(1−μᵢ) = aᵢλ/8π`; uses the first disk.
pub fn seed_lambda(areas: &[f64], mus: &[f64]) -> f64 {
    EIGHT_PI * mus[0] * (1.0 - mus[0]) / areas[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    pub beta: f64,
    pub z: f64,
    pub energy: f64,
    pub entropy: f64,
}

impl Observables {
    pub fn of_solution(s: &PdeSolution) -> Self {
        Observables {
            beta: s.beta,
            z: s.z,
            energy: s.energy,
            entropy: s.entropy,
        }
    }

    /// Componentwise relative deviation from `reference`.
    pub fn relative_error(&self, reference: &Observables) -> [f64; 4] {
        let r = |a: f64, b: f64| (a - b).abs() / b.abs();
        [
            r(self.beta, reference.beta),
            r(self.z, reference.z),
            r(self.energy, reference.energy),
            r(self.entropy, reference.entropy),
        ]
    }
}

/// Closed-form state of the disjoint disks at the PDE parameter `λ`, with
/// the given root per disk.
pub fn disconnected_state(areas: &[f64], lambda: f64, signs: &[Root]) -> Result<(Observables, BranchPoint)> {
    let domain = DomainSpec::disks(areas)?;
    if domain.was_reordered() {
        return Err(Error::Geometry("chain areas must be non-increasing".into()));
    }
    // Areas are divided by `s`; β and E are scale invariant, Z scales by `s`.
    let s = domain.scale();
    let p = from_gamma(&domain, s * lambda / EIGHT_PI, signs)?;
    let obs = Observables {
        beta: p.beta,
        z: s * p.z,
        energy: p.energy,
        entropy: p.entropy + s.ln(),
    };
    Ok((obs, p))
}

/// Lower-branch state at one channel width and one `μ`.
#[derive(Debug, Clone, Serialize)]
pub struct WidthRow {
    pub width_fraction: f64,
    pub mu: f64,
    pub lambda: f64,
    pub nodes: usize,
    pub pde: Observables,
    pub reference: Observables,
    /// Relative deviation of `pde` from `reference` for `(β, Z, E, S)`.
    pub error: [f64; 4],
    pub energy_mismatch: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBranchStudy {
    pub h: f64,
    pub gap_fraction: f64,
    pub rows: Vec<WidthRow>,
}

impl LowerBranchStudy {
    pub fn rows_for(&self, width_fraction: f64) -> impl Iterator<Item = &WidthRow> {
        self.rows.iter().filter(move |r| r.width_fraction == width_fraction)
    }

    /// Whether every error component decreases strictly from each width to
    /// the next smaller one, at every `μ`.
    pub fn monotone(&self) -> bool {
        let mut widths: Vec<f64> = self.rows.iter().map(|r| r.width_fraction).filter(|w| *w > 0.0).collect();
        widths.sort_by(|a, b| b.total_cmp(a));
        widths.dedup();
        widths.windows(2).all(|w| {
            self.rows_for(w[0]).all(|a| {
                self.rows_for(w[1])
                    .filter(|b| b.mu == a.mu)
                    .all(|b| (0..4).all(|c| b.error[c] < a.error[c]))
            })
        })
    }

    /// Largest error component over all rows of positive width.
    pub fn max_error(&self, component: usize) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.width_fraction > 0.0)
            .map(|r| r.error[component])
            .fold(0.0, f64::max)
    }
}

/// Lower-branch PDE states at `λ = 8πμ(1−μ)/a₁` on chains with each channel
/// width, compared with the disconnected 0-branch. A zero width is the
/// disjoint raster at the same `h`, which isolates the discretization error.
pub fn lower_branch_study(areas: &[f64], widths: &[f64], mus: &[f64], gap_fraction: f64, h: f64) -> Result<LowerBranchStudy> {
    let disks = chain_disks(areas, gap_fraction)?;
    let mut sorted_mus = mus.to_vec();
    sorted_mus.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &wf in widths {
        let geometry = chain_geometry(areas, wf, gap_fraction)?;
        let mesh = crate::mesh::rasterize(&geometry, h)?;
        let problem = crate::solver::Problem::new(&mesh)?;
        let mut prev: Option<Vec<f64>> = None;
        for &mu in &sorted_mus {
            let lambda = EIGHT_PI * mu * (1.0 - mu) / areas[0];
            let seed = match prev.take() {
                Some(u) => u,
                None => chain_seed(&mesh, &disks, &family_seed_mus(areas, mu, None)?.0),
            };
            let s = problem.solve(
                &crate::solver::Constraint::Lambda(lambda),
                &seed,
                lambda,
                &crate::solver::NewtonOptions::default(),
            )?;
            let (reference, _) = disconnected_state(areas, lambda, &vec![Root::Minus; areas.len()])?;
            let pde = Observables::of_solution(&s);
            rows.push(WidthRow {
                width_fraction: wf,
                mu,
                lambda,
                nodes: mesh.len(),
                error: pde.relative_error(&reference),
                pde,
                reference,
                energy_mismatch: s.energy_mismatch(),
            });
            prev = Some(s.u);
        }
    }
    Ok(LowerBranchStudy {
        h,
        gap_fraction,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracedPoint {
    pub lambda: f64,
    pub energy: f64,
    pub entropy: f64,
    pub beta: f64,
    pub z: f64,
}

/// One solution family traced by arclength from seeded disk states.
#[derive(Debug, Clone, Serialize)]
pub struct Family {
    /// Disk seeded on the large root, if any.
    pub plus: Option<usize>,
    pub points: Vec<TracedPoint>,
    /// Index ranges `[start, end]` on which the energy is monotone.
    pub pieces: Vec<(usize, usize)>,
    pub failure: Option<String>,
    #[serde(skip)]
    states: Vec<Option<Vec<f64>>>,
}

impl Family {
    fn piece_points(&self, piece: usize) -> Vec<TracedPoint> {
        let (a, b) = self.pieces[piece];
        let mut v = self.points[a..=b].to_vec();
        v.sort_by(|p, q| p.energy.total_cmp(&q.energy));
        v
    }
}

#[derive(Debug, Clone)]
pub struct CrossingOptions {
    pub reference_energy: f64,
    /// Half-width of the scanned energy window, relative to the reference.
    pub window: f64,
    pub start_mu: f64,
    pub start_step: f64,
    pub ds_max: f64,
    pub max_points: usize,
    /// Families to trace, by the disk seeded on the large root.
    pub families: Vec<Option<usize>>,
    /// Energies per scan of the envelope.
    pub scan_points: usize,
}

impl CrossingOptions {
    pub fn new(reference_energy: f64) -> Self {
        CrossingOptions {
            reference_energy,
            window: 0.02,
            start_mu: 0.45,
            start_step: 0.002,
            ds_max: 0.004,
            max_points: 400,
            families: vec![None, Some(0)],
            scan_points: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossingSide {
    pub family: usize,
    pub piece: usize,
    pub state: Observables,
    pub lambda: f64,
}

/// Two solutions of equal energy whose entropy order flips across it.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyCrossing {
    pub energy: f64,
    /// `(E − E_ref)/E_ref`.
    pub shift: f64,
    /// The maximizer just below the crossing, solved at the crossing energy.
    pub below: CrossingSide,
    pub above: CrossingSide,
    /// `max|U_below − U_above|`.
    pub u_distance: f64,
    pub delta: f64,
    /// `S_below − S_above` at `E − δ` and at `E + δ`, from energy-constrained
    /// solves.
    pub gap_below: f64,
    pub gap_above: f64,
}

impl EntropyCrossing {
    pub fn crosses(&self) -> bool {
        self.gap_below > 0.0 && self.gap_above < 0.0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingStudy {
    pub h: f64,
    pub width_fraction: f64,
    pub nodes: usize,
    pub families: Vec<Family>,
    pub crossings: Vec<EntropyCrossing>,
}

fn family_seed_mus(areas: &[f64], x: f64, plus: Option<usize>) -> Result<(Vec<f64>, f64)> {
    let lambda = EIGHT_PI * x * (1.0 - x) / areas[0];
    let mus = areas
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let sign = if Some(i) == plus { Root::Plus } else { Root::Minus };
            vpl_core::branch::mu_pm(lambda * a / EIGHT_PI, 1.0, sign)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((mus, lambda))
}

fn monotone_pieces(points: &[TracedPoint]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if points.len() < 2 {
        return out;
    }
    let mut start = 0;
    let mut up = points[1].energy > points[0].energy;
    for k in 2..points.len() {
        let now = points[k].energy > points[k - 1].energy;
        if now != up {
            out.push((start, k - 1));
            start = k - 1;
            up = now;
        }
    }
    out.push((start, points.len() - 1));
    out
}

/// Cubic Hermite value of `S` at `e` on energy-sorted points, with
/// `dS/dE = β`.
fn hermite_entropy(points: &[TracedPoint], e: f64) -> Option<f64> {
    points.windows(2).find(|w| w[0].energy <= e && e <= w[1].energy && w[1].energy > w[0].energy).map(|w| {
        let (p, q) = (w[0], w[1]);
        let h = q.energy - p.energy;
        let t = (e - p.energy) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * p.entropy
            + (t3 - 2.0 * t2 + t) * h * p.beta
            + (-2.0 * t3 + 3.0 * t2) * q.entropy
            + (t3 - t2) * h * q.beta
    })
}

fn trace_family(
    problem: &crate::solver::Problem,
    areas: &[f64],
    disks: &[([f64; 2], f64)],
    plus: Option<usize>,
    opts: &CrossingOptions,
) -> Result<Family> {
    use crate::continuation::{arclength_from, ContinuationOptions};
    use crate::solver::{Constraint, NewtonOptions};
    let mut start = Vec::with_capacity(2);
    for x in [opts.start_mu, opts.start_mu + opts.start_step] {
        let (mus, lambda) = family_seed_mus(areas, x, plus)?;
        let seed = match start.last() {
            Some(prev) => {
                let p: &PdeSolution = prev;
                p.u.clone()
            }
            None => chain_seed(problem.mesh(), disks, &mus),
        };
        start.push(problem.solve(&Constraint::Lambda(lambda), &seed, lambda, &NewtonOptions::default())?);
    }
    let b = start.pop().expect("two starts");
    let a = start.pop().expect("two starts");
    let (lo, hi) = (
        opts.reference_energy * (1.0 - opts.window),
        opts.reference_energy * (1.0 + opts.window),
    );
    let copts = ContinuationOptions {
        ds_max: opts.ds_max,
        max_points: opts.max_points,
        ..Default::default()
    };
    let mut entered = false;
    let branch = arclength_from(problem, a, b, &copts, |s| {
        let inside = s.energy >= lo && s.energy <= hi;
        let leave = entered && !inside;
        entered |= inside;
        leave
    });
    let points: Vec<TracedPoint> = branch
        .solutions
        .iter()
        .map(|s| TracedPoint {
            lambda: s.lambda,
            energy: s.energy,
            entropy: s.entropy,
            beta: s.beta,
            z: s.z,
        })
        .collect();
    let states = branch
        .solutions
        .into_iter()
        .map(|s| (s.energy >= lo && s.energy <= hi).then_some(s.u))
        .collect();
    Ok(Family {
        plus,
        pieces: monotone_pieces(&points),
        points,
        failure: branch.failure,
        states,
    })
}

/// Energy-constrained solve at `e`, seeded from the stored state on the given
/// piece whose energy is closest to `e`.
fn solve_on_piece(problem: &crate::solver::Problem, fam: &Family, piece: usize, e: f64) -> Result<PdeSolution> {
    use crate::solver::{Constraint, NewtonOptions};
    let (a, b) = fam.pieces[piece];
    let k = (a..=b)
        .filter(|&k| fam.states[k].is_some())
        .min_by(|&i, &j| {
            (fam.points[i].energy - e)
                .abs()
                .total_cmp(&(fam.points[j].energy - e).abs())
        })
        .ok_or_else(|| Error::Geometry("no stored state near the crossing".into()))?;
    let seed = fam.states[k].as_ref().expect("filtered");
    problem.solve(&Constraint::Energy(e), seed, fam.points[k].lambda, &NewtonOptions::default())
}

/// Traces the requested families on one chain, scans the entropy envelope
/// over the energy window and, at each switch of maximizer between two
/// pieces that both extend across it, solves for the two states at the
/// crossing energy and on either side of it.
pub fn entropy_crossing_study(areas: &[f64], width_fraction: f64, gap_fraction: f64, h: f64, opts: &CrossingOptions) -> Result<CrossingStudy> {
    let geometry = chain_geometry(areas, width_fraction, gap_fraction)?;
    let mesh = crate::mesh::rasterize(&geometry, h)?;
    let problem = crate::solver::Problem::new(&mesh)?;
    let disks = chain_disks(areas, gap_fraction)?;
    let families = opts
        .families
        .iter()
        .map(|&plus| trace_family(&problem, areas, &disks, plus, opts))
        .collect::<Result<Vec<_>>>()?;
    let pieces: Vec<(usize, usize, Vec<TracedPoint>)> = families
        .iter()
        .enumerate()
        .flat_map(|(f, fam)| (0..fam.pieces.len()).map(move |p| (f, p, fam.piece_points(p))))
        .collect();
    let (lo, hi) = (
        opts.reference_energy * (1.0 - opts.window),
        opts.reference_energy * (1.0 + opts.window),
    );
    let best = |e: f64| -> Option<(usize, f64)> {
        pieces
            .iter()
            .enumerate()
            .filter_map(|(i, p)| hermite_entropy(&p.2, e).map(|s| (i, s)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    };
    let n = opts.scan_points.max(2);
    let mut crossings = Vec::new();
    let mut prev: Option<(f64, usize)> = None;
    for k in 0..=n {
        let e = lo + (hi - lo) * k as f64 / n as f64;
        let Some((w, _)) = best(e) else {
            prev = None;
            continue;
        };
        if let Some((e0, w0)) = prev {
            if w0 != w {
                let d = |x: f64| Some(hermite_entropy(&pieces[w0].2, x)? - hermite_entropy(&pieces[w].2, x)?);
                if let (Some(d0), Some(d1)) = (d(e0), d(e)) {
                    if d0 > 0.0 && d1 < 0.0 {
                        let (mut a, mut b) = (e0, e);
                        for _ in 0..100 {
                            let m = 0.5 * (a + b);
                            if d(m).is_some_and(|v| v > 0.0) {
                                a = m;
                            } else {
                                b = m;
                            }
                        }
                        let ex = 0.5 * (a + b);
                        crossings.push(refine_crossing(&problem, &families, &pieces, (w0, w), ex, opts)?);
                    }
                }
            }
        }
        prev = Some((e, w));
    }
    Ok(CrossingStudy {
        h,
        width_fraction,
        nodes: mesh.len(),
        families,
        crossings,
    })
}

fn refine_crossing(
    problem: &crate::solver::Problem,
    families: &[Family],
    pieces: &[(usize, usize, Vec<TracedPoint>)],
    (pb, pa): (usize, usize),
    ex: f64,
    opts: &CrossingOptions,
) -> Result<EntropyCrossing> {
    let solve = |p: usize, e: f64| solve_on_piece(problem, &families[pieces[p].0], pieces[p].1, e);
    let sb = solve(pb, ex)?;
    let sa = solve(pa, ex)?;
    // Stay well inside both pieces so the side solves do not slide past a
    // turning point.
    let room = [pb, pa]
        .iter()
        .map(|&p| {
            let pts = &pieces[p].2;
            (ex - pts[0].energy).min(pts[pts.len() - 1].energy - ex)
        })
        .fold(f64::INFINITY, f64::min);
    let delta = (0.25 * room).min(1e-3 * ex);
    let gap = |e: f64| -> Result<f64> { Ok(solve(pb, e)?.entropy - solve(pa, e)?.entropy) };
    let u_distance = sb.u.iter().zip(&sa.u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let side = |p: usize, s: &PdeSolution| CrossingSide {
        family: pieces[p].0,
        piece: pieces[p].1,
        state: Observables::of_solution(s),
        lambda: s.lambda,
    };
    Ok(EntropyCrossing {
        energy: ex,
        shift: (ex - opts.reference_energy) / opts.reference_energy,
        below: side(pb, &sb),
        above: side(pa, &sa),
        u_distance,
        delta,
        gap_below: gap(ex - delta)?,
        gap_above: gap(ex + delta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_layout() {
        let d = chain_disks(&[1.0, 1.0, 1.0], 0.5).unwrap();
        let r = 1.0 / PI.sqrt();
        assert!((d[1].0[0] - 2.5 * r).abs() < 1e-15);
        assert!((d[2].0[0] - 5.0 * r).abs() < 1e-14);
        let g = chain_geometry(&[1.0, 1.0, 1.0], 0.1, 0.5).unwrap();
        assert_eq!(g.primitives.len(), 5);
        assert!(g.connected);
        assert!(!chain_geometry(&[1.0, 1.0, 1.0], 0.0, 0.5).unwrap().connected);
    }

    #[test]
    fn reference_consistent_with_lambda() {
        let areas = [1.0, 1.0, 1.0];
        let lambda = EIGHT_PI * 0.3 * 0.7;
        let (o, _) = disconnected_state(&areas, lambda, &[Root::Minus; 3]).unwrap();
        assert!((o.beta + 3.0 * EIGHT_PI * 0.3).abs() < 1e-12);
        assert!((-o.beta / o.z - lambda).abs() < 1e-12);
        let (o2, _) = disconnected_state(&[2.0, 2.0, 2.0], lambda / 2.0, &[Root::Minus; 3]).unwrap();
        assert!((o2.z - 2.0 * o.z).abs() < 1e-12);
        assert!((o2.energy - o.energy).abs() < 1e-15);
    }

    fn tp(energy: f64, entropy: f64, beta: f64) -> TracedPoint {
        TracedPoint {
            lambda: 1.0,
            energy,
            entropy,
            beta,
            z: 1.0,
        }
    }

    #[test]
    fn pieces_split_at_energy_turns() {
        let pts: Vec<_> = [0.0, 1.0, 2.0, 1.5, 1.0, 3.0].iter().map(|&e| tp(e, 0.0, 0.0)).collect();
        assert_eq!(monotone_pieces(&pts), vec![(0, 2), (2, 4), (4, 5)]);
    }

    #[test]
    fn hermite_is_exact_for_cubics() {
        let s = |e: f64| e * e * e - 2.0 * e;
        let ds = |e: f64| 3.0 * e * e - 2.0;
        let pts: Vec<_> = [0.0, 0.5, 1.5].iter().map(|&e| tp(e, s(e), ds(e))).collect();
        for e in [0.1, 0.7, 1.2] {
            assert!((hermite_entropy(&pts, e).unwrap() - s(e)).abs() < 1e-14);
        }
        assert!(hermite_entropy(&pts, 1.6).is_none());
    }
}
