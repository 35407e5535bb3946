//! Monotone segments of sampled branches, the microcanonical entropy envelope,
//! domain classification and first-order transition location.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::branch::{
    default_mu_grid, sample, Branch, BranchCurve, BranchPoint, BranchSelector, DomainSpec,
};
use crate::disk::EIGHT_PI;
use crate::error::{Error, Result};
use crate::numeric::{brent, RootOptions};

/// Relative accuracy of critical energies along a branch.
pub const CRITICAL_ENERGY_TOL: f64 = 1e-12;
/// Relative residual accepted when inverting `E(μ)`.
pub const INVERT_ENERGY_TOL: f64 = 1e-11;
/// Relative width of the final bracket around a transition energy.
pub const TRANSITION_TOL: f64 = 1e-12;
/// Entropies closer than this (relative) are reported as a tie.
pub const TIE_TOL: f64 = 1e-12;
/// Above this many critical points a curve is considered under-resolved.
pub const MAX_CRITICAL_POINTS: usize = 16;
/// Relative slack in `β ≤ −8π` when classifying.
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SegmentId {
    pub curve: usize,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    Increasing,
    Decreasing,
}

/// Role of a segment on a 0-branch with a local maximum followed by a local
/// minimum of the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    D,
    L,
    R,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSegment {
    pub id: SegmentId,
    #[serde(skip)]
    pub branch: Arc<Branch>,
    pub selector: BranchSelector,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub e_at_lo: f64,
    pub e_at_hi: f64,
    pub s_at_lo: f64,
    pub s_at_hi: f64,
    pub monotone: Monotone,
    pub role: Option<Role>,
}

impl BranchSegment {
    pub fn e_min(&self) -> f64 {
        self.e_at_lo.min(self.e_at_hi)
    }

    pub fn e_max(&self) -> f64 {
        self.e_at_lo.max(self.e_at_hi)
    }

    pub fn contains(&self, energy: f64) -> bool {
        energy >= self.e_min() && energy <= self.e_max()
    }

    pub fn point(&self, mu: f64) -> Result<BranchPoint> {
        self.branch.point_or_limit(mu)
    }

    /// Branch point at the given energy.
    pub fn point_at_energy(&self, energy: f64) -> Result<BranchPoint> {
        let mu = invert_energy(self, energy)?;
        self.point(mu)
    }
}

fn energy_at(branch: &Branch, mu: f64) -> Result<f64> {
    Ok(branch.point_or_limit(mu)?.energy)
}

/// Splits a sampled curve at the critical points of `E(μ)`.
pub fn segment_branch(curve: &BranchCurve, curve_id: usize) -> Result<Vec<BranchSegment>> {
    if curve.points.len() < 3 {
        return Err(Error::Resolution(format!(
            "{} points; at least 3 are needed",
            curve.points.len()
        )));
    }
    let branch = Arc::new(curve.branch.clone());
    let slopes: Vec<f64> = curve
        .points
        .iter()
        .map(|p| branch.energy_and_slope(p.mu).map(|(_, s)| s))
        .collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    let mut last_sign = 0.0;
    let mut last_idx = 0;
    for (i, &s) in slopes.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let sign = s.signum();
        if last_sign != 0.0 && sign != last_sign {
            brackets.push((last_idx, i));
        }
        last_sign = sign;
        last_idx = i;
    }
    if brackets.len() > MAX_CRITICAL_POINTS {
        return Err(Error::Resolution(format!(
            "{} slope sign changes; refine the μ grid",
            brackets.len()
        )));
    }
    let mut cuts = Vec::with_capacity(brackets.len());
    for (a, b) in brackets {
        let lo = curve.points[a].mu;
        let hi = curve.points[b].mu;
        let slope = |mu: f64| branch.energy_and_slope(mu).map(|(_, s)| s);
        let (lo, hi) = crate::numeric::bisect_sign(slope, lo, hi, 200, |l, h| {
            match (energy_at(&branch, l), energy_at(&branch, h)) {
                (Ok(el), Ok(eh)) => (el - eh).abs() < CRITICAL_ENERGY_TOL * el.abs(),
                _ => true,
            }
        })?;
        cuts.push(0.5 * (lo + hi));
    }
    let first = if branch.has_uniform_limit() {
        0.0
    } else {
        curve.points[0].mu
    };
    let mut bounds = vec![first];
    bounds.extend(cuts.iter().copied());
    bounds.push(curve.points.last().map(|p| p.mu).unwrap_or(first));

    let zero_branch = branch.selector.is_zero_branch() && branch.domain.len() > 1;
    let dlr = zero_branch && cuts.len() == 2;
    let mut segments = Vec::with_capacity(bounds.len() - 1);
    for (index, w) in bounds.windows(2).enumerate() {
        let lo = branch.point_or_limit(w[0])?;
        let hi = branch.point_or_limit(w[1])?;
        let monotone = if hi.energy >= lo.energy {
            Monotone::Increasing
        } else {
            Monotone::Decreasing
        };
        segments.push(BranchSegment {
            id: SegmentId {
                curve: curve_id,
                index,
            },
            branch: Arc::clone(&branch),
            selector: branch.selector.clone(),
            mu_lo: w[0],
            mu_hi: w[1],
            e_at_lo: lo.energy,
            e_at_hi: hi.energy,
            s_at_lo: lo.entropy,
            s_at_hi: hi.entropy,
            monotone,
            role: None,
        });
    }
    if dlr
        && segments[0].monotone == Monotone::Increasing
        && segments[1].monotone == Monotone::Decreasing
        && segments[2].monotone == Monotone::Increasing
    {
        segments[0].role = Some(Role::D);
        segments[1].role = Some(Role::L);
        segments[2].role = Some(Role::R);
    }
    Ok(segments)
}

/// `μ` on the segment with `E(μ) = energy`.
pub fn invert_energy(segment: &BranchSegment, energy: f64) -> Result<f64> {
    let (lo, hi) = (segment.e_min(), segment.e_max());
    let slack = 1e-14 * hi.abs();
    if !(energy >= lo - slack && energy <= hi + slack) {
        return Err(Error::EnergyOutOfRange { energy, lo, hi });
    }
    if energy <= lo {
        return Ok(if segment.e_at_lo <= segment.e_at_hi {
            segment.mu_lo
        } else {
            segment.mu_hi
        });
    }
    if energy >= hi {
        return Ok(if segment.e_at_lo >= segment.e_at_hi {
            segment.mu_lo
        } else {
            segment.mu_hi
        });
    }
    let branch = &segment.branch;
    let f = |mu: f64| energy_at(branch, mu).map(|e| e - energy);
    let opts = RootOptions {
        xtol: 0.0,
        ftol: INVERT_ENERGY_TOL * energy * 0.1,
        max_iter: 400,
    };
    brent(
        f,
        segment.mu_lo,
        segment.mu_hi,
        segment.e_at_lo - energy,
        segment.e_at_hi - energy,
        opts,
    )
}

/// Sample and segment every selector on the default grid.
pub fn build_segments(domain: &DomainSpec, selectors: &[BranchSelector], mu_grid: &[f64]) -> Result<Vec<BranchSegment>> {
    let mut all = Vec::new();
    for (id, sel) in selectors.iter().enumerate() {
        let branch = Branch::new(domain.clone(), sel.clone())?;
        let curve = sample(branch, mu_grid)?;
        all.extend(segment_branch(&curve, id)?);
    }
    Ok(all)
}

/// 0-branch alone for distinct areas; every merged branch for identical disks.
pub fn default_selectors(domain: &DomainSpec) -> Vec<BranchSelector> {
    if domain.all_identical() && domain.len() > 1 {
        (0..=domain.len() / 2).map(|k| BranchSelector::Merged { k }).collect()
    } else {
        vec![BranchSelector::zero_branch()]
    }
}

/// Log-uniform energies from `E_m` to `factor·E_m`.
pub fn default_energy_grid(domain: &DomainSpec, points: usize, factor: f64) -> Vec<f64> {
    let em = domain.uniform_energy();
    if points < 2 {
        return vec![em];
    }
    let top = factor.ln();
    (0..points)
        .map(|i| em * (top * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub segment: SegmentId,
    pub mu: f64,
    pub entropy: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub energy: f64,
    pub entropy: Option<f64>,
    /// Every maximizer, more than one on a tie.
    pub winners: Vec<Candidate>,
    pub gap: bool,
}

impl EnvelopePoint {
    pub fn beta(&self) -> Option<f64> {
        self.winners.first().map(|w| w.beta)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEnvelope {
    pub selectors: Vec<BranchSelector>,
    pub points: Vec<EnvelopePoint>,
}

/// Entropy of every segment containing `energy`.
pub fn candidates_at(segments: &[BranchSegment], energy: f64) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for seg in segments.iter().filter(|s| s.contains(energy)) {
        let p = seg.point_at_energy(energy)?;
        out.push(Candidate {
            segment: seg.id,
            mu: p.mu,
            entropy: p.entropy,
            beta: p.beta,
        });
    }
    Ok(out)
}

fn envelope_point(segments: &[BranchSegment], energy: f64) -> Result<EnvelopePoint> {
    let cands = candidates_at(segments, energy)?;
    let best = cands.iter().map(|c| c.entropy).fold(f64::NEG_INFINITY, f64::max);
    if cands.is_empty() {
        return Ok(EnvelopePoint {
            energy,
            entropy: None,
            winners: Vec::new(),
            gap: true,
        });
    }
    let tol = TIE_TOL * best.abs().max(1.0);
    let mut winners: Vec<Candidate> = cands
        .into_iter()
        .filter(|c| best - c.entropy <= tol)
        .collect();
    winners.sort_by(|a, b| b.entropy.total_cmp(&a.entropy).then(a.segment.cmp(&b.segment)));
    // Adjacent segments of one curve share their end point; keep one copy.
    winners.dedup_by(|a, b| a.segment.curve == b.segment.curve && (a.mu - b.mu).abs() <= 1e-12);
    Ok(EnvelopePoint {
        energy,
        entropy: Some(best),
        winners,
        gap: false,
    })
}

pub fn envelope_from_segments(selectors: Vec<BranchSelector>, segments: &[BranchSegment], energies: &[f64]) -> Result<EntropyEnvelope> {
    let points = energies
        .par_iter()
        .map(|&e| envelope_point(segments, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyEnvelope { selectors, points })
}

/// `𝒮(E) = max` of the branch entropies over the given selectors.
pub fn entropy_envelope(domain: &DomainSpec, selectors: &[BranchSelector], energies: &[f64]) -> Result<EntropyEnvelope> {
    let segments = build_segments(domain, selectors, &default_mu_grid())?;
    envelope_from_segments(selectors.to_vec(), &segments, energies)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    First,
    Second,
}

/// Second kind iff the 0-branch reaches `β ≤ −8π`.
pub fn classify_kind(domain: &DomainSpec) -> Result<Kind> {
    classify_on_grid(domain, &default_mu_grid())
}

pub fn classify_on_grid(domain: &DomainSpec, mu_grid: &[f64]) -> Result<Kind> {
    let min_beta = zero_branch_min_beta(domain, mu_grid)?;
    Ok(if min_beta <= -EIGHT_PI * (1.0 - CLASSIFY_TOL) {
        Kind::Second
    } else {
        Kind::First
    })
}

/// Minimum of `β` along the 0-branch (k-branch machinery, any areas).
pub fn zero_branch_min_beta(domain: &DomainSpec, mu_grid: &[f64]) -> Result<f64> {
    let branch = Branch::new(domain.clone(), BranchSelector::zero_branch())?;
    let betas = mu_grid
        .par_iter()
        .map(|&mu| branch.point(mu).map(|p| p.beta))
        .collect::<Result<Vec<_>>>()?;
    Ok(betas.into_iter().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapDiagnostics {
    /// Local minimum `E₀` and maximum `Ē_c` of the energy along the 0-branch.
    pub e0: f64,
    pub e_bar_c: f64,
    pub s0: f64,
    pub s_bar_c: f64,
    /// `S_d(E₀)` and `S_r(Ē_c)`.
    pub s1: f64,
    pub s2: f64,
    pub max_gap: f64,
    /// `min(S_d, S_r) − S_l` at the transition.
    pub l_margin: f64,
    pub l_dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub e_star: f64,
    pub entropy: f64,
    pub entropy_jump: f64,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub left_segment: SegmentId,
    pub right_segment: SegmentId,
    pub left_selector: BranchSelector,
    pub right_selector: BranchSelector,
    /// `max |S_d − S_r|` on `(E₀, Ē_c)` over `|S̄_c − S₀|`.
    pub entropy_gap_scale: Option<f64>,
    pub diagnostics: Option<GapDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionSearch {
    pub reports: Vec<TransitionReport>,
    pub note: Option<String>,
}

impl TransitionSearch {
    pub fn found(&self) -> bool {
        !self.reports.is_empty()
    }
}

pub enum TransitionSource<'a> {
    /// Segments of one 0-branch; needs the d/l/r roles.
    ZeroBranch(&'a [BranchSegment]),
    /// An envelope together with the segments it was built from.
    Envelope {
        envelope: &'a EntropyEnvelope,
        segments: &'a [BranchSegment],
    },
}

pub fn locate_transition(source: TransitionSource<'_>) -> Result<TransitionSearch> {
    match source {
        TransitionSource::ZeroBranch(segments) => locate_dlr(segments),
        TransitionSource::Envelope { envelope, segments } => locate_on_envelope(envelope, segments),
    }
}

fn entropy_on(seg: &BranchSegment, energy: f64) -> Result<(f64, BranchPoint)> {
    let p = seg.point_at_energy(energy)?;
    Ok((p.entropy, p))
}

/// Root of `S_a(E) − S_b(E)` on `[lo, hi]`, to relative width [`TRANSITION_TOL`].
fn entropy_crossing(a: &BranchSegment, b: &BranchSegment, lo: f64, hi: f64) -> Result<f64> {
    let diff = |e: f64| -> Result<f64> { Ok(entropy_on(a, e)?.0 - entropy_on(b, e)?.0) };
    let (l, h) = crate::numeric::bisect_sign(diff, lo, hi, 200, |l, h| h - l <= TRANSITION_TOL * h)?;
    Ok(0.5 * (l + h))
}

fn report(below: &BranchSegment, above: &BranchSegment, e_star: f64) -> Result<TransitionReport> {
    let (s_b, p_b) = entropy_on(below, e_star)?;
    let (s_a, p_a) = entropy_on(above, e_star)?;
    Ok(TransitionReport {
        e_star,
        entropy: 0.5 * (s_a + s_b),
        entropy_jump: s_a - s_b,
        beta_minus: p_b.beta,
        beta_plus: p_a.beta,
        mu_minus: p_b.mu,
        mu_plus: p_a.mu,
        left_segment: below.id,
        right_segment: above.id,
        left_selector: below.selector.clone(),
        right_selector: above.selector.clone(),
        entropy_gap_scale: None,
        diagnostics: None,
    })
}

fn locate_dlr(segments: &[BranchSegment]) -> Result<TransitionSearch> {
    let find = |r: Role| segments.iter().find(|s| s.role == Some(r));
    let (d, l, r) = match (find(Role::D), find(Role::L), find(Role::R)) {
        (Some(d), Some(l), Some(r)) => (d, l, r),
        _ => {
            return Ok(TransitionSearch {
                reports: Vec::new(),
                note: Some("0-branch has no local maximum/minimum pair".into()),
            })
        }
    };
    let e_bar_c = d.e_at_hi;
    let s_bar_c = d.s_at_hi;
    let e0 = r.e_at_lo;
    let s0 = r.s_at_lo;
    if !(e0 < e_bar_c) {
        return Ok(TransitionSearch {
            reports: Vec::new(),
            note: Some("energy bracket (E₀, Ē_c) is empty".into()),
        });
    }
    let s1 = entropy_on(d, e0)?.0;
    let s2 = entropy_on(r, e_bar_c)?.0;
    let gap_lo = s1 - s0;
    let gap_hi = s_bar_c - s2;
    if gap_lo.signum() == gap_hi.signum() {
        return Ok(TransitionSearch {
            reports: Vec::new(),
            note: Some("S_d − S_r keeps its sign on (E₀, Ē_c)".into()),
        });
    }
    let e_star = entropy_crossing(d, r, e0, e_bar_c)?;
    let (below, above) = if gap_lo > 0.0 { (d, r) } else { (r, d) };
    let mut rep = report(below, above, e_star)?;

    const SAMPLES: usize = 2001;
    let energies: Vec<f64> = (0..SAMPLES)
        .map(|i| e0 + (e_bar_c - e0) * i as f64 / (SAMPLES - 1) as f64)
        .collect();
    let rows = energies
        .par_iter()
        .map(|&e| -> Result<(f64, f64, f64)> {
            Ok((entropy_on(d, e)?.0, entropy_on(l, e)?.0, entropy_on(r, e)?.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_gap = rows.iter().map(|(sd, _, sr)| (sd - sr).abs()).fold(0.0, f64::max);
    let l_dominated = rows
        .iter()
        .skip(1)
        .take(SAMPLES - 2)
        .all(|(sd, sl, sr)| sl < sd && sl < sr);
    let s_l_star = entropy_on(l, e_star)?.0;
    let l_margin = rep.entropy - s_l_star;
    rep.entropy_gap_scale = Some(max_gap / (s_bar_c - s0).abs());
    rep.diagnostics = Some(GapDiagnostics {
        e0,
        e_bar_c,
        s0,
        s_bar_c,
        s1,
        s2,
        max_gap,
        l_margin,
        l_dominated,
    });
    Ok(TransitionSearch {
        reports: vec![rep],
        note: None,
    })
}

fn locate_on_envelope(envelope: &EntropyEnvelope, segments: &[BranchSegment]) -> Result<TransitionSearch> {
    let by_id = |id: SegmentId| segments.iter().find(|s| s.id == id);
    let mut reports = Vec::new();
    let defined: Vec<&EnvelopePoint> = envelope.points.iter().filter(|p| !p.gap).collect();
    for w in defined.windows(2) {
        let (a, b) = (w[0], w[1]);
        let wa = a.winners[0];
        let wb = b.winners.last().copied().unwrap_or(wa);
        if wa.segment == wb.segment {
            continue;
        }
        let (Some(sa), Some(sb)) = (by_id(wa.segment), by_id(wb.segment)) else {
            continue;
        };
        let lo = a.energy.max(sa.e_min()).max(sb.e_min());
        let hi = b.energy.min(sa.e_max()).min(sb.e_max());
        if !(lo < hi) {
            continue;
        }
        let d_lo = entropy_on(sa, lo)?.0 - entropy_on(sb, lo)?.0;
        let d_hi = entropy_on(sa, hi)?.0 - entropy_on(sb, hi)?.0;
        if !(d_lo * d_hi < 0.0) {
            continue;
        }
        let e_star = entropy_crossing(sa, sb, lo, hi)?;
        reports.push(report(sa, sb, e_star)?);
    }
    let note = if reports.is_empty() {
        Some("no change of winning branch on the energy grid".into())
    } else {
        None
    };
    Ok(TransitionSearch { reports, note })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk::e_of_mu;
    use std::f64::consts::PI;

    fn zero_segments(areas: &[f64]) -> Vec<BranchSegment> {
        let d = DomainSpec::disks(areas).unwrap();
        build_segments(&d, &[BranchSelector::zero_branch()], &default_mu_grid()).unwrap()
    }

    #[test]
    fn single_disk_has_one_segment() {
        let s = zero_segments(&[1.0]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].monotone, Monotone::Increasing);
        assert_eq!(s[0].role, None);
    }

    #[test]
    fn first_kind_domain_has_one_segment() {
        let s = zero_segments(&[1.0, 0.6, 0.2]);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn near_degenerate_domain_has_dlr() {
        let t = 1.0 - 3e-5;
        let s = zero_segments(&[1.0, t, t]);
        let roles: Vec<_> = s.iter().map(|x| x.role).collect();
        assert_eq!(roles, vec![Some(Role::D), Some(Role::L), Some(Role::R)]);
    }

    #[test]
    fn inversion_examples() {
        let s = zero_segments(&[1.0]);
        let mu = invert_energy(&s[0], e_of_mu(0.5).unwrap()).unwrap();
        assert!((mu - 0.5).abs() < 1e-9);
        let mu = invert_energy(&s[0], 1.0 / (16.0 * PI) + 1e-9).unwrap();
        assert!(mu < 1e-4);
        assert_eq!(invert_energy(&s[0], s[0].e_at_lo).unwrap(), s[0].mu_lo);
        assert!(invert_energy(&s[0], 1e-3).is_err());
    }

    #[test]
    fn classification_examples() {
        let k = |a: &[f64]| classify_kind(&DomainSpec::disks(a).unwrap()).unwrap();
        assert_eq!(k(&[1.0, 0.6, 0.2]), Kind::First);
        assert_eq!(k(&[1.0, 0.9, 0.5]), Kind::Second);
        assert_eq!(k(&[1.0, 1.0]), Kind::Second);
        assert_eq!(k(&[1.0]), Kind::First);
    }

    #[test]
    fn first_kind_has_no_transition() {
        let s = zero_segments(&[1.0, 0.6, 0.2]);
        let r = locate_transition(TransitionSource::ZeroBranch(&s)).unwrap();
        assert!(!r.found());
    }
}
