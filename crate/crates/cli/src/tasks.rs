use serde_json::json;
use vpl_core::branch::{sample_branch, BranchSelector, DomainSpec};
use vpl_core::deformed::{locate_high_energy_transitions, plan_sequences};
use vpl_core::oracle::{envelope_report, radial_report};
use vpl_core::transition::{
    build_segments, classify_on_grid, entropy_envelope, envelope_from_segments, locate_transition, zero_branch_min_beta, TransitionSource,
};

use crate::config::{OracleKind, RunConfig, TransitionSourceKind};
use crate::emit::{Cell, Output, Table};
use crate::error::{Error, Result};

/// Exit code of `transition` when the search finds nothing.
pub const NO_TRANSITION: i32 = 2;

fn domain_summary(d: &DomainSpec) -> serde_json::Value {
    json!({
        "areas": d.areas(),
        "scale": d.scale(),
        "reordered": d.was_reordered(),
    })
}

pub fn branch(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let domain = cfg.domain()?;
    let selectors = cfg.selectors(&domain)?;
    let grid = cfg.mu_grid()?;
    let n = domain.len();
    let mut columns: Vec<String> = ["selector", "mu", "gamma", "beta", "lambda", "z", "energy", "entropy"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 1..=n {
        columns.extend([format!("mu_{i}"), format!("mass_{i}"), format!("energy_{i}")]);
    }
    let mut t = Table::with_columns("branch", columns);
    let mut dropped = serde_json::Map::new();
    for sel in &selectors {
        let curve = sample_branch(&domain, sel, &grid)?;
        for p in &curve.points {
            let mut row: Vec<Cell> = vec![
                sel.to_string().into(),
                p.mu.into(),
                p.gamma.into(),
                p.beta.into(),
                p.lambda.into(),
                p.z.into(),
                p.energy.into(),
                p.entropy.into(),
            ];
            for c in &p.components {
                row.extend([c.mu.into(), c.mass.into(), c.energy.into()]);
            }
            t.push(row);
        }
        dropped.insert(sel.to_string(), json!(curve.dropped.len()));
    }
    out.table(
        &t,
        json!({ "domain": domain_summary(&domain), "selectors": selectors, "dropped_points": dropped }),
    )?;
    Ok(0)
}

pub fn envelope(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let domain = cfg.domain()?;
    let selectors = cfg.selectors(&domain)?;
    let energies = cfg.energies(&domain, 200)?;
    let segments = build_segments(&domain, &selectors, &cfg.mu_grid()?)?;
    let env = envelope_from_segments(selectors.clone(), &segments, &energies)?;
    let mut t = Table::new("envelope", &["energy", "entropy", "beta", "winner", "mu", "ties", "gap"]);
    for p in &env.points {
        let w = p.winners.first();
        t.push(vec![
            p.energy.into(),
            p.entropy.into(),
            p.beta().into(),
            w.map_or(Cell::Empty, |w| selectors[w.segment.curve].to_string().into()),
            w.map(|w| w.mu).into(),
            p.winners.len().into(),
            p.gap.into(),
        ]);
    }
    out.table(&t, json!({ "domain": domain_summary(&domain), "selectors": selectors }))?;
    Ok(0)
}

pub fn transition(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let domain = cfg.domain()?;
    let source = cfg.transition.clone().unwrap_or_default().source;
    let grid = cfg.mu_grid()?;
    let search = match source {
        TransitionSourceKind::ZeroBranch => {
            let segments = build_segments(&domain, &[BranchSelector::zero_branch()], &grid)?;
            locate_transition(TransitionSource::ZeroBranch(&segments))?
        }
        TransitionSourceKind::Envelope => {
            let selectors = cfg.selectors(&domain)?;
            let energies = cfg.energies(&domain, 400)?;
            let segments = build_segments(&domain, &selectors, &grid)?;
            let envelope = envelope_from_segments(selectors, &segments, &energies)?;
            locate_transition(TransitionSource::Envelope {
                envelope: &envelope,
                segments: &segments,
            })?
        }
    };
    let mut t = Table::new(
        "transition",
        &[
            "e_star",
            "entropy",
            "entropy_jump",
            "beta_minus",
            "beta_plus",
            "mu_minus",
            "mu_plus",
            "left",
            "right",
            "gap_ratio",
        ],
    );
    for r in &search.reports {
        t.push(vec![
            r.e_star.into(),
            r.entropy.into(),
            r.entropy_jump.into(),
            r.beta_minus.into(),
            r.beta_plus.into(),
            r.mu_minus.into(),
            r.mu_plus.into(),
            r.left_selector.to_string().into(),
            r.right_selector.to_string().into(),
            r.entropy_gap_scale.into(),
        ]);
    }
    out.table(
        &t,
        json!({ "domain": domain_summary(&domain), "source": source, "found": search.found(), "note": search.note }),
    )?;
    out.report("transition", &search)?;
    Ok(if search.found() { 0 } else { NO_TRANSITION })
}

pub fn classify(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let domain = cfg.domain()?;
    let grid = cfg.mu_grid()?;
    let kind = classify_on_grid(&domain, &grid)?;
    let min_beta = zero_branch_min_beta(&domain, &grid)?;
    let mut t = Table::new("classify", &["kind", "min_beta", "components", "total_area"]);
    let label = match kind {
        vpl_core::transition::Kind::First => "first",
        vpl_core::transition::Kind::Second => "second",
    };
    t.push(vec![label.into(), min_beta.into(), domain.len().into(), domain.total_area().into()]);
    out.table(&t, json!({ "domain": domain_summary(&domain), "kind": kind }))?;
    Ok(0)
}

pub fn high_energy(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let c = cfg.high_energy.clone().unwrap_or_default();
    let plan = plan_sequences(c.n, c.eta, c.window)?;
    let domain = plan.domain()?;
    let scan = locate_high_energy_transitions(&domain, &plan, c.e_range)?;
    let mut t = Table::new(
        "high_energy",
        &[
            "e_star",
            "below",
            "above",
            "beta_minus",
            "beta_plus",
            "gamma",
            "predicted_gamma",
            "relative_error",
        ],
    );
    for x in &scan.crossings {
        // Winners run N, N−1, …, 1 with rising energy; the plan lists the
        // crossing out of branch N−k as entry k.
        let predicted = (x.below == x.above + 1)
            .then(|| plan.gamma_crossings.get(plan.n - x.below))
            .flatten()
            .copied();
        t.push(vec![
            x.e_star.into(),
            x.below.into(),
            x.above.into(),
            x.beta_minus.into(),
            x.beta_plus.into(),
            x.gamma().into(),
            predicted.into(),
            predicted.map(|g| (x.gamma() - g).abs() / g).into(),
        ]);
    }
    out.table(&t, json!({ "winners": scan.winners, "partial": scan.partial, "e_range": scan.e_range }))?;
    out.report("high_energy_plan", &plan)?;
    Ok(0)
}

pub fn oracle(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let c = cfg.oracle.clone().unwrap_or_default();
    match c.kind {
        OracleKind::Radial => {
            let area = c.area.unwrap_or(1.0);
            let rep = radial_report(&c.betas(), area, c.nodes())?;
            let mut t = Table::new("oracle", &["beta", "energy_closed_form", "energy_oracle", "abs_error"]);
            for ((b, r), o) in c.betas().iter().zip(&rep.reference).zip(&rep.oracle) {
                t.push(vec![(*b).into(), (*r).into(), (*o).into(), (r - o).abs().into()]);
            }
            out.table(&t, json!({ "max_abs_err": rep.max_abs_err, "max_rel_err": rep.max_rel_err, "metadata": rep.metadata }))?;
        }
        OracleKind::Envelope => {
            let domain = cfg.domain()?;
            let selectors = cfg.selectors(&domain)?;
            let energies = cfg.energies(&domain, 20)?;
            let env = entropy_envelope(&domain, &selectors, &energies)?;
            let (es, ss): (Vec<f64>, Vec<f64>) = env.points.iter().filter_map(|p| p.entropy.map(|s| (p.energy, s))).unzip();
            let rep = envelope_report(&domain, &es, &ss, c.grid_options())?;
            let mut t = Table::new("oracle", &["energy", "entropy_envelope", "entropy_oracle", "abs_error"]);
            for ((e, r), o) in es.iter().zip(&rep.reference).zip(&rep.oracle) {
                t.push(vec![(*e).into(), (*r).into(), (*o).into(), (r - o).abs().into()]);
            }
            out.table(
                &t,
                json!({ "domain": domain_summary(&domain), "max_abs_err": rep.max_abs_err, "max_rel_err": rep.max_rel_err, "skipped_gaps": energies.len() - es.len() }),
            )?;
        }
    }
    Ok(0)
}

pub fn appendix(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let c = cfg.appendix.clone().unwrap_or_default();
    if c.betas.is_empty() {
        return Err(Error::validation("appendix.betas", "empty"));
    }
    let mut t = Table::new(
        "appendix",
        &[
            "beta",
            "mu",
            "h",
            "nodes",
            "f0",
            "f0_closed_form",
            "eps_1",
            "f_eps_1",
            "quotient_1",
            "eps_2",
            "f_eps_2",
            "quotient_2",
            "extrapolated",
            "g",
            "minus_g_over_beta",
            "minus_g_over_2beta",
        ],
    );
    for &beta in &c.betas {
        let s = vpl_pde::appendix::slope_check(beta, c.epsilons, c.h)?;
        t.push(vec![
            beta.into(),
            s.mu.into(),
            s.h.into(),
            s.reference.nodes.into(),
            s.reference.free_energy.into(),
            s.exact_reference.into(),
            s.deformed[0].epsilon.into(),
            s.deformed[0].free_energy.into(),
            s.quotients[0].into(),
            s.deformed[1].epsilon.into(),
            s.deformed[1].free_energy.into(),
            s.quotients[1].into(),
            s.extrapolated.into(),
            s.g.into(),
            (-s.g / beta).into(),
            (-s.g / (2.0 * beta)).into(),
        ]);
    }
    out.table(&t, json!({ "epsilons": c.epsilons, "h": c.h }))?;
    Ok(0)
}
