use serde_json::json;
use vpl_core::branch::{default_mu_grid, BranchSelector, DomainSpec};
use vpl_core::transition::{build_segments, locate_transition, TransitionSource};
use vpl_pde::continuation::{continue_branch, continue_lambda, ContinuationOptions};
use vpl_pde::dumbbell::{chain_geometry, entropy_crossing_study, lower_branch_study, CrossingOptions};
use vpl_pde::geometry::GeometrySpec;
use vpl_pde::mesh::rasterize;
use vpl_pde::solver::{NewtonOptions, PdeSolution, Problem, Tag};

use crate::config::{ChainConfig, PdeConfig, PdeMode, RunConfig};
use crate::emit::{Cell, Output, Table};
use crate::error::{Error, Result};

fn tag_name(t: Tag) -> &'static str {
    match t {
        Tag::Lower => "lower",
        Tag::Upper => "upper",
        Tag::Untagged => "untagged",
    }
}

fn newton(p: &PdeConfig) -> NewtonOptions {
    let d = NewtonOptions::default();
    NewtonOptions {
        tol: p.tol.unwrap_or(d.tol),
        ..d
    }
}

fn chain(p: &PdeConfig) -> Result<&ChainConfig> {
    let c = p
        .chain
        .as_ref()
        .ok_or_else(|| Error::validation("pde.chain", "required by this mode"))?;
    if c.areas.is_empty() || c.areas.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::validation("pde.chain.areas", "need positive areas"));
    }
    Ok(c)
}

fn geometry(p: &PdeConfig) -> Result<GeometrySpec> {
    match (&p.geometry, &p.chain) {
        (Some(g), None) => {
            g.validate()?;
            Ok(g.clone())
        }
        (None, Some(_)) => {
            let c = chain(p)?;
            Ok(chain_geometry(&c.areas, c.width_fraction, c.gap_fraction)?)
        }
        _ => Err(Error::validation("pde", "give exactly one of geometry or chain")),
    }
}

const SOLUTION_COLUMNS: [&str; 11] = [
    "lambda",
    "z",
    "beta",
    "energy",
    "energy_gradient",
    "entropy",
    "u_max",
    "residual",
    "iterations",
    "tag",
    "nodes",
];

fn solution_row(s: &PdeSolution, nodes: usize) -> Vec<Cell> {
    vec![
        s.lambda.into(),
        s.z.into(),
        s.beta.into(),
        s.energy.into(),
        s.energy_gradient.into(),
        s.entropy.into(),
        s.u_max().into(),
        s.residual.into(),
        s.iterations.into(),
        tag_name(s.tag).into(),
        nodes.into(),
    ]
}

pub fn pde(cfg: &RunConfig, out: &mut Output) -> Result<i32> {
    let p = cfg.pde()?;
    match p.mode {
        PdeMode::Solve => solve(p, out),
        PdeMode::Continue => continuation(p, out),
        PdeMode::LowerBranch => lower_branch(p, out),
        PdeMode::Crossing => crossing(p, out),
    }
}

fn solve(p: &PdeConfig, out: &mut Output) -> Result<i32> {
    let lambda = p
        .lambda
        .ok_or_else(|| Error::validation("pde.lambda", "required by mode solve"))?;
    let steps = p.lambda_steps.unwrap_or(10);
    if steps == 0 {
        return Err(Error::validation("pde.lambda_steps", "must be at least 1"));
    }
    let g = geometry(p)?;
    let mesh = rasterize(&g, p.h)?;
    let problem = Problem::new(&mesh)?;
    let lambdas: Vec<f64> = (1..=steps).map(|k| lambda * k as f64 / steps as f64).collect();
    let path = continue_lambda(&problem, &lambdas, &vec![0.0; mesh.len()], &newton(p))?;
    let s = path.last().expect("at least one step");
    let mut t = Table::new("pde_solution", &SOLUTION_COLUMNS);
    t.push(solution_row(s, mesh.len()));
    out.table(
        &t,
        json!({
            "h": p.h,
            "quadrature_area": mesh.quadrature_area(),
            "components": mesh.components(),
            "energy_mismatch": s.energy_mismatch(),
        }),
    )?;
    if p.export_field {
        let mut f = Table::new("pde_field", &["x", "y", "u"]);
        for (k, u) in s.u.iter().enumerate() {
            let [x, y] = mesh.position(k);
            f.push(vec![x.into(), y.into(), (*u).into()]);
        }
        out.table(&f, json!({ "h": p.h }))?;
    }
    Ok(0)
}

fn continuation(p: &PdeConfig, out: &mut Output) -> Result<i32> {
    let g = geometry(p)?;
    let mesh = rasterize(&g, p.h)?;
    let problem = Problem::new(&mesh)?;
    let d = ContinuationOptions::default();
    let opts = ContinuationOptions {
        lambda_start: p.lambda_start.unwrap_or(d.lambda_start),
        lambda_step: p.lambda_step.unwrap_or(d.lambda_step),
        ds_max: p.ds_max.unwrap_or(d.ds_max),
        max_points: p.max_points.unwrap_or(d.max_points),
        u_max: p.u_max.unwrap_or(d.u_max),
        newton: newton(p),
    };
    let b = continue_branch(&problem, &opts);
    let mut t = Table::new("pde_branch", &SOLUTION_COLUMNS);
    for s in &b.solutions {
        t.push(solution_row(s, mesh.len()));
    }
    out.table(
        &t,
        json!({
            "h": p.h,
            "fold_index": b.fold_index,
            "lambda_max": b.lambda_max(),
            "failure": b.failure,
        }),
    )?;
    Ok(0)
}

fn lower_branch(p: &PdeConfig, out: &mut Output) -> Result<i32> {
    let c = chain(p)?;
    let widths = p.widths.clone().unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.0]);
    let mus = p.mus.clone().unwrap_or_else(|| vec![0.1, 0.2, 0.3]);
    if widths.is_empty() {
        return Err(Error::validation("pde.widths", "empty"));
    }
    if mus.is_empty() || mus.iter().any(|m| !(*m > 0.0 && *m < 0.5)) {
        return Err(Error::validation("pde.mus", "need values in (0, 1/2)"));
    }
    let study = lower_branch_study(&c.areas, &widths, &mus, c.gap_fraction, p.h)?;
    let mut t = Table::new(
        "pde_lower_branch",
        &[
            "width_fraction",
            "mu",
            "lambda",
            "nodes",
            "beta",
            "z",
            "energy",
            "entropy",
            "beta_disjoint",
            "z_disjoint",
            "energy_disjoint",
            "entropy_disjoint",
            "error_beta",
            "error_z",
            "error_energy",
            "error_entropy",
            "energy_mismatch",
        ],
    );
    for r in &study.rows {
        let mut row: Vec<Cell> = vec![r.width_fraction.into(), r.mu.into(), r.lambda.into(), r.nodes.into()];
        for o in [&r.pde, &r.reference] {
            row.extend([o.beta.into(), o.z.into(), o.energy.into(), o.entropy.into()]);
        }
        row.extend(r.error.iter().map(|&e| Cell::F(e)));
        row.push(r.energy_mismatch.into());
        t.push(row);
    }
    out.table(
        &t,
        json!({
            "h": p.h,
            "gap_fraction": c.gap_fraction,
            "monotone": study.monotone(),
            "max_error_beta": study.max_error(0),
            "max_error_z": study.max_error(1),
        }),
    )?;
    Ok(0)
}

/// `E*` of the 0-branch on the disjoint disks.
pub fn disjoint_transition_energy(areas: &[f64]) -> Result<Option<f64>> {
    let domain = DomainSpec::disks(areas)?;
    let segments = build_segments(&domain, &[BranchSelector::zero_branch()], &default_mu_grid())?;
    let search = locate_transition(TransitionSource::ZeroBranch(&segments))?;
    Ok(search.reports.first().map(|r| r.e_star))
}

fn crossing(p: &PdeConfig, out: &mut Output) -> Result<i32> {
    let c = chain(p)?;
    let e_ref = match p.reference_energy {
        Some(e) => e,
        None => disjoint_transition_energy(&c.areas)?.ok_or_else(|| {
            Error::validation("pde.reference_energy", "no transition on the disjoint disks; give one")
        })?,
    };
    let mut opts = CrossingOptions::new(e_ref);
    if let Some(w) = p.window {
        opts.window = w;
    }
    if let Some(ds) = p.ds_max {
        opts.ds_max = ds;
    }
    if let Some(m) = p.max_points {
        opts.max_points = m;
    }
    let study = entropy_crossing_study(&c.areas, c.width_fraction, c.gap_fraction, p.h, &opts)?;
    let mut trace = Table::new(
        "pde_crossing_trace",
        &["family", "plus", "piece", "index", "lambda", "energy", "entropy", "beta", "z"],
    );
    for (f, fam) in study.families.iter().enumerate() {
        let plus = fam.plus.map_or(Cell::Empty, |i| (i + 1).into());
        for (k, pt) in fam.points.iter().enumerate() {
            let piece = fam.pieces.iter().position(|&(a, b)| a <= k && k <= b).unwrap_or(0);
            trace.push(vec![
                f.into(),
                plus.clone(),
                piece.into(),
                k.into(),
                pt.lambda.into(),
                pt.energy.into(),
                pt.entropy.into(),
                pt.beta.into(),
                pt.z.into(),
            ]);
        }
    }
    let failures: Vec<_> = study.families.iter().map(|f| f.failure.clone()).collect();
    out.table(&trace, json!({ "h": p.h, "nodes": study.nodes, "failures": failures }))?;
    let mut t = Table::new(
        "pde_crossings",
        &[
            "energy",
            "shift",
            "below_family",
            "below_piece",
            "beta_below",
            "entropy_below",
            "above_family",
            "above_piece",
            "beta_above",
            "entropy_above",
            "u_distance",
            "delta",
            "gap_below",
            "gap_above",
            "crosses",
        ],
    );
    for x in &study.crossings {
        t.push(vec![
            x.energy.into(),
            x.shift.into(),
            x.below.family.into(),
            x.below.piece.into(),
            x.below.state.beta.into(),
            x.below.state.entropy.into(),
            x.above.family.into(),
            x.above.piece.into(),
            x.above.state.beta.into(),
            x.above.state.entropy.into(),
            x.u_distance.into(),
            x.delta.into(),
            x.gap_below.into(),
            x.gap_above.into(),
            x.crosses().into(),
        ]);
    }
    out.table(
        &t,
        json!({
            "h": p.h,
            "width_fraction": c.width_fraction,
            "reference_energy": e_ref,
            "window": opts.window,
        }),
    )?;
    Ok(0)
}
