//! Natural continuation in `λ` and pseudo-arclength continuation through the
//! fold of the solution curve.

use serde::Serialize;

use crate::error::Result;
use crate::solver::{Constraint, NewtonOptions, PdeSolution, Problem, Tag};

/// Step halvings tolerated per arclength step.
pub const MAX_HALVINGS: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct ContinuationOptions {
    /// `λ` of the first solution, solved from `U = 0`.
    pub lambda_start: f64,
    /// `λ` increment to the second solution; fixes the first secant.
    pub lambda_step: f64,
    pub ds_max: f64,
    pub max_points: usize,
    /// Stop once `max U` exceeds this.
    pub u_max: f64,
    pub newton: NewtonOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            lambda_start: 0.1,
            lambda_step: 0.1,
            ds_max: 0.5,
            max_points: 200,
            u_max: 6.0,
            newton: NewtonOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuedBranch {
    pub solutions: Vec<PdeSolution>,
    /// Index of the first solution past the fold.
    pub fold_index: Option<usize>,
    /// Reason the continuation stopped early, if it did.
    pub failure: Option<String>,
}

impl ContinuedBranch {
    /// Largest `λ` reached, a lower bound for the fold value.
    pub fn lambda_max(&self) -> f64 {
        self.solutions.iter().map(|s| s.lambda).fold(0.0, f64::max)
    }
}

/// Solves at each `λ` in turn, seeding each solve with a secant predictor.
pub fn continue_lambda(problem: &Problem, lambdas: &[f64], seed: &[f64], opts: &NewtonOptions) -> Result<Vec<PdeSolution>> {
    let mut out: Vec<PdeSolution> = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let guess = match out.as_slice() {
            [.., a, b] if (b.lambda - a.lambda).abs() > 0.0 => {
                let t = (lambda - b.lambda) / (b.lambda - a.lambda);
                b.u.iter().zip(&a.u).map(|(y, x)| y + t * (y - x)).collect()
            }
            [.., b] => b.u.clone(),
            [] => seed.to_vec(),
        };
        let mut s = problem.solve(&Constraint::Lambda(lambda), &guess, lambda, opts)?;
        s.tag = Tag::Lower;
        out.push(s);
    }
    Ok(out)
}

/// Follows the solution curve from small `λ` around the fold.
///
/// Points are tagged [`Tag::Lower`] until `dλ/ds` changes sign and
/// [`Tag::Upper`] afterwards.
pub fn continue_branch(problem: &Problem, opts: &ContinuationOptions) -> ContinuedBranch {
    let zero = vec![0.0; problem.mesh().len()];
    let first = continue_lambda(
        problem,
        &[opts.lambda_start, opts.lambda_start + opts.lambda_step],
        &zero,
        &opts.newton,
    );
    match first {
        Ok(mut v) => {
            let b = v.pop().expect("two solutions");
            let a = v.pop().expect("two solutions");
            let u_max = opts.u_max;
            arclength_from(problem, a, b, opts, |s| s.u_max() > u_max)
        }
        Err(e) => ContinuedBranch {
            solutions: Vec::new(),
            fold_index: None,
            failure: Some(format!("start: {e}")),
        },
    }
}

/// Pseudo-arclength continuation from two nearby solutions `a`, `b`, in the
/// direction `a → b`, until `stop` holds for the newest point or
/// `opts.max_points` are stored. The secant of the last two accepted points
/// is the tangent; tags follow the sign of `dλ/ds` relative to its first
/// value.
pub fn arclength_from<F>(problem: &Problem, a: PdeSolution, b: PdeSolution, opts: &ContinuationOptions, mut stop: F) -> ContinuedBranch
where
    F: FnMut(&PdeSolution) -> bool,
{
    let norm = |s: &PdeSolution, t: &PdeSolution| {
        let du: Vec<f64> = s.u.iter().zip(&t.u).map(|(x, y)| x - y).collect();
        problem.inner(&du, s.lambda - t.lambda, &du, s.lambda - t.lambda).sqrt()
    };
    let mut ds = norm(&b, &a).min(opts.ds_max);
    let rising0 = b.lambda >= a.lambda;
    let mut rising = rising0;
    let mut branch = ContinuedBranch {
        solutions: vec![a, b],
        fold_index: None,
        failure: None,
    };
    for s in branch.solutions.iter_mut() {
        s.tag = Tag::Lower;
    }
    while branch.solutions.len() < opts.max_points {
        let k = branch.solutions.len();
        let (a, b) = (&branch.solutions[k - 2], &branch.solutions[k - 1]);
        if stop(b) {
            break;
        }
        let len = norm(b, a);
        let tangent_u: Vec<f64> = b.u.iter().zip(&a.u).map(|(y, x)| (y - x) / len).collect();
        let tangent_lambda = (b.lambda - a.lambda) / len;
        let mut halvings = 0;
        let next = loop {
            let guess: Vec<f64> = b.u.iter().zip(&tangent_u).map(|(y, t)| y + ds * t).collect();
            let c = Constraint::Arclength {
                base_u: b.u.clone(),
                base_lambda: b.lambda,
                tangent_u: tangent_u.clone(),
                tangent_lambda,
                ds,
            };
            match problem.solve(&c, &guess, b.lambda + ds * tangent_lambda, &opts.newton) {
                Ok(s) => break Some(s),
                Err(e) => {
                    halvings += 1;
                    if halvings > MAX_HALVINGS {
                        branch.failure = Some(format!("step at λ = {} failed after {MAX_HALVINGS} halvings: {e}", b.lambda));
                        break None;
                    }
                    ds *= 0.5;
                }
            }
        };
        let Some(mut s) = next else { break };
        if rising == rising0 && (s.lambda >= b.lambda) != rising0 {
            rising = !rising0;
            branch.fold_index = Some(k);
        }
        s.tag = if rising == rising0 { Tag::Lower } else { Tag::Upper };
        if s.iterations <= 4 {
            ds = (1.5 * ds).min(opts.ds_max);
        }
        branch.solutions.push(s);
    }
    branch
}
