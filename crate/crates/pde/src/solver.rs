//! Newton solver for `−Δ_h U = λ K eᵁ` with `U = 0` on the boundary.
//!
//! `Δ_h` is the Shortley–Weller five-point Laplacian: near the boundary the
//! arm towards the cut is shortened to `θh`. `K` is a positive weight per
//! node (one for plain domains). The unknowns are either `U` at fixed `λ`, or
//! `(U, λ)` with one scalar side condition (fixed `β`, fixed energy or a
//! pseudo-arclength condition). Bordered systems are solved by block
//! elimination with the sparse LU of `J = A − λ diag(K eᵁ)` followed by one
//! step of iterative refinement.

use std::sync::Mutex;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::lu::{self, NumericLu, SymbolicLu};
use faer::sparse::{SparseColMat, SparseColMatRef, Triplet};
use faer::{Conj, MatMut, Par};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NONE};

pub const DEFAULT_TOL: f64 = 1e-10;
/// Largest accepted last Newton update, relative to `1 + max|U|`.
pub const DEFAULT_STEP_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_ITER: usize = 60;

/// Side of the fold a solution was found on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Lower,
    Upper,
    Untagged,
}

#[derive(Debug, Clone, Serialize)]
pub struct PdeSolution {
    pub lambda: f64,
    pub u: Vec<f64>,
    /// `∫K eᵁ`.
    pub z: f64,
    pub beta: f64,
    /// `(1/2λZ²)∫K U eᵁ`.
    pub energy: f64,
    /// `(1/2λ²Z²)∫|∇U|²`.
    pub energy_gradient: f64,
    /// `ln Z + 2βE`.
    pub entropy: f64,
    /// Sup norm of the Jacobi-scaled residual.
    pub residual: f64,
    pub iterations: usize,
    pub tag: Tag,
}

impl PdeSolution {
    pub fn u_max(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }

    /// `−E − ln Z / β`.
    pub fn free_energy(&self) -> f64 {
        -self.energy - self.z.ln() / self.beta
    }

    /// Relative gap between the two energy quadratures.
    pub fn energy_mismatch(&self) -> f64 {
        (self.energy - self.energy_gradient).abs() / self.energy.abs()
    }
}

/// Scalar side condition closing the system when `λ` is unknown.
#[derive(Debug, Clone)]
pub enum Constraint {
    Lambda(f64),
    /// `−λZ = β`, requires `β < 0`.
    Beta(f64),
    Energy(f64),
    /// `⟨t, (U, λ) − base⟩ = ds` in the inner product of [`Problem::inner`].
    Arclength {
        base_u: Vec<f64>,
        base_lambda: f64,
        tangent_u: Vec<f64>,
        tangent_lambda: f64,
        ds: f64,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    /// Bound on the Jacobi-scaled residual `|Fᵢ/Aᵢᵢ|`.
    pub tol: f64,
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: DEFAULT_TOL,
            step_tol: DEFAULT_STEP_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Integrals of a field `(U, λ)` on the mesh.
#[derive(Debug, Clone, Copy)]
struct Moments {
    z: f64,
    s1: f64,
}

struct Factor {
    symbolic: SymbolicLu<usize>,
    numeric: NumericLu<usize, f64>,
    factor_mem: MemBuffer,
    solve_mem: MemBuffer,
    values: Vec<f64>,
}

/// Discrete operator, weights and a reusable symbolic factorization on one
/// mesh.
pub struct Problem<'m> {
    mesh: &'m Mesh,
    kernel: Vec<f64>,
    rim_mass: f64,
    area: f64,
    /// Stencil coefficients towards E, W, N, S; the diagonal is their sum.
    coef: Vec<[f64; 4]>,
    diag: Vec<f64>,
    matrix: SparseColMat<usize, f64>,
    diag_pos: Vec<usize>,
    factor: Mutex<Factor>,
}

impl<'m> Problem<'m> {
    pub fn new(mesh: &'m Mesh) -> Result<Self> {
        Self::with_kernel(mesh, |_| 1.0)
    }

    /// Problem with weight `K(x)`, which must be positive on the domain.
    pub fn with_kernel<F>(mesh: &'m Mesh, kernel: F) -> Result<Self>
    where
        F: Fn([f64; 2]) -> f64 + Sync,
    {
        let n = mesh.len();
        let k: Vec<f64> = (0..n).into_par_iter().map(|i| kernel(mesh.position(i))).collect();
        if let Some(bad) = k.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Domain {
                name: "kernel",
                value: *bad,
                range: "(0, ∞)",
            });
        }
        let rim_mass = mesh.rim().iter().map(|r| r.weight * kernel(r.position)).sum();
        let h2 = mesh.h() * mesh.h();
        let mut coef = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        let mut triplets = Vec::with_capacity(5 * n);
        for i in 0..n {
            let t = mesh.arms(i);
            let mut c = [0.0; 4];
            for (d, cd) in c.iter_mut().enumerate() {
                let opp = d ^ 1;
                *cd = 2.0 / (h2 * t[d] * (t[d] + t[opp]));
            }
            let dsum = c.iter().sum::<f64>();
            triplets.push(Triplet::new(i, i, dsum));
            for (d, &nb) in mesh.neighbors(i).iter().enumerate() {
                if nb != NONE {
                    triplets.push(Triplet::new(i, nb as usize, -c[d]));
                }
            }
            coef.push(c);
            diag.push(dsum);
        }
        let matrix = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let col_ptr = matrix.symbolic().col_ptr();
        let row_idx = matrix.symbolic().row_idx();
        let diag_pos = (0..n)
            .map(|j| (col_ptr[j]..col_ptr[j + 1]).find(|&p| row_idx[p] == j).expect("diagonal entry"))
            .collect();
        let symbolic = lu::factorize_symbolic_lu(matrix.symbolic(), Default::default())
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let factor_mem = MemBuffer::new(symbolic.factorize_numeric_lu_scratch::<f64>(Par::Seq, Default::default()));
        let solve_mem = MemBuffer::new(symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
        let values = matrix.val().to_vec();
        let area = mesh.weights().iter().sum::<f64>() + mesh.rim().iter().map(|r| r.weight).sum::<f64>();
        Ok(Problem {
            mesh,
            kernel: k,
            rim_mass,
            area,
            coef,
            diag,
            matrix,
            diag_pos,
            factor: Mutex::new(Factor {
                symbolic,
                numeric: NumericLu::new(),
                factor_mem,
                solve_mem,
                values,
            }),
        })
    }

    pub fn mesh(&self) -> &Mesh {
        self.mesh
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// Quadrature area of the domain.
    pub fn area(&self) -> f64 {
        self.area
    }

    /// `Σ (wᵢ/|Λ|) uᵢvᵢ + λμ`, used for arclength conditions.
    pub fn inner(&self, u: &[f64], lu: f64, v: &[f64], lv: f64) -> f64 {
        let w = self.mesh.weights();
        let s: f64 = (0..u.len()).map(|i| w[i] * u[i] * v[i]).sum();
        s / self.area + lu * lv
    }

    /// `A u`.
    pub fn apply_laplacian(&self, u: &[f64]) -> Vec<f64> {
        (0..u.len())
            .into_par_iter()
            .map(|i| {
                let mut s = self.diag[i] * u[i];
                for (d, &nb) in self.mesh.neighbors(i).iter().enumerate() {
                    if nb != NONE {
                        s -= self.coef[i][d] * u[nb as usize];
                    }
                }
                s
            })
            .collect()
    }

    fn residual(&self, u: &[f64], lambda: f64) -> Vec<f64> {
        let au = self.apply_laplacian(u);
        au.into_par_iter()
            .enumerate()
            .map(|(i, a)| a - lambda * self.kernel[i] * u[i].exp())
            .collect()
    }

    fn moments(&self, u: &[f64]) -> Moments {
        let w = self.mesh.weights();
        let mut z = self.rim_mass;
        let mut s1 = 0.0;
        for i in 0..u.len() {
            let m = w[i] * self.kernel[i] * u[i].exp();
            z += m;
            s1 += m * u[i];
        }
        Moments { z, s1 }
    }

    /// `∫|∇U|²` from squared differences along grid edges, including the
    /// shortened edges to the boundary.
    pub fn dirichlet_integral(&self, u: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..u.len() {
            let nb = self.mesh.neighbors(i);
            let arms = self.mesh.arms(i);
            for d in 0..4 {
                if nb[d] == NONE {
                    s += u[i] * u[i] / arms[d];
                } else if d == 0 || d == 2 {
                    let diff = u[i] - u[nb[d] as usize];
                    s += diff * diff;
                }
            }
        }
        s
    }

    /// Derived quantities of `(U, λ)`.
    pub fn evaluate(&self, u: Vec<f64>, lambda: f64, residual: f64, iterations: usize) -> PdeSolution {
        let m = self.moments(&u);
        let energy = m.s1 / (2.0 * lambda * m.z * m.z);
        let energy_gradient = self.dirichlet_integral(&u) / (2.0 * lambda * lambda * m.z * m.z);
        let beta = -lambda * m.z;
        PdeSolution {
            lambda,
            z: m.z,
            beta,
            energy,
            energy_gradient,
            entropy: m.z.ln() + 2.0 * beta * energy,
            residual,
            iterations,
            tag: Tag::Untagged,
            u,
        }
    }

    fn scaled_sup(&self, f: &[f64]) -> f64 {
        f.iter()
            .zip(&self.diag)
            .map(|(v, d)| (v / d).abs())
            .fold(0.0, f64::max)
    }

    fn merit(&self, f: &[f64], g: f64) -> f64 {
        let s: f64 = f.iter().zip(&self.diag).map(|(v, d)| (v / d) * (v / d)).sum();
        s / f.len() as f64 + g * g
    }

    /// Side-condition value and its derivatives `(G, ∂G/∂U, ∂G/∂λ)`.
    fn side(&self, c: &Constraint, u: &[f64], lambda: f64) -> Option<(f64, Vec<f64>, f64)> {
        let w = self.mesh.weights();
        match c {
            Constraint::Lambda(_) => None,
            Constraint::Beta(beta) => {
                let m = self.moments(u);
                let s = -1.0 / beta;
                let b = (0..u.len()).map(|i| s * lambda * w[i] * self.kernel[i] * u[i].exp()).collect();
                Some((s * lambda * m.z - 1.0, b, s * m.z))
            }
            Constraint::Energy(target) => {
                let m = self.moments(u);
                let e = m.s1 / (2.0 * lambda * m.z * m.z);
                let a = 1.0 / (2.0 * lambda * m.z * m.z);
                let b = (0..u.len())
                    .map(|i| w[i] * self.kernel[i] * u[i].exp() * (a * (1.0 + u[i]) - 2.0 * e / m.z) / target)
                    .collect();
                Some((e / target - 1.0, b, -e / (lambda * target)))
            }
            Constraint::Arclength {
                base_u,
                base_lambda,
                tangent_u,
                tangent_lambda,
                ds,
            } => {
                let du: Vec<f64> = u.iter().zip(base_u).map(|(a, b)| a - b).collect();
                let g = self.inner(tangent_u, *tangent_lambda, &du, lambda - base_lambda) - ds;
                let b = (0..u.len()).map(|i| w[i] * tangent_u[i] / self.area).collect();
                Some((g, b, *tangent_lambda))
            }
        }
    }

    /// Damped Newton from `(u0, λ0)`; `λ0` is ignored for [`Constraint::Lambda`].
    pub fn solve(&self, constraint: &Constraint, u0: &[f64], lambda0: f64, opts: &NewtonOptions) -> Result<PdeSolution> {
        let n = self.mesh.len();
        assert_eq!(u0.len(), n, "initial iterate has the wrong length");
        let mut u = u0.to_vec();
        let mut lambda = match constraint {
            Constraint::Lambda(l) => *l,
            _ => lambda0,
        };
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain {
                name: "lambda",
                value: lambda,
                range: "(0, ∞)",
            });
        }
        if let Constraint::Beta(b) = constraint {
            if !(*b < 0.0) {
                return Err(Error::Domain {
                    name: "beta",
                    value: *b,
                    range: "(−∞, 0)",
                });
            }
        }
        let mut f = self.residual(&u, lambda);
        let mut side = self.side(constraint, &u, lambda);
        let mut iterations = 0;
        let mut last_step = f64::INFINITY;
        loop {
            let g = side.as_ref().map_or(0.0, |s| s.0);
            let res = self.scaled_sup(&f);
            let scale = 1.0 + u.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            if res <= opts.tol && g.abs() <= opts.tol * 1e-2 && last_step <= opts.step_tol * scale {
                return Ok(self.evaluate(u, lambda, res, iterations));
            }
            if iterations >= opts.max_iter {
                return Err(Error::Newton {
                    iterations,
                    residual: res,
                    lambda,
                    last_iterate: u,
                });
            }
            iterations += 1;
            let (du, dl) = self.newton_step(&u, lambda, &f, side.as_ref())?;
            let m0 = self.merit(&f, g);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + alpha * d).collect();
                let tl = lambda + alpha * dl;
                if tl > 0.0 && trial.iter().all(|v| v.is_finite() && *v < 700.0) {
                    let tf = self.residual(&trial, tl);
                    let ts = self.side(constraint, &trial, tl);
                    let tg = ts.as_ref().map_or(0.0, |s| s.0);
                    let mt = self.merit(&tf, tg);
                    if mt.is_finite() && (mt < (1.0 - 1e-4 * alpha) * m0 || (alpha == 1.0 && mt <= m0)) {
                        last_step = alpha * du.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                        u = trial;
                        lambda = tl;
                        f = tf;
                        side = ts;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                // Already at the rounding floor: nothing left to gain.
                if res <= opts.tol && g.abs() <= opts.tol * 1e-2 {
                    return Ok(self.evaluate(u, lambda, res, iterations));
                }
                return Err(Error::Newton {
                    iterations,
                    residual: self.scaled_sup(&f),
                    lambda,
                    last_iterate: u,
                });
            }
        }
    }

    fn newton_step(
        &self,
        u: &[f64],
        lambda: f64,
        f: &[f64],
        side: Option<&(f64, Vec<f64>, f64)>,
    ) -> Result<(Vec<f64>, f64)> {
        let n = u.len();
        let ke: Vec<f64> = (0..n).map(|i| self.kernel[i] * u[i].exp()).collect();
        let mut guard = self.factor.lock().unwrap_or_else(|e| e.into_inner());
        let Factor {
            symbolic,
            numeric,
            factor_mem,
            solve_mem,
            values,
        } = &mut *guard;
        values.copy_from_slice(self.matrix.val());
        for i in 0..n {
            values[self.diag_pos[i]] -= lambda * ke[i];
        }
        let jac = SparseColMatRef::new(self.matrix.symbolic(), values);
        let lu = symbolic
            .factorize_numeric_lu(numeric, jac, Par::Seq, MemStack::new(factor_mem), Default::default())
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let mut solve = |rhs: &mut Vec<f64>| {
            lu.solve_in_place_with_conj(
                Conj::No,
                MatMut::from_column_major_slice_mut(rhs.as_mut_slice(), n, 1),
                Par::Seq,
                MemStack::new(solve_mem),
            );
        };
        let jmul = |v: &[f64]| -> Vec<f64> {
            let mut a = self.apply_laplacian(v);
            for i in 0..n {
                a[i] -= lambda * ke[i] * v[i];
            }
            a
        };
        let mut x: Vec<f64> = f.iter().map(|v| -v).collect();
        solve(&mut x);
        let Some((g, b, d)) = side else {
            let r = jmul(&x);
            let mut dx: Vec<f64> = (0..n).map(|i| -f[i] - r[i]).collect();
            solve(&mut dx);
            for i in 0..n {
                x[i] += dx[i];
            }
            return Ok((x, 0.0));
        };
        // ∂F/∂λ = −K eᵁ.
        let mut y: Vec<f64> = ke.iter().map(|v| -v).collect();
        solve(&mut y);
        let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(p, q)| p * q).sum::<f64>();
        let schur = d - dot(b, &y);
        let mut dl = (-g - dot(b, &x)) / schur;
        let mut du: Vec<f64> = (0..n).map(|i| x[i] - dl * y[i]).collect();
        let r = jmul(&du);
        let mut r1: Vec<f64> = (0..n).map(|i| -f[i] - r[i] + ke[i] * dl).collect();
        let r2 = -g - dot(b, &du) - d * dl;
        solve(&mut r1);
        let ddl = (r2 - dot(b, &r1)) / schur;
        for i in 0..n {
            du[i] += r1[i] - ddl * y[i];
        }
        dl += ddl;
        Ok((du, dl))
    }
}

/// Solves at fixed `λ` from `u0`, or from zero when `u0` is `None`.
pub fn solve_lambda(mesh: &Mesh, lambda: f64, u0: Option<&[f64]>) -> Result<PdeSolution> {
    let p = Problem::new(mesh)?;
    let zero = vec![0.0; mesh.len()];
    p.solve(&Constraint::Lambda(lambda), u0.unwrap_or(&zero), lambda, &NewtonOptions::default())
}

/// Disk profile `U = −2 ln(1 − μ(1 − |x − c|²/R²))` on the nodes inside the
/// disk, zero elsewhere.
pub fn disk_seed(mesh: &Mesh, center: [f64; 2], radius: f64, mu: f64, out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        let p = mesh.position(k);
        let r2 = ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)) / (radius * radius);
        if r2 < 1.0 {
            *o = -2.0 * (-mu * (1.0 - r2)).ln_1p();
        }
    }
}
