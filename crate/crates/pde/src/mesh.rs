//! Uniform-grid rasterization of a [`GeometrySpec`].
//!
//! Grid nodes strictly inside the domain are unknowns. Each unknown records,
//! per direction (east, west, north, south), either the neighbouring unknown
//! or the fraction `θ ∈ (0, 1]` of the grid step at which the boundary is
//! crossed. Nodes whose boundary cut is shorter than [`SNAP_THETA`] are moved
//! onto the boundary, i.e. dropped from the unknowns, so the stencil stays well
//! conditioned.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::GeometrySpec;

pub const SNAP_THETA: f64 = 1e-3;

/// Marker for a missing neighbour.
pub const NONE: u32 = u32::MAX;

/// Grid offsets for east, west, north, south.
pub const DIRECTIONS: [[i64; 2]; 4] = [[1, 0], [-1, 0], [0, 1], [0, -1]];

#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    h: f64,
    /// Integer lattice coordinates of grid node (0, 0).
    offset: [i64; 2],
    nx: usize,
    ny: usize,
    index: Vec<u32>,
    nodes: Vec<[u32; 2]>,
    neighbors: Vec<[u32; 4]>,
    arms: Vec<[f64; 4]>,
    weights: Vec<f64>,
    rim: Vec<RimNode>,
    components: usize,
}

/// Grid node that is not an unknown (outside or snapped) but whose dual cell
/// meets the domain; the field vanishes there.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RimNode {
    pub position: [f64; 2],
    pub weight: f64,
}

impl Mesh {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Grid coordinates `(i, j)` of unknown `k`.
    pub fn node(&self, k: usize) -> [u32; 2] {
        self.nodes[k]
    }

    /// Unknown at grid node `(i, j)`, if any.
    pub fn unknown_at(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        match self.index[j * self.nx + i] {
            NONE => None,
            k => Some(k as usize),
        }
    }

    pub fn position(&self, k: usize) -> [f64; 2] {
        let [i, j] = self.nodes[k];
        self.grid_position(i as usize, j as usize)
    }

    fn grid_position(&self, i: usize, j: usize) -> [f64; 2] {
        [
            (self.offset[0] + i as i64) as f64 * self.h,
            (self.offset[1] + j as i64) as f64 * self.h,
        ]
    }

    pub fn neighbors(&self, k: usize) -> [u32; 4] {
        self.neighbors[k]
    }

    pub fn arms(&self, k: usize) -> [f64; 4] {
        self.arms[k]
    }

    /// Dual-cell quadrature weights of the unknowns.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rim(&self) -> &[RimNode] {
        &self.rim
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Number of unknowns times `h²`.
    pub fn mask_area(&self) -> f64 {
        self.len() as f64 * self.h * self.h
    }

    /// Sum of all quadrature weights.
    pub fn quadrature_area(&self) -> f64 {
        let inner: f64 = self.weights.iter().sum();
        inner + self.rim.iter().map(|r| r.weight).sum::<f64>()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Outside,
    Snapped,
    Inside,
}

/// Rasterizes `geometry` with spacing `h`.
pub fn rasterize(geometry: &GeometrySpec, h: f64) -> Result<Mesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain {
            name: "h",
            value: h,
            range: "(0, ∞)",
        });
    }
    geometry.validate()?;
    for (index, width) in geometry.channel_widths() {
        if width < 2.0 * h {
            return Err(Error::ChannelTooThin {
                index,
                width,
                limit: 2.0 * h,
            });
        }
    }
    let [x0, y0, x1, y1] = geometry.bounding_box();
    let offset = [(x0 / h).floor() as i64 - 2, (y0 / h).floor() as i64 - 2];
    let nx = ((x1 / h).ceil() as i64 + 3 - offset[0]) as usize;
    let ny = ((y1 / h).ceil() as i64 + 3 - offset[1]) as usize;
    let pos = |i: usize, j: usize| {
        [
            (offset[0] + i as i64) as f64 * h,
            (offset[1] + j as i64) as f64 * h,
        ]
    };
    let phi: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|g| geometry.level(pos(g % nx, g / nx)))
        .collect();

    // Boundary cuts along the four grid directions, for inside nodes only.
    let cuts: Vec<[f64; 4]> = (0..nx * ny)
        .into_par_iter()
        .map(|g| {
            let mut c = [1.0; 4];
            if phi[g] >= 0.0 {
                return c;
            }
            let (i, j) = (g % nx, g / nx);
            let p = pos(i, j);
            for (d, dir) in DIRECTIONS.iter().enumerate() {
                let (ni, nj) = ((i as i64 + dir[0]) as usize, (j as i64 + dir[1]) as usize);
                if phi[nj * nx + ni] >= 0.0 {
                    c[d] = crossing(geometry, p, [dir[0] as f64 * h, dir[1] as f64 * h]);
                }
            }
            c
        })
        .collect();

    let kind: Vec<Kind> = (0..nx * ny)
        .map(|g| {
            if phi[g] >= 0.0 {
                Kind::Outside
            } else if cuts[g].iter().any(|&t| t < SNAP_THETA) {
                Kind::Snapped
            } else {
                Kind::Inside
            }
        })
        .collect();

    let mut index = vec![NONE; nx * ny];
    let mut nodes = Vec::new();
    for g in 0..nx * ny {
        if kind[g] == Kind::Inside {
            index[g] = nodes.len() as u32;
            nodes.push([(g % nx) as u32, (g / nx) as u32]);
        }
    }
    if nodes.is_empty() {
        return Err(Error::EmptyMesh(h));
    }
    let mut neighbors = Vec::with_capacity(nodes.len());
    let mut arms = Vec::with_capacity(nodes.len());
    for &[i, j] in &nodes {
        let g = j as usize * nx + i as usize;
        let mut nb = [NONE; 4];
        let mut arm = [1.0; 4];
        for (d, dir) in DIRECTIONS.iter().enumerate() {
            let ng = (j as i64 + dir[1]) as usize * nx + (i as i64 + dir[0]) as usize;
            match kind[ng] {
                Kind::Inside => nb[d] = index[ng],
                Kind::Snapped => {}
                Kind::Outside => arm[d] = cuts[g][d],
            }
        }
        neighbors.push(nb);
        arms.push(arm);
    }

    let fractions: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|g| cell_fraction(geometry, pos(g % nx, g / nx), phi[g], h))
        .collect();
    let h2 = h * h;
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&[i, j]| h2 * fractions[j as usize * nx + i as usize])
        .collect();
    let rim = (0..nx * ny)
        .filter(|&g| kind[g] != Kind::Inside && fractions[g] > 0.0)
        .map(|g| RimNode {
            position: pos(g % nx, g / nx),
            weight: h2 * fractions[g],
        })
        .collect();

    let components = count_components(&neighbors);
    if geometry.connected && components > 1 {
        return Err(Error::Disconnected { components });
    }
    Ok(Mesh {
        h,
        offset,
        nx,
        ny,
        index,
        nodes,
        neighbors,
        arms,
        weights,
        rim,
        components,
    })
}

/// Fraction of the segment `p → p + step` before the level function turns
/// non-negative, by bisection.
fn crossing(geometry: &GeometrySpec, p: [f64; 2], step: [f64; 2]) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if geometry.level([p[0] + mid * step[0], p[1] + mid * step[1]]) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Area fraction of the dual cell `p + [−h/2, h/2]²` inside the domain, with
/// the level function replaced by its linearization at `p`.
fn cell_fraction(geometry: &GeometrySpec, p: [f64; 2], phi: f64, h: f64) -> f64 {
    if phi.abs() >= 2.0 * h {
        return if phi < 0.0 { 1.0 } else { 0.0 };
    }
    let d = 1e-4 * h;
    let gx = (geometry.level([p[0] + d, p[1]]) - geometry.level([p[0] - d, p[1]])) / (2.0 * d);
    let gy = (geometry.level([p[0], p[1] + d]) - geometry.level([p[0], p[1] - d])) / (2.0 * d);
    let (a, b) = (gx.abs() * h, gy.abs() * h);
    let u = 0.5 * (a + b) - phi;
    linear_cut_fraction(a, b, u)
}

/// `P(p + q < u)` for independent `p ~ U[0, a]`, `q ~ U[0, b]`.
fn linear_cut_fraction(a: f64, b: f64, u: f64) -> f64 {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if b <= 0.0 {
        return if u > 0.0 { 1.0 } else { 0.0 };
    }
    if a <= 1e-12 * b {
        return (u / b).clamp(0.0, 1.0);
    }
    let r = |x: f64| if x > 0.0 { x * x } else { 0.0 };
    ((r(u) - r(u - a) - r(u - b) + r(u - a - b)) / (2.0 * a * b)).clamp(0.0, 1.0)
}

fn count_components(neighbors: &[[u32; 4]]) -> usize {
    let mut seen = vec![false; neighbors.len()];
    let mut stack = Vec::new();
    let mut count = 0;
    for start in 0..neighbors.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(k) = stack.pop() {
            for &nb in &neighbors[k] {
                if nb != NONE && !seen[nb as usize] {
                    seen[nb as usize] = true;
                    stack.push(nb as usize);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Primitive;
    use std::f64::consts::PI;

    #[test]
    fn cut_fraction_limits() {
        assert_eq!(linear_cut_fraction(1.0, 1.0, 1.0), 0.5);
        assert_eq!(linear_cut_fraction(1.0, 1.0, 2.5), 1.0);
        assert_eq!(linear_cut_fraction(1.0, 1.0, -0.1), 0.0);
        assert!((linear_cut_fraction(0.0, 1.0, 0.3) - 0.3).abs() < 1e-15);
        assert!((linear_cut_fraction(1.0, 2.0, 1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn disk_area_and_weights() {
        let g = GeometrySpec::disk([0.0, 0.0], 1.0);
        let m = rasterize(&g, 1.0 / 64.0).unwrap();
        assert!((m.mask_area() - PI).abs() / PI < 0.02);
        assert!((m.quadrature_area() - PI).abs() / PI < 1e-4, "{}", m.quadrature_area());
        assert_eq!(m.components(), 1);
        for k in 0..m.len() {
            for t in m.arms(k) {
                assert!(t >= SNAP_THETA && t <= 1.0);
            }
        }
    }

    #[test]
    fn disconnected_union_detected() {
        let prims = vec![
            Primitive::Disk {
                center: [0.0, 0.0],
                radius: 0.5,
            },
            Primitive::Disk {
                center: [2.0, 0.0],
                radius: 0.5,
            },
        ];
        let g = GeometrySpec::new(prims.clone(), true).unwrap();
        assert!(matches!(rasterize(&g, 0.05), Err(Error::Disconnected { components: 2 })));
        let g = GeometrySpec::new(prims, false).unwrap();
        assert_eq!(rasterize(&g, 0.05).unwrap().components(), 2);
    }
}
