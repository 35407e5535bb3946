//! Planar domains built as unions of disks, capsule channels and conformal
//! images of a disk under `z ↦ z + εz³`.
//!
//! Every primitive exposes a level function, negative inside. For disks and
//! channels it is the exact signed distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest amplitude accepted for a conformal disk.
pub const CONFORMAL_EPS_MAX: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    Disk {
        center: [f64; 2],
        radius: f64,
    },
    /// Rectangle of the given width around the segment `from`–`to`, with
    /// rounded ends.
    Channel {
        from: [f64; 2],
        to: [f64; 2],
        width: f64,
    },
    /// `center + radius·(z + εz³)` for `|z| < 1`.
    ConformalDisk {
        center: [f64; 2],
        radius: f64,
        epsilon: f64,
    },
}

impl Primitive {
    pub fn level(&self, p: [f64; 2]) -> f64 {
        match *self {
            Primitive::Disk { center, radius } => {
                (p[0] - center[0]).hypot(p[1] - center[1]) - radius
            }
            Primitive::Channel { from, to, width } => segment_distance(p, from, to) - 0.5 * width,
            Primitive::ConformalDisk {
                center,
                radius,
                epsilon,
            } => {
                let w = [(p[0] - center[0]) / radius, (p[1] - center[1]) / radius];
                radius * conformal_level(w, epsilon)
            }
        }
    }

    /// Axis-aligned box `[xmin, ymin, xmax, ymax]`.
    pub fn bounds(&self) -> [f64; 4] {
        match *self {
            Primitive::Disk { center, radius } => [
                center[0] - radius,
                center[1] - radius,
                center[0] + radius,
                center[1] + radius,
            ],
            Primitive::Channel { from, to, width } => {
                let r = 0.5 * width;
                [
                    from[0].min(to[0]) - r,
                    from[1].min(to[1]) - r,
                    from[0].max(to[0]) + r,
                    from[1].max(to[1]) + r,
                ]
            }
            Primitive::ConformalDisk {
                center,
                radius,
                epsilon,
            } => {
                let r = radius * (1.0 + epsilon);
                [center[0] - r, center[1] - r, center[0] + r, center[1] + r]
            }
        }
    }

    /// Exact area of the primitive alone.
    pub fn area(&self) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Primitive::Disk { radius, .. } => PI * radius * radius,
            Primitive::Channel { from, to, width } => {
                let len = (to[0] - from[0]).hypot(to[1] - from[1]);
                len * width + 0.25 * PI * width * width
            }
            // |f'|² integrated over the unit disk: π(1 + 3ε²).
            Primitive::ConformalDisk {
                radius, epsilon, ..
            } => PI * radius * radius * (1.0 + 3.0 * epsilon * epsilon),
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match *self {
            Primitive::Disk { center, radius } => finite(&center) && radius > 0.0 && radius.is_finite(),
            Primitive::Channel { from, to, width } => {
                finite(&from) && finite(&to) && width > 0.0 && width.is_finite()
            }
            Primitive::ConformalDisk {
                center,
                radius,
                epsilon,
            } => {
                finite(&center)
                    && radius > 0.0
                    && radius.is_finite()
                    && (0.0..=CONFORMAL_EPS_MAX).contains(&epsilon)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Geometry(format!("primitive {index} is malformed: {self:?}")))
        }
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// `|z| − 1` where `z + εz³ = w`, found by complex Newton from `z = w`.
fn conformal_level(w: [f64; 2], eps: f64) -> f64 {
    let rw = w[0].hypot(w[1]);
    // |f(z)| ≥ |z|(1 − ε|z|²) ≥ 1 − ε on the unit circle.
    if rw > 1.0 + eps + 0.05 {
        return rw - 1.0 - eps;
    }
    if eps == 0.0 {
        return rw - 1.0;
    }
    let (mut zr, mut zi) = (w[0], w[1]);
    for _ in 0..100 {
        let (z2r, z2i) = (zr * zr - zi * zi, 2.0 * zr * zi);
        let (z3r, z3i) = (z2r * zr - z2i * zi, z2r * zi + z2i * zr);
        let (fr, fi) = (zr + eps * z3r - w[0], zi + eps * z3i - w[1]);
        let (dr, di) = (1.0 + 3.0 * eps * z2r, 3.0 * eps * z2i);
        let den = dr * dr + di * di;
        let sr = (fr * dr + fi * di) / den;
        let si = (fi * dr - fr * di) / den;
        zr -= sr;
        zi -= si;
        if sr.abs() + si.abs() <= 1e-15 * (1.0 + zr.abs() + zi.abs()) {
            break;
        }
    }
    zr.hypot(zi) - 1.0
}

fn default_connected() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub primitives: Vec<Primitive>,
    /// Whether the union is expected to be one connected set.
    #[serde(default = "default_connected")]
    pub connected: bool,
}

impl GeometrySpec {
    pub fn new(primitives: Vec<Primitive>, connected: bool) -> Result<Self> {
        let g = GeometrySpec {
            primitives,
            connected,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn disk(center: [f64; 2], radius: f64) -> Self {
        GeometrySpec {
            primitives: vec![Primitive::Disk { center, radius }],
            connected: true,
        }
    }

    /// Checks each primitive and that both ends of every channel sit inside
    /// some other primitive.
    pub fn validate(&self) -> Result<()> {
        if self.primitives.is_empty() {
            return Err(Error::Geometry("no primitives".into()));
        }
        for (i, p) in self.primitives.iter().enumerate() {
            p.validate(i)?;
        }
        for (i, p) in self.primitives.iter().enumerate() {
            if let Primitive::Channel { from, to, .. } = *p {
                for end in [from, to] {
                    let anchored = self
                        .primitives
                        .iter()
                        .enumerate()
                        .any(|(j, q)| j != i && !matches!(q, Primitive::Channel { .. }) && q.level(end) < 0.0);
                    if !anchored {
                        return Err(Error::Geometry(format!(
                            "channel {i} end {end:?} does not lie inside a disk"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Level function of the union.
    pub fn level(&self, p: [f64; 2]) -> f64 {
        self.primitives
            .iter()
            .map(|q| q.level(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.level(p) < 0.0
    }

    pub fn bounding_box(&self) -> [f64; 4] {
        self.primitives.iter().map(Primitive::bounds).fold(
            [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
            |a, b| [a[0].min(b[0]), a[1].min(b[1]), a[2].max(b[2]), a[3].max(b[3])],
        )
    }

    pub fn channel_widths(&self) -> Vec<(usize, f64)> {
        self.primitives
            .iter()
            .enumerate()
            .filter_map(|(i, p)| match *p {
                Primitive::Channel { width, .. } => Some((i, width)),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_level_is_signed_distance() {
        let d = Primitive::Disk {
            center: [1.0, 0.0],
            radius: 0.5,
        };
        assert_eq!(d.level([1.0, 0.0]), -0.5);
        assert!((d.level([2.0, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn channel_rounded_ends() {
        let c = Primitive::Channel {
            from: [0.0, 0.0],
            to: [1.0, 0.0],
            width: 0.2,
        };
        assert!((c.level([0.5, 0.0]) + 0.1).abs() < 1e-15);
        assert!((c.level([1.1, 0.0])).abs() < 1e-15);
        assert!((c.level([-0.3, 0.4]) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn conformal_boundary_maps_to_zero_level() {
        let eps = 0.1;
        let c = Primitive::ConformalDisk {
            center: [0.0, 0.0],
            radius: 1.0,
            epsilon: eps,
        };
        for k in 0..16 {
            let t = k as f64 * 0.39;
            let (c3, s3) = ((3.0 * t).cos(), (3.0 * t).sin());
            let p = [t.cos() + eps * c3, t.sin() + eps * s3];
            assert!(c.level(p).abs() < 1e-12, "{t}");
            assert!(c.level([0.9 * p[0], 0.9 * p[1]]) < 0.0);
        }
        let d = Primitive::ConformalDisk {
            center: [0.0, 0.0],
            radius: 1.0,
            epsilon: 0.0,
        };
        assert!((d.level([0.3, 0.4]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn unanchored_channel_rejected() {
        let g = GeometrySpec::new(
            vec![
                Primitive::Disk {
                    center: [0.0, 0.0],
                    radius: 1.0,
                },
                Primitive::Channel {
                    from: [0.0, 0.0],
                    to: [3.0, 0.0],
                    width: 0.1,
                },
            ],
            true,
        );
        assert!(matches!(g, Err(Error::Geometry(_))));
    }
}
