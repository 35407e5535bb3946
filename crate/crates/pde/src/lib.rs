//! Finite-difference solver for `−ΔU = λeᵁ` on rasterized planar domains.
//!
//! [`mesh::rasterize`] turns a [`geometry::GeometrySpec`] into unknowns with
//! boundary-fitted stencils, [`solver::Problem`] runs Newton at fixed `λ`,
//! `β`, energy or arclength, and [`continuation`] follows the curve through
//! its fold. [`dumbbell`] and [`appendix`] hold the two numerical studies.
//!
//! ```text
//! cargo run --release -p vpl-pde --example disk_fold
//! cargo run --release -p vpl-pde --example dumbbell -- 128
//! cargo run --release -p vpl-pde --example appendix_slope -- 128
//! ```

pub mod appendix;
pub mod continuation;
pub mod dumbbell;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};
