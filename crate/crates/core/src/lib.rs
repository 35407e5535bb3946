//! Mean-field vortex states on disjoint unions of disks.
//!
//! * [`disk`]: closed-form single-disk thermodynamics.
//! * [`branch`]: k-branches and merged branches on several disks.
//! * [`transition`]: entropy envelope, classification, transition search.
//! * [`deformed`]: first-order deformed disks and high-energy transitions.
//! * [`oracle`]: brute-force entropy maximization and a radial ODE solver.
//!
//! Runnable walk-throughs live in `examples/`:
//!
//! ```text
//! cargo run -p vpl-core --example disk_states
//! cargo run -p vpl-core --example branches
//! cargo run -p vpl-core --example classify
//! cargo run -p vpl-core --example envelope
//! cargo run -p vpl-core --example low_energy_transition
//! cargo run -p vpl-core --example merged_transition
//! cargo run -p vpl-core --example high_energy
//! cargo run -p vpl-core --example oracle_check
//! ```

pub mod branch;
pub mod deformed;
pub mod disk;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod transition;

pub use error::{Error, Result};
