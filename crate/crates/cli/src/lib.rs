//! `vortex-phase-lab`: reads one JSON config, runs one task and writes CSV
//! tables (with JSON sidecars) and JSON reports into an output directory.
//!
//! ```text
//! vortex-phase-lab classify --config cfg.json --out results/
//! ```
//!
//! Exit status is 0 on success, 2 when `transition` finds no transition and
//! 1 on any error, with a JSON object describing it on stderr. `VPL_THREADS`
//! caps the worker pool.

pub mod config;
pub mod emit;
pub mod error;
pub mod pde_tasks;
pub mod tasks;

use std::path::{Path, PathBuf};

pub use config::{parse_config, parse_config_bytes, LoadedConfig, RunConfig, Task};
pub use error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
}

pub fn run(task: Task, loaded: &LoadedConfig, out_dir: &Path) -> Result<Outcome> {
    let cfg = &loaded.config;
    cfg.check_task(task)?;
    let mut out = emit::Output::new(out_dir, task, &loaded.sha256, &loaded.warnings)?;
    let exit_code = match task {
        Task::Branch => tasks::branch(cfg, &mut out)?,
        Task::Envelope => tasks::envelope(cfg, &mut out)?,
        Task::Transition => tasks::transition(cfg, &mut out)?,
        Task::Classify => tasks::classify(cfg, &mut out)?,
        Task::HighEnergy => tasks::high_energy(cfg, &mut out)?,
        Task::Oracle => tasks::oracle(cfg, &mut out)?,
        Task::Pde => pde_tasks::pde(cfg, &mut out)?,
        Task::AppendixCheck => tasks::appendix(cfg, &mut out)?,
    };
    Ok(Outcome {
        exit_code,
        files: out.written().to_vec(),
    })
}

/// Sizes the global worker pool from `VPL_THREADS`, if set.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("VPL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Threads(format!("expected a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Threads(e.to_string()))
}
