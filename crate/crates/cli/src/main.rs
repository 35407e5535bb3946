use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vortex_phase_lab::{init_threads, parse_config, run, Error, Task};

#[derive(Parser)]
#[command(name = "vortex-phase-lab", version, about = "Mean-field vortex phase diagrams on unions of disks")]
struct Args {
    task: Task,
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "vpl-out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = init_threads().and_then(|()| {
        let loaded = parse_config(&args.config)?;
        for w in &loaded.warnings {
            eprintln!("{}", serde_json::json!({ "warning": w }));
        }
        run(args.task, &loaded, &args.out)
    });
    match result {
        Ok(o) => ExitCode::from(o.exit_code as u8),
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(1)
}
