//! Sinusoidal-disturbance learning run and its ISS asymptote.
//!
//! cargo run --release --example fig2b -- out

use std::path::PathBuf;

use gradflow::experiment::{fig2b_config, run_experiment, write_outputs};

fn main() -> gradflow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let run = run_experiment(&fig2b_config(), None)?;
    let (csv, _) = write_outputs(&run, &dir, "fig2b")?;
    print!("{}", run.report.to_text());
    let tail = run.trajectory.samples.iter().filter(|s| s.t >= 60.0);
    let worst = tail.map(|s| s.z_norm).fold(0.0, f64::max);
    println!("max ‖z‖ over t ≥ 60: {worst:.3e}");
    println!("wrote {}", csv.display());
    Ok(())
}
