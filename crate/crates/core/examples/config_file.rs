//! Load a TOML configuration, print its certificate and run it.
//!
//! cargo run --release --example config_file -- crates/core/configs/two_state.toml

use gradflow::config::{dump_config, load_config};
use gradflow::experiment::{cmd_certify, run_experiment};

fn main() -> gradflow::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/two_state.toml").into());
    let cfg = load_config(&path)?;
    println!("# expanded configuration\n{}", dump_config(&cfg)?);
    let (cert, _) = cmd_certify(&cfg)?;
    print!("{cert}");
    let run = run_experiment(&cfg, None)?;
    print!("{}", run.report.to_text());
    Ok(())
}
