//! Constant-disturbance learning run; writes fig2a.csv (columns t, z_norm,
//! u_err_norm, x_err_norm, bound, event, w_dot_norm) to the given directory.
//!
//! cargo run --release --example fig2a -- out

use std::path::PathBuf;

use gradflow::experiment::{fig2a_config, run_experiment, write_outputs};

fn main() -> gradflow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let run = run_experiment(&fig2a_config(), None)?;
    let (csv, _) = write_outputs(&run, &dir, "fig2a")?;
    print!("{}", run.report.to_text());

    let b = run.bound.as_ref().expect("certificate");
    println!("arrival  t        bound before  bound after");
    for pair in b.intervals.windows(2) {
        if let (Some(before), Some(after)) = (pair[0].value_at_end, b.values[pair[1].start_index]) {
            println!(
                "         {:7.3}  {:.3e}     {:.3e}",
                pair[1].t_start, before, after
            );
        }
    }
    println!("wrote {}", csv.display());
    Ok(())
}
