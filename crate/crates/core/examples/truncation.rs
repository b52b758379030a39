//! Controller learns only the quadratic part; the true input cost carries a
//! fixed log-cosh tail. Small tails are certified, large ones are not.

use gradflow::experiment::{run_experiment, truncation_config};

fn main() -> gradflow::Result<()> {
    for coeff in [0.0, 1e-3, 5e-3, 2e-2, 5e-2] {
        let run = run_experiment(&truncation_config(coeff), None)?;
        let r = &run.report;
        let eps = r.final_epsilon.expect("interval");
        println!(
            "tail {coeff:.0e}: ε′ = {:.2e} (threshold {:.2e})  status {}  final ‖z‖ {:.2e}  max violation {}",
            eps.epsilon,
            eps.threshold,
            r.status,
            r.final_z,
            r.max_violation.map_or("none".into(), |v| format!("{v:.2e}")),
        );
    }
    Ok(())
}
