//! Closed loop with the true cost known to the controller: ‖z(t)‖ decays
//! at least as fast as the certified rate a/2.

use gradflow::experiment::{exact_config, run_experiment};

fn main() -> gradflow::Result<()> {
    let run = run_experiment(&exact_config(), None)?;
    let cert = run.report.certificate.expect("certificate");
    let a = run.report.final_epsilon.expect("interval").a;
    println!(
        "certified decay a/2 = {:.4}, κ₁ = {:.3}",
        a / 2.0,
        cert.kappa1
    );
    let bound = run.bound_values().expect("bound");
    for (i, s) in run.trajectory.samples.iter().enumerate().step_by(400) {
        println!(
            "t = {:5.1}  ‖z‖ = {:.3e}  bound = {:.3e}",
            s.t,
            s.z_norm,
            bound[i].unwrap_or(f64::NAN)
        );
    }
    println!("final ‖z‖ = {:.3e}", run.report.final_z);
    Ok(())
}
