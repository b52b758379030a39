//! Certificate constants for the benchmark configuration and how the gain
//! limit and the admissible learning error move with s.

use gradflow::certificate::{compute_constants, PlantNorms};
use gradflow::cost::smoothness_constants;
use gradflow::experiment::{cmd_certify, exact_config};
use gradflow::plant::LyapunovCertificate;

fn main() -> gradflow::Result<()> {
    let cfg = exact_config();
    let (report, ok) = cmd_certify(&cfg)?;
    print!("{report}");
    println!("all conditions: {ok}\n");

    let built = cfg.build()?;
    let smooth = smoothness_constants(&built.cost)?;
    let lyap = LyapunovCertificate::solve(&built.plant.a, &built.q)?;
    let norms = PlantNorms::new(&built.plant, &lyap);
    println!("   s    eta_max   c0/c3 (at 0.9 eta_max)");
    for s in [0.1, 0.2, 0.3, 0.5, 0.7, 0.9] {
        let probe = compute_constants(&norms, &smooth, 1e-3, s)?;
        let cert = compute_constants(&norms, &smooth, 0.9 * probe.eta_max, s)?;
        println!(
            "{s:4.1}  {:.5}  {:.3e}",
            cert.eta_max,
            cert.epsilon_threshold()
        );
    }
    Ok(())
}
