//! Parallel sweep over the controller gain; each run owns its RNG and the
//! results come back in input order.

use gradflow::experiment::{fig2a_config, run_many, sweep_seeds};

fn main() {
    let etas = [0.02, 0.05, 0.1, 0.15, 0.17, 0.25];
    let seeds = sweep_seeds(42, etas.len());
    let cfgs: Vec<_> = etas
        .iter()
        .zip(&seeds)
        .map(|(&eta, &seed)| {
            let mut c = fig2a_config();
            c.simulation.eta = eta;
            c.simulation.seed = seed;
            c
        })
        .collect();
    for (eta, res) in etas.iter().zip(run_many(&cfgs, None)) {
        match res {
            Ok(run) => {
                let r = &run.report;
                let cert = r.certificate.expect("certificate");
                println!(
                    "eta {eta:.2}: gain ok {:5}  status {:12}  final ‖z‖ {:.2e}  certified from {}",
                    cert.gain_ok,
                    r.status.to_string(),
                    r.final_z,
                    r.certified_from.map_or("-".into(), |t| format!("{t:.1}")),
                );
            }
            Err(e) => println!("eta {eta:.2}: {e}"),
        }
    }
}
