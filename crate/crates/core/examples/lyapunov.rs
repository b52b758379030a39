//! Solve AᵀP + PA = −Q for the four-state benchmark plant and compare with the
//! reference P.

use gradflow::linalg::max_abs;
use gradflow::plant::{lyapunov_residual, validate_hurwitz, LyapunovCertificate, PlantModel};
use gradflow::presets::benchmark4;

fn main() -> gradflow::Result<()> {
    let a = benchmark4::a();
    let q = benchmark4::q();
    let h = validate_hurwitz(&a)?;
    println!("hurwitz: {} (max Re λ(A) = {:.4})", h.stable, h.margin);

    let cert = LyapunovCertificate::solve(&a, &q)?;
    println!("P = {:.4}", cert.p);
    println!(
        "residual |AᵀP + PA + Q|_max = {:.2e}",
        lyapunov_residual(&a, &cert.p, &q)
    );
    println!(
        "λ(P) in [{:.4}, {:.4}], λ_min(Q) = {:.4}, decay rate {:.4}",
        cert.lambda_min_p,
        cert.lambda_max_p,
        cert.lambda_min_q,
        cert.decay_rate()
    );

    let reference = benchmark4::p_reference();
    println!("max |P − P_ref| = {:.4}", max_abs(&(&cert.p - &reference)));
    println!(
        "reference P: |AᵀP + PA + Q| = {:.2e}, |AP + PAᵀ + Q| = {:.2e}",
        lyapunov_residual(&a, &reference, &q),
        lyapunov_residual(&a.transpose(), &reference, &q)
    );

    let eye = benchmark4::identity();
    let plant = PlantModel::new(a, eye.clone(), eye.clone(), eye.clone(), eye)?;
    let maps = plant.steady_state_maps();
    println!("G = −A⁻¹ = {:.4}", maps.g);
    Ok(())
}
