//! Quadratic basis, coefficient packing, the optimizer oracle and the
//! smoothness constants of the benchmark composite cost.

use nalgebra::DVector;

use gradflow::cost::{
    check_pl, pack_quadratic, quadratic_basis, smoothness_constants, BasisSet, OptimizerOracle,
};
use gradflow::experiment::{exact_config, PRESET_W};

fn main() -> gradflow::Result<()> {
    let b = quadratic_basis(2)?;
    let u = DVector::from_row_slice(&[1.0, 2.0]);
    println!("b(1, 2) = {}", b.eval(&u).transpose());
    println!("∇b(1, 2) =\n{}", b.jacobian(&u));

    let built = exact_config().build()?;
    let cost = &built.cost;
    let phi = cost.phi.as_pure_quadratic().expect("quadratic preset");
    println!("α = {}", pack_quadratic(&phi)?.transpose());

    let consts = smoothness_constants(cost)?;
    println!(
        "μ_u = {:.4}, ℓ_u = {:.4}, ℓ_y = {:.4}, ℓ = {:.4}, ‖G‖ = {:.4}",
        consts.mu_u, consts.l_u, consts.l_y, consts.l, consts.g_norm
    );

    let w = DVector::from_row_slice(&PRESET_W);
    let oracle = OptimizerOracle::new(cost)?;
    let u_star = oracle.solve(&w, None, 1e-12)?;
    let by_descent = oracle.solve_by_descent(&w, DVector::zeros(4), 1e-12)?;
    println!("u* = {}", u_star.transpose());
    println!(
        "closed form vs descent: {:.2e}",
        (&u_star - by_descent).norm()
    );
    println!("‖∇f(u*)‖ = {:.2e}", cost.gradient(&u_star, &w)?.norm());
    let probe = DVector::from_row_slice(&[2.0, -1.0, 0.5, 3.0]);
    println!(
        "PL holds at {}: {}",
        probe.transpose(),
        check_pl(cost, &consts, &w, &probe, 1e-9)?
    );
    Ok(())
}
