//! LS, ridge, lasso and RLS on evaluations of the benchmark input cost.

use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use gradflow::cost::{pack_quadratic, quadratic_basis, BasisSet};
use gradflow::experiment::exact_config;
use gradflow::learning::{
    estimation_error, fit_lasso, fit_ls, fit_ridge, rls_init, rls_update, Dataset, EvaluationRecord,
};

fn main() -> gradflow::Result<()> {
    let built = exact_config().build()?;
    let alpha = pack_quadratic(&built.cost.phi.as_pure_quadratic().expect("quadratic"))?;
    let basis: Arc<dyn BasisSet> = Arc::new(quadratic_basis(4)?);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(0.0, 1.0).expect("valid");
    let noise = Normal::new(0.0, 1e-3).expect("valid");

    for k in [4usize, 10, 15, 30, 60] {
        let mut data = Dataset::new(basis.clone());
        let mut rls = rls_init(DVector::zeros(basis.len()), 1e6)?;
        for _ in 0..k {
            let u = DVector::from_fn(4, |_, _| normal.sample(&mut rng));
            let rec = EvaluationRecord::new(
                0.0,
                u.clone(),
                basis.eval(&u).dot(&alpha) + noise.sample(&mut rng),
            )?;
            rls = rls_update(&rls, &rec, basis.as_ref())?;
            data.push(rec)?;
        }
        let ls = fit_ls(&data)?;
        let ridge = fit_ridge(&data, 1e-3)?;
        let lasso = fit_lasso(&data, 1e-4).map(|a| format!("{:.2e}", estimation_error(&a, &alpha)));
        println!(
            "K = {k:2}: rank {:2}, LS {:.2e}, ridge {:.2e}, lasso {}, RLS {:.2e}",
            ls.rank,
            estimation_error(&ls.alpha, &alpha),
            estimation_error(&ridge, &alpha),
            lasso.unwrap_or_else(|e| format!("({e})")),
            estimation_error(&rls.alpha, &alpha),
        );
    }
    Ok(())
}
