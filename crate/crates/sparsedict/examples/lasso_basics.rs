//! Solve a small l1-regularized least-squares problem and walk the
//! regularization path: larger lambda buys sparsity at the cost of
//! reconstruction error. Every solve carries a KKT certificate.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsedict::{reconstruction_error, solve_lasso, LassoConfig};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // 20-dim signal, 10-atom dictionary, ground truth using only 3 atoms,
    // observed with a little noise
    let dict: Array2<f64> = Array2::from_shape_fn((20, 10), |_| rng.gen_range(-1.0..1.0));
    let mut truth = Array1::<f64>::zeros(10);
    truth[2] = 1.5;
    truth[5] = -0.8;
    truth[9] = 0.6;
    let mut y = dict.dot(&truth);
    for v in y.iter_mut() {
        *v += rng.gen_range(-0.05..0.05);
    }

    println!("ground truth support: [2, 5, 9]");
    println!("{:>8}  {:>4}  {:>10}  {:>10}  {:>9}", "lambda", "nnz", "objective", "recon err", "kkt");
    for lambda in [1.0, 0.3, 0.1, 0.03, 0.01, 0.001] {
        let cfg = LassoConfig::with_lambda(lambda);
        let code = solve_lasso(y.view(), dict.view(), &cfg).expect("solver");
        let err = reconstruction_error(y.view(), dict.view(), code.coeffs.view()).unwrap();
        println!(
            "{lambda:>8}  {:>4}  {:>10.6}  {:>10.6}  {:>9.2e}",
            code.nnz(),
            code.objective,
            err,
            code.kkt_residual
        );
    }

    let code = solve_lasso(y.view(), dict.view(), &LassoConfig::with_lambda(0.3)).unwrap();
    println!("\nnonzero coefficients at lambda = 0.3 (truth: x2=1.5, x5=-0.8, x9=0.6):");
    for (j, &v) in code.coeffs.iter().enumerate() {
        if v != 0.0 {
            println!("  x{j} = {v:.4}");
        }
    }
    println!("converged in {} sweeps", code.iterations);
}
