//! Coordinate-descent solver for l1-regularized least squares:
//!
//! ```text
//! min_x  ||y - D x||_2^2 + lambda * ||x||_1
//! ```
//!
//! Note the squared term carries no 1/2 factor; comparisons with solvers
//! using the 1/2 convention must rescale lambda.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Solver parameters.
#[derive(Debug, Clone)]
pub struct LassoConfig {
    /// l1 weight, >= 0.
    pub lambda: f64,
    pub max_iters: usize,
    /// KKT / objective-change tolerance.
    pub tol: f64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            lambda: 0.1,
            max_iters: 10_000,
            tol: 1e-6,
        }
    }
}

impl LassoConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        LassoConfig {
            lambda,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda {} must be >= 0", self.lambda)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol {} must be > 0", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Solution with its optimality certificate.
#[derive(Debug, Clone)]
pub struct SparseCode {
    pub coeffs: Array1<f64>,
    /// Value of `||y - D x||^2 + lambda ||x||_1` at `coeffs`.
    pub objective: f64,
    /// Max violation of the subgradient optimality conditions.
    pub kkt_residual: f64,
    /// Completed coordinate sweeps.
    pub iterations: usize,
    pub converged: bool,
}

impl SparseCode {
    pub fn nnz(&self) -> usize {
        self.coeffs.iter().filter(|&&v| v != 0.0).count()
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

fn check_dims(y: ArrayView1<'_, f64>, dict: ArrayView2<'_, f64>) -> Result<()> {
    if dict.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "dictionary has {} rows but y has {} entries",
            dict.nrows(),
            y.len()
        )));
    }
    if dict.ncols() == 0 {
        return Err(Error::Dimension("dictionary has no atoms".into()));
    }
    Ok(())
}

/// Objective `||y - D x||^2 + lambda ||x||_1`.
pub fn lasso_objective(
    y: ArrayView1<'_, f64>,
    dict: ArrayView2<'_, f64>,
    x: ArrayView1<'_, f64>,
    lambda: f64,
) -> f64 {
    let residual = &y.to_owned() - &dict.dot(&x);
    residual.dot(&residual) + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
}

/// Max subgradient violation at `x`: for x_j = 0 the correlation
/// |2 d_j^T (Dx - y)| may exceed lambda by at most the residual; for
/// x_j != 0 stationarity `2 d_j^T (Dx - y) + lambda sign(x_j) = 0` must hold.
pub fn kkt_residual(
    y: ArrayView1<'_, f64>,
    dict: ArrayView2<'_, f64>,
    x: ArrayView1<'_, f64>,
    lambda: f64,
) -> f64 {
    let residual = &dict.dot(&x) - &y.to_owned();
    let mut worst = 0.0f64;
    for (j, &xj) in x.iter().enumerate() {
        let g = 2.0 * dict.column(j).dot(&residual);
        let violation = if xj == 0.0 {
            (g.abs() - lambda).max(0.0)
        } else {
            (g + lambda * xj.signum()).abs()
        };
        worst = worst.max(violation);
    }
    worst
}

/// Cyclic coordinate descent with exact per-coordinate minimization.
/// Deterministic; returns the best iterate with `converged = false` when
/// the sweep budget runs out.
pub fn solve_lasso(
    y: ArrayView1<'_, f64>,
    dict: ArrayView2<'_, f64>,
    cfg: &LassoConfig,
) -> Result<SparseCode> {
    cfg.validate()?;
    check_dims(y, dict)?;
    if dict.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("NaN/Inf in solver input".into()));
    }

    let n = dict.ncols();
    let col_sq: Vec<f64> = (0..n).map(|j| dict.column(j).dot(&dict.column(j))).collect();

    let mut x = Array1::<f64>::zeros(n);
    let mut residual = y.to_owned(); // y - D x
    let mut objective = residual.dot(&residual);
    let mut iterations = 0;
    let mut converged = false;

    for sweep in 0..cfg.max_iters {
        for j in 0..n {
            if col_sq[j] == 0.0 {
                continue; // zero atom: coefficient stays 0
            }
            let col = dict.column(j);
            let rho = col.dot(&residual) + col_sq[j] * x[j];
            let new = soft_threshold(rho, cfg.lambda / 2.0) / col_sq[j];
            let delta = new - x[j];
            if delta != 0.0 {
                residual.scaled_add(-delta, &col);
                x[j] = new;
            }
        }
        iterations = sweep + 1;
        let new_objective =
            residual.dot(&residual) + cfg.lambda * x.iter().map(|v| v.abs()).sum::<f64>();
        let change = (objective - new_objective).abs();
        objective = new_objective;
        if change < cfg.tol * (1.0 + objective.abs())
            && kkt_residual(y, dict, x.view(), cfg.lambda) <= cfg.tol
        {
            converged = true;
            break;
        }
    }

    let kkt = kkt_residual(y, dict, x.view(), cfg.lambda);
    Ok(SparseCode {
        coeffs: x,
        objective,
        kkt_residual: kkt,
        iterations,
        converged,
    })
}

/// Euclidean residual norm `||y - D x||_2`.
pub fn reconstruction_error(
    y: ArrayView1<'_, f64>,
    dict: ArrayView2<'_, f64>,
    x: ArrayView1<'_, f64>,
) -> Result<f64> {
    check_dims(y, dict)?;
    if dict.ncols() != x.len() {
        return Err(Error::Dimension(format!(
            "dictionary has {} atoms but x has {} entries",
            dict.ncols(),
            x.len()
        )));
    }
    let residual = &y.to_owned() - &dict.dot(&x);
    Ok(residual.dot(&residual).sqrt())
}
