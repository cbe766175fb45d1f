//! Shared test-only oracles, independent of the library's solver path.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sparsedict::data::Dataset;

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Returns None when the system is (numerically) singular.
pub fn solve_linear(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let n = b.len();
    let mut m = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs()))
            .unwrap();
        if m[[pivot, col]].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[[col, k]];
                m[[col, k]] = m[[pivot, k]];
                m[[pivot, k]] = tmp;
            }
            rhs.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let factor = m[[row, col]] / m[[col, col]];
            for k in col..n {
                m[[row, k]] -= factor * m[[col, k]];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut sum = rhs[row];
        for k in (row + 1)..n {
            sum -= m[[row, k]] * x[k];
        }
        x[row] = sum / m[[row, row]];
    }
    Some(x)
}

/// Exhaustive sign-pattern oracle for
/// `min_x ||y - D x||^2 + lambda ||x||_1`.
///
/// For every sign pattern in {-1, 0, +1}^n, the stationarity system on the
/// support, `2 D_S^T D_S x_S = 2 D_S^T y - lambda * sigma_S`, is solved
/// exactly and the true objective of the resulting candidate evaluated;
/// the optimum's own pattern produces the optimum, so the minimum over
/// candidates is the global optimum.
pub fn lasso_oracle(y: &Array1<f64>, dict: &Array2<f64>, lambda: f64) -> (Array1<f64>, f64) {
    let n = dict.ncols();
    assert!(n <= 12, "oracle enumeration is 3^n");
    let objective = |x: &Array1<f64>| -> f64 {
        let r = y - &dict.dot(x);
        r.dot(&r) + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
    };

    let mut best_x = Array1::zeros(n);
    let mut best_obj = objective(&best_x);

    let mut pattern = vec![0i8; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut rem = code;
        for slot in pattern.iter_mut() {
            *slot = (rem % 3) as i8 - 1; // -1, 0, +1
            rem /= 3;
        }
        let support: Vec<usize> = (0..n).filter(|&j| pattern[j] != 0).collect();
        let k = support.len();

        let mut gram = Array2::zeros((k, k));
        let mut rhs = Array1::zeros(k);
        for (a, &ja) in support.iter().enumerate() {
            for (b, &jb) in support.iter().enumerate() {
                gram[[a, b]] = 2.0 * dict.column(ja).dot(&dict.column(jb));
            }
            rhs[a] = 2.0 * dict.column(ja).dot(y) - lambda * pattern[ja] as f64;
        }
        let Some(x_support) = solve_linear(&gram, &rhs) else {
            continue;
        };
        let mut x = Array1::zeros(n);
        for (a, &j) in support.iter().enumerate() {
            x[j] = x_support[a];
        }
        let obj = objective(&x);
        if obj < best_obj {
            best_obj = obj;
            best_x = x;
        }
    }
    (best_x, best_obj)
}

/// Class-wise SRC residuals recomputed directly from a coefficient vector.
pub fn src_residuals_oracle(
    y: &Array1<f64>,
    dict: &Array2<f64>,
    atom_labels: &[usize],
    class_count: usize,
    x: &Array1<f64>,
) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; class_count];
    for class in 0..class_count {
        if !atom_labels.iter().any(|&l| l == class) {
            continue;
        }
        let mut recon = Array1::<f64>::zeros(y.len());
        for (j, &label) in atom_labels.iter().enumerate() {
            if label == class {
                recon.scaled_add(x[j], &dict.column(j));
            }
        }
        let diff = y - &recon;
        out[class] = diff.dot(&diff).sqrt();
    }
    out
}

/// Gaussian-ish blobs: `classes` clusters on a circle in the first two
/// dimensions plus noise everywhere.
pub fn blobs(
    id: &str,
    dim: usize,
    per_class: usize,
    classes: usize,
    spread: f64,
    seed: u64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = per_class * classes;
    let mut features = Array2::zeros((dim, n));
    let mut labels = Vec::with_capacity(n);
    for class in 0..classes {
        let angle = 2.0 * std::f64::consts::PI * class as f64 / classes as f64;
        for s in 0..per_class {
            let j = class * per_class + s;
            features[[0, j]] = 3.0 * angle.cos();
            features[[1, j]] = 3.0 * angle.sin();
            for i in 0..dim {
                features[[i, j]] += rng.gen_range(-spread..spread);
            }
            labels.push(class);
        }
    }
    Dataset::new(id, features, labels).unwrap()
}
