//! High-dimensional pipeline in the eigenface style: samples from
//! class-specific subspaces in 64 dimensions, PCA down to 10 components,
//! then active dictionary learning + SRC on the projected data.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsedict::{
    adl_learn, make_folds, pca_fit, pca_project_dataset, random_dictionary, src_classify,
    AdlConfig, Dataset, LassoConfig,
};

/// Each class occupies its own 3-dimensional subspace of R^64.
fn subspace_data(seed: u64, per_class: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = 4;
    let mut features = Array2::zeros((64, classes * per_class));
    let mut labels = Vec::new();
    for class in 0..classes {
        let basis: Array2<f64> = Array2::from_shape_fn((64, 3), |_| rng.gen_range(-1.0..1.0));
        for s in 0..per_class {
            let coeffs: Array1<f64> = Array1::from_shape_fn(3, |_| rng.gen_range(-1.0..1.0));
            let mut y = basis.dot(&coeffs);
            for v in y.iter_mut() {
                *v += rng.gen_range(-0.4..0.4);
            }
            features.column_mut(class * per_class + s).assign(&y);
            labels.push(class);
        }
    }
    Dataset::new("faces", features, labels).unwrap()
}

fn accuracy(dict: &sparsedict::Dictionary, test: &Dataset, cfg: &LassoConfig) -> f64 {
    (0..test.len())
        .filter(|&j| {
            src_classify(test.features.column(j), dict, cfg).unwrap().label == test.labels[j]
        })
        .count() as f64
        / test.len() as f64
}

fn main() {
    let full = subspace_data(41, 50);

    // hold out one stratified fold, then fit PCA on training data only
    // and project both splits with it
    let plan = make_folds(&full, 5, 8).unwrap();
    let train_raw = full.subset(&plan.train_indices(0));
    let test_raw = full.subset(&plan.test_indices(0));
    let model = pca_fit(&train_raw, 10).unwrap();
    let train = pca_project_dataset(&model, &train_raw);
    let test = pca_project_dataset(&model, &test_raw);

    let variance = |ds: &Dataset| -> f64 {
        let mean = ds.features.mean_axis(ndarray::Axis(1)).unwrap();
        let centered = &ds.features - &mean.insert_axis(ndarray::Axis(1));
        centered.iter().map(|v| v * v).sum::<f64>() / (ds.len() - 1) as f64
    };
    println!(
        "PCA: 64 -> {} dims, {:.1}% variance kept",
        train.feature_dim(),
        100.0 * variance(&train) / variance(&train_raw)
    );

    // 50% size rate: 80 atoms from 160 training samples
    let lasso = LassoConfig::with_lambda(0.1);
    let (adl, _) = adl_learn(&train, &AdlConfig::new(80, 5)).unwrap();
    let rnd = random_dictionary(&train, 80, 5).unwrap();

    println!("\nADL    accuracy on held-out data: {:.3}", accuracy(&adl, &test, &lasso));
    println!("RANDOM accuracy on held-out data: {:.3}", accuracy(&rnd, &test, &lasso));
    println!("\n(the same pipeline applies to vectorized face images: PCA the");
    println!("pixels, learn the dictionary on the projections)");
}
