//! Active dictionary learning: probe the training set with K random
//! dictionaries, accumulate reconstruction + classification error per
//! sample, and keep the hardest samples as atoms. The learned dictionary
//! trades a little accuracy for a fraction of the whole-training-data
//! dictionary's size; the run ends by round-tripping it through the JSON
//! dictionary format.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsedict::{
    adl_learn, load_dictionary, make_folds, save_dictionary, src_classify, wd_dictionary,
    AdlConfig, Dataset, LassoConfig,
};

/// Four classes, each a noisy 3-dimensional subspace of R^16 — the kind
/// of structure sparse-representation classification is built for.
fn subspace_data(seed: u64, per_class: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (classes, dim, sub) = (4, 16, 3);
    let mut features = Array2::zeros((dim, classes * per_class));
    let mut labels = Vec::new();
    for class in 0..classes {
        let basis: Array2<f64> = Array2::from_shape_fn((dim, sub), |_| rng.gen_range(-1.0..1.0));
        for s in 0..per_class {
            let coeffs: Array1<f64> = Array1::from_shape_fn(sub, |_| rng.gen_range(-1.0..1.0));
            let mut y = basis.dot(&coeffs);
            for v in y.iter_mut() {
                *v += rng.gen_range(-0.3..0.3);
            }
            features.column_mut(class * per_class + s).assign(&y);
            labels.push(class);
        }
    }
    Dataset::new("subspaces", features, labels).unwrap()
}

fn accuracy(dict: &sparsedict::Dictionary, test: &Dataset, cfg: &LassoConfig) -> f64 {
    let correct = (0..test.len())
        .filter(|&j| {
            src_classify(test.features.column(j), dict, cfg).unwrap().label == test.labels[j]
        })
        .count();
    correct as f64 / test.len() as f64
}

fn main() {
    let full = subspace_data(11, 38);
    let plan = make_folds(&full, 5, 3).unwrap();
    let train = full.subset(&plan.train_indices(0));
    let test = full.subset(&plan.test_indices(0));

    // 30 atoms out of ~120 training samples, 5 probe rounds
    let cfg = AdlConfig::new(30, 99);
    let (dict, ledger) = adl_learn(&train, &cfg).unwrap();

    println!("probe rounds:");
    for (k, (&mean, misses)) in ledger
        .round_mean_recon
        .iter()
        .zip(ledger.errors_per_round())
        .enumerate()
    {
        println!("  round {k}: mean recon error {mean:.4}, misclassified {misses}/{}", train.len());
    }

    // the chosen atoms are the highest-total-error samples
    let mut totals: Vec<f64> = ledger.total.to_vec();
    totals.sort_by(|a, b| b.total_cmp(a));
    println!(
        "\ntotal error: max {:.4}, selection cutoff {:.4}, min {:.4}",
        totals[0],
        totals[cfg.n - 1],
        totals[totals.len() - 1]
    );
    print!("per-class atom counts:");
    for (class, count) in dict.class_histogram().iter().enumerate() {
        print!(" {class}:{count}");
    }
    println!();

    let lasso = LassoConfig::with_lambda(0.1);
    let wd = wd_dictionary(&train);
    println!(
        "\nADL ({} atoms) accuracy: {:.3}",
        dict.atom_count(),
        accuracy(&dict, &test, &lasso)
    );
    println!(
        "WD  ({} atoms) accuracy: {:.3}",
        wd.atom_count(),
        accuracy(&wd, &test, &lasso)
    );

    // dictionaries persist as JSON and reload bit-exactly
    let path = std::env::temp_dir().join("adl_example_dict.json");
    save_dictionary(&dict, &path, serde_json::json!({ "example": "adl" })).unwrap();
    let reloaded = load_dictionary(&path).unwrap();
    assert_eq!(reloaded.atoms, dict.atoms);
    println!("\nround-tripped {} atoms through {}", reloaded.atom_count(), path.display());
    std::fs::remove_file(&path).ok();
}
