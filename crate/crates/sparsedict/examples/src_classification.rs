//! Sparse-representation classification: encode a query over a labeled
//! dictionary, then pick the class whose atoms alone reconstruct it best.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsedict::{src_classify, wd_dictionary, Dataset, LassoConfig};

/// Three noisy clusters in 5 dimensions.
fn toy_dataset(seed: u64, per_class: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [
        [2.0, 0.0, 0.0, 1.0, -1.0],
        [-1.0, 2.0, 1.0, -1.0, 0.0],
        [0.0, -2.0, 2.0, 0.0, 1.0],
    ];
    let n = 3 * per_class;
    let mut features = Array2::zeros((5, n));
    let mut labels = Vec::with_capacity(n);
    for (class, center) in centers.iter().enumerate() {
        for s in 0..per_class {
            let j = class * per_class + s;
            for i in 0..5 {
                features[[i, j]] = center[i] + rng.gen_range(-0.6..0.6);
            }
            labels.push(class);
        }
    }
    Dataset::new("toy", features, labels).unwrap()
}

fn main() {
    let train = toy_dataset(1, 12);
    let test = toy_dataset(2, 4);

    // whole-training-data dictionary: every training sample is an atom
    let dict = wd_dictionary(&train);
    println!(
        "dictionary: {} atoms over {} classes\n",
        dict.atom_count(),
        dict.class_count
    );

    let cfg = LassoConfig::with_lambda(0.1);
    let mut correct = 0;
    for j in 0..test.len() {
        let outcome = src_classify(test.features.column(j), &dict, &cfg).unwrap();
        let residuals: Vec<String> = outcome
            .residuals
            .residuals
            .iter()
            .map(|r| format!("{r:.3}"))
            .collect();
        let marker = if outcome.label == test.labels[j] { "" } else { "  <- wrong" };
        println!(
            "sample {j:2}: true {}, predicted {}, class residuals [{}], {} nonzeros{marker}",
            test.labels[j],
            outcome.label,
            residuals.join(", "),
            outcome.code.nnz()
        );
        if outcome.label == test.labels[j] {
            correct += 1;
        }
    }
    println!("\naccuracy: {correct}/{}", test.len());

    // a far-away query still gets a label, but its residuals give it away
    let outlier = Array1::from_elem(5, 25.0);
    let outcome = src_classify(outlier.view(), &dict, &cfg).unwrap();
    println!(
        "outlier query: predicted {}, best residual {:.3} (trust accordingly)",
        outcome.label,
        outcome.residuals.residuals[outcome.label]
    );
}
