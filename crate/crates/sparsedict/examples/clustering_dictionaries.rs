//! Clustering-based dictionaries: self-organizing map and neural gas
//! compress the training set into cluster centers, which become atoms
//! labeled by 5-nearest-neighbor vote. Quantization error measures how
//! faithfully the centers cover the data.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsedict::{
    ngas_dictionary, quantization_error, som_dictionary, src_classify, ClusterConfig, Dataset,
    LassoConfig,
};

/// Three classes, each a pair of Gaussian-ish clusters: a single center
/// per class cannot summarize them, so the clustering quality matters.
fn twin_clusters(seed: u64, per_class: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: [[f64; 4]; 6] = [
        [3.0, 0.0, 0.0, 0.0],
        [-3.0, 0.0, 1.0, 0.0],
        [0.0, 3.0, 0.0, 1.0],
        [0.0, -3.0, 1.0, 1.0],
        [2.0, 2.0, -1.0, 0.0],
        [-2.0, -2.0, 0.0, -1.0],
    ];
    let n = 3 * per_class;
    let mut features = Array2::zeros((4, n));
    let mut labels = Vec::with_capacity(n);
    for class in 0..3 {
        for s in 0..per_class {
            let j = class * per_class + s;
            let center = &centers[2 * class + s % 2];
            for i in 0..4 {
                features[[i, j]] = center[i] + rng.gen_range(-0.7..0.7);
            }
            labels.push(class);
        }
    }
    Dataset::new("twin-clusters", features, labels).unwrap()
}

fn main() {
    let train = twin_clusters(21, 60);
    let test = twin_clusters(22, 20);
    let lasso = LassoConfig::with_lambda(0.1);

    for n in [12, 24, 36] {
        let cfg = ClusterConfig::new(n, 5);
        let som = som_dictionary(&train, &cfg).unwrap();
        let ngas = ngas_dictionary(&train, &cfg).unwrap();

        let grid = ClusterConfig::grid_for(n);
        println!("n = {n} (SOM grid {}x{}):", grid.0, grid.1);
        for (name, dict) in [("SOMD ", &som), ("NGASD", &ngas)] {
            let correct = (0..test.len())
                .filter(|&j| {
                    src_classify(test.features.column(j), dict, &lasso).unwrap().label
                        == test.labels[j]
                })
                .count();
            println!(
                "  {name}: quantization error {:.4}, accuracy {:.3}, class histogram {:?}",
                quantization_error(&train, dict),
                correct as f64 / test.len() as f64,
                dict.class_histogram()
            );
        }
    }
    println!("\nmore centers -> lower quantization error; neural gas has no");
    println!("grid topology, so its centers settle on the clusters more freely");
}
