//! Cross-validated benchmark: stratified folds, per-fold standardization,
//! all five dictionary methods over a grid of size rates, and the report
//! artifacts (CSV + SVG chart) the `evaluate` subcommand would write.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsedict::chart::dataset_chart_svg;
use sparsedict::eval::report_to_csv;
use sparsedict::{run_experiment, Dataset, DictMethod, ExperimentConfig};

fn dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (classes, per_class, dim) = (3, 40, 8);
    let mut features = Array2::zeros((dim, classes * per_class));
    let mut labels = Vec::new();
    for class in 0..classes {
        for s in 0..per_class {
            let j = class * per_class + s;
            for i in 0..dim {
                let center = if i % classes == class { 2.0 } else { 0.0 };
                features[[i, j]] = center + rng.gen_range(-1.2..1.2);
            }
            labels.push(class);
        }
    }
    Dataset::new("bench", features, labels).unwrap()
}

fn main() {
    let ds = dataset(3);
    let cfg = ExperimentConfig {
        size_rates: vec![0.1, 0.3, 0.5],
        fold_count: 5,
        master_seed: 2024,
        ..ExperimentConfig::default()
    };

    let report = run_experiment(&ds, &cfg).unwrap();

    println!("mean accuracy over {} folds:", cfg.fold_count);
    print!("{:>8}", "rate");
    for &m in &cfg.methods {
        print!("{:>9}", m.as_str());
    }
    println!();
    for &rate in &cfg.size_rates {
        print!("{rate:>8}");
        for &m in &cfg.methods {
            print!("{:>9.3}", report.mean_accuracy("bench", m, rate).unwrap());
        }
        println!();
    }
    println!("(the wd column is flat: it always uses every training sample)");

    for (&(ref id, rate), ranking) in &report.ranks {
        if rate == 500 {
            let order: Vec<&str> = ranking.by_accuracy.iter().map(|m| m.as_str()).collect();
            println!("\n{id} @ rate 0.5, learned methods by accuracy: {}", order.join(" > "));
        }
    }

    // ADL cells also report reconstruction quality and solver health
    let cell = report.cell("bench", DictMethod::Adl, 0.5, 0).unwrap();
    println!(
        "\nADL @ 0.5, fold 0: {} atoms, {}/{} correct, mean recon error {:.4}, {} unconverged solves",
        cell.dict_size, cell.correct, cell.test_count, cell.mean_recon_error, cell.unconverged
    );

    let out = std::env::temp_dir().join("sparsedict_bench");
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(out.join("report.csv"), report_to_csv(&report)).unwrap();
    std::fs::write(out.join("bench.svg"), dataset_chart_svg(&report, "bench")).unwrap();
    println!("\nwrote report.csv and bench.svg under {}", out.display());
}
