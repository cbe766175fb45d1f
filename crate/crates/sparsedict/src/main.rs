//! Thin command-line front end over the library: build a dictionary,
//! classify a CSV against a saved dictionary, or run a full manifest
//! evaluation. Everything here is reproducible by direct library calls.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ndarray::Array2;

use sparsedict::classify::DictMethod;
use sparsedict::data::{load_csv, standardize, ColumnSpec, CsvSchema};
use sparsedict::dictionaries::{
    adl_learn, load_dictionary, ngas_dictionary, random_dictionary, save_dictionary,
    som_dictionary, wd_dictionary, AdlConfig, ClusterConfig,
};
use sparsedict::error::{Error, Result};
use sparsedict::eval::{derive_seed, dict_size_for_rate, rate_key};
use sparsedict::lasso::LassoConfig;
use sparsedict::manifest::{evaluate_manifest, RunManifest};
use sparsedict::{make_folds, src_classify};

#[derive(Parser)]
#[command(name = "sparsedict", version, about = "Active dictionary learning and SRC benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one dictionary from a manifest dataset and save it.
    Learn {
        #[arg(long)]
        manifest: PathBuf,
        /// adl | wd | random | som | ngas
        #[arg(long)]
        method: String,
        /// Dictionary size as a fraction of the training split.
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        /// Dataset id from the manifest.
        #[arg(long)]
        dataset: String,
        /// Cross-validation fold whose training split is used.
        #[arg(long, default_value_t = 0)]
        fold: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a CSV against a saved dictionary; one prediction per row.
    Classify {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Label column of the data file; when given, accuracy is printed.
        #[arg(long)]
        label_column: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full manifest: experiments, report CSV, summary, charts.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        /// Overrides the manifest's output_dir.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads for cell jobs; output is identical at any count.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn cmd_learn(
    manifest: &PathBuf,
    method: &str,
    rate: f64,
    dataset: &str,
    fold: usize,
    out: &PathBuf,
) -> Result<()> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::Config(format!("rate {rate} outside (0, 1]")));
    }
    let manifest = RunManifest::load(manifest)?;
    let method = DictMethod::parse(method)?;
    let ds = manifest.load_dataset(dataset)?;
    let cfg = &manifest.experiment;
    if fold >= cfg.fold_count {
        return Err(Error::Config(format!(
            "fold {fold} out of range 0..{}",
            cfg.fold_count
        )));
    }

    let fold_seed = derive_seed(cfg.master_seed, &format!("{}/folds", ds.id));
    let plan = make_folds(&ds, cfg.fold_count, fold_seed)?;
    let train_raw = ds.subset(&plan.train_indices(fold));
    let (train, _) = standardize(&train_raw)?;
    let n = dict_size_for_rate(rate, train.len()).min(train.len());
    let seed = derive_seed(
        cfg.master_seed,
        &format!("{}/{}/{}/{}/build", ds.id, method, rate_key(rate), fold),
    );

    let mut ledger_summary = None;
    let dict = match method {
        DictMethod::Wd => wd_dictionary(&train),
        DictMethod::Random => random_dictionary(&train, n, seed)?,
        DictMethod::Adl => {
            let adl = AdlConfig {
                n,
                probe_rounds: cfg.adl.probe_rounds,
                eta: cfg.adl.eta,
                lasso: cfg.lasso.clone(),
                seed,
                norm: cfg.adl.norm,
            };
            let (dict, ledger) = adl_learn(&train, &adl)?;
            ledger_summary = Some(ledger);
            dict
        }
        DictMethod::Somd | DictMethod::Ngasd => {
            let cluster = ClusterConfig {
                n,
                epochs: cfg.cluster.epochs,
                seed,
                som_grid: None,
                knn_k: cfg.cluster.knn_k,
            };
            if method == DictMethod::Somd {
                som_dictionary(&train, &cluster)?
            } else {
                ngas_dictionary(&train, &cluster)?
            }
        }
    };

    let build_config = serde_json::json!({
        "dataset": dataset,
        "fold": fold,
        "rate": rate,
        "lambda": cfg.lasso.lambda,
        "probe_rounds": cfg.adl.probe_rounds,
        "eta": cfg.adl.eta,
        "master_seed": cfg.master_seed,
    });
    save_dictionary(&dict, out, build_config)?;

    println!("dictionary: {} atoms, method {}", dict.atom_count(), method);
    print!("class histogram:");
    for (class, count) in dict.class_histogram().iter().enumerate() {
        print!(" {class}:{count}");
    }
    println!();
    if let Some(ledger) = ledger_summary {
        let errors = ledger.errors_per_round();
        println!("probe rounds: {}", errors.len());
        for (k, (misses, mean)) in errors
            .iter()
            .zip(ledger.round_mean_recon.iter())
            .enumerate()
        {
            println!(
                "  round {k}: misclassified {misses}/{}, mean recon error {mean:.6}",
                ledger.total.len()
            );
        }
    }
    println!("saved to {}", out.display());
    Ok(())
}

/// Read a feature-only CSV (every column numeric) into an m x N matrix.
fn load_unlabeled_csv(path: &PathBuf) -> Result<(Array2<f64>, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Schema(format!("{other:?}")),
        })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut ids = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Schema(e.to_string()))?;
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            row.push(cell.trim().parse().map_err(|_| {
                Error::Schema(format!("row {row_no}, column {col}: non-numeric cell '{cell}'"))
            })?);
        }
        rows.push(row);
        ids.push(row_no.to_string());
    }
    if rows.is_empty() {
        return Err(Error::Schema("no data rows".into()));
    }
    let m = rows[0].len();
    let mut features = Array2::zeros((m, rows.len()));
    for (j, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::Schema(format!("ragged row {j}")));
        }
        for (i, &v) in row.iter().enumerate() {
            features[[i, j]] = v;
        }
    }
    Ok((features, ids))
}

fn cmd_classify(
    dict_path: &PathBuf,
    data: &PathBuf,
    label_column: &Option<String>,
    lambda: f64,
    out: &PathBuf,
) -> Result<()> {
    let dict = load_dictionary(dict_path)?;
    let cfg = LassoConfig::with_lambda(lambda);
    cfg.validate()?;

    let (features, ids, labels) = match label_column {
        Some(name) => {
            let ds = load_csv(
                data,
                &CsvSchema {
                    has_header: true,
                    label_column: ColumnSpec::Name(name.clone()),
                },
            )?;
            let ids = (0..ds.len()).map(|i| i.to_string()).collect();
            (ds.features.clone(), ids, Some(ds.labels))
        }
        None => {
            let (features, ids) = load_unlabeled_csv(data)?;
            (features, ids, None)
        }
    };
    if features.nrows() != dict.feature_dim() {
        return Err(Error::Dimension(format!(
            "data has {} features but dictionary expects {}",
            features.nrows(),
            dict.feature_dim()
        )));
    }

    let mut csv_out = String::from("id,predicted");
    for class in 0..dict.class_count {
        csv_out.push_str(&format!(",residual_{class}"));
    }
    csv_out.push_str(",nnz\n");

    let mut correct = 0usize;
    for j in 0..features.ncols() {
        let outcome = src_classify(features.column(j), &dict, &cfg)?;
        csv_out.push_str(&format!("{},{}", ids[j], outcome.label));
        for r in &outcome.residuals.residuals {
            if r.is_finite() {
                csv_out.push_str(&format!(",{r}"));
            } else {
                csv_out.push_str(",inf");
            }
        }
        csv_out.push_str(&format!(",{}\n", outcome.code.nnz()));
        if let Some(labels) = &labels {
            if labels[j] == outcome.label {
                correct += 1;
            }
        }
    }
    std::fs::write(out, csv_out).map_err(|e| Error::io(out, e))?;

    println!("classified {} samples", features.ncols());
    if labels.is_some() {
        let accuracy = correct as f64 / features.ncols() as f64;
        println!("accuracy: {accuracy}");
    }
    println!("predictions written to {}", out.display());
    Ok(())
}

fn cmd_evaluate(
    manifest_path: &PathBuf,
    out_dir: &Option<PathBuf>,
    jobs: Option<usize>,
) -> Result<bool> {
    let mut manifest = RunManifest::load(manifest_path)?;
    if let Some(dir) = out_dir {
        manifest.output_dir = dir.clone();
    }
    let outcome = evaluate_manifest(&manifest, jobs)?;
    for file in &outcome.files {
        println!("wrote {}", file.display());
    }
    for (&(method, rate), acc) in &outcome.report.aggregates {
        println!(
            "mean accuracy {method} @ rate {}: {acc:.4}",
            rate as f64 / 1000.0
        );
    }
    Ok(outcome.report.has_errors())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Learn {
            manifest,
            method,
            rate,
            dataset,
            fold,
            out,
        } => cmd_learn(manifest, method, *rate, dataset, *fold, out).map(|()| false),
        Command::Classify {
            dict,
            data,
            label_column,
            lambda,
            out,
        } => cmd_classify(dict, data, label_column, *lambda, out).map(|()| false),
        Command::Evaluate {
            manifest,
            out_dir,
            jobs,
        } => cmd_evaluate(manifest, out_dir, *jobs),
    };
    match result {
        Ok(false) => {}
        Ok(true) => {
            eprintln!("error: some cells failed; see report for details");
            std::process::exit(6);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
