//! Run manifests: a single TOML file naming the datasets, the experiment
//! grid and the output directory, so every run is reproducible from one
//! config artifact.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::chart::dataset_chart_svg;
use crate::classify::DictMethod;
use crate::data::{load_csv, ColumnSpec, CsvSchema, Dataset};
use crate::dictionaries::ClassifErrorNorm;
use crate::error::{Error, Result};
use crate::eval::{
    aggregate_report, report_summary_json, report_to_csv, run_experiment, AdlTemplate,
    ClusterTemplate, EvaluationReport, ExperimentConfig,
};
use crate::lasso::LassoConfig;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    id: String,
    path: PathBuf,
    #[serde(default)]
    label_column: Option<String>,
    #[serde(default)]
    label_index: Option<usize>,
    #[serde(default = "default_true")]
    has_header: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAdl {
    probe_rounds: Option<usize>,
    eta: Option<f64>,
    norm: Option<ClassifErrorNorm>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCluster {
    epochs: Option<usize>,
    knn_k: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawLasso {
    lambda: Option<f64>,
    max_iters: Option<usize>,
    tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    methods: Option<Vec<String>>,
    size_rates: Option<Vec<f64>>,
    fold_count: Option<usize>,
    master_seed: Option<u64>,
    #[serde(default)]
    adl: RawAdl,
    #[serde(default)]
    cluster: RawCluster,
    #[serde(default)]
    lasso: RawLasso,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    output_dir: Option<PathBuf>,
    datasets: Vec<RawDataset>,
    #[serde(default)]
    experiment: RawExperiment,
}

/// One dataset entry: id, CSV path and label-column designation.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub id: String,
    pub path: PathBuf,
    pub schema: CsvSchema,
}

/// Parsed manifest driving a full evaluation run.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub datasets: Vec<DatasetSpec>,
    pub experiment: ExperimentConfig,
    pub output_dir: PathBuf,
}

impl RunManifest {
    /// Load and validate a manifest. Relative dataset and output paths are
    /// resolved against the manifest's own directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let raw: RawManifest =
            toml::from_str(&text).map_err(|e| Error::Config(format!("manifest: {e}")))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));

        if raw.datasets.is_empty() {
            return Err(Error::Config("manifest names no datasets".into()));
        }
        let mut datasets = Vec::with_capacity(raw.datasets.len());
        for d in &raw.datasets {
            if datasets.iter().any(|s: &DatasetSpec| s.id == d.id) {
                return Err(Error::Config(format!("duplicate dataset id '{}'", d.id)));
            }
            let schema = match (&d.label_column, d.label_index) {
                (Some(name), None) => CsvSchema {
                    has_header: d.has_header,
                    label_column: ColumnSpec::Name(name.clone()),
                },
                (None, Some(index)) => CsvSchema {
                    has_header: d.has_header,
                    label_column: ColumnSpec::Index(index),
                },
                (Some(_), Some(_)) => {
                    return Err(Error::Config(format!(
                        "dataset '{}': label_column and label_index are mutually exclusive",
                        d.id
                    )))
                }
                (None, None) => {
                    return Err(Error::Config(format!(
                        "dataset '{}': needs label_column or label_index",
                        d.id
                    )))
                }
            };
            datasets.push(DatasetSpec {
                id: d.id.clone(),
                path: base.join(&d.path),
                schema,
            });
        }

        let defaults = ExperimentConfig::default();
        let methods = match &raw.experiment.methods {
            Some(names) => names
                .iter()
                .map(|n| DictMethod::parse(n))
                .collect::<Result<Vec<_>>>()?,
            None => defaults.methods.clone(),
        };
        let experiment = ExperimentConfig {
            methods,
            size_rates: raw
                .experiment
                .size_rates
                .clone()
                .unwrap_or(defaults.size_rates),
            fold_count: raw.experiment.fold_count.unwrap_or(defaults.fold_count),
            adl: AdlTemplate {
                probe_rounds: raw
                    .experiment
                    .adl
                    .probe_rounds
                    .unwrap_or(defaults.adl.probe_rounds),
                eta: raw.experiment.adl.eta.unwrap_or(defaults.adl.eta),
                norm: raw.experiment.adl.norm.unwrap_or(defaults.adl.norm),
            },
            cluster: ClusterTemplate {
                epochs: raw
                    .experiment
                    .cluster
                    .epochs
                    .unwrap_or(defaults.cluster.epochs),
                knn_k: raw.experiment.cluster.knn_k.unwrap_or(defaults.cluster.knn_k),
            },
            lasso: LassoConfig {
                lambda: raw.experiment.lasso.lambda.unwrap_or(defaults.lasso.lambda),
                max_iters: raw
                    .experiment
                    .lasso
                    .max_iters
                    .unwrap_or(defaults.lasso.max_iters),
                tol: raw.experiment.lasso.tol.unwrap_or(defaults.lasso.tol),
            },
            master_seed: raw.experiment.master_seed.unwrap_or(defaults.master_seed),
        };
        experiment.validate()?;

        Ok(RunManifest {
            datasets,
            experiment,
            output_dir: base.join(raw.output_dir.unwrap_or_else(|| PathBuf::from("out"))),
        })
    }

    pub fn dataset_spec(&self, id: &str) -> Result<&DatasetSpec> {
        self.datasets
            .iter()
            .find(|d| d.id == id)
            .ok_or_else(|| Error::Config(format!("manifest has no dataset '{id}'")))
    }

    /// Load one dataset by id; the manifest id overrides the file stem.
    pub fn load_dataset(&self, id: &str) -> Result<Dataset> {
        let spec = self.dataset_spec(id)?;
        let mut ds = load_csv(&spec.path, &spec.schema)?;
        ds.id = spec.id.clone();
        Ok(ds)
    }
}

/// Result of a full `evaluate` run: merged report plus the files written.
pub struct EvaluateOutcome {
    pub report: EvaluationReport,
    pub files: Vec<PathBuf>,
}

/// Run the whole manifest: per-dataset experiments, aggregation, and
/// emission of the report CSV, summary JSON and per-dataset SVG charts.
/// With `jobs = Some(n)` the cell jobs run on an n-thread pool; output
/// bytes are identical for any job count.
pub fn evaluate_manifest(manifest: &RunManifest, jobs: Option<usize>) -> Result<EvaluateOutcome> {
    let run = || -> Result<EvaluationReport> {
        let mut reports = Vec::new();
        for spec in &manifest.datasets {
            let ds = manifest.load_dataset(&spec.id)?;
            reports.push(run_experiment(&ds, &manifest.experiment)?);
        }
        aggregate_report(&reports)
    };
    let report = match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(run)?
        }
        None => run()?,
    };

    std::fs::create_dir_all(&manifest.output_dir)
        .map_err(|e| Error::io(&manifest.output_dir, e))?;
    let mut files = Vec::new();

    let csv_path = manifest.output_dir.join("report.csv");
    std::fs::write(&csv_path, report_to_csv(&report)).map_err(|e| Error::io(&csv_path, e))?;
    files.push(csv_path);

    let summary_path = manifest.output_dir.join("summary.json");
    std::fs::write(&summary_path, report_summary_json(&report))
        .map_err(|e| Error::io(&summary_path, e))?;
    files.push(summary_path);

    for ds in report.datasets() {
        let svg_path = manifest.output_dir.join(format!("{ds}.svg"));
        std::fs::write(&svg_path, dataset_chart_svg(&report, &ds))
            .map_err(|e| Error::io(&svg_path, e))?;
        files.push(svg_path);
    }

    Ok(EvaluateOutcome { report, files })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn manifest_parses_with_defaults() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("d.csv"), "a,b,label\n1,2,x\n3,4,y\n").unwrap();
        let manifest_path = dir.path().join("run.toml");
        let mut f = std::fs::File::create(&manifest_path).unwrap();
        writeln!(
            f,
            "[[datasets]]\nid = \"d\"\npath = \"d.csv\"\nlabel_column = \"label\"\n"
        )
        .unwrap();
        drop(f);
        let manifest = RunManifest::load(&manifest_path).unwrap();
        assert_eq!(manifest.datasets.len(), 1);
        assert_eq!(manifest.experiment.fold_count, 5);
        assert_eq!(manifest.experiment.size_rates, vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        let ds = manifest.load_dataset("d").unwrap();
        assert_eq!(ds.id, "d");
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn manifest_rejects_duplicate_ids() {
        let dir = tempfile::tempdir().unwrap();
        let manifest_path = dir.path().join("run.toml");
        std::fs::write(
            &manifest_path,
            "[[datasets]]\nid = \"d\"\npath = \"d.csv\"\nlabel_column = \"l\"\n\
             [[datasets]]\nid = \"d\"\npath = \"e.csv\"\nlabel_column = \"l\"\n",
        )
        .unwrap();
        assert!(matches!(
            RunManifest::load(&manifest_path),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn manifest_rejects_missing_label_designation() {
        let dir = tempfile::tempdir().unwrap();
        let manifest_path = dir.path().join("run.toml");
        std::fs::write(&manifest_path, "[[datasets]]\nid = \"d\"\npath = \"d.csv\"\n").unwrap();
        assert!(matches!(
            RunManifest::load(&manifest_path),
            Err(Error::Config(_))
        ));
    }
}
