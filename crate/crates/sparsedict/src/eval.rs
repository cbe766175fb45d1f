//! Cross-validated benchmark harness: per-fold dictionary building at a
//! grid of size rates, SRC evaluation of every test sample, and
//! aggregation across datasets.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{src_classify, DictMethod};
use crate::data::{make_folds, standardize, Dataset};
use crate::dictionaries::{
    adl_learn, ngas_dictionary, random_dictionary, som_dictionary, wd_dictionary, AdlConfig,
    ClassifErrorNorm, ClusterConfig,
};
use crate::error::{Error, Result};
use crate::lasso::{reconstruction_error, LassoConfig};

/// Deterministic sub-seed derivation (FNV-1a over master seed and a tag).
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in master.to_le_bytes().iter().chain(tag.as_bytes()) {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// ADL parameters shared across cells; `n` and `seed` are filled per cell.
#[derive(Debug, Clone)]
pub struct AdlTemplate {
    pub probe_rounds: usize,
    pub eta: f64,
    pub norm: ClassifErrorNorm,
}

impl Default for AdlTemplate {
    fn default() -> Self {
        AdlTemplate {
            probe_rounds: 5,
            eta: 5.0,
            norm: ClassifErrorNorm::RoundMean,
        }
    }
}

/// Clustering parameters shared across cells.
#[derive(Debug, Clone)]
pub struct ClusterTemplate {
    pub epochs: usize,
    pub knn_k: usize,
}

impl Default for ClusterTemplate {
    fn default() -> Self {
        ClusterTemplate {
            epochs: 50,
            knn_k: 5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub methods: Vec<DictMethod>,
    /// Strictly increasing, each in (0, 1].
    pub size_rates: Vec<f64>,
    pub fold_count: usize,
    pub adl: AdlTemplate,
    pub cluster: ClusterTemplate,
    pub lasso: LassoConfig,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            methods: vec![
                DictMethod::Adl,
                DictMethod::Wd,
                DictMethod::Random,
                DictMethod::Somd,
                DictMethod::Ngasd,
            ],
            size_rates: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            fold_count: 5,
            adl: AdlTemplate::default(),
            cluster: ClusterTemplate::default(),
            lasso: LassoConfig::default(),
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.size_rates.is_empty() {
            return Err(Error::Config("no size rates".into()));
        }
        for w in self.size_rates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("size_rates must be strictly increasing".into()));
            }
        }
        for &r in &self.size_rates {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::Config(format!("size rate {r} outside (0, 1]")));
            }
        }
        if self.fold_count < 2 {
            return Err(Error::Config("fold_count must be >= 2".into()));
        }
        self.lasso.validate()
    }
}

/// Rate stored in thousandths for exact map keys (0.1 -> 100).
pub fn rate_key(rate: f64) -> u32 {
    (rate * 1000.0).round() as u32
}

pub fn rate_from_key(key: u32) -> f64 {
    key as f64 / 1000.0
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CellKey {
    pub dataset: String,
    pub method: DictMethod,
    /// Rate in thousandths.
    pub rate: u32,
    pub fold: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub accuracy: f64,
    pub mean_recon_error: f64,
    pub dict_size: usize,
    pub test_count: usize,
    pub correct: usize,
    /// Test solves that hit the sweep budget before the KKT certificate.
    pub unconverged: usize,
    /// Milliseconds; informational only, never serialized into reports.
    #[serde(skip)]
    pub wall_time_ms: f64,
    pub warning: Option<String>,
    pub error: Option<String>,
}

/// Ranking of the learned-dictionary methods for one (dataset, rate).
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Ranking {
    /// Best first.
    pub by_accuracy: Vec<DictMethod>,
    /// Lowest error first.
    pub by_recon_error: Vec<DictMethod>,
}

#[derive(Debug, Clone)]
pub struct EvaluationReport {
    pub methods: Vec<DictMethod>,
    pub rates: Vec<f64>,
    pub fold_count: usize,
    pub cells: BTreeMap<CellKey, Cell>,
    /// (method, rate) -> unweighted mean of per-dataset mean accuracies.
    pub aggregates: BTreeMap<(DictMethod, u32), f64>,
    /// (dataset, rate) -> method ranking among the learned trio.
    pub ranks: BTreeMap<(String, u32), Ranking>,
}

impl EvaluationReport {
    pub fn datasets(&self) -> Vec<String> {
        let mut out: Vec<String> = self.cells.keys().map(|k| k.dataset.clone()).collect();
        out.dedup();
        out
    }

    pub fn cell(&self, dataset: &str, method: DictMethod, rate: f64, fold: usize) -> Option<&Cell> {
        self.cells.get(&CellKey {
            dataset: dataset.into(),
            method,
            rate: rate_key(rate),
            fold,
        })
    }

    /// Mean accuracy over folds for one dataset, method and rate.
    pub fn mean_accuracy(&self, dataset: &str, method: DictMethod, rate: f64) -> Option<f64> {
        let values: Vec<f64> = (0..self.fold_count)
            .filter_map(|fold| self.cell(dataset, method, rate, fold))
            .filter(|c| c.error.is_none())
            .map(|c| c.accuracy)
            .collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }

    pub fn mean_recon_error(&self, dataset: &str, method: DictMethod, rate: f64) -> Option<f64> {
        let values: Vec<f64> = (0..self.fold_count)
            .filter_map(|fold| self.cell(dataset, method, rate, fold))
            .filter(|c| c.error.is_none())
            .map(|c| c.mean_recon_error)
            .collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }

    pub fn has_errors(&self) -> bool {
        self.cells.values().any(|c| c.error.is_some())
    }

    /// Recompute aggregates and per-dataset rankings from the cells.
    pub fn recompute_aggregates(&mut self) {
        let datasets = self.datasets();
        self.aggregates.clear();
        for &method in &self.methods {
            for &rate in &self.rates {
                let per_dataset: Vec<f64> = datasets
                    .iter()
                    .filter_map(|ds| self.mean_accuracy(ds, method, rate))
                    .collect();
                if !per_dataset.is_empty() {
                    self.aggregates.insert(
                        (method, rate_key(rate)),
                        per_dataset.iter().sum::<f64>() / per_dataset.len() as f64,
                    );
                }
            }
        }

        // Ranks cover the learned-dictionary trio only (WD is a flat
        // reference, RANDOM a baseline).
        let trio: Vec<DictMethod> = self
            .methods
            .iter()
            .copied()
            .filter(|m| {
                matches!(m, DictMethod::Adl | DictMethod::Somd | DictMethod::Ngasd)
            })
            .collect();
        self.ranks.clear();
        if trio.is_empty() {
            return;
        }
        for ds in &datasets {
            for &rate in &self.rates {
                let mut by_accuracy: Vec<(DictMethod, f64)> = trio
                    .iter()
                    .filter_map(|&m| self.mean_accuracy(ds, m, rate).map(|a| (m, a)))
                    .collect();
                let mut by_recon: Vec<(DictMethod, f64)> = trio
                    .iter()
                    .filter_map(|&m| self.mean_recon_error(ds, m, rate).map(|e| (m, e)))
                    .collect();
                if by_accuracy.is_empty() {
                    continue;
                }
                by_accuracy.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
                by_recon.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
                self.ranks.insert(
                    (ds.clone(), rate_key(rate)),
                    Ranking {
                        by_accuracy: by_accuracy.into_iter().map(|(m, _)| m).collect(),
                        by_recon_error: by_recon.into_iter().map(|(m, _)| m).collect(),
                    },
                );
            }
        }
    }
}

/// Atom count for a rate: round-half-up of rate * N_train, at least 1.
pub fn dict_size_for_rate(rate: f64, train_len: usize) -> usize {
    ((rate * train_len as f64).round() as usize).max(1)
}

fn evaluate_dictionary(
    dict: &crate::classify::Dictionary,
    test: &Dataset,
    lasso: &LassoConfig,
) -> Result<(usize, f64, usize)> {
    let outcomes: Vec<Result<(bool, f64, bool)>> = (0..test.len())
        .into_par_iter()
        .map(|j| {
            let y = test.features.column(j);
            let out = src_classify(y, dict, lasso)?;
            let recon =
                reconstruction_error(y, dict.atoms.view(), out.code.coeffs.view())?;
            Ok((out.label == test.labels[j], recon, out.code.converged))
        })
        .collect();
    let mut correct = 0usize;
    let mut recon_sum = 0.0;
    let mut unconverged = 0usize;
    for outcome in outcomes {
        let (ok, recon, converged) = outcome?;
        if ok {
            correct += 1;
        }
        recon_sum += recon;
        if !converged {
            unconverged += 1;
        }
    }
    Ok((correct, recon_sum / test.len() as f64, unconverged))
}

fn build_and_evaluate(
    train: &Dataset,
    test: &Dataset,
    method: DictMethod,
    n: usize,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<(usize, f64, usize, usize)> {
    let dict = match method {
        DictMethod::Wd => wd_dictionary(train),
        DictMethod::Random => random_dictionary(train, n, seed)?,
        DictMethod::Adl => {
            let adl = AdlConfig {
                n,
                probe_rounds: cfg.adl.probe_rounds,
                eta: cfg.adl.eta,
                lasso: cfg.lasso.clone(),
                seed,
                norm: cfg.adl.norm,
            };
            adl_learn(train, &adl)?.0
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
                som_dictionary(train, &cluster)?
            } else {
                ngas_dictionary(train, &cluster)?
            }
        }
    };
    let (correct, mean_recon, unconverged) = evaluate_dictionary(&dict, test, &cfg.lasso)?;
    Ok((correct, mean_recon, unconverged, dict.atom_count()))
}

/// Run the full per-dataset protocol: stratified folds, per-fold
/// standardization on the training split, dictionary building per method
/// and rate, SRC evaluation of every test sample.
///
/// WD ignores the rate; it is evaluated once per fold and duplicated into
/// every rate column as a flat reference curve. Failed cells are recorded
/// with their error message, never dropped.
pub fn run_experiment(ds: &Dataset, cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let fold_seed = derive_seed(cfg.master_seed, &format!("{}/folds", ds.id));
    let plan = make_folds(ds, cfg.fold_count, fold_seed)?;

    // Per-fold standardized splits, shared by all cells of the fold.
    let mut splits = Vec::with_capacity(cfg.fold_count);
    for fold in 0..cfg.fold_count {
        let train_raw = ds.subset(&plan.train_indices(fold));
        let test_raw = ds.subset(&plan.test_indices(fold));
        let (train, scaler) = standardize(&train_raw)?;
        let test = scaler.transform(&test_raw);
        splits.push((train, test));
    }

    // One job per (fold, method, rate); WD collapses the rate axis.
    enum Job {
        Rated(usize, DictMethod, u32),
        Wd(usize),
    }
    let mut jobs = Vec::new();
    for fold in 0..cfg.fold_count {
        for &method in &cfg.methods {
            if method == DictMethod::Wd {
                jobs.push(Job::Wd(fold));
            } else {
                for &rate in &cfg.size_rates {
                    jobs.push(Job::Rated(fold, method, rate_key(rate)));
                }
            }
        }
    }

    let computed: Vec<(usize, DictMethod, Option<u32>, Cell)> = jobs
        .par_iter()
        .map(|job| {
            let (fold, method, rate) = match *job {
                Job::Rated(fold, method, rate) => (fold, method, Some(rate)),
                Job::Wd(fold) => (fold, DictMethod::Wd, None),
            };
            let (train, test) = &splits[fold];
            let n = match rate {
                Some(r) => dict_size_for_rate(rate_from_key(r), train.len()).min(train.len()),
                None => train.len(),
            };
            let warning = if n < ds.class_count {
                Some(format!(
                    "dictionary size {n} below class count {}",
                    ds.class_count
                ))
            } else {
                None
            };
            let seed = derive_seed(
                cfg.master_seed,
                &format!(
                    "{}/{}/{}/{}/build",
                    ds.id,
                    method,
                    rate.map_or(1000, |r| r),
                    fold
                ),
            );
            let start = Instant::now();
            let cell = match build_and_evaluate(train, test, method, n, seed, cfg) {
                Ok((correct, mean_recon, unconverged, dict_size)) => Cell {
                    accuracy: correct as f64 / test.len() as f64,
                    mean_recon_error: mean_recon,
                    dict_size,
                    test_count: test.len(),
                    correct,
                    unconverged,
                    wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                    warning,
                    error: None,
                },
                Err(e) => Cell {
                    accuracy: 0.0,
                    mean_recon_error: f64::NAN,
                    dict_size: n,
                    test_count: test.len(),
                    correct: 0,
                    unconverged: 0,
                    wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                    warning,
                    error: Some(e.to_string()),
                },
            };
            (fold, method, rate, cell)
        })
        .collect();

    let mut cells = BTreeMap::new();
    for (fold, method, rate, cell) in computed {
        match rate {
            Some(rate) => {
                cells.insert(
                    CellKey {
                        dataset: ds.id.clone(),
                        method,
                        rate,
                        fold,
                    },
                    cell,
                );
            }
            None => {
                for &r in &cfg.size_rates {
                    cells.insert(
                        CellKey {
                            dataset: ds.id.clone(),
                            method,
                            rate: rate_key(r),
                            fold,
                        },
                        cell.clone(),
                    );
                }
            }
        }
    }

    let mut report = EvaluationReport {
        methods: cfg.methods.clone(),
        rates: cfg.size_rates.clone(),
        fold_count: cfg.fold_count,
        cells,
        aggregates: BTreeMap::new(),
        ranks: BTreeMap::new(),
    };
    report.recompute_aggregates();
    Ok(report)
}

/// Merge per-dataset reports sharing the same method/rate/fold grid.
pub fn aggregate_report(reports: &[EvaluationReport]) -> Result<EvaluationReport> {
    let first = reports
        .first()
        .ok_or_else(|| Error::Config("no reports to aggregate".into()))?;
    for r in reports {
        if r.methods != first.methods
            || r.rates != first.rates
            || r.fold_count != first.fold_count
        {
            return Err(Error::Config(
                "reports have mismatched method/rate/fold grids".into(),
            ));
        }
    }
    let mut cells = BTreeMap::new();
    for r in reports {
        for (k, v) in &r.cells {
            cells.insert(k.clone(), v.clone());
        }
    }
    let mut merged = EvaluationReport {
        methods: first.methods.clone(),
        rates: first.rates.clone(),
        fold_count: first.fold_count,
        cells,
        aggregates: BTreeMap::new(),
        ranks: BTreeMap::new(),
    };
    merged.recompute_aggregates();
    Ok(merged)
}

/// Paired per-fold accuracy differences between two methods at one rate.
/// Raw paired data is emitted; no significance statistics.
#[derive(Debug, Clone, Serialize)]
pub struct PairedComparison {
    pub method_a: DictMethod,
    pub method_b: DictMethod,
    pub rate: f64,
    /// (dataset, fold, accuracy_a, accuracy_b).
    pub pairs: Vec<(String, usize, f64, f64)>,
    pub mean_difference: f64,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
}

pub fn compare_methods(
    report: &EvaluationReport,
    a: DictMethod,
    b: DictMethod,
    rate: f64,
) -> Result<PairedComparison> {
    let mut pairs = Vec::new();
    for ds in report.datasets() {
        for fold in 0..report.fold_count {
            let ca = report.cell(&ds, a, rate, fold).ok_or_else(|| {
                Error::MissingCell(format!("{ds}/{a}/{rate}/{fold}"))
            })?;
            let cb = report.cell(&ds, b, rate, fold).ok_or_else(|| {
                Error::MissingCell(format!("{ds}/{b}/{rate}/{fold}"))
            })?;
            pairs.push((ds.clone(), fold, ca.accuracy, cb.accuracy));
        }
    }
    if pairs.is_empty() {
        return Err(Error::MissingCell(format!("no cells at rate {rate}")));
    }
    let diffs: Vec<f64> = pairs.iter().map(|p| p.2 - p.3).collect();
    let mean_difference = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let wins_a = diffs.iter().filter(|&&d| d > 0.0).count();
    let wins_b = diffs.iter().filter(|&&d| d < 0.0).count();
    let ties = diffs.len() - wins_a - wins_b;
    Ok(PairedComparison {
        method_a: a,
        method_b: b,
        rate,
        pairs,
        mean_difference,
        wins_a,
        wins_b,
        ties,
    })
}

fn format_rate(key: u32) -> String {
    format!("{}", key as f64 / 1000.0)
}

/// One row per cell, sorted by key; wall time is deliberately excluded so
/// repeated runs are byte-identical.
pub fn report_to_csv(report: &EvaluationReport) -> String {
    let mut out = String::from(
        "dataset,method,rate,fold,dict_size,test_count,correct,accuracy,mean_recon_error,unconverged,warning,error\n",
    );
    for (key, cell) in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            key.dataset,
            key.method,
            format_rate(key.rate),
            key.fold,
            cell.dict_size,
            cell.test_count,
            cell.correct,
            cell.accuracy,
            cell.mean_recon_error,
            cell.unconverged,
            cell.warning.as_deref().unwrap_or(""),
            cell.error.as_deref().unwrap_or(""),
        ));
    }
    out
}

/// Structured summary: mean-accuracy table plus per-dataset rankings.
pub fn report_summary_json(report: &EvaluationReport) -> String {
    #[derive(Serialize)]
    struct AggregateRow {
        method: DictMethod,
        rate: f64,
        mean_accuracy: f64,
    }
    #[derive(Serialize)]
    struct RankRow<'a> {
        dataset: &'a str,
        rate: f64,
        by_accuracy: &'a [DictMethod],
        by_recon_error: &'a [DictMethod],
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: u32,
        methods: &'a [DictMethod],
        rates: &'a [f64],
        fold_count: usize,
        datasets: Vec<String>,
        mean_accuracy: Vec<AggregateRow>,
        ranks: Vec<RankRow<'a>>,
    }
    let summary = Summary {
        schema_version: 1,
        methods: &report.methods,
        rates: &report.rates,
        fold_count: report.fold_count,
        datasets: report.datasets(),
        mean_accuracy: report
            .aggregates
            .iter()
            .map(|(&(method, rate), &acc)| AggregateRow {
                method,
                rate: rate_from_key(rate),
                mean_accuracy: acc,
            })
            .collect(),
        ranks: report
            .ranks
            .iter()
            .map(|((ds, rate), ranking)| RankRow {
                dataset: ds,
                rate: rate_from_key(*rate),
                by_accuracy: &ranking.by_accuracy,
                by_recon_error: &ranking.by_recon_error,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&summary).expect("summary serialization")
}
