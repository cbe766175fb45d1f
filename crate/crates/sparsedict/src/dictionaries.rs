//! Dictionary construction: active selection (ADL), whole-training-data,
//! uniform random, and clustering-based (SOM grid / neural gas) builders.

use std::path::Path;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{class_residuals, DictMethod, Dictionary};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::lasso::{reconstruction_error, solve_lasso, LassoConfig};

/// How the classification penalty is normalized against reconstruction
/// errors. The default uses the mean reconstruction error of the round;
/// the alternative averages over rounds for the same sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ClassifErrorNorm {
    #[default]
    RoundMean,
    SampleRoundMean,
}

/// Active dictionary learning parameters.
#[derive(Debug, Clone)]
pub struct AdlConfig {
    /// Target atom count.
    pub n: usize,
    /// Probe rounds K.
    pub probe_rounds: usize,
    /// Classification-error weight eta.
    pub eta: f64,
    pub lasso: LassoConfig,
    pub seed: u64,
    pub norm: ClassifErrorNorm,
}

impl AdlConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        AdlConfig {
            n,
            probe_rounds: 5,
            eta: 5.0,
            lasso: LassoConfig::default(),
            seed,
            norm: ClassifErrorNorm::RoundMean,
        }
    }

    fn validate(&self, train_len: usize) -> Result<()> {
        if self.n == 0 || self.n > train_len {
            return Err(Error::Config(format!(
                "atom count {} out of range 1..={train_len}",
                self.n
            )));
        }
        if self.probe_rounds == 0 {
            return Err(Error::Config("probe_rounds must be >= 1".into()));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::Config(format!("eta {} must be >= 0", self.eta)));
        }
        self.lasso.validate()
    }
}

/// Per-sample error bookkeeping across the K probe rounds.
#[derive(Debug, Clone)]
pub struct ErrorLedger {
    /// K x N reconstruction errors.
    pub recon: Array2<f64>,
    /// K x N classification penalties (0 or eta * round mean).
    pub classif: Array2<f64>,
    /// Accumulated total per sample; stored once, never re-derived.
    pub total: Array1<f64>,
    /// The n sampled indices of each probe round, ascending.
    pub probe_indices: Vec<Vec<usize>>,
    /// Mean reconstruction error of each round.
    pub round_mean_recon: Vec<f64>,
}

impl ErrorLedger {
    /// Misclassification count per round.
    pub fn errors_per_round(&self) -> Vec<usize> {
        (0..self.classif.nrows())
            .map(|k| self.classif.row(k).iter().filter(|&&v| v > 0.0).count())
            .collect()
    }
}

/// Distinct uniform draw of `count` indices from `0..total`, ascending.
/// Ascending order keeps atom sets canonical, so a full-size random
/// dictionary is bit-identical to the whole-training-data one.
fn sample_distinct(rng: &mut ChaCha8Rng, total: usize, count: usize) -> Vec<usize> {
    let mut picked = rand::seq::index::sample(rng, total, count).into_vec();
    picked.sort_unstable();
    picked
}

fn dictionary_from_indices(
    train: &Dataset,
    indices: &[usize],
    method: DictMethod,
    build_seed: u64,
) -> Dictionary {
    let m = train.feature_dim();
    let mut atoms = Array2::zeros((m, indices.len()));
    let mut labels = Vec::with_capacity(indices.len());
    for (dst, &src) in indices.iter().enumerate() {
        atoms.column_mut(dst).assign(&train.features.column(src));
        labels.push(train.labels[src]);
    }
    Dictionary {
        atoms,
        atom_labels: labels,
        source_indices: indices.iter().map(|&i| Some(i)).collect(),
        class_count: train.class_count,
        method,
        build_seed,
    }
}

/// Active dictionary learning: score every training sample by accumulated
/// reconstruction + classification error over K random probe dictionaries,
/// then keep the n worst-represented samples as atoms.
pub fn adl_learn(train: &Dataset, cfg: &AdlConfig) -> Result<(Dictionary, ErrorLedger)> {
    cfg.validate(train.len())?;
    let n_samples = train.len();
    let rounds = cfg.probe_rounds;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut recon = Array2::<f64>::zeros((rounds, n_samples));
    let mut correct = vec![vec![false; n_samples]; rounds];
    let mut probe_indices = Vec::with_capacity(rounds);

    for k in 0..rounds {
        let picked = sample_distinct(&mut rng, n_samples, cfg.n);
        let probe = dictionary_from_indices(train, &picked, DictMethod::Random, cfg.seed);
        probe_indices.push(picked);

        // Per-sample solves are independent; results land by index.
        let per_sample: Vec<Result<(f64, bool)>> = (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let y = train.features.column(i);
                let code = solve_lasso(y, probe.atoms.view(), &cfg.lasso)?;
                let err = reconstruction_error(y, probe.atoms.view(), code.coeffs.view())?;
                let residuals = class_residuals(y, &probe, &code)?;
                Ok((err, residuals.argmin_label == train.labels[i]))
            })
            .collect();
        for (i, outcome) in per_sample.into_iter().enumerate() {
            let (err, ok) = outcome?;
            recon[[k, i]] = err;
            correct[k][i] = ok;
        }
    }

    let round_mean_recon: Vec<f64> = (0..rounds)
        .map(|k| recon.row(k).sum() / n_samples as f64)
        .collect();
    let sample_mean_recon: Vec<f64> = (0..n_samples)
        .map(|i| recon.column(i).sum() / rounds as f64)
        .collect();

    let mut classif = Array2::<f64>::zeros((rounds, n_samples));
    for k in 0..rounds {
        for i in 0..n_samples {
            if !correct[k][i] {
                let mean = match cfg.norm {
                    ClassifErrorNorm::RoundMean => round_mean_recon[k],
                    ClassifErrorNorm::SampleRoundMean => sample_mean_recon[i],
                };
                classif[[k, i]] = cfg.eta * mean;
            }
        }
    }

    let total = Array1::from_iter(
        (0..n_samples).map(|i| recon.column(i).sum() + classif.column(i).sum()),
    );

    // Top-n by total error, descending; ties resolve to the lower index.
    let mut order: Vec<usize> = (0..n_samples).collect();
    order.sort_by(|&a, &b| total[b].total_cmp(&total[a]).then(a.cmp(&b)));
    let selected: Vec<usize> = order.into_iter().take(cfg.n).collect();

    let mut dict = dictionary_from_indices(train, &selected, DictMethod::Adl, cfg.seed);
    dict.method = DictMethod::Adl;

    let ledger = ErrorLedger {
        recon,
        classif,
        total,
        probe_indices,
        round_mean_recon,
    };
    Ok((dict, ledger))
}

/// All training samples as atoms.
pub fn wd_dictionary(train: &Dataset) -> Dictionary {
    let indices: Vec<usize> = (0..train.len()).collect();
    dictionary_from_indices(train, &indices, DictMethod::Wd, 0)
}

/// `n` distinct training samples drawn uniformly, deterministic per seed.
pub fn random_dictionary(train: &Dataset, n: usize, seed: u64) -> Result<Dictionary> {
    if n == 0 || n > train.len() {
        return Err(Error::Config(format!(
            "atom count {n} out of range 1..={}",
            train.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = sample_distinct(&mut rng, train.len(), n);
    Ok(dictionary_from_indices(train, &indices, DictMethod::Random, seed))
}

/// Clustering-based builder parameters.
#[derive(Debug, Clone)]
pub struct ClusterConfig {
    /// Center count.
    pub n: usize,
    pub epochs: usize,
    pub seed: u64,
    /// SOM grid (rows, cols); must multiply to `n`. `None` picks the most
    /// square factorization.
    pub som_grid: Option<(usize, usize)>,
    /// Neighbors for center labeling.
    pub knn_k: usize,
}

impl ClusterConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        ClusterConfig {
            n,
            epochs: 50,
            seed,
            som_grid: None,
            knn_k: 5,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("center count must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.knn_k == 0 {
            return Err(Error::Config("knn_k must be >= 1".into()));
        }
        Ok(())
    }

    /// Most square (rows, cols) with rows * cols = n.
    pub fn grid_for(n: usize) -> (usize, usize) {
        let mut rows = (n as f64).sqrt().floor() as usize;
        while rows > 1 && n % rows != 0 {
            rows -= 1;
        }
        (rows.max(1), n / rows.max(1))
    }
}

/// Majority label over the k training samples nearest to `center`.
/// Ties go to the most frequent class among the k, then the lowest id.
fn knn_label(center: &Array1<f64>, train: &Dataset, k: usize) -> usize {
    let k = k.min(train.len());
    let mut dist: Vec<(f64, usize)> = (0..train.len())
        .map(|i| {
            let d = &train.features.column(i).to_owned() - center;
            (d.dot(&d), i)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; train.class_count];
    for &(_, i) in dist.iter().take(k) {
        votes[train.labels[i]] += 1;
    }
    votes
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .unwrap()
}

fn init_centers(train: &Dataset, n: usize, rng: &mut ChaCha8Rng) -> Vec<Array1<f64>> {
    (0..n)
        .map(|_| {
            let i = rng.gen_range(0..train.len());
            train.features.column(i).to_owned()
        })
        .collect()
}

fn centers_to_dictionary(
    centers: Vec<Array1<f64>>,
    train: &Dataset,
    cfg: &ClusterConfig,
    method: DictMethod,
) -> Dictionary {
    let m = train.feature_dim();
    let mut atoms = Array2::zeros((m, centers.len()));
    let mut labels = Vec::with_capacity(centers.len());
    for (j, center) in centers.iter().enumerate() {
        atoms.column_mut(j).assign(center);
        labels.push(knn_label(center, train, cfg.knn_k));
    }
    Dictionary {
        atoms,
        atom_labels: labels,
        source_indices: vec![None; centers.len()],
        class_count: train.class_count,
        method,
        build_seed: cfg.seed,
    }
}

/// Online neural gas: rank-based neighborhood with exponentially decaying
/// learning rate and neighborhood range.
pub fn ngas_dictionary(train: &Dataset, cfg: &ClusterConfig) -> Result<Dictionary> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centers = init_centers(train, cfg.n, &mut rng);

    let total_steps = (cfg.epochs * train.len()) as f64;
    let (eps0, eps_f): (f64, f64) = (0.5, 0.005);
    let lambda0 = (cfg.n as f64 / 2.0).max(0.01);
    let lambda_f = 0.01;

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut step = 0.0f64;
    for _epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = train.features.column(i);
            let t = step / total_steps;
            let eps = eps0 * (eps_f / eps0).powf(t);
            let lambda = lambda0 * (lambda_f / lambda0).powf(t);

            let mut ranked: Vec<(f64, usize)> = centers
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let d = &x.to_owned() - c;
                    (d.dot(&d), j)
                })
                .collect();
            ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for (rank, &(_, j)) in ranked.iter().enumerate() {
                let h = (-(rank as f64) / lambda).exp();
                let factor = eps * h;
                if factor < 1e-12 {
                    break;
                }
                let center = &mut centers[j];
                for (c, &xv) in center.iter_mut().zip(x.iter()) {
                    *c += factor * (xv - *c);
                }
            }
            step += 1.0;
        }
    }

    Ok(centers_to_dictionary(centers, train, cfg, DictMethod::Ngasd))
}

/// Online SOM on a 2-D rectangular grid with a Gaussian neighborhood and
/// linearly decaying learning rate and radius.
pub fn som_dictionary(train: &Dataset, cfg: &ClusterConfig) -> Result<Dictionary> {
    cfg.validate()?;
    let (rows, cols) = match cfg.som_grid {
        Some((r, c)) => {
            if r * c != cfg.n {
                return Err(Error::Config(format!(
                    "som grid {r}x{c} does not multiply to {}",
                    cfg.n
                )));
            }
            (r, c)
        }
        None => ClusterConfig::grid_for(cfg.n),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centers = init_centers(train, cfg.n, &mut rng);

    let total_steps = (cfg.epochs * train.len()) as f64;
    let (alpha0, alpha_f) = (0.5, 0.01);
    let sigma0 = (rows.max(cols) as f64 / 2.0).max(0.5);
    let sigma_f = 0.5;

    let grid_pos = |j: usize| ((j / cols) as f64, (j % cols) as f64);

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut step = 0.0f64;
    for _epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let x = train.features.column(i);
            let t = step / total_steps;
            let alpha = alpha0 + (alpha_f - alpha0) * t;
            let sigma = sigma0 + (sigma_f - sigma0) * t;

            let bmu = centers
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let d = &x.to_owned() - c;
                    (d.dot(&d), j)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, j)| j)
                .unwrap();
            let (br, bc) = grid_pos(bmu);
            for (j, center) in centers.iter_mut().enumerate() {
                let (r, c) = grid_pos(j);
                let grid_d2 = (r - br).powi(2) + (c - bc).powi(2);
                let h = (-grid_d2 / (2.0 * sigma * sigma)).exp();
                let factor = alpha * h;
                if factor < 1e-12 {
                    continue;
                }
                for (cv, &xv) in center.iter_mut().zip(x.iter()) {
                    *cv += factor * (xv - *cv);
                }
            }
            step += 1.0;
        }
    }

    Ok(centers_to_dictionary(centers, train, cfg, DictMethod::Somd))
}

/// Mean distance from each training sample to its nearest atom.
pub fn quantization_error(train: &Dataset, dict: &Dictionary) -> f64 {
    let mut sum = 0.0;
    for i in 0..train.len() {
        let x = train.features.column(i);
        let best = (0..dict.atom_count())
            .map(|j| {
                let d = &x.to_owned() - &dict.atoms.column(j);
                d.dot(&d).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        sum += best;
    }
    sum / train.len() as f64
}

/// On-disk dictionary representation (JSON): matrix, labels, metadata,
/// build config and seed.
#[derive(Debug, Serialize, Deserialize)]
pub struct DictionaryFile {
    pub format_version: u32,
    pub method: DictMethod,
    pub build_seed: u64,
    pub feature_dim: usize,
    pub atom_count: usize,
    pub class_count: usize,
    /// Column-major atom matrix, atom by atom.
    pub atoms: Vec<f64>,
    pub atom_labels: Vec<usize>,
    /// Training-sample index per atom, -1 for synthetic centers.
    pub source_indices: Vec<i64>,
    /// Free-form build configuration for auditability.
    #[serde(default)]
    pub build_config: serde_json::Value,
}

pub fn save_dictionary(
    dict: &Dictionary,
    path: impl AsRef<Path>,
    build_config: serde_json::Value,
) -> Result<()> {
    let path = path.as_ref();
    let mut atoms = Vec::with_capacity(dict.feature_dim() * dict.atom_count());
    for j in 0..dict.atom_count() {
        atoms.extend(dict.atoms.column(j).iter().copied());
    }
    let file = DictionaryFile {
        format_version: 1,
        method: dict.method,
        build_seed: dict.build_seed,
        feature_dim: dict.feature_dim(),
        atom_count: dict.atom_count(),
        class_count: dict.class_count,
        atoms,
        atom_labels: dict.atom_labels.clone(),
        source_indices: dict
            .source_indices
            .iter()
            .map(|s| s.map_or(-1, |i| i as i64))
            .collect(),
        build_config,
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Schema(format!("dictionary serialization: {e}")))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary> {
    let path = path.as_ref();
    let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: DictionaryFile =
        serde_json::from_str(&json).map_err(|e| Error::Schema(format!("dictionary file: {e}")))?;
    if file.atoms.len() != file.feature_dim * file.atom_count {
        return Err(Error::Schema(format!(
            "atom data length {} does not match {}x{}",
            file.atoms.len(),
            file.feature_dim,
            file.atom_count
        )));
    }
    let mut atoms = Array2::zeros((file.feature_dim, file.atom_count));
    for j in 0..file.atom_count {
        for i in 0..file.feature_dim {
            atoms[[i, j]] = file.atoms[j * file.feature_dim + i];
        }
    }
    let dict = Dictionary {
        atoms,
        atom_labels: file.atom_labels,
        source_indices: file
            .source_indices
            .iter()
            .map(|&s| if s < 0 { None } else { Some(s as usize) })
            .collect(),
        class_count: file.class_count,
        method: file.method,
        build_seed: file.build_seed,
    };
    dict.validate()?;
    Ok(dict)
}
