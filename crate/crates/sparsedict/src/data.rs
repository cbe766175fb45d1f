//! Dataset ingestion, normalization, stratified fold splitting and PCA
//! projection.
//!
//! Samples are stored as columns: `features` is `m x N` where `m` is the
//! feature dimension and `N` the sample count.

use std::collections::HashMap;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// A labeled dataset with samples as columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub id: String,
    /// m x N, one column per sample.
    pub features: Array2<f64>,
    /// Class ids in `0..class_count`, dense, every class occupied.
    pub labels: Vec<usize>,
    pub class_count: usize,
    /// Original label strings, indexed by class id.
    pub class_names: Vec<String>,
    pub feature_names: Option<Vec<String>>,
    pub sample_ids: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        id: impl Into<String>,
        features: Array2<f64>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let class_count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let class_names = (0..class_count).map(|c| c.to_string()).collect();
        let ds = Dataset {
            id: id.into(),
            features,
            labels,
            class_count,
            class_names,
            feature_names: None,
            sample_ids: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.ncols() != self.labels.len() {
            return Err(Error::Dimension(format!(
                "{} feature columns vs {} labels",
                self.features.ncols(),
                self.labels.len()
            )));
        }
        let mut seen = vec![false; self.class_count];
        for &l in &self.labels {
            if l >= self.class_count {
                return Err(Error::Schema(format!(
                    "label {l} out of range 0..{}",
                    self.class_count
                )));
            }
            seen[l] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Schema("empty class id in 0..c".into()));
        }
        if self.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("NaN/Inf in feature matrix".into()));
        }
        Ok(())
    }

    /// Feature dimension m.
    pub fn feature_dim(&self) -> usize {
        self.features.nrows()
    }

    /// Sample count N.
    pub fn len(&self) -> usize {
        self.features.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.column(i)
    }

    /// New dataset containing the given sample columns, in order.
    /// Class ids and names are preserved (not re-densified).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let m = self.feature_dim();
        let mut features = Array2::zeros((m, indices.len()));
        let mut labels = Vec::with_capacity(indices.len());
        for (dst, &src) in indices.iter().enumerate() {
            features.column_mut(dst).assign(&self.features.column(src));
            labels.push(self.labels[src]);
        }
        Dataset {
            id: self.id.clone(),
            features,
            labels,
            class_count: self.class_count,
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
            sample_ids: self
                .sample_ids
                .as_ref()
                .map(|ids| indices.iter().map(|&i| ids[i].clone()).collect()),
        }
    }
}

/// Which CSV column carries the class label.
#[derive(Debug, Clone)]
pub enum ColumnSpec {
    Name(String),
    Index(usize),
}

/// CSV layout description.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub has_header: bool,
    pub label_column: ColumnSpec,
}

impl CsvSchema {
    pub fn labeled_by_name(name: impl Into<String>) -> Self {
        CsvSchema {
            has_header: true,
            label_column: ColumnSpec::Name(name.into()),
        }
    }

    pub fn labeled_by_index(index: usize, has_header: bool) -> Self {
        CsvSchema {
            has_header,
            label_column: ColumnSpec::Index(index),
        }
    }
}

/// Load a comma-separated dataset. Labels are re-encoded densely to
/// `0..c-1` in first-appearance order; any unparseable feature cell is a
/// schema error.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Schema(format!("{other:?}")),
        })?;

    let headers: Option<Vec<String>> = if schema.has_header {
        Some(
            reader
                .headers()
                .map_err(|e| Error::Schema(e.to_string()))?
                .iter()
                .map(str::to_string)
                .collect(),
        )
    } else {
        None
    };

    let label_idx = match &schema.label_column {
        ColumnSpec::Index(i) => *i,
        ColumnSpec::Name(name) => {
            let headers = headers
                .as_ref()
                .ok_or_else(|| Error::Schema("label column by name requires a header".into()))?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("no column named '{name}'")))?
        }
    };

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut width = 0usize;
    for (row_no, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Schema(e.to_string()))?;
        if row_no == 0 {
            width = record.len();
            if label_idx >= width {
                return Err(Error::Schema(format!(
                    "label column {label_idx} out of range (row width {width})"
                )));
            }
        } else if record.len() != width {
            return Err(Error::Schema(format!(
                "row {row_no} has {} cells, expected {width}",
                record.len()
            )));
        }
        let mut sample = Vec::with_capacity(width - 1);
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                raw_labels.push(cell.trim().to_string());
            } else {
                let value: f64 = cell.trim().parse().map_err(|_| {
                    Error::Schema(format!(
                        "row {row_no}, column {col}: non-numeric cell '{cell}'"
                    ))
                })?;
                sample.push(value);
            }
        }
        columns.push(sample);
    }

    if columns.is_empty() {
        return Err(Error::Schema("no data rows".into()));
    }

    // Dense label encoding in first-appearance order.
    let mut class_names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(raw_labels.len());
    for raw in &raw_labels {
        let id = *index.entry(raw.clone()).or_insert_with(|| {
            class_names.push(raw.clone());
            class_names.len() - 1
        });
        labels.push(id);
    }
    if class_names.len() < 2 {
        return Err(Error::Schema(format!(
            "need at least 2 classes, found {}",
            class_names.len()
        )));
    }

    let m = width - 1;
    let n = columns.len();
    let mut features = Array2::zeros((m, n));
    for (j, sample) in columns.iter().enumerate() {
        for (i, &v) in sample.iter().enumerate() {
            features[[i, j]] = v;
        }
    }

    let feature_names = headers.map(|h| {
        h.iter()
            .enumerate()
            .filter(|&(i, _)| i != label_idx)
            .map(|(_, name)| name.clone())
            .collect()
    });

    let mut ds = Dataset::new(
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into()),
        features,
        labels,
    )?;
    ds.class_names = class_names;
    ds.feature_names = feature_names;
    Ok(ds)
}

/// Write a dataset back out as CSV (debugging aid; label column last).
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Schema(format!("{other:?}")),
    })?;
    let m = ds.feature_dim();
    let mut header: Vec<String> = match &ds.feature_names {
        Some(names) => names.clone(),
        None => (0..m).map(|i| format!("f{i}")).collect(),
    };
    header.push("label".into());
    writer
        .write_record(&header)
        .map_err(|e| Error::Schema(e.to_string()))?;
    for j in 0..ds.len() {
        let mut row: Vec<String> = ds
            .features
            .column(j)
            .iter()
            .map(|v| format!("{v}"))
            .collect();
        row.push(ds.class_names[ds.labels[j]].clone());
        writer
            .write_record(&row)
            .map_err(|e| Error::Schema(e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Per-feature z-scoring parameters fit on a training split.
#[derive(Debug, Clone)]
pub struct Scaler {
    pub mean: Array1<f64>,
    /// Population standard deviation; zero for constant features.
    pub std: Array1<f64>,
}

impl Scaler {
    pub fn fit(ds: &Dataset) -> Result<Self> {
        if ds.len() < 2 {
            return Err(Error::Config("standardize needs at least 2 samples".into()));
        }
        let mean = ds.features.mean_axis(Axis(1)).unwrap();
        let n = ds.len() as f64;
        let mut std = Array1::zeros(ds.feature_dim());
        for i in 0..ds.feature_dim() {
            let var: f64 = ds
                .features
                .row(i)
                .iter()
                .map(|v| (v - mean[i]).powi(2))
                .sum::<f64>()
                / n;
            std[i] = var.sqrt();
        }
        Ok(Scaler { mean, std })
    }

    /// Transform with training statistics; constant features map to zero.
    pub fn transform(&self, ds: &Dataset) -> Dataset {
        let mut out = ds.clone();
        for i in 0..ds.feature_dim() {
            let scale = if self.std[i] > 0.0 {
                1.0 / self.std[i]
            } else {
                0.0
            };
            for j in 0..ds.len() {
                out.features[[i, j]] = (ds.features[[i, j]] - self.mean[i]) * scale;
            }
        }
        out
    }
}

/// Fit a z-scaler on `ds` and return the transformed dataset with it.
pub fn standardize(ds: &Dataset) -> Result<(Dataset, Scaler)> {
    let scaler = Scaler::fit(ds)?;
    Ok((scaler.transform(ds), scaler))
}

/// Stratified cross-validation assignment of samples to folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub fold_count: usize,
    /// Fold id per sample, in `0..fold_count`.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

/// Deterministic stratified fold assignment. Within each class, shuffled
/// samples are dealt round-robin; the dealing origin rotates across
/// classes so small classes spread over different folds.
pub fn make_folds(ds: &Dataset, fold_count: usize, seed: u64) -> Result<FoldPlan> {
    if fold_count < 2 {
        return Err(Error::Config(format!("fold_count {fold_count} < 2")));
    }
    if fold_count > ds.len() {
        return Err(Error::Config(format!(
            "fold_count {fold_count} exceeds sample count {}",
            ds.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; ds.len()];
    let mut next_fold = 0usize;
    for class in 0..ds.class_count {
        let mut members: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] == class).collect();
        members.shuffle(&mut rng);
        for idx in members {
            assignments[idx] = next_fold;
            next_fold = (next_fold + 1) % fold_count;
        }
    }
    Ok(FoldPlan {
        fold_count,
        assignments,
        seed,
    })
}

/// PCA projection model (eigenface preprocessor).
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: Array1<f64>,
    /// m x d, orthonormal columns ordered by decreasing eigenvalue.
    pub basis: Array2<f64>,
    pub dim: usize,
}

/// Fit the top-`d` principal directions of the mean-centered training data.
pub fn pca_fit(train: &Dataset, d: usize) -> Result<PcaModel> {
    let m = train.feature_dim();
    let n = train.len();
    if d == 0 || d > m.min(n) {
        return Err(Error::Config(format!(
            "pca dimension {d} out of range 1..={}",
            m.min(n)
        )));
    }
    let mean = train.features.mean_axis(Axis(1)).unwrap();
    let centered = &train.features - &mean.clone().insert_axis(Axis(1));
    let denom = (n as f64 - 1.0).max(1.0);

    let mut basis = if m <= n {
        let cov = centered.dot(&centered.t()) / denom;
        let (_vals, vecs) = symmetric_eigen(&cov);
        vecs.slice(ndarray::s![.., ..d]).to_owned()
    } else {
        // Gram trick: eigenvectors of X^T X lifted back through X.
        let gram = centered.t().dot(&centered) / denom;
        let (vals, vecs) = symmetric_eigen(&gram);
        let mut basis = Array2::zeros((m, d));
        for k in 0..d {
            if vals[k] <= 1e-12 {
                return Err(Error::Config(format!(
                    "pca dimension {d} exceeds data rank {k}"
                )));
            }
            let u = centered.dot(&vecs.column(k));
            let norm = u.dot(&u).sqrt();
            basis.column_mut(k).assign(&(&u / norm));
        }
        basis
    };

    // Sign convention: largest-magnitude entry of each direction positive.
    for mut col in basis.columns_mut() {
        let (mut best, mut best_abs) = (0usize, -1.0f64);
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }

    Ok(PcaModel {
        mean,
        basis,
        dim: d,
    })
}

/// Project one sample: `basis^T (x - mean)`.
pub fn pca_project(model: &PcaModel, x: ArrayView1<'_, f64>) -> Array1<f64> {
    let centered = &x - &model.mean;
    model.basis.t().dot(&centered)
}

/// Project every sample of a dataset, keeping labels.
pub fn pca_project_dataset(model: &PcaModel, ds: &Dataset) -> Dataset {
    let centered = &ds.features - &model.mean.clone().insert_axis(Axis(1));
    let projected = model.basis.t().dot(&centered);
    Dataset {
        id: ds.id.clone(),
        features: projected,
        labels: ds.labels.clone(),
        class_count: ds.class_count,
        class_names: ds.class_names.clone(),
        feature_names: None,
        sample_ids: ds.sample_ids.clone(),
    }
}
