//! Sparse-representation-based classification: code a test vector against
//! a labeled dictionary, then label by minimum class-wise residual.

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lasso::{solve_lasso, LassoConfig, SparseCode};

/// How a dictionary was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DictMethod {
    /// Active dictionary learning.
    Adl,
    /// Whole training data.
    Wd,
    /// Uniform random selection.
    Random,
    /// Self-organizing map centers.
    Somd,
    /// Neural gas centers.
    Ngasd,
}

impl DictMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DictMethod::Adl => "adl",
            DictMethod::Wd => "wd",
            DictMethod::Random => "random",
            DictMethod::Somd => "som",
            DictMethod::Ngasd => "ngas",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "adl" => Ok(DictMethod::Adl),
            "wd" => Ok(DictMethod::Wd),
            "random" => Ok(DictMethod::Random),
            "som" | "somd" => Ok(DictMethod::Somd),
            "ngas" | "ngasd" => Ok(DictMethod::Ngasd),
            other => Err(Error::Config(format!("unknown dictionary method '{other}'"))),
        }
    }
}

impl std::fmt::Display for DictMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A labeled dictionary: atom matrix plus per-atom class labels.
#[derive(Debug, Clone)]
pub struct Dictionary {
    /// m x n atom matrix.
    pub atoms: Array2<f64>,
    /// Class id per atom, in `0..class_count`.
    pub atom_labels: Vec<usize>,
    /// Training-sample index per atom; `None` for synthetic (clustered) atoms.
    pub source_indices: Vec<Option<usize>>,
    pub class_count: usize,
    pub method: DictMethod,
    pub build_seed: u64,
}

impl Dictionary {
    pub fn validate(&self) -> Result<()> {
        let n = self.atoms.ncols();
        if n == 0 {
            return Err(Error::Config("dictionary has no atoms".into()));
        }
        if self.atom_labels.len() != n || self.source_indices.len() != n {
            return Err(Error::Dimension(
                "atom_labels/source_indices length differs from atom count".into(),
            ));
        }
        if self.atom_labels.iter().any(|&l| l >= self.class_count) {
            return Err(Error::Schema("atom label out of class range".into()));
        }
        Ok(())
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn feature_dim(&self) -> usize {
        self.atoms.nrows()
    }

    /// Atom count per class id.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.class_count];
        for &l in &self.atom_labels {
            hist[l] += 1;
        }
        hist
    }
}

/// Per-class residuals `r_i(y) = ||y - D delta_i(x)||_2`; classes with no
/// atom in the dictionary get +inf so absence is visible in diagnostics.
#[derive(Debug, Clone)]
pub struct ClassResiduals {
    pub residuals: Vec<f64>,
    pub argmin_label: usize,
}

impl ClassResiduals {
    /// True when every coefficient was zero (all residuals equal ||y||).
    pub fn degenerate(&self) -> bool {
        let finite: Vec<f64> = self
            .residuals
            .iter()
            .copied()
            .filter(|r| r.is_finite())
            .collect();
        finite.len() > 1
            && finite
                .iter()
                .all(|&r| (r - finite[0]).abs() <= 1e-12 * (1.0 + finite[0]))
    }
}

/// Compute class-wise residuals of an already-solved code.
pub fn class_residuals(
    y: ArrayView1<'_, f64>,
    dict: &Dictionary,
    code: &SparseCode,
) -> Result<ClassResiduals> {
    dict.validate()?;
    if dict.feature_dim() != y.len() {
        return Err(Error::Dimension(format!(
            "dictionary rows {} vs y length {}",
            dict.feature_dim(),
            y.len()
        )));
    }
    if code.coeffs.len() != dict.atom_count() {
        return Err(Error::Dimension(format!(
            "code length {} vs atom count {}",
            code.coeffs.len(),
            dict.atom_count()
        )));
    }

    let mut residuals = vec![f64::INFINITY; dict.class_count];
    for class in 0..dict.class_count {
        let present = dict.atom_labels.iter().any(|&l| l == class);
        if !present {
            continue;
        }
        // delta_i(x): keep only coefficients on class-i atoms
        let mut partial = Array1::<f64>::zeros(y.len());
        for (j, &label) in dict.atom_labels.iter().enumerate() {
            if label == class && code.coeffs[j] != 0.0 {
                partial.scaled_add(code.coeffs[j], &dict.atoms.column(j));
            }
        }
        let diff = &y.to_owned() - &partial;
        residuals[class] = diff.dot(&diff).sqrt();
    }

    let argmin_label = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_finite())
        .min_by(|(_, a), (_, b)| a.total_cmp(b))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Config("dictionary has no labeled atoms".into()))?;

    Ok(ClassResiduals {
        residuals,
        argmin_label,
    })
}

/// Full SRC outcome for one sample.
#[derive(Debug, Clone)]
pub struct SrcOutcome {
    pub label: usize,
    pub residuals: ClassResiduals,
    pub code: SparseCode,
}

/// Algorithm: solve the lasso against the dictionary, then label by the
/// minimum class residual. Ties break to the lowest class id.
pub fn src_classify(
    y: ArrayView1<'_, f64>,
    dict: &Dictionary,
    cfg: &LassoConfig,
) -> Result<SrcOutcome> {
    let code = solve_lasso(y, dict.atoms.view(), cfg)?;
    let residuals = class_residuals(y, dict, &code)?;
    Ok(SrcOutcome {
        label: residuals.argmin_label,
        residuals,
        code,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dict_from(atoms: Array2<f64>, labels: Vec<usize>, class_count: usize) -> Dictionary {
        let n = labels.len();
        Dictionary {
            atoms,
            atom_labels: labels,
            source_indices: (0..n).map(Some).collect(),
            class_count,
            method: DictMethod::Wd,
            build_seed: 0,
        }
    }

    #[test]
    fn orthonormal_atoms_pick_own_class() {
        let dict = dict_from(Array2::eye(2), vec![0, 1], 2);
        let y = array![1.0, 0.0];
        let out = src_classify(y.view(), &dict, &LassoConfig::with_lambda(0.01)).unwrap();
        assert_eq!(out.label, 0);
        assert!(out.residuals.residuals[0] < 0.1);
        assert!(out.residuals.residuals[1] > 0.9);
    }

    #[test]
    fn zero_code_gives_norm_residual_everywhere() {
        let dict = dict_from(Array2::eye(2), vec![0, 1], 2);
        let y = array![3.0, 4.0];
        let code = SparseCode {
            coeffs: Array1::zeros(2),
            objective: 25.0,
            kkt_residual: 0.0,
            iterations: 0,
            converged: true,
        };
        let res = class_residuals(y.view(), &dict, &code).unwrap();
        assert!((res.residuals[0] - 5.0).abs() < 1e-12);
        assert!((res.residuals[1] - 5.0).abs() < 1e-12);
        assert_eq!(res.argmin_label, 0); // tie -> lowest class id
        assert!(res.degenerate());
    }

    #[test]
    fn residuals_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let atoms = Array2::from_shape_fn((3, 4), |_| rng.gen_range(-1.0..1.0));
        let dict = dict_from(atoms.clone(), vec![0, 1, 0, 1], 2);
        let y = Array1::from_shape_fn(3, |_| rng.gen_range(-1.0..1.0));
        let code = solve_lasso(y.view(), atoms.view(), &LassoConfig::with_lambda(0.1)).unwrap();
        let res = class_residuals(y.view(), &dict, &code).unwrap();
        for class in 0..2 {
            // independent recomputation, elementwise
            let mut recon = vec![0.0; 3];
            for j in 0..4 {
                if dict.atom_labels[j] == class {
                    for i in 0..3 {
                        recon[i] += atoms[[i, j]] * code.coeffs[j];
                    }
                }
            }
            let expect: f64 = (0..3)
                .map(|i| (y[i] - recon[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((res.residuals[class] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn absent_class_gets_infinite_residual() {
        let dict = dict_from(Array2::eye(2), vec![0, 0], 3);
        let y = array![1.0, 2.0];
        let out = src_classify(y.view(), &dict, &LassoConfig::with_lambda(0.1)).unwrap();
        assert_eq!(out.label, 0);
        assert!(out.residuals.residuals[1].is_infinite());
        assert!(out.residuals.residuals[2].is_infinite());
    }

    #[test]
    fn exact_atom_recovery_one_atom_per_class() {
        let atoms = array![
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0]
        ];
        let dict = dict_from(atoms.clone(), vec![0, 1, 2], 3);
        let y = atoms.column(2).to_owned();
        let out = src_classify(y.view(), &dict, &LassoConfig::with_lambda(0.01)).unwrap();
        assert_eq!(out.label, 2);
    }

    #[test]
    fn label_permutation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let atoms = Array2::from_shape_fn((4, 6), |_| rng.gen_range(-1.0..1.0));
        let labels = vec![0, 1, 2, 0, 1, 2];
        let perm = [2usize, 0, 1]; // pi(class)
        let dict = dict_from(atoms.clone(), labels.clone(), 3);
        let permuted = dict_from(
            atoms.clone(),
            labels.iter().map(|&l| perm[l]).collect(),
            3,
        );
        for _ in 0..10 {
            let y = Array1::from_shape_fn(4, |_| rng.gen_range(-1.0..1.0));
            let a = src_classify(y.view(), &dict, &LassoConfig::with_lambda(0.1)).unwrap();
            let b = src_classify(y.view(), &permuted, &LassoConfig::with_lambda(0.1)).unwrap();
            assert_eq!(perm[a.label], b.label);
        }
    }

    #[test]
    fn residual_triangle_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let atoms = Array2::from_shape_fn((4, 5), |_| rng.gen_range(-1.0..1.0));
        let dict = dict_from(atoms.clone(), vec![0, 1, 0, 1, 0], 2);
        for _ in 0..20 {
            let y = Array1::from_shape_fn(4, |_| rng.gen_range(-1.0..1.0));
            let out = src_classify(y.view(), &dict, &LassoConfig::with_lambda(0.2)).unwrap();
            let y_norm = y.dot(&y).sqrt();
            for class in 0..2 {
                let r = out.residuals.residuals[class];
                assert!(r >= 0.0);
                let mut partial = Array1::<f64>::zeros(4);
                for j in 0..5 {
                    if dict.atom_labels[j] == class {
                        partial.scaled_add(out.code.coeffs[j], &atoms.column(j));
                    }
                }
                let partial_norm = partial.dot(&partial).sqrt();
                assert!(r <= y_norm + partial_norm + 1e-12);
            }
        }
    }

    #[test]
    fn determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let atoms = Array2::from_shape_fn((3, 5), |_| rng.gen_range(-1.0..1.0));
        let dict = dict_from(atoms, vec![0, 1, 0, 1, 0], 2);
        let y = Array1::from_shape_fn(3, |_| rng.gen_range(-1.0..1.0));
        let a = src_classify(y.view(), &dict, &LassoConfig::default()).unwrap();
        let b = src_classify(y.view(), &dict, &LassoConfig::default()).unwrap();
        assert_eq!(a.label, b.label);
        assert_eq!(a.residuals.residuals, b.residuals.residuals);
        assert_eq!(a.code.coeffs, b.code.coeffs);
    }
}
