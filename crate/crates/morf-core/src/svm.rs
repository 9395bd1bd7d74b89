//! One-vs-all SVM with a degree-3 polynomial kernel, deterministic SMO
//! solver, subject-aware grid search, and the LOSO evaluation harness.
//!
//! Everything is deterministic: working-set selection breaks ties by index,
//! folds and grid points have fixed orders, and all reductions run in fold
//! order regardless of the parallel schedule.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MorfError, Result};

pub const POLY_DEGREE: i32 = 3;
const SMO_TOL: f64 = 1e-3;
const SMO_MIN_ALPHA_STEP: f64 = 1e-12;
const SMO_MAX_QUIET_PASSES: usize = 3;
const SMO_MAX_SWEEPS: usize = 2000;

/// Kernel K(u,v) = (gamma*<u,v> + coef0)^3 with soft-margin penalty C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub gamma: f64,
    pub coef0: f64,
    pub c: f64,
}

impl KernelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !(self.c > 0.0) {
            return Err(MorfError::Config(format!(
                "kernel needs gamma > 0 and C > 0, got gamma={} C={}",
                self.gamma, self.c
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn kernel(&self, u: &[f64], v: &[f64]) -> f64 {
        let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        (self.gamma * dot + self.coef0).powi(POLY_DEGREE)
    }
}

/// Grid specification; gammas may be absolute, relative to the feature
/// length, or additionally scaled by the training features' mean squared
/// entry (so the kernel argument stays O(1) whatever the descriptor scale).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub cs: Vec<f64>,
    /// Absolute gamma values.
    #[serde(default)]
    pub gammas: Vec<f64>,
    /// Gammas expressed as k/d where d is the feature length.
    #[serde(default)]
    pub gammas_over_dim: Vec<f64>,
    /// Gammas expressed as k/(d * m2) where m2 is the mean squared feature
    /// entry of the training fold. Computed per fold from training data
    /// only, so held-out subjects never influence the grid.
    #[serde(default)]
    pub gammas_scaled: Vec<f64>,
    pub coef0s: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            cs: vec![0.1, 1.0, 10.0, 100.0],
            gammas: vec![],
            gammas_over_dim: vec![1.0, 10.0],
            gammas_scaled: vec![1.0, 10.0],
            coef0s: vec![0.0, 1.0],
        }
    }
}

/// Mean squared entry over a feature matrix, in fixed iteration order.
pub fn mean_squared_entry(features: &[Vec<f64>]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for f in features {
        for v in f {
            sum += v * v;
            count += 1;
        }
    }
    if count == 0 {
        1.0
    } else {
        (sum / count as f64).max(f64::MIN_POSITIVE)
    }
}

impl GridSpec {
    /// Materializes the grid for feature length `dim` and training-feature
    /// scale `m2`, sorted ascending by C, then gamma, then coef0 (the
    /// tie-break order of the search).
    pub fn materialize_scaled(&self, dim: usize, m2: f64) -> Result<Vec<KernelParams>> {
        if self.cs.is_empty() || self.coef0s.is_empty() {
            return Err(MorfError::Config("grid needs at least one C and coef0".into()));
        }
        let d = dim.max(1) as f64;
        let mut gammas: Vec<f64> = self.gammas.clone();
        gammas.extend(self.gammas_over_dim.iter().map(|k| k / d));
        gammas.extend(self.gammas_scaled.iter().map(|k| k / (d * m2.max(f64::MIN_POSITIVE))));
        if gammas.is_empty() {
            return Err(MorfError::Config("grid needs at least one gamma".into()));
        }
        let mut out = Vec::new();
        for &c in &self.cs {
            for &gamma in &gammas {
                for &coef0 in &self.coef0s {
                    let p = KernelParams { gamma, coef0, c };
                    p.validate()?;
                    out.push(p);
                }
            }
        }
        out.sort_by(|a, b| {
            (a.c, a.gamma, a.coef0)
                .partial_cmp(&(b.c, b.gamma, b.coef0))
                .expect("finite grid values")
        });
        out.dedup_by(|a, b| a == b);
        Ok(out)
    }

    /// Materialization for unit-scale features (m2 = 1).
    pub fn materialize(&self, dim: usize) -> Result<Vec<KernelParams>> {
        self.materialize_scaled(dim, 1.0)
    }
}

/// One binary machine of the one-vs-all ensemble.
#[derive(Debug, Clone)]
pub struct BinarySvm {
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i * y_i per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

impl BinarySvm {
    pub fn decision(&self, params: &KernelParams, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * params.kernel(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

#[derive(Debug, Clone)]
pub struct SvmModel {
    pub classes: Vec<String>,
    pub machines: Vec<BinarySvm>,
    pub params: KernelParams,
    pub feature_len: usize,
}

impl SvmModel {
    /// FNV-1a over the exact float bits of every coefficient; two models
    /// with the same fingerprint trained on the same data are identical.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bits: u64| {
            for byte in bits.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x1000_0000_01b3);
            }
        };
        for m in &self.machines {
            eat(m.bias.to_bits());
            for c in &m.coefficients {
                eat(c.to_bits());
            }
            for sv in &m.support_vectors {
                for v in sv {
                    eat(v.to_bits());
                }
            }
        }
        h
    }
}

/// Deterministic SMO on a precomputed Gram matrix. Returns (alphas, bias).
fn smo_solve(gram: &[Vec<f64>], y: &[f64], c: f64) -> (Vec<f64>, f64) {
    let n = y.len();
    let mut alpha = vec![0.0f64; n];
    let mut b = 0.0f64;
    let decision = |alpha: &[f64], b: f64, i: usize| -> f64 {
        let mut s = b;
        for j in 0..n {
            if alpha[j] != 0.0 {
                s += alpha[j] * y[j] * gram[i][j];
            }
        }
        s
    };

    let mut quiet_passes = 0;
    let mut sweeps = 0;
    while quiet_passes < SMO_MAX_QUIET_PASSES && sweeps < SMO_MAX_SWEEPS {
        sweeps += 1;
        let mut changed = 0;
        // Errors refresh once per sweep; the inner updates recompute the two
        // entries they touch.
        let mut errors: Vec<f64> = (0..n).map(|i| decision(&alpha, b, i) - y[i]).collect();
        for i in 0..n {
            let ei = errors[i];
            let viol = (y[i] * ei < -SMO_TOL && alpha[i] < c) || (y[i] * ei > SMO_TOL && alpha[i] > 0.0);
            if !viol {
                continue;
            }
            // Second choice: maximal |Ei - Ej|, ties to the lowest index.
            let mut j_best = usize::MAX;
            let mut gap_best = -1.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let gap = (ei - errors[j]).abs();
                if gap > gap_best {
                    gap_best = gap;
                    j_best = j;
                }
            }
            if j_best == usize::MAX {
                continue;
            }
            let j = j_best;
            let ej = errors[j];
            let (ai_old, aj_old) = (alpha[i], alpha[j]);
            let (lo, hi) = if y[i] != y[j] {
                ((aj_old - ai_old).max(0.0), (c + aj_old - ai_old).min(c))
            } else {
                ((ai_old + aj_old - c).max(0.0), (ai_old + aj_old).min(c))
            };
            if lo >= hi {
                continue;
            }
            let eta = 2.0 * gram[i][j] - gram[i][i] - gram[j][j];
            if eta >= 0.0 {
                continue;
            }
            let mut aj = aj_old - y[j] * (ei - ej) / eta;
            aj = aj.clamp(lo, hi);
            if (aj - aj_old).abs() < SMO_MIN_ALPHA_STEP {
                continue;
            }
            let ai = ai_old + y[i] * y[j] * (aj_old - aj);
            alpha[i] = ai;
            alpha[j] = aj;
            let b1 = b - ei
                - y[i] * (ai - ai_old) * gram[i][i]
                - y[j] * (aj - aj_old) * gram[i][j];
            let b2 = b - ej
                - y[i] * (ai - ai_old) * gram[i][j]
                - y[j] * (aj - aj_old) * gram[j][j];
            b = if ai > 0.0 && ai < c {
                b1
            } else if aj > 0.0 && aj < c {
                b2
            } else {
                0.5 * (b1 + b2)
            };
            errors[i] = decision(&alpha, b, i) - y[i];
            errors[j] = decision(&alpha, b, j) - y[j];
            changed += 1;
        }
        if changed == 0 {
            quiet_passes += 1;
        } else {
            quiet_passes = 0;
        }
    }
    (alpha, b)
}

/// Trains one soft-margin machine per class (class vs rest).
pub fn train_svm(
    features: &[Vec<f64>],
    labels: &[usize],
    classes: &[String],
    params: &KernelParams,
) -> Result<SvmModel> {
    params.validate()?;
    if features.len() != labels.len() {
        return Err(MorfError::Feature(format!(
            "{} feature rows vs {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.is_empty() {
        return Err(MorfError::Training("no training samples".into()));
    }
    let dim = features[0].len();
    if features.iter().any(|f| f.len() != dim) {
        return Err(MorfError::Feature("feature vectors have mixed lengths".into()));
    }
    let mut present = std::collections::BTreeSet::new();
    for &l in labels {
        if l >= classes.len() {
            return Err(MorfError::Training(format!("label index {l} out of range")));
        }
        present.insert(l);
    }
    if present.len() < 2 {
        return Err(MorfError::Training(format!(
            "training needs >= 2 classes present, got {}",
            present.len()
        )));
    }

    let n = features.len();
    let mut gram = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let k = params.kernel(&features[i], &features[j]);
            gram[i][j] = k;
            gram[j][i] = k;
        }
    }

    let mut machines = Vec::with_capacity(classes.len());
    for target in 0..classes.len() {
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == target { 1.0 } else { -1.0 })
            .collect();
        // A class absent from this training fold yields the constant -1
        // machine (empty support set, bias -1): never the argmax winner
        // against a class that has evidence.
        if !present.contains(&target) {
            machines.push(BinarySvm {
                support_vectors: vec![],
                coefficients: vec![],
                bias: -1.0,
            });
            continue;
        }
        let (alpha, bias) = smo_solve(&gram, &y, params.c);
        let mut support_vectors = Vec::new();
        let mut coefficients = Vec::new();
        for i in 0..n {
            if alpha[i] > 0.0 {
                support_vectors.push(features[i].clone());
                coefficients.push(alpha[i] * y[i]);
            }
        }
        machines.push(BinarySvm { support_vectors, coefficients, bias });
    }
    Ok(SvmModel { classes: classes.to_vec(), machines, params: *params, feature_len: dim })
}

/// Predicted class index plus per-class decision values (class-list order).
/// Ties go to the earlier class.
pub fn predict(model: &SvmModel, feature: &[f64]) -> Result<(usize, Vec<f64>)> {
    if feature.len() != model.feature_len {
        return Err(MorfError::Feature(format!(
            "feature length {} does not match model {}",
            feature.len(),
            model.feature_len
        )));
    }
    let scores: Vec<f64> = model
        .machines
        .iter()
        .map(|m| m.decision(&model.params, feature))
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok((best, scores))
}

fn accuracy_of(model: &SvmModel, features: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    let mut hits = 0usize;
    for (f, &l) in features.iter().zip(labels) {
        if predict(model, f)?.0 == l {
            hits += 1;
        }
    }
    Ok(hits as f64 / labels.len().max(1) as f64)
}

/// Outcome of the hyperparameter search.
#[derive(Debug, Clone, Serialize)]
pub struct GridSearchResult {
    pub best: KernelParams,
    pub best_inner_accuracy: f64,
    /// True when a single training subject forced the stratified fallback.
    pub used_stratified_fallback: bool,
}

/// Exhaustive search over `grid`, scoring each point by inner
/// leave-one-subject-out over the training subjects (stratified 3-fold when
/// only one subject is present). Ties keep the earlier grid point.
pub fn grid_search(
    features: &[Vec<f64>],
    labels: &[usize],
    subject_ids: &[String],
    classes: &[String],
    grid: &[KernelParams],
) -> Result<GridSearchResult> {
    if grid.is_empty() {
        return Err(MorfError::Config("grid search needs a non-empty grid".into()));
    }
    if features.len() != labels.len() || features.len() != subject_ids.len() {
        return Err(MorfError::Feature("features/labels/subjects length mismatch".into()));
    }

    let mut subjects: Vec<&String> = subject_ids.iter().collect();
    subjects.sort();
    subjects.dedup();

    // Inner folds as index sets: (train, validation).
    let mut folds: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let used_stratified_fallback = subjects.len() < 2;
    if !used_stratified_fallback {
        for s in &subjects {
            let val: Vec<usize> =
                (0..features.len()).filter(|&i| &subject_ids[i] == *s).collect();
            let train: Vec<usize> =
                (0..features.len()).filter(|&i| &subject_ids[i] != *s).collect();
            if !val.is_empty() && !train.is_empty() {
                folds.push((train, val));
            }
        }
    } else {
        // Stratified 3-fold: round-robin within each class, class order fixed.
        let k = 3.min(features.len());
        let mut assignment = vec![0usize; features.len()];
        for class in 0..classes.len() {
            let members: Vec<usize> =
                (0..features.len()).filter(|&i| labels[i] == class).collect();
            for (pos, &i) in members.iter().enumerate() {
                assignment[i] = pos % k;
            }
        }
        for fold in 0..k {
            let val: Vec<usize> =
                (0..features.len()).filter(|&i| assignment[i] == fold).collect();
            let train: Vec<usize> =
                (0..features.len()).filter(|&i| assignment[i] != fold).collect();
            if !val.is_empty() && !train.is_empty() {
                folds.push((train, val));
            }
        }
    }
    if folds.is_empty() {
        return Err(MorfError::Split("no usable inner validation folds".into()));
    }

    let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        (
            idx.iter().map(|&i| features[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
    };

    let scores: Vec<f64> = grid
        .par_iter()
        .map(|params| {
            let mut acc_sum = 0.0;
            let mut count = 0usize;
            for (train_idx, val_idx) in &folds {
                let (tf, tl) = gather(train_idx);
                let (vf, vl) = gather(val_idx);
                // Inner folds can lose a class entirely; score such folds 0
                // rather than aborting the search.
                match train_svm(&tf, &tl, classes, params) {
                    Ok(model) => {
                        acc_sum += accuracy_of(&model, &vf, &vl)?;
                        count += 1;
                    }
                    Err(MorfError::Training(_)) => {
                        count += 1;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(acc_sum / count.max(1) as f64)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut best_idx = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best_idx] {
            best_idx = i;
        }
    }
    Ok(GridSearchResult {
        best: grid[best_idx],
        best_inner_accuracy: scores[best_idx],
        used_stratified_fallback,
    })
}

// ---------------------------------------------------------------------------
// Metrics and LOSO evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct FoldRecord {
    pub subject: String,
    pub params: KernelParams,
    pub inner_accuracy: f64,
    pub used_stratified_fallback: bool,
    pub test_ids: Vec<String>,
    pub true_labels: Vec<String>,
    pub predicted_labels: Vec<String>,
    /// Bit-exact hash of the trained fold model; identical runs match.
    pub model_fingerprint: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub f_measure: f64,
    pub classes: Vec<String>,
    /// confusion[true][predicted]
    pub confusion: Vec<Vec<usize>>,
    pub folds: Vec<FoldRecord>,
    pub warnings: Vec<String>,
}

impl Metrics {
    pub fn from_confusion(
        classes: Vec<String>,
        confusion: Vec<Vec<usize>>,
        folds: Vec<FoldRecord>,
        warnings: Vec<String>,
    ) -> Self {
        let total: usize = confusion.iter().map(|r| r.iter().sum::<usize>()).sum();
        let correct: usize = (0..classes.len()).map(|i| confusion[i][i]).sum();
        let accuracy = if total > 0 { correct as f64 / total as f64 } else { 0.0 };
        let f_measure = macro_f1(&confusion);
        Self { accuracy, f_measure, classes, confusion, folds, warnings }
    }
}

/// Macro-averaged F1 with 0/0 terms defined as 0.
pub fn macro_f1(confusion: &[Vec<usize>]) -> f64 {
    let k = confusion.len();
    if k == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let fp: f64 = (0..k).filter(|&r| r != c).map(|r| confusion[r][c] as f64).sum();
        let fnn: f64 = (0..k).filter(|&p| p != c).map(|p| confusion[c][p] as f64).sum();
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fnn > 0.0 { tp / (tp + fnn) } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        sum += f1;
    }
    sum / k as f64
}

/// A labelled feature set ready for evaluation; descriptors are extracted
/// once and shared across folds.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    pub ids: Vec<String>,
    pub subjects: Vec<String>,
    pub labels: Vec<usize>,
    pub features: Vec<Vec<f64>>,
    pub classes: Vec<String>,
}

impl FeatureSet {
    pub fn validate(&self) -> Result<()> {
        let n = self.ids.len();
        if self.subjects.len() != n || self.labels.len() != n || self.features.len() != n {
            return Err(MorfError::Feature("feature set columns disagree in length".into()));
        }
        if n == 0 {
            return Err(MorfError::Feature("feature set is empty".into()));
        }
        let dim = self.features[0].len();
        if self.features.iter().any(|f| f.len() != dim) {
            return Err(MorfError::Feature("feature vectors have mixed lengths".into()));
        }
        Ok(())
    }
}

/// LOSO over precomputed descriptors: per fold, grid-search strictly on the
/// training subjects (the kernel grid is materialized from training features
/// only), train, predict the held-out subject, and aggregate a single global
/// confusion matrix in fold order.
pub fn evaluate_loso_features(set: &FeatureSet, grid: &GridSpec) -> Result<Metrics> {
    set.validate()?;
    let mut subjects: Vec<&String> = set.subjects.iter().collect();
    subjects.sort();
    subjects.dedup();
    if subjects.len() < 2 {
        return Err(MorfError::Split(format!(
            "LOSO needs >= 2 subjects, got {}",
            subjects.len()
        )));
    }
    let subjects: Vec<String> = subjects.into_iter().cloned().collect();

    let fold_results: Vec<Result<FoldRecord>> = subjects
        .par_iter()
        .map(|subject| {
            let train_idx: Vec<usize> =
                (0..set.ids.len()).filter(|&i| &set.subjects[i] != subject).collect();
            let test_idx: Vec<usize> =
                (0..set.ids.len()).filter(|&i| &set.subjects[i] == subject).collect();
            // Fold data is partitioned here; the search and trainer never
            // see the held-out subject.
            let tf: Vec<Vec<f64>> = train_idx.iter().map(|&i| set.features[i].clone()).collect();
            let tl: Vec<usize> = train_idx.iter().map(|&i| set.labels[i]).collect();
            let ts: Vec<String> = train_idx.iter().map(|&i| set.subjects[i].clone()).collect();

            let dim = tf.first().map(|f| f.len()).unwrap_or(0);
            let kernel_grid = grid.materialize_scaled(dim, mean_squared_entry(&tf))?;
            let search = grid_search(&tf, &tl, &ts, &set.classes, &kernel_grid)?;
            let model = train_svm(&tf, &tl, &set.classes, &search.best)?;

            let mut true_labels = Vec::new();
            let mut predicted_labels = Vec::new();
            let mut test_ids = Vec::new();
            for &i in &test_idx {
                let (pred, _) = predict(&model, &set.features[i])?;
                test_ids.push(set.ids[i].clone());
                true_labels.push(set.classes[set.labels[i]].clone());
                predicted_labels.push(set.classes[pred].clone());
            }
            Ok(FoldRecord {
                subject: subject.clone(),
                params: search.best,
                inner_accuracy: search.best_inner_accuracy,
                used_stratified_fallback: search.used_stratified_fallback,
                test_ids,
                true_labels,
                predicted_labels,
                model_fingerprint: format!("{:016x}", model.fingerprint()),
            })
        })
        .collect();

    let mut folds = Vec::with_capacity(fold_results.len());
    let mut warnings = Vec::new();
    for r in fold_results {
        match r {
            Ok(f) => folds.push(f),
            Err(e) => warnings.push(format!("fold failed: {e}")),
        }
    }
    let k = set.classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    let class_of = |label: &str| -> usize {
        set.classes.iter().position(|c| c == label).expect("label in class list")
    };
    for fold in &folds {
        for (t, p) in fold.true_labels.iter().zip(&fold.predicted_labels) {
            confusion[class_of(t)][class_of(p)] += 1;
        }
    }
    Ok(Metrics::from_confusion(set.classes.clone(), confusion, folds, warnings))
}

/// Groups feature rows by manifest order into a FeatureSet.
pub fn feature_set_from_rows(
    ids: Vec<String>,
    subjects: Vec<String>,
    labels: Vec<String>,
    features: Vec<Vec<f64>>,
    classes: Vec<String>,
) -> Result<FeatureSet> {
    let mut label_idx = Vec::with_capacity(labels.len());
    let lookup: BTreeMap<&str, usize> =
        classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    for l in &labels {
        let idx = lookup.get(l.as_str()).ok_or_else(|| {
            MorfError::Feature(format!("label '{l}' missing from class list"))
        })?;
        label_idx.push(*idx);
    }
    let set = FeatureSet { ids, subjects, labels: label_idx, features, classes };
    set.validate()?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes2() -> Vec<String> {
        vec!["neg".into(), "pos".into()]
    }

    #[test]
    fn separable_blobs_train_perfectly() {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let t = i as f64 * 0.1;
            features.push(vec![2.0 + t, 2.0 - t]);
            labels.push(1usize);
            features.push(vec![-2.0 - t, -2.0 + t]);
            labels.push(0usize);
        }
        let params = KernelParams { gamma: 0.5, coef0: 1.0, c: 10.0 };
        let model = train_svm(&features, &labels, &classes2(), &params).unwrap();
        assert_eq!(accuracy_of(&model, &features, &labels).unwrap(), 1.0);
    }

    #[test]
    fn xor_is_separable_with_degree_three() {
        // Oracle: the 4-point kernel interpolation system is solvable, so a
        // perfect fit exists; verify by explicit Gaussian elimination of
        // [K 1; y] with sum-to-zero coefficients, then check SMO finds it.
        let features = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let labels = vec![0usize, 0, 1, 1];
        let params = KernelParams { gamma: 1.0, coef0: 1.0, c: 1e6 };

        // 5x5 system: sum_j c_j K(x_i, x_j) + b = y_i, sum_j c_j = 0.
        let y = [-1.0, -1.0, 1.0, 1.0];
        let mut aug = vec![vec![0.0f64; 6]; 5];
        for i in 0..4 {
            for j in 0..4 {
                aug[i][j] = params.kernel(&features[i], &features[j]);
            }
            aug[i][4] = 1.0;
            aug[i][5] = y[i];
        }
        for j in 0..4 {
            aug[4][j] = 1.0;
        }
        // Gaussian elimination with partial pivoting.
        for col in 0..5 {
            let piv = (col..5)
                .max_by(|&a, &b| aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, piv);
            assert!(aug[col][col].abs() > 1e-12, "kernel system singular");
            for row in 0..5 {
                if row != col {
                    let f = aug[row][col] / aug[col][col];
                    for k in col..6 {
                        aug[row][k] -= f * aug[col][k];
                    }
                }
            }
        }
        let solution: Vec<f64> = (0..5).map(|i| aug[i][5] / aug[i][i]).collect();
        // Interpolant reproduces the labels exactly: data is separable.
        for i in 0..4 {
            let mut d = solution[4];
            for j in 0..4 {
                d += solution[j] * params.kernel(&features[i], &features[j]);
            }
            assert!((d - y[i]).abs() < 1e-9);
        }

        let model = train_svm(&features, &labels, &classes2(), &params).unwrap();
        assert_eq!(accuracy_of(&model, &features, &labels).unwrap(), 1.0);
    }

    #[test]
    fn contradictory_duplicates_stay_finite() {
        let features = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![-1.0, 0.0]];
        let labels = vec![1usize, 0, 0];
        let params = KernelParams { gamma: 1.0, coef0: 0.0, c: 1.0 };
        let model = train_svm(&features, &labels, &classes2(), &params).unwrap();
        for m in &model.machines {
            assert!(m.bias.is_finite());
            assert!(m.coefficients.iter().all(|c| c.is_finite()));
        }
        // Hinge loss must be positive: the duplicate pair cannot both be fit.
        let (p0, _) = predict(&model, &features[0]).unwrap();
        let (p1, _) = predict(&model, &features[1]).unwrap();
        assert_eq!(p0, p1);
    }

    #[test]
    fn single_class_training_fails() {
        let features = vec![vec![0.0], vec![1.0]];
        let labels = vec![1usize, 1];
        let params = KernelParams { gamma: 1.0, coef0: 0.0, c: 1.0 };
        assert!(matches!(
            train_svm(&features, &labels, &classes2(), &params),
            Err(MorfError::Training(_))
        ));
    }

    #[test]
    fn mixed_feature_lengths_fail() {
        let features = vec![vec![0.0, 1.0], vec![1.0]];
        let labels = vec![0usize, 1];
        let params = KernelParams { gamma: 1.0, coef0: 0.0, c: 1.0 };
        assert!(matches!(
            train_svm(&features, &labels, &classes2(), &params),
            Err(MorfError::Feature(_))
        ));
    }

    #[test]
    fn predict_scores_in_class_order_and_tie_break() {
        let features = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let labels = vec![1usize, 0];
        let params = KernelParams { gamma: 1.0, coef0: 0.0, c: 10.0 };
        let model = train_svm(&features, &labels, &classes2(), &params).unwrap();
        let (_, scores) = predict(&model, &[1.0, 0.0]).unwrap();
        assert_eq!(scores.len(), 2);
        // Symmetric problem: the origin is equidistant; tie goes to class 0.
        let (label, scores0) = predict(&model, &[0.0, 0.0]).unwrap();
        if (scores0[0] - scores0[1]).abs() < 1e-12 {
            assert_eq!(label, 0);
        }
        assert!(predict(&model, &[0.0]).is_err());
    }

    #[test]
    fn grid_of_one_returns_that_point() {
        let features = vec![
            vec![2.0, 0.0],
            vec![2.1, 0.1],
            vec![-2.0, 0.0],
            vec![-2.2, -0.1],
        ];
        let labels = vec![1usize, 1, 0, 0];
        let subjects = vec!["a".into(), "b".into(), "a".into(), "b".into()];
        let grid = vec![KernelParams { gamma: 0.5, coef0: 1.0, c: 10.0 }];
        let res = grid_search(&features, &labels, &subjects, &classes2(), &grid).unwrap();
        assert_eq!(res.best, grid[0]);
        assert!(!res.used_stratified_fallback);
    }

    #[test]
    fn grid_search_prefers_winning_point_and_breaks_ties_in_order() {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut subjects = Vec::new();
        for s in 0..4 {
            for k in 0..3 {
                let off = 0.05 * k as f64 + 0.01 * s as f64;
                features.push(vec![1.0 + off, 0.5]);
                labels.push(1usize);
                subjects.push(format!("s{s}"));
                features.push(vec![-1.0 - off, -0.5]);
                labels.push(0usize);
                subjects.push(format!("s{s}"));
            }
        }
        let grid = vec![
            KernelParams { gamma: 0.5, coef0: 0.0, c: 1.0 },
            KernelParams { gamma: 0.5, coef0: 1.0, c: 1.0 },
        ];
        let res = grid_search(&features, &labels, &subjects, &classes2(), &grid).unwrap();
        // Separable either way: both score 1.0, so the first grid point wins.
        assert_eq!(res.best, grid[0]);
        assert_eq!(res.best_inner_accuracy, 1.0);
    }

    #[test]
    fn grid_spec_materializes_sorted() {
        let spec = GridSpec::default();
        let grid = spec.materialize_scaled(100, 4.0).unwrap();
        assert_eq!(grid.len(), 32);
        for w in grid.windows(2) {
            assert!(
                (w[0].c, w[0].gamma, w[0].coef0) <= (w[1].c, w[1].gamma, w[1].coef0),
                "grid not sorted"
            );
        }
        // scaled gammas: 1/(100*4) and 10/(100*4) alongside 1/100 and 10/100
        assert!((grid[0].gamma - 0.0025).abs() < 1e-12);
    }

    #[test]
    fn macro_f1_perfect_and_degenerate() {
        let perfect = vec![vec![5, 0], vec![0, 5]];
        assert!((macro_f1(&perfect) - 1.0).abs() < 1e-12);
        let all_wrong = vec![vec![0, 5], vec![5, 0]];
        assert_eq!(macro_f1(&all_wrong), 0.0);
    }

    #[test]
    fn loso_features_no_leakage_partition() {
        // 3 subjects, separable data: test-subject rows never reach training.
        let mut ids = Vec::new();
        let mut subjects = Vec::new();
        let mut labels = Vec::new();
        let mut features = Vec::new();
        for s in 0..3 {
            for r in 0..4 {
                let cls = r % 2;
                ids.push(format!("s{s}r{r}"));
                subjects.push(format!("s{s}"));
                labels.push(if cls == 0 { "neg".to_string() } else { "pos".to_string() });
                let sign = if cls == 0 { -1.0 } else { 1.0 };
                features.push(vec![sign * (1.0 + 0.1 * r as f64), 0.3 * s as f64]);
            }
        }
        let set = feature_set_from_rows(ids, subjects, labels, features, classes2()).unwrap();
        let grid = GridSpec {
            cs: vec![10.0],
            gammas: vec![0.5],
            gammas_over_dim: vec![],
            gammas_scaled: vec![],
            coef0s: vec![1.0],
        };
        let metrics = evaluate_loso_features(&set, &grid).unwrap();
        assert_eq!(metrics.folds.len(), 3);
        assert!((metrics.accuracy - 1.0).abs() < 1e-12);
        assert!((metrics.f_measure - 1.0).abs() < 1e-12);
        let total: usize = metrics.confusion.iter().flatten().sum();
        assert_eq!(total, 12);
    }

    #[test]
    fn random_predictor_sits_at_chance_level() {
        // Label-free features force the model to guess; accuracy over k
        // balanced classes must land near 1/k (3-sigma band).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let k = 4usize;
        let n = 400usize;
        let classes: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
        let mut confusion = vec![vec![0usize; k]; k];
        for _ in 0..n {
            let truth = rng.gen_range(0..k);
            let pred = rng.gen_range(0..k);
            confusion[truth][pred] += 1;
        }
        let m = Metrics::from_confusion(classes, confusion, vec![], vec![]);
        let p = 1.0 / k as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((m.accuracy - p).abs() < 3.0 * sigma, "accuracy {} vs chance {}", m.accuracy, p);
    }
}
