//! Evaluation machinery shared by every classifier in the pipeline:
//! stratified repeated cross-validation, threshold selection, binary
//! metrics, and a paired significance test over fold scores.
//!
//! All model families (tree ensemble, graph network, logistic baseline)
//! are scored through the same [`run_cv`] loop so their reports are
//! directly comparable fold by fold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GfError, Result};
use crate::rng;

/// F1, area under the ROC curve, and accuracy for one evaluation split.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub f1: f64,
    pub auc: f64,
    pub acc: f64,
}

/// Cross-validation shape. `threshold_on_test = true` deliberately leaks
/// the test labels into threshold selection; it exists so audits can
/// demonstrate what leakage looks like and must stay off in real runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub threshold_on_test: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 10,
            threshold_on_test: false,
        }
    }
}

/// Scores produced by one model for one train/test split, aligned with
/// the index slices passed to the evaluation closure.
#[derive(Debug, Clone)]
pub struct SplitScores {
    pub train_scores: Vec<f64>,
    pub test_scores: Vec<f64>,
}

/// Fold-by-fold results plus the mean±std aggregation over repeats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: usize,
    pub repeats: usize,
    /// Flattened as `repeat * folds + fold`.
    pub fold_metrics: Vec<MetricSet>,
    pub repeat_means: Vec<MetricSet>,
    pub f1_mean: f64,
    pub f1_std: f64,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub acc_mean: f64,
    pub acc_std: f64,
}

impl CvReport {
    pub fn from_fold_metrics(folds: usize, repeats: usize, fold_metrics: Vec<MetricSet>) -> Self {
        assert_eq!(fold_metrics.len(), folds * repeats);
        let repeat_means: Vec<MetricSet> = (0..repeats)
            .map(|r| {
                let chunk = &fold_metrics[r * folds..(r + 1) * folds];
                MetricSet {
                    f1: mean(chunk.iter().map(|m| m.f1)),
                    auc: mean(chunk.iter().map(|m| m.auc)),
                    acc: mean(chunk.iter().map(|m| m.acc)),
                }
            })
            .collect();
        let (f1_mean, f1_std) = mean_std(repeat_means.iter().map(|m| m.f1));
        let (auc_mean, auc_std) = mean_std(repeat_means.iter().map(|m| m.auc));
        let (acc_mean, acc_std) = mean_std(repeat_means.iter().map(|m| m.acc));
        CvReport {
            folds,
            repeats,
            fold_metrics,
            repeat_means,
            f1_mean,
            f1_std,
            auc_mean,
            auc_std,
            acc_mean,
            acc_std,
        }
    }

    /// Per-fold F1 flattened in (repeat, fold) order, for paired tests.
    pub fn fold_f1(&self) -> Vec<f64> {
        self.fold_metrics.iter().map(|m| m.f1).collect()
    }
}

/// Assign each sample to a fold, stratified by class: each class is
/// shuffled separately and dealt round-robin, so per-fold class counts
/// differ by at most one.
pub fn stratified_fold_assignment(
    labels: &[bool],
    folds: usize,
    rng: &mut impl rand::Rng,
) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(GfError::InvalidArgument("need at least 2 folds".into()));
    }
    let n_pos = labels.iter().filter(|l| **l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos < folds || n_neg < folds {
        return Err(GfError::InsufficientSamples(format!(
            "{n_pos} positive / {n_neg} negative samples for {folds} folds"
        )));
    }
    let mut assignment = vec![0usize; labels.len()];
    for class in [true, false] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        shuffle(&mut members, rng);
        for (pos, idx) in members.into_iter().enumerate() {
            assignment[idx] = pos % folds;
        }
    }
    Ok(assignment)
}

/// Fisher-Yates with our own loop so the byte layout of the generator
/// stream is pinned by this crate, not by a dependency's internals.
pub fn shuffle(items: &mut [usize], rng: &mut impl rand::Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean and sample standard deviation (0 when fewer than 2 values).
pub fn mean_std(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

/// Precision, recall, F1 of thresholded predictions. Empty denominators
/// yield 0, so a fold with no predicted or true positives scores 0.
pub fn precision_recall_f1(preds: &[bool], labels: &[bool]) -> (f64, f64, f64) {
    assert_eq!(preds.len(), labels.len());
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&p, &l) in preds.iter().zip(labels) {
        match (p, l) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    (precision, recall, f1)
}

pub fn f1_score(preds: &[bool], labels: &[bool]) -> f64 {
    precision_recall_f1(preds, labels).2
}

pub fn accuracy(preds: &[bool], labels: &[bool]) -> f64 {
    assert_eq!(preds.len(), labels.len());
    if preds.is_empty() {
        return 0.0;
    }
    let hit = preds.iter().zip(labels).filter(|(p, l)| p == l).count();
    hit as f64 / preds.len() as f64
}

/// Area under the ROC curve by the rank statistic, with midranks for
/// tied scores. 0.5 for single-class inputs.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> f64 {
    assert_eq!(scores.len(), labels.len());
    let n_pos = labels.iter().filter(|l| **l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks are 1-based; ties share the midrank of their block.
        let midrank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if labels[idx] {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos as f64 * n_neg as f64)
}

/// Threshold maximizing F1 when predicting positive at score >= t.
///
/// Every achievable prediction set is "the top i distinct scores", so
/// the candidates are the midpoints between adjacent distinct scores
/// (plus the minimum score for the all-positive set); midpoints
/// generalize better to unseen scores than the training scores
/// themselves. Ties prefer the larger threshold. Returns (threshold, f1
/// at threshold).
pub fn best_f1_threshold(scores: &[f64], labels: &[bool]) -> (f64, f64) {
    assert_eq!(scores.len(), labels.len());
    if scores.is_empty() {
        return (0.5, 0.0);
    }
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(|a, b| b.partial_cmp(a).unwrap());
    distinct.dedup();
    let candidates: Vec<f64> = distinct
        .windows(2)
        .map(|w| 0.5 * (w[0] + w[1]))
        .chain(std::iter::once(*distinct.last().unwrap()))
        .collect();
    let mut best = (candidates[0], -1.0f64);
    for &t in &candidates {
        let preds: Vec<bool> = scores.iter().map(|&s| s >= t).collect();
        let f1 = f1_score(&preds, labels);
        if f1 > best.1 {
            best = (t, f1);
        }
    }
    (best.0, best.1.max(0.0))
}

/// Two-sided paired t-test over aligned fold scores.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairedTest {
    pub mean_diff: f64,
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTest> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(GfError::InvalidArgument(
            "paired test needs two aligned series of length >= 2".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let (mean_diff, sd) = mean_std(diffs.iter().copied());
    let n = diffs.len();
    let df = n - 1;
    if sd == 0.0 {
        // Identical differences everywhere: either no effect at all or a
        // perfectly consistent one.
        let p_value = if mean_diff == 0.0 { 1.0 } else { 0.0 };
        return Ok(PairedTest {
            mean_diff,
            t_statistic: if mean_diff == 0.0 { 0.0 } else { f64::INFINITY },
            degrees_of_freedom: df,
            p_value,
        });
    }
    let t = mean_diff / (sd / (n as f64).sqrt());
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let dist = StudentsT::new(0.0, 1.0, df as f64)
        .map_err(|e| GfError::InvalidArgument(format!("t-distribution: {e}")))?;
    let p_value = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(PairedTest {
        mean_diff,
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: p_value.clamp(0.0, 1.0),
    })
}

/// Repeated stratified cross-validation.
///
/// For every (repeat, fold) pair the closure trains a model on the train
/// indices and returns scores for both splits; the decision threshold is
/// fit on train scores only (unless the leak flag is set) and the test
/// split is scored at that threshold. Pairs run in parallel and are
/// collected in index order, so reports are identical at any worker
/// count.
pub fn run_cv<F>(labels: &[bool], cfg: &CvConfig, seed: u64, eval: F) -> Result<CvReport>
where
    F: Fn(&[usize], &[usize], u64) -> Result<SplitScores> + Sync,
{
    let assignments: Vec<Vec<usize>> = (0..cfg.repeats)
        .map(|r| {
            let mut rng = rng::substream_indexed(seed, "cv-shuffle", r as u64);
            stratified_fold_assignment(labels, cfg.folds, &mut rng)
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..cfg.repeats)
        .flat_map(|r| (0..cfg.folds).map(move |f| (r, f)))
        .collect();

    let fold_metrics: Vec<MetricSet> = jobs
        .par_iter()
        .map(|&(repeat, fold)| -> Result<MetricSet> {
            let assignment = &assignments[repeat];
            let train_idx: Vec<usize> =
                (0..labels.len()).filter(|&i| assignment[i] != fold).collect();
            let test_idx: Vec<usize> =
                (0..labels.len()).filter(|&i| assignment[i] == fold).collect();
            let split_seed =
                rng::derive_seed_indexed(seed, "cv-fold", (repeat * cfg.folds + fold) as u64);
            let scores = eval(&train_idx, &test_idx, split_seed)?;
            assert_eq!(scores.train_scores.len(), train_idx.len());
            assert_eq!(scores.test_scores.len(), test_idx.len());

            let train_labels: Vec<bool> = train_idx.iter().map(|&i| labels[i]).collect();
            let test_labels: Vec<bool> = test_idx.iter().map(|&i| labels[i]).collect();
            let (threshold, _) = if cfg.threshold_on_test {
                best_f1_threshold(&scores.test_scores, &test_labels)
            } else {
                best_f1_threshold(&scores.train_scores, &train_labels)
            };
            let preds: Vec<bool> = scores.test_scores.iter().map(|&s| s >= threshold).collect();
            Ok(MetricSet {
                f1: f1_score(&preds, &test_labels),
                auc: roc_auc(&scores.test_scores, &test_labels),
                acc: accuracy(&preds, &test_labels),
            })
        })
        .collect::<Result<_>>()?;

    Ok(CvReport::from_fold_metrics(cfg.folds, cfg.repeats, fold_metrics))
}
