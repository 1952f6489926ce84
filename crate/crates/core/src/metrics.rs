//! Evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RgmError};
use crate::model::{Mask, Matrix};

/// Area under the ROC curve as the Mann-Whitney probability
/// `P(s+ > s-) + P(s+ = s-)/2`, computed from mid-ranks.
pub fn roc_auc(scores: &[f64], truth: &[bool]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(RgmError::InvalidParameter(format!(
            "{} scores for {} labels",
            scores.len(),
            truth.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(RgmError::InvalidParameter("NaN score".into()));
    }
    let pos = truth.iter().filter(|&&t| t).count();
    let neg = truth.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(RgmError::InvalidParameter(
            "AUC needs both positive and negative labels".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += order[i..=j].iter().filter(|&&o| truth[o]).count() as f64 * mid;
        i = j + 1;
    }
    let (pos, neg) = (pos as f64, neg as f64);
    Ok((rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub tpr: f64,
    /// `FP / (TP + FP)`, zero when nothing is called.
    pub fdr: f64,
    /// Zero when any margin of the confusion table is empty.
    pub mcc: f64,
}

pub fn classification_metrics(pred: &[bool], truth: &[bool]) -> Result<Classification> {
    if pred.len() != truth.len() {
        return Err(RgmError::InvalidParameter(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    let (mut tp, mut fp, mut tn, mut fneg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1.0,
            (true, false) => fp += 1.0,
            (false, false) => tn += 1.0,
            (false, true) => fneg += 1.0,
        }
    }
    let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
    let den = ((tp + fp) * (tp + fneg) * (tn + fp) * (tn + fneg)).sqrt();
    Ok(Classification {
        tpr: ratio(tp, tp + fneg),
        fdr: ratio(fp, tp + fp),
        mcc: ratio(tp * tn - fp * fneg, den),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub mean_sq: f64,
}

/// Deviations over the off-diagonal entries.
pub fn deviation_metrics(estimate: &Matrix, truth: &Matrix) -> Result<Deviation> {
    if estimate.shape() != truth.shape() || !estimate.is_square() {
        return Err(RgmError::dimension("estimate", truth.shape(), estimate.shape()));
    }
    let p = truth.nrows();
    if p < 2 {
        return Err(RgmError::InvalidParameter("deviation needs at least two traits".into()));
    }
    let diffs: Vec<f64> = off_diagonal(estimate)
        .iter()
        .zip(off_diagonal(truth))
        .map(|(e, t)| (e - t).abs())
        .collect();
    let m = diffs.len() as f64;
    Ok(Deviation {
        max_abs: diffs.iter().copied().fold(0.0, f64::max),
        mean_abs: diffs.iter().sum::<f64>() / m,
        mean_sq: diffs.iter().map(|d| d * d).sum::<f64>() / m,
    })
}

/// Off-diagonal entries in row-major order.
pub fn off_diagonal<T: Copy + nalgebra::Scalar>(m: &nalgebra::DMatrix<T>) -> Vec<T> {
    let (r, c) = m.shape();
    (0..r)
        .flat_map(|i| (0..c).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|ix| m[ix])
        .collect()
}

/// Strict upper triangle in row-major order.
pub fn upper_triangle<T: Copy + nalgebra::Scalar>(m: &nalgebra::DMatrix<T>) -> Vec<T> {
    let (r, c) = m.shape();
    (0..r)
        .flat_map(|i| (i + 1..c).map(move |j| (i, j)))
        .map(|ix| m[ix])
        .collect()
}

pub fn all_entries<T: Copy + nalgebra::Scalar>(m: &nalgebra::DMatrix<T>) -> Vec<T> {
    let (r, c) = m.shape();
    (0..r)
        .flat_map(|i| (0..c).map(move |j| (i, j)))
        .map(|ix| m[ix])
        .collect()
}

/// Structure-recovery metrics for one target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `None` when the truth has a single class.
    pub auc: Option<f64>,
    pub tpr: f64,
    pub fdr: f64,
    pub mcc: f64,
}

/// Score and call metrics from matching entry lists.
pub fn structure_report(scores: &[f64], calls: &[bool], truth: &[bool]) -> Result<StructureReport> {
    let c = classification_metrics(calls, truth)?;
    let single_class = truth.iter().all(|&t| t) || truth.iter().all(|&t| !t);
    let auc = if single_class {
        None
    } else {
        Some(roc_auc(scores, truth)?)
    };
    Ok(StructureReport {
        auc,
        tpr: c.tpr,
        fdr: c.fdr,
        mcc: c.mcc,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub graph: StructureReport,
    pub effects: Deviation,
    pub confounding: Option<StructureReport>,
    pub instrument_selection: Option<StructureReport>,
}

/// Graph target: off-diagonal entries of a `p x p` score/call/truth triple.
pub fn graph_report(scores: &Matrix, calls: &Mask, truth: &Mask) -> Result<StructureReport> {
    structure_report(&off_diagonal(scores), &off_diagonal(calls), &off_diagonal(truth))
}

/// Confounding target: strict upper triangle.
pub fn confounding_report(scores: &Matrix, calls: &Mask, truth: &Mask) -> Result<StructureReport> {
    structure_report(&upper_triangle(scores), &upper_triangle(calls), &upper_triangle(truth))
}

/// Instrument target: every entry of the `p x k` map.
pub fn instrument_report(scores: &Matrix, calls: &Mask, truth: &Mask) -> Result<StructureReport> {
    structure_report(&all_entries(scores), &all_entries(calls), &all_entries(truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn auc_examples() {
        assert_eq!(
            roc_auc(&[1.0, 0.0, 1.0, 0.0], &[true, false, true, false]).unwrap(),
            1.0
        );
        assert_eq!(roc_auc(&[0.3; 4], &[true, false, true, false]).unwrap(), 0.5);
        assert_eq!(roc_auc(&[0.9, 0.4, 0.6], &[true, false, true]).unwrap(), 1.0);
        assert!(roc_auc(&[0.1, 0.2], &[true, true]).is_err());
    }

    /// Direct pair count.
    fn brute_auc(scores: &[f64], truth: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &ti) in truth.iter().enumerate() {
            for (j, &tj) in truth.iter().enumerate() {
                if ti && !tj {
                    den += 1.0;
                    num += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        num / den
    }

    #[test]
    fn classification_examples() {
        let truth = [true, false, true, false];
        let c = classification_metrics(&truth, &truth).unwrap();
        assert_eq!((c.tpr, c.fdr, c.mcc), (1.0, 0.0, 1.0));
        let c = classification_metrics(&[false; 4], &truth).unwrap();
        assert_eq!((c.tpr, c.fdr, c.mcc), (0.0, 0.0, 0.0));
        let c = classification_metrics(&[true, true, false, false], &truth).unwrap();
        assert_eq!((c.tpr, c.fdr, c.mcc), (0.5, 0.5, 0.0));
    }

    #[test]
    fn deviation_examples() {
        let t = Matrix::from_row_slice(2, 2, &[0.0, 0.2, -0.1, 0.0]);
        let d = deviation_metrics(&t, &t).unwrap();
        assert_eq!((d.max_abs, d.mean_abs, d.mean_sq), (0.0, 0.0, 0.0));
        let mut e = t.clone();
        e[(0, 1)] += 0.1;
        e[(0, 0)] = 5.0;
        let d = deviation_metrics(&e, &t).unwrap();
        assert!((d.max_abs - 0.1).abs() < 1e-12);
        assert!((d.mean_abs - 0.05).abs() < 1e-12);
        assert!((d.mean_sq - 0.005).abs() < 1e-12);
    }

    #[test]
    fn single_class_target_has_no_auc() {
        let r = structure_report(&[0.1, 0.2], &[false, true], &[false, false]).unwrap();
        assert!(r.auc.is_none());
        assert_eq!(r.fdr, 1.0);
    }

    fn labelled() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..40)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(prop_oneof![(-5i32..5).prop_map(f64::from), -5.0f64..5.0], n),
                    proptest::collection::vec(any::<bool>(), n),
                )
            })
            .prop_filter("two classes", |(_, t)| t.iter().any(|&b| b) && t.iter().any(|&b| !b))
    }

    proptest! {
        #[test]
        fn auc_matches_pair_count((s, t) in labelled()) {
            prop_assert!((roc_auc(&s, &t).unwrap() - brute_auc(&s, &t)).abs() < 1e-12);
        }

        #[test]
        fn auc_invariant_to_monotone_transform((s, t) in labelled()) {
            let f: Vec<f64> = s.iter().map(|v| (v / 3.0).exp() * 2.0 + 1.0).collect();
            prop_assert!((roc_auc(&s, &t).unwrap() - roc_auc(&f, &t).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn auc_of_negated_scores_is_complement(
            t in proptest::collection::vec(any::<bool>(), 2..30)
                .prop_filter("two classes", |t| t.iter().any(|&b| b) && t.iter().any(|&b| !b)),
        ) {
            // distinct scores, so no ties
            let s: Vec<f64> = (0..t.len()).map(|i| ((i * 7919) % 101) as f64 + i as f64 * 1e-3).collect();
            let neg: Vec<f64> = s.iter().map(|v| -v).collect();
            prop_assert!((roc_auc(&s, &t).unwrap() + roc_auc(&neg, &t).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn metric_ranges_and_label_swap(
            pairs in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..40),
        ) {
            let pred: Vec<bool> = pairs.iter().map(|p| p.0).collect();
            let truth: Vec<bool> = pairs.iter().map(|p| p.1).collect();
            let c = classification_metrics(&pred, &truth).unwrap();
            prop_assert!((0.0..=1.0).contains(&c.tpr) && (0.0..=1.0).contains(&c.fdr));
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&c.mcc));
            // With labels flipped, TPR becomes the specificity TN / (TN + FP).
            let fp: Vec<bool> = pred.iter().map(|b| !b).collect();
            let ft: Vec<bool> = truth.iter().map(|b| !b).collect();
            let swapped = classification_metrics(&fp, &ft).unwrap();
            let tn = pairs.iter().filter(|p| !p.0 && !p.1).count() as f64;
            let fpos = pairs.iter().filter(|p| p.0 && !p.1).count() as f64;
            let spec = if tn + fpos == 0.0 { 0.0 } else { tn / (tn + fpos) };
            prop_assert!((swapped.tpr - spec).abs() < 1e-12);
            prop_assert!((swapped.mcc - c.mcc).abs() < 1e-12);
        }
    }
}
