//! Threshold classification of anomaly scores.
//!
//! Label 1 (attack) is the positive class. A row is predicted anomalous
//! when its score is strictly greater than the threshold.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.tn + self.fp
    }
}

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch { what: "scores vs labels", expected: labels.len(), actual: scores.len() });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::InvalidParameter(format!("label {bad} is not 0 or 1")));
    }
    Ok(())
}

fn check_both_classes(labels: &[u8]) -> Result<()> {
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

pub fn confusion_at_threshold(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ConfusionCounts> {
    check_inputs(scores, labels)?;
    let mut c = ConfusionCounts::default();
    for (&s, &l) in scores.iter().zip(labels) {
        match (s > threshold, l == 1) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub fpr: f64,
    pub specificity: f64,
    pub g_mean: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy, precision, recall, F-score, FPR, specificity and
/// `g_mean = sqrt(recall * specificity)`. Every ratio with a zero
/// denominator is reported as 0.
pub fn point_metrics(c: &ConfusionCounts) -> PointMetrics {
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f_score = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    let specificity = ratio(c.tn, c.tn + c.fp);
    PointMetrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f_score,
        fpr: ratio(c.fp, c.fp + c.tn),
        specificity,
        g_mean: libm::sqrt(recall * specificity),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
    /// True and false positives at this threshold.
    pub tp: u64,
    pub fp: u64,
}

/// ROC points in ascending threshold order (so rates are non-increasing),
/// from an all-positive sentinel to an all-negative sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
    pub positives: u64,
    pub negatives: u64,
}

impl RocCurve {
    pub fn counts_at(&self, point: &RocPoint) -> ConfusionCounts {
        ConfusionCounts { tp: point.tp, fp: point.fp, fn_: self.positives - point.tp, tn: self.negatives - point.fp }
    }
}

fn sorted_by_score(scores: &[f64]) -> Result<Vec<usize>> {
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("scores contain NaN".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    Ok(order)
}

/// Exact ROC over every distinct observed score, AUC by the trapezoid rule.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    check_inputs(scores, labels)?;
    check_both_classes(labels)?;
    let order = sorted_by_score(scores)?;
    let positives = labels.iter().filter(|&&l| l == 1).count() as u64;
    let negatives = labels.len() as u64 - positives;
    let rate = |tp: u64, fp: u64| (fp as f64 / negatives as f64, tp as f64 / positives as f64);

    let lo = scores[order[0]];
    let hi = scores[*order.last().unwrap()];
    let mut points = Vec::new();
    let (f, t) = rate(positives, negatives);
    points.push(RocPoint { threshold: lo - (1.0 + lo.abs()), fpr: f, tpr: t, tp: positives, fp: negatives });

    // Rows with score <= threshold are predicted benign.
    let (mut tp, mut fp) = (positives, negatives);
    let mut k = 0;
    while k < order.len() {
        let value = scores[order[k]];
        while k < order.len() && scores[order[k]] == value {
            if labels[order[k]] == 1 {
                tp -= 1;
            } else {
                fp -= 1;
            }
            k += 1;
        }
        let (f, t) = rate(tp, fp);
        points.push(RocPoint { threshold: value, fpr: f, tpr: t, tp, fp });
    }
    points.push(RocPoint { threshold: hi + 1.0 + hi.abs(), fpr: 0.0, tpr: 0.0, tp: 0, fp: 0 });

    let auc = points
        .windows(2)
        .map(|w| (w[0].fpr - w[1].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(RocCurve { points, auc, positives, negatives })
}

/// Mann-Whitney estimate of `P(score_pos > score_neg)` with ties counted as
/// one half, computed from mid-ranks.
pub fn auc_rank_oracle(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_inputs(scores, labels)?;
    check_both_classes(labels)?;
    let order = sorted_by_score(scores)?;
    let mut rank_sum_pos = 0.0;
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end < order.len() && scores[order[end]] == scores[order[k]] {
            end += 1;
        }
        // 1-based ranks k+1..=end share their mean.
        let mid = (k + 1 + end) as f64 / 2.0;
        let pos_in_block = order[k..end].iter().filter(|&&i| labels[i] == 1).count();
        rank_sum_pos += mid * pos_in_block as f64;
        k = end;
    }
    let p = labels.iter().filter(|&&l| l == 1).count() as f64;
    let n = labels.len() as f64 - p;
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

/// Curve threshold maximizing the G-mean; ties go to the lower FPR, then
/// the lower threshold.
pub fn best_threshold_gmean(curve: &RocCurve, scores: &[f64], labels: &[u8]) -> Result<(f64, f64)> {
    check_inputs(scores, labels)?;
    let positives = labels.iter().filter(|&&l| l == 1).count() as u64;
    if positives != curve.positives || labels.len() as u64 - positives != curve.negatives {
        return Err(Error::InvalidParameter("ROC curve was built from different labels".into()));
    }
    let mut best: Option<(f64, f64, f64)> = None; // (g, fpr, threshold)
    for p in &curve.points {
        let g = point_metrics(&curve.counts_at(p)).g_mean;
        let better = match best {
            None => true,
            Some((bg, bf, bt)) => g > bg || (g == bg && (p.fpr < bf || (p.fpr == bf && p.threshold < bt))),
        };
        if better {
            best = Some((g, p.fpr, p.threshold));
        }
    }
    let (g, _, t) = best.ok_or(Error::EmptyInput("ROC curve without points"))?;
    Ok((t, g))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassRow {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Per-class precision/recall/F1 table with macro and support-weighted
/// averages. `classes[0]` is benign, `classes[1]` is attack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationReport {
    pub classes: [ClassRow; 2],
    pub accuracy: f64,
    pub macro_avg: ClassRow,
    pub weighted_avg: ClassRow,
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn classification_report(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ClassificationReport> {
    let c = confusion_at_threshold(scores, labels, threshold)?;
    check_both_classes(labels)?;
    Ok(report_from_counts(&c))
}

pub fn report_from_counts(c: &ConfusionCounts) -> ClassificationReport {
    let benign_p = ratio(c.tn, c.tn + c.fn_);
    let benign_r = ratio(c.tn, c.tn + c.fp);
    let attack_p = ratio(c.tp, c.tp + c.fp);
    let attack_r = ratio(c.tp, c.tp + c.fn_);
    let classes = [
        ClassRow { precision: benign_p, recall: benign_r, f1: f1(benign_p, benign_r), support: c.negatives() },
        ClassRow { precision: attack_p, recall: attack_r, f1: f1(attack_p, attack_r), support: c.positives() },
    ];
    let total = c.total();
    let avg = |w: [f64; 2]| {
        let s = w[0] + w[1];
        let mix = |a: f64, b: f64| if s == 0.0 { 0.0 } else { (w[0] * a + w[1] * b) / s };
        ClassRow {
            precision: mix(classes[0].precision, classes[1].precision),
            recall: mix(classes[0].recall, classes[1].recall),
            f1: mix(classes[0].f1, classes[1].f1),
            support: total,
        }
    };
    ClassificationReport {
        classes,
        accuracy: ratio(c.tp + c.tn, total),
        macro_avg: avg([1.0, 1.0]),
        weighted_avg: avg([classes[0].support as f64, classes[1].support as f64]),
    }
}

impl ClassificationReport {
    /// Plain-text table in the familiar precision/recall/f1-score/support layout.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let total = self.macro_avg.support;
        let _ = writeln!(out, "{:>14} {:>9} {:>9} {:>9} {:>9}", "", "precision", "recall", "f1-score", "support");
        let _ = writeln!(out);
        for (name, row) in ["0.0", "1.0"].iter().zip(&self.classes) {
            let _ = writeln!(
                out,
                "{:>14} {:>9.2} {:>9.2} {:>9.2} {:>9}",
                name, row.precision, row.recall, row.f1, row.support
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:>14} {:>9} {:>9} {:>9.2} {:>9}", "accuracy", "", "", self.accuracy, total);
        for (name, row) in [("macro avg", &self.macro_avg), ("weighted avg", &self.weighted_avg)] {
            let _ = writeln!(
                out,
                "{:>14} {:>9.2} {:>9.2} {:>9.2} {:>9}",
                name, row.precision, row.recall, row.f1, row.support
            );
        }
        out
    }
}

/// Everything reported for one model at its chosen operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub threshold: f64,
    pub counts: ConfusionCounts,
    pub metrics: PointMetrics,
    pub auc: f64,
    pub classification: ClassificationReport,
}

/// ROC, AUC, G-mean optimal threshold and the report at that threshold.
pub fn evaluate(scores: &[f64], labels: &[u8]) -> Result<(RocCurve, EvalReport)> {
    let curve = roc_curve(scores, labels)?;
    let (threshold, _) = best_threshold_gmean(&curve, scores, labels)?;
    let counts = confusion_at_threshold(scores, labels, threshold)?;
    let report = EvalReport {
        threshold,
        counts,
        metrics: point_metrics(&counts),
        auc: curve.auc,
        classification: report_from_counts(&counts),
    };
    Ok((curve, report))
}
