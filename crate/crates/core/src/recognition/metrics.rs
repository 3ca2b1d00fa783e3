use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("prediction and truth key sets differ (e.g. `{0}`)")]
    KeyMismatch(String),
    #[error("label `{label}` for `{id}` is not in the taxonomy")]
    UnknownLabel { id: String, label: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelMetrics {
    pub label: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Truth occurrences (`tp + fn`).
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Neither predicted nor present: metrics are 1 by convention and the
    /// label is left out of the macro average.
    pub empty_support: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub labels: Vec<LabelMetrics>,
    pub macro_avg: Averages,
    pub weighted_avg: Averages,
    pub total: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-label precision, recall and F1 with macro and support-weighted
/// averages. Labels are reported in taxonomy order.
pub fn evaluate_classifier(
    pred: &BTreeMap<String, String>,
    truth: &BTreeMap<String, String>,
    taxonomy: &[String],
) -> Result<ClassificationReport, MetricsError> {
    let pk: BTreeSet<_> = pred.keys().collect();
    let tk: BTreeSet<_> = truth.keys().collect();
    if let Some(k) = pk.symmetric_difference(&tk).next() {
        return Err(MetricsError::KeyMismatch((*k).clone()));
    }
    let index: HashMap<&str, usize> = taxonomy.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let lookup = |id: &String, label: &String| {
        index.get(label.as_str()).copied().ok_or_else(|| MetricsError::UnknownLabel {
            id: id.clone(),
            label: label.clone(),
        })
    };

    let n = taxonomy.len();
    let (mut tp, mut fp, mut fn_) = (vec![0; n], vec![0; n], vec![0; n]);
    for (id, t) in truth {
        let ti = lookup(id, t)?;
        let pi = lookup(id, &pred[id])?;
        if ti == pi {
            tp[ti] += 1;
        } else {
            fp[pi] += 1;
            fn_[ti] += 1;
        }
    }

    let mut labels = Vec::with_capacity(n);
    for (i, label) in taxonomy.iter().enumerate() {
        let support = tp[i] + fn_[i];
        let empty = support == 0 && fp[i] == 0;
        let (precision, recall, f1) = if empty {
            (1.0, 1.0, 1.0)
        } else {
            let p = ratio(tp[i], tp[i] + fp[i]);
            let r = ratio(tp[i], support);
            // Equal to 2PR / (P + R), computed from counts so exact ratios stay exact.
            let f = ratio(2 * tp[i], 2 * tp[i] + fp[i] + fn_[i]);
            (p, r, f)
        };
        labels.push(LabelMetrics {
            label: label.clone(),
            tp: tp[i],
            fp: fp[i],
            fn_: fn_[i],
            support,
            precision,
            recall,
            f1,
            empty_support: empty,
        });
    }

    let counted: Vec<&LabelMetrics> = labels.iter().filter(|l| !l.empty_support).collect();
    let k = counted.len() as f64;
    let mean = |f: fn(&LabelMetrics) -> f64| {
        if counted.is_empty() {
            1.0
        } else {
            counted.iter().map(|l| f(l)).sum::<f64>() / k
        }
    };
    let macro_avg = Averages {
        precision: mean(|l| l.precision),
        recall: mean(|l| l.recall),
        f1: mean(|l| l.f1),
    };

    let total = truth.len();
    let weighted = |f: fn(&LabelMetrics) -> f64| {
        if total == 0 {
            1.0
        } else {
            labels.iter().map(|l| f(l) * l.support as f64).sum::<f64>() / total as f64
        }
    };
    let weighted_avg = Averages {
        precision: weighted(|l| l.precision),
        recall: weighted(|l| l.recall),
        f1: weighted(|l| l.f1),
    };

    Ok(ClassificationReport {
        labels,
        macro_avg,
        weighted_avg,
        total,
    })
}

impl ClassificationReport {
    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let width = self
            .labels
            .iter()
            .map(|l| l.label.len())
            .chain(["weighted avg".len()])
            .max()
            .unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}  {:>5}  {:>5}  {:>5}",
            "label", "precision", "recall", "f1", "support", "tp", "fp", "fn"
        );
        for l in &self.labels {
            let mark = if l.empty_support { " *" } else { "" };
            let _ = writeln!(
                s,
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}  {:>5}  {:>5}  {:>5}{mark}",
                l.label, l.precision, l.recall, l.f1, l.support, l.tp, l.fp, l.fn_
            );
        }
        for (name, a) in [("macro avg", self.macro_avg), ("weighted avg", self.weighted_avg)] {
            let _ = writeln!(
                s,
                "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
                name, a.precision, a.recall, a.f1, self.total
            );
        }
        if self.labels.iter().any(|l| l.empty_support) {
            s.push_str("* empty support: not predicted and not present\n");
        }
        s
    }
}
