//! Stratified k-fold cross-validation and the AUC / CA / F1 / precision /
//! recall metric set.
//!
//! Held-out predictions of all folds are pooled by row index and the metrics
//! are computed once on the pooled set. Precision, recall and F1 are
//! one-vs-rest per class, averaged with class-support weights, which makes
//! recall equal to CA. AUC is defined for binary classes only, with class
//! code 1 as the positive class.

use std::io::Write;

use serde::Serialize;

use crate::classifiers::ClassifierSpec;
use crate::data::DataTable;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::SplitMix64;

pub const DEFAULT_FOLDS: usize = 10;

/// Class code treated as positive for AUC.
pub const POSITIVE_CLASS: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold id of every row.
    pub assignments: Vec<u32>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn fold_rows(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (r, &f) in self.assignments.iter().enumerate() {
            if f as usize == fold {
                test.push(r);
            } else {
                train.push(r);
            }
        }
        (train, test)
    }
}

/// Shuffles the rows of each class with a seeded generator and deals them to
/// folds round-robin. The dealing position carries over from one class to
/// the next so overall fold sizes also stay within one of each other.
pub fn stratified_folds(table: &DataTable, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::arg(format!("need at least 2 folds, got {k}")));
    }
    if k > table.n_rows() {
        return Err(Error::arg(format!(
            "{k} folds for {} rows",
            table.n_rows()
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); table.n_classes()];
    for (r, &c) in table.class_codes().iter().enumerate() {
        by_class[c as usize].push(r);
    }
    let mut rng = SplitMix64::new(seed);
    let mut assignments = vec![0u32; table.n_rows()];
    let mut next = 0usize;
    for rows in &mut by_class {
        rng.shuffle(rows);
        for &r in rows.iter() {
            assignments[r] = (next % k) as u32;
            next += 1;
        }
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub classifier: String,
    pub parameters: String,
    /// `None` unless the class is binary.
    pub auc: Option<f64>,
    pub ca: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub fold_ca: Vec<f64>,
    pub n_rows: usize,
    pub folds: usize,
    pub seed: u64,
    pub positive_class: Option<String>,
}

/// Pooled held-out predictions of one cross-validation run.
#[derive(Clone, Debug, PartialEq)]
pub struct Predictions {
    pub labels: Vec<u8>,
    pub predicted: Vec<u8>,
    /// Probability of [`POSITIVE_CLASS`] per row (binary tables only, else empty).
    pub positive_scores: Vec<f64>,
    pub fold_ca: Vec<f64>,
}

pub fn cross_validate(
    table: &DataTable,
    classifier: &ClassifierSpec,
    folds: &FoldPlan,
) -> Result<EvaluationReport> {
    cross_validate_with(table, classifier, folds, Execution::Parallel)
}

pub fn cross_validate_with(
    table: &DataTable,
    classifier: &ClassifierSpec,
    folds: &FoldPlan,
    exec: Execution,
) -> Result<EvaluationReport> {
    let preds = cross_validate_predictions(table, classifier, folds, exec)?;
    let n_classes = table.n_classes();
    let ca = accuracy(&preds.labels, &preds.predicted);
    let (precision, recall, f1) = prf(&preds.labels, &preds.predicted, n_classes)?;
    let binary = n_classes == 2;
    let auc = if binary {
        auc(&preds.labels, &preds.positive_scores).ok()
    } else {
        None
    };
    Ok(EvaluationReport {
        classifier: classifier.token().to_string(),
        parameters: classifier.describe(),
        auc,
        ca,
        f1,
        precision,
        recall,
        fold_ca: preds.fold_ca,
        n_rows: table.n_rows(),
        folds: folds.k,
        seed: folds.seed,
        positive_class: binary.then(|| {
            table
                .schema()
                .target()
                .label(POSITIVE_CLASS)
                .unwrap_or_default()
                .to_string()
        }),
    })
}

/// Trains on each fold's complement and predicts the fold, pooling by row index.
pub fn cross_validate_predictions(
    table: &DataTable,
    classifier: &ClassifierSpec,
    folds: &FoldPlan,
    exec: Execution,
) -> Result<Predictions> {
    if folds.assignments.len() != table.n_rows() {
        return Err(Error::arg(format!(
            "fold plan covers {} rows, table has {}",
            folds.assignments.len(),
            table.n_rows()
        )));
    }
    if folds.assignments.iter().any(|&f| f as usize >= folds.k) {
        return Err(Error::arg("fold id out of range"));
    }
    let present: Vec<bool> = table.class_counts().iter().map(|&c| c > 0).collect();
    let binary = table.n_classes() == 2;

    let per_fold = exec.map(folds.k, |fold| -> Result<Vec<(usize, u8, f64)>> {
        let (train_rows, test_rows) = folds.fold_rows(fold);
        let train = table.take_rows(&train_rows);
        for (c, &n) in train.class_counts().iter().enumerate() {
            if n == 0 && present[c] {
                return Err(Error::MissingClassInFold {
                    fold,
                    class: table
                        .schema()
                        .target()
                        .label(c as u8)
                        .unwrap_or_default()
                        .to_string(),
                });
            }
        }
        let model = classifier.fit(&train, exec)?;
        let mut row = Vec::with_capacity(table.n_attributes());
        Ok(test_rows
            .into_iter()
            .map(|r| {
                table.attribute_row(r, &mut row);
                let dist = model.predict_proba(&row);
                let score = if binary {
                    dist.probabilities()[POSITIVE_CLASS as usize]
                } else {
                    0.0
                };
                (r, dist.argmax() as u8, score)
            })
            .collect())
    });

    let n = table.n_rows();
    let labels = table.class_codes().to_vec();
    let mut predicted = vec![0u8; n];
    let mut positive_scores = if binary { vec![0.0; n] } else { Vec::new() };
    let mut fold_ca = Vec::with_capacity(folds.k);
    for fold in per_fold {
        let fold = fold?;
        let mut correct = 0usize;
        for &(r, p, s) in &fold {
            predicted[r] = p;
            if binary {
                positive_scores[r] = s;
            }
            if p == labels[r] {
                correct += 1;
            }
        }
        fold_ca.push(if fold.is_empty() {
            0.0
        } else {
            correct as f64 / fold.len() as f64
        });
    }
    Ok(Predictions {
        labels,
        predicted,
        positive_scores,
        fold_ca,
    })
}

pub fn accuracy(labels: &[u8], predictions: &[u8]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let correct = labels
        .iter()
        .zip(predictions)
        .filter(|(a, b)| a == b)
        .count();
    correct as f64 / labels.len() as f64
}

/// Mann–Whitney AUC: the fraction of (positive, negative) pairs where the
/// positive scores higher, ties counting one half. Labels must be 0 or 1;
/// 1 is positive.
pub fn auc(labels: &[u8], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::arg("labels and scores differ in length"));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::arg("AUC needs binary labels 0/1"));
    }
    let n_pos = labels.iter().filter(|&&l| l == POSITIVE_CLASS).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::arg("AUC needs both classes present"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Walk tie groups in ascending score order, counting negatives already passed.
    let mut wins = 0.0f64;
    let mut neg_below = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0usize, 0usize);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if labels[order[j]] == POSITIVE_CLASS {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        wins += pos as f64 * neg_below as f64 + 0.5 * pos as f64 * neg as f64;
        neg_below += neg;
        i = j;
    }
    Ok(wins / (n_pos as f64 * n_neg as f64))
}

/// Support-weighted one-vs-rest `(precision, recall, f1)`. A class that is
/// never predicted has precision 0; F1 is 0 where precision + recall is 0.
pub fn prf(labels: &[u8], predictions: &[u8], n_classes: usize) -> Result<(f64, f64, f64)> {
    if labels.is_empty() {
        return Err(Error::arg("no predictions"));
    }
    if labels.len() != predictions.len() {
        return Err(Error::arg("labels and predictions differ in length"));
    }
    let mut tp = vec![0u64; n_classes];
    let mut support = vec![0u64; n_classes];
    let mut predicted = vec![0u64; n_classes];
    for (&l, &p) in labels.iter().zip(predictions) {
        support[l as usize] += 1;
        predicted[p as usize] += 1;
        if l == p {
            tp[l as usize] += 1;
        }
    }
    let n = labels.len() as f64;
    let (mut precision, mut recall, mut f1) = (0.0, 0.0, 0.0);
    for c in 0..n_classes {
        if support[c] == 0 {
            continue;
        }
        let w = support[c] as f64 / n;
        let p = if predicted[c] == 0 {
            0.0
        } else {
            tp[c] as f64 / predicted[c] as f64
        };
        let r = tp[c] as f64 / support[c] as f64;
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        precision += w * p;
        recall += w * r;
        f1 += w * f;
    }
    Ok((precision, recall, f1))
}

/// One line per report: `classifier,auc,ca,f1,precision,recall,seed,k,n_rows`.
pub fn write_reports_csv<W: Write>(
    mut out: W,
    reports: &[EvaluationReport],
    comment: &[String],
) -> Result<()> {
    let io = |e| Error::io("<report csv>", e);
    for line in comment {
        writeln!(out, "# {line}").map_err(io)?;
    }
    writeln!(out, "classifier,auc,ca,f1,precision,recall,seed,k,n_rows").map_err(io)?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.classifier,
            r.auc.map_or_else(String::new, |a| a.to_string()),
            r.ca,
            r.f1,
            r.precision,
            r.recall,
            r.seed,
            r.folds,
            r.n_rows
        )
        .map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MissingPolicy;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn class_table(counts: &[(&str, usize)]) -> DataTable {
        let mut rows = Vec::new();
        for (label, n) in counts {
            for i in 0..*n {
                let v = (i % 3).to_string();
                rows.push(vec![v, label.to_string()]);
            }
        }
        DataTable::from_records(&["a", "class"], "class", &rows, MissingPolicy::AsCategory)
            .unwrap()
    }

    fn per_fold_counts(table: &DataTable, plan: &FoldPlan) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0usize; table.n_classes()]; plan.k];
        for (r, &f) in plan.assignments.iter().enumerate() {
            counts[f as usize][table.class_codes()[r] as usize] += 1;
        }
        counts
    }

    #[test]
    fn exact_stratification() {
        let t = class_table(&[("x", 60), ("y", 40)]);
        let plan = stratified_folds(&t, 10, 42).unwrap();
        for fold in per_fold_counts(&t, &plan) {
            assert_eq!(fold, vec![6, 4]);
        }
        assert_eq!(plan, stratified_folds(&t, 10, 42).unwrap());
        assert_ne!(plan, stratified_folds(&t, 10, 43).unwrap());
    }

    #[test]
    fn fold_errors() {
        let t = class_table(&[("x", 3), ("y", 2)]);
        assert!(stratified_folds(&t, 1, 0).is_err());
        assert!(stratified_folds(&t, 6, 0).is_err());
        assert!(stratified_folds(&t, 5, 0).is_ok());
    }

    #[test]
    fn missing_class_in_training_split() {
        let t = class_table(&[("x", 5), ("y", 1)]);
        let plan = stratified_folds(&t, 3, 0).unwrap();
        let err = cross_validate(&t, &ClassifierSpec::naive_bayes(), &plan).unwrap_err();
        assert!(matches!(err, Error::MissingClassInFold { .. }));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[1, 1, 0, 0], &[0.9, 0.8, 0.2, 0.1]).unwrap(), 1.0);
        assert_eq!(auc(&[1, 0, 1, 0], &[0.5; 4]).unwrap(), 0.5);
        assert_eq!(auc(&[1, 1, 0, 0], &[0.9, 0.4, 0.6, 0.1]).unwrap(), 0.75);
        assert!(auc(&[1, 1], &[0.1, 0.2]).is_err());
        assert!(auc(&[1, 2], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn prf_examples() {
        let (p, r, f) = prf(&[0, 1, 1], &[0, 1, 1], 2).unwrap();
        assert_eq!((p, r, f), (1.0, 1.0, 1.0));

        let labels: Vec<u8> = (0..100).map(|i| u8::from(i >= 60)).collect();
        let (p, r, _) = prf(&labels, &[0; 100], 2).unwrap();
        close(r, 0.6, 1e-12);
        close(p, 0.36, 1e-12);

        let (p, r, f) = prf(&[1, 1, 0, 0], &[1, 0, 0, 0], 2).unwrap();
        close(p, 5.0 / 6.0, 1e-12);
        close(r, 0.75, 1e-12);
        close(f, 11.0 / 15.0, 1e-12);
        assert!(prf(&[], &[], 2).is_err());
    }

    #[test]
    fn prior_classifier_is_chance_on_balanced_data() {
        let t = class_table(&[("x", 50), ("y", 50)]);
        let plan = stratified_folds(&t, 10, 42).unwrap();
        let rep = cross_validate(&t, &ClassifierSpec::Prior, &plan).unwrap();
        close(rep.ca, 0.5, 0.05);
        assert_eq!(rep.recall, rep.ca);
        assert_eq!(rep.positive_class.as_deref(), Some("y"));
        assert_eq!(rep.fold_ca.len(), 10);
    }

    #[test]
    fn report_csv() {
        let rep = EvaluationReport {
            classifier: "nb".into(),
            parameters: "nb(alpha=1)".into(),
            auc: Some(0.5),
            ca: 0.25,
            f1: 0.125,
            precision: 0.5,
            recall: 0.25,
            fold_ca: vec![],
            n_rows: 4,
            folds: 2,
            seed: 42,
            positive_class: None,
        };
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &[rep], &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "classifier,auc,ca,f1,precision,recall,seed,k,n_rows\nnb,0.5,0.25,0.125,0.5,0.25,42,2,4\n"
        );
    }
}
