//! Contingency tables and the information-theoretic quantities every scorer
//! is built from. Logarithms are base 2 throughout, so entropies are in bits.

use crate::data::{DataTable, MISSING};
use crate::error::{Error, Result};

/// Attribute-category × class-category counts with marginals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    n_values: usize,
    n_classes: usize,
    counts: Vec<u64>,
    row_totals: Vec<u64>,
    col_totals: Vec<u64>,
    grand_total: u64,
}

impl ContingencyTable {
    /// Cross-tabulates two code columns of equal length. Pairs where either
    /// side is [`MISSING`] do not contribute.
    pub fn from_codes(values: &[u8], classes: &[u8], n_values: usize, n_classes: usize) -> Self {
        assert_eq!(values.len(), classes.len(), "column length mismatch");
        let mut counts = vec![0u64; n_values * n_classes];
        for (&v, &c) in values.iter().zip(classes) {
            if v != MISSING && c != MISSING {
                counts[v as usize * n_classes + c as usize] += 1;
            }
        }
        Self::from_counts(n_values, n_classes, counts)
    }

    /// Builds a table from a row-major count matrix.
    pub fn from_counts(n_values: usize, n_classes: usize, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), n_values * n_classes, "count matrix shape");
        let mut row_totals = vec![0u64; n_values];
        let mut col_totals = vec![0u64; n_classes];
        for v in 0..n_values {
            for c in 0..n_classes {
                let n = counts[v * n_classes + c];
                row_totals[v] += n;
                col_totals[c] += n;
            }
        }
        let grand_total = row_totals.iter().sum();
        ContingencyTable {
            n_values,
            n_classes,
            counts,
            row_totals,
            col_totals,
            grand_total,
        }
    }

    pub fn from_rows(rows: &[&[u64]]) -> Self {
        let n_classes = rows.first().map_or(0, |r| r.len());
        let counts = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_counts(rows.len(), n_classes, counts)
    }

    pub fn n_values(&self) -> usize {
        self.n_values
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn count(&self, value: usize, class: usize) -> u64 {
        self.counts[value * self.n_classes + class]
    }

    pub fn row(&self, value: usize) -> &[u64] {
        &self.counts[value * self.n_classes..(value + 1) * self.n_classes]
    }

    pub fn row_totals(&self) -> &[u64] {
        &self.row_totals
    }

    pub fn col_totals(&self) -> &[u64] {
        &self.col_totals
    }

    pub fn grand_total(&self) -> u64 {
        self.grand_total
    }

    pub fn transpose(&self) -> ContingencyTable {
        let mut counts = vec![0u64; self.counts.len()];
        for v in 0..self.n_values {
            for c in 0..self.n_classes {
                counts[c * self.n_values + v] = self.count(v, c);
            }
        }
        Self::from_counts(self.n_classes, self.n_values, counts)
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.grand_total == 0 {
            Err(Error::EmptyTable("contingency table has no counts"))
        } else {
            Ok(())
        }
    }
}

/// Cross-tabulates attribute column `attribute_index` against the class.
pub fn contingency(table: &DataTable, attribute_index: usize) -> Result<ContingencyTable> {
    table.check_attribute(attribute_index)?;
    Ok(ContingencyTable::from_codes(
        table.column(attribute_index),
        table.class_codes(),
        table.schema().variable(attribute_index).n_categories(),
        table.n_classes(),
    ))
}

/// A discrete probability distribution. Empty when built from zero counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probabilities: Vec<f64>,
}

impl Distribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::arg("probabilities must be finite and non-negative"));
        }
        let total: f64 = probabilities.iter().sum();
        if !probabilities.is_empty() && (total - 1.0).abs() > 1e-12 {
            return Err(Error::arg(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Distribution { probabilities })
    }

    /// Relative frequencies of `counts`; empty if the counts sum to zero.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Distribution {
                probabilities: Vec::new(),
            };
        }
        let n = total as f64;
        Distribution {
            probabilities: counts.iter().map(|&c| c as f64 / n).collect(),
        }
    }

    pub(crate) fn from_raw(probabilities: Vec<f64>) -> Self {
        Distribution { probabilities }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    /// Index of the largest probability; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }
}

/// Shannon entropy in bits; zero-probability terms contribute nothing.
pub fn entropy(d: &Distribution) -> f64 {
    d.probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

pub(crate) fn entropy_of_counts(counts: &[u64]) -> f64 {
    entropy(&Distribution::from_counts(counts))
}

/// Entropy of the attribute marginal, H(A).
pub fn attribute_entropy(ct: &ContingencyTable) -> f64 {
    entropy_of_counts(ct.row_totals())
}

/// Entropy of the class marginal, H(C).
pub fn class_entropy(ct: &ContingencyTable) -> f64 {
    entropy_of_counts(ct.col_totals())
}

/// H(C | A) = Σ_v (n_v / N) · H(C | A = v).
pub fn conditional_entropy(ct: &ContingencyTable) -> Result<f64> {
    ct.ensure_nonempty()?;
    let n = ct.grand_total() as f64;
    Ok((0..ct.n_values())
        .filter(|&v| ct.row_totals()[v] > 0)
        .map(|v| ct.row_totals()[v] as f64 / n * entropy_of_counts(ct.row(v)))
        .sum())
}

/// Mutual information H(C) − H(C | A), clamped at zero.
pub fn information_gain(ct: &ContingencyTable) -> Result<f64> {
    let h_cond = conditional_entropy(ct)?;
    Ok((class_entropy(ct) - h_cond).max(0.0))
}

/// 2·IG / (H(A) + H(C)); zero when both marginals are degenerate.
pub fn symmetrical_uncertainty(ct: &ContingencyTable) -> Result<f64> {
    let ig = information_gain(ct)?;
    let denom = attribute_entropy(ct) + class_entropy(ct);
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * ig / denom).clamp(0.0, 1.0))
}

/// Gini impurity 1 − Σ p², from counts. Zero for an empty count vector.
pub(crate) fn gini_of_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    fn perfect() -> ContingencyTable {
        ContingencyTable::from_rows(&[&[2, 0], &[0, 2]])
    }

    fn indep() -> ContingencyTable {
        ContingencyTable::from_rows(&[&[1, 1], &[1, 1]])
    }

    fn skew() -> ContingencyTable {
        ContingencyTable::from_rows(&[&[2, 1], &[0, 1]])
    }

    #[test]
    fn marginals() {
        let ct = skew();
        assert_eq!(ct.row_totals(), &[3, 1]);
        assert_eq!(ct.col_totals(), &[2, 2]);
        assert_eq!(ct.grand_total(), 4);
        let t = ct.transpose();
        assert_eq!(t.row_totals(), &[2, 2]);
        assert_eq!(t.count(1, 0), 1);
    }

    #[test]
    fn from_codes_skips_missing() {
        let ct = ContingencyTable::from_codes(&[0, 1, MISSING, 1], &[0, 1, 1, 1], 2, 2);
        assert_eq!(ct.grand_total(), 3);
        assert_eq!(ct.row(1), &[0, 2]);
    }

    #[test]
    fn entropy_examples() {
        close(entropy(&Distribution::new(vec![0.5, 0.5]).unwrap()), 1.0);
        close(entropy(&Distribution::new(vec![1.0, 0.0]).unwrap()), 0.0);
        close(
            entropy(&Distribution::new(vec![0.75, 0.25]).unwrap()),
            0.811278,
        );
        assert_eq!(entropy(&Distribution::from_counts(&[0, 0])), 0.0);
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.5, 1.5]).is_err());
        assert!(Distribution::new(vec![]).is_ok());
        assert!(Distribution::from_counts(&[0, 0]).is_empty());
    }

    #[test]
    fn conditional_entropy_examples() {
        close(conditional_entropy(&perfect()).unwrap(), 0.0);
        close(conditional_entropy(&indep()).unwrap(), 1.0);
        close(conditional_entropy(&skew()).unwrap(), 0.688722);
        let empty = ContingencyTable::from_rows(&[&[0, 0]]);
        assert!(conditional_entropy(&empty).is_err());
    }

    #[test]
    fn su_examples() {
        close(symmetrical_uncertainty(&perfect()).unwrap(), 1.0);
        close(symmetrical_uncertainty(&indep()).unwrap(), 0.0);
        let constant = ContingencyTable::from_rows(&[&[2, 2]]);
        assert_eq!(symmetrical_uncertainty(&constant).unwrap(), 0.0);
        let both_constant = ContingencyTable::from_rows(&[&[4]]);
        assert_eq!(symmetrical_uncertainty(&both_constant).unwrap(), 0.0);
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        let d = Distribution::new(vec![0.25, 0.375, 0.375]).unwrap();
        assert_eq!(d.argmax(), 1);
    }

    #[test]
    fn contingency_rejects_class_column() {
        let t = DataTable::from_records(
            &["a", "g"],
            "g",
            &[vec!["1", "M"], vec!["2", "F"]],
            crate::MissingPolicy::AsCategory,
        )
        .unwrap();
        assert!(contingency(&t, 1).is_err());
        assert!(contingency(&t, 2).is_err());
        assert_eq!(contingency(&t, 0).unwrap().grand_total(), 2);
    }
}
