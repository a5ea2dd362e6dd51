//! Naive reference scorers.
//!
//! Each score is recomputed straight from its textbook definition with
//! explicit probability maps. Nothing here is shared with [`crate::scoring`]
//! or [`crate::stats`]; only the table itself is read. Information gain uses
//! the mutual-information form Σ p(a,c)·log2(p(a,c) / (p(a)·p(c))) rather
//! than the entropy difference, and ReliefF visits every row and sorts all
//! candidates instead of bucketing by distance.

use std::collections::BTreeMap;

use crate::data::{DataTable, MISSING};
use crate::error::{Error, Result};

/// Largest table the reference implementations accept.
pub const ORACLE_ROW_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    InfoGain,
    GainRatio,
    Gini,
    Chi2,
    SymmetricalUncertainty,
    /// Exhaustive ReliefF over every row with `neighbors` hits / misses.
    ReliefF { neighbors: usize },
}

/// One score per attribute, in ascending column order.
pub fn oracle_scores(table: &DataTable, method: OracleMethod) -> Result<Vec<f64>> {
    if table.n_rows() > ORACLE_ROW_LIMIT {
        return Err(Error::TooLarge {
            rows: table.n_rows(),
            limit: ORACLE_ROW_LIMIT,
        });
    }
    let attrs = table.attribute_indices();
    if let OracleMethod::ReliefF { neighbors } = method {
        return Ok(relieff_exhaustive(table, &attrs, neighbors));
    }
    Ok(attrs
        .iter()
        .map(|&a| {
            let joint = Joint::new(table.column(a), table.class_codes());
            match method {
                OracleMethod::InfoGain => joint.mutual_information(),
                OracleMethod::GainRatio => {
                    let h = joint.h_attr();
                    if h == 0.0 {
                        0.0
                    } else {
                        joint.mutual_information() / h
                    }
                }
                OracleMethod::Gini => joint.gini_decrease(),
                OracleMethod::Chi2 => joint.chi2(),
                OracleMethod::SymmetricalUncertainty => {
                    let h = joint.h_attr() + joint.h_class();
                    if h == 0.0 {
                        0.0
                    } else {
                        2.0 * joint.mutual_information() / h
                    }
                }
                OracleMethod::ReliefF { .. } => unreachable!(),
            }
        })
        .collect())
}

/// SU between two arbitrary code columns.
pub fn oracle_su_pair(x: &[u8], y: &[u8]) -> f64 {
    let joint = Joint::new(x, y);
    let h = joint.h_attr() + joint.h_class();
    if h == 0.0 {
        0.0
    } else {
        2.0 * joint.mutual_information() / h
    }
}

struct Joint {
    n: f64,
    pair: BTreeMap<(u8, u8), f64>,
    attr: BTreeMap<u8, f64>,
    class: BTreeMap<u8, f64>,
}

impl Joint {
    fn new(xs: &[u8], ys: &[u8]) -> Self {
        let mut pair = BTreeMap::new();
        let mut attr = BTreeMap::new();
        let mut class = BTreeMap::new();
        let mut n = 0.0;
        for (&x, &y) in xs.iter().zip(ys) {
            if x == MISSING || y == MISSING {
                continue;
            }
            *pair.entry((x, y)).or_insert(0.0) += 1.0;
            *attr.entry(x).or_insert(0.0) += 1.0;
            *class.entry(y).or_insert(0.0) += 1.0;
            n += 1.0;
        }
        Joint {
            n,
            pair,
            attr,
            class,
        }
    }

    fn h(map: &BTreeMap<u8, f64>, n: f64) -> f64 {
        let mut h = 0.0;
        for &count in map.values() {
            let p = count / n;
            h -= p * p.log2();
        }
        h
    }

    fn h_attr(&self) -> f64 {
        Self::h(&self.attr, self.n)
    }

    fn h_class(&self) -> f64 {
        Self::h(&self.class, self.n)
    }

    fn mutual_information(&self) -> f64 {
        let mut mi = 0.0;
        for (&(x, y), &count) in &self.pair {
            let pxy = count / self.n;
            let px = self.attr[&x] / self.n;
            let py = self.class[&y] / self.n;
            mi += pxy * (pxy / (px * py)).log2();
        }
        mi
    }

    fn gini_decrease(&self) -> f64 {
        let mut before = 1.0;
        for &count in self.class.values() {
            before -= (count / self.n).powi(2);
        }
        let mut after = 0.0;
        for (&x, &nx) in &self.attr {
            let mut impurity = 1.0;
            for &y in self.class.keys() {
                let c = self.pair.get(&(x, y)).copied().unwrap_or(0.0);
                impurity -= (c / nx).powi(2);
            }
            after += nx / self.n * impurity;
        }
        before - after
    }

    fn chi2(&self) -> f64 {
        let mut chi2 = 0.0;
        for (&x, &nx) in &self.attr {
            for (&y, &ny) in &self.class {
                let expected = nx * ny / self.n;
                let observed = self.pair.get(&(x, y)).copied().unwrap_or(0.0);
                chi2 += (observed - expected).powi(2) / expected;
            }
        }
        chi2
    }
}

/// ReliefF with every row as a sampled instance: sort all other rows of
/// each class by (Hamming distance, row index) and take the first `k`.
fn relieff_exhaustive(table: &DataTable, attrs: &[usize], k: usize) -> Vec<f64> {
    let n = table.n_rows();
    let classes = table.class_codes();
    let n_classes = table.n_classes();
    let mut class_count = vec![0usize; n_classes];
    for &c in classes {
        class_count[c as usize] += 1;
    }
    let prior: Vec<f64> = class_count.iter().map(|&c| c as f64 / n as f64).collect();
    let value = |r: usize, a: usize| table.column(attrs[a])[r];
    let distance = |r: usize, s: usize| (0..attrs.len()).filter(|&a| value(r, a) != value(s, a)).count();

    let mut w = vec![0.0; attrs.len()];
    for r in 0..n {
        let own = classes[r] as usize;
        let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
        for (c, list) in neighbours.iter_mut().enumerate() {
            let mut candidates: Vec<(usize, usize)> = (0..n)
                .filter(|&s| s != r && classes[s] as usize == c)
                .map(|s| (distance(r, s), s))
                .collect();
            candidates.sort();
            *list = candidates.into_iter().take(k).map(|(_, s)| s).collect();
        }
        for (a, weight) in w.iter_mut().enumerate() {
            let mean_diff = |rows: &[usize]| {
                let differing = rows.iter().filter(|&&s| value(s, a) != value(r, a)).count();
                differing as f64 / rows.len() as f64
            };
            let mut miss_term = 0.0;
            for c in 0..n_classes {
                if c != own && !neighbours[c].is_empty() {
                    miss_term += prior[c] / (1.0 - prior[own]) * mean_diff(&neighbours[c]);
                }
            }
            let hit_term = if neighbours[own].is_empty() {
                0.0
            } else {
                mean_diff(&neighbours[own])
            };
            *weight += miss_term - hit_term;
        }
    }
    w.into_iter().map(|x| x / n as f64).collect()
}
