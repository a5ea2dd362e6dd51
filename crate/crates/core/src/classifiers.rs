//! Categorical Naive Bayes and a bagged forest of multiway Gini trees.
//!
//! Models see a row as the attribute codes of a table in ascending column
//! order (see [`DataTable::attribute_row`]). [`MISSING`] codes are skipped by
//! Naive Bayes and stop tree descent at the current node.

use std::fmt;

use crate::data::{DataTable, MISSING};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::{derive_seed, SplitMix64};
use crate::scoring::DEFAULT_SEED;
use crate::stats::{gini_of_counts, Distribution};

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_TREES: usize = 10;
pub const DEFAULT_MIN_SAMPLES_SPLIT: usize = 2;

/// Gini decreases at or below this are treated as no improvement.
const GINI_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct NaiveBayesModel {
    alpha: f64,
    class_counts: Vec<u64>,
    class_priors: Vec<f64>,
    /// Per attribute: `[value][class]` → P(value | class), row-major.
    conditionals: Vec<Vec<f64>>,
    n_values: Vec<usize>,
    log_priors: Vec<f64>,
    log_conditionals: Vec<Vec<f64>>,
}

impl NaiveBayesModel {
    pub fn class_priors(&self) -> &[f64] {
        &self.class_priors
    }

    pub fn n_classes(&self) -> usize {
        self.class_priors.len()
    }

    /// P(value | class) for attribute position `attribute`.
    pub fn likelihood(&self, attribute: usize, value: usize, class: usize) -> f64 {
        self.conditionals[attribute][value * self.n_classes() + class]
    }

    /// Posterior over classes, computed in log space.
    ///
    /// A code beyond the attribute's known categories is a fresh category with
    /// likelihood `alpha / (count(c) + alpha·(|values|+1))`. If every class ends
    /// up with zero probability the priors are returned.
    pub fn predict_proba(&self, row: &[u8]) -> Distribution {
        let n_classes = self.n_classes();
        let mut log_post = self.log_priors.clone();
        for (a, &code) in row.iter().enumerate() {
            if code == MISSING {
                continue;
            }
            let v = code as usize;
            if v < self.n_values[a] {
                let table = &self.log_conditionals[a][v * n_classes..(v + 1) * n_classes];
                for (lp, &l) in log_post.iter_mut().zip(table) {
                    *lp += l;
                }
            } else {
                let denom_values = (self.n_values[a] + 1) as f64;
                for (c, lp) in log_post.iter_mut().enumerate() {
                    let denom = self.class_counts[c] as f64 + self.alpha * denom_values;
                    let p = if denom > 0.0 { self.alpha / denom } else { 0.0 };
                    *lp += p.ln();
                }
            }
        }
        normalize_log(&log_post).unwrap_or_else(|| Distribution::from_raw(self.class_priors.clone()))
    }
}

/// Softmax of log scores; `None` if every score is -inf.
fn normalize_log(log_post: &[f64]) -> Option<Distribution> {
    let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let exp: Vec<f64> = log_post.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    Some(Distribution::from_raw(exp.into_iter().map(|e| e / total).collect()))
}

/// Fits categorical Naive Bayes on every attribute of `table`.
///
/// Priors are unsmoothed class frequencies; likelihoods are
/// `(count(v,c) + alpha) / (count(c) + alpha·|values|)`. A class without
/// training rows and `alpha = 0` gets a uniform likelihood column.
pub fn nb_fit(table: &DataTable, alpha: f64) -> Result<NaiveBayesModel> {
    if table.n_rows() == 0 {
        return Err(Error::EmptyTable("cannot fit Naive Bayes on zero rows"));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::arg("alpha must be finite and >= 0"));
    }
    let n_classes = table.n_classes();
    let classes = table.class_codes();
    let class_counts: Vec<u64> = table.class_counts().into_iter().map(|c| c as u64).collect();
    let n = table.n_rows() as f64;
    let class_priors: Vec<f64> = class_counts.iter().map(|&c| c as f64 / n).collect();

    let mut conditionals = Vec::new();
    let mut n_values = Vec::new();
    for a in table.attribute_indices() {
        let nv = table.schema().variable(a).n_categories();
        let mut counts = vec![0u64; nv * n_classes];
        for (&v, &c) in table.column(a).iter().zip(classes) {
            if v != MISSING {
                counts[v as usize * n_classes + c as usize] += 1;
            }
        }
        // Missing cells are excluded, so per-class denominators come from the column.
        let mut totals = vec![0u64; n_classes];
        for v in 0..nv {
            for c in 0..n_classes {
                totals[c] += counts[v * n_classes + c];
            }
        }
        let mut probs = vec![0.0; nv * n_classes];
        for c in 0..n_classes {
            let denom = totals[c] as f64 + alpha * nv as f64;
            for v in 0..nv {
                probs[v * n_classes + c] = if denom > 0.0 {
                    (counts[v * n_classes + c] as f64 + alpha) / denom
                } else {
                    1.0 / nv as f64
                };
            }
        }
        conditionals.push(probs);
        n_values.push(nv);
    }
    let log_priors = class_priors.iter().map(|p| p.ln()).collect();
    let log_conditionals = conditionals
        .iter()
        .map(|t| t.iter().map(|p| p.ln()).collect())
        .collect();
    Ok(NaiveBayesModel {
        alpha,
        class_counts,
        class_priors,
        conditionals,
        n_values,
        log_priors,
        log_conditionals,
    })
}

pub fn nb_predict_proba(model: &NaiveBayesModel, row: &[u8]) -> Distribution {
    model.predict_proba(row)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    Leaf {
        counts: Vec<u32>,
    },
    Split {
        /// Position of the split attribute in the row.
        attribute: usize,
        /// Class counts of all training rows that reached this node.
        counts: Vec<u32>,
        /// One slot per category; `None` where no training row had that category.
        children: Vec<Option<usize>>,
    },
}

impl TreeNode {
    pub fn counts(&self) -> &[u32] {
        match self {
            TreeNode::Leaf { counts } | TreeNode::Split { counts, .. } => counts,
        }
    }
}

/// A multiway classification tree. Node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { children, .. } => {
                    1 + children
                        .iter()
                        .flatten()
                        .map(|&c| walk(nodes, c))
                        .max()
                        .unwrap_or(0)
                }
            }
        }
        walk(&self.nodes, 0)
    }

    /// Class counts of the node where `row` stops: a leaf, or the last node
    /// whose split category was unseen (or missing) for this row.
    pub fn leaf_counts(&self, row: &[u8]) -> &[u32] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { counts } => return counts,
                TreeNode::Split {
                    attribute,
                    counts,
                    children,
                } => {
                    let code = row[*attribute];
                    match children.get(code as usize).copied().flatten() {
                        Some(next) if code != MISSING => i = next,
                        _ => return counts,
                    }
                }
            }
        }
    }

    pub fn predict_proba(&self, row: &[u8]) -> Distribution {
        let counts = self.leaf_counts(row);
        let total: u32 = counts.iter().sum();
        Distribution::from_raw(
            counts
                .iter()
                .map(|&c| c as f64 / total as f64)
                .collect(),
        )
    }
}

struct TreeGrower<'a> {
    columns: Vec<&'a [u8]>,
    n_values: Vec<usize>,
    classes: &'a [u8],
    n_classes: usize,
    candidate_features: usize,
    min_samples_split: usize,
    nodes: Vec<TreeNode>,
    scratch: Vec<u32>,
}

impl TreeGrower<'_> {
    fn class_counts(&self, rows: &[u32]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        for &r in rows {
            counts[self.classes[r as usize] as usize] += 1;
        }
        counts
    }

    fn grow(
        &mut self,
        rows: &mut [u32],
        counts: Vec<u32>,
        used: &mut [bool],
        rng: &mut SplitMix64,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode::Leaf {
            counts: counts.clone(),
        });

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let mut unused: Vec<usize> = (0..used.len()).filter(|&a| !used[a]).collect();
        if pure || rows.len() < self.min_samples_split || unused.is_empty() {
            return id;
        }

        let mut candidates = rng.choose_multiple(&mut unused, self.candidate_features);
        candidates.sort_unstable();
        let counts64: Vec<u64> = counts.iter().map(|&c| c as u64).collect();
        let parent_gini = gini_of_counts(&counts64);
        let mut best: Option<(usize, f64, Vec<u64>)> = None;
        for &a in &candidates {
            let table = self.split_counts(a, rows);
            let decrease = parent_gini - self.split_gini(&table);
            if best.as_ref().is_none_or(|&(_, d, _)| decrease > d) {
                best = Some((a, decrease, table));
            }
        }
        let (attribute, decrease, table) = best.expect("at least one candidate");
        if decrease <= GINI_EPSILON {
            return id;
        }

        // Counting sort of rows by category; missing codes go to a trailing bucket.
        let column = self.columns[attribute];
        let nv = self.n_values[attribute];
        let mut starts = vec![0usize; nv + 2];
        for v in 0..nv {
            starts[v + 1] = starts[v] + table[v * self.n_classes..(v + 1) * self.n_classes]
                .iter()
                .sum::<u64>() as usize;
        }
        starts[nv + 1] = rows.len();
        let mut fill = starts.clone();
        let scratch = &mut self.scratch[..rows.len()];
        for &r in rows.iter() {
            let b = bucket(column[r as usize], nv);
            scratch[fill[b]] = r;
            fill[b] += 1;
        }
        rows.copy_from_slice(scratch);

        used[attribute] = true;
        let mut children = vec![None; nv];
        for v in 0..nv {
            let (lo, hi) = (starts[v], starts[v + 1]);
            if hi > lo {
                let child_counts = table[v * self.n_classes..(v + 1) * self.n_classes]
                    .iter()
                    .map(|&c| c as u32)
                    .collect();
                children[v] = Some(self.grow(&mut rows[lo..hi], child_counts, used, rng));
            }
        }
        used[attribute] = false;

        self.nodes[id] = TreeNode::Split {
            attribute,
            counts,
            children,
        };
        id
    }

    /// `[value][class]` counts of `rows` on `attribute`, missing codes skipped.
    fn split_counts(&self, attribute: usize, rows: &[u32]) -> Vec<u64> {
        let column = self.columns[attribute];
        let mut counts = vec![0u64; self.n_values[attribute] * self.n_classes];
        for &r in rows {
            let v = column[r as usize];
            if v != MISSING {
                counts[v as usize * self.n_classes + self.classes[r as usize] as usize] += 1;
            }
        }
        counts
    }

    /// Σ_v (n_v / N) · Gini(class | A = v) over non-missing rows.
    fn split_gini(&self, counts: &[u64]) -> f64 {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return f64::INFINITY;
        }
        counts
            .chunks_exact(self.n_classes)
            .filter(|row| row.iter().any(|&c| c > 0))
            .map(|row| row.iter().sum::<u64>() as f64 / n as f64 * gini_of_counts(row))
            .sum()
    }
}

fn bucket(code: u8, n_values: usize) -> usize {
    if code == MISSING {
        n_values
    } else {
        code as usize
    }
}

fn fit_tree_rows(
    table: &DataTable,
    rows: &mut [u32],
    rng: &mut SplitMix64,
    candidate_features: usize,
    min_samples_split: usize,
) -> DecisionTree {
    let attrs = table.attribute_indices();
    let mut grower = TreeGrower {
        columns: attrs.iter().map(|&a| table.column(a)).collect(),
        n_values: attrs
            .iter()
            .map(|&a| table.schema().variable(a).n_categories())
            .collect(),
        classes: table.class_codes(),
        n_classes: table.n_classes(),
        candidate_features: candidate_features.max(1),
        min_samples_split,
        nodes: Vec::new(),
        scratch: vec![0; rows.len()],
    };
    let mut used = vec![false; attrs.len()];
    let counts = grower.class_counts(rows);
    grower.grow(rows, counts, &mut used, rng);
    DecisionTree {
        nodes: grower.nodes,
    }
}

/// Grows one unpruned multiway tree on all rows of `table`.
///
/// At every node `candidate_features` unused attributes are drawn without
/// replacement and the one with the largest Gini decrease wins (ties to the
/// lowest attribute). Growth stops at pure nodes, nodes smaller than
/// `min_samples_split`, when no attribute is left, or when no candidate
/// decreases impurity.
pub fn tree_fit(
    table: &DataTable,
    rng: &mut SplitMix64,
    candidate_features: usize,
    min_samples_split: usize,
) -> Result<DecisionTree> {
    if table.n_rows() == 0 {
        return Err(Error::EmptyTable("cannot fit a tree on zero rows"));
    }
    let mut rows: Vec<u32> = (0..table.n_rows() as u32).collect();
    Ok(fit_tree_rows(
        table,
        &mut rows,
        rng,
        candidate_features,
        min_samples_split,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Attributes drawn per split; `None` means `ceil(sqrt(#attributes))`.
    pub candidate_features: Option<usize>,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: DEFAULT_TREES,
            candidate_features: None,
            min_samples_split: DEFAULT_MIN_SAMPLES_SPLIT,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub candidate_features: usize,
    pub master_seed: u64,
}

pub fn default_candidate_features(n_attributes: usize) -> usize {
    ((n_attributes as f64).sqrt().ceil() as usize).max(1)
}

pub fn forest_fit(table: &DataTable, params: &ForestParams) -> Result<ForestModel> {
    forest_fit_with(table, params, Execution::Parallel)
}

/// Bagged trees: tree `t` sees `n_rows` bootstrap draws from a generator
/// seeded with `derive_seed(seed, t)`, which then also drives its feature draws.
pub fn forest_fit_with(
    table: &DataTable,
    params: &ForestParams,
    exec: Execution,
) -> Result<ForestModel> {
    if table.n_rows() == 0 {
        return Err(Error::EmptyTable("cannot fit a forest on zero rows"));
    }
    if params.n_trees == 0 {
        return Err(Error::arg("forest needs at least one tree"));
    }
    let candidate_features = params
        .candidate_features
        .unwrap_or_else(|| default_candidate_features(table.n_attributes()));
    let n = table.n_rows();
    let trees = exec.map(params.n_trees, |t| {
        let mut rng = SplitMix64::new(derive_seed(params.seed, t as u64));
        // Tree growth only looks at counts, so the sample is kept in row order.
        let mut multiplicity = vec![0u32; n];
        for _ in 0..n {
            multiplicity[rng.below(n)] += 1;
        }
        let mut rows: Vec<u32> = Vec::with_capacity(n);
        for (r, &m) in multiplicity.iter().enumerate() {
            rows.extend(std::iter::repeat_n(r as u32, m as usize));
        }
        fit_tree_rows(
            table,
            &mut rows,
            &mut rng,
            candidate_features,
            params.min_samples_split,
        )
    });
    Ok(ForestModel {
        trees,
        candidate_features,
        master_seed: params.seed,
    })
}

/// Mean of the trees' class-frequency distributions, summed in tree order.
pub fn forest_predict_proba(model: &ForestModel, row: &[u8]) -> Distribution {
    let mut acc: Vec<f64> = Vec::new();
    for tree in &model.trees {
        let d = tree.predict_proba(row);
        if acc.is_empty() {
            acc = vec![0.0; d.len()];
        }
        for (a, &p) in acc.iter_mut().zip(d.probabilities()) {
            *a += p;
        }
    }
    let t = model.trees.len() as f64;
    Distribution::from_raw(acc.into_iter().map(|a| a / t).collect())
}

/// Which learner to train, with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassifierSpec {
    NaiveBayes { alpha: f64 },
    RandomForest(ForestParams),
    /// Ignores attributes and predicts the training class frequencies.
    Prior,
}

pub const CLASSIFIER_TOKENS: [&str; 2] = ["nb", "rf"];

impl ClassifierSpec {
    pub fn naive_bayes() -> Self {
        ClassifierSpec::NaiveBayes {
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn random_forest(seed: u64) -> Self {
        ClassifierSpec::RandomForest(ForestParams {
            seed,
            ..ForestParams::default()
        })
    }

    pub fn from_token(token: &str, seed: u64) -> Option<Self> {
        match token {
            "nb" => Some(Self::naive_bayes()),
            "rf" => Some(Self::random_forest(seed)),
            "prior" => Some(ClassifierSpec::Prior),
            _ => None,
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            ClassifierSpec::NaiveBayes { .. } => "nb",
            ClassifierSpec::RandomForest(_) => "rf",
            ClassifierSpec::Prior => "prior",
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            ClassifierSpec::NaiveBayes { .. } => "Naive Bayes",
            ClassifierSpec::RandomForest(_) => "Random Forest",
            ClassifierSpec::Prior => "Class prior",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ClassifierSpec::NaiveBayes { alpha } => format!("nb(alpha={alpha})"),
            ClassifierSpec::RandomForest(p) => format!(
                "rf(trees={},candidates={},min_split={},seed={})",
                p.n_trees,
                p.candidate_features
                    .map_or_else(|| "sqrt".to_string(), |c| c.to_string()),
                p.min_samples_split,
                p.seed
            ),
            ClassifierSpec::Prior => "prior".to_string(),
        }
    }

    pub fn fit(&self, table: &DataTable, exec: Execution) -> Result<Model> {
        Ok(match self {
            ClassifierSpec::NaiveBayes { alpha } => Model::NaiveBayes(nb_fit(table, *alpha)?),
            ClassifierSpec::RandomForest(p) => Model::Forest(forest_fit_with(table, p, exec)?),
            ClassifierSpec::Prior => {
                if table.n_rows() == 0 {
                    return Err(Error::EmptyTable("cannot fit a prior on zero rows"));
                }
                let n = table.n_rows() as f64;
                Model::Prior(table.class_counts().iter().map(|&c| c as f64 / n).collect())
            }
        })
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    NaiveBayes(NaiveBayesModel),
    Forest(ForestModel),
    Prior(Vec<f64>),
}

impl Model {
    pub fn predict_proba(&self, row: &[u8]) -> Distribution {
        match self {
            Model::NaiveBayes(m) => m.predict_proba(row),
            Model::Forest(m) => forest_predict_proba(m, row),
            Model::Prior(p) => Distribution::from_raw(p.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MissingPolicy;

    fn table(header: &[&str], rows: &[&[&str]]) -> DataTable {
        let records: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        DataTable::from_records(header, "class", &records, MissingPolicy::AsCategory).unwrap()
    }

    fn d_perfect() -> DataTable {
        table(
            &["A", "class"],
            &[&["1", "M"], &["1", "M"], &["2", "F"], &["2", "F"]],
        )
    }

    fn d_indep() -> DataTable {
        table(
            &["A", "class"],
            &[&["1", "M"], &["1", "F"], &["2", "M"], &["2", "F"]],
        )
    }

    #[test]
    fn nb_laplace() {
        let m = nb_fit(&d_perfect(), 1.0).unwrap();
        assert_eq!(m.likelihood(0, 0, 0), 0.75);
        assert_eq!(m.likelihood(0, 0, 1), 0.25);
        let p = m.predict_proba(&[0]);
        assert!((p.probabilities()[0] - 0.75).abs() < 1e-12);
        assert!((p.probabilities()[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn nb_unsmoothed() {
        let m = nb_fit(&d_perfect(), 0.0).unwrap();
        assert_eq!(m.likelihood(0, 0, 0), 1.0);
        assert_eq!(m.likelihood(0, 0, 1), 0.0);
        assert_eq!(m.predict_proba(&[0]).probabilities(), &[1.0, 0.0]);
    }

    #[test]
    fn nb_unseen_code() {
        let m = nb_fit(&d_perfect(), 1.0).unwrap();
        // alpha / (2 + 1·3) for both classes → posterior stays at the prior.
        let p = m.predict_proba(&[7]);
        assert!((p.probabilities()[0] - 0.5).abs() < 1e-12);
        let m0 = nb_fit(&d_perfect(), 0.0).unwrap();
        assert_eq!(m0.predict_proba(&[7]).probabilities(), &[0.5, 0.5]);
    }

    #[test]
    fn nb_single_class_prior() {
        let t = d_perfect().take_rows(&[0, 1]);
        let m = nb_fit(&t, 1.0).unwrap();
        assert_eq!(m.class_priors(), &[1.0, 0.0]);
        assert_eq!(m.predict_proba(&[1]).probabilities(), &[1.0, 0.0]);
        let m0 = nb_fit(&t, 0.0).unwrap();
        // Empty class column falls back to uniform likelihoods.
        assert_eq!(m0.likelihood(0, 0, 1), 0.5);
    }

    #[test]
    fn nb_errors() {
        assert!(nb_fit(&d_perfect().take_rows(&[]), 1.0).is_err());
        assert!(nb_fit(&d_perfect(), -1.0).is_err());
    }

    #[test]
    fn tree_perfect_split() {
        let mut rng = SplitMix64::new(0);
        let tree = tree_fit(&d_perfect(), &mut rng, 1, 2).unwrap();
        assert_eq!(tree.nodes().len(), 3);
        match tree.root() {
            TreeNode::Split {
                attribute,
                children,
                ..
            } => {
                assert_eq!(*attribute, 0);
                assert_eq!(children.len(), 2);
            }
            other => panic!("expected split, got {other:?}"),
        }
        assert_eq!(tree.leaf_counts(&[0]), &[2, 0]);
        assert_eq!(tree.leaf_counts(&[1]), &[0, 2]);
    }

    #[test]
    fn tree_pure_and_independent_are_leaves() {
        let mut rng = SplitMix64::new(0);
        let pure = d_perfect().take_rows(&[0, 1]);
        let tree = tree_fit(&pure, &mut rng, 1, 2).unwrap();
        assert_eq!(tree.nodes(), &[TreeNode::Leaf { counts: vec![2, 0] }]);
        let tree = tree_fit(&d_indep(), &mut rng, 1, 2).unwrap();
        assert_eq!(tree.nodes(), &[TreeNode::Leaf { counts: vec![2, 2] }]);
    }

    #[test]
    fn tree_unseen_category_uses_node_counts() {
        let t = table(
            &["A", "class"],
            &[&["1", "M"], &["1", "M"], &["2", "F"], &["3", "F"]],
        )
        .take_rows(&[0, 1, 2]);
        let mut rng = SplitMix64::new(0);
        let tree = tree_fit(&t, &mut rng, 1, 2).unwrap();
        assert_eq!(tree.leaf_counts(&[2]), &[2, 1]);
        assert_eq!(tree.leaf_counts(&[MISSING]), &[2, 1]);
    }

    #[test]
    fn tree_min_samples_split() {
        let mut rng = SplitMix64::new(0);
        let tree = tree_fit(&d_perfect(), &mut rng, 1, 5).unwrap();
        assert_eq!(tree.nodes().len(), 1);
    }

    #[test]
    fn single_leaf_probabilities() {
        let tree = DecisionTree {
            nodes: vec![TreeNode::Leaf { counts: vec![3, 1] }],
        };
        assert_eq!(tree.predict_proba(&[0]).probabilities(), &[0.75, 0.25]);
    }

    #[test]
    fn forest_averages_trees() {
        let leaf = |c: Vec<u32>| DecisionTree {
            nodes: vec![TreeNode::Leaf { counts: c }],
        };
        let model = ForestModel {
            trees: vec![leaf(vec![1, 0]), leaf(vec![0, 1])],
            candidate_features: 1,
            master_seed: 0,
        };
        assert_eq!(
            forest_predict_proba(&model, &[0]).probabilities(),
            &[0.5, 0.5]
        );
    }

    #[test]
    fn forest_is_deterministic() {
        let t = d_perfect();
        let p = ForestParams::default();
        let a = forest_fit(&t, &p).unwrap();
        let b = forest_fit_with(&t, &p, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trees.len(), 10);
        assert_eq!(a.candidate_features, 1);
    }

    #[test]
    fn forest_single_tree_matches_tree() {
        let t = d_perfect();
        let p = ForestParams {
            n_trees: 1,
            ..ForestParams::default()
        };
        let f = forest_fit(&t, &p).unwrap();
        for v in 0..2u8 {
            assert_eq!(
                forest_predict_proba(&f, &[v]),
                f.trees[0].predict_proba(&[v])
            );
        }
    }

    #[test]
    fn forest_errors() {
        let t = d_perfect();
        assert!(forest_fit(&t.take_rows(&[]), &ForestParams::default()).is_err());
        let p = ForestParams {
            n_trees: 0,
            ..ForestParams::default()
        };
        assert!(forest_fit(&t, &p).is_err());
    }

    #[test]
    fn candidate_default_is_ceil_sqrt() {
        assert_eq!(default_candidate_features(21), 5);
        assert_eq!(default_candidate_features(16), 4);
        assert_eq!(default_candidate_features(1), 1);
    }
}
