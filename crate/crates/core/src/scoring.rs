//! Filter scores for nominal attributes and the ranking built on them.
//!
//! Four scorers work from a single attribute × class contingency table
//! (information gain, gain ratio, Gini decrease, chi-square). ReliefF and
//! FCBF look at all attributes jointly.

use std::fmt;
use std::io::Write;

use crate::data::DataTable;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::SplitMix64;
use crate::stats::{
    attribute_entropy, contingency, gini_of_counts, information_gain, symmetrical_uncertainty,
    ContingencyTable,
};

pub const DEFAULT_RELIEFF_ITERATIONS: usize = 50;
pub const DEFAULT_RELIEFF_NEIGHBORS: usize = 10;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReliefFParams {
    /// Number of sampled instances `m`; every row is used when the table has at most `m` rows.
    pub iterations: usize,
    /// Nearest hits / misses per class, `k`.
    pub neighbors: usize,
    pub seed: u64,
}

impl Default for ReliefFParams {
    fn default() -> Self {
        ReliefFParams {
            iterations: DEFAULT_RELIEFF_ITERATIONS,
            neighbors: DEFAULT_RELIEFF_NEIGHBORS,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoringMethod {
    InfoGain,
    GainRatio,
    Gini,
    Chi2,
    ReliefF(ReliefFParams),
    Fcbf { threshold: f64 },
}

/// Command-line tokens, in canonical order.
pub const METHOD_TOKENS: [&str; 6] = ["infogain", "gainratio", "gini", "chi2", "relieff", "fcbf"];

impl ScoringMethod {
    /// All six methods in canonical order with default parameters.
    pub fn all(seed: u64) -> Vec<ScoringMethod> {
        METHOD_TOKENS
            .iter()
            .map(|t| ScoringMethod::from_token(t, seed).expect("canonical token"))
            .collect()
    }

    /// Parses a lowercase token; ReliefF takes `seed`, everything else uses defaults.
    pub fn from_token(token: &str, seed: u64) -> Option<ScoringMethod> {
        Some(match token {
            "infogain" => ScoringMethod::InfoGain,
            "gainratio" => ScoringMethod::GainRatio,
            "gini" => ScoringMethod::Gini,
            "chi2" => ScoringMethod::Chi2,
            "relieff" => ScoringMethod::ReliefF(ReliefFParams {
                seed,
                ..ReliefFParams::default()
            }),
            "fcbf" => ScoringMethod::Fcbf { threshold: 0.0 },
            _ => return None,
        })
    }

    pub fn token(&self) -> &'static str {
        match self {
            ScoringMethod::InfoGain => "infogain",
            ScoringMethod::GainRatio => "gainratio",
            ScoringMethod::Gini => "gini",
            ScoringMethod::Chi2 => "chi2",
            ScoringMethod::ReliefF(_) => "relieff",
            ScoringMethod::Fcbf { .. } => "fcbf",
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            ScoringMethod::InfoGain => "Info. gain",
            ScoringMethod::GainRatio => "Gain ratio",
            ScoringMethod::Gini => "Gini",
            ScoringMethod::Chi2 => "Chi2",
            ScoringMethod::ReliefF(_) => "ReliefF",
            ScoringMethod::Fcbf { .. } => "FCBF",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScoringMethod::ReliefF(p) if p.iterations == 0 || p.neighbors == 0 => Err(Error::arg(
                "ReliefF needs at least one iteration and one neighbor",
            )),
            ScoringMethod::Fcbf { threshold } if threshold.is_nan() || threshold < 0.0 => {
                Err(Error::arg("FCBF threshold must be >= 0"))
            }
            _ => Ok(()),
        }
    }

    /// Parameter string for report headers.
    pub fn describe(&self) -> String {
        match self {
            ScoringMethod::ReliefF(p) => format!(
                "relieff(m={},k={},seed={})",
                p.iterations, p.neighbors, p.seed
            ),
            ScoringMethod::Fcbf { threshold } => format!("fcbf(threshold={threshold})"),
            other => other.token().to_string(),
        }
    }
}

impl fmt::Display for ScoringMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Scores of one method for every attribute of a table, with the induced ranking.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    pub method: ScoringMethod,
    /// Attribute column indices, ascending.
    pub attributes: Vec<usize>,
    /// `scores[i]` belongs to `attributes[i]`.
    pub scores: Vec<f64>,
    /// Attribute column indices by descending score, ties by ascending index.
    pub ranking: Vec<usize>,
}

impl ScoreVector {
    pub fn new(method: ScoringMethod, attributes: Vec<usize>, scores: Vec<f64>) -> Self {
        assert_eq!(attributes.len(), scores.len());
        let mut order: Vec<usize> = (0..attributes.len()).collect();
        // total_cmp puts NaN above everything; scorers never produce NaN.
        order.sort_by(|&a, &b| {
            scores[b]
                .total_cmp(&scores[a])
                .then(attributes[a].cmp(&attributes[b]))
        });
        let ranking = order.iter().map(|&i| attributes[i]).collect();
        ScoreVector {
            method,
            attributes,
            scores,
            ranking,
        }
    }

    pub fn score_of(&self, attribute: usize) -> Option<f64> {
        self.attributes
            .iter()
            .position(|&a| a == attribute)
            .map(|i| self.scores[i])
    }

    pub fn top(&self, k: usize) -> &[usize] {
        &self.ranking[..k.min(self.ranking.len())]
    }
}

/// H(C) − H(C | A).
pub fn score_info_gain(ct: &ContingencyTable) -> Result<f64> {
    information_gain(ct)
}

/// IG / H(A); zero for a constant attribute.
pub fn score_gain_ratio(ct: &ContingencyTable) -> Result<f64> {
    let ig = information_gain(ct)?;
    let h_a = attribute_entropy(ct);
    if h_a <= 0.0 {
        return Ok(0.0);
    }
    Ok((ig / h_a).clamp(0.0, 1.0))
}

/// Gini(C) − Σ_v (n_v / N) · Gini(C | A = v).
pub fn score_gini(ct: &ContingencyTable) -> Result<f64> {
    ct.ensure_nonempty()?;
    let n = ct.grand_total() as f64;
    let split: f64 = (0..ct.n_values())
        .filter(|&v| ct.row_totals()[v] > 0)
        .map(|v| ct.row_totals()[v] as f64 / n * gini_of_counts(ct.row(v)))
        .sum();
    Ok((gini_of_counts(ct.col_totals()) - split).max(0.0))
}

/// Pearson's χ² without continuity correction; cells with zero expectation are skipped.
pub fn score_chi2(ct: &ContingencyTable) -> Result<f64> {
    ct.ensure_nonempty()?;
    let n = ct.grand_total() as f64;
    let mut chi2 = 0.0;
    for v in 0..ct.n_values() {
        let row = ct.row_totals()[v];
        if row == 0 {
            continue;
        }
        for c in 0..ct.n_classes() {
            let col = ct.col_totals()[c];
            if col == 0 {
                continue;
            }
            let expected = row as f64 * col as f64 / n;
            let d = ct.count(v, c) as f64 - expected;
            chi2 += d * d / expected;
        }
    }
    Ok(chi2)
}

/// Symmetrical uncertainty between an attribute and the class.
pub fn score_su(ct: &ContingencyTable) -> Result<f64> {
    symmetrical_uncertainty(ct)
}

fn contingency_score(method: &ScoringMethod, ct: &ContingencyTable) -> Result<f64> {
    match method {
        ScoringMethod::InfoGain => score_info_gain(ct),
        ScoringMethod::GainRatio => score_gain_ratio(ct),
        ScoringMethod::Gini => score_gini(ct),
        ScoringMethod::Chi2 => score_chi2(ct),
        _ => unreachable!("not a contingency scorer"),
    }
}

/// ReliefF weights for `attribute_indices` (in that order).
///
/// Distance between rows is the number of attributes (among
/// `attribute_indices`) on which they differ; missing codes compare equal to
/// each other. For each sampled instance R the `k` nearest rows of its own
/// class (hits) and of every other class (misses) are found, ties broken by
/// ascending row index. Each attribute then moves by
/// `Σ_C P(C)/(1−P(class R))·mean_miss_diff_C − mean_hit_diff`, averaged over
/// sampled instances. Fewer than `k` candidates means all of them are used;
/// no hits at all means the hit term is zero.
pub fn score_relieff(
    table: &DataTable,
    attribute_indices: &[usize],
    params: ReliefFParams,
) -> Result<Vec<f64>> {
    ScoringMethod::ReliefF(params).validate()?;
    for &a in attribute_indices {
        table.check_attribute(a)?;
    }
    let n = table.n_rows();
    if n < 2 {
        return Err(Error::arg("ReliefF needs at least 2 rows"));
    }
    let class_counts = table.class_counts();
    if class_counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::arg("ReliefF needs at least 2 classes present"));
    }
    let n_attr = attribute_indices.len();
    if n_attr == 0 {
        return Ok(Vec::new());
    }
    let n_classes = table.n_classes();
    let k = params.neighbors;
    let priors: Vec<f64> = class_counts.iter().map(|&c| c as f64 / n as f64).collect();

    // Row-major copy for cache-friendly distance computation.
    let mut matrix = vec![0u8; n * n_attr];
    for (j, &a) in attribute_indices.iter().enumerate() {
        for (r, &code) in table.column(a).iter().enumerate() {
            matrix[r * n_attr + j] = code;
        }
    }
    let classes = table.class_codes();

    let mut sample: Vec<usize> = (0..n).collect();
    if n > params.iterations {
        let mut rng = SplitMix64::new(params.seed);
        sample = rng.choose_multiple(&mut sample, params.iterations);
        sample.sort_unstable();
    }

    // buckets[class][distance] holds the first k rows (ascending) at that distance.
    let mut buckets: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); n_attr + 1]; n_classes];
    let mut weights = vec![0.0f64; n_attr];
    let mut hit_sum = vec![0.0f64; n_attr];
    let mut miss_sum = vec![0.0f64; n_attr];
    let mut miss_total = vec![0.0f64; n_attr];
    let mut nearest: Vec<u32> = Vec::with_capacity(k);

    for &r in &sample {
        for per_class in buckets.iter_mut() {
            for b in per_class.iter_mut() {
                b.clear();
            }
        }
        let target = &matrix[r * n_attr..(r + 1) * n_attr];
        for (other, row) in matrix.chunks_exact(n_attr).enumerate() {
            if other == r {
                continue;
            }
            let d = row.iter().zip(target).filter(|(a, b)| a != b).count();
            let bucket = &mut buckets[classes[other] as usize][d];
            if bucket.len() < k {
                bucket.push(other as u32);
            }
        }

        let own = classes[r] as usize;
        miss_total.iter_mut().for_each(|w| *w = 0.0);
        let mut hit_count = 0usize;
        for class in 0..n_classes {
            nearest.clear();
            for b in &buckets[class] {
                let take = (k - nearest.len()).min(b.len());
                nearest.extend_from_slice(&b[..take]);
                if nearest.len() == k {
                    break;
                }
            }
            if class == own {
                hit_count = nearest.len();
                accumulate_diffs(&matrix, n_attr, target, &nearest, &mut hit_sum);
            } else if !nearest.is_empty() {
                accumulate_diffs(&matrix, n_attr, target, &nearest, &mut miss_sum);
                let w = priors[class] / (1.0 - priors[own]);
                let used = nearest.len() as f64;
                for (t, &s) in miss_total.iter_mut().zip(&miss_sum) {
                    *t += w * (s / used);
                }
            }
        }
        for a in 0..n_attr {
            let hit = if hit_count > 0 {
                hit_sum[a] / hit_count as f64
            } else {
                0.0
            };
            weights[a] += miss_total[a] - hit;
        }
    }

    let m = sample.len() as f64;
    Ok(weights.into_iter().map(|w| w / m).collect())
}

/// Overwrites `out[a]` with the number of `rows` whose attribute `a` differs from `target`.
fn accumulate_diffs(matrix: &[u8], n_attr: usize, target: &[u8], rows: &[u32], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for &row in rows {
        let other = &matrix[row as usize * n_attr..(row as usize + 1) * n_attr];
        for a in 0..n_attr {
            if other[a] != target[a] {
                out[a] += 1.0;
            }
        }
    }
}

/// FCBF scores for every attribute of `table` (ascending column order).
///
/// Attributes with SU(A, class) > `threshold` are ordered by descending SU
/// (ties by index). Walking that list, each surviving attribute removes every
/// later attribute F for which SU(predominant, F) ≥ SU(F, class). Survivors
/// score SU(A, class); removed and irrelevant attributes score 0.
pub fn score_fcbf(table: &DataTable, threshold: f64) -> Result<Vec<f64>> {
    ScoringMethod::Fcbf { threshold }.validate()?;
    let attrs = table.attribute_indices();
    let relevance = attrs
        .iter()
        .map(|&a| symmetrical_uncertainty(&contingency(table, a)?))
        .collect::<Result<Vec<f64>>>()?;

    let mut order: Vec<usize> = (0..attrs.len())
        .filter(|&i| relevance[i] > threshold)
        .collect();
    order.sort_by(|&a, &b| relevance[b].total_cmp(&relevance[a]).then(a.cmp(&b)));

    let mut removed = vec![false; attrs.len()];
    for (pos, &p) in order.iter().enumerate() {
        if removed[p] {
            continue;
        }
        let var_p = table.schema().variable(attrs[p]);
        for &q in &order[pos + 1..] {
            if removed[q] {
                continue;
            }
            let var_q = table.schema().variable(attrs[q]);
            let ct = ContingencyTable::from_codes(
                table.column(attrs[p]),
                table.column(attrs[q]),
                var_p.n_categories(),
                var_q.n_categories(),
            );
            let su = if ct.grand_total() == 0 {
                0.0
            } else {
                symmetrical_uncertainty(&ct)?
            };
            if su >= relevance[q] {
                removed[q] = true;
            }
        }
    }

    let mut scores = vec![0.0; attrs.len()];
    for &i in &order {
        if !removed[i] {
            scores[i] = relevance[i];
        }
    }
    Ok(scores)
}

/// Scores every attribute of `table` with `method` and ranks them.
pub fn rank(table: &DataTable, method: &ScoringMethod) -> Result<ScoreVector> {
    rank_with(table, method, Execution::Parallel)
}

pub fn rank_with(table: &DataTable, method: &ScoringMethod, exec: Execution) -> Result<ScoreVector> {
    method.validate()?;
    let attrs = table.attribute_indices();
    if attrs.is_empty() {
        return Err(Error::arg("table has no attributes to rank"));
    }
    let scores = match method {
        ScoringMethod::ReliefF(params) => score_relieff(table, &attrs, *params)?,
        ScoringMethod::Fcbf { threshold } => score_fcbf(table, *threshold)?,
        _ => exec
            .map(attrs.len(), |i| {
                contingency(table, attrs[i]).and_then(|ct| contingency_score(method, &ct))
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?,
    };
    Ok(ScoreVector::new(*method, attrs, scores))
}

/// Table-style score CSV: `attribute_name` then one column per method, rows in
/// the first vector's ranking order. `comment` lines are written first, each
/// prefixed with `# `.
pub fn write_scores_csv<W: Write>(
    mut out: W,
    table: &DataTable,
    vectors: &[ScoreVector],
    comment: &[String],
) -> Result<()> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::arg("no score vectors to write"))?;
    let io = |e| Error::io("<scores csv>", e);
    for line in comment {
        writeln!(out, "# {line}").map_err(io)?;
    }
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["attribute_name".to_string()];
    header.extend(vectors.iter().map(|v| v.method.token().to_string()));
    wtr.write_record(&header)?;
    for &a in &first.ranking {
        let mut rec = vec![table.schema().variable(a).name().to_string()];
        for v in vectors {
            rec.push(v.score_of(a).map_or_else(String::new, |s| s.to_string()));
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(io)?;
    Ok(())
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
    fn scorers_reject_empty_tables() {
        let empty = ContingencyTable::from_rows(&[&[0, 0], &[0, 0]]);
        assert!(score_info_gain(&empty).is_err());
        assert!(score_gain_ratio(&empty).is_err());
        assert!(score_gini(&empty).is_err());
        assert!(score_chi2(&empty).is_err());
    }

    #[test]
    fn chi2_skips_zero_expectation() {
        // An empty attribute category and an empty class column.
        let ct = ContingencyTable::from_rows(&[&[2, 0, 0], &[0, 0, 0], &[0, 2, 0]]);
        assert_eq!(score_chi2(&ct).unwrap(), 4.0);
    }

    #[test]
    fn ranking_ties_go_to_lower_index() {
        let sv = ScoreVector::new(ScoringMethod::Gini, vec![0, 1, 2, 3], vec![0.1, 0.5, 0.1, 0.5]);
        assert_eq!(sv.ranking, vec![1, 3, 0, 2]);
        assert_eq!(sv.top(2), &[1, 3]);
    }

    #[test]
    fn relieff_perfect_and_independent() {
        let p = ReliefFParams {
            iterations: 4,
            neighbors: 1,
            seed: 1,
        };
        assert_eq!(score_relieff(&d_perfect(), &[0], p).unwrap(), vec![1.0]);
        assert_eq!(score_relieff(&d_indep(), &[0], p).unwrap(), vec![-1.0]);
    }

    #[test]
    fn relieff_singleton_class_has_no_hits() {
        // Row 2 is the only F; its hit term is zero and it still sees misses.
        let t = table(
            &["A", "class"],
            &[&["1", "M"], &["1", "M"], &["2", "F"]],
        );
        let w = score_relieff(
            &t,
            &[0],
            ReliefFParams {
                iterations: 10,
                neighbors: 5,
                seed: 0,
            },
        )
        .unwrap();
        // Rows 0,1: hit diff 0, miss diff 1 with weight 1. Row 2: both misses differ, weight 1.
        assert!((w[0] - 1.0).abs() < 1e-12, "{w:?}");
    }

    #[test]
    fn relieff_preconditions() {
        let one_class = table(&["A", "class"], &[&["1", "M"], &["2", "M"], &["2", "F"]])
            .take_rows(&[0, 1]);
        assert!(score_relieff(&one_class, &[0], ReliefFParams::default()).is_err());
        let bad = ReliefFParams {
            neighbors: 0,
            ..ReliefFParams::default()
        };
        assert!(score_relieff(&d_perfect(), &[0], bad).is_err());
    }

    #[test]
    fn fcbf_removes_redundant_copy() {
        let t = table(
            &["A1", "A2", "class"],
            &[
                &["1", "1", "M"],
                &["1", "1", "M"],
                &["2", "2", "F"],
                &["2", "2", "F"],
            ],
        );
        assert_eq!(score_fcbf(&t, 0.0).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn fcbf_threshold_filters() {
        assert_eq!(score_fcbf(&d_perfect(), 0.0).unwrap(), vec![1.0]);
        assert_eq!(score_fcbf(&d_perfect(), 1.0).unwrap(), vec![0.0]);
        assert_eq!(score_fcbf(&d_indep(), 0.0).unwrap(), vec![0.0]);
        assert!(score_fcbf(&d_perfect(), -1.0).is_err());
    }

    #[test]
    fn rank_dispatch() {
        let t = table(
            &["A", "K", "class"],
            &[
                &["1", "x", "M"],
                &["1", "x", "M"],
                &["2", "x", "F"],
                &["2", "x", "F"],
            ],
        );
        let sv = rank(&t, &ScoringMethod::InfoGain).unwrap();
        assert_eq!(sv.ranking, vec![0, 1]);
        assert_eq!(sv.scores, vec![1.0, 0.0]);
        for m in ScoringMethod::all(3) {
            let sv = rank(&t, &m).unwrap();
            assert_eq!(sv.ranking[0], 0, "{m}");
        }
    }

    #[test]
    fn tokens_round_trip() {
        for m in ScoringMethod::all(9) {
            assert_eq!(ScoringMethod::from_token(m.token(), 9), Some(m));
        }
        assert_eq!(ScoringMethod::from_token("mrmr", 0), None);
    }

    #[test]
    fn score_csv_layout() {
        let t = d_perfect();
        let sv = rank(&t, &ScoringMethod::Chi2).unwrap();
        let mut buf = Vec::new();
        write_scores_csv(&mut buf, &t, &[sv], &["seed=42".into()]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# seed=42\nattribute_name,chi2\nA,4\n"
        );
    }
}
