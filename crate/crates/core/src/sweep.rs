//! Top-`k` sweeps: rank the attributes once per scoring method, then
//! cross-validate every classifier on the `k` best attributes for each `k` in
//! a range, all cells sharing one fold plan.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::classifiers::ClassifierSpec;
use crate::data::DataTable;
use crate::error::{Error, Result};
use crate::evaluation::{cross_validate_with, stratified_folds, EvaluationReport, DEFAULT_FOLDS};
use crate::exec::Execution;
use crate::scoring::{rank_with, ScoreVector, ScoringMethod, DEFAULT_SEED};
use crate::VERSION;

pub const DEFAULT_K_MIN: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub methods: Vec<ScoringMethod>,
    pub classifiers: Vec<ClassifierSpec>,
    pub k_min: usize,
    pub k_max: usize,
    pub folds: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl SweepConfig {
    /// All six scorers, Naive Bayes and Random Forest, `k` from 2 to every
    /// attribute, 10 folds, seed 42.
    pub fn for_table(table: &DataTable) -> Self {
        SweepConfig {
            methods: ScoringMethod::all(DEFAULT_SEED),
            classifiers: vec![
                ClassifierSpec::naive_bayes(),
                ClassifierSpec::random_forest(DEFAULT_SEED),
            ],
            k_min: DEFAULT_K_MIN,
            k_max: table.n_attributes(),
            folds: DEFAULT_FOLDS,
            seed: DEFAULT_SEED,
            execution: Execution::Parallel,
        }
    }

    pub fn validate(&self, n_attributes: usize) -> Result<()> {
        if self.methods.is_empty() || self.classifiers.is_empty() {
            return Err(Error::arg("sweep needs at least one method and one classifier"));
        }
        if !(2 <= self.k_min && self.k_min <= self.k_max && self.k_max <= n_attributes) {
            return Err(Error::arg(format!(
                "need 2 <= k_min ({}) <= k_max ({}) <= #attributes ({n_attributes})",
                self.k_min, self.k_max
            )));
        }
        for m in &self.methods {
            m.validate()?;
        }
        Ok(())
    }

    fn header(&self, table: &DataTable) -> String {
        let methods: Vec<String> = self.methods.iter().map(ScoringMethod::describe).collect();
        let classifiers: Vec<String> = self.classifiers.iter().map(ClassifierSpec::describe).collect();
        format!(
            "fsbench {VERSION} sweep seed={} folds={} k={}..{} rows={} methods={} classifiers={}",
            self.seed,
            self.folds,
            self.k_min,
            self.k_max,
            table.n_rows(),
            methods.join(";"),
            classifiers.join(";")
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    /// Index into [`SweepResult::methods`].
    pub method: usize,
    /// Index into [`SweepResult::classifiers`].
    pub classifier: usize,
    pub k: usize,
    /// The first `k` entries of the method's ranking (column indices).
    pub attributes: Vec<usize>,
    pub report: Arc<EvaluationReport>,
}

impl SweepCell {
    pub fn ca(&self) -> f64 {
        self.report.ca
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub attribute_names: Vec<String>,
    pub methods: Vec<ScoringMethod>,
    pub classifiers: Vec<ClassifierSpec>,
    /// One ranking per method, same order as `methods`.
    pub rankings: Vec<ScoreVector>,
    /// Method-major, then classifier, then ascending `k`.
    pub cells: Vec<SweepCell>,
    pub k_min: usize,
    pub k_max: usize,
    pub folds: usize,
    pub seed: u64,
    /// Self-describing parameter line, embedded in every report file.
    pub header: String,
}

impl SweepResult {
    pub fn cell(&self, method: usize, classifier: usize, k: usize) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.classifier == classifier && c.k == k)
    }

    pub fn attribute_label(&self, column: usize) -> &str {
        &self.attribute_names[column]
    }

    fn joined_names(&self, attrs: &[usize]) -> String {
        attrs
            .iter()
            .map(|&a| self.attribute_label(a))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Runs the sweep. Each distinct (classifier, attribute set) pair is
/// evaluated once; attributes are fed to the classifier in ascending column
/// order, so a cell's result depends only on the set of selected attributes.
pub fn run_sweep(table: &DataTable, config: &SweepConfig) -> Result<SweepResult> {
    config.validate(table.n_attributes())?;
    let exec = config.execution;
    let rankings = config
        .methods
        .iter()
        .map(|m| rank_with(table, m, exec))
        .collect::<Result<Vec<_>>>()?;
    let plan = stratified_folds(table, config.folds, config.seed)?;

    let mut jobs: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut job_index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut pending = Vec::new();
    for (mi, ranking) in rankings.iter().enumerate() {
        for ci in 0..config.classifiers.len() {
            for k in config.k_min..=config.k_max {
                let attributes = ranking.top(k).to_vec();
                let mut key = attributes.clone();
                key.sort_unstable();
                let job = *job_index.entry((ci, key.clone())).or_insert_with(|| {
                    jobs.push((ci, key));
                    jobs.len() - 1
                });
                pending.push((mi, ci, k, attributes, job));
            }
        }
    }

    let reports = exec.map(jobs.len(), |j| {
        let (ci, attrs) = &jobs[j];
        let subset = table.select_columns(attrs)?;
        cross_validate_with(&subset, &config.classifiers[*ci], &plan, exec).map(Arc::new)
    });
    let reports = reports.into_iter().collect::<Result<Vec<_>>>()?;

    let cells = pending
        .into_iter()
        .map(|(method, classifier, k, attributes, job)| SweepCell {
            method,
            classifier,
            k,
            attributes,
            report: Arc::clone(&reports[job]),
        })
        .collect();

    Ok(SweepResult {
        attribute_names: table
            .schema()
            .variables()
            .iter()
            .map(|v| v.name().to_string())
            .collect(),
        methods: config.methods.clone(),
        classifiers: config.classifiers.clone(),
        rankings,
        cells,
        k_min: config.k_min,
        k_max: config.k_max,
        folds: config.folds,
        seed: config.seed,
        header: config.header(table),
    })
}

/// Highest CA; ties go to smaller `k`, then earlier method, then earlier classifier.
pub fn best_cell(result: &SweepResult) -> Result<&SweepCell> {
    let mut best: Option<&SweepCell> = None;
    for cell in &result.cells {
        let better = match best {
            None => true,
            Some(b) => {
                cell.ca() > b.ca()
                    || (cell.ca() == b.ca()
                        && (cell.k, cell.method, cell.classifier) < (b.k, b.method, b.classifier))
            }
        };
        if better {
            best = Some(cell);
        }
    }
    best.ok_or_else(|| Error::arg("sweep has no cells"))
}

/// Long-form CSV: `method,classifier,k,ca,attributes`, attributes `|`-joined.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!("# {}\nmethod,classifier,k,ca,attributes\n", result.header);
    for cell in &result.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            result.methods[cell.method].token(),
            result.classifiers[cell.classifier].token(),
            cell.k,
            cell.ca(),
            csv_field(&result.joined_names(&cell.attributes))
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Static 800×500 line chart of CA against `k` for one classifier, one
/// polyline per method.
pub fn sweep_svg(result: &SweepResult, classifier: usize) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 160.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 60.0;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;

    let cells: Vec<&SweepCell> = result
        .cells
        .iter()
        .filter(|c| c.classifier == classifier)
        .collect();
    let (mut lo, mut hi) = cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.ca()), hi.max(c.ca()))
        });
    if !lo.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    // Axis in whole percent, padded to multiples of 5.
    let mut y_lo = ((lo * 100.0 / 5.0).floor() * 5.0).max(0.0);
    let mut y_hi = ((hi * 100.0 / 5.0).ceil() * 5.0).min(100.0);
    if y_hi <= y_lo {
        y_lo = (y_lo - 5.0).max(0.0);
        y_hi = (y_lo + 10.0).min(100.0);
    }
    let (k_lo, k_hi) = (result.k_min as f64, result.k_max as f64);
    let x_of = |k: f64| {
        if k_hi > k_lo {
            LEFT + (k - k_lo) / (k_hi - k_lo) * plot_w
        } else {
            LEFT + plot_w / 2.0
        }
    };
    let y_of = |ca: f64| TOP + (1.0 - (ca * 100.0 - y_lo) / (y_hi - y_lo)) * plot_h;

    let title = result.classifiers[classifier].display_name();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<!-- {} -->", xml_escape(&result.header).replace("--", "- -"));
    let _ = writeln!(s, "<rect width=\"800\" height=\"500\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{} classification accuracy by number of attributes</text>",
        LEFT + plot_w / 2.0,
        xml_escape(title)
    );

    // Grid and y ticks every 5 points.
    let mut tick = y_lo;
    while tick <= y_hi + 1e-9 {
        let y = y_of(tick / 100.0);
        let _ = writeln!(
            s,
            "<line x1=\"{LEFT:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>",
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{tick:.0}%</text>",
            LEFT - 8.0,
            y + 4.0
        );
        tick += 5.0;
    }
    for k in result.k_min..=result.k_max {
        let x = x_of(k as f64);
        let _ = writeln!(
            s,
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{k}</text>",
            TOP + plot_h + 18.0
        );
    }
    let _ = writeln!(
        s,
        "<rect x=\"{LEFT:.1}\" y=\"{TOP:.1}\" width=\"{plot_w:.1}\" height=\"{plot_h:.1}\" fill=\"none\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">number of attributes (k)</text>",
        LEFT + plot_w / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">CA (%)</text>",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (mi, method) in result.methods.iter().enumerate() {
        let color = PALETTE[mi % PALETTE.len()];
        let points: Vec<String> = cells
            .iter()
            .filter(|c| c.method == mi)
            .map(|c| format!("{:.1},{:.1}", x_of(c.k as f64), y_of(c.ca())))
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
            points.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * mi as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 24.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            lx + 30.0,
            ly + 4.0,
            xml_escape(method.display_name())
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Human-readable summary: the best cell, then the top three attributes of each method.
pub fn summary_text(result: &SweepResult) -> Result<String> {
    let best = best_cell(result)?;
    let mut s = format!("# {}\n", result.header);
    let _ = writeln!(
        s,
        "best: method={} classifier={} k={} ca={:.4} attributes={}",
        result.methods[best.method].token(),
        result.classifiers[best.classifier].token(),
        best.k,
        best.ca(),
        result.joined_names(&best.attributes)
    );
    for ranking in &result.rankings {
        let top: Vec<String> = ranking
            .top(3)
            .iter()
            .map(|&a| {
                format!(
                    "{} ({})",
                    result.attribute_label(a),
                    ranking.score_of(a).unwrap_or(f64::NAN)
                )
            })
            .collect();
        let _ = writeln!(s, "top-3 {}: {}", ranking.method.token(), top.join(", "));
    }
    Ok(s)
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `sweep.csv` and one `sweep_<classifier>.svg` per classifier into `out_dir`.
pub fn emit_report(result: &SweepResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = vec![write_file(out_dir.join("sweep.csv"), &sweep_csv(result))?];
    for (ci, clf) in result.classifiers.iter().enumerate() {
        written.push(write_file(
            out_dir.join(format!("sweep_{}.svg", clf.token())),
            &sweep_svg(result, ci),
        )?);
    }
    Ok(written)
}

pub fn write_summary(result: &SweepResult, out_dir: &Path) -> Result<PathBuf> {
    write_file(out_dir.join("summary.txt"), &summary_text(result)?)
}
