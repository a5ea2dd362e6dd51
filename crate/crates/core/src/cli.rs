//! The `fsbench` command line: `generate`, `rank`, `evaluate` and `sweep`.
//!
//! Exit codes: 0 on success, 1 for data or I/O errors, 2 for usage errors.
//! Attribute numbers on the command line (`--features`, `--informative`)
//! are 1-based positions among the non-class columns.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classifiers::{ClassifierSpec, ForestParams, CLASSIFIER_TOKENS, DEFAULT_ALPHA, DEFAULT_TREES};
use crate::data::{read_csv, write_csv, DataTable, IngestStats, MissingPolicy};
use crate::error::Error;
use crate::evaluation::{cross_validate, stratified_folds, write_reports_csv, EvaluationReport, DEFAULT_FOLDS};
use crate::scoring::{
    rank, write_scores_csv, ReliefFParams, ScoringMethod, DEFAULT_RELIEFF_ITERATIONS,
    DEFAULT_RELIEFF_NEIGHBORS, DEFAULT_SEED, METHOD_TOKENS,
};
use crate::sweep::{emit_report, run_sweep, summary_text, write_summary, SweepConfig, DEFAULT_K_MIN};
use crate::synth::{generate, SynthSpec, SURVEY_CLASS_RATIO};
use crate::{Execution, VERSION};

#[derive(Debug, Parser)]
#[command(name = "fsbench", version, about = "Feature selection and classification benchmarks for nominal survey data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic survey table with planted informative attributes.
    Generate(GenerateArgs),
    /// Score and rank every attribute with one or more scoring methods.
    Rank(RankArgs),
    /// Cross-validate classifiers and print AUC, CA, F1, precision and recall.
    Evaluate(EvaluateArgs),
    /// Evaluate classifiers on the top-k ranked attributes for increasing k.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Missing {
    AsCategory,
    DropRow,
}

impl From<Missing> for MissingPolicy {
    fn from(m: Missing) -> Self {
        match m {
            Missing::AsCategory => MissingPolicy::AsCategory,
            Missing::DropRow => MissingPolicy::DropRow,
        }
    }
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV with a header line.
    #[arg(long)]
    input: PathBuf,
    /// Name of the class column.
    #[arg(long)]
    target: String,
    /// Handling of empty attribute fields.
    #[arg(long, value_enum, default_value = "as-category")]
    missing: Missing,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ScorerArgs {
    /// Comma-separated scorers (infogain, gainratio, gini, chi2, relieff, fcbf) or `all`.
    #[arg(long, default_value = "all")]
    scorers: String,
    #[arg(long, default_value_t = DEFAULT_RELIEFF_ITERATIONS)]
    relieff_m: usize,
    #[arg(long, default_value_t = DEFAULT_RELIEFF_NEIGHBORS)]
    relieff_k: usize,
    #[arg(long, default_value_t = 0.0)]
    fcbf_threshold: f64,
}

#[derive(Debug, Args)]
struct ClassifierArgs {
    /// Comma-separated classifiers (nb, rf).
    #[arg(long, default_value = "nb,rf")]
    classifiers: String,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    /// Naive Bayes Laplace smoothing.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Random Forest size.
    #[arg(long, default_value_t = DEFAULT_TREES)]
    trees: usize,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long, default_value_t = 21)]
    attributes: usize,
    #[arg(long, default_value_t = 5)]
    categories: usize,
    /// Planted attributes as `number:strength` pairs, e.g. `3:0.6,18:0.5`.
    #[arg(long, default_value = "")]
    informative: String,
    #[arg(long, default_value_t = SURVEY_CLASS_RATIO)]
    class_ratio: f64,
    #[arg(long, default_value_t = 0.0)]
    missing_rate: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scorers: ScorerArgs,
    /// Output CSV (standard output if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    classifiers: ClassifierArgs,
    /// Attributes to use, as 1-based numbers or column names; all if omitted.
    #[arg(long)]
    features: Option<String>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    scorers: ScorerArgs,
    #[command(flatten)]
    classifiers: ClassifierArgs,
    #[arg(long, default_value_t = DEFAULT_K_MIN)]
    min_k: usize,
    /// Defaults to every attribute.
    #[arg(long)]
    max_k: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

/// Runs the CLI with the given arguments (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a, stdout),
        Command::Rank(a) => cmd_rank(a, stdout),
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

fn parse_scorers(args: &ScorerArgs, seed: u64) -> CliResult<Vec<ScoringMethod>> {
    let tokens: Vec<&str> = if args.scorers.trim() == "all" {
        METHOD_TOKENS.to_vec()
    } else {
        args.scorers.split(',').map(str::trim).collect()
    };
    let mut methods = Vec::new();
    for t in tokens {
        let m = match t {
            "relieff" => ScoringMethod::ReliefF(ReliefFParams {
                iterations: args.relieff_m,
                neighbors: args.relieff_k,
                seed,
            }),
            "fcbf" => ScoringMethod::Fcbf {
                threshold: args.fcbf_threshold,
            },
            other => ScoringMethod::from_token(other, seed).ok_or_else(|| {
                usage(format!(
                    "unknown scorer `{other}`; valid scorers: {}, all",
                    METHOD_TOKENS.join(", ")
                ))
            })?,
        };
        m.validate().map_err(|e| usage(e.to_string()))?;
        if methods.contains(&m) {
            return Err(usage(format!("scorer `{t}` listed twice")));
        }
        methods.push(m);
    }
    if methods.is_empty() {
        return Err(usage("no scorers given"));
    }
    Ok(methods)
}

fn parse_classifiers(args: &ClassifierArgs, seed: u64) -> CliResult<Vec<ClassifierSpec>> {
    if args.folds < 2 {
        return Err(usage(format!("--folds must be >= 2, got {}", args.folds)));
    }
    if !(args.alpha >= 0.0 && args.alpha.is_finite()) {
        return Err(usage("--alpha must be >= 0"));
    }
    if args.trees == 0 {
        return Err(usage("--trees must be >= 1"));
    }
    let mut specs = Vec::new();
    for t in args.classifiers.split(',').map(str::trim) {
        let spec = match t {
            "nb" => ClassifierSpec::NaiveBayes { alpha: args.alpha },
            "rf" => ClassifierSpec::RandomForest(ForestParams {
                n_trees: args.trees,
                seed,
                ..ForestParams::default()
            }),
            other => {
                return Err(usage(format!(
                    "unknown classifier `{other}`; valid classifiers: {}",
                    CLASSIFIER_TOKENS.join(", ")
                )))
            }
        };
        if specs.contains(&spec) {
            return Err(usage(format!("classifier `{t}` listed twice")));
        }
        specs.push(spec);
    }
    Ok(specs)
}

fn load(args: &InputArgs) -> CliResult<(DataTable, IngestStats)> {
    Ok(read_csv(&args.input, &args.target, args.missing.into())?)
}

fn missing_token(m: Missing) -> &'static str {
    match m {
        Missing::AsCategory => "as-category",
        Missing::DropRow => "drop-row",
    }
}

fn input_header(cmd: &str, args: &InputArgs, stats: &IngestStats, table: &DataTable) -> String {
    format!(
        "fsbench {VERSION} {cmd} input={} target={} missing={} seed={} rows={} dropped={} rejected_class={}",
        args.input.display(),
        args.target,
        missing_token(args.missing),
        args.seed,
        table.n_rows(),
        stats.dropped_missing,
        stats.rejected_class
    )
}

fn write_out(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn cmd_generate(args: GenerateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut informative = Vec::new();
    for item in args.informative.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (num, strength) = item
            .split_once(':')
            .ok_or_else(|| usage(format!("--informative entry `{item}` is not number:strength")))?;
        let num: usize = num
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad attribute number in `{item}`")))?;
        let strength: f64 = strength
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad strength in `{item}`")))?;
        if num == 0 {
            return Err(usage("attribute numbers start at 1"));
        }
        informative.push((num - 1, strength));
    }
    let spec = SynthSpec {
        n_rows: args.rows,
        n_attributes: args.attributes,
        n_categories: args.categories,
        informative,
        class_ratio: args.class_ratio,
        missing_rate: args.missing_rate,
        seed: args.seed,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let table = generate(&spec)?;
    write_csv(&table, &args.out)?;

    let names = spec.attribute_names();
    let manifest = Manifest {
        tool: "fsbench",
        version: VERSION,
        seed: spec.seed,
        rows: spec.n_rows,
        attributes: spec.n_attributes,
        categories: spec.n_categories,
        class_ratio: spec.class_ratio,
        missing_rate: spec.missing_rate,
        informative: spec
            .informative
            .iter()
            .map(|&(a, s)| Planted {
                number: a + 1,
                name: names[a].clone(),
                strength: s,
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let mut manifest_path = args.out.clone().into_os_string();
    manifest_path.push(".json");
    write_out(Path::new(&manifest_path), format!("{json}\n").as_bytes())?;

    let _ = writeln!(
        stdout,
        "wrote {} rows x {} attributes to {} (seed {})",
        spec.n_rows,
        spec.n_attributes,
        args.out.display(),
        spec.seed
    );
    for p in &manifest.informative {
        let _ = writeln!(stdout, "planted {} {} strength={}", p.number, p.name, p.strength);
    }
    Ok(())
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    rows: usize,
    attributes: usize,
    categories: usize,
    class_ratio: f64,
    missing_rate: f64,
    informative: Vec<Planted>,
}

#[derive(Serialize)]
struct Planted {
    number: usize,
    name: String,
    strength: f64,
}

fn cmd_rank(args: RankArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let methods = parse_scorers(&args.scorers, args.input.seed)?;
    let (table, stats) = load(&args.input)?;
    let vectors = methods
        .iter()
        .map(|m| rank(&table, m))
        .collect::<crate::Result<Vec<_>>>()?;
    let described: Vec<String> = methods.iter().map(ScoringMethod::describe).collect();
    let comment = vec![format!(
        "{} scorers={}",
        input_header("rank", &args.input, &stats, &table),
        described.join(";")
    )];
    let mut buf = Vec::new();
    write_scores_csv(&mut buf, &table, &vectors, &comment)?;
    match &args.out {
        Some(path) => write_out(path, &buf)?,
        None => stdout.write_all(&buf).map_err(|e| io_failure(Path::new("<stdout>"), e))?,
    }
    Ok(())
}

/// Resolves `--features` entries (1-based numbers or names) to column indices.
fn resolve_features(table: &DataTable, list: &str) -> CliResult<Vec<usize>> {
    let attrs = table.attribute_indices();
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let col = if let Ok(num) = item.parse::<usize>() {
            if num == 0 || num > attrs.len() {
                return Err(usage(format!(
                    "feature number {num} out of range 1..={}",
                    attrs.len()
                )));
            }
            attrs[num - 1]
        } else {
            match table.schema().index_of(item) {
                Some(c) if c != table.schema().target_index() => c,
                _ => return Err(usage(format!("unknown feature `{item}`"))),
            }
        };
        if out.contains(&col) {
            return Err(usage(format!("feature `{item}` listed twice")));
        }
        out.push(col);
    }
    if out.is_empty() {
        return Err(usage("--features is empty"));
    }
    Ok(out)
}

fn cmd_evaluate(args: EvaluateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let seed = args.input.seed;
    let classifiers = parse_classifiers(&args.classifiers, seed)?;
    let (full, stats) = load(&args.input)?;
    let table = match &args.features {
        Some(list) => {
            let mut cols = resolve_features(&full, list)?;
            cols.sort_unstable();
            full.select_columns(&cols)?
        }
        None => full,
    };
    let plan = stratified_folds(&table, args.classifiers.folds, seed)?;
    let reports = classifiers
        .iter()
        .map(|c| cross_validate(&table, c, &plan))
        .collect::<crate::Result<Vec<_>>>()?;

    let names: Vec<&str> = table
        .attribute_indices()
        .into_iter()
        .map(|a| table.schema().variable(a).name())
        .collect();
    let described: Vec<String> = classifiers.iter().map(ClassifierSpec::describe).collect();
    let header = format!(
        "{} folds={} classifiers={} features={}",
        input_header("evaluate", &args.input, &stats, &table),
        plan.k,
        described.join(";"),
        names.join("|")
    );

    let _ = writeln!(stdout, "# {header}");
    let _ = writeln!(
        stdout,
        "{:<15} {:>7} {:>7} {:>7} {:>9} {:>7}",
        "Method", "AUC", "CA", "F1", "Precision", "Recall"
    );
    for (r, c) in reports.iter().zip(&classifiers) {
        let _ = writeln!(
            stdout,
            "{:<15} {:>7} {:>7.3} {:>7.3} {:>9.3} {:>7.3}",
            c.display_name(),
            r.auc.map_or_else(|| "-".to_string(), |a| format!("{a:.3}")),
            r.ca,
            r.f1,
            r.precision,
            r.recall
        );
    }

    if let Some(path) = &args.out_csv {
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &reports, std::slice::from_ref(&header))?;
        write_out(path, &buf)?;
    }
    if let Some(path) = &args.out_json {
        #[derive(Serialize)]
        struct JsonReport<'a> {
            tool: &'static str,
            version: &'static str,
            parameters: &'a str,
            seed: u64,
            folds: usize,
            n_rows: usize,
            reports: &'a [EvaluationReport],
        }
        let doc = JsonReport {
            tool: "fsbench",
            version: VERSION,
            parameters: &header,
            seed,
            folds: plan.k,
            n_rows: table.n_rows(),
            reports: &reports,
        };
        let json = serde_json::to_string_pretty(&doc).expect("report serializes");
        write_out(path, format!("{json}\n").as_bytes())?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let seed = args.input.seed;
    let methods = parse_scorers(&args.scorers, seed)?;
    let classifiers = parse_classifiers(&args.classifiers, seed)?;
    let (table, _stats) = load(&args.input)?;
    let config = SweepConfig {
        methods,
        classifiers,
        k_min: args.min_k,
        k_max: args.max_k.unwrap_or(table.n_attributes()),
        folds: args.classifiers.folds,
        seed,
        execution: Execution::Parallel,
    };
    config
        .validate(table.n_attributes())
        .map_err(|e| usage(e.to_string()))?;
    let result = run_sweep(&table, &config)?;
    emit_report(&result, &args.out_dir)?;
    write_summary(&result, &args.out_dir)?;
    let _ = write!(stdout, "{}", summary_text(&result)?);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("fsbench").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&[]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["generate", "--rows", "0", "--out", "x.csv"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn unknown_scorer_lists_valid_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        fs::write(&path, "a,gender\n1,M\n2,F\n").unwrap();
        let (code, _, err) = run_args(&[
            "rank",
            "--input",
            path.to_str().unwrap(),
            "--target",
            "gender",
            "--scorers",
            "mrmr",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("infogain, gainratio, gini, chi2, relieff, fcbf"), "{err}");
    }

    #[test]
    fn missing_file_exits_1() {
        let (code, _, err) = run_args(&[
            "rank",
            "--input",
            "/nonexistent/d.csv",
            "--target",
            "gender",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("/nonexistent/d.csv"));
    }
}
