//! The `avlip` command surface. Argument parsing and every command live here
//! so tests can drive them without spawning the binary; the binary only picks
//! the thread count and writes the output.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::constructions::packing_capacity;
use crate::covering::{select_disjoint, Segment};
use crate::error::{Error, Result};
use crate::func_model::{parse_spec, FunctionSpec};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::report::{format_extended_real, format_real, render_csv, render_table, Table};
use crate::seminorms::{strong_avg_function, weak_avg_function, Estimate, StrongOptions, SandwichReport, Verdict};
use crate::shattering::{certify_dyadic_weak, fat_lower_bound_strong, ShatterCertificate, ShatterOutcome};
use crate::variation::total_variation;
use crate::verify::{run_verify, VerifyConfig};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "AVLIP_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Class {
    /// Strong average smoothness at most `L`, via packing witnesses.
    Strong,
    /// Weak average smoothness at most `L`, via dyadic witnesses.
    Weak,
}

#[derive(Debug, Parser)]
#[command(name = "avlip", version, about = "Average smoothness seminorms on [0, 1]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// Read the function (or segment list) from a JSON file.
    #[arg(long, global = true, conflicts_with = "inline")]
    pub spec: Option<PathBuf>,
    /// The function (or segment list) as inline JSON.
    #[arg(long, global = true)]
    pub inline: Option<String>,
    #[arg(long, global = true, default_value_t = crate::seminorms::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = crate::seminorms::DEFAULT_CAP)]
    pub cap: f64,
    /// Grid size for grid-estimated measures.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub grid: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to csv for `verify` and to table otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Exact values at the given points.
    Eval {
        /// Points in [0, 1], as `p/q` or decimals.
        #[arg(long = "at", value_delimiter = ',', required = true)]
        at: Vec<String>,
    },
    /// Variation, both averages, the Lipschitz constant and the chain verdict.
    Seminorms,
    /// Runs every check over the seeded corpus; exits nonzero on a failure.
    Verify {
        /// Number of random functions.
        #[arg(long, default_value_t = crate::corpus::DEFAULT_COUNT)]
        count: usize,
        /// Replace V by V/3 in the variation_sandwich check; the run must then fail.
        #[arg(long)]
        inject_violation: bool,
    },
    /// Disjoint selection from a JSON list of `["p/q", "p/q"]` segments.
    Covering,
    /// Certifies a γ-shattered set for the class of budget `L`.
    Shatter {
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long = "lipschitz", short = 'L')]
        lipschitz: String,
        #[arg(long)]
        gamma: String,
        /// Number of dyadic points for the weak class.
        #[arg(long, default_value_t = 12)]
        points: usize,
    },
}

/// Validated settings shared by the commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub spec: Option<PathBuf>,
    pub inline: Option<String>,
    pub tol: f64,
    pub cap: f64,
    pub grid_n: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let CommonArgs { spec, inline, tol, cap, grid, seed, format, out } = cli.common;
        crate::seminorms::check_positive("tol", tol)?;
        crate::seminorms::check_positive("cap", cap)?;
        if grid < 2 {
            return Err(Error::InvalidArgument(format!("grid size must be at least 2, got {grid}")));
        }
        let default_format = if matches!(cli.command, Command::Verify { .. }) { Format::Csv } else { Format::Table };
        Ok(Self {
            command: cli.command,
            spec,
            inline,
            tol,
            cap,
            grid_n: grid,
            seed,
            format: format.unwrap_or(default_format),
            out,
        })
    }

    /// Parses command-line words, the first being the program name.
    pub fn parse_from<I, T>(args: I) -> std::result::Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
        Self::from_cli(cli).map_err(CliError::Run)
    }

    fn input(&self) -> Result<String> {
        match (&self.spec, &self.inline) {
            (Some(path), None) => std::fs::read_to_string(path)
                .map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display()))),
            (None, Some(text)) => Ok(text.clone()),
            _ => Err(Error::InvalidArgument("give exactly one of --spec and --inline".into())),
        }
    }

    fn function_spec(&self) -> Result<FunctionSpec> {
        parse_spec(&self.input()?)
    }

    fn strong_options(&self) -> StrongOptions {
        StrongOptions { tol: self.tol, cap: self.cap, ..StrongOptions::default() }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(clap::Error),
    Run(Error),
}

/// A rendered report plus the exit verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    /// True iff every verdict in the run passed.
    pub success: bool,
    /// Lines for standard error, such as offending rows.
    pub diagnostics: Vec<String>,
}

pub fn run(config: &RunConfig) -> Result<Output> {
    match &config.command {
        Command::Eval { at } => cmd_eval(config, at),
        Command::Seminorms => cmd_seminorms(config),
        Command::Verify { count, inject_violation } => cmd_verify(config, *count, *inject_violation),
        Command::Covering => cmd_covering(config),
        Command::Shatter { class, lipschitz, gamma, points } => {
            cmd_shatter(config, *class, &parse_rational(lipschitz)?, &parse_rational(gamma)?, *points)
        }
    }
}

/// `value` as a JSON number carrying 12 significant digits, or `"inf"`.
fn json_real(value: f64) -> Value {
    match format_real(value).parse::<f64>() {
        Ok(v) if v.is_finite() => json!(v),
        _ => json!(format_real(value)),
    }
}

fn render(table: &Table, json: Value, format: Format) -> String {
    match format {
        Format::Csv => render_csv(table),
        Format::Table => render_table(table),
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&json).expect("JSON values serialize");
            text.push('\n');
            text
        }
    }
}

fn key_value_table(pairs: &[(&str, String)]) -> Table {
    let mut table = Table::new(["key", "value"]);
    for (k, v) in pairs {
        table.push(vec![k.to_string(), v.clone()]);
    }
    table
}

pub fn cmd_eval(config: &RunConfig, at: &[String]) -> Result<Output> {
    let f = config.function_spec()?.expand()?;
    let mut table = Table::new(["x", "value"]);
    for text in at {
        let x = parse_rational(text)?;
        table.push(vec![format_rational(&x), format_rational(&f.eval(&x)?)]);
    }
    let json = table.to_json();
    Ok(Output { text: render(&table, json, config.format), success: true, diagnostics: Vec::new() })
}

/// Bracket text; divergence reads `∞ (cap exceeded)`.
fn estimate_cell(e: &Estimate) -> String {
    match e.verdict {
        Verdict::DivergentBeyondCap { .. } => "∞ (cap exceeded)".into(),
        Verdict::Finite => format!("[{}, {}]", format_real(e.lower), format_extended_real(&e.upper)),
        Verdict::Unresolved => {
            format!("[{}, {}] (unresolved)", format_real(e.lower), format_extended_real(&e.upper))
        }
    }
}

fn estimate_json(e: &Estimate) -> Value {
    let verdict = match e.verdict {
        Verdict::Finite => json!({ "kind": "finite" }),
        Verdict::DivergentBeyondCap { cap, depth } => {
            json!({ "kind": "divergent_beyond_cap", "cap": json_real(cap), "depth": depth })
        }
        Verdict::Unresolved => json!({ "kind": "unresolved" }),
    };
    let upper = match e.upper {
        crate::extended::Extended::Finite(u) => json_real(u),
        crate::extended::Extended::Infinity => json!("inf"),
    };
    json!({ "lower": json_real(e.lower), "upper": upper, "verdict": verdict })
}

pub fn cmd_seminorms(config: &RunConfig) -> Result<Output> {
    let spec = config.function_spec()?;
    let f = spec.expand()?;
    let weak = weak_avg_function(&f, config.tol)?;
    let strong = strong_avg_function(&f, &config.strong_options())?;
    let lipschitz = f.lipschitz();
    let chain = SandwichReport::assemble(total_variation(&f), weak, strong);
    let verdict = if chain.passed() { "PASS" } else { "FAIL" };
    let mut table = Table::new(["function", "variation", "strong_avg", "weak_avg", "lipschitz", "chain"]);
    table.push(vec![
        spec.kind().to_string(),
        format_rational(&chain.variation),
        estimate_cell(&chain.strong),
        estimate_cell(&chain.weak),
        lipschitz.to_string(),
        verdict.to_string(),
    ]);
    let json = json!({
        "function": spec.kind(),
        "exact": spec.is_exact(),
        "variation": format_rational(&chain.variation),
        "strong_avg": estimate_json(&chain.strong),
        "weak_avg": estimate_json(&chain.weak),
        "lipschitz": lipschitz.to_string(),
        "chain": verdict,
    });
    Ok(Output { text: render(&table, json, config.format), success: chain.passed(), diagnostics: Vec::new() })
}

pub fn cmd_verify(config: &RunConfig, count: usize, inject_violation: bool) -> Result<Output> {
    let report = run_verify(&VerifyConfig {
        seed: config.seed,
        count,
        tol: config.tol,
        cap: config.cap,
        grid_n: config.grid_n,
        inject_violation,
    })?;
    let table = report.table();
    let diagnostics = report
        .failures()
        .map(|r| format!("FAIL {},{},{},{},{}", r.function_id, r.check.name(), r.lhs, r.rhs, r.slack))
        .collect();
    let json = table.to_json();
    Ok(Output { text: render(&table, json, config.format), success: report.passed(), diagnostics })
}

pub fn cmd_covering(config: &RunConfig) -> Result<Output> {
    let segments = Segment::parse_list(&config.input()?)?;
    let selection = select_disjoint(&segments)?;
    let half = &selection.union_measure / Rational::from_integer(2.into());
    let holds = selection.selected_length >= half;
    let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let table = key_value_table(&[
        ("segments", segments.len().to_string()),
        ("indices", list(&selection.indices)),
        ("selected_length", format_rational(&selection.selected_length)),
        ("union_measure", format_rational(&selection.union_measure)),
        ("half_union", format_rational(&half)),
        ("bound_holds", holds.to_string()),
        ("removed", list(&selection.removed)),
    ]);
    let json = json!({
        "segments": segments.len(),
        "indices": selection.indices,
        "selected_length": format_rational(&selection.selected_length),
        "union_measure": format_rational(&selection.union_measure),
        "half_union": format_rational(&half),
        "bound_holds": holds,
        "removed": selection.removed,
    });
    Ok(Output { text: render(&table, json, config.format), success: holds, diagnostics: Vec::new() })
}

pub fn cmd_shatter(
    config: &RunConfig,
    class: Class,
    lipschitz: &Rational,
    gamma: &Rational,
    points: usize,
) -> Result<Output> {
    let (certificate, expected, failures) = match class {
        Class::Strong => {
            let expected = packing_capacity(gamma, lipschitz)?.to_usize();
            let (_, cert) = fat_lower_bound_strong(lipschitz, gamma)?;
            (Some(cert), expected, 0)
        }
        Class::Weak => match certify_dyadic_weak(points, gamma, lipschitz, config.tol)? {
            ShatterOutcome::Certified(cert) => (Some(cert), None, 0),
            ShatterOutcome::Failed(f) => (None, None, f.failures.len()),
        },
    };
    let class_name = match class {
        Class::Strong => "strong",
        Class::Weak => "weak",
    };
    let summary = certificate.as_ref().map(summarize);
    let certified = summary.as_ref().is_some_and(|s| s.complete);
    let mut pairs: Vec<(&str, Value)> = vec![
        ("class", json!(class_name)),
        ("lipschitz", json!(format_rational(lipschitz))),
        ("gamma", json!(format_rational(gamma))),
    ];
    if let Some(e) = expected {
        pairs.push(("expected_points", json!(e)));
    }
    if let Some(s) = &summary {
        pairs.extend([
            ("points", json!(s.points)),
            ("labelings", json!(s.labelings)),
            ("complete", json!(s.complete)),
            ("min_margin", json!(s.min_margin)),
            ("max_seminorm", s.max_seminorm.clone()),
        ]);
    } else {
        pairs.push(("failed_labelings", json!(failures)));
    }
    pairs.push(("verdict", json!(if certified { "CERTIFIED" } else { "FAILED" })));
    let cells: Vec<(&str, String)> = pairs
        .iter()
        .map(|(k, v)| match v {
            Value::String(s) => (*k, s.clone()),
            other => (*k, other.to_string()),
        })
        .collect();
    let table = key_value_table(&cells);
    let json = Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect());
    Ok(Output { text: render(&table, json, config.format), success: certified, diagnostics: Vec::new() })
}

struct Summary {
    points: usize,
    labelings: usize,
    complete: bool,
    min_margin: String,
    /// Exact Lipschitz bound as `"p/q"` when every witness has one, else a
    /// real upper bound.
    max_seminorm: Value,
}

fn summarize(cert: &ShatterCertificate) -> Summary {
    let max_seminorm = match cert.records.iter().filter_map(|r| r.lipschitz.clone()).max() {
        Some(lip) if cert.records.iter().all(|r| r.lipschitz.is_some()) => json!(lip.to_string()),
        _ => json_real(cert.max_seminorm().as_f64()),
    };
    Summary {
        points: cert.instance.len(),
        labelings: cert.labelings(),
        complete: cert.is_complete() && cert.records.iter().all(|r| r.passed()),
        min_margin: format_rational(&cert.min_margin()),
        max_seminorm,
    }
}

/// Worker threads requested through [`THREADS_ENV`], if any.
pub fn threads_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got `{text}`")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        RunConfig::parse_from(std::iter::once("avlip").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn rejects_bad_numbers() {
        let parse = |args: &[&str]| RunConfig::parse_from(std::iter::once("avlip").chain(args.iter().copied()));
        assert!(matches!(parse(&["seminorms", "--tol", "0"]), Err(CliError::Run(_))));
        assert!(matches!(parse(&["seminorms", "--cap=-1"]), Err(CliError::Run(_))));
        assert!(matches!(parse(&["seminorms", "--grid", "1"]), Err(CliError::Run(_))));
        assert!(matches!(parse(&["frobnicate"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn eval_identity() {
        let c = config(&["eval", "--inline", r#"{"kind":"plf","breakpoints":["0","1"],"values":["0","1"]}"#, "--at", "1/3,0.5", "--format", "csv"]);
        let out = run(&c).unwrap();
        assert_eq!(out.text, "x,value\n1/3,1/3\n1/2,1/2\n");
    }

    #[test]
    fn seminorms_identity_row() {
        let c = config(&["seminorms", "--inline", r#"{"kind":"plf","breakpoints":["0","1"],"values":["0","1"]}"#, "--format", "csv"]);
        let out = run(&c).unwrap();
        assert!(out.success);
        let row = out.text.lines().nth(1).unwrap();
        assert!(row.starts_with("plf,1,"), "{row}");
        assert!(row.ends_with(",1,PASS"), "{row}");
    }

    #[test]
    fn seminorms_step_reports_divergence() {
        let step = r#"{"kind":"step","jump_points":["1/2"],"point_values":["0"],"levels":["0","1"]}"#;
        let out = run(&config(&["seminorms", "--inline", step])).unwrap();
        assert!(out.success);
        assert!(out.text.contains("∞ (cap exceeded)"), "{}", out.text);
        let json: Value = serde_json::from_str(&run(&config(&["seminorms", "--inline", step, "--format", "json"])).unwrap().text).unwrap();
        assert_eq!(json["variation"], "1");
        assert_eq!(json["strong_avg"]["verdict"]["kind"], "divergent_beyond_cap");
        assert_eq!(json["chain"], "PASS");
    }

    #[test]
    fn covering_example() {
        let c = config(&["covering", "--inline", r#"[["0","2"],["1","3"],["2","4"]]"#, "--format", "json"]);
        let out = run(&c).unwrap();
        assert!(out.success);
        let json: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(json["union_measure"], "4");
        assert_eq!(json["bound_holds"], true);
    }

    #[test]
    fn shatter_strong_packing() {
        let out = run(&config(&["shatter", "--class", "strong", "-L", "1", "--gamma", "1/4", "--format", "json"])).unwrap();
        assert!(out.success);
        let json: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(json["points"], 3);
        assert_eq!(json["expected_points"], 3);
        assert_eq!(json["labelings"], 8);
        assert_eq!(json["max_seminorm"], "1");
    }

    #[test]
    fn shatter_weak_needs_small_gamma() {
        let c = config(&["shatter", "--class", "weak", "-L", "1", "--gamma", "1/5", "--points", "3"]);
        assert!(matches!(run(&c), Err(Error::Precondition(_))));
    }

    #[test]
    fn spec_source_is_required() {
        assert!(run(&config(&["seminorms"])).is_err());
    }
}
