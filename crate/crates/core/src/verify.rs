//! Cross-module verification over the corpus. Every function gets six
//! checks, each reported as one row holding the binding inequality
//! `lhs <= rhs + slack`:
//!
//! - `markov_chain`: `wa <= sa <= Lip`;
//! - `variation_sandwich`: `wa/2 <= V <= sa`;
//! - `homogeneity`: `‖αf‖ = |α|·‖f‖` for `α ∈ {-2, 1/2, 3}`, both averages;
//! - `quasi_triangle`: `wa(f + g) <= 2(wa(f) + wa(g))` against a partner `g`;
//! - `maximal_domination`: `Λ_f <= M_f` at the nodes and at random points;
//! - `weak_type`: the grid estimate of `m{M_f > t}` is at most `2V/t`.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{build_corpus, CorpusEntry, DEFAULT_COUNT};
use crate::error::Result;
use crate::extended::{Extended, ExtendedReal};
use crate::func_model::{Function, DEFAULT_MAX_JUMPS};
use crate::maximal::Maximal;
use crate::rational::{format_rational, rat, to_f64, Rational};
use crate::report::{format_extended_real, format_real, Table};
use crate::seminorms::{
    strong_avg_function, weak_avg_function, ChainReport, Estimate, StrongOptions, SandwichReport, HALF_WEAK_SLACK,
    STRONG_SLACK,
};
use crate::slope::SlopeEvaluator;
use crate::variation::total_variation;

pub const HOMOGENEITY_FACTORS: [(i64, i64); 3] = [(-2, 1), (1, 2), (3, 1)];
pub const RANDOM_POINTS: usize = 1000;
/// Random points are `k / 10^6`.
pub const POINT_DENOM: i64 = 1_000_000;
/// Levels `2^k` for the weak-type check.
pub const WEAK_TYPE_EXPONENTS: std::ops::RangeInclusive<i32> = -3..=10;
pub const CSV_HEADERS: [&str; 6] = ["function_id", "check_name", "lhs", "rhs", "slack", "verdict"];

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub count: usize,
    pub tol: f64,
    pub cap: f64,
    pub grid_n: usize,
    /// Replace `V` by `V/3` in the `variation_sandwich` check, so the run must fail.
    pub inject_violation: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: DEFAULT_COUNT,
            tol: crate::seminorms::DEFAULT_TOL,
            cap: crate::seminorms::DEFAULT_CAP,
            grid_n: 10_000,
            inject_violation: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Homogeneity,
    MarkovChain,
    MaximalDomination,
    QuasiTriangle,
    VariationSandwich,
    WeakType,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Homogeneity,
        Check::MarkovChain,
        Check::MaximalDomination,
        Check::QuasiTriangle,
        Check::VariationSandwich,
        Check::WeakType,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Homogeneity => "homogeneity",
            Check::MarkovChain => "markov_chain",
            Check::MaximalDomination => "maximal_domination",
            Check::QuasiTriangle => "quasi_triangle",
            Check::VariationSandwich => "variation_sandwich",
            Check::WeakType => "weak_type",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckRow {
    pub function_id: String,
    pub check: Check,
    pub lhs: String,
    pub rhs: String,
    pub slack: String,
    pub passed: bool,
}

impl CheckRow {
    pub fn verdict(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.function_id.clone(),
            self.check.name().to_string(),
            self.lhs.clone(),
            self.rhs.clone(),
            self.slack.clone(),
            self.verdict().to_string(),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    /// Sorted by function id, then check name.
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    pub fn rows_for(&self, check: Check) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(move |r| r.check == check)
    }

    pub fn table(&self) -> Table {
        let mut table = Table::new(CSV_HEADERS);
        for row in &self.rows {
            table.push(row.cells());
        }
        table
    }
}

/// Quantities every check of one function shares.
struct Basics {
    f: Function,
    variation: Rational,
    weak: Estimate,
    strong: Estimate,
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    crate::seminorms::check_positive("tol", config.tol)?;
    crate::seminorms::check_positive("cap", config.cap)?;
    if config.grid_n < 2 {
        return Err(crate::error::Error::InvalidArgument(format!(
            "grid size must be at least 2, got {}",
            config.grid_n
        )));
    }
    let corpus = build_corpus(config.seed, config.count)?;
    let basics: Vec<Basics> = corpus.par_iter().map(|e| basics(e, config)).collect::<Result<_>>()?;
    let partners = partners(&basics);
    let mut rows: Vec<CheckRow> = (0..corpus.len())
        .into_par_iter()
        .map(|i| function_rows(i, &corpus[i], &basics[i], &basics[partners[i]], config))
        .collect::<Result<Vec<Vec<CheckRow>>>>()?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| (&a.function_id, a.check.name()).cmp(&(&b.function_id, b.check.name())));
    Ok(VerifyReport { rows })
}

fn strong_options(config: &VerifyConfig) -> StrongOptions {
    StrongOptions { tol: config.tol, cap: config.cap, ..StrongOptions::default() }
}

fn basics(entry: &CorpusEntry, config: &VerifyConfig) -> Result<Basics> {
    let f = entry.spec.expand()?;
    Ok(Basics {
        variation: total_variation(&f),
        weak: weak_avg_function(&f, config.tol)?,
        strong: strong_avg_function(&f, &strong_options(config))?,
        f,
    })
}

/// Each function is paired with the next one of the same representation,
/// cyclically, since sums mix only like with like.
fn partners(basics: &[Basics]) -> Vec<usize> {
    let n = basics.len();
    (0..n)
        .map(|i| {
            (1..=n)
                .map(|k| (i + k) % n)
                .find(|&j| std::mem::discriminant(&basics[j].f) == std::mem::discriminant(&basics[i].f))
                .unwrap_or(i)
        })
        .collect()
}

fn function_rows(
    index: usize,
    entry: &CorpusEntry,
    own: &Basics,
    partner: &Basics,
    config: &VerifyConfig,
) -> Result<Vec<CheckRow>> {
    let row = |check: Check, (lhs, rhs, slack, passed): (String, String, String, bool)| CheckRow {
        function_id: entry.id.clone(),
        check,
        lhs,
        rhs,
        slack,
        passed,
    };
    let regular = own.f.regularize()?;
    let maximal = Maximal::new(&regular)?;
    Ok(vec![
        row(Check::MarkovChain, markov_chain(own, config)),
        row(Check::VariationSandwich, variation_sandwich(own, config)),
        row(Check::Homogeneity, homogeneity(own, config)?),
        row(Check::QuasiTriangle, quasi_triangle(own, partner, config)?),
        row(Check::MaximalDomination, maximal_domination(&regular, &maximal, config.seed, index)?),
        row(Check::WeakType, weak_type(&maximal, config)?),
    ])
}

type Cells = (String, String, String, bool);

/// Margin `rhs + slack - lhs`, `+∞` when the right side is.
fn margin(lhs: f64, rhs: ExtendedReal, slack: f64) -> f64 {
    match rhs {
        Extended::Finite(r) => r + slack - lhs,
        Extended::Infinity => f64::INFINITY,
    }
}

fn markov_chain(b: &Basics, config: &VerifyConfig) -> Cells {
    let lip = b.f.lipschitz().to_real();
    let report = ChainReport::assemble(b.weak.clone(), b.strong.clone(), lip, config.tol);
    let first = margin(report.weak.lower, report.strong.upper, config.tol);
    let second = margin(report.strong.lower, lip, config.tol);
    let (lhs, rhs) = if first <= second {
        (report.weak.lower, report.strong.upper)
    } else {
        (report.strong.lower, lip)
    };
    (format_real(lhs), format_extended_real(&rhs), format_real(config.tol), report.passed())
}

fn variation_sandwich(b: &Basics, config: &VerifyConfig) -> Cells {
    let variation = if config.inject_violation { &b.variation / rat(3, 1) } else { b.variation.clone() };
    let v = to_f64(&variation);
    let report = SandwichReport::assemble(variation.clone(), b.weak.clone(), b.strong.clone());
    let first = margin(b.weak.lower / 2.0, Extended::Finite(v), HALF_WEAK_SLACK);
    let second = margin(v, b.strong.upper, STRONG_SLACK);
    let cells = if first <= second {
        (format_real(b.weak.lower / 2.0), format_rational(&variation), format_real(HALF_WEAK_SLACK))
    } else {
        (format_rational(&variation), format_extended_real(&b.strong.upper), format_real(STRONG_SLACK))
    };
    (cells.0, cells.1, cells.2, report.passed())
}

/// `|mid(a) - mid(b)|`, zero when both diverge and `+∞` when only one does.
fn deviation(a: &Estimate, b: &Estimate) -> f64 {
    match (a.upper, b.upper) {
        (Extended::Finite(ua), Extended::Finite(ub)) => ((a.lower + ua) / 2.0 - (b.lower + ub) / 2.0).abs(),
        (Extended::Infinity, Extended::Infinity) => 0.0,
        _ => f64::INFINITY,
    }
}

fn homogeneity(b: &Basics, config: &VerifyConfig) -> Result<Cells> {
    let mut worst = 0.0f64;
    for (p, q) in HOMOGENEITY_FACTORS {
        let alpha = rat(p, q);
        let scaled = b.f.scale(&alpha);
        let factor = to_f64(&alpha);
        let weak = weak_avg_function(&scaled, config.tol)?;
        let strong = strong_avg_function(&scaled, &strong_options(config))?;
        worst = worst
            .max(deviation(&weak, &b.weak.scaled(factor)))
            .max(deviation(&strong, &b.strong.scaled(factor)));
    }
    let slack = 3.0 * config.tol;
    Ok((format_real(worst), "0".into(), format_real(slack), worst <= slack))
}

fn quasi_triangle(own: &Basics, partner: &Basics, config: &VerifyConfig) -> Result<Cells> {
    let sum = own.f.add(&partner.f, DEFAULT_MAX_JUMPS)?;
    let lhs = weak_avg_function(&sum, config.tol)?.lower;
    let rhs = own.weak.upper.map(|a| partner.weak.upper.map(|b| 2.0 * (a + b)));
    let rhs = match rhs {
        Extended::Finite(inner) => inner,
        Extended::Infinity => Extended::Infinity,
    };
    let passed = ExtendedReal::Finite(lhs) <= rhs.map(|r| r + config.tol);
    Ok((format_real(lhs), format_extended_real(&rhs), format_real(config.tol), passed))
}

/// The nodes plus [`RANDOM_POINTS`] points drawn from a stream keyed by the
/// function's position, so the draw does not depend on scheduling.
fn probe_points(f: &Function, seed: u64, index: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    let mut points = f.nodes().to_vec();
    points.extend((0..RANDOM_POINTS).map(|_| rat(rng.gen_range(0..=POINT_DENOM), POINT_DENOM)));
    points
}

fn maximal_domination(f: &Function, maximal: &Maximal, seed: u64, index: usize) -> Result<Cells> {
    let mut worst: Option<(Extended<Rational>, Extended<Rational>)> = None;
    let mut passed = true;
    let slopes = SlopeEvaluator::new(f);
    for x in probe_points(f, seed, index) {
        let slope = slopes.at(&x)?.value;
        let max = maximal.at_point(&x)?;
        passed &= slope <= max;
        if worst.as_ref().is_none_or(|(ws, wm)| compare_gaps((&slope, &max), (ws, wm)) == Ordering::Less) {
            worst = Some((slope, max));
        }
    }
    let (slope, max) = worst.expect("every function has nodes");
    Ok((slope.to_string(), max.to_string(), "0".into(), passed))
}

/// Orders `(Λ, M)` pairs by `M - Λ`, a violation first and `∞ - ∞` last.
fn compare_gaps(a: (&Extended<Rational>, &Extended<Rational>), b: (&Extended<Rational>, &Extended<Rational>)) -> Ordering {
    fn key(s: &Extended<Rational>, m: &Extended<Rational>) -> (u8, Option<Rational>) {
        match (s, m) {
            (Extended::Infinity, Extended::Finite(_)) => (0, None),
            (Extended::Finite(s), Extended::Finite(m)) => (1, Some(m - s)),
            (Extended::Finite(_), Extended::Infinity) => (2, None),
            (Extended::Infinity, Extended::Infinity) => (3, None),
        }
    }
    key(a.0, a.1).cmp(&key(b.0, b.1))
}

fn weak_type(maximal: &Maximal, config: &VerifyConfig) -> Result<Cells> {
    let mut worst = None;
    for k in WEAK_TYPE_EXPONENTS {
        let t = if k >= 0 { rat(1 << k, 1) } else { rat(1, 1 << -k) };
        let report = maximal.check_weak_bound(&t, config.grid_n)?;
        let gap = report.bound + report.slack - report.measure;
        if worst.as_ref().is_none_or(|(g, _)| gap < *g) {
            worst = Some((gap, report));
        }
    }
    let (gap, report) = worst.expect("at least one level");
    Ok((format_real(report.measure), format_real(report.bound), format_real(report.slack), gap >= 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { count: 4, grid_n: 1000, ..VerifyConfig::default() }
    }

    #[test]
    fn small_corpus_passes_with_sorted_rows() {
        let report = run_verify(&small()).unwrap();
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
        let named = crate::corpus::named_constructions().unwrap().len();
        assert_eq!(report.rows.len(), (4 + named) * Check::ALL.len());
        let keys: Vec<_> = report.rows.iter().map(|r| (r.function_id.clone(), r.check.name())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn injected_violation_fails_sandwich() {
        let report = run_verify(&VerifyConfig { inject_violation: true, ..small() }).unwrap();
        assert!(!report.passed());
        assert!(report.failures().all(|r| r.check == Check::VariationSandwich));
        let identity = report
            .rows
            .iter()
            .find(|r| r.function_id == "named_identity" && r.check == Check::VariationSandwich)
            .unwrap();
        assert!(!identity.passed);
        assert_eq!(identity.rhs, "1/3");
    }

    #[test]
    fn gaps_put_violations_first() {
        let fin = |v: i64| Extended::Finite(rat(v, 1));
        let inf = Extended::Infinity;
        assert_eq!(compare_gaps((&inf, &fin(1)), (&fin(0), &fin(0))), Ordering::Less);
        assert_eq!(compare_gaps((&fin(1), &fin(3)), (&fin(0), &fin(1))), Ordering::Greater);
        assert_eq!(compare_gaps((&fin(0), &inf), (&inf, &inf)), Ordering::Less);
    }

    #[test]
    fn probe_points_are_keyed_by_position() {
        let f: Function = crate::func_model::PiecewiseLinear::identity().into();
        assert_eq!(probe_points(&f, 3, 5), probe_points(&f, 3, 5));
        assert_ne!(probe_points(&f, 3, 5), probe_points(&f, 3, 6));
        assert_eq!(probe_points(&f, 3, 5).len(), 2 + RANDOM_POINTS);
    }
}
