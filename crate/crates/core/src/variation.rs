//! Total variation, variation over subintervals, the cumulative variation
//! `T_f(x) = V_0^x(f)`, and the partition sum used as an oracle.
//!
//! Each linear piece is monotone, so the breakpoint partition is extremal for
//! piecewise-linear functions. For step functions every jump contributes
//! `|f(x) - f(x-)| + |f(x+) - f(x)|` through its stored point value.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::func_model::{check_domain, Evaluate, Function, PiecewiseLinear, StepFunction};
use crate::rational::{format_rational, int, Rational};

/// Strictly increasing points `0 <= x_0 < ... < x_n <= 1`, at least two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    points: Vec<Rational>,
}

impl Partition {
    pub fn new(points: Vec<Rational>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument("a partition needs at least two points".into()));
        }
        for p in &points {
            check_domain(p)?;
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "partition not strictly increasing at {}",
                format_rational(&w[1])
            )));
        }
        Ok(Self { points })
    }

    /// Sorts and deduplicates first.
    pub fn from_unsorted(mut points: Vec<Rational>) -> Result<Self> {
        points.sort();
        points.dedup();
        Self::new(points)
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    /// Union of the two point sets.
    pub fn refine(&self, extra: &[Rational]) -> Result<Self> {
        Self::from_unsorted(self.points.iter().chain(extra).cloned().collect())
    }
}

fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

fn sum_of_jumps<'a>(values: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut total = Rational::zero();
    let mut prev: Option<&Rational> = None;
    for v in values {
        if let Some(p) = prev {
            if p != v {
                total += abs_diff(v, p);
            }
        }
        prev = Some(v);
    }
    total
}

pub fn total_variation_plf(f: &PiecewiseLinear) -> Rational {
    sum_of_jumps(f.values().iter())
}

pub fn total_variation_step(f: &StepFunction) -> Rational {
    sum_of_jumps(f.value_sequence())
}

pub fn total_variation(f: &Function) -> Rational {
    match f {
        Function::Plf(f) => total_variation_plf(f),
        Function::Step(f) => total_variation_step(f),
    }
}

/// `V_a^b(f)` for `0 <= a <= b <= 1`.
pub fn variation_on_interval(f: &Function, a: &Rational, b: &Rational) -> Result<Rational> {
    check_domain(a)?;
    check_domain(b)?;
    if a > b {
        return Err(Error::InvalidArgument(format!(
            "interval [{}, {}] is reversed",
            format_rational(a),
            format_rational(b)
        )));
    }
    if a == b {
        return Ok(Rational::zero());
    }
    let mut points = vec![a.clone()];
    points.extend(f.nodes().iter().filter(|x| a < *x && *x < b).cloned());
    points.push(b.clone());
    let two = int(2);
    let total = points.windows(2).fold(Rational::zero(), |acc, w| {
        let (p, q) = (&w[0], &w[1]);
        match f {
            Function::Plf(g) => acc + abs_diff(&g.value_at(q), &g.value_at(p)),
            Function::Step(g) => {
                let mid = g.value_at(&((p + q) / &two));
                acc + abs_diff(&mid, &g.value_at(p)) + abs_diff(&g.value_at(q), &mid)
            }
        }
    });
    Ok(total)
}

/// `T_f(x) = V_0^x(f)` in the same class as `f`: nondecreasing with
/// `T_f(0) = 0` and `T_f(1) = V(f)`.
pub fn cumulative_variation(f: &Function) -> Function {
    match f {
        Function::Plf(g) => {
            let mut acc = Rational::zero();
            let mut values = Vec::with_capacity(g.values().len());
            values.push(acc.clone());
            for w in g.values().windows(2) {
                acc += abs_diff(&w[1], &w[0]);
                values.push(acc.clone());
            }
            Function::Plf(
                PiecewiseLinear::new(g.breakpoints().to_vec(), values)
                    .expect("same breakpoints as a valid function"),
            )
        }
        Function::Step(g) => {
            let node_values = g.node_values();
            let mut acc = Rational::zero();
            let mut t_nodes = vec![acc.clone()];
            let mut t_levels = Vec::with_capacity(g.levels().len());
            for (i, level) in g.levels().iter().enumerate() {
                acc += abs_diff(level, &node_values[i]);
                t_levels.push(acc.clone());
                acc += abs_diff(&node_values[i + 1], level);
                t_nodes.push(acc.clone());
            }
            Function::Step(StepFunction::from_nodes(g.nodes().to_vec(), t_nodes, t_levels))
        }
    }
}

/// The partition sum `Σ |f(x_i) - f(x_{i-1})|`, a lower bound on `V(f)` that
/// never decreases under refinement.
pub fn variation_oracle<E: Evaluate + ?Sized>(f: &E, partition: &Partition) -> Rational {
    let values: Vec<Rational> = partition.points().iter().map(|x| f.value_at(x)).collect();
    values
        .windows(2)
        .fold(Rational::zero(), |acc, w| acc + abs_diff(&w[1], &w[0]))
}
