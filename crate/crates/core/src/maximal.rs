//! The Lebesgue–Stieltjes measure `μ_f` of the cumulative variation `T_f`,
//! the maximal function `M_f(x) = sup μ_f([a, b]) / (b - a)` over intervals
//! containing `x`, and the weak-type bound `m{M_f > t} <= 2V(f)/t`.
//!
//! Closed intervals count the atom at their left end, so
//! `μ_f([a, b]) = T(b) - T(a⁻)`. Intervals are clamped to [0, 1].

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::func_model::{check_domain, Evaluate, Function};
use crate::ratio_max::{max_ratio_value, Approx};
use crate::rational::{format_rational, rat, to_f64, Rational};
use crate::variation::{cumulative_variation, total_variation};

/// `T_f` sampled at its nodes, ready for repeated queries.
#[derive(Clone, Debug)]
pub struct Maximal {
    cumulative: Function,
    nodes: Vec<Rational>,
    /// `T(x_j)`.
    at: Vec<Rational>,
    /// `T(x_j⁻)`, with `T(0⁻) = 0`.
    before: Vec<Rational>,
    variation: Rational,
    /// f64 images of `nodes`, `at` and `before`, for pruning.
    approx: Vec<(f64, f64, f64)>,
}

impl Maximal {
    /// Requires `f` right-continuous; regularize step functions first.
    pub fn new(f: &Function) -> Result<Self> {
        if !f.is_right_continuous() {
            return Err(Error::NotRightContinuous);
        }
        let cumulative = cumulative_variation(f);
        let nodes = cumulative.nodes().to_vec();
        let at: Vec<Rational> = nodes.iter().map(|x| cumulative.value_at(x)).collect();
        let before: Vec<Rational> = nodes
            .iter()
            .enumerate()
            .map(|(j, x)| if j == 0 { Rational::zero() } else { cumulative.left_limit(x) })
            .collect();
        let approx = (0..nodes.len()).map(|j| (to_f64(&nodes[j]), to_f64(&at[j]), to_f64(&before[j]))).collect();
        Ok(Self { cumulative, nodes, at, before, variation: total_variation(f), approx })
    }

    pub fn cumulative(&self) -> &Function {
        &self.cumulative
    }

    pub fn variation(&self) -> &Rational {
        &self.variation
    }

    fn t_at(&self, x: &Rational) -> Rational {
        self.cumulative.value_at(x)
    }

    fn t_before(&self, x: &Rational) -> Rational {
        if x.is_zero() {
            Rational::zero()
        } else {
            self.cumulative.left_limit(x)
        }
    }

    /// `μ_f([a, b])` after clamping to [0, 1].
    pub fn measure(&self, a: &Rational, b: &Rational) -> Result<Rational> {
        if a > b {
            return Err(Error::InvalidArgument(format!(
                "interval [{}, {}] is reversed",
                format_rational(a),
                format_rational(b)
            )));
        }
        let a = a.clone().max(Rational::zero());
        let b = b.clone().min(Rational::from_integer(1.into()));
        if a > b {
            return Ok(Rational::zero());
        }
        Ok(self.t_at(&b) - self.t_before(&a))
    }

    /// Exact `M_f(x)`.
    ///
    /// At an atom the supremum is `+∞`. Elsewhere `T(x⁻) = T(x)`, and any
    /// chord across `P = (x, T(x))` has a slope between its two halves, so
    /// the best interval has `x` as an endpoint. Along a cell `T` is linear,
    /// so the far endpoint is a node, using `T(a⁻)` on the left.
    pub fn at_point(&self, x: &Rational) -> Result<Extended<Rational>> {
        check_domain(x)?;
        let tx = self.t_at(x);
        if tx > self.t_before(x) {
            return Ok(Extended::Infinity);
        }
        let (xf, txf) = (to_f64(x), to_f64(&tx));
        let approx = self.approx.iter().enumerate().filter(|&(j, _)| &self.nodes[j] != x).map(|(j, &(node, at, before))| {
            let a = if node < xf || (node == xf && &self.nodes[j] < x) {
                Approx { a: txf, b: before, c: xf, d: node }
            } else {
                Approx { a: at, b: txf, c: node, d: xf }
            };
            (j, a)
        });
        let best = max_ratio_value(approx, |j| {
            let node = &self.nodes[j];
            if node < x {
                (&tx - &self.before[j]) / (x - node)
            } else {
                (&self.at[j] - &tx) / (node - x)
            }
        });
        Ok(Extended::Finite(best))
    }

    /// Suffix maxima of `T(x_j) - t·x_j` and prefix minima of `T(x_j⁻) - t·x_j`.
    fn extremes<S: crate::rational::Scalar>(&self, t: &S) -> (Vec<S>, Vec<S>) {
        let n = self.nodes.len();
        let xs: Vec<S> = self.nodes.iter().map(S::from_rational).collect();
        let mut right = vec![S::zero(); n];
        let mut acc: Option<S> = None;
        for j in (0..n).rev() {
            let v = S::from_rational(&self.at[j]) - t.clone() * xs[j].clone();
            let next = match acc {
                Some(a) => S::max_of(a, v),
                None => v,
            };
            right[j] = next.clone();
            acc = Some(next);
        }
        let mut left = vec![S::zero(); n];
        let mut acc: Option<S> = None;
        for j in 0..n {
            let v = S::from_rational(&self.before[j]) - t.clone() * xs[j].clone();
            let next = match acc {
                Some(a) => S::min_of(a, v),
                None => v,
            };
            left[j] = next.clone();
            acc = Some(next);
        }
        (right, left)
    }

    /// Exact `m{x : M_f(x) > t}`.
    ///
    /// `M_f(x) > t` iff `sup_{b >= x} T(b) - tb > inf_{a <= x} T(a⁻) - ta`.
    /// Inside a cell, with `φ = T - t·x` linear, `Rn` the sup over later
    /// nodes and `Lp` the inf over earlier ones, this reads
    /// `Rn > Lp` or `φ > Lp` or `φ < Rn`.
    pub fn superlevel_measure(&self, t: &Rational) -> Result<Rational> {
        if !t.is_positive() {
            return Err(Error::InvalidArgument(format!("level must be positive, got {t}")));
        }
        let (right, left) = self.extremes(t);
        let mut total = Rational::zero();
        for i in 0..self.nodes.len() - 1 {
            let (x0, x1) = (&self.nodes[i], &self.nodes[i + 1]);
            let h = x1 - x0;
            let (rn, lp) = (&right[i + 1], &left[i]);
            if rn > lp {
                total += h;
                continue;
            }
            // φ runs linearly from φ0 at x0⁺ to φ1 at x1⁻; Rn <= Lp.
            let phi0 = &self.at[i] - t * x0;
            let phi1 = &self.before[i + 1] - t * x1;
            let above = fraction_beyond(&phi0, &phi1, lp, true);
            let below = fraction_beyond(&phi0, &phi1, rn, false);
            total += h * (above + below).min(Rational::from_integer(1.into()));
        }
        Ok(total)
    }

    /// Number of disjoint intervals making up `{M_f > t}`. Per cell the set
    /// is the whole cell or up to two pieces, each holding one cell end.
    fn superlevel_components(&self, t: &Rational) -> usize {
        let (right, left) = self.extremes(t);
        let mut count = 0;
        let mut open = false;
        for i in 0..self.nodes.len() - 1 {
            let (rn, lp) = (&right[i + 1], &left[i]);
            let phi0 = &self.at[i] - t * &self.nodes[i];
            let phi1 = &self.before[i + 1] - t * &self.nodes[i + 1];
            // (holds the left end, holds the right end) per piece, left first.
            let mut pieces = Vec::with_capacity(2);
            if rn > lp {
                pieces.push((true, true));
            } else {
                for (l, r) in [(&phi0 > lp, &phi1 > lp), (&phi0 < rn, &phi1 < rn)] {
                    if l || r {
                        pieces.push((l, r));
                    }
                }
                pieces.sort_by_key(|&(l, _)| !l);
            }
            for (k, &(l, _)) in pieces.iter().enumerate() {
                if !(k == 0 && l && open) {
                    count += 1;
                }
            }
            open = pieces.iter().any(|&(_, r)| r);
        }
        count
    }

    /// `m{M_f > t}` estimated on the midpoints `(i + 1/2)/grid_n`.
    pub fn grid_superlevel(&self, t: f64, grid_n: usize) -> f64 {
        let (right, left) = self.extremes(&t);
        let xs: Vec<f64> = self.nodes.iter().map(to_f64).collect();
        let cumulative: Vec<(f64, f64)> =
            self.at.iter().zip(&self.before).map(|(a, b)| (to_f64(a), to_f64(b))).collect();
        let mut count = 0usize;
        let mut cell = 0usize;
        for i in 0..grid_n {
            let x = (2 * i + 1) as f64 / (2 * grid_n) as f64;
            while cell + 2 < xs.len() && x >= xs[cell + 1] {
                cell += 1;
            }
            let (x0, x1) = (xs[cell], xs[cell + 1]);
            // T is linear across the open cell.
            let (t0, t1) = (cumulative[cell].0, cumulative[cell + 1].1);
            let tx = if x1 > x0 { t0 + (t1 - t0) * (x - x0) / (x1 - x0) } else { t0 };
            let phi = tx - t * x;
            let rn = right[cell + 1];
            let lp = left[cell];
            if rn > lp || phi > lp || phi < rn {
                count += 1;
            }
        }
        count as f64 / grid_n as f64
    }
}

/// Fraction of a cell on which a linear function running from `a` to `b`
/// lies strictly above (`above`) or strictly below `level`.
fn fraction_beyond(a: &Rational, b: &Rational, level: &Rational, above: bool) -> Rational {
    let (a, b, level) = if above { (a.clone(), b.clone(), level.clone()) } else { (-a, -b, -level) };
    let one = Rational::from_integer(1.into());
    match (a > level, b > level) {
        (true, true) => one,
        (false, false) => Rational::zero(),
        (true, false) => (&a - &level) / (&a - &b),
        (false, true) => (&b - &level) / (&b - &a),
    }
}

pub fn stieltjes_measure(f: &Function, a: &Rational, b: &Rational) -> Result<Rational> {
    Maximal::new(f)?.measure(a, b)
}

pub fn maximal_function(f: &Function, x: &Rational) -> Result<Extended<Rational>> {
    Maximal::new(f)?.at_point(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakBoundReport {
    pub t: f64,
    pub grid_n: usize,
    /// Grid estimate of `m{M_f > t}`.
    pub measure: f64,
    /// `2V(f)/t`.
    pub bound: f64,
    /// `max(2, k)/grid_n` for a set of `k` intervals, allowing one grid
    /// point per interval cut by its ends.
    pub slack: f64,
    pub passed: bool,
}

pub fn check_weak_bound(f: &Function, t: &Rational, grid_n: usize) -> Result<WeakBoundReport> {
    Maximal::new(f)?.check_weak_bound(t, grid_n)
}

impl Maximal {
    pub fn check_weak_bound(&self, t: &Rational, grid_n: usize) -> Result<WeakBoundReport> {
        if !t.is_positive() {
            return Err(Error::InvalidArgument(format!("level must be positive, got {t}")));
        }
        if grid_n < 2 {
            return Err(Error::InvalidArgument(format!("grid size must be at least 2, got {grid_n}")));
        }
        let tf = to_f64(t);
        let measure = self.grid_superlevel(tf, grid_n);
        let bound = to_f64(&(&self.variation * rat(2, 1) / t));
        // A midpoint count of an interval is off by at most one point.
        let slack = self.superlevel_components(t).max(2) as f64 / grid_n as f64;
        Ok(WeakBoundReport { t: tf, grid_n, measure, bound, slack, passed: measure <= bound + slack })
    }
}
