//! Weak average smoothness: `sup_{t>0} t·m(t)` with `m(t) = m{Λ_f >= t}`.
//!
//! Every probe `t` gives the lower bound `t·m(t)`. For upper bounds each
//! `t`-interval gets a per-cell bound derived from the sweep at its left
//! end, and the interval with the worst bound is split until the bracket
//! closes. No unimodality of `t·m(t)` is assumed.
//!
//! Step functions get a closed-form tail: once `t` exceeds twice the range
//! over the shortest cell, only the approach to each cell's own ends
//! reaches level `t`, and `t·m(t)` equals a constant `K`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_traits::{Signed, Zero};

use super::superlevel::{CellParts, Part};
use super::{check_positive, Estimate, Segmented, Verdict};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::func_model::{Function, FunctionSpec, StepFunction};
use crate::rational::{to_f64, Rational};

/// Hard ceiling on superlevel evaluations per call.
const MAX_EVALS: usize = 400_000;
/// Piece slopes are seeded as probes up to this many pieces.
const MAX_SEEDED_SLOPES: usize = 8192;

pub fn weak_avg(f: &FunctionSpec, tol: f64) -> Result<Estimate> {
    weak_avg_function(&f.expand()?, tol)
}

pub fn weak_avg_function(f: &Function, tol: f64) -> Result<Estimate> {
    check_positive("tol", tol)?;
    let seg = Segmented::<f64>::from_function(f);
    let (t_hi, tail, mut probes) = match f {
        Function::Plf(g) => {
            let lip = to_f64(&g.lipschitz());
            if lip == 0.0 {
                return Ok(Estimate::exact(0.0));
            }
            let mut probes = Vec::new();
            if g.piece_count() <= MAX_SEEDED_SLOPES {
                probes.extend((0..g.piece_count()).map(|i| to_f64(&g.slope(i).abs())).filter(|&s| s > 0.0));
            }
            // Nudge past the rounded Lipschitz constant so that no mass
            // above it is lost.
            (lip * (1.0 + 4.0 * f64::EPSILON), 0.0, probes)
        }
        Function::Step(g) => {
            if g.is_constant() && g.value_at_zero() == &g.levels()[0] && g.value_at_one() == &g.levels()[0] {
                return Ok(Estimate::exact(0.0));
            }
            let (t_tail, k) = step_tail(g);
            (t_tail, to_f64(&k), Vec::new())
        }
    };
    probes.push(t_hi);
    Ok(Search::new(&seg, t_hi, tail).run(probes, tol))
}

/// `(t_tail, K)` with `t·m(t) = K` for all `t >= t_tail`.
fn step_tail(g: &StepFunction) -> (f64, Rational) {
    let nodes = g.nodes();
    let p = g.node_values();
    let c = g.levels();
    let n = c.len();
    let mut k = Rational::zero();
    let mut hmin: Option<Rational> = None;
    for i in 0..n {
        let mut left = (&c[i] - &p[i]).abs();
        if i > 0 {
            left = left.max((&c[i] - &c[i - 1]).abs());
        }
        let mut right = (&c[i] - &p[i + 1]).abs();
        if i + 1 < n {
            right = right.max((&c[i] - &c[i + 1]).abs());
        }
        k += left + right;
        let h = &nodes[i + 1] - &nodes[i];
        hmin = Some(match hmin {
            Some(m) if m <= h => m,
            _ => h,
        });
    }
    let hmin = hmin.expect("step function has at least one cell");
    let range = g.range();
    let t_tail = to_f64(&(range * Rational::from_integer(2.into()) / hmin));
    (t_tail.max(f64::MIN_POSITIVE), k)
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: f64,
    hi: f64,
    /// Upper bound on `t·m(t)` over `[lo, hi]`.
    upper: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper).then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Bound for one of a cell's four sets over `t in [a, b]`, from the sweep
/// at `a`. The set length is `h·num/den` with `num` nonincreasing and
/// `den = c + t·h`, so `t·len <= h·num(a)·t/den(t)`, and `t/den(t)` is
/// monotone, hence extremal at `a` or `b`.
fn part_bound(p: &Part<f64>, h: f64, a: f64, b: f64) -> f64 {
    if p.flat {
        return b * h;
    }
    if p.num <= 0.0 {
        return 0.0;
    }
    let at_a = p.length(&h);
    let den_b = p.den + (b - a) * h;
    (b * at_a).min(h * p.num * (a / p.den).max(b / den_b))
}

/// Constant bound on one cell's `t·m` over `[a, b]`, from the sweep at `a`.
fn cell_bound(cell: &CellParts<f64>, a: f64, b: f64) -> f64 {
    let h = cell.h;
    let suffix = part_bound(&cell.suffix_u, h, a, b).max(part_bound(&cell.suffix_w, h, a, b));
    let prefix = part_bound(&cell.prefix_u, h, a, b).max(part_bound(&cell.prefix_w, h, a, b));
    (b * h).min(suffix + prefix)
}

/// Piecewise-linear upper bound on one part's `t·len(t)` over `[a, b]`, from
/// the sweeps at both ends.
///
/// `num` is convex in `t` (a running max of lines minus a line, or a line
/// minus a running min), so its chord `N` bounds it above; `den` is a line
/// `D`. While `N >= D` the part may fill the cell. After the single point
/// where `N - D` turns negative, `φ(t) = h·t·N(t)/D(t)` is a line plus a
/// hyperbola, hence convex or concave, and the larger of its chord and its
/// midpoint tangent bounds it either way, with excess quadratic in `b - a`.
fn part_curve(pa: &Part<f64>, pb: &Part<f64>, h: f64, a: f64, b: f64) -> Option<Pl> {
    let full = Pl::line(a, b, a * h, b * h);
    if pa.flat != pb.flat {
        return None;
    }
    if pa.flat {
        return Some(full);
    }
    let (na, nb, da, db) = (pa.num, pb.num, pa.den, pb.den);
    if !(da > 0.0 && db > 0.0) {
        return None;
    }
    let (ea, eb) = (na - da, nb - db);
    if eb >= 0.0 {
        return Some(full);
    }
    let w = b - a;
    let (n1, d1) = ((nb - na) / w, (db - da) / w);
    let n = |t: f64| na + n1 * (t - a);
    let d = |t: f64| da + d1 * (t - a);
    let phi = |t: f64| h * t * n(t) / d(t);
    let s = if ea > 0.0 { a + w * (ea / (ea - eb)) } else { a };
    if s >= b {
        return Some(full);
    }
    let chord = Pl::line(s, b, phi(s).min(h * s), phi(b));
    let m = 0.5 * (s + b);
    let (nm, dm) = (n(m), d(m));
    let slope = h * ((nm + m * n1) * dm - m * nm * d1) / (dm * dm);
    let at_m = phi(m);
    let tangent = Pl::line(s, b, at_m + slope * (s - m), at_m + slope * (b - m));
    let mut tail = chord.max(&tangent);
    if s > a {
        // Full cell up to `s`; the tail starts at or above `h·s` there.
        let start = tail.0[0].1.max(h * s);
        tail.0[0].1 = start;
        tail.0.insert(0, (a, a * h));
    }
    let curve = tail.max(&Pl::line(a, b, 0.0, 0.0)).min(&full);
    curve.0.iter().all(|(_, v)| v.is_finite()).then_some(curve)
}

fn cell_curve(ca: &CellParts<f64>, cb: &CellParts<f64>, a: f64, b: f64) -> Option<Pl> {
    let h = ca.h;
    let part = |pa, pb| part_curve(pa, pb, h, a, b);
    let suffix = part(&ca.suffix_u, &cb.suffix_u)?.max(&part(&ca.suffix_w, &cb.suffix_w)?);
    let prefix = part(&ca.prefix_u, &cb.prefix_u)?.max(&part(&ca.prefix_w, &cb.prefix_w)?);
    Some(suffix.add(&prefix).min(&Pl::line(a, b, a * h, b * h)))
}

/// Continuous piecewise-linear function given by knots `(t, value)`.
#[derive(Clone, Debug)]
struct Pl(Vec<(f64, f64)>);

impl Pl {
    fn line(a: f64, b: f64, va: f64, vb: f64) -> Self {
        Pl(vec![(a, va), (b, vb)])
    }

    fn eval(&self, t: f64) -> f64 {
        let k = self.0.partition_point(|&(x, _)| x < t);
        if k == 0 {
            return self.0[0].1;
        }
        if k == self.0.len() {
            return self.0[k - 1].1;
        }
        let ((x0, v0), (x1, v1)) = (self.0[k - 1], self.0[k]);
        if x1 == t {
            return v1;
        }
        v0 + (v1 - v0) * ((t - x0) / (x1 - x0))
    }

    fn knots(&self, other: &Pl) -> Vec<f64> {
        let mut ts: Vec<f64> = self.0.iter().chain(&other.0).map(|&(t, _)| t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        ts
    }

    fn add(&self, other: &Pl) -> Pl {
        Pl(self.knots(other).into_iter().map(|t| (t, self.eval(t) + other.eval(t))).collect())
    }

    /// Pointwise max (`pick_max`) or min, with knots added where the two
    /// cross. Where a crossing cannot be placed strictly between two knots,
    /// the min keeps the larger value at the far knot, which still bounds
    /// it from above.
    fn envelope(&self, other: &Pl, pick_max: bool) -> Pl {
        let ts = self.knots(other);
        let mut out = Vec::with_capacity(ts.len() + 2);
        let pick = |x: f64, y: f64| if pick_max { x.max(y) } else { x.min(y) };
        let mut prev: Option<(f64, f64)> = None;
        for t in ts {
            let (x, y) = (self.eval(t), other.eval(t));
            let d = x - y;
            let mut value = pick(x, y);
            if let Some((t0, d0)) = prev {
                if (d0 < 0.0 && d > 0.0) || (d0 > 0.0 && d < 0.0) {
                    let tc = t0 + (t - t0) * (d0 / (d0 - d));
                    if tc > t0 && tc < t {
                        out.push((tc, pick(self.eval(tc), other.eval(tc))));
                    } else if !pick_max {
                        value = x.max(y);
                    }
                }
            }
            out.push((t, value));
            prev = Some((t, d));
        }
        Pl(out)
    }

    fn max(&self, other: &Pl) -> Pl {
        self.envelope(other, true)
    }

    fn min(&self, other: &Pl) -> Pl {
        self.envelope(other, false)
    }
}

/// Running sum of piecewise-linear functions on `[a, b]`, kept as the value
/// at `a` plus slope changes.
struct PlSum {
    a: f64,
    b: f64,
    start: f64,
    slope: f64,
    kinks: Vec<(f64, f64)>,
}

impl PlSum {
    fn new(a: f64, b: f64) -> Self {
        Self { a, b, start: 0.0, slope: 0.0, kinks: Vec::new() }
    }

    fn add(&mut self, f: &Pl) {
        self.start += f.0[0].1;
        let mut last = None;
        for w in f.0.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t1 <= t0 {
                continue;
            }
            let s = (v1 - v0) / (t1 - t0);
            match last {
                None => self.slope += s,
                Some(prev) => self.kinks.push((t0, s - prev)),
            }
            last = Some(s);
        }
    }

    fn max(mut self) -> f64 {
        self.kinks.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (mut t, mut v, mut s) = (self.a, self.start, self.slope);
        let mut best = v;
        for (k, ds) in self.kinks {
            v += s * (k - t);
            best = best.max(v);
            t = k;
            s += ds;
        }
        v += s * (self.b - t);
        best.max(v)
    }
}

struct Search<'a> {
    seg: &'a Segmented<f64>,
    t_hi: f64,
    tail: f64,
    lower: f64,
    evals: usize,
}

impl<'a> Search<'a> {
    fn new(seg: &'a Segmented<f64>, t_hi: f64, tail: f64) -> Self {
        Self { seg, t_hi, tail, lower: tail, evals: 0 }
    }

    /// Sweeps at `a`, records `a·m(a)` as a lower bound and returns an upper
    /// bound on `t·m(t)` over `[a, b]`.
    fn bound(&mut self, a: f64, b: f64) -> f64 {
        let at_a = self.sweep(a);
        if b <= a {
            return at_a.iter().map(|c| cell_bound(c, a, b)).sum();
        }
        let at_b = self.sweep(b);
        let mut coarse = 0.0;
        let mut fine = PlSum::new(a, b);
        for (ca, cb) in at_a.iter().zip(&at_b) {
            let constant = cell_bound(ca, a, b);
            coarse += constant;
            let flat = Pl::line(a, b, constant, constant);
            match cell_curve(ca, cb, a, b) {
                Some(curve) => fine.add(&curve.min(&flat)),
                None => fine.add(&flat),
            }
        }
        coarse.min(fine.max())
    }

    /// Cell parts at level `t`, recording `t·m(t)` as a lower bound.
    fn sweep(&mut self, t: f64) -> Vec<CellParts<f64>> {
        self.evals += 1;
        let mut cells = Vec::with_capacity(self.seg.cells());
        let mut m = 0.0;
        self.seg.visit(&t, |cell: CellParts<f64>| {
            m += cell.measure();
            cells.push(cell);
        });
        self.lower = self.lower.max(t * m.clamp(0.0, 1.0));
        cells
    }

    fn piece(&mut self, lo: f64, hi: f64) -> Piece {
        // Below any probe only m <= 1 is known.
        let upper = if lo == 0.0 { hi } else { self.bound(lo, hi) };
        Piece { lo, hi, upper }
    }

    fn run(mut self, mut probes: Vec<f64>, tol: f64) -> Estimate {
        probes.retain(|t| *t > 0.0 && *t <= self.t_hi);
        probes.sort_by(|a, b| a.total_cmp(b));
        probes.dedup();

        let mut heap = BinaryHeap::with_capacity(probes.len() + 1);
        for w in probes.windows(2) {
            let p = self.piece(w[0], w[1]);
            heap.push(p);
        }
        // The top probe only contributes its lower bound; above it the
        // measure vanishes (PLF) or the tail constant holds (steps).
        let top = *probes.last().expect("t_hi is always a probe");
        self.bound(top, top);
        // Geometric probes below the smallest seed until they cannot matter.
        let mut hi = probes[0];
        while hi > tol * 0.25 && hi > self.lower {
            let lo = 0.5 * hi;
            let p = self.piece(lo, hi);
            heap.push(p);
            hi = lo;
        }
        heap.push(Piece { lo: 0.0, hi, upper: hi });

        let mut stuck: f64 = 0.0;
        let verdict = loop {
            let Some(top) = heap.peek().copied() else { break Verdict::Finite };
            if top.upper.max(stuck) <= self.lower + 0.5 * tol {
                break Verdict::Finite;
            }
            if top.upper <= stuck {
                break Verdict::Unresolved;
            }
            if self.evals >= MAX_EVALS {
                break Verdict::Unresolved;
            }
            heap.pop();
            let mid = if top.lo == 0.0 { 0.5 * top.hi } else { 0.5 * (top.lo + top.hi) };
            if !(mid > top.lo && mid < top.hi) {
                // Interval cannot be split further in f64.
                stuck = stuck.max(top.upper);
                continue;
            }
            let left = self.piece(top.lo, mid);
            let right = self.piece(mid, top.hi);
            heap.push(left);
            heap.push(right);
        };

        let raw_upper = heap.peek().map_or(0.0, |p| p.upper).max(stuck).max(self.lower);
        let slack = 1e-11 * raw_upper.max(1.0);
        let upper = if raw_upper <= self.tail { self.tail } else { raw_upper + slack };
        let lower = if self.lower <= self.tail { self.tail } else { (self.lower - slack).max(self.tail) };
        let verdict = match verdict {
            Verdict::Finite if upper - lower <= tol => Verdict::Finite,
            Verdict::Finite => Verdict::Unresolved,
            v => v,
        };
        Estimate { lower, upper: ExtendedReal::Finite(upper), verdict }
    }
}

/// Weak-L1 norm of the empirical law of `values`.
pub fn weak_l1_samples(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("sample list"));
    }
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    let n = abs.len() as f64;
    Ok(abs
        .iter()
        .enumerate()
        .map(|(i, v)| v * (i + 1) as f64 / n)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func_model::PiecewiseLinear;
    use crate::rational::{int, rat};

    #[test]
    fn identity_is_one() {
        let e = weak_avg_function(&PiecewiseLinear::identity().into(), 1e-6).unwrap();
        assert!(e.is_finite());
        assert!(e.contains(1.0), "{e}");
        assert!(e.width() <= 1e-6);
    }

    #[test]
    fn tent_is_two() {
        let tent =
            PiecewiseLinear::from_points([(int(0), int(0)), (rat(1, 2), int(1)), (int(1), int(0))]).unwrap();
        let e = weak_avg_function(&tent.into(), 1e-6).unwrap();
        assert!(e.contains(2.0), "{e}");
    }

    #[test]
    fn step_half_is_two() {
        let f = StepFunction::indicator_above(rat(1, 2)).unwrap();
        let (t_tail, k) = step_tail(&f);
        assert_eq!(k, int(2));
        assert_eq!(t_tail, 4.0);
        let e = weak_avg_function(&f.into(), 1e-6).unwrap();
        assert!(e.is_finite(), "{e:?}");
        assert!(e.contains(2.0), "{e}");
        assert!(e.lower >= 2.0 - 1e-3 && e.lower <= 2.0);
    }

    #[test]
    fn hyperbolic_plateau_closes() {
        // t·m(t) = 1/2 for every t in [1/2, 1].
        let f = PiecewiseLinear::from_points([(int(0), rat(1, 4)), (rat(1, 2), rat(-1, 4)), (int(1), rat(-1, 4))])
            .unwrap();
        for tol in [1e-6, 1e-9] {
            let e = weak_avg_function(&f.clone().into(), tol).unwrap();
            assert!(e.is_finite(), "{e:?}");
            assert!(e.contains(0.5) && e.width() <= tol, "{e}");
        }
    }

    #[test]
    fn constants_vanish() {
        let c = PiecewiseLinear::constant(rat(3, 7));
        assert_eq!(weak_avg_function(&c.into(), 1e-6).unwrap(), Estimate::exact(0.0));
        let s = StepFunction::constant(rat(3, 7));
        assert_eq!(weak_avg_function(&s.into(), 1e-6).unwrap(), Estimate::exact(0.0));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(weak_avg_function(&PiecewiseLinear::identity().into(), 0.0).is_err());
    }

    #[test]
    fn sample_examples() {
        assert_eq!(weak_l1_samples(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(weak_l1_samples(&[4.0, 1.0]).unwrap(), 2.0);
        assert_eq!(weak_l1_samples(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(weak_l1_samples(&[-4.0, 1.0]).unwrap(), 2.0);
        assert!(weak_l1_samples(&[]).is_err());
    }
}
