//! Local slope `Λ_f(x) = sup_{x' ≠ x} |f(x) - f(x')| / |x - x'|`.
//!
//! For a piecewise-linear `f` the chord slope `x' ↦ (f(x') - f(x))/(x' - x)`
//! is monotone on every piece not containing `x` in its interior and constant
//! on the piece that does, so the supremum is a maximum over breakpoints. For
//! a step function the supremum runs over node values and over one-sided
//! approaches to the constant gaps, and may be `+∞`.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::func_model::{check_domain, Evaluate, Function, PiecewiseLinear, StepFunction};
use crate::rational::{to_f64, Rational};
use crate::ratio_max::{max_ratio, Approx};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeValue {
    pub value: Extended<Rational>,
    /// A point `x'` whose chord ratio equals `value`, when the supremum is
    /// attained.
    pub attained_at: Option<Rational>,
}

impl SlopeValue {
    fn zero() -> Self {
        Self {
            value: Extended::Finite(Rational::zero()),
            attained_at: None,
        }
    }

    fn offer(&mut self, ratio: Rational, at: Option<Rational>) {
        if let Extended::Finite(best) = &self.value {
            if ratio > *best || (self.attained_at.is_none() && at.is_some() && ratio == *best) {
                self.value = Extended::Finite(ratio);
                self.attained_at = at;
            }
        }
    }
}

fn chord(fx: &Rational, x: &Rational, fy: &Rational, y: &Rational) -> Rational {
    (fx - fy).abs() / (x - y).abs()
}

pub fn local_slope_plf(f: &PiecewiseLinear, x: &Rational) -> Result<SlopeValue> {
    check_domain(x)?;
    let fx = f.value_at(x);
    let mut best = SlopeValue::zero();
    for (b, fb) in f.breakpoints().iter().zip(f.values()) {
        if b != x {
            best.offer(chord(&fx, x, fb, b), Some(b.clone()));
        }
    }
    Ok(best)
}

pub fn local_slope_step(f: &StepFunction, x: &Rational) -> Result<SlopeValue> {
    check_domain(x)?;
    let fx = f.value_at(x);
    let nodes = f.nodes();
    let mut best = SlopeValue::zero();
    for (b, fb) in nodes.iter().zip(f.node_values()) {
        if b != x {
            best.offer(chord(&fx, x, fb, b), Some(b.clone()));
        }
    }
    for (i, level) in f.levels().iter().enumerate() {
        let (lo, hi) = (&nodes[i], &nodes[i + 1]);
        if lo < x && x < hi {
            continue;
        }
        let gap = (&fx - level).abs();
        if gap.is_zero() {
            continue;
        }
        if x == lo || x == hi {
            return Ok(SlopeValue {
                value: Extended::Infinity,
                attained_at: None,
            });
        }
        let dist = if x < lo { lo - x } else { x - hi };
        best.offer(gap / dist, None);
    }
    Ok(best)
}

pub fn local_slope(f: &Function, x: &Rational) -> Result<SlopeValue> {
    match f {
        Function::Plf(f) => local_slope_plf(f, x),
        Function::Step(f) => local_slope_step(f, x),
    }
}

/// Repeated exact local slopes of one function. Piecewise-linear queries keep
/// f64 images of the breakpoints so most chords are ruled out without exact
/// arithmetic; results equal [`local_slope`].
#[derive(Clone, Debug)]
pub struct SlopeEvaluator<'a> {
    f: &'a Function,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl<'a> SlopeEvaluator<'a> {
    pub fn new(f: &'a Function) -> Self {
        let (xs, ys) = match f {
            Function::Plf(p) => (p.breakpoints().iter().map(to_f64).collect(), p.values().iter().map(to_f64).collect()),
            Function::Step(_) => (Vec::new(), Vec::new()),
        };
        Self { f, xs, ys }
    }

    pub fn at(&self, x: &Rational) -> Result<SlopeValue> {
        let Function::Plf(f) = self.f else {
            return local_slope(self.f, x);
        };
        check_domain(x)?;
        let fx = f.value_at(x);
        let (xf, fxf) = (to_f64(x), to_f64(&fx));
        let (bs, vs) = (f.breakpoints(), f.values());
        let approx = (0..bs.len())
            .filter(|&j| &bs[j] != x)
            .map(|j| (j, Approx { a: fxf, b: self.ys[j], c: xf, d: self.xs[j] }));
        Ok(match max_ratio(approx, |j| chord(&fx, x, &vs[j], &bs[j])) {
            Some((j, value)) => SlopeValue { value: Extended::Finite(value), attained_at: Some(bs[j].clone()) },
            None => SlopeValue::zero(),
        })
    }
}

/// Largest chord ratio from `x` to the given candidates: always a lower bound
/// on the local slope.
pub fn local_slope_grid<E: Evaluate + ?Sized>(
    f: &E,
    x: &Rational,
    candidates: &[Rational],
) -> Result<SlopeValue> {
    check_domain(x)?;
    if candidates.is_empty() {
        return Err(Error::Empty("slope candidates"));
    }
    let fx = f.value_at(x);
    let mut best = SlopeValue::zero();
    for c in candidates {
        check_domain(c)?;
        if c == x {
            return Err(Error::InvalidArgument("candidate coincides with the query point".into()));
        }
        best.offer(chord(&fx, x, &f.value_at(c), c), Some(c.clone()));
    }
    Ok(best)
}

/// Uniform grid `k/n`, `k = 0..=n`, with `x` removed.
pub fn uniform_candidates(n: u32, x: &Rational) -> Vec<Rational> {
    (0..=i64::from(n))
        .map(|k| Rational::new(k.into(), i64::from(n).into()))
        .filter(|c| c != x)
        .collect()
}

/// `max(|slope|)` over the pieces, the bound every local slope obeys.
pub fn max_piece_slope(f: &PiecewiseLinear) -> Rational {
    f.lipschitz()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn tent() -> PiecewiseLinear {
        PiecewiseLinear::from_points([(int(0), int(0)), (rat(1, 2), int(1)), (int(1), int(0))]).unwrap()
    }

    fn step_half() -> StepFunction {
        StepFunction::indicator_above(rat(1, 2)).unwrap()
    }

    fn fin(v: Rational) -> Extended<Rational> {
        Extended::Finite(v)
    }

    #[test]
    fn identity_has_unit_slope_everywhere() {
        let id = PiecewiseLinear::identity();
        for x in [int(0), rat(1, 3), int(1)] {
            assert_eq!(local_slope_plf(&id, &x).unwrap().value, fin(int(1)));
        }
    }

    #[test]
    fn tent_examples_match_grid_oracle() {
        let f = tent();
        for x in [int(0), rat(1, 2)] {
            let exact = local_slope_plf(&f, &x).unwrap();
            assert_eq!(exact.value, fin(int(2)));
            let oracle = local_slope_grid(&f, &x, &uniform_candidates(1000, &x)).unwrap();
            assert_eq!(oracle.value, fin(int(2)));
        }
    }

    #[test]
    fn step_examples() {
        let f = step_half();
        let at = local_slope_step(&f, &rat(3, 4)).unwrap();
        assert_eq!(at.value, fin(int(4)));
        assert_eq!(at.attained_at, Some(rat(1, 2)));
        assert!(local_slope_step(&f, &rat(1, 2)).unwrap().value.is_infinite());
        let flat = StepFunction::constant(int(7));
        assert_eq!(local_slope_step(&flat, &rat(1, 5)).unwrap().value, fin(int(0)));
    }

    #[test]
    fn step_supremum_approached_but_not_attained() {
        // Point value 1 at the jump, so near-side chords reach 4 only in the limit.
        let f = StepFunction::new(vec![rat(1, 2)], vec![int(1)], vec![int(0), int(1)], int(0), int(1)).unwrap();
        let s = local_slope_step(&f, &rat(3, 4)).unwrap();
        assert_eq!(s.value, fin(int(4)));
        assert_eq!(s.attained_at, None);
    }

    #[test]
    fn grid_examples() {
        let id = PiecewiseLinear::identity();
        assert_eq!(local_slope_grid(&id, &int(0), &[int(1)]).unwrap().value, fin(int(1)));
        assert_eq!(local_slope_grid(&tent(), &int(0), &[int(1)]).unwrap().value, fin(int(0)));
        assert_eq!(
            local_slope_grid(&step_half(), &rat(3, 4), &[rat(1, 2)]).unwrap().value,
            fin(int(4))
        );
        assert!(local_slope_grid(&id, &int(0), &[]).is_err());
        assert!(local_slope_grid(&id, &int(0), &[int(0)]).is_err());
    }

    #[test]
    fn out_of_domain() {
        assert!(local_slope_plf(&tent(), &rat(3, 2)).is_err());
        assert!(local_slope_step(&step_half(), &rat(-1, 2)).is_err());
    }

    proptest::proptest! {
        #[test]
        fn evaluator_matches_direct_scan(
            seed in 0u64..1000,
            probes in proptest::collection::vec(0i64..=997, 1..20),
        ) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f: Function = crate::corpus::random_plf(&mut rng).into();
            let eval = SlopeEvaluator::new(&f);
            let mut points: Vec<Rational> = probes.into_iter().map(|k| rat(k, 997)).collect();
            points.extend(f.nodes().iter().take(5).cloned());
            for x in points {
                proptest::prop_assert_eq!(eval.at(&x).unwrap(), local_slope(&f, &x).unwrap());
            }
        }
    }

    #[test]
    fn evaluator_handles_steps() {
        let f: Function = step_half().into();
        let eval = SlopeEvaluator::new(&f);
        for x in [rat(1, 2), rat(1, 4), int(1)] {
            assert_eq!(eval.at(&x).unwrap(), local_slope(&f, &x).unwrap());
        }
    }
}
