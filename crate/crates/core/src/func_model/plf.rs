use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

use super::check_domain;

/// Continuous piecewise-linear function on `[0, 1]`, given by its
/// breakpoints and the values taken there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl PiecewiseLinear {
    /// Breakpoints must be strictly increasing, start at 0 and end at 1.
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidFunction(
                "a piecewise-linear function needs at least two breakpoints".into(),
            ));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() || breakpoints[breakpoints.len() - 1] != int(1) {
            return Err(Error::InvalidFunction(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction(format!(
                "breakpoints not strictly increasing at {}",
                format_rational(&w[1])
            )));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn from_points(points: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let (xs, ys) = points.into_iter().unzip();
        Self::new(xs, ys)
    }

    pub fn identity() -> Self {
        Self {
            breakpoints: vec![int(0), int(1)],
            values: vec![int(0), int(1)],
        }
    }

    pub fn constant(value: Rational) -> Self {
        Self {
            breakpoints: vec![int(0), int(1)],
            values: vec![value.clone(), value],
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Slope of piece `i`, which spans `[breakpoints[i], breakpoints[i + 1]]`.
    pub fn slope(&self, i: usize) -> Rational {
        (&self.values[i + 1] - &self.values[i]) / (&self.breakpoints[i + 1] - &self.breakpoints[i])
    }

    /// Largest piece-slope magnitude, which is the Lipschitz constant.
    pub fn lipschitz(&self) -> Rational {
        (0..self.piece_count())
            .filter(|&i| self.values[i] != self.values[i + 1])
            .map(|i| self.slope(i).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `Ok(i)` if `x` is breakpoint `i`, `Err(i)` if `x` lies inside piece `i`.
    pub(crate) fn locate(&self, x: &Rational) -> std::result::Result<usize, usize> {
        match self.breakpoints.binary_search(x) {
            Ok(i) => Ok(i),
            Err(i) => Err(i - 1),
        }
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Rational) -> Rational {
        match self.locate(x) {
            Ok(i) => self.values[i].clone(),
            Err(i) => &self.values[i] + self.slope(i) * (x - &self.breakpoints[i]),
        }
    }

    pub fn scale(&self, alpha: &Rational) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }

    /// Pointwise sum; the breakpoint sets are merged.
    pub fn add(&self, other: &Self) -> Self {
        let mut xs: Vec<Rational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        xs.sort();
        xs.dedup();
        let ys = xs
            .iter()
            .map(|x| self.eval_unchecked(x) + other.eval_unchecked(x))
            .collect();
        Self {
            breakpoints: xs,
            values: ys,
        }
    }

    /// Drops breakpoints where the slope does not change.
    pub fn simplify(&self) -> Self {
        let mut xs = vec![self.breakpoints[0].clone()];
        let mut ys = vec![self.values[0].clone()];
        for i in 1..self.breakpoints.len() - 1 {
            if self.slope(i - 1) != self.slope(i) {
                xs.push(self.breakpoints[i].clone());
                ys.push(self.values[i].clone());
            }
        }
        xs.push(self.breakpoints[self.breakpoints.len() - 1].clone());
        ys.push(self.values[self.values.len() - 1].clone());
        Self {
            breakpoints: xs,
            values: ys,
        }
    }
}
