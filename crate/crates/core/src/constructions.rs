//! The named witness functions: alternating harmonic interpolant, dyadic and
//! packing shattering witnesses, and the `x·sin(1/x)` demonstration family.
//!
//! All truncations extend by a constant past the last node. That adds neither
//! variation nor slope, so a truncation can only lower the seminorms.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::func_model::PiecewiseLinear;
use crate::rational::{format_rational, int, rat, round_decimal, Rational};

/// Digits kept when rounding the `x·sin(1/x)` nodes.
const XSIN_DIGITS: u32 = 15;

/// A nonempty vector of `±1` labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignLabeling(Vec<i8>);

impl SignLabeling {
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("sign labeling"));
        }
        if let Some(bad) = labels.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("label {bad} is not ±1")));
        }
        Ok(Self(labels))
    }

    pub fn constant(len: usize, sign: i8) -> Self {
        assert!(len > 0 && (sign == 1 || sign == -1));
        Self(vec![sign; len])
    }

    /// `+1, -1, +1, ...` when `first` is `+1`.
    pub fn alternating(len: usize, first: i8) -> Self {
        assert!(len > 0 && (first == 1 || first == -1));
        Self((0..len).map(|i| if i % 2 == 0 { first } else { -first }).collect())
    }

    /// Labeling number `index` out of `2^len`: the first label is the most
    /// significant bit, and a set bit means `+1`.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len > 0 && len < 64);
        Self(
            (0..len)
                .map(|i| if (index >> (len - 1 - i)) & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn index(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &s| (acc << 1) | u64::from(s == 1))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn sign(&self, i: usize) -> Rational {
        int(i64::from(self.0[i]))
    }
}

impl fmt::Display for SignLabeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Alternating harmonic partial sums `1 - 1/2 + ... ± 1/n` for `n = 1..=count`.
pub fn alternating_harmonic_sums(count: u32) -> Vec<Rational> {
    let mut sums = Vec::with_capacity(count as usize);
    let mut acc = Rational::zero();
    for k in 1..=i64::from(count) {
        let term = rat(1, k);
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
        sums.push(acc.clone());
    }
    sums
}

/// Linear interpolant of `(1/k, 1 - 1/2 + ... ± 1/k)` for `k = 1..=n`, held
/// constant on `[0, 1/n]`.
pub fn expand_alt_harmonic(n: u32) -> Result<PiecewiseLinear> {
    if n == 0 {
        return Err(Error::InvalidArgument("alternating harmonic needs n >= 1".into()));
    }
    let sums = alternating_harmonic_sums(n);
    let mut xs = Vec::with_capacity(n as usize + 1);
    let mut ys = Vec::with_capacity(n as usize + 1);
    xs.push(int(0));
    ys.push(sums[n as usize - 1].clone());
    for k in (1..=n).rev() {
        xs.push(rat(1, i64::from(k)));
        ys.push(sums[k as usize - 1].clone());
    }
    PiecewiseLinear::new(xs, ys)
}

/// The points `2^-1, ..., 2^-m` in decreasing order.
pub fn dyadic_points(m: usize) -> Vec<Rational> {
    (1..=m)
        .map(|n| Rational::new(BigInt::one(), BigInt::one() << n))
        .collect()
}

/// Takes the value `labels[n-1]·gamma` at `2^-n`, is linear in between, and
/// constant on `[0, 2^-m]` and `[1/2, 1]`.
pub fn expand_dyadic_witness(labels: &SignLabeling, gamma: &Rational) -> Result<PiecewiseLinear> {
    if !gamma.is_positive() {
        return Err(Error::InvalidArgument("gamma must be positive".into()));
    }
    let m = labels.len();
    let points = dyadic_points(m);
    let mut xs = Vec::with_capacity(m + 2);
    let mut ys = Vec::with_capacity(m + 2);
    xs.push(int(0));
    ys.push(labels.sign(m - 1) * gamma);
    for i in (0..m).rev() {
        xs.push(points[i].clone());
        ys.push(labels.sign(i) * gamma);
    }
    xs.push(int(1));
    ys.push(labels.sign(0) * gamma);
    PiecewiseLinear::new(xs, ys)
}

/// Number of points of the `2·gamma/lipschitz` packing of `[0, 1]`:
/// `1 + floor(lipschitz / (2·gamma))`.
pub fn packing_capacity(gamma: &Rational, lipschitz: &Rational) -> Result<BigInt> {
    if !gamma.is_positive() || !lipschitz.is_positive() {
        return Err(Error::InvalidArgument("gamma and L must be positive".into()));
    }
    Ok(BigInt::one() + (lipschitz / (int(2) * gamma)).floor().to_integer())
}

/// Points `(i - 1)·2·gamma/lipschitz` for `i = 1..=m`.
pub fn packing_points(m: usize, gamma: &Rational, lipschitz: &Rational) -> Result<Vec<Rational>> {
    let capacity = packing_capacity(gamma, lipschitz)?;
    let spacing = int(2) * gamma / lipschitz;
    if BigInt::from(m) > capacity {
        return Err(Error::PackingDoesNotFit {
            points: m,
            spacing: format_rational(&spacing),
        });
    }
    Ok((0..m).map(|i| int(i as i64) * &spacing).collect())
}

/// Linear interpolation of `(x_i, labels[i]·gamma)` over the packing, held
/// constant to the right of the last point. Every slope has magnitude at
/// most `lipschitz`.
pub fn expand_packing_witness(
    labels: &SignLabeling,
    gamma: &Rational,
    lipschitz: &Rational,
) -> Result<PiecewiseLinear> {
    let m = labels.len();
    let points = packing_points(m, gamma, lipschitz)?;
    let mut xs = points;
    let mut ys: Vec<Rational> = (0..m).map(|i| labels.sign(i) * gamma).collect();
    if xs[m - 1] < int(1) {
        xs.push(int(1));
        ys.push(ys[m - 1].clone());
    }
    PiecewiseLinear::new(xs, ys)
}

/// Interpolates `x·sin(1/x)` at the rounded points `2/((2k+1)π)`,
/// `k = 0..=depth`, where the value is `(-1)^k` times the point. `f(0) = 0`
/// and the function is constant right of `2/π`. Inexact by construction.
pub fn expand_x_sin_inv_x(depth: u32) -> Result<PiecewiseLinear> {
    if depth == 0 {
        return Err(Error::InvalidArgument("x·sin(1/x) needs depth >= 1".into()));
    }
    let mut xs = vec![int(0)];
    let mut ys = vec![int(0)];
    for k in (0..=depth).rev() {
        let node = round_decimal(2.0 / ((2.0 * f64::from(k) + 1.0) * PI), XSIN_DIGITS);
        let value = if k % 2 == 0 { node.clone() } else { -node.clone() };
        xs.push(node);
        ys.push(value);
    }
    let last = ys[ys.len() - 1].clone();
    xs.push(int(1));
    ys.push(last);
    PiecewiseLinear::new(xs, ys)
}

/// `H_n - 1 = 1/2 + ... + 1/n`, computed independently of any expansion.
pub fn harmonic_minus_one(n: u32) -> Rational {
    (2..=i64::from(n)).fold(Rational::zero(), |acc, k| acc + rat(1, k))
}

pub fn capacity_as_usize(capacity: &BigInt) -> Option<usize> {
    capacity.to_usize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func_model::Evaluate;
    use crate::variation::total_variation_plf;

    #[test]
    fn alt_harmonic_small_cases() {
        let one = expand_alt_harmonic(1).unwrap();
        assert_eq!(one, PiecewiseLinear::constant(int(1)));
        let two = expand_alt_harmonic(2).unwrap();
        assert_eq!(two.breakpoints(), &[int(0), rat(1, 2), int(1)]);
        assert_eq!(two.values(), &[rat(1, 2), rat(1, 2), int(1)]);
        let four = expand_alt_harmonic(4).unwrap();
        assert_eq!(total_variation_plf(&four), rat(13, 12));
        assert!(expand_alt_harmonic(0).is_err());
    }

    #[test]
    fn dyadic_alternating_slopes() {
        let gamma = rat(1, 6);
        let y = SignLabeling::alternating(6, -1);
        let f = expand_dyadic_witness(&y, &gamma).unwrap();
        // piece [2^-(n+1), 2^-n] has slope magnitude 2γ/|I_n| = 4γ·2^n
        for n in 1..6u32 {
            let lo = Rational::new(BigInt::one(), BigInt::one() << (n + 1));
            let i = f.breakpoints().iter().position(|x| *x == lo).unwrap();
            assert_eq!(f.slope(i).abs(), int(4) * &gamma * int(1 << n));
        }
        let points = dyadic_points(6);
        for (i, x) in points.iter().enumerate() {
            assert_eq!(f.value_at(x), y.sign(i) * &gamma);
        }
    }

    #[test]
    fn dyadic_constant_labels_give_constant() {
        let f = expand_dyadic_witness(&SignLabeling::constant(5, 1), &rat(1, 3)).unwrap();
        assert_eq!(f.lipschitz(), int(0));
    }

    #[test]
    fn packing_example() {
        let y = SignLabeling::new(vec![1, -1, 1]).unwrap();
        let f = expand_packing_witness(&y, &rat(1, 4), &int(1)).unwrap();
        assert_eq!(f.breakpoints(), &[int(0), rat(1, 2), int(1)]);
        assert_eq!(f.values(), &[rat(1, 4), rat(-1, 4), rat(1, 4)]);
        assert_eq!(f.lipschitz(), int(1));
        assert_eq!(packing_capacity(&rat(1, 4), &int(1)).unwrap(), BigInt::from(3));
        let too_many = SignLabeling::alternating(4, 1);
        assert!(matches!(
            expand_packing_witness(&too_many, &rat(1, 4), &int(1)),
            Err(Error::PackingDoesNotFit { points: 4, .. })
        ));
    }

    #[test]
    fn packing_single_point_is_constant() {
        let f = expand_packing_witness(&SignLabeling::constant(1, -1), &int(10), &int(1)).unwrap();
        assert_eq!(f, PiecewiseLinear::constant(int(-10)));
    }

    #[test]
    fn x_sin_inv_x_depth_one() {
        let f = expand_x_sin_inv_x(1).unwrap();
        assert_eq!(f.breakpoints().len(), 4);
        let v = f.values();
        assert!(v[1].is_negative() && v[2].is_positive());
        let x = crate::rational::to_f64(&f.breakpoints()[2]);
        assert!((x - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn labeling_index_round_trip() {
        for idx in 0..16 {
            assert_eq!(SignLabeling::from_index(idx, 4).index(), idx);
        }
        assert_eq!(SignLabeling::from_index(0b101, 3).to_string(), "+-+");
        assert!(SignLabeling::new(vec![]).is_err());
        assert!(SignLabeling::new(vec![0]).is_err());
    }
}
