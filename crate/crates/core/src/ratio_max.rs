//! Exact maximum of many ratios `|a_j - b_j| / |c_j - d_j|`, with f64
//! brackets deciding which ratios are worth computing exactly.

use num_traits::Zero;

use crate::rational::Rational;

/// Relative error allowed for each f64 image of an exact operand; a few ulps
/// beyond what a faithful conversion produces.
const OPERAND_ERR: f64 = 1.0 / (1u64 << 49) as f64;
/// Relative error of one f64 division.
const DIV_ERR: f64 = 1.0 / (1u64 << 51) as f64;

/// f64 images of the four operands of `|a - b| / |c - d|`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Approx {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Approx {
    /// `[lo, hi]` containing the exact ratio.
    fn bracket(&self) -> (f64, f64) {
        let parts = [self.a, self.b, self.c, self.d];
        if parts.iter().any(|v| !v.is_finite()) {
            return (0.0, f64::INFINITY);
        }
        let num = (self.a - self.b).abs();
        let num_err = OPERAND_ERR * (self.a.abs() + self.b.abs());
        let den = (self.c - self.d).abs();
        let den_err = OPERAND_ERR * (self.c.abs() + self.d.abs());
        let lo = if num > num_err { (num - num_err) / (den + den_err) * (1.0 - DIV_ERR) } else { 0.0 };
        let hi = if den > den_err { (num + num_err) / (den - den_err) * (1.0 + DIV_ERR) } else { f64::INFINITY };
        (lo, hi)
    }
}

/// First index attaining the largest exact ratio, with that ratio. `exact(j)`
/// runs only for ratios whose bracket reaches the best lower bound, which
/// always includes every maximizer.
pub(crate) fn max_ratio(
    approx: impl Iterator<Item = (usize, Approx)>,
    exact: impl Fn(usize) -> Rational,
) -> Option<(usize, Rational)> {
    let brackets: Vec<(usize, f64, f64)> = approx
        .map(|(j, a)| {
            let (lo, hi) = a.bracket();
            (j, lo, hi)
        })
        .collect();
    let floor = brackets.iter().map(|&(_, lo, _)| lo).fold(0.0, f64::max);
    let mut best: Option<(usize, Rational)> = None;
    for &(j, _, hi) in &brackets {
        if hi < floor {
            continue;
        }
        let value = exact(j);
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((j, value));
        }
    }
    best
}

/// The largest exact ratio, or zero when there are none.
pub(crate) fn max_ratio_value(
    approx: impl Iterator<Item = (usize, Approx)>,
    exact: impl Fn(usize) -> Rational,
) -> Rational {
    max_ratio(approx, exact).map_or_else(Rational::zero, |(_, v)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, to_f64};
    use proptest::prelude::*;

    fn ratio(q: &[Rational; 4]) -> Rational {
        use num_traits::Signed;
        (&q[0] - &q[1]).abs() / (&q[2] - &q[3]).abs()
    }

    fn approx(q: &[Rational; 4]) -> Approx {
        Approx { a: to_f64(&q[0]), b: to_f64(&q[1]), c: to_f64(&q[2]), d: to_f64(&q[3]) }
    }

    proptest! {
        #[test]
        fn matches_plain_maximum(
            raw in prop::collection::vec(
                ((-1000i64..1000, 1i64..2000), (-1000i64..1000, 1i64..2000), (0i64..1000, 1i64..1000), 1i64..1000),
                1..40,
            )
        ) {
            let quads: Vec<[Rational; 4]> = raw
                .iter()
                .map(|&((an, ad), (bn, bd), (cn, cd), gap)| {
                    let c = rat(cn, cd);
                    // Near-equal pairs stress the brackets.
                    [rat(an, ad), rat(bn, bd), c.clone(), c + rat(1, gap * 1_000_003)]
                })
                .collect();
            let plain = quads
                .iter()
                .enumerate()
                .fold(None::<(usize, Rational)>, |acc, (j, q)| {
                    let v = ratio(q);
                    match acc {
                        Some((_, ref b)) if v <= *b => acc,
                        _ => Some((j, v)),
                    }
                });
            let pruned = max_ratio(quads.iter().map(approx).enumerate(), |j| ratio(&quads[j]));
            prop_assert_eq!(pruned, plain);
        }
    }

    #[test]
    fn ties_keep_the_first_index() {
        let quads = [
            [rat(1, 1), rat(0, 1), rat(1, 1), rat(0, 1)],
            [rat(2, 1), rat(0, 1), rat(2, 1), rat(0, 1)],
        ];
        let got = max_ratio(quads.iter().map(approx).enumerate(), |j| ratio(&quads[j]));
        assert_eq!(got, Some((0, rat(1, 1))));
        assert_eq!(max_ratio_value(std::iter::empty(), |_| unreachable!()), rat(0, 1));
    }
}
