use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

use super::check_domain;

/// Step function on `[0, 1]`: constant on each open gap between consecutive
/// nodes, with an explicit value at every node. The nodes are `0`, the jump
/// points, and `1`.
///
/// The value at a jump may differ from both one-sided limits; this matters
/// for both the variation and the local slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    nodes: Vec<Rational>,
    node_values: Vec<Rational>,
    levels: Vec<Rational>,
}

impl StepFunction {
    /// `levels[i]` is the constant value on the gap left of `jump_points[i]`
    /// (and `levels[k]` the value right of the last jump).
    pub fn new(
        jump_points: Vec<Rational>,
        point_values: Vec<Rational>,
        levels: Vec<Rational>,
        value_at_zero: Rational,
        value_at_one: Rational,
    ) -> Result<Self> {
        if point_values.len() != jump_points.len() {
            return Err(Error::InvalidFunction(format!(
                "{} jump points but {} point values",
                jump_points.len(),
                point_values.len()
            )));
        }
        if levels.len() != jump_points.len() + 1 {
            return Err(Error::InvalidFunction(format!(
                "{} jump points need {} levels, got {}",
                jump_points.len(),
                jump_points.len() + 1,
                levels.len()
            )));
        }
        if let Some(bad) = jump_points.iter().find(|x| !x.is_positive() || **x >= int(1)) {
            return Err(Error::InvalidFunction(format!(
                "jump point {} is not inside (0, 1)",
                format_rational(bad)
            )));
        }
        if let Some(w) = jump_points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction(format!(
                "jump points not strictly increasing at {}",
                format_rational(&w[1])
            )));
        }
        let mut nodes = Vec::with_capacity(jump_points.len() + 2);
        nodes.push(int(0));
        nodes.extend(jump_points);
        nodes.push(int(1));
        let mut node_values = Vec::with_capacity(nodes.len());
        node_values.push(value_at_zero);
        node_values.extend(point_values);
        node_values.push(value_at_one);
        Ok(Self {
            nodes,
            node_values,
            levels,
        })
    }

    /// Builds directly from the node form: `nodes` includes 0 and 1.
    pub(crate) fn from_nodes(
        nodes: Vec<Rational>,
        node_values: Vec<Rational>,
        levels: Vec<Rational>,
    ) -> Self {
        debug_assert_eq!(nodes.len(), node_values.len());
        debug_assert_eq!(nodes.len(), levels.len() + 1);
        Self {
            nodes,
            node_values,
            levels,
        }
    }

    pub fn constant(value: Rational) -> Self {
        Self::from_nodes(
            vec![int(0), int(1)],
            vec![value.clone(), value.clone()],
            vec![value],
        )
    }

    /// The indicator `1{x > c}` for `c` in `(0, 1)`.
    pub fn indicator_above(c: Rational) -> Result<Self> {
        Self::new(vec![c], vec![int(0)], vec![int(0), int(1)], int(0), int(1))
    }

    pub fn jump_points(&self) -> &[Rational] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn point_values(&self) -> &[Rational] {
        &self.node_values[1..self.node_values.len() - 1]
    }

    /// Limits from the left at each jump point.
    pub fn left_limits(&self) -> &[Rational] {
        &self.levels[..self.levels.len() - 1]
    }

    /// Limits from the right at each jump point.
    pub fn right_limits(&self) -> &[Rational] {
        &self.levels[1..]
    }

    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn value_at_zero(&self) -> &Rational {
        &self.node_values[0]
    }

    pub fn value_at_one(&self) -> &Rational {
        &self.node_values[self.node_values.len() - 1]
    }

    /// All nodes, `0` and `1` included.
    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    pub fn node_values(&self) -> &[Rational] {
        &self.node_values
    }

    /// Values in left-to-right order: node, gap, node, ..., node.
    pub(crate) fn value_sequence(&self) -> impl Iterator<Item = &Rational> {
        let n = self.levels.len();
        (0..=2 * n).map(move |k| {
            if k % 2 == 0 {
                &self.node_values[k / 2]
            } else {
                &self.levels[k / 2]
            }
        })
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x).clone())
    }

    pub(crate) fn eval_unchecked(&self, x: &Rational) -> &Rational {
        match self.nodes.binary_search(x) {
            Ok(i) => &self.node_values[i],
            Err(i) => &self.levels[i - 1],
        }
    }

    /// Limit from the left at `x` (`f(0)` at `x = 0`).
    pub fn left_limit_at(&self, x: &Rational) -> &Rational {
        match self.nodes.binary_search(x) {
            Ok(0) => &self.node_values[0],
            Ok(i) => &self.levels[i - 1],
            Err(i) => &self.levels[i - 1],
        }
    }

    /// Limit from the right at `x` (`f(1)` at `x = 1`).
    pub fn right_limit_at(&self, x: &Rational) -> &Rational {
        match self.nodes.binary_search(x) {
            Ok(i) if i + 1 == self.nodes.len() => &self.node_values[i],
            Ok(i) => &self.levels[i],
            Err(i) => &self.levels[i - 1],
        }
    }

    pub fn is_constant(&self) -> bool {
        let first = &self.node_values[0];
        self.value_sequence().all(|v| v == first)
    }

    pub fn is_monotone(&self) -> bool {
        let seq: Vec<&Rational> = self.value_sequence().collect();
        seq.windows(2).all(|w| w[0] <= w[1]) || seq.windows(2).all(|w| w[0] >= w[1])
    }

    /// True when every point value (including at 0) equals the right limit.
    pub fn is_right_continuous(&self) -> bool {
        (0..self.levels.len()).all(|i| self.node_values[i] == self.levels[i])
    }

    /// Right-continuous modification of a monotone step function: the value at
    /// each jump, and at 0, is replaced by the limit from the right.
    pub fn regularize(&self) -> Result<Self> {
        if !self.is_monotone() {
            return Err(Error::NonMonotone);
        }
        let mut node_values = self.node_values.clone();
        for (i, level) in self.levels.iter().enumerate() {
            node_values[i] = level.clone();
        }
        Ok(Self::from_nodes(
            self.nodes.clone(),
            node_values,
            self.levels.clone(),
        ))
    }

    pub fn scale(&self, alpha: &Rational) -> Self {
        Self::from_nodes(
            self.nodes.clone(),
            self.node_values.iter().map(|v| v * alpha).collect(),
            self.levels.iter().map(|v| v * alpha).collect(),
        )
    }

    /// Pointwise sum; fails when the merged jump set exceeds `max_jumps`.
    pub fn add(&self, other: &Self, max_jumps: usize) -> Result<Self> {
        let mut nodes: Vec<Rational> = self.nodes.iter().chain(other.nodes.iter()).cloned().collect();
        nodes.sort();
        nodes.dedup();
        let jumps = nodes.len() - 2;
        if jumps > max_jumps {
            return Err(Error::JumpCapExceeded {
                count: jumps,
                cap: max_jumps,
            });
        }
        let node_values = nodes
            .iter()
            .map(|x| self.eval_unchecked(x) + other.eval_unchecked(x))
            .collect();
        let two = int(2);
        let levels = nodes
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / &two;
                self.eval_unchecked(&mid) + other.eval_unchecked(&mid)
            })
            .collect();
        Ok(Self::from_nodes(nodes, node_values, levels))
    }

    /// Largest minus smallest value attained or approached.
    pub fn range(&self) -> Rational {
        let mut it = self.value_sequence();
        let first = it.next().cloned().unwrap_or_else(Rational::zero);
        let (lo, hi) = it.fold((first.clone(), first), |(lo, hi), v| {
            (
                if v < &lo { v.clone() } else { lo },
                if v > &hi { v.clone() } else { hi },
            )
        });
        hi - lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn step_half() -> StepFunction {
        StepFunction::indicator_above(rat(1, 2)).unwrap()
    }

    #[test]
    fn value_at_jump_is_the_point_value() {
        let f = step_half();
        assert_eq!(f.eval(&rat(1, 2)).unwrap(), int(0));
        assert_eq!(f.eval(&rat(3, 4)).unwrap(), int(1));
        assert_eq!(f.eval(&int(0)).unwrap(), int(0));
        assert_eq!(f.left_limits(), &[int(0)]);
        assert_eq!(f.right_limits(), &[int(1)]);
    }

    #[test]
    fn regularize_takes_right_limits() {
        let g = step_half().regularize().unwrap();
        assert_eq!(g.eval(&rat(1, 2)).unwrap(), int(1));
        assert!(g.is_right_continuous());
        assert_eq!(g.regularize().unwrap(), g);
    }

    #[test]
    fn regularize_two_jump_staircase() {
        // Left-continuous staircase 0 -> 1 -> 2.
        let f = StepFunction::new(
            vec![rat(1, 3), rat(2, 3)],
            vec![int(0), int(1)],
            vec![int(0), int(1), int(2)],
            int(0),
            int(2),
        )
        .unwrap();
        let g = f.regularize().unwrap();
        assert_eq!(g.point_values(), &[int(1), int(2)]);
    }

    #[test]
    fn regularize_moves_value_at_zero() {
        let f = StepFunction::new(vec![], vec![], vec![int(1)], int(0), int(1)).unwrap();
        assert_eq!(f.regularize().unwrap().value_at_zero(), &int(1));
    }

    #[test]
    fn regularize_rejects_non_monotone() {
        let f = StepFunction::new(
            vec![rat(1, 2)],
            vec![int(2)],
            vec![int(0), int(1)],
            int(0),
            int(1),
        )
        .unwrap();
        assert_eq!(f.regularize(), Err(Error::NonMonotone));
    }

    #[test]
    fn rejects_malformed() {
        assert!(StepFunction::new(vec![int(1)], vec![int(0)], vec![int(0), int(1)], int(0), int(0)).is_err());
        assert!(StepFunction::new(vec![rat(1, 2)], vec![], vec![int(0), int(1)], int(0), int(0)).is_err());
        assert!(StepFunction::new(vec![rat(1, 2)], vec![int(0)], vec![int(0)], int(0), int(0)).is_err());
    }

    #[test]
    fn add_merges_jumps() {
        let f = step_half();
        let g = StepFunction::indicator_above(rat(1, 4)).unwrap();
        let h = f.add(&g, 8).unwrap();
        assert_eq!(h.jump_points(), &[rat(1, 4), rat(1, 2)]);
        assert_eq!(h.eval(&rat(3, 8)).unwrap(), int(1));
        assert_eq!(h.eval(&rat(1, 2)).unwrap(), int(1));
        assert_eq!(h.eval(&rat(3, 4)).unwrap(), int(2));
        assert!(matches!(f.add(&g, 1), Err(Error::JumpCapExceeded { count: 2, cap: 1 })));
    }
}
