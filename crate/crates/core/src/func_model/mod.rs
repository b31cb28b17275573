//! Exact representations of functions on `[0, 1]`.
//!
//! Two concrete classes are computed with exactly: continuous
//! [`PiecewiseLinear`] functions and [`StepFunction`]s with explicit values at
//! the jumps. A [`FunctionSpec`] additionally names the lazily expanded
//! constructions; every spec expands to one of the two concrete classes.

mod plf;
mod spec_file;
mod step;

pub use plf::PiecewiseLinear;
pub use spec_file::{parse_spec, spec_to_json};
pub use step::StepFunction;

use num_traits::{Signed, Zero};

use crate::constructions::{self, SignLabeling};
use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::rational::{format_rational, int, Rational};

/// Jump cap applied by [`add`] to sums of step functions.
pub const DEFAULT_MAX_JUMPS: usize = 1 << 16;

pub(crate) fn check_domain(x: &Rational) -> Result<()> {
    if x.is_negative() || *x > int(1) {
        Err(Error::OutOfDomain(format_rational(x)))
    } else {
        Ok(())
    }
}

/// Anything that can be evaluated exactly at a rational point of `[0, 1]`.
/// Callers are responsible for staying inside the domain.
pub trait Evaluate {
    fn value_at(&self, x: &Rational) -> Rational;
}

impl Evaluate for PiecewiseLinear {
    fn value_at(&self, x: &Rational) -> Rational {
        self.eval_unchecked(x)
    }
}

impl Evaluate for StepFunction {
    fn value_at(&self, x: &Rational) -> Rational {
        self.eval_unchecked(x).clone()
    }
}

impl Evaluate for Function {
    fn value_at(&self, x: &Rational) -> Rational {
        match self {
            Function::Plf(f) => f.value_at(x),
            Function::Step(f) => f.value_at(x),
        }
    }
}

/// Adapter for functions known only through an evaluator.
pub struct Sampled<F>(pub F);

impl<F: Fn(&Rational) -> Rational> Evaluate for Sampled<F> {
    fn value_at(&self, x: &Rational) -> Rational {
        (self.0)(x)
    }
}

/// A materialized function of one of the two exact classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Function {
    Plf(PiecewiseLinear),
    Step(StepFunction),
}

impl Function {
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        check_domain(x)?;
        Ok(self.value_at(x))
    }

    /// Breakpoints of a piecewise-linear function, or `0`, the jumps and `1`.
    pub fn nodes(&self) -> &[Rational] {
        match self {
            Function::Plf(f) => f.breakpoints(),
            Function::Step(f) => f.nodes(),
        }
    }

    pub fn left_limit(&self, x: &Rational) -> Rational {
        match self {
            Function::Plf(f) => f.value_at(x),
            Function::Step(f) => f.left_limit_at(x).clone(),
        }
    }

    pub fn right_limit(&self, x: &Rational) -> Rational {
        match self {
            Function::Plf(f) => f.value_at(x),
            Function::Step(f) => f.right_limit_at(x).clone(),
        }
    }

    /// Smallest `L` with `|f(x) - f(y)| <= L|x - y|`; `+∞` for a step
    /// function that is not constant.
    pub fn lipschitz(&self) -> Extended<Rational> {
        match self {
            Function::Plf(f) => Extended::Finite(f.lipschitz()),
            Function::Step(f) if f.is_constant() => Extended::Finite(Rational::zero()),
            Function::Step(_) => Extended::Infinity,
        }
    }

    pub fn scale(&self, alpha: &Rational) -> Function {
        match self {
            Function::Plf(f) => Function::Plf(f.scale(alpha)),
            Function::Step(f) => Function::Step(f.scale(alpha)),
        }
    }

    pub fn add(&self, other: &Function, max_jumps: usize) -> Result<Function> {
        match (self, other) {
            (Function::Plf(f), Function::Plf(g)) => Ok(Function::Plf(f.add(g))),
            (Function::Step(f), Function::Step(g)) => Ok(Function::Step(f.add(g, max_jumps)?)),
            _ => Err(Error::Unsupported(
                "sum of a piecewise-linear and a step function".into(),
            )),
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Function::Plf(_))
    }

    /// Continuous functions are returned unchanged.
    pub fn regularize(&self) -> Result<Function> {
        match self {
            Function::Plf(f) => Ok(Function::Plf(f.clone())),
            Function::Step(f) => Ok(Function::Step(f.regularize()?)),
        }
    }

    pub fn is_right_continuous(&self) -> bool {
        match self {
            Function::Plf(_) => true,
            Function::Step(f) => f.is_right_continuous(),
        }
    }
}

impl From<PiecewiseLinear> for Function {
    fn from(f: PiecewiseLinear) -> Self {
        Function::Plf(f)
    }
}

impl From<StepFunction> for Function {
    fn from(f: StepFunction) -> Self {
        Function::Step(f)
    }
}

/// Description of a function: either a concrete function or one of the named
/// constructions, expanded on demand with an explicit truncation parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    Plf(PiecewiseLinear),
    Step(StepFunction),
    /// Interpolant of the alternating harmonic partial sums at `1/k`, `k <= n`.
    AltHarmonic { n: u32 },
    /// Values `labels[i]·gamma` at `2^-(i+1)`.
    DyadicWitness { labels: SignLabeling, gamma: Rational },
    /// Values `labels[i]·gamma` on a packing with spacing `2·gamma/lipschitz`.
    PackingWitness {
        labels: SignLabeling,
        gamma: Rational,
        lipschitz: Rational,
    },
    /// Interpolant of `x·sin(1/x)` at its extrema down to `depth`.
    XSinInvX { depth: u32 },
}

impl FunctionSpec {
    pub fn expand(&self) -> Result<Function> {
        Ok(match self {
            FunctionSpec::Plf(f) => Function::Plf(f.clone()),
            FunctionSpec::Step(f) => Function::Step(f.clone()),
            FunctionSpec::AltHarmonic { n } => Function::Plf(constructions::expand_alt_harmonic(*n)?),
            FunctionSpec::DyadicWitness { labels, gamma } => {
                Function::Plf(constructions::expand_dyadic_witness(labels, gamma)?)
            }
            FunctionSpec::PackingWitness {
                labels,
                gamma,
                lipschitz,
            } => Function::Plf(constructions::expand_packing_witness(labels, gamma, lipschitz)?),
            FunctionSpec::XSinInvX { depth } => Function::Plf(constructions::expand_x_sin_inv_x(*depth)?),
        })
    }

    /// False only for the `x·sin(1/x)` family, whose nodes are rounded.
    pub fn is_exact(&self) -> bool {
        !matches!(self, FunctionSpec::XSinInvX { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FunctionSpec::Plf(_) => "plf",
            FunctionSpec::Step(_) => "step",
            FunctionSpec::AltHarmonic { .. } => "alt_harmonic",
            FunctionSpec::DyadicWitness { .. } => "dyadic",
            FunctionSpec::PackingWitness { .. } => "packing",
            FunctionSpec::XSinInvX { .. } => "xsininvx",
        }
    }
}

impl From<Function> for FunctionSpec {
    fn from(f: Function) -> Self {
        match f {
            Function::Plf(f) => FunctionSpec::Plf(f),
            Function::Step(f) => FunctionSpec::Step(f),
        }
    }
}

impl From<PiecewiseLinear> for FunctionSpec {
    fn from(f: PiecewiseLinear) -> Self {
        FunctionSpec::Plf(f)
    }
}

impl From<StepFunction> for FunctionSpec {
    fn from(f: StepFunction) -> Self {
        FunctionSpec::Step(f)
    }
}

/// Exact value of `f` at `x`; at a jump this is the stored point value.
pub fn evaluate(f: &FunctionSpec, x: &Rational) -> Result<Rational> {
    check_domain(x)?;
    f.expand()?.eval(x)
}

pub fn scale(f: &FunctionSpec, alpha: &Rational) -> Result<FunctionSpec> {
    Ok(f.expand()?.scale(alpha).into())
}

pub fn add(f: &FunctionSpec, g: &FunctionSpec) -> Result<FunctionSpec> {
    add_capped(f, g, DEFAULT_MAX_JUMPS)
}

pub fn add_capped(f: &FunctionSpec, g: &FunctionSpec, max_jumps: usize) -> Result<FunctionSpec> {
    Ok(f.expand()?.add(&g.expand()?, max_jumps)?.into())
}

pub fn regularize(f: &StepFunction) -> Result<StepFunction> {
    f.regularize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn evaluate_examples() {
        let id = FunctionSpec::Plf(PiecewiseLinear::identity());
        assert_eq!(evaluate(&id, &rat(1, 3)).unwrap(), rat(1, 3));
        let step = FunctionSpec::Step(StepFunction::indicator_above(rat(1, 2)).unwrap());
        assert_eq!(evaluate(&step, &rat(1, 2)).unwrap(), int(0));
        let alt = FunctionSpec::AltHarmonic { n: 4 };
        assert_eq!(evaluate(&alt, &rat(1, 3)).unwrap(), rat(5, 6));
        assert!(matches!(evaluate(&id, &rat(5, 4)), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn scale_by_zero_gives_zero() {
        let f = FunctionSpec::AltHarmonic { n: 5 };
        let z = scale(&f, &int(0)).unwrap().expand().unwrap();
        for k in 0..=10 {
            assert_eq!(z.eval(&rat(k, 10)).unwrap(), int(0));
        }
        assert_eq!(z.lipschitz(), Extended::Finite(int(0)));
    }

    #[test]
    fn add_identity_and_constant() {
        let id = FunctionSpec::Plf(PiecewiseLinear::identity());
        let one = FunctionSpec::Plf(PiecewiseLinear::constant(int(1)));
        let s = add(&id, &one).unwrap();
        assert_eq!(evaluate(&s, &int(0)).unwrap(), int(1));
        assert_eq!(scale(&id, &int(3)).and_then(|g| evaluate(&g, &rat(1, 2))).unwrap(), rat(3, 2));
    }

    #[test]
    fn mixed_sum_is_unsupported() {
        let id = FunctionSpec::Plf(PiecewiseLinear::identity());
        let step = FunctionSpec::Step(StepFunction::indicator_above(rat(1, 2)).unwrap());
        assert!(matches!(add(&id, &step), Err(Error::Unsupported(_))));
    }

    #[test]
    fn step_lipschitz_is_infinite() {
        let step = Function::Step(StepFunction::indicator_above(rat(1, 2)).unwrap());
        assert!(step.lipschitz().is_infinite());
        let flat = Function::Step(StepFunction::constant(int(4)));
        assert_eq!(flat.lipschitz(), Extended::Finite(int(0)));
    }
}
