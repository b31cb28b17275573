//! Strong and weak average smoothness of `f` under the uniform law on [0, 1].
//!
//! `strong_avg` is the mean of `Λ_f`, `weak_avg` its weak-L1 norm
//! `sup_t t·m{Λ_f >= t}`. Both come back as an [`Estimate`] bracket.

mod chain;
mod strong;
mod superlevel;
mod weak;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::func_model::{Function, PiecewiseLinear, StepFunction};
use crate::rational::Rational;

pub use chain::{variation_sandwich, verify_chain, ChainReport, SandwichReport, HALF_WEAK_SLACK, STRONG_SLACK};
pub use strong::{strong_avg, strong_avg_function, StrongOptions, DEFAULT_CAP, DEFAULT_DEPTH};
pub use weak::{weak_avg, weak_avg_function, weak_l1_samples};

pub(crate) use superlevel::Segmented;

/// Default bracket width for both averages.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// `upper - lower <= tol`.
    Finite,
    /// Lower bounds passed `cap` after `depth` refinement steps.
    DivergentBeyondCap { cap: f64, depth: u32 },
    /// The evaluation budget ran out before the bracket closed.
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub lower: f64,
    pub upper: ExtendedReal,
    pub verdict: Verdict,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { lower: value, upper: ExtendedReal::Finite(value), verdict: Verdict::Finite }
    }

    pub fn is_finite(&self) -> bool {
        self.verdict == Verdict::Finite
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.verdict, Verdict::DivergentBeyondCap { .. })
    }

    pub fn upper_f64(&self) -> f64 {
        self.upper.as_f64()
    }

    pub fn width(&self) -> f64 {
        self.upper_f64() - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && ExtendedReal::Finite(value) <= self.upper
    }

    /// Bracket of `|alpha|·self`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let a = alpha.abs();
        Self {
            lower: self.lower * a,
            upper: self.upper.map(|u| u * a),
            verdict: self.verdict,
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Verdict::DivergentBeyondCap { cap, .. } => write!(f, "inf (cap {cap:e} exceeded)"),
            _ => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {value}")))
    }
}

/// Exact Lebesgue measure of `{x : Λ_f(x) >= t}`.
pub fn superlevel_measure(f: &PiecewiseLinear, t: &Rational) -> Result<Rational> {
    superlevel_measure_function(&Function::Plf(f.clone()), t)
}

/// [`superlevel_measure`] for step functions.
pub fn superlevel_measure_step(f: &StepFunction, t: &Rational) -> Result<Rational> {
    superlevel_measure_function(&Function::Step(f.clone()), t)
}

pub fn superlevel_measure_function(f: &Function, t: &Rational) -> Result<Rational> {
    use num_traits::Signed;
    if !t.is_positive() {
        return Err(Error::InvalidArgument(format!("level must be positive, got {t}")));
    }
    Ok(Segmented::<Rational>::from_function(f).superlevel(t))
}

/// Floating-point counterpart of [`superlevel_measure_function`].
pub fn superlevel_measure_f64(f: &Function, t: f64) -> Result<f64> {
    check_positive("level", t)?;
    Ok(Segmented::<f64>::from_function(f).superlevel(&t))
}
