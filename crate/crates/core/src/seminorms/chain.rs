//! The inequality chains the two averages sit in.

use serde::Serialize;

use super::{strong_avg_function, weak_avg_function, Estimate, StrongOptions};
use crate::error::Result;
use crate::extended::ExtendedReal;
use crate::func_model::Function;
use crate::rational::{to_f64, Rational};
use crate::variation::total_variation;

/// `wa <= sa <= Lip`.
#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub weak: Estimate,
    pub strong: Estimate,
    pub lipschitz: ExtendedReal,
    pub weak_le_strong: bool,
    pub strong_le_lipschitz: bool,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.weak_le_strong && self.strong_le_lipschitz
    }
}

impl ChainReport {
    /// Judges already computed estimates with slack `tol` on each side.
    pub fn assemble(weak: Estimate, strong: Estimate, lipschitz: ExtendedReal, tol: f64) -> Self {
        let weak_le_strong = ExtendedReal::Finite(weak.lower) <= strong.upper.map(|u| u + tol);
        let strong_le_lipschitz = ExtendedReal::Finite(strong.lower) <= lipschitz.map(|l| l + tol);
        Self { weak, strong, lipschitz, weak_le_strong, strong_le_lipschitz }
    }
}

pub fn verify_chain(f: &Function, tol: f64) -> Result<ChainReport> {
    let weak = weak_avg_function(f, tol)?;
    let strong = strong_avg_function(f, &StrongOptions { tol, ..StrongOptions::default() })?;
    Ok(ChainReport::assemble(weak, strong, f.lipschitz().to_real(), tol))
}

/// Slack for `wa/2 <= V`, where `V` is exact.
pub const HALF_WEAK_SLACK: f64 = 1e-9;
/// Slack for `V <= sa`.
pub const STRONG_SLACK: f64 = 1e-6;

/// `wa/2 <= V <= sa`.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub variation: Rational,
    pub weak: Estimate,
    pub strong: Estimate,
    pub half_weak_le_variation: bool,
    pub variation_le_strong: bool,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.half_weak_le_variation && self.variation_le_strong
    }
}

impl SandwichReport {
    pub fn assemble(variation: Rational, weak: Estimate, strong: Estimate) -> Self {
        let v = to_f64(&variation);
        Self {
            half_weak_le_variation: weak.lower / 2.0 <= v + HALF_WEAK_SLACK,
            variation_le_strong: ExtendedReal::Finite(v) <= strong.upper.map(|u| u + STRONG_SLACK),
            variation,
            weak,
            strong,
        }
    }
}

pub fn variation_sandwich(f: &Function, tol: f64, cap: f64) -> Result<SandwichReport> {
    let weak = weak_avg_function(f, tol)?;
    let strong = strong_avg_function(f, &StrongOptions { tol, cap, ..StrongOptions::default() })?;
    Ok(SandwichReport::assemble(total_variation(f), weak, strong))
}
