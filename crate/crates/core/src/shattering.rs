//! γ-shattering certificates.
//!
//! A point set `x_1 < ... < x_m` with offsets `r` is γ-shattered by a class
//! when every labeling `y ∈ {-1, 1}^m` has a member `f` with
//! `min_i y_i (f(x_i) - r_i) >= γ`. A certificate enumerates all `2^m`
//! labelings, evaluates an explicit witness for each and bounds the
//! witness's seminorm against the class budget.
//!
//! Labeling `k` gives the first point the most significant bit, and a set
//! bit means `+1`.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{capacity_as_usize, dyadic_points, packing_capacity, packing_points, SignLabeling};
use crate::error::{Error, Result};
use crate::extended::{Extended, ExtendedReal};
use crate::func_model::{Function, FunctionSpec, PiecewiseLinear};
use crate::rational::{format_rational, int, to_f64, Rational};
use crate::seminorms::{strong_avg_function, weak_avg_function, Estimate, StrongOptions, Verdict};
use crate::variation::total_variation;

/// Largest point count whose labelings are enumerated.
pub const MAX_POINTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShatterInstance {
    #[serde(serialize_with = "serialize_rationals")]
    points: Vec<Rational>,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    gamma: Rational,
    #[serde(serialize_with = "serialize_rationals")]
    offsets: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl ShatterInstance {
    pub fn new(points: Vec<Rational>, gamma: Rational, offsets: Vec<Rational>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("shattered point set"));
        }
        if !points.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("points must be strictly increasing".into()));
        }
        if points.first().is_some_and(|x| x.is_negative()) || points.last().is_some_and(|x| *x > int(1)) {
            return Err(Error::InvalidArgument("points must lie in [0, 1]".into()));
        }
        if !gamma.is_positive() {
            return Err(Error::InvalidArgument("gamma must be positive".into()));
        }
        if offsets.len() != points.len() {
            return Err(Error::InvalidArgument(format!(
                "{} offsets for {} points",
                offsets.len(),
                points.len()
            )));
        }
        Ok(Self { points, gamma, offsets })
    }

    pub fn with_zero_offsets(points: Vec<Rational>, gamma: Rational) -> Result<Self> {
        let offsets = vec![Rational::zero(); points.len()];
        Self::new(points, gamma, offsets)
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    pub fn offsets(&self) -> &[Rational] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Achieved margin `min_i y_i (f(x_i) - r_i)`.
    pub fn margin(&self, f: &Function, labels: &SignLabeling) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        for (i, (x, r)) in self.points.iter().zip(&self.offsets).enumerate() {
            let y = f.eval(x)?;
            let y = if r.is_zero() { y } else { y - r };
            let v = if labels.signs()[i] == 1 { y } else { -y };
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        Ok(best.expect("instance is nonempty"))
    }
}

/// Seminorm ball the witnesses must stay in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "limit", rename_all = "snake_case")]
pub enum Budget {
    /// `wa{f} <= L`.
    Weak(#[serde(serialize_with = "crate::rational::serialize_rational")] Rational),
    /// `sa{f} <= L`.
    Strong(#[serde(serialize_with = "crate::rational::serialize_rational")] Rational),
}

impl Budget {
    pub fn limit(&self) -> &Rational {
        match self {
            Budget::Weak(l) | Budget::Strong(l) => l,
        }
    }

    pub fn scaled(&self, c: &Rational) -> Budget {
        match self {
            Budget::Weak(l) => Budget::Weak(l * c),
            Budget::Strong(l) => Budget::Strong(l * c),
        }
    }
}

/// Source of one witness per labeling of an instance's points.
pub trait WitnessProvider: Send + Sync {
    fn witness(&self, labels: &SignLabeling) -> Result<FunctionSpec>;

    /// The expanded witness; override when a family can skip the spec.
    fn function(&self, labels: &SignLabeling) -> Result<Function> {
        self.witness(labels)?.expand()
    }
}

impl<F> WitnessProvider for F
where
    F: Fn(&SignLabeling) -> Result<FunctionSpec> + Send + Sync,
{
    fn witness(&self, labels: &SignLabeling) -> Result<FunctionSpec> {
        self(labels)
    }
}

/// Interpolants of `±gamma` on the `2·gamma/L` packing from 0.
#[derive(Clone, Debug)]
pub struct PackingWitnesses {
    gamma: Rational,
    lipschitz: Rational,
    /// Packing points plus 1 when the packing stops short of it.
    nodes: Vec<Rational>,
}

impl PackingWitnesses {
    pub fn new(m: usize, gamma: Rational, lipschitz: Rational) -> Result<Self> {
        let mut nodes = packing_points(m, &gamma, &lipschitz)?;
        if nodes[m - 1] < int(1) {
            nodes.push(int(1));
        }
        Ok(Self { gamma, lipschitz, nodes })
    }
}

impl WitnessProvider for PackingWitnesses {
    fn witness(&self, labels: &SignLabeling) -> Result<FunctionSpec> {
        Ok(FunctionSpec::PackingWitness {
            labels: labels.clone(),
            gamma: self.gamma.clone(),
            lipschitz: self.lipschitz.clone(),
        })
    }

    fn function(&self, labels: &SignLabeling) -> Result<Function> {
        let m = labels.len();
        if m + 1 < self.nodes.len() || m > self.nodes.len() {
            return Err(Error::InvalidArgument(format!("{m} labels for a packing of {} nodes", self.nodes.len())));
        }
        let neg = -&self.gamma;
        let mut values: Vec<Rational> =
            labels.signs().iter().map(|&s| if s == 1 { self.gamma.clone() } else { neg.clone() }).collect();
        if self.nodes.len() > m {
            values.push(values[m - 1].clone());
        }
        Ok(PiecewiseLinear::new(self.nodes.clone(), values)?.into())
    }
}

/// Dyadic witnesses for the ascending points `2^-m, ..., 2^-1`. The
/// construction indexes labels from `2^-1` down, so they are reversed.
#[derive(Clone, Debug)]
pub struct DyadicWitnesses {
    pub gamma: Rational,
}

impl WitnessProvider for DyadicWitnesses {
    fn witness(&self, labels: &SignLabeling) -> Result<FunctionSpec> {
        let mut reversed = labels.signs().to_vec();
        reversed.reverse();
        Ok(FunctionSpec::DyadicWitness { labels: SignLabeling::new(reversed)?, gamma: self.gamma.clone() })
    }
}

/// The constant `±gamma` for a single point.
#[derive(Clone, Debug)]
pub struct ConstantWitnesses {
    pub gamma: Rational,
}

impl WitnessProvider for ConstantWitnesses {
    fn witness(&self, labels: &SignLabeling) -> Result<FunctionSpec> {
        if labels.len() != 1 {
            return Err(Error::InvalidArgument("constant witnesses label a single point".into()));
        }
        Ok(PiecewiseLinear::constant(labels.sign(0) * &self.gamma).into())
    }
}

/// Outcome for one labeling.
#[derive(Clone, Debug, Serialize)]
pub struct LabelingRecord {
    pub index: u64,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub margin: Rational,
    /// Bracket on the witness's seminorm.
    pub seminorm: Estimate,
    /// Exact Lipschitz constant, when the strong budget was settled by it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<Extended<Rational>>,
    pub margin_ok: bool,
    pub budget_ok: bool,
}

impl LabelingRecord {
    pub fn passed(&self) -> bool {
        self.margin_ok && self.budget_ok
    }
}

/// All `2^m` labelings checked. Witnesses are regenerated from the provider
/// on demand rather than stored.
#[derive(Clone)]
pub struct ShatterCertificate {
    pub instance: ShatterInstance,
    pub budget: Budget,
    pub records: Vec<LabelingRecord>,
    provider: Arc<dyn WitnessProvider>,
}

impl fmt::Debug for ShatterCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShatterCertificate")
            .field("instance", &self.instance)
            .field("budget", &self.budget)
            .field("labelings", &self.records.len())
            .finish()
    }
}

impl ShatterCertificate {
    pub fn witness(&self, index: u64) -> Result<FunctionSpec> {
        self.provider.witness(&SignLabeling::from_index(index, self.instance.len()))
    }

    pub fn labelings(&self) -> usize {
        self.records.len()
    }

    /// Every labeling present exactly once, in index order.
    pub fn is_complete(&self) -> bool {
        let m = self.instance.len();
        self.records.len() == 1usize << m && self.records.iter().enumerate().all(|(k, r)| r.index == k as u64)
    }

    /// Worst seminorm upper bound over the witnesses.
    pub fn max_seminorm(&self) -> ExtendedReal {
        self.records
            .iter()
            .map(|r| r.seminorm.upper)
            .fold(ExtendedReal::Finite(0.0), ExtendedReal::max)
    }

    pub fn min_margin(&self) -> Rational {
        self.records.iter().map(|r| r.margin.clone()).min().expect("certificate is nonempty")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShatterFailure {
    pub instance: ShatterInstance,
    pub budget: Budget,
    /// Failing labelings, in index order.
    pub failures: Vec<LabelingRecord>,
    pub checked: u64,
}

#[derive(Clone, Debug)]
pub enum ShatterOutcome {
    Certified(ShatterCertificate),
    Failed(ShatterFailure),
}

impl ShatterOutcome {
    pub fn certificate(self) -> Option<ShatterCertificate> {
        match self {
            ShatterOutcome::Certified(c) => Some(c),
            ShatterOutcome::Failed(_) => None,
        }
    }
}

/// Checks one witness against the budget. A strong budget is settled by the
/// exact Lipschitz constant when that suffices (`sa <= Lip`); the bracket is
/// then `[V, Lip]`, using `V <= sa`.
fn budget_check(f: &Function, budget: &Budget, tol: f64) -> Result<(Estimate, Option<Extended<Rational>>, bool)> {
    let limit = budget.limit();
    let slack_limit = to_f64(limit) * (1.0 + tol);
    match budget {
        Budget::Strong(_) => {
            let lip = f.lipschitz();
            if let Extended::Finite(l) = &lip {
                let upper = to_f64(l);
                let ok = l <= limit || upper <= slack_limit;
                let est = Estimate {
                    lower: to_f64(&total_variation(f)).min(upper),
                    upper: ExtendedReal::Finite(upper),
                    verdict: Verdict::Finite,
                };
                return Ok((est, Some(lip), ok));
            }
            let est = strong_avg_function(f, &StrongOptions { tol: tol * to_f64(limit).max(1e-12), ..Default::default() })?;
            let ok = est.upper <= ExtendedReal::Finite(slack_limit);
            Ok((est, Some(lip), ok))
        }
        Budget::Weak(_) => {
            let est = weak_avg_function(f, (0.5 * tol * to_f64(limit)).max(1e-12))?;
            let ok = est.upper <= ExtendedReal::Finite(slack_limit);
            Ok((est, None, ok))
        }
    }
}

/// Enumerates every labeling of `instance` and checks margin `>= gamma`
/// (exact) and the witness seminorm `<= L·(1 + tol)`.
pub fn check_shattered(
    instance: &ShatterInstance,
    provider: Arc<dyn WitnessProvider>,
    budget: Budget,
    tol: f64,
) -> Result<ShatterOutcome> {
    crate::seminorms::check_positive("tol", tol)?;
    let m = instance.len();
    if m > MAX_POINTS {
        return Err(Error::EnumerationCap { points: m, cap: MAX_POINTS });
    }
    let total = 1u64 << m;
    let records: Vec<LabelingRecord> = (0..total)
        .into_par_iter()
        .map(|index| {
            let labels = SignLabeling::from_index(index, m);
            let f = provider.function(&labels)?;
            let margin = instance.margin(&f, &labels)?;
            let (seminorm, lipschitz, budget_ok) = budget_check(&f, &budget, tol)?;
            Ok(LabelingRecord { index, margin_ok: &margin >= instance.gamma(), margin, seminorm, lipschitz, budget_ok })
        })
        .collect::<Result<_>>()?;
    if records.iter().all(LabelingRecord::passed) {
        Ok(ShatterOutcome::Certified(ShatterCertificate { instance: instance.clone(), budget, records, provider }))
    } else {
        let failures = records.into_iter().filter(|r| !r.passed()).collect();
        Ok(ShatterOutcome::Failed(ShatterFailure { instance: instance.clone(), budget, failures, checked: total }))
    }
}

/// The packing instance of `1 + floor(L/(2γ))` points, certified for the
/// strong class with zero offsets.
pub fn fat_lower_bound_strong(lipschitz: &Rational, gamma: &Rational) -> Result<(usize, ShatterCertificate)> {
    let capacity = packing_capacity(gamma, lipschitz)?;
    let m = capacity_as_usize(&capacity)
        .filter(|&m| m <= MAX_POINTS)
        .ok_or_else(|| Error::EnumerationCap { points: capacity.to_usize().unwrap_or(usize::MAX), cap: MAX_POINTS })?;
    let points = packing_points(m, gamma, lipschitz)?;
    let instance = ShatterInstance::with_zero_offsets(points, gamma.clone())?;
    let provider = Arc::new(PackingWitnesses::new(m, gamma.clone(), lipschitz.clone())?);
    match check_shattered(&instance, provider, Budget::Strong(lipschitz.clone()), crate::seminorms::DEFAULT_TOL)? {
        ShatterOutcome::Certified(c) => Ok((m, c)),
        ShatterOutcome::Failed(f) => Err(Error::Precondition(format!(
            "packing witnesses failed on {} of {} labelings",
            f.failures.len(),
            f.checked
        ))),
    }
}

/// The dyadic instance `{2^-n : n = 1..m}` (ascending) with zero offsets.
pub fn dyadic_instance(m: usize, gamma: &Rational) -> Result<ShatterInstance> {
    let mut points = dyadic_points(m);
    points.reverse();
    ShatterInstance::with_zero_offsets(points, gamma.clone())
}

/// Certifies the dyadic instance of `m` points for the weak class with
/// budget `L`, which requires `γ <= L/6`.
pub fn certify_dyadic_weak(m: usize, gamma: &Rational, lipschitz: &Rational, tol: f64) -> Result<ShatterOutcome> {
    if !gamma.is_positive() || int(6) * gamma > *lipschitz {
        return Err(Error::Precondition(format!(
            "dyadic witnesses need 0 < γ <= L/6, got γ = {} and L = {}",
            format_rational(gamma),
            format_rational(lipschitz)
        )));
    }
    let instance = dyadic_instance(m, gamma)?;
    let provider = Arc::new(DyadicWitnesses { gamma: gamma.clone() });
    check_shattered(&instance, provider, Budget::Weak(lipschitz.clone()), tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessityReport {
    pub points: usize,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub variation: Rational,
    /// `2γ(m - 1)`.
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub bound: Rational,
    pub holds: bool,
}

/// A function taking alternating signs with margin `gamma` on the sorted
/// points moves by at least `2γ` between neighbours, so `V(f) >= 2γ(m-1)`.
pub fn bv_shatter_necessity(f: &FunctionSpec, points: &[Rational], gamma: &Rational) -> Result<NecessityReport> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let f = f.expand()?;
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    let values: Vec<Rational> = sorted.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
    let realizes = |first: i64| {
        values.iter().enumerate().all(|(i, v)| {
            let sign = if i % 2 == 0 { first } else { -first };
            int(sign) * v >= *gamma
        })
    };
    if !realizes(1) && !realizes(-1) {
        return Err(Error::Precondition(format!(
            "function does not take alternating signs with margin {} on the points",
            format_rational(gamma)
        )));
    }
    let variation = total_variation(&f);
    let bound = int(2) * gamma * int(sorted.len() as i64 - 1);
    Ok(NecessityReport { points: sorted.len(), holds: variation >= bound, variation, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::expand_packing_witness;
    use crate::rational::rat;

    #[test]
    fn single_point_by_constants() {
        let inst = ShatterInstance::with_zero_offsets(vec![rat(1, 2)], int(1)).unwrap();
        let provider = Arc::new(ConstantWitnesses { gamma: int(1) });
        let cert = check_shattered(&inst, provider, Budget::Strong(int(1)), 1e-6).unwrap().certificate().unwrap();
        assert!(cert.is_complete());
        assert_eq!(cert.labelings(), 2);
        assert!(cert.records.iter().all(|r| r.margin == int(1) && r.seminorm.upper_f64() == 0.0));
    }

    #[test]
    fn packing_three_points() {
        let (m, cert) = fat_lower_bound_strong(&int(1), &rat(1, 4)).unwrap();
        assert_eq!(m, 3);
        assert_eq!(cert.instance.points(), &[int(0), rat(1, 2), int(1)]);
        assert_eq!(cert.labelings(), 8);
        assert!(cert.records.iter().all(|r| r.margin == rat(1, 4)));
        assert!(cert.records.iter().all(|r| matches!(&r.lipschitz, Some(Extended::Finite(l)) if *l <= int(1))));
        let w = cert.witness(0b101).unwrap();
        assert_eq!(w.kind(), "packing");
    }

    #[test]
    fn formula_examples() {
        assert_eq!(fat_lower_bound_strong(&int(1), &int(10)).unwrap().0, 1);
        assert_eq!(fat_lower_bound_strong(&int(2), &rat(1, 4)).unwrap().0, 5);
        assert!(matches!(fat_lower_bound_strong(&int(100), &rat(1, 4)), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn too_large_margin_fails() {
        // Witnesses for γ = 1/4 cannot reach margin 1/2.
        let inst = ShatterInstance::with_zero_offsets(vec![int(0), rat(1, 2), int(1)], rat(1, 2)).unwrap();
        let provider = Arc::new(PackingWitnesses::new(3, rat(1, 4), int(1)).unwrap());
        match check_shattered(&inst, provider, Budget::Strong(int(1)), 1e-6).unwrap() {
            ShatterOutcome::Failed(f) => assert_eq!(f.failures.len(), 8),
            ShatterOutcome::Certified(_) => panic!("should fail"),
        }
    }

    #[test]
    fn dyadic_small_prefix() {
        let cert = certify_dyadic_weak(4, &rat(1, 6), &int(1), 1e-2).unwrap().certificate().unwrap();
        assert!(cert.is_complete());
        assert_eq!(cert.min_margin(), rat(1, 6));
        assert!(cert.max_seminorm() <= ExtendedReal::Finite(1.0 + 1e-2));
        assert!(matches!(certify_dyadic_weak(4, &rat(1, 5), &int(1), 1e-2), Err(Error::Precondition(_))));
    }

    #[test]
    fn necessity_examples() {
        let y = SignLabeling::alternating(3, 1);
        let f = FunctionSpec::Plf(expand_packing_witness(&y, &rat(1, 4), &int(1)).unwrap());
        let r = bv_shatter_necessity(&f, &[int(0), rat(1, 2), int(1)], &rat(1, 4)).unwrap();
        assert_eq!(r.variation, int(1));
        assert_eq!(r.bound, int(1));
        assert!(r.holds);

        let d = DyadicWitnesses { gamma: rat(1, 6) }.witness(&SignLabeling::alternating(4, 1)).unwrap();
        let pts = dyadic_instance(4, &rat(1, 6)).unwrap().points().to_vec();
        let r = bv_shatter_necessity(&d, &pts, &rat(1, 6)).unwrap();
        assert_eq!((r.variation.clone(), r.bound.clone()), (int(1), int(1)));

        let c = FunctionSpec::Plf(PiecewiseLinear::constant(int(1)));
        let r = bv_shatter_necessity(&c, &[rat(1, 3)], &rat(1, 2)).unwrap();
        assert!(r.holds && r.bound.is_zero());

        assert!(matches!(
            bv_shatter_necessity(&c, &[rat(1, 3), rat(2, 3)], &rat(1, 2)),
            Err(Error::Precondition(_))
        ));
    }
}
