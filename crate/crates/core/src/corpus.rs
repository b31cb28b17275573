//! The deterministic verification corpus: seeded random piecewise-linear
//! functions plus every named construction.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constructions::SignLabeling;
use crate::error::Result;
use crate::func_model::{FunctionSpec, PiecewiseLinear, StepFunction};
use crate::rational::{int, rat};

/// Denominator of random breakpoints and values.
pub const GRID_DENOM: i64 = 10_000;
pub const MIN_BREAKPOINTS: usize = 2;
pub const MAX_BREAKPOINTS: usize = 50;
pub const DEFAULT_COUNT: usize = 100;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub spec: FunctionSpec,
}

/// Breakpoints `0 = x_0 < ... < x_k = 1` on the `1/10^4` grid and values
/// `v/10^4` with `|v| <= 10^4`.
pub fn random_plf<R: Rng + ?Sized>(rng: &mut R) -> PiecewiseLinear {
    let count = rng.gen_range(MIN_BREAKPOINTS..=MAX_BREAKPOINTS);
    let mut interior: Vec<i64> = sample(rng, GRID_DENOM as usize - 1, count - 2)
        .into_iter()
        .map(|i| i as i64 + 1)
        .collect();
    interior.sort_unstable();
    let mut xs = Vec::with_capacity(count);
    xs.push(int(0));
    xs.extend(interior.into_iter().map(|k| rat(k, GRID_DENOM)));
    xs.push(int(1));
    let ys = (0..count)
        .map(|_| rat(rng.gen_range(-GRID_DENOM..=GRID_DENOM), GRID_DENOM))
        .collect();
    PiecewiseLinear::new(xs, ys).expect("grid breakpoints are sorted and span [0, 1]")
}

/// `count` random functions, `plf_000`, `plf_001`, ..., fully determined by
/// `seed`.
pub fn random_corpus(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| CorpusEntry { id: format!("plf_{i:03}"), spec: random_plf(&mut rng).into() })
        .collect()
}

pub fn named_constructions() -> Result<Vec<CorpusEntry>> {
    let tent = PiecewiseLinear::from_points([(int(0), int(0)), (rat(1, 2), int(1)), (int(1), int(0))])?;
    let zero = PiecewiseLinear::new(vec![int(0), int(1)], vec![int(0), int(0)])?;
    let named = |id: &str, spec: FunctionSpec| CorpusEntry { id: format!("named_{id}"), spec };
    Ok(vec![
        named("identity", PiecewiseLinear::identity().into()),
        named("tent", tent.into()),
        named("zero", zero.into()),
        named("step_half", StepFunction::indicator_above(rat(1, 2))?.into()),
        named("step_third", StepFunction::indicator_above(rat(1, 3))?.scale(&rat(-1, 2)).into()),
        named("alt_harmonic_256", FunctionSpec::AltHarmonic { n: 256 }),
        named(
            "dyadic_alternating_12",
            FunctionSpec::DyadicWitness { labels: SignLabeling::alternating(12, -1), gamma: rat(1, 6) },
        ),
        named(
            "packing_alternating_3",
            FunctionSpec::PackingWitness {
                labels: SignLabeling::alternating(3, 1),
                gamma: rat(1, 4),
                lipschitz: int(1),
            },
        ),
        named("xsininvx_128", FunctionSpec::XSinInvX { depth: 128 }),
    ])
}

/// Random functions first, then the named constructions.
pub fn build_corpus(seed: u64, count: usize) -> Result<Vec<CorpusEntry>> {
    let mut corpus = random_corpus(seed, count);
    corpus.extend(named_constructions()?);
    Ok(corpus)
}
