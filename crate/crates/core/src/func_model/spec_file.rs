//! JSON form of [`FunctionSpec`]. Rationals are strings (`"p/q"` or a
//! decimal); serialization always writes the canonical `"p/q"` form, so
//! parsing what was serialized gives back the same spec.

use serde::{Deserialize, Serialize};

use crate::constructions::SignLabeling;
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

use super::{FunctionSpec, PiecewiseLinear, StepFunction};

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecDoc {
    Plf {
        breakpoints: Vec<String>,
        values: Vec<String>,
    },
    Step {
        jump_points: Vec<String>,
        point_values: Vec<String>,
        levels: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value_at_zero: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value_at_one: Option<String>,
    },
    AltHarmonic {
        n: u32,
    },
    Dyadic {
        labels: Vec<i8>,
        gamma: String,
    },
    Packing {
        labels: Vec<i8>,
        gamma: String,
        lipschitz: String,
    },
    Xsininvx {
        depth: u32,
    },
}

fn parse_all(items: &[String]) -> Result<Vec<Rational>> {
    items.iter().map(|s| parse_rational(s)).collect()
}

fn format_all(items: &[Rational]) -> Vec<String> {
    items.iter().map(format_rational).collect()
}

impl TryFrom<SpecDoc> for FunctionSpec {
    type Error = Error;

    fn try_from(doc: SpecDoc) -> Result<Self> {
        Ok(match doc {
            SpecDoc::Plf { breakpoints, values } => {
                FunctionSpec::Plf(PiecewiseLinear::new(parse_all(&breakpoints)?, parse_all(&values)?)?)
            }
            SpecDoc::Step {
                jump_points,
                point_values,
                levels,
                value_at_zero,
                value_at_one,
            } => {
                let levels = parse_all(&levels)?;
                let first = levels
                    .first()
                    .cloned()
                    .ok_or_else(|| Error::InvalidFunction("step function needs levels".into()))?;
                let last = levels[levels.len() - 1].clone();
                let at_zero = value_at_zero.map(|s| parse_rational(&s)).transpose()?.unwrap_or(first);
                let at_one = value_at_one.map(|s| parse_rational(&s)).transpose()?.unwrap_or(last);
                FunctionSpec::Step(StepFunction::new(
                    parse_all(&jump_points)?,
                    parse_all(&point_values)?,
                    levels,
                    at_zero,
                    at_one,
                )?)
            }
            SpecDoc::AltHarmonic { n } => FunctionSpec::AltHarmonic { n },
            SpecDoc::Dyadic { labels, gamma } => FunctionSpec::DyadicWitness {
                labels: SignLabeling::new(labels)?,
                gamma: parse_rational(&gamma)?,
            },
            SpecDoc::Packing {
                labels,
                gamma,
                lipschitz,
            } => FunctionSpec::PackingWitness {
                labels: SignLabeling::new(labels)?,
                gamma: parse_rational(&gamma)?,
                lipschitz: parse_rational(&lipschitz)?,
            },
            SpecDoc::Xsininvx { depth } => FunctionSpec::XSinInvX { depth },
        })
    }
}

impl From<&FunctionSpec> for SpecDoc {
    fn from(spec: &FunctionSpec) -> Self {
        match spec {
            FunctionSpec::Plf(f) => SpecDoc::Plf {
                breakpoints: format_all(f.breakpoints()),
                values: format_all(f.values()),
            },
            FunctionSpec::Step(f) => SpecDoc::Step {
                jump_points: format_all(f.jump_points()),
                point_values: format_all(f.point_values()),
                levels: format_all(f.levels()),
                value_at_zero: Some(format_rational(f.value_at_zero())),
                value_at_one: Some(format_rational(f.value_at_one())),
            },
            FunctionSpec::AltHarmonic { n } => SpecDoc::AltHarmonic { n: *n },
            FunctionSpec::DyadicWitness { labels, gamma } => SpecDoc::Dyadic {
                labels: labels.signs().to_vec(),
                gamma: format_rational(gamma),
            },
            FunctionSpec::PackingWitness {
                labels,
                gamma,
                lipschitz,
            } => SpecDoc::Packing {
                labels: labels.signs().to_vec(),
                gamma: format_rational(gamma),
                lipschitz: format_rational(lipschitz),
            },
            FunctionSpec::XSinInvX { depth } => SpecDoc::Xsininvx { depth: *depth },
        }
    }
}

impl Serialize for FunctionSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpecDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = SpecDoc::deserialize(deserializer)?;
        FunctionSpec::try_from(doc).map_err(serde::de::Error::custom)
    }
}

pub fn parse_spec(json: &str) -> Result<FunctionSpec> {
    let doc: SpecDoc = serde_json::from_str(json).map_err(|e| Error::Malformed(e.to_string()))?;
    FunctionSpec::try_from(doc)
}

pub fn spec_to_json(spec: &FunctionSpec) -> String {
    serde_json::to_string(&SpecDoc::from(spec)).expect("spec documents always serialize")
}
