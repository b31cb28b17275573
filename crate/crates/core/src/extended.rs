use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::rational::{format_rational, to_f64, Rational};

/// A value that is either finite or `+∞`. `+∞` absorbs under `max` and `+`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extended<T> {
    Finite(T),
    Infinity,
}

/// Real number or `+∞`.
pub type ExtendedReal = Extended<f64>;

impl<T> Extended<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl<T: PartialOrd> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Finite(_), Extended::Infinity) => Some(Ordering::Less),
            (Extended::Infinity, Extended::Finite(_)) => Some(Ordering::Greater),
            (Extended::Infinity, Extended::Infinity) => Some(Ordering::Equal),
        }
    }
}

impl<T: Ord> Ord for Extended<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinity) => Ordering::Less,
            (Extended::Infinity, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
        }
    }
}

impl<T: PartialOrd> Extended<T> {
    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl<T: std::ops::Add<Output = T>> std::ops::Add for Extended<T> {
    type Output = Extended<T>;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinity,
        }
    }
}

impl Extended<Rational> {
    pub fn to_real(&self) -> ExtendedReal {
        match self {
            Extended::Finite(v) => Extended::Finite(to_f64(v)),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl ExtendedReal {
    /// `+∞` maps to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            Extended::Finite(v) => *v,
            Extended::Infinity => f64::INFINITY,
        }
    }

    pub fn from_f64(value: f64) -> Self {
        if value == f64::INFINITY {
            Extended::Infinity
        } else {
            Extended::Finite(value)
        }
    }
}

impl fmt::Display for Extended<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => f.write_str(&format_rational(v)),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinity => f.write_str("inf"),
        }
    }
}

/// JSON form: a number, or the string `"inf"`.
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::Infinity => s.serialize_str("inf"),
        }
    }
}

/// JSON form: `"p/q"`, or `"inf"`.
impl Serialize for Extended<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn infinity_absorbs() {
        let a = Extended::Finite(int(3));
        assert_eq!(a.clone().max(Extended::Infinity), Extended::Infinity);
        assert_eq!(a.clone() + Extended::Infinity, Extended::Infinity);
        assert_eq!(a.clone() + Extended::Finite(int(2)), Extended::Finite(int(5)));
        assert!(Extended::Finite(int(1_000_000)) < Extended::Infinity);
    }
}
