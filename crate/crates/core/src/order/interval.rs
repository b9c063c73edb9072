use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// A convex subset of the rational line. `None` endpoints are infinite; the
/// whole line `(-inf, +inf)` is an ordinary interval.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct Interval {
    lower: Option<Rational>,
    upper: Option<Rational>,
    lower_closed: bool,
    upper_closed: bool,
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    lower: Option<Rational>,
    upper: Option<Rational>,
    #[serde(default)]
    lower_closed: bool,
    #[serde(default)]
    upper_closed: bool,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lower, raw.lower_closed, raw.upper, raw.upper_closed)
    }
}

impl From<Interval> for RawInterval {
    fn from(i: Interval) -> Self {
        RawInterval {
            lower: i.lower,
            upper: i.upper,
            lower_closed: i.lower_closed,
            upper_closed: i.upper_closed,
        }
    }
}

impl Interval {
    /// Infinite ends are always open; a closed flag on an infinite end is
    /// dropped.
    pub fn new(
        lower: Option<Rational>,
        lower_closed: bool,
        upper: Option<Rational>,
        upper_closed: bool,
    ) -> Result<Self> {
        let lower_closed = lower_closed && lower.is_some();
        let upper_closed = upper_closed && upper.is_some();
        if let (Some(a), Some(b)) = (&lower, &upper) {
            match a.cmp(b) {
                Ordering::Greater => {
                    return Err(Error::InvalidInterval(format!("{a} > {b}")));
                }
                Ordering::Equal if !(lower_closed && upper_closed) => {
                    return Err(Error::InvalidInterval(format!("empty interval at {a}")));
                }
                _ => {}
            }
        }
        Ok(Interval {
            lower,
            upper,
            lower_closed,
            upper_closed,
        })
    }

    pub fn all() -> Self {
        Interval {
            lower: None,
            upper: None,
            lower_closed: false,
            upper_closed: false,
        }
    }

    pub fn closed(a: Rational, b: Rational) -> Result<Self> {
        Self::new(Some(a), true, Some(b), true)
    }

    pub fn open(a: Rational, b: Rational) -> Result<Self> {
        Self::new(Some(a), false, Some(b), false)
    }

    /// The block convention `[a, b)`.
    pub fn closed_open(a: Rational, b: Rational) -> Result<Self> {
        Self::new(Some(a), true, Some(b), false)
    }

    pub fn at_least(a: Rational) -> Self {
        Interval {
            lower: Some(a),
            upper: None,
            lower_closed: true,
            upper_closed: false,
        }
    }

    pub fn below(b: Rational) -> Self {
        Interval {
            lower: None,
            upper: Some(b),
            lower_closed: false,
            upper_closed: false,
        }
    }

    pub fn point(a: Rational) -> Self {
        Interval {
            lower: Some(a.clone()),
            upper: Some(a),
            lower_closed: true,
            upper_closed: true,
        }
    }

    pub fn lower(&self) -> Option<&Rational> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Rational> {
        self.upper.as_ref()
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_some() && self.upper.is_some()
    }

    pub fn is_all(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match &self.lower {
            None => true,
            Some(a) if self.lower_closed => x >= a,
            Some(a) => x > a,
        };
        let below = match &self.upper {
            None => true,
            Some(b) if self.upper_closed => x <= b,
            Some(b) => x < b,
        };
        above && below
    }

    /// True when every point of `other` lies in `self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        let lower_ok = match (&self.lower, &other.lower) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a < b || (a == b && (self.lower_closed || !other.lower_closed)),
        };
        let upper_ok = match (&self.upper, &other.upper) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a > b || (a == b && (self.upper_closed || !other.upper_closed)),
        };
        lower_ok && upper_ok
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let (lower, lower_closed) = match (&self.lower, &other.lower) {
            (None, None) => (None, false),
            (Some(a), None) => (Some(a.clone()), self.lower_closed),
            (None, Some(b)) => (Some(b.clone()), other.lower_closed),
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Greater => (Some(a.clone()), self.lower_closed),
                Ordering::Less => (Some(b.clone()), other.lower_closed),
                Ordering::Equal => (Some(a.clone()), self.lower_closed && other.lower_closed),
            },
        };
        let (upper, upper_closed) = match (&self.upper, &other.upper) {
            (None, None) => (None, false),
            (Some(a), None) => (Some(a.clone()), self.upper_closed),
            (None, Some(b)) => (Some(b.clone()), other.upper_closed),
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Less => (Some(a.clone()), self.upper_closed),
                Ordering::Greater => (Some(b.clone()), other.upper_closed),
                Ordering::Equal => (Some(a.clone()), self.upper_closed && other.upper_closed),
            },
        };
        Interval::new(lower, lower_closed, upper, upper_closed).ok()
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.intersection(other).is_some()
    }

    /// Some rational strictly inside the interval (or its single point).
    pub fn interior_point(&self) -> Rational {
        match (&self.lower, &self.upper) {
            (Some(a), Some(b)) if a == b => a.clone(),
            (Some(a), Some(b)) => Rational::midpoint(a, b),
            (Some(a), None) => a + &Rational::one(),
            (None, Some(b)) => b - &Rational::one(),
            (None, None) => Rational::zero(),
        }
    }

    pub fn translate(&self, t: &Rational) -> Interval {
        Interval {
            lower: self.lower.as_ref().map(|a| a + t),
            upper: self.upper.as_ref().map(|b| b + t),
            lower_closed: self.lower_closed,
            upper_closed: self.upper_closed,
        }
    }

    /// Same endpoints, different closure flags.
    pub fn with_closure(&self, lower_closed: bool, upper_closed: bool) -> Result<Interval> {
        Interval::new(self.lower.clone(), lower_closed, self.upper.clone(), upper_closed)
    }

    pub fn length(&self) -> Option<Rational> {
        match (&self.lower, &self.upper) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        let close = if self.upper_closed { ']' } else { ')' };
        match &self.lower {
            Some(a) => write!(f, "{open}{a}, ")?,
            None => write!(f, "{open}-inf, ")?,
        }
        match &self.upper {
            Some(b) => write!(f, "{b}{close}"),
            None => write!(f, "+inf{close}"),
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::rational::q;

    #[test]
    fn empty_intervals_rejected() {
        assert!(Interval::closed_open(q(1, 1), q(1, 1)).is_err());
        assert!(Interval::closed(q(2, 1), q(1, 1)).is_err());
        assert!(Interval::closed(q(1, 1), q(1, 1)).is_ok());
    }

    #[test]
    fn membership_respects_closure() {
        let block = Interval::closed_open(q(0, 1), q(1, 1)).unwrap();
        assert!(block.contains(&q(0, 1)));
        assert!(!block.contains(&q(1, 1)));
        assert!(Interval::all().contains(&q(-1000, 3)));
    }

    #[test]
    fn intersections() {
        let a = Interval::closed_open(q(0, 1), q(1, 1)).unwrap();
        let b = Interval::closed_open(q(1, 1), q(2, 1)).unwrap();
        assert!(!a.intersects(&b));
        let c = Interval::closed(q(1, 2), q(3, 1)).unwrap();
        assert_eq!(a.intersection(&c).unwrap(), Interval::closed_open(q(1, 2), q(1, 1)).unwrap());
        assert!(Interval::all().contains_interval(&c));
        assert!(!a.contains_interval(&c));
    }

    #[test]
    fn json_shape() {
        let i = Interval::closed_open(q(0, 1), q(13, 4)).unwrap();
        let s = serde_json::to_string(&i).unwrap();
        assert_eq!(s, r#"{"lower":"0/1","upper":"13/4","lower_closed":true,"upper_closed":false}"#);
        let back: Interval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, i);
        assert!(serde_json::from_str::<Interval>(r#"{"lower":"2/1","upper":"1/1"}"#).is_err());
    }
}
