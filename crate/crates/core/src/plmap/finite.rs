use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::order::{Interval, Rational};

/// A piecewise-affine increasing bijection given by its knots `(x_k, y_k)`,
/// fixing the first and last knot and acting as the identity outside them.
///
/// Knots are kept canonical: collinear interior knots are merged away and
/// identity segments at either end are trimmed, so two maps are equal as
/// functions exactly when their knot lists are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FinitePl {
    knots: Vec<(Rational, Rational)>,
}

/// One affine piece `[from.0, from.1] -> [to.0, to.1]`, the JSON form of a
/// [`FinitePl`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub from: [Rational; 2],
    pub to: [Rational; 2],
}

fn slope(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

impl FinitePl {
    pub fn identity() -> Self {
        FinitePl::default()
    }

    /// Builds from knots; they must increase strictly in both coordinates and
    /// the first and last knot must be fixed points.
    pub fn from_knots(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        if knots.len() == 1 {
            return if knots[0].0 == knots[0].1 {
                Ok(FinitePl::identity())
            } else {
                Err(Error::InvalidDescriptor("single knot must be fixed".into()))
            };
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1) {
            return Err(Error::InvalidDescriptor("knots are not strictly increasing".into()));
        }
        if let (Some(first), Some(last)) = (knots.first(), knots.last()) {
            if first.0 != first.1 || last.0 != last.1 {
                return Err(Error::InvalidDescriptor(format!(
                    "bounding knots must be fixed: {}->{}, {}->{}",
                    first.0, first.1, last.0, last.1
                )));
            }
        }
        let mut map = FinitePl { knots };
        map.canonicalize();
        Ok(map)
    }

    /// Contiguous pieces; each maps its domain onto its target affinely.
    pub fn from_pieces(pieces: &[Piece]) -> Result<Self> {
        let mut knots: Vec<(Rational, Rational)> = Vec::with_capacity(pieces.len() + 1);
        for p in pieces {
            let start = (p.from[0].clone(), p.to[0].clone());
            match knots.last() {
                Some(last) if *last != start => {
                    return Err(Error::InvalidDescriptor(format!(
                        "pieces are not contiguous at {}",
                        p.from[0]
                    )))
                }
                Some(_) => {}
                None => knots.push(start),
            }
            knots.push((p.from[1].clone(), p.to[1].clone()));
        }
        FinitePl::from_knots(knots)
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.knots
            .windows(2)
            .map(|w| Piece {
                from: [w[0].0.clone(), w[1].0.clone()],
                to: [w[0].1.clone(), w[1].1.clone()],
            })
            .collect()
    }

    fn canonicalize(&mut self) {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(self.knots.len());
        for k in self.knots.drain(..) {
            while out.len() >= 2 {
                let n = out.len();
                if slope(&out[n - 2], &out[n - 1]) == slope(&out[n - 1], &k) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(k);
        }
        // trim identity segments at the ends
        while out.len() >= 2 && out[1].0 == out[1].1 {
            out.remove(0);
        }
        while out.len() >= 2 && out[out.len() - 2].0 == out[out.len() - 2].1 {
            out.pop();
        }
        if out.len() < 2 {
            out.clear();
        }
        self.knots = out;
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn is_identity(&self) -> bool {
        self.knots.is_empty()
    }

    /// Interval outside which the map is the identity.
    pub fn bounds(&self) -> Option<(Rational, Rational)> {
        Some((self.knots.first()?.0.clone(), self.knots.last()?.0.clone()))
    }

    fn interpolate(a: &(Rational, Rational), b: &(Rational, Rational), x: &Rational, inverse: bool) -> Rational {
        if inverse {
            &a.0 + &((x - &a.1) * (&b.0 - &a.0) / (&b.1 - &a.1))
        } else {
            &a.1 + &((x - &a.0) * (&b.1 - &a.1) / (&b.0 - &a.0))
        }
    }

    fn apply(&self, x: &Rational, inverse: bool) -> Rational {
        let coord = |k: &(Rational, Rational)| if inverse { k.1.clone() } else { k.0.clone() };
        let (Some(first), Some(last)) = (self.knots.first(), self.knots.last()) else {
            return x.clone();
        };
        if *x <= coord(first) || *x >= coord(last) {
            return x.clone();
        }
        // first knot strictly above x
        let hi = self.knots.partition_point(|k| coord(k) <= *x);
        Self::interpolate(&self.knots[hi - 1], &self.knots[hi], x, inverse)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.apply(x, false)
    }

    pub fn eval_inverse(&self, y: &Rational) -> Rational {
        self.apply(y, true)
    }

    /// `f^n(x)` for any integer `n`.
    ///
    /// Once an orbit sits on a piece whose far end is a fixed knot it never
    /// leaves that piece, and the remaining iterations collapse to a power of
    /// the slope.
    pub fn iterate(&self, x: &Rational, n: i64) -> Rational {
        let inverse = n < 0;
        let mut left = n.unsigned_abs();
        let mut x = x.clone();
        let coord = |k: &(Rational, Rational)| if inverse { (k.1.clone(), k.0.clone()) } else { k.clone() };
        while left > 0 {
            let (Some(first), Some(last)) = (self.knots.first(), self.knots.last()) else {
                return x;
            };
            if x <= first.0 || x >= last.0 {
                return x;
            }
            let hi = self.knots.partition_point(|k| coord(k).0 <= x);
            let (a, b) = (coord(&self.knots[hi - 1]), coord(&self.knots[hi]));
            let y = Self::interpolate(&a, &b, &x, false);
            if y == x {
                return x;
            }
            let s = slope(&a, &b);
            let exact = left <= u32::MAX as u64;
            if exact && y > x && b.0 == b.1 {
                return &b.0 - &(s.pow(left as u32) * (&b.0 - &x));
            }
            if exact && y < x && a.0 == a.1 {
                return &a.0 + &(s.pow(left as u32) * (&x - &a.0));
            }
            x = y;
            left -= 1;
        }
        x
    }

    /// Knot abscissae inside `window`.
    pub fn breakpoints_in(&self, window: &Interval) -> Vec<Rational> {
        self.knots
            .iter()
            .map(|k| k.0.clone())
            .filter(|x| window.contains(x))
            .collect()
    }

    /// Affine coefficients `(slope, intercept)` valid on the piece containing
    /// `x` (to its right at a knot).
    pub fn affine_at(&self, x: &Rational) -> (Rational, Rational) {
        let (Some(first), Some(last)) = (self.knots.first(), self.knots.last()) else {
            return (Rational::one(), Rational::zero());
        };
        if *x < first.0 || *x >= last.0 {
            return (Rational::one(), Rational::zero());
        }
        let hi = self.knots.partition_point(|k| k.0 <= *x);
        let (a, b) = (&self.knots[hi - 1], &self.knots[hi]);
        let s = slope(a, b);
        let t = &a.1 - &(&s * &a.0);
        (s, t)
    }
}

/// Equality of finite descriptors as functions.
pub fn finite_pl_equal(a: &FinitePl, b: &FinitePl) -> bool {
    // both sides are canonical by construction
    a.knots == b.knots
}

impl Serialize for FinitePl {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.pieces().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FinitePl {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pieces = Vec::<Piece>::deserialize(deserializer)?;
        FinitePl::from_pieces(&pieces).map_err(serde::de::Error::custom)
    }
}
