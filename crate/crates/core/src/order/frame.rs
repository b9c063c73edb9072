use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::interval::Interval;
use super::rational::{q, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Integers,
    Naturals,
}

/// How the points `a_i` of a frame are computed from their index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PointRule {
    /// `a_i = prefix[i]` for `0 <= i < prefix.len()`, otherwise `origin + i * step`.
    Progression {
        origin: Rational,
        step: Rational,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        prefix: Vec<Rational>,
    },
    /// Points accumulating at the ends of `(lower, upper)`.
    ///
    /// Integer-indexed: `a_i = mid + half * i / (1 + |i|)`, coterminal in the
    /// open interval. Natural-indexed: `a_i = upper - (upper - lower) / (i + 2)`.
    Reciprocal { lower: Rational, upper: Rational },
    /// `a_i = base(stride * i + offset)`.
    Subsample {
        base: Box<Frame>,
        stride: u32,
        offset: i64,
    },
}

/// A strictly increasing sequence of rational points indexed by the integers
/// or the naturals. Consecutive points cut the line into blocks
/// `[a_i, a_{i+1})`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFrame", into = "RawFrame")]
pub struct Frame {
    kind: IndexKind,
    rule: PointRule,
}

#[derive(Serialize, Deserialize)]
struct RawFrame {
    index: IndexKind,
    #[serde(flatten)]
    rule: PointRule,
}

impl TryFrom<RawFrame> for Frame {
    type Error = Error;
    fn try_from(raw: RawFrame) -> Result<Self> {
        Frame::new(raw.index, raw.rule)
    }
}

impl From<Frame> for RawFrame {
    fn from(f: Frame) -> Self {
        RawFrame {
            index: f.kind,
            rule: f.rule,
        }
    }
}

/// Range of block indices meeting a window. `None` means the range is
/// unbounded on that side (blocks accumulate or run off to infinity).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockRange {
    pub first: Option<i64>,
    pub last: Option<i64>,
}

impl BlockRange {
    pub fn contains(&self, i: i64) -> bool {
        self.first.is_none_or(|a| i >= a) && self.last.is_none_or(|b| i <= b)
    }

    pub fn is_finite(&self) -> bool {
        self.first.is_some() && self.last.is_some()
    }

    /// Up to `limit` indices, starting from the index nearest 0 and fanning
    /// outwards.
    pub fn sample(&self, limit: usize) -> Vec<i64> {
        let start = match (self.first, self.last) {
            (Some(a), _) if a > 0 => a,
            (_, Some(b)) if b < 0 => b,
            _ => 0,
        };
        let mut out = Vec::new();
        if self.contains(start) {
            out.push(start);
        }
        let mut step = 1i64;
        while out.len() < limit {
            let up = start + step;
            let down = start - step;
            let (up_ok, down_ok) = (self.contains(up), self.contains(down));
            if !up_ok && !down_ok {
                break;
            }
            if up_ok {
                out.push(up);
            }
            if down_ok && out.len() < limit {
                out.push(down);
            }
            step += 1;
        }
        out.sort_unstable();
        out
    }
}

fn big_to_i64(b: BigInt) -> Result<i64> {
    b.to_i64()
        .ok_or_else(|| Error::InvalidFrame("block index out of range".into()))
}

impl Frame {
    pub fn new(kind: IndexKind, rule: PointRule) -> Result<Self> {
        match &rule {
            PointRule::Progression {
                origin,
                step,
                prefix,
            } => {
                if !step.is_positive() {
                    return Err(Error::InvalidFrame("step must be positive".into()));
                }
                if prefix.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidFrame("prefix not increasing".into()));
                }
                if let (Some(first), Some(last)) = (prefix.first(), prefix.last()) {
                    let tail = origin + &(step * &Rational::from(prefix.len() as i64));
                    if *last >= tail {
                        return Err(Error::InvalidFrame("prefix overruns the tail".into()));
                    }
                    if kind == IndexKind::Integers && *first <= origin - step {
                        return Err(Error::InvalidFrame("prefix underruns the negative tail".into()));
                    }
                }
            }
            PointRule::Reciprocal { lower, upper } => {
                if lower >= upper {
                    return Err(Error::InvalidFrame(format!("empty hull ({lower}, {upper})")));
                }
            }
            PointRule::Subsample {
                base,
                stride,
                offset,
            } => {
                if *stride == 0 {
                    return Err(Error::InvalidFrame("stride must be positive".into()));
                }
                if base.kind != kind {
                    return Err(Error::InvalidFrame("subsample must keep the index kind".into()));
                }
                if kind == IndexKind::Naturals && *offset < 0 {
                    return Err(Error::InvalidFrame("negative offset on a natural frame".into()));
                }
            }
        }
        Ok(Frame { kind, rule })
    }

    /// `a_i = i` for all integers `i`.
    pub fn unit() -> Self {
        Frame::progression(IndexKind::Integers, Rational::zero(), Rational::one())
            .expect("unit frame")
    }

    pub fn progression(kind: IndexKind, origin: Rational, step: Rational) -> Result<Self> {
        Frame::new(
            kind,
            PointRule::Progression {
                origin,
                step,
                prefix: Vec::new(),
            },
        )
    }

    /// Integer-indexed frame coterminal in the open interval `(lower, upper)`.
    pub fn interior(lower: Rational, upper: Rational) -> Result<Self> {
        Frame::new(IndexKind::Integers, PointRule::Reciprocal { lower, upper })
    }

    /// Natural-indexed frame increasing to `upper`, starting at the midpoint.
    pub fn converging(lower: Rational, upper: Rational) -> Result<Self> {
        Frame::new(IndexKind::Naturals, PointRule::Reciprocal { lower, upper })
    }

    pub fn subsample(&self, stride: u32, offset: i64) -> Result<Self> {
        Frame::new(
            self.kind,
            PointRule::Subsample {
                base: Box::new(self.clone()),
                stride,
                offset,
            },
        )
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn rule(&self) -> &PointRule {
        &self.rule
    }

    pub fn is_valid_index(&self, i: i64) -> bool {
        self.kind == IndexKind::Integers || i >= 0
    }

    /// Integer-indexed frames are unbounded above and below inside their hull.
    pub fn is_coterminal(&self) -> bool {
        self.kind == IndexKind::Integers
    }

    pub fn point(&self, i: i64) -> Option<Rational> {
        if !self.is_valid_index(i) {
            return None;
        }
        Some(match &self.rule {
            PointRule::Progression {
                origin,
                step,
                prefix,
            } => {
                if i >= 0 && (i as usize) < prefix.len() {
                    prefix[i as usize].clone()
                } else {
                    origin + &(step * &Rational::from(i))
                }
            }
            PointRule::Reciprocal { lower, upper } => match self.kind {
                IndexKind::Integers => {
                    let mid = Rational::midpoint(lower, upper);
                    let half = (upper - lower) * q(1, 2);
                    mid + half * q(i, 1 + i.abs())
                }
                IndexKind::Naturals => upper - &((upper - lower) * q(1, i + 2)),
            },
            PointRule::Subsample {
                base,
                stride,
                offset,
            } => base.point(i * *stride as i64 + offset)?,
        })
    }

    /// Points `a_i` and `a_{i+1}` of block `i`.
    pub fn block(&self, i: i64) -> Option<(Rational, Rational)> {
        Some((self.point(i)?, self.point(i + 1)?))
    }

    pub fn block_interval(&self, i: i64) -> Option<Interval> {
        let (a, b) = self.block(i)?;
        Interval::closed_open(a, b).ok()
    }

    /// Convex hull of the frame points.
    pub fn hull(&self) -> Interval {
        match (&self.rule, self.kind) {
            (PointRule::Progression { .. }, IndexKind::Integers) => Interval::all(),
            (PointRule::Progression { .. }, IndexKind::Naturals) => {
                Interval::at_least(self.point(0).expect("a_0"))
            }
            (PointRule::Reciprocal { lower, upper }, IndexKind::Integers) => {
                Interval::open(lower.clone(), upper.clone()).expect("nonempty")
            }
            (PointRule::Reciprocal { upper, .. }, IndexKind::Naturals) => {
                Interval::closed_open(self.point(0).expect("a_0"), upper.clone()).expect("nonempty")
            }
            (PointRule::Subsample { base, .. }, IndexKind::Integers) => base.hull(),
            (PointRule::Subsample { base, .. }, IndexKind::Naturals) => {
                let start = self.point(0).expect("a_0");
                match base.hull().upper() {
                    Some(u) => Interval::closed_open(start, u.clone()).expect("nonempty"),
                    None => Interval::at_least(start),
                }
            }
        }
    }

    /// Index `i` with `a_i <= x < a_{i+1}`, or `None` outside the hull.
    pub fn locate(&self, x: &Rational) -> Option<i64> {
        if !self.hull().contains(x) {
            return None;
        }
        let i = match &self.rule {
            PointRule::Progression {
                origin,
                step,
                prefix,
            } => {
                let k = prefix.len() as i64;
                let tail_start = origin + &(step * &Rational::from(k));
                if !prefix.is_empty() && x >= &prefix[0] && x < &tail_start {
                    // last prefix point not exceeding x
                    prefix.partition_point(|p| p <= x) as i64 - 1
                } else {
                    let i = big_to_i64(((x - origin) / step).floor()).ok()?;
                    if !prefix.is_empty() && x < &prefix[0] {
                        i.min(-1)
                    } else {
                        i
                    }
                }
            }
            PointRule::Reciprocal { lower, upper } => match self.kind {
                IndexKind::Integers => {
                    let mid = Rational::midpoint(lower, upper);
                    let half = (upper - lower) * q(1, 2);
                    let t = (x - &mid) / half;
                    let one = Rational::one();
                    let v = if t.is_negative() {
                        &t / &(&one + &t)
                    } else {
                        &t / &(&one - &t)
                    };
                    big_to_i64(v.floor()).ok()?
                }
                IndexKind::Naturals => {
                    let len = upper - lower;
                    big_to_i64((len / (upper - x)).floor()).ok()? - 2
                }
            },
            PointRule::Subsample {
                base,
                stride,
                offset,
            } => {
                let j = base.locate(x)?;
                (j - offset).div_euclid(*stride as i64)
            }
        };
        self.is_valid_index(i).then_some(i)
    }

    /// Blocks meeting `window`, or `None` when the window misses the hull.
    pub fn blocks_meeting(&self, window: &Interval) -> Option<BlockRange> {
        let hull = self.hull();
        let inter = hull.intersection(window)?;
        let first = match inter.lower() {
            Some(x) if hull.contains(x) => Some(self.locate(x)?),
            _ => None,
        };
        let last = match inter.upper() {
            Some(y) if hull.contains(y) => {
                let j = self.locate(y)?;
                if !inter.upper_closed() && self.point(j).as_ref() == Some(y) {
                    Some(j - 1)
                } else {
                    Some(j)
                }
            }
            _ => None,
        };
        if let (Some(a), Some(b)) = (first, last) {
            if a > b {
                return None;
            }
        }
        Some(BlockRange { first, last })
    }

    /// Distance between consecutive points, when constant.
    pub fn uniform_step(&self) -> Option<Rational> {
        match &self.rule {
            PointRule::Progression { step, prefix, .. } if prefix.is_empty() => Some(step.clone()),
            PointRule::Subsample { base, stride, .. } => {
                base.uniform_step().map(|s| s * Rational::from(*stride as i64))
            }
            _ => None,
        }
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({:?}, {:?})", self.kind, self.rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naturals_unit() -> Frame {
        Frame::progression(IndexKind::Naturals, Rational::zero(), Rational::one()).unwrap()
    }

    #[test]
    fn locate_examples() {
        let f = Frame::unit();
        assert_eq!(f.locate(&q(5, 2)), Some(2));
        assert_eq!(f.locate(&q(3, 1)), Some(3));
        assert_eq!(f.locate(&q(-1, 2)), Some(-1));
        assert_eq!(naturals_unit().locate(&q(-1, 1)), None);
    }

    #[test]
    fn locate_inverts_point_on_every_rule() {
        let frames = vec![
            Frame::unit(),
            naturals_unit(),
            Frame::progression(IndexKind::Integers, q(1, 3), q(2, 7)).unwrap(),
            Frame::new(
                IndexKind::Integers,
                PointRule::Progression {
                    origin: q(0, 1),
                    step: q(1, 1),
                    prefix: vec![q(1, 2), q(3, 2), q(7, 4)],
                },
            )
            .unwrap(),
            Frame::interior(q(0, 1), q(1, 1)).unwrap(),
            Frame::interior(q(-5, 2), q(7, 3)).unwrap(),
            Frame::converging(q(0, 1), q(1, 1)).unwrap(),
            Frame::unit().subsample(4, 2).unwrap(),
            Frame::interior(q(0, 1), q(1, 1)).unwrap().subsample(4, 0).unwrap(),
            Frame::converging(q(0, 1), q(1, 1)).unwrap().subsample(3, 1).unwrap(),
        ];
        for f in &frames {
            for i in -40..40 {
                if let Some(p) = f.point(i) {
                    assert_eq!(f.locate(&p), Some(i), "{f:?} at {i}");
                    let next = f.point(i + 1).unwrap();
                    assert!(p < next, "{f:?} not increasing at {i}");
                    let mid = Rational::midpoint(&p, &next);
                    assert_eq!(f.locate(&mid), Some(i));
                }
            }
        }
    }

    #[test]
    fn converging_points() {
        let f = Frame::converging(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(f.point(0), Some(q(1, 2)));
        assert_eq!(f.point(1), Some(q(2, 3)));
        assert_eq!(f.point(-1), None);
        assert_eq!(f.locate(&q(1, 4)), None);
        assert_eq!(f.locate(&q(1, 1)), None);
    }

    #[test]
    fn interior_points() {
        let f = Frame::interior(q(0, 1), q(1, 1)).unwrap();
        assert_eq!(f.point(0), Some(q(1, 2)));
        assert_eq!(f.point(1), Some(q(3, 4)));
        assert_eq!(f.point(-1), Some(q(1, 4)));
        assert!(f.hull().contains(&q(1, 1000)));
        assert!(!f.hull().contains(&q(0, 1)));
    }

    #[test]
    fn block_ranges() {
        let f = Frame::unit();
        let w = Interval::closed(q(1, 2), q(3, 1)).unwrap();
        assert_eq!(f.blocks_meeting(&w), Some(BlockRange { first: Some(0), last: Some(3) }));
        let w = Interval::closed_open(q(1, 2), q(3, 1)).unwrap();
        assert_eq!(f.blocks_meeting(&w).unwrap().last, Some(2));
        let g = Frame::interior(q(0, 1), q(1, 1)).unwrap();
        let r = g.blocks_meeting(&Interval::closed(q(0, 1), q(1, 2)).unwrap()).unwrap();
        assert_eq!(r, BlockRange { first: None, last: Some(0) });
        assert_eq!(r.sample(3), vec![-2, -1, 0]);
        assert!(g.blocks_meeting(&Interval::closed(q(2, 1), q(3, 1)).unwrap()).is_none());
    }

    #[test]
    fn bad_frames() {
        assert!(Frame::progression(IndexKind::Integers, q(0, 1), q(0, 1)).is_err());
        assert!(Frame::interior(q(1, 1), q(1, 1)).is_err());
        assert!(Frame::unit().subsample(0, 0).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = Frame::interior(q(0, 1), q(1, 1)).unwrap().subsample(4, 2).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: Frame = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let unit: Frame =
            serde_json::from_str(r#"{"index":"integers","rule":"progression","origin":"0/1","step":"1/1"}"#)
                .unwrap();
        assert_eq!(unit, Frame::unit());
    }
}
