//! Named constructions that produce the map living on one block of a lazy
//! blockwise descriptor.

use serde::{Deserialize, Serialize};

use super::descriptor::{Factor, MapDescriptor};
use super::finite::FinitePl;
use crate::adfam::{Branch, Enumerator};
use crate::error::{Error, Result};
use crate::order::{Frame, Rational, Selector};

/// Which member of the conjugate basis `w_j = f^-j g f^j` a block carries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisLetter {
    /// The same `w_index` on every selected block.
    Fixed { index: u64 },
    /// `w_{h(i)}` on block `i`, where `h` enumerates the branch's set.
    Enumerated { branch: Branch },
}

impl BasisLetter {
    /// Basis index on `block`; `None` on negative blocks of an enumerated
    /// letter, which carry the identity.
    pub fn index_at(&self, block: i64) -> Result<Option<u64>> {
        match self {
            BasisLetter::Fixed { index } => Ok(Some(*index)),
            BasisLetter::Enumerated { branch } => match usize::try_from(block) {
                Ok(n) => Enumerator::new(branch.clone()).enumerate(n).map(Some),
                Err(_) => Ok(None),
            },
        }
    }
}

/// How a lazy descriptor computes its map on block `i` of its frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum BlockRule {
    /// The two-segment ping-pong map on the super-block `[a_s, a_{s+4}]` of
    /// `base`, `s = 4i + offset`: `[a_s, a_{s+1}] -> [a_s, a_{s+3}]` and
    /// `[a_{s+1}, a_{s+4}] -> [a_{s+3}, a_{s+4}]`.
    PingPongSegments { base: Frame, offset: i64 },
    /// On selected blocks, the conjugate-basis word chosen by `letter`, built
    /// from the ping-pong pair of an interior frame of the sub-interval
    /// `[a_i, a_i + fill * (a_{i+1} - a_i)]`. Identity on other blocks.
    BlockBasis {
        select: Selector,
        letter: BasisLetter,
        fill: Rational,
    },
    /// On selected blocks, the almost-disjoint generator of `branch` built
    /// inside the block. Identity on other blocks.
    BlockCameron { select: Selector, branch: Branch },
}

impl BlockRule {
    pub fn block_map(&self, frame: &Frame, i: i64) -> Result<MapDescriptor> {
        match self {
            BlockRule::PingPongSegments { base, offset } => {
                let s = 4 * i + offset;
                let point = |k: i64| base.point(k).ok_or(Error::RuleUndefined(i));
                let (a0, a1, a3, a4) = (point(s)?, point(s + 1)?, point(s + 3)?, point(s + 4)?);
                let map = FinitePl::from_knots(vec![(a0.clone(), a0), (a1, a3), (a4.clone(), a4)])?;
                Ok(MapDescriptor::Finite { pieces: map })
            }
            BlockRule::BlockBasis {
                select,
                letter,
                fill,
            } => {
                let Some(j) = letter.index_at(i)?.filter(|_| select.selects(i)) else {
                    return Ok(MapDescriptor::Identity);
                };
                let (lo, hi) = frame.block(i).ok_or(Error::RuleUndefined(i))?;
                let hi = Rational::lerp(&lo, &hi, fill);
                let (f, g) = ping_pong_pair(&Frame::interior(lo, hi)?)?;
                Ok(conjugate_word(f, g, j))
            }
            BlockRule::BlockCameron { select, branch } => {
                if !select.selects(i) {
                    return Ok(MapDescriptor::Identity);
                }
                let (lo, hi) = frame.block(i).ok_or(Error::RuleUndefined(i))?;
                Ok(MapDescriptor::LazyBlock {
                    frame: Frame::converging(lo, hi)?,
                    rule: BlockRule::BlockBasis {
                        select: Selector::all(),
                        letter: BasisLetter::Enumerated {
                            branch: branch.clone(),
                        },
                        fill: Rational::one(),
                    },
                })
            }
        }
    }

    /// Blocks on which the rule can act nontrivially.
    pub fn selector(&self) -> Selector {
        match self {
            BlockRule::PingPongSegments { .. } => Selector::all(),
            BlockRule::BlockBasis { select, .. } | BlockRule::BlockCameron { select, .. } => {
                select.clone()
            }
        }
    }
}

/// The ping-pong pair on an integer-indexed frame `a_i`.
///
/// The first map sends `[a_i, a_{i+1}]` onto `[a_i, a_{i+3}]` and
/// `[a_{i+1}, a_{i+4}]` onto `[a_{i+3}, a_{i+4}]` for `i = 0 mod 4`; the
/// second does the same for `i = 2 mod 4`. Both are affine on each segment
/// and the identity outside the hull of the frame.
pub fn ping_pong_pair(frame: &Frame) -> Result<(MapDescriptor, MapDescriptor)> {
    if !frame.is_coterminal() {
        return Err(Error::NotCoterminal);
    }
    let make = |offset: i64| -> Result<MapDescriptor> {
        Ok(MapDescriptor::LazyBlock {
            frame: frame.subsample(4, offset)?,
            rule: BlockRule::PingPongSegments {
                base: frame.clone(),
                offset,
            },
        })
    };
    Ok((make(0)?, make(2)?))
}

/// `f^-j g f^j` as a composite descriptor.
pub fn conjugate_word(f: MapDescriptor, g: MapDescriptor, j: u64) -> MapDescriptor {
    if j == 0 {
        return g;
    }
    let j = j as i64;
    MapDescriptor::Composite {
        factors: vec![
            Factor {
                map: f.clone(),
                power: -j,
            },
            Factor { map: g, power: 1 },
            Factor { map: f, power: j },
        ],
    }
}
