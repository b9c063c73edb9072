use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::frame::Frame;
use super::interval::Interval;
use super::rational::Rational;
use crate::adfam::{encode, AdSet, Branch};
use crate::error::{Error, Result};

/// Which blocks of a frame belong to a [`BlockSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selector {
    /// Indices `i` with `i mod modulus` in `classes`, plus `include`, minus
    /// `exclude`.
    Residues {
        modulus: u64,
        classes: BTreeSet<u64>,
        #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
        include: BTreeSet<i64>,
        #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
        exclude: BTreeSet<i64>,
    },
    Finite { indices: BTreeSet<i64> },
    /// Indices in the almost-disjoint set of a branch.
    Branch { branch: Branch },
}

/// Outcome of a disjointness test, with a shared block index on overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "index", rename_all = "snake_case")]
pub enum Disjointness {
    Disjoint,
    Overlap(i64),
}

impl Disjointness {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, Disjointness::Disjoint)
    }
}

impl Selector {
    pub fn residue(modulus: u64, class: u64) -> Self {
        Selector::residues(modulus, [class])
    }

    pub fn residues(modulus: u64, classes: impl IntoIterator<Item = u64>) -> Self {
        Selector::Residues {
            modulus,
            classes: classes.into_iter().collect(),
            include: BTreeSet::new(),
            exclude: BTreeSet::new(),
        }
    }

    /// Every index.
    pub fn all() -> Self {
        Selector::residue(1, 0)
    }

    pub fn finite(indices: impl IntoIterator<Item = i64>) -> Self {
        Selector::Finite {
            indices: indices.into_iter().collect(),
        }
    }

    pub fn branch(branch: Branch) -> Self {
        Selector::Branch { branch }
    }

    /// Removes finitely many indices from a residue selector.
    pub fn excluding(self, extra: impl IntoIterator<Item = i64>) -> Self {
        match self {
            Selector::Residues {
                modulus,
                classes,
                include,
                mut exclude,
            } => {
                let extra: BTreeSet<i64> = extra.into_iter().collect();
                let include = include.difference(&extra).copied().collect();
                exclude.extend(extra);
                Selector::Residues {
                    modulus,
                    classes,
                    include,
                    exclude,
                }
            }
            Selector::Finite { indices } => {
                let extra: BTreeSet<i64> = extra.into_iter().collect();
                Selector::finite(indices.difference(&extra).copied())
            }
            other => other,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Selector::Residues {
            modulus,
            classes,
            include,
            exclude,
        } = self
        {
            if *modulus == 0 {
                return Err(Error::Parse("residue modulus must be positive".into()));
            }
            if let Some(r) = classes.iter().find(|&&r| r >= *modulus) {
                return Err(Error::Parse(format!("residue {r} not below modulus {modulus}")));
            }
            if let Some(i) = include.intersection(exclude).next() {
                return Err(Error::Parse(format!("index {i} both included and excluded")));
            }
        }
        Ok(())
    }

    fn in_classes(i: i64, modulus: u64, classes: &BTreeSet<u64>) -> bool {
        classes.contains(&(i.rem_euclid(modulus as i64) as u64))
    }

    pub fn selects(&self, i: i64) -> bool {
        match self {
            Selector::Residues {
                modulus,
                classes,
                include,
                exclude,
            } => {
                include.contains(&i)
                    || (Self::in_classes(i, *modulus, classes) && !exclude.contains(&i))
            }
            Selector::Finite { indices } => indices.contains(&i),
            Selector::Branch { branch } => i >= 0 && AdSet::new(branch.clone()).member(i as u64),
        }
    }

    /// Period of the selection pattern, ignoring finite exceptions.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            Selector::Residues { modulus, .. } => Some(*modulus),
            Selector::Finite { .. } => Some(1),
            Selector::Branch { .. } => None,
        }
    }

    /// Indices where the selection departs from its periodic pattern.
    pub fn exceptions(&self) -> BTreeSet<i64> {
        match self {
            Selector::Residues {
                include, exclude, ..
            } => include.union(exclude).copied().collect(),
            Selector::Finite { indices } => indices.clone(),
            Selector::Branch { .. } => BTreeSet::new(),
        }
    }

    pub fn is_decidable(&self) -> bool {
        !matches!(self, Selector::Branch { .. })
    }
}

/// A union of blocks `[a_i, a_{i+1})` of a frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockSet {
    pub frame: Frame,
    pub selector: Selector,
}

impl BlockSet {
    pub fn new(frame: Frame, selector: Selector) -> Result<Self> {
        selector.validate()?;
        if let Selector::Finite { indices } = &selector {
            if let Some(i) = indices.iter().find(|&&i| !frame.is_valid_index(i)) {
                return Err(Error::InvalidFrame(format!("index {i} is not a frame index")));
            }
        }
        Ok(BlockSet { frame, selector })
    }

    /// Blocks with index congruent to `class` mod `modulus`.
    pub fn residue(frame: Frame, modulus: u64, class: u64) -> Result<Self> {
        BlockSet::new(frame, Selector::residue(modulus, class))
    }

    pub fn selects(&self, i: i64) -> bool {
        self.frame.is_valid_index(i) && self.selector.selects(i)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.frame.locate(x).is_some_and(|i| self.selects(i))
    }

    /// Selected blocks meeting a window, as intervals. Errors when the window
    /// meets infinitely many blocks.
    pub fn blocks_in(&self, window: &Interval) -> Result<Vec<(i64, Interval)>> {
        let Some(range) = self.frame.blocks_meeting(window) else {
            return Ok(Vec::new());
        };
        let (Some(first), Some(last)) = (range.first, range.last) else {
            return Err(Error::Unsupported("window meets infinitely many blocks".into()));
        };
        Ok((first..=last)
            .filter(|&i| self.selects(i))
            .filter_map(|i| self.frame.block_interval(i).map(|b| (i, b)))
            .collect())
    }

    pub fn disjoint(&self, other: &BlockSet) -> Result<Disjointness> {
        if self.frame != other.frame {
            return Err(Error::MismatchedFrames);
        }
        selector_disjoint(&self.frame, &self.selector, &other.selector)
    }

    /// Blocks of the hull not in `self`, on the same frame.
    pub fn complement(&self) -> Result<BlockSet> {
        let selector = match &self.selector {
            Selector::Residues {
                modulus,
                classes,
                include,
                exclude,
            } => Selector::Residues {
                modulus: *modulus,
                classes: (0..*modulus).filter(|r| !classes.contains(r)).collect(),
                include: exclude.clone(),
                exclude: include.clone(),
            },
            Selector::Finite { indices } => Selector::Residues {
                modulus: 1,
                classes: [0].into(),
                include: BTreeSet::new(),
                exclude: indices.clone(),
            },
            Selector::Branch { .. } => {
                return Err(Error::Unsupported("complement of an almost-disjoint set".into()))
            }
        };
        BlockSet::new(self.frame.clone(), selector)
    }
}

/// Exact disjointness of two selectors over one frame.
pub fn selector_disjoint(frame: &Frame, a: &Selector, b: &Selector) -> Result<Disjointness> {
    let both = |i: i64| frame.is_valid_index(i) && a.selects(i) && b.selects(i);
    // finitely described parts first
    for i in a.exceptions().iter().chain(b.exceptions().iter()) {
        if both(*i) {
            return Ok(Disjointness::Overlap(*i));
        }
    }
    match (a, b) {
        (Selector::Finite { .. }, _) | (_, Selector::Finite { .. }) => Ok(Disjointness::Disjoint),
        (
            Selector::Residues {
                modulus: ma,
                classes: ca,
                exclude: ea,
                ..
            },
            Selector::Residues {
                modulus: mb,
                classes: cb,
                exclude: eb,
                ..
            },
        ) => {
            let l = ma.lcm(mb);
            for r in 0..l {
                if !(ca.contains(&(r % ma)) && cb.contains(&(r % mb))) {
                    continue;
                }
                // the class r mod l is infinite; only finitely many are excluded
                let tries = (ea.len() + eb.len() + 2) as i64;
                for t in (0..tries).flat_map(|t| [t, -t - 1]) {
                    let i = r as i64 + t * l as i64;
                    if both(i) {
                        return Ok(Disjointness::Overlap(i));
                    }
                }
            }
            Ok(Disjointness::Disjoint)
        }
        (Selector::Branch { branch: x }, Selector::Branch { branch: y }) => {
            let first = encode(&x.prefix(1))? as i64;
            match x.common_prefix(y) {
                Some(0) => Ok(Disjointness::Disjoint),
                _ => Ok(Disjointness::Overlap(first)),
            }
        }
        _ => Err(Error::Unsupported(
            "disjointness of a residue class and an almost-disjoint set".into(),
        )),
    }
}
