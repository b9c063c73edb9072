//! Tuple-to-tuple maps and generator families that are free and
//! `n`-transitive at once.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{search_within, Action, Budget, GenIndex, GeneratorId, Witness, Word};
use crate::order::{q, Frame, IndexKind, Interval, Rational, Selector};
use crate::par::Exec;
use crate::plmap::{disjoint_patch, BasisLetter, BlockRule, MapDescriptor};

/// A strictly increasing, nonempty list of points.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct OrderedTuple(Vec<Rational>);

impl OrderedTuple {
    pub fn new(points: Vec<Rational>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Tuple("empty tuple".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Tuple("points must be strictly increasing".into()));
        }
        Ok(OrderedTuple(points))
    }

    pub fn points(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<Rational>> for OrderedTuple {
    type Error = Error;
    fn try_from(v: Vec<Rational>) -> Result<Self> {
        OrderedTuple::new(v)
    }
}

impl From<OrderedTuple> for Vec<Rational> {
    fn from(t: OrderedTuple) -> Self {
        t.0
    }
}

impl FromStr for OrderedTuple {
    type Err = Error;

    /// Comma-separated rationals, e.g. `0,1/2,3`.
    fn from_str(s: &str) -> Result<Self> {
        let points = s
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<Vec<Rational>>>()?;
        OrderedTuple::new(points)
    }
}

impl fmt::Display for OrderedTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for OrderedTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The map through `(lo, lo)`, `(a_i, b_i)` and `(hi, hi)`, affine in
/// between, identity outside `Λ = (lo, hi)`.
pub fn stretch_map(from: &OrderedTuple, to: &OrderedTuple, lambda: &Interval) -> Result<MapDescriptor> {
    if from.len() != to.len() {
        return Err(Error::Tuple(format!(
            "length mismatch: {} vs {}",
            from.len(),
            to.len()
        )));
    }
    let (Some(lo), Some(hi)) = (lambda.lower(), lambda.upper()) else {
        return Err(Error::Precondition("Λ must be bounded".into()));
    };
    let inside = |x: &Rational| lo < x && x < hi;
    if let Some(x) = from.points().iter().chain(to.points()).find(|x| !inside(x)) {
        return Err(Error::Tuple(format!("{x} is not strictly inside {lambda}")));
    }
    let mut knots = vec![(lo.clone(), lo.clone())];
    knots.extend(from.points().iter().cloned().zip(to.points().iter().cloned()));
    knots.push((hi.clone(), hi.clone()));
    let d = MapDescriptor::finite(knots)?;
    Ok(if d.is_identity_descriptor() {
        MapDescriptor::Identity
    } else {
        d
    })
}

/// The half-unit frame; its even blocks `[k, k + 1/2)` hold the reserved
/// intervals.
fn reserved_frame() -> Frame {
    Frame::progression(IndexKind::Integers, Rational::zero(), q(1, 2)).expect("valid frame")
}

/// Whether `x` lies in a reserved open interval `(k, k + 1/2)`.
pub fn is_reserved(x: &Rational) -> bool {
    let k = Rational::from_bigint(x.floor());
    &k < x && *x < k + q(1, 2)
}

/// Smallest interval reaching one unit past the extreme points.
pub fn bounding_lambda(from: &OrderedTuple, to: &OrderedTuple) -> Result<Interval> {
    let all = || from.points().iter().chain(to.points());
    let lo = all().min().expect("nonempty") - &Rational::one();
    let hi = all().max().expect("nonempty") + &Rational::one();
    Interval::open(lo, hi)
}

/// One registered pair of tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub from: OrderedTuple,
    pub to: OrderedTuple,
    pub index: u64,
}

/// Injective assignment of generator indices to tuple pairs, handed out in
/// query order from 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRegistry", into = "RawRegistry")]
pub struct TupleIndexRegistry {
    next: u64,
    by_pair: BTreeMap<(OrderedTuple, OrderedTuple), u64>,
    by_index: BTreeMap<u64, (OrderedTuple, OrderedTuple)>,
}

#[derive(Serialize, Deserialize)]
struct RawRegistry {
    assignments: Vec<Assignment>,
}

impl TryFrom<RawRegistry> for TupleIndexRegistry {
    type Error = Error;
    fn try_from(raw: RawRegistry) -> Result<Self> {
        let mut reg = TupleIndexRegistry::default();
        for a in raw.assignments {
            if reg.by_index.contains_key(&a.index) || reg.by_pair.contains_key(&(a.from.clone(), a.to.clone())) {
                return Err(Error::Parse(format!("duplicate assignment for index {}", a.index)));
            }
            reg.next = reg.next.max(a.index + 1);
            reg.by_pair.insert((a.from.clone(), a.to.clone()), a.index);
            reg.by_index.insert(a.index, (a.from, a.to));
        }
        Ok(reg)
    }
}

impl From<TupleIndexRegistry> for RawRegistry {
    fn from(reg: TupleIndexRegistry) -> Self {
        RawRegistry {
            assignments: reg.assignments(),
        }
    }
}

impl TupleIndexRegistry {
    pub fn new() -> Self {
        TupleIndexRegistry::default()
    }

    /// The index of the pair, allocating the next fresh one on first use.
    pub fn index_for(&mut self, from: &OrderedTuple, to: &OrderedTuple) -> u64 {
        let key = (from.clone(), to.clone());
        if let Some(&i) = self.by_pair.get(&key) {
            return i;
        }
        let i = self.next;
        self.next += 1;
        self.by_pair.insert(key.clone(), i);
        self.by_index.insert(i, key);
        i
    }

    pub fn lookup(&self, index: u64) -> Option<(&OrderedTuple, &OrderedTuple)> {
        self.by_index.get(&index).map(|(a, b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.by_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_index.is_empty()
    }

    pub fn assignments(&self) -> Vec<Assignment> {
        self.by_index
            .iter()
            .map(|(&index, (from, to))| Assignment {
                from: from.clone(),
                to: to.clone(),
                index,
            })
            .collect()
    }
}

/// Generators `g#α` that stretch a registered tuple pair and carry the
/// basis element `w_α` in each reserved interval away from the stretch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitiveFreeFamily {
    pub registry: TupleIndexRegistry,
    pub max_len: usize,
}

impl Default for TransitiveFreeFamily {
    fn default() -> Self {
        TransitiveFreeFamily {
            registry: TupleIndexRegistry::new(),
            max_len: 2,
        }
    }
}

pub fn extend_to_n(mut fam: TransitiveFreeFamily, n: usize) -> Result<TransitiveFreeFamily> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    fam.max_len = n;
    Ok(fam)
}

impl TransitiveFreeFamily {
    pub fn new() -> Self {
        TransitiveFreeFamily::default()
    }

    pub fn generator_id(index: u64) -> GeneratorId {
        GeneratorId::indexed("g", index)
    }

    fn check_tuples(&self, from: &OrderedTuple, to: &OrderedTuple) -> Result<()> {
        if from.len() != to.len() {
            return Err(Error::Tuple(format!(
                "length mismatch: {} vs {}",
                from.len(),
                to.len()
            )));
        }
        if from.len() > self.max_len {
            return Err(Error::Tuple(format!(
                "tuples of length {} exceed the configured maximum {}",
                from.len(),
                self.max_len
            )));
        }
        match from.points().iter().chain(to.points()).find(|x| is_reserved(x)) {
            Some(x) => Err(Error::Reserved(x.to_string())),
            None => Ok(()),
        }
    }

    /// The reserved-interval part of `g#index`: `w_index` in every reserved
    /// interval except those meeting `avoid`.
    pub fn tail(index: u64, avoid: Option<&Interval>) -> MapDescriptor {
        let frame = reserved_frame();
        let mut select = Selector::residue(2, 0);
        if let Some(lambda) = avoid {
            let (lo, hi) = (lambda.lower().expect("bounded"), lambda.upper().expect("bounded"));
            let first = lo.floor_i64().expect("small bound") - 1;
            let last = hi.floor_i64().expect("small bound") + 1;
            let meets = (first..=last).filter(|&k| {
                Interval::open(Rational::from_integer(k), Rational::from_integer(k) + q(1, 2))
                    .expect("nonempty")
                    .intersects(lambda)
            });
            select = select.excluding(meets.map(|k| 2 * k).collect::<Vec<_>>());
        }
        MapDescriptor::LazyBlock {
            frame,
            rule: BlockRule::BlockBasis {
                select,
                letter: BasisLetter::Fixed { index },
                fill: Rational::one(),
            },
        }
    }

    fn assemble(index: u64, from: &OrderedTuple, to: &OrderedTuple) -> Result<MapDescriptor> {
        let lambda = bounding_lambda(from, to)?;
        let stretch = stretch_map(from, to, &lambda)?;
        disjoint_patch(vec![stretch, Self::tail(index, Some(&lambda))])
    }

    /// The index registered for `(from, to)` and its generator.
    pub fn transitive_generator(&mut self, from: &OrderedTuple, to: &OrderedTuple) -> Result<(u64, MapDescriptor)> {
        self.check_tuples(from, to)?;
        let index = self.registry.index_for(from, to);
        Ok((index, Self::assemble(index, from, to)?))
    }

    /// `g#index`; unregistered indices carry only the reserved-interval part.
    pub fn generator_at(&self, index: u64) -> Result<MapDescriptor> {
        match self.registry.lookup(index) {
            Some((from, to)) => Self::assemble(index, from, to),
            None => Ok(Self::tail(index, None)),
        }
    }

    /// Binds `g#α` for each index.
    pub fn action(&self, indices: &[u64]) -> Result<Action> {
        indices.iter().try_fold(Action::new(), |a, &i| {
            Ok(a.bind(Self::generator_id(i), self.generator_at(i)?))
        })
    }

    /// A moved point of `word` inside a reserved interval past every stretch
    /// region of its letters, where the letters are distinct basis elements.
    pub fn freeness_witness(&self, word: &Word, budget: &Budget, exec: Exec) -> Result<Witness> {
        let mut indices = Vec::new();
        for g in word.generators() {
            match (&g.name[..], &g.index) {
                ("g", Some(GenIndex::Nat(i))) => indices.push(*i),
                _ => return Err(Error::Precondition(format!("`{g}` is not a family generator"))),
            }
        }
        let action = self.action(&indices)?;
        let mut k = 0i64;
        for &i in &indices {
            if let Some((from, to)) = self.registry.lookup(i) {
                let hi = bounding_lambda(from, to)?.upper().expect("bounded").clone();
                k = k.max(hi.floor_i64().expect("small bound") + 1);
            }
        }
        let window = Interval::closed(Rational::from_integer(k), Rational::from_integer(k) + q(1, 2))?;
        search_within(&action, word, &window, budget, exec)
    }
}
