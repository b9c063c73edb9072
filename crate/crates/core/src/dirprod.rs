//! Restricted direct products of finite permutation groups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{GeneratorId, Letter, Word};
use crate::par::Exec;

/// A permutation of `{0, .., n-1}` as its image array.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            match seen.get_mut(i as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection"))),
            }
        }
        Ok(Perm(images))
    }

    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    /// Cycle notation over `0..degree`, e.g. `[(0, 1, 2)]`.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                let slot = images
                    .get_mut(x as usize)
                    .ok_or_else(|| Error::InvalidPermutation(format!("{x} exceeds degree {degree}")))?;
                *slot = c[(k + 1) % c.len()];
            }
        }
        Perm::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn order(&self) -> u64 {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }
}

impl TryFrom<Vec<u32>> for Perm {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Perm::new(v)
    }
}

impl From<Perm> for Vec<u32> {
    fn from(p: Perm) -> Self {
        p.0
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// An element of a restricted direct product: finitely many non-identity
/// coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "RawElement")]
pub struct FinSupportElement {
    coords: BTreeMap<u32, Perm>,
}

#[derive(Deserialize)]
struct RawElement {
    coords: BTreeMap<u32, Perm>,
}

impl From<RawElement> for FinSupportElement {
    fn from(raw: RawElement) -> Self {
        FinSupportElement::new(raw.coords)
    }
}

/// Sorted coordinates where an element is not the identity.
pub type SupportSet = BTreeSet<u32>;

impl FinSupportElement {
    /// Drops identity coordinates.
    pub fn new(coords: BTreeMap<u32, Perm>) -> Self {
        FinSupportElement {
            coords: coords.into_iter().filter(|(_, p)| !p.is_identity()).collect(),
        }
    }

    pub fn identity() -> Self {
        FinSupportElement::default()
    }

    pub fn from_coords(coords: impl IntoIterator<Item = (u32, Perm)>) -> Self {
        FinSupportElement::new(coords.into_iter().collect())
    }

    pub fn coords(&self) -> &BTreeMap<u32, Perm> {
        &self.coords
    }

    /// Component at `a`, `None` standing for the identity.
    pub fn component(&self, a: u32) -> Option<&Perm> {
        self.coords.get(&a)
    }

    pub fn is_identity(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn support(&self) -> SupportSet {
        self.coords.keys().copied().collect()
    }

    /// Coordinatewise `self ∘ other`.
    pub fn multiply(&self, other: &FinSupportElement) -> Result<FinSupportElement> {
        let mut coords = self.coords.clone();
        for (&a, q) in &other.coords {
            match coords.get(&a) {
                None => {
                    coords.insert(a, q.clone());
                }
                Some(p) if p.degree() != q.degree() => {
                    return Err(Error::DegreeMismatch {
                        coord: a,
                        left: p.degree(),
                        right: q.degree(),
                    })
                }
                Some(p) => {
                    let r = p.compose(q);
                    if r.is_identity() {
                        coords.remove(&a);
                    } else {
                        coords.insert(a, r);
                    }
                }
            }
        }
        Ok(FinSupportElement { coords })
    }

    pub fn inverse(&self) -> FinSupportElement {
        FinSupportElement {
            coords: self.coords.iter().map(|(&a, p)| (a, p.inverse())).collect(),
        }
    }

    /// `[g1, g2] = g1 g2 g1^-1 g2^-1`.
    pub fn commutator(g1: &FinSupportElement, g2: &FinSupportElement) -> Result<FinSupportElement> {
        g1.multiply(g2)?.multiply(&g1.inverse())?.multiply(&g2.inverse())
    }
}

/// Letter `a`, `b`, ... for the `i`-th element of a set.
pub fn letter_name(i: usize) -> Result<GeneratorId> {
    if i >= 26 {
        return Err(Error::Precondition("at most 26 elements per set".into()));
    }
    Ok(GeneratorId::named(&((b'a' + i as u8) as char).to_string()))
}

/// Evaluates a word over `a`, `b`, ... bound to `set`, right to left.
pub fn eval_word(set: &[FinSupportElement], w: &Word) -> Result<FinSupportElement> {
    let mut out = FinSupportElement::identity();
    for l in w.letters() {
        let i = (0..set.len())
            .find(|&i| letter_name(i).is_ok_and(|g| g == l.gen))
            .ok_or_else(|| Error::Unbound(l.gen.to_string()))?;
        let g = if l.inverse { set[i].inverse() } else { set[i].clone() };
        out = out.multiply(&g)?;
    }
    Ok(out)
}

/// Outcome of a relation search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub word: Word,
    pub length: usize,
    pub explored: usize,
}

/// Letter code `2i` for the `i`-th element, `2i + 1` for its inverse, so the
/// order is `a < A < b < B < ...`.
fn to_word(codes: &[u8]) -> Word {
    Word::from_letters(
        codes
            .iter()
            .map(|&c| {
                let l = Letter::new(letter_name(c as usize / 2).expect("checked size"));
                if c % 2 == 1 {
                    l.inv()
                } else {
                    l
                }
            })
            .collect(),
    )
}

/// The length-lex least reduced word of length at most `max_len` over the
/// set that evaluates to the identity. Errors with `Exhausted` when none
/// exists within `max_len` or more than `node_budget` words would be
/// examined; neither says the set is free.
pub fn relation_search(set: &[FinSupportElement], max_len: usize, node_budget: usize, exec: Exec) -> Result<Relation> {
    if set.is_empty() {
        return Err(Error::Precondition("the set is empty".into()));
    }
    letter_name(set.len() - 1)?;
    let gens: Vec<FinSupportElement> = set
        .iter()
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    let k = gens.len() as u8;
    let children = |codes: &Vec<u8>, value: &FinSupportElement| -> Vec<Result<(Vec<u8>, FinSupportElement)>> {
        (0..k)
            .filter(|&c| codes.last().is_none_or(|&p| p ^ 1 != c))
            .map(|c| {
                let mut next = codes.clone();
                next.push(c);
                Ok((next, value.multiply(&gens[c as usize])?))
            })
            .collect()
    };
    let mut frontier: Vec<(Vec<u8>, FinSupportElement)> = vec![(Vec::new(), FinSupportElement::identity())];
    let mut explored = 0usize;
    for len in 1..=max_len {
        let next_count = frontier.len() * if len == 1 { k as usize } else { k as usize - 1 };
        if explored + next_count > node_budget {
            return Err(Error::Exhausted(explored));
        }
        // the first parent in order with a trivial child gives the length-lex least hit
        let hit = exec.find_map_first(&frontier, |(codes, value)| {
            children(codes, value).into_iter().find_map(|r| match r {
                Ok((c, v)) if v.is_identity() => Some(Ok(c)),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
        });
        explored += next_count;
        if let Some(codes) = hit.transpose()? {
            let word = to_word(&codes);
            if !eval_word(set, &word)?.is_identity() {
                return Err(Error::Precondition("relation failed re-verification".into()));
            }
            return Ok(Relation {
                length: word.len(),
                word,
                explored,
            });
        }
        if len < max_len {
            frontier = exec
                .flat_map(&frontier, |(codes, value)| children(codes, value))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
        }
    }
    Err(Error::Exhausted(explored))
}

/// A verified triple with `[f, [g1, g2]] = e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PigeonholeTriple {
    /// Index in the set of the element whose support fixes `A`; it is `f`.
    pub anchor: usize,
    pub support: SupportSet,
    /// Coordinates of `A` with the shared component chosen at each step;
    /// `None` is the identity.
    pub pattern: Vec<(u32, Option<Perm>)>,
    /// Indices of the elements agreeing with the pattern.
    pub class: Vec<usize>,
    pub g1: usize,
    pub g2: usize,
    pub f: FinSupportElement,
    pub commutator: FinSupportElement,
}

/// Refines the set by agreement on the support `A` of one element, then
/// tests a pair from the surviving class. Elements agreeing on `A` have a
/// commutator supported off `A`, which commutes with anything supported in
/// `A`.
/// Pairs reaching outside `A` are tried first.
pub fn pigeonhole_probe(set: &[FinSupportElement]) -> Result<PigeonholeTriple> {
    if set.len() < 3 {
        return Err(Error::Precondition("need at least three elements".into()));
    }
    for (anchor, f) in set.iter().enumerate() {
        let support = f.support();
        if support.is_empty() {
            continue;
        }
        let mut class: Vec<usize> = (0..set.len()).collect();
        let mut remaining = support.clone();
        let mut pattern = Vec::new();
        while !remaining.is_empty() {
            // most common value over remaining coordinates; ties go to the
            // smallest coordinate, then the least value
            let mut best: Option<(usize, u32, Option<Perm>)> = None;
            for &a in &remaining {
                let mut counts: BTreeMap<Option<&Perm>, usize> = BTreeMap::new();
                for &i in &class {
                    *counts.entry(set[i].component(a)).or_default() += 1;
                }
                for (v, n) in counts {
                    if best.as_ref().is_none_or(|(m, _, _)| n > *m) {
                        best = Some((n, a, v.cloned()));
                    }
                }
            }
            let (_, a, v) = best.expect("nonempty class");
            class.retain(|&i| set[i].component(a) == v.as_ref());
            remaining.remove(&a);
            pattern.push((a, v));
        }
        // elements reaching outside A first
        let mut order = class.clone();
        order.sort_by_key(|&i| set[i].support().is_subset(&support));
        for (x, &g1) in order.iter().enumerate() {
            for &g2 in &order[x + 1..] {
                let c = FinSupportElement::commutator(&set[g1], &set[g2])?;
                let check = FinSupportElement::commutator(f, &c)?;
                if check.is_identity() {
                    return Ok(PigeonholeTriple {
                        anchor,
                        support,
                        pattern,
                        class,
                        g1,
                        g2,
                        f: f.clone(),
                        commutator: c,
                    });
                }
            }
        }
    }
    Err(Error::Exhausted(set.len()))
}

/// Elements of `⊕_4 Sym(4)` of order at most 6, so every element has a power
/// relation of length at most 6.
pub fn sym4_corpus() -> Vec<FinSupportElement> {
    let p = |cycles: &[&[u32]]| Perm::from_cycles(4, cycles).expect("valid cycles");
    vec![
        FinSupportElement::from_coords([(0, p(&[&[0, 1]])), (1, p(&[&[0, 1, 2]]))]),
        FinSupportElement::from_coords([(1, p(&[&[0, 1, 2, 3]]))]),
        FinSupportElement::from_coords([(0, p(&[&[1, 2, 3]])), (2, p(&[&[0, 1], &[2, 3]]))]),
        FinSupportElement::from_coords([(2, p(&[&[0, 2, 1]])), (3, p(&[&[0, 3]]))]),
        FinSupportElement::from_coords([(0, p(&[&[0, 1, 2, 3]])), (3, p(&[&[1, 2]]))]),
        FinSupportElement::from_coords([(1, p(&[&[0, 3], &[1, 2]])), (2, p(&[&[1, 3]])), (3, p(&[&[0, 1, 3]]))]),
        FinSupportElement::from_coords([(0, p(&[&[0, 2]])), (1, p(&[&[1, 3]])), (2, p(&[&[0, 3]])), (3, p(&[&[0, 1]]))]),
        FinSupportElement::from_coords([(3, p(&[&[0, 2, 1, 3]]))]),
    ]
}

/// Five elements sharing a component at coordinate 0, each with its own tail
/// coordinate.
pub fn shared_coordinate_instance() -> Vec<FinSupportElement> {
    let h = Perm::from_cycles(4, &[&[0, 1, 2]]).expect("valid");
    let t = Perm::from_cycles(4, &[&[0, 1, 2, 3]]).expect("valid");
    (1..=5)
        .map(|k| FinSupportElement::from_coords([(0, h.clone()), (k, t.clone())]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, c: &[u32]) -> Perm {
        Perm::from_cycles(n, &[c]).unwrap()
    }

    #[test]
    fn perm_basics() {
        let s = cyc(3, &[0, 1, 2]);
        assert_eq!(s.images(), &[1, 2, 0]);
        assert!(s.compose(&s.inverse()).is_identity());
        assert_eq!(s.order(), 3);
        assert!(Perm::new(vec![0, 0, 1]).is_err());
        assert!(Perm::new(vec![0, 3]).is_err());
        // (0 1) then (1 2): 0 -> 1 -> 2
        let a = cyc(3, &[0, 1]);
        let b = cyc(3, &[1, 2]);
        assert_eq!(b.compose(&a).images()[0], 2);
    }

    #[test]
    fn commutator_examples() {
        let s = cyc(3, &[0, 1, 2]);
        let t = cyc(3, &[0, 1]);
        let g1 = FinSupportElement::from_coords([(0, s.clone())]);
        let g2 = FinSupportElement::from_coords([(1, t.clone())]);
        assert!(FinSupportElement::commutator(&g1, &g2).unwrap().is_identity());
        assert!(g1.multiply(&g1.inverse()).unwrap().is_identity());
        assert!(FinSupportElement::commutator(&g1, &g1).unwrap().is_identity());
        let g3 = FinSupportElement::from_coords([(0, t)]);
        assert_eq!(FinSupportElement::commutator(&g1, &g3).unwrap().support(), [0].into());
    }

    #[test]
    fn supports() {
        let s = cyc(3, &[0, 1, 2]);
        let g = FinSupportElement::from_coords([
            (0, s.clone()),
            (1, Perm::identity(3)),
            (2, s.clone()),
            (3, Perm::identity(5)),
        ]);
        assert_eq!(g.support(), [0, 2].into());
        assert!(FinSupportElement::identity().support().is_empty());
        let h = FinSupportElement::from_coords([(5, cyc(2, &[0, 1]))]);
        assert_eq!(g.multiply(&h).unwrap().support(), [0, 2, 5].into());
    }

    #[test]
    fn degree_mismatch() {
        let g = FinSupportElement::from_coords([(0, cyc(3, &[0, 1]))]);
        let h = FinSupportElement::from_coords([(0, cyc(4, &[0, 1]))]);
        assert_eq!(
            g.multiply(&h),
            Err(Error::DegreeMismatch {
                coord: 0,
                left: 3,
                right: 4
            })
        );
    }

    #[test]
    fn json_shape() {
        let g = FinSupportElement::from_coords([(0, Perm::new(vec![1, 0, 2]).unwrap())]);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"coords":{"0":[1,0,2]}}"#);
        assert_eq!(serde_json::from_str::<FinSupportElement>(&json).unwrap(), g);
        let pruned: FinSupportElement = serde_json::from_str(r#"{"coords":{"0":[0,1],"4":[1,0]}}"#).unwrap();
        assert_eq!(pruned.support(), [4].into());
        assert!(serde_json::from_str::<FinSupportElement>(r#"{"coords":{"0":[1,1]}}"#).is_err());
    }

    /// Every word of each length in lexicographic order, reduced or not.
    fn brute_force(set: &[FinSupportElement], max_len: usize) -> Option<Word> {
        let k = 2 * set.len();
        for len in 1..=max_len as u32 {
            for n in 0..k.pow(len) {
                let codes: Vec<u8> = (0..len).rev().map(|p| (n / k.pow(p) % k) as u8).collect();
                let w = to_word(&codes);
                if w.is_reduced() && eval_word(set, &w).unwrap().is_identity() {
                    return Some(w);
                }
            }
        }
        None
    }

    #[test]
    fn disjoint_five_cycles_give_commutator() {
        let s = cyc(5, &[0, 1, 2, 3, 4]);
        let set = vec![
            FinSupportElement::from_coords([(0, s.clone())]),
            FinSupportElement::from_coords([(1, s)]),
        ];
        for exec in [Exec::Sequential, Exec::Parallel] {
            let r = relation_search(&set, 6, 1 << 20, exec).unwrap();
            assert_eq!(r.word.to_string(), "a b a^-1 b^-1");
            assert_eq!(r.length, 4);
        }
        assert_eq!(brute_force(&set, 4).unwrap().to_string(), "a b a^-1 b^-1");
    }

    #[test]
    fn identity_gives_single_letter() {
        let r = relation_search(&[FinSupportElement::identity()], 4, 100, Exec::Sequential).unwrap();
        assert_eq!(r.word.to_string(), "a");
    }

    #[test]
    fn small_budget_is_inconclusive() {
        let s = cyc(5, &[0, 1, 2, 3, 4]);
        let set = vec![
            FinSupportElement::from_coords([(0, s.clone())]),
            FinSupportElement::from_coords([(1, s)]),
        ];
        assert!(matches!(relation_search(&set, 3, 1 << 20, Exec::Sequential), Err(Error::Exhausted(_))));
        assert!(matches!(relation_search(&set, 8, 10, Exec::Sequential), Err(Error::Exhausted(_))));
    }

    #[test]
    fn bfs_matches_brute_force_on_corpus() {
        let corpus = sym4_corpus();
        for (i, j) in [(0, 1), (2, 3), (4, 7), (5, 6)] {
            let set = vec![corpus[i].clone(), corpus[j].clone()];
            let r = relation_search(&set, 6, 1 << 20, Exec::Parallel).unwrap();
            assert_eq!(Some(r.word), brute_force(&set, 6), "pair {i},{j}");
        }
    }

    #[test]
    fn corpus_orders_are_small() {
        for g in sym4_corpus() {
            let order = g.coords().values().map(Perm::order).fold(1, num_integer::lcm);
            assert!((2..=6).contains(&order), "{g:?}");
        }
    }

    #[test]
    fn pigeonhole_on_shared_coordinate() {
        let set = shared_coordinate_instance();
        let t = pigeonhole_probe(&set).unwrap();
        assert_eq!(t.anchor, 0);
        assert_eq!(t.pattern[0].0, 0);
        assert_eq!(t.class, vec![1, 2, 3, 4]);
        // exhaustive oracle: every pair in the class works with f
        for &a in &t.class {
            for &b in &t.class {
                let c = FinSupportElement::commutator(&set[a], &set[b]).unwrap();
                assert!(FinSupportElement::commutator(&set[0], &c).unwrap().is_identity());
            }
        }
        let c = FinSupportElement::commutator(&set[t.g1], &set[t.g2]).unwrap();
        assert!(FinSupportElement::commutator(&t.f, &c).unwrap().is_identity());
    }

    #[test]
    fn pigeonhole_trivial_cases() {
        let s = cyc(3, &[0, 1, 2]);
        let disjoint: Vec<_> = (0..4).map(|k| FinSupportElement::from_coords([(k, s.clone())])).collect();
        let t = pigeonhole_probe(&disjoint).unwrap();
        assert!(t.commutator.is_identity());
        let same = vec![disjoint[0].clone(); 3];
        assert!(pigeonhole_probe(&same).unwrap().commutator.is_identity());
        assert!(pigeonhole_probe(&disjoint[..2]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn perm(n: usize) -> impl Strategy<Value = Perm> {
            Just((0..n as u32).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|v| Perm::new(v).unwrap())
        }

        fn element() -> impl Strategy<Value = FinSupportElement> {
            proptest::collection::btree_map(0u32..6, perm(4), 0..5).prop_map(FinSupportElement::new)
        }

        proptest! {
            #[test]
            fn support_laws(g in element(), h in element()) {
                prop_assert_eq!(g.inverse().support(), g.support());
                let gh = g.multiply(&h).unwrap();
                let union: SupportSet = g.support().union(&h.support()).copied().collect();
                prop_assert!(gh.support().is_subset(&union));
                if g.support().is_disjoint(&h.support()) {
                    prop_assert!(FinSupportElement::commutator(&g, &h).unwrap().is_identity());
                    prop_assert_eq!(gh.support(), union);
                }
            }

            #[test]
            fn product_is_associative(g in element(), h in element(), k in element()) {
                let left = g.multiply(&h).unwrap().multiply(&k).unwrap();
                let right = g.multiply(&h.multiply(&k).unwrap()).unwrap();
                prop_assert_eq!(left, right);
            }
        }
    }
}
