//! Blockwise free families and the almost-disjoint generators built on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adfam::{intersection_size, Branch};
use crate::error::{Error, Result};
use crate::freegroup::{rank2_interval_basis, search_within, Action, Budget, GenIndex, GeneratorId, Word};
use crate::order::{BlockSet, Frame, IndexKind, Interval, Rational, Selector};
use crate::par::Exec;
use crate::plmap::{conjugate_word, support_probe, BasisLetter, BlockRule, MapDescriptor};

/// Name of the code used for the almost-disjoint enumeration: a bit string is
/// read as binary after a leading `1`.
pub const ENCODING_ID: &str = "leading-one-binary";

/// A frame inside `Λ` whose blocks each carry their own free pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockFreeFamily {
    pub lambda: Interval,
    pub frame: Frame,
    /// Only blocks `0..n` carry a pair when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<u64>,
}

pub fn build_block_family(lambda: Interval, frame: Frame, blocks: Option<u64>) -> Result<BlockFreeFamily> {
    if blocks == Some(0) {
        return Err(Error::DegenerateBlock("a family needs at least one block".into()));
    }
    if !lambda.contains_interval(&frame.hull()) {
        return Err(Error::Precondition(format!(
            "frame hull {} is not inside {lambda}",
            frame.hull()
        )));
    }
    Ok(BlockFreeFamily { lambda, frame, blocks })
}

impl BlockFreeFamily {
    /// Blocks that carry a pair.
    pub fn selector(&self) -> Selector {
        match self.blocks {
            Some(n) => Selector::finite(0..n as i64),
            None => Selector::all(),
        }
    }

    pub fn has_block(&self, i: i64) -> bool {
        self.frame.is_valid_index(i) && self.selector().selects(i)
    }

    pub fn block(&self, i: i64) -> Result<(Rational, Rational)> {
        if !self.has_block(i) {
            return Err(Error::RuleUndefined(i));
        }
        self.frame.block(i).ok_or(Error::RuleUndefined(i))
    }

    /// The free pair `(f_i, g_i)` on the open block `(a_i, a_{i+1})`.
    pub fn block_pair(&self, i: i64) -> Result<(MapDescriptor, MapDescriptor)> {
        let (lo, hi) = self.block(i)?;
        let inner = Frame::interior(lo.clone(), hi.clone())?;
        rank2_interval_basis(&Interval::open(lo, hi)?, &inner)
    }

    /// `w_j = f_i^-j g_i f_i^j` on block `i`.
    pub fn basis_element(&self, i: i64, j: u64) -> Result<MapDescriptor> {
        let (f, g) = self.block_pair(i)?;
        Ok(conjugate_word(f, g, j))
    }

    /// The generator that carries `w_{h(i)}` on block `i`, where `h`
    /// enumerates the almost-disjoint set of `branch`.
    pub fn cameron_generator(&self, branch: Branch) -> CameronGenerator {
        let descriptor = MapDescriptor::LazyBlock {
            frame: self.frame.clone(),
            rule: BlockRule::BlockBasis {
                select: self.selector(),
                letter: BasisLetter::Enumerated { branch: branch.clone() },
                fill: Rational::one(),
            },
        };
        CameronGenerator {
            family: self.clone(),
            branch,
            descriptor,
        }
    }

    /// An action binding `name#branch` for each branch.
    pub fn action(&self, name: &str, branches: &[Branch]) -> Action {
        branches.iter().fold(Action::new(), |a, b| {
            a.bind(
                GeneratorId::branch(name, b.clone()),
                self.cameron_generator(b.clone()).descriptor,
            )
        })
    }

    pub fn export(&self, branches: &[Branch]) -> FamilyExport {
        FamilyExport {
            hull: self.frame.hull(),
            family: self.clone(),
            branches: branches.to_vec(),
            encoding: ENCODING_ID.to_string(),
        }
    }
}

/// JSON form of a generator family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyExport {
    pub hull: Interval,
    pub family: BlockFreeFamily,
    pub branches: Vec<Branch>,
    pub encoding: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CameronGenerator {
    pub family: BlockFreeFamily,
    pub branch: Branch,
    pub descriptor: MapDescriptor,
}

impl CameronGenerator {
    /// Basis index `h(i)` used on block `i`.
    pub fn index_at(&self, i: i64) -> Result<Option<u64>> {
        if !self.family.has_block(i) {
            return Ok(None);
        }
        BasisLetter::Enumerated {
            branch: self.branch.clone(),
        }
        .index_at(i)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        self.descriptor.eval(x)
    }
}

/// Blocks below `n` on which the two generators carry the same basis element.
pub fn agreement_blocks(a: &CameronGenerator, b: &CameronGenerator, n: u64) -> Result<Vec<u64>> {
    if a.family != b.family {
        return Err(Error::Precondition("generators come from different families".into()));
    }
    if a.branch == b.branch {
        return Err(Error::EqualBranches);
    }
    // h(i) is the code of the length-(i+1) prefix, so equal codes mean equal prefixes
    let mut out = Vec::new();
    for i in 0..n {
        if !a.family.has_block(i as i64) {
            break;
        }
        if a.branch.prefix(i as usize + 1) != b.branch.prefix(i as usize + 1) {
            break;
        }
        out.push(i);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CameronWitness {
    pub block: i64,
    /// Largest common prefix over pairs of distinct branches in the word.
    pub max_prefix: usize,
    /// Basis index each generator carries on `block`.
    pub induced: BTreeMap<GeneratorId, u64>,
    pub point: Rational,
    pub image: Rational,
}

fn branch_of(gen: &GeneratorId) -> Result<Branch> {
    match &gen.index {
        Some(GenIndex::Branch(b)) => Ok(b.clone()),
        _ => Err(Error::Precondition(format!("generator `{gen}` is not indexed by a branch"))),
    }
}

/// A point moved by `word`, found inside the first block past every pairwise
/// common prefix of the branches involved. There the letters carry distinct
/// basis elements, so the induced block word is reduced and nonempty.
pub fn cameron_word_witness(fam: &BlockFreeFamily, word: &Word, budget: &Budget, exec: Exec) -> Result<CameronWitness> {
    let word = word.reduce();
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let gens = word.generators();
    let branches = gens.iter().map(branch_of).collect::<Result<Vec<_>>>()?;
    let mut max_prefix = 0usize;
    for (i, a) in branches.iter().enumerate() {
        for b in &branches[i + 1..] {
            let l = intersection_size(a, b)
                .map_err(|_| Error::Precondition(format!("branch {a} appears under two names")))?;
            max_prefix = max_prefix.max(l);
        }
    }
    let block = max_prefix as i64;
    if !fam.has_block(block) {
        return Err(Error::Precondition(format!(
            "the family has no block {block} past the common prefixes"
        )));
    }
    let mut action = Action::new();
    let mut induced = BTreeMap::new();
    for (g, b) in gens.iter().zip(&branches) {
        let gen = fam.cameron_generator(b.clone());
        induced.insert(g.clone(), gen.index_at(block)?.expect("block carries a pair"));
        action = action.bind(g.clone(), gen.descriptor);
    }
    let (lo, hi) = fam.block(block)?;
    let window = Interval::closed(lo, hi)?;
    let found = search_within(&action, &word, &window, budget, exec)?;
    Ok(CameronWitness {
        block,
        max_prefix,
        induced,
        point: found.point,
        image: found.image,
    })
}

/// Generators of a pathological family: `Rank(r)` gives `p#0 .. p#(r-1)`,
/// where `p#j` carries `w_j` in every interval; `Branches` gives one
/// almost-disjoint generator `c#branch` per branch inside every interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyAlphabet {
    Rank { rank: u64 },
    Branches { branches: Vec<Branch> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathologicalFamily {
    pub collection: BlockSet,
    pub action: Action,
    /// The collection is unbounded in both directions.
    pub pathological: bool,
}

/// Whether the selected blocks run off to both ends of the line.
pub fn is_unbounded_collection(c: &BlockSet) -> bool {
    let hull = c.frame.hull();
    let line = hull.lower().is_none() && hull.upper().is_none();
    let infinite = match &c.selector {
        Selector::Residues { classes, .. } => !classes.is_empty(),
        _ => false,
    };
    line && infinite && c.frame.kind() == IndexKind::Integers
}

pub fn pathological_family(collection: BlockSet, alphabet: &FamilyAlphabet) -> Result<PathologicalFamily> {
    let lazy = |rule: BlockRule| MapDescriptor::LazyBlock {
        frame: collection.frame.clone(),
        rule,
    };
    let action = match alphabet {
        FamilyAlphabet::Rank { rank } => (0..*rank).fold(Action::new(), |a, j| {
            a.bind(
                GeneratorId::indexed("p", j),
                lazy(BlockRule::BlockBasis {
                    select: collection.selector.clone(),
                    letter: BasisLetter::Fixed { index: j },
                    fill: Rational::one(),
                }),
            )
        }),
        FamilyAlphabet::Branches { branches } => branches.iter().fold(Action::new(), |a, b| {
            a.bind(
                GeneratorId::branch("c", b.clone()),
                lazy(BlockRule::BlockCameron {
                    select: collection.selector.clone(),
                    branch: b.clone(),
                }),
            )
        }),
    };
    Ok(PathologicalFamily {
        pathological: is_unbounded_collection(&collection),
        collection,
        action,
    })
}

/// Interval classes `C_n = {[2k, 2k+1) : k = n mod d}` with generator sets of
/// increasing rank; `u#j` acts on `C_n` exactly when `j < r_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionedFamily {
    pub depth: u64,
    pub ranks: Vec<u64>,
    pub collection: BlockSet,
    pub action: Action,
    /// Generators of the stage-`n` family, nested increasingly.
    pub stages: Vec<Vec<GeneratorId>>,
}

impl PartitionedFamily {
    /// Blocks of the unit frame making up class `n`.
    pub fn class_blocks(&self, n: u64) -> Result<BlockSet> {
        BlockSet::residue(Frame::unit(), 2 * self.depth, 2 * n)
    }
}

pub fn nested_union_family(ranks: &[u64]) -> Result<PartitionedFamily> {
    let d = ranks.len() as u64;
    if d == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if ranks[0] == 0 || ranks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("ranks must be positive and strictly increasing".into()));
    }
    let top = *ranks.last().expect("nonempty");
    let mut action = Action::new();
    for j in 0..top {
        let classes = (0..d).filter(|&n| j < ranks[n as usize]).map(|n| 2 * n);
        action = action.bind(
            GeneratorId::indexed("u", j),
            MapDescriptor::LazyBlock {
                frame: Frame::unit(),
                rule: BlockRule::BlockBasis {
                    select: Selector::residues(2 * d, classes),
                    letter: BasisLetter::Fixed { index: j },
                    fill: Rational::one(),
                },
            },
        );
    }
    let stages = ranks
        .iter()
        .map(|&r| (0..r).map(|j| GeneratorId::indexed("u", j)).collect())
        .collect();
    Ok(PartitionedFamily {
        depth: d,
        ranks: ranks.to_vec(),
        collection: BlockSet::residue(Frame::unit(), 2, 0)?,
        action,
        stages,
    })
}

/// For each block, whether `map` provably moves a point in the middle half
/// of it.
pub fn moves_in_blocks(map: &MapDescriptor, frame: &Frame, blocks: &[i64], exec: Exec) -> Result<Vec<bool>> {
    exec.map(blocks, |&i| {
        let (lo, hi) = frame.block(i).ok_or(Error::RuleUndefined(i))?;
        let quarter = (&hi - &lo) * Rational::new(1, 4);
        let window = Interval::closed(&lo + &quarter, &hi - &quarter)?;
        // a moved grid point settles it; the probe is only needed otherwise
        let (a, b) = (window.lower().expect("bounded"), window.upper().expect("bounded"));
        for k in 0..=32 {
            let x = Rational::lerp(a, b, &Rational::new(k, 32));
            if map.eval(&x)? != x {
                return Ok(true);
            }
        }
        Ok(!support_probe(map, &window, 16)?.moved_subintervals.is_empty())
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adfam::sample_branches;
    use crate::freegroup::{eval_word, rank_omega_basis};
    use crate::order::q;

    fn unit_family() -> BlockFreeFamily {
        build_block_family(Interval::all(), Frame::unit(), None).unwrap()
    }

    fn br(s: &str) -> Branch {
        s.parse().unwrap()
    }

    #[test]
    fn block_pairs_stay_in_their_block() {
        let fam = unit_family();
        let (f, g) = fam.block_pair(0).unwrap();
        for m in [&f, &g] {
            for w in [(q(-2, 1), q(0, 1)), (q(1, 1), q(3, 1))] {
                let w = Interval::closed(w.0, w.1).unwrap();
                assert!(support_probe(m, &w, 8).unwrap().is_fixed_everywhere());
            }
            let inside = support_probe(m, &Interval::closed(q(1, 8), q(7, 8)).unwrap(), 8).unwrap();
            assert!(!inside.moved_subintervals.is_empty());
        }
    }

    #[test]
    fn bounded_family() {
        let lambda = Interval::open(q(0, 1), q(1, 1)).unwrap();
        let frame = Frame::converging(q(0, 1), q(1, 1)).unwrap();
        let fam = build_block_family(lambda, frame, None).unwrap();
        // a_i = 1 - 1/(i+2)
        assert_eq!(fam.block(0).unwrap(), (q(1, 2), q(2, 3)));
        assert_eq!(fam.block(3).unwrap(), (q(4, 5), q(5, 6)));
        let g = fam.cameron_generator(br("0(1)"));
        for x in [q(-1, 1), q(0, 1), q(1, 4), q(1, 1), q(7, 3)] {
            assert_eq!(g.eval(&x).unwrap(), x);
        }
    }

    #[test]
    fn zero_blocks_rejected() {
        assert!(matches!(
            build_block_family(Interval::all(), Frame::unit(), Some(0)),
            Err(Error::DegenerateBlock(_))
        ));
        let lambda = Interval::open(q(0, 1), q(1, 1)).unwrap();
        assert!(matches!(
            build_block_family(lambda, Frame::unit(), None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn generator_restricts_to_enumerated_basis_element() {
        let fam = unit_family();
        let g = fam.cameron_generator(br("0(0)"));
        // h(0) is the code of "0"
        assert_eq!(g.index_at(0).unwrap(), Some(2));
        let (f0, g0) = fam.block_pair(0).unwrap();
        let a = Action::new()
            .bind(GeneratorId::named("f"), f0)
            .bind(GeneratorId::named("g"), g0);
        let w2 = rank_omega_basis(GeneratorId::named("f"), GeneratorId::named("g")).word(2);
        for k in 1..20 {
            let x = q(k, 20);
            assert_eq!(g.eval(&x).unwrap(), eval_word(&a, &w2, &x).unwrap());
        }
        for i in 0..5 {
            let h = g.index_at(i).unwrap().unwrap();
            let rule_map = match &g.descriptor {
                MapDescriptor::LazyBlock { frame, rule } => rule.block_map(frame, i).unwrap(),
                _ => unreachable!(),
            };
            assert_eq!(rule_map, fam.basis_element(i, h).unwrap());
        }
        // negative blocks are untouched
        assert_eq!(g.eval(&q(-5, 2)).unwrap(), q(-5, 2));
    }

    #[test]
    fn agreement_follows_prefixes() {
        let fam = unit_family();
        let a = fam.cameron_generator(br("0101(1)"));
        let b = fam.cameron_generator(br("0101(0)"));
        assert_eq!(intersection_size(&a.branch, &b.branch).unwrap(), 4);
        assert_eq!(agreement_blocks(&a, &b, 10).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(agreement_blocks(&a, &b, 2).unwrap(), vec![0, 1]);
        let c = fam.cameron_generator(br("1(1)"));
        assert!(agreement_blocks(&a, &c, 10).unwrap().is_empty());
        assert_eq!(agreement_blocks(&a, &a, 10), Err(Error::EqualBranches));
        // blockwise descriptor comparison agrees with the prefix rule
        let lazy = |g: &CameronGenerator, i: i64| match &g.descriptor {
            MapDescriptor::LazyBlock { frame, rule } => rule.block_map(frame, i).unwrap(),
            _ => unreachable!(),
        };
        for i in 0..8 {
            assert_eq!(lazy(&a, i) == lazy(&b, i), i < 4, "block {i}");
        }
    }

    #[test]
    fn witness_for_two_letters() {
        let fam = unit_family();
        let w: Word = "g#0(0) g#1(1)^-1".parse().unwrap();
        let found = cameron_word_witness(&fam, &w, &Budget::default(), Exec::Sequential).unwrap();
        assert_eq!(found.block, 0);
        assert_eq!(found.induced.values().copied().collect::<Vec<_>>(), vec![2, 3]);
        let a = fam.action("g", &[br("0(0)"), br("1(1)")]);
        let y = eval_word(&a, &w, &found.point).unwrap();
        assert_eq!(y, found.image);
        assert_ne!(y, found.point);
        assert!(found.point >= q(0, 1) && found.point <= q(1, 1));
    }

    #[test]
    fn witness_goes_past_common_prefix() {
        let fam = unit_family();
        let w: Word = "g#0101(1) g#0101(0) g#0101(1)^-1".parse().unwrap();
        let found = cameron_word_witness(&fam, &w, &Budget::default(), Exec::Parallel).unwrap();
        assert_eq!(found.max_prefix, 4);
        assert!(found.block >= 4);
        let canc: Word = "g#0(1) g#0(1)^-1".parse().unwrap();
        assert_eq!(
            cameron_word_witness(&fam, &canc, &Budget::default(), Exec::Sequential),
            Err(Error::EmptyWord)
        );
        let short = build_block_family(Interval::all(), Frame::unit(), Some(2)).unwrap();
        assert!(matches!(
            cameron_word_witness(&short, &w, &Budget::default(), Exec::Sequential),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pathological_rank_two() {
        let c = BlockSet::residue(Frame::unit(), 2, 0).unwrap();
        let fam = pathological_family(c.clone(), &FamilyAlphabet::Rank { rank: 2 }).unwrap();
        assert!(fam.pathological);
        assert_eq!(fam.action.generators().len(), 2);
        let blocks: Vec<i64> = (-6..=6).map(|k| 2 * k).chain([-2000, 2000]).collect();
        for g in fam.action.generators() {
            let d = fam.action.get(&g).unwrap();
            assert!(moves_in_blocks(d, &c.frame, &blocks, Exec::Sequential).unwrap().iter().all(|&m| m));
            // odd blocks are fixed
            assert_eq!(moves_in_blocks(d, &c.frame, &[1, -3], Exec::Sequential).unwrap(), vec![false, false]);
        }
        // on one interval the generator is that interval's basis element
        let fam1 = build_block_family(Interval::all(), Frame::unit(), None).unwrap();
        let p1 = fam.action.get(&GeneratorId::indexed("p", 1)).unwrap();
        let w1 = fam1.basis_element(4, 1).unwrap();
        for k in 1..12 {
            let x = q(4 * 12 + k, 12);
            assert_eq!(p1.eval(&x).unwrap(), w1.eval(&x).unwrap());
        }
    }

    #[test]
    fn single_interval_not_pathological() {
        let c = BlockSet::new(Frame::unit(), Selector::finite([0])).unwrap();
        let fam = pathological_family(c, &FamilyAlphabet::Rank { rank: 1 }).unwrap();
        assert!(!fam.pathological);
        let d = fam.action.get(&GeneratorId::indexed("p", 0)).unwrap();
        assert_eq!(d.support_hull(), Some(Interval::closed_open(q(0, 1), q(1, 1)).unwrap()));
    }

    #[test]
    fn pathological_cameron_variant() {
        let c = BlockSet::residue(Frame::unit(), 4, 0).unwrap();
        let branches = sample_branches(3);
        let fam = pathological_family(c.clone(), &FamilyAlphabet::Branches { branches }).unwrap();
        for g in fam.action.generators() {
            let d = fam.action.get(&g).unwrap();
            let moved = moves_in_blocks(d, &c.frame, &[-8, -4, 0, 4, 8], Exec::Parallel).unwrap();
            assert!(moved.iter().all(|&m| m), "{g}");
        }
    }

    #[test]
    fn nested_union() {
        let fam = nested_union_family(&[2, 3]).unwrap();
        assert_eq!(fam.action.generators().len(), 3);
        assert!(fam.stages[0].iter().all(|g| fam.stages[1].contains(g)));
        let frame = Frame::unit();
        // class 0 is blocks 0, 4, 8, ...; class 1 is blocks 2, 6, ...
        let class0 = [-8, -4, 0, 4];
        let class1 = [-6, -2, 2, 6];
        for j in 0..3 {
            let d = fam.action.get(&GeneratorId::indexed("u", j)).unwrap();
            let on0 = moves_in_blocks(d, &frame, &class0, Exec::Sequential).unwrap();
            let on1 = moves_in_blocks(d, &frame, &class1, Exec::Sequential).unwrap();
            assert!(on0.iter().all(|&m| m == (j < 2)), "u#{j} on class 0");
            assert!(on1.iter().all(|&m| m), "u#{j} on class 1");
        }
        assert!(fam.class_blocks(1).unwrap().selects(6));
        assert!(nested_union_family(&[]).is_err());
        assert!(nested_union_family(&[3, 3]).is_err());
    }

    #[test]
    fn depth_one_matches_pathological() {
        let nested = nested_union_family(&[3]).unwrap();
        let c = BlockSet::residue(Frame::unit(), 2, 0).unwrap();
        let plain = pathological_family(c, &FamilyAlphabet::Rank { rank: 3 }).unwrap();
        for j in 0..3 {
            assert_eq!(
                nested.action.get(&GeneratorId::indexed("u", j)).unwrap(),
                plain.action.get(&GeneratorId::indexed("p", j)).unwrap()
            );
        }
    }

    #[test]
    fn export_roundtrip() {
        let fam = unit_family();
        let e = fam.export(&sample_branches(2));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<FamilyExport>(&json).unwrap(), e);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn branch() -> impl Strategy<Value = Branch> {
            (proptest::collection::vec(any::<bool>(), 0..6), proptest::collection::vec(any::<bool>(), 1..3))
                .prop_map(|(s, p)| Branch::new(s, p).unwrap())
        }

        proptest! {
            #[test]
            fn agreement_law(a in branch(), b in branch(), n in 0u64..12) {
                prop_assume!(a != b);
                let fam = unit_family();
                let l = intersection_size(&a, &b).unwrap() as u64;
                let got = agreement_blocks(&fam.cameron_generator(a), &fam.cameron_generator(b), n).unwrap();
                prop_assert_eq!(got, (0..l.min(n)).collect::<Vec<_>>());
            }

            #[test]
            fn blocks_have_disjoint_support(i in -5i64..5, k in -5i64..5, j in 0u64..3) {
                prop_assume!(i != k);
                let fam = unit_family();
                let wi = fam.basis_element(i, j).unwrap();
                let wk = fam.basis_element(k, j).unwrap();
                let (hi, hk) = (wi.support_hull().unwrap(), wk.support_hull().unwrap());
                prop_assert!(!hi.intersects(&hk) || hi.intersection(&hk).is_none_or(|x| x.length().is_some_and(|l| l.is_zero())));
            }
        }
    }
}
