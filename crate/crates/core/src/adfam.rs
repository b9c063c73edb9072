//! Almost-disjoint families of subsets of the naturals, realized as branches
//! of the binary tree under the prefix code `e(s) = 2^|s| + value(s)`.
//!
//! Two distinct branches share exactly their common prefixes, so the sets
//! `A_b = { e(b|n) : n >= 1 }` pairwise intersect in a finite set whose size
//! is the length of the longest common prefix.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest prefix length whose code still fits in a `u64`.
pub const MAX_CODE_BITS: usize = 62;

/// An eventually periodic infinite bit sequence: `seed` followed by `period`
/// repeated forever. Stored in canonical form (primitive period, shortest
/// seed), so structural equality is equality of the infinite sequences.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch {
    seed: Vec<bool>,
    period: Vec<bool>,
}

impl Branch {
    pub fn new(seed: Vec<bool>, period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("branch period must be nonempty".into()));
        }
        let mut b = Branch { seed, period };
        b.canonicalize();
        Ok(b)
    }

    /// Constant branch `(0)` or `(1)`.
    pub fn constant(bit: bool) -> Self {
        Branch {
            seed: Vec::new(),
            period: vec![bit],
        }
    }

    fn canonicalize(&mut self) {
        let n = self.period.len();
        if let Some(d) = (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| (0..n).all(|i| self.period[i] == self.period[i % d]))
        {
            self.period.truncate(d);
        }
        while let Some(&last) = self.seed.last() {
            if last != *self.period.last().expect("nonempty period") {
                break;
            }
            self.seed.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn seed(&self) -> &[bool] {
        &self.seed
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn bit(&self, n: usize) -> bool {
        if n < self.seed.len() {
            self.seed[n]
        } else {
            self.period[(n - self.seed.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<bool> {
        (0..n).map(|i| self.bit(i)).collect()
    }

    /// Length of the longest common prefix, or `None` when the branches are
    /// equal.
    pub fn common_prefix(&self, other: &Branch) -> Option<usize> {
        let horizon =
            self.seed.len().max(other.seed.len()) + self.period.len().lcm(&other.period.len());
        (0..horizon).find(|&n| self.bit(n) != other.bit(n))
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &[bool]| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        write!(f, "{}({})", bits(&self.seed), bits(&self.period))
    }
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Branch {
    type Err = Error;

    /// `seed(period)`, e.g. `0101(0)` or `(01)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a branch: `{s}`"));
        let (seed, rest) = s.split_once('(').ok_or_else(bad)?;
        let period = rest.strip_suffix(')').ok_or_else(bad)?;
        let parse_bits = |t: &str| {
            t.chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<_>>>()
        };
        Branch::new(parse_bits(seed)?, parse_bits(period)?)
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Branch {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `e(s) = 2^|s| + value(s)`, reading `s` most significant bit first.
pub fn encode(bits: &[bool]) -> Result<u64> {
    if bits.len() > MAX_CODE_BITS {
        return Err(Error::Precondition(format!(
            "prefix of length {} does not fit the code range",
            bits.len()
        )));
    }
    let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
    Ok((1u64 << bits.len()) + value)
}

/// Inverse of [`encode`]: the bit string coded by `k`, if any.
pub fn decode(k: u64) -> Option<Vec<bool>> {
    if k == 0 {
        return None;
    }
    let len = 63 - k.leading_zeros() as usize;
    Some((0..len).rev().map(|i| (k >> i) & 1 == 1).collect())
}

/// The set `A_b` of codes of all nonempty prefixes of a branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdSet {
    pub branch: Branch,
}

impl AdSet {
    pub fn new(branch: Branch) -> Self {
        AdSet { branch }
    }

    pub fn member(&self, k: u64) -> bool {
        match decode(k) {
            Some(bits) if !bits.is_empty() => {
                bits.iter().enumerate().all(|(i, &b)| self.branch.bit(i) == b)
            }
            _ => false,
        }
    }

    /// Elements below `bound`, increasing.
    pub fn elements_below(&self, bound: u64) -> Vec<u64> {
        (1..=MAX_CODE_BITS)
            .map_while(|n| encode(&self.branch.prefix(n)).ok().filter(|&e| e < bound))
            .collect()
    }
}

/// The increasing enumeration `h` of an [`AdSet`]: `h(n) = e(b|(n+1))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Enumerator {
    pub branch: Branch,
}

impl Enumerator {
    pub fn new(branch: Branch) -> Self {
        Enumerator { branch }
    }

    pub fn enumerate(&self, n: usize) -> Result<u64> {
        encode(&self.branch.prefix(n + 1))
    }
}

/// `|A_a ∩ A_b|`, the length of the common prefix of two distinct branches.
pub fn intersection_size(a: &Branch, b: &Branch) -> Result<usize> {
    a.common_prefix(b).ok_or(Error::EqualBranches)
}

/// Deterministic list of `count` distinct eventually periodic branches: the
/// strings `0, 0, 1, 1, 00, 00, 01, ...` each followed by a constant tail that
/// alternates between `(0)` and `(1)`, skipping repeats.
pub fn sample_branches(count: usize) -> Vec<Branch> {
    let mut out: Vec<Branch> = Vec::with_capacity(count);
    let mut k = 0u64;
    while out.len() < count {
        let code = k / 2 + 2;
        let seed = decode(code).expect("code >= 2");
        let b = Branch::new(seed, vec![k % 2 == 1]).expect("nonempty period");
        if !out.contains(&b) {
            out.push(b);
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(s: &str) -> Branch {
        s.parse().unwrap()
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(Enumerator::new(br("(0)")).enumerate(0).unwrap(), 2);
        assert_eq!(Enumerator::new(br("(1)")).enumerate(0).unwrap(), 3);
        assert_eq!(Enumerator::new(br("(01)")).enumerate(2).unwrap(), 10);
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection_size(&br("(0)"), &br("(1)")).unwrap(), 0);
        assert_eq!(intersection_size(&br("0(1)"), &br("0(0)")).unwrap(), 1);
        assert_eq!(intersection_size(&br("0101(0)"), &br("0101(1)")).unwrap(), 4);
        assert_eq!(intersection_size(&br("(01)"), &br("0(10)")), Err(Error::EqualBranches));
    }

    #[test]
    fn member_examples() {
        let a = AdSet::new(br("(0)"));
        assert!(a.member(2));
        assert!(!a.member(3));
        assert!(!a.member(0));
        assert!(!a.member(1));
        assert!(a.member(4) && a.member(8));
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(br("0(0)"), br("(0)"));
        assert_eq!(br("(0101)"), br("(01)"));
        assert_eq!(br("1(01)"), br("(10)"));
        assert_eq!(br("0101(0)").to_string(), "0101(0)");
        assert_eq!(br("(1)").to_string(), "(1)");
        assert!("01".parse::<Branch>().is_err());
        assert!("0()".parse::<Branch>().is_err());
        assert!("2(0)".parse::<Branch>().is_err());
    }

    #[test]
    fn decode_inverts_encode() {
        for k in 1..2000u64 {
            let bits = decode(k).unwrap();
            assert_eq!(encode(&bits).unwrap(), k);
        }
    }

    #[test]
    fn sampled_branches_are_distinct() {
        let bs = sample_branches(16);
        for (i, a) in bs.iter().enumerate() {
            for b in &bs[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }

    // brute-force intersection of the explicit sets up to a bound
    fn explicit_intersection(a: &Branch, b: &Branch, bound: u64) -> usize {
        let sa = AdSet::new(a.clone()).elements_below(bound);
        let sb = AdSet::new(b.clone()).elements_below(bound);
        sa.iter().filter(|x| sb.contains(x)).count()
    }

    mod props {
        use super::*;
        use proptest::collection::vec;
        use proptest::prelude::*;

        fn branch() -> impl Strategy<Value = Branch> {
            (vec(any::<bool>(), 0..6), vec(any::<bool>(), 1..4))
                .prop_map(|(s, p)| Branch::new(s, p).unwrap())
        }

        proptest! {
            #[test]
            fn almost_disjointness_two_ways(a in branch(), b in branch()) {
                prop_assume!(a != b);
                let formula = intersection_size(&a, &b).unwrap();
                prop_assert_eq!(formula, explicit_intersection(&a, &b, 1 << 40));
            }

            #[test]
            fn enumerator_lists_the_set_in_order(a in branch()) {
                let h = Enumerator::new(a.clone());
                let listed: Vec<u64> = (0..20).map(|n| h.enumerate(n).unwrap()).collect();
                prop_assert!(listed.windows(2).all(|w| w[0] < w[1]));
                let set = AdSet::new(a);
                let first: Vec<u64> = (1..).filter(|&k| set.member(k)).take(8).collect();
                prop_assert_eq!(&listed[..8], &first[..]);
            }

            #[test]
            fn finite_intersection_bound(bs in vec(branch(), 3..6)) {
                let mut distinct = bs.clone();
                distinct.sort();
                distinct.dedup();
                prop_assume!(distinct.len() >= 2);
                let max_pair = distinct.iter().enumerate().flat_map(|(i, a)| {
                    distinct[i + 1..].iter().map(move |b| intersection_size(a, b).unwrap())
                }).max().unwrap();
                let sets: Vec<Vec<u64>> = distinct.iter()
                    .map(|b| AdSet::new(b.clone()).elements_below(1 << 40)).collect();
                let common = sets[0].iter().filter(|x| sets[1..].iter().all(|s| s.contains(x))).count();
                prop_assert!(common <= max_pair);
            }
        }
    }
}
