//! Ping-pong certificates for tables of block sets over a uniform frame.
//!
//! For a table of pairs `(A_i, B_i, f_i)` the certifier checks that all the
//! sets are pairwise disjoint and that `B_iᶜ ⊆ f_i(A_i)`. The covering
//! condition is checked in both of its equivalent forms, `f_i(A_iᶜ) ⊆ B_i`
//! and `B_iᶜ ⊆ f_i(A_i)`, by exact interval images over a window of whole
//! periods, so the verdict extends to the line by translation.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Action, GeneratorId};
use crate::order::{selector_disjoint, BlockSet, Disjointness, Frame, Interval, Rational, Selector};
use crate::plmap::MapDescriptor;

/// Blocks scanned before a window is declared too large.
pub const MAX_WINDOW_BLOCKS: i64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongPair {
    pub a: BlockSet,
    pub b: BlockSet,
    pub generator: GeneratorId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongTable {
    pub pairs: Vec<PingPongPair>,
    pub action: Action,
}

impl PingPongTable {
    /// The shared frame of every set in the table.
    pub fn frame(&self) -> Result<&Frame> {
        let first = self
            .pairs
            .first()
            .ok_or_else(|| Error::Precondition("ping-pong table is empty".into()))?;
        for p in &self.pairs {
            if p.a.frame != first.a.frame || p.b.frame != first.a.frame {
                return Err(Error::MismatchedFrames);
            }
        }
        Ok(&first.a.frame)
    }

    /// `A_1, B_1, A_2, B_2, ...`
    pub fn sets(&self) -> Vec<&BlockSet> {
        self.pairs.iter().flat_map(|p| [&p.a, &p.b]).collect()
    }
}

/// Outcome of one inclusion check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Check {
    Pass,
    /// `point` violates the inclusion; `block` is the frame block holding it
    /// when it lies inside the frame's hull.
    Fail { point: Rational, block: Option<i64> },
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DisjointCheck {
    Pass,
    /// Sets are numbered `A_1, B_1, A_2, ...` from 0.
    Overlap { first: usize, second: usize, block: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveringCheck {
    /// `f(Aᶜ) ⊆ B`; a failure point lies in `f(Aᶜ) \ B`.
    pub forward: Check,
    /// `Bᶜ ⊆ f(A)`; a failure point lies in `Bᶜ \ f(A)`.
    pub backward: Check,
    /// Both forms gave the same verdict.
    pub agree: bool,
    /// Blocks `first..last` were examined.
    pub first_block: i64,
    pub last_block: i64,
    /// Translation period that carries the verdict to the whole line, when
    /// the map is periodic.
    pub period: Option<Rational>,
}

impl CoveringCheck {
    pub fn passed(&self) -> bool {
        self.forward.passed() && self.backward.passed()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub generator: GeneratorId,
    pub covering: CoveringCheck,
}

/// A point outside every set of the table, if one was found. Informational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePoint {
    pub point: Option<Rational>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted {
        generator: Option<GeneratorId>,
        reason: String,
        point: Option<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongCertificate {
    pub version: String,
    pub table: PingPongTable,
    pub disjoint: DisjointCheck,
    pub pairs: Vec<PairReport>,
    pub base_point: BasePoint,
    pub verdict: Verdict,
}

impl PingPongCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Pairwise disjointness of all sets of the table, by residue arithmetic.
pub fn check_disjoint(t: &PingPongTable) -> Result<DisjointCheck> {
    let frame = t.frame()?;
    let sets = t.sets();
    if sets.iter().any(|s| !s.selector.is_decidable()) {
        return Err(Error::Unsupported(
            "disjointness of almost-disjoint selectors is not decided here".into(),
        ));
    }
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate().skip(i + 1) {
            if let Disjointness::Overlap(block) = selector_disjoint(frame, &a.selector, &b.selector)? {
                return Ok(DisjointCheck::Overlap {
                    first: i,
                    second: j,
                    block,
                });
            }
        }
    }
    Ok(DisjointCheck::Pass)
}

fn selector_modulus(s: &Selector) -> Result<u64> {
    s.modulus()
        .ok_or_else(|| Error::Unsupported("covering check needs residue or finite selectors".into()))
}

/// Block indices `[lo, hi)` that decide the covering condition.
fn check_window(a: &BlockSet, b: &BlockSet, f: &MapDescriptor) -> Result<(i64, i64, Option<Rational>)> {
    let frame = &a.frame;
    let step = frame
        .uniform_step()
        .ok_or_else(|| Error::Incommensurate("frame has no uniform step".into()))?;
    let m = selector_modulus(&a.selector)?.lcm(&selector_modulus(&b.selector)?);
    let selector_period = &step * &Rational::from_integer(m as i64);
    let period = f.period();
    let n = match &period {
        Some(p) => {
            let l = Rational::lcm(p, &selector_period);
            (&l / &step)
                .to_i64()
                .ok_or_else(|| Error::Incommensurate(format!("period {p} against block step {step}")))?
        }
        None => m as i64,
    };
    if n > MAX_WINDOW_BLOCKS {
        return Err(Error::Incommensurate(format!("common period spans {n} blocks")));
    }
    let mut special: Vec<i64> = a
        .selector
        .exceptions()
        .into_iter()
        .chain(b.selector.exceptions())
        .collect();
    if period.is_none() {
        let hull = f
            .support_hull()
            .filter(Interval::is_bounded)
            .map(Some)
            .unwrap_or_else(|| if f.is_identity_descriptor() { None } else { Some(Interval::all()) });
        if let Some(hull) = hull {
            if !hull.is_bounded() {
                return Err(Error::Incommensurate(
                    "map is neither periodic nor of bounded support".into(),
                ));
            }
            if let Some(range) = frame.blocks_meeting(&hull) {
                special.extend(range.first);
                special.extend(range.last);
            }
        }
    }
    let (mut lo, mut hi) = (0i64, n);
    if !special.is_empty() {
        let smin = *special.iter().min().expect("nonempty");
        let smax = *special.iter().max().expect("nonempty");
        lo = lo.min(smin).div_euclid(n) * n - n;
        hi = (hi.max(smax + 1) + n - 1).div_euclid(n) * n + n;
    }
    while !frame.is_valid_index(lo) && lo < hi {
        lo += 1;
    }
    if hi - lo > MAX_WINDOW_BLOCKS {
        return Err(Error::Incommensurate(format!("window spans {} blocks", hi - lo)));
    }
    Ok((lo, hi, period))
}

/// Finds a point of `image \ target` where `image = [lo, hi)`, walking the
/// frame blocks that meet it.
fn escape_point(frame: &Frame, target: &BlockSet, lo: &Rational, hi: &Rational) -> Option<(Rational, Option<i64>)> {
    let Some(mut k) = frame.locate(lo) else {
        return Some((Rational::midpoint(lo, hi), None));
    };
    loop {
        let (a, b) = frame.block(k)?;
        if a >= *hi {
            return None;
        }
        if !target.selects(k) {
            let left = Rational::max(&a, lo).clone();
            let right = Rational::min(&b, hi).clone();
            return Some((Rational::midpoint(&left, &right), Some(k)));
        }
        if !frame.is_valid_index(k + 1) || frame.point(k + 1).is_none() {
            return (b < *hi).then(|| (Rational::midpoint(&b, hi), None));
        }
        k += 1;
    }
}

/// Checks `B_iᶜ ⊆ f(A_i)` for one pair in both equivalent forms.
pub fn check_covering(a: &BlockSet, b: &BlockSet, f: &MapDescriptor) -> Result<CoveringCheck> {
    if a.frame != b.frame {
        return Err(Error::MismatchedFrames);
    }
    let frame = &a.frame;
    let (first, last, period) = check_window(a, b, f)?;
    let mut forward = Check::Pass;
    let mut backward = Check::Pass;
    for i in first..last {
        let Some((u, v)) = frame.block(i) else { continue };
        if forward.passed() && !a.selects(i) {
            let (fu, fv) = (f.eval(&u)?, f.eval(&v)?);
            if let Some((y, block)) = escape_point(frame, b, &fu, &fv) {
                forward = Check::Fail { point: y, block };
            }
        }
        if backward.passed() && !b.selects(i) {
            let (pu, pv) = (f.eval_inverse(&u)?, f.eval_inverse(&v)?);
            if let Some((x, _)) = escape_point(frame, a, &pu, &pv) {
                let y = f.eval(&x)?;
                let block = frame.locate(&y);
                backward = Check::Fail { point: y, block };
            }
        }
        if !forward.passed() && !backward.passed() {
            break;
        }
    }
    Ok(CoveringCheck {
        agree: forward.passed() == backward.passed(),
        forward,
        backward,
        first_block: first,
        last_block: last,
        period,
    })
}

/// Re-checks a failure point: in the forward form `f⁻¹(y) ∉ A` and `y ∉ B`;
/// in the backward form `y ∉ B` and `f⁻¹(y) ∉ A`. Both forms say the same.
pub fn verify_counterexample(a: &BlockSet, b: &BlockSet, f: &MapDescriptor, y: &Rational) -> Result<bool> {
    let x = f.eval_inverse(y)?;
    Ok(!a.contains(&x) && !b.contains(y))
}

fn base_point(t: &PingPongTable) -> Result<BasePoint> {
    let frame = t.frame()?;
    let sets = t.sets();
    let mut m = 1u64;
    for s in &sets {
        match s.selector.modulus() {
            Some(k) => m = m.lcm(&k),
            None => {
                return Ok(BasePoint {
                    point: None,
                    note: "not decided for almost-disjoint selectors".into(),
                })
            }
        }
    }
    let specials: Vec<i64> = sets.iter().flat_map(|s| s.selector.exceptions()).collect();
    let lo = specials.iter().copied().min().unwrap_or(0).min(0) - m as i64;
    let hi = specials.iter().copied().max().unwrap_or(0).max(0) + 2 * m as i64;
    for i in lo..hi {
        if !frame.is_valid_index(i) || sets.iter().any(|s| s.selects(i)) {
            continue;
        }
        if let Some((u, v)) = frame.block(i) {
            return Ok(BasePoint {
                point: Some(Rational::midpoint(&u, &v)),
                note: format!("block {i} is in no set"),
            });
        }
    }
    let hull = frame.hull();
    if let Some(lo) = hull.lower() {
        return Ok(BasePoint {
            point: Some(lo - &Rational::one()),
            note: "below the frame hull".into(),
        });
    }
    Ok(BasePoint {
        point: None,
        note: "the sets cover the line; freeness evidence rests on the covering checks and word witnesses"
            .into(),
    })
}

/// Runs every check and records its outcome.
pub fn certify(t: &PingPongTable) -> Result<PingPongCertificate> {
    t.frame()?;
    let disjoint = check_disjoint(t)?;
    let mut pairs = Vec::with_capacity(t.pairs.len());
    for p in &t.pairs {
        let f = t.action.get(&p.generator)?;
        pairs.push(PairReport {
            generator: p.generator.clone(),
            covering: check_covering(&p.a, &p.b, f)?,
        });
    }
    let verdict = if let DisjointCheck::Overlap { first, second, block } = &disjoint {
        Verdict::Refuted {
            generator: None,
            reason: format!("sets {first} and {second} share block {block}"),
            point: None,
        }
    } else if let Some(bad) = pairs.iter().find(|r| !r.covering.passed()) {
        let point = match (&bad.covering.forward, &bad.covering.backward) {
            (Check::Fail { point, .. }, _) | (_, Check::Fail { point, .. }) => Some(point.clone()),
            _ => None,
        };
        Verdict::Refuted {
            generator: Some(bad.generator.clone()),
            reason: "covering condition fails".into(),
            point,
        }
    } else {
        Verdict::Certified
    };
    Ok(PingPongCertificate {
        version: env!("CARGO_PKG_VERSION").to_string(),
        table: t.clone(),
        disjoint,
        pairs,
        base_point: base_point(t)?,
        verdict,
    })
}

/// The table `(I_0, I_3, f), (I_2, I_1, g)` where `I_r` is the union of the
/// blocks of `frame` with index `r mod 4`.
pub fn quarter_table(frame: &Frame, f: GeneratorId, g: GeneratorId, action: Action) -> Result<PingPongTable> {
    let i = |r| BlockSet::residue(frame.clone(), 4, r);
    Ok(PingPongTable {
        pairs: vec![
            PingPongPair {
                a: i(0)?,
                b: i(3)?,
                generator: f,
            },
            PingPongPair {
                a: i(2)?,
                b: i(1)?,
                generator: g,
            },
        ],
        action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::order::q;

    fn n(r: u64) -> BlockSet {
        BlockSet::residue(Frame::unit(), 4, r).unwrap()
    }

    fn table_of(sets: &[(u64, u64)]) -> PingPongTable {
        PingPongTable {
            pairs: sets
                .iter()
                .map(|&(a, b)| PingPongPair {
                    a: n(a),
                    b: n(b),
                    generator: GeneratorId::named("f"),
                })
                .collect(),
            action: catalog::example_action(),
        }
    }

    #[test]
    fn disjointness_examples() {
        assert_eq!(check_disjoint(&table_of(&[(0, 3), (2, 1)])).unwrap(), DisjointCheck::Pass);
        let overlap = check_disjoint(&table_of(&[(0, 0)])).unwrap();
        assert!(matches!(overlap, DisjointCheck::Overlap { block, .. } if block.rem_euclid(4) == 0));
        let halves = PingPongTable {
            pairs: vec![PingPongPair {
                a: BlockSet::residue(Frame::unit(), 2, 0).unwrap(),
                b: BlockSet::residue(Frame::unit(), 2, 1).unwrap(),
                generator: GeneratorId::named("f"),
            }],
            action: catalog::example_action(),
        };
        assert_eq!(check_disjoint(&halves).unwrap(), DisjointCheck::Pass);
    }

    #[test]
    fn example_covering_passes() {
        let c = check_covering(&n(0), &n(3), &catalog::example_f()).unwrap();
        assert!(c.passed() && c.agree);
        assert_eq!(c.period, Some(q(4, 1)));
        let c = check_covering(&n(2), &n(1), &catalog::example_g()).unwrap();
        assert!(c.passed() && c.agree);
    }

    #[test]
    fn mutated_covering_fails_in_class_two() {
        let f = catalog::mutated_f();
        let c = check_covering(&n(0), &n(3), &f).unwrap();
        assert!(c.agree);
        let Check::Fail { point, block } = &c.forward else {
            panic!("expected a failure");
        };
        assert_eq!(block.map(|b| b.rem_euclid(4)), Some(2));
        let r = point - &(Rational::from_bigint((point / &q(4, 1)).floor()) * q(4, 1));
        assert!(r >= q(2, 1) && r < q(3, 1));
        assert!(verify_counterexample(&n(0), &n(3), &f, point).unwrap());
        let Check::Fail { point, .. } = &c.backward else {
            panic!("expected a failure");
        };
        assert!(verify_counterexample(&n(0), &n(3), &f, point).unwrap());
    }

    #[test]
    fn identity_with_everything_passes() {
        let all = BlockSet::new(Frame::unit(), Selector::all()).unwrap();
        let c = check_covering(&all, &n(1), &MapDescriptor::Identity).unwrap();
        assert!(c.passed());
    }

    #[test]
    fn certify_example_and_single_generator() {
        let a = catalog::example_action();
        let t = quarter_table(&Frame::unit(), GeneratorId::named("f"), GeneratorId::named("g"), a.clone()).unwrap();
        let cert = certify(&t).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.base_point.point, None);
        let mut single = t.clone();
        single.pairs.truncate(1);
        let cert = certify(&single).unwrap();
        assert!(cert.is_certified());
        assert!(cert.base_point.point.is_some());
    }

    #[test]
    fn certify_mutated_is_refuted() {
        let a = catalog::example_action().bind(GeneratorId::named("f"), catalog::mutated_f());
        let t = quarter_table(&Frame::unit(), GeneratorId::named("f"), GeneratorId::named("g"), a).unwrap();
        let cert = certify(&t).unwrap();
        let Verdict::Refuted { generator, point, .. } = &cert.verdict else {
            panic!("expected refutation");
        };
        assert_eq!(generator.as_ref().map(|g| g.name.as_str()), Some("f"));
        assert!(verify_counterexample(&n(0), &n(3), &catalog::mutated_f(), point.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn rank2_pair_certifies() {
        let (f, g) = crate::freegroup::rank2_interval_basis(&Interval::all(), &Frame::unit()).unwrap();
        let a = Action::new()
            .bind(GeneratorId::named("f"), f)
            .bind(GeneratorId::named("g"), g);
        let t = quarter_table(&Frame::unit(), GeneratorId::named("f"), GeneratorId::named("g"), a).unwrap();
        assert!(certify(&t).unwrap().is_certified());
    }

    #[test]
    fn finite_maps_are_checked_around_their_support() {
        // moves block 1 into block 2 of class 2: refuted only near the support
        let f = MapDescriptor::finite(vec![(q(1, 1), q(1, 1)), (q(2, 1), q(5, 2)), (q(4, 1), q(4, 1))]).unwrap();
        let c = check_covering(&n(0), &n(3), &f).unwrap();
        assert!(!c.passed());
        let all = BlockSet::new(Frame::unit(), Selector::all()).unwrap();
        assert!(check_covering(&all, &n(3), &f).unwrap().passed());
    }

    #[test]
    fn certificate_json_roundtrip() {
        let t = quarter_table(
            &Frame::unit(),
            GeneratorId::named("f"),
            GeneratorId::named("g"),
            catalog::example_action(),
        )
        .unwrap();
        let cert = certify(&t).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: PingPongCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }
}
