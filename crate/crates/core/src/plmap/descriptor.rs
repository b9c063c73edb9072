use serde::{Deserialize, Serialize};

use super::finite::FinitePl;
use super::rules::BlockRule;
use crate::error::{Error, Result};
use crate::order::{BlockSet, Frame, Interval, Rational, Selector};

/// A symbolic order-automorphism of the rational line.
///
/// Every variant is totalized to all of ℚ: outside the region where it is
/// declared to act, a descriptor is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapDescriptor {
    Identity,
    /// Finitely many affine pieces, identity outside them.
    Finite { pieces: FinitePl },
    /// `x -> kp + pattern(x - kp)` for `x` in `[kp, (k+1)p)`. The pattern
    /// fixes `0` and `p`.
    Periodic { period: Rational, pattern: FinitePl },
    /// `x -> inner(x - shift) + shift`.
    Conjugate {
        inner: Box<MapDescriptor>,
        shift: Rational,
    },
    /// On block `i` of `frame`, the map produced by `rule`; that map fixes
    /// the block's endpoints and acts inside the block.
    LazyBlock { frame: Frame, rule: BlockRule },
    /// Disjoint regions, each carrying a map that leaves it invariant.
    Patched { parts: Vec<PatchPart> },
    /// Contiguous closed segments `from` each carried onto `to` by `map`.
    Piecewise { segments: Vec<Segment> },
    /// Product of powers, written left to right and applied right to left.
    Composite { factors: Vec<Factor> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Interval { interval: Interval },
    Blocks { blocks: BlockSet },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatchPart {
    pub region: Region,
    pub map: MapDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub from: [Rational; 2],
    pub to: [Rational; 2],
    pub map: MapDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub map: MapDescriptor,
    pub power: i64,
}

/// Breakpoints of a descriptor inside a window. When `complete` is false the
/// list is a sample: the window holds more breakpoints than were listed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Breakpoints {
    pub points: Vec<Rational>,
    pub complete: bool,
}

impl Breakpoints {
    fn complete() -> Self {
        Breakpoints {
            points: Vec::new(),
            complete: true,
        }
    }

    fn absorb(&mut self, other: Breakpoints) {
        self.points.extend(other.points);
        self.complete &= other.complete;
    }

    fn finish(mut self, limit: usize) -> Self {
        self.points.sort();
        self.points.dedup();
        if self.points.len() > limit {
            self.points.truncate(limit);
            self.complete = false;
        }
        self
    }
}

/// Convex hull of two intervals.
pub fn span_hull(a: &Interval, b: &Interval) -> Interval {
    let lower = match (a.lower(), b.lower()) {
        (Some(x), Some(y)) => Some(if x <= y {
            (x.clone(), a.lower_closed() || (x == y && b.lower_closed()))
        } else {
            (y.clone(), b.lower_closed())
        }),
        _ => None,
    };
    let upper = match (a.upper(), b.upper()) {
        (Some(x), Some(y)) => Some(if x >= y {
            (x.clone(), a.upper_closed() || (x == y && b.upper_closed()))
        } else {
            (y.clone(), b.upper_closed())
        }),
        _ => None,
    };
    let (lo, lc) = lower.map_or((None, false), |(x, c)| (Some(x), c));
    let (hi, hc) = upper.map_or((None, false), |(x, c)| (Some(x), c));
    Interval::new(lo, lc, hi, hc).expect("hull of nonempty intervals")
}

fn blocks_to_visit(frame: &Frame, window: &Interval, limit: usize) -> (Vec<i64>, bool) {
    match frame.blocks_meeting(window) {
        None => (Vec::new(), true),
        Some(range) => match (range.first, range.last) {
            (Some(a), Some(b)) if ((b - a) as u64) < limit as u64 => ((a..=b).collect(), true),
            _ => (range.sample(limit), false),
        },
    }
}

impl Region {
    pub fn contains(&self, x: &Rational) -> bool {
        match self {
            Region::Interval { interval } => interval.contains(x),
            Region::Blocks { blocks } => blocks.contains(x),
        }
    }

    pub fn hull(&self) -> Interval {
        match self {
            Region::Interval { interval } => interval.clone(),
            Region::Blocks { blocks } => blocks.frame.hull(),
        }
    }

    /// Exact disjointness where it is decidable; the message names a shared
    /// point or block on overlap.
    pub fn overlap(&self, other: &Region) -> Result<Option<String>> {
        match (self, other) {
            (Region::Interval { interval: a }, Region::Interval { interval: b }) => {
                Ok(a.intersection(b).map(|i| format!("{i}")))
            }
            (Region::Interval { interval }, Region::Blocks { blocks })
            | (Region::Blocks { blocks }, Region::Interval { interval }) => {
                interval_meets_blocks(interval, blocks)
            }
            (Region::Blocks { blocks: a }, Region::Blocks { blocks: b }) => {
                if a.frame == b.frame {
                    return Ok(match a.disjoint(b)? {
                        crate::order::Disjointness::Disjoint => None,
                        crate::order::Disjointness::Overlap(i) => Some(format!("block {i}")),
                    });
                }
                if !a.frame.hull().intersects(&b.frame.hull()) {
                    return Ok(None);
                }
                Err(Error::Unsupported(
                    "disjointness of block sets over different frames".into(),
                ))
            }
        }
    }
}

const REGION_SCAN: usize = 4096;

fn interval_meets_blocks(interval: &Interval, blocks: &BlockSet) -> Result<Option<String>> {
    let Some(range) = blocks.frame.blocks_meeting(interval) else {
        return Ok(None);
    };
    for i in range.sample(REGION_SCAN) {
        if !blocks.selects(i) {
            continue;
        }
        let Some((a, b)) = blocks.frame.block(i) else {
            continue;
        };
        let open = Interval::open(a, b)?;
        if open.intersects(interval) {
            return Ok(Some(format!("block {i}")));
        }
    }
    let exhausted = range.is_finite()
        && range
            .first
            .zip(range.last)
            .is_some_and(|(a, b)| ((b - a) as u64) < REGION_SCAN as u64);
    let empty_selector = match &blocks.selector {
        crate::order::Selector::Residues {
            classes, include, ..
        } => classes.is_empty() && include.is_empty(),
        crate::order::Selector::Finite { .. } => true,
        crate::order::Selector::Branch { .. } => false,
    };
    if exhausted || empty_selector {
        Ok(None)
    } else {
        Err(Error::Unsupported(
            "interval meets infinitely many blocks of an undecided selector".into(),
        ))
    }
}

impl MapDescriptor {
    pub fn finite(knots: Vec<(Rational, Rational)>) -> Result<Self> {
        Ok(MapDescriptor::Finite {
            pieces: FinitePl::from_knots(knots)?,
        })
    }

    pub fn periodic(period: Rational, pattern: FinitePl) -> Result<Self> {
        let d = MapDescriptor::Periodic { period, pattern };
        d.validate()?;
        Ok(d)
    }

    pub fn conjugate(inner: MapDescriptor, shift: Rational) -> Self {
        MapDescriptor::Conjugate {
            inner: Box::new(inner),
            shift,
        }
    }

    pub fn patched(parts: Vec<PatchPart>) -> Result<Self> {
        let d = MapDescriptor::Patched { parts };
        d.validate()?;
        Ok(d)
    }

    /// Checks the structural invariants of every variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            MapDescriptor::Identity | MapDescriptor::Finite { .. } => Ok(()),
            MapDescriptor::Periodic { period, pattern } => {
                if !period.is_positive() {
                    return Err(Error::InvalidDescriptor("period must be positive".into()));
                }
                if let Some((lo, hi)) = pattern.bounds() {
                    if lo.is_negative() || hi > *period {
                        return Err(Error::InvalidDescriptor(format!(
                            "pattern acts outside [0, {period}]"
                        )));
                    }
                }
                Ok(())
            }
            MapDescriptor::Conjugate { inner, .. } => inner.validate(),
            MapDescriptor::LazyBlock { frame, rule } => {
                rule.selector().validate()?;
                if let BlockRule::PingPongSegments { base, offset } = rule {
                    if !base.is_coterminal() {
                        return Err(Error::NotCoterminal);
                    }
                    if *frame != base.subsample(4, *offset)? {
                        return Err(Error::InvalidDescriptor(
                            "ping-pong frame must be every fourth point of its base".into(),
                        ));
                    }
                }
                Ok(())
            }
            MapDescriptor::Patched { parts } => {
                for (k, a) in parts.iter().enumerate() {
                    a.map.validate()?;
                    for b in &parts[k + 1..] {
                        if let Some(at) = a.region.overlap(&b.region)? {
                            return Err(Error::SupportOverlap(at));
                        }
                    }
                }
                Ok(())
            }
            MapDescriptor::Piecewise { segments } => {
                for s in segments {
                    s.map.validate()?;
                }
                check_segments(segments)
            }
            MapDescriptor::Composite { factors } => {
                factors.iter().try_for_each(|f| f.map.validate())
            }
        }
    }

    pub fn is_identity_descriptor(&self) -> bool {
        match self {
            MapDescriptor::Identity => true,
            MapDescriptor::Finite { pieces } => pieces.is_identity(),
            MapDescriptor::Periodic { pattern, .. } => pattern.is_identity(),
            MapDescriptor::Conjugate { inner, .. } => inner.is_identity_descriptor(),
            MapDescriptor::Patched { parts } => parts.iter().all(|p| p.map.is_identity_descriptor()),
            MapDescriptor::Composite { factors } => factors
                .iter()
                .all(|f| f.power == 0 || f.map.is_identity_descriptor()),
            _ => false,
        }
    }

    fn apply(&self, x: &Rational, inverse: bool) -> Result<Rational> {
        self.iterate(x, if inverse { -1 } else { 1 })
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        self.apply(x, false)
    }

    pub fn eval_inverse(&self, y: &Rational) -> Result<Rational> {
        self.apply(y, true)
    }

    /// `d^n(x)` for any integer `n`, exact.
    pub fn iterate(&self, x: &Rational, n: i64) -> Result<Rational> {
        if n == 0 {
            return Ok(x.clone());
        }
        match self {
            MapDescriptor::Identity => Ok(x.clone()),
            MapDescriptor::Finite { pieces } => Ok(pieces.iterate(x, n)),
            MapDescriptor::Periodic { period, pattern } => {
                let base = period * &Rational::from_bigint((x / period).floor());
                Ok(pattern.iterate(&(x - &base), n) + base)
            }
            MapDescriptor::Conjugate { inner, shift } => {
                Ok(inner.iterate(&(x - shift), n)? + shift.clone())
            }
            MapDescriptor::LazyBlock { frame, rule } => match frame.locate(x) {
                None => Ok(x.clone()),
                Some(i) => rule.block_map(frame, i)?.iterate(x, n),
            },
            MapDescriptor::Patched { parts } => match parts.iter().find(|p| p.region.contains(x)) {
                None => Ok(x.clone()),
                Some(p) => p.map.iterate(x, n),
            },
            MapDescriptor::Piecewise { segments } => {
                let mut x = x.clone();
                let inverse = n < 0;
                for _ in 0..n.unsigned_abs() {
                    let side = |s: &Segment| if inverse { s.to.clone() } else { s.from.clone() };
                    let Some(s) = segments.iter().find(|s| {
                        let [a, b] = side(s);
                        a <= x && x <= b
                    }) else {
                        return Ok(x);
                    };
                    x = if inverse {
                        s.map.eval_inverse(&x)?
                    } else {
                        s.map.eval(&x)?
                    };
                }
                Ok(x)
            }
            MapDescriptor::Composite { factors } => {
                let mut x = x.clone();
                for _ in 0..n.unsigned_abs() {
                    if n > 0 {
                        for f in factors.iter().rev() {
                            x = f.map.iterate(&x, f.power)?;
                        }
                    } else {
                        for f in factors {
                            x = f.map.iterate(&x, -f.power)?;
                        }
                    }
                }
                Ok(x)
            }
        }
    }

    fn image_directed(&self, j: &Interval, inverse: bool) -> Result<Interval> {
        let map = |p: Option<&Rational>| p.map(|v| self.apply(v, inverse)).transpose();
        Interval::new(map(j.lower())?, j.lower_closed(), map(j.upper())?, j.upper_closed())
    }

    /// Image of an interval; endpoints map to endpoints and keep their
    /// openness.
    pub fn image_of_interval(&self, j: &Interval) -> Result<Interval> {
        self.image_directed(j, false)
    }

    pub fn preimage_of_interval(&self, j: &Interval) -> Result<Interval> {
        self.image_directed(j, true)
    }

    /// Points of `window` where the map may fail to be affine. Between two
    /// consecutive listed points of a complete list the map is affine.
    pub fn breakpoints(&self, window: &Interval, limit: usize) -> Result<Breakpoints> {
        let mut out = Breakpoints::complete();
        match self {
            MapDescriptor::Identity => {}
            MapDescriptor::Finite { pieces } => out.points = pieces.breakpoints_in(window),
            MapDescriptor::Periodic { period, pattern } => {
                if pattern.is_identity() {
                    return Ok(out);
                }
                let (Some(lo), Some(hi)) = (window.lower(), window.upper()) else {
                    return Ok(Breakpoints {
                        points: Vec::new(),
                        complete: false,
                    });
                };
                let mut k = Rational::from_bigint((lo / period).floor());
                let end = Rational::from_bigint((hi / period).floor());
                let knots: Vec<Rational> = pattern.knots().iter().map(|k| k.0.clone()).collect();
                while k <= end {
                    let base = period * &k;
                    out.points.extend(
                        knots
                            .iter()
                            .map(|x| x + &base)
                            .filter(|x| window.contains(x)),
                    );
                    if out.points.len() > limit {
                        out.complete = false;
                        break;
                    }
                    k += &Rational::one();
                }
            }
            MapDescriptor::Conjugate { inner, shift } => {
                let mut inner_bp = inner.breakpoints(&window.translate(&-shift.clone()), limit)?;
                for p in &mut inner_bp.points {
                    *p += shift;
                }
                out = inner_bp;
            }
            MapDescriptor::LazyBlock { frame, rule } => {
                let (blocks, complete) = blocks_to_visit(frame, window, limit);
                out.complete = complete;
                for i in blocks {
                    let Some(block) = frame.block_interval(i) else {
                        continue;
                    };
                    let Some(cell) = block.intersection(window) else {
                        continue;
                    };
                    out.points.extend(
                        frame
                            .block(i)
                            .into_iter()
                            .flat_map(|(a, b)| [a, b])
                            .filter(|x| window.contains(x)),
                    );
                    out.absorb(rule.block_map(frame, i)?.breakpoints(&cell, limit)?);
                    if out.points.len() > limit {
                        out.complete = false;
                        break;
                    }
                }
            }
            MapDescriptor::Patched { parts } => {
                for p in parts {
                    let hull = p.region.hull();
                    let Some(cell) = hull.intersection(window) else {
                        continue;
                    };
                    out.points.extend(
                        [hull.lower(), hull.upper()]
                            .into_iter()
                            .flatten()
                            .filter(|x| window.contains(x))
                            .cloned(),
                    );
                    if let Region::Blocks { blocks } = &p.region {
                        let (idx, complete) = blocks_to_visit(&blocks.frame, &cell, limit);
                        out.complete &= complete;
                        for i in idx.into_iter().filter(|&i| blocks.selects(i)) {
                            if let Some((a, b)) = blocks.frame.block(i) {
                                out.points.extend([a, b].into_iter().filter(|x| window.contains(x)));
                            }
                        }
                    }
                    out.absorb(p.map.breakpoints(&cell, limit)?);
                }
            }
            MapDescriptor::Piecewise { segments } => {
                for s in segments {
                    let seg = Interval::closed(s.from[0].clone(), s.from[1].clone())?;
                    out.points.extend(s.from.iter().filter(|x| window.contains(x)).cloned());
                    if let Some(cell) = seg.intersection(window) {
                        out.absorb(s.map.breakpoints(&cell, limit)?);
                    }
                }
            }
            MapDescriptor::Composite { factors } => {
                out = composite_breakpoints(factors, window, limit)?;
            }
        }
        Ok(out.finish(limit))
    }

    /// Breakpoints of the inverse map inside `window`.
    fn inverse_breakpoints(&self, window: &Interval, limit: usize) -> Result<Breakpoints> {
        let pre = self.preimage_of_interval(window)?;
        let mut bp = self.breakpoints(&pre, limit)?;
        for p in &mut bp.points {
            *p = self.eval(p)?;
        }
        Ok(bp)
    }

    /// A translation period: `d(x + p) = d(x) + p` for all `x`.
    pub fn period(&self) -> Option<Rational> {
        if self.is_identity_descriptor() {
            return Some(Rational::one());
        }
        match self {
            MapDescriptor::Periodic { period, .. } => Some(period.clone()),
            MapDescriptor::Conjugate { inner, .. } => inner.period(),
            MapDescriptor::LazyBlock { frame, rule } => match rule {
                BlockRule::PingPongSegments { base, .. } => {
                    base.uniform_step().map(|s| s * Rational::from_integer(4))
                }
                BlockRule::BlockBasis {
                    select,
                    letter: super::rules::BasisLetter::Fixed { .. },
                    ..
                } if select.exceptions().is_empty() => {
                    let m = select.modulus()?;
                    frame.uniform_step().map(|s| s * Rational::from_integer(m as i64))
                }
                _ => None,
            },
            MapDescriptor::Composite { factors } => factors
                .iter()
                .map(|f| f.map.period())
                .try_fold(Rational::one(), |acc, p| p.map(|p| Rational::lcm(&acc, &p))),
            _ => None,
        }
    }

    /// An interval outside which the map is the identity; `None` when the
    /// descriptor is visibly the identity everywhere.
    pub fn support_hull(&self) -> Option<Interval> {
        if self.is_identity_descriptor() {
            return None;
        }
        match self {
            MapDescriptor::Finite { pieces } => {
                let (a, b) = pieces.bounds()?;
                Interval::open(a, b).ok()
            }
            MapDescriptor::Conjugate { inner, shift } => {
                inner.support_hull().map(|h| h.translate(shift))
            }
            MapDescriptor::LazyBlock { frame, rule } => match rule.selector() {
                Selector::Finite { indices } => {
                    let lo = frame.point(*indices.first()?)?;
                    let hi = frame.point(*indices.last()? + 1)?;
                    Interval::closed_open(lo, hi).ok()
                }
                _ => Some(frame.hull()),
            },
            MapDescriptor::Patched { parts } => parts
                .iter()
                .filter(|p| !p.map.is_identity_descriptor())
                .map(|p| p.region.hull())
                .reduce(|a, b| span_hull(&a, &b)),
            MapDescriptor::Piecewise { segments } => {
                let (first, last) = (segments.first()?, segments.last()?);
                Interval::open(first.from[0].clone(), last.from[1].clone()).ok()
            }
            MapDescriptor::Composite { factors } => factors
                .iter()
                .filter_map(|f| f.map.support_hull())
                .reduce(|a, b| span_hull(&a, &b)),
            _ => Some(Interval::all()),
        }
    }

    /// Regions the map declares it acts on. Used for symbolic disjointness
    /// when patching; never recomputed from evaluation.
    pub fn declared_regions(&self) -> Result<Vec<Region>> {
        Ok(match self {
            MapDescriptor::LazyBlock { frame, rule } => vec![Region::Blocks {
                blocks: BlockSet::new(frame.clone(), rule.selector())?,
            }],
            MapDescriptor::Patched { parts } => parts
                .iter()
                .filter(|p| !p.map.is_identity_descriptor())
                .map(|p| p.region.clone())
                .collect(),
            _ => self
                .support_hull()
                .map(|interval| Region::Interval { interval })
                .into_iter()
                .collect(),
        })
    }

    /// The finite map agreeing with `self` on `[lo, hi]`, which must be
    /// invariant with a complete breakpoint list.
    pub fn restrict_to(&self, lo: &Rational, hi: &Rational) -> Result<FinitePl> {
        let window = Interval::closed(lo.clone(), hi.clone())?;
        let bp = self.breakpoints(&window, 1 << 16)?;
        if !bp.complete {
            return Err(Error::Unsupported("window holds too many breakpoints".into()));
        }
        let mut xs = vec![lo.clone()];
        xs.extend(bp.points);
        xs.push(hi.clone());
        xs.sort();
        xs.dedup();
        let knots = xs
            .into_iter()
            .map(|x| self.eval(&x).map(|y| (x, y)))
            .collect::<Result<Vec<_>>>()?;
        FinitePl::from_knots(knots)
    }

    /// The periodic map that repeats `self` on `[lo, hi]` with period
    /// `hi - lo`.
    pub fn periodic_extension(&self, lo: &Rational, hi: &Rational) -> Result<MapDescriptor> {
        let cell = self.restrict_to(lo, hi)?;
        let shifted = cell
            .knots()
            .iter()
            .map(|(x, y)| (x - lo, y - lo))
            .collect::<Vec<_>>();
        let pattern = if shifted.is_empty() {
            FinitePl::identity()
        } else {
            FinitePl::from_knots(shifted)?
        };
        let periodic = MapDescriptor::periodic(hi - lo, pattern)?;
        Ok(if lo.is_zero() {
            periodic
        } else {
            MapDescriptor::conjugate(periodic, lo.clone())
        })
    }
}

fn composite_breakpoints(factors: &[Factor], window: &Interval, limit: usize) -> Result<Breakpoints> {
    // application order, one step per unit power
    let mut steps: Vec<(&MapDescriptor, bool)> = Vec::new();
    for f in factors.iter().rev() {
        let n = f.power.unsigned_abs().min(limit as u64);
        if f.power.unsigned_abs() > limit as u64 {
            return Ok(Breakpoints {
                points: Vec::new(),
                complete: false,
            });
        }
        steps.extend(std::iter::repeat_n((&f.map, f.power < 0), n as usize));
    }
    let mut out = Breakpoints::complete();
    let mut cur = window.clone();
    for (k, (map, inverse)) in steps.iter().enumerate() {
        let local = if *inverse {
            map.inverse_breakpoints(&cur, limit)?
        } else {
            map.breakpoints(&cur, limit)?
        };
        out.complete &= local.complete;
        for y in local.points {
            let mut x = y;
            for (m, inv) in steps[..k].iter().rev() {
                x = m.apply(&x, !inv)?;
            }
            out.points.push(x);
        }
        if out.points.len() > limit {
            out.complete = false;
            break;
        }
        cur = map.image_directed(&cur, *inverse)?;
    }
    Ok(out)
}

fn check_segments(segments: &[Segment]) -> Result<()> {
    for s in segments {
        if s.from[0] >= s.from[1] || s.to[0] >= s.to[1] {
            return Err(Error::PatchTiling(format!(
                "segment [{}, {}] is degenerate",
                s.from[0], s.from[1]
            )));
        }
        for k in 0..2 {
            let image = s.map.eval(&s.from[k])?;
            if image != s.to[k] {
                return Err(Error::PatchTiling(format!(
                    "map sends {} to {}, not {}",
                    s.from[k], image, s.to[k]
                )));
            }
        }
    }
    for w in segments.windows(2) {
        if w[0].from[1] != w[1].from[0] {
            return Err(Error::PatchTiling(format!(
                "gap or overlap between {} and {}",
                w[0].from[1], w[1].from[0]
            )));
        }
        if w[0].to[1] != w[1].to[0] {
            return Err(Error::PatchTiling(format!(
                "endpoint images disagree at {}: {} vs {}",
                w[0].from[1], w[0].to[1], w[1].to[0]
            )));
        }
    }
    if let (Some(first), Some(last)) = (segments.first(), segments.last()) {
        if first.to[0] != first.from[0] || last.to[1] != last.from[1] {
            return Err(Error::PatchTiling(
                "the outer endpoints of the region must be fixed".into(),
            ));
        }
    }
    Ok(())
}

/// Glues maps `g_i` defined on consecutive closed segments `[a_i, a_{i+1}]`
/// tiling the bounded region `S` into one map, the identity outside `S`.
pub fn piecewise_patch(
    segments: Vec<(Interval, MapDescriptor)>,
    region: &Interval,
) -> Result<MapDescriptor> {
    let (Some(lo), Some(hi)) = (region.lower(), region.upper()) else {
        return Err(Error::PatchTiling("region must be bounded".into()));
    };
    let mut segs = Vec::with_capacity(segments.len());
    for (interval, map) in segments {
        let (Some(a), Some(b)) = (interval.lower(), interval.upper()) else {
            return Err(Error::PatchTiling(format!("segment {interval} is unbounded")));
        };
        let to = [map.eval(a)?, map.eval(b)?];
        segs.push(Segment {
            from: [a.clone(), b.clone()],
            to,
            map,
        });
    }
    match (segs.first(), segs.last()) {
        (Some(first), Some(last)) if first.from[0] == *lo && last.from[1] == *hi => {}
        _ => {
            return Err(Error::PatchTiling(format!(
                "segments do not start at {lo} and end at {hi}"
            )))
        }
    }
    check_segments(&segs)?;
    Ok(MapDescriptor::Piecewise { segments: segs })
}

/// Combines maps with pairwise disjoint declared supports; each acts on its
/// own regions and the result is the identity elsewhere.
pub fn disjoint_patch(parts: Vec<MapDescriptor>) -> Result<MapDescriptor> {
    let mut patch = Vec::new();
    for map in parts {
        for region in map.declared_regions()? {
            patch.push(PatchPart {
                region,
                map: map.clone(),
            });
        }
    }
    if patch.is_empty() {
        return Ok(MapDescriptor::Identity);
    }
    MapDescriptor::patched(patch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{q, Selector};

    pub(crate) fn example_f() -> MapDescriptor {
        let pattern = FinitePl::from_knots(vec![
            (q(0, 1), q(0, 1)),
            (q(1, 1), q(13, 4)),
            (q(2, 1), q(7, 2)),
            (q(3, 1), q(15, 4)),
            (q(4, 1), q(4, 1)),
        ])
        .unwrap();
        MapDescriptor::periodic(q(4, 1), pattern).unwrap()
    }

    fn example_g() -> MapDescriptor {
        MapDescriptor::conjugate(example_f(), q(2, 1))
    }

    fn iv(a: Rational, b: Rational) -> Interval {
        Interval::closed_open(a, b).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = example_f();
        assert_eq!(f.eval(&q(1, 1)).unwrap(), q(13, 4));
        assert_eq!(f.eval(&q(1, 2)).unwrap(), q(13, 8));
        assert_eq!(example_g().eval(&q(5, 2)).unwrap(), q(29, 8));
        assert_eq!(MapDescriptor::Identity.eval(&q(7, 3)).unwrap(), q(7, 3));
        assert_eq!(f.eval(&q(-7, 2)).unwrap(), q(13, 8) - q(4, 1));
    }

    #[test]
    fn inverse_examples() {
        let f = example_f();
        assert_eq!(f.eval_inverse(&q(13, 4)).unwrap(), q(1, 1));
        assert_eq!(f.eval_inverse(&q(13, 8)).unwrap(), q(1, 2));
        assert_eq!(MapDescriptor::Identity.eval_inverse(&q(0, 1)).unwrap(), q(0, 1));
    }

    #[test]
    fn image_examples() {
        let f = example_f();
        assert_eq!(
            f.image_of_interval(&iv(q(0, 1), q(1, 1))).unwrap(),
            iv(q(0, 1), q(13, 4))
        );
        assert_eq!(
            f.image_of_interval(&iv(q(3, 1), q(4, 1))).unwrap(),
            iv(q(15, 4), q(4, 1))
        );
        assert_eq!(
            MapDescriptor::Identity.image_of_interval(&iv(q(2, 1), q(3, 1))).unwrap(),
            iv(q(2, 1), q(3, 1))
        );
    }

    #[test]
    fn piecewise_patch_builds_the_periodic_shape() {
        let s1 = MapDescriptor::finite(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(3, 1)), (q(4, 1), q(4, 1))])
            .unwrap();
        let parts = vec![
            (Interval::closed(q(0, 1), q(1, 1)).unwrap(), s1.clone()),
            (Interval::closed(q(1, 1), q(4, 1)).unwrap(), s1),
        ];
        let patched = piecewise_patch(parts, &Interval::closed(q(0, 1), q(4, 1)).unwrap()).unwrap();
        let periodic = patched.periodic_extension(&q(0, 1), &q(4, 1)).unwrap();
        // direct block formulas: [4k, 4k+1] -> [4k, 4k+3], [4k+1, 4k+4] -> [4k+3, 4k+4]
        for n in -40..40 {
            let x = q(n, 5);
            let k = Rational::from_bigint((&x / &q(4, 1)).floor()) * q(4, 1);
            let r = &x - &k;
            let want = if r <= q(1, 1) {
                r * q(3, 1) + k
            } else {
                q(3, 1) + (r - q(1, 1)) * q(1, 3) + k
            };
            assert_eq!(periodic.eval(&x).unwrap(), want);
        }
        // against Example f: same block endpoints 0, 4 and same orientation
        let f = example_f();
        for x in [q(0, 1), q(4, 1)] {
            assert_eq!(periodic.eval(&x).unwrap(), f.eval(&x).unwrap());
        }
    }

    #[test]
    fn piecewise_patch_identity_and_mismatch() {
        let id = piecewise_patch(
            vec![(Interval::closed(q(0, 1), q(2, 1)).unwrap(), MapDescriptor::Identity)],
            &Interval::closed(q(0, 1), q(2, 1)).unwrap(),
        )
        .unwrap();
        for n in -5..15 {
            assert_eq!(id.eval(&q(n, 4)).unwrap(), q(n, 4));
        }
        let up = MapDescriptor::finite(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(3, 2)), (q(2, 1), q(2, 1))])
            .unwrap();
        let err = piecewise_patch(
            vec![
                (Interval::closed(q(0, 1), q(1, 1)).unwrap(), up),
                (Interval::closed(q(1, 1), q(2, 1)).unwrap(), MapDescriptor::Identity),
            ],
            &Interval::closed(q(0, 1), q(2, 1)).unwrap(),
        );
        assert!(matches!(err, Err(Error::PatchTiling(_))));
    }

    #[test]
    fn disjoint_patch_examples() {
        let a = MapDescriptor::finite(vec![(q(0, 1), q(0, 1)), (q(1, 2), q(3, 4)), (q(1, 1), q(1, 1))])
            .unwrap();
        let b = MapDescriptor::conjugate(a.clone(), q(2, 1));
        let both = disjoint_patch(vec![a.clone(), b.clone()]).unwrap();
        for n in -8..32 {
            let x = q(n, 8);
            let want = if x > q(0, 1) && x < q(1, 1) {
                a.eval(&x).unwrap()
            } else if x > q(2, 1) && x < q(3, 1) {
                b.eval(&x).unwrap()
            } else {
                x.clone()
            };
            assert_eq!(both.eval(&x).unwrap(), want);
        }
        assert_eq!(disjoint_patch(vec![]).unwrap(), MapDescriptor::Identity);
        assert!(matches!(
            disjoint_patch(vec![a.clone(), a]),
            Err(Error::SupportOverlap(_))
        ));
    }

    #[test]
    fn block_regions_are_checked_symbolically() {
        let part = |class| {
            let blocks = BlockSet::residue(Frame::unit(), 4, class).unwrap();
            PatchPart {
                region: Region::Blocks { blocks },
                map: MapDescriptor::Identity,
            }
        };
        assert!(MapDescriptor::patched(vec![part(0), part(3)]).is_ok());
        assert!(MapDescriptor::patched(vec![part(1), part(1)]).is_err());
        let interval = PatchPart {
            region: Region::Interval {
                interval: Interval::open(q(1, 2), q(3, 4)).unwrap(),
            },
            map: MapDescriptor::Identity,
        };
        assert!(MapDescriptor::patched(vec![part(0), interval.clone()]).is_err());
        assert!(MapDescriptor::patched(vec![part(1), interval]).is_ok());
        let all = BlockSet::new(Frame::unit(), Selector::all()).unwrap();
        let tail = PatchPart {
            region: Region::Blocks { blocks: all },
            map: MapDescriptor::Identity,
        };
        let far = PatchPart {
            region: Region::Interval {
                interval: Interval::at_least(q(0, 1)),
            },
            map: MapDescriptor::Identity,
        };
        assert!(MapDescriptor::patched(vec![tail, far]).is_err());
    }

    #[test]
    fn periodic_breakpoints_are_complete() {
        let f = example_f();
        let bp = f.breakpoints(&Interval::closed(q(0, 1), q(8, 1)).unwrap(), 100).unwrap();
        assert!(bp.complete);
        let want: Vec<Rational> = [0, 1, 4, 5, 8].iter().map(|&n| q(n, 1)).collect();
        assert_eq!(bp.points, want);
    }

    #[test]
    fn composite_evaluates_right_to_left() {
        let f = example_f();
        let g = example_g();
        let w = MapDescriptor::Composite {
            factors: vec![
                Factor { map: f.clone(), power: -1 },
                Factor { map: g.clone(), power: 1 },
            ],
        };
        let x = q(7, 3);
        let want = f.eval_inverse(&g.eval(&x).unwrap()).unwrap();
        assert_eq!(w.eval(&x).unwrap(), want);
        assert_eq!(w.eval_inverse(&want).unwrap(), x);
    }

    #[test]
    fn composite_breakpoints_pull_back() {
        let f = example_f();
        let g = example_g();
        let w = MapDescriptor::Composite {
            factors: vec![Factor { map: g, power: 1 }, Factor { map: f.clone(), power: 1 }],
        };
        let window = Interval::closed(q(0, 1), q(4, 1)).unwrap();
        let bp = w.breakpoints(&window, 1000).unwrap();
        assert!(bp.complete);
        // between consecutive breakpoints the composite is affine
        let mut cuts = vec![q(0, 1)];
        cuts.extend(bp.points.iter().cloned());
        cuts.push(q(4, 1));
        cuts.dedup();
        for c in cuts.windows(2) {
            let (a, b) = (&c[0], &c[1]);
            let m = Rational::midpoint(a, b);
            let (ya, yb, ym) = (w.eval(a).unwrap(), w.eval(b).unwrap(), w.eval(&m).unwrap());
            assert_eq!(ym, Rational::midpoint(&ya, &yb));
        }
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let f = example_f();
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.starts_with(
            r#"{"type":"periodic","period":"4/1","pattern":[{"from":["0/1","1/1"],"to":["0/1","13/4"]}"#
        ));
        let back: MapDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        let g = example_g();
        let back: MapDescriptor = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rational() -> impl Strategy<Value = Rational> {
            (-400i64..400, 1i64..50).prop_map(|(n, d)| q(n, d))
        }

        fn corpus() -> Vec<MapDescriptor> {
            let f = example_f();
            let g = example_g();
            vec![
                MapDescriptor::Identity,
                f.clone(),
                g.clone(),
                MapDescriptor::Composite {
                    factors: vec![
                        Factor { map: f.clone(), power: 2 },
                        Factor { map: g.clone(), power: -1 },
                    ],
                },
                disjoint_patch(vec![MapDescriptor::finite(vec![
                    (q(0, 1), q(0, 1)),
                    (q(1, 3), q(2, 3)),
                    (q(1, 1), q(1, 1)),
                ])
                .unwrap()])
                .unwrap(),
            ]
        }

        proptest! {
            #[test]
            fn strictly_monotone(x in rational(), y in rational()) {
                prop_assume!(x < y);
                for d in corpus() {
                    prop_assert!(d.eval(&x).unwrap() < d.eval(&y).unwrap());
                }
            }

            #[test]
            fn inverse_undoes_eval(x in rational()) {
                for d in corpus() {
                    prop_assert_eq!(d.eval_inverse(&d.eval(&x).unwrap()).unwrap(), x.clone());
                    prop_assert_eq!(d.eval(&d.eval_inverse(&x).unwrap()).unwrap(), x.clone());
                }
            }

            #[test]
            fn periodicity(x in rational()) {
                let f = example_f();
                prop_assert_eq!(f.eval(&(&x + &q(4, 1))).unwrap(), f.eval(&x).unwrap() + q(4, 1));
            }

            #[test]
            fn image_contains_images(a in rational(), len in 1i64..40, t in 0i64..=16) {
                let b = &a + &q(len, 7);
                let j = Interval::closed_open(a.clone(), b.clone()).unwrap();
                let x = Rational::lerp(&a, &b, &q(t, 17));
                for d in corpus() {
                    let image = d.image_of_interval(&j).unwrap();
                    prop_assert!(image.contains(&d.eval(&x).unwrap()));
                    prop_assert_eq!(image.lower(), Some(&d.eval(&a).unwrap()));
                }
            }
        }
    }
}
