use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::action::{eval_word, Action};
use super::word::Word;
use crate::error::{Error, Result};
use crate::order::{Interval, Rational};
use crate::par::Exec;

/// Search limits for moved-point witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Windows (or refinement rounds, inside a fixed window) to try.
    pub max_windows: usize,
    /// Largest denominator of the grid `lo + (hi - lo) k/m` per window.
    pub grid_density: usize,
    /// Breakpoint hints taken from the letters before the grid.
    pub hint_cap: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_windows: 16,
            grid_density: 48,
            hint_cap: 256,
        }
    }
}

/// A point the word provably moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Rational,
    pub image: Rational,
    pub window: Interval,
    pub candidates_tried: usize,
}

impl Witness {
    /// Re-evaluates the word at the witness point.
    pub fn verify(&self, a: &Action, w: &Word) -> Result<bool> {
        let y = eval_word(a, w, &self.point)?;
        Ok(y == self.image && y != self.point)
    }
}

/// Breakpoints of the letters, midpoints between them, then the Farey-style
/// grid of `window` up to denominator `density`.
fn candidates(a: &Action, w: &Word, window: &Interval, density: usize, hint_cap: usize) -> Result<Vec<Rational>> {
    let (Some(lo), Some(hi)) = (window.lower(), window.upper()) else {
        return Err(Error::Precondition("search window must be bounded".into()));
    };
    let mut hints = Vec::new();
    for g in w.generators() {
        let bp = a.get(&g)?.breakpoints(window, hint_cap)?;
        hints.extend(bp.points);
    }
    hints.sort();
    hints.dedup();
    hints.truncate(hint_cap);
    let mut out: Vec<Rational> = hints.clone();
    out.extend(hints.windows(2).map(|p| Rational::midpoint(&p[0], &p[1])));
    for m in 2..=density.max(2) as i64 {
        for k in 1..m {
            if k.gcd(&m) == 1 {
                out.push(Rational::lerp(lo, hi, &Rational::new(k, m)));
            }
        }
    }
    out.retain(|x| window.contains(x));
    Ok(out)
}

fn scan(a: &Action, w: &Word, points: &[Rational], exec: Exec) -> Result<Option<(Rational, Rational)>> {
    let hit = exec.find_map_first(points, |x| match eval_word(a, w, x) {
        Ok(y) if y == *x => None,
        Ok(y) => Some(Ok((x.clone(), y))),
        Err(e) => Some(Err(e)),
    });
    hit.transpose()
}

fn check_word(a: &Action, w: &Word) -> Result<()> {
    if w.is_empty() || w.reduce().is_empty() {
        return Err(Error::EmptyWord);
    }
    a.check_bound(w)
}

/// Searches one bounded window, refining the grid each round.
pub fn search_within(a: &Action, w: &Word, window: &Interval, budget: &Budget, exec: Exec) -> Result<Witness> {
    check_word(a, w)?;
    let mut tried = 0usize;
    for round in 0..budget.max_windows.max(1) {
        let density = budget.grid_density * (round + 1);
        let hints = if round == 0 { budget.hint_cap } else { 0 };
        let points = candidates(a, w, window, density, hints)?;
        if let Some((point, image)) = scan(a, w, &points, exec)? {
            let found = Witness {
                point,
                image,
                window: window.clone(),
                candidates_tried: tried + points.len(),
            };
            debug_assert!(found.verify(a, w).unwrap_or(false));
            return Ok(found);
        }
        tried += points.len();
    }
    Err(Error::Exhausted(tried))
}

/// Windows `[-1, 1]`, then `[1, 2]`, `[-2, -1]`, `[2, 4]`, `[-4, -2]`, ...
/// scaled and centred on `hull` when the letters have bounded support.
fn windows(hull: Option<&Interval>, count: usize) -> Vec<Interval> {
    if let Some(h) = hull {
        if let (Some(lo), Some(hi)) = (h.lower(), h.upper()) {
            let cl = Interval::closed(lo.clone(), hi.clone()).expect("bounded hull");
            return vec![cl; count];
        }
    }
    let mut out = vec![Interval::closed(Rational::from_integer(-1), Rational::one()).expect("valid")];
    let mut r = 1i64;
    while out.len() < count {
        let (a, b) = (Rational::from_integer(r), Rational::from_integer(2 * r));
        out.push(Interval::closed(a.clone(), b.clone()).expect("valid"));
        out.push(Interval::closed(-b, -a).expect("valid"));
        r = r.saturating_mul(2);
    }
    out.truncate(count);
    out
}

/// A verified point moved by `w`, or `Exhausted` when the budget runs out.
/// Exhaustion says nothing about whether `w` acts trivially.
pub fn nontriviality_witness(a: &Action, w: &Word, budget: &Budget) -> Result<Witness> {
    nontriviality_witness_with(a, w, budget, Exec::default())
}

pub fn nontriviality_witness_with(a: &Action, w: &Word, budget: &Budget, exec: Exec) -> Result<Witness> {
    check_word(a, w)?;
    let hull = a.support_hull(w)?;
    let Some(hull) = hull else {
        return Err(Error::Exhausted(0));
    };
    let bounded = hull.is_bounded();
    let mut tried = 0usize;
    for (k, window) in windows(Some(&hull), budget.max_windows).iter().enumerate() {
        let density = if bounded {
            budget.grid_density * (k + 1)
        } else {
            budget.grid_density
        };
        let hints = if bounded && k > 0 { 0 } else { budget.hint_cap };
        let points = candidates(a, w, window, density, hints)?;
        if let Some((point, image)) = scan(a, w, &points, exec)? {
            return Ok(Witness {
                point,
                image,
                window: window.clone(),
                candidates_tried: tried + points.len(),
            });
        }
        tried += points.len();
    }
    Err(Error::Exhausted(tried))
}

/// Witnesses for a batch of words, in input order.
pub fn witness_corpus(a: &Action, words: &[Word], budget: &Budget, exec: Exec) -> Vec<Result<Witness>> {
    // the outer batch carries the parallelism; each search runs sequentially
    exec.map(words, |w| nontriviality_witness_with(a, w, budget, Exec::Sequential))
}
