use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::word::{GeneratorId, Letter, Word};
use crate::error::{Error, Result};
use crate::order::{Interval, Rational};
use crate::plmap::MapDescriptor;

/// Generators bound to descriptors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub alphabet: BTreeMap<GeneratorId, MapDescriptor>,
}

impl Action {
    pub fn new() -> Self {
        Action::default()
    }

    pub fn bind(mut self, gen: GeneratorId, map: MapDescriptor) -> Self {
        self.alphabet.insert(gen, map);
        self
    }

    pub fn get(&self, gen: &GeneratorId) -> Result<&MapDescriptor> {
        self.alphabet
            .get(gen)
            .ok_or_else(|| Error::Unbound(gen.to_string()))
    }

    pub fn generators(&self) -> Vec<GeneratorId> {
        self.alphabet.keys().cloned().collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.alphabet.values().try_for_each(MapDescriptor::validate)
    }

    /// Fails on the first unbound letter.
    pub fn check_bound(&self, w: &Word) -> Result<()> {
        w.letters().iter().try_for_each(|l| self.get(&l.gen).map(|_| ()))
    }

    /// Smallest interval outside which every generator in `w` is the
    /// identity; `None` when all of them are visibly trivial.
    pub fn support_hull(&self, w: &Word) -> Result<Option<Interval>> {
        let mut hull: Option<Interval> = None;
        for g in w.generators() {
            if let Some(h) = self.get(&g)?.support_hull() {
                hull = Some(match hull {
                    None => h,
                    Some(prev) => crate::plmap::span_hull(&prev, &h),
                });
            }
        }
        Ok(hull)
    }
}

/// Applies the word right to left: the last letter acts first.
pub fn eval_word(a: &Action, w: &Word, x: &Rational) -> Result<Rational> {
    let mut y = x.clone();
    for l in w.letters().iter().rev() {
        let d = a.get(&l.gen)?;
        y = if l.inverse { d.eval_inverse(&y)? } else { d.eval(&y)? };
    }
    Ok(y)
}

/// Number of reduced words of length `n` over `k` generators.
fn reduced_count(k: usize, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        2.0 * k as f64 * ((2 * k - 1) as f64).powi(n as i32 - 1)
    }
}

/// A reduced word drawn uniformly from all nonempty reduced words of length
/// at most `max_len` over `gens`.
pub fn sample_reduced_word<R: Rng + ?Sized>(rng: &mut R, gens: &[GeneratorId], max_len: usize) -> Word {
    assert!(!gens.is_empty() && max_len > 0, "need generators and a positive length");
    let k = gens.len();
    let weights: Vec<f64> = (1..=max_len).map(|n| reduced_count(k, n)).collect();
    let total: f64 = weights.iter().sum();
    let mut t = rng.gen::<f64>() * total;
    let mut len = max_len;
    for (i, w) in weights.iter().enumerate() {
        if t < *w {
            len = i + 1;
            break;
        }
        t -= w;
    }
    let letter = |i: usize| {
        let l = Letter::new(gens[i / 2].clone());
        if i % 2 == 1 {
            l.inv()
        } else {
            l
        }
    };
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let choices = if letters.is_empty() { 2 * k } else { 2 * k - 1 };
        let mut i = rng.gen_range(0..choices);
        if let Some(prev) = letters.last() {
            // skip the one letter that would cancel
            let banned = gens.iter().position(|g| *g == prev.gen).expect("known generator") * 2
                + usize::from(!prev.inverse);
            if i >= banned {
                i += 1;
            }
        }
        letters.push(letter(i));
    }
    Word::from_letters(letters)
}
