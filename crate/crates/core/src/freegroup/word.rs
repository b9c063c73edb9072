use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::adfam::Branch;
use crate::error::{Error, Result};

/// Optional index attached to a generator name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GenIndex {
    Nat(u64),
    Branch(Branch),
}

/// `name`, `name#7` or `name#01(0)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorId {
    pub name: String,
    pub index: Option<GenIndex>,
}

impl GeneratorId {
    pub fn named(name: &str) -> Self {
        GeneratorId {
            name: name.to_string(),
            index: None,
        }
    }

    pub fn indexed(name: &str, index: u64) -> Self {
        GeneratorId {
            name: name.to_string(),
            index: Some(GenIndex::Nat(index)),
        }
    }

    pub fn branch(name: &str, branch: Branch) -> Self {
        GeneratorId {
            name: name.to_string(),
            index: Some(GenIndex::Branch(branch)),
        }
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        match &self.index {
            None => Ok(()),
            Some(GenIndex::Nat(n)) => write!(f, "#{n}"),
            Some(GenIndex::Branch(b)) => write!(f, "#{b}"),
        }
    }
}

impl fmt::Debug for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GeneratorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, index) = match s.split_once('#') {
            Some((n, i)) => (n, Some(i)),
            None => (s, None),
        };
        let mut chars = name.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::Parse(format!("bad generator name `{s}`")));
        }
        let index = match index {
            None => None,
            Some(i) if !i.is_empty() && i.bytes().all(|b| b.is_ascii_digit()) => Some(GenIndex::Nat(
                i.parse().map_err(|_| Error::Parse(format!("index out of range in `{s}`")))?,
            )),
            Some(i) => Some(GenIndex::Branch(i.parse()?)),
        };
        Ok(GeneratorId {
            name: name.to_string(),
            index,
        })
    }
}

impl Serialize for GeneratorId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GeneratorId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A generator raised to `+1` or `-1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawLetter", into = "RawLetter")]
pub struct Letter {
    pub gen: GeneratorId,
    pub inverse: bool,
}

#[derive(Serialize, Deserialize)]
struct RawLetter {
    gen: GeneratorId,
    exp: i8,
}

impl TryFrom<RawLetter> for Letter {
    type Error = Error;
    fn try_from(raw: RawLetter) -> Result<Self> {
        match raw.exp {
            1 => Ok(Letter::new(raw.gen)),
            -1 => Ok(Letter::new(raw.gen).inv()),
            e => Err(Error::Parse(format!("exponent must be 1 or -1, got {e}"))),
        }
    }
}

impl From<Letter> for RawLetter {
    fn from(l: Letter) -> Self {
        RawLetter {
            exp: l.exp(),
            gen: l.gen,
        }
    }
}

impl Letter {
    pub fn new(gen: GeneratorId) -> Self {
        Letter {
            gen,
            inverse: false,
        }
    }

    pub fn inv(&self) -> Letter {
        Letter {
            gen: self.gen.clone(),
            inverse: !self.inverse,
        }
    }

    pub fn exp(&self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gen)?;
        if self.inverse {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// A word in generators and their inverses, read left to right.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letter(gen: GeneratorId) -> Self {
        Word {
            letters: vec![Letter::new(gen)],
        }
    }

    /// `gen^n` spelled out.
    pub fn power(gen: &GeneratorId, n: i64) -> Self {
        let l = Letter::new(gen.clone());
        let l = if n < 0 { l.inv() } else { l };
        Word {
            letters: vec![l; n.unsigned_abs() as usize],
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].cancels(&w[1]))
    }

    /// Free reduction with a stack; the result is the unique reduced word
    /// equal to `self` in the free group.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            if out.last().is_some_and(|top| top.cancels(l)) {
                out.pop();
            } else {
                out.push(l.clone());
            }
        }
        Word { letters: out }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inv).collect(),
        }
    }

    /// Concatenation, not reduced.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }

    /// `[u, v] = u v u^-1 v^-1`, not reduced.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    /// Distinct generators in order of first appearance.
    pub fn generators(&self) -> Vec<GeneratorId> {
        let mut out: Vec<GeneratorId> = Vec::new();
        for l in &self.letters {
            if !out.contains(&l.gen) {
                out.push(l.gen.clone());
            }
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Whitespace-separated letters `name[#index][^-1]`.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .split_whitespace()
            .map(|tok| {
                let (g, inverse) = match tok.strip_suffix("^-1") {
                    Some(g) => (g, true),
                    None => (tok.strip_suffix("^1").unwrap_or(tok), false),
                };
                Ok(Letter {
                    gen: g.parse()?,
                    inverse,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { letters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("f f^-1").reduce(), Word::empty());
        assert_eq!(w("f g g^-1 f").reduce(), w("f f"));
        assert_eq!(w("f g f^-1").reduce(), w("f g f^-1"));
        assert!(w("f g f^-1").is_reduced());
        assert!(!w("a b b^-1").is_reduced());
    }

    #[test]
    fn text_roundtrip() {
        for s in ["f g^-1 f", "g#3 h#01(0)^-1", "", "x_1"] {
            assert_eq!(w(s).to_string(), s);
        }
        assert_eq!(w("f^1"), w("f"));
        assert!("f^2".parse::<Word>().is_err());
        assert!("3f".parse::<Word>().is_err());
        assert!("f#".parse::<Word>().is_err());
    }

    #[test]
    fn json_form() {
        let json = serde_json::to_string(&w("f g^-1")).unwrap();
        assert_eq!(json, r#"[{"gen":"f","exp":1},{"gen":"g","exp":-1}]"#);
        assert_eq!(serde_json::from_str::<Word>(&json).unwrap(), w("f g^-1"));
        assert!(serde_json::from_str::<Word>(r#"[{"gen":"f","exp":2}]"#).is_err());
    }

    #[test]
    fn commutator_shape() {
        let c = Word::commutator(&w("f"), &w("g"));
        assert_eq!(c, w("f g f^-1 g^-1"));
        assert_eq!(c.generators(), vec![GeneratorId::named("f"), GeneratorId::named("g")]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn word() -> impl Strategy<Value = Word> {
            proptest::collection::vec((0u8..3, any::<bool>()), 0..24).prop_map(|ls| {
                Word::from_letters(
                    ls.into_iter()
                        .map(|(g, inverse)| Letter {
                            gen: GeneratorId::named(["a", "b", "c"][g as usize]),
                            inverse,
                        })
                        .collect(),
                )
            })
        }

        proptest! {
            #[test]
            fn reduce_is_idempotent(u in word()) {
                let r = u.reduce();
                prop_assert!(r.is_reduced());
                prop_assert_eq!(r.reduce(), r);
            }

            #[test]
            fn inverse_cancels(u in word(), v in word()) {
                prop_assert!(u.concat(&u.inverse()).reduce().is_empty());
                prop_assert_eq!(u.concat(&u.inverse()).concat(&v).reduce(), v.reduce());
            }
        }
    }
}
