//! Words in dichotomic observables: each letter is a Hermitian involution
//! `X² = 1`, letters of different parties commute and letters of one party
//! do not. The canonical form sorts letters into party blocks (stably, so
//! the order inside a block is kept) and cancels adjacent equal letters.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub party: u8,
    pub setting: u8,
}

impl Letter {
    pub fn new(party: usize, setting: usize) -> Letter {
        Letter {
            party: party as u8,
            setting: setting as u8,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", party_name(self.party as usize), self.setting)
    }
}

/// `A`, `B`, ... for the first 26 parties, then `P26`, `P27`, ...
pub fn party_name(p: usize) -> String {
    if p < 26 {
        ((b'A' + p as u8) as char).to_string()
    } else {
        format!("P{p}")
    }
}

/// A word kept in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Canonical form of an arbitrary letter sequence.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut v: Vec<Letter> = letters.into_iter().collect();
        v.sort_by_key(|l| l.party);
        let mut out: Vec<Letter> = Vec::with_capacity(v.len());
        for l in v {
            if out.last() == Some(&l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(&other.0).copied())
    }

    /// Formal adjoint: letters are self-adjoint, so this reverses the word.
    pub fn adjoint(&self) -> Word {
        Word::from_letters(self.0.iter().rev().copied())
    }

    /// Parties occurring in the word, ascending.
    pub fn parties(&self) -> Vec<u8> {
        let mut p: Vec<u8> = self.0.iter().map(|l| l.party).collect();
        p.dedup();
        p
    }

    /// Representative of `{w, w*}`; real moment matrices cannot tell them
    /// apart.
    pub fn real_key(&self) -> Word {
        let adj = self.adjoint();
        if adj < *self {
            adj
        } else {
            self.clone()
        }
    }

    /// Parses concatenated letters such as `A0B1A1`; `1` or an empty string
    /// is the identity.
    pub fn parse(text: &str) -> Result<Word> {
        let t = text.trim();
        if t.is_empty() || t == "1" {
            return Ok(Word::identity());
        }
        let bytes = t.as_bytes();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if !c.is_ascii_uppercase() || i + 1 >= bytes.len() || !bytes[i + 1].is_ascii_digit() {
                return Err(Error::Parse(format!("bad word {text:?}")));
            }
            letters.push(Letter::new((c - b'A') as usize, (bytes[i + 1] - b'0') as usize));
            i += 2;
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn involution_and_commutation() {
        assert_eq!(w("A0A0"), Word::identity());
        assert_eq!(w("A0B0"), w("B0A0"));
        assert_eq!(w("A0A1").mul(&w("A1A0")), Word::identity());
        assert_ne!(w("A0A1"), w("A1A0"));
        assert_eq!(w("B1A0B1A1").to_string(), "A0A1");
        assert_eq!(w("C0A1B0C1").to_string(), "A1B0C0C1");
    }

    #[test]
    fn adjoint_reverses_blocks() {
        assert_eq!(w("A0A1B0").adjoint(), w("A1A0B0"));
        assert_eq!(w("A0A1B0").real_key(), w("A0A1B0"));
        assert_eq!(w("A1A0B0").real_key(), w("A0A1B0"));
    }

    #[test]
    fn parse_errors() {
        assert!(Word::parse("a0").is_err());
        assert!(Word::parse("A").is_err());
        assert_eq!(Word::parse("1").unwrap(), Word::identity());
    }
}
