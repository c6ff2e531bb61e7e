use std::fmt;
use std::str::FromStr;

use crate::{Error, Mobius, Result};

/// Generator letter; lowercase is the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Self {
        match self {
            Self::A => Self::AInv,
            Self::AInv => Self::A,
            Self::B => Self::BInv,
            Self::BInv => Self::B,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn matrix(self, a: &Mobius, b: &Mobius) -> Mobius {
        match self {
            Self::A => *a,
            Self::AInv => a.inverse(),
            Self::B => *b,
            Self::BInv => b.inverse(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Self::A => 'A',
            Self::AInv => 'a',
            Self::B => 'B',
            Self::BInv => 'b',
        }
    }
}

/// Freely reduced word in the generators.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    /// Freely reduces the given letters.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
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

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(f), Some(l)) => self.0.len() < 2 || *f != l.inverse(),
            _ => true,
        }
    }

    /// Strips inverse pairs from the two ends.
    pub fn cyclic_reduce(&self) -> Self {
        let s = &self.0;
        let (mut i, mut j) = (0, s.len());
        while j - i >= 2 && s[i] == s[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        Self(s[i..j].to_vec())
    }

    /// Lexicographically least rotation of the cyclic reduction; equal for
    /// conjugate words.
    pub fn conjugacy_key(&self) -> Self {
        let c = self.cyclic_reduce().0;
        (0..c.len().max(1))
            .map(|k| {
                let mut r = c.clone();
                r.rotate_left(k.min(c.len()));
                Self(r)
            })
            .min()
            .unwrap_or_default()
    }

    pub fn eval(&self, a: &Mobius, b: &Mobius) -> Mobius {
        self.0
            .iter()
            .fold(Mobius::identity(), |acc, l| acc.compose(&l.matrix(a, b)))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        self.0.iter().try_for_each(|l| write!(f, "{}", l.symbol()))
    }
}

/// Accepts `A`, `a`, `B`, `b`, `A^-1`, `B^-1`, `A^3`, `1` and whitespace.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidWord(s.to_string());
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars == ['1'] {
            return Ok(Self::identity());
        }
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let base = match chars[i] {
                'A' => Letter::A,
                'a' => Letter::AInv,
                'B' => Letter::B,
                'b' => Letter::BInv,
                _ => return Err(bad()),
            };
            i += 1;
            let mut exp: i64 = 1;
            if chars.get(i) == Some(&'^') {
                i += 1;
                let start = i;
                if chars.get(i) == Some(&'-') {
                    i += 1;
                }
                while chars.get(i).is_some_and(|c| c.is_ascii_digit()) {
                    i += 1;
                }
                exp = chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| bad())?;
            }
            let l = if exp < 0 { base.inverse() } else { base };
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        if letters.is_empty() {
            return Err(bad());
        }
        Ok(Self::new(letters))
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_and_reduction() {
        assert_eq!(w("A^-1"), w("a"));
        assert_eq!(w("AaB"), w("B"));
        assert_eq!(w("A^3").len(), 3);
        assert_eq!(w("B A b").to_string(), "BAb");
        assert!("AxB".parse::<Word>().is_err());
        assert!("".parse::<Word>().is_err());
        assert!(w("1").is_empty());
    }

    #[test]
    fn cyclic_keys() {
        assert_eq!(w("BAb").cyclic_reduce(), w("A"));
        assert_eq!(w("AB").conjugacy_key(), w("BA").conjugacy_key());
        assert!(!w("BAb").is_cyclically_reduced());
        assert!(w("ABab").is_cyclically_reduced());
    }

    #[test]
    fn inverse_evaluates_to_inverse() {
        let a = Mobius::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let b = Mobius::new(1.0, -1.0, -1.0, 2.0).unwrap();
        let x = w("ABaBBa");
        let p = x.eval(&a, &b).compose(&x.inverse().eval(&a, &b));
        assert!(p.is_identity(1e-10));
    }
}
