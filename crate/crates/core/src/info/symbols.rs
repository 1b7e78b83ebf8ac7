use std::fmt;
use std::str::FromStr;

use crate::error::{IldError, Result};

/// A length-n string over `{0, .., |A|-1}`.
///
/// Binary strings with n <= 64 are packed into a machine word, first symbol in
/// the most significant used bit, so that integer order and lexicographic
/// order coincide. The representation is canonical: a string that can be
/// packed always is, hence derived equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymbolString {
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Packed { bits: u64, len: u8 },
    Symbols(Vec<u8>),
}

impl SymbolString {
    /// Packed binary string; `bits` holds the symbols MSB-first in its low `len` bits.
    pub fn binary(bits: u64, len: usize) -> Result<Self> {
        if len > 64 {
            return Err(IldError::InvalidString(format!("packed length {len} exceeds 64")));
        }
        if len < 64 && bits >> len != 0 {
            return Err(IldError::InvalidString(format!("{bits:#x} has bits beyond length {len}")));
        }
        Ok(Self { repr: Repr::Packed { bits, len: len as u8 } })
    }

    pub fn from_symbols(symbols: Vec<u8>) -> Self {
        if symbols.len() <= 64 && symbols.iter().all(|&s| s < 2) {
            let bits = symbols.iter().fold(0u64, |acc, &s| (acc << 1) | s as u64);
            return Self { repr: Repr::Packed { bits, len: symbols.len() as u8 } };
        }
        Self { repr: Repr::Symbols(symbols) }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Packed { len, .. } => *len as usize,
            Repr::Symbols(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Symbol at position `i` (0-based, first symbol first).
    pub fn get(&self, i: usize) -> u8 {
        match &self.repr {
            Repr::Packed { bits, len } => ((bits >> (*len as usize - 1 - i)) & 1) as u8,
            Repr::Symbols(s) => s[i],
        }
    }

    pub fn symbols(&self) -> Vec<u8> {
        match &self.repr {
            Repr::Packed { .. } => (0..self.len()).map(|i| self.get(i)).collect(),
            Repr::Symbols(s) => s.clone(),
        }
    }

    /// Packed integer value when the string is binary with n <= 64.
    pub fn packed(&self) -> Option<u64> {
        match &self.repr {
            Repr::Packed { bits, .. } => Some(*bits),
            Repr::Symbols(_) => None,
        }
    }

    /// Number of occurrences of `letter`.
    pub fn count(&self, letter: u8) -> u32 {
        match &self.repr {
            Repr::Packed { bits, len } => {
                let ones = bits.count_ones();
                match letter {
                    1 => ones,
                    0 => *len as u32 - ones,
                    _ => 0,
                }
            }
            Repr::Symbols(s) => s.iter().filter(|&&x| x == letter).count() as u32,
        }
    }

    pub fn max_symbol(&self) -> Option<u8> {
        match &self.repr {
            Repr::Packed { bits, len } => {
                if *len == 0 {
                    None
                } else if *bits != 0 {
                    Some(1)
                } else {
                    Some(0)
                }
            }
            Repr::Symbols(s) => s.iter().copied().max(),
        }
    }

    /// Exact per-letter counts.
    pub fn type_of(&self, alphabet_size: usize) -> Result<TypeVector> {
        if let Some(m) = self.max_symbol() {
            if m as usize >= alphabet_size {
                return Err(IldError::InvalidString(format!(
                    "symbol {m} outside alphabet of size {alphabet_size}"
                )));
            }
        }
        let counts = match &self.repr {
            Repr::Packed { .. } => {
                let mut c = vec![0; alphabet_size];
                c[0] = self.count(0);
                if alphabet_size > 1 {
                    c[1] = self.count(1);
                }
                c
            }
            Repr::Symbols(s) => {
                let mut c = vec![0u32; alphabet_size];
                for &x in s {
                    c[x as usize] += 1;
                }
                c
            }
        };
        Ok(TypeVector::new(counts))
    }
}

impl PartialOrd for SymbolString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order of the symbol sequences.
impl Ord for SymbolString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (&self.repr, &other.repr) {
            (Repr::Packed { bits: a, len: la }, Repr::Packed { bits: b, len: lb }) if la == lb => a.cmp(b),
            _ => self.symbols().cmp(&other.symbols()),
        }
    }
}

impl fmt::Display for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = self.max_symbol().is_some_and(|m| m > 9);
        for i in 0..self.len() {
            if sep && i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

impl serde::Serialize for SymbolString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SymbolString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for SymbolString {
    type Err = IldError;

    /// Parses `"0110"` (single digits) or `"0,11,2"` (comma separated).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let symbols: Option<Vec<u8>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<u8>().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        symbols
            .map(SymbolString::from_symbols)
            .ok_or_else(|| IldError::InvalidString(format!("cannot parse {s:?}")))
    }
}

/// Per-letter occurrence counts of a string (its n-type).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<u32>,
}

impl TypeVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// Empirical pmf `counts / n`.
    pub fn empirical<T: crate::scalar::Real>(&self) -> Result<super::Pmf<T>> {
        super::Pmf::from_counts(&self.counts)
    }
}

impl From<Vec<u32>> for TypeVector {
    fn from(counts: Vec<u32>) -> Self {
        Self::new(counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> SymbolString {
        x.parse().unwrap()
    }

    #[test]
    fn type_examples() {
        assert_eq!(s("0110").type_of(2).unwrap().counts(), &[2, 2]);
        assert_eq!(s("00000").type_of(2).unwrap().counts(), &[5, 0]);
        assert_eq!(s("01221").type_of(3).unwrap().counts(), &[1, 2, 2]);
        assert!(s("012").type_of(2).is_err());
    }

    #[test]
    fn packed_and_generic_agree() {
        let a = SymbolString::binary(0b0110, 4).unwrap();
        assert_eq!(a, s("0110"));
        assert_eq!(a.symbols(), vec![0, 1, 1, 0]);
        assert_eq!(a.count(1), 2);
        assert_eq!(a.to_string(), "0110");
        assert!(SymbolString::binary(0b10000, 4).is_err());
    }

    #[test]
    fn order_is_lexicographic() {
        assert!(s("001") < s("010"));
        assert!(s("0120") < s("0200"));
        let full = SymbolString::binary(u64::MAX, 64).unwrap();
        assert_eq!(full.count(1), 64);
    }

    #[test]
    fn comma_form_parses() {
        let a = s("0,11,2");
        assert_eq!(a.symbols(), vec![0, 11, 2]);
        assert_eq!(a.to_string(), "0,11,2");
    }
}
