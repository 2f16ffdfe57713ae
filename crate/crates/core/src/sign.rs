//! Sign vectors: one entry in {-1, 0, +1} per polynomial of a tuple.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(pub Vec<i8>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when no entry is zero, i.e. the realization is an open set.
    pub fn is_strict(&self) -> bool {
        self.0.iter().all(|&s| s != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().copied()
    }

    pub fn parse(s: &str) -> Result<SignVector> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                '0' => Ok(0),
                _ => Err(Error::malformed(format!("bad sign character {c:?}"))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(SignVector)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(match s {
                1 => "+",
                -1 => "-",
                _ => "0",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        SignVector::parse(&s).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_order() {
        let v = SignVector::parse("+-0").unwrap();
        assert_eq!(v.0, vec![1, -1, 0]);
        assert_eq!(v.to_string(), "+-0");
        assert!(!v.is_strict());
        assert!(SignVector::parse("++").unwrap().is_strict());
        assert!(SignVector::parse("+x").is_err());
        // BTreeMap ordering over sign vectors must be stable: lexicographic on i8.
        let a = SignVector(vec![-1, 1]);
        let b = SignVector(vec![0, -1]);
        assert!(a < b);
    }

    #[test]
    fn serde_as_string() {
        let v = SignVector(vec![1, 0, -1]);
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(js, "\"+0-\"");
        let back: SignVector = serde_json::from_str(&js).unwrap();
        assert_eq!(back, v);
    }
}
