use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::id::Id;

/// A basic type with an adjoint order: `z < 0` for left adjoints, `z > 0`
/// for right adjoints.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimpleType {
    pub base: Id,
    pub z: i32,
}

impl SimpleType {
    pub fn new(base: impl Into<Id>, z: i32) -> Self {
        SimpleType {
            base: base.into(),
            z,
        }
    }

    fn parse(tok: &str) -> Result<Self> {
        let syntax = || Error::TypeSyntax(tok.to_string());
        let mut parts = tok.split('^');
        let base = parts.next().filter(|b| !b.is_empty()).ok_or_else(syntax)?;
        if !base.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(syntax());
        }
        let mut z = 0i32;
        for adj in parts {
            if adj.is_empty() {
                return Err(syntax());
            }
            for c in adj.chars() {
                z += match c {
                    'l' => -1,
                    'r' => 1,
                    _ => return Err(syntax()),
                };
            }
        }
        Ok(SimpleType::new(base, z))
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        match self.z {
            0 => Ok(()),
            z if z < 0 => write!(f, "^{}", "l".repeat(z.unsigned_abs() as usize)),
            z => write!(f, "^{}", "r".repeat(z as usize)),
        }
    }
}

/// A string of simple types; the empty string is the unit `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PregroupType(pub Vec<SimpleType>);

impl PregroupType {
    pub fn unit() -> Self {
        PregroupType(Vec::new())
    }

    /// Whitespace-separated simple types such as `n^r s n^l`; `·` also
    /// separates, and `1` is the unit.
    pub fn parse(s: &str) -> Result<Self> {
        s.replace('·', " ")
            .split_whitespace()
            .filter(|t| *t != "1")
            .map(SimpleType::parse)
            .collect::<Result<_>>()
            .map(PregroupType)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a PregroupType>) -> Self {
        PregroupType(
            parts
                .into_iter()
                .flat_map(|p| p.0.iter().cloned())
                .collect(),
        )
    }
}

impl fmt::Display for PregroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PregroupType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PregroupType::parse(s)
    }
}

impl Serialize for PregroupType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PregroupType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PregroupType::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let t = PregroupType::parse("n^r s n^l").unwrap();
        assert_eq!(
            t.0,
            vec![
                SimpleType::new("n", 1),
                SimpleType::new("s", 0),
                SimpleType::new("n", -1)
            ]
        );
        assert_eq!(t.to_string(), "n^r s n^l");
        assert_eq!(PregroupType::parse("n · n^rr").unwrap().0[1].z, 2);
        assert_eq!(PregroupType::parse("1").unwrap(), PregroupType::unit());
        assert_eq!(PregroupType::unit().to_string(), "1");
        assert!(PregroupType::parse("n^x").is_err());
        assert!(PregroupType::parse("^r").is_err());
    }
}
