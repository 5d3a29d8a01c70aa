use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A question label.
///
/// Torpedo questions are line directions: `Infinity` asks for a row
/// (`x = c`), `Slope(q)` asks for a line `q x - z = c`. Random access code
/// questions name an input position (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Question {
    Infinity,
    Slope(u32),
    Position(u32),
}

impl Question {
    /// The `d + 1` line directions `{inf, 0, 1, ..., d-1}` in canonical order.
    pub fn directions(d: u32) -> Vec<Question> {
        std::iter::once(Question::Infinity).chain((0..d).map(Question::Slope)).collect()
    }

    /// The constant `c` for which the point `(x, z)` lies on the line `c`
    /// of this direction.
    pub fn line_through(self, x: u32, z: u32, d: u32) -> Option<u32> {
        match self {
            Question::Infinity => Some(x % d),
            Question::Slope(q) => Some(crate::dit::reduce(q as i64 * x as i64 - z as i64, d)),
            Question::Position(_) => None,
        }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Question::Infinity => write!(f, "inf"),
            Question::Slope(q) => write!(f, "{q}"),
            Question::Position(i) => write!(f, "#{i}"),
        }
    }
}

impl FromStr for Question {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Validation(format!("unrecognised question label {s:?}"));
        match s {
            "inf" | "∞" => Ok(Question::Infinity),
            _ if s.starts_with('#') => s[1..].parse().map(Question::Position).map_err(|_| bad()),
            _ => s.parse().map(Question::Slope).map_err(|_| bad()),
        }
    }
}

impl Serialize for Question {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Question {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
