use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IetiError;

/// Which vertex values, edge averages and face averages are primal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimalChoice {
    pub vertices: bool,
    pub edges: bool,
    pub faces: bool,
}

impl PrimalChoice {
    pub const NONE: PrimalChoice = PrimalChoice::new(false, false, false);
    pub const V: PrimalChoice = PrimalChoice::new(true, false, false);
    pub const E: PrimalChoice = PrimalChoice::new(false, true, false);
    pub const F: PrimalChoice = PrimalChoice::new(false, false, true);
    pub const VE: PrimalChoice = PrimalChoice::new(true, true, false);
    pub const VF: PrimalChoice = PrimalChoice::new(true, false, true);
    pub const EF: PrimalChoice = PrimalChoice::new(false, true, true);
    pub const VEF: PrimalChoice = PrimalChoice::new(true, true, true);

    pub const fn new(vertices: bool, edges: bool, faces: bool) -> Self {
        Self {
            vertices,
            edges,
            faces,
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.vertices || self.edges || self.faces)
    }

    /// All choices meaningful in dimension `d` (face averages only in 3D).
    pub fn all(d: usize) -> Vec<PrimalChoice> {
        let all = [
            Self::NONE,
            Self::V,
            Self::E,
            Self::F,
            Self::VE,
            Self::VF,
            Self::EF,
            Self::VEF,
        ];
        all.into_iter().filter(|c| d == 3 || !c.faces).collect()
    }

    pub fn validate(&self, d: usize) -> Result<(), IetiError> {
        if self.faces && d != 3 {
            return Err(IetiError::InvalidChoice(format!(
                "face averages need a 3D domain, got dimension {d}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PrimalChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        for (on, c) in [(self.vertices, "V"), (self.edges, "E"), (self.faces, "F")] {
            if on {
                f.write_str(c)?;
            }
        }
        Ok(())
    }
}

impl FromStr for PrimalChoice {
    type Err = IetiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("none") || t == "∅" {
            return Ok(Self::NONE);
        }
        let mut c = Self::NONE;
        for ch in t.chars().filter(|&ch| ch != '+') {
            let flag = match ch.to_ascii_uppercase() {
                'V' => &mut c.vertices,
                'E' => &mut c.edges,
                'F' => &mut c.faces,
                _ => return Err(IetiError::InvalidChoice(format!("unknown primal choice `{s}`"))),
            };
            if *flag {
                return Err(IetiError::InvalidChoice(format!("repeated letter in `{s}`")));
            }
            *flag = true;
        }
        if c.is_empty() {
            return Err(IetiError::InvalidChoice(format!("empty primal choice `{s}`")));
        }
        Ok(c)
    }
}

impl Serialize for PrimalChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PrimalChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which dofs of an edge enter its average.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeAverageSupport {
    /// interior dofs only if vertices are primal, the closed edge otherwise
    #[default]
    Auto,
    /// always include the endpoint dofs
    Yes,
    /// always interior dofs only
    No,
}

impl EdgeAverageSupport {
    pub fn includes_endpoints(&self, choice: PrimalChoice) -> bool {
        match self {
            EdgeAverageSupport::Auto => !choice.vertices,
            EdgeAverageSupport::Yes => true,
            EdgeAverageSupport::No => false,
        }
    }
}

impl fmt::Display for EdgeAverageSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeAverageSupport::Auto => "auto",
            EdgeAverageSupport::Yes => "yes",
            EdgeAverageSupport::No => "no",
        })
    }
}

impl FromStr for EdgeAverageSupport {
    type Err = IetiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "yes" | "true" => Ok(Self::Yes),
            "no" | "false" => Ok(Self::No),
            _ => Err(IetiError::InvalidChoice(format!(
                "edge average support must be auto, yes or no, got `{s}`"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        for c in PrimalChoice::all(3) {
            assert_eq!(c.to_string().parse::<PrimalChoice>().unwrap(), c);
        }
        assert_eq!("V+E".parse::<PrimalChoice>().unwrap(), PrimalChoice::VE);
        assert!("VV".parse::<PrimalChoice>().is_err());
        assert!("X".parse::<PrimalChoice>().is_err());
        assert_eq!(PrimalChoice::all(2).len(), 4);
        assert!(PrimalChoice::F.validate(2).is_err());
    }
}
