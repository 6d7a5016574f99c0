use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Verbal intensity of preference between two consecutive ranked elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntensityLabel {
    VeryWeak,
    Weak,
    Moderate,
    Strong,
    VeryStrong,
    Extreme,
}

impl IntensityLabel {
    pub const ALL: [IntensityLabel; 6] = [
        IntensityLabel::VeryWeak,
        IntensityLabel::Weak,
        IntensityLabel::Moderate,
        IntensityLabel::Strong,
        IntensityLabel::VeryStrong,
        IntensityLabel::Extreme,
    ];

    pub fn value(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_value(v: u8) -> Option<Self> {
        Self::ALL.get((v as usize).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            IntensityLabel::VeryWeak => "VeryWeak",
            IntensityLabel::Weak => "Weak",
            IntensityLabel::Moderate => "Moderate",
            IntensityLabel::Strong => "Strong",
            IntensityLabel::VeryStrong => "VeryStrong",
            IntensityLabel::Extreme => "Extreme",
        }
    }
}

/// Gap between two consecutive elements of a ranking: a labelled strict
/// preference, or a tie (value 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Gap {
    Tie,
    Prefer(IntensityLabel),
}

impl Gap {
    pub fn value(self) -> f64 {
        match self {
            Gap::Tie => 0.0,
            Gap::Prefer(l) => l.value() as f64,
        }
    }

    pub fn is_tie(self) -> bool {
        self == Gap::Tie
    }
}

impl From<IntensityLabel> for Gap {
    fn from(l: IntensityLabel) -> Self {
        Gap::Prefer(l)
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gap::Tie => f.write_str("Tie"),
            Gap::Prefer(l) => f.write_str(l.name()),
        }
    }
}

impl FromStr for Gap {
    type Err = String;

    /// Accepts the label name, a spaced / lower-case spelling
    /// ("very strong"), or the integer value 0..=6.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_' && *c != '-').collect::<String>().to_lowercase();
        if key == "tie" || key == "0" {
            return Ok(Gap::Tie);
        }
        if let Ok(v) = key.parse::<u8>() {
            return IntensityLabel::from_value(v).map(Gap::Prefer).ok_or_else(|| format!("intensity {v} outside 0..=6"));
        }
        IntensityLabel::ALL
            .iter()
            .find(|l| l.name().to_lowercase() == key)
            .map(|&l| Gap::Prefer(l))
            .ok_or_else(|| format!("unknown intensity label `{s}`"))
    }
}

impl TryFrom<String> for Gap {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Gap> for String {
    fn from(g: Gap) -> Self {
        g.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_map_to_one_through_six() {
        let values: Vec<u8> = IntensityLabel::ALL.iter().map(|l| l.value()).collect();
        assert_eq!(values, [1, 2, 3, 4, 5, 6]);
        assert_eq!(IntensityLabel::Weak.value(), 2);
        assert_eq!(IntensityLabel::Strong.value(), 4);
        assert_eq!(IntensityLabel::VeryStrong.value(), 5);
        for l in IntensityLabel::ALL {
            assert_eq!(IntensityLabel::from_value(l.value()), Some(l));
        }
        assert_eq!(IntensityLabel::from_value(0), None);
        assert_eq!(IntensityLabel::from_value(7), None);
    }

    #[test]
    fn gap_parsing() {
        assert_eq!("very strong".parse::<Gap>().unwrap(), Gap::Prefer(IntensityLabel::VeryStrong));
        assert_eq!("VeryWeak".parse::<Gap>().unwrap(), Gap::Prefer(IntensityLabel::VeryWeak));
        assert_eq!("4".parse::<Gap>().unwrap(), Gap::Prefer(IntensityLabel::Strong));
        assert_eq!("tie".parse::<Gap>().unwrap(), Gap::Tie);
        assert!("huge".parse::<Gap>().is_err());
        assert!("9".parse::<Gap>().is_err());
        let json = serde_json::to_string(&vec![Gap::Tie, Gap::Prefer(IntensityLabel::Extreme)]).unwrap();
        assert_eq!(json, r#"["Tie","Extreme"]"#);
    }
}
