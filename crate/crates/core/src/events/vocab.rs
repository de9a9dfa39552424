//! Behavior and location vocabularies.
//!
//! Both vocabularies are ordered (the order defines node order downstream)
//! and ship with defaults for the healthcare simulation setting. Custom
//! vocabularies use the same tab-separated plain-text format as the
//! shipped files in `vocab/`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_BEHAVIORS: &str = include_str!("../../vocab/behaviors.txt");
const DEFAULT_LOCATIONS: &str = include_str!("../../vocab/locations.txt");

/// Communication behavior codes and the teamwork construct each belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingScheme {
    construct_of: IndexMap<String, String>,
}

impl CodingScheme {
    /// The 11-code healthcare team communication scheme.
    pub fn healthcare() -> Self {
        Self::from_text(DEFAULT_BEHAVIORS).expect("bundled behavior vocabulary is valid")
    }

    /// Builds a scheme from `(behavior, construct)` pairs in order.
    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut construct_of = IndexMap::new();
        for (code, construct) in pairs {
            let code = code.into();
            let construct = construct.into();
            if code.trim().is_empty() || construct.trim().is_empty() {
                return Err(Error::InvalidVocabulary("empty behavior or construct label".into()));
            }
            if construct_of.insert(code.clone(), construct).is_some() {
                return Err(Error::InvalidVocabulary(format!("duplicate behavior `{code}`")));
            }
        }
        if construct_of.is_empty() {
            return Err(Error::InvalidVocabulary("coding scheme has no behaviors".into()));
        }
        Ok(Self { construct_of })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows = parse_vocab_lines(text, "behavior")?;
        Self::from_pairs(rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn behaviors(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.construct_of.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.construct_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.construct_of.is_empty()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.construct_of.contains_key(code)
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.construct_of.get_index_of(code)
    }

    pub fn behavior(&self, index: usize) -> Option<&str> {
        self.construct_of.get_index(index).map(|(k, _)| k.as_str())
    }

    pub fn construct_of(&self, code: &str) -> Option<&str> {
        self.construct_of.get(code).map(String::as_str)
    }

    /// Resolves a label to the scheme's own copy, or fails naming it.
    pub fn resolve(&self, code: &str) -> Result<&str> {
        self.construct_of
            .get_key_value(code)
            .map(|(k, _)| k.as_str())
            .ok_or_else(|| Error::Vocabulary {
                kind: "behavior",
                label: code.to_string(),
            })
    }
}

impl Default for CodingScheme {
    fn default() -> Self {
        Self::healthcare()
    }
}

/// Working-area tier of a spatial location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Primary,
    Secondary,
    Other,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Primary => "primary",
            Tier::Secondary => "secondary",
            Tier::Other => "other",
        })
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "primary" => Ok(Tier::Primary),
            "secondary" => Ok(Tier::Secondary),
            "other" => Ok(Tier::Other),
            other => Err(Error::InvalidVocabulary(format!("unknown tier `{other}`"))),
        }
    }
}

/// Spatial areas of the learning space and their working-area tiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocationTaxonomy {
    tier_of: IndexMap<String, Tier>,
}

impl LocationTaxonomy {
    /// The nine areas of the simulation ward.
    pub fn simulation_ward() -> Self {
        Self::from_text(DEFAULT_LOCATIONS).expect("bundled location vocabulary is valid")
    }

    pub fn from_pairs<I, A>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, Tier)>,
        A: Into<String>,
    {
        let mut tier_of = IndexMap::new();
        for (area, tier) in pairs {
            let area = area.into();
            if area.trim().is_empty() {
                return Err(Error::InvalidVocabulary("empty area label".into()));
            }
            if tier_of.insert(area.clone(), tier).is_some() {
                return Err(Error::InvalidVocabulary(format!("duplicate area `{area}`")));
            }
        }
        if tier_of.is_empty() {
            return Err(Error::InvalidVocabulary("taxonomy has no areas".into()));
        }
        Ok(Self { tier_of })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows = parse_vocab_lines(text, "area")?
            .into_iter()
            .map(|(area, tier)| Ok((area, tier.parse::<Tier>()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn areas(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.tier_of.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tier_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tier_of.is_empty()
    }

    pub fn contains(&self, area: &str) -> bool {
        self.tier_of.contains_key(area)
    }

    pub fn index_of(&self, area: &str) -> Option<usize> {
        self.tier_of.get_index_of(area)
    }

    pub fn area(&self, index: usize) -> Option<&str> {
        self.tier_of.get_index(index).map(|(k, _)| k.as_str())
    }

    pub fn tier_of(&self, area: &str) -> Option<Tier> {
        self.tier_of.get(area).copied()
    }

    pub fn resolve(&self, area: &str) -> Result<&str> {
        self.tier_of
            .get_key_value(area)
            .map(|(k, _)| k.as_str())
            .ok_or_else(|| Error::Vocabulary {
                kind: "location",
                label: area.to_string(),
            })
    }
}

impl Default for LocationTaxonomy {
    fn default() -> Self {
        Self::simulation_ward()
    }
}

fn parse_vocab_lines(text: &str, what: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, '\t');
        let label = parts.next().unwrap_or("").trim();
        let Some(attr) = parts.next().map(str::trim) else {
            return Err(Error::InvalidVocabulary(format!(
                "line {}: expected `<{what}>\\t<attribute>`",
                lineno + 1
            )));
        };
        out.push((label.to_string(), attr.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn healthcare_scheme_has_eleven_codes_in_four_constructs() {
        let scheme = CodingScheme::healthcare();
        assert_eq!(scheme.len(), 11);
        let constructs: std::collections::BTreeSet<_> =
            scheme.behaviors().map(|c| scheme.construct_of(c).unwrap()).collect();
        assert_eq!(constructs.len(), 4);
        assert_eq!(scheme.construct_of("escalation"), Some("situation awareness"));
        assert_eq!(scheme.construct_of("checking-back"), Some("closed-loop communication"));
    }

    #[test]
    fn ward_taxonomy_tiers() {
        let ward = LocationTaxonomy::simulation_ward();
        assert_eq!(ward.len(), 9);
        let primary: Vec<_> = ward
            .areas()
            .filter(|a| ward.tier_of(a) == Some(Tier::Primary))
            .collect();
        assert_eq!(primary, ["bed 4", "phone"]);
        assert_eq!(ward.tier_of("other areas"), Some(Tier::Other));
        let secondary = ward
            .areas()
            .filter(|a| ward.tier_of(a) == Some(Tier::Secondary))
            .count();
        assert_eq!(secondary, 6);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = CodingScheme::from_pairs([("a", "x"), ("a", "y")]).unwrap_err();
        assert!(matches!(err, Error::InvalidVocabulary(_)));
        let err = LocationTaxonomy::from_text("bed\tprimary\nbed\tother\n").unwrap_err();
        assert!(matches!(err, Error::InvalidVocabulary(_)));
    }

    #[test]
    fn resolve_names_unknown_label() {
        let err = CodingScheme::healthcare().resolve("gossip").unwrap_err();
        assert!(err.to_string().contains("gossip"));
    }
}
