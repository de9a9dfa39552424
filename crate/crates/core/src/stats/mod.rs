//! Cluster-comparison statistics and inter-rater reliability.

mod contingency;
mod kappa;
mod mwu;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;

pub use contingency::{fisher_exact, odds_ratio_woolf_ci, FisherReport, OddsRatioCi, Table2x2};
pub use kappa::{cohens_kappa, KappaReport};
pub use mwu::{mann_whitney_u, mann_whitney_u_with, MwuMethod, MwuReport};

/// Direction of a test. For samples `x`, `y`, `Greater` means `x` tends to
/// exceed `y`; for a 2×2 table it means the first cell is larger than
/// independence predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    TwoSided,
    Less,
    Greater,
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Less => "less",
            Alternative::Greater => "greater",
        })
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "less" => Ok(Alternative::Less),
            "greater" => Ok(Alternative::Greater),
            other => Err(Error::InvalidInput(format!("unknown alternative `{other}`"))),
        }
    }
}

/// Combined statistics output with SHA-256 digests of the inputs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub mwu: Option<MwuReport>,
    pub fisher: Option<FisherReport>,
    pub kappa: Option<KappaReport>,
    /// Input name → hex SHA-256.
    pub input_digests: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Standard normal upper tail.
pub(crate) fn normal_sf(z: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile.
pub(crate) fn normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}
