use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::ItemId;

/// Gain applied to a relevance value before discounting by `log2(i + 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gain {
    /// `2^rel − 1`.
    #[default]
    Standard,
    /// `2^(rel − 1)`.
    Literal,
}

impl Gain {
    pub fn apply(self, rel: f64) -> f64 {
        match self {
            Gain::Standard => rel.exp2() - 1.0,
            Gain::Literal => (rel - 1.0).exp2(),
        }
    }
}

impl fmt::Display for Gain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gain::Standard => "standard",
            Gain::Literal => "literal",
        })
    }
}

impl FromStr for Gain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(Gain::Standard),
            "literal" => Ok(Gain::Literal),
            other => Err(Error::InvalidConfig(format!(
                "unknown gain {other:?} (expected standard or literal)"
            ))),
        }
    }
}

/// Discounted cumulative gain of a relevance list, position 1 first.
pub fn dcg(rels: &[f64], gain: Gain) -> f64 {
    rels.iter()
        .enumerate()
        .map(|(i, &r)| gain.apply(r) / ((i + 2) as f64).log2())
        .sum()
}

/// NDCG of the first `n` recommended items against the user's test
/// relevances. Items without a test rating have relevance 0 under the
/// standard gain and contribute nothing under either gain. `None` when
/// the user has fewer than `n` test items or an all-zero ideal list.
pub fn ndcg_at_n(recommended: &[ItemId], test: &HashMap<ItemId, f64>, n: usize, gain: Gain) -> Option<f64> {
    if test.len() < n {
        return None;
    }
    let mut ideal: Vec<f64> = test.values().copied().collect();
    ideal.sort_by(|a, b| b.total_cmp(a));
    ideal.truncate(n);
    let best = dcg(&ideal, gain);
    if best <= 0.0 {
        return None;
    }
    let got: f64 = recommended
        .iter()
        .take(n)
        .enumerate()
        .filter_map(|(i, item)| test.get(item).map(|&r| gain.apply(r) / ((i + 2) as f64).log2()))
        .sum();
    Some(got / best)
}
