//! Personalised PageRank over a projected graph and item ranking by the
//! difference of an item's two representative scores.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::{ItemId, Side, UserId};
use crate::projection::ProjectedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PprConfig {
    pub damping: f64,
    pub iterations: usize,
    /// Stop early once the L1 change between iterates falls below this;
    /// zero runs every iteration.
    pub epsilon: f64,
}

impl Default for PprConfig {
    fn default() -> Self {
        PprConfig {
            damping: 0.85,
            iterations: 20,
            epsilon: 0.0,
        }
    }
}

impl PprConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie strictly between 0 and 1, got {}",
                self.damping
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// PPR scores over a projected graph's roster for one user.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector {
    pub user: UserId,
    pub scores: Vec<f64>,
    pub iterations: usize,
    /// L1 change of each iteration.
    pub deltas: Vec<f64>,
}

impl ScoreVector {
    pub fn total(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// Iterates `p ← α·p·M + (1 − α)·d` from `p = d`, where `d` is the unit
/// vector on the user and dangling mass is sent back to `d`.
pub fn personalized_pagerank(g: &ProjectedGraph, user: UserId, cfg: &PprConfig) -> Result<ScoreVector> {
    cfg.validate()?;
    let source = g
        .roster()
        .user_row(user)
        .ok_or_else(|| Error::UnknownUser(user.to_string()))?;
    let m = g.adjacency();
    let n = m.rows();
    let mut p = vec![0.0; n];
    p[source] = 1.0;
    let mut next = vec![0.0; n];
    let mut deltas = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        next.iter_mut().for_each(|x| *x = 0.0);
        let mut dangling = 0.0;
        for (r, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (cols, vals) = m.row(r);
            if cols.is_empty() {
                dangling += mass;
                continue;
            }
            let w = cfg.damping * mass;
            for (&c, &v) in cols.iter().zip(vals) {
                next[c as usize] += w * v;
            }
        }
        next[source] += cfg.damping * dangling + (1.0 - cfg.damping);
        let delta: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        deltas.push(delta);
        if delta < cfg.epsilon {
            break;
        }
    }
    Ok(ScoreVector {
        user,
        scores: p,
        iterations: deltas.len(),
        deltas,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedItem {
    pub item: ItemId,
    pub rank: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecommendationList {
    pub user: UserId,
    pub items: Vec<RankedItem>,
    pub candidates: String,
}

/// Desirable score minus undesirable score; absent representatives count 0.
pub fn item_rank(g: &ProjectedGraph, scores: &ScoreVector, item: ItemId) -> f64 {
    let score = |side| {
        g.roster()
            .rep_row(item, side)
            .map_or(0.0, |r| scores.scores[r])
    };
    score(Side::Desirable) - score(Side::Undesirable)
}

/// Ranks `candidates` by descending rank, ties by ascending item id.
pub fn rank_items(
    g: &ProjectedGraph,
    scores: &ScoreVector,
    candidates: impl IntoIterator<Item = ItemId>,
) -> Vec<RankedItem> {
    let mut items: Vec<RankedItem> = candidates
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|item| RankedItem {
            item,
            rank: item_rank(g, scores, item),
        })
        .collect();
    items.sort_by(order);
    items
}

fn order(a: &RankedItem, b: &RankedItem) -> Ordering {
    b.rank.total_cmp(&a.rank).then(a.item.cmp(&b.item))
}

/// Items a recommendation may return.
#[derive(Clone, Debug)]
pub enum CandidateSet<'a> {
    /// Every item of the graph except the given training items.
    Untrained(&'a BTreeSet<ItemId>),
    /// Exactly these items.
    Explicit(&'a [ItemId]),
}

pub fn recommend(
    g: &ProjectedGraph,
    user: UserId,
    top: usize,
    candidates: CandidateSet<'_>,
    cfg: &PprConfig,
) -> Result<RecommendationList> {
    if top == 0 {
        return Err(Error::InvalidConfig("top must be at least 1".into()));
    }
    let scores = personalized_pagerank(g, user, cfg)?;
    let (pool, label): (Vec<ItemId>, _) = match candidates {
        CandidateSet::Untrained(trained) => (
            g.roster()
                .items
                .iter()
                .copied()
                .filter(|i| !trained.contains(i))
                .collect(),
            "untrained",
        ),
        CandidateSet::Explicit(items) => (items.to_vec(), "explicit"),
    };
    let mut items = rank_items(g, &scores, pool);
    items.truncate(top);
    Ok(RecommendationList {
        user,
        items,
        candidates: label.to_string(),
    })
}
