//! Ratings, pairwise preferences and the tripartite preference graph.

mod graph;

pub use graph::{build_tpg, Node, TpgBuilder, TripartitePreferenceGraph};

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense user identifier, assigned in canonical label order by [`Catalog`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UserId(pub u32);

/// Dense item identifier, assigned in canonical label order by [`Catalog`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ItemId(pub u32);

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i{}", self.0)
    }
}

/// Orders labels numerically when both parse as integers, lexically otherwise.
pub fn label_order(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Bidirectional map between dataset labels and dense ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Catalog {
    users: Vec<String>,
    items: Vec<String>,
    user_lookup: HashMap<String, UserId>,
    item_lookup: HashMap<String, ItemId>,
}

impl Catalog {
    /// Builds a catalog from (possibly repeated) labels; ids follow
    /// [`label_order`], so the result does not depend on input order.
    pub fn from_labels<U, I, S, T>(users: U, items: I) -> Self
    where
        U: IntoIterator<Item = S>,
        I: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        fn canonical(labels: impl Iterator<Item = String>) -> Vec<String> {
            let mut v: Vec<String> = labels.collect();
            v.sort_by(|a, b| label_order(a, b));
            v.dedup();
            v
        }
        let users = canonical(users.into_iter().map(Into::into));
        let items = canonical(items.into_iter().map(Into::into));
        let user_lookup = users
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), UserId(i as u32)))
            .collect();
        let item_lookup = items
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), ItemId(i as u32)))
            .collect();
        Catalog {
            users,
            items,
            user_lookup,
            item_lookup,
        }
    }

    pub fn user(&self, label: &str) -> Option<UserId> {
        self.user_lookup.get(label).copied()
    }

    pub fn item(&self, label: &str) -> Option<ItemId> {
        self.item_lookup.get(label).copied()
    }

    pub fn user_label(&self, id: UserId) -> &str {
        &self.users[id.0 as usize]
    }

    pub fn item_label(&self, id: ItemId) -> &str {
        &self.items[id.0 as usize]
    }

    pub fn user_labels(&self) -> &[String] {
        &self.users
    }

    pub fn item_labels(&self) -> &[String] {
        &self.items
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn item_ids(&self) -> impl Iterator<Item = ItemId> {
        (0..self.items.len() as u32).map(ItemId)
    }
}

/// Declared rating scale: values `min, min + step, ..., max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingScale {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl RatingScale {
    pub const FIVE_STAR: RatingScale = RatingScale {
        min: 1.0,
        max: 5.0,
        step: 1.0,
    };

    pub fn contains(&self, value: f64) -> bool {
        if !value.is_finite() || value < self.min - 1e-9 || value > self.max + 1e-9 {
            return false;
        }
        let steps = (value - self.min) / self.step;
        (steps - steps.round()).abs() < 1e-9
    }
}

impl fmt::Display for RatingScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] step {}", self.min, self.max, self.step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub user: UserId,
    pub item: ItemId,
    pub value: f64,
}

/// Normalized ratings sorted by `(user, item)` with at most one rating per pair.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingTable {
    catalog: Catalog,
    scale: RatingScale,
    ratings: Vec<Rating>,
}

impl RatingTable {
    pub fn new(catalog: Catalog, scale: RatingScale, mut ratings: Vec<Rating>) -> Result<Self> {
        ratings.sort_by_key(|r| (r.user, r.item));
        for (k, r) in ratings.iter().enumerate() {
            if !scale.contains(r.value) {
                return Err(Error::Scale {
                    line: k + 1,
                    value: r.value,
                    scale: scale.to_string(),
                });
            }
        }
        if let Some(w) = ratings
            .windows(2)
            .find(|w| (w[0].user, w[0].item) == (w[1].user, w[1].item))
        {
            return Err(Error::Duplicate {
                line: 0,
                first_line: 0,
                user: catalog.user_label(w[0].user).to_string(),
                item: catalog.item_label(w[0].item).to_string(),
            });
        }
        Ok(RatingTable {
            catalog,
            scale,
            ratings,
        })
    }

    /// Convenience constructor for labelled triples.
    pub fn from_labelled<'a>(
        scale: RatingScale,
        rows: impl IntoIterator<Item = (&'a str, &'a str, f64)>,
    ) -> Result<Self> {
        let rows: Vec<_> = rows.into_iter().collect();
        let catalog = Catalog::from_labels(rows.iter().map(|r| r.0), rows.iter().map(|r| r.1));
        let ratings = rows
            .iter()
            .map(|&(u, i, value)| Rating {
                user: catalog.user(u).unwrap(),
                item: catalog.item(i).unwrap(),
                value,
            })
            .collect();
        RatingTable::new(catalog, scale, ratings)
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn scale(&self) -> RatingScale {
        self.scale
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    /// Ratings grouped per user, users ascending.
    pub fn by_user(&self) -> impl Iterator<Item = (UserId, &[Rating])> {
        self.ratings
            .chunk_by(|a, b| a.user == b.user)
            .map(|chunk| (chunk[0].user, chunk))
    }
}

/// `⟨user, preferred, other⟩`: the user prefers `preferred` over `other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PreferenceObservation {
    pub user: UserId,
    pub preferred: ItemId,
    pub other: ItemId,
}

impl PreferenceObservation {
    pub fn node(&self) -> PreferenceNode {
        PreferenceNode {
            winner: self.preferred,
            loser: self.other,
        }
    }
}

/// A pairwise preference `⟨winner, loser⟩`. `⟨i,j⟩` and `⟨j,i⟩` are distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PreferenceNode {
    pub winner: ItemId,
    pub loser: ItemId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Desirable,
    Undesirable,
}

/// One side of an item: `i_d` or `i_u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepresentativeNode {
    pub item: ItemId,
    pub side: Side,
}

impl RepresentativeNode {
    pub fn desirable(item: ItemId) -> Self {
        RepresentativeNode {
            item,
            side: Side::Desirable,
        }
    }

    pub fn undesirable(item: ItemId) -> Self {
        RepresentativeNode {
            item,
            side: Side::Undesirable,
        }
    }
}

/// Emits `⟨u,i,j⟩` for every pair of items a user rated with
/// `value(i) > value(j)`. Ties produce nothing. Output is sorted.
pub fn derive_preferences(ratings: &[Rating]) -> Vec<PreferenceObservation> {
    let mut per_user: BTreeMap<UserId, Vec<(ItemId, f64)>> = BTreeMap::new();
    for r in ratings {
        per_user.entry(r.user).or_default().push((r.item, r.value));
    }
    let mut out = Vec::new();
    for (user, mut rated) in per_user {
        rated.sort_by_key(|&(item, _)| item);
        for (k, &(a, va)) in rated.iter().enumerate() {
            for &(b, vb) in &rated[k + 1..] {
                if va > vb {
                    out.push(PreferenceObservation {
                        user,
                        preferred: a,
                        other: b,
                    });
                } else if vb > va {
                    out.push(PreferenceObservation {
                        user,
                        preferred: b,
                        other: a,
                    });
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Observation set `O` with membership queries.
#[derive(Clone, Debug, Default)]
pub struct ObservationSet(HashSet<PreferenceObservation>);

impl ObservationSet {
    pub fn contains(&self, o: &PreferenceObservation) -> bool {
        self.0.contains(o)
    }
}

impl FromIterator<PreferenceObservation> for ObservationSet {
    fn from_iter<T: IntoIterator<Item = PreferenceObservation>>(iter: T) -> Self {
        ObservationSet(iter.into_iter().collect())
    }
}

/// Agreement: does `user` hold preference `pref` in `observations`?
pub fn agg(user: UserId, pref: PreferenceNode, observations: &ObservationSet) -> bool {
    observations.contains(&PreferenceObservation {
        user,
        preferred: pref.winner,
        other: pref.loser,
    })
}

/// Support: does `pref` support representative `rep`?
pub fn sup(pref: PreferenceNode, rep: RepresentativeNode) -> bool {
    match rep.side {
        Side::Desirable => rep.item == pref.winner,
        Side::Undesirable => rep.item == pref.loser,
    }
}
