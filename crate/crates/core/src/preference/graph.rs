use std::collections::BTreeSet;

use super::{
    ItemId, PreferenceNode, PreferenceObservation, RepresentativeNode, Side, UserId,
};
use crate::error::{Error, Result};
use crate::metapath::NodeType;

/// A node of the preference graph, addressed by its position inside its layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    User(usize),
    Pref(usize),
    Rep(usize),
}

impl Node {
    pub fn node_type(self) -> NodeType {
        match self {
            Node::User(_) => NodeType::U,
            Node::Pref(_) => NodeType::P,
            Node::Rep(_) => NodeType::R,
        }
    }
}

/// Users, pairwise preferences and item representatives with the
/// agreement (user–preference) and support (preference–representative)
/// edges.
///
/// Every layer is kept in canonical order (users and items ascending,
/// preferences by `(winner, loser)`), so two graphs built from the same
/// observations compare equal whatever order the observations arrived in.
/// Representative `2k` is `items[k]_d`, `2k + 1` is `items[k]_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartitePreferenceGraph {
    users: Vec<UserId>,
    items: Vec<ItemId>,
    prefs: Vec<PreferenceNode>,
    user_prefs: Vec<Vec<u32>>,
    pref_users: Vec<Vec<u32>>,
    rep_prefs: Vec<Vec<u32>>,
}

/// Collects observations and, optionally, unobserved candidate preferences.
///
/// Candidates are preference nodes that no user agrees with; they carry
/// only their two support edges.
#[derive(Clone, Debug, Default)]
pub struct TpgBuilder {
    observations: Vec<PreferenceObservation>,
    candidates: Vec<PreferenceNode>,
}

impl TpgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, o: PreferenceObservation) -> &mut Self {
        self.observations.push(o);
        self
    }

    pub fn observe_all(&mut self, obs: impl IntoIterator<Item = PreferenceObservation>) -> &mut Self {
        self.observations.extend(obs);
        self
    }

    pub fn candidate(&mut self, p: PreferenceNode) -> &mut Self {
        self.candidates.push(p);
        self
    }

    pub fn build(&self) -> Result<TripartitePreferenceGraph> {
        if self.observations.is_empty() && self.candidates.is_empty() {
            return Err(Error::NoPreferences);
        }
        for p in self.observations.iter().map(|o| o.node()).chain(self.candidates.iter().copied()) {
            if p.winner == p.loser {
                return Err(Error::InvalidConfig(format!(
                    "preference of item {} over itself",
                    p.winner
                )));
            }
        }
        let edges: BTreeSet<PreferenceObservation> = self.observations.iter().copied().collect();
        let users: Vec<UserId> = edges
            .iter()
            .map(|o| o.user)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let prefs: Vec<PreferenceNode> = edges
            .iter()
            .map(|o| o.node())
            .chain(self.candidates.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let items: Vec<ItemId> = prefs
            .iter()
            .flat_map(|p| [p.winner, p.loser])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let mut user_prefs = vec![Vec::new(); users.len()];
        let mut pref_users = vec![Vec::new(); prefs.len()];
        for o in &edges {
            let u = users.binary_search(&o.user).unwrap();
            let p = prefs.binary_search(&o.node()).unwrap();
            user_prefs[u].push(p as u32);
            pref_users[p].push(u as u32);
        }
        let mut rep_prefs = vec![Vec::new(); 2 * items.len()];
        for (k, p) in prefs.iter().enumerate() {
            let w = items.binary_search(&p.winner).unwrap();
            let l = items.binary_search(&p.loser).unwrap();
            rep_prefs[2 * w].push(k as u32);
            rep_prefs[2 * l + 1].push(k as u32);
        }
        for list in user_prefs.iter_mut().chain(pref_users.iter_mut()) {
            list.sort_unstable();
        }
        Ok(TripartitePreferenceGraph {
            users,
            items,
            prefs,
            user_prefs,
            pref_users,
            rep_prefs,
        })
    }
}

/// Builds the graph from observed preferences only.
pub fn build_tpg(observations: &[PreferenceObservation]) -> Result<TripartitePreferenceGraph> {
    if observations.is_empty() {
        return Err(Error::NoPreferences);
    }
    TpgBuilder::new().observe_all(observations.iter().copied()).build()
}

impl TripartitePreferenceGraph {
    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn prefs(&self) -> &[PreferenceNode] {
        &self.prefs
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn pref_count(&self) -> usize {
        self.prefs.len()
    }

    pub fn rep_count(&self) -> usize {
        2 * self.items.len()
    }

    pub fn node_count(&self) -> usize {
        self.user_count() + self.pref_count() + self.rep_count()
    }

    pub fn user_index(&self, user: UserId) -> Option<usize> {
        self.users.binary_search(&user).ok()
    }

    pub fn item_index(&self, item: ItemId) -> Option<usize> {
        self.items.binary_search(&item).ok()
    }

    pub fn pref_index(&self, pref: PreferenceNode) -> Option<usize> {
        self.prefs.binary_search(&pref).ok()
    }

    pub fn rep_index(&self, rep: RepresentativeNode) -> Option<usize> {
        let k = self.item_index(rep.item)?;
        Some(match rep.side {
            Side::Desirable => 2 * k,
            Side::Undesirable => 2 * k + 1,
        })
    }

    pub fn representative(&self, rep: usize) -> RepresentativeNode {
        RepresentativeNode {
            item: self.items[rep / 2],
            side: if rep % 2 == 0 {
                Side::Desirable
            } else {
                Side::Undesirable
            },
        }
    }

    /// Representatives supported by at least one preference. Both sides of
    /// every item own an index, but an item that only ever wins (or only
    /// loses) leaves its other side isolated and out of this set.
    pub fn representatives(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.rep_count()).filter(|&r| !self.rep_prefs[r].is_empty())
    }

    /// Preferences the user agrees with.
    pub fn prefs_of_user(&self, user: usize) -> &[u32] {
        &self.user_prefs[user]
    }

    /// Users agreeing with the preference.
    pub fn users_of_pref(&self, pref: usize) -> &[u32] {
        &self.pref_users[pref]
    }

    /// The two supported representatives: `[winner_d, loser_u]`.
    pub fn reps_of_pref(&self, pref: usize) -> [usize; 2] {
        let p = self.prefs[pref];
        let w = self.item_index(p.winner).unwrap();
        let l = self.item_index(p.loser).unwrap();
        [2 * w, 2 * l + 1]
    }

    /// Preferences supporting the representative.
    pub fn prefs_of_rep(&self, rep: usize) -> &[u32] {
        &self.rep_prefs[rep]
    }

    pub fn degree(&self, node: Node) -> usize {
        match node {
            Node::User(u) => self.user_prefs[u].len(),
            Node::Pref(p) => self.pref_users[p].len() + 2,
            Node::Rep(r) => self.rep_prefs[r].len(),
        }
    }

    /// Neighbours of a node; edges are traversable in both directions.
    pub fn neighbors(&self, node: Node) -> Vec<Node> {
        match node {
            Node::User(u) => self.user_prefs[u].iter().map(|&p| Node::Pref(p as usize)).collect(),
            Node::Pref(p) => self.pref_users[p]
                .iter()
                .map(|&u| Node::User(u as usize))
                .chain(self.reps_of_pref(p).map(Node::Rep))
                .collect(),
            Node::Rep(r) => self.rep_prefs[r].iter().map(|&p| Node::Pref(p as usize)).collect(),
        }
    }

    /// Agreement edges as `(user, pref)` positions.
    pub fn edges_up(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.user_prefs
            .iter()
            .enumerate()
            .flat_map(|(u, ps)| ps.iter().map(move |&p| (u, p as usize)))
    }

    /// Support edges as `(pref, rep)` positions.
    pub fn edges_pr(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.prefs.len()).flat_map(move |p| self.reps_of_pref(p).map(move |r| (p, r)))
    }

    /// Position of a node in the flat layout users, preferences, representatives.
    pub fn flat_index(&self, node: Node) -> usize {
        match node {
            Node::User(u) => u,
            Node::Pref(p) => self.user_count() + p,
            Node::Rep(r) => self.user_count() + self.pref_count() + r,
        }
    }

    /// The observation set the graph was built from.
    pub fn observations(&self) -> Vec<PreferenceObservation> {
        self.edges_up()
            .map(|(u, p)| PreferenceObservation {
                user: self.users[u],
                preferred: self.prefs[p].winner,
                other: self.prefs[p].loser,
            })
            .collect()
    }

    /// Preference nodes without any agreeing user.
    pub fn candidates(&self) -> Vec<PreferenceNode> {
        (0..self.prefs.len())
            .filter(|&p| self.pref_users[p].is_empty())
            .map(|p| self.prefs[p])
            .collect()
    }
}
