//! Transition matrices over the preference graph and its projections onto
//! users and representatives.
//!
//! Every basic matrix divides by the full degree of its row node, so a
//! user's `UPU` and `UPR` rows together carry exactly the two-step walk
//! distribution. Projected rows are normalised jointly over every
//! meta-path that starts at the row's type.

mod verify;

pub use verify::{counterpart, verify_projection, VerificationReport, Violation, ViolationKind};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metapath::{NodeType, TypeSequence};
use crate::preference::{ItemId, Node, PreferenceNode, RepresentativeNode, Side, TripartitePreferenceGraph, UserId};
use crate::sparse::CsrMatrix;

/// A sparse matrix whose rows are nodes of one type and columns of another.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub from: NodeType,
    pub to: NodeType,
    pub matrix: CsrMatrix,
}

impl TransitionMatrix {
    pub fn row_sums(&self) -> Vec<f64> {
        self.matrix.row_sums()
    }
}

/// The four one-step matrices `T_up`, `T_pu`, `T_pr`, `T_rp`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasicTransitions {
    pub up: TransitionMatrix,
    pub pu: TransitionMatrix,
    pub pr: TransitionMatrix,
    pub rp: TransitionMatrix,
}

impl BasicTransitions {
    fn layer_size(&self, t: NodeType) -> usize {
        match t {
            NodeType::U => self.up.matrix.rows(),
            NodeType::P => self.up.matrix.cols(),
            NodeType::R => self.pr.matrix.cols(),
        }
    }

    fn step(&self, from: NodeType, to: NodeType) -> &TransitionMatrix {
        match (from, to) {
            (NodeType::U, NodeType::P) => &self.up,
            (NodeType::P, NodeType::U) => &self.pu,
            (NodeType::P, NodeType::R) => &self.pr,
            (NodeType::R, NodeType::P) => &self.rp,
            _ => unreachable!("type sequences only contain schema edges"),
        }
    }
}

pub fn basic_transitions(g: &TripartitePreferenceGraph) -> BasicTransitions {
    let (nu, np, nr) = (g.user_count(), g.pref_count(), g.rep_count());
    let inv = |n: Node| 1.0 / g.degree(n) as f64;
    let up = (0..nu)
        .map(|u| {
            let w = inv(Node::User(u));
            g.prefs_of_user(u).iter().map(|&p| (p, w)).collect()
        })
        .collect();
    let pu = (0..np)
        .map(|p| {
            let w = inv(Node::Pref(p));
            g.users_of_pref(p).iter().map(|&u| (u, w)).collect()
        })
        .collect();
    let pr = (0..np)
        .map(|p| {
            let w = inv(Node::Pref(p));
            g.reps_of_pref(p).iter().map(|&r| (r as u32, w)).collect()
        })
        .collect();
    let rp = (0..nr)
        .map(|r| {
            if g.degree(Node::Rep(r)) == 0 {
                return Vec::new();
            }
            let w = inv(Node::Rep(r));
            g.prefs_of_rep(r).iter().map(|&p| (p, w)).collect()
        })
        .collect();
    let wrap = |from, to, cols, rows| TransitionMatrix {
        from,
        to,
        matrix: CsrMatrix::from_rows(cols, rows),
    };
    BasicTransitions {
        up: wrap(NodeType::U, NodeType::P, np, up),
        pu: wrap(NodeType::P, NodeType::U, nu, pu),
        pr: wrap(NodeType::P, NodeType::R, nr, pr),
        rp: wrap(NodeType::R, NodeType::P, np, rp),
    }
}

/// Product of the basic matrices along `path`; the identity for a single type.
pub fn metapath_transition(path: &TypeSequence, basics: &BasicTransitions) -> TransitionMatrix {
    let types = path.types();
    let mut m = CsrMatrix::identity(basics.layer_size(types[0]));
    for w in types.windows(2) {
        m = m.matmul(&basics.step(w[0], w[1]).matrix);
    }
    TransitionMatrix {
        from: path.first(),
        to: path.last(),
        matrix: m,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Unc,
    Pnc,
    Rnc,
    Grank,
    Custom,
}

impl Variant {
    pub const EVALUATED: [Variant; 4] = [Variant::Unc, Variant::Pnc, Variant::Rnc, Variant::Grank];

    /// The meta-path set a projection variant is built from; empty for
    /// the raw walk and for custom sets.
    pub fn metapaths(self) -> Vec<TypeSequence> {
        let names: &[&str] = match self {
            Variant::Unc => &["UPU", "UPR", "RPU"],
            Variant::Pnc => &["UPU", "UPR"],
            Variant::Rnc => &["UPR", "RPU"],
            Variant::Grank | Variant::Custom => &[],
        };
        names.iter().map(|s| s.parse().expect("canned meta-paths are valid")).collect()
    }

    /// Description of the user-to-representative paths the variant realises.
    pub fn description(self) -> Option<&'static str> {
        use crate::metapath::*;
        match self {
            Variant::Unc => Some(UNC_DESCRIPTION),
            Variant::Pnc => Some(PNC_DESCRIPTION),
            Variant::Rnc => Some(RNC_DESCRIPTION),
            Variant::Grank => Some(GRANK_DESCRIPTION),
            Variant::Custom => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Unc => "unc",
            Variant::Pnc => "pnc",
            Variant::Rnc => "rnc",
            Variant::Grank => "grank",
            Variant::Custom => "custom",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unc" => Ok(Variant::Unc),
            "pnc" => Ok(Variant::Pnc),
            "rnc" => Ok(Variant::Rnc),
            "grank" => Ok(Variant::Grank),
            "custom" => Ok(Variant::Custom),
            other => Err(Error::InvalidConfig(format!(
                "unknown variant {other:?} (expected unc, pnc, rnc or grank)"
            ))),
        }
    }
}

/// Row and column layout of a projected graph: users, then preferences
/// (raw walk only), then two representatives per item (`2k` desirable,
/// `2k + 1` undesirable). Every list is sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roster {
    pub users: Vec<UserId>,
    pub prefs: Vec<PreferenceNode>,
    pub items: Vec<ItemId>,
}

impl Roster {
    pub fn len(&self) -> usize {
        self.users.len() + self.prefs.len() + 2 * self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn rep_offset(&self) -> usize {
        self.users.len() + self.prefs.len()
    }

    pub fn user_row(&self, user: UserId) -> Option<usize> {
        self.users.binary_search(&user).ok()
    }

    pub fn rep_row(&self, item: ItemId, side: Side) -> Option<usize> {
        let k = self.items.binary_search(&item).ok()?;
        Some(self.rep_offset() + 2 * k + usize::from(side == Side::Undesirable))
    }

    pub fn row_type(&self, row: usize) -> NodeType {
        if row < self.users.len() {
            NodeType::U
        } else if row < self.rep_offset() {
            NodeType::P
        } else {
            NodeType::R
        }
    }

    /// The representative at `row`, if the row is one.
    pub fn representative(&self, row: usize) -> Option<RepresentativeNode> {
        let r = row.checked_sub(self.rep_offset())?;
        let item = *self.items.get(r / 2)?;
        Some(RepresentativeNode {
            item,
            side: if r % 2 == 0 { Side::Desirable } else { Side::Undesirable },
        })
    }
}

/// A weighted directed graph over a roster with row-stochastic adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedGraph {
    variant: Variant,
    metapaths: Vec<TypeSequence>,
    roster: Roster,
    adjacency: CsrMatrix,
    dangling: Vec<u32>,
}

impl ProjectedGraph {
    /// Assembles a graph from stored parts, checking the shapes agree.
    pub fn from_parts(
        variant: Variant,
        metapaths: Vec<TypeSequence>,
        roster: Roster,
        adjacency: CsrMatrix,
    ) -> Option<Self> {
        if adjacency.rows() != roster.len() || adjacency.cols() != roster.len() {
            return None;
        }
        let dangling = (0..adjacency.rows())
            .filter(|&r| adjacency.row_len(r) == 0)
            .map(|r| r as u32)
            .collect();
        Some(ProjectedGraph {
            variant,
            metapaths,
            roster,
            adjacency,
            dangling,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn metapaths(&self) -> &[TypeSequence] {
        &self.metapaths
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    /// Rows without out-edges, ascending.
    pub fn dangling(&self) -> &[u32] {
        &self.dangling
    }

    pub fn is_dangling(&self, row: usize) -> bool {
        self.dangling.binary_search(&(row as u32)).is_ok()
    }

    /// Row of a preference-graph node, when the roster carries its layer.
    pub fn row_of(&self, g: &TripartitePreferenceGraph, node: Node) -> Option<usize> {
        match node {
            Node::User(u) => self.roster.user_row(g.users()[u]),
            Node::Pref(p) => self
                .roster
                .prefs
                .binary_search(&g.prefs()[p])
                .ok()
                .map(|k| self.roster.users.len() + k),
            Node::Rep(r) => {
                let rep = g.representative(r);
                self.roster.rep_row(rep.item, rep.side)
            }
        }
    }

    /// Stored entries whose row and column have the given types.
    pub fn block_nnz(&self, from: NodeType, to: NodeType) -> usize {
        self.adjacency
            .triplets()
            .filter(|&(r, c, _)| self.roster.row_type(r) == from && self.roster.row_type(c) == to)
            .count()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.nnz()
    }
}

fn projected_roster(g: &TripartitePreferenceGraph) -> Roster {
    Roster {
        users: g.users().to_vec(),
        prefs: Vec::new(),
        items: g.items().to_vec(),
    }
}

/// Projects the graph over an arbitrary meta-path set whose members start
/// and end at users or representatives.
pub fn project(g: &TripartitePreferenceGraph, metapaths: &[TypeSequence]) -> Result<ProjectedGraph> {
    let mut theta: Vec<TypeSequence> = metapaths.to_vec();
    theta.sort_by_key(|s| s.to_string());
    theta.dedup();
    if theta.is_empty() {
        return Err(Error::InvalidConfig("empty meta-path set".into()));
    }
    for s in &theta {
        if s.len() < 2 || s.first() == NodeType::P || s.last() == NodeType::P {
            return Err(Error::InvalidConfig(format!(
                "meta-path {s} must have at least one edge and start and end at U or R"
            )));
        }
    }
    let variant = [Variant::Unc, Variant::Pnc, Variant::Rnc]
        .into_iter()
        .find(|v| {
            let mut m = v.metapaths();
            m.sort_by_key(|s| s.to_string());
            m == theta
        })
        .unwrap_or(Variant::Custom);
    Ok(project_with(g, theta, variant))
}

fn project_with(g: &TripartitePreferenceGraph, mut theta: Vec<TypeSequence>, variant: Variant) -> ProjectedGraph {
    theta.sort_by_key(|s| s.to_string());
    let basics = basic_transitions(g);
    let roster = projected_roster(g);
    let offset = |t: NodeType| match t {
        NodeType::U => 0,
        NodeType::R => roster.users.len(),
        NodeType::P => unreachable!("projections exclude preference nodes"),
    };
    let n = roster.len();
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for path in &theta {
        let block = metapath_transition(path, &basics);
        let (ro, co) = (offset(block.from), offset(block.to));
        for (r, c, v) in block.matrix.triplets() {
            rows[ro + r].push(((co + c) as u32, v));
        }
    }
    let mut adjacency = CsrMatrix::from_rows(n, rows);
    let factors: Vec<f64> = adjacency
        .row_sums()
        .into_iter()
        .map(|s| if s > 0.0 { 1.0 / s } else { 0.0 })
        .collect();
    adjacency.scale_rows(&factors);
    ProjectedGraph::from_parts(variant, theta, roster, adjacency).expect("square over its roster")
}

/// Users reach users through shared preferences and representatives
/// through their own votes; representatives reach their voters.
pub fn project_unc(g: &TripartitePreferenceGraph) -> ProjectedGraph {
    project_with(g, Variant::Unc.metapaths(), Variant::Unc)
}

/// Users reach users and representatives; representatives are dangling.
pub fn project_pnc(g: &TripartitePreferenceGraph) -> ProjectedGraph {
    project_with(g, Variant::Pnc.metapaths(), Variant::Pnc)
}

/// Bipartite: users reach representatives and back.
pub fn project_rnc(g: &TripartitePreferenceGraph) -> ProjectedGraph {
    project_with(g, Variant::Rnc.metapaths(), Variant::Rnc)
}

/// The uniform one-step walk on the undirected preference graph.
pub fn tpg_transition(g: &TripartitePreferenceGraph) -> ProjectedGraph {
    let roster = Roster {
        users: g.users().to_vec(),
        prefs: g.prefs().to_vec(),
        items: g.items().to_vec(),
    };
    let n = g.node_count();
    let rows: Vec<Vec<(u32, f64)>> = (0..n)
        .map(|i| {
            let node = flat_node(g, i);
            let nb = g.neighbors(node);
            let w = 1.0 / nb.len().max(1) as f64;
            nb.into_iter().map(|m| (g.flat_index(m) as u32, w)).collect()
        })
        .collect();
    ProjectedGraph::from_parts(Variant::Grank, Vec::new(), roster, CsrMatrix::from_rows(n, rows))
        .expect("square over its roster")
}

fn flat_node(g: &TripartitePreferenceGraph, i: usize) -> Node {
    let (nu, np) = (g.user_count(), g.pref_count());
    if i < nu {
        Node::User(i)
    } else if i < nu + np {
        Node::Pref(i - nu)
    } else {
        Node::Rep(i - nu - np)
    }
}

/// Builds the graph a variant ranks on.
pub fn build_variant(g: &TripartitePreferenceGraph, variant: Variant) -> Result<ProjectedGraph> {
    match variant {
        Variant::Unc => Ok(project_unc(g)),
        Variant::Pnc => Ok(project_pnc(g)),
        Variant::Rnc => Ok(project_rnc(g)),
        Variant::Grank => Ok(tpg_transition(g)),
        Variant::Custom => Err(Error::InvalidConfig(
            "custom projections need an explicit meta-path set".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::{build_tpg, PreferenceObservation};

    fn obs(user: u32, preferred: u32, other: u32) -> PreferenceObservation {
        PreferenceObservation {
            user: UserId(user),
            preferred: ItemId(preferred),
            other: ItemId(other),
        }
    }

    fn minimal() -> TripartitePreferenceGraph {
        build_tpg(&[obs(0, 0, 1)]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn basic_matrices_on_the_minimal_graph() {
        let b = basic_transitions(&minimal());
        assert_eq!(b.up.matrix.get(0, 0), 1.0);
        assert!(close(b.pu.matrix.get(0, 0), 1.0 / 3.0));
        assert!(close(b.pr.matrix.get(0, 0), 1.0 / 3.0));
        assert!(close(b.pr.matrix.get(0, 3), 1.0 / 3.0));
        assert_eq!(b.rp.matrix.get(0, 0), 1.0);
        assert_eq!(b.rp.matrix.row_len(1), 0);
    }

    #[test]
    fn user_rows_are_uniform_over_degree() {
        let g = build_tpg(&[obs(0, 0, 1), obs(0, 2, 1)]).unwrap();
        let b = basic_transitions(&g);
        assert_eq!(b.up.matrix.row(0).1, &[0.5, 0.5]);
    }

    #[test]
    fn composite_products() {
        let b = basic_transitions(&minimal());
        let upu = metapath_transition(&"UPU".parse().unwrap(), &b);
        assert!(close(upu.matrix.get(0, 0), 1.0 / 3.0));
        let u = metapath_transition(&"U".parse().unwrap(), &b);
        assert_eq!(u.matrix, CsrMatrix::identity(1));
    }

    #[test]
    fn rnc_user_row_on_the_minimal_graph() {
        let pg = project_rnc(&minimal());
        let a_d = pg.roster().rep_row(ItemId(0), Side::Desirable).unwrap();
        let b_u = pg.roster().rep_row(ItemId(1), Side::Undesirable).unwrap();
        assert!(close(pg.adjacency().get(0, a_d), 0.5));
        assert!(close(pg.adjacency().get(0, b_u), 0.5));
        assert_eq!(pg.block_nnz(NodeType::U, NodeType::U), 0);
    }

    #[test]
    fn pnc_representatives_are_dangling() {
        let g = build_tpg(&[obs(0, 0, 1), obs(1, 0, 1), obs(1, 2, 0)]).unwrap();
        let pg = project_pnc(&g);
        for r in g.user_count()..pg.roster().len() {
            assert!(pg.is_dangling(r));
        }
        assert_eq!(pg.block_nnz(NodeType::R, NodeType::U), 0);
    }

    #[test]
    fn generic_projection_recognises_canned_sets() {
        let g = minimal();
        let theta: Vec<TypeSequence> = ["UPR", "UPU"].iter().map(|s| s.parse().unwrap()).collect();
        let pg = project(&g, &theta).unwrap();
        assert_eq!(pg.variant(), Variant::Pnc);
        assert_eq!(pg, project_pnc(&g));
        assert!(project(&g, &["UP".parse().unwrap()]).is_err());
        assert!(project(&g, &[]).is_err());
    }

    #[test]
    fn raw_walk_is_uniform_over_neighbours() {
        let g = minimal();
        let pg = tpg_transition(&g);
        let p = g.flat_index(Node::Pref(0));
        assert_eq!(pg.adjacency().row_len(p), 3);
        for &w in pg.adjacency().row(p).1 {
            assert!(close(w, 1.0 / 3.0));
        }
        assert_eq!(pg.row_of(&g, Node::Pref(0)), Some(p));
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::EVALUATED {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("pagerank".parse::<Variant>().is_err());
    }
}
