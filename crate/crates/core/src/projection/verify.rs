//! Brute-force check that a projection realises exactly the paths its
//! description admits.
//!
//! Two directions are checked from every user:
//! projected paths, with each projected edge expanded back into its
//! defining meta-path, must be admitted by the description; and every
//! preference-graph walk ending at a representative must have a
//! positive-weight projected counterpart iff the description admits it.
//! Walks that reach the same node with the same type history and the same
//! counterpart status behave identically from then on, so they are
//! explored once.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use super::{build_variant, ProjectedGraph, Variant};
use crate::error::{Error, Result};
use crate::metapath::{parse_description, MetaPath, NodeType, TypeSequence};
use crate::preference::{Node, TripartitePreferenceGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A projected path expands to a sequence the description rejects.
    UnadmittedProjectedPath,
    /// An admitted walk has no positive counterpart.
    MissingCounterpart,
    /// A rejected walk still has a positive counterpart.
    SpuriousCounterpart,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub types: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub variant: Option<Variant>,
    pub max_len: usize,
    pub projected_paths: usize,
    pub walks: usize,
    pub admitted: usize,
    /// Rejected walk classes by type sequence; each class is correctly
    /// absent from the projection.
    pub excluded: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn excludes(&self, types: &str) -> bool {
        self.excluded.contains_key(types)
    }
}

/// Runs both directions on the projection of `g` for `variant`.
/// `g = None` stands for an empty preference set and passes vacuously.
pub fn verify_projection(
    g: Option<&TripartitePreferenceGraph>,
    variant: Variant,
    max_len: usize,
    cap: usize,
) -> Result<VerificationReport> {
    let mut report = VerificationReport {
        variant: Some(variant),
        max_len,
        ..Default::default()
    };
    let Some(g) = g else {
        return Ok(report);
    };
    let text = variant
        .description()
        .ok_or_else(|| Error::InvalidConfig("custom projections have no description to verify".into()))?;
    let desc = parse_description(text)?;
    let pg = build_variant(g, variant)?;
    let mut matcher = CachedMatcher {
        desc: &desc,
        cache: HashMap::new(),
    };
    projected_direction(g, &pg, max_len, cap, &mut matcher, &mut report)?;
    walk_direction(g, &pg, max_len, cap, &mut matcher, &mut report)?;
    report.violations.sort_by(|a, b| a.types.cmp(&b.types));
    report.violations.dedup();
    Ok(report)
}

struct CachedMatcher<'a> {
    desc: &'a MetaPath,
    cache: HashMap<Vec<NodeType>, bool>,
}

impl CachedMatcher<'_> {
    fn matches(&mut self, types: &[NodeType]) -> bool {
        if let Some(&m) = self.cache.get(types) {
            return m;
        }
        let m = self.desc.matches(types);
        self.cache.insert(types.to_vec(), m);
        m
    }
}

fn raw_walk(pg: &ProjectedGraph) -> bool {
    pg.variant() == Variant::Grank
}

/// Preference-graph types a projected edge stands for, excluding its source.
fn expansion(pg: &ProjectedGraph, from: NodeType, to: NodeType) -> Vec<NodeType> {
    if raw_walk(pg) {
        return vec![to];
    }
    let path = pg
        .metapaths()
        .iter()
        .find(|s| s.first() == from && s.last() == to)
        .expect("every projected block comes from a meta-path");
    path.types()[1..].to_vec()
}

fn projected_direction(
    g: &TripartitePreferenceGraph,
    pg: &ProjectedGraph,
    max_len: usize,
    cap: usize,
    matcher: &mut CachedMatcher<'_>,
    report: &mut VerificationReport,
) -> Result<()> {
    let step_len = if raw_walk(pg) { 1 } else { 2 };
    let max_steps = max_len / step_len;
    let roster = pg.roster();
    let adj = pg.adjacency();
    let mut seen: HashSet<(usize, Vec<NodeType>)> = HashSet::new();
    let mut stack: Vec<(usize, Vec<NodeType>)> = (0..g.user_count())
        .filter_map(|u| pg.row_of(g, Node::User(u)))
        .map(|row| (row, vec![NodeType::U]))
        .collect();
    while let Some((row, types)) = stack.pop() {
        if !seen.insert((row, types.clone())) {
            continue;
        }
        if seen.len() > cap {
            return Err(Error::WalkLimit { cap });
        }
        report.projected_paths += 1;
        let here = roster.row_type(row);
        if here == NodeType::R && types.len() > 1 && !matcher.matches(&types) {
            report.violations.push(Violation {
                kind: ViolationKind::UnadmittedProjectedPath,
                types: TypeSequence::new(types.clone())?.to_string(),
            });
        }
        if (types.len() - 1) / step_len >= max_steps {
            continue;
        }
        let (cols, _) = adj.row(row);
        for &c in cols {
            let c = c as usize;
            let mut next = types.clone();
            next.extend(expansion(pg, here, roster.row_type(c)));
            stack.push((c, next));
        }
    }
    Ok(())
}

/// Projected weight of the path that stands for `walk`, or `None` when a
/// segment has no projected edge. Projections consume the walk two edges
/// at a time; the raw walk one edge at a time.
pub fn counterpart(g: &TripartitePreferenceGraph, pg: &ProjectedGraph, walk: &[Node]) -> Option<f64> {
    let step = if raw_walk(pg) { 1 } else { 2 };
    if walk.is_empty() || (walk.len() - 1) % step != 0 {
        return None;
    }
    let mut weight = 1.0;
    for k in (step..walk.len()).step_by(step) {
        let from = pg.row_of(g, walk[k - step])?;
        let to = pg.row_of(g, walk[k])?;
        let w = pg.adjacency().get(from, to);
        if w <= 0.0 {
            return None;
        }
        weight *= w;
    }
    Some(weight)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct WalkState {
    node: Node,
    anchor: Node,
    types: Vec<NodeType>,
    alive: bool,
}

fn walk_direction(
    g: &TripartitePreferenceGraph,
    pg: &ProjectedGraph,
    max_len: usize,
    cap: usize,
    matcher: &mut CachedMatcher<'_>,
    report: &mut VerificationReport,
) -> Result<()> {
    let step = if raw_walk(pg) { 1 } else { 2 };
    let adj = pg.adjacency();
    let linked = |a: Node, b: Node| match (pg.row_of(g, a), pg.row_of(g, b)) {
        (Some(x), Some(y)) => adj.get(x, y) > 0.0,
        _ => false,
    };
    let mut seen: HashSet<WalkState> = HashSet::new();
    let mut stack: Vec<WalkState> = (0..g.user_count())
        .map(|u| WalkState {
            node: Node::User(u),
            anchor: Node::User(u),
            types: vec![NodeType::U],
            alive: true,
        })
        .collect();
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        if seen.len() > cap {
            return Err(Error::WalkLimit { cap });
        }
        report.walks += 1;
        let len = state.types.len() - 1;
        if len > 0 && state.node.node_type() == NodeType::R {
            let admitted = matcher.matches(&state.types);
            let label = || TypeSequence::new(state.types.clone()).map(|t| t.to_string());
            match (admitted, state.alive) {
                (true, true) => report.admitted += 1,
                (false, false) => *report.excluded.entry(label()?).or_default() += 1,
                (true, false) => report.violations.push(Violation {
                    kind: ViolationKind::MissingCounterpart,
                    types: label()?,
                }),
                (false, true) => report.violations.push(Violation {
                    kind: ViolationKind::SpuriousCounterpart,
                    types: label()?,
                }),
            }
        }
        if len >= max_len {
            continue;
        }
        for next in g.neighbors(state.node) {
            let mut types = state.types.clone();
            types.push(next.node_type());
            let checkpoint = (len + 1) % step == 0;
            let (anchor, alive) = if checkpoint {
                (next, state.alive && linked(state.anchor, next))
            } else {
                (state.anchor, state.alive)
            };
            stack.push(WalkState {
                node: next,
                anchor,
                types,
                alive,
            });
        }
    }
    Ok(())
}
