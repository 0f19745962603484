//! Bounded walk enumeration over a preference graph.
//!
//! Walks may revisit nodes. Length is counted in edges, so `max_len = 0`
//! yields only the start node.

use super::TypeSequence;
use crate::error::{Error, Result};
use crate::preference::{Node, TripartitePreferenceGraph};

/// Default ceiling on the number of walks a single enumeration may visit.
pub const DEFAULT_WALK_CAP: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub nodes: Vec<Node>,
}

impl Walk {
    pub fn types(&self) -> TypeSequence {
        TypeSequence::new(self.nodes.iter().map(|n| n.node_type()).collect())
            .expect("graph walks follow the schema")
    }

    pub fn start(&self) -> Node {
        self.nodes[0]
    }

    pub fn end(&self) -> Node {
        *self.nodes.last().expect("walks are non-empty")
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 1
    }
}

/// Calls `visit` on every walk from `start` with at most `max_len` edges,
/// prefixes before extensions. Returning `false` from `visit` prunes the
/// extensions of that walk. Fails once more than `cap` walks were visited.
pub fn for_each_walk<F>(
    g: &TripartitePreferenceGraph,
    start: Node,
    max_len: usize,
    cap: usize,
    mut visit: F,
) -> Result<usize>
where
    F: FnMut(&[Node]) -> bool,
{
    let mut path = vec![start];
    let mut count = 0usize;
    let mut stack: Vec<(Vec<Node>, usize)> = Vec::new();
    count += 1;
    if count > cap {
        return Err(Error::WalkLimit { cap });
    }
    if !visit(&path) || max_len == 0 {
        return Ok(count);
    }
    stack.push((g.neighbors(start), 0));
    while let Some((next, i)) = stack.last_mut() {
        if *i == next.len() {
            stack.pop();
            path.pop();
            continue;
        }
        let node = next[*i];
        *i += 1;
        path.push(node);
        count += 1;
        if count > cap {
            return Err(Error::WalkLimit { cap });
        }
        if visit(&path) && path.len() <= max_len {
            stack.push((g.neighbors(node), 0));
        } else {
            path.pop();
        }
    }
    Ok(count)
}

/// Every walk from `start` with at most `max_len` edges.
pub fn enumerate_paths(
    g: &TripartitePreferenceGraph,
    start: Node,
    max_len: usize,
    cap: usize,
) -> Result<Vec<Walk>> {
    let mut out = Vec::new();
    for_each_walk(g, start, max_len, cap, |nodes| {
        out.push(Walk { nodes: nodes.to_vec() });
        true
    })?;
    Ok(out)
}
