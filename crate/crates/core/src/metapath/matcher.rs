//! Membership test by simulating the expression over end positions.
//!
//! `ends(e, s, i)` is the set of `j` such that `s[i..=j]` is denoted by
//! `e`. Every denoted sequence is non-empty, so positions always advance
//! or stay put, and repeat is a fixpoint over reachable end positions.

use std::collections::BTreeSet;

use super::{MetaPath, NodeType, Seam, TypeSequence};

pub(super) fn matches(e: &MetaPath, s: &[NodeType]) -> bool {
    if s.is_empty() {
        return false;
    }
    ends(e, s, 0).contains(&(s.len() - 1))
}

fn ends(e: &MetaPath, s: &[NodeType], i: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    if i >= s.len() {
        return out;
    }
    match e {
        MetaPath::Atom(t) => {
            if s[i] == *t {
                out.insert(i);
            }
        }
        MetaPath::Join(a, b, seam) => {
            for j in ends(a, s, i) {
                let next = match seam {
                    Seam::Shared => j,
                    Seam::Edge => j + 1,
                };
                out.extend(ends(b, s, next));
            }
        }
        MetaPath::Select(a, b) => {
            out.extend(ends(a, s, i));
            out.extend(ends(b, s, i));
        }
        MetaPath::Repeat(a) => {
            if s[i] != a.first_type() {
                return out;
            }
            out.insert(i);
            let mut frontier = vec![i];
            while let Some(j) = frontier.pop() {
                for k in ends(a, s, j) {
                    if out.insert(k) {
                        frontier.push(k);
                    }
                }
            }
        }
    }
    out
}

/// Explicit denotation of a repeat-free description, capped at `max_len`.
pub(super) fn expand_finite(e: &MetaPath, max_len: usize) -> Vec<TypeSequence> {
    fn go(e: &MetaPath, max_len: usize) -> BTreeSet<Vec<NodeType>> {
        match e {
            MetaPath::Atom(t) => [vec![*t]].into_iter().filter(|s| s.len() <= max_len).collect(),
            MetaPath::Join(a, b, seam) => {
                let (left, right) = (go(a, max_len), go(b, max_len));
                let mut out = BTreeSet::new();
                for x in &left {
                    for y in &right {
                        let mut s = x.clone();
                        match seam {
                            Seam::Shared => s.extend_from_slice(&y[1..]),
                            Seam::Edge => s.extend_from_slice(y),
                        }
                        if s.len() <= max_len {
                            out.insert(s);
                        }
                    }
                }
                out
            }
            MetaPath::Select(a, b) => {
                let mut out = go(a, max_len);
                out.extend(go(b, max_len));
                out
            }
            MetaPath::Repeat(_) => unreachable!("repeat-free expansion called on a repeat"),
        }
    }
    go(e, max_len)
        .into_iter()
        .map(|s| TypeSequence::new(s).expect("well-typed descriptions denote schema-valid sequences"))
        .collect()
}
