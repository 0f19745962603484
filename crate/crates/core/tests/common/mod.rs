#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use prefgraph::metapath::{MetaPath, NodeType, Seam, TypeSequence};
use prefgraph::preference::{build_tpg, derive_preferences, ItemId, Rating, TripartitePreferenceGraph, UserId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TYPES: [NodeType; 3] = [NodeType::U, NodeType::P, NodeType::R];

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// `PREFGRAPH_ML100K` or the fetched copy under `data/`.
pub fn ml100k() -> Option<PathBuf> {
    let p = std::env::var_os("PREFGRAPH_ML100K")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/ml-100k/u.data"));
    p.is_file().then_some(p)
}

pub fn schema_adjacent(a: NodeType, b: NodeType) -> bool {
    matches!(
        (a, b),
        (NodeType::U, NodeType::P) | (NodeType::P, NodeType::U) | (NodeType::P, NodeType::R) | (NodeType::R, NodeType::P)
    )
}

/// Explicit denotation of `e`, truncated at `max` types.
pub fn expand(e: &MetaPath, max: usize) -> BTreeSet<Vec<NodeType>> {
    match e {
        MetaPath::Atom(t) => [vec![*t]].into(),
        MetaPath::Select(a, b) => {
            let mut s = expand(a, max);
            s.extend(expand(b, max));
            s
        }
        MetaPath::Join(a, b, seam) => {
            let (xs, ys) = (expand(a, max), expand(b, max));
            let mut out = BTreeSet::new();
            for x in &xs {
                for y in &ys {
                    if let Some(z) = glue(x, y, *seam) {
                        if z.len() <= max {
                            out.insert(z);
                        }
                    }
                }
            }
            out
        }
        MetaPath::Repeat(a) => {
            let body = expand(a, max);
            let mut out: BTreeSet<Vec<NodeType>> = [vec![a.first_type()]].into();
            let mut frontier = out.clone();
            while !frontier.is_empty() {
                let mut next = BTreeSet::new();
                for x in &frontier {
                    for y in &body {
                        if let Some(z) = glue(x, y, Seam::Shared) {
                            if z.len() <= max && !out.contains(&z) {
                                next.insert(z);
                            }
                        }
                    }
                }
                out.extend(next.iter().cloned());
                frontier = next;
            }
            out
        }
    }
}

fn glue(x: &[NodeType], y: &[NodeType], seam: Seam) -> Option<Vec<NodeType>> {
    let (last, first) = (*x.last()?, *y.first()?);
    let mut z = x.to_vec();
    match seam {
        Seam::Shared if last == first => z.extend_from_slice(&y[1..]),
        Seam::Edge if schema_adjacent(last, first) => z.extend_from_slice(y),
        _ => return None,
    }
    Some(z)
}

/// Every sequence over {U, P, R} with 1..=max types, well-typed or not.
pub fn all_sequences(max: usize) -> Vec<Vec<NodeType>> {
    let mut out: Vec<Vec<NodeType>> = TYPES.iter().map(|&t| vec![t]).collect();
    let mut layer = out.clone();
    for _ in 1..max {
        layer = layer
            .iter()
            .flat_map(|s| {
                TYPES.iter().map(move |&t| {
                    let mut n = s.clone();
                    n.push(t);
                    n
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Every schema-valid sequence with 1..=max types.
pub fn typed_sequences(max: usize) -> Vec<Vec<NodeType>> {
    all_sequences(max)
        .into_iter()
        .filter(|s| s.windows(2).all(|w| schema_adjacent(w[0], w[1])))
        .collect()
}

/// A schema walk from `a` to `b`, detouring at random.
fn schema_path(a: NodeType, b: NodeType, rng: &mut ChaCha8Rng) -> MetaPath {
    let mut seq = vec![a];
    for _ in 0..rng.random_range(0..3) {
        let cur = *seq.last().unwrap();
        let next: Vec<NodeType> = TYPES.iter().copied().filter(|&t| schema_adjacent(cur, t)).collect();
        seq.push(next[rng.random_range(0..next.len())]);
    }
    let cur = *seq.last().unwrap();
    if cur != b {
        if !schema_adjacent(cur, b) {
            seq.push(NodeType::P);
        }
        seq.push(b);
    }
    MetaPath::sequence(&TypeSequence::new(seq).expect("schema walk"))
}

/// Random well-typed expression from `a` to `b` with about `budget` operators.
pub fn random_expr(a: NodeType, b: NodeType, budget: u32, rng: &mut ChaCha8Rng) -> MetaPath {
    if budget == 0 {
        return schema_path(a, b, rng);
    }
    let rest = budget - 1;
    match rng.random_range(0..5) {
        0 => {
            let mid = TYPES[rng.random_range(0..3)];
            let l = random_expr(a, mid, rest / 2, rng);
            let r = random_expr(mid, b, rest - rest / 2, rng);
            MetaPath::join(l, r).expect("shared seam")
        }
        1 => {
            let (m1, m2) = loop {
                let m1 = TYPES[rng.random_range(0..3)];
                let m2 = TYPES[rng.random_range(0..3)];
                if schema_adjacent(m1, m2) {
                    break (m1, m2);
                }
            };
            let l = random_expr(a, m1, rest / 2, rng);
            let r = random_expr(m2, b, rest - rest / 2, rng);
            MetaPath::link(l, r).expect("edge seam")
        }
        2 => {
            let l = random_expr(a, b, rest / 2, rng);
            let r = random_expr(a, b, rest - rest / 2, rng);
            MetaPath::select(l, r).expect("same endpoints")
        }
        3 => {
            let body = random_expr(a, a, rest / 2, rng);
            let star = MetaPath::repeat(body).expect("loop");
            MetaPath::join(star, random_expr(a, b, rest - rest / 2, rng)).expect("shared seam")
        }
        _ => {
            let body = random_expr(b, b, rest / 2, rng);
            let star = MetaPath::repeat(body).expect("loop");
            MetaPath::join(random_expr(a, b, rest - rest / 2, rng), star).expect("shared seam")
        }
    }
}

pub fn random_expr_seeded(seed: u64, budget: u32) -> MetaPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = TYPES[rng.random_range(0..3)];
    let b = TYPES[rng.random_range(0..3)];
    random_expr(a, b, budget, &mut rng)
}

pub fn ratings(rows: &[(u32, u32, u8)]) -> Vec<Rating> {
    let mut seen = BTreeSet::new();
    rows.iter()
        .filter(|&&(u, i, _)| seen.insert((u, i)))
        .map(|&(u, i, v)| Rating {
            user: UserId(u),
            item: ItemId(i),
            value: f64::from(v),
        })
        .collect()
}

/// Preference graph of the given `(user, item, stars)` rows; `None` when
/// they hold no strict preference.
pub fn tpg(rows: &[(u32, u32, u8)]) -> Option<TripartitePreferenceGraph> {
    build_tpg(&derive_preferences(&ratings(rows))).ok()
}

/// Random ratings for at most `users` users and `items` items.
pub fn random_rows(seed: u64, users: u32, items: u32) -> Vec<(u32, u32, u8)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for u in 0..users {
        for i in 0..items {
            if rng.random_bool(0.6) {
                rows.push((u, i, rng.random_range(1..=5)));
            }
        }
    }
    rows
}

/// A random graph with at most 6 users and 6 items that holds at least
/// one preference.
pub fn random_tpg(seed: u64) -> TripartitePreferenceGraph {
    (0..)
        .find_map(|k| tpg(&random_rows(seed.wrapping_mul(1_000).wrapping_add(k), 6, 6)))
        .expect("some draw holds a preference")
}

pub mod strategy {
    use proptest::prelude::*;

    /// `(user, item, stars)` rows over at most `users × items` cells.
    pub fn rows(users: u32, items: u32) -> impl Strategy<Value = Vec<(u32, u32, u8)>> {
        proptest::collection::vec((0..users, 0..items, 1u8..=5), 1..(users * items) as usize)
    }
}
