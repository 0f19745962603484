//! Removal of shared-endpoint joins next to repeats.
//!
//! `α*.β` with `β = t'_1 … t'_n` becomes `α*` followed by `t'_2 … t'_n`
//! over an edge, and `β.α*` becomes `t'_1 … t'_{n-1}` followed by `α*`.
//! A single-type `β` simply disappears. Joins that do not touch a repeat
//! are left as written.

use super::{MetaPath, Seam};

pub fn simplify(e: &MetaPath) -> MetaPath {
    match e {
        MetaPath::Atom(t) => MetaPath::Atom(*t),
        MetaPath::Select(a, b) => MetaPath::Select(Box::new(simplify(a)), Box::new(simplify(b))),
        MetaPath::Repeat(a) => MetaPath::Repeat(Box::new(simplify(a))),
        MetaPath::Join(a, b, Seam::Edge) => {
            MetaPath::Join(Box::new(simplify(a)), Box::new(simplify(b)), Seam::Edge)
        }
        MetaPath::Join(a, b, Seam::Shared) => {
            let (a, b) = (simplify(a), simplify(b));
            if ends_with_repeat(&a) {
                match strip_first(&b) {
                    Some(None) => return a,
                    Some(Some(rest)) => return append(a, rest, Seam::Edge),
                    None => {}
                }
            }
            if starts_with_repeat(&b) {
                match strip_last(&a) {
                    Some(None) => return b,
                    Some(Some(rest)) => return append(rest, b, Seam::Edge),
                    None => {}
                }
            }
            MetaPath::Join(Box::new(a), Box::new(b), Seam::Shared)
        }
    }
}

/// Joins keeping chains left-nested, the shape the parser produces.
fn append(a: MetaPath, b: MetaPath, seam: Seam) -> MetaPath {
    match b {
        MetaPath::Join(l, r, inner) => MetaPath::Join(Box::new(append(a, *l, seam)), r, inner),
        b => MetaPath::Join(Box::new(a), Box::new(b), seam),
    }
}

fn ends_with_repeat(e: &MetaPath) -> bool {
    match e {
        MetaPath::Repeat(_) => true,
        MetaPath::Join(_, r, _) => ends_with_repeat(r),
        _ => false,
    }
}

fn starts_with_repeat(e: &MetaPath) -> bool {
    match e {
        MetaPath::Repeat(_) => true,
        MetaPath::Join(l, _, _) => starts_with_repeat(l),
        _ => false,
    }
}

/// Drops the leading type of every denoted sequence when the description
/// starts with a plain type. `Some(None)` means nothing remains;
/// `None` means the leading type sits under a select or repeat.
fn strip_first(e: &MetaPath) -> Option<Option<MetaPath>> {
    match e {
        MetaPath::Atom(_) => Some(None),
        MetaPath::Join(l, r, seam) => match (strip_first(l)?, seam) {
            (None, Seam::Edge) => Some(Some((**r).clone())),
            // `t.r` denotes exactly `r`.
            (None, Seam::Shared) => strip_first(r),
            (Some(rest), seam) => Some(Some(MetaPath::Join(Box::new(rest), r.clone(), *seam))),
        },
        MetaPath::Select(..) | MetaPath::Repeat(_) => None,
    }
}

fn strip_last(e: &MetaPath) -> Option<Option<MetaPath>> {
    match e {
        MetaPath::Atom(_) => Some(None),
        MetaPath::Join(l, r, seam) => match (strip_last(r)?, seam) {
            (None, Seam::Edge) => Some(Some((**l).clone())),
            (None, Seam::Shared) => strip_last(l),
            (Some(rest), seam) => Some(Some(MetaPath::Join(l.clone(), Box::new(rest), *seam))),
        },
        MetaPath::Select(..) | MetaPath::Repeat(_) => None,
    }
}
