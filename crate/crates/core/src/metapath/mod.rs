//! Meta-path descriptions over the preference-graph schema `U – P – R`.
//!
//! A description denotes a set of node-type sequences. Leaves are single
//! node types (a zero-length path). Joining two descriptions concatenates
//! their sequences: when the left one ends on the type the right one starts
//! with, the shared type is written once (`UP.PR = UPR`); when the two
//! types are adjacent in the schema the sequences are linked by an edge
//! (`U` then `PR` gives `UPR`). Select (`|`) is set union and repeat (`*`)
//! is zero or more shared-endpoint joins of a closed description.

mod enumerate;
mod matcher;
mod parse;
mod simplify;

pub use enumerate::{enumerate_paths, for_each_walk, Walk, DEFAULT_WALK_CAP};
pub use parse::parse_description;
pub use simplify::simplify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeType {
    U,
    P,
    R,
}

impl NodeType {
    pub const ALL: [NodeType; 3] = [NodeType::U, NodeType::P, NodeType::R];

    /// Schema adjacency: users and representatives only touch preferences.
    pub fn adjacent(self, other: NodeType) -> bool {
        matches!(
            (self, other),
            (NodeType::U, NodeType::P)
                | (NodeType::P, NodeType::U)
                | (NodeType::P, NodeType::R)
                | (NodeType::R, NodeType::P)
        )
    }

    pub fn symbol(self) -> char {
        match self {
            NodeType::U => 'U',
            NodeType::P => 'P',
            NodeType::R => 'R',
        }
    }

    pub fn from_symbol(c: char) -> Option<NodeType> {
        match c {
            'U' => Some(NodeType::U),
            'P' => Some(NodeType::P),
            'R' => Some(NodeType::R),
            _ => None,
        }
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// A concrete meta-path: a non-empty, schema-valid sequence of node types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeSequence(Vec<NodeType>);

impl TypeSequence {
    pub fn new(types: Vec<NodeType>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::mismatch("type sequence", "empty sequence"));
        }
        if let Some(w) = types.windows(2).find(|w| !w[0].adjacent(w[1])) {
            return Err(Error::mismatch(
                "type sequence",
                format!("{}{} is not an edge of the schema", w[0], w[1]),
            ));
        }
        Ok(TypeSequence(types))
    }

    pub fn types(&self) -> &[NodeType] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> NodeType {
        self.0[0]
    }

    pub fn last(&self) -> NodeType {
        *self.0.last().unwrap()
    }
}

impl FromStr for TypeSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let types = s
            .chars()
            .enumerate()
            .map(|(position, c)| {
                NodeType::from_symbol(c).ok_or_else(|| Error::Syntax {
                    position,
                    message: format!("unexpected {c:?} in a type sequence"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TypeSequence::new(types)
    }
}

impl fmt::Display for TypeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// How the two halves of a join meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Seam {
    /// The left side ends on the type the right side starts with; that
    /// type appears once.
    Shared,
    /// The boundary types are schema-adjacent and an edge links them.
    Edge,
}

/// Expression tree of a meta-path description.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MetaPath {
    Atom(NodeType),
    Join(Box<MetaPath>, Box<MetaPath>, Seam),
    Select(Box<MetaPath>, Box<MetaPath>),
    Repeat(Box<MetaPath>),
}

impl MetaPath {
    pub fn atom(t: NodeType) -> Self {
        MetaPath::Atom(t)
    }

    /// Description of a single concrete sequence.
    pub fn sequence(seq: &TypeSequence) -> Self {
        let mut types = seq.types().iter();
        let mut e = MetaPath::Atom(*types.next().unwrap());
        for &t in types {
            e = MetaPath::Join(Box::new(e), Box::new(MetaPath::Atom(t)), Seam::Edge);
        }
        e
    }

    pub fn first_type(&self) -> NodeType {
        match self {
            MetaPath::Atom(t) => *t,
            MetaPath::Join(l, _, _) => l.first_type(),
            MetaPath::Select(a, _) => a.first_type(),
            MetaPath::Repeat(a) => a.first_type(),
        }
    }

    pub fn last_type(&self) -> NodeType {
        match self {
            MetaPath::Atom(t) => *t,
            MetaPath::Join(_, r, _) => r.last_type(),
            MetaPath::Select(a, _) => a.last_type(),
            MetaPath::Repeat(a) => a.last_type(),
        }
    }

    /// Shared-endpoint join `a.b`; requires `last(a) = first(b)`.
    pub fn join(a: MetaPath, b: MetaPath) -> Result<Self> {
        if a.last_type() != b.first_type() {
            return Err(Error::mismatch(
                "join",
                format!(
                    "left side ends at {} but right side starts at {}",
                    a.last_type(),
                    b.first_type()
                ),
            ));
        }
        Ok(MetaPath::Join(Box::new(a), Box::new(b), Seam::Shared))
    }

    /// Edge-linked concatenation; requires the boundary types to be adjacent.
    pub fn link(a: MetaPath, b: MetaPath) -> Result<Self> {
        if !a.last_type().adjacent(b.first_type()) {
            return Err(Error::mismatch(
                "join",
                format!(
                    "{} cannot be followed by {}: not an edge of the schema",
                    a.last_type(),
                    b.first_type()
                ),
            ));
        }
        Ok(MetaPath::Join(Box::new(a), Box::new(b), Seam::Edge))
    }

    /// Juxtaposition: shared-endpoint join when the boundary types agree,
    /// edge link when they are adjacent, otherwise a type error.
    pub fn concat(a: MetaPath, b: MetaPath) -> Result<Self> {
        if a.last_type() == b.first_type() {
            MetaPath::join(a, b)
        } else {
            MetaPath::link(a, b)
        }
    }

    pub fn select(a: MetaPath, b: MetaPath) -> Result<Self> {
        if a.first_type() != b.first_type() || a.last_type() != b.last_type() {
            return Err(Error::mismatch(
                "select",
                format!(
                    "alternatives must share endpoints, got {}..{} and {}..{}",
                    a.first_type(),
                    a.last_type(),
                    b.first_type(),
                    b.last_type()
                ),
            ));
        }
        Ok(MetaPath::Select(Box::new(a), Box::new(b)))
    }

    pub fn repeat(a: MetaPath) -> Result<Self> {
        if a.first_type() != a.last_type() {
            return Err(Error::mismatch(
                "repeat",
                format!(
                    "repeated description must start and end at the same type, got {}..{}",
                    a.first_type(),
                    a.last_type()
                ),
            ));
        }
        Ok(MetaPath::Repeat(Box::new(a)))
    }

    /// Number of join/select/repeat operators in the tree.
    pub fn operator_count(&self) -> usize {
        match self {
            MetaPath::Atom(_) => 0,
            MetaPath::Join(a, b, _) | MetaPath::Select(a, b) => 1 + a.operator_count() + b.operator_count(),
            MetaPath::Repeat(a) => 1 + a.operator_count(),
        }
    }

    pub fn contains_repeat(&self) -> bool {
        match self {
            MetaPath::Atom(_) => false,
            MetaPath::Join(a, b, _) | MetaPath::Select(a, b) => a.contains_repeat() || b.contains_repeat(),
            MetaPath::Repeat(_) => true,
        }
    }

    /// Is `seq` one of the sequences this description denotes?
    pub fn matches(&self, seq: &[NodeType]) -> bool {
        matcher::matches(self, seq)
    }

    /// All denoted sequences of at most `max_len` types; `None` when the
    /// description denotes sequences of unbounded length.
    pub fn finite_sequences(&self, max_len: usize) -> Option<Vec<TypeSequence>> {
        if self.contains_repeat() {
            return None;
        }
        Some(matcher::expand_finite(self, max_len))
    }
}

impl fmt::Display for MetaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence: repeat 3, join 2, select 1.
        fn write(e: &MetaPath, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
            let own = match e {
                MetaPath::Atom(_) => 4,
                MetaPath::Repeat(_) => 3,
                MetaPath::Join(..) => 2,
                MetaPath::Select(..) => 1,
            };
            let paren = own < ctx;
            if paren {
                write!(f, "(")?;
            }
            match e {
                MetaPath::Atom(t) => write!(f, "{t}")?,
                MetaPath::Repeat(a) => {
                    write(a, f, 4)?;
                    write!(f, "*")?;
                }
                MetaPath::Join(a, b, seam) => {
                    write(a, f, 2)?;
                    if *seam == Seam::Shared {
                        write!(f, ".")?;
                    }
                    // Right-nested joins need grouping to keep left associativity.
                    write(b, f, 3)?;
                }
                MetaPath::Select(a, b) => {
                    write(a, f, 1)?;
                    write!(f, "|")?;
                    write(b, f, 2)?;
                }
            }
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
        write(self, f, 0)
    }
}

impl FromStr for MetaPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_description(s)
    }
}

/// User-based semantics: similar users reached through shared preferences
/// or shared representatives, then a vote.
pub const UNC_DESCRIPTION: &str = "(UPU|UPRPU)*PR";
/// Preference-based semantics: concordant and similar preferences.
pub const PNC_DESCRIPTION: &str = "U[PUP]*R";
/// Representative-based semantics: voted representatives and similar ones.
pub const RNC_DESCRIPTION: &str = "UP(RPUPR)*";
/// Every user-to-representative path of the raw preference graph.
pub const GRANK_DESCRIPTION: &str = "U[PUP|PRP]*R";

/// Resolves a canned name (`unc`, `pnc`, `rnc`, `grank`) or parses a
/// description string.
pub fn resolve_description(text: &str) -> Result<MetaPath> {
    let canned = match text.trim().to_ascii_lowercase().as_str() {
        "unc" => Some(UNC_DESCRIPTION),
        "pnc" => Some(PNC_DESCRIPTION),
        "rnc" => Some(RNC_DESCRIPTION),
        "grank" => Some(GRANK_DESCRIPTION),
        _ => None,
    };
    parse_description(canned.unwrap_or(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Vec<NodeType> {
        s.parse::<TypeSequence>().unwrap().types().to_vec()
    }

    fn desc(s: &str) -> MetaPath {
        parse_description(s).unwrap()
    }

    #[test]
    fn adjacency_is_the_line_u_p_r() {
        use NodeType::*;
        assert!(U.adjacent(P) && P.adjacent(U) && P.adjacent(R) && R.adjacent(P));
        assert!(!U.adjacent(R) && !R.adjacent(U) && !U.adjacent(U) && !P.adjacent(P));
    }

    #[test]
    fn type_sequence_rejects_schema_violations() {
        assert!("UR".parse::<TypeSequence>().is_err());
        assert!("UPRPU".parse::<TypeSequence>().is_ok());
        assert!("".parse::<TypeSequence>().is_err());
    }

    #[test]
    fn join_shares_the_boundary_type() {
        let j = MetaPath::join(desc("UP"), desc("PR")).unwrap();
        assert!(j.matches(&seq("UPR")));
        assert_eq!(j.finite_sequences(10).unwrap(), vec!["UPR".parse().unwrap()]);
        let j = MetaPath::join(desc("UP"), desc("PU")).unwrap();
        assert_eq!(j.finite_sequences(10).unwrap(), vec!["UPU".parse().unwrap()]);
    }

    #[test]
    fn join_with_zero_length_operand() {
        let j = MetaPath::join(desc("U"), desc("UP")).unwrap();
        assert_eq!(j.finite_sequences(10).unwrap(), vec!["UP".parse().unwrap()]);
    }

    #[test]
    fn join_rejects_mismatched_boundary() {
        assert!(matches!(
            MetaPath::join(desc("UP"), desc("UP")),
            Err(Error::TypeMismatch { operation: "join", .. })
        ));
    }

    #[test]
    fn repeat_denotes_zero_or_more_iterations() {
        let r = MetaPath::repeat(desc("UPU")).unwrap();
        assert!(r.matches(&seq("U")));
        assert!(r.matches(&seq("UPU")));
        assert!(r.matches(&seq("UPUPU")));
        assert!(!r.matches(&seq("UPUP")));
        assert!(MetaPath::repeat(desc("UP")).is_err());
    }

    #[test]
    fn select_requires_shared_endpoints() {
        assert!(MetaPath::select(desc("UPU"), desc("UPRPU")).is_ok());
        assert!(MetaPath::select(desc("UPU"), desc("UPR")).is_err());
    }

    #[test]
    fn grank_walk_is_unreliable_for_every_semantics() {
        let walk = seq("UPRPRPR");
        assert!(desc(GRANK_DESCRIPTION).matches(&walk));
        for d in [UNC_DESCRIPTION, PNC_DESCRIPTION, RNC_DESCRIPTION] {
            assert!(!desc(d).matches(&walk), "{d}");
        }
    }

    #[test]
    fn direct_vote_is_reliable_for_every_semantics() {
        for d in [UNC_DESCRIPTION, PNC_DESCRIPTION, RNC_DESCRIPTION, GRANK_DESCRIPTION] {
            assert!(desc(d).matches(&seq("UPR")), "{d}");
        }
    }

    #[test]
    fn canned_descriptions_are_distinguishable() {
        let (unc, pnc, rnc) = (desc(UNC_DESCRIPTION), desc(PNC_DESCRIPTION), desc(RNC_DESCRIPTION));
        let w1 = seq("UPUPR");
        assert!(unc.matches(&w1) && pnc.matches(&w1) && !rnc.matches(&w1));
        let w2 = seq("UPRPUPR");
        assert!(unc.matches(&w2) && rnc.matches(&w2) && !pnc.matches(&w2));
    }

    #[test]
    fn resolve_canned_names() {
        assert_eq!(resolve_description("UNC").unwrap(), desc(UNC_DESCRIPTION));
        assert_eq!(resolve_description("grank").unwrap(), desc(GRANK_DESCRIPTION));
        assert_eq!(resolve_description("UPU").unwrap(), desc("UPU"));
    }

    #[test]
    fn display_round_trips() {
        for s in [
            UNC_DESCRIPTION,
            PNC_DESCRIPTION,
            RNC_DESCRIPTION,
            GRANK_DESCRIPTION,
            "UP.[PUP|PRP]*.PR",
            "(UPU)*.UPR",
            "U*",
            "(U|U)PR",
            "U(PUP|PRP)*.PR",
        ] {
            let e = desc(s);
            let printed = e.to_string();
            assert_eq!(desc(&printed), e, "{s} printed as {printed}");
        }
    }
}
