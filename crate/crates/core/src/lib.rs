//! Collaborative ranking over tripartite preference graphs.
//!
//! Ratings become pairwise preferences, preferences form a graph of
//! users, preferences and item representatives, and the graph is
//! projected along meta-path sets before personalised PageRank scores
//! each item as the difference between its desirable and undesirable
//! representative.

pub mod error;
pub mod eval;
pub mod io;
pub mod metapath;
pub mod preference;
pub mod projection;
pub mod ranking;
pub mod sparse;

pub use error::{Error, Result};
