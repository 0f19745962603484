//! Dataset ingestion, graph snapshots, reports and configuration files.

mod config;
mod ingest;
mod report;
mod snapshot;

pub use config::{config_args, parse_config, read_config};
pub use ingest::{ingest, parse_ratings, read_pairs, write_ratings, DatasetDescriptor, DatasetFormat};
pub use report::{report_lines, results_table, write_report};
pub use snapshot::{Snapshot, FORMAT_VERSION};
