use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::{
    Catalog, ItemId, PreferenceNode, PreferenceObservation, RatingScale, RatingTable, TpgBuilder,
    TripartitePreferenceGraph,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetFormat {
    /// `user \t item \t rating \t timestamp`.
    Movielens100k,
    /// `user::item::rating::timestamp`.
    Movielens1m,
    /// `user item rating`, whitespace separated.
    Filmtrust,
    /// `user <delim> item <delim> rating`, tab by default.
    GenericTsv,
}

impl DatasetFormat {
    pub fn default_scale(self) -> RatingScale {
        match self {
            DatasetFormat::Filmtrust => RatingScale {
                min: 0.5,
                max: 4.0,
                step: 0.5,
            },
            _ => RatingScale::FIVE_STAR,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DatasetFormat::Movielens100k => "movielens-100k",
            DatasetFormat::Movielens1m => "movielens-1m",
            DatasetFormat::Filmtrust => "filmtrust",
            DatasetFormat::GenericTsv => "generic-tsv",
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "movielens-100k" | "ml100k" | "ml-100k" => Ok(DatasetFormat::Movielens100k),
            "movielens-1m" | "ml1m" | "ml-1m" => Ok(DatasetFormat::Movielens1m),
            "filmtrust" => Ok(DatasetFormat::Filmtrust),
            "generic-tsv" | "tsv" => Ok(DatasetFormat::GenericTsv),
            other => Err(Error::InvalidConfig(format!(
                "unknown dataset format {other:?} (expected movielens-100k, movielens-1m, filmtrust or generic-tsv)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub format: DatasetFormat,
    pub path: PathBuf,
    pub scale: RatingScale,
    /// Field separator for the generic format.
    pub delimiter: Option<String>,
}

impl DatasetDescriptor {
    pub fn new(format: DatasetFormat, path: impl Into<PathBuf>) -> Self {
        DatasetDescriptor {
            format,
            path: path.into(),
            scale: format.default_scale(),
            delimiter: None,
        }
    }
}

pub fn ingest(desc: &DatasetDescriptor) -> Result<RatingTable> {
    let text = fs::read_to_string(&desc.path).map_err(|e| Error::Io(e).context(desc.path.display().to_string()))?;
    parse_ratings(&text, desc, &desc.path)
}

/// Parses rating lines; blank lines and `#` comments are skipped.
pub fn parse_ratings(text: &str, desc: &DatasetDescriptor, path: &Path) -> Result<RatingTable> {
    let malformed = |line: usize, message: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rows: Vec<(&str, &str, f64)> = Vec::new();
    let mut first_seen: HashMap<(&str, &str), usize> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match (desc.format, desc.delimiter.as_deref()) {
            (DatasetFormat::Movielens100k, _) => trimmed.split('\t').collect(),
            (DatasetFormat::Movielens1m, _) => trimmed.split("::").collect(),
            (DatasetFormat::Filmtrust, _) => trimmed.split_whitespace().collect(),
            (DatasetFormat::GenericTsv, Some(d)) => trimmed.split(d).collect(),
            (DatasetFormat::GenericTsv, None) => trimmed.split('\t').collect(),
        };
        let expected: &[usize] = match desc.format {
            DatasetFormat::Movielens100k | DatasetFormat::Movielens1m => &[4],
            DatasetFormat::Filmtrust | DatasetFormat::GenericTsv => &[3, 4],
        };
        if !expected.contains(&fields.len()) {
            return Err(malformed(
                line,
                format!("expected {} fields for {}, found {}", expected[0], desc.format, fields.len()),
            ));
        }
        let (user, item) = (fields[0].trim(), fields[1].trim());
        if user.is_empty() || item.is_empty() {
            return Err(malformed(line, "empty user or item field".into()));
        }
        let value: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| malformed(line, format!("rating {:?} is not a number", fields[2])))?;
        if !desc.scale.contains(value) {
            return Err(Error::Scale {
                line,
                value,
                scale: desc.scale.to_string(),
            });
        }
        if let Some(&first_line) = first_seen.get(&(user, item)) {
            return Err(Error::Duplicate {
                line,
                first_line,
                user: user.to_string(),
                item: item.to_string(),
            });
        }
        first_seen.insert((user, item), line);
        rows.push((user, item, value));
    }
    RatingTable::from_labelled(desc.scale, rows)
}

/// Writes a table as generic tab-separated `user item rating` lines in
/// canonical order.
pub fn write_ratings(table: &RatingTable, path: &Path) -> Result<()> {
    let c = table.catalog();
    let mut out = String::new();
    for r in table.ratings() {
        out.push_str(&format!("{}\t{}\t{}\n", c.user_label(r.user), c.item_label(r.item), r.value));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a preference list: `user \t winner \t loser` per line, where a
/// user of `*` declares a candidate preference nobody holds.
pub fn read_pairs(path: &Path) -> Result<(Catalog, TripartitePreferenceGraph)> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = trimmed.split_whitespace().collect();
        if f.len() != 3 || f[1] == f[2] {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: k + 1,
                message: "expected `user winner loser` with two distinct items".into(),
            });
        }
        rows.push((f[0], f[1], f[2]));
    }
    let catalog = Catalog::from_labels(
        rows.iter().map(|r| r.0).filter(|u| *u != "*"),
        rows.iter().flat_map(|r| [r.1, r.2]),
    );
    let item = |l: &str| -> ItemId { catalog.item(l).expect("catalog holds every item") };
    let mut b = TpgBuilder::new();
    for &(u, w, l) in &rows {
        if u == "*" {
            b.candidate(PreferenceNode {
                winner: item(w),
                loser: item(l),
            });
        } else {
            b.observe(PreferenceObservation {
                user: catalog.user(u).expect("catalog holds every user"),
                preferred: item(w),
                other: item(l),
            });
        }
    }
    let g = b.build()?;
    Ok((catalog, g))
}
