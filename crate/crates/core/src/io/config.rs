//! Plain `key = value` configuration files.
//!
//! Keys are long command-line flag names without the leading dashes.
//! Values are spliced in front of the explicit flags, so flags given on
//! the command line override the file.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub fn parse_config(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Malformed {
            path: path.to_path_buf(),
            line: k + 1,
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line: k + 1,
                message: "empty key".into(),
            });
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    parse_config(&fs::read_to_string(path)?, path)
}

/// Flag arguments equivalent to the entries.
pub fn config_args(entries: &[(String, String)]) -> Vec<String> {
    entries
        .iter()
        .flat_map(|(k, v)| [format!("--{k}"), v.clone()])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let e = parse_config("# run\nupl = 10\n\n--seed=42\n", Path::new("c")).unwrap();
        assert_eq!(e, [("upl".into(), "10".into()), ("seed".into(), "42".into())]);
        assert_eq!(config_args(&e), ["--upl", "10", "--seed", "42"]);
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert!(matches!(
            parse_config("upl 10\n", Path::new("c")),
            Err(Error::Malformed { line: 1, .. })
        ));
    }
}
