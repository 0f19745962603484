//! Binary snapshot of a projected graph.
//!
//! Layout: 8-byte magic, little-endian `u32` format version, then
//! sections of `tag[4] | u64 payload length | payload | crc32(payload)`.
//! Sections appear in a fixed order and the last one is `END_`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metapath::TypeSequence;
use crate::preference::{Catalog, ItemId, PreferenceNode, UserId};
use crate::projection::{ProjectedGraph, Roster, Variant};
use crate::sparse::CsrMatrix;

const MAGIC: &[u8; 8] = b"PGSNAP\r\n";
pub const FORMAT_VERSION: u32 = 1;

/// A projected graph plus the labels of the catalog it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub graph: ProjectedGraph,
    pub user_labels: Vec<String>,
    pub item_labels: Vec<String>,
}

impl Snapshot {
    pub fn new(graph: ProjectedGraph, catalog: Option<&Catalog>) -> Self {
        let (user_labels, item_labels) = catalog.map_or((Vec::new(), Vec::new()), |c| {
            (c.user_labels().to_vec(), c.item_labels().to_vec())
        });
        Snapshot {
            graph,
            user_labels,
            item_labels,
        }
    }

    /// The catalog the labels describe, if any were stored.
    pub fn catalog(&self) -> Option<Catalog> {
        (!self.user_labels.is_empty()).then(|| Catalog::from_labels(&self.user_labels, &self.item_labels))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = &self.graph;
        let r = g.roster();
        let a = g.adjacency();
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        let metapaths: Vec<String> = g.metapaths().iter().map(|s| s.to_string()).collect();
        let head = format!("{}\n{}\n{}", g.variant(), metapaths.join(","), a.rows());
        section(&mut out, b"HEAD", head.as_bytes());
        section(&mut out, b"USER", &u32s(r.users.iter().map(|u| u.0)));
        section(&mut out, b"PREF", &u32s(r.prefs.iter().flat_map(|p| [p.winner.0, p.loser.0])));
        section(&mut out, b"ITEM", &u32s(r.items.iter().map(|i| i.0)));
        section(&mut out, b"ROWS", &u64s(a.indptr().iter().map(|&x| x as u64)));
        section(&mut out, b"COLS", &u32s(a.indices().iter().copied()));
        section(&mut out, b"VALS", &u64s(a.values().iter().map(|v| v.to_bits())));
        section(&mut out, b"ULAB", self.user_labels.join("\n").as_bytes());
        section(&mut out, b"ILAB", self.item_labels.join("\n").as_bytes());
        section(&mut out, b"END_", &[]);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::BadMagic);
        }
        let mut rd = Reader {
            bytes,
            pos: MAGIC.len(),
        };
        let version = rd.take(4, "version")?;
        let found = u32::from_le_bytes(version.try_into().unwrap());
        if found != FORMAT_VERSION {
            return Err(Error::Version {
                found,
                expected: FORMAT_VERSION,
            });
        }
        let head = String::from_utf8(rd.section(b"HEAD")?.to_vec()).map_err(|_| corrupt("HEAD"))?;
        let mut head_lines = head.split('\n');
        let variant: Variant = head_lines.next().ok_or_else(|| corrupt("HEAD"))?.parse()?;
        let metapaths: Vec<TypeSequence> = match head_lines.next().ok_or_else(|| corrupt("HEAD"))? {
            "" => Vec::new(),
            list => list.split(',').map(str::parse).collect::<Result<_>>()?,
        };
        let n: usize = head_lines
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| corrupt("HEAD"))?;
        let users = read_u32s(rd.section(b"USER")?).into_iter().map(UserId).collect();
        let prefs = read_u32s(rd.section(b"PREF")?)
            .chunks(2)
            .map(|c| PreferenceNode {
                winner: ItemId(c[0]),
                loser: ItemId(*c.get(1).unwrap_or(&c[0])),
            })
            .collect();
        let items = read_u32s(rd.section(b"ITEM")?).into_iter().map(ItemId).collect();
        let indptr = read_u64s(rd.section(b"ROWS")?).into_iter().map(|x| x as usize).collect();
        let indices = read_u32s(rd.section(b"COLS")?);
        let values = read_u64s(rd.section(b"VALS")?).into_iter().map(f64::from_bits).collect();
        let labels = |b: &[u8], tag| -> Result<Vec<String>> {
            let s = std::str::from_utf8(b).map_err(|_| corrupt(tag))?;
            Ok(if s.is_empty() { Vec::new() } else { s.split('\n').map(String::from).collect() })
        };
        let user_labels = labels(rd.section(b"ULAB")?, "ULAB")?;
        let item_labels = labels(rd.section(b"ILAB")?, "ILAB")?;
        rd.section(b"END_")?;
        let adjacency = CsrMatrix::from_parts(n, n, indptr, indices, values).ok_or_else(|| corrupt("ROWS"))?;
        let roster = Roster { users, prefs, items };
        let graph = ProjectedGraph::from_parts(variant, metapaths, roster, adjacency).ok_or_else(|| corrupt("HEAD"))?;
        Ok(Snapshot {
            graph,
            user_labels,
            item_labels,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Snapshot::from_bytes(&fs::read(path)?)
    }
}

fn corrupt(section: &str) -> Error {
    Error::Checksum {
        section: section.to_string(),
    }
}

fn section(out: &mut Vec<u8>, tag: &[u8; 4], payload: &[u8]) {
    out.extend_from_slice(tag);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(&crc32fast::hash(payload).to_le_bytes());
}

fn u32s(it: impl Iterator<Item = u32>) -> Vec<u8> {
    it.flat_map(u32::to_le_bytes).collect()
}

fn u64s(it: impl Iterator<Item = u64>) -> Vec<u8> {
    it.flat_map(u64::to_le_bytes).collect()
}

fn read_u32s(b: &[u8]) -> Vec<u32> {
    b.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect()
}

fn read_u64s(b: &[u8]) -> Vec<u64> {
    b.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect()
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, section: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| corrupt(section))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    /// Reads the next section, which must carry `tag` and a valid checksum.
    fn section(&mut self, tag: &[u8; 4]) -> Result<&'a [u8]> {
        let name = String::from_utf8_lossy(tag).into_owned();
        if self.take(4, &name)? != tag {
            return Err(corrupt(&name));
        }
        let len = u64::from_le_bytes(self.take(8, &name)?.try_into().unwrap());
        let len = usize::try_from(len).map_err(|_| corrupt(&name))?;
        let payload = self.take(len, &name)?;
        let crc = u32::from_le_bytes(self.take(4, &name)?.try_into().unwrap());
        if crc != crc32fast::hash(payload) {
            return Err(corrupt(&name));
        }
        if (tag == b"USER" || tag == b"ITEM" || tag == b"COLS" || tag == b"PREF") && len % 4 != 0
            || (tag == b"ROWS" || tag == b"VALS") && len % 8 != 0
        {
            return Err(corrupt(&name));
        }
        Ok(payload)
    }
}
