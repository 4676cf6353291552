//! Reader for Gmsh MSH 2.2 ASCII files containing triangles.
//!
//! Line elements carry the boundary tags: their first (physical) tag becomes
//! the [`BoundaryTag`] of the edge. Point elements are ignored; any other
//! element type is rejected. Nodes closer than `1e-9` times the domain
//! diameter are merged.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use subswe_core::math::Vec2;
use subswe_core::{BoundaryTag, CoarseMesh};

#[derive(Debug, thiserror::Error)]
pub enum MshError {
    #[error("cannot read mesh file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported mesh format version {0}; expected 2.2 ASCII")]
    Version(String),
    #[error("element {id} has unsupported type {kind}; only triangles (2), lines (1) and points (15) are accepted")]
    UnsupportedElement { id: u64, kind: u32 },
    #[error("element {id} references unknown node {node}")]
    UnknownNode { id: u64, node: u64 },
    #[error("missing ${0} section")]
    MissingSection(&'static str),
    #[error("file contains no triangles")]
    NoTriangles,
    #[error(transparent)]
    Mesh(#[from] subswe_core::Error),
}

const WELD_TOLERANCE: f64 = 1e-9;

pub fn read_msh(path: impl AsRef<Path>) -> Result<CoarseMesh, MshError> {
    parse_msh(&fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    current: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                self.current = i + 1;
                return Some(l);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<&'a str, MshError> {
        self.next().ok_or_else(|| MshError::Parse { line: self.current, message: format!("unexpected end of file, expected {what}") })
    }

    fn err(&self, message: impl Into<String>) -> MshError {
        MshError::Parse { line: self.current, message: message.into() }
    }
}

fn number<T: std::str::FromStr>(lines: &Lines<'_>, s: Option<&str>, what: &str) -> Result<T, MshError> {
    s.and_then(|s| s.parse().ok()).ok_or_else(|| lines.err(format!("invalid {what}")))
}

pub fn parse_msh(text: &str) -> Result<CoarseMesh, MshError> {
    let mut lines = Lines { inner: text.lines().enumerate(), current: 0 };
    let mut nodes: Option<(Vec<u64>, Vec<Vec2>)> = None;
    let mut elements: Option<Vec<(u64, u32, Vec<u64>, u32)>> = None;
    let mut saw_format = false;

    while let Some(line) = lines.next() {
        match line {
            "$MeshFormat" => {
                let header = lines.expect("format header")?;
                let mut parts = header.split_whitespace();
                let version = parts.next().unwrap_or("");
                let file_type = parts.next().unwrap_or("");
                if !version.starts_with("2.") || file_type != "0" {
                    return Err(MshError::Version(header.to_string()));
                }
                saw_format = true;
                skip_to(&mut lines, "$EndMeshFormat")?;
            }
            "$Nodes" => {
                let header = lines.expect("node count")?;
                let count: usize = number(&lines, Some(header), "node count")?;
                let mut ids = Vec::with_capacity(count);
                let mut pts = Vec::with_capacity(count);
                for _ in 0..count {
                    let l = lines.expect("node")?;
                    let mut it = l.split_whitespace();
                    ids.push(number(&lines, it.next(), "node id")?);
                    let x: f64 = number(&lines, it.next(), "x coordinate")?;
                    let y: f64 = number(&lines, it.next(), "y coordinate")?;
                    pts.push(Vec2::new(x, y));
                }
                skip_to(&mut lines, "$EndNodes")?;
                nodes = Some((ids, pts));
            }
            "$Elements" => {
                let header = lines.expect("element count")?;
                let count: usize = number(&lines, Some(header), "element count")?;
                let mut out = Vec::with_capacity(count);
                for _ in 0..count {
                    let l = lines.expect("element")?;
                    let mut it = l.split_whitespace();
                    let id: u64 = number(&lines, it.next(), "element id")?;
                    let kind: u32 = number(&lines, it.next(), "element type")?;
                    let ntags: usize = number(&lines, it.next(), "tag count")?;
                    let mut physical = 0u32;
                    for t in 0..ntags {
                        let tag: i64 = number(&lines, it.next(), "tag")?;
                        if t == 0 {
                            physical = u32::try_from(tag).map_err(|_| lines.err("negative physical tag"))?;
                        }
                    }
                    let nodes_needed = match kind {
                        1 => 2,
                        2 => 3,
                        15 => 1,
                        _ => return Err(MshError::UnsupportedElement { id, kind }),
                    };
                    let mut refs = Vec::with_capacity(nodes_needed);
                    for _ in 0..nodes_needed {
                        refs.push(number(&lines, it.next(), "node reference")?);
                    }
                    out.push((id, kind, refs, physical));
                }
                skip_to(&mut lines, "$EndElements")?;
                elements = Some(out);
            }
            l if l.starts_with('$') && !l.starts_with("$End") => {
                let end = format!("$End{}", &l[1..]);
                skip_to_owned(&mut lines, &end)?;
            }
            _ => return Err(lines.err(format!("unexpected content `{line}`"))),
        }
    }

    if !saw_format {
        return Err(MshError::MissingSection("MeshFormat"));
    }
    let (ids, pts) = nodes.ok_or(MshError::MissingSection("Nodes"))?;
    let elements = elements.ok_or(MshError::MissingSection("Elements"))?;

    let (welded, unique) = weld(&pts);
    let index: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, welded[i])).collect();
    let resolve = |id: u64, node: u64| index.get(&node).copied().ok_or(MshError::UnknownNode { id, node });

    let mut triangles = Vec::new();
    let mut segments = Vec::new();
    for (id, kind, refs, physical) in elements {
        match kind {
            2 => triangles.push([resolve(id, refs[0])?, resolve(id, refs[1])?, resolve(id, refs[2])?]),
            1 => segments.push(([resolve(id, refs[0])?, resolve(id, refs[1])?], BoundaryTag(physical))),
            _ => {}
        }
    }
    if triangles.is_empty() {
        return Err(MshError::NoTriangles);
    }
    Ok(CoarseMesh::from_triangles(unique, triangles, &segments)?)
}

fn skip_to(lines: &mut Lines<'_>, end: &str) -> Result<(), MshError> {
    skip_to_owned(lines, end)
}

fn skip_to_owned(lines: &mut Lines<'_>, end: &str) -> Result<(), MshError> {
    loop {
        if lines.expect(end)? == end {
            return Ok(());
        }
    }
}

/// Merge coincident nodes; returns the old→new map and the unique points.
fn weld(pts: &[Vec2]) -> (Vec<usize>, Vec<Vec2>) {
    let (mut lo, mut hi) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN));
    for p in pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let tol = (WELD_TOLERANCE * (hi - lo).norm()).max(f64::MIN_POSITIVE);
    let key = |p: Vec2| (((p.x - lo.x) / tol).floor() as i64, ((p.y - lo.y) / tol).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut unique: Vec<Vec2> = Vec::new();
    let mut map = Vec::with_capacity(pts.len());
    for &p in pts {
        let (kx, ky) = key(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                    for &u in list {
                        if (unique[u] - p).norm() <= tol {
                            found = Some(u);
                            break 'search;
                        }
                    }
                }
            }
        }
        let idx = found.unwrap_or_else(|| {
            unique.push(p);
            buckets.entry((kx, ky)).or_default().push(unique.len() - 1);
            unique.len() - 1
        });
        map.push(idx);
    }
    (map, unique)
}
