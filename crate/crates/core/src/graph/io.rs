//! Edge-list text format and the binary CSR snapshot.
//!
//! Text: one `u v [w]` per line, whitespace separated, `#` starts a comment.
//! A leading `# vertices: N` comment fixes the vertex count so trailing
//! isolated vertices survive a round trip.

use std::collections::HashMap;
use std::io::{BufRead, Read, Write};

use super::{Edge, EdgeSet, Graph, VertexId};
use crate::error::{Error, Result};

const SNAPSHOT_MAGIC: &[u8; 8] = b"CDCLCSR\0";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Force the vertex count (must cover every id seen).
    pub vertex_count: Option<usize>,
    /// Map arbitrary external ids to dense ids in order of first appearance.
    pub remap_ids: bool,
}

/// Counts of lines altered during ingest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines_read: usize,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

/// Dense-to-external id table produced when `remap_ids` is set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    external: Vec<u64>,
    index: HashMap<u64, VertexId>,
}

impl IdMap {
    fn intern(&mut self, id: u64) -> VertexId {
        *self.index.entry(id).or_insert_with(|| {
            self.external.push(id);
            (self.external.len() - 1) as VertexId
        })
    }

    pub fn external(&self, v: VertexId) -> Option<u64> {
        self.external.get(v as usize).copied()
    }

    pub fn internal(&self, id: u64) -> Option<VertexId> {
        self.index.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub report: IngestReport,
    pub id_map: Option<IdMap>,
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    tok.parse::<u64>().map_err(|_| Error::Parse {
        line,
        message: format!("invalid vertex id `{tok}` (expected a non-negative integer)"),
    })
}

fn vertex_hint(comment: &str) -> Option<usize> {
    comment
        .trim_start_matches('#')
        .trim()
        .strip_prefix("vertices:")?
        .split_whitespace()
        .next()?
        .parse()
        .ok()
}

/// Reads a graph in the edge-list dialect.
pub fn load_edge_list<R: BufRead>(reader: R, opts: &LoadOptions) -> Result<LoadedGraph> {
    let mut report = IngestReport::default();
    let mut id_map = opts.remap_ids.then(IdMap::default);
    let mut hint = None;
    let mut raw: Vec<(Edge, Option<f64>)> = Vec::new();
    let mut any_weight = false;
    let mut max_id: Option<u64> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        if body.starts_with('#') {
            if hint.is_none() && raw.is_empty() {
                hint = vertex_hint(body);
            }
            continue;
        }
        let body = body.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected `u v [w]`, found {} fields", toks.len()),
            });
        }
        report.lines_read += 1;
        let (a, b) = (parse_id(toks[0], lineno)?, parse_id(toks[1], lineno)?);
        let weight = match toks.get(2) {
            Some(t) => {
                let w: f64 = t.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid weight `{t}`"),
                })?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("weight must be positive, found {w}"),
                    });
                }
                any_weight = true;
                Some(w)
            }
            None => None,
        };
        let (u, v) = match id_map.as_mut() {
            Some(map) => (map.intern(a), map.intern(b)),
            None => {
                let to_id = |x: u64| {
                    VertexId::try_from(x).map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("vertex id {x} exceeds the 32-bit id space"),
                    })
                };
                (to_id(a)?, to_id(b)?)
            }
        };
        max_id = max_id.max(Some(u.max(v) as u64));
        if u == v {
            report.self_loops_dropped += 1;
            continue;
        }
        raw.push(((u.min(v), u.max(v)), weight));
    }

    let seen = max_id.map_or(0, |m| m as usize + 1);
    let vertex_count = match (opts.vertex_count, hint) {
        (Some(n), _) => n,
        (None, Some(h)) => h.max(seen),
        (None, None) => seen,
    };
    if vertex_count < seen {
        return Err(Error::VertexOutOfRange {
            vertex: seen - 1,
            vertex_count,
        });
    }

    let before = raw.len();
    let graph = if any_weight {
        Graph::from_weighted(
            vertex_count,
            raw.into_iter().map(|((u, v), w)| (u, v, w.unwrap_or(1.0))),
        )?
    } else {
        Graph::from_edge_set(vertex_count, raw.into_iter().map(|(e, _)| e).collect())?
    };
    report.duplicates_merged = before - graph.edge_count();
    Ok(LoadedGraph {
        graph,
        report,
        id_map,
    })
}

/// Writes a graph in the edge-list dialect, canonical edge order.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# vertices: {} edges: {}",
        graph.vertex_count(),
        graph.edge_count()
    )?;
    match graph.weights() {
        Some(w) => {
            for (&(u, v), w) in graph.edges().as_slice().iter().zip(w) {
                writeln!(out, "{u} {v} {w}")?;
            }
        }
        None => {
            for &(u, v) in graph.edges().as_slice() {
                writeln!(out, "{u} {v}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes the binary CSR snapshot.
///
/// Layout (little endian): magic, version `u32`, flags `u32` (bit 0 =
/// weighted), vertex count `u64`, edge count `u64`, `vertex_count + 1`
/// offsets as `u64`, `2 * edge_count` neighbor ids as `u32`, then one `f64`
/// weight per canonical edge when weighted.
pub fn write_snapshot<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    let flags: u32 = graph.is_weighted().into();
    out.write_all(&flags.to_le_bytes())?;
    out.write_all(&(graph.vertex_count() as u64).to_le_bytes())?;
    out.write_all(&(graph.edge_count() as u64).to_le_bytes())?;
    for &o in &graph.offsets {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for &v in &graph.adjacency {
        out.write_all(&v.to_le_bytes())?;
    }
    if let Some(w) = graph.weights() {
        for x in w {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|e| Error::Snapshot(format!("truncated snapshot: {e}")))?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot<R: Read>(reader: R) -> Result<Graph> {
    let mut c = Cursor { inner: reader };
    if &c.bytes::<8>()? != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic bytes".into()));
    }
    let version = c.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let weighted = c.u32()? & 1 == 1;
    let n = c.u64()? as usize;
    let m = c.u64()? as usize;
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        offsets.push(c.u64()? as usize);
    }
    if offsets.first() != Some(&0)
        || offsets.last() != Some(&(2 * m))
        || offsets.windows(2).any(|w| w[0] > w[1])
    {
        return Err(Error::Snapshot("inconsistent offsets".into()));
    }
    let mut adjacency = Vec::with_capacity(2 * m);
    for _ in 0..2 * m {
        adjacency.push(c.u32()?);
    }
    let mut edges = Vec::with_capacity(m);
    for u in 0..n {
        for &v in &adjacency[offsets[u]..offsets[u + 1]] {
            if v as usize >= n {
                return Err(Error::Snapshot(format!("neighbor id {v} out of range")));
            }
            if (u as VertexId) < v {
                edges.push((u as VertexId, v));
            }
        }
    }
    if edges.len() != m {
        return Err(Error::Snapshot("adjacency is not symmetric".into()));
    }
    let edges: EdgeSet = edges.into_iter().collect();
    if weighted {
        let mut w = Vec::with_capacity(m);
        for _ in 0..m {
            w.push(f64::from_le_bytes(c.bytes()?));
        }
        Graph::from_weighted(n, edges.iter().zip(w).map(|((u, v), w)| (u, v, w)))
    } else {
        Graph::from_edge_set(n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<LoadedGraph> {
        load_edge_list(text.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn path_lines() {
        let g = load("0 1\n1 2\n").unwrap().graph;
        assert_eq!((g.vertex_count(), g.edge_count()), (3, 2));
    }

    #[test]
    fn reversed_duplicate_merges() {
        let loaded = load("0 1\n1 0\n").unwrap();
        assert_eq!(
            (loaded.graph.vertex_count(), loaded.graph.edge_count()),
            (2, 1)
        );
        assert_eq!(loaded.report.duplicates_merged, 1);
    }

    #[test]
    fn self_loop_dropped() {
        let loaded = load("0 0\n0 1\n").unwrap();
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.report.self_loops_dropped, 1);
    }

    #[test]
    fn comments_and_weights() {
        let g = load("# a comment\n0 1 2.5 # trailing\n\n1 2 1\n0 1 0.5\n")
            .unwrap()
            .graph;
        assert_eq!(g.edge_weight(0, 1), Some(3.0));
        assert_eq!(g.edge_weight(1, 2), Some(1.0));
    }

    #[test]
    fn malformed_lines_report_line_number() {
        for (text, bad_line) in [
            ("0 1\n2\n", 2),
            ("0 1\n-1 2\n", 2),
            ("0 x\n", 1),
            ("0 1\n1 2\n1 3 0\n", 3),
            ("0 1 -2\n", 1),
            ("0 1 2 3\n", 1),
        ] {
            match load(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, bad_line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn remapped_ids() {
        let loaded = load_edge_list(
            "100 7\n7 9000000000\n".as_bytes(),
            &LoadOptions {
                remap_ids: true,
                ..Default::default()
            },
        )
        .unwrap();
        let map = loaded.id_map.unwrap();
        assert_eq!(loaded.graph.vertex_count(), 3);
        assert_eq!(map.external(2), Some(9_000_000_000));
        assert_eq!(map.internal(7), Some(1));
    }

    #[test]
    fn text_round_trip_keeps_isolated_tail() {
        let g = Graph::from_weighted(6, [(0, 1, 0.1), (2, 3, 7.25)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(load(std::str::from_utf8(&buf).unwrap()).unwrap().graph, g);
    }

    #[test]
    fn snapshot_round_trip() {
        for g in [
            Graph::new(5, [(0, 1), (1, 4), (2, 3)]).unwrap(),
            Graph::from_weighted(4, [(0, 3, 2.0), (1, 2, 0.5)]).unwrap(),
            Graph::new(3, []).unwrap(),
        ] {
            let mut buf = Vec::new();
            write_snapshot(&g, &mut buf).unwrap();
            assert_eq!(read_snapshot(buf.as_slice()).unwrap(), g);
        }
    }

    #[test]
    fn snapshot_rejects_garbage() {
        assert!(read_snapshot(&b"NOTASNAP"[..]).is_err());
        let mut buf = Vec::new();
        write_snapshot(&Graph::new(3, [(0, 1)]).unwrap(), &mut buf).unwrap();
        buf.truncate(buf.len() - 2);
        assert!(read_snapshot(buf.as_slice()).is_err());
    }
}
