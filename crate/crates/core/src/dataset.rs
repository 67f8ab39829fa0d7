//! Loader for LINQS-style citation datasets (CiteSeer, Cora).
//!
//! `.content`: `paper_id w_1 ... w_d class_label` with binary word
//! indicators. `.cites`: `cited_id citing_id`. Citations that mention
//! unknown papers are dropped, as are self-citations.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use crate::cluster::Clustering;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::text::TermVectorStore;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: Graph,
    pub terms: TermVectorStore,
    pub truth: Clustering,
    /// External paper id per vertex.
    pub ids: Vec<String>,
    pub class_names: Vec<String>,
    pub dropped_citations: usize,
}

pub fn load_linqs<C: BufRead, E: BufRead>(content: C, cites: E) -> Result<Dataset> {
    let mut ids = Vec::new();
    let mut index: HashMap<String, VertexId> = HashMap::new();
    let mut vectors = Vec::new();
    let mut classes: BTreeMap<String, Vec<VertexId>> = BTreeMap::new();
    let mut width = None;
    for (idx, line) in content.lines().enumerate() {
        let line = line?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        if toks.len() < 2 {
            return Err(bad("expected `paper_id attributes... label`".into()));
        }
        let attrs = &toks[1..toks.len() - 1];
        match width {
            None => width = Some(attrs.len()),
            Some(w) if w != attrs.len() => {
                return Err(bad(format!("{} attributes, expected {w}", attrs.len())))
            }
            _ => {}
        }
        let mut terms = Vec::new();
        for (t, a) in attrs.iter().enumerate() {
            match *a {
                "0" | "0.0" => {}
                "1" | "1.0" => terms.push((t as u32, 1)),
                other => return Err(bad(format!("non-binary attribute `{other}`"))),
            }
        }
        let v = ids.len() as VertexId;
        if index.insert(toks[0].to_string(), v).is_some() {
            return Err(bad(format!("duplicate paper id `{}`", toks[0])));
        }
        ids.push(toks[0].to_string());
        vectors.push(terms);
        classes
            .entry(toks[toks.len() - 1].to_string())
            .or_default()
            .push(v);
    }

    let mut edges = Vec::new();
    let mut dropped = 0;
    for (idx, line) in cites.lines().enumerate() {
        let line = line?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: "expected `cited_id citing_id`".into(),
            });
        }
        match (index.get(toks[0]), index.get(toks[1])) {
            (Some(&a), Some(&b)) if a != b => edges.push((a, b)),
            _ => dropped += 1,
        }
    }

    let n = ids.len();
    let mut labels = vec![0u32; n];
    let class_names: Vec<String> = classes.keys().cloned().collect();
    for (c, members) in classes.values().enumerate() {
        for &v in members {
            labels[v as usize] = c as u32;
        }
    }
    Ok(Dataset {
        graph: Graph::new(n, edges)?,
        terms: TermVectorStore::new(vectors),
        truth: Clustering::from_clusters(
            n,
            classes
                .values()
                .map(|m| m.iter().copied().collect())
                .collect(),
        )?,
        ids,
        class_names,
        dropped_citations: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_linqs() {
        let content = "p1 1 0 1 AI\np2 0 1 0 DB\np3 1 1 0 AI\n";
        let cites = "p1 p2\np3 p1\np9 p1\np2 p2\n";
        let d = load_linqs(content.as_bytes(), cites.as_bytes()).unwrap();
        assert_eq!(d.graph.vertex_count(), 3);
        assert_eq!(d.graph.edge_count(), 2);
        assert_eq!(d.dropped_citations, 2);
        assert_eq!(d.terms.counts(0), &[(0, 1), (2, 1)]);
        assert_eq!(d.class_names, vec!["AI", "DB"]);
        assert_eq!(d.truth.clusters()[0].as_slice(), &[0, 2]);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let content = "p1 1 0 A\np2 1 B\n";
        assert!(load_linqs(content.as_bytes(), "".as_bytes()).is_err());
    }
}
