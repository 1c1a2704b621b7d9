//! Undirected simple graphs: loading from edge-list files, degree and
//! volume bookkeeping, adjacency and transition views, and the subgraph
//! operation the fold splitter relies on.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    /// Canonical (u < v), sorted, no duplicates.
    edges: Vec<(u32, u32)>,
    degrees: Vec<usize>,
    adj_offsets: Vec<usize>,
    adj_neighbors: Vec<u32>,
}

/// internal id -> external id from the source file, ascending.
#[derive(Debug, Clone)]
pub struct NodeMap {
    external: Vec<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub self_loops_dropped: usize,
    pub duplicate_edges_merged: usize,
}

impl Graph {
    /// Builds a graph on nodes 0..n-1. Edges are canonicalized to u < v;
    /// self-loops and duplicate edges are rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Graph> {
        let mut canon: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParam(format!("self-loop at node {a}")));
            }
            let e = if a < b { (a, b) } else { (b, a) };
            if e.1 as usize >= n {
                return Err(Error::NodeOutOfRange { id: e.1, n });
            }
            canon.push(e);
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }

        let mut degrees = vec![0usize; n];
        for &(u, v) in &canon {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut adj_offsets = Vec::with_capacity(n + 1);
        adj_offsets.push(0usize);
        for &d in &degrees {
            adj_offsets.push(adj_offsets.last().unwrap() + d);
        }
        let mut cursor = adj_offsets[..n].to_vec();
        let mut adj_neighbors = vec![0u32; 2 * canon.len()];
        for &(u, v) in &canon {
            adj_neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            adj_neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for i in 0..n {
            adj_neighbors[adj_offsets[i]..adj_offsets[i + 1]].sort_unstable();
        }

        Ok(Graph {
            n,
            edges: canon,
            degrees,
            adj_offsets,
            adj_neighbors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, u: u32) -> usize {
        self.degrees[u as usize]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Sum of all degrees, 2|E|.
    pub fn volume(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        let u = u as usize;
        &self.adj_neighbors[self.adj_offsets[u]..self.adj_offsets[u + 1]]
    }

    pub fn contains_edge(&self, u: u32, v: u32) -> bool {
        if u == v {
            return false;
        }
        let e = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&e).is_ok()
    }

    /// Symmetric 0/1 adjacency with zero diagonal.
    pub fn adjacency(&self) -> SparseMatrix {
        let rows: Vec<Vec<(u32, f64)>> = (0..self.n)
            .map(|u| {
                self.neighbors(u as u32)
                    .iter()
                    .map(|&v| (v, 1.0))
                    .collect()
            })
            .collect();
        SparseMatrix::from_rows(self.n, self.n, &rows)
    }

    /// Row-stochastic transition matrix; rows of zero-degree nodes are zero.
    pub fn transition(&self) -> SparseMatrix {
        let rows: Vec<Vec<(u32, f64)>> = (0..self.n)
            .map(|u| {
                let d = self.degrees[u];
                if d == 0 {
                    Vec::new()
                } else {
                    let inv = 1.0 / d as f64;
                    self.neighbors(u as u32)
                        .iter()
                        .map(|&v| (v, inv))
                        .collect()
                }
            })
            .collect();
        SparseMatrix::from_rows(self.n, self.n, &rows)
    }

    /// Same node set, edge set restricted to `keep`; degrees and volume
    /// recomputed. Every kept edge must exist in `self`.
    pub fn subgraph_from_edges(&self, keep: &[(u32, u32)]) -> Result<Graph> {
        for &(u, v) in keep {
            if !self.contains_edge(u, v) {
                return Err(Error::MissingEdge(u, v));
            }
        }
        Graph::from_edges(self.n, keep.iter().copied())
    }

    pub fn save_edge_list(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            for &(u, v) in &self.edges {
                writeln!(w, "{} {}", u, v)?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }
}

impl NodeMap {
    pub fn external_ids(&self) -> &[u64] {
        &self.external
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            writeln!(w, "external_id,internal_id")?;
            for (internal, &external) in self.external.iter().enumerate() {
                writeln!(w, "{},{}", external, internal)?;
            }
            w.flush()
        })()
        .map_err(|e| Error::io(path, e))
    }
}

/// Loads a whitespace-separated "u v" edge list ('#' lines are comments).
/// External node ids are remapped to 0..n-1 in ascending numeric order, so
/// files that already use dense 0-based ids keep them. Directed duplicates
/// are merged and self-loops dropped, with counts reported.
pub fn load_edge_list(path: &Path) -> Result<(Graph, NodeMap, LoadStats)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    let mut ids: Vec<u64> = Vec::new();
    let mut stats = LoadStats::default();

    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: "expected two node ids".to_string(),
            })?;
            tok.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("not an integer node id: '{tok}'"),
            })
        };
        let u = parse(toks.next())?;
        let v = parse(toks.next())?;
        if toks.next().is_some() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: "expected exactly two node ids".to_string(),
            });
        }
        ids.push(u);
        ids.push(v);
        if u == v {
            stats.self_loops_dropped += 1;
            continue;
        }
        raw_edges.push((u.min(v), u.max(v)));
    }

    ids.sort_unstable();
    ids.dedup();
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let external = ids;
    let lookup = |x: u64| -> u32 { external.binary_search(&x).unwrap() as u32 };

    raw_edges.sort_unstable();
    let before = raw_edges.len();
    raw_edges.dedup();
    stats.duplicate_edges_merged = before - raw_edges.len();

    let edges: Vec<(u32, u32)> = raw_edges
        .into_iter()
        .map(|(u, v)| (lookup(u), lookup(v)))
        .collect();
    let graph = Graph::from_edges(external.len(), edges)?;
    Ok((graph, NodeMap { external }, stats))
}
