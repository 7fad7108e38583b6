//! Canonical graph representation and edge-list file I/O.
//!
//! Graphs are undirected and simple: dense 0-based node ids, no
//! self-loops, no duplicate edges. The adjacency view is kept sorted so
//! edge iteration is canonical (ascending `(u, v)` with `u < v`) and
//! membership tests are binary searches. Construction is validating;
//! once built, a [`Graph`] is immutable in practice and safe to share
//! across parallel workers.

use crate::error::{GtiError, Result};
use std::collections::HashMap;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl Graph {
    pub fn new(n_nodes: usize) -> Self {
        Graph {
            n: n_nodes,
            adj: vec![Vec::new(); n_nodes],
            m: 0,
        }
    }

    pub fn from_edges<I>(n_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut g = Graph::new(n_nodes);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Insert an undirected edge. Returns false if it already exists.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<bool> {
        if u == v {
            return Err(GtiError::arg(format!("self-loop at node {u}")));
        }
        if u as usize >= self.n || v as usize >= self.n {
            return Err(GtiError::arg(format!(
                "edge ({u},{v}) out of range for {} nodes",
                self.n
            )));
        }
        let pos = match self.adj[u as usize].binary_search(&v) {
            Ok(_) => return Ok(false),
            Err(p) => p,
        };
        self.adj[u as usize].insert(pos, v);
        let pos = self.adj[v as usize].binary_search(&u).unwrap_err();
        self.adj[v as usize].insert(pos, u);
        self.m += 1;
        Ok(true)
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.m
    }

    pub fn degree(&self, u: u32) -> usize {
        self.adj[u as usize].len()
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adj[u as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v
            && (u as usize) < self.n
            && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Canonical edge iteration: ascending `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .filter(move |&&v| v as usize > u)
                .map(move |&v| (u as u32, v))
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|a| a.len()).collect()
    }

    /// Triangles through each node, by sorted-adjacency intersection.
    pub fn triangles_per_node(&self) -> Vec<usize> {
        let mut tri = vec![0usize; self.n];
        for (u, v) in self.edges() {
            let (a, b) = (&self.adj[u as usize], &self.adj[v as usize]);
            // count common neighbors w > v to touch each triangle once
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                if a[i] == b[j] {
                    if a[i] > v {
                        tri[u as usize] += 1;
                        tri[v as usize] += 1;
                        tri[a[i] as usize] += 1;
                    }
                    i += 1;
                    j += 1;
                } else if a[i] < b[j] {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }
        tri
    }

    /// Remove an undirected edge if present. Returns whether it existed.
    pub fn remove_edge(&mut self, u: u32, v: u32) -> bool {
        let Ok(pos) = self.adj[u as usize].binary_search(&v) else {
            return false;
        };
        self.adj[u as usize].remove(pos);
        let pos = self.adj[v as usize]
            .binary_search(&u)
            .expect("symmetric adjacency");
        self.adj[v as usize].remove(pos);
        self.m -= 1;
        true
    }

    /// Dense symmetric 0/1 adjacency, zero diagonal.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.n * self.n];
        for (u, v) in self.edges() {
            a[u as usize * self.n + v as usize] = 1.0;
            a[v as usize * self.n + u as usize] = 1.0;
        }
        a
    }
}

/// Outcome of ingesting an edge-list file.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original file labels per internal id (present when relabeling).
    pub labels: Option<Vec<u64>>,
    /// Self-loop lines dropped during ingestion.
    pub self_loops_dropped: usize,
}

/// Parse a SNAP-style edge list: UTF-8 text, `#` comment lines, two
/// whitespace-separated integer tokens per line.
///
/// Duplicate lines and reversed duplicates collapse to one edge;
/// self-loops are dropped (counted). With `node_relabel`, ids compact
/// to 0..N-1 in first-appearance order; otherwise ids are used as-is
/// and the node count is `max_id + 1`.
pub fn load_edge_list(path: &Path, node_relabel: bool) -> Result<LoadedGraph> {
    let text = fs::read_to_string(path).map_err(|e| GtiError::io(path, e))?;
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b, extra) = (tokens.next(), tokens.next(), tokens.next());
        let (a, b) = match (a, b, extra) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(GtiError::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: format!("expected two integer tokens, got {line:?}"),
                })
            }
        };
        let parse = |tok: &str| -> Result<u64> {
            tok.parse::<u64>().map_err(|_| GtiError::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        raw_edges.push((parse(a)?, parse(b)?));
    }
    if raw_edges.is_empty() {
        return Err(GtiError::EmptyGraph(path.to_path_buf()));
    }

    let (n, labels, mapped): (usize, Option<Vec<u64>>, Vec<(u64, u64)>) = if node_relabel {
        let mut map: HashMap<u64, u64> = HashMap::new();
        let mut labels = Vec::new();
        let mut mapped = Vec::with_capacity(raw_edges.len());
        for &(a, b) in &raw_edges {
            let ma = *map.entry(a).or_insert_with(|| {
                labels.push(a);
                (labels.len() - 1) as u64
            });
            let mb = *map.entry(b).or_insert_with(|| {
                labels.push(b);
                (labels.len() - 1) as u64
            });
            mapped.push((ma, mb));
        }
        (labels.len(), Some(labels), mapped)
    } else {
        let max_id = raw_edges.iter().map(|&(a, b)| a.max(b)).max().unwrap();
        (max_id as usize + 1, None, raw_edges)
    };

    let mut graph = Graph::new(n);
    let mut self_loops = 0usize;
    for (a, b) in mapped {
        if a == b {
            self_loops += 1;
            continue;
        }
        graph.add_edge(a as u32, b as u32)?;
    }
    Ok(LoadedGraph {
        graph,
        labels,
        self_loops_dropped: self_loops,
    })
}

/// Write the canonical edge list: one `u v` line per edge, `u < v`,
/// ascending lexicographic order. Round-trips through
/// [`load_edge_list`] exactly.
pub fn write_edge_list(g: &Graph, path: &Path) -> Result<()> {
    let mut out = String::new();
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    fs::write(path, out).map_err(|e| GtiError::io(path, e))
}

/// Subgraph induced by `nodes`, in slot order: slot i of the result is
/// `nodes[i]`. Also returns the slot -> original-node map.
pub fn induced_subgraph(g: &Graph, nodes: &[u32]) -> Result<(Graph, Vec<u32>)> {
    let mut slot_of: HashMap<u32, u32> = HashMap::with_capacity(nodes.len());
    for (i, &v) in nodes.iter().enumerate() {
        if v as usize >= g.n_nodes() {
            return Err(GtiError::arg(format!("node {v} out of range")));
        }
        if slot_of.insert(v, i as u32).is_some() {
            return Err(GtiError::arg(format!("duplicate node {v}")));
        }
    }
    let mut sub = Graph::new(nodes.len());
    for (i, &v) in nodes.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Some(&j) = slot_of.get(&w) {
                if (i as u32) < j {
                    sub.add_edge(i as u32, j)?;
                }
            }
        }
    }
    Ok((sub, nodes.to_vec()))
}

/// Dense symmetric real matrix with zero diagonal; entries clamp at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAdjacency {
    n: usize,
    entries: Vec<f64>,
}

impl WeightedAdjacency {
    pub fn zeros(n: usize) -> Self {
        WeightedAdjacency {
            n,
            entries: vec![0.0; n * n],
        }
    }

    /// Validates: square data, symmetric within 1e-9, zero diagonal.
    /// Negative entries are clamped to 0.
    pub fn from_dense(n: usize, mut entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(GtiError::arg(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(GtiError::arg(format!("nonzero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                if (entries[i * n + j] - entries[j * n + i]).abs() > 1e-9 {
                    return Err(GtiError::arg(format!("asymmetry at ({i},{j})")));
                }
            }
        }
        for v in &mut entries {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(WeightedAdjacency { n, entries })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Set both mirrored entries. Off-diagonal only.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        debug_assert_ne!(i, j);
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Strictly positive entries in canonical (i < j) order.
    pub fn support(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).filter_map(move |j| {
                let v = self.entry(i, j);
                (v > 0.0).then_some((i as u32, j as u32, v))
            })
        })
    }
}
