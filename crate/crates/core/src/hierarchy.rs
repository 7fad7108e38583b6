//! Louvain hierarchical community detection.
//!
//! Each aggregation round contributes one layer. A layer's community
//! assignment is always expressed over the ORIGINAL node set (composed
//! through the aggregations), because downstream recombination sums
//! same-shape N-by-N layer reconstructions. Levels run finest to
//! coarsest; community counts are monotone non-increasing.

use crate::error::{GtiError, Result};
use crate::graph::Graph;
use crate::rng::{rng_for, Stream};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub const DEFAULT_MIN_MOD_GAIN: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct HierarchyDecomposition {
    /// Finest-to-coarsest community assignment per original node; ids
    /// dense 0..counts[l].
    pub levels: Vec<Vec<u32>>,
    /// Community count per level.
    pub counts: Vec<usize>,
    /// Original-graph modularity of each level's assignment.
    pub modularity: Vec<f64>,
}

impl HierarchyDecomposition {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }
}

/// Newman modularity Q = sum_c [e_c/m - (d_c/2m)^2].
pub fn modularity(g: &Graph, assignment: &[u32]) -> Result<f64> {
    if assignment.len() != g.n_nodes() {
        return Err(GtiError::arg(format!(
            "assignment covers {} of {} nodes",
            assignment.len(),
            g.n_nodes()
        )));
    }
    let m = g.n_edges() as f64;
    if m == 0.0 {
        return Err(GtiError::arg("modularity undefined for edgeless graph"));
    }
    let n_comm = assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut intra = vec![0.0f64; n_comm];
    let mut degree = vec![0.0f64; n_comm];
    for (u, v) in g.edges() {
        if assignment[u as usize] == assignment[v as usize] {
            intra[assignment[u as usize] as usize] += 1.0;
        }
    }
    for v in 0..g.n_nodes() {
        degree[assignment[v] as usize] += g.degree(v as u32) as f64;
    }
    let mut q = 0.0;
    for c in 0..n_comm {
        q += intra[c] / m - (degree[c] / (2.0 * m)).powi(2);
    }
    Ok(q)
}

/// Weighted aggregate graph used between Louvain rounds.
struct WGraph {
    n: usize,
    adj: Vec<Vec<(u32, f64)>>,
    self_loop: Vec<f64>,
    /// Total weight m = edge weights + self-loops.
    total: f64,
}

impl WGraph {
    fn from_graph(g: &Graph) -> Self {
        let mut adj = vec![Vec::new(); g.n_nodes()];
        for (u, v) in g.edges() {
            adj[u as usize].push((v, 1.0));
            adj[v as usize].push((u, 1.0));
        }
        WGraph {
            n: g.n_nodes(),
            adj,
            self_loop: vec![0.0; g.n_nodes()],
            total: g.n_edges() as f64,
        }
    }

    fn degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loop[v]
    }
}

/// One local-moving phase. Returns the dense-renumbered partition and
/// whether any node moved.
fn local_move(wg: &WGraph, rng: &mut ChaCha8Rng, max_passes: usize) -> (Vec<u32>, bool) {
    let n = wg.n;
    let m = wg.total;
    let mut community: Vec<u32> = (0..n as u32).collect();
    let degrees: Vec<f64> = (0..n).map(|v| wg.degree(v)).collect();
    let mut sigma_tot = degrees.clone();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut any_moved = false;
    for _ in 0..max_passes {
        let mut moved = false;
        for &node in &order {
            let cur = community[node];
            let ki = degrees[node];
            sigma_tot[cur as usize] -= ki;

            // links from node into each neighboring community; BTreeMap
            // iteration gives the lowest-id tie-break for free
            let mut ki_in: BTreeMap<u32, f64> = BTreeMap::new();
            ki_in.entry(cur).or_insert(0.0);
            for &(nb, w) in &wg.adj[node] {
                *ki_in.entry(community[nb as usize]).or_insert(0.0) += w;
            }

            let mut best = cur;
            let mut best_gain = f64::NEG_INFINITY;
            for (&c, &kin) in &ki_in {
                let gain = kin / m - sigma_tot[c as usize] * ki / (2.0 * m * m);
                if gain > best_gain {
                    best_gain = gain;
                    best = c;
                }
            }
            sigma_tot[best as usize] += ki;
            if best != cur {
                community[node] = best;
                moved = true;
                any_moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    // renumber densely by ascending node id
    let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
    let mut next = 0u32;
    let renumbered = community
        .iter()
        .map(|&c| {
            *remap.entry(c).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect();
    (renumbered, any_moved)
}

fn aggregate(wg: &WGraph, partition: &[u32]) -> WGraph {
    let n_new = partition.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut self_loop = vec![0.0; n_new];
    let mut weights: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for v in 0..wg.n {
        let cv = partition[v];
        self_loop[cv as usize] += wg.self_loop[v];
        for &(u, w) in &wg.adj[v] {
            if (u as usize) < v {
                continue; // visit each undirected edge once
            }
            let cu = partition[u as usize];
            if cu == cv {
                self_loop[cv as usize] += w;
            } else {
                let key = (cv.min(cu), cv.max(cu));
                *weights.entry(key).or_insert(0.0) += w;
            }
        }
    }
    let mut adj = vec![Vec::new(); n_new];
    for (&(a, b), &w) in &weights {
        adj[a as usize].push((b, w));
        adj[b as usize].push((a, w));
    }
    WGraph {
        n: n_new,
        adj,
        self_loop,
        total: wg.total,
    }
}

/// Full Louvain: local moves, aggregation, repeat. One hierarchy level
/// per round; terminates when the modularity gain drops below
/// `min_mod_gain`.
pub fn louvain_decompose(
    g: &Graph,
    seed: u64,
    min_mod_gain: f64,
) -> Result<HierarchyDecomposition> {
    if g.n_edges() == 0 {
        return Err(GtiError::arg(
            "hierarchy needs at least one edge (modularity undefined)",
        ));
    }
    let mut rng = rng_for(seed, Stream::Hierarchy);
    let mut wg = WGraph::from_graph(g);
    let mut node_to_meta: Vec<u32> = (0..g.n_nodes() as u32).collect();
    let mut levels: Vec<Vec<u32>> = Vec::new();
    let mut counts = Vec::new();
    let mut mods = Vec::new();
    let mut q_prev = f64::NEG_INFINITY;

    loop {
        let (partition, moved) = local_move(&wg, &mut rng, 100);
        let composed: Vec<u32> = node_to_meta
            .iter()
            .map(|&meta| partition[meta as usize])
            .collect();
        let q_now = modularity(g, &composed)?;
        let n_comm = partition.iter().map(|&c| c as usize + 1).max().unwrap_or(0);

        if levels.is_empty() {
            counts.push(n_comm);
            mods.push(q_now);
            levels.push(composed.clone());
            if !moved {
                break;
            }
        } else {
            if !moved || q_now - q_prev < min_mod_gain {
                break;
            }
            counts.push(n_comm);
            mods.push(q_now);
            levels.push(composed.clone());
        }
        q_prev = q_now;
        if n_comm == wg.n {
            break; // aggregation cannot shrink further
        }
        wg = aggregate(&wg, &partition);
        node_to_meta = composed;
    }

    Ok(HierarchyDecomposition {
        levels,
        counts,
        modularity: mods,
    })
}
