//! Balance a layer into M non-overlapping subgraphs of near-equal size
//! and pad them to a common tile size k (a multiple of 4, so two
//! stride-2 layers divide it evenly).
//!
//! The partitioner is a compact METIS-flavored two-phase scheme: seeded
//! BFS region growing from spread-out seeds, then Kernighan-Lin style
//! refinement that only swaps equal-size node pairs, so balance is
//! preserved and the edge cut never increases.

use crate::error::{GtiError, Result};
use crate::graph::Graph;
use crate::hierarchy::HierarchyDecomposition;
use crate::rng::{rng_for, Stream};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// One level's balanced subgraph layout.
#[derive(Debug, Clone)]
pub struct LayerPlan {
    pub level: usize,
    /// Subgraph count (the level's Louvain community count).
    pub m: usize,
    /// Common padded tile size; multiple of 4, at least 4.
    pub k: usize,
    /// Original node ids per subgraph, degree-descending (ties by id).
    pub slots: Vec<Vec<u32>>,
}

impl LayerPlan {
    pub fn pad_count(&self, subgraph: usize) -> usize {
        self.k - self.slots[subgraph].len()
    }
}

/// Original-graph edges crossing subgraph boundaries at one level.
#[derive(Debug, Clone)]
pub struct InterEdgeSet {
    pub level: usize,
    /// Canonical (u < v, ascending) order.
    pub edges: Vec<(u32, u32)>,
}

/// Number of edges crossing part boundaries.
pub fn edge_cut(g: &Graph, assignment: &[u32]) -> usize {
    g.edges()
        .filter(|&(u, v)| assignment[u as usize] != assignment[v as usize])
        .count()
}

/// Partition into `m` parts with sizes differing by at most one.
pub fn balanced_partition(g: &Graph, m: usize, seed: u64) -> Result<Vec<u32>> {
    let mut rng = rng_for(seed, Stream::Partition(0));
    balanced_partition_with(g, m, &mut rng)
}

pub(crate) fn balanced_partition_with(
    g: &Graph,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u32>> {
    let n = g.n_nodes();
    if m == 0 || m > n {
        return Err(GtiError::arg(format!("need 1 <= M <= {n}, got M={m}")));
    }
    let sizes = part_sizes(n, m);
    let mut assignment = grow_parts(g, &sizes, rng);
    kl_refine(g, &mut assignment, m);
    Ok(assignment)
}

/// Target sizes: the first `n % m` parts get the extra node.
fn part_sizes(n: usize, m: usize) -> Vec<usize> {
    let q = n / m;
    let r = n % m;
    (0..m).map(|p| if p < r { q + 1 } else { q }).collect()
}

/// Farthest-first seed spreading followed by round-robin BFS growth.
fn grow_parts(g: &Graph, sizes: &[usize], rng: &mut ChaCha8Rng) -> Vec<u32> {
    let n = g.n_nodes();
    let m = sizes.len();
    const UNASSIGNED: u32 = u32::MAX;

    let mut seeds: Vec<u32> = vec![rng.gen_range(0..n as u32)];
    while seeds.len() < m {
        // multi-source BFS distance from the chosen seeds
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &s in &seeds {
            dist[s as usize] = 0;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if dist[w as usize] == usize::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        // farthest node wins; unreachable (MAX) beats everything,
        // ties break to the lowest id
        let far = (0..n as u32)
            .filter(|v| !seeds.contains(v))
            .max_by_key(|&v| (dist[v as usize], std::cmp::Reverse(v)))
            .expect("m <= n leaves a candidate");
        seeds.push(far);
    }

    let mut assignment = vec![UNASSIGNED; n];
    let mut remaining = sizes.to_vec();
    let mut frontiers: Vec<VecDeque<u32>> = seeds.iter().map(|&s| VecDeque::from([s])).collect();
    let mut assigned = 0usize;
    let mut next_unassigned = 0usize;

    while assigned < n {
        let mut progressed = false;
        for p in 0..m {
            if remaining[p] == 0 {
                continue;
            }
            let v = loop {
                match frontiers[p].pop_front() {
                    Some(v) if assignment[v as usize] == UNASSIGNED => break Some(v),
                    Some(_) => continue,
                    None => break None,
                }
            };
            let v = match v {
                Some(v) => v,
                None => {
                    // frontier exhausted (disconnected remainder): take
                    // the lowest unassigned node
                    while next_unassigned < n && assignment[next_unassigned] != UNASSIGNED {
                        next_unassigned += 1;
                    }
                    if next_unassigned >= n {
                        continue;
                    }
                    next_unassigned as u32
                }
            };
            assignment[v as usize] = p as u32;
            remaining[p] -= 1;
            assigned += 1;
            progressed = true;
            for &w in g.neighbors(v) {
                if assignment[w as usize] == UNASSIGNED {
                    frontiers[p].push_back(w);
                }
            }
        }
        debug_assert!(progressed, "growth stalled");
        if !progressed {
            break;
        }
    }
    assignment
}

/// Equal-size pair swaps between adjacent parts. Each applied swap
/// strictly reduces the total edge cut.
pub(crate) fn kl_refine(g: &Graph, assignment: &mut [u32], m: usize) {
    const SWEEPS: usize = 3;
    for _ in 0..SWEEPS {
        let mut improved = false;
        // adjacency between parts, from current cut edges
        let mut adjacent = vec![false; m * m];
        for (u, v) in g.edges() {
            let (a, b) = (assignment[u as usize], assignment[v as usize]);
            if a != b {
                adjacent[a as usize * m + b as usize] = true;
                adjacent[b as usize * m + a as usize] = true;
            }
        }
        for a in 0..m as u32 {
            for b in (a + 1)..m as u32 {
                if !adjacent[a as usize * m + b as usize] {
                    continue;
                }
                improved |= refine_pair(g, assignment, a, b);
            }
        }
        if !improved {
            break;
        }
    }
}

/// Repeatedly apply the best strictly-improving swap between parts
/// `a` and `b`.
fn refine_pair(g: &Graph, assignment: &mut [u32], a: u32, b: u32) -> bool {
    let nodes_a: Vec<u32> = members(assignment, a);
    let nodes_b: Vec<u32> = members(assignment, b);
    let mut any = false;
    let max_swaps = nodes_a.len().min(nodes_b.len());
    for _ in 0..max_swaps {
        // D(v) = external (to the other part) minus internal edges
        let d = |v: u32, own: u32, other: u32| -> i64 {
            let mut ext = 0i64;
            let mut int = 0i64;
            for &w in g.neighbors(v) {
                if assignment[w as usize] == own {
                    int += 1;
                } else if assignment[w as usize] == other {
                    ext += 1;
                }
            }
            ext - int
        };
        let mut best: Option<(i64, u32, u32)> = None;
        for &va in &nodes_a {
            if assignment[va as usize] != a {
                continue;
            }
            let da = d(va, a, b);
            for &vb in &nodes_b {
                if assignment[vb as usize] != b {
                    continue;
                }
                let linked = i64::from(g.has_edge(va, vb));
                let gain = da + d(vb, b, a) - 2 * linked;
                if gain > best.map_or(0, |(bg, _, _)| bg) {
                    best = Some((gain, va, vb));
                }
            }
        }
        match best {
            Some((_, va, vb)) => {
                assignment[va as usize] = b;
                assignment[vb as usize] = a;
                any = true;
            }
            None => break,
        }
    }
    any
}

fn members(assignment: &[u32], part: u32) -> Vec<u32> {
    assignment
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p == part)
        .map(|(v, _)| v as u32)
        .collect()
}

/// Partition the graph for one hierarchy level: M from the level's
/// community count, k the smallest multiple of 4 covering the largest
/// part, slots degree-descending.
pub fn build_layer_plan(
    g: &Graph,
    decomposition: &HierarchyDecomposition,
    level: usize,
    seed: u64,
) -> Result<(LayerPlan, InterEdgeSet)> {
    if level >= decomposition.n_levels() {
        return Err(GtiError::arg(format!(
            "level {level} out of range ({} levels)",
            decomposition.n_levels()
        )));
    }
    let m = decomposition.counts[level];
    let mut rng = rng_for(seed, Stream::Partition(level));
    let assignment = balanced_partition_with(g, m, &mut rng)?;

    let n = g.n_nodes();
    let ceil = n.div_ceil(m);
    let k = ceil.div_ceil(4).max(1) * 4;

    let mut slots: Vec<Vec<u32>> = vec![Vec::new(); m];
    for v in 0..n as u32 {
        slots[assignment[v as usize] as usize].push(v);
    }
    for part in &mut slots {
        part.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    }

    let edges = g
        .edges()
        .filter(|&(u, v)| assignment[u as usize] != assignment[v as usize])
        .collect();

    Ok((
        LayerPlan { level, m, k, slots },
        InterEdgeSet { level, edges },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, GeneratorSpec};
    use crate::hierarchy::louvain_decompose;

    fn two_k5_bridge() -> Graph {
        let mut g = Graph::new(10);
        for base in [0u32, 5] {
            for i in 0..5 {
                for j in (i + 1)..5 {
                    g.add_edge(base + i, base + j).unwrap();
                }
            }
        }
        g.add_edge(4, 5).unwrap();
        g
    }

    #[test]
    fn twelve_nodes_three_parts_of_four() {
        let g = generate(&GeneratorSpec::Er { n: 12, p: 0.4 }, 5).unwrap();
        let assignment = balanced_partition(&g, 3, 9).unwrap();
        let mut counts = [0usize; 3];
        for &p in &assignment {
            counts[p as usize] += 1;
        }
        assert_eq!(counts, [4, 4, 4]);
    }

    #[test]
    fn two_cliques_split_at_the_bridge() {
        let g = two_k5_bridge();
        // exhaustive oracle over balanced 2-partitions
        let mut best_cut = usize::MAX;
        for mask in 0u32..(1 << 10) {
            if mask.count_ones() != 5 {
                continue;
            }
            let assign: Vec<u32> = (0..10).map(|i| (mask >> i) & 1).collect();
            best_cut = best_cut.min(edge_cut(&g, &assign));
        }
        assert_eq!(best_cut, 1);

        for seed in 0..5 {
            let assignment = balanced_partition(&g, 2, seed).unwrap();
            assert_eq!(edge_cut(&g, &assignment), 1, "seed {seed}");
            for i in 1..5 {
                assert_eq!(assignment[i], assignment[0]);
                assert_eq!(assignment[5 + i], assignment[5]);
            }
        }
    }

    #[test]
    fn single_part_is_identity() {
        let g = two_k5_bridge();
        let assignment = balanced_partition(&g, 1, 0).unwrap();
        assert!(assignment.iter().all(|&p| p == 0));
        assert_eq!(edge_cut(&g, &assignment), 0);
    }

    #[test]
    fn m_larger_than_n_rejected() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(balanced_partition(&g, 4, 0).is_err());
    }

    #[test]
    fn refinement_never_raises_cut_and_keeps_balance() {
        for seed in 0..20u64 {
            let g = generate(&GeneratorSpec::Er { n: 40, p: 0.15 }, seed).unwrap();
            let mut rng = rng_for(seed, Stream::Partition(0));
            let sizes = part_sizes(40, 4);
            let grown = grow_parts(&g, &sizes, &mut rng);
            let before = edge_cut(&g, &grown);
            let mut refined = grown.clone();
            kl_refine(&g, &mut refined, 4);
            let after = edge_cut(&g, &refined);
            assert!(after <= before, "seed {seed}: {after} > {before}");
            let mut counts = [0usize; 4];
            for &p in &refined {
                counts[p as usize] += 1;
            }
            assert_eq!(counts, [10, 10, 10, 10]);
        }
    }

    #[test]
    fn plan_k_rule() {
        // 500 nodes in 7 parts: sizes 71/72, k stays 72
        let sizes = part_sizes(500, 7);
        assert!(sizes.iter().all(|&s| s == 71 || s == 72));
        assert_eq!(sizes.iter().sum::<usize>(), 500);
        assert_eq!(500usize.div_ceil(7).div_ceil(4) * 4, 72);
        // 10 nodes in 3 parts: sizes 4/3/3, k = 4
        assert_eq!(part_sizes(10, 3), vec![4, 3, 3]);
        assert_eq!(10usize.div_ceil(3).div_ceil(4) * 4, 4);
    }

    #[test]
    fn plan_edges_split_exactly() {
        for seed in 0..10u64 {
            let g = generate(&GeneratorSpec::Ba { n: 80, m: 2 }, seed).unwrap();
            let h = louvain_decompose(&g, seed, 1e-7).unwrap();
            for level in 0..h.n_levels() {
                let (plan, inter) = build_layer_plan(&g, &h, level, seed).unwrap();
                // disjoint cover
                let mut seen = vec![false; 80];
                for part in &plan.slots {
                    assert!(part.len() <= plan.k);
                    for &v in part {
                        assert!(!seen[v as usize]);
                        seen[v as usize] = true;
                    }
                }
                assert!(seen.iter().all(|&s| s));
                assert_eq!(plan.k % 4, 0);
                assert!(plan.k >= 4);
                // intra + inter = all edges
                let mut part_of = vec![0u32; 80];
                for (p, part) in plan.slots.iter().enumerate() {
                    for &v in part {
                        part_of[v as usize] = p as u32;
                    }
                }
                let intra = g
                    .edges()
                    .filter(|&(u, v)| part_of[u as usize] == part_of[v as usize])
                    .count();
                assert_eq!(intra + inter.edges.len(), g.n_edges());
                // slot order: degree descending, ties by id
                for part in &plan.slots {
                    for w in part.windows(2) {
                        let (d0, d1) = (g.degree(w[0]), g.degree(w[1]));
                        assert!(d0 > d1 || (d0 == d1 && w[0] < w[1]));
                    }
                }
            }
        }
    }
}
