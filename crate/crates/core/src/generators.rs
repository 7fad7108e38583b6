//! Synthetic graph models: Erdős–Rényi, Barabási–Albert,
//! Watts–Strogatz, and stochastic Kronecker. Deterministic for a fixed
//! seed; independent graphs may be generated in parallel.

use crate::error::{GtiError, Result};
use crate::graph::Graph;
use crate::rng::{rng_for, Stream};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Default stochastic Kronecker initiator.
pub const DEFAULT_INITIATOR: [[f64; 2]; 2] = [[0.9, 0.5], [0.5, 0.1]];

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    /// Each node pair is an edge independently with probability `p`.
    Er { n: usize, p: f64 },
    /// Preferential attachment: `m` seed nodes that start edge-free but
    /// count as mutually connected for attachment weights, then each
    /// new node attaches `m` edges. Edge count is exactly `m * (n - m)`.
    Ba { n: usize, m: usize },
    /// Ring lattice with `k_ring` nearest neighbors, each lattice edge
    /// rewired independently with probability `p` (no duplicates or
    /// self-loops, so the edge count stays `n * k_ring / 2`).
    Ws { n: usize, k_ring: usize, p: f64 },
    /// `power`-th Kronecker power of the 2x2 initiator as an
    /// edge-probability matrix; each upper-triangular entry sampled
    /// independently, diagonal dropped. Node count is `2^power`.
    Kronecker {
        initiator: [[f64; 2]; 2],
        power: u32,
    },
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GeneratorSpec::Er { n, p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(GtiError::arg(format!("ER p={p} outside [0,1]")));
                }
                if n == 0 {
                    return Err(GtiError::arg("ER needs n >= 1"));
                }
            }
            GeneratorSpec::Ba { n, m } => {
                if m < 1 || m >= n {
                    return Err(GtiError::arg(format!("BA needs 1 <= m < n, got m={m} n={n}")));
                }
            }
            GeneratorSpec::Ws { n, k_ring, p } => {
                if k_ring == 0 || k_ring % 2 != 0 || k_ring >= n {
                    return Err(GtiError::arg(format!(
                        "WS needs even k_ring < n, got k_ring={k_ring} n={n}"
                    )));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(GtiError::arg(format!("WS p={p} outside [0,1]")));
                }
            }
            GeneratorSpec::Kronecker { initiator, power } => {
                if power < 1 {
                    return Err(GtiError::arg("Kronecker needs power >= 1"));
                }
                for row in &initiator {
                    for &v in row {
                        if !(0.0..=1.0).contains(&v) {
                            return Err(GtiError::arg(format!(
                                "Kronecker initiator entry {v} outside [0,1]"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            GeneratorSpec::Er { .. } => "er",
            GeneratorSpec::Ba { .. } => "ba",
            GeneratorSpec::Ws { .. } => "ws",
            GeneratorSpec::Kronecker { .. } => "kronecker",
        }
    }
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Graph> {
    spec.validate()?;
    let mut rng = rng_for(seed, Stream::Generator);
    match *spec {
        GeneratorSpec::Er { n, p } => Ok(erdos_renyi(n, p, &mut rng)),
        GeneratorSpec::Ba { n, m } => Ok(barabasi_albert(n, m, &mut rng)),
        GeneratorSpec::Ws { n, k_ring, p } => Ok(watts_strogatz(n, k_ring, p, &mut rng)),
        GeneratorSpec::Kronecker { initiator, power } => {
            Ok(kronecker(initiator, power, &mut rng))
        }
    }
}

/// Generate `count` graphs from the same spec with seeds
/// `base_seed..base_seed+count`, in parallel.
pub fn generate_ensemble(spec: &GeneratorSpec, base_seed: u64, count: usize) -> Result<Vec<Graph>> {
    spec.validate()?;
    Ok(crate::par::map_indexed(count, |i| {
        generate(spec, base_seed + i as u64).expect("validated spec")
    }))
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.gen::<f64>() < p {
                g.add_edge(i, j).expect("in range");
            }
        }
    }
    g
}

fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    // attachment pool: one entry per unit of virtual degree. Seed nodes
    // start with weight m-1 each (the virtual clique), real edges append
    // both endpoints.
    let mut pool: Vec<u32> = Vec::with_capacity(2 * m * n);
    for s in 0..m as u32 {
        for _ in 0..m.saturating_sub(1) {
            pool.push(s);
        }
    }
    for v in m as u32..n as u32 {
        let mut targets: Vec<u32> = Vec::with_capacity(m);
        // draw distinct targets preferentially; fall back to uniform
        // over remaining nodes if the pool cannot supply m distinct ids
        let mut guard = 0usize;
        while targets.len() < m && guard < 50 * (m + pool.len()) {
            guard += 1;
            if pool.is_empty() {
                break;
            }
            let cand = pool[rng.gen_range(0..pool.len())];
            if cand != v && !targets.contains(&cand) {
                targets.push(cand);
            }
        }
        while targets.len() < m {
            let cand = rng.gen_range(0..v);
            if !targets.contains(&cand) {
                targets.push(cand);
            }
        }
        for &t in &targets {
            g.add_edge(v, t).expect("distinct targets");
            pool.push(v);
            pool.push(t);
        }
    }
    g
}

fn watts_strogatz(n: usize, k_ring: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::new(n);
    for ring in 1..=(k_ring / 2) as u32 {
        for u in 0..n as u32 {
            g.add_edge(u, (u + ring) % n as u32).expect("lattice");
        }
    }
    if p == 0.0 {
        return g;
    }
    for ring in 1..=(k_ring / 2) as u32 {
        for u in 0..n as u32 {
            let v = (u + ring) % n as u32;
            if rng.gen::<f64>() >= p {
                continue;
            }
            if g.degree(u) == n - 1 {
                continue; // no legal rewiring target
            }
            let w = loop {
                let cand = rng.gen_range(0..n as u32);
                if cand != u && !g.has_edge(u, cand) {
                    break cand;
                }
            };
            g.remove_edge(u, v);
            g.add_edge(u, w).expect("checked candidate");
        }
    }
    g
}

fn kronecker(initiator: [[f64; 2]; 2], power: u32, rng: &mut ChaCha8Rng) -> Graph {
    let n = 1usize << power;
    // probability of (i, j) is the product of initiator entries over bit
    // positions, so the full matrix never needs materializing
    let prob = |i: usize, j: usize| -> f64 {
        let mut p = 1.0;
        for bit in 0..power {
            let bi = (i >> bit) & 1;
            let bj = (j >> bit) & 1;
            p *= initiator[bi][bj];
        }
        p
    };
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < prob(i, j) {
                g.add_edge(i as u32, j as u32).expect("in range");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ba_edge_count_is_closed_form() {
        let g = generate(&GeneratorSpec::Ba { n: 500, m: 2 }, 17).unwrap();
        assert_eq!(g.n_nodes(), 500);
        assert_eq!(g.n_edges(), 996);
        let g = generate(&GeneratorSpec::Ba { n: 10, m: 3 }, 4).unwrap();
        assert_eq!(g.n_edges(), 3 * 7);
    }

    #[test]
    fn ws_edge_count_fixed_and_p0_is_lattice() {
        let g = generate(
            &GeneratorSpec::Ws { n: 500, k_ring: 2, p: 0.1 },
            11,
        )
        .unwrap();
        assert_eq!(g.n_edges(), 500);

        let ring = generate(&GeneratorSpec::Ws { n: 12, k_ring: 4, p: 0.0 }, 0).unwrap();
        assert_eq!(ring.n_edges(), 24);
        for u in 0..12u32 {
            for d in [1u32, 2] {
                assert!(ring.has_edge(u, (u + d) % 12));
            }
        }
    }

    #[test]
    fn er_mean_edges_within_3_sigma() {
        let n = 500usize;
        let p = 0.2012f64;
        let pairs = (n * (n - 1) / 2) as f64;
        let seeds = 50;
        let graphs = generate_ensemble(&GeneratorSpec::Er { n, p }, 100, seeds).unwrap();
        let mean: f64 =
            graphs.iter().map(|g| g.n_edges() as f64).sum::<f64>() / seeds as f64;
        let sigma_mean = (pairs * p * (1.0 - p)).sqrt() / (seeds as f64).sqrt();
        assert!(
            (mean - pairs * p).abs() < 3.0 * sigma_mean,
            "ER mean {mean} vs expected {}",
            pairs * p
        );
    }

    #[test]
    fn kronecker_node_count_is_power_of_two() {
        let g = generate(
            &GeneratorSpec::Kronecker { initiator: DEFAULT_INITIATOR, power: 6 },
            3,
        )
        .unwrap();
        assert_eq!(g.n_nodes(), 64);
    }

    #[test]
    fn deterministic_per_seed() {
        for spec in [
            GeneratorSpec::Er { n: 60, p: 0.1 },
            GeneratorSpec::Ba { n: 60, m: 3 },
            GeneratorSpec::Ws { n: 60, k_ring: 4, p: 0.3 },
            GeneratorSpec::Kronecker { initiator: DEFAULT_INITIATOR, power: 5 },
        ] {
            let a = generate(&spec, 42).unwrap();
            let b = generate(&spec, 42).unwrap();
            assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
            let c = generate(&spec, 43).unwrap();
            assert!(
                a.edges().collect::<Vec<_>>() != c.edges().collect::<Vec<_>>()
                    || a.n_edges() == 0
            );
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&GeneratorSpec::Er { n: 5, p: 1.5 }, 0).is_err());
        assert!(generate(&GeneratorSpec::Ba { n: 5, m: 5 }, 0).is_err());
        assert!(generate(&GeneratorSpec::Ws { n: 5, k_ring: 3, p: 0.1 }, 0).is_err());
        assert!(generate(
            &GeneratorSpec::Kronecker { initiator: [[2.0, 0.0], [0.0, 0.0]], power: 2 },
            0
        )
        .is_err());
    }
}
