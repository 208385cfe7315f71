//! Seeded generators and small helpers shared by the integration tests.
#![allow(dead_code)]

use maxdist::domains::{DagDpInstance, GraphData};
use maxdist::instance::DomainInstance;
use maxdist::{SetFamily, SubsetMask};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform integer in `lo..=hi`.
pub fn pick(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

pub fn coin(rng: &mut ChaCha8Rng, num: u32, den: u32) -> bool {
    rng.next_u32() % den < num
}

pub fn set(n: usize, items: &[usize]) -> SubsetMask {
    SubsetMask::from_indices(n, items.iter().copied()).unwrap()
}

pub fn family(n: usize, sets: &[&[usize]]) -> SetFamily {
    SetFamily::from_sets(n, sets.iter().map(|s| set(n, s))).unwrap()
}

pub fn random_set(rng: &mut ChaCha8Rng, n: usize) -> SubsetMask {
    SubsetMask::from_bits(n, rng.next_u64() & ((1u64 << n) - 1)).unwrap()
}

/// Up to `max_sets` distinct random subsets of an `n`-element universe.
pub fn random_family(rng: &mut ChaCha8Rng, n: usize, max_sets: usize) -> SetFamily {
    let want = pick(rng, 1, max_sets);
    SetFamily::from_sets_dedup(n, (0..want).map(|_| random_set(rng, n)))
}

/// Up to `max_sets` distinct random subsets with at most `max_len` elements each.
pub fn random_bounded_family(rng: &mut ChaCha8Rng, n: usize, max_sets: usize, max_len: usize) -> SetFamily {
    let want = pick(rng, 1, max_sets);
    let sets = (0..want).map(|_| {
        let len = pick(rng, 0, max_len.min(n));
        let mut s = SubsetMask::empty(n);
        while s.len() < len {
            s.insert(pick(rng, 0, n - 1));
        }
        s
    });
    SetFamily::from_sets_dedup(n, sets.collect::<Vec<_>>())
}

/// A random family closed under complement.
pub fn random_complement_closed(rng: &mut ChaCha8Rng, n: usize, max_pairs: usize) -> SetFamily {
    let want = pick(rng, 1, max_pairs);
    let sets: Vec<SubsetMask> = (0..want)
        .map(|_| random_set(rng, n))
        .flat_map(|s| [s, s.complement()])
        .collect();
    SetFamily::from_sets_dedup(n, sets)
}

/// Simple graph without self-loops or repeated edges.
pub fn random_graph(rng: &mut ChaCha8Rng, directed: bool, nv: usize, max_edges: usize, num: u32, den: u32) -> GraphData {
    let mut edges = Vec::new();
    for u in 0..nv {
        for v in 0..nv {
            let keep = if directed { u != v } else { u < v };
            if keep && edges.len() < max_edges && coin(rng, num, den) {
                edges.push((u, v));
            }
        }
    }
    GraphData::new(directed, nv, edges).unwrap()
}

pub const ADAPTER_KINDS: [&str; 8] = [
    "explicit",
    "vertex_cover",
    "spanning_tree",
    "uniform_matroid",
    "partition_matroid",
    "matching",
    "st_mincut",
    "dag_dp",
];

/// A random instance of the given kind with a ground set of at most eight elements.
pub fn random_instance(rng: &mut ChaCha8Rng, kind: &str) -> DomainInstance {
    random_instance_up_to(rng, kind, 8)
}

/// A random instance of the given kind with a ground set of at most `max_n` elements.
pub fn random_instance_up_to(rng: &mut ChaCha8Rng, kind: &str, max_n: usize) -> DomainInstance {
    match kind {
        "explicit" => {
            let n = pick(rng, 1, max_n.min(7));
            DomainInstance::Explicit(random_family(rng, n, 20))
        }
        "vertex_cover" => {
            let nv = pick(rng, 2, max_n.min(6));
            let graph = random_graph(rng, false, nv, 9, 1, 2);
            let ell = pick(rng, 0, nv);
            DomainInstance::VertexCover { graph, ell }
        }
        "spanning_tree" => {
            let nv = pick(rng, 2, 5);
            DomainInstance::SpanningTree(random_graph(rng, false, nv, max_n, 2, 3))
        }
        "uniform_matroid" => {
            let universe = pick(rng, 1, max_n);
            let rank = pick(rng, 0, universe);
            DomainInstance::UniformMatroid { universe, rank }
        }
        "partition_matroid" => {
            let universe = pick(rng, 1, max_n);
            let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
            let n_blocks = pick(rng, 1, 3);
            for _ in 0..n_blocks {
                blocks.push((0, Vec::new()));
            }
            for e in 0..universe {
                // some elements stay in no block
                let b = pick(rng, 0, n_blocks);
                if b < n_blocks {
                    blocks[b].1.push(e);
                }
            }
            for b in &mut blocks {
                b.0 = pick(rng, 0, b.1.len());
            }
            DomainInstance::PartitionMatroid { universe, blocks }
        }
        "matching" => {
            let nv = pick(rng, 2, 6);
            let graph = random_graph(rng, false, nv, max_n, 1, 2);
            let size = pick(rng, 0, nv / 2);
            DomainInstance::Matching { graph, size }
        }
        "st_mincut" => {
            let nv = pick(rng, 2, max_n);
            let directed = coin(rng, 1, 2);
            let graph = random_graph(rng, directed, nv, 10, 1, 2);
            DomainInstance::StMincut { graph, s: 0, t: nv - 1 }
        }
        "dag_dp" => loop {
            let nv = pick(rng, 1, 6);
            let mut edges = Vec::new();
            for u in 0..nv {
                for v in u + 1..nv {
                    if coin(rng, 1, 3) {
                        edges.push((u, v));
                    }
                }
            }
            let dag = GraphData::new(true, nv, edges).unwrap();
            let universe = pick(rng, nv.div_ceil(2), max_n).max(1);
            let labels = (0..nv).map(|_| pick(rng, 0, universe - 1)).collect();
            let inst = DomainInstance::DagDp(DagDpInstance { dag, labels, universe });
            // labels may repeat on a path; such draws are rejected
            if inst.oracle().is_ok() {
                return inst;
            }
        },
        other => panic!("unknown kind {other}"),
    }
}

/// Every `(forced, forbidden)` pair of disjoint sets with at most `budget` elements in total.
pub fn constraint_pairs(n: usize, budget: usize) -> Vec<(SubsetMask, SubsetMask)> {
    let small: Vec<SubsetMask> = (0..1u64 << n)
        .filter(|b| b.count_ones() as usize <= budget)
        .map(|b| SubsetMask::from_bits(n, b).unwrap())
        .collect();
    let mut out = Vec::new();
    for x in &small {
        for y in &small {
            if x.is_disjoint(y) && x.len() + y.len() <= budget {
                out.push((*x, *y));
            }
        }
    }
    out
}
