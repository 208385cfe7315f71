use std::collections::HashMap;

use crate::domains::graph::GraphData;
use crate::error::{Error, Result};
use crate::mask::{check_universe, SubsetMask, WeightVector};
use crate::oracle::{check_query, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};

/// Largest expanded graph the subset DP accepts.
pub const MAX_EXPANDED_VERTICES: usize = 22;

/// Matchings with exactly `ell` edges of an undirected graph.
///
/// Both capabilities work on the `ell`-expanded graph: `|V| - 2ell` pad
/// vertices joined to every real vertex, so that perfect matchings of the
/// expansion restrict to matchings of size `ell` and every such matching
/// extends. Perfect matchings are searched by a DP over vertex masks that
/// always matches the lowest unmatched vertex.
#[derive(Clone, Debug)]
pub struct MatchingOracle {
    graph: GraphData,
    ell: usize,
}

pub fn matching_oracle(graph: GraphData, ell: usize) -> Result<MatchingOracle> {
    if graph.directed {
        return Err(Error::usage("matching domain needs an undirected graph"));
    }
    check_universe(graph.n_edges())?;
    Ok(MatchingOracle { graph, ell })
}

/// The expanded graph after removing some vertices and edges. Real vertices
/// keep their ids; pads follow them.
#[derive(Debug)]
pub struct Expansion {
    pub n_vertices: usize,
    pub n_pads: usize,
    /// Per vertex: (neighbour, original edge id or `None` for a pad edge).
    pub adj: Vec<Vec<(usize, Option<usize>)>>,
    /// Vertices that are already matched before the search starts.
    pub removed: u32,
}

impl Expansion {
    fn full(&self) -> u32 {
        ((1u64 << self.n_vertices) - 1) as u32
    }

    fn lowest_free(&self, matched: u32) -> Option<usize> {
        let free = !matched & self.full();
        (free != 0).then(|| free.trailing_zeros() as usize)
    }

    /// Every perfect matching, as the set of original edges it uses.
    pub fn perfect_matchings(&self) -> Vec<u64> {
        fn go(x: &Expansion, matched: u32, edges: u64, out: &mut Vec<u64>) {
            let Some(v) = x.lowest_free(matched) else {
                out.push(edges);
                return;
            };
            for &(u, e) in &x.adj[v] {
                if matched >> u & 1 == 0 {
                    let used = e.map_or(edges, |e| edges | 1 << e);
                    go(x, matched | 1 << v | 1 << u, used, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, self.removed, 0, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl MatchingOracle {
    pub fn ell(&self) -> usize {
        self.ell
    }

    fn n_edges(&self) -> usize {
        self.graph.n_edges()
    }

    fn is_matching(&self, bits: u64) -> bool {
        let mut seen = vec![false; self.graph.n_vertices];
        for (i, &(u, v)) in self.graph.edges.iter().enumerate() {
            if bits >> i & 1 == 1 {
                if seen[u] || seen[v] {
                    return false;
                }
                seen[u] = true;
                seen[v] = true;
            }
        }
        true
    }

    /// Expansion for matchings of `size` edges avoiding `gone_vertices` and
    /// using only edges in `allowed`. `None` when too few vertices remain.
    pub fn expand(&self, gone_vertices: u64, allowed: u64, size: usize) -> Result<Option<Expansion>> {
        let n = self.graph.n_vertices;
        if n > MAX_EXPANDED_VERTICES {
            return Err(Error::guard(format!(
                "matching domain has {n} vertices, limit is {MAX_EXPANDED_VERTICES}"
            )));
        }
        let live = n - gone_vertices.count_ones() as usize;
        let Some(n_pads) = live.checked_sub(2 * size) else {
            return Ok(None);
        };
        let total = n + n_pads;
        if total > MAX_EXPANDED_VERTICES {
            return Err(Error::guard(format!(
                "matching expansion has {total} vertices, limit is {MAX_EXPANDED_VERTICES}"
            )));
        }
        let mut adj = vec![Vec::new(); total];
        for (i, &(u, v)) in self.graph.edges.iter().enumerate() {
            if allowed >> i & 1 == 1 && (gone_vertices >> u | gone_vertices >> v) & 1 == 0 {
                adj[u].push((v, Some(i)));
                adj[v].push((u, Some(i)));
            }
        }
        for pad in n..total {
            for v in (0..n).filter(|v| gone_vertices >> v & 1 == 0) {
                adj[pad].push((v, None));
                adj[v].push((pad, None));
            }
        }
        Ok(Some(Expansion {
            n_vertices: total,
            n_pads,
            adj,
            removed: gone_vertices as u32,
        }))
    }
}

/// Best weight of a perfect completion of `matched`; pads weigh zero.
fn best_weight(x: &Expansion, w: &WeightVector, matched: u32, memo: &mut HashMap<u32, Option<i64>>) -> Option<i64> {
    let Some(v) = x.lowest_free(matched) else {
        return Some(0);
    };
    if let Some(&hit) = memo.get(&matched) {
        return hit;
    }
    let mut best = None;
    for &(u, e) in &x.adj[v] {
        if matched >> u & 1 == 1 {
            continue;
        }
        if let Some(rest) = best_weight(x, w, matched | 1 << v | 1 << u, memo) {
            let total = rest + e.map_or(0, |e| w.get(e));
            if best.is_none_or(|b| total > b) {
                best = Some(total);
            }
        }
    }
    memo.insert(matched, best);
    best
}

/// Achievable counts of non-center edges in a perfect completion of `matched`,
/// as a bitset indexed by count.
fn blue_counts(x: &Expansion, center: u64, matched: u32, memo: &mut HashMap<u32, u64>) -> u64 {
    let Some(v) = x.lowest_free(matched) else {
        return 1;
    };
    if let Some(&hit) = memo.get(&matched) {
        return hit;
    }
    let mut counts = 0u64;
    for &(u, e) in &x.adj[v] {
        if matched >> u & 1 == 0 {
            let rest = blue_counts(x, center, matched | 1 << v | 1 << u, memo);
            let blue = e.is_some_and(|e| center >> e & 1 == 0);
            counts |= if blue { rest << 1 } else { rest };
        }
    }
    memo.insert(matched, counts);
    counts
}

impl DomainOracle for MatchingOracle {
    fn name(&self) -> &'static str {
        "matching"
    }

    fn universe_size(&self) -> usize {
        self.n_edges()
    }

    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        let all = SubsetMask::full(self.n_edges()).bits();
        let Some(x) = self.expand(0, all, self.ell)? else {
            return Ok(None);
        };
        let mut memo = HashMap::new();
        if best_weight(&x, w, x.removed, &mut memo).is_none() {
            return Ok(None);
        }
        let mut matched = x.removed;
        let mut edges = 0u64;
        while let Some(v) = x.lowest_free(matched) {
            let target = best_weight(&x, w, matched, &mut memo).expect("state is completable");
            let &(u, e) = x.adj[v]
                .iter()
                .find(|&&(u, e)| {
                    matched >> u & 1 == 0
                        && best_weight(&x, w, matched | 1 << v | 1 << u, &mut memo)
                            .is_some_and(|rest| rest + e.map_or(0, |e| w.get(e)) == target)
                })
                .expect("optimal step exists");
            matched |= 1 << v | 1 << u;
            if let Some(e) = e {
                edges |= 1 << e;
            }
        }
        Ok(Some(SubsetMask::from_bits(self.n_edges(), edges)?))
    }

    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        _ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        check_query(self, q)?;
        let (c, x, y) = (q.center.bits(), q.forced.bits(), q.forbidden.bits());
        let forced = q.forced.len();
        if forced > self.ell || !self.is_matching(x) {
            return Ok(ExtensionOutcome::NotFound);
        }
        if self.graph.n_vertices > MAX_EXPANDED_VERTICES {
            return self.expand(0, 0, 0).map(|_| ExtensionOutcome::NotFound);
        }
        // |D △ C| = |C| + ell - 2|D ∩ C|; solve for the non-center edges
        // chosen outside the forced set
        let twice = q.radius + self.ell;
        if twice < q.center.len() || (twice - q.center.len()) % 2 == 1 {
            return Ok(ExtensionOutcome::NotFound);
        }
        let Some(blue) = ((twice - q.center.len()) / 2).checked_sub(q.forced.difference(&q.center).len()) else {
            return Ok(ExtensionOutcome::NotFound);
        };
        let gone = q
            .forced
            .iter()
            .fold(0u64, |acc, e| {
                let (u, v) = self.graph.edges[e];
                acc | 1 << u | 1 << v
            });
        let all = SubsetMask::full(self.n_edges()).bits();
        let Some(ex) = self.expand(gone, all & !(x | y), self.ell - forced)? else {
            return Ok(ExtensionOutcome::NotFound);
        };
        let mut memo = HashMap::new();
        if blue >= 64 || blue_counts(&ex, c, ex.removed, &mut memo) >> blue & 1 == 0 {
            return Ok(ExtensionOutcome::NotFound);
        }
        let mut matched = ex.removed;
        let mut need = blue;
        let mut edges = x;
        while let Some(v) = ex.lowest_free(matched) {
            let &(u, e) = ex.adj[v]
                .iter()
                .find(|&&(u, e)| {
                    if matched >> u & 1 == 1 {
                        return false;
                    }
                    let is_blue = e.is_some_and(|e| c >> e & 1 == 0);
                    let Some(rest) = need.checked_sub(is_blue as usize) else {
                        return false;
                    };
                    blue_counts(&ex, c, matched | 1 << v | 1 << u, &mut memo) >> rest & 1 == 1
                })
                .expect("feasible step exists");
            matched |= 1 << v | 1 << u;
            if let Some(e) = e {
                edges |= 1 << e;
                if c >> e & 1 == 0 {
                    need -= 1;
                }
            }
        }
        let d = SubsetMask::from_bits(self.n_edges(), edges)?;
        debug_assert!(q.accepts(&d) && self.contains(&d));
        Ok(ExtensionOutcome::Found(d))
    }

    fn contains(&self, set: &SubsetMask) -> bool {
        set.universe_size() == self.n_edges() && set.len() == self.ell && self.is_matching(set.bits())
    }
}
