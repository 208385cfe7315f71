use crate::domains::flow::{reach, reverse, FlowNetwork};
use crate::domains::graph::GraphData;
use crate::error::{Error, Result};
use crate::mask::{check_universe, SetFamily, SubsetMask, WeightVector};
use crate::oracle::{check_query, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};

/// Largest node set whose ideals are enumerated.
pub const MAX_FREE_NODES: usize = 24;

/// Poset whose ideals are in bijection with the source sides of minimum
/// s,t-cuts. Nodes are the strongly connected components of the residual graph
/// of a maximum flow that lie neither in the residual reach of `s` nor in the
/// residual co-reach of `t`; `u ⪯ w` iff `w` reaches `u`.
#[derive(Clone, Debug)]
pub struct MinCutPoset {
    pub node_blocks: Vec<SubsetMask>,
    /// `down[w]`: nodes `u ⪯ w`, including `w`.
    pub down: Vec<u64>,
    /// `up[w]`: nodes `u ⪰ w`, including `w`.
    pub up: Vec<u64>,
    /// Vertices inside every minimum cut.
    pub source_block: SubsetMask,
    /// Vertices outside every minimum cut.
    pub sink_block: SubsetMask,
}

impl MinCutPoset {
    fn build(n: usize, residual: &[Vec<usize>], s: usize, t: usize) -> Self {
        let from_s = reach(residual, s);
        let to_t = reach(&reverse(residual), t);
        let mask_of = |flags: &[bool]| {
            flags
                .iter()
                .enumerate()
                .filter(|&(_, &f)| f)
                .fold(0u64, |acc, (v, _)| acc | 1 << v)
        };
        let source = mask_of(&from_s);
        let sink = mask_of(&to_t) & !source;
        let middle = SubsetMask::full(n).bits() & !(source | sink);
        let reach_of: Vec<u64> = (0..n)
            .map(|v| {
                if middle >> v & 1 == 1 {
                    mask_of(&reach(residual, v)) & middle
                } else {
                    0
                }
            })
            .collect();

        let mut node_of = vec![usize::MAX; n];
        let mut node_blocks = Vec::new();
        for v in (0..n).filter(|v| middle >> v & 1 == 1) {
            if node_of[v] != usize::MAX {
                continue;
            }
            let block = (0..n)
                .filter(|&u| reach_of[v] >> u & 1 == 1 && reach_of[u] >> v & 1 == 1)
                .fold(0u64, |acc, u| acc | 1 << u);
            for u in (0..n).filter(|u| block >> u & 1 == 1) {
                node_of[u] = node_blocks.len();
            }
            node_blocks.push(SubsetMask::from_bits(n, block).expect("block within universe"));
        }
        let down: Vec<u64> = node_blocks
            .iter()
            .map(|b| {
                let rep = b.iter().next().expect("blocks are nonempty");
                (0..n)
                    .filter(|&u| reach_of[rep] >> u & 1 == 1)
                    .fold(0u64, |acc, u| acc | 1 << node_of[u])
            })
            .collect();
        let up: Vec<u64> = (0..node_blocks.len())
            .map(|w| {
                (0..node_blocks.len())
                    .filter(|&u| down[u] >> w & 1 == 1)
                    .fold(0u64, |acc, u| acc | 1 << u)
            })
            .collect();
        let poset = MinCutPoset {
            node_blocks,
            down,
            up,
            source_block: SubsetMask::from_bits(n, source).expect("within universe"),
            sink_block: SubsetMask::from_bits(n, sink).expect("within universe"),
        };
        debug_assert!(poset.is_partial_order());
        poset
    }

    pub fn len(&self) -> usize {
        self.node_blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_blocks.is_empty()
    }

    pub fn leq(&self, u: usize, w: usize) -> bool {
        self.down[w] >> u & 1 == 1
    }

    pub fn is_partial_order(&self) -> bool {
        let n = self.len();
        (0..n).all(|w| self.leq(w, w))
            && (0..n).all(|u| (0..n).all(|w| u == w || !(self.leq(u, w) && self.leq(w, u))))
            && (0..n).all(|w| {
                (0..n)
                    .filter(|&u| self.leq(u, w))
                    .all(|u| self.down[u] & !self.down[w] == 0)
            })
    }

    pub fn is_ideal(&self, ideal: u64) -> bool {
        (0..self.len())
            .filter(|w| ideal >> w & 1 == 1)
            .all(|w| self.down[w] & !ideal == 0)
    }

    pub fn cut_of(&self, ideal: u64) -> SubsetMask {
        (0..self.len())
            .filter(|w| ideal >> w & 1 == 1)
            .fold(self.source_block, |acc, w| acc.union(&self.node_blocks[w]))
    }

    /// The ideal whose cut is `cut`, if `cut` is a minimum cut.
    pub fn ideal_of(&self, cut: &SubsetMask) -> Option<u64> {
        if !self.source_block.is_subset(cut) || cut.intersects(&self.sink_block) {
            return None;
        }
        let mut ideal = 0u64;
        for (w, b) in self.node_blocks.iter().enumerate() {
            if b.is_subset(cut) {
                ideal |= 1 << w;
            } else if b.intersects(cut) {
                return None;
            }
        }
        self.is_ideal(ideal).then_some(ideal)
    }

    fn block_size(&self, nodes: u64) -> usize {
        (0..self.len())
            .filter(|w| nodes >> w & 1 == 1)
            .map(|w| self.node_blocks[w].len())
            .sum()
    }

    /// Visits every ideal `I` with `base ⊆ I ⊆ base ∪ free` until `visit`
    /// returns `true`; returns that ideal.
    pub fn find_ideal(&self, base: u64, free: u64, mut visit: impl FnMut(u64) -> bool) -> Result<Option<u64>> {
        let free = free & !base;
        if free.count_ones() as usize > MAX_FREE_NODES {
            return Err(Error::guard(format!(
                "{} undecided poset nodes, limit is {MAX_FREE_NODES}",
                free.count_ones()
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).filter(|w| free >> w & 1 == 1).collect();
        order.sort_by_key(|&w| (self.down[w].count_ones(), w));
        fn go(
            p: &MinCutPoset,
            order: &[usize],
            cur: u64,
            visit: &mut dyn FnMut(u64) -> bool,
        ) -> Option<u64> {
            let Some((&w, rest)) = order.split_first() else {
                return (p.is_ideal(cur) && visit(cur)).then_some(cur);
            };
            go(p, rest, cur, visit).or_else(|| {
                let with = cur | 1 << w;
                (p.down[w] & !with == 0).then(|| go(p, rest, with, visit)).flatten()
            })
        }
        Ok(go(self, &order, base, &mut visit))
    }

    /// Every ideal of the poset.
    pub fn ideals(&self) -> Result<Vec<u64>> {
        let all = if self.is_empty() { 0 } else { u64::MAX >> (64 - self.len()) };
        let mut out = Vec::new();
        self.find_ideal(0, all, |i| {
            out.push(i);
            false
        })?;
        out.sort_unstable();
        Ok(out)
    }
}

/// Source sides of minimum s,t-cuts with unit arc capacities. A cut `S` is
/// counted by its arcs leaving `S`; undirected edges become two opposite arcs.
#[derive(Clone, Debug)]
pub struct MinCutOracle {
    graph: GraphData,
    s: usize,
    t: usize,
    arcs: Vec<(usize, usize)>,
    cut_value: usize,
    poset: MinCutPoset,
}

pub fn mincut_oracle(graph: GraphData, s: usize, t: usize) -> Result<MinCutOracle> {
    let n = graph.n_vertices;
    check_universe(n)?;
    if s >= n || t >= n || s == t {
        return Err(Error::usage(format!(
            "terminals s={s}, t={t} must be distinct vertices of 0..{n}"
        )));
    }
    let arcs: Vec<(usize, usize)> = if graph.directed {
        graph.edges.clone()
    } else {
        graph.edges.iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect()
    };
    let mut net = FlowNetwork::new(n);
    for &(u, v) in &arcs {
        net.add_edge(u, v, 1);
    }
    let cut_value = net.max_flow(s, t) as usize;
    let poset = MinCutPoset::build(n, &net.residual_adjacency(), s, t);
    Ok(MinCutOracle {
        graph,
        s,
        t,
        arcs,
        cut_value,
        poset,
    })
}

impl MinCutOracle {
    pub fn poset(&self) -> &MinCutPoset {
        &self.poset
    }

    pub fn cut_value(&self) -> usize {
        self.cut_value
    }

    pub fn terminals(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    fn n(&self) -> usize {
        self.graph.n_vertices
    }

    fn arcs_leaving(&self, bits: u64) -> usize {
        self.arcs
            .iter()
            .filter(|&&(u, v)| bits >> u & 1 == 1 && bits >> v & 1 == 0)
            .count()
    }

    /// `k + 1` cuts along a chain from `C`, consecutive ones `2d + 1` nodes apart.
    fn chain(&self, ic: u64, order: &[usize], grow: bool, ctx: &SparsifyContext) -> SetFamily {
        let step = 2 * ctx.d + 1;
        let mut family = SetFamily::new(self.n());
        let mut ideal = ic;
        family.insert(self.poset.cut_of(ideal));
        for chunk in order.chunks(step).take(ctx.k) {
            for &w in chunk {
                if grow {
                    ideal |= 1 << w;
                } else {
                    ideal &= !(1u64 << w);
                }
            }
            debug_assert!(self.poset.is_ideal(ideal));
            family.insert(self.poset.cut_of(ideal));
        }
        family
    }
}

impl DomainOracle for MinCutOracle {
    fn name(&self) -> &'static str {
        "st_mincut"
    }

    fn universe_size(&self) -> usize {
        self.n()
    }

    /// Minimum cut of a gadget network: every arc gets capacity `2n + 1`, and
    /// unit arcs `s -> v` for `w_v = +1` and `v -> t` for `w_v = -1` charge
    /// for each vertex on the wrong side. The minimal source side is returned.
    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        let n = self.n();
        let mut net = FlowNetwork::new(n);
        let heavy = 2 * n as u64 + 1;
        for &(u, v) in &self.arcs {
            net.add_edge(u, v, heavy);
        }
        for v in 0..n {
            if w.get(v) > 0 && v != self.s {
                net.add_edge(self.s, v, 1);
            } else if w.get(v) < 0 && v != self.t {
                net.add_edge(v, self.t, 1);
            }
        }
        net.max_flow(self.s, self.t);
        let side = net
            .residual_reach(self.s)
            .iter()
            .enumerate()
            .filter(|&(_, &f)| f)
            .fold(SubsetMask::empty(n), |acc, (v, _)| acc.with(v));
        debug_assert!(self.contains(&side));
        Ok(Some(side))
    }

    /// Restricts the search to ideals between `I_C \ W⁻` and `I_C ∪ W⁺`, where
    /// `W⁺` (`W⁻`) are the nodes that can be added to (removed from) `I_C`
    /// within the largest radius the caller will ask for. When either set
    /// holds `k(2d + 1)` nodes, a chain of `k + 1` pairwise far cuts is
    /// returned instead.
    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        check_query(self, q)?;
        let n_nodes = self.poset.len();
        let all = if n_nodes == 0 { 0 } else { u64::MAX >> (64 - n_nodes) };
        let found = |i: u64| q.accepts(&self.poset.cut_of(i));
        let Some(ic) = self.poset.ideal_of(&q.center) else {
            let hit = self.poset.find_ideal(0, all, found)?;
            return Ok(hit.map_or(ExtensionOutcome::NotFound, |i| {
                ExtensionOutcome::Found(self.poset.cut_of(i))
            }));
        };
        let p = ctx.map_or(q.radius, |c| c.p.max(q.radius));
        let mut plus: Vec<usize> = (0..n_nodes)
            .filter(|&w| ic >> w & 1 == 0 && self.poset.block_size(self.poset.down[w] & !ic) <= p)
            .collect();
        let mut minus: Vec<usize> = (0..n_nodes)
            .filter(|&w| ic >> w & 1 == 1 && self.poset.block_size(self.poset.up[w] & ic) <= p)
            .collect();
        if let Some(ctx) = ctx.filter(|c| c.k >= 1) {
            let need = ctx.k * (2 * ctx.d + 1);
            if plus.len() >= need {
                plus.sort_by_key(|&w| ((self.poset.down[w] & !ic).count_ones(), w));
                return Ok(ExtensionOutcome::TrivialSparsifier(self.chain(ic, &plus, true, ctx)));
            }
            if minus.len() >= need {
                minus.sort_by_key(|&w| ((self.poset.up[w] & ic).count_ones(), w));
                return Ok(ExtensionOutcome::TrivialSparsifier(self.chain(ic, &minus, false, ctx)));
            }
        }
        let to_mask = |v: &[usize]| v.iter().fold(0u64, |acc, &w| acc | 1 << w);
        let (plus, minus) = (to_mask(&plus), to_mask(&minus));
        let hit = self.poset.find_ideal(ic & !minus, plus | minus, found)?;
        Ok(hit.map_or(ExtensionOutcome::NotFound, |i| {
            ExtensionOutcome::Found(self.poset.cut_of(i))
        }))
    }

    fn contains(&self, set: &SubsetMask) -> bool {
        set.universe_size() == self.n()
            && set.contains(self.s)
            && !set.contains(self.t)
            && self.arcs_leaving(set.bits()) == self.cut_value
    }
}
