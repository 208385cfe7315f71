use crate::domains::graph::GraphData;
use crate::error::{Error, Result};
use crate::mask::{check_universe, SubsetMask, WeightVector};
use crate::oracle::{check_query, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};

/// A DAG whose vertices carry ground-set labels; no directed path visits two
/// vertices with the same label.
#[derive(Clone, Debug)]
pub struct DagDpInstance {
    pub dag: GraphData,
    pub labels: Vec<usize>,
    pub universe: usize,
}

/// Label sets of the longest paths (by vertex count) of a labelled DAG.
#[derive(Clone, Debug)]
pub struct DagDpOracle {
    inst: DagDpInstance,
    topo: Vec<usize>,
    preds: Vec<Vec<usize>>,
    /// Vertices on a longest path ending at each vertex.
    len: Vec<usize>,
    longest: usize,
}

fn topological_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(u, v) in edges {
        indeg[v] += 1;
        succ[u].push(v);
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(u) = ready.pop() {
        order.push(u);
        for &v in succ[u].iter().rev() {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(v);
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub fn dagdp_oracle(inst: DagDpInstance) -> Result<DagDpOracle> {
    check_universe(inst.universe)?;
    let n = inst.dag.n_vertices;
    if !inst.dag.directed {
        return Err(Error::usage("dag_dp domain needs a directed graph"));
    }
    if inst.labels.len() != n {
        return Err(Error::usage(format!(
            "{} labels given for {n} vertices",
            inst.labels.len()
        )));
    }
    if let Some(&bad) = inst.labels.iter().find(|&&q| q >= inst.universe) {
        return Err(Error::usage(format!(
            "label {bad} outside the universe 0..{}",
            inst.universe
        )));
    }
    let Some(topo) = topological_order(n, &inst.dag.edges) else {
        return Err(Error::usage("dag_dp graph has a directed cycle"));
    };
    let mut preds = vec![Vec::new(); n];
    for &(u, v) in &inst.dag.edges {
        preds[v].push(u);
    }
    for p in &mut preds {
        p.sort_unstable();
        p.dedup();
    }
    // below[v][u]: u reaches v
    let mut below = vec![vec![false; n]; n];
    for &v in &topo {
        for &u in &preds[v] {
            below[v][u] = true;
            let reach_u = below[u].clone();
            for (slot, r) in below[v].iter_mut().zip(reach_u) {
                *slot |= r;
            }
        }
    }
    for (v, row) in below.iter().enumerate() {
        if let Some(u) = (0..n).find(|&u| row[u] && inst.labels[u] == inst.labels[v]) {
            return Err(Error::usage(format!(
                "vertices {u} and {v} share label {} on one directed path",
                inst.labels[v]
            )));
        }
    }
    let mut len = vec![1usize; n];
    for &v in &topo {
        len[v] = 1 + preds[v].iter().map(|&u| len[u]).max().unwrap_or(0);
    }
    let longest = len.iter().copied().max().unwrap_or(0);
    Ok(DagDpOracle {
        inst,
        topo,
        preds,
        len,
        longest,
    })
}

impl DagDpOracle {
    /// Number of labels in every member.
    pub fn path_len(&self) -> usize {
        self.longest
    }

    fn label_bit(&self, v: usize) -> u64 {
        1 << self.inst.labels[v]
    }

    fn tight_preds(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.preds[v].iter().copied().filter(move |&u| self.len[u] + 1 == self.len[v])
    }

    fn labels_of(&self, mut v: usize, mut pred: impl FnMut(usize) -> Option<usize>) -> u64 {
        let mut set = self.label_bit(v);
        while let Some(u) = pred(v) {
            set |= self.label_bit(u);
            v = u;
        }
        set
    }
}

impl DomainOracle for DagDpOracle {
    fn name(&self) -> &'static str {
        "dag_dp"
    }

    fn universe_size(&self) -> usize {
        self.inst.universe
    }

    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        let n = self.inst.dag.n_vertices;
        if n == 0 {
            return Ok(None);
        }
        let mut best = vec![0i64; n];
        let mut from = vec![None; n];
        for &v in &self.topo {
            for u in self.tight_preds(v) {
                if from[v].is_none() || best[u] > best[from[v].unwrap()] {
                    from[v] = Some(u);
                }
            }
            best[v] = w.get(self.inst.labels[v]) + from[v].map_or(0, |u| best[u]);
        }
        let end = (0..n)
            .filter(|&v| self.len[v] == self.longest)
            .fold(None, |acc: Option<usize>, v| match acc {
                Some(a) if best[a] >= best[v] => Some(a),
                _ => Some(v),
            })
            .expect("nonempty dag has a longest path");
        let set = self.labels_of(end, |v| from[v]);
        Ok(Some(SubsetMask::from_bits(self.inst.universe, set)?))
    }

    /// Tracks, per vertex, which (forced labels, labels outside `C`) counts a
    /// longest-path prefix ending there can realise. With `|D| = L` fixed,
    /// `|D △ C| = |C| - L + 2q` pins the outside count `q`.
    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        _ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        check_query(self, q)?;
        let n = self.inst.dag.n_vertices;
        let big_l = self.longest;
        let (c, x, y) = (q.center.bits(), q.forced.bits(), q.forbidden.bits());
        let shifted = q.radius + big_l;
        if n == 0 || shifted < q.center.len() || (shifted - q.center.len()) % 2 == 1 {
            return Ok(ExtensionOutcome::NotFound);
        }
        let want_q = (shifted - q.center.len()) / 2;
        let want_p = q.forced.len();
        if want_q > big_l || want_p > big_l {
            return Ok(ExtensionOutcome::NotFound);
        }
        let (np, nq) = (want_p + 1, big_l + 1);
        let idx = |p: usize, qq: usize| p * nq + qq;
        // ex[v][(p, q)] = Some(predecessor) when reachable; `usize::MAX` marks a path start
        let mut ex: Vec<Vec<Option<usize>>> = vec![vec![None; np * nq]; n];
        for &v in &self.topo {
            let bit = self.label_bit(v);
            if bit & y != 0 {
                continue;
            }
            let dp = (bit & x != 0) as usize;
            let dq = (bit & c == 0) as usize;
            if self.len[v] == 1 {
                if dp < np && dq < nq {
                    ex[v][idx(dp, dq)] = Some(usize::MAX);
                }
                continue;
            }
            for u in self.tight_preds(v) {
                for p in 0..np - dp {
                    for qq in 0..nq - dq {
                        if ex[u][idx(p, qq)].is_some() && ex[v][idx(p + dp, qq + dq)].is_none() {
                            ex[v][idx(p + dp, qq + dq)] = Some(u);
                        }
                    }
                }
            }
        }
        let Some(end) = (0..n).find(|&v| self.len[v] == big_l && ex[v][idx(want_p, want_q)].is_some()) else {
            return Ok(ExtensionOutcome::NotFound);
        };
        let (mut p, mut qq) = (want_p, want_q);
        let set = self.labels_of(end, |v| {
            let u = ex[v][idx(p, qq)].expect("state reachable");
            let bit = self.label_bit(v);
            p -= (bit & x != 0) as usize;
            qq -= (bit & c == 0) as usize;
            (u != usize::MAX).then_some(u)
        });
        let d = SubsetMask::from_bits(self.inst.universe, set)?;
        debug_assert!(q.accepts(&d) && self.contains(&d));
        Ok(ExtensionOutcome::Found(d))
    }

    fn contains(&self, set: &SubsetMask) -> bool {
        if set.universe_size() != self.inst.universe || set.len() != self.longest || self.longest == 0 {
            return false;
        }
        let z = set.bits();
        let mut len = vec![0usize; self.inst.dag.n_vertices];
        for &v in &self.topo {
            if self.label_bit(v) & z != 0 {
                len[v] = 1 + self.preds[v].iter().map(|&u| len[u]).max().unwrap_or(0);
                if len[v] == self.longest {
                    return true;
                }
            }
        }
        false
    }
}
