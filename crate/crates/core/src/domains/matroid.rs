use crate::domains::graph::GraphData;
use crate::error::{Error, Result};
use crate::mask::{check_universe, SubsetMask, WeightVector};
use crate::oracle::{check_query, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidSpec {
    /// Forests of a graph; elements are edges in input order.
    Graphic(GraphData),
    /// Every set of at most `rank` elements is independent.
    Uniform { universe: usize, rank: usize },
    /// At most `capacity` elements from each block. Elements outside every
    /// block are loops.
    Partition {
        universe: usize,
        blocks: Vec<(usize, Vec<usize>)>,
    },
}

/// Bases of a matroid. Optimisation is the greedy algorithm; exact extension
/// walks from a closest to a farthest base by single-element exchanges.
#[derive(Clone, Debug)]
pub struct MatroidBaseOracle {
    spec: MatroidSpec,
    n: usize,
    rank: usize,
    block_of: Vec<Option<usize>>,
}

pub fn matroid_base_oracle(spec: MatroidSpec) -> Result<MatroidBaseOracle> {
    let (n, block_of) = match &spec {
        MatroidSpec::Graphic(g) => (g.n_edges(), Vec::new()),
        MatroidSpec::Uniform { universe, .. } => (*universe, Vec::new()),
        MatroidSpec::Partition { universe, blocks } => {
            let mut block_of = vec![None; *universe];
            for (b, (_, elems)) in blocks.iter().enumerate() {
                for &e in elems {
                    if e >= *universe {
                        return Err(Error::usage(format!(
                            "partition block {b} names element {e} outside 0..{universe}"
                        )));
                    }
                    if block_of[e].replace(b).is_some() {
                        return Err(Error::usage(format!(
                            "element {e} appears in more than one partition block"
                        )));
                    }
                }
            }
            (*universe, block_of)
        }
    };
    check_universe(n)?;
    let mut oracle = MatroidBaseOracle {
        spec,
        n,
        rank: 0,
        block_of,
    };
    oracle.rank = oracle.greedy(0, 0..n).map_or(0, u64::count_ones) as usize;
    Ok(oracle)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

impl MatroidBaseOracle {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_independent(&self, bits: u64) -> bool {
        match &self.spec {
            MatroidSpec::Graphic(g) => {
                let mut uf = UnionFind::new(g.n_vertices);
                SubsetMask::from_bits(self.n, bits)
                    .expect("mask within universe")
                    .iter()
                    .all(|e| {
                        let (u, v) = g.edges[e];
                        uf.union(u, v)
                    })
            }
            MatroidSpec::Uniform { rank, .. } => bits.count_ones() as usize <= *rank,
            MatroidSpec::Partition { blocks, .. } => {
                let mut used = vec![0usize; blocks.len()];
                for e in SubsetMask::from_bits(self.n, bits)
                    .expect("mask within universe")
                    .iter()
                {
                    let Some(b) = self.block_of[e] else {
                        return false;
                    };
                    used[b] += 1;
                    if used[b] > blocks[b].0 {
                        return false;
                    }
                }
                true
            }
        }
    }

    pub fn is_base(&self, bits: u64) -> bool {
        bits.count_ones() as usize == self.rank && self.is_independent(bits)
    }

    /// Extends `start` greedily along `order`; `None` if `start` is dependent.
    fn greedy(&self, start: u64, order: impl IntoIterator<Item = usize>) -> Option<u64> {
        if !self.is_independent(start) {
            return None;
        }
        let mut cur = start;
        for e in order {
            if cur >> e & 1 == 0 && self.is_independent(cur | 1 << e) {
                cur |= 1 << e;
            }
        }
        Some(cur)
    }

    /// Base containing `forced`, avoiding `forbidden`, taking elements of
    /// `prefer` before all others.
    fn preferring(&self, forced: u64, forbidden: u64, prefer: u64) -> Option<u64> {
        let allowed = |e: &usize| forbidden >> e & 1 == 0;
        let first = (0..self.n).filter(|e| prefer >> e & 1 == 1).filter(allowed);
        let second = (0..self.n).filter(|e| prefer >> e & 1 == 0).filter(allowed);
        self.greedy(forced, first.chain(second))
            .filter(|&b| b.count_ones() as usize == self.rank)
    }

    /// Sequence of bases from `from` to `to`, each obtained from the previous
    /// one by exchanging its lowest element outside `to` for the lowest element
    /// of `to` that keeps it a base.
    pub fn exchange_walk(&self, from: u64, to: u64) -> Vec<u64> {
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let e1 = (cur & !to).trailing_zeros();
            let base = cur & !(1u64 << e1);
            let mut cand = to & !cur;
            let mut next = None;
            while cand != 0 {
                let e2 = cand.trailing_zeros();
                cand &= cand - 1;
                if self.is_independent(base | 1 << e2) {
                    next = Some(base | 1 << e2);
                    break;
                }
            }
            cur = next.expect("strong exchange property violated: argument is not a base");
            path.push(cur);
        }
        path
    }
}

impl DomainOracle for MatroidBaseOracle {
    fn name(&self) -> &'static str {
        "matroid_base"
    }

    fn universe_size(&self) -> usize {
        self.n
    }

    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        let plus = w.plus().bits();
        let order = (0..self.n)
            .filter(|e| plus >> e & 1 == 1)
            .chain((0..self.n).filter(|e| plus >> e & 1 == 0));
        let base = self.greedy(0, order).expect("empty set is independent");
        Ok(Some(SubsetMask::from_bits(self.n, base)?))
    }

    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        _ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        check_query(self, q)?;
        // every base has `rank` elements, fixing the parity of |D △ C|
        if (self.rank + q.center.len()) % 2 != q.radius % 2 {
            return Ok(ExtensionOutcome::NotFound);
        }
        let (c, x, y) = (q.center.bits(), q.forced.bits(), q.forbidden.bits());
        let (Some(near), Some(far)) = (
            self.preferring(x, y, c),
            self.preferring(x, y, !c & SubsetMask::full(self.n).bits()),
        ) else {
            return Ok(ExtensionOutcome::NotFound);
        };
        let dist = |b: u64| (b ^ c).count_ones() as usize;
        if q.radius < dist(near) || q.radius > dist(far) {
            return Ok(ExtensionOutcome::NotFound);
        }
        let hit = self
            .exchange_walk(near, far)
            .into_iter()
            .find(|&b| dist(b) == q.radius)
            .expect("distance moves in steps of two between the endpoints");
        let d = SubsetMask::from_bits(self.n, hit)?;
        debug_assert!(q.accepts(&d));
        Ok(ExtensionOutcome::Found(d))
    }

    fn contains(&self, set: &SubsetMask) -> bool {
        set.universe_size() == self.n && self.is_base(set.bits())
    }
}
