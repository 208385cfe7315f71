use crate::domains::graph::GraphData;
use crate::error::{Error, Result};
use crate::mask::{check_universe, SubsetMask, WeightVector};
use crate::oracle::{check_query, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};

/// Largest center whose subsets are enumerated by `exact_extend`.
const MAX_CENTER: usize = 24;

/// Vertex covers of an undirected graph with at most `ell` vertices.
///
/// Exact-size covers are found by forcing the neighbourhood of the forbidden
/// vertices, branching on an uncovered edge for the rest, and padding with the
/// lowest-index allowed vertices.
#[derive(Clone, Debug)]
pub struct VertexCoverOracle {
    graph: GraphData,
    ell: usize,
    adj: Vec<u64>,
}

pub fn vertex_cover_oracle(graph: GraphData, ell: usize) -> Result<VertexCoverOracle> {
    if graph.directed {
        return Err(Error::usage("vertex cover domain needs an undirected graph"));
    }
    check_universe(graph.n_vertices)?;
    let mut adj = vec![0u64; graph.n_vertices];
    for &(u, v) in &graph.edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    Ok(VertexCoverOracle { graph, ell, adj })
}

impl VertexCoverOracle {
    pub fn ell(&self) -> usize {
        self.ell
    }

    fn n(&self) -> usize {
        self.graph.n_vertices
    }

    fn is_cover(&self, bits: u64) -> bool {
        self.graph
            .edges
            .iter()
            .all(|&(u, v)| (bits >> u | bits >> v) & 1 == 1)
    }

    fn neighbourhood(&self, bits: u64) -> u64 {
        SubsetMask::from_bits(self.n(), bits)
            .expect("mask within universe")
            .iter()
            .fold(0, |acc, v| acc | self.adj[v])
    }

    /// A cover `D` with `forced ⊆ D`, `D ∩ forbidden = ∅` and `|D| = size`.
    pub fn cover_exact(&self, forced: u64, forbidden: u64, size: usize) -> Option<u64> {
        if size > self.ell || forced & forbidden != 0 {
            return None;
        }
        if self.neighbourhood(forbidden) & forbidden != 0 {
            return None;
        }
        let fixed = forced | self.neighbourhood(forbidden);
        if fixed & forbidden != 0 || fixed.count_ones() as usize > size {
            return None;
        }
        let all = SubsetMask::full(self.n()).bits();
        let rest = all & !(forbidden | fixed);
        let open: Vec<(usize, usize)> = self
            .graph
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| rest >> u & 1 == 1 && rest >> v & 1 == 1)
            .collect();
        let budget = size - fixed.count_ones() as usize;
        let cover = branch_cover(&open, 0, budget)?;
        let mut d = fixed | cover;
        let mut pad = rest & !cover;
        while (d.count_ones() as usize) < size {
            if pad == 0 {
                return None;
            }
            let low = pad & pad.wrapping_neg();
            d |= low;
            pad &= !low;
        }
        debug_assert!(self.is_cover(d));
        Some(d)
    }
}

fn branch_cover(edges: &[(usize, usize)], chosen: u64, budget: usize) -> Option<u64> {
    let Some(&(u, v)) = edges
        .iter()
        .find(|&&(u, v)| (chosen >> u | chosen >> v) & 1 == 0)
    else {
        return Some(chosen);
    };
    if budget == 0 {
        return None;
    }
    branch_cover(edges, chosen | 1 << u, budget - 1)
        .or_else(|| branch_cover(edges, chosen | 1 << v, budget - 1))
}

impl DomainOracle for VertexCoverOracle {
    fn name(&self) -> &'static str {
        "vertex_cover"
    }

    fn universe_size(&self) -> usize {
        self.n()
    }

    fn opt_pm1(&self, _w: &WeightVector) -> Result<Option<SubsetMask>> {
        Err(Error::Unsupported {
            capability: "(-1,1)-optimization",
            domain: "vertex_cover",
        })
    }

    /// Guesses `S = D ∩ C` over the subsets of `C` and solves the remaining
    /// forced/forbidden exact-size cover problem for each guess.
    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        _ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        check_query(self, q)?;
        let c = q.center.bits();
        if q.center.len() > MAX_CENTER {
            return Err(Error::guard(format!(
                "vertex cover extension around a center of {} vertices",
                q.center.len()
            )));
        }
        let (x, y) = (q.forced.bits(), q.forbidden.bits());
        let c_len = q.center.len();
        let mut s = 0u64;
        loop {
            let dropped = c_len - s.count_ones() as usize;
            if x & c & !s == 0 && s & y == 0 && q.radius >= dropped {
                let outside = q.radius - dropped;
                let size = s.count_ones() as usize + outside;
                if let Some(d) = self.cover_exact(s | (x & !c), y | (c & !s), size) {
                    let d = SubsetMask::from_bits(self.n(), d)?;
                    debug_assert!(q.accepts(&d));
                    return Ok(ExtensionOutcome::Found(d));
                }
            }
            if s == c {
                break;
            }
            s = (s.wrapping_sub(c)) & c;
        }
        Ok(ExtensionOutcome::NotFound)
    }

    fn exact_empty_extend(&self, r: usize, forbidden: SubsetMask) -> Result<Option<SubsetMask>> {
        if forbidden.universe_size() != self.n() {
            return Err(Error::UniverseMismatch {
                left: self.n(),
                right: forbidden.universe_size(),
            });
        }
        self.cover_exact(0, forbidden.bits(), r)
            .map(|d| SubsetMask::from_bits(self.n(), d))
            .transpose()
    }

    fn contains(&self, set: &SubsetMask) -> bool {
        set.universe_size() == self.n() && set.len() <= self.ell && self.is_cover(set.bits())
    }

    fn size_bound(&self) -> Option<usize> {
        Some(self.ell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, v: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, v.iter().copied()).unwrap()
    }

    fn p3() -> VertexCoverOracle {
        vertex_cover_oracle(GraphData::undirected(3, &[(0, 1), (1, 2)]).unwrap(), 3).unwrap()
    }

    #[test]
    fn empty_extension_examples() {
        let o = p3();
        assert_eq!(o.exact_empty_extend(2, m(3, &[1])).unwrap(), Some(m(3, &[0, 2])));
        for r in 0..=3 {
            assert_eq!(o.exact_empty_extend(r, m(3, &[0, 1])).unwrap(), None);
        }
        assert_eq!(o.exact_empty_extend(1, m(3, &[0, 2])).unwrap(), Some(m(3, &[1])));
    }

    #[test]
    fn size_limit_is_enforced() {
        let o = vertex_cover_oracle(GraphData::undirected(3, &[(0, 1), (1, 2)]).unwrap(), 1).unwrap();
        assert_eq!(o.exact_empty_extend(2, m(3, &[])).unwrap(), None);
        assert_eq!(o.exact_empty_extend(1, m(3, &[])).unwrap(), Some(m(3, &[1])));
    }

    #[test]
    fn padding_reaches_exact_size() {
        let o = p3();
        assert_eq!(o.exact_empty_extend(3, m(3, &[])).unwrap(), Some(m(3, &[0, 1, 2])));
    }

    #[test]
    fn optimisation_is_unsupported() {
        let w = WeightVector::from_signs(&[1, 1, 1]).unwrap();
        assert!(matches!(p3().opt_pm1(&w), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn rejects_directed_graphs() {
        assert!(vertex_cover_oracle(GraphData::directed(2, &[(0, 1)]).unwrap(), 1).is_err());
    }

    #[test]
    fn extension_with_center() {
        let o = p3();
        // covers of P3: {1}, {0,1}, {1,2}, {0,2}, {0,1,2}
        let q = ExtensionQuery::new(m(3, &[1]), 3, m(3, &[]), m(3, &[])).unwrap();
        assert_eq!(o.exact_extend(&q, None).unwrap(), ExtensionOutcome::Found(m(3, &[0, 2])));
        let q = ExtensionQuery::new(m(3, &[1]), 1, m(3, &[2]), m(3, &[])).unwrap();
        assert_eq!(o.exact_extend(&q, None).unwrap(), ExtensionOutcome::Found(m(3, &[1, 2])));
        let q = ExtensionQuery::new(m(3, &[1]), 1, m(3, &[]), m(3, &[1])).unwrap();
        assert_eq!(o.exact_extend(&q, None).unwrap(), ExtensionOutcome::NotFound);
    }
}
