use crate::mask::{SetFamily, SubsetMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SparsifierMode {
    /// Sunflower-based construction for domains of bounded set size.
    Small,
    /// Far-set clustering followed by per-cluster sunflower sparsification.
    Limited,
    /// The whole domain, enumerated by brute force.
    Exhaustive,
}

/// One invocation of the approximate far set oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarSetCall {
    pub centers: Vec<SubsetMask>,
    pub result: Option<SubsetMask>,
    pub trials_used: u64,
    /// Distinct weight vectors actually sent to the optimisation oracle.
    pub distinct_weights: usize,
}

/// A computed sparsifier together with how it was obtained.
#[derive(Clone, Debug)]
pub struct SparsifierReport {
    pub family: SetFamily,
    pub mode: SparsifierMode,
    pub k: usize,
    /// Distance cap `d`; `None` for an uncapped sparsifier.
    pub cap: Option<usize>,
    /// Ball radius `r` of the reference family `ℬ(∅, r)` (small mode).
    pub radius: Option<usize>,
    /// Cluster radius `p` (limited mode).
    pub p: Option<usize>,
    pub seed: Option<u64>,
    pub calls_opt: usize,
    pub calls_extend: usize,
    /// Outer-loop passes of the sunflower construction, summed over clusters.
    pub passes: usize,
    /// Cluster centers found by the far-set loop (limited mode).
    pub centers: Option<SetFamily>,
    /// The cluster step found `k + 1` pairwise far sets and returned them.
    pub trivial: bool,
    /// An extension query answered with a trivial sparsifier, which was returned.
    pub shortcut: bool,
    pub far_set_log: Vec<FarSetCall>,
}

impl SparsifierReport {
    pub(crate) fn new(family: SetFamily, mode: SparsifierMode, k: usize) -> Self {
        SparsifierReport {
            family,
            mode,
            k,
            cap: None,
            radius: None,
            p: None,
            seed: None,
            calls_opt: 0,
            calls_extend: 0,
            passes: 0,
            centers: None,
            trivial: false,
            shortcut: false,
            far_set_log: Vec::new(),
        }
    }
}
