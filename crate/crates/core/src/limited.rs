//! d-limited k-max-distance sparsification with respect to all of `2^U`.
//!
//! Far sets are sampled with random ±1 weights until `k + 1` pairwise far sets
//! turn up (which already form a sparsifier) or the domain is covered by the
//! balls of radius `p` around at most `k` centers. Each ball is then shifted to
//! the origin by `D ↦ D △ C` and sparsified with the sunflower construction.

use std::collections::{HashMap, HashSet};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mask::{SetFamily, SubsetMask, WeightVector};
use crate::oracle::{CountingOracle, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};
use crate::report::{FarSetCall, SparsifierMode, SparsifierReport};
use crate::small::{k_sparsify_with, EmptyExtension, SmallSparsifyParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitedSparsifyParams {
    pub k: usize,
    pub d: usize,
    /// Cluster radius; must exceed `2d`.
    pub p: usize,
    pub epsilon: f64,
    pub trials_override: Option<u64>,
    pub seed: u64,
}

impl LimitedSparsifyParams {
    /// Parameters with the default cluster radius, `ε = 0.01` and seed 0.
    pub fn new(k: usize, d: usize) -> Result<Self> {
        LimitedSparsifyParams {
            k,
            d,
            p: default_p(k, d),
            epsilon: 0.01,
            trials_override: None,
            seed: 0,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.k == 0 {
            return Err(Error::usage("k must be at least 1"));
        }
        if self.p <= 2 * self.d {
            return Err(Error::usage(format!(
                "cluster radius p = {} must exceed 2d = {}",
                self.p,
                2 * self.d
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::usage(format!("epsilon = {} is not in (0, 1)", self.epsilon)));
        }
        if self.trials_override == Some(0) {
            return Err(Error::usage("trial count must be positive"));
        }
        Ok(self)
    }

    pub fn with_p(mut self, p: usize) -> Result<Self> {
        self.p = p;
        self.validated()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validated()
    }

    pub fn with_trials(mut self, trials: u64) -> Result<Self> {
        self.trials_override = Some(trials);
        self.validated()
    }

    /// Trial budget for a far-set search against `n_centers` centers.
    pub fn trials_for(&self, n_centers: usize) -> u64 {
        self.trials_override
            .unwrap_or_else(|| default_trials(self.k, self.epsilon, n_centers))
    }
}

/// `(4d + 2)² · 2^(k-1)`, saturating.
pub fn default_p(k: usize, d: usize) -> usize {
    let base = (4 * d + 2).saturating_mul(4 * d + 2);
    let shift = k.saturating_sub(1);
    if shift >= usize::BITS as usize {
        return usize::MAX;
    }
    base.saturating_mul(1usize << shift)
}

/// `⌈ln((k + 1)/ε) / q⌉` with single-trial success bound
/// `q = 2^(-2^c) · 4^(-c)` for `c` current centers, saturating.
pub fn default_trials(k: usize, epsilon: f64, n_centers: usize) -> u64 {
    let c = n_centers as f64;
    let log2_inv_q = c.exp2() + 2.0 * c;
    let trials = ((k as f64 + 1.0) / epsilon).ln() * log2_inv_q.exp2();
    if !trials.is_finite() || trials >= u64::MAX as f64 {
        u64::MAX
    } else {
        (trials.ceil() as u64).max(1)
    }
}

/// Draws `w ∈ {−1, 1}^U`, one generator step per element in index order.
pub fn draw_weights(n: usize, rng: &mut ChaCha8Rng) -> WeightVector {
    let mut plus = SubsetMask::empty(n);
    for i in 0..n {
        if rng.next_u32() & 1 == 1 {
            plus.insert(i);
        }
    }
    WeightVector::from_plus_mask(plus)
}

/// Sequential far-set searches sharing one generator stream. Optimisation
/// results are cached per weight vector, since they do not depend on the
/// centers.
pub struct FarSetSearch<'a> {
    oracle: &'a dyn DomainOracle,
    rng: ChaCha8Rng,
    cache: HashMap<u64, Option<SubsetMask>>,
    log: Vec<FarSetCall>,
}

impl<'a> FarSetSearch<'a> {
    pub fn new(oracle: &'a dyn DomainOracle, seed: u64) -> Self {
        FarSetSearch {
            oracle,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cache: HashMap::new(),
            log: Vec::new(),
        }
    }

    pub fn log(&self) -> &[FarSetCall] {
        &self.log
    }

    pub fn into_log(self) -> Vec<FarSetCall> {
        self.log
    }

    /// Up to `trials` samples; returns the first optimum more than `2d` from
    /// every center. Stops early once every weight vector has been tried.
    pub fn next_far(&mut self, centers: &[SubsetMask], d: usize, trials: u64) -> Result<Option<SubsetMask>> {
        let n = self.oracle.universe_size();
        let space = if n < 64 { Some(1u64 << n) } else { None };
        let mut tried: HashSet<u64> = HashSet::new();
        let mut used = 0u64;
        let mut result = None;
        while used < trials {
            used += 1;
            let w = draw_weights(n, &mut self.rng);
            let key = w.plus().bits();
            if !tried.insert(key) {
                continue;
            }
            let opt = match self.cache.get(&key) {
                Some(hit) => *hit,
                None => {
                    let got = self.oracle.opt_pm1(&w)?;
                    self.cache.insert(key, got);
                    got
                }
            };
            let Some(cand) = opt else {
                break;
            };
            if centers.iter().all(|c| cand.distance(c) > 2 * d) {
                result = Some(cand);
                break;
            }
            if space == Some(tried.len() as u64) {
                break;
            }
        }
        if let Some(found) = result {
            assert!(
                centers.iter().all(|c| found.distance(c) > 2 * d),
                "far set must be verified against every center"
            );
        }
        self.log.push(FarSetCall {
            centers: centers.to_vec(),
            result,
            trials_used: used,
            distinct_weights: tried.len(),
        });
        Ok(result)
    }
}

/// One far-set search with a fresh cache, drawing from `rng`.
pub fn approx_far_set(
    oracle: &dyn DomainOracle,
    centers: &SetFamily,
    d: usize,
    trials: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<SubsetMask>> {
    let mut search = FarSetSearch {
        oracle,
        rng: rng.clone(),
        cache: HashMap::new(),
        log: Vec::new(),
    };
    let out = search.next_far(centers.members(), d, trials);
    *rng = search.rng;
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClusterResult {
    /// At most `k` centers whose radius-`p` balls cover the domain (with
    /// probability at least `1 − ε`).
    Centers(SetFamily),
    /// `k + 1` members pairwise more than `2d` apart.
    Trivial(SetFamily),
}

fn cluster_with(search: &mut FarSetSearch<'_>, params: &LimitedSparsifyParams) -> Result<ClusterResult> {
    let n = search.oracle.universe_size();
    let mut centers: Vec<SubsetMask> = Vec::new();
    loop {
        let trials = params.trials_for(centers.len());
        match search.next_far(&centers, params.d, trials)? {
            None => return Ok(ClusterResult::Centers(SetFamily::from_sets(n, centers)?)),
            Some(far) => {
                centers.push(far);
                if centers.len() > params.k {
                    return Ok(ClusterResult::Trivial(SetFamily::from_sets(n, centers)?));
                }
            }
        }
    }
}

pub fn cluster_or_trivial(oracle: &dyn DomainOracle, params: &LimitedSparsifyParams) -> Result<ClusterResult> {
    let params = params.validated()?;
    cluster_with(&mut FarSetSearch::new(oracle, params.seed), &params)
}

/// Exact empty extension over `{D △ C : D ∈ 𝒟}`: a query of size `r` avoiding
/// `Y*` becomes an exact extension around `C` forcing `Y* ∩ C` and forbidding
/// `Y* \ C`.
pub struct ShiftedEmptyExtension<'a> {
    oracle: &'a dyn DomainOracle,
    center: SubsetMask,
    ctx: Option<SparsifyContext>,
}

pub fn shifted_empty_extension<'a>(
    oracle: &'a dyn DomainOracle,
    center: SubsetMask,
    ctx: Option<SparsifyContext>,
) -> ShiftedEmptyExtension<'a> {
    ShiftedEmptyExtension { oracle, center, ctx }
}

impl EmptyExtension for ShiftedEmptyExtension<'_> {
    fn universe_size(&self) -> usize {
        self.oracle.universe_size()
    }

    fn empty_extend(&self, size: usize, forbidden: SubsetMask) -> Result<ExtensionOutcome> {
        let q = ExtensionQuery::new(
            self.center,
            size,
            forbidden.intersection(&self.center),
            forbidden.difference(&self.center),
        )?;
        Ok(match self.oracle.exact_extend(&q, self.ctx.as_ref())? {
            ExtensionOutcome::Found(d) => ExtensionOutcome::Found(d.sym_diff(&self.center)),
            other => other,
        })
    }
}

/// d-limited k-max-distance sparsifier with respect to `2^U`; correct with
/// probability at least `1 − ε` under the default trial count and `p`.
pub fn dk_sparsify(oracle: &dyn DomainOracle, params: &LimitedSparsifyParams) -> Result<SparsifierReport> {
    let params = params.validated()?;
    let n = oracle.universe_size();
    let counting = CountingOracle::new(oracle);
    let mut search = FarSetSearch::new(&counting, params.seed);
    let clusters = cluster_with(&mut search, &params)?;
    let log = search.into_log();

    let mut report = SparsifierReport::new(SetFamily::new(n), SparsifierMode::Limited, params.k);
    report.cap = Some(params.d);
    report.p = Some(params.p);
    report.radius = Some(params.p.saturating_add(params.d));
    report.seed = Some(params.seed);
    report.far_set_log = log;

    match clusters {
        ClusterResult::Trivial(family) => {
            report.family = family;
            report.trivial = true;
        }
        ClusterResult::Centers(centers) => {
            let small = SmallSparsifyParams::new(params.k, params.p.saturating_add(params.d), params.p)?;
            let ctx = SparsifyContext {
                k: params.k,
                d: params.d,
                p: params.p,
            };
            let mut family = SetFamily::new(n);
            for c in &centers {
                let run = k_sparsify_with(small, &shifted_empty_extension(&counting, *c, Some(ctx)))?;
                report.passes += run.passes;
                if run.shortcut {
                    family = run.family;
                    report.shortcut = true;
                    break;
                }
                for shifted in &run.family {
                    family.insert(shifted.sym_diff(c));
                }
            }
            report.family = family;
            report.centers = Some(centers);
        }
    }
    report.calls_opt = counting.opt_calls();
    report.calls_extend = counting.extend_calls();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::explicit_oracle;

    fn m(n: usize, v: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, v.iter().copied()).unwrap()
    }

    fn two_point() -> crate::domains::ExplicitOracle {
        explicit_oracle(SetFamily::from_sets(10, [m(10, &[]), SubsetMask::full(10)]).unwrap())
    }

    #[test]
    fn defaults() {
        assert_eq!(default_p(1, 0), 4);
        assert_eq!(default_p(1, 1), 36);
        assert_eq!(default_p(3, 2), 400);
        // no centers: q = 1/2
        assert_eq!(default_trials(1, 0.01, 0), (200f64.ln() * 2.0).ceil() as u64);
        // one center: q = 1/16
        assert_eq!(default_trials(1, 0.01, 1), (200f64.ln() * 16.0).ceil() as u64);
        assert_eq!(default_trials(3, 0.01, 200), u64::MAX);
    }

    #[test]
    fn params_validation() {
        assert!(LimitedSparsifyParams::new(0, 1).is_err());
        let p = LimitedSparsifyParams::new(2, 1).unwrap();
        assert!(p.with_p(2).is_err());
        assert!(p.with_p(3).is_ok());
        assert!(p.with_epsilon(1.0).is_err());
        assert!(p.with_trials(0).is_err());
    }

    #[test]
    fn weights_are_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            assert_eq!(draw_weights(12, &mut a), draw_weights(12, &mut b));
        }
    }

    #[test]
    fn far_set_examples() {
        let single = explicit_oracle(SetFamily::from_sets(3, [m(3, &[1])]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let centers = SetFamily::from_sets(3, [m(3, &[1])]).unwrap();
        assert_eq!(approx_far_set(&single, &centers, 0, 100, &mut rng).unwrap(), None);

        let o = two_point();
        let centers = SetFamily::from_sets(10, [m(10, &[])]).unwrap();
        let got = approx_far_set(&o, &centers, 1, 512, &mut rng).unwrap();
        assert_eq!(got, Some(SubsetMask::full(10)));

        let all = o.family().clone();
        assert_eq!(approx_far_set(&o, &all, 1, 512, &mut rng).unwrap(), None);
    }

    #[test]
    fn clustering_examples() {
        let p = LimitedSparsifyParams::new(1, 1).unwrap();
        let origin = explicit_oracle(SetFamily::from_sets(3, [m(3, &[])]).unwrap());
        assert_eq!(
            cluster_or_trivial(&origin, &p).unwrap(),
            ClusterResult::Centers(SetFamily::from_sets(3, [m(3, &[])]).unwrap())
        );
        let ClusterResult::Trivial(f) = cluster_or_trivial(&two_point(), &p).unwrap() else {
            panic!("two far points give a trivial sparsifier");
        };
        assert_eq!(f.len(), 2);
        let empty = explicit_oracle(SetFamily::new(3));
        assert_eq!(
            cluster_or_trivial(&empty, &p).unwrap(),
            ClusterResult::Centers(SetFamily::new(3))
        );
    }

    #[test]
    fn shifted_extension_examples() {
        let o = explicit_oracle(SetFamily::from_sets(2, [m(2, &[0]), m(2, &[0, 1])]).unwrap());
        let shifted = shifted_empty_extension(&o, m(2, &[0]), None);
        assert_eq!(shifted.empty_extend(1, m(2, &[0])).unwrap(), ExtensionOutcome::Found(m(2, &[1])));
        assert_eq!(shifted.empty_extend(0, m(2, &[])).unwrap(), ExtensionOutcome::Found(m(2, &[])));

        let identity = shifted_empty_extension(&o, m(2, &[]), None);
        assert_eq!(identity.empty_extend(2, m(2, &[])).unwrap(), ExtensionOutcome::Found(m(2, &[0, 1])));
        assert_eq!(identity.empty_extend(1, m(2, &[0])).unwrap(), ExtensionOutcome::NotFound);
    }

    #[test]
    fn dk_sparsify_examples() {
        let p = LimitedSparsifyParams::new(1, 1).unwrap();
        let origin = explicit_oracle(SetFamily::from_sets(3, [m(3, &[])]).unwrap());
        let r = dk_sparsify(&origin, &p).unwrap();
        assert_eq!(r.family.members(), &[m(3, &[])]);

        let r = dk_sparsify(&two_point(), &p).unwrap();
        assert!(r.trivial);
        assert_eq!(r.family.sorted().members(), &[m(10, &[]), SubsetMask::full(10)]);

        let empty = explicit_oracle(SetFamily::new(4));
        assert!(dk_sparsify(&empty, &p).unwrap().family.is_empty());
    }
}
