//! Exact diversification and clustering over a sparsifier.
//!
//! Every solver first replaces the domain by a small sparsifier `𝒦` and then
//! searches `𝒦` exhaustively. Clustering additionally asks the domain for the
//! best center of each guessed cluster through exact extension queries.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::bruteforce::enumerate_domain;
use crate::error::{Error, Result};
use crate::limited::{default_p, dk_sparsify, LimitedSparsifyParams};
use crate::mask::{SetFamily, SubsetMask};
use crate::oracle::{DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};
use crate::report::{SparsifierMode, SparsifierReport};
use crate::small::{k_sparsify, SmallSparsifyParams};

/// Largest number of bad elements whose subsets are enumerated per cluster.
pub const MAX_BAD_ELEMENTS: usize = 24;

/// Largest number of tuples the diversification search visits.
pub const MAX_TUPLES: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    MaxMin,
    MaxSum,
    KCenter,
    KSumRadii,
}

impl Problem {
    pub fn is_clustering(self) -> bool {
        matches!(self, Problem::KCenter | Problem::KSumRadii)
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxmin" => Ok(Problem::MaxMin),
            "maxsum" => Ok(Problem::MaxSum),
            "kcenter" => Ok(Problem::KCenter),
            "ksumradii" => Ok(Problem::KSumRadii),
            other => Err(Error::usage(format!("unknown problem '{other}'"))),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::MaxMin => "maxmin",
            Problem::MaxSum => "maxsum",
            Problem::KCenter => "kcenter",
            Problem::KSumRadii => "ksumradii",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub problem: Problem,
    pub k: usize,
    pub d: usize,
    /// Measure distances with `min(|A △ B|, |A △ (U \ B)|)`.
    pub modified: bool,
}

impl ProblemSpec {
    pub fn new(problem: Problem, k: usize, d: usize) -> Self {
        ProblemSpec {
            problem,
            k,
            d,
            modified: false,
        }
    }

    pub fn modified(mut self) -> Self {
        self.modified = true;
        self
    }

    pub fn distance(&self, a: &SubsetMask, b: &SubsetMask) -> usize {
        let plain = a.distance(b);
        if self.modified {
            plain.min(a.universe_size() - plain)
        } else {
            plain
        }
    }

    /// `(k', cap)` of the sparsifier the solver needs.
    pub fn sparsifier_shape(&self) -> (usize, usize) {
        match (self.problem.is_clustering(), self.modified) {
            (false, false) => (self.k.saturating_sub(1).max(1), self.d),
            (false, true) => ((2 * self.k).saturating_sub(2).max(1), self.d),
            (true, false) => (self.k, self.d + 1),
            (true, true) => (2 * self.k, self.d + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveAnswer {
    pub feasible: bool,
    /// `k` sets when feasible; for clustering, the centers.
    pub witnesses: Vec<SubsetMask>,
    /// Radius per center (clustering only).
    pub radii: Option<Vec<usize>>,
    /// Best pairwise distance sum (max-sum) or smallest radius sum (k-sum-of-radii).
    pub objective: Option<i64>,
}

impl SolveAnswer {
    fn no() -> Self {
        SolveAnswer {
            feasible: false,
            witnesses: Vec::new(),
            radii: None,
            objective: None,
        }
    }
}

/// Produces a `cap`-limited `k`-max-distance sparsifier of a domain.
pub trait SparsifierBuilder {
    fn build(&self, oracle: &dyn DomainOracle, k: usize, cap: usize) -> Result<SparsifierReport>;
}

/// Sunflower construction with `r = ℓ`, for domains declaring a size bound `ℓ`.
/// Uncapped, so valid for every cap.
#[derive(Clone, Copy, Debug, Default)]
pub struct SmallBuilder;

impl SparsifierBuilder for SmallBuilder {
    fn build(&self, oracle: &dyn DomainOracle, k: usize, _cap: usize) -> Result<SparsifierReport> {
        let Some(ell) = oracle.size_bound() else {
            return Err(Error::usage(format!(
                "the {} domain declares no size bound; small mode needs one",
                oracle.name()
            )));
        };
        k_sparsify(SmallSparsifyParams::new(k, ell, ell)?, oracle)
    }
}

/// Randomised far-set pipeline.
#[derive(Clone, Copy, Debug)]
pub struct LimitedBuilder {
    pub seed: u64,
    pub epsilon: f64,
    /// Cluster radius; the default formula when `None`.
    pub p: Option<usize>,
    pub trials: Option<u64>,
}

impl Default for LimitedBuilder {
    fn default() -> Self {
        LimitedBuilder {
            seed: 0,
            epsilon: 0.01,
            p: None,
            trials: None,
        }
    }
}

impl SparsifierBuilder for LimitedBuilder {
    fn build(&self, oracle: &dyn DomainOracle, k: usize, cap: usize) -> Result<SparsifierReport> {
        let params = LimitedSparsifyParams {
            k,
            d: cap,
            p: self.p.unwrap_or_else(|| default_p(k, cap)),
            epsilon: self.epsilon,
            trials_override: self.trials,
            seed: self.seed,
        };
        dk_sparsify(oracle, &params)
    }
}

/// The whole domain, by enumeration; a reference for small instances.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExhaustiveBuilder;

impl SparsifierBuilder for ExhaustiveBuilder {
    fn build(&self, oracle: &dyn DomainOracle, k: usize, cap: usize) -> Result<SparsifierReport> {
        let mut report = SparsifierReport::new(enumerate_domain(oracle)?, SparsifierMode::Exhaustive, k);
        report.cap = Some(cap);
        Ok(report)
    }
}

/// Solver result together with the sparsifier it searched.
#[derive(Clone, Debug)]
pub struct SolveOutput {
    pub answer: SolveAnswer,
    pub sparsifier: SparsifierReport,
}

pub fn solve(oracle: &dyn DomainOracle, spec: &ProblemSpec, builder: &dyn SparsifierBuilder) -> Result<SolveOutput> {
    if spec.k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    if spec.modified && !oracle.complement_closed() {
        return Err(Error::usage(format!(
            "modified distance needs a complement-closed domain; {} is not declared as one",
            oracle.name()
        )));
    }
    let (k, cap) = spec.sparsifier_shape();
    let sparsifier = builder.build(oracle, k, cap)?;
    let answer = match spec.problem {
        Problem::MaxMin => max_min_over(&sparsifier.family, spec)?,
        Problem::MaxSum => max_sum_over(&sparsifier.family, spec)?,
        Problem::KCenter | Problem::KSumRadii => cluster_over(oracle, &sparsifier.family, spec)?,
    };
    Ok(SolveOutput { answer, sparsifier })
}

fn expect_problem(spec: &ProblemSpec, problem: Problem) -> Result<()> {
    if spec.problem != problem {
        return Err(Error::usage(format!("expected a {problem} instance, got {}", spec.problem)));
    }
    Ok(())
}

pub fn solve_max_min(oracle: &dyn DomainOracle, spec: &ProblemSpec, builder: &dyn SparsifierBuilder) -> Result<SolveAnswer> {
    expect_problem(spec, Problem::MaxMin)?;
    solve(oracle, spec, builder).map(|o| o.answer)
}

pub fn solve_max_sum(oracle: &dyn DomainOracle, spec: &ProblemSpec, builder: &dyn SparsifierBuilder) -> Result<SolveAnswer> {
    expect_problem(spec, Problem::MaxSum)?;
    solve(oracle, spec, builder).map(|o| o.answer)
}

pub fn solve_k_center(oracle: &dyn DomainOracle, spec: &ProblemSpec, builder: &dyn SparsifierBuilder) -> Result<SolveAnswer> {
    expect_problem(spec, Problem::KCenter)?;
    solve(oracle, spec, builder).map(|o| o.answer)
}

pub fn solve_k_sum_radii(oracle: &dyn DomainOracle, spec: &ProblemSpec, builder: &dyn SparsifierBuilder) -> Result<SolveAnswer> {
    expect_problem(spec, Problem::KSumRadii)?;
    solve(oracle, spec, builder).map(|o| o.answer)
}

/// `C(m + k - 1, k)`, saturating.
fn multisets(m: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.saturating_mul(m as u128 + i) / (i + 1);
    }
    acc
}

fn guard_tuples(m: usize, k: usize) -> Result<()> {
    if m > 0 && multisets(m, k) > MAX_TUPLES {
        return Err(Error::guard(format!(
            "{m} candidate sets choose {k} with repetition exceeds {MAX_TUPLES} tuples"
        )));
    }
    Ok(())
}

fn sorted(mut sets: Vec<SubsetMask>) -> Vec<SubsetMask> {
    sets.sort();
    sets
}

/// First multiset of `k` members (in index order) with all pairwise distances
/// at least `d`.
pub fn max_min_over(family: &SetFamily, spec: &ProblemSpec) -> Result<SolveAnswer> {
    fn go(sets: &[SubsetMask], spec: &ProblemSpec, start: usize, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == spec.k {
            return true;
        }
        for i in start..sets.len() {
            if chosen.iter().all(|&j| spec.distance(&sets[i], &sets[j]) >= spec.d) {
                chosen.push(i);
                if go(sets, spec, i, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    guard_tuples(family.len(), spec.k)?;
    let sets = family.members();
    let mut chosen = Vec::new();
    if !go(sets, spec, 0, &mut chosen) {
        return Ok(SolveAnswer::no());
    }
    let witnesses = sorted(chosen.iter().map(|&i| sets[i]).collect());
    for (i, a) in witnesses.iter().enumerate() {
        for b in &witnesses[i + 1..] {
            assert!(spec.distance(a, b) >= spec.d, "max-min witness violates the threshold");
        }
    }
    Ok(SolveAnswer {
        feasible: true,
        witnesses,
        radii: None,
        objective: None,
    })
}

/// Multiset of `k` members maximising the pairwise distance sum.
pub fn max_sum_over(family: &SetFamily, spec: &ProblemSpec) -> Result<SolveAnswer> {
    fn go(sets: &[SubsetMask], spec: &ProblemSpec, start: usize, chosen: &mut Vec<usize>, sum: usize, best: &mut Option<(usize, Vec<usize>)>) {
        if chosen.len() == spec.k {
            if best.as_ref().is_none_or(|(b, _)| sum > *b) {
                *best = Some((sum, chosen.clone()));
            }
            return;
        }
        for i in start..sets.len() {
            let add: usize = chosen.iter().map(|&j| spec.distance(&sets[i], &sets[j])).sum();
            chosen.push(i);
            go(sets, spec, i, chosen, sum + add, best);
            chosen.pop();
        }
    }
    guard_tuples(family.len(), spec.k)?;
    let sets = family.members();
    let mut best = None;
    go(sets, spec, 0, &mut Vec::new(), 0, &mut best);
    let Some((sum, chosen)) = best else {
        return Ok(SolveAnswer::no());
    };
    let witnesses = sorted(chosen.iter().map(|&i| sets[i]).collect());
    let recomputed: usize = witnesses
        .iter()
        .enumerate()
        .flat_map(|(i, a)| witnesses[i + 1..].iter().map(move |b| (a, b)))
        .map(|(a, b)| spec.distance(a, b))
        .sum();
    assert_eq!(recomputed, sum, "max-sum objective must match its witnesses");
    let feasible = sum >= spec.d;
    Ok(SolveAnswer {
        feasible,
        witnesses: if feasible { witnesses } else { Vec::new() },
        radii: None,
        objective: Some(sum as i64),
    })
}

/// Outcome of the smallest enclosing ball search for one cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClusterRadius {
    /// Smallest radius and a domain member achieving it.
    Within(usize, SubsetMask),
    /// No member covers the cluster within radius `d`.
    TooFar,
    /// The domain holds `k + 1` members pairwise more than `2d` apart, so no
    /// clustering of radius `d` exists at all.
    GloballyInfeasible,
}

/// Smallest `r ≤ d` such that some member `D` has every cluster set within
/// distance `r`. Guesses `D` on the bad elements (where cluster sets disagree)
/// and measures from the cluster set farthest from that guess, which is
/// farthest from `D` as well.
pub fn min_cluster_radius(
    cluster: &[SubsetMask],
    d: usize,
    oracle: &dyn DomainOracle,
    ctx: Option<&SparsifyContext>,
) -> Result<ClusterRadius> {
    let Some(first) = cluster.first() else {
        return Err(Error::usage("cluster must be nonempty"));
    };
    let (all, some) = cluster.iter().fold((*first, *first), |(i, u), s| (i.intersection(s), u.union(s)));
    let bad = some.difference(&all);
    if bad.len() > d.saturating_mul(cluster.len()) {
        return Ok(ClusterRadius::TooFar);
    }
    if bad.len() > MAX_BAD_ELEMENTS {
        return Err(Error::guard(format!(
            "cluster has {} bad elements, limit is {MAX_BAD_ELEMENTS}",
            bad.len()
        )));
    }
    // any center is at least half the diameter away from some member
    let lower = diameter(cluster).div_ceil(2);
    if lower > d {
        return Ok(ClusterRadius::TooFar);
    }
    let b = bad.bits();
    let n = first.universe_size();
    for r in lower..=d {
        let mut sub = 0u64;
        loop {
            let guess = SubsetMask::from_bits(n, sub)?;
            let (reach, far) = cluster
                .iter()
                .map(|k| (k.intersection(&bad).distance(&guess), std::cmp::Reverse(*k)))
                .max()
                .expect("nonempty cluster");
            // a center agreeing with `guess` on the bad elements is at least `reach` from `far`
            if reach > r {
                if sub == b {
                    break;
                }
                sub = sub.wrapping_sub(b) & b;
                continue;
            }
            let q = ExtensionQuery::new(far.0, r, guess, bad.difference(&guess))?;
            match oracle.exact_extend(&q, ctx)? {
                ExtensionOutcome::Found(center) => {
                    debug_assert!(cluster.iter().all(|k| k.distance(&center) <= r));
                    return Ok(ClusterRadius::Within(r, center));
                }
                ExtensionOutcome::NotFound => {}
                ExtensionOutcome::TrivialSparsifier(_) => return Ok(ClusterRadius::GloballyInfeasible),
            }
            if sub == b {
                break;
            }
            sub = sub.wrapping_sub(b) & b;
        }
    }
    Ok(ClusterRadius::TooFar)
}

fn diameter(cluster: &[SubsetMask]) -> usize {
    cluster
        .iter()
        .enumerate()
        .flat_map(|(i, a)| cluster[i + 1..].iter().map(move |b| a.distance(b)))
        .max()
        .unwrap_or(0)
}

/// Cluster radii memoised by the member bitmask of the cluster within `𝒦`.
struct RadiusTable<'a> {
    oracle: &'a dyn DomainOracle,
    sets: &'a [SubsetMask],
    spec: &'a ProblemSpec,
    ctx: Option<SparsifyContext>,
    memo: HashMap<u64, ClusterRadius>,
}

struct Infeasible;

impl RadiusTable<'_> {
    /// `Ok(None)` when the cluster needs radius above `d`.
    fn radius(&mut self, members: u64) -> Result<std::result::Result<Option<(usize, SubsetMask)>, Infeasible>> {
        if !self.memo.contains_key(&members) {
            let idx: Vec<usize> = (0..self.sets.len()).filter(|i| members >> i & 1 == 1).collect();
            let outcome = if self.spec.modified {
                self.modified_radius(&idx)?
            } else {
                let cluster: Vec<SubsetMask> = idx.iter().map(|&i| self.sets[i]).collect();
                min_cluster_radius(&cluster, self.spec.d, self.oracle, self.ctx.as_ref())?
            };
            self.memo.insert(members, outcome);
        }
        Ok(match &self.memo[&members] {
            ClusterRadius::Within(r, c) => Ok(Some((*r, *c))),
            ClusterRadius::TooFar => Ok(None),
            ClusterRadius::GloballyInfeasible => Err(Infeasible),
        })
    }

    /// Tries every orientation `K` or `U \ K` of the members but the first.
    fn modified_radius(&self, idx: &[usize]) -> Result<ClusterRadius> {
        let mut best: Option<(usize, SubsetMask)> = None;
        let flips = idx.len().saturating_sub(1);
        if flips > 20 {
            return Err(Error::guard(format!("{} orientations of a cluster", 1u64 << flips)));
        }
        for orient in 0..1u64 << flips {
            let cluster: Vec<SubsetMask> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| {
                    let s = self.sets[i];
                    if j > 0 && orient >> (j - 1) & 1 == 1 {
                        s.complement()
                    } else {
                        s
                    }
                })
                .collect();
            // only a strictly smaller radius can improve on `best`
            let limit = match best {
                None => self.spec.d,
                Some((r, _)) => r - 1,
            };
            if diameter(&cluster).div_ceil(2) > limit {
                continue;
            }
            match min_cluster_radius(&cluster, limit, self.oracle, None)? {
                ClusterRadius::Within(r, c) if best.is_none_or(|(b, _)| r < b) => best = Some((r, c)),
                _ => {}
            }
            if best.is_some_and(|(r, _)| r == 0) {
                break;
            }
        }
        Ok(best.map_or(ClusterRadius::TooFar, |(r, c)| ClusterRadius::Within(r, c)))
    }
}

struct PartitionSearch<'a, 'b> {
    table: &'b mut RadiusTable<'a>,
    k: usize,
    sum_objective: bool,
    blocks: Vec<u64>,
    best: Option<(usize, Vec<u64>)>,
}

impl PartitionSearch<'_, '_> {
    fn current_cost(&mut self) -> Result<std::result::Result<Option<usize>, Infeasible>> {
        let mut total = 0;
        for i in 0..self.blocks.len() {
            match self.table.radius(self.blocks[i])? {
                Err(e) => return Ok(Err(e)),
                Ok(None) => return Ok(Ok(None)),
                Ok(Some((r, _))) => {
                    total = if self.sum_objective { total + r } else { total.max(r) };
                }
            }
        }
        Ok(Ok(Some(total)))
    }

    /// Assigns member `i` onward; returns `Err(Infeasible)` to abort, `true`
    /// to stop early.
    fn go(&mut self, i: usize, n: usize) -> Result<std::result::Result<bool, Infeasible>> {
        let cost = match self.current_cost()? {
            Err(e) => return Ok(Err(e)),
            Ok(None) => return Ok(Ok(false)),
            Ok(Some(c)) => c,
        };
        if cost > self.table.spec.d || self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return Ok(Ok(false));
        }
        if i == n {
            self.best = Some((cost, self.blocks.clone()));
            return Ok(Ok(!self.sum_objective || cost == 0));
        }
        for b in 0..self.blocks.len() {
            self.blocks[b] |= 1 << i;
            let r = self.go(i + 1, n)?;
            self.blocks[b] &= !(1u64 << i);
            if !matches!(r, Ok(false)) {
                return Ok(r);
            }
        }
        if self.blocks.len() < self.k {
            self.blocks.push(1 << i);
            let r = self.go(i + 1, n)?;
            self.blocks.pop();
            if !matches!(r, Ok(false)) {
                return Ok(r);
            }
        }
        Ok(Ok(false))
    }
}

/// Partitions `𝒦` into at most `k` clusters and checks each cluster's best
/// radius against the max (k-center) or sum (k-sum-of-radii) budget `d`.
pub fn cluster_over(oracle: &dyn DomainOracle, family: &SetFamily, spec: &ProblemSpec) -> Result<SolveAnswer> {
    if !spec.problem.is_clustering() {
        return Err(Error::usage(format!("{} is not a clustering problem", spec.problem)));
    }
    let sets = family.members();
    if sets.is_empty() {
        return Ok(SolveAnswer::no());
    }
    if sets.len() > 64 {
        return Err(Error::guard(format!("{} candidate sets to partition, limit is 64", sets.len())));
    }
    let ctx = (!spec.modified).then_some(SparsifyContext {
        k: spec.k,
        d: spec.d,
        p: spec.d,
    });
    let mut table = RadiusTable {
        oracle,
        sets,
        spec,
        ctx,
        memo: HashMap::new(),
    };
    let mut search = PartitionSearch {
        table: &mut table,
        k: spec.k,
        sum_objective: spec.problem == Problem::KSumRadii,
        blocks: Vec::new(),
        best: None,
    };
    if search.go(0, sets.len())?.is_err() {
        return Ok(SolveAnswer::no());
    }
    let Some((cost, blocks)) = search.best.take() else {
        return Ok(SolveAnswer::no());
    };
    let mut pairs: Vec<(SubsetMask, usize)> = Vec::new();
    for &block in &blocks {
        let Ok(Some((r, c))) = table.radius(block)? else {
            unreachable!("chosen blocks have radii");
        };
        for i in (0..sets.len()).filter(|i| block >> i & 1 == 1) {
            assert!(spec.distance(&sets[i], &c) <= r, "cluster member outside its center's ball");
        }
        assert!(oracle.contains(&c), "cluster center must belong to the domain");
        pairs.push((c, r));
    }
    pairs.sort();
    while pairs.len() < spec.k {
        pairs.push((pairs[0].0, 0));
    }
    Ok(SolveAnswer {
        feasible: true,
        witnesses: pairs.iter().map(|p| p.0).collect(),
        radii: Some(pairs.iter().map(|p| p.1).collect()),
        objective: (spec.problem == Problem::KSumRadii).then_some(cost as i64),
    })
}
