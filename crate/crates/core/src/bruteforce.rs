//! Reference engine for small instances: explicit enumeration, literal
//! sparsifier checks and exhaustive solving.

use std::collections::HashMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::{explicit_oracle, ExplicitOracle};
use crate::error::{Error, Result};
use crate::mask::{SetFamily, SubsetMask};
use crate::oracle::DomainOracle;
use crate::solvers::{Problem, ProblemSpec, SolveAnswer};

pub const MAX_ENUMERATION_UNIVERSE: usize = 20;
pub const MAX_MATERIALIZED_POWER_SET: usize = 12;
pub const SAMPLED_TUPLES: usize = 10_000;
pub const MAX_BRUTE_TUPLES: u128 = 10_000_000;

/// Every member of the domain, in ascending mask order, by filtering all
/// subsets of `U` through the membership predicate.
pub fn enumerate_domain(oracle: &dyn DomainOracle) -> Result<SetFamily> {
    let n = oracle.universe_size();
    if n > MAX_ENUMERATION_UNIVERSE {
        return Err(Error::guard(format!(
            "enumerating 2^{n} subsets, limit is 2^{MAX_ENUMERATION_UNIVERSE}"
        )));
    }
    let mut family = SetFamily::new(n);
    for bits in 0..1u64 << n {
        let s = SubsetMask::from_bits(n, bits)?;
        if oracle.contains(&s) {
            family.insert(s);
        }
    }
    Ok(family)
}

/// The explicit scan oracle over an enumerated domain.
pub fn brute_oracles(domain: &SetFamily) -> ExplicitOracle {
    explicit_oracle(domain.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reference {
    Domain,
    PowerSet,
    Ball { center: SubsetMask, radius: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyScope {
    pub k: usize,
    /// Distance cap `d`; `None` means uncapped.
    pub cap: Option<usize>,
    pub reference: Reference,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub tuple: Vec<SubsetMask>,
    pub missed: SubsetMask,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub counterexample: Option<Counterexample>,
    /// The reference tuples were sampled rather than exhausted.
    pub sampled: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn materialize(n: usize, reference: &Reference, domain: &SetFamily) -> Result<Option<Vec<SubsetMask>>> {
    Ok(match reference {
        Reference::Domain => Some(domain.members().to_vec()),
        Reference::PowerSet if n <= MAX_MATERIALIZED_POWER_SET => {
            Some((0..1u64 << n).map(|b| SubsetMask::from_bits(n, b)).collect::<Result<_>>()?)
        }
        Reference::PowerSet => None,
        Reference::Ball { center, radius } => {
            if center.universe_size() != n {
                return Err(Error::UniverseMismatch {
                    left: n,
                    right: center.universe_size(),
                });
            }
            if n > MAX_ENUMERATION_UNIVERSE {
                return Err(Error::guard(format!("materialising a ball in 2^{n} subsets")));
            }
            let mut out = Vec::new();
            for b in 0..1u64 << n {
                let s = SubsetMask::from_bits(n, b)?;
                if s.distance(center) <= *radius {
                    out.push(s);
                }
            }
            Some(out)
        }
    })
}

/// Checks that for every `k`-tuple of reference sets and every domain member
/// `D` some `K ∈ cand` has `min(cap, |F_i △ K|) ≥ min(cap, |F_i △ D|)` for all
/// `i`, which is equivalent to the sparsifier definition quantified over all
/// distance vectors.
pub fn verify_sparsifier(domain: &SetFamily, cand: &SetFamily, scope: &VerifyScope) -> Result<Verification> {
    let n = domain.universe_size();
    if cand.universe_size() != n {
        return Err(Error::UniverseMismatch {
            left: n,
            right: cand.universe_size(),
        });
    }
    if !cand.is_subfamily_of(domain) {
        return Err(Error::usage("candidate family is not contained in the domain"));
    }
    if scope.k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    let cap = scope.cap.unwrap_or(n).min(n);
    let capped = |a: &SubsetMask, b: &SubsetMask| a.distance(b).min(cap);
    let others: Vec<SubsetMask> = domain.iter().filter(|d| !cand.contains(d)).copied().collect();
    if others.is_empty() {
        return Ok(Verification {
            counterexample: None,
            sampled: false,
        });
    }
    let ks = cand.members();
    let words = ks.len().div_ceil(64).max(1);
    // dom[f][j]: candidates at least as far from f as others[j], capped
    let dominance = |f: &SubsetMask| -> Vec<Vec<u64>> {
        others
            .iter()
            .map(|d| {
                let target = capped(f, d);
                let mut bits = vec![0u64; words];
                for (i, k) in ks.iter().enumerate() {
                    if capped(f, k) >= target {
                        bits[i / 64] |= 1 << (i % 64);
                    }
                }
                bits
            })
            .collect()
    };

    let Some(refs) = materialize(n, &scope.reference, domain)? else {
        return Ok(sampled_verify(n, scope.k, &others, &dominance));
    };
    // references with equal capped distance profiles are interchangeable
    let mut classes: Vec<(SubsetMask, Vec<Vec<u64>>)> = Vec::new();
    let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
    for f in refs {
        let profile: Vec<usize> = others.iter().chain(ks).map(|s| capped(&f, s)).collect();
        if seen.insert(profile, ()).is_none() {
            classes.push((f, dominance(&f)));
        }
    }
    let full = vec![u64::MAX; words];
    let alive = vec![full; others.len()];
    let mut tuple = Vec::with_capacity(scope.k);
    let counterexample = search_tuples(&classes, scope.k, 0, &alive, &mut tuple).map(|(tuple, j)| Counterexample {
        tuple,
        missed: others[j],
    });
    Ok(Verification {
        counterexample,
        sampled: false,
    })
}

/// Depth-first over multisets of reference classes; `alive[j]` holds the
/// candidates still dominating `others[j]` for the tuple prefix.
fn search_tuples(
    classes: &[(SubsetMask, Vec<Vec<u64>>)],
    k: usize,
    start: usize,
    alive: &[Vec<u64>],
    tuple: &mut Vec<SubsetMask>,
) -> Option<(Vec<SubsetMask>, usize)> {
    if tuple.len() == k {
        return None;
    }
    for (c, (f, dom)) in classes.iter().enumerate().skip(start) {
        let next: Vec<Vec<u64>> = alive
            .iter()
            .zip(dom)
            .map(|(a, d)| a.iter().zip(d).map(|(x, y)| x & y).collect())
            .collect();
        tuple.push(*f);
        if let Some(j) = next.iter().position(|bits| bits.iter().all(|&w| w == 0)) {
            // a failing prefix fails for every completion
            let mut full = tuple.clone();
            full.resize(k, *f);
            return Some((full, j));
        }
        if let Some(hit) = search_tuples(classes, k, c, &next, tuple) {
            return Some(hit);
        }
        tuple.pop();
    }
    None
}

fn sampled_verify(
    n: usize,
    k: usize,
    others: &[SubsetMask],
    dominance: &dyn Fn(&SubsetMask) -> Vec<Vec<u64>>,
) -> Verification {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mask = SubsetMask::full(n).bits();
    for _ in 0..SAMPLED_TUPLES {
        let tuple: Vec<SubsetMask> = (0..k)
            .map(|_| SubsetMask::from_bits(n, rng.next_u64() & mask).expect("masked to universe"))
            .collect();
        let doms: Vec<Vec<Vec<u64>>> = tuple.iter().map(dominance).collect();
        for j in 0..others.len() {
            let words = doms[0][j].len();
            let any = (0..words).any(|w| doms.iter().fold(u64::MAX, |acc, d| acc & d[j][w]) != 0);
            if !any {
                return Verification {
                    counterexample: Some(Counterexample {
                        tuple,
                        missed: others[j],
                    }),
                    sampled: true,
                };
            }
        }
    }
    Verification {
        counterexample: None,
        sampled: true,
    }
}

/// Nondecreasing index tuples of length `k` over `0..m`.
fn for_each_multiset(m: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if m == 0 {
        return;
    }
    let mut idx = vec![0usize; k];
    loop {
        if f(&idx) {
            return;
        }
        let Some(pos) = (0..k).rev().find(|&i| idx[i] + 1 < m) else {
            return;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[pos];
        }
    }
}

fn pairs(t: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..t.len()).flat_map(move |i| (i + 1..t.len()).map(move |j| (t[i], t[j])))
}

/// Exhaustive answer over `domain` for any of the four problems.
pub fn brute_solve(domain: &SetFamily, spec: &ProblemSpec) -> Result<SolveAnswer> {
    if spec.k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    let sets = domain.members();
    let tuples = (sets.len() as u128).checked_pow(spec.k as u32);
    if tuples.is_none_or(|t| t > MAX_BRUTE_TUPLES) {
        return Err(Error::guard(format!(
            "{} sets to the power {} exceeds {MAX_BRUTE_TUPLES} tuples",
            sets.len(),
            spec.k
        )));
    }
    let dist = |a: &SubsetMask, b: &SubsetMask| spec.distance(a, b);
    let mut answer = SolveAnswer {
        feasible: false,
        witnesses: Vec::new(),
        radii: None,
        objective: None,
    };
    match spec.problem {
        Problem::MaxMin => for_each_multiset(sets.len(), spec.k, |t| {
            if pairs(t).all(|(a, b)| dist(&sets[a], &sets[b]) >= spec.d) {
                answer.feasible = true;
                answer.witnesses = t.iter().map(|&i| sets[i]).collect();
                return true;
            }
            false
        }),
        Problem::MaxSum => {
            let mut best: Option<(usize, Vec<usize>)> = None;
            for_each_multiset(sets.len(), spec.k, |t| {
                let sum: usize = pairs(t).map(|(a, b)| dist(&sets[a], &sets[b])).sum();
                if best.as_ref().is_none_or(|(b, _)| sum > *b) {
                    best = Some((sum, t.to_vec()));
                }
                false
            });
            if let Some((sum, t)) = best {
                answer.objective = Some(sum as i64);
                if sum >= spec.d {
                    answer.feasible = true;
                    answer.witnesses = t.iter().map(|&i| sets[i]).collect();
                }
            }
        }
        Problem::KCenter => {
            for_each_multiset(sets.len(), spec.k, |t| {
                let mut radii = vec![0usize; t.len()];
                for s in sets {
                    let (slot, r) = t
                        .iter()
                        .enumerate()
                        .map(|(slot, &c)| (slot, dist(s, &sets[c])))
                        .min_by_key(|&(slot, r)| (r, slot))
                        .expect("k >= 1");
                    radii[slot] = radii[slot].max(r);
                }
                if radii.iter().all(|&r| r <= spec.d) {
                    answer.feasible = true;
                    answer.witnesses = t.iter().map(|&i| sets[i]).collect();
                    answer.radii = Some(radii);
                    return true;
                }
                false
            });
        }
        Problem::KSumRadii => {
            let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
            for_each_multiset(sets.len(), spec.k, |t| {
                let mut radii = vec![0usize; t.len()];
                ball_budgets(&mut radii, 0, spec.d, &mut |radii| {
                    let sum: usize = radii.iter().sum();
                    if best.as_ref().is_some_and(|(b, _, _)| sum >= *b) {
                        return;
                    }
                    let covered = sets
                        .iter()
                        .all(|s| t.iter().zip(radii).any(|(&c, &r)| dist(s, &sets[c]) <= r));
                    if covered {
                        best = Some((sum, t.to_vec(), radii.to_vec()));
                    }
                });
                false
            });
            if let Some((sum, t, radii)) = best {
                answer.feasible = true;
                answer.objective = Some(sum as i64);
                answer.witnesses = t.iter().map(|&i| sets[i]).collect();
                answer.radii = Some(radii);
            }
        }
    }
    if let Some(radii) = answer.radii.take() {
        let mut pairs: Vec<(SubsetMask, usize)> = answer.witnesses.iter().copied().zip(radii).collect();
        pairs.sort();
        answer.witnesses = pairs.iter().map(|p| p.0).collect();
        answer.radii = Some(pairs.iter().map(|p| p.1).collect());
    } else {
        answer.witnesses.sort();
    }
    Ok(answer)
}

/// Every radius vector with sum at most `budget`.
fn ball_budgets(radii: &mut [usize], i: usize, budget: usize, f: &mut dyn FnMut(&[usize])) {
    if i == radii.len() {
        f(radii);
        return;
    }
    for r in 0..=budget {
        radii[i] = r;
        ball_budgets(radii, i + 1, budget - r, f);
    }
    radii[i] = 0;
}
