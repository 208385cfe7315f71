//! k-max-distance sparsification of domains whose members have bounded size,
//! driven only by exact empty extension queries.
//!
//! The construction grows `𝒦` one set per pass. In a pass, for every target
//! size `ℓ'`, it looks for a blocker `Y ⊆ ⋃𝒦` that meets every member of `𝒦`
//! of size `ℓ'` and the core of every `(kr+1)`-petal sunflower among them; a
//! domain member of size `ℓ'` avoiding such a `Y` is new and does not close a
//! larger sunflower, so it is added. When no pass adds anything, every omitted
//! domain member is shadowed by a sunflower of `𝒦` and `𝒦` is a sparsifier
//! with respect to `ℬ(∅, r)`.

use crate::error::{Error, Result};
use crate::mask::{SetFamily, SubsetMask};
use crate::oracle::{CountingOracle, DomainOracle, ExtensionOutcome};
use crate::report::{SparsifierMode, SparsifierReport};

/// Equal-size sets whose pairwise intersections all equal `core`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sunflower {
    pub petals: SetFamily,
    pub core: SubsetMask,
}

/// Returns the sunflower structure of `family`, or `None` if it is not one.
/// A single set is a sunflower whose core is the set itself.
pub fn is_sunflower(family: &SetFamily) -> Result<Option<Sunflower>> {
    let members = family.members();
    let Some(first) = members.first() else {
        return Err(Error::usage("sunflower test needs a nonempty family"));
    };
    if members.iter().any(|s| s.len() != first.len()) {
        return Err(Error::usage("sunflower test needs equal-cardinality sets"));
    }
    let core = match members.get(1) {
        None => *first,
        Some(second) => first.intersection(second),
    };
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if a.intersection(b) != core {
                return Ok(None);
            }
        }
    }
    Ok(Some(Sunflower {
        petals: family.clone(),
        core,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmallSparsifyParams {
    pub k: usize,
    /// Radius of the reference ball `ℬ(∅, r)`.
    pub r: usize,
    /// Upper bound on member cardinality.
    pub ell: usize,
}

impl SmallSparsifyParams {
    pub fn new(k: usize, r: usize, ell: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::usage("k must be at least 1"));
        }
        if ell > r {
            return Err(Error::usage(format!(
                "size bound ell = {ell} exceeds ball radius r = {r}"
            )));
        }
        Ok(SmallSparsifyParams { k, r, ell })
    }

    /// Petal count `kr + 1` of the sunflowers that make a set redundant.
    pub fn petals(&self) -> usize {
        self.k.saturating_mul(self.r).saturating_add(1)
    }
}

/// `(ℓ+1)!(kr+1)^ℓ`, or `None` if it does not fit in a `u128`.
pub fn size_bound(k: usize, r: usize, ell: usize) -> Option<u128> {
    let t = (k as u128).checked_mul(r as u128)?.checked_add(1)?;
    let mut acc: u128 = 1;
    for i in 2..=(ell as u128 + 1) {
        acc = acc.checked_mul(i)?;
    }
    for _ in 0..ell {
        acc = acc.checked_mul(t)?;
    }
    Some(acc)
}

/// Cores of all `t`-petal sunflowers among `same` (sets of one common size).
pub fn sunflower_cores(same: &[SubsetMask], t: usize) -> Vec<SubsetMask> {
    if t == 0 || same.len() < t {
        return Vec::new();
    }
    if t == 1 {
        return same.to_vec();
    }
    // a sunflower with two or more petals has the pairwise intersection as core
    let mut candidates: Vec<SubsetMask> = Vec::new();
    for (i, a) in same.iter().enumerate() {
        for b in &same[i + 1..] {
            let c = a.intersection(b);
            if !candidates.contains(&c) {
                candidates.push(c);
            }
        }
    }
    candidates.sort();
    candidates
        .into_iter()
        .filter(|core| {
            let petals: Vec<u64> = same
                .iter()
                .filter(|s| core.is_subset(s))
                .map(|s| s.difference(core).bits())
                .collect();
            petals.len() >= t && pack_disjoint(&petals, 0, 0, t)
        })
        .collect()
}

fn pack_disjoint(petals: &[u64], start: usize, used: u64, need: usize) -> bool {
    if need == 0 {
        return true;
    }
    if petals.len() - start < need {
        return false;
    }
    for i in start..petals.len() {
        if petals.len() - i < need {
            break;
        }
        if petals[i] & used == 0 && pack_disjoint(petals, i + 1, used | petals[i], need - 1) {
            return true;
        }
    }
    false
}

/// Subsets of `pool` meeting every set in `required`, by size and then in
/// lexicographic order of their member indices.
pub struct BlockerCandidates {
    n: usize,
    pool: Vec<usize>,
    required: Vec<SubsetMask>,
    size: usize,
    combo: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl BlockerCandidates {
    pub fn new(pool: SubsetMask, required: Vec<SubsetMask>) -> Self {
        let done = required.iter().any(SubsetMask::is_empty);
        BlockerCandidates {
            n: pool.universe_size(),
            pool: pool.to_vec(),
            required,
            size: 0,
            combo: Vec::new(),
            fresh: true,
            done,
        }
    }

    fn advance(&mut self) -> bool {
        if self.fresh {
            self.fresh = false;
            return true;
        }
        let m = self.pool.len();
        let s = self.size;
        // next combination of `s` out of `m` in lexicographic order
        let mut i = s;
        while i > 0 {
            i -= 1;
            if self.combo[i] < m - s + i {
                self.combo[i] += 1;
                for j in i + 1..s {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return true;
            }
        }
        if s == m {
            return false;
        }
        self.size += 1;
        self.combo = (0..self.size).collect();
        true
    }
}

impl Iterator for BlockerCandidates {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                break;
            }
            let mut y = SubsetMask::empty(self.n);
            for &c in &self.combo {
                y.insert(self.pool[c]);
            }
            if self.required.iter().all(|req| req.intersects(&y)) {
                return Some(y);
            }
        }
        None
    }
}

fn required_sets(family: &SetFamily, ell_prime: usize, t: usize) -> Vec<SubsetMask> {
    let same: Vec<SubsetMask> = family
        .iter()
        .filter(|s| s.len() == ell_prime)
        .copied()
        .collect();
    let mut required = sunflower_cores(&same, t);
    required.extend(same);
    required
}

/// All blockers for target size `ell_prime`: subsets of `⋃K` meeting every
/// member of size `ell_prime` and every core of a `t`-petal sunflower among them.
pub fn blocker_candidates(k_family: &SetFamily, ell_prime: usize, t: usize) -> Vec<SubsetMask> {
    BlockerCandidates::new(k_family.union_all(), required_sets(k_family, ell_prime, t)).collect()
}

/// Exact empty extension as consumed by [`k_sparsify_with`]. A trivial
/// sparsifier outcome aborts the construction and is handed back.
pub trait EmptyExtension {
    fn universe_size(&self) -> usize;
    fn empty_extend(&self, size: usize, forbidden: SubsetMask) -> Result<ExtensionOutcome>;
}

/// Exact empty extension served directly by a domain oracle.
pub struct DirectEmptyExtension<'a>(pub &'a dyn DomainOracle);

impl EmptyExtension for DirectEmptyExtension<'_> {
    fn universe_size(&self) -> usize {
        self.0.universe_size()
    }

    fn empty_extend(&self, size: usize, forbidden: SubsetMask) -> Result<ExtensionOutcome> {
        Ok(match self.0.exact_empty_extend(size, forbidden)? {
            Some(d) => ExtensionOutcome::Found(d),
            None => ExtensionOutcome::NotFound,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SmallRun {
    pub family: SetFamily,
    pub passes: usize,
    /// Set when an extension query returned a trivial sparsifier; `family`
    /// then holds that sparsifier.
    pub shortcut: bool,
}

/// Runs the sunflower construction against an arbitrary empty-extension source.
pub fn k_sparsify_with(params: SmallSparsifyParams, ext: &dyn EmptyExtension) -> Result<SmallRun> {
    let n = ext.universe_size();
    let t = params.petals();
    let top = params.ell.min(n);
    let mut family = SetFamily::new(n);
    let mut passes = 0;
    loop {
        passes += 1;
        let pool = family.union_all();
        let mut added = false;
        'sizes: for ell_prime in 0..=top {
            let candidates = BlockerCandidates::new(pool, required_sets(&family, ell_prime, t));
            for y in candidates {
                match ext.empty_extend(ell_prime, y)? {
                    ExtensionOutcome::Found(d) => {
                        if d.len() != ell_prime || d.intersects(&y) || !family.insert(d) {
                            return Err(Error::usage(format!(
                                "empty extension (size {ell_prime}, avoid {y:?}) returned invalid set {d:?}"
                            )));
                        }
                        added = true;
                        break 'sizes;
                    }
                    ExtensionOutcome::NotFound => {}
                    ExtensionOutcome::TrivialSparsifier(f) => {
                        return Ok(SmallRun {
                            family: f,
                            passes,
                            shortcut: true,
                        });
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(SmallRun {
        family,
        passes,
        shortcut: false,
    })
}

/// k-max-distance sparsifier of the oracle's domain with respect to `ℬ(∅, r)`.
pub fn k_sparsify(params: SmallSparsifyParams, oracle: &dyn DomainOracle) -> Result<SparsifierReport> {
    let counting = CountingOracle::new(oracle);
    let run = k_sparsify_with(params, &DirectEmptyExtension(&counting))?;
    let mut report = SparsifierReport::new(run.family, SparsifierMode::Small, params.k);
    report.radius = Some(params.r);
    report.calls_extend = counting.extend_calls();
    report.passes = run.passes;
    report.shortcut = run.shortcut;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(
            n,
            sets.iter()
                .map(|s| SubsetMask::from_indices(n, s.iter().copied()).unwrap()),
        )
        .unwrap()
    }

    fn m(n: usize, v: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn sunflower_examples() {
        let s = is_sunflower(&fam(4, &[&[0, 1], &[0, 2], &[0, 3]])).unwrap().unwrap();
        assert_eq!(s.core, m(4, &[0]));
        let s = is_sunflower(&fam(4, &[&[0, 1], &[2, 3]])).unwrap().unwrap();
        assert!(s.core.is_empty());
        assert!(is_sunflower(&fam(4, &[&[0, 1], &[0, 2], &[1, 2]])).unwrap().is_none());
        let single = is_sunflower(&fam(4, &[&[1, 3]])).unwrap().unwrap();
        assert_eq!(single.core, m(4, &[1, 3]));
    }

    #[test]
    fn sunflower_rejects_mixed_sizes_and_empty() {
        assert!(is_sunflower(&fam(4, &[&[0], &[1, 2]])).is_err());
        assert!(is_sunflower(&SetFamily::new(4)).is_err());
    }

    #[test]
    fn blocker_examples() {
        assert_eq!(blocker_candidates(&SetFamily::new(3), 1, 2), vec![m(3, &[])]);
        assert_eq!(blocker_candidates(&fam(3, &[&[0]]), 1, 2), vec![m(3, &[0])]);
        assert!(blocker_candidates(&fam(3, &[&[0], &[1]]), 1, 2).is_empty());
    }

    #[test]
    fn blocker_order_is_size_then_lexicographic() {
        // no members of size 2, so every subset of R = {0,1,2} qualifies
        let got = blocker_candidates(&fam(4, &[&[0, 1, 2]]), 2, 5);
        let want: Vec<SubsetMask> = [
            &[][..],
            &[0],
            &[1],
            &[2],
            &[0, 1],
            &[0, 2],
            &[1, 2],
            &[0, 1, 2],
        ]
        .iter()
        .map(|v| m(4, v))
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn cores_match_exhaustive_search() {
        let sets = [
            m(6, &[0, 1]),
            m(6, &[0, 2]),
            m(6, &[0, 3]),
            m(6, &[1, 2]),
            m(6, &[4, 5]),
        ];
        for t in 1..=4 {
            let mut expect: Vec<SubsetMask> = Vec::new();
            for mask in 0u32..(1 << sets.len()) {
                if mask.count_ones() as usize != t {
                    continue;
                }
                let pick = SetFamily::from_sets(
                    6,
                    (0..sets.len()).filter(|i| mask >> i & 1 == 1).map(|i| sets[i]),
                )
                .unwrap();
                if let Some(s) = is_sunflower(&pick).unwrap() {
                    if !expect.contains(&s.core) {
                        expect.push(s.core);
                    }
                }
            }
            let mut got = sunflower_cores(&sets, t);
            got.sort();
            expect.sort();
            assert_eq!(got, expect, "t = {t}");
        }
    }

    #[test]
    fn size_bound_values() {
        assert_eq!(size_bound(1, 1, 1), Some(4));
        assert_eq!(size_bound(2, 3, 2), Some(6 * 49));
        assert_eq!(size_bound(3, 0, 0), Some(1));
        assert_eq!(size_bound(3, 1000, 1000), None);
    }

    #[test]
    fn params_validation() {
        assert!(SmallSparsifyParams::new(0, 1, 1).is_err());
        assert!(SmallSparsifyParams::new(1, 1, 2).is_err());
        assert_eq!(SmallSparsifyParams::new(2, 3, 1).unwrap().petals(), 7);
    }
}
