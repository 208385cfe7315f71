//! The capabilities a solution domain exposes to the sparsification frameworks.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::mask::{SetFamily, SubsetMask, WeightVector};

/// Arguments of an exact extension query: find `D` in the domain with
/// `|D △ center| = radius`, `forced ⊆ D` and `D ∩ forbidden = ∅`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionQuery {
    pub center: SubsetMask,
    pub radius: usize,
    pub forced: SubsetMask,
    pub forbidden: SubsetMask,
}

impl ExtensionQuery {
    pub fn new(
        center: SubsetMask,
        radius: usize,
        forced: SubsetMask,
        forbidden: SubsetMask,
    ) -> Result<Self> {
        let n = center.universe_size();
        for s in [&forced, &forbidden] {
            if s.universe_size() != n {
                return Err(Error::UniverseMismatch {
                    left: n,
                    right: s.universe_size(),
                });
            }
        }
        if forced.intersects(&forbidden) {
            return Err(Error::usage("forced and forbidden sets overlap"));
        }
        Ok(ExtensionQuery {
            center,
            radius,
            forced,
            forbidden,
        })
    }

    /// Query around `center` without membership constraints.
    pub fn around(center: SubsetMask, radius: usize) -> Self {
        let n = center.universe_size();
        ExtensionQuery {
            center,
            radius,
            forced: SubsetMask::empty(n),
            forbidden: SubsetMask::empty(n),
        }
    }

    pub fn universe_size(&self) -> usize {
        self.center.universe_size()
    }

    /// Whether `d` satisfies every constraint of the query.
    pub fn accepts(&self, d: &SubsetMask) -> bool {
        d.distance(&self.center) == self.radius
            && self.forced.is_subset(d)
            && d.is_disjoint(&self.forbidden)
    }
}

/// Result of an exact extension query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionOutcome {
    Found(SubsetMask),
    NotFound,
    /// `k + 1` domain members pairwise more than `2d` apart, where `k` and `d`
    /// come from the [`SparsifyContext`] of the query.
    TrivialSparsifier(SetFamily),
}

impl ExtensionOutcome {
    pub fn found(&self) -> Option<SubsetMask> {
        match self {
            ExtensionOutcome::Found(d) => Some(*d),
            _ => None,
        }
    }
}

/// Framework parameters forwarded to extension queries. Adapters that can
/// short-cut to a trivial sparsifier use them; all others ignore them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparsifyContext {
    pub k: usize,
    pub d: usize,
    /// Largest radius the framework will ever query.
    pub p: usize,
}

/// A solution domain `𝒟 ⊆ 2^U` given implicitly through oracles.
///
/// Implementations must be pure: identical arguments give identical results.
pub trait DomainOracle {
    /// Short adapter name used in error messages.
    fn name(&self) -> &'static str;

    fn universe_size(&self) -> usize;

    /// A member of the domain maximising `Σ_{e∈D} w_e`, or `None` when the
    /// domain is empty.
    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>>;

    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome>;

    /// A member of size exactly `r` avoiding `forbidden`.
    fn exact_empty_extend(&self, r: usize, forbidden: SubsetMask) -> Result<Option<SubsetMask>> {
        let n = self.universe_size();
        let q = ExtensionQuery::new(SubsetMask::empty(n), r, SubsetMask::empty(n), forbidden)?;
        match self.exact_extend(&q, None)? {
            ExtensionOutcome::Found(d) => Ok(Some(d)),
            ExtensionOutcome::NotFound => Ok(None),
            ExtensionOutcome::TrivialSparsifier(_) => Err(Error::usage(
                "empty extension produced a trivial sparsifier without a framework context",
            )),
        }
    }

    /// Membership predicate, used by the brute-force reference engine.
    fn contains(&self, set: &SubsetMask) -> bool;

    /// Declared upper bound on member cardinality, if the domain has one.
    fn size_bound(&self) -> Option<usize> {
        None
    }

    /// Whether `U \ D` belongs to the domain for every member `D`.
    fn complement_closed(&self) -> bool {
        false
    }
}

impl<T: DomainOracle + ?Sized> DomainOracle for Box<T> {
    fn name(&self) -> &'static str {
        (**self).name()
    }
    fn universe_size(&self) -> usize {
        (**self).universe_size()
    }
    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        (**self).opt_pm1(w)
    }
    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        (**self).exact_extend(q, ctx)
    }
    fn exact_empty_extend(&self, r: usize, forbidden: SubsetMask) -> Result<Option<SubsetMask>> {
        (**self).exact_empty_extend(r, forbidden)
    }
    fn contains(&self, set: &SubsetMask) -> bool {
        (**self).contains(set)
    }
    fn size_bound(&self) -> Option<usize> {
        (**self).size_bound()
    }
    fn complement_closed(&self) -> bool {
        (**self).complement_closed()
    }
}

pub(crate) fn check_query(oracle: &dyn DomainOracle, q: &ExtensionQuery) -> Result<()> {
    if q.universe_size() != oracle.universe_size() {
        return Err(Error::UniverseMismatch {
            left: oracle.universe_size(),
            right: q.universe_size(),
        });
    }
    Ok(())
}

/// Wraps an oracle and counts calls per capability.
pub struct CountingOracle<'a> {
    inner: &'a dyn DomainOracle,
    opt_calls: AtomicUsize,
    extend_calls: AtomicUsize,
}

impl<'a> CountingOracle<'a> {
    pub fn new(inner: &'a dyn DomainOracle) -> Self {
        CountingOracle {
            inner,
            opt_calls: AtomicUsize::new(0),
            extend_calls: AtomicUsize::new(0),
        }
    }

    pub fn opt_calls(&self) -> usize {
        self.opt_calls.load(Ordering::Relaxed)
    }

    /// Exact extension and exact empty extension calls combined.
    pub fn extend_calls(&self) -> usize {
        self.extend_calls.load(Ordering::Relaxed)
    }
}

impl DomainOracle for CountingOracle<'_> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }
    fn universe_size(&self) -> usize {
        self.inner.universe_size()
    }
    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        self.opt_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.opt_pm1(w)
    }
    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        self.extend_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.exact_extend(q, ctx)
    }
    fn exact_empty_extend(&self, r: usize, forbidden: SubsetMask) -> Result<Option<SubsetMask>> {
        self.extend_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.exact_empty_extend(r, forbidden)
    }
    fn contains(&self, set: &SubsetMask) -> bool {
        self.inner.contains(set)
    }
    fn size_bound(&self) -> Option<usize> {
        self.inner.size_bound()
    }
    fn complement_closed(&self) -> bool {
        self.inner.complement_closed()
    }
}
