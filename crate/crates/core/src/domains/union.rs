use crate::error::{Error, Result};
use crate::mask::{SetFamily, SubsetMask, WeightVector};
use crate::oracle::{check_query, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};

/// The union of several domains over one ground set.
pub struct UnionOracle {
    n: usize,
    parts: Vec<Box<dyn DomainOracle>>,
}

pub fn union_oracle(n: usize, parts: Vec<Box<dyn DomainOracle>>) -> Result<UnionOracle> {
    if let Some(p) = parts.iter().find(|p| p.universe_size() != n) {
        return Err(Error::UniverseMismatch {
            left: n,
            right: p.universe_size(),
        });
    }
    Ok(UnionOracle { n, parts })
}

/// Whether `family` is `k + 1` sets pairwise more than `2d` apart.
pub fn is_trivial_sparsifier(family: &SetFamily, k: usize, d: usize) -> bool {
    family.len() == k + 1
        && family
            .iter()
            .enumerate()
            .all(|(i, a)| family.iter().skip(i + 1).all(|b| a.distance(b) > 2 * d))
}

impl UnionOracle {
    pub fn parts(&self) -> &[Box<dyn DomainOracle>] {
        &self.parts
    }
}

impl DomainOracle for UnionOracle {
    fn name(&self) -> &'static str {
        "union"
    }

    fn universe_size(&self) -> usize {
        self.n
    }

    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        let mut best: Option<SubsetMask> = None;
        for part in &self.parts {
            if let Some(d) = part.opt_pm1(w)? {
                if best.is_none_or(|b| w.weight(&d) > w.weight(&b)) {
                    best = Some(d);
                }
            }
        }
        Ok(best)
    }

    /// A trivial sparsifier of one part is passed on only after re-checking
    /// it; otherwise that part is asked again without the framework context.
    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        check_query(self, q)?;
        for part in &self.parts {
            let outcome = match part.exact_extend(q, ctx)? {
                ExtensionOutcome::TrivialSparsifier(fam) => match ctx {
                    Some(c) if is_trivial_sparsifier(&fam, c.k, c.d) => {
                        return Ok(ExtensionOutcome::TrivialSparsifier(fam));
                    }
                    _ => part.exact_extend(q, None)?,
                },
                other => other,
            };
            if let ExtensionOutcome::Found(d) = outcome {
                return Ok(ExtensionOutcome::Found(d));
            }
        }
        Ok(ExtensionOutcome::NotFound)
    }

    fn contains(&self, set: &SubsetMask) -> bool {
        self.parts.iter().any(|p| p.contains(set))
    }

    fn size_bound(&self) -> Option<usize> {
        self.parts
            .iter()
            .map(|p| p.size_bound())
            .try_fold(0, |acc, b| b.map(|b| acc.max(b)))
    }
}
