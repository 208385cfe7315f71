use crate::error::Result;
use crate::mask::{SetFamily, SubsetMask, WeightVector};
use crate::oracle::{check_query, DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};

/// A domain listed member by member. Every query is a linear scan; ties go to
/// the earliest member in family order.
#[derive(Clone, Debug)]
pub struct ExplicitOracle {
    family: SetFamily,
    complement_closed: bool,
}

impl ExplicitOracle {
    pub fn new(family: SetFamily) -> Self {
        let complement_closed = family.is_complement_closed();
        ExplicitOracle {
            family,
            complement_closed,
        }
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }
}

pub fn explicit_oracle(family: SetFamily) -> ExplicitOracle {
    ExplicitOracle::new(family)
}

impl DomainOracle for ExplicitOracle {
    fn name(&self) -> &'static str {
        "explicit"
    }

    fn universe_size(&self) -> usize {
        self.family.universe_size()
    }

    fn opt_pm1(&self, w: &WeightVector) -> Result<Option<SubsetMask>> {
        let mut best: Option<(i64, SubsetMask)> = None;
        for s in &self.family {
            let v = w.weight(s);
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, *s));
            }
        }
        Ok(best.map(|(_, s)| s))
    }

    fn exact_extend(
        &self,
        q: &ExtensionQuery,
        _ctx: Option<&SparsifyContext>,
    ) -> Result<ExtensionOutcome> {
        check_query(self, q)?;
        Ok(match self.family.iter().find(|s| q.accepts(s)) {
            Some(s) => ExtensionOutcome::Found(*s),
            None => ExtensionOutcome::NotFound,
        })
    }

    fn contains(&self, set: &SubsetMask) -> bool {
        self.family.contains(set)
    }

    fn complement_closed(&self) -> bool {
        self.complement_closed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, v: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, v.iter().copied()).unwrap()
    }

    fn two_points() -> ExplicitOracle {
        explicit_oracle(SetFamily::from_sets(2, [m(2, &[0]), m(2, &[1])]).unwrap())
    }

    #[test]
    fn scan_examples() {
        let o = two_points();
        let w = WeightVector::from_signs(&[1, -1]).unwrap();
        assert_eq!(o.opt_pm1(&w).unwrap(), Some(m(2, &[0])));
        let q = ExtensionQuery::around(m(2, &[0]), 2);
        assert_eq!(o.exact_extend(&q, None).unwrap(), ExtensionOutcome::Found(m(2, &[1])));

        let single = explicit_oracle(SetFamily::from_sets(2, [m(2, &[0])]).unwrap());
        let q = ExtensionQuery::around(m(2, &[0]), 1);
        assert_eq!(single.exact_extend(&q, None).unwrap(), ExtensionOutcome::NotFound);
    }

    #[test]
    fn empty_family_has_no_optimum() {
        let o = explicit_oracle(SetFamily::new(3));
        let w = WeightVector::from_signs(&[1, 1, 1]).unwrap();
        assert_eq!(o.opt_pm1(&w).unwrap(), None);
    }

    #[test]
    fn ties_follow_family_order() {
        let o = two_points();
        let w = WeightVector::from_signs(&[1, 1]).unwrap();
        assert_eq!(o.opt_pm1(&w).unwrap(), Some(m(2, &[0])));
        assert_eq!(o.exact_empty_extend(1, m(2, &[])).unwrap(), Some(m(2, &[0])));
        assert_eq!(o.exact_empty_extend(1, m(2, &[0])).unwrap(), Some(m(2, &[1])));
    }

    #[test]
    fn complement_closure_detected() {
        assert!(two_points().complement_closed());
        let o = explicit_oracle(SetFamily::from_sets(2, [m(2, &[0])]).unwrap());
        assert!(!o.complement_closed());
    }
}
