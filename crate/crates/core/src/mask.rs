//! Ground-set arithmetic: subsets of a small universe as fixed-width bit masks,
//! ordered duplicate-free families of them, and the Hamming metrics.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Widest universe a [`SubsetMask`] can represent.
pub const MAX_UNIVERSE: usize = 64;

/// The finite universe `U = {0, .., size-1}` with optional display names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    size: usize,
    names: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        check_universe(size)?;
        if size == 0 {
            return Err(Error::usage("ground set must contain at least one element"));
        }
        Ok(GroundSet { size, names: None })
    }

    pub fn with_names(names: Vec<String>) -> Result<Self> {
        let mut g = GroundSet::new(names.len())?;
        g.names = Some(names);
        Ok(g)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn name(&self, element: usize) -> Option<&str> {
        self.names
            .as_ref()
            .and_then(|n| n.get(element))
            .map(String::as_str)
    }

    pub fn empty_set(&self) -> SubsetMask {
        SubsetMask::empty(self.size)
    }

    pub fn full_set(&self) -> SubsetMask {
        SubsetMask::full(self.size)
    }
}

pub(crate) fn check_universe(n: usize) -> Result<()> {
    if n > MAX_UNIVERSE {
        return Err(Error::guard(format!(
            "universe of {n} elements exceeds the {MAX_UNIVERSE}-element mask width"
        )));
    }
    Ok(())
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of `{0, .., universe_size-1}`.
///
/// Ordering is by universe size, then by the integer value of the mask, which
/// is the canonical order used for printing enumerated families.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    n: u8,
    bits: u64,
}

impl SubsetMask {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_UNIVERSE, "universe too wide for a mask");
        SubsetMask { n: n as u8, bits: 0 }
    }

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_UNIVERSE, "universe too wide for a mask");
        SubsetMask {
            n: n as u8,
            bits: low_bits(n),
        }
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        check_universe(n)?;
        if bits & !low_bits(n) != 0 {
            return Err(Error::usage(format!(
                "mask {bits:#x} has members outside a universe of {n} elements"
            )));
        }
        Ok(SubsetMask { n: n as u8, bits })
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, items: I) -> Result<Self> {
        check_universe(n)?;
        let mut bits = 0u64;
        for i in items {
            if i >= n {
                return Err(Error::usage(format!(
                    "element {i} is outside a universe of {n} elements"
                )));
            }
            bits |= 1 << i;
        }
        Ok(SubsetMask { n: n as u8, bits })
    }

    pub fn universe_size(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe_size() && self.bits >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe_size(), "element outside universe");
        self.bits |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.universe_size() {
            self.bits &= !(1 << i);
        }
    }

    pub fn with(mut self, i: usize) -> Self {
        self.insert(i);
        self
    }

    pub fn without(mut self, i: usize) -> Self {
        self.remove(i);
        self
    }

    pub fn union(&self, o: &Self) -> Self {
        self.same(o);
        SubsetMask {
            n: self.n,
            bits: self.bits | o.bits,
        }
    }

    pub fn intersection(&self, o: &Self) -> Self {
        self.same(o);
        SubsetMask {
            n: self.n,
            bits: self.bits & o.bits,
        }
    }

    pub fn difference(&self, o: &Self) -> Self {
        self.same(o);
        SubsetMask {
            n: self.n,
            bits: self.bits & !o.bits,
        }
    }

    pub fn sym_diff(&self, o: &Self) -> Self {
        self.same(o);
        SubsetMask {
            n: self.n,
            bits: self.bits ^ o.bits,
        }
    }

    pub fn complement(&self) -> Self {
        SubsetMask {
            n: self.n,
            bits: !self.bits & low_bits(self.universe_size()),
        }
    }

    pub fn is_subset(&self, o: &Self) -> bool {
        self.same(o);
        self.bits & !o.bits == 0
    }

    pub fn is_disjoint(&self, o: &Self) -> bool {
        self.same(o);
        self.bits & o.bits == 0
    }

    pub fn intersects(&self, o: &Self) -> bool {
        !self.is_disjoint(o)
    }

    /// `|self △ other|`. Universe sizes must agree (checked in debug builds);
    /// use [`hamming`] for a checked version.
    pub fn distance(&self, o: &Self) -> usize {
        self.same(o);
        (self.bits ^ o.bits).count_ones() as usize
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> MaskIter {
        MaskIter { bits: self.bits }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    #[inline]
    fn same(&self, o: &Self) {
        debug_assert_eq!(self.n, o.n, "subset masks over different universes");
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (j, i) in self.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}

/// Space separated member indices, ascending; the empty set prints as "".
impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, i) in self.iter().enumerate() {
            if j > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

pub struct MaskIter {
    bits: u64,
}

impl Iterator for MaskIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let i = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(i)
    }
}

/// Checked `|a △ b|`.
pub fn hamming(a: &SubsetMask, b: &SubsetMask) -> Result<usize> {
    if a.universe_size() != b.universe_size() {
        return Err(Error::UniverseMismatch {
            left: a.universe_size(),
            right: b.universe_size(),
        });
    }
    Ok(a.distance(b))
}

/// Checked `min(|a △ b|, |a △ (U \ b)|)`: distance with every set identified
/// with its complement.
pub fn modified_hamming(a: &SubsetMask, b: &SubsetMask) -> Result<usize> {
    let plain = hamming(a, b)?;
    Ok(plain.min(a.universe_size() - plain))
}

/// Unchecked counterpart of [`modified_hamming`] for inner loops.
pub fn modified_distance(a: &SubsetMask, b: &SubsetMask) -> usize {
    let plain = a.distance(b);
    plain.min(a.universe_size() - plain)
}

/// Ordered, duplicate-free family of subsets over one universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    members: Vec<SubsetMask>,
    index: HashSet<u64>,
}

impl SetFamily {
    pub fn new(n: usize) -> Self {
        SetFamily {
            n,
            members: Vec::new(),
            index: HashSet::new(),
        }
    }

    /// Builds a family, rejecting duplicates and foreign universes.
    pub fn from_sets<I: IntoIterator<Item = SubsetMask>>(n: usize, sets: I) -> Result<Self> {
        let mut f = SetFamily::new(n);
        for s in sets {
            if s.universe_size() != n {
                return Err(Error::UniverseMismatch {
                    left: n,
                    right: s.universe_size(),
                });
            }
            if !f.insert(s) {
                return Err(Error::usage(format!("duplicate set {s:?} in family")));
            }
        }
        Ok(f)
    }

    /// Like [`SetFamily::from_sets`] but silently drops repeated sets.
    pub fn from_sets_dedup<I: IntoIterator<Item = SubsetMask>>(n: usize, sets: I) -> Self {
        let mut f = SetFamily::new(n);
        for s in sets {
            f.insert(s);
        }
        f
    }

    pub fn universe_size(&self) -> usize {
        self.n
    }

    /// Appends `s` unless already present; returns whether it was added.
    pub fn insert(&mut self, s: SubsetMask) -> bool {
        assert_eq!(s.universe_size(), self.n, "set from a different universe");
        if self.index.insert(s.bits()) {
            self.members.push(s);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, s: &SubsetMask) -> bool {
        s.universe_size() == self.n && self.index.contains(&s.bits())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SubsetMask> {
        self.members.iter()
    }

    pub fn get(&self, i: usize) -> Option<&SubsetMask> {
        self.members.get(i)
    }

    /// Same members in canonical (mask-ascending) order.
    pub fn sorted(&self) -> SetFamily {
        let mut m = self.members.clone();
        m.sort();
        SetFamily::from_sets_dedup(self.n, m)
    }

    pub fn union_all(&self) -> SubsetMask {
        self.members
            .iter()
            .fold(SubsetMask::empty(self.n), |acc, s| acc.union(s))
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.members.iter().all(|s| other.contains(s))
    }

    pub fn max_cardinality(&self) -> Option<usize> {
        self.members.iter().map(SubsetMask::len).max()
    }

    /// Whether `U \ D` is a member for every member `D`.
    pub fn is_complement_closed(&self) -> bool {
        self.members.iter().all(|s| self.contains(&s.complement()))
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a SubsetMask;
    type IntoIter = std::slice::Iter<'a, SubsetMask>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// A weight vector in `{-1, +1}^U`, stored as the mask of `+1` entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    plus: SubsetMask,
}

impl WeightVector {
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let n = signs.len();
        check_universe(n)?;
        let mut plus = SubsetMask::empty(n);
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => plus.insert(i),
                -1 => {}
                other => {
                    return Err(Error::usage(format!(
                        "weight {other} at element {i} is not -1 or +1"
                    )))
                }
            }
        }
        Ok(WeightVector { plus })
    }

    /// Elements in `plus` weigh +1, all others -1.
    pub fn from_plus_mask(plus: SubsetMask) -> Self {
        WeightVector { plus }
    }

    pub fn universe_size(&self) -> usize {
        self.plus.universe_size()
    }

    pub fn plus(&self) -> SubsetMask {
        self.plus
    }

    pub fn get(&self, i: usize) -> i64 {
        if self.plus.contains(i) {
            1
        } else {
            -1
        }
    }

    pub fn weight(&self, set: &SubsetMask) -> i64 {
        let pos = set.intersection(&self.plus).len() as i64;
        pos - (set.len() as i64 - pos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, v: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(n, v.iter().copied()).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(&m(4, &[0, 1]), &m(4, &[1, 2])).unwrap(), 2);
        let a = m(5, &[0, 3, 4]);
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        assert_eq!(hamming(&m(3, &[0, 1, 2]), &SubsetMask::empty(3)).unwrap(), 3);
    }

    #[test]
    fn hamming_rejects_universe_mismatch() {
        let err = hamming(&m(3, &[0]), &m(4, &[0])).unwrap_err();
        assert!(matches!(err, Error::UniverseMismatch { left: 3, right: 4 }));
        assert!(modified_hamming(&m(3, &[0]), &m(4, &[0])).is_err());
    }

    #[test]
    fn modified_hamming_examples() {
        assert_eq!(modified_hamming(&m(4, &[0, 1]), &m(4, &[2, 3])).unwrap(), 0);
        assert_eq!(modified_hamming(&m(4, &[0]), &m(4, &[1, 2, 3])).unwrap(), 0);
        assert_eq!(modified_hamming(&m(4, &[0, 1]), &m(4, &[0, 2])).unwrap(), 2);
    }

    #[test]
    fn out_of_range_members_rejected() {
        assert!(SubsetMask::from_indices(3, [3]).is_err());
        assert!(SubsetMask::from_bits(3, 0b1000).is_err());
        assert!(SubsetMask::from_indices(65, [0]).is_err());
    }

    #[test]
    fn family_rejects_duplicates() {
        let a = m(3, &[1]);
        assert!(SetFamily::from_sets(3, [a, a]).is_err());
        let f = SetFamily::from_sets_dedup(3, [a, a, m(3, &[2])]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.members()[0], a);
    }

    #[test]
    fn weights() {
        let w = WeightVector::from_signs(&[1, -1, 1]).unwrap();
        assert_eq!(w.weight(&m(3, &[0, 1, 2])), 1);
        assert_eq!(w.weight(&m(3, &[1])), -1);
        assert!(WeightVector::from_signs(&[1, 0]).is_err());
    }

    #[test]
    fn full_width_universe() {
        let full = SubsetMask::full(64);
        assert_eq!(full.len(), 64);
        assert!(full.complement().is_empty());
        assert_eq!(full.distance(&SubsetMask::empty(64)), 64);
    }

    #[test]
    fn ground_set_names() {
        let g = GroundSet::with_names(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(g.size(), 2);
        assert_eq!(g.name(1), Some("b"));
        assert!(GroundSet::new(0).is_err());
    }
}
