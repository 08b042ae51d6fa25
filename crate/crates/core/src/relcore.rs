//! Binary relations on a finite universe `{0, .., n-1}`.
//!
//! A [`BinRel`] is stored as `n` row bitsets: bit `b` of row `a` is set iff the
//! ordered pair `(a, b)` belongs to the relation. Composition chains witnesses
//! left to right, so `(a, b) ∈ R ∘ S` iff some `c` has `(a, c) ∈ R` and
//! `(c, b) ∈ S`. With this orientation `R ∘ R⁻` relates `a` and `b` exactly when
//! they share an `R`-successor.

use std::fmt;

use thiserror::Error;

/// Largest supported universe; one row fits in a machine word.
pub const MAX_UNIVERSE: usize = 64;

/// An element of the universe.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("universe size must be positive")]
    EmptyUniverse,
    #[error("universe size {0} exceeds the supported maximum of {MAX_UNIVERSE}")]
    TooLarge(usize),
    #[error("relations live on universes of different sizes ({left} vs {right})")]
    Dimension { left: usize, right: usize },
    #[error("element {elem} out of range for universe of size {n}")]
    OutOfRange { elem: Elem, n: usize },
}

/// The reflexive/symmetric/transitive profile of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub reflexive: bool,
    pub symmetric: bool,
    pub transitive: bool,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinRel {
    n: usize,
    rows: Vec<u64>,
}

fn check_size(n: usize) -> Result<(), RelError> {
    match n {
        0 => Err(RelError::EmptyUniverse),
        n if n > MAX_UNIVERSE => Err(RelError::TooLarge(n)),
        _ => Ok(()),
    }
}

#[inline]
fn row_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl BinRel {
    /// The empty relation.
    pub fn empty(n: usize) -> Result<Self, RelError> {
        check_size(n)?;
        Ok(BinRel { n, rows: vec![0; n] })
    }

    /// The diagonal `Δ`.
    pub fn diagonal(n: usize) -> Result<Self, RelError> {
        let mut r = Self::empty(n)?;
        for a in 0..n {
            r.rows[a] = 1 << a;
        }
        Ok(r)
    }

    /// The full relation `A × A`.
    pub fn full(n: usize) -> Result<Self, RelError> {
        check_size(n)?;
        Ok(BinRel {
            n,
            rows: vec![row_mask(n); n],
        })
    }

    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = (Elem, Elem)>,
    {
        let mut r = Self::empty(n)?;
        for (a, b) in pairs {
            r.try_insert(a, b)?;
        }
        Ok(r)
    }

    /// Builds a relation from raw row bitsets. Bits at or above `rows.len()` are
    /// rejected.
    pub fn from_rows(rows: Vec<u64>) -> Result<Self, RelError> {
        let n = rows.len();
        check_size(n)?;
        let mask = row_mask(n);
        for &row in &rows {
            if row & !mask != 0 {
                let elem = (row & !mask).trailing_zeros() as usize;
                return Err(RelError::OutOfRange { elem, n });
            }
        }
        Ok(BinRel { n, rows })
    }

    /// Diagonal plus the given pairs.
    pub fn reflexive_from_pairs<I>(n: usize, pairs: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = (Elem, Elem)>,
    {
        let mut r = Self::diagonal(n)?;
        for (a, b) in pairs {
            r.try_insert(a, b)?;
        }
        Ok(r)
    }

    /// Diagonal plus the given pairs in both orientations.
    pub fn symmetric_from_pairs<I>(n: usize, pairs: I) -> Result<Self, RelError>
    where
        I: IntoIterator<Item = (Elem, Elem)>,
    {
        let mut r = Self::diagonal(n)?;
        for (a, b) in pairs {
            r.try_insert(a, b)?;
            r.insert(b, a);
        }
        Ok(r)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    /// Row `a` as a bitset of the `b` with `(a, b)` in the relation.
    #[inline]
    pub fn row(&self, a: Elem) -> u64 {
        self.rows[a]
    }

    /// Membership test. Panics if an index is out of range.
    #[inline]
    pub fn contains(&self, a: Elem, b: Elem) -> bool {
        assert!(b < self.n, "element {b} out of range");
        self.rows[a] >> b & 1 == 1
    }

    /// Inserts a pair, returning whether it was new. Panics on out-of-range
    /// indices; use [`BinRel::try_insert`] for checked insertion.
    #[inline]
    pub fn insert(&mut self, a: Elem, b: Elem) -> bool {
        assert!(b < self.n, "element {b} out of range");
        let bit = 1u64 << b;
        let fresh = self.rows[a] & bit == 0;
        self.rows[a] |= bit;
        fresh
    }

    pub fn try_insert(&mut self, a: Elem, b: Elem) -> Result<bool, RelError> {
        for elem in [a, b] {
            if elem >= self.n {
                return Err(RelError::OutOfRange { elem, n: self.n });
            }
        }
        Ok(self.insert(a, b))
    }

    pub fn remove(&mut self, a: Elem, b: Elem) -> bool {
        let bit = 1u64 << b;
        let present = self.rows[a] & bit != 0;
        self.rows[a] &= !bit;
        present
    }

    /// Number of pairs.
    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Pairs in ascending row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, &row)| bits(row).map(move |b| (a, b)))
    }

    /// Pairs `(a, b)` with `a != b`.
    pub fn off_diagonal(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.pairs().filter(|(a, b)| a != b)
    }

    fn same_size(&self, other: &BinRel) -> Result<(), RelError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(RelError::Dimension {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn compose(&self, other: &BinRel) -> Result<BinRel, RelError> {
        self.same_size(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &BinRel) -> BinRel {
        let rows = self
            .rows
            .iter()
            .map(|&row| bits(row).fold(0, |acc, c| acc | other.rows[c]))
            .collect();
        BinRel { n: self.n, rows }
    }

    /// `R ∘ R⁻`: pairs of elements with a common `R`-successor.
    pub fn compose_converse(&self) -> BinRel {
        let mut out = BinRel {
            n: self.n,
            rows: vec![0; self.n],
        };
        for a in 0..self.n {
            for b in a..self.n {
                if self.rows[a] & self.rows[b] != 0 {
                    out.rows[a] |= 1 << b;
                    out.rows[b] |= 1 << a;
                }
            }
        }
        out
    }

    pub fn converse(&self) -> BinRel {
        let mut out = BinRel {
            n: self.n,
            rows: vec![0; self.n],
        };
        for (a, b) in self.pairs() {
            out.rows[b] |= 1 << a;
        }
        out
    }

    pub fn intersect(&self, other: &BinRel) -> Result<BinRel, RelError> {
        self.same_size(other)?;
        Ok(self.zip_rows(other, |x, y| x & y))
    }

    pub fn union(&self, other: &BinRel) -> Result<BinRel, RelError> {
        self.same_size(other)?;
        Ok(self.zip_rows(other, |x, y| x | y))
    }

    fn zip_rows(&self, other: &BinRel, f: impl Fn(u64, u64) -> u64) -> BinRel {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(&x, &y)| f(x, y))
            .collect();
        BinRel { n: self.n, rows }
    }

    /// Subset test; relations of different sizes are never comparable.
    pub fn is_subset(&self, other: &BinRel) -> bool {
        self.n == other.n
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(&x, &y)| x & !y == 0)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.rows[a] >> a & 1 == 1)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.converse()
    }

    pub fn is_transitive(&self) -> bool {
        self.compose_unchecked(self).is_subset(self)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|a| self.rows[a] == 1 << a)
    }

    pub fn is_full(&self) -> bool {
        self.rows.iter().all(|&r| r == row_mask(self.n))
    }

    pub fn classify_shape(&self) -> Shape {
        Shape {
            reflexive: self.is_reflexive(),
            symmetric: self.is_symmetric(),
            transitive: self.is_transitive(),
        }
    }

    /// Complement within `A × A`.
    pub fn complement(&self) -> BinRel {
        let mask = row_mask(self.n);
        let rows = self.rows.iter().map(|&r| !r & mask).collect();
        BinRel { n: self.n, rows }
    }
}

/// Iterates the set bits of a row in ascending order.
pub(crate) fn bits(mut row: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if row == 0 {
            None
        } else {
            let b = row.trailing_zeros() as usize;
            row &= row - 1;
            Some(b)
        }
    })
}

impl fmt::Debug for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinRel(n={}, {{", self.n)?;
        for (i, (a, b)) in self.off_diagonal().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}{b}")?;
        }
        f.write_str("}")?;
        let missing: Vec<_> = (0..self.n).filter(|&a| !self.contains(a, a)).collect();
        if !missing.is_empty() {
            write!(f, " without diagonal at {missing:?}")?;
        }
        f.write_str(")")
    }
}

/// Displays the matrix as `n` lines of `0`/`1`.
impl fmt::Display for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in 0..self.n {
            for b in 0..self.n {
                f.write_str(if self.contains(a, b) { "1" } else { "0" })?;
            }
            if a + 1 < self.n {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(n: usize, pairs: &[(usize, usize)]) -> BinRel {
        BinRel::reflexive_from_pairs(n, pairs.iter().copied()).unwrap()
    }

    /// Composition straight from the definition.
    fn compose_oracle(r: &BinRel, s: &BinRel) -> BinRel {
        let n = r.n();
        let mut out = BinRel::empty(n).unwrap();
        for a in 0..n {
            for c in 0..n {
                for b in 0..n {
                    if r.contains(a, c) && s.contains(c, b) {
                        out.insert(a, b);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn diagonal_is_left_identity() {
        let r = rel(3, &[(0, 1), (2, 0)]);
        let d = BinRel::diagonal(3).unwrap();
        assert_eq!(d.compose(&r).unwrap(), r);
    }

    #[test]
    fn compose_chains_left_to_right() {
        let r = rel(3, &[(0, 1)]);
        let s = rel(3, &[(1, 2)]);
        assert_eq!(
            r.compose(&s).unwrap(),
            rel(3, &[(0, 1), (1, 2), (0, 2)])
        );
        assert_eq!(r.compose(&s).unwrap(), compose_oracle(&r, &s));
    }

    #[test]
    fn compose_with_converse_fills_two_points() {
        let r = rel(2, &[(0, 1)]);
        let rr = r.compose(&r.converse()).unwrap();
        assert!(rr.is_full());
        assert_eq!(rr, r.compose_converse());
    }

    #[test]
    fn dimension_mismatch() {
        let a = BinRel::diagonal(2).unwrap();
        let b = BinRel::diagonal(3).unwrap();
        assert_eq!(
            a.compose(&b),
            Err(RelError::Dimension { left: 2, right: 3 })
        );
        assert!(a.intersect(&b).is_err());
    }

    #[test]
    fn bad_sizes() {
        assert_eq!(BinRel::empty(0), Err(RelError::EmptyUniverse));
        assert_eq!(BinRel::empty(65), Err(RelError::TooLarge(65)));
        assert!(BinRel::full(64).unwrap().is_full());
        assert_eq!(
            BinRel::from_pairs(2, [(0, 2)]),
            Err(RelError::OutOfRange { elem: 2, n: 2 })
        );
        assert!(BinRel::from_rows(vec![0b100, 0]).is_err());
    }

    #[test]
    fn converse_examples() {
        let d = BinRel::diagonal(4).unwrap();
        assert_eq!(d.converse(), d);
        assert_eq!(rel(2, &[(0, 1)]).converse(), rel(2, &[(1, 0)]));
    }

    #[test]
    fn intersect_examples() {
        let r = rel(2, &[(0, 1)]);
        let full = BinRel::full(2).unwrap();
        assert_eq!(r.intersect(&r).unwrap(), r);
        assert_eq!(r.intersect(&full).unwrap(), r);
        assert_eq!(
            r.intersect(&rel(2, &[(1, 0)])).unwrap(),
            BinRel::diagonal(2).unwrap()
        );
    }

    #[test]
    fn shapes() {
        let all = Shape {
            reflexive: true,
            symmetric: true,
            transitive: true,
        };
        assert_eq!(BinRel::diagonal(3).unwrap().classify_shape(), all);
        assert_eq!(BinRel::full(3).unwrap().classify_shape(), all);
        let path = BinRel::symmetric_from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            path.classify_shape(),
            Shape {
                reflexive: true,
                symmetric: true,
                transitive: false
            }
        );
        assert!(!BinRel::empty(2).unwrap().is_reflexive());
    }

    fn arb_rel(n: usize) -> impl Strategy<Value = BinRel> {
        prop::collection::vec(any::<u64>(), n).prop_map(move |rows| {
            let mask = row_mask(n);
            BinRel::from_rows(rows.into_iter().map(|r| r & mask).collect()).unwrap()
        })
    }

    fn arb_triple() -> impl Strategy<Value = (BinRel, BinRel, BinRel)> {
        (1usize..=6).prop_flat_map(|n| (arb_rel(n), arb_rel(n), arb_rel(n)))
    }

    proptest! {
        #[test]
        fn composition_laws((r, s, t) in arb_triple()) {
            prop_assert_eq!(r.compose(&s).unwrap(), compose_oracle(&r, &s));
            prop_assert_eq!(r.converse().converse(), r.clone());
            prop_assert_eq!(
                r.compose(&s).unwrap().converse(),
                s.converse().compose(&r.converse()).unwrap()
            );
            prop_assert_eq!(
                r.compose(&s).unwrap().compose(&t).unwrap(),
                r.compose(&s.compose(&t).unwrap()).unwrap()
            );
            prop_assert_eq!(r.compose_converse(), r.compose(&r.converse()).unwrap());
        }

        #[test]
        fn composition_is_monotone((r, s, t) in arb_triple()) {
            let r2 = r.union(&t).unwrap();
            let s2 = s.union(&t).unwrap();
            prop_assert!(r.compose(&s).unwrap().is_subset(&r2.compose(&s2).unwrap()));
        }

        #[test]
        fn reflexive_sits_inside_r_rminus((r, _s, _t) in arb_triple()) {
            let r = r.union(&BinRel::diagonal(r.n()).unwrap()).unwrap();
            let rr = r.compose_converse();
            prop_assert!(r.is_subset(&rr));
            prop_assert!(r.converse().is_subset(&rr));
        }
    }
}
