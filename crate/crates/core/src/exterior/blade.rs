use core::fmt;

use crate::error::{Error, Result};

/// Largest supported frame dimension.
pub const MAX_DIM: usize = 31;

/// A strictly increasing index tuple `i₁ < … < i_k`, stored as a bit set.
///
/// Blades label the basis monomials `e^{i₁} ∧ … ∧ e^{i_k}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Blade(u32);

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    pub const fn from_bits(bits: u32) -> Self {
        Blade(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn single(i: usize) -> Self {
        debug_assert!(i < MAX_DIM);
        Blade(1 << i)
    }

    /// The blade with indices `0..dim`.
    pub fn full(dim: usize) -> Self {
        debug_assert!(dim <= MAX_DIM);
        Blade(((1u64 << dim) - 1) as u32)
    }

    /// Builds a blade from a strictly increasing tuple.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        let mut last: Option<usize> = None;
        for &i in indices {
            if i >= MAX_DIM || last.is_some_and(|l| i <= l) {
                return Err(Error::InvalidIndex);
            }
            bits |= 1 << i;
            last = Some(i);
        }
        Ok(Blade(bits))
    }

    /// Sorts an arbitrary tuple; returns the sign of the sorting permutation,
    /// or `None` when an index repeats (the monomial vanishes).
    pub fn from_unsorted(indices: &[usize]) -> Result<Option<(f64, Self)>> {
        let mut acc = (1.0, Blade::EMPTY);
        for &i in indices {
            if i >= MAX_DIM {
                return Err(Error::InvalidIndex);
            }
            match acc.1.wedge(Blade::single(i)) {
                Some((sign, b)) => acc = (acc.0 * sign, b),
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_DIM && self.0 & (1 << i) != 0
    }

    pub fn max_index(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(31 - self.0.leading_zeros() as usize)
        }
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// `self ∧ other` as `(sign, blade)`, or `None` if the index sets meet.
    pub fn wedge(self, other: Blade) -> Option<(f64, Blade)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // count pairs (i ∈ self, j ∈ other) with i > j
        let mut swaps = 0u32;
        for j in other.indices() {
            let above = !((2u64 << j) - 1) as u32;
            swaps += (self.0 & above).count_ones();
        }
        let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((sign, Blade(self.0 | other.0)))
    }

    /// Removes index `i`; the sign is `(−1)^p` where `p` is the position of
    /// `i` in the tuple, i.e. `e^I = sign · e^i ∧ e^{I∖i}`.
    pub fn remove(self, i: usize) -> Option<(f64, Blade)> {
        if !self.contains(i) {
            return None;
        }
        let below = (self.0 & ((1u32 << i) - 1)).count_ones();
        let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((sign, Blade(self.0 & !(1 << i))))
    }

    pub fn complement(self, dim: usize) -> Blade {
        Blade(Blade::full(dim).0 & !self.0)
    }

    /// All blades of the given grade in a `dim`-dimensional frame, in
    /// lexicographic order of their index tuples.
    pub fn all_of_grade(dim: usize, grade: usize) -> alloc::vec::Vec<Blade> {
        let mut out = alloc::vec::Vec::new();
        let mut current = alloc::vec::Vec::with_capacity(grade);
        fn rec(
            start: usize,
            dim: usize,
            grade: usize,
            current: &mut alloc::vec::Vec<usize>,
            out: &mut alloc::vec::Vec<Blade>,
        ) {
            if current.len() == grade {
                out.push(Blade::from_indices(current).expect("increasing"));
                return;
            }
            for i in start..dim {
                current.push(i);
                rec(i + 1, dim, grade, current, out);
                current.pop();
            }
        }
        if grade <= dim {
            rec(0, dim, grade, &mut current, &mut out);
        }
        out
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("e")?;
        f.debug_list().entries(self.indices()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        let e1 = Blade::single(1);
        let e2 = Blade::single(2);
        assert_eq!(e1.wedge(e2), Some((1.0, Blade::from_indices(&[1, 2]).unwrap())));
        assert_eq!(e2.wedge(e1), Some((-1.0, Blade::from_indices(&[1, 2]).unwrap())));
        assert_eq!(e1.wedge(e1), None);
        let a = Blade::from_indices(&[0, 3]).unwrap();
        let b = Blade::from_indices(&[1, 2]).unwrap();
        // (0,3,1,2) → two transpositions
        assert_eq!(a.wedge(b).unwrap().0, 1.0);
        let c = Blade::from_indices(&[2]).unwrap();
        // (0,3,2) → one transposition
        assert_eq!(a.wedge(c).unwrap().0, -1.0);
    }

    #[test]
    fn unsorted_tuples() {
        assert_eq!(Blade::from_unsorted(&[2, 1]).unwrap().unwrap().0, -1.0);
        assert_eq!(Blade::from_unsorted(&[2, 0, 1]).unwrap().unwrap().0, 1.0);
        assert!(Blade::from_unsorted(&[1, 1]).unwrap().is_none());
        assert!(Blade::from_indices(&[2, 1]).is_err());
    }

    #[test]
    fn remove_sign() {
        let b = Blade::from_indices(&[0, 2, 5]).unwrap();
        assert_eq!(b.remove(0).unwrap().0, 1.0);
        assert_eq!(b.remove(2).unwrap().0, -1.0);
        assert_eq!(b.remove(5).unwrap().0, 1.0);
        assert!(b.remove(1).is_none());
    }

    #[test]
    fn enumerates_grades() {
        assert_eq!(Blade::all_of_grade(6, 3).len(), 20);
        assert_eq!(Blade::all_of_grade(6, 0), alloc::vec![Blade::EMPTY]);
        assert!(Blade::all_of_grade(3, 4).is_empty());
    }
}
