//! Closed real intervals and axis-aligned interval vectors (boxes).
//!
//! Endpoints use the ambient round-to-nearest mode of the scalar type. No
//! outward rounding is performed, so enclosures are exact in real arithmetic
//! and accurate to a few ulps in floating point.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A closed interval `[lo, hi]` with `lo <= hi`.
///
/// Infinite endpoints are representable so that unsafe regions can describe
/// half-lines such as `[1, inf)`. Boxes handed to propagation must be finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInterval {
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    pub fn point(x: T) -> Self {
        Self { lo: x, hi: x }
    }

    /// Builds `[min(a, b), max(a, b)]` without validation of order.
    pub fn hull_of(a: T, b: T) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    /// Caller guarantees `lo <= hi` and neither is NaN.
    pub(crate) fn new_unchecked(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> T {
        self.lo + (self.hi - self.lo) * T::lit(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Closed-endpoint overlap test: touching intervals intersect.
    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Smallest interval containing both.
    pub fn join(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Axis-aligned box: the Cartesian product of one interval per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBox<T> {
    dims: Vec<Interval<T>>,
}

impl<T: Scalar> IntervalBox<T> {
    pub fn new(dims: Vec<Interval<T>>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Empty("box"));
        }
        Ok(Self { dims })
    }

    /// Builds a box from `(lo, hi)` pairs, validating each.
    pub fn from_bounds(bounds: &[(T, T)]) -> Result<Self> {
        let dims = bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    /// The degenerate box `[x, x]`.
    pub fn point(x: &[T]) -> Result<Self> {
        Self::new(x.iter().copied().map(Interval::point).collect())
    }

    pub(crate) fn from_dims_unchecked(dims: Vec<Interval<T>>) -> Self {
        debug_assert!(!dims.is_empty());
        Self { dims }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dims(&self) -> &[Interval<T>] {
        &self.dims
    }

    pub fn get(&self, i: usize) -> Interval<T> {
        self.dims[i]
    }

    pub fn lower(&self) -> Vec<T> {
        self.dims.iter().map(Interval::lo).collect()
    }

    pub fn upper(&self) -> Vec<T> {
        self.dims.iter().map(Interval::hi).collect()
    }

    pub fn center(&self) -> Vec<T> {
        self.dims.iter().map(Interval::midpoint).collect()
    }

    pub fn widths(&self) -> Vec<T> {
        self.dims.iter().map(Interval::width).collect()
    }

    /// Largest component width.
    pub fn width(&self) -> T {
        self.dims
            .iter()
            .map(Interval::width)
            .fold(T::zero(), |acc, w| acc.max(w))
    }

    pub fn is_finite(&self) -> bool {
        self.dims.iter().all(Interval::is_finite)
    }

    pub fn is_degenerate(&self) -> bool {
        self.dims.iter().all(Interval::is_degenerate)
    }

    pub fn contains_point(&self, x: &[T]) -> bool {
        x.len() == self.dim() && self.dims.iter().zip(x).all(|(iv, &v)| iv.contains(v))
    }

    /// `self ⊆ other`, componentwise.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .dims
                .iter()
                .zip(&other.dims)
                .all(|(a, b)| a.is_subset_of(b))
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .dims
                .iter()
                .zip(&other.dims)
                .all(|(a, b)| a.intersects(b))
    }

    /// Componentwise hull of two boxes of equal dimension.
    pub fn join(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "join of boxes with different dimension");
        Self {
            dims: self
                .dims
                .iter()
                .zip(&other.dims)
                .map(|(a, b)| a.join(b))
                .collect(),
        }
    }

    /// Index of the dimension `bisect` splits: the widest, lowest index on ties.
    pub fn split_dimension(&self) -> usize {
        let mut best = 0;
        let mut best_w = self.dims[0].width();
        for (i, iv) in self.dims.iter().enumerate().skip(1) {
            if iv.width() > best_w {
                best = i;
                best_w = iv.width();
            }
        }
        best
    }

    /// Splits the widest component at its midpoint.
    pub fn bisect(&self) -> Result<(Self, Self)> {
        if !(self.width() > T::zero()) {
            return Err(Error::DegenerateBox);
        }
        let k = self.split_dimension();
        let iv = self.dims[k];
        let mid = iv.midpoint();
        let mut left = self.dims.clone();
        let mut right = self.dims.clone();
        left[k] = Interval::new_unchecked(iv.lo, mid);
        right[k] = Interval::new_unchecked(mid, iv.hi);
        Ok((Self { dims: left }, Self { dims: right }))
    }

    pub fn cast<U: Scalar>(&self) -> IntervalBox<U> {
        IntervalBox {
            dims: self
                .dims
                .iter()
                .map(|iv| Interval {
                    lo: U::lit(iv.lo.to_f64_lossy()),
                    hi: U::lit(iv.hi.to_f64_lossy()),
                })
                .collect(),
        }
    }
}

impl<T: Scalar> fmt::Display for IntervalBox<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.dims.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}
