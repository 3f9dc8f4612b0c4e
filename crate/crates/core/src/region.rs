//! Unsafe output regions: finite unions of boxes and closed half-spaces.

use crate::error::{Error, Result};
use crate::interval::IntervalBox;
use crate::scalar::Scalar;

/// The closed half-space `{ y : a·y ≥ b }`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace<T> {
    a: Vec<T>,
    b: T,
}

impl<T: Scalar> HalfSpace<T> {
    pub fn new(a: Vec<T>, b: T) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Empty("half-space normal"));
        }
        if !a.iter().all(|v| v.is_finite()) || !b.is_finite() {
            return Err(Error::NonFinite("half-space"));
        }
        Ok(Self { a, b })
    }

    pub fn normal(&self) -> &[T] {
        &self.a
    }

    pub fn offset(&self) -> T {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `max_{y ∈ out} a·y`, attained at the vertex picked by the signs of `a`.
    pub fn max_over(&self, out: &IntervalBox<T>) -> T {
        self.a
            .iter()
            .zip(out.dims())
            .fold(T::zero(), |acc, (&ai, iv)| {
                if ai > T::zero() {
                    acc + ai * iv.hi()
                } else if ai < T::zero() {
                    acc + ai * iv.lo()
                } else {
                    acc
                }
            })
    }

    pub fn contains(&self, y: &[T]) -> bool {
        let dot = self
            .a
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (&ai, &yi)| acc + ai * yi);
        dot >= self.b
    }
}

/// Union of boxes (possibly unbounded) and half-spaces in output space.
///
/// An empty region is allowed and never intersects anything.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UnsafeRegion<T> {
    boxes: Vec<IntervalBox<T>>,
    halfspaces: Vec<HalfSpace<T>>,
}

impl<T: Scalar> UnsafeRegion<T> {
    pub fn empty() -> Self {
        Self {
            boxes: Vec::new(),
            halfspaces: Vec::new(),
        }
    }

    pub fn new(boxes: Vec<IntervalBox<T>>, halfspaces: Vec<HalfSpace<T>>) -> Result<Self> {
        let region = Self { boxes, halfspaces };
        if let Some(d) = region.member_dims().next() {
            region.check_dim(d)?;
        }
        Ok(region)
    }

    pub fn from_boxes(boxes: Vec<IntervalBox<T>>) -> Result<Self> {
        Self::new(boxes, Vec::new())
    }

    pub fn from_halfspaces(halfspaces: Vec<HalfSpace<T>>) -> Result<Self> {
        Self::new(Vec::new(), halfspaces)
    }

    pub fn boxes(&self) -> &[IntervalBox<T>] {
        &self.boxes
    }

    pub fn halfspaces(&self) -> &[HalfSpace<T>] {
        &self.halfspaces
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty() && self.halfspaces.is_empty()
    }

    fn member_dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.boxes
            .iter()
            .map(IntervalBox::dim)
            .chain(self.halfspaces.iter().map(HalfSpace::dim))
    }

    /// Every member must live in `dim`-dimensional output space.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.member_dims().find(|&d| d != dim) {
            Some(found) => Err(Error::DimensionMismatch {
                context: "unsafe region member",
                expected: dim,
                found,
            }),
            None => Ok(()),
        }
    }

    /// Exact overlap test with closed endpoints.
    pub fn intersects(&self, out: &IntervalBox<T>) -> Result<bool> {
        if !out.is_finite() {
            return Err(Error::NonFinite("output box"));
        }
        self.check_dim(out.dim())?;
        Ok(self.intersects_unchecked(out))
    }

    pub(crate) fn intersects_unchecked(&self, out: &IntervalBox<T>) -> bool {
        self.boxes.iter().any(|b| b.intersects(out))
            || self.halfspaces.iter().any(|h| h.max_over(out) >= h.offset())
    }

    /// Whether a concrete output lies in the region.
    pub fn contains_point(&self, y: &[T]) -> bool {
        self.boxes.iter().any(|b| b.contains_point(y))
            || self.halfspaces.iter().any(|h| y.len() == h.dim() && h.contains(y))
    }
}

/// Region where some class `k ≠ label` scores at least as high as `label`:
/// `⋃_{k≠label} { y : y_k − y_label ≥ 0 }`.
pub fn robustness_region<T: Scalar>(classes: usize, label: usize) -> Result<UnsafeRegion<T>> {
    if classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "robustness needs at least 2 classes, got {classes}"
        )));
    }
    if label >= classes {
        return Err(Error::LabelOutOfRange { label, classes });
    }
    let halfspaces = (0..classes)
        .filter(|&k| k != label)
        .map(|k| {
            let mut a = vec![T::zero(); classes];
            a[k] = T::one();
            a[label] = -T::one();
            HalfSpace::new(a, T::zero())
        })
        .collect::<Result<Vec<_>>>()?;
    UnsafeRegion::from_halfspaces(halfspaces)
}
