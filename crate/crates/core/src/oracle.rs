//! Brute-force reference computations: grid and random sampling through the
//! pointwise forward pass. These only ever call `Network::eval`, never the
//! interval code, so they can check it independently.
//!
//! Random draws come from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! A uniform variate in `[0, 1)` is `(next_u64() >> 11) · 2^-53`, and a point
//! in a box is `lo + u · (hi − lo)` per dimension in ascending order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::model::Network;
use crate::region::UnsafeRegion;
use crate::scalar::Scalar;

/// Largest grid `grid_sample_hull` will evaluate.
pub const MAX_GRID_POINTS: f64 = 1e7;

/// Seeded uniform sampler with a fixed, documented bit-to-float mapping.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.unit() * (hi - lo)
    }

    pub fn index(&mut self, n: usize) -> usize {
        ((self.unit() * n as f64) as usize).min(n - 1)
    }

    pub fn point_in<T: Scalar>(&mut self, b: &IntervalBox<T>) -> Vec<T> {
        b.dims()
            .iter()
            .map(|iv| iv.lo() + T::lit(self.unit()) * iv.width())
            .collect()
    }
}

/// Componentwise hull of sampled outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleHull<T> {
    pub hull: IntervalBox<T>,
    pub samples: usize,
}

/// Evaluates the network on a `per_dim^n` grid over `b` (which includes every
/// vertex) and returns the hull of the outputs.
pub fn grid_sample_hull<T: Scalar>(
    net: &Network<T>,
    b: &IntervalBox<T>,
    per_dim: usize,
) -> Result<SampleHull<T>> {
    if per_dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points per dimension, got {per_dim}"
        )));
    }
    if b.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "sampled box",
            expected: net.input_dim(),
            found: b.dim(),
        });
    }
    if !b.is_finite() {
        return Err(Error::NonFinite("sampled box"));
    }
    let points = (per_dim as f64).powi(b.dim() as i32);
    if points > MAX_GRID_POINTS {
        return Err(Error::GridTooLarge {
            points,
            limit: MAX_GRID_POINTS,
        });
    }
    let total = points as usize;
    let last = T::lit((per_dim - 1) as f64);
    let mut x = vec![T::zero(); b.dim()];
    let mut lo: Option<Vec<T>> = None;
    let mut hi: Vec<T> = Vec::new();
    for mut idx in 0..total {
        for (xi, iv) in x.iter_mut().zip(b.dims()) {
            let j = idx % per_dim;
            idx /= per_dim;
            *xi = if j == per_dim - 1 {
                iv.hi()
            } else {
                iv.lo() + iv.width() * T::lit(j as f64) / last
            };
        }
        let y = net.eval(&x)?;
        match lo.as_mut() {
            None => {
                hi = y.clone();
                lo = Some(y);
            }
            Some(lo) => {
                for ((l, h), v) in lo.iter_mut().zip(hi.iter_mut()).zip(&y) {
                    *l = l.min(*v);
                    *h = h.max(*v);
                }
            }
        }
    }
    let lo = lo.expect("grid has at least one point");
    let hull = IntervalBox::new(
        lo.into_iter()
            .zip(hi)
            .map(|(l, h)| Interval::hull_of(l, h))
            .collect(),
    )?;
    Ok(SampleHull {
        hull,
        samples: total,
    })
}

/// Draws `n` seeded uniform points in `b` and counts those whose output lies
/// in `region`.
pub fn random_sample_unsafe_hits<T: Scalar>(
    net: &Network<T>,
    b: &IntervalBox<T>,
    region: &UnsafeRegion<T>,
    n: usize,
    seed: u64,
) -> Result<usize> {
    if b.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch {
            context: "sampled box",
            expected: net.input_dim(),
            found: b.dim(),
        });
    }
    region.check_dim(net.output_dim())?;
    let mut sampler = Sampler::new(seed);
    let mut hits = 0;
    for _ in 0..n {
        let x = sampler.point_in(b);
        if region.contains_point(&net.eval(&x)?) {
            hits += 1;
        }
    }
    Ok(hits)
}
