//! Problem generators: seeded random networks, the two-link arm, and
//! input-perturbation boxes for classifier robustness.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::model::{Activation, Layer, Network};
use crate::oracle::Sampler;
use crate::region::UnsafeRegion;
use crate::spec_file::SafetySpec;

/// Dense network with weights and biases drawn uniformly from `[-scale, scale]`.
///
/// `sizes` lists every layer width including input and output; `activations`
/// has one entry per layer. Parameters are drawn row by row, weights before
/// bias, layer by layer.
pub fn random_network(
    sizes: &[usize],
    activations: &[Activation],
    scale: f64,
    sampler: &mut Sampler,
) -> Result<Network<f64>> {
    if sizes.len() < 2 || activations.len() != sizes.len() - 1 {
        return Err(Error::InvalidArgument(format!(
            "{} layer sizes need {} activations, got {}",
            sizes.len(),
            sizes.len().saturating_sub(1),
            activations.len()
        )));
    }
    let layers = sizes
        .windows(2)
        .zip(activations)
        .map(|(io, &act)| {
            let rows = (0..io[1])
                .map(|_| (0..io[0]).map(|_| sampler.uniform(-scale, scale)).collect())
                .collect();
            let bias = (0..io[1]).map(|_| sampler.uniform(-scale, scale)).collect();
            Layer::new(rows, bias, act)
        })
        .collect::<Result<Vec<_>>>()?;
    Network::new(layers)
}

/// Layer widths of the two-input benchmark: five hidden layers of ten units.
pub const BENCH_SIZES: [usize; 7] = [2, 10, 10, 10, 10, 10, 2];

/// Seed of the frozen benchmark network used by the acceptance suite and
/// `gen-random` defaults.
pub const BENCH_SEED: u64 = 19;

/// Half-width of the uniform weight and bias distribution for the benchmark.
pub const BENCH_WEIGHT_SCALE: f64 = 2.0;

/// Sigmoid hidden layers with a linear read-out, so the two outputs are not
/// confined to `(0, 1)` and the quadrant `[1, ∞)²` is a meaningful target.
pub fn bench_network(seed: u64) -> Network<f64> {
    let mut acts = vec![Activation::Sigmoid; BENCH_SIZES.len() - 2];
    acts.push(Activation::Linear);
    random_network(&BENCH_SIZES, &acts, BENCH_WEIGHT_SCALE, &mut Sampler::new(seed)).expect("static shape")
}

/// Input `[-5, 5]²`, unsafe `[1, ∞)²`, tolerance 0.01.
pub fn bench_spec() -> SafetySpec {
    SafetySpec {
        input: IntervalBox::from_bounds(&[(-5.0, 5.0), (-5.0, 5.0)]).expect("static box"),
        unsafe_region: UnsafeRegion::from_boxes(vec![IntervalBox::from_bounds(&[
            (1.0, f64::INFINITY),
            (1.0, f64::INFINITY),
        ])
        .expect("static box")])
        .expect("static region"),
        epsilon: 0.01,
    }
}

/// Planar two-link arm geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    pub l1: f64,
    pub l2: f64,
}

impl Default for Arm {
    fn default() -> Self {
        Self { l1: 10.0, l2: 10.0 }
    }
}

impl Arm {
    pub fn new(l1: f64, l2: f64) -> Result<Self> {
        if !(l1 > 0.0 && l2 > 0.0 && l1.is_finite() && l2.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "link lengths must be positive, got {l1} and {l2}"
            )));
        }
        Ok(Self { l1, l2 })
    }

    /// End-effector position for joint angles `(θ1, θ2)`.
    pub fn forward(&self, theta1: f64, theta2: f64) -> (f64, f64) {
        let x = self.l1 * theta1.cos() + self.l2 * (theta1 + theta2).cos();
        let y = self.l1 * theta1.sin() + self.l2 * (theta1 + theta2).sin();
        (x, y)
    }

    /// `(θ1, θ2, x, y)` on a `grid × grid` lattice over `angles`.
    pub fn dataset(&self, angles: &IntervalBox<f64>, grid: usize) -> Vec<[f64; 4]> {
        let steps = grid.max(2);
        let at = |iv: Interval<f64>, k: usize| iv.lo() + iv.width() * k as f64 / (steps - 1) as f64;
        let mut rows = Vec::with_capacity(steps * steps);
        for i in 0..steps {
            for j in 0..steps {
                let t1 = at(angles.get(0), i);
                let t2 = at(angles.get(1), j);
                let (x, y) = self.forward(t1, t2);
                rows.push([t1, t2, x, y]);
            }
        }
        rows
    }
}

/// Joint-angle input set `[π/3, 2π/3]²`.
pub fn arm_input_box() -> IntervalBox<f64> {
    IntervalBox::from_bounds(&[(PI / 3.0, 2.0 * PI / 3.0), (PI / 3.0, 2.0 * PI / 3.0)])
        .expect("static box")
}

/// Complement of the safe set `-14 ≤ x ≤ 3, 1 ≤ y ≤ 17` as four unbounded
/// boxes. Boundary points count as unsafe.
pub fn arm_unsafe_region() -> UnsafeRegion<f64> {
    const INF: f64 = f64::INFINITY;
    let b = |x: (f64, f64), y: (f64, f64)| IntervalBox::from_bounds(&[x, y]).expect("static box");
    UnsafeRegion::from_boxes(vec![
        b((-INF, -14.0), (-INF, INF)),
        b((3.0, INF), (-INF, INF)),
        b((-INF, INF), (-INF, 1.0)),
        b((-INF, INF), (17.0, INF)),
    ])
    .expect("static region")
}

pub fn arm_spec(epsilon: f64) -> SafetySpec {
    SafetySpec {
        input: arm_input_box(),
        unsafe_region: arm_unsafe_region(),
        epsilon,
    }
}

/// Box around `point` widened by `±delta` on the `window` indices and
/// degenerate elsewhere.
pub fn perturbation_box(point: &[f64], window: &[usize], delta: f64) -> Result<IntervalBox<f64>> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("delta must be nonnegative, got {delta}")));
    }
    if !point.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("image"));
    }
    let mut dims: Vec<Interval<f64>> = point.iter().copied().map(Interval::point).collect();
    for &i in window {
        let Some(&v) = point.get(i) else {
            return Err(Error::InvalidArgument(format!(
                "window index {i} out of range for {} inputs",
                point.len()
            )));
        };
        dims[i] = Interval::new(v - delta, v + delta)?;
    }
    IntervalBox::new(dims)
}
