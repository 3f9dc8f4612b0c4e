//! Interval extension of a network, evaluated layer by layer.
//!
//! For a layer `φ(W x + θ)` and input box `[x]`, output neuron `i` gets
//!
//! ```text
//! lo_i = φ( Σ_j (w_ij ≥ 0 ? w_ij·lo_j : w_ij·hi_j) + θ_i )
//! hi_i = φ( Σ_j (w_ij ≥ 0 ? w_ij·hi_j : w_ij·lo_j) + θ_i )
//! ```
//!
//! which is the exact image hull of the affine part, pushed through the
//! monotone activation endpoint-wise. Composing the layer maps gives an
//! inclusion-monotone enclosure of the network image.

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::model::{Layer, Network};
use crate::scalar::Scalar;

/// Global width-growth constant `γ = ξ^L · ∏ ‖W_ℓ‖_∞` for a network.
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzBound<T> {
    pub gamma: T,
    /// Activation constant used for every layer: the maximum over layers.
    pub xi: T,
    pub per_layer_norms: Vec<T>,
}

fn check_input<T: Scalar>(expected: usize, b: &IntervalBox<T>, context: &'static str) -> Result<()> {
    if b.dim() != expected {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found: b.dim(),
        });
    }
    if !b.is_finite() {
        return Err(Error::NonFinite(context));
    }
    Ok(())
}

fn layer_image<T: Scalar>(layer: &Layer<T>, input: &[Interval<T>]) -> IntervalBox<T> {
    let act = layer.activation();
    let dims = layer
        .rows()
        .zip(layer.bias())
        .map(|(row, &theta)| {
            let (lo, hi) = row.iter().zip(input).fold(
                (T::zero(), T::zero()),
                |(lo, hi), (&w, x)| {
                    if w >= T::zero() {
                        (lo + w * x.lo(), hi + w * x.hi())
                    } else {
                        (lo + w * x.hi(), hi + w * x.lo())
                    }
                },
            );
            Interval::new_unchecked(act.eval(lo + theta), act.eval(hi + theta))
        })
        .collect();
    IntervalBox::from_dims_unchecked(dims)
}

/// Interval extension of a single layer.
pub fn layer_interval<T: Scalar>(layer: &Layer<T>, input: &IntervalBox<T>) -> Result<IntervalBox<T>> {
    check_input(layer.inputs(), input, "layer input box")?;
    Ok(layer_image(layer, input.dims()))
}

/// Interval extension of the whole network; encloses `net.eval(x)` for every
/// `x` in `input`.
pub fn network_interval<T: Scalar>(net: &Network<T>, input: &IntervalBox<T>) -> Result<IntervalBox<T>> {
    check_input(net.input_dim(), input, "network input box")?;
    let mut cur = layer_image(&net.layers()[0], input.dims());
    for layer in &net.layers()[1..] {
        cur = layer_image(layer, cur.dims());
    }
    Ok(cur)
}

pub fn lipschitz_gamma<T: Scalar>(net: &Network<T>) -> LipschitzBound<T> {
    let xi = net
        .layers()
        .iter()
        .map(|l| l.activation().lipschitz_xi())
        .fold(0.0f64, f64::max);
    let xi = T::lit(xi);
    let per_layer_norms: Vec<T> = net.layers().iter().map(Layer::inf_norm).collect();
    let gamma = per_layer_norms
        .iter()
        .fold(T::one(), |acc, &n| acc * n * xi);
    LipschitzBound {
        gamma,
        xi,
        per_layer_norms,
    }
}

/// Upper bound `γ · w([x])` on the excess width of the network enclosure.
pub fn excess_width_bound<T: Scalar>(net: &Network<T>, input: &IntervalBox<T>) -> Result<T> {
    check_input(net.input_dim(), input, "network input box")?;
    Ok(lipschitz_gamma(net).gamma * input.width())
}
