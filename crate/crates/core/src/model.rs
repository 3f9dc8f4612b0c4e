//! Feedforward network model: layers `y = φ(W x + θ)` composed in order.
//!
//! Models are exchanged as JSON:
//!
//! ```json
//! {"layers": [{"weights": [[1.0, -1.0]], "bias": [0.0], "activation": "relu"}]}
//! ```
//!
//! Dimensions are inferred from the arrays. Unknown keys inside a layer object
//! are rejected, as are non-finite numbers.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Monotone nondecreasing activation functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
    Linear,
}

impl Activation {
    pub const ALL: [Activation; 4] = [
        Activation::Relu,
        Activation::Sigmoid,
        Activation::Tanh,
        Activation::Linear,
    ];

    #[inline]
    pub fn eval<T: Scalar>(self, z: T) -> T {
        match self {
            Activation::Relu => z.max(T::zero()),
            Activation::Sigmoid => T::one() / (T::one() + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    /// Global Lipschitz constant of the activation (sup of |φ'|).
    pub fn lipschitz_xi(self) -> f64 {
        match self {
            Activation::Sigmoid => 0.25,
            Activation::Relu | Activation::Tanh | Activation::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Linear => "linear",
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::UnknownActivation(other.to_string())),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One dense layer. Weights are stored row-major, one row per output neuron.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T> {
    weights: Vec<T>,
    outputs: usize,
    inputs: usize,
    bias: Vec<T>,
    activation: Activation,
}

impl<T: Scalar> Layer<T> {
    pub fn new(rows: Vec<Vec<T>>, bias: Vec<T>, activation: Activation) -> Result<Self> {
        let outputs = rows.len();
        if outputs == 0 {
            return Err(Error::Empty("weight matrix"));
        }
        let inputs = rows[0].len();
        if inputs == 0 {
            return Err(Error::Empty("weight row"));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != inputs) {
            return Err(Error::DimensionMismatch {
                context: "weight row length",
                expected: inputs,
                found: bad.len(),
            });
        }
        if bias.len() != outputs {
            return Err(Error::DimensionMismatch {
                context: "bias length",
                expected: outputs,
                found: bias.len(),
            });
        }
        let weights: Vec<T> = rows.into_iter().flatten().collect();
        if !weights.iter().chain(&bias).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("layer parameters"));
        }
        Ok(Self {
            weights,
            outputs,
            inputs,
            bias,
            activation,
        })
    }

    #[inline]
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn activation(&self) -> Activation {
        self.activation
    }

    #[inline]
    pub fn bias(&self) -> &[T] {
        &self.bias
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.weights[i * self.inputs..(i + 1) * self.inputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.weights.chunks_exact(self.inputs)
    }

    /// Induced ∞-norm: maximum absolute row sum.
    pub fn inf_norm(&self) -> T {
        self.rows()
            .map(|r| r.iter().fold(T::zero(), |acc, w| acc + w.abs()))
            .fold(T::zero(), |acc, s| acc.max(s))
    }

    /// `φ(W x + θ)`; sums run in ascending input index.
    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.inputs {
            return Err(Error::DimensionMismatch {
                context: "layer input",
                expected: self.inputs,
                found: x.len(),
            });
        }
        Ok(self
            .rows()
            .zip(&self.bias)
            .map(|(row, &b)| {
                let dot = row
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&w, &xj)| acc + w * xj);
                self.activation.eval(dot + b)
            })
            .collect())
    }

    pub fn cast<U: Scalar>(&self) -> Layer<U> {
        let conv = |v: &T| U::lit(v.to_f64_lossy());
        Layer {
            weights: self.weights.iter().map(conv).collect(),
            outputs: self.outputs,
            inputs: self.inputs,
            bias: self.bias.iter().map(conv).collect(),
            activation: self.activation,
        }
    }
}

/// A feedforward network `Φ = φ_L ∘ … ∘ φ_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    layers: Vec<Layer<T>>,
}

impl<T: Scalar> Network<T> {
    pub fn new(layers: Vec<Layer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Empty("network"));
        }
        for pair in layers.windows(2) {
            if pair[1].inputs() != pair[0].outputs() {
                return Err(Error::DimensionMismatch {
                    context: "layer chaining",
                    expected: pair[0].outputs(),
                    found: pair[1].inputs(),
                });
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    /// Pointwise forward pass.
    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        let mut cur = x.to_vec();
        for layer in &self.layers {
            cur = layer.eval(&cur)?;
        }
        Ok(cur)
    }

    pub fn cast<U: Scalar>(&self) -> Network<U> {
        Network {
            layers: self.layers.iter().map(Layer::cast).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: String,
}

impl Network<f64> {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        let layers = file
            .layers
            .into_iter()
            .map(|l| {
                let act = l.activation.parse()?;
                Layer::new(l.weights, l.bias, act)
            })
            .collect::<Result<Vec<_>>>()?;
        Network::new(layers)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            layers: self
                .layers
                .iter()
                .map(|l| LayerFile {
                    weights: l.rows().map(<[f64]>::to_vec).collect(),
                    bias: l.bias.clone(),
                    activation: l.activation.name().to_string(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization")
    }
}

/// Reads and validates a JSON model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<Network<f64>> {
    let text = std::fs::read_to_string(path)?;
    Network::from_json(&text)
}
