//! Sound safety verification for feedforward networks with monotone
//! activations.
//!
//! An input box is pushed through the network with interval arithmetic to get
//! a guaranteed enclosure of every reachable output. [`verifier::verify`]
//! bisects only those input boxes whose enclosure still touches the unsafe
//! region, so refinement concentrates where the specification is tight.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The file
//! formats and the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod interval;
pub mod model;
pub mod oracle;
pub mod propagation;
pub mod region;
pub mod scalar;
pub mod scenario;
pub mod spec_file;
pub mod verifier;

pub use error::{Error, Result};
pub use interval::{Interval, IntervalBox};
pub use model::{load_model, Activation, Layer, Network};
pub use oracle::{grid_sample_hull, random_sample_unsafe_hits, SampleHull, Sampler};
pub use propagation::{
    excess_width_bound, layer_interval, lipschitz_gamma, network_interval, LipschitzBound,
};
pub use region::{robustness_region, HalfSpace, UnsafeRegion};
pub use scalar::Scalar;
pub use spec_file::{load_spec, SafetySpec};
pub use verifier::{
    depth_bound, verify, verify_uniform, verify_uniform_with, verify_with, CellStatus,
    PartitionCell, Stats, Status, Verdict, VerifyOptions, WorkItem,
};

pub type Interval64 = Interval<f64>;
pub type Box64 = IntervalBox<f64>;
pub type Network64 = Network<f64>;
pub type Layer64 = Layer<f64>;
pub type Region64 = UnsafeRegion<f64>;
pub type Verdict64 = Verdict<f64>;

pub type Interval32 = Interval<f32>;
pub type Box32 = IntervalBox<f32>;
pub type Network32 = Network<f32>;
