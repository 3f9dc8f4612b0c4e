//! JSON safety specification files.
//!
//! ```json
//! {
//!   "unsafe": {
//!     "boxes": [[[1, "inf"], [1, "inf"]]],
//!     "halfspaces": [{"a": [1, -1], "b": 0}]
//!   },
//!   "input": [[-5, 5], [-5, 5]],
//!   "epsilon": 0.01
//! }
//! ```
//!
//! `"inf"` / `"-inf"` are accepted as endpoints of unsafe boxes only.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};
use crate::region::{HalfSpace, UnsafeRegion};

#[derive(Clone, Debug, PartialEq)]
pub struct SafetySpec {
    pub input: IntervalBox<f64>,
    pub unsafe_region: UnsafeRegion<f64>,
    pub epsilon: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Num(f64),
    Word(String),
}

impl Endpoint {
    fn value(&self) -> Result<f64> {
        match self {
            Endpoint::Num(v) => Ok(*v),
            Endpoint::Word(w) if w == "inf" => Ok(f64::INFINITY),
            Endpoint::Word(w) if w == "-inf" => Ok(f64::NEG_INFINITY),
            Endpoint::Word(w) => Err(Error::Parse(format!("bad interval endpoint `{w}`"))),
        }
    }

    fn from_value(v: f64) -> Self {
        if v == f64::INFINITY {
            Endpoint::Word("inf".into())
        } else if v == f64::NEG_INFINITY {
            Endpoint::Word("-inf".into())
        } else {
            Endpoint::Num(v)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfSpaceFile {
    a: Vec<f64>,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionFile {
    #[serde(default)]
    boxes: Vec<Vec<[Endpoint; 2]>>,
    #[serde(default)]
    halfspaces: Vec<HalfSpaceFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(rename = "unsafe")]
    unsafe_region: RegionFile,
    input: Vec<[f64; 2]>,
    epsilon: f64,
}

impl SafetySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text)?;
        let boxes = file
            .unsafe_region
            .boxes
            .iter()
            .map(|b| {
                let dims = b
                    .iter()
                    .map(|[lo, hi]| Interval::new(lo.value()?, hi.value()?))
                    .collect::<Result<Vec<_>>>()?;
                IntervalBox::new(dims)
            })
            .collect::<Result<Vec<_>>>()?;
        let halfspaces = file
            .unsafe_region
            .halfspaces
            .into_iter()
            .map(|h| HalfSpace::new(h.a, h.b))
            .collect::<Result<Vec<_>>>()?;
        let unsafe_region = UnsafeRegion::new(boxes, halfspaces)?;
        let input = IntervalBox::from_bounds(
            &file.input.iter().map(|&[lo, hi]| (lo, hi)).collect::<Vec<_>>(),
        )?;
        if !(file.epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(file.epsilon));
        }
        Ok(Self {
            input,
            unsafe_region,
            epsilon: file.epsilon,
        })
    }

    pub fn to_json(&self) -> String {
        let file = SpecFile {
            unsafe_region: RegionFile {
                boxes: self
                    .unsafe_region
                    .boxes()
                    .iter()
                    .map(|b| {
                        b.dims()
                            .iter()
                            .map(|iv| [Endpoint::from_value(iv.lo()), Endpoint::from_value(iv.hi())])
                            .collect()
                    })
                    .collect(),
                halfspaces: self
                    .unsafe_region
                    .halfspaces()
                    .iter()
                    .map(|h| HalfSpaceFile {
                        a: h.normal().to_vec(),
                        b: h.offset(),
                    })
                    .collect(),
            },
            input: self.input.dims().iter().map(|iv| [iv.lo(), iv.hi()]).collect(),
            epsilon: self.epsilon,
        };
        serde_json::to_string_pretty(&file).expect("spec serialization")
    }
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<SafetySpec> {
    SafetySpec::from_json(&std::fs::read_to_string(path)?)
}
