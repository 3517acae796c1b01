//! Aerial vehicle positioning: georeferencing, frame registration,
//! rotated-box extraction, relief displacement correction and trajectory
//! benchmarking for nadir drone video.

// `!(x > 0.0)` is used deliberately in validations: it rejects NaN along
// with non-positive values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod error;
pub mod geo;
pub mod io;
pub mod pipeline;
pub mod registration;
pub mod relief;
pub mod shape;
pub mod synth;

pub use error::{Error, Result};
pub use geo::{FrameGeoreference, GroundControlPoint, LtpPoint, PcfPoint};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput, TrajectoryRecord};
pub use registration::{MlesacParams, SimilarityTransform};
pub use shape::{DetectionShape, RotatedBox, VehicleDims};
