//! Numerical differential geometry of immersed submanifolds of the model
//! spaces of constant curvature: Euclidean space, the round sphere, and
//! hyperbolic space in the hyperboloid model.
//!
//! The crate evaluates the fundamental tensors of a parametric immersion
//! (metric, second fundamental form, shape operators, mean curvature, normal
//! connection, intrinsic and normal curvature), tests structural identities
//! that constrain them, and classifies how the second fundamental form varies
//! (parallel, recurrent, or neither) over sample grids. A catalog of concrete
//! immersions with known geometry drives the tests and the command-line tool.

pub mod ambient;
pub mod analysis;
pub mod catalog;
pub mod error;
pub mod frames;
pub mod jets;
pub mod taylor;
pub mod tensors;

pub use ambient::AmbientModel;
pub use error::{GeomError, Result};
pub use frames::FrameData;
pub use jets::{ImmersionChart, Jet3, Step};
pub use tensors::{DerivedTensors, FundamentalData, GeometryEngine, PointGeometry};
