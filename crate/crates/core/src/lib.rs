//! Appearance tracking with affine-subspace models.
//!
//! An object's appearance over a short window of frames is summarized as an
//! affine subspace of patch space: an origin (mean patch) plus a low-rank
//! orthonormal basis for the dominant variation. Subspaces are compared with
//! a Grassmann geodesic distance between the bases, plus an origin term
//! measured against the variation both models fail to explain. A particle
//! filter proposes candidate boxes each frame, candidate subspaces are scored
//! against a bag of recent appearance models, and the best candidate both
//! localizes the object and refreshes the bag.
//!
//! The numeric core is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`); the crate root exports concrete `f64`
//! aliases, which the command-line tools use.

pub mod appearance;
pub mod bag;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod motion;
pub mod numerics;
pub mod scalar;
pub mod tracker;

pub use error::{Error, Result};
pub use scalar::{real, Real};

/// Concrete `f64` instantiations of the generic core types.
pub type Matrix64 = numerics::Matrix<f64>;
pub type LinearSubspace64 = grassmann::LinearSubspace<f64>;
pub type AffineSubspace64 = grassmann::AffineSubspace<f64>;
pub type Patch64 = appearance::Patch<f64>;
pub type BoxState64 = appearance::BoxState<f64>;
pub type Particle64 = motion::Particle<f64>;
pub type MotionParams64 = motion::MotionParams<f64>;
pub type ModelBag64 = bag::ModelBag<f64>;
pub type TrackerConfig64 = tracker::TrackerConfig<f64>;
pub type TrackRecord64 = tracker::TrackRecord<f64>;
pub type DistanceKind64 = tracker::DistanceKind<f64>;

/// Single-precision variants for memory-constrained embeddings.
pub type Matrix32 = numerics::Matrix<f32>;
pub type AffineSubspace32 = grassmann::AffineSubspace<f32>;
pub type TrackerConfig32 = tracker::TrackerConfig<f32>;
