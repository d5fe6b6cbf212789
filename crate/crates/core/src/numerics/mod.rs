//! Small numeric core: dense matrices, symmetric eigendecomposition, thin
//! SVD, and a seeded random source.

pub mod decomp;
pub mod matrix;
pub mod rng;

pub use decomp::{dominant_left_singular, sym_eig, thin_svd, SymEig, ThinSvd};
pub use matrix::{dot, norm2, Matrix};
pub use rng::RandomSource;
