//! Scalar abstraction for the numeric core.
//!
//! Everything geometric is generic over [`Real`], implemented for `f32` and
//! `f64`. The crate root exports `f64` aliases, which is what the tracker
//! binary and the documented tolerances target; `f32` trades accuracy for
//! memory and carries correspondingly looser tolerances.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Relative cutoff under which a singular value counts as zero.
    const RANK_TOL: Self;
    /// Allowed relative asymmetry in a matrix passed to the eigensolver.
    const SYM_TOL: Self;
    /// Jacobi sweep convergence threshold, relative to the Frobenius norm.
    const JACOBI_TOL: Self;
    /// Allowed deviation from orthonormality in a subspace basis.
    const ORTHO_TOL: Self;
    /// Smallest value produced by the canonical uniform draw.
    const UNIT_STEP: Self;

    /// Maps 64 random bits to the open interval (0, 1).
    ///
    /// For `f64` this is the canonical `(bits >> 11) * 2^-53` construction;
    /// `f32` keeps 24 bits. A zero result is replaced by [`Real::UNIT_STEP`]
    /// by the caller so the interval stays open.
    fn unit_from_bits(bits: u64) -> Self;
}

impl Real for f64 {
    const RANK_TOL: Self = 1e-10;
    const SYM_TOL: Self = 1e-12;
    const JACOBI_TOL: Self = 1e-13;
    const ORTHO_TOL: Self = 1e-8;
    const UNIT_STEP: Self = 1.0 / 9007199254740992.0; // 2^-53

    #[inline]
    fn unit_from_bits(bits: u64) -> Self {
        (bits >> 11) as f64 * Self::UNIT_STEP
    }
}

impl Real for f32 {
    const RANK_TOL: Self = 1e-5;
    const SYM_TOL: Self = 1e-5;
    const JACOBI_TOL: Self = 1e-6;
    const ORTHO_TOL: Self = 1e-4;
    const UNIT_STEP: Self = 1.0 / 16777216.0; // 2^-24

    #[inline]
    fn unit_from_bits(bits: u64) -> Self {
        (bits >> 40) as f32 * Self::UNIT_STEP
    }
}

/// Converts an `f64` literal into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable")
}
