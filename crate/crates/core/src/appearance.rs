//! Appearance observations: image patches cut from frames and the affine
//! subspaces fitted to collections of them.
//!
//! A tracked region is resampled to a fixed 32 x 32 template and flattened
//! to a feature vector in [0, 1]^1024. A set of such vectors is summarized
//! by its mean (the model origin) and the dominant left singular vectors of
//! the centered stack (the model basis).

use crate::error::{Error, Result};
use crate::grassmann::{AffineSubspace, LinearSubspace};
use crate::numerics::{dominant_left_singular, Matrix};
use crate::scalar::{real, Real};

/// Side length of the resampled appearance template.
pub const PATCH_EDGE: usize = 32;
/// Feature dimension of a resampled patch.
pub const PATCH_DIM: usize = PATCH_EDGE * PATCH_EDGE;

/// One grayscale frame, 8-bit, row-major.
#[derive(Debug, Clone)]
pub struct Frame {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    /// 1-based position in the sequence.
    index: u32,
}

impl Frame {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>, index: u32) -> Result<Self> {
        if pixels.len() != (width as usize) * (height as usize) {
            return Err(Error::invalid_input(format!(
                "pixel buffer length {} does not match {}x{}",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(Frame { width, height, pixels, index })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Pixel lookup with edge clamping.
    #[inline]
    pub fn pixel_clamped(&self, x: i64, y: i64) -> u8 {
        let xi = x.clamp(0, self.width as i64 - 1) as usize;
        let yi = y.clamp(0, self.height as i64 - 1) as usize;
        self.pixels[yi * self.width as usize + xi]
    }
}

/// Flattened appearance template.
#[derive(Debug, Clone)]
pub struct Patch<T> {
    features: Vec<T>,
}

impl<T: Real> Patch<T> {
    pub fn from_features(features: Vec<T>) -> Result<Self> {
        if features.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid_input("patch features must be finite"));
        }
        Ok(Patch { features })
    }

    pub fn features(&self) -> &[T] {
        &self.features
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

/// Tracked box: continuous top-left anchor plus a scale applied to a fixed
/// base size. The pixel box is (round(x), round(y), round(base_w * s),
/// round(base_h * s)).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxState<T> {
    pub x: T,
    pub y: T,
    pub s: T,
    pub base_w: u32,
    pub base_h: u32,
}

impl<T: Real> BoxState<T> {
    pub fn new(x: T, y: T, s: T, base_w: u32, base_h: u32) -> Result<Self> {
        let state = BoxState { x, y, s, base_w, base_h };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.x.is_finite() || !self.y.is_finite() || !self.s.is_finite() {
            return Err(Error::invalid_input("box state must be finite"));
        }
        if self.s <= T::zero() {
            return Err(Error::invalid_input(format!("scale must be positive, got {}", self.s)));
        }
        if self.region_w() < 2 || self.region_h() < 2 {
            return Err(Error::invalid_input("scaled box collapses below 2x2 pixels"));
        }
        Ok(())
    }

    /// Scaled region width in pixels.
    pub fn region_w(&self) -> i64 {
        (T::from_u32(self.base_w).unwrap() * self.s)
            .round()
            .to_i64()
            .unwrap_or(0)
    }

    /// Scaled region height in pixels.
    pub fn region_h(&self) -> i64 {
        (T::from_u32(self.base_h).unwrap() * self.s)
            .round()
            .to_i64()
            .unwrap_or(0)
    }

    /// Rounded top-left anchor.
    pub fn anchor(&self) -> (i64, i64) {
        (
            self.x.round().to_i64().unwrap_or(0),
            self.y.round().to_i64().unwrap_or(0),
        )
    }
}

/// Cuts the scaled box out of the frame and resamples it to 32 x 32.
///
/// Output sample (r, c) maps to source coordinates under the half-pixel
/// convention, x_src = (c + 0.5) * w_region / 32 - 0.5 relative to the
/// anchor; samples are bilinear with edge clamping, and intensities are
/// normalized by 255.
pub fn extract_patch<T: Real>(frame: &Frame, state: &BoxState<T>) -> Result<Patch<T>> {
    if frame.width < 2 || frame.height < 2 {
        return Err(Error::invalid_input(format!(
            "frame {}x{} is too small to sample",
            frame.width, frame.height
        )));
    }
    state.validate()?;
    let (ax, ay) = state.anchor();
    let rw = state.region_w();
    let rh = state.region_h();
    let edge = real::<T>(PATCH_EDGE as f64);
    let half = real::<T>(0.5);
    let white = real::<T>(255.0);

    let mut features = Vec::with_capacity(PATCH_DIM);
    for r in 0..PATCH_EDGE {
        let sy = (T::from_usize(r).unwrap() + half) * T::from_i64(rh).unwrap() / edge - half;
        let y_abs = sy + T::from_i64(ay).unwrap();
        for c in 0..PATCH_EDGE {
            let sx = (T::from_usize(c).unwrap() + half) * T::from_i64(rw).unwrap() / edge - half;
            let x_abs = sx + T::from_i64(ax).unwrap();
            features.push(sample_bilinear(frame, x_abs, y_abs) / white);
        }
    }
    Ok(Patch { features })
}

#[inline]
fn sample_bilinear<T: Real>(frame: &Frame, x: T, y: T) -> T {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let xi = x0.to_i64().unwrap_or(0);
    let yi = y0.to_i64().unwrap_or(0);
    let p00 = T::from_u8(frame.pixel_clamped(xi, yi)).unwrap();
    let p01 = T::from_u8(frame.pixel_clamped(xi + 1, yi)).unwrap();
    let p10 = T::from_u8(frame.pixel_clamped(xi, yi + 1)).unwrap();
    let p11 = T::from_u8(frame.pixel_clamped(xi + 1, yi + 1)).unwrap();
    let one = T::one();
    (one - fy) * ((one - fx) * p00 + fx * p01) + fy * ((one - fx) * p10 + fx * p11)
}

/// Fits an affine subspace to a set of patches: origin is the mean feature
/// vector, basis is up to `n` dominant left singular vectors of the centered
/// stack. The basis rank never exceeds min(n, m - 1, D); identical patches
/// produce a rank-0 model.
pub fn build_affine_subspace<T: Real>(patches: &[&Patch<T>], n: usize) -> Result<AffineSubspace<T>> {
    if patches.is_empty() {
        return Err(Error::invalid_input("cannot fit a subspace to zero patches"));
    }
    if n == 0 {
        return Err(Error::invalid_input("subspace dimension must be at least 1"));
    }
    let dim = patches[0].dim();
    if patches.iter().any(|p| p.dim() != dim) {
        return Err(Error::invalid_input("patches differ in dimension"));
    }
    let m = patches.len();
    let inv_m = T::from_usize(m).unwrap().recip();
    let mut mean = vec![T::zero(); dim];
    for p in patches {
        for (acc, x) in mean.iter_mut().zip(p.features().iter()) {
            *acc += *x;
        }
    }
    for x in mean.iter_mut() {
        *x *= inv_m;
    }
    let centered = Matrix::from_fn(dim, m, |i, j| patches[j].features()[i] - mean[i]);
    // Centering drops one degree of freedom, so the true rank is at most
    // m - 1; capping here keeps Gram-route roundoff from resurrecting the
    // lost direction as a spurious basis column.
    let (basis, singulars) = dominant_left_singular(&centered, n.min(m - 1))?;
    // Identical patches must give an empty basis, but mean subtraction
    // leaves residue at the scale of feature roundoff; singular values at
    // that floor are variance the data does not actually contain.
    let feature_scale = patches
        .iter()
        .flat_map(|p| p.features().iter())
        .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    let floor = real::<T>(256.0)
        * T::epsilon()
        * feature_scale
        * T::from_usize(dim * m).unwrap().sqrt();
    let rank = singulars.iter().take_while(|&&s| s > floor).count();
    let basis = if rank < basis.cols() { basis.keep_cols(rank) } else { basis };
    AffineSubspace::new(mean, LinearSubspace::new(basis)?)
}
