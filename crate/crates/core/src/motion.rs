//! Condensation-style particle dynamics: multinomial resampling followed by
//! Brownian diffusion of (x, y, s) box states.

use crate::appearance::BoxState;
use crate::error::{Error, Result};
use crate::numerics::RandomSource;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct Particle<T> {
    pub state: BoxState<T>,
    pub weight: T,
}

/// Diffusion and population parameters for the particle filter.
#[derive(Debug, Clone)]
pub struct MotionParams<T> {
    pub n_particles: usize,
    pub std_x: T,
    pub std_y: T,
    pub std_s: T,
    pub s_min: T,
    pub s_max: T,
}

impl<T: Real> MotionParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::invalid_input("particle count must be positive"));
        }
        for (name, v) in [("std_x", self.std_x), ("std_y", self.std_y), ("std_s", self.std_s)] {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::invalid_input(format!(
                    "{} must be finite and nonnegative, got {}",
                    name, v
                )));
            }
        }
        if !self.s_min.is_finite() || !self.s_max.is_finite() || self.s_min <= T::zero() {
            return Err(Error::invalid_input("scale range must be finite and positive"));
        }
        if self.s_min > self.s_max {
            return Err(Error::invalid_input(format!(
                "scale range is empty: [{}, {}]",
                self.s_min, self.s_max
            )));
        }
        Ok(())
    }
}

/// Clones the seed state into `n_particles` particles of weight 1/N.
pub fn init_particles<T: Real>(seed_state: &BoxState<T>, params: &MotionParams<T>) -> Result<Vec<Particle<T>>> {
    params.validate()?;
    seed_state.validate()?;
    let w = T::from_usize(params.n_particles).unwrap().recip();
    Ok((0..params.n_particles)
        .map(|_| Particle { state: seed_state.clone(), weight: w })
        .collect())
}

/// Multinomial resampling with replacement.
///
/// Draws one uniform per output particle and maps it through the cumulative
/// weight distribution by binary search; weights need not be normalized.
/// Output weights are uniform 1/N.
pub fn resample<T: Real>(particles: &[Particle<T>], rng: &mut RandomSource) -> Result<Vec<Particle<T>>> {
    if particles.is_empty() {
        return Err(Error::DegenerateWeights("no particles to resample".into()));
    }
    let mut cdf = Vec::with_capacity(particles.len());
    let mut total = T::zero();
    for p in particles {
        if !p.weight.is_finite() || p.weight < T::zero() {
            return Err(Error::DegenerateWeights(format!(
                "weight {} is negative or non-finite",
                p.weight
            )));
        }
        total += p.weight;
        cdf.push(total);
    }
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::DegenerateWeights(format!("weights sum to {}", total)));
    }
    let n = particles.len();
    let w = T::from_usize(n).unwrap().recip();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u: T = rng.next_uniform();
        let target = u * total;
        let idx = cdf.partition_point(|c| *c < target).min(n - 1);
        out.push(Particle { state: particles[idx].state.clone(), weight: w });
    }
    Ok(out)
}

/// Brownian diffusion of each particle's (x, y, s), in particle order with
/// the per-particle draw order fixed as x, y, s.
///
/// The scale is clamped to [s_min, s_max] and the anchor is clamped so the
/// scaled box keeps at least one pixel inside the `frame_w` x `frame_h`
/// bounds.
pub fn diffuse<T: Real>(
    particles: &mut [Particle<T>],
    params: &MotionParams<T>,
    frame_w: u32,
    frame_h: u32,
    rng: &mut RandomSource,
) -> Result<()> {
    params.validate()?;
    for p in particles.iter_mut() {
        p.state.x = rng.next_gaussian(p.state.x, params.std_x)?;
        p.state.y = rng.next_gaussian(p.state.y, params.std_y)?;
        p.state.s = rng.next_gaussian(p.state.s, params.std_s)?;
        p.state.s = p.state.s.max(params.s_min).min(params.s_max);
        let w = T::from_i64(p.state.region_w()).unwrap();
        let h = T::from_i64(p.state.region_h()).unwrap();
        let one = T::one();
        p.state.x = p
            .state
            .x
            .max(one - w)
            .min(T::from_u32(frame_w).unwrap() - one);
        p.state.y = p
            .state
            .y
            .max(one - h)
            .min(T::from_u32(frame_h).unwrap() - one);
    }
    Ok(())
}
