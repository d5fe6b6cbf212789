//! The tracking loop: particle filtering over box states with affine
//! subspace appearance models scored against a bag of reference models.
//!
//! Per frame: resample particles by weight, diffuse them, cut a patch per
//! particle, extend the accepted-patch history into a candidate subspace per
//! particle, score every candidate against every bag model, sum the
//! per-model likelihoods, and take the maximum-likelihood particle as the
//! estimate. Per model, likelihood is exp(-d / sigma) normalized across
//! candidates, computed in the log domain (the minimum distance is
//! subtracted before exponentiation) so large distances cannot underflow
//! the whole distribution.

use rayon::prelude::*;

use crate::appearance::{build_affine_subspace, extract_patch, BoxState, Frame, Patch};
use crate::bag::ModelBag;
use crate::error::{Error, Result};
use crate::grassmann::{affine_distance, kl_distance, AffineSubspace};
use crate::motion::{diffuse, init_particles, resample, MotionParams, Particle};
use crate::numerics::RandomSource;
use crate::scalar::{real, Real};

/// Appearance distance selection.
#[derive(Debug, Clone)]
pub enum DistanceKind<T> {
    /// Geodesic plus alpha-weighted origin penalty.
    Affine,
    /// Symmetric KL divergence with the given sigma^2.
    Kl { sigma_sq: T },
}

#[derive(Debug, Clone)]
pub struct TrackerConfig<T> {
    /// Number of accepted patches kept as history (P); also the warm-up length.
    pub history_len: usize,
    /// Appearance subspace dimension (n).
    pub subspace_dim: usize,
    /// Bag capacity (k).
    pub bag_capacity: usize,
    /// Frames between bag insertions (W).
    pub bag_update_period: usize,
    /// Origin penalty weight in the combined distance.
    pub alpha: T,
    /// Likelihood temperature in exp(-d / sigma).
    pub sigma: T,
    pub motion: MotionParams<T>,
    pub seed: u64,
    pub distance: DistanceKind<T>,
}

impl<T: Real> Default for TrackerConfig<T> {
    fn default() -> Self {
        TrackerConfig {
            history_len: 5,
            subspace_dim: 3,
            bag_capacity: 10,
            bag_update_period: 5,
            alpha: T::one(),
            sigma: real(0.1),
            motion: MotionParams {
                n_particles: 600,
                std_x: real(4.0),
                std_y: real(4.0),
                std_s: real(0.01),
                s_min: real(0.5),
                s_max: real(2.0),
            },
            seed: 0,
            distance: DistanceKind::Affine,
        }
    }
}

impl<T: Real> TrackerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.history_len < 2 {
            return Err(Error::invalid_input("history length must be at least 2"));
        }
        if self.subspace_dim == 0 || self.subspace_dim > self.history_len - 1 {
            return Err(Error::invalid_input(format!(
                "subspace dimension must be in 1..={}, got {}",
                self.history_len - 1,
                self.subspace_dim
            )));
        }
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::invalid_input(format!(
                "sigma must be finite and positive, got {}",
                self.sigma
            )));
        }
        if !self.alpha.is_finite() || self.alpha < T::zero() {
            return Err(Error::invalid_input(format!(
                "alpha must be finite and nonnegative, got {}",
                self.alpha
            )));
        }
        if let DistanceKind::Kl { sigma_sq } = self.distance {
            if !(sigma_sq > T::zero()) || !sigma_sq.is_finite() {
                return Err(Error::invalid_input(format!(
                    "KL sigma^2 must be finite and positive, got {}",
                    sigma_sq
                )));
            }
        }
        if self.bag_capacity == 0 || self.bag_update_period == 0 {
            return Err(Error::invalid_input("bag capacity and update period must be positive"));
        }
        self.motion.validate()
    }
}

/// Mutable tracker state between frames.
#[derive(Debug, Clone)]
pub struct TrackState<T> {
    /// Last `history_len` accepted patches, oldest first.
    pub history: Vec<Patch<T>>,
    pub particles: Vec<Particle<T>>,
    pub bag: ModelBag<T>,
    /// Frames consumed so far (warm-up included).
    pub frame_index: usize,
    pub rng: RandomSource,
}

/// Per-frame output of the tracker.
#[derive(Debug, Clone)]
pub struct TrackRecord<T> {
    /// 1-based frame number.
    pub frame_index: usize,
    pub state: BoxState<T>,
    /// Aggregated likelihood of the chosen particle; 0 for warm-up frames.
    pub score: T,
}

/// Builds the appearance subspace for one candidate: the history patches
/// plus the candidate patch, fitted with up to `n` basis directions.
pub fn candidate_subspace<T: Real>(
    history: &[Patch<T>],
    candidate: &Patch<T>,
    n: usize,
) -> Result<AffineSubspace<T>> {
    if history.is_empty() {
        return Err(Error::invalid_input("candidate subspace needs a nonempty history"));
    }
    let mut refs: Vec<&Patch<T>> = history.iter().collect();
    refs.push(candidate);
    build_affine_subspace(&refs, n)
}

/// Normalizes exp(-d / sigma) across a distance vector in the log domain.
pub fn likelihoods_from_distances<T: Real>(distances: &[T], sigma: T) -> Result<Vec<T>> {
    if distances.is_empty() {
        return Err(Error::invalid_input("no distances to normalize"));
    }
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::invalid_input(format!(
            "sigma must be finite and positive, got {}",
            sigma
        )));
    }
    let mut min = T::infinity();
    for &d in distances {
        if d.is_finite() && d < min {
            min = d;
        }
    }
    if !min.is_finite() {
        // Every distance overflowed; fall back to the uniform distribution.
        let u = T::from_usize(distances.len()).unwrap().recip();
        return Ok(vec![u; distances.len()]);
    }
    let mut weights: Vec<T> = distances
        .iter()
        .map(|&d| {
            if d.is_finite() {
                (-(d - min) / sigma).exp()
            } else {
                T::zero()
            }
        })
        .collect();
    let total: T = weights.iter().copied().sum();
    let inv = total.recip();
    for w in weights.iter_mut() {
        *w = *w * inv;
    }
    Ok(weights)
}

/// Likelihood of each candidate under one bag model (normalized across
/// candidates).
pub fn likelihoods<T: Real>(
    candidates: &[AffineSubspace<T>],
    model: &AffineSubspace<T>,
    alpha: T,
    sigma: T,
    kind: &DistanceKind<T>,
) -> Result<Vec<T>> {
    let distances: Vec<T> = candidates
        .par_iter()
        .map(|c| match kind {
            DistanceKind::Affine => affine_distance(c, model, alpha),
            DistanceKind::Kl { sigma_sq } => kl_distance(c, model, *sigma_sq),
        })
        .collect::<Result<Vec<T>>>()?;
    likelihoods_from_distances(&distances, sigma)
}

/// Sum-rule aggregation of per-model likelihood vectors.
pub fn aggregate<T: Real>(per_model: &[Vec<T>]) -> Result<Vec<T>> {
    let first = per_model
        .first()
        .ok_or_else(|| Error::InvalidState("no models in the bag".into()))?;
    let n = first.len();
    if per_model.iter().any(|v| v.len() != n) {
        return Err(Error::invalid_input("likelihood vectors differ in length"));
    }
    let mut out = vec![T::zero(); n];
    for v in per_model {
        for (acc, x) in out.iter_mut().zip(v.iter()) {
            *acc += *x;
        }
    }
    Ok(out)
}

/// Maximum-likelihood estimate: the particle with the highest aggregated
/// likelihood, ties resolved to the lowest index.
pub fn estimate<T: Real>(
    aggregated: &[T],
    particles: &[Particle<T>],
    frame_index: usize,
) -> Result<(usize, TrackRecord<T>)> {
    if aggregated.is_empty() || aggregated.len() != particles.len() {
        return Err(Error::invalid_input(format!(
            "likelihoods ({}) and particles ({}) do not align",
            aggregated.len(),
            particles.len()
        )));
    }
    let mut best = 0usize;
    for (i, v) in aggregated.iter().enumerate() {
        if *v > aggregated[best] {
            best = i;
        }
    }
    let record = TrackRecord {
        frame_index,
        state: particles[best].state.clone(),
        score: aggregated[best],
    };
    Ok((best, record))
}

/// Advances the tracker by one frame and returns its estimate.
pub fn step<T: Real>(
    state: &mut TrackState<T>,
    frame: &Frame,
    config: &TrackerConfig<T>,
) -> Result<TrackRecord<T>> {
    state.particles = resample(&state.particles, &mut state.rng)?;
    diffuse(
        &mut state.particles,
        &config.motion,
        frame.width(),
        frame.height(),
        &mut state.rng,
    )?;

    let pairs: Vec<(Patch<T>, AffineSubspace<T>)> = state
        .particles
        .par_iter()
        .map(|p| {
            let patch = extract_patch(frame, &p.state)?;
            let cand = candidate_subspace(&state.history, &patch, config.subspace_dim)?;
            Ok((patch, cand))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut patches, mut cands): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();

    let mut per_model = Vec::with_capacity(state.bag.len());
    for model in state.bag.all_models() {
        per_model.push(likelihoods(&cands, model, config.alpha, config.sigma, &config.distance)?);
    }
    let agg = aggregate(&per_model)?;
    let frame_no = state.frame_index + 1;
    let (best, record) = estimate(&agg, &state.particles, frame_no)?;

    let total: T = agg.iter().copied().sum();
    if !(total > T::zero()) || !total.is_finite() {
        return Err(Error::InvalidState(format!(
            "aggregated likelihoods sum to {}",
            total
        )));
    }
    let inv = total.recip();
    for (p, a) in state.particles.iter_mut().zip(agg.iter()) {
        p.weight = *a * inv;
    }

    state.history.remove(0);
    state.history.push(patches.swap_remove(best));
    // The accepted model is exactly the chosen candidate's subspace: the
    // pre-update history plus the accepted patch.
    state.bag.maybe_update(cands.swap_remove(best))?;
    state.frame_index = frame_no;
    Ok(record)
}

/// Runs the tracker over a full sequence.
///
/// The first `history_len` frames are warm-up: the initial box is emitted
/// unchanged while its patches bootstrap the history and the first bag
/// model. Needs at least `history_len` frames; a sequence of exactly that
/// length yields warm-up records only.
pub fn run<T: Real>(
    frames: &[Frame],
    init: &BoxState<T>,
    config: &TrackerConfig<T>,
) -> Result<Vec<TrackRecord<T>>> {
    config.validate()?;
    init.validate()?;
    let p = config.history_len;
    if frames.len() < p {
        return Err(Error::invalid_input(format!(
            "need at least {} frames for warm-up, got {}",
            p,
            frames.len()
        )));
    }
    if frames
        .windows(2)
        .any(|w| w[0].width() != w[1].width() || w[0].height() != w[1].height())
    {
        return Err(Error::invalid_input("frames differ in size"));
    }
    // The diffusion clamp keeps scale in [s_min, s_max]; the box must stay
    // sampleable over that whole range.
    for s in [config.motion.s_min, config.motion.s_max] {
        let probe = BoxState { s, ..init.clone() };
        probe.validate()?;
    }

    let mut records = Vec::with_capacity(frames.len());
    let mut history = Vec::with_capacity(p);
    for frame in &frames[..p] {
        history.push(extract_patch(frame, init)?);
        records.push(TrackRecord {
            frame_index: records.len() + 1,
            state: init.clone(),
            score: T::zero(),
        });
    }
    let refs: Vec<&Patch<T>> = history.iter().collect();
    let bootstrap = build_affine_subspace(&refs, config.subspace_dim)?;
    let mut bag = ModelBag::new(config.bag_capacity, config.bag_update_period)?;
    bag.maybe_update(bootstrap)?;

    let mut state = TrackState {
        history,
        particles: init_particles(init, &config.motion)?,
        bag,
        frame_index: p,
        rng: RandomSource::new(config.seed),
    };
    for frame in &frames[p..] {
        records.push(step(&mut state, frame, config)?);
    }
    Ok(records)
}
