//! Synthetic benchmark sequences: a textured block drifting over a static
//! cluttered background, with optional illumination drift and a timed
//! partial occlusion. Generation is a pure function of `SynthSpec` (seed
//! included), so regenerating yields byte-identical frames.

use std::path::Path;

use crate::appearance::Frame;
use crate::error::{Error, Result};
use crate::io::pgm::write_pgm;
use crate::io::records::{save_truth, TruthBox};
use crate::numerics::RandomSource;

/// Background level, centered on the texture's mean gray. With object and
/// surround sharing their mean luminance, a global gain change moves both
/// together, and no box placement can fake a brightness change by trading
/// object pixels for background; localization rests on texture structure.
const BACKGROUND_GRAY: f64 = 115.0;
/// Texture gray range. High contrast keeps the appearance signal well above
/// sensor noise, so framing errors always cost more than lighting drift; the
/// top stays below 255 / (1 + amplitude) for the amplitudes the benchmarks
/// use, keeping the gain linear on the object.
const TEXTURE_MIN: f64 = 8.0;
const TEXTURE_SPAN: f64 = 213.0;
/// Box-blur radius for the object texture. Raw per-pixel noise would
/// decorrelate under sub-pixel motion, which no real surface does; a
/// band-limited texture keeps neighboring frames comparable.
const TEXTURE_BLUR_RADIUS: i64 = 2;
/// The occluder is a neutral gray card at the scene's mean level: it erases
/// the covered texture without introducing a brightness outlier, so occlusion
/// tests structure memory rather than luminance gating.
const OCCLUDER_GRAY: f64 = 115.0;
const MARGIN: i64 = 10;
/// The occluder covers the object's lower half for this many frames.
const OCCLUSION_FRAMES: i64 = 10;
/// Upper bound on the per-frame drift step, in pixels. The benchmarks model
/// an object drifting a small fraction of its own size per frame; short
/// sequences in large frames would otherwise sweep corner to corner at
/// several pixels per frame, which no fixed camera watching a drifting
/// target produces.
const DRIFT_SPEED_CAP: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trajectory {
    /// Corner-to-corner constant-velocity drift.
    Linear,
    /// Linear in x, sinusoidal in y.
    Sinusoidal,
}

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub length: usize,
    pub frame_w: u32,
    pub frame_h: u32,
    pub object_w: u32,
    pub object_h: u32,
    pub trajectory: Trajectory,
    /// Relative amplitude of the global gain 1 + a sin(2 pi t / length).
    pub illumination_amplitude: f64,
    pub occluder: bool,
    /// Standard deviation of the background clutter around its mean level.
    /// The clutter field is drawn once per sequence; it is scene texture,
    /// not sensor noise.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            length: 120,
            frame_w: 320,
            frame_h: 240,
            object_w: 40,
            object_h: 40,
            trajectory: Trajectory::Linear,
            illumination_amplitude: 0.15,
            occluder: false,
            noise_std: 4.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::invalid_input("sequence length must be positive"));
        }
        if self.object_w < 2 || self.object_h < 2 {
            return Err(Error::invalid_input("object must be at least 2x2 pixels"));
        }
        if !self.noise_std.is_finite() || self.noise_std < 0.0 {
            return Err(Error::invalid_input(format!(
                "noise std must be finite and nonnegative, got {}",
                self.noise_std
            )));
        }
        if !self.illumination_amplitude.is_finite()
            || !(0.0..=1.0).contains(&self.illumination_amplitude)
        {
            return Err(Error::invalid_input(format!(
                "illumination amplitude must be in [0, 1], got {}",
                self.illumination_amplitude
            )));
        }
        let span_x = self.frame_w as i64 - self.object_w as i64 - 2 * MARGIN;
        let span_y = self.frame_h as i64 - self.object_h as i64 - 2 * MARGIN;
        if span_x < 0 || span_y < 0 {
            return Err(Error::invalid_input(
                "object does not fit in the frame along the trajectory",
            ));
        }
        Ok(())
    }

    /// Rounded object position at 1-based frame `t`. The object drifts from
    /// the top-left margin toward the bottom-right one at constant velocity,
    /// clipped to the per-frame speed cap; the sinusoidal variant swings y
    /// around the vertical midline instead, with its slope capped the same
    /// way.
    fn position(&self, t: usize) -> (i64, i64) {
        let span_x = (self.frame_w as i64 - self.object_w as i64 - 2 * MARGIN) as f64;
        let span_y = (self.frame_h as i64 - self.object_h as i64 - 2 * MARGIN) as f64;
        let steps = (self.length - 1).max(1) as f64;
        let (mut vx, mut vy) = (span_x / steps, span_y / steps);
        let speed = vx.hypot(vy);
        if speed > DRIFT_SPEED_CAP {
            vx *= DRIFT_SPEED_CAP / speed;
            vy *= DRIFT_SPEED_CAP / speed;
        }
        let dt = (t - 1) as f64;
        let x = MARGIN as f64 + vx * dt;
        let y = match self.trajectory {
            Trajectory::Linear => MARGIN as f64 + vy * dt,
            Trajectory::Sinusoidal => {
                let omega = 2.0 * std::f64::consts::PI / self.length as f64;
                let amp = (span_y / 2.0).min(DRIFT_SPEED_CAP / omega);
                MARGIN as f64 + span_y / 2.0 + amp * (omega * dt).sin()
            }
        };
        (x.round() as i64, y.round() as i64)
    }

    /// 1-based frame range [start, end] covered by the occluder.
    fn occlusion_window(&self) -> (i64, i64) {
        let start = (self.length as i64 / 2 - OCCLUSION_FRAMES / 2 + 1).max(1);
        let end = (start + OCCLUSION_FRAMES - 1).min(self.length as i64);
        (start, end)
    }
}

/// Box-blurs a unit-interval noise field with clamped edges and stretches
/// the result over the texture gray range.
fn texture_from_field(field: &[f64], w: usize, h: usize) -> Vec<u8> {
    let sample = |x: i64, y: i64| -> f64 {
        let x = x.clamp(0, w as i64 - 1) as usize;
        let y = y.clamp(0, h as i64 - 1) as usize;
        field[y * w + x]
    };
    let r = TEXTURE_BLUR_RADIUS;
    let taps = ((2 * r + 1) * (2 * r + 1)) as f64;
    let mut blurred = Vec::with_capacity(w * h);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    acc += sample(x + dx, y + dy);
                }
            }
            blurred.push(acc / taps);
        }
    }
    let lo = blurred.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = blurred.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo).max(f64::MIN_POSITIVE);
    blurred
        .iter()
        .map(|&v| (TEXTURE_MIN + TEXTURE_SPAN * (v - lo) / spread).round() as u8)
        .collect()
}

/// Renders the full sequence in memory.
pub fn render_sequence(spec: &SynthSpec) -> Result<(Vec<Frame>, Vec<TruthBox>)> {
    spec.validate()?;
    let mut rng = RandomSource::new(spec.seed);
    let (ow, oh) = (spec.object_w as usize, spec.object_h as usize);
    let field: Vec<f64> = (0..ow * oh).map(|_| rng.next_uniform::<f64>()).collect();
    let texture = texture_from_field(&field, ow, oh);

    let (fw, fh) = (spec.frame_w as usize, spec.frame_h as usize);
    // The scene is static apart from the object: background clutter is drawn
    // once and reused, so only object motion, occlusion, and lighting change
    // between frames.
    let mut background = vec![0.0f64; fw * fh];
    for v in background.iter_mut() {
        *v = rng.next_gaussian(BACKGROUND_GRAY, spec.noise_std)?;
    }
    let (occ_start, occ_end) = spec.occlusion_window();
    let mut frames = Vec::with_capacity(spec.length);
    let mut truth = Vec::with_capacity(spec.length);
    let mut canvas = vec![0.0f64; fw * fh];

    for t in 1..=spec.length {
        canvas.copy_from_slice(&background);
        let (ox, oy) = spec.position(t);
        for ty in 0..oh {
            let row = (oy + ty as i64) as usize;
            for tx in 0..ow {
                let col = (ox + tx as i64) as usize;
                canvas[row * fw + col] = texture[ty * ow + tx] as f64;
            }
        }
        if spec.occluder && (t as i64) >= occ_start && (t as i64) <= occ_end {
            for ty in oh / 2..oh {
                let row = (oy + ty as i64) as usize;
                for tx in 0..ow {
                    let col = (ox + tx as i64) as usize;
                    canvas[row * fw + col] = OCCLUDER_GRAY;
                }
            }
        }
        let gain = 1.0
            + spec.illumination_amplitude
                * (2.0 * std::f64::consts::PI * t as f64 / spec.length as f64).sin();
        let pixels: Vec<u8> = canvas
            .iter()
            .map(|&v| (v * gain).round().clamp(0.0, 255.0) as u8)
            .collect();
        frames.push(Frame::new(spec.frame_w, spec.frame_h, pixels, t as u32)?);
        truth.push(TruthBox { x: ox, y: oy, w: spec.object_w as i64, h: spec.object_h as i64 });
    }
    Ok((frames, truth))
}

/// Renders the sequence into `out_dir`: numbered PGM frames plus
/// `groundtruth.txt` with one `x,y,w,h` line per frame.
pub fn generate_synthetic(spec: &SynthSpec, out_dir: &Path) -> Result<()> {
    let (frames, truth) = render_sequence(spec)?;
    std::fs::create_dir_all(out_dir)?;
    for frame in &frames {
        let path = out_dir.join(format!("frame_{:05}.pgm", frame.index()));
        write_pgm(&path, frame.width(), frame.height(), frame.pixels())?;
    }
    save_truth(&out_dir.join("groundtruth.txt"), &truth)?;
    Ok(())
}
