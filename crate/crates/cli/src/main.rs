//! Command-line front end: `track` runs the filter over a frame directory,
//! `eval` scores a result CSV against ground truth, `synth` renders a
//! benchmark sequence. Exit codes: 0 success, 1 usage error, 2 data error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grasstrack::appearance::{BoxState, Frame};
use grasstrack::io::{
    evaluate, generate_synthetic, list_pgm_files, load_frames, load_records, load_truth,
    save_records, write_pgm, SynthSpec, Trajectory,
};
use grasstrack::motion::MotionParams;
use grasstrack::tracker::{run, DistanceKind, TrackRecord, TrackerConfig};
use grasstrack::Result;

#[derive(Parser)]
#[command(name = "grasstrack", version, about = "Affine-subspace appearance tracker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track an object through a directory of PGM frames.
    Track(TrackArgs),
    /// Score a result CSV against a ground-truth file.
    Eval(EvalArgs),
    /// Render a synthetic benchmark sequence.
    Synth(SynthArgs),
}

#[derive(Args)]
struct TrackArgs {
    /// Directory holding the .pgm frames, ordered by file name.
    #[arg(long)]
    frames: PathBuf,
    /// Initial object box as X,Y,W,H (anchor and base size, scale 1).
    #[arg(long, value_parser = parse_init)]
    init: InitBox,
    /// Destination CSV.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 600)]
    particles: usize,
    /// Patch history length; also the warm-up length.
    #[arg(long, default_value_t = 5)]
    history: usize,
    /// Appearance subspace dimension.
    #[arg(long, default_value_t = 3)]
    subdim: usize,
    /// Capacity of the bag of past models.
    #[arg(long, default_value_t = 10)]
    bag_size: usize,
    /// Frames between bag insertions.
    #[arg(long, default_value_t = 5)]
    update_every: usize,
    /// Weight of the origin term in the affine distance.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Likelihood temperature.
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Diffusion standard deviations as SX,SY,SS.
    #[arg(long, default_value = "4,4,0.01", value_parser = parse_motion_std)]
    motion_std: MotionStd,
    /// Scale clamp as MIN,MAX.
    #[arg(long, default_value = "0.5,2.0", value_parser = parse_scale_range)]
    scale_range: ScaleRange,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DistanceArg::Affine)]
    distance: DistanceArg,
    /// Noise variance of the kl distance.
    #[arg(long, default_value_t = 0.01)]
    kl_sigma2: f64,
    /// Also write frame copies with the estimate drawn as a white box.
    #[arg(long)]
    overlay: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Result CSV produced by `track`.
    #[arg(long)]
    records: PathBuf,
    /// Ground-truth file, one x,y,w,h line per frame.
    #[arg(long)]
    truth: PathBuf,
    /// Precision threshold in pixels.
    #[arg(long, default_value_t = 20.0)]
    threshold: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// Destination directory for frames and groundtruth.txt.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    length: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 320)]
    frame_w: u32,
    #[arg(long, default_value_t = 240)]
    frame_h: u32,
    #[arg(long, default_value_t = 40)]
    object_w: u32,
    #[arg(long, default_value_t = 40)]
    object_h: u32,
    #[arg(long, value_enum, default_value_t = TrajectoryArg::Linear)]
    trajectory: TrajectoryArg,
    /// Amplitude of the global illumination drift, in [0, 1].
    #[arg(long, default_value_t = 0.15)]
    illumination: f64,
    #[arg(long, default_value_t = 4.0)]
    noise_std: f64,
    /// Cover the object's lower half for ten mid-sequence frames.
    #[arg(long)]
    occluder: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistanceArg {
    Affine,
    Kl,
}

#[derive(Clone, Copy, ValueEnum)]
enum TrajectoryArg {
    Linear,
    Sinusoidal,
}

#[derive(Clone, Copy)]
struct InitBox {
    x: f64,
    y: f64,
    w: u32,
    h: u32,
}

#[derive(Clone, Copy)]
struct MotionStd {
    x: f64,
    y: f64,
    s: f64,
}

#[derive(Clone, Copy)]
struct ScaleRange {
    min: f64,
    max: f64,
}

fn split_fields<const N: usize>(s: &str, what: &str) -> std::result::Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {} comma-separated values for {}", N, what));
    }
    let mut out = [0.0; N];
    for (v, p) in out.iter_mut().zip(&parts) {
        *v = p.trim().parse::<f64>().map_err(|_| format!("bad number {:?} in {}", p, what))?;
    }
    Ok(out)
}

fn parse_init(s: &str) -> std::result::Result<InitBox, String> {
    let [x, y, w, h] = split_fields(s, "--init")?;
    if w < 1.0 || h < 1.0 || w.fract() != 0.0 || h.fract() != 0.0 || w > u32::MAX as f64 || h > u32::MAX as f64 {
        return Err("box width and height must be positive integers".into());
    }
    Ok(InitBox { x, y, w: w as u32, h: h as u32 })
}

fn parse_motion_std(s: &str) -> std::result::Result<MotionStd, String> {
    let [x, y, z] = split_fields(s, "--motion-std")?;
    Ok(MotionStd { x, y, s: z })
}

fn parse_scale_range(s: &str) -> std::result::Result<ScaleRange, String> {
    let [min, max] = split_fields(s, "--scale-range")?;
    Ok(ScaleRange { min, max })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Track(args) => cmd_track(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("grasstrack: {err}");
            ExitCode::from(2)
        }
    }
}

fn cmd_track(args: TrackArgs) -> Result<()> {
    let frames = load_frames(&args.frames)?;
    let init = BoxState::new(args.init.x, args.init.y, 1.0, args.init.w, args.init.h)?;
    let config = TrackerConfig {
        history_len: args.history,
        subspace_dim: args.subdim,
        bag_capacity: args.bag_size,
        bag_update_period: args.update_every,
        alpha: args.alpha,
        sigma: args.sigma,
        motion: MotionParams {
            n_particles: args.particles,
            std_x: args.motion_std.x,
            std_y: args.motion_std.y,
            std_s: args.motion_std.s,
            s_min: args.scale_range.min,
            s_max: args.scale_range.max,
        },
        seed: args.seed,
        distance: match args.distance {
            DistanceArg::Affine => DistanceKind::Affine,
            DistanceArg::Kl => DistanceKind::Kl { sigma_sq: args.kl_sigma2 },
        },
    };
    let records = run(&frames, &init, &config)?;
    save_records(&args.out, &records)?;
    if let Some(dir) = &args.overlay {
        write_overlays(&args.frames, &frames, &records, dir)?;
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let records = load_records(&args.records)?;
    let truth = load_truth(&args.truth)?;
    let report = evaluate(&records, &truth, args.threshold)?;
    println!("mean_cle={:.6} precision={:.6}", report.mean_cle, report.precision);
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        length: args.length,
        frame_w: args.frame_w,
        frame_h: args.frame_h,
        object_w: args.object_w,
        object_h: args.object_h,
        trajectory: match args.trajectory {
            TrajectoryArg::Linear => Trajectory::Linear,
            TrajectoryArg::Sinusoidal => Trajectory::Sinusoidal,
        },
        illumination_amplitude: args.illumination,
        occluder: args.occluder,
        noise_std: args.noise_std,
        seed: args.seed,
    };
    generate_synthetic(&spec, &args.out)
}

/// Writes a copy of each input frame with a one-pixel white box at the
/// estimate, keeping the source file names.
fn write_overlays(
    src_dir: &Path,
    frames: &[Frame],
    records: &[TrackRecord<f64>],
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let names = list_pgm_files(src_dir)?;
    for (frame, record) in frames.iter().zip(records) {
        let mut pixels = frame.pixels().to_vec();
        draw_box(&mut pixels, frame.width(), frame.height(), &record.state);
        let name = names[frame.index() as usize - 1]
            .file_name()
            .expect("listed frame paths always carry a file name")
            .to_owned();
        write_pgm(&dir.join(name), frame.width(), frame.height(), &pixels)?;
    }
    Ok(())
}

fn draw_box(pixels: &mut [u8], width: u32, height: u32, state: &BoxState<f64>) {
    let (x0, y0) = state.anchor();
    let (x1, y1) = (x0 + state.region_w() - 1, y0 + state.region_h() - 1);
    let mut paint = |x: i64, y: i64| {
        if (0..width as i64).contains(&x) && (0..height as i64).contains(&y) {
            pixels[y as usize * width as usize + x as usize] = 255;
        }
    };
    for x in x0..=x1 {
        paint(x, y0);
        paint(x, y1);
    }
    for y in y0..=y1 {
        paint(x0, y);
        paint(x1, y);
    }
}
