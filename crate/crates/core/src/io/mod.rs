//! File formats (PGM frames, CSV records, ground truth), evaluation
//! metrics, and the synthetic sequence generator.

pub mod eval;
pub mod pgm;
pub mod records;
pub mod synth;

pub use eval::{center_errors, evaluate, MetricsReport};
pub use pgm::{list_pgm_files, load_frames, read_pgm, write_pgm};
pub use records::{
    load_records, load_truth, records_to_csv, save_records, save_truth, RecordRow, TruthBox,
    RECORDS_HEADER,
};
pub use synth::{generate_synthetic, render_sequence, SynthSpec, Trajectory};
