//! Result records CSV and ground-truth box files.
//!
//! Records: header `frame,x,y,s,w,h,score`; x, y, s, score carry six
//! fractional digits, w and h are the rounded scaled box size. Ground
//! truth: bare `x,y,w,h` integer lines, line i describing frame i.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tracker::TrackRecord;

pub const RECORDS_HEADER: &str = "frame,x,y,s,w,h,score";

/// One row of a results file, as parsed back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub s: f64,
    pub w: i64,
    pub h: i64,
    pub score: f64,
}

/// A ground-truth box; `w` and `h` are positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthBox {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

pub fn records_to_csv<T: Real>(records: &[TrackRecord<T>]) -> String {
    let mut out = String::with_capacity(32 * (records.len() + 1));
    out.push_str(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let row = format!(
            "{},{:.6},{:.6},{:.6},{},{},{:.6}\n",
            r.frame_index,
            r.state.x.to_f64().unwrap(),
            r.state.y.to_f64().unwrap(),
            r.state.s.to_f64().unwrap(),
            r.state.region_w(),
            r.state.region_h(),
            r.score.to_f64().unwrap(),
        );
        out.push_str(&row);
    }
    out
}

pub fn save_records<T: Real>(path: &Path, records: &[TrackRecord<T>]) -> Result<()> {
    fs::write(path, records_to_csv(records))?;
    Ok(())
}

pub fn load_records(path: &Path) -> Result<Vec<RecordRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == RECORDS_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse {
                line: 1,
                reason: format!("expected header {:?}, got {:?}", RECORDS_HEADER, header),
            })
        }
        None => {
            return Err(Error::Parse { line: 1, reason: "empty records file".into() });
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                reason: format!("bad {}: {:?}", what, s),
            })
        };
        let parse_i = |s: &str, what: &str| -> Result<i64> {
            s.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                reason: format!("bad {}: {:?}", what, s),
            })
        };
        rows.push(RecordRow {
            frame: parse_i(fields[0], "frame")? as usize,
            x: parse_f(fields[1], "x")?,
            y: parse_f(fields[2], "y")?,
            s: parse_f(fields[3], "s")?,
            w: parse_i(fields[4], "w")?,
            h: parse_i(fields[5], "h")?,
            score: parse_f(fields[6], "score")?,
        });
    }
    Ok(rows)
}

pub fn save_truth(path: &Path, boxes: &[TruthBox]) -> Result<()> {
    let mut out = String::with_capacity(16 * boxes.len());
    for b in boxes {
        out.push_str(&format!("{},{},{},{}\n", b.x, b.y, b.w, b.h));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn load_truth(path: &Path) -> Result<Vec<TruthBox>> {
    let text = fs::read_to_string(path)?;
    let mut boxes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("expected x,y,w,h, got {} fields", fields.len()),
            });
        }
        let mut vals = [0i64; 4];
        for (v, f) in vals.iter_mut().zip(fields.iter()) {
            *v = f.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                reason: format!("bad integer: {:?}", f),
            })?;
        }
        if vals[2] <= 0 || vals[3] <= 0 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("box size must be positive, got {}x{}", vals[2], vals[3]),
            });
        }
        boxes.push(TruthBox { x: vals[0], y: vals[1], w: vals[2], h: vals[3] });
    }
    Ok(boxes)
}
