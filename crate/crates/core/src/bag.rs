//! Bag of appearance models: a FIFO ring of up to `capacity` affine
//! subspaces, refreshed at a fixed cadence.
//!
//! Insertions are driven by a counter of frames offered since the last
//! insertion, not by a global clock: a model is accepted when the counter
//! reaches the update period (or the bag is still empty), and the counter
//! resets on every insertion.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grassmann::AffineSubspace;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct ModelBag<T> {
    models: Vec<AffineSubspace<T>>,
    capacity: usize,
    update_period: usize,
    frames_since_update: usize,
}

impl<T: Real> ModelBag<T> {
    pub fn new(capacity: usize, update_period: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid_input("bag capacity must be positive"));
        }
        if update_period == 0 {
            return Err(Error::invalid_input("bag update period must be positive"));
        }
        Ok(ModelBag {
            models: Vec::with_capacity(capacity),
            capacity,
            update_period,
            frames_since_update: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn update_period(&self) -> usize {
        self.update_period
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Models in insertion order, oldest first.
    pub fn all_models(&self) -> &[AffineSubspace<T>] {
        &self.models
    }

    /// Offers this frame's accepted model; inserts it if an update is due.
    /// Returns whether the bag changed. The oldest model is evicted when the
    /// bag is full.
    pub fn maybe_update(&mut self, model: AffineSubspace<T>) -> Result<bool> {
        if let Some(existing) = self.models.first() {
            if existing.ambient_dim() != model.ambient_dim() {
                return Err(Error::invalid_input(format!(
                    "model ambient dimension {} does not match bag dimension {}",
                    model.ambient_dim(),
                    existing.ambient_dim()
                )));
            }
        }
        if self.models.is_empty() {
            self.models.push(model);
            self.frames_since_update = 0;
            return Ok(true);
        }
        self.frames_since_update += 1;
        if self.frames_since_update < self.update_period {
            return Ok(false);
        }
        if self.models.len() == self.capacity {
            self.models.remove(0);
        }
        self.models.push(model);
        self.frames_since_update = 0;
        Ok(true)
    }

    /// Debugging aid: writes one text file per model into `dir`, each a
    /// D x (1 + r) matrix whose first column is the origin and remaining
    /// columns are the basis, in the plain matrix text format (a `rows cols`
    /// header line, then one whitespace-separated row per line).
    pub fn dump_snapshot(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (i, model) in self.models.iter().enumerate() {
            let path = dir.join(format!("model_{:03}.txt", i));
            let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            let d = model.ambient_dim();
            let r = model.rank();
            writeln!(file, "{} {}", d, 1 + r)?;
            for row in 0..d {
                write!(file, "{:.17e}", model.origin()[row].to_f64().unwrap())?;
                for col in 0..r {
                    write!(file, " {:.17e}", model.span().basis().get(row, col).to_f64().unwrap())?;
                }
                writeln!(file)?;
            }
        }
        Ok(())
    }
}
