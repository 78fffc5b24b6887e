//! Persistence and ingestion: MNIST IDX parsing, run configuration,
//! checkpoints, and deterministic CSV export.
//!
//! Everything here is deterministic: the same inputs produce byte-identical
//! files (fixed field order, fixed float formatting).

pub mod checkpoint;
pub mod config;
pub mod csv;
pub mod idx;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use config::{config_hash, load_config, RunConfig};
pub use csv::{format_float, write_csv, CsvValue};
pub use idx::{load_idx, IdxDataset, IdxImages};
