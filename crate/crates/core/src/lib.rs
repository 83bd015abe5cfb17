//! Waveform-classification toolkit for non-orthogonal multicarrier signals.
//!
//! The crate covers the full pipeline: OFDM/SEFDM symbol synthesis, channel
//! impairment (AWGN, multipath, unsynchronized truncation), statistical and
//! wavelet time-frequency feature extraction, and multiclass classification
//! with an ECOC model built from one-vs-one polynomial-kernel SVMs. The
//! [`harness`] module ties the stages into reproducible train/sweep
//! experiments and the [`io`] module defines the on-disk capture, model, and
//! report formats consumed by the `wvcl` command-line tool.
//!
//! With the default `parallel` feature the batch stages (dataset generation,
//! learner training, batch prediction) run data-parallel on a rayon pool;
//! without it everything falls back to sequential loops with identical
//! results.

pub mod channel;
pub mod config;
pub mod cwt;
pub mod error;
pub mod exec;
pub mod harness;
pub mod io;
pub mod stats;
pub mod svm;
pub mod waveform;

mod fft;

pub use error::{Error, Result};
