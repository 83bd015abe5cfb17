//! On-disk formats: IQ capture files and trained-model containers.
//!
//! Both formats are little-endian with a fixed magic and version so captures
//! interoperate with SDR tooling and golden-file tests stay bit-exact. The
//! model container carries a CRC-32 over its payload; a corrupted file fails
//! loudly instead of predicting garbage.

mod bytes;
mod capture;
mod model;

pub use capture::{read_capture, write_capture, CAPTURE_MAGIC, CAPTURE_VERSION};
pub use model::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};

pub(crate) use bytes::{crc32, ByteReader, ByteWriter};
