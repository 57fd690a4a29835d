//! Image files, synthetic inputs and the command line around
//! [`elastica_core`].
//!
//! Images are grayscale PGM (`P2`/`P5`, 8 or 16 bit) or PNG, loaded into
//! fields with values in `[0, 1]`. Saving clamps to `[0, 1]` and rounds half
//! up to the output bit depth.

pub mod app;
pub mod error;
pub mod image_io;
pub mod noise;
pub mod synth;
pub mod trace;

pub use app::{Cli, Command, Status};
pub use error::{CliError, Result};
pub use image_io::{load_image, save_image, save_image_as, BitDepth, ImageFormat};
pub use noise::{add_noise, NoiseSpec};
pub use synth::{generate, TestShape};
pub use trace::{parse_trace, write_trace, TRACE_HEADER};
