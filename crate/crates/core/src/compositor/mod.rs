//! Compositing NeRF render passes: accumulation-as-alpha, layered over,
//! shadow-catcher darkening, and the same operations over numbered PNG
//! sequences.

mod image;
mod ops;
mod sequence;

use thiserror::Error;

pub use image::{quantize_u16, quantize_u8, ImagePlane};
pub use ops::{apply_shadow, attach_alpha, over, stack};
pub use sequence::{
    composite_frame, composite_sequence, CompositeJob, CompositeOp, PatternError, Role,
    SequenceError, SequencePattern,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompositeError {
    #[error("image size {}x{} does not match {}x{}", found.0, found.1, expected.0, expected.1)]
    DimensionMismatch { expected: (u32, u32), found: (u32, u32) },
    #[error("{role} image has {channels} channels")]
    ChannelMismatch { role: &'static str, channels: u8 },
    #[error("shadow strength must be within [0, 1], got {0}")]
    StrengthOutOfRange(f32),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("PNG decode failed: {0}")]
    Decode(String),
    #[error("PNG encode failed: {0}")]
    Encode(String),
}
