use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use super::{apply_shadow, attach_alpha, over, CompositeError, ImagePlane};
use crate::fsio::write_atomic;

const DEFAULT_PAD: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern `{0}` has no `{{frame}}` placeholder")]
    NoPlaceholder(String),
    #[error("pattern `{0}` has more than one `{{frame}}` placeholder")]
    MultiplePlaceholders(String),
    #[error("pattern `{0}` has a malformed placeholder (expected `{{frame}}` or `{{frame:0N}}`)")]
    BadPlaceholder(String),
    #[error("frame range {start}..{end} is empty")]
    EmptyRange { start: i64, end: i64 },
}

/// A numbered image sequence such as `plate_{frame:04}.png` over an
/// inclusive frame range.
///
/// `{frame}` alone pads to four digits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePattern {
    template: String,
    prefix: String,
    suffix: String,
    pad: usize,
    start: i64,
    end: i64,
}

impl SequencePattern {
    pub fn new(template: &str, start: i64, end: i64) -> Result<Self, PatternError> {
        if start > end {
            return Err(PatternError::EmptyRange { start, end });
        }
        let open = template
            .find("{frame")
            .ok_or_else(|| PatternError::NoPlaceholder(template.to_owned()))?;
        let close = open
            + template[open..]
                .find('}')
                .ok_or_else(|| PatternError::BadPlaceholder(template.to_owned()))?;
        let spec = &template[open + "{frame".len()..close];
        let pad = match spec {
            "" => DEFAULT_PAD,
            s => s
                .strip_prefix(":0")
                .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| PatternError::BadPlaceholder(template.to_owned()))?,
        };
        let suffix = &template[close + 1..];
        if suffix.contains("{frame") {
            return Err(PatternError::MultiplePlaceholders(template.to_owned()));
        }
        Ok(SequencePattern {
            template: template.to_owned(),
            prefix: template[..open].to_owned(),
            suffix: suffix.to_owned(),
            pad,
            start,
            end,
        })
    }

    pub fn template(&self) -> &str {
        &self.template
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn frames(&self) -> impl Iterator<Item = i64> {
        self.start..=self.end
    }

    pub fn path_for(&self, frame: i64) -> PathBuf {
        PathBuf::from(format!(
            "{}{:0pad$}{}",
            self.prefix,
            frame,
            self.suffix,
            pad = self.pad
        ))
    }
}

impl fmt::Display for SequencePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}..{}]", self.template, self.start, self.end)
    }
}

/// Which input sequence a frame came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Foreground,
    Mask,
    Background,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Foreground => "fg",
            Role::Mask => "mask",
            Role::Background => "bg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompositeOp {
    /// RGB render + accumulation mask over the background plate.
    Over,
    /// Background darkened by a shadow-catcher mask.
    Shadow { strength: f32 },
}

#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("{role} sequence is missing frame {frame} ({})", path.display())]
    MissingFrame { role: Role, frame: i64, path: PathBuf },
    #[error("cannot decode {}: {message}", path.display())]
    Decode { path: PathBuf, message: String },
    #[error("frame {frame}: {source}")]
    Composite { frame: i64, source: CompositeError },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{role} sequence covers {start}..{end}, expected {expected_start}..{expected_end}")]
    RangeMismatch {
        role: Role,
        start: i64,
        end: i64,
        expected_start: i64,
        expected_end: i64,
    },
    #[error("over compositing needs a foreground sequence")]
    MissingForeground,
    #[error("shadow strength must be within [0, 1], got {0}")]
    StrengthOutOfRange(f32),
}

impl SequenceError {
    /// Frame the error is attributed to, when there is one.
    pub fn frame(&self) -> Option<i64> {
        match self {
            SequenceError::MissingFrame { frame, .. } | SequenceError::Composite { frame, .. } => {
                Some(*frame)
            }
            _ => None,
        }
    }
}

/// Inputs and output of a per-frame compositing run.
#[derive(Debug, Clone)]
pub struct CompositeJob {
    pub op: CompositeOp,
    /// Required for [`CompositeOp::Over`]; ignored for shadows.
    pub fg: Option<SequencePattern>,
    pub mask: SequencePattern,
    pub bg: SequencePattern,
    pub out: SequencePattern,
    /// Maximum frames composited concurrently; 0 means machine parallelism.
    pub jobs: usize,
}

fn load(pattern: &SequencePattern, role: Role, frame: i64) -> Result<ImagePlane, SequenceError> {
    let path = pattern.path_for(frame);
    let bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(SequenceError::MissingFrame { role, frame, path })
        }
        Err(e) => {
            return Err(SequenceError::Decode {
                path,
                message: e.to_string(),
            })
        }
    };
    ImagePlane::decode_png(&bytes).map_err(|e| SequenceError::Decode {
        path,
        message: e.to_string(),
    })
}

/// Composites one frame and returns the encoded output PNG.
pub fn composite_frame(job: &CompositeJob, frame: i64) -> Result<Vec<u8>, SequenceError> {
    let at = |source| SequenceError::Composite { frame, source };
    let result = match job.op {
        CompositeOp::Over => {
            let fg = job.fg.as_ref().ok_or(SequenceError::MissingForeground)?;
            let rgb = load(fg, Role::Foreground, frame)?;
            let mask = load(&job.mask, Role::Mask, frame)?;
            let bg = load(&job.bg, Role::Background, frame)?;
            let layer = attach_alpha(&rgb, &mask).map_err(at)?;
            over(&layer, &bg).map_err(at)?
        }
        CompositeOp::Shadow { strength } => {
            let mask = load(&job.mask, Role::Mask, frame)?;
            let bg = load(&job.bg, Role::Background, frame)?;
            apply_shadow(&bg, &mask, strength).map_err(at)?
        }
    };
    result.encode_png().map_err(at)
}

fn check_ranges(job: &CompositeJob) -> Result<(), SequenceError> {
    let (expected_start, expected_end) = (job.out.start(), job.out.end());
    let inputs = [
        (Role::Foreground, job.fg.as_ref()),
        (Role::Mask, Some(&job.mask)),
        (Role::Background, Some(&job.bg)),
    ];
    for (role, pattern) in inputs {
        if let Some(p) = pattern {
            if (p.start(), p.end()) != (expected_start, expected_end) {
                return Err(SequenceError::RangeMismatch {
                    role,
                    start: p.start(),
                    end: p.end(),
                    expected_start,
                    expected_end,
                });
            }
        }
    }
    Ok(())
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), SequenceError> {
    write_atomic(path, bytes).map_err(|source| SequenceError::Write {
        path: path.to_owned(),
        source,
    })
}

/// Composites every frame of `job`, writing outputs in frame order.
///
/// Frames are rendered up to `job.jobs` at a time but written strictly in
/// order, so the first failing frame (lowest index) is the one reported and
/// every earlier frame's output is already on disk. `on_frame` is called
/// after each output is written.
pub fn composite_sequence(
    job: &CompositeJob,
    mut on_frame: impl FnMut(i64),
) -> Result<usize, SequenceError> {
    check_ranges(job)?;
    if let CompositeOp::Shadow { strength } = job.op {
        if !(0.0..=1.0).contains(&strength) {
            return Err(SequenceError::StrengthOutOfRange(strength));
        }
    }
    if job.op == CompositeOp::Over && job.fg.is_none() {
        return Err(SequenceError::MissingForeground);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(job.jobs)
        .build()
        .expect("thread pool");
    let batch = pool.current_num_threads().max(1);
    let frames: Vec<i64> = job.out.frames().collect();
    let mut written = 0;
    for chunk in frames.chunks(batch) {
        let rendered: Vec<_> =
            pool.install(|| chunk.par_iter().map(|&f| composite_frame(job, f)).collect());
        for (&frame, result) in chunk.iter().zip(rendered) {
            let bytes = result?;
            write_output(&job.out.path_for(frame), &bytes)?;
            written += 1;
            on_frame(frame);
        }
    }
    Ok(written)
}
