//! The `nerf-vfx` command line.
//!
//! Exit codes: 0 success, 2 invalid input or flags, 3 math errors
//! (singular matrices), 4 I/O errors (missing, unreadable or unwritable
//! files). All diagnostics go to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::compositor::{composite_sequence, CompositeJob, CompositeOp, SequenceError, SequencePattern};
use crate::fsio::write_atomic;
use crate::interchange::{parse_interchange, InterchangeError, ParseReport, SceneInterchange};
use crate::pathgen::{build_path, serialize_path, PathError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MATH: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "nerf-vfx", version, about = "NeRF camera paths and render-pass compositing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a renderer camera path aligned to the NeRF proxy.
    ExportPath(ExportPathArgs),
    /// Composite numbered PNG sequences.
    Composite(CompositeArgs),
    /// Check a scene interchange file and report warnings.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct ExportPathArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Scene units to meters; overrides the document's `real_scale`.
    #[arg(long, value_parser = positive_f64)]
    pub real_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub scene: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Over,
    Shadow,
}

#[derive(Debug, Args)]
pub struct CompositeArgs {
    pub mode: Mode,
    /// RGB render sequence (over mode only).
    #[arg(long)]
    pub fg: Option<String>,
    /// Accumulation mask (over) or shadow pass (shadow).
    #[arg(long)]
    pub mask: String,
    #[arg(long)]
    pub bg: String,
    #[arg(long)]
    pub out: String,
    /// Inclusive frame range, `A..B`.
    #[arg(long, value_parser = frame_range, allow_hyphen_values = true)]
    pub frames: (i64, i64),
    /// Shadow strength in [0, 1] (shadow mode only, default 1).
    #[arg(long)]
    pub strength: Option<f32>,
    /// Frames composited concurrently (default: all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn frame_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `A..B`, got `{s}`"))?;
    let start: i64 = a.trim().parse().map_err(|_| format!("bad start frame `{a}`"))?;
    let end: i64 = b.trim().parse().map_err(|_| format!("bad end frame `{b}`"))?;
    if start > end {
        return Err(format!("empty frame range {start}..{end}"));
    }
    Ok((start, end))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, diag: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(diag, "{}", e.render());
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::ExportPath(a) => export_path_cmd(&a.scene, &a.out, a.real_scale, diag),
        Command::Validate(a) => validate_cmd(&a.scene, diag),
        Command::Composite(a) => composite_cmd(&a, diag),
    }
}

fn interchange_exit(e: &InterchangeError) -> i32 {
    match e {
        InterchangeError::SingularMatrix { .. } => EXIT_MATH,
        _ => EXIT_INVALID,
    }
}

fn read_scene(
    path: &Path,
    diag: &mut dyn Write,
) -> Result<(SceneInterchange, ParseReport), i32> {
    let bytes = std::fs::read(path).map_err(|e| {
        let _ = writeln!(diag, "error: cannot read {}: {e}", path.display());
        EXIT_IO
    })?;
    parse_interchange(&bytes).map_err(|e| {
        let _ = writeln!(diag, "error: {}: {e}", path.display());
        interchange_exit(&e)
    })
}

fn print_warnings(report: &ParseReport, diag: &mut dyn Write) {
    for w in &report.warnings {
        let _ = writeln!(diag, "warning: {w}");
    }
}

pub fn export_path_cmd(
    scene_file: &Path,
    out_file: &Path,
    real_scale_override: Option<f64>,
    diag: &mut dyn Write,
) -> i32 {
    let (mut scene, report) = match read_scene(scene_file, diag) {
        Ok(v) => v,
        Err(code) => return code,
    };
    print_warnings(&report, diag);
    if let Some(s) = real_scale_override {
        scene.real_scale = Some(s);
    }
    let doc = match build_path(&scene) {
        Ok(doc) => doc,
        Err(e) => {
            let _ = writeln!(diag, "error: {}: {e}", scene_file.display());
            return match e {
                PathError::SingularMatrix { .. } => EXIT_MATH,
                _ => EXIT_INVALID,
            };
        }
    };
    if let Err(e) = write_atomic(out_file, &serialize_path(&doc)) {
        let _ = writeln!(diag, "error: cannot write {}: {e}", out_file.display());
        return EXIT_IO;
    }
    let _ = writeln!(
        diag,
        "wrote {} frames to {}",
        doc.entries.len(),
        out_file.display()
    );
    EXIT_OK
}

pub fn validate_cmd(scene_file: &Path, diag: &mut dyn Write) -> i32 {
    match read_scene(scene_file, diag) {
        Ok((scene, report)) => {
            print_warnings(&report, diag);
            let _ = writeln!(
                diag,
                "{}: {} frames, {} warnings, 0 errors",
                scene_file.display(),
                scene.frame_count(),
                report.warnings.len()
            );
            EXIT_OK
        }
        Err(EXIT_IO) => EXIT_IO,
        Err(_) => {
            let _ = writeln!(diag, "{}: 1 error", scene_file.display());
            EXIT_INVALID
        }
    }
}

pub fn composite_cmd(args: &CompositeArgs, diag: &mut dyn Write) -> i32 {
    let invalid = |diag: &mut dyn Write, msg: &str| {
        let _ = writeln!(diag, "error: {msg}");
        EXIT_INVALID
    };
    let op = match (args.mode, args.strength) {
        (Mode::Over, Some(_)) => return invalid(diag, "--strength only applies to shadow mode"),
        (Mode::Over, None) => CompositeOp::Over,
        (Mode::Shadow, s) => {
            let strength = s.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&strength) {
                return invalid(diag, &format!("--strength must be within [0, 1], got {strength}"));
            }
            CompositeOp::Shadow { strength }
        }
    };
    match (args.mode, &args.fg) {
        (Mode::Over, None) => return invalid(diag, "over mode requires --fg"),
        (Mode::Shadow, Some(_)) => return invalid(diag, "--fg is not used in shadow mode"),
        _ => {}
    }
    let (start, end) = args.frames;
    let pattern = |t: &str| SequencePattern::new(t, start, end);
    let job = match (|| {
        Ok::<_, crate::compositor::PatternError>(CompositeJob {
            op,
            fg: args.fg.as_deref().map(pattern).transpose()?,
            mask: pattern(&args.mask)?,
            bg: pattern(&args.bg)?,
            out: pattern(&args.out)?,
            jobs: args.jobs,
        })
    })() {
        Ok(job) => job,
        Err(e) => return invalid(diag, &e.to_string()),
    };
    let result = {
        let diag = &mut *diag;
        composite_sequence(&job, |frame| {
            let _ = writeln!(diag, "frame {frame} ok");
        })
    };
    match result {
        Ok(n) => {
            let _ = writeln!(diag, "composited {n} frames");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            match e {
                SequenceError::StrengthOutOfRange(_)
                | SequenceError::MissingForeground
                | SequenceError::RangeMismatch { .. } => EXIT_INVALID,
                _ => EXIT_IO,
            }
        }
    }
}
