//! The scene interchange document: sampled camera and proxy animation plus
//! render settings, as exported from the 3D editor.
//!
//! Parsing is strict about everything the camera path depends on and
//! lenient about keys it does not know (those produce warnings).

use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::fov::{LensSample, SensorFit};
use crate::xform::{Mat4, ScaleAnalysis};

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CameraType {
    Perspective,
    Equirectangular,
}

impl CameraType {
    pub fn as_str(self) -> &'static str {
        match self {
            CameraType::Perspective => "perspective",
            CameraType::Equirectangular => "equirectangular",
        }
    }

    pub fn parse(s: &str) -> Option<CameraType> {
        match s {
            "perspective" => Some(CameraType::Perspective),
            "equirectangular" => Some(CameraType::Equirectangular),
            _ => None,
        }
    }
}

/// Which animated object a per-frame sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Track {
    Camera,
    Nerf,
}

impl fmt::Display for Track {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Track::Camera => "camera",
            Track::Nerf => "nerf_object",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterchangeError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("schema violation at `{path}`: expected {expected}")]
    SchemaViolation { path: String, expected: &'static str },
    #[error("unsupported interchange version {0} (expected {SCHEMA_VERSION})")]
    UnsupportedVersion(i64),
    #[error("`{path}` must be strictly positive")]
    NonPositive { path: String },
    #[error("frame_start {start} is after frame_end {end}")]
    InvalidFrameRange { start: i64, end: i64 },
    #[error("{track} track has no sample for frame {frame}")]
    FrameCoverageGap { track: Track, frame: i64 },
    #[error("{track} track has more than one sample for frame {frame}")]
    DuplicateFrame { track: Track, frame: i64 },
    #[error("{track} track has a sample for frame {frame}, outside the frame range")]
    FrameOutOfRange { track: Track, frame: i64 },
    #[error("{track} matrix at frame {frame} is not affine (bottom row must be 0 0 0 1)")]
    NotAffine { track: Track, frame: i64 },
    #[error("{track} matrix at frame {frame} is singular")]
    SingularMatrix { track: Track, frame: i64 },
}

impl InterchangeError {
    /// Stable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            InterchangeError::MalformedDocument(_) => "MalformedDocument",
            InterchangeError::SchemaViolation { .. } => "SchemaViolation",
            InterchangeError::UnsupportedVersion(_) => "UnsupportedVersion",
            InterchangeError::NonPositive { .. } => "NonPositive",
            InterchangeError::InvalidFrameRange { .. } => "InvalidFrameRange",
            InterchangeError::FrameCoverageGap { .. } => "FrameCoverageGap",
            InterchangeError::DuplicateFrame { .. } => "DuplicateFrame",
            InterchangeError::FrameOutOfRange { .. } => "FrameOutOfRange",
            InterchangeError::NotAffine { .. } => "NotAffine",
            InterchangeError::SingularMatrix { .. } => "SingularMatrix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WarningCode {
    UnknownKey,
    NonUniformScale,
}

impl WarningCode {
    pub fn as_str(self) -> &'static str {
        match self {
            WarningCode::UnknownKey => "UNKNOWN_KEY",
            WarningCode::NonUniformScale => "NONUNIFORM_SCALE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    /// `None` for document-level warnings.
    pub frame: Option<i64>,
    pub code: WarningCode,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.frame {
            Some(frame) => write!(f, "frame {frame}: {}: {}", self.code.as_str(), self.message),
            None => write!(f, "{}: {}", self.code.as_str(), self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseReport {
    pub warnings: Vec<Warning>,
    /// Scale analysis of every proxy frame whose scale is not uniform.
    pub nonuniform_scale: Vec<(i64, ScaleAnalysis)>,
}

/// A validated scene export. The per-frame vectors are indexed by
/// `frame - frame_start` and all have the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneInterchange {
    pub version: i64,
    pub fps: f64,
    pub frame_start: i64,
    pub frame_end: i64,
    pub render_width: u32,
    pub render_height: u32,
    pub camera_type: CameraType,
    pub real_scale: Option<f64>,
    pub nerf_name: Option<String>,
    pub lens: Vec<LensSample>,
    pub camera_frames: Vec<Mat4>,
    pub nerf_frames: Vec<Mat4>,
}

impl SceneInterchange {
    pub fn frame_count(&self) -> usize {
        self.camera_frames.len()
    }

    pub fn frames(&self) -> impl Iterator<Item = i64> {
        self.frame_start..=self.frame_end
    }
}

struct Ctx {
    warnings: Vec<Warning>,
}

impl Ctx {
    fn unknown_keys(&mut self, obj: &Map<String, Value>, path: &str, known: &[&str], frame: Option<i64>) {
        for key in obj.keys().filter(|k| !known.contains(&k.as_str())) {
            let at = if path.is_empty() {
                key.clone()
            } else {
                format!("{path}.{key}")
            };
            self.warnings.push(Warning {
                frame,
                code: WarningCode::UnknownKey,
                message: format!("ignoring unknown key `{at}`"),
            });
        }
    }
}

fn violation(path: impl Into<String>, expected: &'static str) -> InterchangeError {
    InterchangeError::SchemaViolation {
        path: path.into(),
        expected,
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_owned()
    } else {
        format!("{path}.{key}")
    }
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, InterchangeError> {
    obj.get(key).ok_or_else(|| violation(join(path, key), "required field"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, InterchangeError> {
    v.as_object().ok_or_else(|| violation(path, "object"))
}

fn integer(obj: &Map<String, Value>, path: &str, key: &str) -> Result<i64, InterchangeError> {
    field(obj, path, key)?
        .as_i64()
        .ok_or_else(|| violation(join(path, key), "integer"))
}

fn number(obj: &Map<String, Value>, path: &str, key: &str) -> Result<f64, InterchangeError> {
    field(obj, path, key)?
        .as_f64()
        .ok_or_else(|| violation(join(path, key), "number"))
}

fn positive_number(obj: &Map<String, Value>, path: &str, key: &str) -> Result<f64, InterchangeError> {
    let v = number(obj, path, key)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(InterchangeError::NonPositive { path: join(path, key) })
    }
}

fn dimension(obj: &Map<String, Value>, path: &str, key: &str) -> Result<u32, InterchangeError> {
    let v = integer(obj, path, key)?;
    if v <= 0 {
        return Err(InterchangeError::NonPositive { path: join(path, key) });
    }
    u32::try_from(v).map_err(|_| violation(join(path, key), "integer within 32-bit range"))
}

fn string<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a str, InterchangeError> {
    field(obj, path, key)?
        .as_str()
        .ok_or_else(|| violation(join(path, key), "string"))
}

fn matrix(obj: &Map<String, Value>, path: &str, track: Track, frame: i64) -> Result<Mat4, InterchangeError> {
    let path = join(path, "world");
    let arr = obj
        .get("world")
        .ok_or_else(|| violation(path.clone(), "required field"))?
        .as_array()
        .filter(|a| a.len() == 16)
        .ok_or_else(|| violation(path.clone(), "array of 16 numbers"))?;
    let mut m = [0.0; 16];
    for (slot, v) in m.iter_mut().zip(arr) {
        *slot = v
            .as_f64()
            .ok_or_else(|| violation(path.clone(), "array of 16 numbers"))?;
    }
    let m = Mat4::from_row_major(m);
    if !m.is_affine() {
        return Err(InterchangeError::NotAffine { track, frame });
    }
    m.invert()
        .map_err(|_| InterchangeError::SingularMatrix { track, frame })?;
    Ok(m)
}

/// Sorts samples by frame and checks they cover `start..=end` exactly once.
fn check_coverage<T>(
    mut samples: Vec<(i64, T)>,
    track: Track,
    start: i64,
    end: i64,
) -> Result<Vec<T>, InterchangeError> {
    if let Some(&(frame, _)) = samples.iter().find(|(f, _)| *f < start || *f > end) {
        return Err(InterchangeError::FrameOutOfRange { track, frame });
    }
    samples.sort_by_key(|(f, _)| *f);
    if let Some(w) = samples.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(InterchangeError::DuplicateFrame { track, frame: w[0].0 });
    }
    let mut expected = start;
    for (frame, _) in &samples {
        if *frame != expected {
            return Err(InterchangeError::FrameCoverageGap { track, frame: expected });
        }
        expected += 1;
    }
    if expected <= end {
        return Err(InterchangeError::FrameCoverageGap { track, frame: expected });
    }
    Ok(samples.into_iter().map(|(_, v)| v).collect())
}

fn frames_array<'a>(
    root: &'a Map<String, Value>,
    key: &str,
    ctx: &mut Ctx,
    known: &[&str],
) -> Result<&'a Vec<Value>, InterchangeError> {
    let track = object(field(root, "", key)?, key)?;
    ctx.unknown_keys(track, key, known, None);
    let path = join(key, "frames");
    field(track, key, "frames")?
        .as_array()
        .ok_or_else(|| violation(path, "array"))
}

/// Parses and validates an interchange document.
pub fn parse_interchange(bytes: &[u8]) -> Result<(SceneInterchange, ParseReport), InterchangeError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| InterchangeError::MalformedDocument(format!("invalid UTF-8: {e}")))?;
    let root: Value =
        serde_json::from_str(text).map_err(|e| InterchangeError::MalformedDocument(e.to_string()))?;
    let root = object(&root, "$")?;
    let mut ctx = Ctx { warnings: Vec::new() };
    ctx.unknown_keys(
        root,
        "",
        &[
            "version",
            "fps",
            "frame_start",
            "frame_end",
            "render",
            "camera_type",
            "real_scale",
            "camera",
            "nerf_object",
        ],
        None,
    );

    let version = integer(root, "", "version")?;
    if version != SCHEMA_VERSION {
        return Err(InterchangeError::UnsupportedVersion(version));
    }
    let fps = positive_number(root, "", "fps")?;
    let frame_start = integer(root, "", "frame_start")?;
    let frame_end = integer(root, "", "frame_end")?;
    if frame_start > frame_end {
        return Err(InterchangeError::InvalidFrameRange {
            start: frame_start,
            end: frame_end,
        });
    }

    let render = object(field(root, "", "render")?, "render")?;
    ctx.unknown_keys(render, "render", &["width", "height"], None);
    let render_width = dimension(render, "render", "width")?;
    let render_height = dimension(render, "render", "height")?;

    let camera_type = CameraType::parse(string(root, "", "camera_type")?)
        .ok_or_else(|| violation("camera_type", "\"perspective\" or \"equirectangular\""))?;

    let real_scale = match root.get("real_scale") {
        None | Some(Value::Null) => None,
        Some(_) => Some(positive_number(root, "", "real_scale")?),
    };

    let mut camera_samples = Vec::new();
    for (i, entry) in frames_array(root, "camera", &mut ctx, &["frames"])?.iter().enumerate() {
        let path = format!("camera.frames[{i}]");
        let obj = object(entry, &path)?;
        let frame = integer(obj, &path, "frame")?;
        ctx.unknown_keys(
            obj,
            &path,
            &[
                "frame",
                "world",
                "focal_length_mm",
                "sensor_width_mm",
                "sensor_height_mm",
                "sensor_fit",
            ],
            Some(frame),
        );
        let world = matrix(obj, &path, Track::Camera, frame)?;
        let focal_length = positive_number(obj, &path, "focal_length_mm")?;
        let sensor_width = positive_number(obj, &path, "sensor_width_mm")?;
        let sensor_height = positive_number(obj, &path, "sensor_height_mm")?;
        let fit = SensorFit::parse(string(obj, &path, "sensor_fit")?).ok_or_else(|| {
            violation(
                join(&path, "sensor_fit"),
                "\"AUTO\", \"HORIZONTAL\" or \"VERTICAL\"",
            )
        })?;
        let lens = LensSample {
            focal_length,
            sensor_width,
            sensor_height,
            fit,
        };
        camera_samples.push((frame, (world, lens)));
    }

    let nerf_name = {
        let track = object(field(root, "", "nerf_object")?, "nerf_object")?;
        match track.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(violation("nerf_object.name", "string")),
        }
    };
    let mut nerf_samples = Vec::new();
    for (i, entry) in frames_array(root, "nerf_object", &mut ctx, &["name", "frames"])?
        .iter()
        .enumerate()
    {
        let path = format!("nerf_object.frames[{i}]");
        let obj = object(entry, &path)?;
        let frame = integer(obj, &path, "frame")?;
        ctx.unknown_keys(obj, &path, &["frame", "world"], Some(frame));
        nerf_samples.push((frame, matrix(obj, &path, Track::Nerf, frame)?));
    }

    let (camera_frames, lens): (Vec<Mat4>, Vec<LensSample>) =
        check_coverage(camera_samples, Track::Camera, frame_start, frame_end)?
            .into_iter()
            .unzip();
    let nerf_frames = check_coverage(nerf_samples, Track::Nerf, frame_start, frame_end)?;

    let mut report = ParseReport {
        warnings: ctx.warnings,
        nonuniform_scale: Vec::new(),
    };
    for (frame, m) in (frame_start..=frame_end).zip(&nerf_frames) {
        let analysis = m.analyze_scale();
        if !analysis.uniform {
            let [x, y, z] = analysis.column_norms;
            report.warnings.push(Warning {
                frame: Some(frame),
                code: WarningCode::NonUniformScale,
                message: format!("NeRF proxy has non-uniform scale ({x}, {y}, {z})"),
            });
            report.nonuniform_scale.push((frame, analysis));
        }
    }

    Ok((
        SceneInterchange {
            version,
            fps,
            frame_start,
            frame_end,
            render_width,
            render_height,
            camera_type,
            real_scale,
            nerf_name,
            lens,
            camera_frames,
            nerf_frames,
        },
        report,
    ))
}

/// Canonical serialization: sorted keys, frames in order, two-space indent.
pub fn serialize_interchange(scene: &SceneInterchange) -> String {
    let camera: Vec<Value> = scene
        .frames()
        .zip(scene.camera_frames.iter().zip(&scene.lens))
        .map(|(frame, (world, lens))| {
            json!({
                "frame": frame,
                "world": world.as_row_major().to_vec(),
                "focal_length_mm": lens.focal_length,
                "sensor_width_mm": lens.sensor_width,
                "sensor_height_mm": lens.sensor_height,
                "sensor_fit": lens.fit.as_str(),
            })
        })
        .collect();
    let nerf: Vec<Value> = scene
        .frames()
        .zip(&scene.nerf_frames)
        .map(|(frame, world)| json!({"frame": frame, "world": world.as_row_major().to_vec()}))
        .collect();
    let mut nerf_object = json!({ "frames": nerf });
    if let Some(name) = &scene.nerf_name {
        nerf_object["name"] = json!(name);
    }
    let mut doc = json!({
        "version": scene.version,
        "fps": scene.fps,
        "frame_start": scene.frame_start,
        "frame_end": scene.frame_end,
        "render": {"width": scene.render_width, "height": scene.render_height},
        "camera_type": scene.camera_type.as_str(),
        "camera": {"frames": camera},
        "nerf_object": nerf_object,
    });
    if let Some(s) = scene.real_scale {
        doc["real_scale"] = json!(s);
    }
    let mut out = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    out.push('\n');
    out
}
