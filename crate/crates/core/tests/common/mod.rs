#![allow(dead_code)]

use std::path::PathBuf;

use nerf_vfx::compositor::ImagePlane;
use nerf_vfx::xform::Mat4;
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

/// translation · rotation · uniform scale, with scale in [0.1, 10] and
/// translation in [-100, 100].
pub fn random_affine(rng: &mut impl Rng) -> Mat4 {
    let axis = loop {
        let a = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if a.iter().map(|v: &f64| v * v).sum::<f64>() > 1e-3 {
            break a;
        }
    };
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = rng.gen_range(0.1..10.0);
    Mat4::translation(
        rng.gen_range(-100.0..100.0),
        rng.gen_range(-100.0..100.0),
        rng.gen_range(-100.0..100.0),
    ) * Mat4::rotation(axis, angle)
        * Mat4::scale(s, s, s)
}

/// Random 8-bit-representable image.
pub fn random_plane(rng: &mut impl Rng, w: u32, h: u32, channels: u8) -> ImagePlane {
    let n = (w * h) as usize * channels as usize;
    let samples = (0..n)
        .map(|_| f32::from(rng.gen_range(0u8..=255)) / 255.0)
        .collect();
    ImagePlane::new(w, h, channels, samples, 8).unwrap()
}

/// Scalar per-pixel reference for straight-alpha over.
pub fn reference_over(fg: &ImagePlane, bg: &ImagePlane) -> Vec<f32> {
    let mut out = Vec::new();
    for y in 0..bg.height() {
        for x in 0..bg.width() {
            let f = fg.pixel(x, y);
            let b = bg.pixel(x, y);
            let a = f[3];
            for c in 0..3 {
                let v = a * f[c] + (1.0 - a) * b[c];
                out.push(v.max(f[c].min(b[c])).min(f[c].max(b[c])));
            }
            if bg.channels() == 4 {
                out.push((a + (1.0 - a) * b[3]).clamp(0.0, 1.0));
            }
        }
    }
    out
}

/// Scalar reference for the shadow-catcher multiply.
pub fn reference_shadow(bg: &ImagePlane, mask: &ImagePlane, strength: f32) -> Vec<f32> {
    let mut out = Vec::new();
    for y in 0..bg.height() {
        for x in 0..bg.width() {
            let b = bg.pixel(x, y);
            let m = mask.pixel(x, y)[0];
            for c in 0..bg.channels() as usize {
                out.push(if c == 3 { b[c] } else { b[c] * (1.0 - strength * m) });
            }
        }
    }
    out
}

/// Back-to-front fold of [`reference_over`], one pixel at a time.
pub fn reference_stack(layers: &[ImagePlane], bg: &ImagePlane) -> Vec<f32> {
    let mut acc = bg.clone();
    for layer in layers {
        let samples = reference_over(layer, &acc);
        acc = ImagePlane::new(acc.width(), acc.height(), acc.channels(), samples, 8).unwrap();
    }
    acc.samples().to_vec()
}

pub fn to_u8(samples: &[f32]) -> Vec<u8> {
    samples
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8)
        .collect()
}

use nerf_vfx::interchange::{InterchangeError, Track};
use serde_json::{json, Value};

/// A valid three-frame document used as the base for mutation tests.
pub fn base_document() -> Value {
    let frames = |f: i64| {
        json!({
            "frame": f,
            "world": Mat4::translation(0.0, f as f64, 5.0).as_row_major().to_vec(),
            "focal_length_mm": 35.0,
            "sensor_width_mm": 36.0,
            "sensor_height_mm": 24.0,
            "sensor_fit": "AUTO"
        })
    };
    json!({
        "version": 1,
        "fps": 24.0,
        "frame_start": 1,
        "frame_end": 3,
        "render": {"width": 1280, "height": 720},
        "camera_type": "perspective",
        "camera": {"frames": [frames(1), frames(2), frames(3)]},
        "nerf_object": {"name": "poster", "frames": [
            {"frame": 1, "world": Mat4::IDENTITY.as_row_major().to_vec()},
            {"frame": 2, "world": Mat4::translation(1.0, 0.0, 0.0).as_row_major().to_vec()},
            {"frame": 3, "world": Mat4::scale(2.0, 2.0, 2.0).as_row_major().to_vec()}
        ]}
    })
}

pub struct Mutation {
    pub name: &'static str,
    pub apply: fn(&mut Value),
    pub expected: InterchangeError,
}

fn schema(path: &str, expected: &'static str) -> InterchangeError {
    InterchangeError::SchemaViolation {
        path: path.into(),
        expected,
    }
}

fn non_positive(path: &str) -> InterchangeError {
    InterchangeError::NonPositive { path: path.into() }
}

/// Every single-field corruption of [`base_document`] and the error it must produce.
pub fn mutations() -> Vec<Mutation> {
    use InterchangeError as E;
    vec![
        Mutation { name: "future version", apply: |d| d["version"] = json!(2), expected: E::UnsupportedVersion(2) },
        Mutation { name: "version as string", apply: |d| d["version"] = json!("1"), expected: schema("version", "integer") },
        Mutation { name: "version missing", apply: |d| { d.as_object_mut().unwrap().remove("version"); }, expected: schema("version", "required field") },
        Mutation { name: "zero fps", apply: |d| d["fps"] = json!(0), expected: non_positive("fps") },
        Mutation { name: "negative fps", apply: |d| d["fps"] = json!(-24.0), expected: non_positive("fps") },
        Mutation { name: "fps as string", apply: |d| d["fps"] = json!("24"), expected: schema("fps", "number") },
        Mutation { name: "start after end", apply: |d| d["frame_start"] = json!(5), expected: E::InvalidFrameRange { start: 5, end: 3 } },
        Mutation { name: "start as float", apply: |d| d["frame_start"] = json!(1.5), expected: schema("frame_start", "integer") },
        Mutation { name: "range extends past samples", apply: |d| d["frame_end"] = json!(4), expected: E::FrameCoverageGap { track: Track::Camera, frame: 4 } },
        Mutation { name: "range starts before samples", apply: |d| d["frame_start"] = json!(0), expected: E::FrameCoverageGap { track: Track::Camera, frame: 0 } },
        Mutation { name: "zero width", apply: |d| d["render"]["width"] = json!(0), expected: non_positive("render.width") },
        Mutation { name: "negative height", apply: |d| d["render"]["height"] = json!(-720), expected: non_positive("render.height") },
        Mutation { name: "fractional width", apply: |d| d["render"]["width"] = json!(1280.5), expected: schema("render.width", "integer") },
        Mutation { name: "render missing", apply: |d| { d.as_object_mut().unwrap().remove("render"); }, expected: schema("render", "required field") },
        Mutation { name: "unknown camera type", apply: |d| d["camera_type"] = json!("fisheye"), expected: schema("camera_type", "\"perspective\" or \"equirectangular\"") },
        Mutation { name: "negative real scale", apply: |d| d["real_scale"] = json!(-1.0), expected: non_positive("real_scale") },
        Mutation { name: "real scale as string", apply: |d| d["real_scale"] = json!("half"), expected: schema("real_scale", "number") },
        Mutation { name: "camera not an object", apply: |d| d["camera"] = json!([]), expected: schema("camera", "object") },
        Mutation { name: "camera frames not an array", apply: |d| d["camera"]["frames"] = json!({}), expected: schema("camera.frames", "array") },
        Mutation { name: "camera frame out of range", apply: |d| d["camera"]["frames"][1]["frame"] = json!(7), expected: E::FrameOutOfRange { track: Track::Camera, frame: 7 } },
        Mutation { name: "duplicate camera frame", apply: |d| d["camera"]["frames"][1]["frame"] = json!(1), expected: E::DuplicateFrame { track: Track::Camera, frame: 1 } },
        Mutation { name: "proxy frame missing", apply: |d| { d["nerf_object"]["frames"].as_array_mut().unwrap().remove(1); }, expected: E::FrameCoverageGap { track: Track::Nerf, frame: 2 } },
        Mutation { name: "short matrix", apply: |d| { d["camera"]["frames"][0]["world"].as_array_mut().unwrap().pop(); }, expected: schema("camera.frames[0].world", "array of 16 numbers") },
        Mutation { name: "non-numeric matrix element", apply: |d| d["camera"]["frames"][0]["world"][3] = json!("x"), expected: schema("camera.frames[0].world", "array of 16 numbers") },
        Mutation { name: "projective bottom row", apply: |d| d["camera"]["frames"][0]["world"][15] = json!(2.0), expected: E::NotAffine { track: Track::Camera, frame: 1 } },
        Mutation { name: "singular proxy", apply: |d| d["nerf_object"]["frames"][2]["world"][10] = json!(0.0), expected: E::SingularMatrix { track: Track::Nerf, frame: 3 } },
        Mutation { name: "singular camera", apply: |d| d["camera"]["frames"][1]["world"][0] = json!(0.0), expected: E::SingularMatrix { track: Track::Camera, frame: 2 } },
        Mutation { name: "zero focal length", apply: |d| d["camera"]["frames"][1]["focal_length_mm"] = json!(0.0), expected: non_positive("camera.frames[1].focal_length_mm") },
        Mutation { name: "negative sensor width", apply: |d| d["camera"]["frames"][2]["sensor_width_mm"] = json!(-36.0), expected: non_positive("camera.frames[2].sensor_width_mm") },
        Mutation { name: "sensor height missing", apply: |d| { d["camera"]["frames"][0].as_object_mut().unwrap().remove("sensor_height_mm"); }, expected: schema("camera.frames[0].sensor_height_mm", "required field") },
        Mutation { name: "unknown sensor fit", apply: |d| d["camera"]["frames"][0]["sensor_fit"] = json!("DIAGONAL"), expected: schema("camera.frames[0].sensor_fit", "\"AUTO\", \"HORIZONTAL\" or \"VERTICAL\"") },
        Mutation { name: "proxy name not a string", apply: |d| d["nerf_object"]["name"] = json!(5), expected: schema("nerf_object.name", "string") },
        Mutation { name: "proxy frame number missing", apply: |d| { d["nerf_object"]["frames"][0].as_object_mut().unwrap().remove("frame"); }, expected: schema("nerf_object.frames[0].frame", "required field") },
    ]
}
