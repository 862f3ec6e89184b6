//! Camera path documents for the NeRF renderer.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::fov::{vertical_fov, FovError, EQUIRECTANGULAR_FOV};
use crate::interchange::{CameraType, SceneInterchange};
use crate::xform::{align_camera, Mat4};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("NeRF proxy matrix at frame {frame} is singular")]
    SingularMatrix { frame: i64 },
    #[error("invalid lens at frame {frame}: {source}")]
    Lens { frame: i64, source: FovError },
    #[error("real-world scale must be strictly positive, got {0}")]
    NonPositiveScale(f64),
}

/// One pose of the path, in NeRF space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPathEntry {
    pub camera_to_world: Mat4,
    /// Vertical field of view, degrees.
    pub fov: f64,
    pub aspect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraPathDocument {
    pub camera_type: CameraType,
    pub render_width: u32,
    pub render_height: u32,
    pub fps: f64,
    pub seconds: f64,
    pub entries: Vec<CameraPathEntry>,
}

/// Aligns every frame of `scene` to its NeRF proxy and computes its FOV.
/// The scene's `real_scale`, if any, is applied last.
pub fn build_path(scene: &SceneInterchange) -> Result<CameraPathDocument, PathError> {
    let aspect = f64::from(scene.render_width) / f64::from(scene.render_height);
    let results: Vec<Result<CameraPathEntry, PathError>> = (0..scene.frame_count())
        .into_par_iter()
        .map(|i| {
            let frame = scene.frame_start + i as i64;
            let camera_to_world = align_camera(&scene.camera_frames[i], &scene.nerf_frames[i])
                .map_err(|_| PathError::SingularMatrix { frame })?;
            let fov = match scene.camera_type {
                CameraType::Perspective => {
                    vertical_fov(&scene.lens[i], scene.render_width, scene.render_height)
                        .map_err(|source| PathError::Lens { frame, source })?
                }
                CameraType::Equirectangular => EQUIRECTANGULAR_FOV,
            };
            Ok(CameraPathEntry {
                camera_to_world,
                fov,
                aspect,
            })
        })
        .collect();
    let entries = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let doc = CameraPathDocument {
        camera_type: scene.camera_type,
        render_width: scene.render_width,
        render_height: scene.render_height,
        fps: scene.fps,
        seconds: entries.len() as f64 / scene.fps,
        entries,
    };
    match scene.real_scale {
        Some(scale) => apply_real_scale(doc, scale),
        None => Ok(doc),
    }
}

/// Scales camera positions by `scale`, leaving orientation and FOV alone.
/// This is a uniform scale of NeRF space about its origin.
pub fn apply_real_scale(
    mut doc: CameraPathDocument,
    scale: f64,
) -> Result<CameraPathDocument, PathError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(PathError::NonPositiveScale(scale));
    }
    for entry in &mut doc.entries {
        let [x, y, z] = entry.camera_to_world.translation_part();
        entry.camera_to_world = entry
            .camera_to_world
            .with_translation([x * scale, y * scale, z * scale]);
    }
    Ok(doc)
}

fn push_float(out: &mut String, v: f64) {
    // -0.0 comes out of inverting zero translations; emit it as 0.0
    let v = if v == 0.0 { 0.0 } else { v };
    out.push_str(&serde_json::to_string(&v).expect("finite float"));
}

/// Serializes `doc` deterministically: fixed key order, shortest
/// round-trip floats, two-space indent, LF line endings.
pub fn serialize_path(doc: &CameraPathDocument) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"camera_type\": \"{}\",", doc.camera_type.as_str());
    let _ = writeln!(out, "  \"render_height\": {},", doc.render_height);
    let _ = writeln!(out, "  \"render_width\": {},", doc.render_width);
    out.push_str("  \"camera_path\": [");
    for (i, entry) in doc.entries.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str("    {\n      \"camera_to_world\": [");
        for (j, v) in entry.camera_to_world.as_row_major().iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            push_float(&mut out, *v);
        }
        out.push_str("],\n      \"fov\": ");
        push_float(&mut out, entry.fov);
        out.push_str(",\n      \"aspect\": ");
        push_float(&mut out, entry.aspect);
        out.push_str("\n    }");
    }
    if !doc.entries.is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("],\n  \"fps\": ");
    push_float(&mut out, doc.fps);
    out.push_str(",\n  \"seconds\": ");
    push_float(&mut out, doc.seconds);
    out.push_str(",\n  \"is_cycle\": false,\n  \"smoothness_value\": 0.0\n}\n");
    out.into_bytes()
}
