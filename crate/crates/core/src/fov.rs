//! Field of view written into camera paths.
//!
//! The renderer's `fov` field is the vertical field of view in degrees.
//! [`vertical_fov`] is the only place that convention is encoded.

use thiserror::Error;

/// `fov` value emitted for equirectangular cameras, which have no pinhole FOV.
pub const EQUIRECTANGULAR_FOV: f64 = 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FovError {
    #[error("{0} must be strictly positive")]
    NonPositiveInput(&'static str),
}

/// Which sensor dimension the lens angle of view is measured across.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SensorFit {
    Horizontal,
    Vertical,
    Auto,
}

impl SensorFit {
    /// Name used by the interchange document.
    pub fn as_str(self) -> &'static str {
        match self {
            SensorFit::Horizontal => "HORIZONTAL",
            SensorFit::Vertical => "VERTICAL",
            SensorFit::Auto => "AUTO",
        }
    }

    pub fn parse(s: &str) -> Option<SensorFit> {
        match s {
            "HORIZONTAL" => Some(SensorFit::Horizontal),
            "VERTICAL" => Some(SensorFit::Vertical),
            "AUTO" => Some(SensorFit::Auto),
            _ => None,
        }
    }
}

/// A [`SensorFit`] with `Auto` resolved against a render resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolvedFit {
    Horizontal,
    Vertical,
}

/// Lens state at one frame. Lengths are in millimetres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensSample {
    pub focal_length: f64,
    pub sensor_width: f64,
    pub sensor_height: f64,
    pub fit: SensorFit,
}

impl LensSample {
    pub fn new(
        focal_length: f64,
        sensor_width: f64,
        sensor_height: f64,
        fit: SensorFit,
    ) -> Result<Self, FovError> {
        positive(focal_length, "focal_length")?;
        positive(sensor_width, "sensor_width")?;
        positive(sensor_height, "sensor_height")?;
        Ok(LensSample {
            focal_length,
            sensor_width,
            sensor_height,
            fit,
        })
    }
}

fn positive(v: f64, what: &'static str) -> Result<f64, FovError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(FovError::NonPositiveInput(what))
    }
}

/// Pinhole angle of view in radians across `sensor_extent`.
pub fn angle_of_view(focal_length: f64, sensor_extent: f64) -> Result<f64, FovError> {
    positive(focal_length, "focal_length")?;
    positive(sensor_extent, "sensor_extent")?;
    Ok(2.0 * (sensor_extent / (2.0 * focal_length)).atan())
}

/// Resolves `Auto` to horizontal when `width >= height`, vertical otherwise.
pub fn effective_fit(fit: SensorFit, render_width: u32, render_height: u32) -> ResolvedFit {
    match fit {
        SensorFit::Horizontal => ResolvedFit::Horizontal,
        SensorFit::Vertical => ResolvedFit::Vertical,
        SensorFit::Auto if render_width >= render_height => ResolvedFit::Horizontal,
        SensorFit::Auto => ResolvedFit::Vertical,
    }
}

/// Vertical field of view in degrees for `sample` rendered at the given size.
///
/// With a horizontal fit the lens angle spans the image width, so the
/// vertical extent is narrowed by the render aspect ratio.
///
/// ```
/// use nerf_vfx::fov::{vertical_fov, LensSample, SensorFit};
///
/// // 18 mm on a 36 mm wide sensor is a 90° horizontal view.
/// let lens = LensSample::new(18.0, 36.0, 24.0, SensorFit::Horizontal).unwrap();
/// let v = vertical_fov(&lens, 1920, 1080).unwrap();
/// assert!((v - 58.7156).abs() < 1e-3);
/// ```
pub fn vertical_fov(
    sample: &LensSample,
    render_width: u32,
    render_height: u32,
) -> Result<f64, FovError> {
    if render_width == 0 {
        return Err(FovError::NonPositiveInput("render_width"));
    }
    if render_height == 0 {
        return Err(FovError::NonPositiveInput("render_height"));
    }
    let radians = match effective_fit(sample.fit, render_width, render_height) {
        ResolvedFit::Vertical => angle_of_view(sample.focal_length, sample.sensor_height)?,
        ResolvedFit::Horizontal => {
            let horizontal = angle_of_view(sample.focal_length, sample.sensor_width)?;
            let aspect = f64::from(render_height) / f64::from(render_width);
            2.0 * ((horizontal / 2.0).tan() * aspect).atan()
        }
    };
    Ok(radians.to_degrees())
}
