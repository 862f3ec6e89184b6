//! Single-image compositing operators. Straight (unpremultiplied) alpha,
//! display-referred values, no color management.

use super::{CompositeError, ImagePlane};

fn same_size(a: &ImagePlane, b: &ImagePlane) -> Result<(), CompositeError> {
    if a.width() == b.width() && a.height() == b.height() {
        Ok(())
    } else {
        Err(CompositeError::DimensionMismatch {
            expected: (a.width(), a.height()),
            found: (b.width(), b.height()),
        })
    }
}

fn require_channels(img: &ImagePlane, allowed: &[u8], role: &'static str) -> Result<(), CompositeError> {
    if allowed.contains(&img.channels()) {
        Ok(())
    } else {
        Err(CompositeError::ChannelMismatch {
            role,
            channels: img.channels(),
        })
    }
}

/// Builds an RGBA layer from an RGB render and its accumulation pass.
///
/// The alpha is channel 0 of `accumulation`, so a gray mask saved as RGB
/// works unchanged. An existing alpha channel on `rgb` is discarded.
pub fn attach_alpha(rgb: &ImagePlane, accumulation: &ImagePlane) -> Result<ImagePlane, CompositeError> {
    require_channels(rgb, &[3, 4], "rgb")?;
    same_size(rgb, accumulation)?;
    let (rc, ac) = (rgb.channels() as usize, accumulation.channels() as usize);
    let mut samples = Vec::with_capacity(rgb.pixel_count() * 4);
    for (px, acc) in rgb
        .samples()
        .chunks_exact(rc)
        .zip(accumulation.samples().chunks_exact(ac))
    {
        samples.extend_from_slice(&px[..3]);
        samples.push(acc[0]);
    }
    Ok(ImagePlane::from_parts_unchecked(
        rgb.width(),
        rgb.height(),
        4,
        samples,
        rgb.source_bit_depth(),
    ))
}

/// `a·fg + (1−a)·bg`, kept inside `[min(fg, bg), max(fg, bg)]` so rounding
/// cannot push the result past either input.
#[inline]
pub(crate) fn blend(fg: f32, bg: f32, a: f32) -> f32 {
    let v = a * fg + (1.0 - a) * bg;
    v.clamp(fg.min(bg), fg.max(bg))
}

/// Straight-alpha over. The result has the background's channel count and
/// bit depth; a background alpha is combined as `a + (1−a)·bg_a`.
pub fn over(fg: &ImagePlane, bg: &ImagePlane) -> Result<ImagePlane, CompositeError> {
    require_channels(fg, &[4], "foreground")?;
    require_channels(bg, &[3, 4], "background")?;
    same_size(bg, fg)?;
    let bc = bg.channels() as usize;
    let mut samples = Vec::with_capacity(bg.samples().len());
    for (f, b) in fg.samples().chunks_exact(4).zip(bg.samples().chunks_exact(bc)) {
        let a = f[3];
        for c in 0..3 {
            samples.push(blend(f[c], b[c], a));
        }
        if bc == 4 {
            samples.push((a + (1.0 - a) * b[3]).clamp(0.0, 1.0));
        }
    }
    Ok(ImagePlane::from_parts_unchecked(
        bg.width(),
        bg.height(),
        bg.channels(),
        samples,
        bg.source_bit_depth(),
    ))
}

/// Composites `layers` (back to front) over `background`.
pub fn stack(layers: &[ImagePlane], background: &ImagePlane) -> Result<ImagePlane, CompositeError> {
    layers
        .iter()
        .try_fold(background.clone(), |acc, layer| over(layer, &acc))
}

/// Darkens `bg` by a shadow-catcher pass: `bg·(1 − strength·mask)`.
///
/// The mask is read from channel 0. Alpha, if present, is left untouched.
pub fn apply_shadow(
    bg: &ImagePlane,
    shadow_mask: &ImagePlane,
    strength: f32,
) -> Result<ImagePlane, CompositeError> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(CompositeError::StrengthOutOfRange(strength));
    }
    require_channels(bg, &[1, 3, 4], "background")?;
    same_size(bg, shadow_mask)?;
    let (bc, mc) = (bg.channels() as usize, shadow_mask.channels() as usize);
    let color = if bc == 4 { 3 } else { bc };
    let mut samples = Vec::with_capacity(bg.samples().len());
    for (b, m) in bg
        .samples()
        .chunks_exact(bc)
        .zip(shadow_mask.samples().chunks_exact(mc))
    {
        let keep = 1.0 - strength * m[0];
        samples.extend(b[..color].iter().map(|v| v * keep));
        if bc == 4 {
            samples.push(b[3]);
        }
    }
    Ok(ImagePlane::from_parts_unchecked(
        bg.width(),
        bg.height(),
        bg.channels(),
        samples,
        bg.source_bit_depth(),
    ))
}
