use std::io::Cursor;

use super::CompositeError;

/// A decoded raster with samples normalized to `[0, 1]`.
///
/// Samples are interleaved, row-major, top-left origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: u32,
    height: u32,
    channels: u8,
    samples: Vec<f32>,
    source_bit_depth: u8,
}

impl ImagePlane {
    pub fn new(
        width: u32,
        height: u32,
        channels: u8,
        samples: Vec<f32>,
        source_bit_depth: u8,
    ) -> Result<Self, CompositeError> {
        if !matches!(channels, 1 | 3 | 4) {
            return Err(CompositeError::InvalidImage(format!(
                "unsupported channel count {channels}"
            )));
        }
        if !matches!(source_bit_depth, 8 | 16) {
            return Err(CompositeError::InvalidImage(format!(
                "unsupported bit depth {source_bit_depth}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if samples.len() != expected {
            return Err(CompositeError::InvalidImage(format!(
                "{} samples for a {width}x{height}x{channels} image",
                samples.len()
            )));
        }
        if let Some(v) = samples.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CompositeError::InvalidImage(format!(
                "sample {v} outside [0, 1]"
            )));
        }
        Ok(ImagePlane {
            width,
            height,
            channels,
            samples,
            source_bit_depth,
        })
    }

    /// An image with every sample set to `value`.
    pub fn filled(
        width: u32,
        height: u32,
        channels: u8,
        value: f32,
        source_bit_depth: u8,
    ) -> Result<Self, CompositeError> {
        let n = width as usize * height as usize * channels as usize;
        Self::new(width, height, channels, vec![value; n], source_bit_depth)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn source_bit_depth(&self) -> u8 {
        self.source_bit_depth
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn pixel(&self, x: u32, y: u32) -> &[f32] {
        let c = self.channels as usize;
        let i = (y as usize * self.width as usize + x as usize) * c;
        &self.samples[i..i + c]
    }

    pub fn has_alpha(&self) -> bool {
        self.channels == 4
    }

    /// Same samples, re-tagged to encode at `bit_depth`.
    pub fn with_bit_depth(mut self, bit_depth: u8) -> Result<Self, CompositeError> {
        if !matches!(bit_depth, 8 | 16) {
            return Err(CompositeError::InvalidImage(format!(
                "unsupported bit depth {bit_depth}"
            )));
        }
        self.source_bit_depth = bit_depth;
        Ok(self)
    }

    pub(crate) fn from_parts_unchecked(
        width: u32,
        height: u32,
        channels: u8,
        samples: Vec<f32>,
        source_bit_depth: u8,
    ) -> Self {
        debug_assert_eq!(
            samples.len(),
            width as usize * height as usize * channels as usize
        );
        ImagePlane {
            width,
            height,
            channels,
            samples,
            source_bit_depth,
        }
    }

    /// Decodes an 8- or 16-bit PNG. Palette and sub-byte images are expanded
    /// to 8 bits; gray+alpha becomes RGBA.
    pub fn decode_png(bytes: &[u8]) -> Result<Self, CompositeError> {
        let mut decoder = png::Decoder::new(Cursor::new(bytes));
        decoder.set_transformations(png::Transformations::EXPAND);
        let mut reader = decoder
            .read_info()
            .map_err(|e| CompositeError::Decode(e.to_string()))?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| CompositeError::Decode("image too large".into()))?;
        let mut buf = vec![0; size];
        let info = reader
            .next_frame(&mut buf)
            .map_err(|e| CompositeError::Decode(e.to_string()))?;
        buf.truncate(info.buffer_size());

        let depth: u8 = match info.bit_depth {
            png::BitDepth::Eight => 8,
            png::BitDepth::Sixteen => 16,
            other => {
                return Err(CompositeError::Decode(format!(
                    "unexpected bit depth {other:?} after expansion"
                )))
            }
        };
        let raw: Vec<f32> = if depth == 16 {
            buf.chunks_exact(2)
                .map(|b| f32::from(u16::from_be_bytes([b[0], b[1]])) / 65535.0)
                .collect()
        } else {
            buf.iter().map(|&b| f32::from(b) / 255.0).collect()
        };
        let (channels, samples) = match info.color_type {
            png::ColorType::Grayscale => (1, raw),
            png::ColorType::Rgb => (3, raw),
            png::ColorType::Rgba => (4, raw),
            png::ColorType::GrayscaleAlpha => (
                4,
                raw.chunks_exact(2)
                    .flat_map(|ga| [ga[0], ga[0], ga[0], ga[1]])
                    .collect(),
            ),
            png::ColorType::Indexed => {
                return Err(CompositeError::Decode(
                    "palette image was not expanded".into(),
                ))
            }
        };
        Ok(Self::from_parts_unchecked(
            info.width,
            info.height,
            channels,
            samples,
            depth,
        ))
    }

    /// Encodes at `source_bit_depth`, rounding half away from zero.
    pub fn encode_png(&self) -> Result<Vec<u8>, CompositeError> {
        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, self.width, self.height);
            encoder.set_color(match self.channels {
                1 => png::ColorType::Grayscale,
                3 => png::ColorType::Rgb,
                _ => png::ColorType::Rgba,
            });
            encoder.set_depth(if self.source_bit_depth == 16 {
                png::BitDepth::Sixteen
            } else {
                png::BitDepth::Eight
            });
            let mut writer = encoder
                .write_header()
                .map_err(|e| CompositeError::Encode(e.to_string()))?;
            writer
                .write_image_data(&self.quantized_bytes())
                .map_err(|e| CompositeError::Encode(e.to_string()))?;
            writer
                .finish()
                .map_err(|e| CompositeError::Encode(e.to_string()))?;
        }
        Ok(out)
    }

    /// Big-endian sample bytes at `source_bit_depth`.
    pub fn quantized_bytes(&self) -> Vec<u8> {
        if self.source_bit_depth == 16 {
            self.samples
                .iter()
                .flat_map(|&v| quantize_u16(v).to_be_bytes())
                .collect()
        } else {
            self.samples.iter().map(|&v| quantize_u8(v)).collect()
        }
    }
}

pub fn quantize_u8(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn quantize_u16(v: f32) -> u16 {
    (v.clamp(0.0, 1.0) * 65535.0).round() as u16
}
