//! Planar color images: 8-bit file I/O and seeded Gaussian noise.

use std::fs;
use std::io::{BufWriter, Cursor};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fdcalc::ScalarField;
use crate::par;

/// Smallest extent along either axis that the stencils accept.
pub const MIN_EXTENT: usize = 3;

/// Name of the noise generator, recorded next to any reported numbers.
pub const NOISE_RNG: &str = "ChaCha8(seed_from_u64, stream=channel*height+row) + StandardNormal";

/// Stack of equally sized channel planes, samples nominally in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarImage {
    width: usize,
    height: usize,
    planes: Vec<ScalarField>,
}

impl PlanarImage {
    pub fn new(planes: Vec<ScalarField>) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::argument("image needs at least one channel"))?;
        let (width, height) = (first.width(), first.height());
        if width < MIN_EXTENT || height < MIN_EXTENT {
            return Err(Error::argument(format!(
                "image is {width}x{height}, both sides must be at least {MIN_EXTENT}"
            )));
        }
        if planes.len() != 1 && planes.len() != 3 {
            return Err(Error::argument(format!(
                "expected 1 or 3 channels, got {}",
                planes.len()
            )));
        }
        if planes.iter().any(|p| !p.same_shape(first)) {
            return Err(Error::argument("channel planes differ in size"));
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    /// Three-channel image from `f(channel, x, y)`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        Self::new(
            (0..3)
                .map(|c| ScalarField::from_fn(width, height, |x, y| f(c, x, y)))
                .collect(),
        )
    }

    /// Interleaved 8-bit RGB, mapped to `[0, 1]` by division by 255.
    pub fn from_rgb8(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::argument(format!(
                "rgb buffer has {} bytes, expected {}",
                rgb.len(),
                width * height * 3
            )));
        }
        Self::from_fn(width, height, |c, x, y| {
            f64::from(rgb[(y * width + x) * 3 + c]) / 255.0
        })
    }

    /// Interleaved 8-bit RGB after clamping and rounding.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height * 3);
        for i in 0..self.width * self.height {
            for c in 0..3 {
                let plane = &self.planes[c.min(self.planes.len() - 1)];
                out.push(quantize(plane.data()[i]));
            }
        }
        out
    }

    /// Interleaved 8-bit RGBA (opaque), the layout browsers expect.
    pub fn to_rgba8(&self) -> Vec<u8> {
        let rgb = self.to_rgb8();
        let mut out = Vec::with_capacity(rgb.len() / 3 * 4);
        for px in rgb.chunks_exact(3) {
            out.extend_from_slice(px);
            out.push(255);
        }
        out
    }

    /// Grayscale plane replicated into three identical channels.
    pub fn from_gray(plane: ScalarField) -> Result<Self> {
        Self::new(vec![plane.clone(), plane.clone(), plane])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn plane(&self, c: usize) -> &ScalarField {
        &self.planes[c]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut ScalarField {
        &mut self.planes[c]
    }

    pub fn planes(&self) -> &[ScalarField] {
        &self.planes
    }

    pub fn into_planes(self) -> Vec<ScalarField> {
        self.planes
    }

    pub fn same_shape(&self, other: &PlanarImage) -> bool {
        self.width == other.width && self.height == other.height && self.channels() == other.channels()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> PlanarImage {
        PlanarImage {
            width: self.width,
            height: self.height,
            planes: self.planes.iter().map(|p| p.map(f)).collect(),
        }
    }

    /// Every sample clamped into `[0, 1]`.
    pub fn normalized(&self) -> PlanarImage {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    pub fn is_finite(&self) -> bool {
        self.planes.iter().all(ScalarField::is_finite)
    }

    pub fn max_abs(&self) -> f64 {
        self.planes.iter().fold(0.0, |m, p| m.max(p.max_abs()))
    }

    /// Largest per-pixel spread between channels; zero for achromatic images.
    pub fn channel_spread(&self) -> f64 {
        let mut spread = 0.0f64;
        for i in 0..self.width * self.height {
            let (lo, hi) = self.planes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                let v = p.data()[i];
                (lo.min(v), hi.max(v))
            });
            spread = spread.max(hi - lo);
        }
        spread
    }

    /// Quarter turn counter-clockwise, see [`ScalarField::rotate90`].
    pub fn rotate90(&self) -> PlanarImage {
        PlanarImage {
            width: self.height,
            height: self.width,
            planes: self.planes.iter().map(ScalarField::rotate90).collect(),
        }
    }

    /// Channel order replaced by `order`, e.g. `[2, 0, 1]`.
    pub fn permute_channels(&self, order: [usize; 3]) -> PlanarImage {
        PlanarImage {
            width: self.width,
            height: self.height,
            planes: order.iter().map(|&c| self.planes[c].clone()).collect(),
        }
    }
}

#[inline]
fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Reads an 8-bit PNG or binary PPM (P6). Alpha is dropped and gray is
/// replicated to three channels.
pub fn load(path: impl AsRef<Path>) -> Result<PlanarImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|message| Error::format(path, message))
}

/// Decodes PNG or P6 bytes; the error string names the offending property.
pub fn decode(bytes: &[u8]) -> std::result::Result<PlanarImage, String> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(bytes)
    } else if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else {
        Err("unrecognized file signature (expected PNG or binary PPM P6)".into())
    }
}

fn decode_png(bytes: &[u8]) -> std::result::Result<PlanarImage, String> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| format!("png: {e}"))?;
    let info = reader.info();
    if info.bit_depth != png::BitDepth::Eight {
        return Err(format!(
            "bit depth {} (only 8-bit is supported)",
            info.bit_depth as u8
        ));
    }
    if info.color_type == png::ColorType::Indexed {
        return Err("color type indexed (palette) is not supported".into());
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| "png: image too large".to_string())?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(|e| format!("png: {e}"))?;
    let stride = frame.color_type.samples();
    let (w, h) = (frame.width as usize, frame.height as usize);
    let line = frame.line_size;
    let sample = |c: usize, x: usize, y: usize| -> f64 {
        let c = if stride < 3 { 0 } else { c };
        f64::from(buf[y * line + x * stride + c]) / 255.0
    };
    PlanarImage::from_fn(w, h, sample).map_err(|e| e.to_string())
}

fn decode_ppm(bytes: &[u8]) -> std::result::Result<PlanarImage, String> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err("ppm: truncated header".into()),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| "ppm: malformed header field".to_string())?;
    }
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(format!("ppm maxval {maxval} (only 8-bit, maxval 255, is supported)"));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err("ppm: missing separator after header".into());
    }
    let data = &bytes[pos + 1..];
    if data.len() < w * h * 3 {
        return Err(format!("ppm: pixel data truncated ({} of {} bytes)", data.len(), w * h * 3));
    }
    PlanarImage::from_rgb8(w, h, &data[..w * h * 3]).map_err(|e| e.to_string())
}

/// Writes an 8-bit PNG (RGB, or gray for single-channel images) after
/// clamping to `[0, 1]` and rounding `255 v`.
pub fn save(img: &PlanarImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width() as u32, img.height() as u32);
    let data = if img.channels() == 1 {
        encoder.set_color(png::ColorType::Grayscale);
        img.plane(0).data().iter().map(|&v| quantize(v)).collect()
    } else {
        encoder.set_color(png::ColorType::Rgb);
        img.to_rgb8()
    };
    encoder.set_depth(png::BitDepth::Eight);
    let to_io = |e: png::EncodingError| match e {
        png::EncodingError::IoError(e) => Error::io(path, e),
        other => Error::io(path, std::io::Error::other(other)),
    };
    let mut writer = encoder.write_header().map_err(to_io)?;
    writer.write_image_data(&data).map_err(to_io)?;
    writer.finish().map_err(to_io)
}

/// Adds independent `N(0, (sigma_n / 255)^2)` noise to every sample.
///
/// `sigma_n` is on the 0..255 scale. The result is not clamped. Each
/// (channel, row) pair draws from its own ChaCha stream, so the output is
/// independent of thread count.
pub fn add_gaussian_noise(img: &PlanarImage, sigma_n: f64, seed: u64) -> Result<PlanarImage> {
    if !(sigma_n >= 0.0) || !sigma_n.is_finite() {
        return Err(Error::argument(format!("noise sigma must be >= 0, got {sigma_n}")));
    }
    if sigma_n == 0.0 {
        return Ok(img.clone());
    }
    let std = sigma_n / 255.0;
    let (w, h) = (img.width, img.height);
    let planes = img
        .planes
        .iter()
        .enumerate()
        .map(|(c, plane)| {
            let mut out = plane.clone();
            par::for_each_row(out.data_mut(), w, |y, row| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((c * h + y) as u64);
                for v in row.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v += std * z;
                }
            });
            out
        })
        .collect();
    Ok(PlanarImage {
        width: w,
        height: h,
        planes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_scale_endpoints() {
        let img = PlanarImage::from_rgb8(3, 3, &[[255u8, 0, 51]; 9].concat()).unwrap();
        assert_eq!(img.plane(0).get(0, 0), 1.0);
        assert_eq!(img.plane(1).get(1, 1), 0.0);
        assert_eq!(img.plane(2).get(2, 2), 0.2);
    }

    #[test]
    fn quantization_rules() {
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(-0.2), 0);
        assert_eq!(quantize(0.5), 128);
        assert_eq!(quantize(7.0), 255);
    }

    #[test]
    fn rejects_tiny_and_mismatched_planes() {
        assert!(PlanarImage::new(vec![ScalarField::zeros(2, 5)]).is_err());
        assert!(PlanarImage::new(vec![ScalarField::zeros(4, 4), ScalarField::zeros(4, 5), ScalarField::zeros(4, 4)]).is_err());
        assert!(PlanarImage::new(vec![ScalarField::zeros(4, 4); 2]).is_err());
        assert!(PlanarImage::new(vec![]).is_err());
    }

    #[test]
    fn zero_sigma_noise_is_identity() {
        let img = PlanarImage::from_fn(5, 4, |c, x, y| (c + x + y) as f64 / 10.0).unwrap();
        assert_eq!(add_gaussian_noise(&img, 0.0, 99).unwrap(), img);
        assert!(add_gaussian_noise(&img, -1.0, 99).is_err());
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let img = PlanarImage::from_fn(16, 9, |_, _, _| 0.5).unwrap();
        let a = add_gaussian_noise(&img, 20.0, 7).unwrap();
        let b = add_gaussian_noise(&img, 20.0, 7).unwrap();
        let c = add_gaussian_noise(&img, 20.0, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn ppm_header_with_comment() {
        let mut bytes = b"P6\n# made by hand\n3 3\n255\n".to_vec();
        bytes.extend((0..27).map(|i| (i * 9) as u8));
        let img = decode(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (3, 3));
        assert_eq!(img.plane(1).get(0, 0), 9.0 / 255.0);

        let bad = b"P6 3 3 65535\n".to_vec();
        assert!(decode(&bad).unwrap_err().contains("maxval 65535"));
    }

    #[test]
    fn unknown_signature() {
        assert!(decode(b"GIF89a").unwrap_err().contains("signature"));
    }
}
