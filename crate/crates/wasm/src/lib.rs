//! Browser bindings: synthesize a noisy test image, denoise it with any
//! scheme, and render diagnostic maps as RGBA buffers for a canvas.

use chromadiff::diffusion::{coupling_edge_map, input_weights};
use chromadiff::metrics::{combined_ssim_map, evaluate};
use chromadiff::structure::diffusion_tensor;
use chromadiff::synthetic::SyntheticKind;
use chromadiff::tv::{TvConfig, WeightField};
use chromadiff::{add_gaussian_noise, denoise, DiffusionConfig, PlanarImage, SchemeKind};
use wasm_bindgen::prelude::*;

fn js(e: chromadiff::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// A denoised image with its scores against the clean original.
#[wasm_bindgen]
pub struct Restored {
    rgba: Vec<u8>,
    psnr_db: f64,
    mssim: f64,
}

#[wasm_bindgen]
impl Restored {
    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn psnr_db(&self) -> f64 {
        self.psnr_db
    }

    #[wasm_bindgen(getter)]
    pub fn mssim(&self) -> f64 {
        self.mssim
    }
}

/// Clean image, its noisy copy, and the most recent restoration.
#[wasm_bindgen]
pub struct Demo {
    clean: PlanarImage,
    noisy: PlanarImage,
    restored: Option<PlanarImage>,
    weights: Option<WeightField>,
}

impl Demo {
    pub fn try_new(kind: &str, size: usize, sigma_n: f64, seed: u32) -> chromadiff::Result<Demo> {
        let clean = kind.parse::<SyntheticKind>()?.render(size)?;
        Demo::with_clean(clean, sigma_n, seed)
    }

    pub fn try_from_rgba(width: usize, height: usize, rgba: &[u8], sigma_n: f64, seed: u32) -> chromadiff::Result<Demo> {
        if rgba.len() != width * height * 4 {
            return Err(chromadiff::Error::Argument(format!(
                "expected {} RGBA bytes, got {}",
                width * height * 4,
                rgba.len()
            )));
        }
        let rgb: Vec<u8> = rgba.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect();
        Demo::with_clean(PlanarImage::from_rgb8(width, height, &rgb)?, sigma_n, seed)
    }

    fn with_clean(clean: PlanarImage, sigma_n: f64, seed: u32) -> chromadiff::Result<Demo> {
        let noisy = add_gaussian_noise(&clean, sigma_n, u64::from(seed))?;
        Ok(Demo {
            clean,
            noisy,
            restored: None,
            weights: None,
        })
    }

    pub fn try_denoise(&mut self, scheme: &str, iterations: usize, dt: f64, coupling_gain: f64) -> chromadiff::Result<Restored> {
        let cfg = DiffusionConfig {
            iterations,
            dt,
            coupling_gain,
            ..DiffusionConfig::default()
        };
        let out = denoise(&self.noisy, &cfg, scheme.parse::<SchemeKind>()?)?;
        let report = evaluate(&out, &self.clean, false)?;
        let restored = Restored {
            rgba: out.to_rgba8(),
            psnr_db: report.psnr_db,
            mssim: report.mssim,
        };
        self.restored = Some(out);
        Ok(restored)
    }

    fn weights(&mut self) -> chromadiff::Result<&WeightField> {
        if self.weights.is_none() {
            self.weights = Some(input_weights(&self.noisy, &TvConfig::default())?);
        }
        Ok(self.weights.as_ref().expect("weights were just computed"))
    }

    /// `weights`, `coupling`, `edges` (edge indicator of the latest image) or
    /// `ssim` (of the latest restoration), as RGBA.
    pub fn try_diagnostic(&mut self, which: &str) -> chromadiff::Result<Vec<u8>> {
        let latest = self.restored.as_ref().unwrap_or(&self.noisy).clone();
        let map = match which {
            "weights" => return Ok(self.weights()?.to_image().to_rgba8()),
            "coupling" => {
                let noisy = self.noisy.clone();
                coupling_edge_map(&noisy, self.weights()?)?
            }
            "edges" => diffusion_tensor(&latest, DiffusionConfig::default().sigma)?.0.edge.rescaled_unit(),
            "ssim" => combined_ssim_map(&latest, &self.clean)?.rescaled_unit(),
            other => return Err(chromadiff::Error::Argument(format!("unknown diagnostic `{other}`"))),
        };
        Ok(PlanarImage::from_gray(map)?.to_rgba8())
    }
}

#[wasm_bindgen]
impl Demo {
    /// Renders a synthetic image (`disk`, `stripes` or `checkerboard`) and
    /// corrupts it with Gaussian noise of `sigma_n` on the 0..255 scale.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, size: usize, sigma_n: f64, seed: u32) -> Result<Demo, JsError> {
        Demo::try_new(kind, size, sigma_n, seed).map_err(js)
    }

    /// Uses an uploaded image (canvas RGBA bytes) as the clean original.
    pub fn from_rgba(width: usize, height: usize, rgba: &[u8], sigma_n: f64, seed: u32) -> Result<Demo, JsError> {
        Demo::try_from_rgba(width, height, rgba, sigma_n, seed).map_err(js)
    }

    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.clean.width()
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.clean.height()
    }

    pub fn clean_rgba(&self) -> Vec<u8> {
        self.clean.to_rgba8()
    }

    pub fn noisy_rgba(&self) -> Vec<u8> {
        self.noisy.to_rgba8()
    }

    pub fn noisy_psnr(&self) -> f64 {
        chromadiff::psnr(&self.noisy, &self.clean).unwrap_or(f64::NAN)
    }

    pub fn denoise(&mut self, scheme: &str, iterations: usize, dt: f64, coupling_gain: f64) -> Result<Restored, JsError> {
        self.try_denoise(scheme, iterations, dt, coupling_gain).map_err(js)
    }

    pub fn diagnostic(&mut self, which: &str) -> Result<Vec<u8>, JsError> {
        self.try_diagnostic(which).map_err(js)
    }
}
