//! Image quality measures: pixel-vector MSE, 3-channel PSNR, SSIM and MSSIM.

use crate::error::{Error, Result};
use crate::fdcalc::{gaussian_convolve, ScalarField};
use crate::image::PlanarImage;

/// SSIM constants for unit dynamic range.
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
/// Gaussian window scale; the `ceil(3 sigma)` truncation gives an 11x11 window.
pub const SSIM_WINDOW_SIGMA: f64 = 1.5;

/// How color SSIM is reduced to one number, recorded alongside results.
pub const MSSIM_CONVENTION: &str = "per-channel SSIM (L=1, K1=0.01, K2=0.03, 11x11 gaussian 1.5), mean over channels and pixels";

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr_db: f64,
    pub mssim: f64,
    /// Channel-mean SSIM map, when requested.
    pub ssim_map: Option<ScalarField>,
}

fn check_pair(a: &PlanarImage, b: &PlanarImage) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::argument(format!(
            "image size mismatch: {}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    if a.channels() != 3 {
        return Err(Error::argument("color metrics need 3-channel images"));
    }
    Ok(())
}

/// Per-pixel squared color distance averaged over pixels (not samples).
pub fn mse(a: &PlanarImage, b: &PlanarImage) -> Result<f64> {
    check_pair(a, b)?;
    let total: f64 = a
        .planes()
        .iter()
        .zip(b.planes())
        .map(|(pa, pb)| {
            pa.data()
                .iter()
                .zip(pb.data())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum();
    Ok(total / (a.width() * a.height()) as f64)
}

/// `10 log10(3 / mse)`; identical images give `+inf`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (3.0 / mse).log10()
    }
}

pub fn psnr(a: &PlanarImage, b: &PlanarImage) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

/// SSIM map of two planes after clamping both to `[0, 1]`.
pub fn ssim_map(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    if !a.same_shape(b) {
        return Err(Error::argument("ssim planes differ in size"));
    }
    let a = a.map(|v| v.clamp(0.0, 1.0));
    let b = b.map(|v| v.clamp(0.0, 1.0));
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let blur = |f: &ScalarField| gaussian_convolve(f, SSIM_WINDOW_SIGMA);

    let mu_a = blur(&a)?;
    let mu_b = blur(&b)?;
    let aa = blur(&a.map(|v| v * v))?;
    let bb = blur(&b.map(|v| v * v))?;
    let ab = blur(&a.zip_map(&b, |x, y| x * y))?;

    let mut out = ScalarField::zeros(a.width(), a.height());
    for (p, v) in out.data_mut().iter_mut().enumerate() {
        let (ma, mb) = (mu_a.data()[p], mu_b.data()[p]);
        let var_a = aa.data()[p] - ma * ma;
        let var_b = bb.data()[p] - mb * mb;
        let cov = ab.data()[p] - ma * mb;
        *v = ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
            / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
    Ok(out)
}

/// Channel-mean SSIM map.
pub fn combined_ssim_map(a: &PlanarImage, b: &PlanarImage) -> Result<ScalarField> {
    check_pair(a, b)?;
    let maps = a
        .planes()
        .iter()
        .zip(b.planes())
        .map(|(pa, pb)| ssim_map(pa, pb))
        .collect::<Result<Vec<_>>>()?;
    Ok(maps[0]
        .zip_map(&maps[1], |x, y| x + y)
        .zip_map(&maps[2], |s, z| (s + z) / 3.0))
}

/// Mean SSIM over all pixels and channels.
pub fn mssim(a: &PlanarImage, b: &PlanarImage) -> Result<f64> {
    let map = combined_ssim_map(a, b)?;
    Ok(map.sum() / map.len() as f64)
}

/// All measures of `estimate` against `reference` in one call.
pub fn evaluate(estimate: &PlanarImage, reference: &PlanarImage, with_map: bool) -> Result<QualityReport> {
    let mse = mse(estimate, reference)?;
    let map = combined_ssim_map(estimate, reference)?;
    Ok(QualityReport {
        mse,
        psnr_db: psnr_from_mse(mse),
        mssim: map.sum() / map.len() as f64,
        ssim_map: with_map.then_some(map),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PlanarImage {
        PlanarImage::from_fn(12, 10, |c, x, y| ((c * 5 + x * 3 + y * 7) % 11) as f64 / 11.0).unwrap()
    }

    #[test]
    fn identical_images() {
        let a = sample();
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert!((mssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_offset() {
        let a = sample();
        let b = a.map(|v| v + 0.1);
        let m = mse(&a, &b).unwrap();
        assert!((m - 0.03).abs() < 1e-12);
        assert!((psnr(&a, &b).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn constant_planes_closed_form() {
        let a = ScalarField::filled(15, 15, 0.5);
        let b = ScalarField::filled(15, 15, 0.6);
        let expected = (0.6 + 1e-4) / (0.61 + 1e-4);
        let map = ssim_map(&a, &b).unwrap();
        assert!(map.data().iter().all(|v| (v - expected).abs() < 1e-9));
    }

    #[test]
    fn inverted_binary_image_loses_similarity() {
        let a = ScalarField::from_fn(16, 16, |x, y| ((x / 4 + y / 4) % 2) as f64);
        let b = a.map(|v| 1.0 - v);
        let map = ssim_map(&a, &b).unwrap();
        assert!(map.data().iter().all(|&v| v < 1.0));
    }

    #[test]
    fn mismatched_sizes() {
        let a = sample();
        let b = PlanarImage::from_fn(10, 10, |_, _, _| 0.0).unwrap();
        assert!(mse(&a, &b).is_err());
        assert!(mssim(&a, &b).is_err());
    }

    #[test]
    fn evaluate_bundles_measures() {
        let a = sample();
        let b = a.map(|v| v * 0.9);
        let r = evaluate(&b, &a, true).unwrap();
        assert_eq!(r.psnr_db, psnr(&b, &a).unwrap());
        assert_eq!(r.mssim, mssim(&b, &a).unwrap());
        assert!(r.ssim_map.is_some());
    }
}
