//! Total-variation flow and the per-pixel channel weights derived from it.

use crate::error::{Error, Result};
use crate::fdcalc::{gaussian_convolve, gradient, gradient_magnitude, ScalarField};
use crate::image::PlanarImage;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvConfig {
    pub iterations: usize,
    pub dt: f64,
    pub epsilon: f64,
    /// Gaussian scale applied to the gradient magnitudes before weighting.
    pub rho: f64,
}

impl Default for TvConfig {
    fn default() -> Self {
        Self {
            iterations: 50,
            dt: 0.1,
            epsilon: 1e-4,
            rho: 2.0,
        }
    }
}

impl TvConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::argument(format!("tv dt must be > 0, got {}", self.dt)));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::argument(format!("tv epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.rho >= 0.0) || !self.rho.is_finite() {
            return Err(Error::argument(format!("rho must be >= 0, got {}", self.rho)));
        }
        Ok(())
    }
}

/// Anisotropic discrete total variation: sum of absolute forward differences.
pub fn total_variation(f: &ScalarField) -> f64 {
    let (w, h) = (f.width(), f.height());
    let mut tv = 0.0;
    for y in 0..h {
        let row = f.row(y);
        tv += row.windows(2).map(|p| (p[1] - p[0]).abs()).sum::<f64>();
        if y + 1 < h {
            let next = f.row(y + 1);
            tv += row.iter().zip(next).map(|(a, b)| (b - a).abs()).sum::<f64>();
        }
    }
    debug_assert!(w > 0);
    tv
}

/// Edge conductances `1 / sqrt(|grad u|^2 + eps^2)` of the TV flow.
///
/// `horizontal(x, y)` sits between `(x, y)` and `(x + 1, y)`, `vertical(x, y)`
/// between `(x, y)` and `(x, y + 1)`. The normal component of the gradient is
/// the difference across the edge; the tangential component averages the
/// central differences of its two endpoints. Edges leaving the grid carry no
/// flux (conductance 0).
struct Conductance {
    horizontal: ScalarField,
    vertical: ScalarField,
}

impl Conductance {
    fn new(u: &ScalarField, epsilon: f64) -> Self {
        let (w, h) = (u.width(), u.height());
        let eps2 = epsilon * epsilon;
        let (cx, cy) = gradient(u);
        let conductance = |normal: f64, tangent: f64| 1.0 / (normal * normal + tangent * tangent + eps2).sqrt();

        let mut horizontal = ScalarField::zeros(w, h);
        par::for_each_row(horizontal.data_mut(), w, |y, row| {
            let (uy, ty) = (u.row(y), cy.row(y));
            for x in 0..w - 1 {
                row[x] = conductance(uy[x + 1] - uy[x], 0.5 * (ty[x] + ty[x + 1]));
            }
        });
        let mut vertical = ScalarField::zeros(w, h);
        par::for_each_row(vertical.data_mut(), w, |y, row| {
            if y + 1 == h {
                return;
            }
            let (u0, u1) = (u.row(y), u.row(y + 1));
            let (t0, t1) = (cx.row(y), cx.row(y + 1));
            for x in 0..w {
                row[x] = conductance(u1[x] - u0[x], 0.5 * (t0[x] + t1[x]));
            }
        });
        Self { horizontal, vertical }
    }

    /// `div(c grad v)` with the conductances held fixed.
    fn divergence(&self, v: &ScalarField) -> ScalarField {
        let (w, h) = (v.width(), v.height());
        let mut out = ScalarField::zeros(w, h);
        par::for_each_row(out.data_mut(), w, |y, row| {
            let mid = v.row(y);
            let ch = self.horizontal.row(y);
            let cv = self.vertical.row(y);
            for (x, o) in row.iter_mut().enumerate() {
                let c = mid[x];
                let mut acc = 0.0;
                if x + 1 < w {
                    acc += ch[x] * (mid[x + 1] - c);
                }
                if x > 0 {
                    acc += ch[x - 1] * (mid[x - 1] - c);
                }
                *o = acc;
            }
            if y + 1 < h {
                let below = v.row(y + 1);
                for (x, o) in row.iter_mut().enumerate() {
                    *o += cv[x] * (below[x] - mid[x]);
                }
            }
            if y > 0 {
                let (above, ca) = (v.row(y - 1), self.vertical.row(y - 1));
                for (x, o) in row.iter_mut().enumerate() {
                    *o += ca[x] * (above[x] - mid[x]);
                }
            }
        });
        out
    }
}

/// One explicit step of `u_t = div(grad u / |grad u|_eps)`.
///
/// Each edge conductance is limited to `1 / (8 dt)`, so every pixel moves to
/// a convex combination of itself (weight at least 1/2) and its neighbors.
/// The step therefore obeys a maximum principle for any `dt`. Mass is conserved.
pub fn tv_step(u: &ScalarField, dt: f64, epsilon: f64) -> ScalarField {
    let limit = 1.0 / (8.0 * dt);
    let mut c = Conductance::new(u, epsilon);
    for v in c.horizontal.data_mut().iter_mut().chain(c.vertical.data_mut()) {
        *v = v.min(limit);
    }
    let div = c.divergence(u);
    u.zip_map(&div, |a, d| a + dt * d)
}

/// Channel-wise TV flow started from `img`.
pub fn tv_smooth(img: &PlanarImage, cfg: &TvConfig) -> Result<PlanarImage> {
    cfg.validate()?;
    let planes = img
        .planes()
        .iter()
        .map(|plane| {
            let mut u = plane.clone();
            for _ in 0..cfg.iterations {
                u = tv_step(&u, cfg.dt, cfg.epsilon);
            }
            u
        })
        .collect();
    PlanarImage::new(planes)
}

/// Per-pixel channel weights on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    pub weights: [ScalarField; 3],
}

impl WeightField {
    pub fn uniform(width: usize, height: usize) -> Self {
        let third = ScalarField::filled(width, height, 1.0 / 3.0);
        Self {
            weights: [third.clone(), third.clone(), third],
        }
    }

    #[inline]
    pub fn at(&self, i: usize) -> [f64; 3] {
        [
            self.weights[0].data()[i],
            self.weights[1].data()[i],
            self.weights[2].data()[i],
        ]
    }

    /// The three weights packed into an image, for inspection and export.
    pub fn to_image(&self) -> PlanarImage {
        PlanarImage::new(self.weights.to_vec()).expect("weights share one shape")
    }
}

/// Denominator below which the weights fall back to `1/3` each.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// `w_i = |G_rho * |grad U_i|| / sum_j |G_rho * |grad U_j||`.
pub fn compute_weights(smoothed: &PlanarImage, rho: f64) -> Result<WeightField> {
    if smoothed.channels() != 3 {
        return Err(Error::argument("channel weights need a 3-channel image"));
    }
    let numerators = smoothed
        .planes()
        .iter()
        .map(|p| Ok(gaussian_convolve(&gradient_magnitude(p), rho)?.map(f64::abs)))
        .collect::<Result<Vec<_>>>()?;
    let (w, h) = (smoothed.width(), smoothed.height());
    let mut weights = [
        ScalarField::zeros(w, h),
        ScalarField::zeros(w, h),
        ScalarField::zeros(w, h),
    ];
    for i in 0..w * h {
        let n = [numerators[0].data()[i], numerators[1].data()[i], numerators[2].data()[i]];
        let total = n[0] + n[1] + n[2];
        for c in 0..3 {
            weights[c].data_mut()[i] = if total < WEIGHT_FLOOR { 1.0 / 3.0 } else { n[c] / total };
        }
    }
    Ok(WeightField { weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_iterations_is_identity() {
        let img = PlanarImage::from_fn(8, 8, |c, x, y| ((c + x * y) % 4) as f64 / 4.0).unwrap();
        let cfg = TvConfig {
            iterations: 0,
            ..TvConfig::default()
        };
        assert_eq!(tv_smooth(&img, &cfg).unwrap(), img);
    }

    #[test]
    fn constant_image_is_fixed() {
        let img = PlanarImage::from_fn(8, 6, |c, _, _| 0.2 * c as f64).unwrap();
        assert_eq!(tv_smooth(&img, &TvConfig::default()).unwrap(), img);
    }

    #[test]
    fn step_edge_total_variation_does_not_grow() {
        let step = ScalarField::from_fn(32, 32, |x, _| if x >= 16 { 1.0 } else { 0.0 });
        let before = total_variation(&step);
        assert_eq!(before, 32.0);
        let mut u = step;
        for _ in 0..50 {
            u = tv_step(&u, 0.1, 1e-4);
        }
        assert!(total_variation(&u) <= before + 1e-9);
    }

    #[test]
    fn tv_step_conserves_mass() {
        let u = ScalarField::from_fn(11, 9, |x, y| ((x * 13 + y * 7) % 11) as f64 / 11.0);
        let v = tv_step(&u, 0.1, 1e-4);
        assert!((u.sum() - v.sum()).abs() < 1e-10);
    }

    #[test]
    fn invalid_config() {
        let img = PlanarImage::from_fn(4, 4, |_, _, _| 0.0).unwrap();
        let bad = TvConfig {
            dt: 0.0,
            ..TvConfig::default()
        };
        assert!(tv_smooth(&img, &bad).is_err());
    }

    #[test]
    fn gray_image_weights_are_uniform() {
        let plane = ScalarField::from_fn(10, 10, |x, y| ((x * 3 + y) % 7) as f64 / 7.0);
        let w = compute_weights(&PlanarImage::from_gray(plane).unwrap(), 2.0).unwrap();
        for i in 0..100 {
            assert!(w.at(i).iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        }
    }

    #[test]
    fn single_active_channel_takes_all_weight() {
        // gradient only in channel 0, confined to the left half
        let img = PlanarImage::from_fn(40, 8, |c, x, _| {
            if c == 0 && x < 10 {
                x as f64 / 10.0
            } else if c == 0 {
                1.0
            } else {
                0.5
            }
        })
        .unwrap();
        let w = compute_weights(&img, 0.0).unwrap();
        assert_eq!(w.at(3 * 40 + 4), [1.0, 0.0, 0.0]);
        assert_eq!(w.at(3 * 40 + 30), [1.0 / 3.0; 3]);
    }

    #[test]
    fn weights_follow_magnitude_ratio() {
        // ramps of slope 2:1:1 give smoothed magnitudes 2:1:1 away from borders
        let img = PlanarImage::from_fn(30, 30, |c, x, _| {
            let slope = if c == 0 { 0.02 } else { 0.01 };
            slope * x as f64
        })
        .unwrap();
        let w = compute_weights(&img, 2.0).unwrap();
        let [a, b, c] = w.at(15 * 30 + 15);
        assert!((a - 0.5).abs() < 1e-12);
        assert!((b - 0.25).abs() < 1e-12);
        assert!((c - 0.25).abs() < 1e-12);
    }
}
