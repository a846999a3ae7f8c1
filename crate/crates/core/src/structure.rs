//! Multigradient (color structure tensor), its eigen-structure, and the
//! diffusion tensor built from it.

use crate::error::Result;
use crate::fdcalc::{gaussian_convolve, gradient, ScalarField};
use crate::image::PlanarImage;

/// Per-pixel symmetric 2x2 field `[[xx, xy], [xy, yy]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricField {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yy: ScalarField,
}

impl SymmetricField {
    #[inline]
    pub fn at(&self, i: usize) -> [f64; 3] {
        [self.xx.data()[i], self.xy.data()[i], self.yy.data()[i]]
    }

    pub fn width(&self) -> usize {
        self.xx.width()
    }

    pub fn height(&self) -> usize {
        self.xx.height()
    }
}

/// Diffusion tensor field: symmetric positive definite, spectrum in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField(pub SymmetricField);

impl TensorField {
    pub fn identity(width: usize, height: usize) -> Self {
        TensorField(SymmetricField {
            xx: ScalarField::filled(width, height, 1.0),
            xy: ScalarField::zeros(width, height),
            yy: ScalarField::filled(width, height, 1.0),
        })
    }

    pub fn components(&self) -> &SymmetricField {
        &self.0
    }
}

/// Eigen-structure of the multigradient at every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureField {
    pub lambda_plus: ScalarField,
    pub lambda_minus: ScalarField,
    pub theta_plus: Vec<[f64; 2]>,
    pub theta_minus: Vec<[f64; 2]>,
    /// Edge indicator `sqrt(lambda_plus + lambda_minus)`.
    pub edge: ScalarField,
}

/// Closed-form eigen-pair of a symmetric 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub theta_plus: [f64; 2],
    pub theta_minus: [f64; 2],
}

/// Relative spread below which the eigenbasis is taken as the axes.
pub const DEGENERATE_TOLERANCE: f64 = 1e-12;

pub fn eigen_sym2(xx: f64, xy: f64, yy: f64) -> Eigen2 {
    let mean = 0.5 * (xx + yy);
    let half_diff = 0.5 * (xx - yy);
    let radius = half_diff.hypot(xy);
    let lambda_plus = (mean + radius).max(0.0);
    let lambda_minus = (mean - radius).max(0.0);

    if radius < DEGENERATE_TOLERANCE * mean.abs().max(1.0) {
        return Eigen2 {
            lambda_plus,
            lambda_minus,
            theta_plus: [1.0, 0.0],
            theta_minus: [0.0, 1.0],
        };
    }
    // Both (xy, l+ - xx) and (l+ - yy, xy) span the leading eigenspace;
    // the longer one avoids cancellation.
    let a = [xy, radius - half_diff];
    let b = [radius + half_diff, xy];
    let v = if a[0].hypot(a[1]) > b[0].hypot(b[1]) { a } else { b };
    let norm = v[0].hypot(v[1]);
    let theta_plus = [v[0] / norm, v[1] / norm];
    Eigen2 {
        lambda_plus,
        lambda_minus,
        theta_plus,
        theta_minus: [-theta_plus[1], theta_plus[0]],
    }
}

/// `G_sigma * sum_i grad(U_i) grad(U_i)^T`, each entry smoothed separately.
pub fn multigradient(img: &PlanarImage, sigma: f64) -> Result<SymmetricField> {
    let (w, h) = (img.width(), img.height());
    let mut xx = ScalarField::zeros(w, h);
    let mut xy = ScalarField::zeros(w, h);
    let mut yy = ScalarField::zeros(w, h);
    for plane in img.planes() {
        let (gx, gy) = gradient(plane);
        for (i, (&dx, &dy)) in gx.data().iter().zip(gy.data()).enumerate() {
            xx.data_mut()[i] += dx * dx;
            xy.data_mut()[i] += dx * dy;
            yy.data_mut()[i] += dy * dy;
        }
    }
    Ok(SymmetricField {
        xx: gaussian_convolve(&xx, sigma)?,
        xy: gaussian_convolve(&xy, sigma)?,
        yy: gaussian_convolve(&yy, sigma)?,
    })
}

pub fn eigen_decompose(k: &SymmetricField) -> StructureField {
    let (w, h) = (k.width(), k.height());
    let n = w * h;
    let mut lambda_plus = ScalarField::zeros(w, h);
    let mut lambda_minus = ScalarField::zeros(w, h);
    let mut edge = ScalarField::zeros(w, h);
    let mut theta_plus = Vec::with_capacity(n);
    let mut theta_minus = Vec::with_capacity(n);
    for i in 0..n {
        let [xx, xy, yy] = k.at(i);
        let e = eigen_sym2(xx, xy, yy);
        lambda_plus.data_mut()[i] = e.lambda_plus;
        lambda_minus.data_mut()[i] = e.lambda_minus;
        edge.data_mut()[i] = (e.lambda_plus + e.lambda_minus).sqrt();
        theta_plus.push(e.theta_plus);
        theta_minus.push(e.theta_minus);
    }
    StructureField {
        lambda_plus,
        lambda_minus,
        theta_plus,
        theta_minus,
        edge,
    }
}

/// Diffusivity along edges, `(1 + N^2)^(-1/2)`.
#[inline]
pub fn f_minus(edge: f64) -> f64 {
    1.0 / (1.0 + edge * edge).sqrt()
}

/// Diffusivity across edges, `(1 + N^2)^(-1)`.
#[inline]
pub fn f_plus(edge: f64) -> f64 {
    1.0 / (1.0 + edge * edge)
}

/// `T = f_minus(N) theta_- theta_-^T + f_plus(N) theta_+ theta_+^T`.
pub fn build_tensor(s: &StructureField) -> TensorField {
    let (w, h) = (s.edge.width(), s.edge.height());
    let mut xx = ScalarField::zeros(w, h);
    let mut xy = ScalarField::zeros(w, h);
    let mut yy = ScalarField::zeros(w, h);
    for (i, &n) in s.edge.data().iter().enumerate() {
        let (along, across) = (f_minus(n), f_plus(n));
        let [mx, my] = s.theta_minus[i];
        let [px, py] = s.theta_plus[i];
        xx.data_mut()[i] = along * mx * mx + across * px * px;
        xy.data_mut()[i] = along * mx * my + across * px * py;
        yy.data_mut()[i] = along * my * my + across * py * py;
    }
    TensorField(SymmetricField { xx, xy, yy })
}

/// Multigradient, eigen-structure and diffusion tensor of `img` in one pass.
pub fn diffusion_tensor(img: &PlanarImage, sigma: f64) -> Result<(StructureField, TensorField)> {
    let structure = eigen_decompose(&multigradient(img, sigma)?);
    let tensor = build_tensor(&structure);
    Ok((structure, tensor))
}
