//! Finite-difference operators and Gaussian smoothing on scalar planes.
//!
//! All operators use unit grid spacing, `x` along columns and `y` along rows,
//! and read outside the grid through [`BoundaryRule::Mirror`].

use crate::error::{Error, Result};
use crate::par;

/// Out-of-grid read rule shared by every stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryRule {
    /// Whole-sample reflection: `a(-1) = a(1)`, `a(n) = a(n - 2)`.
    #[default]
    Mirror,
}

impl BoundaryRule {
    /// Maps a possibly out-of-range index onto `0..n`.
    #[inline]
    pub fn index(self, i: isize, n: usize) -> usize {
        match self {
            BoundaryRule::Mirror => {
                if n == 1 {
                    return 0;
                }
                let period = 2 * (n as isize - 1);
                let m = i.rem_euclid(period);
                if m < n as isize {
                    m as usize
                } else {
                    (period - m) as usize
                }
            }
        }
    }

    fn neighbors(self, n: usize) -> Neighbors {
        Neighbors {
            prev: (0..n).map(|i| self.index(i as isize - 1, n)).collect(),
            next: (0..n).map(|i| self.index(i as isize + 1, n)).collect(),
        }
    }
}

struct Neighbors {
    prev: Vec<usize>,
    next: Vec<usize>,
}

/// Row-major scalar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::argument(format!(
                "field data has {} samples, expected {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds a field from `f(x, y)`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn same_shape(&self, other: &ScalarField) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert!(self.same_shape(other), "field shape mismatch");
        ScalarField {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Quarter turn counter-clockwise: `out(x, y) = self(width - 1 - y, x)`.
    pub fn rotate90(&self) -> ScalarField {
        let (w, h) = (self.width, self.height);
        ScalarField::from_fn(h, w, |x, y| self.get(w - 1 - y, x))
    }

    /// Affine rescale of the value range onto `[0, 1]`; constant fields map to 0.
    pub fn rescaled_unit(&self) -> ScalarField {
        let (lo, hi) = self
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let span = hi - lo;
        if !(span > 0.0) {
            return ScalarField::zeros(self.width, self.height);
        }
        self.map(|v| (v - lo) / span)
    }

    fn with_rows(&self, f: impl Fn(usize, &mut [f64]) + Sync + Send) -> ScalarField {
        let mut out = ScalarField::zeros(self.width, self.height);
        par::for_each_row(&mut out.data, self.width, f);
        out
    }
}

/// Central-difference gradient `(f_x, f_y)`.
pub fn gradient(f: &ScalarField) -> (ScalarField, ScalarField) {
    let b = BoundaryRule::Mirror;
    let nx = b.neighbors(f.width);
    let ny = b.neighbors(f.height);
    let fx = f.with_rows(|y, row| {
        let src = f.row(y);
        for (x, out) in row.iter_mut().enumerate() {
            *out = 0.5 * (src[nx.next[x]] - src[nx.prev[x]]);
        }
    });
    let fy = f.with_rows(|y, row| {
        let up = f.row(ny.prev[y]);
        let down = f.row(ny.next[y]);
        for (x, out) in row.iter_mut().enumerate() {
            *out = 0.5 * (down[x] - up[x]);
        }
    });
    (fx, fy)
}

/// Gradient magnitude `sqrt(f_x^2 + f_y^2)` from central differences.
pub fn gradient_magnitude(f: &ScalarField) -> ScalarField {
    let (fx, fy) = gradient(f);
    fx.zip_map(&fy, f64::hypot)
}

/// Five-point Laplacian.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let b = BoundaryRule::Mirror;
    let nx = b.neighbors(f.width);
    let ny = b.neighbors(f.height);
    f.with_rows(|y, row| {
        let up = f.row(ny.prev[y]);
        let mid = f.row(y);
        let down = f.row(ny.next[y]);
        for (x, out) in row.iter_mut().enumerate() {
            *out = (mid[nx.prev[x]] + mid[nx.next[x]]) + (up[x] + down[x]) - 4.0 * mid[x];
        }
    })
}

/// Second derivatives `(f_xx, f_xy, f_yy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessian {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yy: ScalarField,
}

pub fn hessian(f: &ScalarField) -> Hessian {
    let b = BoundaryRule::Mirror;
    let nx = b.neighbors(f.width);
    let ny = b.neighbors(f.height);
    let xx = f.with_rows(|y, row| {
        let mid = f.row(y);
        for (x, out) in row.iter_mut().enumerate() {
            *out = mid[nx.next[x]] - 2.0 * mid[x] + mid[nx.prev[x]];
        }
    });
    let yy = f.with_rows(|y, row| {
        let up = f.row(ny.prev[y]);
        let mid = f.row(y);
        let down = f.row(ny.next[y]);
        for (x, out) in row.iter_mut().enumerate() {
            *out = down[x] - 2.0 * mid[x] + up[x];
        }
    });
    let xy = f.with_rows(|y, row| {
        let up = f.row(ny.prev[y]);
        let down = f.row(ny.next[y]);
        for (x, out) in row.iter_mut().enumerate() {
            let (l, r) = (nx.prev[x], nx.next[x]);
            *out = 0.25 * ((down[r] - down[l]) - (up[r] - up[l]));
        }
    });
    Hessian { xx, xy, yy }
}

/// Normalized 1-D Gaussian taps over `-radius..=radius`, `radius = ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::argument(format!(
            "gaussian sigma must be finite and >= 0, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(vec![1.0]);
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|t| (-((t * t) as f64) / denom).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= total;
    }
    Ok(taps)
}

/// Separable Gaussian smoothing (rows, then columns). `sigma = 0` is the identity.
pub fn gaussian_convolve(f: &ScalarField, sigma: f64) -> Result<ScalarField> {
    let taps = gaussian_kernel(sigma)?;
    if taps.len() == 1 {
        return Ok(f.clone());
    }
    Ok(convolve_separable(f, &taps))
}

pub(crate) fn convolve_separable(f: &ScalarField, taps: &[f64]) -> ScalarField {
    let b = BoundaryRule::Mirror;
    let radius = taps.len() / 2;
    let (w, h) = (f.width, f.height);

    let horizontal = f.with_rows(|y, row| {
        let src = f.row(y);
        let padded: Vec<f64> = (0..w + 2 * radius)
            .map(|i| src[b.index(i as isize - radius as isize, w)])
            .collect();
        for (x, out) in row.iter_mut().enumerate() {
            *out = padded[x..x + taps.len()]
                .iter()
                .zip(taps)
                .map(|(v, k)| v * k)
                .sum();
        }
    });

    horizontal.with_rows(|y, row| {
        row.fill(0.0);
        for (k, &tap) in taps.iter().enumerate() {
            let src = horizontal.row(b.index(y as isize + k as isize - radius as isize, h));
            for (out, &v) in row.iter_mut().zip(src) {
                *out += v * tap;
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_x(w: usize, h: usize) -> ScalarField {
        ScalarField::from_fn(w, h, |x, _| x as f64)
    }

    #[test]
    fn mirror_index_reflects_without_repeating_edge() {
        let b = BoundaryRule::Mirror;
        assert_eq!(b.index(-1, 5), 1);
        assert_eq!(b.index(5, 5), 3);
        assert_eq!(b.index(-6, 5), 2);
        assert_eq!(b.index(13, 5), 3);
        assert_eq!(b.index(2, 5), 2);
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let f = ScalarField::filled(6, 5, 0.3);
        let (fx, fy) = gradient(&f);
        assert_eq!(fx.max_abs(), 0.0);
        assert_eq!(fy.max_abs(), 0.0);
    }

    #[test]
    fn gradient_of_ramp_is_exact_in_interior() {
        let (fx, fy) = gradient(&ramp_x(7, 6));
        for y in 0..6 {
            for x in 1..6 {
                assert_eq!(fx.get(x, y), 1.0);
            }
            for x in 0..7 {
                assert_eq!(fy.get(x, y), 0.0);
            }
        }
        // mirror reflection flattens the ramp at the border
        assert_eq!(fx.get(0, 0), 0.0);
    }

    #[test]
    fn gradient_of_bilinear_matches_hand_stencil() {
        // f = x*y with x the column index: f_x(i, j) = i (the row index)
        let f = ScalarField::from_fn(8, 8, |x, y| (x * y) as f64);
        let (fx, _) = gradient(&f);
        for y in 1..7 {
            for x in 1..7 {
                assert_eq!(fx.get(x, y), y as f64);
            }
        }
    }

    #[test]
    fn laplacian_cases() {
        let lap = laplacian(&ramp_x(6, 6));
        for y in 1..5 {
            for x in 1..5 {
                assert_eq!(lap.get(x, y), 0.0);
            }
        }

        let mut impulse = ScalarField::zeros(5, 5);
        impulse.set(2, 2, 1.0);
        let lap = laplacian(&impulse);
        assert_eq!(lap.get(2, 2), -4.0);
        for (x, y) in [(1, 2), (3, 2), (2, 1), (2, 3)] {
            assert_eq!(lap.get(x, y), 1.0);
        }
        assert_eq!(lap.get(1, 1), 0.0);

        let quad = ScalarField::from_fn(7, 7, |x, _| (x * x) as f64);
        let lap = laplacian(&quad);
        for y in 1..6 {
            for x in 1..6 {
                assert_eq!(lap.get(x, y), 2.0);
            }
        }
    }

    #[test]
    fn hessian_cases() {
        let quad = ScalarField::from_fn(7, 7, |x, _| (x * x) as f64);
        let h = hessian(&quad);
        for y in 1..6 {
            for x in 1..6 {
                assert_eq!(h.xx.get(x, y), 2.0);
                assert_eq!(h.yy.get(x, y), 0.0);
                assert_eq!(h.xy.get(x, y), 0.0);
            }
        }

        let bilinear = ScalarField::from_fn(7, 7, |x, y| (x * y) as f64);
        let h = hessian(&bilinear);
        for y in 1..6 {
            for x in 1..6 {
                assert_eq!(h.xy.get(x, y), 1.0);
            }
        }

        let h = hessian(&ScalarField::filled(5, 5, 2.0));
        assert_eq!(h.xx.max_abs() + h.xy.max_abs() + h.yy.max_abs(), 0.0);
    }

    #[test]
    fn kernel_for_sigma_two() {
        let k = gaussian_kernel(2.0).unwrap();
        assert_eq!(k.len(), 13);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Independent evaluation of the radius-6 taps.
        let raw: Vec<f64> = (-6..=6).map(|t: i32| (-(t * t) as f64 / 8.0).exp()).collect();
        let total: f64 = raw.iter().sum();
        for (a, b) in k.iter().zip(&raw) {
            assert!((a - b / total).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_sigma_is_rejected() {
        let f = ScalarField::zeros(3, 3);
        assert!(matches!(gaussian_convolve(&f, -1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn gaussian_preserves_constants_and_impulse_mass() {
        let f = ScalarField::filled(9, 7, 0.7);
        let g = gaussian_convolve(&f, 1.3).unwrap();
        assert!(g.data().iter().all(|v| (v - 0.7).abs() < 1e-14));

        let mut impulse = ScalarField::zeros(31, 31);
        impulse.set(15, 15, 1.0);
        let g = gaussian_convolve(&impulse, 2.0).unwrap();
        let k0 = 1.0 / (-6..=6).map(|t: i32| (-(t * t) as f64 / 8.0).exp()).sum::<f64>();
        assert!((g.get(15, 15) - k0 * k0).abs() < 1e-15);
        assert!((g.sum() - 1.0).abs() < 1e-12);

        assert_eq!(gaussian_convolve(&impulse, 0.0).unwrap(), impulse);
    }

    #[test]
    fn rotate_four_times_is_identity() {
        let f = ScalarField::from_fn(5, 3, |x, y| (x * 10 + y) as f64);
        let r = f.rotate90();
        assert_eq!((r.width(), r.height()), (3, 5));
        assert_eq!(r.rotate90().rotate90().rotate90(), f);
    }
}
