//! Trace-based tensor diffusion with weighted Laplacian channel coupling,
//! plus the uncoupled and Perona-Malik reference schemes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fdcalc::{hessian, laplacian, BoundaryRule, ScalarField};
use crate::image::PlanarImage;
use crate::par;
use crate::structure::{diffusion_tensor, TensorField};
use crate::tv::{compute_weights, tv_smooth, TvConfig, WeightField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Tensor diffusion plus the chromatic coupling term.
    Proposed,
    /// Tensor diffusion alone.
    Td,
    /// Channel-wise scalar Perona-Malik diffusion.
    PeronaMalik,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Proposed, SchemeKind::Td, SchemeKind::PeronaMalik];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Proposed => "proposed",
            SchemeKind::Td => "td",
            SchemeKind::PeronaMalik => "pm",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "proposed" => Ok(SchemeKind::Proposed),
            "td" => Ok(SchemeKind::Td),
            "pm" | "perona-malik" | "peronamalik" => Ok(SchemeKind::PeronaMalik),
            other => Err(Error::argument(format!(
                "unknown scheme `{other}` (expected proposed, td or pm)"
            ))),
        }
    }
}

/// Default weight of the coupling term.
///
/// Per channel the coupling contributes `-gain * lap U_i` plus a shared
/// weighted term, so the chromatic part of `U` diffuses with `T - gain I`.
/// For data in `[0, 1]` the edge indicator satisfies `N^2 <= 1.5`, hence
/// `f_plus(N) >= 0.4` and this gain keeps `T - gain I` positive semidefinite.
/// At gain 1 the chromatic part runs backward wherever `N > 0`.
pub const DEFAULT_COUPLING_GAIN: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionConfig {
    /// Gaussian scale of the multigradient.
    pub sigma: f64,
    pub dt: f64,
    pub iterations: usize,
    pub coupling_enabled: bool,
    pub coupling_gain: f64,
    pub tv: TvConfig,
    pub boundary: BoundaryRule,
    /// Contrast parameter of the Perona-Malik diffusivity, in `[0, 1]` units.
    pub pm_kappa: f64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self {
            sigma: 2.0,
            dt: 0.2,
            iterations: 40,
            coupling_enabled: true,
            coupling_gain: DEFAULT_COUPLING_GAIN,
            tv: TvConfig::default(),
            boundary: BoundaryRule::Mirror,
            pm_kappa: 0.05,
        }
    }
}

impl DiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::argument(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::argument(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.coupling_gain >= 0.0) || !self.coupling_gain.is_finite() {
            return Err(Error::argument(format!(
                "coupling gain must be >= 0, got {}",
                self.coupling_gain
            )));
        }
        if !(self.pm_kappa > 0.0) || !self.pm_kappa.is_finite() {
            return Err(Error::argument(format!("pm kappa must be > 0, got {}", self.pm_kappa)));
        }
        self.tv.validate()
    }

    /// Whether the coupling term takes part in a `Proposed` run.
    pub fn coupled(&self) -> bool {
        self.coupling_enabled && self.coupling_gain > 0.0
    }
}

/// Coupling terms for all channels from precomputed Laplacians:
/// `f_C(U_i) = sum_j (w_i lap U_j - w_j lap U_i)`.
fn coupling_from_laplacians(laps: &[ScalarField], weights: &WeightField) -> [ScalarField; 3] {
    let (w, h) = (laps[0].width(), laps[0].height());
    std::array::from_fn(|i| {
        let mut out = ScalarField::zeros(w, h);
        par::for_each_row(out.data_mut(), w, |y, row| {
            let base = y * w;
            for (x, v) in row.iter_mut().enumerate() {
                let p = base + x;
                let om = weights.at(p);
                let li = laps[i].data()[p];
                *v = (0..3)
                    .map(|j| om[i] * laps[j].data()[p] - om[j] * li)
                    .sum();
            }
        });
        out
    })
}

/// Coupling term `f_C(U_i)` for channel `channel` (0-based).
pub fn coupling_term(img: &PlanarImage, weights: &WeightField, channel: usize) -> Result<ScalarField> {
    Ok(coupling_terms(img, weights)?[channel].clone())
}

/// Coupling terms for all three channels.
pub fn coupling_terms(img: &PlanarImage, weights: &WeightField) -> Result<[ScalarField; 3]> {
    if img.channels() != 3 {
        return Err(Error::argument("coupling needs a 3-channel image"));
    }
    if !img.plane(0).same_shape(&weights.weights[0]) {
        return Err(Error::argument("weight field does not match image size"));
    }
    let laps: Vec<_> = img.planes().iter().map(laplacian).collect();
    Ok(coupling_from_laplacians(&laps, weights))
}

/// `trace(T H_i) = t11 U_xx + 2 t12 U_xy + t22 U_yy` for channel `channel`.
pub fn trace_step_field(img: &PlanarImage, tensor: &TensorField, channel: usize) -> ScalarField {
    trace_of(img.plane(channel), tensor)
}

fn trace_of(plane: &ScalarField, tensor: &TensorField) -> ScalarField {
    let h = hessian(plane);
    let t = tensor.components();
    let w = plane.width();
    let mut out = ScalarField::zeros(w, plane.height());
    par::for_each_row(out.data_mut(), w, |y, row| {
        let base = y * w;
        for (x, v) in row.iter_mut().enumerate() {
            let p = base + x;
            let [txx, txy, tyy] = t.at(p);
            *v = txx * h.xx.data()[p] + 2.0 * txy * h.xy.data()[p] + tyy * h.yy.data()[p];
        }
    });
    out
}

/// Diagnostic map of chromatic edges: `max_i |f_C(U_i)|` rescaled to `[0, 1]`.
pub fn coupling_edge_map(img: &PlanarImage, weights: &WeightField) -> Result<ScalarField> {
    let terms = coupling_terms(img, weights)?;
    let magnitude = terms[0]
        .zip_map(&terms[1], |a, b| a.abs().max(b.abs()))
        .zip_map(&terms[2], |a, b| a.max(b.abs()));
    Ok(magnitude.rescaled_unit())
}

/// Channel weights of the coupling term, computed once from the input.
pub fn input_weights(noisy: &PlanarImage, tv: &TvConfig) -> Result<WeightField> {
    compute_weights(&tv_smooth(noisy, tv)?, tv.rho)
}

/// One explicit Perona-Malik step per channel,
/// `g(d) = 1 / (1 + (d / kappa)^2)` on each of the four neighbor differences.
pub fn perona_malik_step(plane: &ScalarField, dt: f64, kappa: f64, boundary: BoundaryRule) -> ScalarField {
    let (w, h) = (plane.width(), plane.height());
    let inv_k2 = 1.0 / (kappa * kappa);
    let mut out = plane.clone();
    par::for_each_row(out.data_mut(), w, |y, row| {
        let yi = y as isize;
        let up = plane.row(boundary.index(yi - 1, h));
        let mid = plane.row(y);
        let down = plane.row(boundary.index(yi + 1, h));
        for (x, v) in row.iter_mut().enumerate() {
            let xi = x as isize;
            let c = mid[x];
            let flux: f64 = [
                mid[boundary.index(xi - 1, w)] - c,
                mid[boundary.index(xi + 1, w)] - c,
                up[x] - c,
                down[x] - c,
            ]
            .iter()
            .map(|&d| d / (1.0 + d * d * inv_k2))
            .sum();
            *v += dt * flux;
        }
    });
    out
}

/// Runs `kind` for `cfg.iterations` explicit steps from `noisy`.
pub fn denoise(noisy: &PlanarImage, cfg: &DiffusionConfig, kind: SchemeKind) -> Result<PlanarImage> {
    denoise_observed(noisy, cfg, kind, |_, _| {})
}

/// Like [`denoise`], calling `observe(k, &u)` after every step `k = 1..=iterations`.
pub fn denoise_observed(
    noisy: &PlanarImage,
    cfg: &DiffusionConfig,
    kind: SchemeKind,
    mut observe: impl FnMut(usize, &PlanarImage),
) -> Result<PlanarImage> {
    cfg.validate()?;
    if noisy.channels() != 3 {
        return Err(Error::argument("denoising needs a 3-channel image"));
    }
    if cfg.iterations == 0 {
        return Ok(noisy.clone());
    }

    let weights = match kind {
        SchemeKind::Proposed if cfg.coupling_enabled => Some(input_weights(noisy, &cfg.tv)?),
        _ => None,
    };

    let mut u = noisy.clone();
    for iteration in 1..=cfg.iterations {
        u = match kind {
            SchemeKind::PeronaMalik => PlanarImage::new(
                u.planes()
                    .iter()
                    .map(|p| perona_malik_step(p, cfg.dt, cfg.pm_kappa, cfg.boundary))
                    .collect(),
            )?,
            SchemeKind::Proposed | SchemeKind::Td => {
                tensor_step(&u, cfg, weights.as_ref().map(|w| (w, cfg.coupling_gain)))?
            }
        };
        if !u.is_finite() {
            return Err(Error::Divergence { iteration });
        }
        observe(iteration, &u);
    }
    Ok(u)
}

/// One Jacobi step of `U_i += dt (trace(T H_i) + gain f_C(U_i))`, all channels
/// advanced from the same snapshot.
pub fn tensor_step(
    u: &PlanarImage,
    cfg: &DiffusionConfig,
    coupling: Option<(&WeightField, f64)>,
) -> Result<PlanarImage> {
    let (_, tensor) = diffusion_tensor(u, cfg.sigma)?;
    let traces: Vec<ScalarField> = u.planes().iter().map(|p| trace_of(p, &tensor)).collect();
    let couplings = match coupling {
        Some((weights, gain)) => {
            let laps: Vec<_> = u.planes().iter().map(laplacian).collect();
            Some((coupling_from_laplacians(&laps, weights), gain))
        }
        None => None,
    };
    let planes = (0..3)
        .map(|i| {
            let mut next = u.plane(i).clone();
            let trace = traces[i].data();
            match &couplings {
                Some((terms, gain)) => {
                    for (p, v) in next.data_mut().iter_mut().enumerate() {
                        *v += cfg.dt * (trace[p] + gain * terms[i].data()[p]);
                    }
                }
                None => {
                    for (p, v) in next.data_mut().iter_mut().enumerate() {
                        *v += cfg.dt * trace[p];
                    }
                }
            }
            next
        })
        .collect();
    PlanarImage::new(planes)
}
