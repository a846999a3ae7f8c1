//! Piecewise-constant test images with chromatic edges.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::PlanarImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyntheticKind {
    /// Red disk on a blue background.
    Disk,
    /// Vertical stripes that differ only in the green channel.
    Stripes,
    /// Checkerboard whose cells differ in red and blue only.
    Checkerboard,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 3] = [SyntheticKind::Disk, SyntheticKind::Stripes, SyntheticKind::Checkerboard];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Disk => "disk",
            SyntheticKind::Stripes => "stripes",
            SyntheticKind::Checkerboard => "checkerboard",
        }
    }

    pub fn render(self, size: usize) -> Result<PlanarImage> {
        match self {
            SyntheticKind::Disk => disk(size),
            SyntheticKind::Stripes => stripes(size),
            SyntheticKind::Checkerboard => checkerboard(size),
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyntheticKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::argument(format!("unknown synthetic image `{s}`")))
    }
}

pub fn disk(size: usize) -> Result<PlanarImage> {
    const INSIDE: [f64; 3] = [0.85, 0.15, 0.15];
    const OUTSIDE: [f64; 3] = [0.15, 0.15, 0.85];
    let center = (size as f64 - 1.0) / 2.0;
    let radius = 0.3 * size as f64;
    PlanarImage::from_fn(size, size, |c, x, y| {
        let (dx, dy) = (x as f64 - center, y as f64 - center);
        if dx.hypot(dy) <= radius {
            INSIDE[c]
        } else {
            OUTSIDE[c]
        }
    })
}

pub fn stripes(size: usize) -> Result<PlanarImage> {
    const A: [f64; 3] = [0.3, 0.7, 0.5];
    const B: [f64; 3] = [0.3, 0.3, 0.5];
    let period = (size / 8).max(1);
    PlanarImage::from_fn(size, size, |c, x, _| if (x / period).is_multiple_of(2) { A[c] } else { B[c] })
}

pub fn checkerboard(size: usize) -> Result<PlanarImage> {
    const A: [f64; 3] = [0.75, 0.35, 0.25];
    const B: [f64; 3] = [0.35, 0.35, 0.65];
    let cell = (size / 8).max(1);
    PlanarImage::from_fn(size, size, |c, x, y| {
        if (x / cell + y / cell).is_multiple_of(2) {
            A[c]
        } else {
            B[c]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn images_are_chromatic_and_in_range() {
        for kind in SyntheticKind::ALL {
            let img = kind.render(32).unwrap();
            assert!(img.channel_spread() > 0.1, "{kind}");
            assert!(img.planes().iter().all(|p| p.data().iter().all(|v| (0.0..=1.0).contains(v))));
            assert_eq!(kind.name().parse::<SyntheticKind>().unwrap(), kind);
        }
    }

    #[test]
    fn stripes_differ_in_green_only() {
        let img = stripes(32).unwrap();
        assert_eq!(img.plane(0).max_abs(), 0.3);
        assert_ne!(img.plane(1).get(0, 0), img.plane(1).get(4, 0));
        assert_eq!(img.plane(2).get(0, 0), img.plane(2).get(4, 0));
    }
}
