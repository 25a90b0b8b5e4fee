//! Rasters of the scaffold and of the band map. Pixel (i, j) samples the
//! center of its cell; j = 0 is the top row.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::scaffold::{all_pieces, product_domains, Label, Rect, ScaffoldConfig, Shape};
use crate::targets::TargetVariant;
use crate::verify::MapRealization;

pub type Rgb = [u8; 3];

/// Fixed colors. Bands cycle through `BANDS`.
pub mod palette {
    use super::Rgb;

    pub const BACKGROUND: Rgb = [255, 255, 255];
    pub const G1: Rgb = [160, 160, 160];
    pub const B: Rgb = [46, 117, 182];
    pub const M: Rgb = [192, 0, 0];
    pub const A: Rgb = [84, 160, 60];
    pub const L: Rgb = [230, 145, 20];
    pub const ARROW: Rgb = [0, 0, 0];

    pub const NONE: Rgb = [20, 20, 20];
    pub const ESCAPE: Rgb = [250, 250, 250];
    pub const OVERFLOW: Rgb = [255, 0, 255];
    pub const BANDS: [Rgb; 8] = [
        [228, 26, 28],
        [55, 126, 184],
        [77, 175, 74],
        [152, 78, 163],
        [255, 127, 0],
        [200, 200, 51],
        [166, 86, 40],
        [247, 129, 191],
    ];

    pub fn band(k: usize) -> Rgb {
        BANDS[(k - 1) % BANDS.len()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageSpec {
    pub bbox: Rect,
    pub width: usize,
    pub height: usize,
    pub max_iter: usize,
    pub w0: f64,
    /// First iteration whose membership counts toward the band color.
    #[serde(default)]
    pub first_step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImageError {
    EmptyImage,
    EmptyBbox,
}

impl core::fmt::Display for ImageError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ImageError::EmptyImage => f.write_str("image has zero width or height"),
            ImageError::EmptyBbox => f.write_str("bbox is empty"),
        }
    }
}

impl ImageSpec {
    pub fn check(&self) -> Result<(), ImageError> {
        if self.width == 0 || self.height == 0 {
            return Err(ImageError::EmptyImage);
        }
        let b = &self.bbox;
        if !(b.re_lo < b.re_hi && b.im_lo < b.im_hi) {
            return Err(ImageError::EmptyBbox);
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.bbox.re_hi - self.bbox.re_lo) / self.width as f64
    }

    pub fn dy(&self) -> f64 {
        (self.bbox.im_hi - self.bbox.im_lo) / self.height as f64
    }

    pub fn pixel_point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            self.bbox.re_lo + (i as f64 + 0.5) * self.dx(),
            self.bbox.im_hi - (j as f64 + 0.5) * self.dy(),
        )
    }

    /// Pixel whose cell contains `z`, if any.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let x = (z.re - self.bbox.re_lo) / self.dx();
        let y = (self.bbox.im_hi - z.im) / self.dy();
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (i, j) = (math::floor(x) as usize, math::floor(y) as usize);
        (i < self.width && j < self.height).then_some((i, j))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB, top row first.
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn filled(width: usize, height: usize, c: Rgb) -> Raster {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&c);
        }
        Raster { width, height, pixels }
    }

    pub fn from_rows(width: usize, rows: Vec<Vec<Rgb>>) -> Raster {
        let height = rows.len();
        let pixels = rows.into_iter().flatten().flatten().collect();
        Raster { width, height, pixels }
    }

    pub fn get(&self, i: usize, j: usize) -> Rgb {
        let o = 3 * (j * self.width + i);
        [self.pixels[o], self.pixels[o + 1], self.pixels[o + 2]]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Rgb) {
        let o = 3 * (j * self.width + i);
        self.pixels[o..o + 3].copy_from_slice(&c);
    }
}

fn class_color(l: Label) -> Rgb {
    match l {
        Label::G1 | Label::G2 => palette::G1,
        Label::B(_) => palette::B,
        Label::M(_) => palette::M,
        Label::A(_) => palette::A,
        Label::L(_) => palette::L,
    }
}

/// Color of the scaffold at pixel (i, j): disks by exact membership of the
/// sample point, lines when they cross the pixel's cell.
pub fn scaffold_pixel(cfg: &ScaffoldConfig, spec: &ImageSpec, i: usize, j: usize) -> Option<Rgb> {
    let z = spec.pixel_point(i, j);
    let pieces = all_pieces(cfg);
    for p in &pieces {
        if let Shape::Disk { .. } = p.shape {
            if p.shape.contains(z) {
                return Some(class_color(p.label));
            }
        }
    }
    let half = spec.dx() / 2.0;
    for p in &pieces {
        if let Shape::Line { re } | Shape::Segment { re, .. } = p.shape {
            if (z.re - re).abs() <= half {
                return Some(class_color(p.label));
            }
        }
    }
    None
}

// Arrow polylines: each B_k to B_{k+1} above the axis, each M_k and L_k to
// G1 below it.
fn arrows(cfg: &ScaffoldConfig, spec: &ImageSpec) -> Vec<[Complex64; 2]> {
    let c = |x: f64, y: f64| Complex64::new(x, y);
    let top = spec.bbox.im_hi;
    let bot = spec.bbox.im_lo;
    let mut segs = Vec::new();
    let k = cfg.depth;
    for i in 0..k.min(cfg.deltas.len() - 1) {
        let y = top * (0.55 + 0.1 * (i % 4) as f64);
        let (a, b) = (cfg.deltas[i], cfg.deltas[i + 1]);
        segs.push([c(a, cfg.ells[i]), c(a, y)]);
        segs.push([c(a, y), c(b, y)]);
        segs.push([c(b, y), c(b, cfg.ells[i + 1])]);
    }
    let g1 = c(1.0, -3.0);
    let lines = cfg.ms.iter().take(k).copied().chain(cfg.ts.iter().take(k).map(|t| -t));
    for (n, x) in lines.enumerate() {
        let y = bot * (0.4 + 0.08 * (n % 6) as f64);
        segs.push([c(x, 0.0), c(x, y)]);
        segs.push([c(x, y), c(g1.re, y)]);
        segs.push([c(g1.re, y), g1]);
    }
    segs
}

fn arrow_mask(cfg: &ScaffoldConfig, spec: &ImageSpec) -> Vec<bool> {
    let mut mask = alloc::vec![false; spec.width * spec.height];
    for [a, b] in arrows(cfg, spec) {
        let (dx, dy) = (spec.dx(), spec.dy());
        let steps = math::ceil(((b.re - a.re) / dx).abs().max(((b.im - a.im) / dy).abs())) as usize + 1;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            if let Some((i, j)) = spec.pixel_of(a + (b - a) * t) {
                mask[j * spec.width + i] = true;
            }
        }
    }
    mask
}

pub fn draw_scaffold(cfg: &ScaffoldConfig, spec: &ImageSpec) -> Result<Raster, ImageError> {
    spec.check()?;
    let mask = arrow_mask(cfg, spec);
    let mut r = Raster::filled(spec.width, spec.height, palette::BACKGROUND);
    for j in 0..spec.height {
        for i in 0..spec.width {
            let c = match scaffold_pixel(cfg, spec, i, j) {
                Some(c) => c,
                None if mask[j * spec.width + i] => palette::ARROW,
                None => continue,
            };
            r.set(i, j, c);
        }
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    /// First B'_k hit.
    Trapped(usize),
    Escaped,
    Overflow,
    None,
}

impl Band {
    pub fn color(self) -> Rgb {
        match self {
            Band::Trapped(k) => palette::band(k),
            Band::Escaped => palette::ESCAPE,
            Band::Overflow => palette::OVERFLOW,
            Band::None => palette::NONE,
        }
    }
}

/// Band of a single starting point. Iterates with index below
/// `first_step` are not tested; an orbit is called escaped once |z| passes
/// four times the outer edge of B_{K+1}.
pub fn band_index(m: &MapRealization, cfg: &ScaffoldConfig, z0: Complex64, w0: f64, max_iter: usize, first_step: usize) -> Band {
    let doms: Vec<_> = product_domains(cfg, TargetVariant::Attracting)
        .into_iter()
        .filter(|d| matches!(d.label, Label::B(_)))
        .collect();
    let k1 = cfg.deltas.len() - 1;
    let escape = 4.0 * (cfg.deltas[k1] + cfg.ells[k1]);
    let (mut z, mut w) = (z0, w0);
    for n in 0..=max_iter {
        if n > 0 {
            let (nz, nw) = m.apply(z, w);
            if !(nz.re.is_finite() && nz.im.is_finite() && nw.is_finite()) {
                return Band::Overflow;
            }
            z = nz;
            w = nw;
        }
        if n >= first_step {
            if let Some(d) = doms.iter().find(|d| d.contains(z, w)) {
                return Band::Trapped(d.label.index().unwrap());
            }
        }
        if math::cabs(z) > escape {
            return Band::Escaped;
        }
    }
    Band::None
}

pub fn band_row(m: &MapRealization, cfg: &ScaffoldConfig, spec: &ImageSpec, j: usize) -> Vec<Rgb> {
    (0..spec.width)
        .map(|i| band_index(m, cfg, spec.pixel_point(i, j), spec.w0, spec.max_iter, spec.first_step).color())
        .collect()
}

pub fn band_map(m: &MapRealization, cfg: &ScaffoldConfig, spec: &ImageSpec) -> Result<Raster, ImageError> {
    spec.check()?;
    let rows = (0..spec.height).map(|j| band_row(m, cfg, spec, j)).collect();
    Ok(Raster::from_rows(spec.width, rows))
}
