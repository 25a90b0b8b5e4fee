//! Outward-padded interval arithmetic on ℝ, ℂ and ℂ × ℝ.
//!
//! No rounding-mode control is used. Every computed endpoint is pushed four
//! representable doubles outward instead.

mod poly;

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::math::{self, down, up};

pub use poly::{horner_box, poly_box, poly_real_range, sampled_box};

const SLACK: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for RealInterval {
    fn from(a: [f64; 2]) -> Self {
        RealInterval { lo: a[0], hi: a[1] }
    }
}

impl From<RealInterval> for [f64; 2] {
    fn from(i: RealInterval) -> Self {
        [i.lo, i.hi]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalError {
    /// An exponential left the double range.
    Overflow,
}

impl fmt::Display for IntervalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unbounded enclosure: exponential overflow")
    }
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> RealInterval {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        RealInterval { lo, hi }
    }

    pub fn point(x: f64) -> RealInterval {
        RealInterval { lo: x, hi: x }
    }

    /// `[lo, hi]` pushed outward.
    pub fn padded(lo: f64, hi: f64) -> RealInterval {
        RealInterval {
            lo: down(lo, SLACK),
            hi: up(hi, SLACK),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn subset_of(&self, o: &RealInterval) -> bool {
        o.lo <= self.lo && self.hi <= o.hi
    }

    pub fn hull(&self, o: &RealInterval) -> RealInterval {
        RealInterval {
            lo: self.lo.min(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    pub fn intersect(&self, o: &RealInterval) -> Option<RealInterval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(RealInterval { lo, hi })
    }

    pub fn add(&self, o: &RealInterval) -> RealInterval {
        RealInterval::padded(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn sub(&self, o: &RealInterval) -> RealInterval {
        RealInterval::padded(self.lo - o.hi, self.hi - o.lo)
    }

    pub fn neg(&self) -> RealInterval {
        RealInterval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(&self, o: &RealInterval) -> RealInterval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let mut lo = c[0];
        let mut hi = c[0];
        for &x in &c[1..] {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        RealInterval::padded(lo, hi)
    }

    pub fn scale(&self, k: f64) -> RealInterval {
        if k >= 0.0 {
            RealInterval::padded(self.lo * k, self.hi * k)
        } else {
            RealInterval::padded(self.hi * k, self.lo * k)
        }
    }

    /// Adds `[-r, r]`.
    pub fn inflate(&self, r: f64) -> RealInterval {
        RealInterval::padded(self.lo - r, self.hi + r)
    }

    pub fn exp(&self) -> Result<RealInterval, IntervalError> {
        let hi = up(math::exp(self.hi), SLACK);
        if !hi.is_finite() {
            return Err(IntervalError::Overflow);
        }
        let lo = down(math::exp(self.lo), SLACK).max(0.0);
        Ok(RealInterval { lo, hi })
    }

    fn bisect(&self) -> Option<(RealInterval, RealInterval)> {
        let m = self.mid();
        if !(self.lo < m && m < self.hi) {
            return None;
        }
        Some((RealInterval { lo: self.lo, hi: m }, RealInterval { lo: m, hi: self.hi }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexBox {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexBox {
    pub fn new(re: RealInterval, im: RealInterval) -> ComplexBox {
        ComplexBox { re, im }
    }

    pub fn point(z: Complex64) -> ComplexBox {
        ComplexBox {
            re: RealInterval::point(z.re),
            im: RealInterval::point(z.im),
        }
    }

    /// Square of half-side `r` around `z`, padded.
    pub fn around(z: Complex64, r: f64) -> ComplexBox {
        ComplexBox {
            re: RealInterval::padded(z.re - r, z.re + r),
            im: RealInterval::padded(z.im - r, z.im + r),
        }
    }

    pub fn mid(&self) -> Complex64 {
        Complex64::new(self.re.mid(), self.im.mid())
    }

    pub fn is_point(&self) -> bool {
        self.re.width() == 0.0 && self.im.width() == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Length of the diagonal, rounded up.
    pub fn diameter(&self) -> f64 {
        up(math::hypot(self.re.width(), self.im.width()), 2)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn subset_of(&self, o: &ComplexBox) -> bool {
        self.re.subset_of(&o.re) && self.im.subset_of(&o.im)
    }

    pub fn hull(&self, o: &ComplexBox) -> ComplexBox {
        ComplexBox {
            re: self.re.hull(&o.re),
            im: self.im.hull(&o.im),
        }
    }

    pub fn intersect(&self, o: &ComplexBox) -> Option<ComplexBox> {
        Some(ComplexBox {
            re: self.re.intersect(&o.re)?,
            im: self.im.intersect(&o.im)?,
        })
    }

    /// Largest |z| over the box, rounded up.
    pub fn mag(&self) -> f64 {
        up(math::hypot(self.re.mag(), self.im.mag()), 2)
    }

    pub fn inflate(&self, r: f64) -> ComplexBox {
        ComplexBox {
            re: self.re.inflate(r),
            im: self.im.inflate(r),
        }
    }

    pub fn add(&self, o: &ComplexBox) -> ComplexBox {
        box_add(self, o)
    }

    pub fn sub(&self, o: &ComplexBox) -> ComplexBox {
        ComplexBox {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &ComplexBox) -> ComplexBox {
        box_mul(self, o)
    }

    pub fn scale(&self, k: f64) -> ComplexBox {
        box_scale(self, k)
    }
}

pub fn box_add(a: &ComplexBox, b: &ComplexBox) -> ComplexBox {
    ComplexBox {
        re: a.re.add(&b.re),
        im: a.im.add(&b.im),
    }
}

pub fn box_mul(a: &ComplexBox, b: &ComplexBox) -> ComplexBox {
    ComplexBox {
        re: a.re.mul(&b.re).sub(&a.im.mul(&b.im)),
        im: a.re.mul(&b.im).add(&a.im.mul(&b.re)),
    }
}

pub fn box_scale(a: &ComplexBox, k: f64) -> ComplexBox {
    ComplexBox {
        re: a.re.scale(k),
        im: a.im.scale(k),
    }
}

// Range of cos over [a, b], padded. Extremes are included whenever a
// multiple of π is within a hair of the interval, which can only widen it.
fn cos_range(a: f64, b: f64) -> RealInterval {
    let full = RealInterval { lo: -1.0, hi: 1.0 };
    if !(b - a < 2.0 * PI) {
        return full;
    }
    let (ca, cb) = (math::cos(a), math::cos(b));
    let mut lo = ca.min(cb);
    let mut hi = ca.max(cb);
    let eta = 1e-12 * (1.0 + a.abs().max(b.abs()));
    let n0 = math::ceil((a - eta) / PI) as i64;
    let n1 = math::floor((b + eta) / PI) as i64;
    for n in n0..=n1 {
        if n.rem_euclid(2) == 0 {
            hi = 1.0;
        } else {
            lo = -1.0;
        }
    }
    RealInterval {
        lo: down(lo, SLACK).max(-1.0),
        hi: up(hi, SLACK).min(1.0),
    }
}

fn sin_range(a: f64, b: f64) -> RealInterval {
    let full = RealInterval { lo: -1.0, hi: 1.0 };
    if !(b - a < 2.0 * PI) {
        return full;
    }
    let (sa, sb) = (math::sin(a), math::sin(b));
    let mut lo = sa.min(sb);
    let mut hi = sa.max(sb);
    let eta = 1e-12 * (1.0 + a.abs().max(b.abs()));
    // maxima at π/2 + 2nπ, minima at -π/2 + 2nπ
    let n0 = math::ceil((a - PI / 2.0 - eta) / PI) as i64;
    let n1 = math::floor((b - PI / 2.0 + eta) / PI) as i64;
    for n in n0..=n1 {
        if n.rem_euclid(2) == 0 {
            hi = 1.0;
        } else {
            lo = -1.0;
        }
    }
    RealInterval {
        lo: down(lo, SLACK).max(-1.0),
        hi: up(hi, SLACK).min(1.0),
    }
}

/// Axis-aligned hull of the annular sector `{ρ e^{iθ}}` with
/// `ρ ∈ [e^{re.lo}, e^{re.hi}]` and `θ ∈ im`.
pub fn exp_box(b: &ComplexBox) -> Result<ComplexBox, IntervalError> {
    let rho = b.re.exp()?;
    let c = cos_range(b.im.lo, b.im.hi);
    let s = sin_range(b.im.lo, b.im.hi);
    Ok(ComplexBox {
        re: rho.mul(&c),
        im: rho.mul(&s),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBox {
    pub z: ComplexBox,
    pub w: RealInterval,
}

impl ProductBox {
    pub fn point(z: Complex64, w: f64) -> ProductBox {
        ProductBox {
            z: ComplexBox::point(z),
            w: RealInterval::point(w),
        }
    }

    pub fn contains(&self, z: Complex64, w: f64) -> bool {
        self.z.contains(z) && self.w.contains(w)
    }

    pub fn subset_of(&self, o: &ProductBox) -> bool {
        self.z.subset_of(&o.z) && self.w.subset_of(&o.w)
    }

    pub fn volume(&self) -> f64 {
        self.z.re.width() * self.z.im.width() * self.w.width()
    }

    pub fn mid(&self) -> (Complex64, f64) {
        (self.z.mid(), self.w.mid())
    }
}

/// Bisects the widest of the three coordinate intervals. A box that cannot
/// be split (all widths zero or at double resolution) comes back alone.
pub fn subdivide(b: &ProductBox) -> Vec<ProductBox> {
    let widths = [b.z.re.width(), b.z.im.width(), b.w.width()];
    let mut order = [0usize, 1, 2];
    // stable: ties resolve to re, then im, then w
    order.sort_by(|&i, &j| widths[j].total_cmp(&widths[i]));
    for &axis in &order {
        if widths[axis] <= 0.0 {
            break;
        }
        let iv = match axis {
            0 => b.z.re,
            1 => b.z.im,
            _ => b.w,
        };
        if let Some((l, r)) = iv.bisect() {
            let mut a = *b;
            let mut c = *b;
            match axis {
                0 => {
                    a.z.re = l;
                    c.z.re = r;
                }
                1 => {
                    a.z.im = l;
                    c.z.im = r;
                }
                _ => {
                    a.w = l;
                    c.w = r;
                }
            }
            return alloc::vec![a, c];
        }
    }
    alloc::vec![*b]
}
