// Polynomial enclosures over boxes.
//
// Interval Horner alone is hopeless at the degrees the fits need: every
// step multiplies widths by the distance to the next node. The sampled
// re-expansion below is exact in exact arithmetic (n+1 samples determine a
// degree-n polynomial) and carries explicit bounds for every rounding step.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{box_add, box_mul, ComplexBox, RealInterval};
use crate::approx::PolyApproximant;
use crate::math::{self, up, EPS};

// Absolute error of a computed twiddle e^{iθ} with θ = 2πm/N or πm/(2N).
const TWIDDLE_ERR: f64 = 4e-15;

fn unit_box(p: &PolyApproximant, b: &ComplexBox) -> ComplexBox {
    let s = p.scale.s;
    let c = p.scale.center;
    let re = b.re.sub(&RealInterval::point(c.re));
    let im = b.im.sub(&RealInterval::point(c.im));
    ComplexBox {
        re: RealInterval::padded(re.lo / s, re.hi / s),
        im: RealInterval::padded(im.lo / s, im.hi / s),
    }
}

/// Interval Horner on the stored product basis, in the scaled coordinate.
pub fn horner_box(p: &PolyApproximant, b: &ComplexBox) -> ComplexBox {
    let u = unit_box(p, b);
    let n = p.degree;
    let mut acc = ComplexBox::point(p.coeffs[n]);
    for k in (0..n).rev() {
        let d = u.sub(&ComplexBox::point(p.node(k)));
        acc = box_add(&box_mul(&acc, &d), &ComplexBox::point(p.coeffs[k]));
    }
    acc
}

struct Samples {
    vals: Vec<Complex64>,
    err: f64,
    sum_abs: f64,
}

fn sample(p: &PolyApproximant, pts: impl Iterator<Item = Complex64>, spread: f64) -> Samples {
    let s = p.scale.s;
    let cabs_c = math::cabs(p.scale.center);
    let mut us = Vec::new();
    let mut disps = Vec::new();
    for z in pts {
        let u = p.to_unit(z);
        disps.push((spread * 1e-14 + (math::cabs(z) + cabs_c) * 4.0 * EPS) / s + 2.0 * EPS * math::cabs(u));
        us.push(u);
    }
    let mut err: f64 = 0.0;
    let mut sum_abs = 0.0;
    let mut vals = Vec::with_capacity(us.len());
    for b in p.eval_unit_bounded_many(&us, &disps) {
        err = err.max(b.err);
        sum_abs += math::cabs(b.value);
        vals.push(b.value);
    }
    Samples { vals, err, sum_abs }
}

// Bound on |computed coefficient - exact coefficient| for a length-N
// transform of the samples, per unit of the transform's prefactor.
fn coeff_err(smp: &Samples) -> f64 {
    let n = smp.vals.len() as f64;
    (smp.err + smp.sum_abs / n * (TWIDDLE_ERR + (n + 4.0) * 4.5e-16)) * (1.0 + 1e-12)
}

/// Rigorous enclosure of `{p(z) : z ∈ b}` from a re-expansion of `p` about
/// the box: Taylor on the circumscribed circle for genuine boxes, Chebyshev
/// on the segment for boxes that are flat in one coordinate.
pub fn sampled_box(p: &PolyApproximant, b: &ComplexBox) -> ComplexBox {
    let n = p.degree;
    if n == 0 {
        return ComplexBox::point(p.coeffs[0]);
    }
    if b.is_point() {
        let r = p.eval_bounded(b.mid());
        return ComplexBox::around(r.value, up(r.err, 2));
    }
    if b.re.width() == 0.0 || b.im.width() == 0.0 {
        segment_box(p, b)
    } else {
        circle_box(p, b)
    }
}

fn circle_box(p: &PolyApproximant, b: &ComplexBox) -> ComplexBox {
    let n = p.degree;
    let nn = n + 1;
    let cz = b.mid();
    let rx = (cz.re - b.re.lo).max(b.re.hi - cz.re);
    let ry = (cz.im - b.im.lo).max(b.im.hi - cz.im);
    let r = up(math::hypot(rx, ry), 4);
    let tw: Vec<Complex64> = (0..nn)
        .map(|m| {
            let th = 2.0 * PI * (m as f64) / (nn as f64);
            Complex64::new(math::cos(th), math::sin(th))
        })
        .collect();
    let smp = sample(p, tw.iter().map(|w| cz + w * r), math::cabs(cz) + r);
    let inv = 1.0 / nn as f64;
    let coeff = |j: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = 0;
        for v in &smp.vals {
            acc += v * tw[idx].conj();
            idx += j;
            if idx >= nn {
                idx -= nn;
            }
        }
        acc * inv
    };
    let a0 = coeff(0);
    let a1 = coeff(1);
    let mut rem = 0.0;
    for j in 2..=n {
        rem += math::abs_up(coeff(j));
    }
    let ec = coeff_err(&smp);
    let slack = up((nn as f64) * ec, 4);
    // t = (z - cz)/r over the box; |t| ≤ 1 by choice of r
    let t = ComplexBox {
        re: RealInterval::padded((b.re.lo - cz.re) / r, (b.re.hi - cz.re) / r),
        im: RealInterval::padded((b.im.lo - cz.im) / r, (b.im.hi - cz.im) / r),
    };
    let lin = box_add(&ComplexBox::point(a0), &box_mul(&ComplexBox::point(a1), &t))
        .inflate(up(rem + slack, 4));
    let disk = ComplexBox::around(a0, up(math::abs_up(a1) + rem + slack, 4));
    lin.intersect(&disk).unwrap_or(lin)
}

fn segment_box(p: &PolyApproximant, b: &ComplexBox) -> ComplexBox {
    let n = p.degree;
    let nn = n + 1;
    let vertical = b.re.width() == 0.0;
    let (iv, fixed) = if vertical { (b.im, b.re.lo) } else { (b.re, b.im.lo) };
    let c = iv.mid();
    let h = up((c - iv.lo).max(iv.hi - c), 4);
    let at = |t: f64| -> Complex64 {
        if vertical {
            Complex64::new(fixed, c + h * t)
        } else {
            Complex64::new(c + h * t, fixed)
        }
    };
    // cos(πm/(2N)) for m < 4N covers every cos(j(2k+1)π/(2N))
    let table: Vec<f64> = (0..4 * nn)
        .map(|m| math::cos(PI * (m as f64) / (2.0 * nn as f64)))
        .collect();
    let nodes = (0..nn).map(|k| table[2 * k + 1]);
    let spread = math::cabs(at(0.0)) + h;
    let smp = sample(p, nodes.map(at), spread);
    let coeff = |j: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let step = (2 * j) % (4 * nn);
        let mut idx = j % (4 * nn);
        for v in &smp.vals {
            acc += v * table[idx];
            idx += step;
            if idx >= 4 * nn {
                idx -= 4 * nn;
            }
        }
        let f = if j == 0 { 1.0 } else { 2.0 };
        acc * (f / nn as f64)
    };
    let b0 = coeff(0);
    let b1 = coeff(1);
    let mut rem = 0.0;
    for j in 2..=n {
        rem += math::abs_up(coeff(j));
    }
    let ec = 2.0 * coeff_err(&smp);
    let slack = up((nn as f64) * ec, 4);
    let t = RealInterval::padded((iv.lo - c) / h, (iv.hi - c) / h);
    let lin = ComplexBox {
        re: RealInterval::point(b0.re).add(&t.scale(b1.re)),
        im: RealInterval::point(b0.im).add(&t.scale(b1.im)),
    }
    .inflate(up(rem + slack, 4));
    let disk = ComplexBox::around(b0, up(math::abs_up(b1) + rem + slack, 4));
    lin.intersect(&disk).unwrap_or(lin)
}

/// Intersection of the interval-Horner and re-expansion enclosures.
pub fn poly_box(p: &PolyApproximant, b: &ComplexBox) -> ComplexBox {
    let s = sampled_box(p, b);
    if p.degree > 48 {
        // Horner is never the tighter one at this size; skip the work.
        return s;
    }
    let h = horner_box(p, b);
    if !h.is_finite() {
        return s;
    }
    s.intersect(&h).unwrap_or(s)
}

/// Range of `Re p(w)` for real `w` in `iv`.
pub fn poly_real_range(p: &PolyApproximant, iv: &RealInterval) -> RealInterval {
    poly_box(p, &ComplexBox::new(*iv, RealInterval::point(0.0))).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::RealInterval as Iv;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_poly_gives_point_zero() {
        let b = ComplexBox::new(Iv::new(-1.0, 2.0), Iv::new(0.0, 3.0));
        let z = PolyApproximant::zero();
        assert_eq!(horner_box(&z, &b), ComplexBox::point(c(0.0, 0.0)));
        assert_eq!(poly_box(&z, &b), ComplexBox::point(c(0.0, 0.0)));
    }

    #[test]
    fn identity_gives_box() {
        let b = ComplexBox::new(Iv::new(-1.0, 2.0), Iv::new(0.5, 3.0));
        let id = PolyApproximant::monomial(alloc::vec![c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0), 1.0);
        for e in [horner_box(&id, &b), poly_box(&id, &b)] {
            assert!(b.subset_of(&e));
            assert!((e.re.lo + 1.0).abs() < 1e-12 && (e.im.hi - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn square_on_segment_and_box() {
        let sq = PolyApproximant::monomial(alloc::vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], c(0.0, 0.0), 1.0);
        // real segment [1, 2] maps to [1, 4]
        let r = poly_real_range(&sq, &Iv::new(1.0, 2.0));
        assert!(r.lo <= 1.0 && r.hi >= 4.0);
        assert!(r.lo > 0.2 && r.hi < 4.8);
        let b = ComplexBox::new(Iv::new(1.0, 1.5), Iv::new(-0.25, 0.25));
        let e = sampled_box(&sq, &b);
        for z in [c(1.0, 0.25), c(1.5, -0.25), c(1.25, 0.0)] {
            assert!(e.contains(z * z));
        }
    }
}
