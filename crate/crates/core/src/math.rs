// Thin wrappers so call sites read like std float methods.

use num_complex::Complex64;

pub const EPS: f64 = f64::EPSILON * 0.5;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn cabs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Step `x` up by `n` representable doubles.
#[inline]
pub fn up(x: f64, n: u32) -> f64 {
    let a = x.abs();
    if a > 1e-300 && a < 1e300 {
        // far from zero and infinity the bit patterns count ulps directly
        let b = x.to_bits();
        return f64::from_bits(if x > 0.0 { b + n as u64 } else { b - n as u64 });
    }
    let mut x = x;
    for _ in 0..n {
        x = next_up(x);
    }
    x
}

#[inline]
pub fn down(x: f64, n: u32) -> f64 {
    -up(-x, n)
}

#[inline]
pub fn next_up(x: f64) -> f64 {
    x.next_up()
}

/// Upper bound on `|z|`. The relative factor absorbs the rounding of
/// a² + b² and the square root; the absolute term covers underflow, and
/// overflow gives +inf.
#[inline]
pub fn abs_up(z: Complex64) -> f64 {
    abs_up2(z.re, z.im)
}

#[inline]
pub fn abs_up2(a: f64, b: f64) -> f64 {
    libm::sqrt(a * a + b * b) * (1.0 + 8.0 * EPS) + 1e-150
}
