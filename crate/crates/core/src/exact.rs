// Exact comparisons on stored doubles. Every finite double is a dyadic
// rational, so sums and scalings of them compare exactly in Q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Q = BigRational;

pub fn q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite value")
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn is_pos(x: &Q) -> bool {
    x > &Q::zero()
}
