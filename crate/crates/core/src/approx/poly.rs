use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::math::{self, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub center: Complex64,
    pub s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Validated,
    Unvalidated,
}

/// `p(z) = Σ c_k Π_{j<k} (u - x_j)` with `u = (z - center)/s`.
///
/// The product basis is anchored at `nodes` (Newton form). With no nodes
/// every `x_j` is zero and the coefficients are ordinary monomial ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyApproximant {
    pub degree: usize,
    pub scale: Scaling,
    pub coeffs: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<Complex64>,
    #[serde(default)]
    pub errors: BTreeMap<String, f64>,
    #[serde(default = "unvalidated")]
    pub status: Status,
}

fn unvalidated() -> Status {
    Status::Unvalidated
}

/// Value at a point together with a bound on its distance to the exact
/// value of the stored polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: Complex64,
    pub err: f64,
}

impl PolyApproximant {
    pub fn zero() -> PolyApproximant {
        PolyApproximant::monomial(alloc::vec![Complex64::new(0.0, 0.0)], Complex64::new(0.0, 0.0), 1.0)
    }

    pub fn constant(c: Complex64) -> PolyApproximant {
        PolyApproximant::monomial(alloc::vec![c], Complex64::new(0.0, 0.0), 1.0)
    }

    pub fn monomial(coeffs: Vec<Complex64>, center: Complex64, s: f64) -> PolyApproximant {
        assert!(!coeffs.is_empty(), "at least one coefficient");
        PolyApproximant {
            degree: coeffs.len() - 1,
            scale: Scaling { center, s },
            coeffs,
            nodes: Vec::new(),
            errors: BTreeMap::new(),
            status: Status::Unvalidated,
        }
    }

    /// Checks the structural invariants; returns a description on failure.
    pub fn check(&self) -> Result<(), String> {
        if self.coeffs.len() != self.degree + 1 {
            return Err(alloc::format!(
                "{} coefficients for degree {}",
                self.coeffs.len(),
                self.degree
            ));
        }
        if !self.nodes.is_empty() && self.nodes.len() != self.degree {
            return Err(alloc::format!("{} nodes for degree {}", self.nodes.len(), self.degree));
        }
        if !(self.scale.s > 0.0 && self.scale.s.is_finite()) {
            return Err("scale must be positive".into());
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !self.coeffs.iter().all(finite) || !self.nodes.iter().all(finite) || !finite(&self.scale.center) {
            return Err("non-finite coefficient".into());
        }
        Ok(())
    }

    #[inline]
    pub fn node(&self, k: usize) -> Complex64 {
        if self.nodes.is_empty() {
            Complex64::new(0.0, 0.0)
        } else {
            self.nodes[k]
        }
    }

    #[inline]
    pub fn to_unit(&self, z: Complex64) -> Complex64 {
        (z - self.scale.center) / self.scale.s
    }

    pub fn eval_unit(&self, u: Complex64) -> Complex64 {
        let n = self.degree;
        let mut p = self.coeffs[n];
        for k in (0..n).rev() {
            p = p * (u - self.node(k)) + self.coeffs[k];
        }
        p
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_unit(self.to_unit(z))
    }

    /// Evaluates at `u` and bounds the distance to the exact polynomial at
    /// any point within `disp` of `u` (all in the scaled coordinate).
    pub fn eval_unit_bounded(&self, u: Complex64, disp: f64) -> Bounded {
        let n = self.degree;
        let mut p = self.coeffs[n];
        let mut m = math::abs_up(self.coeffs[n]);
        let mut dm = 0.0;
        for k in (0..n).rev() {
            let d = u - self.node(k);
            p = p * d + self.coeffs[k];
            let dk = math::abs_up(d) + disp;
            dm = dm * dk + m;
            m = m * dk + math::abs_up(self.coeffs[k]);
        }
        self.bounded(p, m, dm, disp)
    }

    /// [`Self::eval_unit_bounded`] at many points, interleaved so the
    /// independent recurrences pipeline. Same values bit for bit.
    pub fn eval_unit_bounded_many(&self, us: &[Complex64], disps: &[f64]) -> Vec<Bounded> {
        let n = self.degree;
        let len = us.len();
        let mags: Vec<f64> = self.coeffs.iter().map(|&c| math::abs_up(c)).collect();
        let ur: Vec<f64> = us.iter().map(|u| u.re).collect();
        let ui: Vec<f64> = us.iter().map(|u| u.im).collect();
        let mut pr = alloc::vec![self.coeffs[n].re; len];
        let mut pi = alloc::vec![self.coeffs[n].im; len];
        let mut m = alloc::vec![mags[n]; len];
        let mut dm = alloc::vec![0.0; len];
        let disps = &disps[..len];
        let (ur, ui) = (&ur[..len], &ui[..len]);
        for k in (0..n).rev() {
            let x = self.node(k);
            let c = self.coeffs[k];
            let mk = mags[k];
            let (pr, pi, m, dm) = (&mut pr[..len], &mut pi[..len], &mut m[..len], &mut dm[..len]);
            for i in 0..len {
                let (dr, di) = (ur[i] - x.re, ui[i] - x.im);
                let (a, b) = (pr[i], pi[i]);
                pr[i] = (a * dr - b * di) + c.re;
                pi[i] = (a * di + b * dr) + c.im;
                let dk = math::abs_up2(dr, di) + disps[i];
                dm[i] = dm[i] * dk + m[i];
                m[i] = m[i] * dk + mk;
            }
        }
        (0..len)
            .map(|i| self.bounded(Complex64::new(pr[i], pi[i]), m[i], dm[i], disps[i]))
            .collect()
    }

    fn bounded(&self, p: Complex64, m: f64, dm: f64, disp: f64) -> Bounded {
        let n = self.degree;
        let g = 8.0 * (n as f64 + 1.0) * EPS;
        let gamma = g / (1.0 - g);
        let err = (gamma * m + disp * dm) * (1.0 + 1e-10);
        Bounded { value: p, err }
    }

    /// Point evaluation with a rigorous error bound, including the rounding
    /// of the affine map to the scaled coordinate.
    pub fn eval_bounded(&self, z: Complex64) -> Bounded {
        let u = self.to_unit(z);
        let disp = 4.0 * EPS * (math::cabs(z) + math::cabs(self.scale.center)) / self.scale.s
            + 2.0 * EPS * math::cabs(u);
        self.eval_unit_bounded(u, disp)
    }

    /// Sum of |c_k| Π|u - x_j|, which dominates |p(u)| and its rounding error.
    pub fn majorant_unit(&self, u: Complex64) -> f64 {
        let n = self.degree;
        let mut m = math::cabs(self.coeffs[n]);
        for k in (0..n).rev() {
            m = m * math::cabs(u - self.node(k)) + math::cabs(self.coeffs[k]);
        }
        m
    }

    /// Monomial coefficients in the scaled coordinate. Only sensible at low
    /// degree; used by tests and small perturbation polynomials.
    pub fn power_coeffs(&self) -> Vec<Complex64> {
        let n = self.degree;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); n + 1];
        out[0] = self.coeffs[n];
        for (len, k) in (1..).zip((0..n).rev()) {
            // out <- out * (u - x_k) + c_k
            let x = self.node(k);
            for i in (0..=len).rev() {
                let shifted = if i > 0 { out[i - 1] } else { Complex64::new(0.0, 0.0) };
                let here = if i < len { out[i] } else { Complex64::new(0.0, 0.0) };
                out[i] = shifted - here * x;
            }
            out[0] += self.coeffs[k];
        }
        out
    }
}
