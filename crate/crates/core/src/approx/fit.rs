// Weighted discrete least squares by Arnoldi orthogonalisation of the
// Krylov basis {1, u, u², ...} on the sample points, followed by conversion
// to a Newton form on Leja points for evaluation away from the samples.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;

/// Orthonormal columns q_0, q_1, ... of the Krylov matrix under
/// `<a, b> = Σ ω_i² conj(a_i) b_i`, grown one degree at a time.
pub struct Arnoldi {
    u: Vec<Complex64>,
    w2: Vec<f64>,
    pub q: Vec<Vec<Complex64>>,
}

impl Arnoldi {
    pub fn new(u: Vec<Complex64>, weights: &[f64]) -> Arnoldi {
        let w2: Vec<f64> = weights.iter().map(|w| w * w).collect();
        let norm = math::sqrt(w2.iter().sum::<f64>());
        let q0 = alloc::vec![Complex64::new(1.0 / norm, 0.0); u.len()];
        Arnoldi {
            u,
            w2,
            q: alloc::vec![q0],
        }
    }

    pub fn degree(&self) -> usize {
        self.q.len() - 1
    }

    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((x, y), w) in a.iter().zip(b).zip(&self.w2) {
            acc += x.conj() * y * w;
        }
        acc
    }

    /// Adds q_{k+1}. Returns false when the new direction vanishes, i.e. the
    /// points cannot support a higher degree.
    pub fn grow(&mut self) -> bool {
        let last = self.q.last().unwrap();
        let mut v: Vec<Complex64> = self.u.iter().zip(last).map(|(u, q)| u * q).collect();
        let before = math::sqrt(self.inner(&v, &v).re);
        for _ in 0..2 {
            for qj in &self.q {
                let h = self.inner(qj, &v);
                for (vi, qi) in v.iter_mut().zip(qj) {
                    *vi -= h * qi;
                }
            }
        }
        let nrm = math::sqrt(self.inner(&v, &v).re);
        if !(nrm > 1e-13 * before) || !nrm.is_finite() {
            return false;
        }
        for vi in v.iter_mut() {
            *vi /= nrm;
        }
        self.q.push(v);
        true
    }
}

/// Greedy Leja ordering of `pts`: start at the largest modulus, then always
/// take the point maximising the product of distances to those chosen.
pub fn leja(pts: &[Complex64], count: usize) -> Vec<usize> {
    let count = count.min(pts.len());
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut score: Vec<f64> = alloc::vec![0.0; pts.len()];
    let mut taken = alloc::vec![false; pts.len()];
    let first = (0..pts.len())
        .max_by(|&a, &b| math::cabs(pts[a]).total_cmp(&math::cabs(pts[b])))
        .unwrap();
    out.push(first);
    taken[first] = true;
    while out.len() < count {
        let last = pts[*out.last().unwrap()];
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for i in 0..pts.len() {
            if taken[i] {
                continue;
            }
            score[i] += math::ln(math::cabs(pts[i] - last));
            if score[i] > best_score {
                best_score = score[i];
                best = i;
            }
        }
        if best == usize::MAX || best_score == f64::NEG_INFINITY {
            break;
        }
        taken[best] = true;
        out.push(best);
    }
    out
}

/// Newton divided differences of `y` on nodes `x`.
pub fn divided_differences(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut c = y.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - j]);
        }
    }
    c
}

/// Geometric mean distance from the last node to the others: a cheap
/// estimate of the logarithmic capacity of the sample set.
pub fn capacity(x: &[Complex64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 1.0;
    }
    let last = x[n - 1];
    let s: f64 = x[..n - 1].iter().map(|&p| math::ln(math::cabs(last - p))).sum();
    math::exp(s / (n - 1) as f64)
}

pub fn pow2_near(x: f64) -> f64 {
    let e = libm::round(libm::log2(x));
    libm::exp2(e)
}
