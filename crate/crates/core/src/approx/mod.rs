//! Polynomial surrogates for f1 and f2.

mod fit;
mod poly;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use fit::{capacity, divided_differences, leja};
pub use poly::{Bounded, PolyApproximant, Scaling, Status};

use crate::interval::{poly_box, ComplexBox, RealInterval};
use crate::math;
use crate::scaffold::{regions, Label, Rect, Region, ScaffoldConfig, Shape};
use crate::targets::{PiecewiseTarget, TargetVariant};

/// Boundary samples per piece never drop below this.
pub const MIN_BOUNDARY: usize = 96;
/// Fraction of the tolerance a validated fit may use.
pub const MARGIN: f64 = 0.9;

pub const DEFAULT_SCHEDULE: [usize; 17] = [
    0, 8, 16, 24, 32, 48, 64, 96, 128, 160, 192, 224, 256, 288, 320, 352, 384,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSamples {
    pub label: Label,
    pub fit: Vec<Complex64>,
    pub validation: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub density: f64,
    pub bbox: Rect,
    pub regions: Vec<RegionSamples>,
}

impl SampleSet {
    pub fn get(&self, label: Label) -> Option<&RegionSamples> {
        self.regions.iter().find(|r| r.label == label)
    }

    pub fn fit_count(&self) -> usize {
        self.regions.iter().map(|r| r.fit.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeAttempt {
    pub degree: usize,
    /// `sqrt(Σ |p(z_i) - g_i|² / ε_i²)` over the fit points.
    pub residual: f64,
    /// Largest validation error divided by its region's tolerance.
    pub worst_ratio: f64,
    pub errors: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Synthesis {
    pub approximant: PolyApproximant,
    pub attempts: Vec<DegreeAttempt>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ApproxError {
    RegionOutsideBbox(Label),
    BadDensity(f64),
    BadSchedule(String),
    MissingRegion(Label),
    DegreeBudgetExceeded { best: Option<DegreeAttempt>, attempts: Vec<DegreeAttempt> },
    F2OutOfTolerance { sup: f64, bound: f64, tolerance: f64 },
}

impl fmt::Display for ApproxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxError::RegionOutsideBbox(l) => write!(f, "region {l} outside bbox"),
            ApproxError::BadDensity(d) => write!(f, "sample density {d} must be positive"),
            ApproxError::BadSchedule(m) => write!(f, "bad degree schedule: {m}"),
            ApproxError::MissingRegion(l) => write!(f, "no samples for region {l}"),
            ApproxError::DegreeBudgetExceeded { best, .. } => {
                write!(f, "degree budget exceeded")?;
                if let Some(b) = best {
                    write!(f, "; best degree {} at {:.3} of tolerance", b.degree, b.worst_ratio)?;
                }
                Ok(())
            }
            ApproxError::F2OutOfTolerance { sup, tolerance, .. } => {
                write!(f, "f2 perturbation reaches {sup:.6} >= tolerance {tolerance:.6}")
            }
        }
    }
}

pub fn sample_regions(
    cfg: &ScaffoldConfig,
    variant: TargetVariant,
    bbox: &Rect,
    density: f64,
) -> Result<SampleSet, ApproxError> {
    sample_shapes(&regions(cfg, variant), bbox, density)
}

/// Fit and validation samples for arbitrary regions. Disks get a boundary
/// circle plus an interior grid with spacing `1/density`; lines are cut to
/// the box height and sampled at Chebyshev-clustered heights. Validation
/// points sit half a step away from fit points.
pub fn sample_shapes(regs: &[Region], bbox: &Rect, density: f64) -> Result<SampleSet, ApproxError> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(ApproxError::BadDensity(density));
    }
    let mut out = Vec::new();
    for r in regs {
        if !bbox.contains_shape(&r.shape) {
            return Err(ApproxError::RegionOutsideBbox(r.label));
        }
        let (fit, validation) = match r.shape {
            Shape::Disk { center, radius } => sample_disk(center, radius, density),
            Shape::Line { re } => sample_segment(re, bbox.im_lo, bbox.im_hi, density),
            Shape::Segment { re, lo, hi } => sample_segment(re, lo, hi, density),
        };
        out.push(RegionSamples {
            label: r.label,
            fit,
            validation,
        });
    }
    Ok(SampleSet {
        density,
        bbox: *bbox,
        regions: out,
    })
}

fn sample_disk(c: Complex64, r: f64, density: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let nb = MIN_BOUNDARY.max(math::ceil(2.0 * PI * r * density) as usize);
    let ring = |off: f64| -> Vec<Complex64> {
        (0..nb)
            .map(|j| {
                let th = 2.0 * PI * (j as f64 + off) / nb as f64;
                c + Complex64::new(r * math::cos(th), r * math::sin(th))
            })
            .collect()
    };
    let mut fit = ring(0.0);
    let mut val = ring(0.5);
    let h = 1.0 / density;
    let m = math::ceil(r / h) as i64 + 1;
    for (off, dst) in [(0.25, &mut fit), (0.75, &mut val)] {
        for i in -m..=m {
            for j in -m..=m {
                let p = Complex64::new((i as f64 + off) * h, (j as f64 + off) * h);
                if math::cabs(p) < r {
                    dst.push(c + p);
                }
            }
        }
    }
    (fit, val)
}

fn sample_segment(x: f64, lo: f64, hi: f64, density: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let nb = MIN_BOUNDARY.max(math::ceil((hi - lo) * density) as usize);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let pts = |off: f64| -> Vec<Complex64> {
        (0..nb)
            .map(|j| {
                let t = math::cos(PI * (j as f64 + off) / nb as f64);
                Complex64::new(x, mid + half * t)
            })
            .collect()
    };
    (pts(0.25), pts(0.75))
}

/// Per-region sup of |p - g| over the validation points.
pub fn validation_errors(p: &PolyApproximant, target: &PiecewiseTarget, samples: &SampleSet) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for e in &target.entries {
        if let Some(rs) = samples.get(e.region) {
            let err = rs
                .validation
                .iter()
                .map(|&z| math::cabs(p.eval(z) - e.target))
                .fold(0.0, f64::max);
            out.insert(e.region.to_string(), err);
        }
    }
    out
}

fn worst_ratio(errors: &BTreeMap<String, f64>, target: &PiecewiseTarget) -> f64 {
    target
        .entries
        .iter()
        .filter_map(|e| errors.get(&e.region.to_string()).map(|err| err / e.tolerance))
        .fold(0.0, f64::max)
}

/// Weighted least squares over the schedule, stopping at the first degree
/// whose validation error stays under `MARGIN` times every tolerance.
pub fn synthesize_f1(
    target: &PiecewiseTarget,
    samples: &SampleSet,
    schedule: &[usize],
) -> Result<Synthesis, ApproxError> {
    if schedule.is_empty() {
        return Err(ApproxError::BadSchedule("empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ApproxError::BadSchedule("degrees must increase".into()));
    }
    let mut z = Vec::new();
    let mut g = Vec::new();
    let mut wt = Vec::new();
    for e in &target.entries {
        let rs = samples.get(e.region).ok_or(ApproxError::MissingRegion(e.region))?;
        for &p in &rs.fit {
            z.push(p);
            g.push(e.target);
            wt.push(1.0 / e.tolerance);
        }
    }
    if z.is_empty() {
        return Err(ApproxError::BadSchedule("no fit points".into()));
    }
    let (mut lo, mut hi) = (z[0], z[0]);
    for p in &z {
        lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let center = (lo + hi) * 0.5;
    let s0 = f64::max(0.5 * (hi.re - lo.re), 0.5 * (hi.im - lo.im)).max(1e-300);
    let u: Vec<Complex64> = z.iter().map(|p| (p - center) / s0).collect();

    let max_deg = *schedule.last().unwrap();
    let order = fit::leja(&u, max_deg + 1);
    let mut arn = fit::Arnoldi::new(u, &wt);
    let mut vals = alloc::vec![Complex64::new(0.0, 0.0); z.len()];
    let mut added = 0usize;
    let mut attempts = Vec::new();
    let mut best: Option<DegreeAttempt> = None;

    for &n in schedule {
        while arn.degree() < n {
            if !arn.grow() {
                break;
            }
        }
        if arn.degree() < n || order.len() < n + 1 {
            break;
        }
        while added <= n {
            let c = arn.inner(&arn.q[added], &g);
            for (v, q) in vals.iter_mut().zip(&arn.q[added]) {
                *v += c * q;
            }
            added += 1;
        }
        let residual = math::sqrt(
            vals.iter()
                .zip(&g)
                .zip(&wt)
                .map(|((v, gi), w)| {
                    let d = (v - gi) * w;
                    d.norm_sqr()
                })
                .sum(),
        );
        let p = newton_form(&z, &vals, &order[..n + 1], center, s0);
        let errors = validation_errors(&p, target, samples);
        let ratio = worst_ratio(&errors, target);
        let attempt = DegreeAttempt {
            degree: n,
            residual,
            worst_ratio: ratio,
            errors: errors.clone(),
        };
        attempts.push(attempt.clone());
        let ok = target.entries.iter().all(|e| {
            errors
                .get(&e.region.to_string())
                .is_some_and(|err| *err < MARGIN * e.tolerance)
        });
        if ok {
            let mut p = p;
            p.errors = errors;
            p.status = Status::Validated;
            return Ok(Synthesis {
                approximant: p,
                attempts,
            });
        }
        if best.as_ref().is_none_or(|b| ratio < b.worst_ratio) {
            best = Some(attempt);
        }
    }
    Err(ApproxError::DegreeBudgetExceeded { best, attempts })
}

// Interpolates the fitted values at Leja-ordered sample points. The scale
// is the power of two nearest the capacity of the nodes, which keeps the
// Newton products of order one on the sample set.
fn newton_form(
    z: &[Complex64],
    vals: &[Complex64],
    idx: &[usize],
    center: Complex64,
    s0: f64,
) -> PolyApproximant {
    let n = idx.len() - 1;
    let u: Vec<Complex64> = idx.iter().map(|&i| (z[i] - center) / s0).collect();
    let cap = fit::capacity(&u);
    let s = fit::pow2_near(s0 * cap);
    let x: Vec<Complex64> = idx.iter().map(|&i| (z[i] - center) / s).collect();
    let y: Vec<Complex64> = idx.iter().map(|&i| vals[i]).collect();
    let coeffs = fit::divided_differences(&x, &y);
    let mut nodes = x;
    nodes.truncate(n);
    PolyApproximant {
        degree: n,
        scale: Scaling { center, s },
        coeffs,
        nodes,
        errors: BTreeMap::new(),
        status: Status::Unvalidated,
    }
}

/// Rigorous upper bound for `|p(w)|` over real `w` with `|w| ≤ range`.
pub fn real_sup_bound(p: &PolyApproximant, range: f64) -> f64 {
    const PIECES: usize = 64;
    let mut sup: f64 = 0.0;
    for i in 0..PIECES {
        let a = -range + 2.0 * range * (i as f64) / PIECES as f64;
        let b = -range + 2.0 * range * ((i + 1) as f64) / PIECES as f64;
        let iv = RealInterval::new(a.min(b), a.max(b));
        let e = poly_box(p, &ComplexBox::new(iv, RealInterval::point(0.0)));
        sup = sup.max(e.mag());
    }
    sup
}

/// The f2 surrogate. Without a perturbation this is the zero polynomial;
/// a supplied perturbation is accepted only if it provably stays below `d1`
/// in modulus for `|w| ≤ w_range`.
pub fn make_f2(
    d1: f64,
    perturbation: Option<&PolyApproximant>,
    w_range: f64,
) -> Result<PolyApproximant, ApproxError> {
    let mut p = match perturbation {
        None => PolyApproximant::zero(),
        Some(p) => p.clone(),
    };
    let bound = real_sup_bound(&p, w_range);
    let sampled = (0..=4096)
        .map(|i| {
            let w = -w_range + 2.0 * w_range * (i as f64) / 4096.0;
            math::cabs(p.eval(Complex64::new(w, 0.0)))
        })
        .fold(0.0, f64::max);
    if !(bound < d1) {
        return Err(ApproxError::F2OutOfTolerance {
            sup: sampled,
            bound,
            tolerance: d1,
        });
    }
    p.errors = BTreeMap::from([("R".to_string(), bound)]);
    p.status = Status::Validated;
    Ok(p)
}

/// Plain evaluation.
pub fn eval(p: &PolyApproximant, z: Complex64) -> Complex64 {
    p.eval(z)
}
