//! Certified inclusions `F(source) ⊆ target` for the realized map.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx::PolyApproximant;
use crate::interval::{exp_box, poly_box, poly_real_range, subdivide, ComplexBox, IntervalError, ProductBox, RealInterval};
use crate::math::{self, up, EPS};
use crate::scaffold::{auto_bbox, g2, g2_inner, g2_wbound, product_domains, Label, ProductDomain, ScaffoldConfig, Shape};
use crate::targets::TargetVariant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapRealization {
    pub f1: PolyApproximant,
    pub f2: PolyApproximant,
    pub delta: f64,
}

/// A plainly evaluated image with bounds on its distance to the exact image
/// of the stored polynomials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointImage {
    pub z: Complex64,
    pub w: f64,
    pub z_err: f64,
    pub w_err: f64,
}

impl MapRealization {
    pub fn apply(&self, z: Complex64, w: f64) -> (Complex64, f64) {
        let e = math::exp(self.f2.eval(Complex64::new(w, 0.0)).re);
        let v = self.f1.eval(z);
        let m = math::exp(v.re);
        let ez = Complex64::new(m * math::cos(v.im), m * math::sin(v.im));
        (ez + self.delta * e, e)
    }

    pub fn apply_bounded(&self, z: Complex64, w: f64) -> PointImage {
        let a = self.f2.eval_bounded(Complex64::new(w, 0.0));
        let e = math::exp(a.value.re);
        let e_err = e * (libm::expm1(a.err) + 8.0 * EPS);
        let v = self.f1.eval_bounded(z);
        let m = math::exp(v.value.re);
        let ez = Complex64::new(m * math::cos(v.value.im), m * math::sin(v.value.im));
        let ez_err = m * (libm::expm1(v.err) + 8.0 * EPS);
        let zi = ez + self.delta * e;
        let z_err = (ez_err + self.delta * e_err + 4.0 * EPS * (m + self.delta * e)) * (1.0 + 1e-10);
        PointImage {
            z: zi,
            w: e,
            z_err,
            w_err: e_err,
        }
    }
}

/// Encloses `{F(z, w) : (z, w) ∈ b}`.
pub fn image_enclosure(m: &MapRealization, b: &ProductBox) -> Result<ProductBox, IntervalError> {
    let ez = exp_box(&poly_box(&m.f1, &b.z))?;
    let e = poly_real_range(&m.f2, &b.w).exp()?;
    let shift = ComplexBox::new(e.scale(m.delta), RealInterval::point(0.0));
    Ok(ProductBox {
        z: ez.add(&shift),
        w: e,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_depth: u32,
    pub max_boxes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_depth: 24,
            max_boxes: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    Certified,
    Failed,
    BudgetExhausted,
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertStatus::Certified => "certified",
            CertStatus::Failed => "failed",
            CertStatus::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub z: Complex64,
    pub w: f64,
    pub image_z: Complex64,
    pub image_w: f64,
    /// The leaf box the point was drawn from.
    #[serde(rename = "box")]
    pub leaf: ProductBox,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionCertificate {
    pub source: String,
    pub target: String,
    pub status: CertStatus,
    pub boxes_examined: u64,
    /// Leaves whose enclosure landed inside the target.
    pub leaves_accepted: u64,
    pub max_depth: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Unresolved leaf when the budget ran out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_box: Option<ProductBox>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyError {
    UnboundedSource(String),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::UnboundedSource(s) => write!(f, "source {s} is unbounded; clip it first"),
        }
    }
}

/// Bounding box of a bounded domain.
pub fn domain_box(d: &ProductDomain) -> Option<ProductBox> {
    if !d.w.bound.is_finite() {
        return None;
    }
    let w = RealInterval::new(-d.w.bound, d.w.bound);
    let z = match d.z {
        Shape::Disk { center, radius } => ComplexBox::new(
            RealInterval::new(center.re - radius, center.re + radius),
            RealInterval::new(center.im - radius, center.im + radius),
        ),
        Shape::Segment { re, lo, hi } => ComplexBox::new(RealInterval::point(re), RealInterval::new(lo, hi)),
        Shape::Line { .. } => return None,
    };
    Some(ProductBox { z, w })
}

/// True only if the box provably lies in the domain, honouring strictness.
pub fn box_inside(d: &ProductDomain, b: &ProductBox) -> bool {
    let w_ok = if d.w.closed {
        -d.w.bound <= b.w.lo && b.w.hi <= d.w.bound
    } else {
        -d.w.bound < b.w.lo && b.w.hi < d.w.bound
    };
    if !w_ok {
        return false;
    }
    match d.z {
        Shape::Disk { center, radius } => {
            let dx = (b.z.re.lo - center.re).abs().max((b.z.re.hi - center.re).abs());
            let dy = (b.z.im.lo - center.im).abs().max((b.z.im.hi - center.im).abs());
            let far = if dx == 0.0 || dy == 0.0 {
                dx.max(dy)
            } else {
                up(math::hypot(up(dx, 1), up(dy, 1)), 2)
            };
            if d.z_closed {
                far <= radius
            } else {
                far < radius
            }
        }
        Shape::Segment { re, lo, hi } => {
            b.z.re.lo == re && b.z.re.hi == re && lo <= b.z.im.lo && b.z.im.hi <= hi
        }
        Shape::Line { re } => b.z.re.lo == re && b.z.re.hi == re,
    }
}

// Conservative: false only when the box certainly misses the domain.
pub fn box_meets(d: &ProductDomain, b: &ProductBox) -> bool {
    if b.w.lo > d.w.bound || b.w.hi < -d.w.bound {
        return false;
    }
    match d.z {
        Shape::Disk { center, radius } => {
            let dx = (b.z.re.lo - center.re).max(center.re - b.z.re.hi).max(0.0);
            let dy = (b.z.im.lo - center.im).max(center.im - b.z.im.hi).max(0.0);
            math::hypot(dx, dy) * (1.0 - 4.0 * EPS) <= radius
        }
        _ => true,
    }
}

/// Whether the exact image is certainly outside the domain.
fn certainly_outside(d: &ProductDomain, img: &PointImage) -> bool {
    let w_out = if d.w.closed {
        img.w.abs() - img.w_err > d.w.bound
    } else {
        img.w.abs() - img.w_err >= d.w.bound
    };
    let z_out = match d.z {
        Shape::Disk { center, radius } => {
            let dist = math::cabs(img.z - center) * (1.0 - 4.0 * EPS) - img.z_err;
            if d.z_closed {
                dist > radius
            } else {
                dist >= radius
            }
        }
        _ => false,
    };
    (w_out && img.w_err.is_finite()) || (z_out && img.z_err.is_finite())
}

// Pulls a point of the box into the source domain, if the box meets it.
fn into_source(d: &ProductDomain, z: Complex64, w: f64) -> (Complex64, f64) {
    let wb = if d.w.closed { d.w.bound } else { d.w.bound * (1.0 - 1e-12) };
    let w = w.clamp(-wb, wb);
    let z = match d.z {
        Shape::Disk { center, radius } => {
            let v = z - center;
            let r = math::cabs(v);
            let lim = radius * (1.0 - 1e-12);
            if r > lim {
                center + v * (lim / r)
            } else {
                z
            }
        }
        _ => z,
    };
    (z, w)
}

fn find_witness(
    m: &MapRealization,
    source: &ProductDomain,
    target: &ProductDomain,
    b: &ProductBox,
    thorough: bool,
) -> Option<Witness> {
    let fr: &[f64] = if thorough { &[0.5, 0.0, 1.0, 0.25, 0.75] } else { &[0.5] };
    let at = |iv: &RealInterval, t: f64| iv.lo + t * (iv.hi - iv.lo);
    for &tw in fr {
        for &tx in fr {
            for &ty in fr {
                let z = Complex64::new(at(&b.z.re, tx), at(&b.z.im, ty));
                let (z, w) = into_source(source, z, at(&b.w, tw));
                if !source.contains(z, w) {
                    continue;
                }
                let img = m.apply_bounded(z, w);
                if certainly_outside(target, &img) {
                    return Some(Witness {
                        z,
                        w,
                        image_z: img.z,
                        image_w: img.w,
                        leaf: *b,
                    });
                }
            }
        }
    }
    None
}

/// Branch-and-bound proof that `F(source) ⊆ target`.
pub fn certify_inclusion(
    m: &MapRealization,
    source: &ProductDomain,
    target: &ProductDomain,
    budget: Budget,
) -> Result<InclusionCertificate, VerifyError> {
    let start = domain_box(source).ok_or_else(|| VerifyError::UnboundedSource(source.name()))?;
    Ok(certify_from(m, start, source, target, budget))
}

/// As [`certify_inclusion`], starting from an explicit box; points outside
/// `source` are ignored.
pub fn certify_from(
    m: &MapRealization,
    start: ProductBox,
    source: &ProductDomain,
    target: &ProductDomain,
    budget: Budget,
) -> InclusionCertificate {
    let mut cert = InclusionCertificate {
        source: source.name(),
        target: target.name(),
        status: CertStatus::Certified,
        boxes_examined: 0,
        leaves_accepted: 0,
        max_depth: 0,
        witness: None,
        open_box: None,
    };
    let mut stack: Vec<(ProductBox, u32)> = alloc::vec![(start, 0)];
    while let Some((b, depth)) = stack.pop() {
        cert.boxes_examined += 1;
        cert.max_depth = cert.max_depth.max(depth);
        if !box_meets(source, &b) {
            continue;
        }
        if let Ok(img) = image_enclosure(m, &b) {
            if box_inside(target, &img) {
                cert.leaves_accepted += 1;
                continue;
            }
        }
        if let Some(w) = find_witness(m, source, target, &b, false) {
            cert.status = CertStatus::Failed;
            cert.witness = Some(w);
            return cert;
        }
        let out_of_budget = depth >= budget.max_depth || cert.boxes_examined >= budget.max_boxes;
        let kids = if out_of_budget { Vec::new() } else { subdivide(&b) };
        if kids.len() < 2 {
            if let Some(w) = find_witness(m, source, target, &b, true) {
                cert.status = CertStatus::Failed;
                cert.witness = Some(w);
            } else {
                cert.status = CertStatus::BudgetExhausted;
                cert.open_box = Some(b);
            }
            return cert;
        }
        for k in kids.into_iter().rev() {
            stack.push((k, depth + 1));
        }
    }
    cert
}

/// One required inclusion: `F(source) ⊆ target`, with line sources already
/// clipped to bounded segments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inclusion {
    pub source: ProductDomain,
    pub target: ProductDomain,
}

/// The inclusions each variant asks for.
pub fn inclusions(cfg: &ScaffoldConfig, variant: TargetVariant) -> Vec<Inclusion> {
    let bbox = auto_bbox(cfg, variant);
    let wmax = g2_wbound(cfg);
    let doms = product_domains(cfg, variant);
    let find = |l: Label| doms.iter().find(|d| d.label == l).cloned();
    let k = cfg.depth;
    let mut out = Vec::new();
    let chain = |out: &mut Vec<Inclusion>| {
        for i in 1..k {
            out.push(Inclusion {
                source: find(Label::B(i)).unwrap(),
                target: find(Label::B(i + 1)).unwrap(),
            });
        }
        for d in doms.iter().filter(|d| matches!(d.label, Label::M(_) | Label::L(_))) {
            out.push(Inclusion {
                source: d.clipped(&bbox, wmax),
                target: g2_inner(cfg),
            });
        }
        out.push(Inclusion {
            source: g2(cfg),
            target: g2(cfg),
        });
    };
    match variant {
        TargetVariant::Wandering => chain(&mut out),
        TargetVariant::Attracting => {
            for i in 1..=k {
                let b = find(Label::B(i)).unwrap();
                out.push(Inclusion {
                    source: b.clone(),
                    target: b,
                });
            }
        }
        TargetVariant::CommonPath => {
            for i in 1..=k {
                out.push(Inclusion {
                    source: find(Label::A(i)).unwrap(),
                    target: find(Label::B(1)).unwrap(),
                });
            }
            chain(&mut out);
        }
    }
    out
}

pub fn certify_variant(
    cfg: &ScaffoldConfig,
    m: &MapRealization,
    variant: TargetVariant,
    budget: Budget,
) -> Vec<InclusionCertificate> {
    inclusions(cfg, variant)
        .iter()
        .map(|inc| certify_inclusion(m, &inc.source, &inc.target, budget).expect("sources are clipped"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaffold::{generate_scaffold, WBound};

    fn constant_map() -> MapRealization {
        MapRealization {
            f1: PolyApproximant::constant(Complex64::new(2f64.ln(), 0.0)),
            f2: PolyApproximant::zero(),
            delta: 0.5,
        }
    }

    #[test]
    fn constant_map_enclosure() {
        let m = constant_map();
        let b = ProductBox {
            z: ComplexBox::new(RealInterval::new(-3.0, 5.0), RealInterval::new(0.0, 2.0)),
            w: RealInterval::new(-1.0, 1.0),
        };
        let img = image_enclosure(&m, &b).unwrap();
        assert!(img.z.contains(Complex64::new(2.5, 0.0)));
        assert!(img.w.contains(1.0));
        assert!(img.z.diameter() < 1e-13 && img.w.width() < 1e-14);
    }

    #[test]
    fn strictness_is_honoured() {
        let d = ProductDomain {
            label: Label::B(1),
            z: Shape::disk(0.0, 1.0),
            z_closed: false,
            w: WBound { bound: 1.0, closed: false },
        };
        let on_edge = ProductBox::point(Complex64::new(1.0, 0.0), 0.0);
        assert!(!box_inside(&d, &on_edge));
        let mut closed = d.clone();
        closed.z_closed = true;
        closed.w.closed = true;
        assert!(box_inside(&closed, &on_edge));
        let w_edge = ProductBox::point(Complex64::new(0.0, 0.0), 1.0);
        assert!(!box_inside(&d, &w_edge));
        assert!(box_inside(&closed, &w_edge));
    }

    #[test]
    fn constant_map_certifies_and_refutes() {
        let cfg = generate_scaffold(0.5, 2, 3.0).unwrap();
        let m = constant_map();
        // everything lands on (2.5, 1), inside G2 but outside B'1
        let g = g2(&cfg);
        let c = certify_inclusion(&m, &g, &g, Budget::default()).unwrap();
        assert_eq!(c.status, CertStatus::Certified);
        assert_eq!(c.boxes_examined, 1);
        let b1 = product_domains(&cfg, TargetVariant::Wandering)[0].clone();
        let c = certify_inclusion(&m, &g, &b1, Budget::default()).unwrap();
        assert_eq!(c.status, CertStatus::Failed);
        let w = c.witness.unwrap();
        assert!(g.contains(w.z, w.w));
        let (iz, iw) = m.apply(w.z, w.w);
        assert!(!b1.contains(iz, iw));
    }

    #[test]
    fn unbounded_source_is_rejected() {
        let cfg = generate_scaffold(0.5, 2, 3.0).unwrap();
        let doms = product_domains(&cfg, TargetVariant::Wandering);
        let m1 = doms.iter().find(|d| d.label == Label::M(1)).unwrap();
        assert!(certify_inclusion(&constant_map(), m1, &g2(&cfg), Budget::default()).is_err());
    }

    #[test]
    fn inclusion_lists() {
        let cfg = generate_scaffold(0.5, 3, 3.0).unwrap();
        assert_eq!(inclusions(&cfg, TargetVariant::Attracting).len(), 3);
        // 2 chain links, 3 M, 3 L, G2
        assert_eq!(inclusions(&cfg, TargetVariant::Wandering).len(), 9);
        assert_eq!(inclusions(&cfg, TargetVariant::CommonPath).len(), 12);
        for inc in inclusions(&cfg, TargetVariant::CommonPath) {
            assert!(inc.source.z.is_bounded() && inc.source.w.bound.is_finite());
        }
    }
}
