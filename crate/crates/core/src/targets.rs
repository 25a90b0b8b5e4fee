//! Piecewise targets g and log-level tolerances ε for f1, plus the f2 target.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::scaffold::{regions, Label, ScaffoldConfig, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetVariant {
    /// B_k → B_{k+1}: escaping wandering domains.
    Wandering,
    /// B_k → B_k: one attracting component per k.
    Attracting,
    /// A_k → B_1, then the wandering chain.
    CommonPath,
}

impl TargetVariant {
    pub const ALL: [TargetVariant; 3] = [
        TargetVariant::Wandering,
        TargetVariant::Attracting,
        TargetVariant::CommonPath,
    ];
}

impl fmt::Display for TargetVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetVariant::Wandering => "wandering",
            TargetVariant::Attracting => "attracting",
            TargetVariant::CommonPath => "common-path",
        })
    }
}

impl FromStr for TargetVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wandering" => Ok(TargetVariant::Wandering),
            "attracting" => Ok(TargetVariant::Attracting),
            "common-path" | "commonpath" | "common_path" => Ok(TargetVariant::CommonPath),
            _ => Err(alloc::format!("unknown variant {s:?}")),
        }
    }
}

// Relative shading keeps the guarantee intact under rounding in exp.
const SHADE: f64 = 1.0 - 1e-10;

/// Largest t (up to a 1e-10 relative shading) such that `|z - target| ≤ t`
/// forces `|e^z - e^target| ≤ image_radius`.
pub fn exp_tolerance(target: Complex64, image_radius: f64) -> f64 {
    math::ln_1p(image_radius * math::exp(-target.re)) * SHADE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetEntry {
    pub region: Label,
    pub shape: Shape,
    pub target: Complex64,
    pub tolerance: f64,
    pub exp_center: Complex64,
    pub exp_radius: f64,
    /// Tolerance as printed in the construction when it differs from the
    /// one used here; informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_tolerance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct F2Target {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseTarget {
    /// `None` for hand-written tables.
    pub variant: Option<TargetVariant>,
    pub entries: Vec<TargetEntry>,
    pub f2: F2Target,
}

impl PiecewiseTarget {
    pub fn entry(&self, label: Label) -> Option<&TargetEntry> {
        self.entries.iter().find(|e| e.region == label)
    }
}

/// d1: f2 within this of 0 keeps `e^{Re f2}` within 1/16 of 1.
pub fn f2_tolerance() -> f64 {
    exp_tolerance(Complex64::new(0.0, 0.0), 1.0 / 16.0)
}

fn entry(region: Label, shape: Shape, target: Complex64, center: Complex64, radius: f64) -> TargetEntry {
    TargetEntry {
        region,
        shape,
        target,
        tolerance: exp_tolerance(target, radius),
        exp_center: center,
        exp_radius: radius,
        printed_tolerance: None,
    }
}

fn log_real(x: f64) -> Complex64 {
    Complex64::new(math::ln(x), 0.0)
}

pub fn build_target(cfg: &ScaffoldConfig, variant: TargetVariant) -> PiecewiseTarget {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut entries = Vec::new();
    for r in regions(cfg, variant) {
        let e = match (variant, r.label) {
            (_, Label::G1 | Label::M(_) | Label::L(_)) => {
                let mut e = entry(r.label, r.shape, zero, one, 1.0 / 16.0);
                if variant == TargetVariant::CommonPath {
                    e.printed_tolerance = Some(0.25);
                }
                e
            }
            (TargetVariant::Attracting, Label::B(k)) => {
                let (d, l) = (cfg.deltas[k - 1], cfg.ells[k - 1]);
                let mut e = entry(r.label, r.shape, log_real(d), re(d), l / 4.0);
                e.printed_tolerance = Some(l / 4.0);
                e
            }
            (_, Label::B(k)) => {
                let (d, l) = (cfg.deltas[k], cfg.ells[k]);
                entry(r.label, r.shape, log_real(d), re(d), l / 4.0)
            }
            (TargetVariant::CommonPath, Label::A(_)) => {
                let (d, l) = (cfg.deltas[0], cfg.ells[0]);
                entry(r.label, r.shape, log_real(d), re(d), l / 4.0)
            }
            (_, Label::A(_)) => {
                let (r1, s1) = (cfg.rs[0], cfg.ss[0]);
                let t = Complex64::new(math::ln(r1), PI);
                entry(r.label, r.shape, t, re(-r1), s1 / 8.0)
            }
            (_, Label::G2) => continue,
        };
        entries.push(e);
    }
    PiecewiseTarget {
        variant: Some(variant),
        entries,
        f2: F2Target {
            value: 0.0,
            tolerance: f2_tolerance(),
        },
    }
}

impl fmt::Display for PiecewiseTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.variant.map(|v| v.to_string()).unwrap_or_else(|| "custom".to_string());
        writeln!(f, "variant {v}")?;
        for e in &self.entries {
            writeln!(
                f,
                "{:>4}  g = {:.6}{:+.6}i  eps = {:.6}",
                e.region.to_string(),
                e.target.re,
                e.target.im,
                e.tolerance
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaffold::generate_scaffold;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tolerance_values() {
        let t = exp_tolerance(c(0.0, 0.0), 1.0 / 16.0);
        assert!((t - (17.0f64 / 16.0).ln()).abs() < 1e-10);
        assert!((t - 0.06062).abs() < 1e-5);
        let t = exp_tolerance(c(30f64.ln(), 0.0), 7.5);
        assert!((t - 0.22314).abs() < 1e-5);
        for v in [c(0.3, 1.0), c(-2.0, 5.0), c(4.0, -1.0)] {
            let r = v.re.exp() * (core::f64::consts::E - 1.0);
            assert!((exp_tolerance(v, r) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn tolerance_monotone() {
        let v = c(0.5, 0.2);
        assert!(exp_tolerance(v, 0.1) < exp_tolerance(v, 0.2));
        assert!(exp_tolerance(c(1.0, 0.0), 0.1) < exp_tolerance(c(0.0, 0.0), 0.1));
    }

    #[test]
    fn wandering_table() {
        let cfg = generate_scaffold(0.5, 3, 3.0).unwrap();
        let t = build_target(&cfg, TargetVariant::Wandering);
        let b1 = t.entry(Label::B(1)).unwrap();
        assert_eq!(b1.target, c(cfg.deltas[1].ln(), 0.0));
        assert_eq!(b1.exp_radius, cfg.ells[1] / 4.0);
        let a2 = t.entry(Label::A(2)).unwrap();
        assert_eq!(a2.target, c(cfg.rs[0].ln(), PI));
        assert_eq!(a2.exp_center, c(-cfg.rs[0], 0.0));
        assert_eq!(a2.exp_radius, cfg.ss[0] / 8.0);
        assert!(t.entry(Label::L(3)).is_some());
        assert!(t.entry(Label::B(4)).is_none());
        assert_eq!(t.f2.value, 0.0);
        assert!((t.f2.tolerance - (17.0f64 / 16.0).ln()).abs() < 1e-10);
    }

    #[test]
    fn other_tables() {
        let cfg = generate_scaffold(0.5, 3, 3.0).unwrap();
        let t = build_target(&cfg, TargetVariant::CommonPath);
        let a1 = t.entry(Label::A(1)).unwrap();
        assert_eq!(a1.exp_center, c(cfg.deltas[0], 0.0));
        assert_eq!(a1.exp_radius, cfg.ells[0] / 4.0);
        assert_eq!(t.entry(Label::M(1)).unwrap().printed_tolerance, Some(0.25));
        let t = build_target(&cfg, TargetVariant::Attracting);
        let b2 = t.entry(Label::B(2)).unwrap();
        assert_eq!(b2.exp_center, c(cfg.deltas[1], 0.0));
        assert!(t.entries.iter().all(|e| !matches!(e.region, Label::A(_) | Label::L(_))));
    }

    #[test]
    fn variant_names() {
        for v in TargetVariant::ALL {
            assert_eq!(v.to_string().parse::<TargetVariant>().unwrap(), v);
        }
    }
}
