//! The closed set G = G1 ∪ ⋃ (B_k ∪ M_k ∪ A_k ∪ L_k) and the product
//! domains built over it.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::{self, q, Q};
use crate::targets::TargetVariant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaffoldConfig {
    pub delta: f64,
    pub depth: usize,
    /// Centers of B_1..B_{K+1}.
    pub deltas: Vec<f64>,
    /// Radii of B_1..B_{K+1}.
    pub ells: Vec<f64>,
    pub ms: Vec<f64>,
    pub rs: Vec<f64>,
    pub ss: Vec<f64>,
    pub ts: Vec<f64>,
}

/// Piece names. Indices are 1-based as in the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    G1,
    B(usize),
    M(usize),
    A(usize),
    L(usize),
    G2,
}

impl Label {
    pub fn index(self) -> Option<usize> {
        match self {
            Label::B(k) | Label::M(k) | Label::A(k) | Label::L(k) => Some(k),
            Label::G1 | Label::G2 => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::G1 => write!(f, "G1"),
            Label::G2 => write!(f, "G2"),
            Label::B(k) => write!(f, "B{k}"),
            Label::M(k) => write!(f, "M{k}"),
            Label::A(k) => write!(f, "A{k}"),
            Label::L(k) => write!(f, "L{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelParseError(pub String);

impl fmt::Display for LabelParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown region label {:?}", self.0)
    }
}

impl FromStr for Label {
    type Err = LabelParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LabelParseError(s.to_string());
        let t = s.trim_end_matches('\'');
        match t {
            "G1" => return Ok(Label::G1),
            "G2" => return Ok(Label::G2),
            _ => {}
        }
        let mut chars = t.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str().trim_start_matches('\'');
        let k: usize = rest.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match head {
            'B' => Ok(Label::B(k)),
            'M' => Ok(Label::M(k)),
            'A' => Ok(Label::A(k)),
            'L' => Ok(Label::L(k)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Disk { center: Complex64, radius: f64 },
    /// The whole line Re z = re.
    Line { re: f64 },
    /// The part of Re z = re with lo ≤ Im z ≤ hi.
    Segment { re: f64, lo: f64, hi: f64 },
}

impl Shape {
    pub fn disk(center: f64, radius: f64) -> Shape {
        Shape::Disk {
            center: Complex64::new(center, 0.0),
            radius,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Shape::Disk { center, radius } => {
                let d = z - center;
                d.re * d.re + d.im * d.im <= radius * radius
            }
            Shape::Line { re } => z.re == re,
            Shape::Segment { re, lo, hi } => z.re == re && lo <= z.im && z.im <= hi,
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Shape::Line { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub label: Label,
    pub shape: Shape,
}

/// `|w| < bound` when open, `|w| ≤ bound` when closed. An infinite bound is
/// all of ℝ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WBound {
    pub bound: f64,
    pub closed: bool,
}

impl WBound {
    pub fn all() -> WBound {
        WBound {
            bound: f64::INFINITY,
            closed: false,
        }
    }

    pub fn contains(&self, w: f64) -> bool {
        if self.closed {
            w.abs() <= self.bound
        } else {
            w.abs() < self.bound
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductDomain {
    pub label: Label,
    pub z: Shape,
    /// Whether the z-disk includes its boundary circle.
    pub z_closed: bool,
    pub w: WBound,
}

impl ProductDomain {
    pub fn name(&self) -> String {
        match self.label {
            Label::G2 | Label::G1 => self.label.to_string(),
            l => format!("{}'{}", &l.to_string()[..1], l.index().unwrap_or(0)),
        }
    }

    pub fn contains(&self, z: Complex64, w: f64) -> bool {
        let zin = match self.z {
            Shape::Disk { center, radius } if !self.z_closed => {
                let d = z - center;
                d.re * d.re + d.im * d.im < radius * radius
            }
            s => s.contains(z),
        };
        zin && self.w.contains(w)
    }

    /// Maps `(a, b, c) ∈ [0, 1)³` onto a point of a bounded domain: area-uniform
    /// on disks, uniform along segments, uniform in w.
    pub fn point_at(&self, a: f64, b: f64, c: f64) -> Option<(Complex64, f64)> {
        if !self.w.bound.is_finite() {
            return None;
        }
        let wb = if self.w.closed { self.w.bound } else { self.w.bound * (1.0 - 1e-9) };
        let w = (2.0 * c - 1.0) * wb;
        let z = match self.z {
            Shape::Disk { center, radius } => {
                let rr = if self.z_closed { radius * (1.0 - 1e-12) } else { radius * (1.0 - 1e-9) };
                let r = rr * crate::math::sqrt(a);
                let th = 2.0 * core::f64::consts::PI * b;
                center + Complex64::new(r * crate::math::cos(th), r * crate::math::sin(th))
            }
            Shape::Segment { re, lo, hi } => Complex64::new(re, lo + a * (hi - lo)),
            Shape::Line { .. } => return None,
        };
        Some((z, w))
    }

    /// The bounded piece of a line domain: z on the segment inside `bbox`,
    /// `|w| ≤ wmax`. Bounded domains are returned unchanged.
    pub fn clipped(&self, bbox: &Rect, wmax: f64) -> ProductDomain {
        match self.z {
            Shape::Line { re } => ProductDomain {
                label: self.label,
                z: Shape::Segment {
                    re,
                    lo: bbox.im_lo,
                    hi: bbox.im_hi,
                },
                z_closed: true,
                w: WBound {
                    bound: if self.w.bound < wmax { self.w.bound } else { wmax },
                    closed: true,
                },
            },
            _ => self.clone(),
        }
    }
}

/// Axis-aligned rectangle in ℂ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn contains(&self, z: Complex64) -> bool {
        self.re_lo <= z.re && z.re <= self.re_hi && self.im_lo <= z.im && z.im <= self.im_hi
    }

    pub fn contains_shape(&self, s: &Shape) -> bool {
        match *s {
            Shape::Disk { center, radius } => {
                center.re - radius >= self.re_lo
                    && center.re + radius <= self.re_hi
                    && center.im - radius >= self.im_lo
                    && center.im + radius <= self.im_hi
            }
            Shape::Line { re } => self.re_lo <= re && re <= self.re_hi,
            Shape::Segment { re, lo, hi } => {
                self.re_lo <= re && re <= self.re_hi && self.im_lo <= lo && hi <= self.im_hi
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub constraint: String,
    pub pass: bool,
    pub detail: String,
}

/// Named constraint outcomes; serializes as a bare array.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationReport {
    pub checks: Vec<ConstraintCheck>,
}

pub type StructuralReport = ValidationReport;

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, constraint: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.constraint == constraint)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, constraint: &str, bad: Vec<String>, ok_detail: String) {
        let pass = bad.is_empty();
        let detail = if pass { ok_detail } else { bad.join("; ") };
        self.checks.push(ConstraintCheck {
            constraint: constraint.to_string(),
            pass,
            detail,
        });
    }
}

pub mod constraint {
    pub const SHAPE: &str = "shape";
    pub const DELTA_RANGE: &str = "delta_in_unit_interval";
    pub const DELTA_COUPLING: &str = "delta_coupling";
    pub const DELTAS_INCREASING: &str = "deltas_increasing";
    pub const ELLS_INCREASING: &str = "ells_increasing";
    pub const L1_BOUND: &str = "l1_bound";
    pub const RADII_POSITIVE: &str = "radii_positive";
    pub const B_DISJOINT: &str = "b_disjoint";
    pub const B1_CLEAR_OF_G1: &str = "b1_clear_of_g1";
    pub const M_INTERLEAVE: &str = "m_interleave";
    pub const R_INCREASING: &str = "r_increasing";
    pub const A_DISJOINT: &str = "a_disjoint";
    pub const T_INTERLEAVE: &str = "t_interleave";
    pub const LEFT_OF_G1: &str = "left_of_g1";

    pub const PIECES_DISJOINT: &str = "pieces_disjoint";
    pub const LINES_INTERLEAVE: &str = "lines_interleave";
    pub const ESCAPE_MONOTONE: &str = "escape_monotone";

    pub const ALL: [&str; 14] = [
        SHAPE,
        DELTA_RANGE,
        DELTA_COUPLING,
        DELTAS_INCREASING,
        ELLS_INCREASING,
        L1_BOUND,
        RADII_POSITIVE,
        B_DISJOINT,
        B1_CLEAR_OF_G1,
        M_INTERLEAVE,
        R_INCREASING,
        A_DISJOINT,
        T_INTERLEAVE,
        LEFT_OF_G1,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScaffoldError {
    InvalidParameter(String),
    Infeasible { constraint: String, detail: String },
}

impl fmt::Display for ScaffoldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaffoldError::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            ScaffoldError::Infeasible { constraint, detail } => {
                write!(f, "constraint {constraint} infeasible: {detail}")
            }
        }
    }
}

/// Geometric scaffold: B_k grows by `growth` with radii growing by
/// `1 + (growth-1)/4`; the A_k mirror the B_k centers on the left with a
/// constant radius; lines sit at midpoints of their allowed gaps.
pub fn generate_scaffold(
    delta: f64,
    depth: usize,
    growth: f64,
) -> Result<ScaffoldConfig, ScaffoldError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ScaffoldError::InvalidParameter(format!(
            "delta = {delta} is not in (0, 1)"
        )));
    }
    if depth == 0 {
        return Err(ScaffoldError::InvalidParameter("depth must be at least 1".into()));
    }
    if !(growth > 1.0 && growth.is_finite()) {
        return Err(ScaffoldError::InvalidParameter(format!(
            "growth = {growth} must be a finite number > 1"
        )));
    }
    let l1 = f64::max(17.0 * delta / 2.0 * 1.1, 5.0);
    let d1 = 8.0 * l1;
    let lam = 1.0 + (growth - 1.0) / 4.0;
    let k = depth;
    let mut deltas = Vec::with_capacity(k + 1);
    let mut ells = Vec::with_capacity(k + 1);
    let (mut g, mut l) = (1.0, 1.0);
    for _ in 0..=k {
        deltas.push(d1 * g);
        ells.push(l1 * l);
        g *= growth;
        l *= lam;
    }
    let ms = (0..k)
        .map(|i| 0.5 * ((deltas[i] + ells[i]) + (deltas[i + 1] - ells[i + 1])))
        .collect();
    let s = 2.0 * l1;
    let rs: Vec<f64> = deltas[..k].to_vec();
    let ss = alloc::vec![s; k];
    let ts = (0..k)
        .map(|i| {
            let r_next = deltas[i + 1];
            let right_of_next = -r_next + s;
            let left_of_this = -rs[i] - s;
            -0.5 * (right_of_next + left_of_this)
        })
        .collect();
    let cfg = ScaffoldConfig {
        delta,
        depth,
        deltas,
        ells,
        ms,
        rs,
        ss,
        ts,
    };
    let report = validate_scaffold(&cfg);
    if let Some(c) = report.failures().next() {
        return Err(ScaffoldError::Infeasible {
            constraint: c.constraint.clone(),
            detail: c.detail.clone(),
        });
    }
    Ok(cfg)
}

fn shape_problems(cfg: &ScaffoldConfig) -> Vec<String> {
    let k = cfg.depth;
    let mut bad = Vec::new();
    if k == 0 {
        bad.push("depth is 0".to_string());
    }
    let want = [
        ("deltas", cfg.deltas.len(), k + 1),
        ("ells", cfg.ells.len(), k + 1),
        ("ms", cfg.ms.len(), k),
        ("rs", cfg.rs.len(), k),
        ("ss", cfg.ss.len(), k),
        ("ts", cfg.ts.len(), k),
    ];
    for (name, got, need) in want {
        if got != need {
            bad.push(format!("{name} has {got} entries, expected {need}"));
        }
    }
    let all = core::iter::once(&cfg.delta)
        .chain(&cfg.deltas)
        .chain(&cfg.ells)
        .chain(&cfg.ms)
        .chain(&cfg.rs)
        .chain(&cfg.ss)
        .chain(&cfg.ts);
    if all.clone().any(|x| !x.is_finite()) {
        bad.push("non-finite entry".to_string());
    }
    bad
}

/// Checks every construction constraint in exact rational arithmetic.
pub fn validate_scaffold(cfg: &ScaffoldConfig) -> ValidationReport {
    use constraint::*;
    let mut rep = ValidationReport::default();
    let shape = shape_problems(cfg);
    if !shape.is_empty() {
        rep.push(SHAPE, shape, String::new());
        for name in ALL.iter().skip(1) {
            rep.checks.push(ConstraintCheck {
                constraint: name.to_string(),
                pass: false,
                detail: "not evaluated: malformed config".to_string(),
            });
        }
        return rep;
    }
    rep.push(SHAPE, Vec::new(), format!("K = {}", cfg.depth));

    let k = cfg.depth;
    let d = q(cfg.delta);
    let de: Vec<Q> = cfg.deltas.iter().map(|&x| q(x)).collect();
    let el: Vec<Q> = cfg.ells.iter().map(|&x| q(x)).collect();
    let ms: Vec<Q> = cfg.ms.iter().map(|&x| q(x)).collect();
    let rs: Vec<Q> = cfg.rs.iter().map(|&x| q(x)).collect();
    let ss: Vec<Q> = cfg.ss.iter().map(|&x| q(x)).collect();
    let ts: Vec<Q> = cfg.ts.iter().map(|&x| q(x)).collect();
    let zero = exact::qi(0);
    let one = exact::qi(1);

    let bad = if d > zero && d < one {
        Vec::new()
    } else {
        alloc::vec![format!("delta = {}", cfg.delta)]
    };
    rep.push(DELTA_RANGE, bad, format!("delta = {}", cfg.delta));

    let lhs = exact::frac(17, 16) * &d;
    let bad = if lhs < exact::frac(9, 8) {
        Vec::new()
    } else {
        alloc::vec!["17 delta/16 >= 9/8".to_string()]
    };
    rep.push(DELTA_COUPLING, bad, "17 delta/16 < 9/8".into());

    let increasing = |v: &[Q], name: &str| -> Vec<String> {
        (1..v.len())
            .filter(|&i| v[i] <= v[i - 1])
            .map(|i| format!("{name}[{}] <= {name}[{}]", i + 1, i))
            .collect()
    };
    rep.push(DELTAS_INCREASING, increasing(&de, "delta"), "strict".into());
    rep.push(ELLS_INCREASING, increasing(&el, "l"), "strict".into());

    let bad = if lhs < &el[0] / exact::qi(8) {
        Vec::new()
    } else {
        alloc::vec![format!("17 delta/16 >= l1/8 with l1 = {}", cfg.ells[0])]
    };
    rep.push(L1_BOUND, bad, format!("l1 = {}", cfg.ells[0]));

    let mut bad = Vec::new();
    for (i, l) in el.iter().enumerate() {
        if !exact::is_pos(l) {
            bad.push(format!("l{} <= 0", i + 1));
        }
    }
    for (i, s) in ss.iter().enumerate() {
        if !exact::is_pos(s) {
            bad.push(format!("s{} <= 0", i + 1));
        }
    }
    rep.push(RADII_POSITIVE, bad, "all radii positive".into());

    let mut bad = Vec::new();
    for i in 0..=k {
        for j in i + 1..=k {
            if &de[i] + &el[i] >= &de[j] - &el[j] {
                bad.push(format!("B{} meets B{}", i + 1, j + 1));
            }
        }
    }
    rep.push(B_DISJOINT, bad, "delta_i + l_i < delta_j - l_j".into());

    // G1 = {|z - 1| <= 3}; both centers real.
    let gap = exact::abs(&(&de[0] - one.clone())) - (&el[0] + exact::qi(3));
    let bad = if exact::is_pos(&gap) {
        Vec::new()
    } else {
        alloc::vec!["B1 meets G1".to_string()]
    };
    rep.push(B1_CLEAR_OF_G1, bad, "|delta_1 - 1| > l1 + 3".into());

    let mut bad = Vec::new();
    for i in 0..k {
        if ms[i] <= &de[i] + &el[i] {
            bad.push(format!("m{0} <= delta{0} + l{0}", i + 1));
        }
        if ms[i] >= &de[i + 1] - &el[i + 1] {
            bad.push(format!("m{} >= delta{1} - l{1}", i + 1, i + 2));
        }
    }
    rep.push(M_INTERLEAVE, bad, "delta_k + l_k < m_k < delta_{k+1} - l_{k+1}".into());

    rep.push(R_INCREASING, increasing(&rs, "r"), "-r_k strictly decreasing".into());

    let mut bad = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            // A_j lies to the left of A_i
            if &rs[j] - &ss[j] <= &rs[i] + &ss[i] {
                bad.push(format!("A{} meets A{}", i + 1, j + 1));
            }
        }
    }
    rep.push(A_DISJOINT, bad, "r_{k+1} - s_{k+1} > r_k + s_k".into());

    let mut bad = Vec::new();
    for i in 0..k {
        let neg_t = -ts[i].clone();
        if neg_t >= -&rs[i] + &ss[i] {
            bad.push(format!("-t{0} >= -r{0} + s{0}", i + 1));
        }
        if neg_t >= -&rs[i] - &ss[i] {
            bad.push(format!("L{0} meets A{0}", i + 1));
        }
        if i + 1 < k {
            let right_next = -&rs[i + 1] + &ss[i + 1];
            if neg_t <= right_next {
                bad.push(format!("-t{} <= -r{1} + s{1}", i + 1, i + 2));
            }
        }
    }
    rep.push(T_INTERLEAVE, bad, "(-r_{k+1} + s_{k+1}) < -t_k < -r_k - s_k".into());

    let minus2 = exact::qi(-2);
    let mut bad = Vec::new();
    for i in 0..k {
        if -&rs[i] + &ss[i] >= minus2 {
            bad.push(format!("A{} reaches Re z >= -2", i + 1));
        }
        if -ts[i].clone() >= minus2 {
            bad.push(format!("L{} at Re z >= -2", i + 1));
        }
    }
    rep.push(LEFT_OF_G1, bad, "-r_k + s_k < -2 and -t_k < -2".into());

    rep
}

/// Every piece stored in the config: G1, B_1..B_{K+1}, M_k, A_k, L_k.
pub fn all_pieces(cfg: &ScaffoldConfig) -> Vec<Region> {
    let mut out = alloc::vec![Region {
        label: Label::G1,
        shape: Shape::disk(1.0, 3.0),
    }];
    for (i, (&c, &r)) in cfg.deltas.iter().zip(&cfg.ells).enumerate() {
        out.push(Region {
            label: Label::B(i + 1),
            shape: Shape::disk(c, r),
        });
    }
    for (i, &m) in cfg.ms.iter().enumerate() {
        out.push(Region {
            label: Label::M(i + 1),
            shape: Shape::Line { re: m },
        });
    }
    for (i, (&r, &s)) in cfg.rs.iter().zip(&cfg.ss).enumerate() {
        out.push(Region {
            label: Label::A(i + 1),
            shape: Shape::disk(-r, s),
        });
    }
    for (i, &t) in cfg.ts.iter().enumerate() {
        out.push(Region {
            label: Label::L(i + 1),
            shape: Shape::Line { re: -t },
        });
    }
    out
}

/// Pieces carrying a target for `variant`, indices k ≤ K.
pub fn regions(cfg: &ScaffoldConfig, variant: TargetVariant) -> Vec<Region> {
    let k = cfg.depth;
    let left = !matches!(variant, TargetVariant::Attracting);
    all_pieces(cfg)
        .into_iter()
        .filter(|r| match r.label {
            Label::G1 => true,
            Label::B(i) | Label::M(i) => i <= k,
            Label::A(_) | Label::L(_) => left,
            Label::G2 => false,
        })
        .collect()
}

// Signed gap along the real axis between two pieces with real centers.
fn gap_q(a: &Shape, b: &Shape) -> Option<Q> {
    let part = |s: &Shape| match *s {
        Shape::Disk { center, radius } => Some((q(center.re), q(radius), center.im == 0.0)),
        Shape::Line { re } => Some((q(re), exact::qi(0), true)),
        Shape::Segment { .. } => None,
    };
    let (ca, ra, ok_a) = part(a)?;
    let (cb, rb, ok_b) = part(b)?;
    if !(ok_a && ok_b) {
        return None;
    }
    Some(exact::abs(&(ca - cb)) - ra - rb)
}

/// Positive gaps between all pairs of pieces, smallest first.
pub fn piece_gaps(cfg: &ScaffoldConfig) -> Vec<(Label, Label, f64)> {
    use num_traits::ToPrimitive;
    let pieces = all_pieces(cfg);
    let mut out = Vec::new();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            if let Some(g) = gap_q(&pieces[i].shape, &pieces[j].shape) {
                out.push((pieces[i].label, pieces[j].label, g.to_f64().unwrap_or(f64::NAN)));
            }
        }
    }
    out.sort_by(|a, b| a.2.total_cmp(&b.2));
    out
}

/// Sufficient conditions for G to be a Carleman set, specialised to this
/// family of disks on the real axis and vertical lines.
pub fn nersesjan_check(cfg: &ScaffoldConfig) -> StructuralReport {
    use constraint::*;
    let mut rep = StructuralReport::default();
    let shape = shape_problems(cfg);
    if !shape.is_empty() {
        rep.push(SHAPE, shape, String::new());
        for name in [PIECES_DISJOINT, LINES_INTERLEAVE, ESCAPE_MONOTONE] {
            rep.checks.push(ConstraintCheck {
                constraint: name.to_string(),
                pass: false,
                detail: "not evaluated: malformed config".to_string(),
            });
        }
        return rep;
    }
    rep.push(SHAPE, Vec::new(), format!("K = {}", cfg.depth));

    let pieces = all_pieces(cfg);
    let mut bad = Vec::new();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            match gap_q(&pieces[i].shape, &pieces[j].shape) {
                Some(g) if exact::is_pos(&g) => {}
                Some(_) => bad.push(format!("{} meets {}", pieces[i].label, pieces[j].label)),
                None => bad.push(format!(
                    "{} or {} is off the real axis",
                    pieces[i].label, pieces[j].label
                )),
            }
        }
    }
    let ok = match piece_gaps(cfg).first() {
        Some((a, b, g)) => format!("min gap {g} between {a} and {b}"),
        None => "no pairs".to_string(),
    };
    rep.push(PIECES_DISJOINT, bad, ok);

    let k = cfg.depth;
    let mut bad = Vec::new();
    for i in 0..k {
        let m = q(cfg.ms[i]);
        let after_b = m > q(cfg.deltas[i]) + q(cfg.ells[i]);
        let before_b = m < q(cfg.deltas[i + 1]) - q(cfg.ells[i + 1]);
        if !(after_b && before_b) {
            bad.push(format!("M{} not between B{} and B{}", i + 1, i + 1, i + 2));
        }
        let x = -q(cfg.ts[i]);
        let left_of_a = x < -q(cfg.rs[i]) - q(cfg.ss[i]);
        let right_of_next = i + 1 >= k || x > -q(cfg.rs[i + 1]) + q(cfg.ss[i + 1]);
        if !(left_of_a && right_of_next) {
            bad.push(format!("L{} not between A{} and A{}", i + 1, i + 2, i + 1));
        }
    }
    rep.push(LINES_INTERLEAVE, bad, "every line separates consecutive disks".into());

    let mut bad = Vec::new();
    let inner_b: Vec<Q> = (0..=k).map(|i| q(cfg.deltas[i]) - q(cfg.ells[i])).collect();
    let inner_a: Vec<Q> = (0..k).map(|i| q(cfg.rs[i]) - q(cfg.ss[i])).collect();
    for i in 1..inner_b.len() {
        if inner_b[i] <= inner_b[i - 1] || cfg.deltas[i] <= cfg.deltas[i - 1] {
            bad.push(format!("B{} does not move outward", i + 1));
        }
    }
    for i in 1..inner_a.len() {
        if inner_a[i] <= inner_a[i - 1] {
            bad.push(format!("A{} does not move outward", i + 1));
        }
    }
    for i in 1..k {
        if q(cfg.ms[i]) <= q(cfg.ms[i - 1]) {
            bad.push(format!("M{} does not move outward", i + 1));
        }
        if q(cfg.ts[i]) <= q(cfg.ts[i - 1]) {
            bad.push(format!("L{} does not move outward", i + 1));
        }
    }
    rep.push(
        ESCAPE_MONOTONE,
        bad,
        "inner edges strictly increase, so each compact set meets finitely many pieces".into(),
    );
    rep
}

/// B'_k, M'_k and G2 always; A'_k and L'_k when the variant targets A_k, L_k.
pub fn product_domains(cfg: &ScaffoldConfig, variant: TargetVariant) -> Vec<ProductDomain> {
    let k = cfg.depth;
    let d = cfg.delta;
    let mut out = Vec::new();
    for i in 0..k {
        out.push(ProductDomain {
            label: Label::B(i + 1),
            z: Shape::disk(cfg.deltas[i], cfg.ells[i]),
            z_closed: true,
            w: WBound {
                bound: cfg.ells[i] / (8.0 * d),
                closed: false,
            },
        });
    }
    for i in 0..k {
        out.push(ProductDomain {
            label: Label::M(i + 1),
            z: Shape::Line { re: cfg.ms[i] },
            z_closed: true,
            w: WBound::all(),
        });
    }
    if !matches!(variant, TargetVariant::Attracting) {
        for i in 0..k {
            out.push(ProductDomain {
                label: Label::A(i + 1),
                z: Shape::disk(-cfg.rs[i], cfg.ss[i]),
                z_closed: true,
                w: WBound {
                    bound: cfg.ells[0] / 4.0,
                    closed: true,
                },
            });
        }
        for i in 0..k {
            out.push(ProductDomain {
                label: Label::L(i + 1),
                z: Shape::Line { re: -cfg.ts[i] },
                z_closed: true,
                w: WBound::all(),
            });
        }
    }
    out.push(g2(cfg));
    out
}

pub fn g2(cfg: &ScaffoldConfig) -> ProductDomain {
    ProductDomain {
        label: Label::G2,
        z: Shape::disk(1.0, 3.0),
        z_closed: true,
        w: WBound {
            bound: g2_wbound(cfg),
            closed: true,
        },
    }
}

/// `{|z - 1| < 2, |w| < 9/(8δ)}`, the landing zone for the line pieces.
pub fn g2_inner(cfg: &ScaffoldConfig) -> ProductDomain {
    ProductDomain {
        label: Label::G2,
        z: Shape::disk(1.0, 2.0),
        z_closed: false,
        w: WBound {
            bound: g2_wbound(cfg),
            closed: false,
        },
    }
}

pub fn g2_wbound(cfg: &ScaffoldConfig) -> f64 {
    9.0 / (8.0 * cfg.delta)
}

/// Bounding box of the variant's pieces. The height is the largest disk
/// radius, which also fixes the truncation of the lines.
pub fn auto_bbox(cfg: &ScaffoldConfig, variant: TargetVariant) -> Rect {
    let regs = regions(cfg, variant);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut h: f64 = 0.0;
    for r in &regs {
        match r.shape {
            Shape::Disk { center, radius } => {
                lo = lo.min(center.re - radius);
                hi = hi.max(center.re + radius);
                h = h.max(radius + center.im.abs());
            }
            Shape::Line { re } | Shape::Segment { re, .. } => {
                lo = lo.min(re);
                hi = hi.max(re);
            }
        }
    }
    Rect {
        re_lo: lo - 1.0,
        re_hi: hi + 1.0,
        im_lo: -h,
        im_hi: h,
    }
}

/// The largest |w| any product domain of the variant asks about once the
/// lines are clipped at the G2 bound.
pub fn w_range(cfg: &ScaffoldConfig, variant: TargetVariant) -> f64 {
    let wmax = g2_wbound(cfg);
    product_domains(cfg, variant)
        .iter()
        .map(|d| if d.w.bound.is_finite() { d.w.bound } else { wmax })
        .fold(0.0, f64::max)
}
