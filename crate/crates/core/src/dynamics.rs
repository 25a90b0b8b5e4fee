//! Orbits, the one-step path graph over tracked domains, and its
//! classification.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scaffold::{Label, ProductDomain, ScaffoldConfig};
use crate::targets::TargetVariant;
use crate::interval::{subdivide, IntervalError, ProductBox};
use crate::verify::{box_meets, domain_box, image_enclosure, inclusions, CertStatus, InclusionCertificate, MapRealization};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitPoint {
    pub z: Complex64,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    /// `iterates[0]` is the initial point.
    pub iterates: Vec<OrbitPoint>,
    /// Set when an iterate stopped being finite; the orbit ends before it.
    pub truncated: bool,
}

impl OrbitRecord {
    pub fn initial(&self) -> OrbitPoint {
        self.iterates[0]
    }

    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn iterate(m: &MapRealization, z: Complex64, w: f64, n: usize) -> OrbitRecord {
    let mut pts = alloc::vec![OrbitPoint { z, w }];
    let (mut z, mut w) = (z, w);
    for _ in 0..n {
        let (nz, nw) = m.apply(z, w);
        if !(nz.re.is_finite() && nz.im.is_finite() && nw.is_finite()) {
            return OrbitRecord {
                iterates: pts,
                truncated: true,
            };
        }
        z = nz;
        w = nw;
        pts.push(OrbitPoint { z, w });
    }
    OrbitRecord {
        iterates: pts,
        truncated: false,
    }
}

/// `start` followed by `n` successive image enclosures.
pub fn enclosure_orbit(m: &MapRealization, start: ProductBox, n: usize) -> Result<Vec<ProductBox>, IntervalError> {
    let mut out = alloc::vec![start];
    for _ in 0..n {
        let next = image_enclosure(m, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// Hull of the image enclosures of the leaves, `depth` bisections down, that
/// meet `d`. `None` for unbounded domains or on overflow.
pub fn domain_image(m: &MapRealization, d: &ProductDomain, depth: u32) -> Option<ProductBox> {
    let mut stack = alloc::vec![(domain_box(d)?, 0u32)];
    let mut hull: Option<ProductBox> = None;
    while let Some((b, k)) = stack.pop() {
        if !box_meets(d, &b) {
            continue;
        }
        if k < depth {
            let kids = subdivide(&b);
            if kids.len() > 1 {
                stack.extend(kids.into_iter().map(|c| (c, k + 1)));
                continue;
            }
        }
        let img = image_enclosure(m, &b).ok()?;
        hull = Some(match hull {
            None => img,
            Some(h) => ProductBox {
                z: h.z.hull(&img.z),
                w: h.w.hull(&img.w),
            },
        });
    }
    hull
}

/// As [`enclosure_orbit`], intersecting each image with the previous box.
/// Sound only when `F(D) ⊆ D` holds for a domain `D ⊆ start`: the exact
/// iterates of `D` are then nested, so every box still contains them.
pub fn nested_enclosure_orbit(
    m: &MapRealization,
    start: ProductBox,
    n: usize,
) -> Result<Vec<ProductBox>, IntervalError> {
    let mut out = alloc::vec![start];
    for _ in 0..n {
        let prev = out.last().unwrap();
        let img = image_enclosure(m, prev)?;
        let next = match (img.z.intersect(&prev.z), img.w.intersect(&prev.w)) {
            (Some(z), Some(w)) => ProductBox { z, w },
            _ => img,
        };
        out.push(next);
    }
    Ok(out)
}

/// True when the orbit starts beyond the inner edge of some B_k and each
/// later iterate clears the inner edge of the next disk, for as long as the
/// config has disks to compare against.
pub fn escape_check(o: &OrbitRecord, cfg: &ScaffoldConfig) -> bool {
    let edges: Vec<f64> = cfg.deltas.iter().zip(&cfg.ells).map(|(d, l)| d - l).collect();
    if o.is_empty() || edges.is_empty() {
        return false;
    }
    let x0 = o.iterates[0].z.re;
    let Some(k0) = edges.iter().rposition(|&e| x0 > e) else {
        return false;
    };
    let mut checked = 0;
    for (i, p) in o.iterates.iter().enumerate().skip(1) {
        let k = k0 + i;
        if k >= edges.len() {
            break;
        }
        if !(p.z.re > edges[k]) {
            return false;
        }
        checked += 1;
    }
    checked > 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub name: String,
    pub sink: bool,
    /// Last tracked domain of an escaping chain: its successor lies beyond
    /// the truncation.
    pub dangling: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathGraph {
    pub variant: TargetVariant,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub classes: Vec<Classification>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    MissingCertificates(Vec<String>),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::MissingCertificates(v) => {
                write!(f, "missing certificates for: {}", v.join(", "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Attracting,
    EscapingWandering,
    /// Forward path ends in the sink.
    Absorbed,
    Sink,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathMerge {
    pub other: String,
    /// Steps along this node's path.
    pub m: usize,
    /// Steps along the other node's path.
    pub n: usize,
    pub at: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub node: String,
    pub kind: NodeKind,
    pub common_path_with: Vec<PathMerge>,
    /// Wandering nodes whose paths never meet this one within the horizon.
    pub distinct_from: Vec<String>,
}

/// Nodes are the domains named by the variant's inclusions; edges are the
/// certified ones.
pub fn build_path_graph(
    cfg: &ScaffoldConfig,
    variant: TargetVariant,
    certs: &[InclusionCertificate],
) -> Result<PathGraph, GraphError> {
    let incs = inclusions(cfg, variant);
    let mut missing = Vec::new();
    let mut nodes: Vec<GraphNode> = Vec::new();
    let mut edges = Vec::new();
    let add_node = |nodes: &mut Vec<GraphNode>, name: String, label: Label| {
        if !nodes.iter().any(|n| n.name == name) {
            let escaping = variant != TargetVariant::Attracting;
            nodes.push(GraphNode {
                dangling: escaping && label == Label::B(cfg.depth),
                sink: label == Label::G2,
                name,
            });
        }
    };
    for inc in &incs {
        let (s, t) = (inc.source.name(), inc.target.name());
        add_node(&mut nodes, s.clone(), inc.source.label);
        add_node(&mut nodes, t.clone(), inc.target.label);
        match certs.iter().find(|c| c.source == s && c.target == t) {
            None => missing.push(format!("{s} -> {t}")),
            Some(c) if c.status == CertStatus::Certified => edges.push(GraphEdge { from: s, to: t }),
            Some(_) => {}
        }
    }
    if !missing.is_empty() {
        return Err(GraphError::MissingCertificates(missing));
    }
    nodes.sort_by_key(|n| n.name.parse::<Label>().ok());
    let mut g = PathGraph {
        variant,
        nodes,
        edges,
        classes: Vec::new(),
    };
    let classes = g.nodes.iter().map(|n| classify(&g, &n.name)).collect();
    g.classes = classes;
    Ok(g)
}

impl PathGraph {
    pub fn successor(&self, node: &str) -> Option<&str> {
        self.edges.iter().find(|e| e.from == node).map(|e| e.to.as_str())
    }

    pub fn node(&self, name: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn class(&self, name: &str) -> Option<&Classification> {
        self.classes.iter().find(|c| c.node == name)
    }

    /// Forward path from `node`, stopping before the first repeat.
    pub fn forward_path(&self, node: &str) -> Vec<String> {
        let mut path: Vec<String> = alloc::vec![node.into()];
        let mut cur = node;
        while let Some(nx) = self.successor(cur) {
            if path.iter().any(|p| p == nx) {
                break;
            }
            path.push(nx.into());
            cur = nx;
        }
        path
    }

    /// `from -> to` lines, one per node, in node order.
    pub fn adjacency(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            let to = match self.successor(&n.name) {
                Some(t) => t,
                None if n.dangling => "(dangling)",
                None => "(none)",
            };
            s.push_str(&format!("{} -> {}\n", n.name, to));
        }
        s
    }
}

fn kind_of(g: &PathGraph, node: &str) -> NodeKind {
    let Some(n) = g.node(node) else {
        return NodeKind::Unresolved;
    };
    if n.sink {
        return NodeKind::Sink;
    }
    if g.successor(node) == Some(node) {
        return NodeKind::Attracting;
    }
    let path = g.forward_path(node);
    let last = path.last().unwrap();
    let last_node = g.node(last).unwrap();
    if last_node.sink {
        return NodeKind::Absorbed;
    }
    // Path must end at the dangling node without looping back.
    if !last_node.dangling || g.successor(last).is_some() {
        return NodeKind::Unresolved;
    }
    let mut prev = 0usize;
    for p in &path {
        match p.parse::<Label>() {
            Ok(Label::B(k)) => {
                if k <= prev {
                    return NodeKind::Unresolved;
                }
                prev = k;
            }
            Ok(Label::A(_)) if p == node => {}
            _ => return NodeKind::Unresolved,
        }
    }
    NodeKind::EscapingWandering
}

pub fn classify(g: &PathGraph, node: &str) -> Classification {
    let kind = kind_of(g, node);
    let mut common = Vec::new();
    let mut distinct = Vec::new();
    if kind == NodeKind::EscapingWandering {
        let mine = g.forward_path(node);
        for other in &g.nodes {
            if other.name == node || kind_of(g, &other.name) != NodeKind::EscapingWandering {
                continue;
            }
            let theirs = g.forward_path(&other.name);
            let mut best: Option<(usize, usize)> = None;
            for (m, a) in mine.iter().enumerate() {
                for (n, b) in theirs.iter().enumerate() {
                    if a == b && best.is_none_or(|(bm, bn)| (m + n, m) < (bm + bn, bm)) {
                        best = Some((m, n));
                    }
                }
            }
            match best {
                Some((m, n)) => common.push(PathMerge {
                    other: other.name.clone(),
                    m,
                    n,
                    at: mine[m].clone(),
                }),
                None => distinct.push(other.name.clone()),
            }
        }
    }
    Classification {
        node: node.into(),
        kind,
        common_path_with: common,
        distinct_from: distinct,
    }
}

/// Node name → kind, for reports.
pub fn kinds(g: &PathGraph) -> BTreeMap<String, NodeKind> {
    g.classes.iter().map(|c| (c.node.clone(), c.kind)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::PolyApproximant;
    use crate::scaffold::generate_scaffold;

    fn constant_map() -> MapRealization {
        MapRealization {
            f1: PolyApproximant::constant(Complex64::new(2f64.ln(), 0.0)),
            f2: PolyApproximant::zero(),
            delta: 0.5,
        }
    }

    #[test]
    fn orbits() {
        let m = constant_map();
        let o = iterate(&m, Complex64::new(-4.0, 1.0), 3.0, 0);
        assert_eq!(o.iterates.len(), 1);
        assert!(o.is_empty());
        let o = iterate(&m, Complex64::new(-4.0, 1.0), 3.0, 4);
        for p in &o.iterates[1..] {
            assert!((p.z - Complex64::new(2.5, 0.0)).norm() < 1e-15);
            assert_eq!(p.w, 1.0);
        }
        let cfg = generate_scaffold(0.5, 3, 3.0).unwrap();
        assert!(!escape_check(&o, &cfg));
        assert!(!escape_check(&iterate(&m, Complex64::new(40.0, 0.0), 0.0, 0), &cfg));
    }

    #[test]
    fn overflow_truncates() {
        let m = MapRealization {
            f1: PolyApproximant::monomial(
                alloc::vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                Complex64::new(0.0, 0.0),
                1.0,
            ),
            f2: PolyApproximant::zero(),
            delta: 0.5,
        };
        let o = iterate(&m, Complex64::new(10.0, 0.0), 0.0, 5);
        assert!(o.truncated);
        assert!(o.len() < 5);
    }

    fn cert(s: &str, t: &str, ok: bool) -> InclusionCertificate {
        InclusionCertificate {
            source: s.into(),
            target: t.into(),
            status: if ok { CertStatus::Certified } else { CertStatus::Failed },
            boxes_examined: 1,
            leaves_accepted: 1,
            max_depth: 0,
            witness: None,
            open_box: None,
        }
    }

    fn all_certs(cfg: &ScaffoldConfig, v: TargetVariant) -> Vec<InclusionCertificate> {
        inclusions(cfg, v)
            .iter()
            .map(|i| cert(&i.source.name(), &i.target.name(), true))
            .collect()
    }

    #[test]
    fn wandering_graph() {
        let cfg = generate_scaffold(0.5, 3, 3.0).unwrap();
        let g = build_path_graph(&cfg, TargetVariant::Wandering, &all_certs(&cfg, TargetVariant::Wandering)).unwrap();
        let adj = g.adjacency();
        assert!(adj.contains("B'1 -> B'2\nB'2 -> B'3\nB'3 -> (dangling)\n"));
        assert!(adj.contains("M'2 -> G2\n"));
        assert!(adj.contains("G2 -> G2\n"));
        let c = g.class("B'1").unwrap();
        assert_eq!(c.kind, NodeKind::EscapingWandering);
        let merge = c.common_path_with.iter().find(|p| p.other == "B'2").unwrap();
        assert_eq!((merge.m, merge.n), (1, 0));
        assert_eq!(g.class("M'1").unwrap().kind, NodeKind::Absorbed);
        assert_eq!(g.class("G2").unwrap().kind, NodeKind::Sink);
    }

    #[test]
    fn attracting_and_common_path_graphs() {
        let cfg = generate_scaffold(0.5, 3, 3.0).unwrap();
        let g = build_path_graph(&cfg, TargetVariant::Attracting, &all_certs(&cfg, TargetVariant::Attracting)).unwrap();
        assert_eq!(g.edges.iter().filter(|e| e.from == e.to).count(), 3);
        assert_eq!(g.class("B'2").unwrap().kind, NodeKind::Attracting);

        let g = build_path_graph(&cfg, TargetVariant::CommonPath, &all_certs(&cfg, TargetVariant::CommonPath)).unwrap();
        for a in ["A'1", "A'2", "A'3"] {
            assert_eq!(g.forward_path(a), [a, "B'1", "B'2", "B'3"]);
        }
        let c = g.class("A'1").unwrap();
        let merge = c.common_path_with.iter().find(|p| p.other == "A'2").unwrap();
        assert_eq!((merge.m, merge.n, merge.at.as_str()), (1, 1, "B'1"));
    }

    #[test]
    fn missing_and_failed_certificates() {
        let cfg = generate_scaffold(0.5, 2, 3.0).unwrap();
        let mut certs = all_certs(&cfg, TargetVariant::Wandering);
        certs.remove(0);
        match build_path_graph(&cfg, TargetVariant::Wandering, &certs) {
            Err(GraphError::MissingCertificates(v)) => assert_eq!(v, ["B'1 -> B'2"]),
            other => panic!("{other:?}"),
        }
        let mut certs = all_certs(&cfg, TargetVariant::Wandering);
        certs[0].status = CertStatus::Failed;
        let g = build_path_graph(&cfg, TargetVariant::Wandering, &certs).unwrap();
        assert_eq!(g.successor("B'1"), None);
        assert_eq!(g.class("B'1").unwrap().kind, NodeKind::Unresolved);
    }

    #[test]
    fn out_degree_at_most_one() {
        let cfg = generate_scaffold(0.5, 3, 3.0).unwrap();
        for v in TargetVariant::ALL {
            let g = build_path_graph(&cfg, v, &all_certs(&cfg, v)).unwrap();
            for n in g.nodes.iter().filter(|n| !n.sink) {
                assert!(g.edges.iter().filter(|e| e.from == n.name).count() <= 1);
            }
        }
    }
}
