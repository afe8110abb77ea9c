//! Connected components of the projected intersection of two Lagrangian
//! sections, their degrees, the conditions (M1)/(M2), and morphism spaces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::geometry::{
    common_positive_zeros, eigen_signs_exact, eigen_signs_f64, eval_rat_mat, stable_directions, to_f64_mat, EigenSigns, Geometry, JacobianField, Level, Mat2,
};
use crate::par::{self, Exec};
use crate::surface::{BundleClass, IPoint, QPoint};
use crate::symbolic::{fmt_q, q, to_f64, Divergent, LogValue, Rat1, Root, Q};
use crate::Error;

const ZERO_EIG: f64 = 1e-9;
const EDGE_SAMPLES: [(i64, i64); 3] = [(1, 3), (1, 2), (2, 3)];
const EXTRA_SAMPLES: [(i64, i64); 5] = [(1, 5), (2, 5), (3, 5), (4, 5), (1, 7)];

/// Building block of a carrier.
#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    Whole,
    Vertex(usize),
    /// Closed edge, endpoints included.
    Edge(usize),
    EdgePoint { edge: usize, tau: Root },
    Interior { flat: [f64; 2], poly: [f64; 2], exact: Option<(Q, Q)> },
}

/// A closed subset of P made of faces and isolated points.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Carrier {
    pub whole: bool,
    pub edges: BTreeSet<usize>,
    /// Vertices, including endpoints of the edges.
    pub vertices: BTreeSet<usize>,
    pub points: Vec<Atom>,
}

fn same_point(a: &Atom, b: &Atom) -> bool {
    match (a, b) {
        (Atom::EdgePoint { edge: e1, tau: t1 }, Atom::EdgePoint { edge: e2, tau: t2 }) => {
            e1 == e2
                && match (t1.exact(), t2.exact()) {
                    (Some(x), Some(y)) => x == y,
                    _ => (t1.value() - t2.value()).abs() <= 1e-9 * t1.value().max(1.0),
                }
        }
        (Atom::Interior { flat: x, .. }, Atom::Interior { flat: y, .. }) => (x[0] - y[0]).abs() < 1e-8 && (x[1] - y[1]).abs() < 1e-8,
        _ => false,
    }
}

impl Carrier {
    pub fn whole() -> Self {
        Self { whole: true, ..Self::default() }
    }

    pub fn from_atoms(geom: &Geometry, atoms: &[Atom]) -> Self {
        let mut c = Self::default();
        for a in atoms {
            match a {
                Atom::Whole => c.whole = true,
                Atom::Vertex(v) => {
                    c.vertices.insert(*v);
                }
                Atom::Edge(e) => {
                    c.edges.insert(*e);
                    let edge = &geom.surface.edges[*e];
                    c.vertices.insert(edge.start);
                    c.vertices.insert(edge.end);
                }
                p => c.points.push(p.clone()),
            }
        }
        c
    }

    pub fn is_empty(&self) -> bool {
        !self.whole && self.edges.is_empty() && self.vertices.is_empty() && self.points.is_empty()
    }

    pub fn is_point(&self) -> bool {
        !self.whole && self.edges.is_empty() && self.vertices.len() + self.points.len() == 1
    }

    /// Dimension of the carrier as a cell complex.
    pub fn dim(&self) -> u8 {
        if self.whole {
            2
        } else if !self.edges.is_empty() {
            1
        } else {
            0
        }
    }

    fn contains_point(&self, p: &Atom) -> bool {
        if self.whole || self.points.iter().any(|q| same_point(q, p)) {
            return true;
        }
        matches!(p, Atom::EdgePoint { edge, .. } if self.edges.contains(edge))
    }

    /// Set-theoretic intersection of two closed carriers.
    pub fn intersect(&self, o: &Self) -> Self {
        if self.whole {
            return o.clone();
        }
        if o.whole {
            return self.clone();
        }
        let edges: BTreeSet<usize> = self.edges.intersection(&o.edges).cloned().collect();
        let vertices: BTreeSet<usize> = self.vertices.intersection(&o.vertices).cloned().collect();
        let mut points: Vec<Atom> = self.points.iter().filter(|p| o.contains_point(p)).cloned().collect();
        for p in &o.points {
            if self.contains_point(p) && !points.iter().any(|x| same_point(x, p)) {
                points.push(p.clone());
            }
        }
        Self { whole: false, edges, vertices, points }
    }

    /// Human-readable name: `P`, edge unions such as `E1∪E5`, or point sets
    /// such as `{(4,0)}` in display coordinates.
    pub fn name(&self, geom: &Geometry) -> String {
        self.parts(geom).join("∪")
    }

    /// Faces and points listed separately.
    pub fn parts(&self, geom: &Geometry) -> Vec<String> {
        if self.whole {
            return vec!["P".into()];
        }
        let mut out: Vec<String> = self.edges.iter().map(|&e| geom.surface.edges[e].name.clone()).collect();
        let on_edge: BTreeSet<usize> = self.edges.iter().flat_map(|&e| [geom.surface.edges[e].start, geom.surface.edges[e].end]).collect();
        for &v in &self.vertices {
            if !on_edge.contains(&v) {
                out.push(format!("{{{}}}", display_exact(geom, &geom.surface.vertices[v].point)));
            }
        }
        for p in &self.points {
            out.push(format!("{{{}}}", point_label(geom, p)));
        }
        out
    }

    /// A representative point: the 1/3 point of the first edge, else the
    /// first vertex or isolated point.
    pub fn representative(&self, geom: &Geometry) -> Site {
        if self.whole {
            return Site::Vertex(0);
        }
        if let Some(&e) = self.edges.iter().next() {
            return Site::EdgeTau(e, geom.edge_tau_at_fraction(e, 1.0 / 3.0));
        }
        if let Some(&v) = self.vertices.iter().next() {
            return Site::Vertex(v);
        }
        match &self.points[0] {
            Atom::EdgePoint { edge, tau: Root::Exact(t) } => Site::EdgeTau(*edge, t.clone()),
            Atom::EdgePoint { edge, tau } => Site::EdgeApprox(*edge, tau.value()),
            Atom::Interior { flat, exact, .. } => Site::Interior { flat: *flat, exact: exact.clone() },
            _ => unreachable!("points hold only edge or interior atoms"),
        }
    }

    /// Every point-like location of the carrier (vertices and isolated
    /// points) in intrinsic polytope coordinates.
    pub fn point_sites(&self, geom: &Geometry) -> Vec<Site> {
        let mut out: Vec<Site> = self.vertices.iter().map(|&v| Site::Vertex(v)).collect();
        for p in &self.points {
            out.push(match p {
                Atom::EdgePoint { edge, tau: Root::Exact(t) } => Site::EdgeTau(*edge, t.clone()),
                Atom::EdgePoint { edge, tau } => Site::EdgeApprox(*edge, tau.value()),
                Atom::Interior { flat, exact, .. } => Site::Interior { flat: *flat, exact: exact.clone() },
                _ => continue,
            });
        }
        let _ = geom;
        out
    }

    /// Euclidean distance from an intrinsic point to the carrier.
    pub fn distance(&self, geom: &Geometry, p: [f64; 2]) -> f64 {
        if self.whole {
            return 0.0;
        }
        let mut d = f64::INFINITY;
        for &e in &self.edges {
            let edge = &geom.surface.edges[e];
            d = d.min(seg_dist(p, geom.surface.vertex_f64(edge.start), geom.surface.vertex_f64(edge.end)));
        }
        for s in self.point_sites(geom) {
            let x = s.poly(geom);
            d = d.min((x[0] - p[0]).hypot(x[1] - p[1]));
        }
        d
    }
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
    (a[0] + t * d[0] - p[0]).hypot(a[1] + t * d[1] - p[1])
}

/// A point of the closed polytope in a form suitable for exact evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Site {
    Vertex(usize),
    EdgeTau(usize, Q),
    EdgeApprox(usize, f64),
    Interior { flat: [f64; 2], exact: Option<(Q, Q)> },
}

impl Site {
    /// Intrinsic polytope coordinates.
    pub fn poly(&self, geom: &Geometry) -> [f64; 2] {
        match self {
            Site::Vertex(v) => geom.surface.vertex_f64(*v),
            Site::EdgeTau(e, t) => {
                let p = geom.edge_moment(*e, t);
                [to_f64(&p.0), to_f64(&p.1)]
            }
            Site::EdgeApprox(e, t) => geom.edge_moment_f64(*e, *t),
            Site::Interior { flat, .. } => geom.moment_map(*flat),
        }
    }

    pub fn display(&self, geom: &Geometry) -> [f64; 2] {
        geom.surface.frame.apply(self.poly(geom))
    }

    /// Raw potential `f_I` at the site; `None` where it is `+∞`.
    pub fn potential(&self, geom: &Geometry, c: &BundleClass, i: IPoint) -> Option<Level> {
        match self {
            Site::Vertex(v) => geom.potential_at_vertex(c, i, *v).map(Level::Exact),
            Site::EdgeTau(e, t) => geom.potential_at_edge_point(c, i, *e, t).map(Level::Exact),
            Site::EdgeApprox(e, t) => {
                let v = geom.potential_at_edge_point_f64(c, i, *e, *t);
                v.is_finite().then_some(Level::Approx(v))
            }
            Site::Interior { flat, exact } => match exact {
                Some((s, t)) => {
                    let r = geom.potential_ratio(c, i).eval(s, t)?;
                    LogValue::log(q(1, 2), &r).ok().map(Level::Exact)
                }
                None => Some(Level::Approx(geom.potential_f64(c, i, *flat))),
            },
        }
    }
}

fn display_exact(geom: &Geometry, p: &QPoint) -> String {
    let d = geom.surface.frame.apply_q(p);
    format!("({},{})", fmt_q(&d.0), fmt_q(&d.1))
}

fn display_f64(p: [f64; 2]) -> String {
    format!("({:.6},{:.6})", p[0], p[1])
}

fn point_label(geom: &Geometry, p: &Atom) -> String {
    match p {
        Atom::EdgePoint { edge, tau: Root::Exact(t) } => display_exact(geom, &geom.edge_moment(*edge, t)),
        Atom::EdgePoint { edge, tau } => display_f64(geom.surface.frame.apply(geom.edge_moment_f64(*edge, tau.value()))),
        Atom::Interior { exact: Some((s, t)), .. } => display_exact(geom, &geom.moment_map_exact(s, t)),
        Atom::Interior { poly, .. } => display_f64(geom.surface.frame.apply(*poly)),
        Atom::Vertex(v) => display_exact(geom, &geom.surface.vertices[*v].point),
        Atom::Edge(e) => geom.surface.edges[*e].name.clone(),
        Atom::Whole => "P".into(),
    }
}

/// Stable-manifold dimension of a component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    Fixed(u8),
    NonConstant,
    Undetermined,
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Fixed(d) => write!(f, "{d}"),
            Degree::NonConstant => write!(f, "non-constant"),
            Degree::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// Why a component is not a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    /// (M1): the stable dimension varies along the component.
    NonConstant,
    /// (M2): positive degree and the stable manifold leaves P.
    M2 { degree: u8 },
    Undetermined,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NonConstant => write!(f, "M1: non-constant stable dimension"),
            Rejection::M2 { degree } => write!(f, "M2: degree {degree} stable manifold leaves P"),
            Rejection::Undetermined => write!(f, "degree undetermined"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacMethod {
    Exact,
    FiniteDifference,
    Float,
}

/// Linearisation at one sample point of a component.
#[derive(Clone, Debug)]
pub struct Sample {
    pub site: Site,
    pub poly: [f64; 2],
    pub signs: EigenSigns,
    pub method: JacMethod,
    pub matrix: Mat2,
}

#[derive(Clone, Debug)]
pub struct Component {
    pub c: BundleClass,
    pub i: IPoint,
    pub carrier: Carrier,
    pub degree: Degree,
    pub m1_ok: bool,
    pub m2_ok: bool,
    pub rejection: Option<Rejection>,
    pub samples: Vec<Sample>,
}

impl Component {
    pub fn is_generator(&self) -> bool {
        self.rejection.is_none()
    }

    pub fn label(&self) -> String {
        format!("V_{{{};({},{})}}", self.c, self.i.0, self.i.1)
    }
}

/// Morphism space between two bundles, computed through the difference.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub from: BundleClass,
    pub to: BundleClass,
    pub diff: BundleClass,
    pub generators: Vec<Component>,
    pub rejected: Vec<Component>,
    pub warnings: Vec<String>,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, i: IPoint) -> Option<&Component> {
        self.generators.iter().find(|g| g.i == i)
    }

    pub fn to_json(&self, geom: &Geometry) -> Value {
        let gen: Vec<Value> = self
            .generators
            .iter()
            .map(|g| json!({"I": [g.i.0, g.i.1], "carrier": g.carrier.parts(geom), "degree": g.degree.to_string()}))
            .collect();
        let rej: Vec<Value> = self
            .rejected
            .iter()
            .map(|g| {
                json!({"I": [g.i.0, g.i.1], "carrier": g.carrier.parts(geom), "degree": g.degree.to_string(), "reason": g.rejection.map(|r| r.to_string())})
            })
            .collect();
        json!({
            "from": self.from.0, "to": self.to.0, "diff": self.diff.0,
            "generators": gen, "rejected": rej, "warnings": self.warnings,
        })
    }
}

/// Per-bundle data shared by all labels `I`.
pub struct DiffData {
    pub c: BundleClass,
    pub jacobian: JacobianField,
    edge_jac: Vec<Result<[[Rat1; 2]; 2], Divergent>>,
    pub components: Vec<Component>,
    pub warnings: Vec<String>,
}

/// Computes and caches components per difference bundle.
pub struct MorseEngine {
    pub geom: Geometry,
    exec: Exec,
    cache: Mutex<HashMap<BundleClass, Arc<DiffData>>>,
}

impl MorseEngine {
    pub fn new(geom: Geometry) -> Self {
        Self { geom, exec: Exec::Auto, cache: Mutex::new(HashMap::new()) }
    }

    pub fn with_exec(geom: Geometry, exec: Exec) -> Self {
        Self { geom, exec, cache: Mutex::new(HashMap::new()) }
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    /// Lattice labels that can carry a component: the section polytope
    /// dilated by one in every offset, together with the bounding box of
    /// the signed combination `Σ c_k Δ_k` containing every section value.
    pub fn candidate_labels(&self, c: &BundleClass) -> Vec<IPoint> {
        let s = &self.geom.surface;
        let (lo, hi) = s.section_image_box(c);
        let offsets = s.support_numbers(c);
        let mut out = Vec::new();
        for x in lo.0 - 3..=hi.0 + 3 {
            for y in lo.1 - 3..=hi.1 + 3 {
                let in_box = x >= lo.0 && x <= hi.0 && y >= lo.1 && y <= hi.1;
                let dilated = s.edges.iter().zip(&offsets).all(|(e, &a)| x * e.normal.0 + y * e.normal.1 <= a + 1);
                if in_box || dilated {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn diff_data(&self, c: &BundleClass) -> Result<Arc<DiffData>, Error> {
        self.geom.surface.check_bundle(c)?;
        if let Some(d) = self.cache.lock().unwrap().get(c) {
            return Ok(d.clone());
        }
        let jacobian = self.geom.jacobian(c);
        let edge_jac = (0..self.geom.edge_count()).map(|e| self.geom.jacobian_on_edge(&jacobian, e)).collect();
        let mut data = DiffData { c: c.clone(), jacobian, edge_jac, components: Vec::new(), warnings: Vec::new() };
        let labels = self.candidate_labels(c);
        let results = par::map(self.exec, &labels, |&i| self.components_with(&data, i));
        for (comps, warn) in results {
            data.components.extend(comps);
            data.warnings.extend(warn);
        }
        let data = Arc::new(data);
        self.cache.lock().unwrap().insert(c.clone(), data.clone());
        Ok(data)
    }

    /// Components `V_{c;I}` with degrees and verdicts.
    pub fn intersection_components(&self, c: &BundleClass, i: IPoint) -> Result<Vec<Component>, Error> {
        let data = self.diff_data(c)?;
        Ok(data.components.iter().filter(|x| x.i == i).cloned().collect())
    }

    fn components_with(&self, data: &DiffData, i: IPoint) -> (Vec<Component>, Vec<String>) {
        let c = &data.c;
        let (groups, warnings) = self.zero_set(c, i);
        let comps = groups
            .into_iter()
            .map(|atoms| {
                let carrier = Carrier::from_atoms(&self.geom, &atoms);
                self.analyse(data, i, carrier)
            })
            .collect();
        (comps, warnings)
    }

    /// Zero set of the gradient field over the closed polytope, grouped into
    /// connected components.
    pub fn zero_set(&self, c: &BundleClass, i: IPoint) -> (Vec<Vec<Atom>>, Vec<String>) {
        let g = &self.geom;
        let f = g.vector_field(c, i);
        if f[0].is_zero() && f[1].is_zero() {
            return (vec![vec![Atom::Whole]], Vec::new());
        }
        let h = g.slacks(c, i);
        let s = &g.surface;
        let mut atoms: Vec<Atom> = Vec::new();
        for (v, vert) in s.vertices.iter().enumerate() {
            if h[vert.edges.0] == 0 && h[vert.edges.1] == 0 {
                atoms.push(Atom::Vertex(v));
            }
        }
        for e in 0..g.edge_count() {
            if h[e] != 0 {
                continue;
            }
            let fe = g.field_on_edge(c, i, e);
            if fe[0].is_zero() && fe[1].is_zero() {
                atoms.push(Atom::Edge(e));
            } else {
                for tau in common_positive_zeros(&fe[0], &fe[1]) {
                    atoms.push(Atom::EdgePoint { edge: e, tau });
                }
            }
        }
        let mut warnings = Vec::new();
        let (lo, hi) = s.section_image_box(c);
        if i.0 >= lo.0 && i.0 <= hi.0 && i.1 >= lo.1 && i.1 <= hi.1 {
            let solve = g.interior_zeros(c, i);
            if solve.inconclusive() {
                warnings.push(format!("interior solve inconclusive for c={c}, I=({},{}); residuals {:?}", i.0, i.1, solve.residuals));
            }
            for z in solve.zeros {
                atoms.push(Atom::Interior { flat: z.flat, poly: z.poly, exact: z.exact });
            }
        }
        // union-find over atoms sharing a vertex
        let n = atoms.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let vertex_of: BTreeMap<usize, usize> = atoms.iter().enumerate().filter_map(|(k, a)| if let Atom::Vertex(v) = a { Some((*v, k)) } else { None }).collect();
        for k in 0..n {
            if let Atom::Edge(e) = atoms[k] {
                let edge = &s.edges[e];
                for v in [edge.start, edge.end] {
                    if let Some(&j) = vertex_of.get(&v) {
                        let (a, b) = (find(&mut parent, k), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Atom>> = BTreeMap::new();
        for k in 0..n {
            let r = find(&mut parent, k);
            groups.entry(r).or_default().push(atoms[k].clone());
        }
        (groups.into_values().collect(), warnings)
    }

    fn sample_edge(&self, data: &DiffData, e: usize, tau: Site) -> Option<Sample> {
        let g = &self.geom;
        let poly = tau.poly(g);
        if let Ok(m) = &data.edge_jac[e] {
            match &tau {
                Site::EdgeTau(_, t) => {
                    if let Some(x) = eval_rat_mat(m, t) {
                        return Some(Sample { signs: eigen_signs_exact(&x), matrix: to_f64_mat(&x), site: tau, poly, method: JacMethod::Exact });
                    }
                }
                Site::EdgeApprox(_, t) => {
                    let x = [[m[0][0].eval_f64(*t), m[0][1].eval_f64(*t)], [m[1][0].eval_f64(*t), m[1][1].eval_f64(*t)]];
                    return Some(Sample { signs: eigen_signs_f64(&x, ZERO_EIG), matrix: x, site: tau, poly, method: JacMethod::Float });
                }
                _ => {}
            }
        }
        let n = g.surface.edges[e].normal;
        let len = (n.0 as f64).hypot(n.1 as f64);
        let x = g.jacobian_fd(&data.c, poly, [-n.0 as f64 / len, -n.1 as f64 / len])?;
        Some(Sample { signs: eigen_signs_f64(&x, ZERO_EIG), matrix: x, site: tau, poly, method: JacMethod::FiniteDifference })
    }

    fn sample_vertex(&self, data: &DiffData, v: usize) -> Option<Sample> {
        let g = &self.geom;
        let poly = g.surface.vertex_f64(v);
        if let Some(x) = g.jacobian_at_vertex(&data.jacobian, v) {
            return Some(Sample { signs: eigen_signs_exact(&x), matrix: to_f64_mat(&x), site: Site::Vertex(v), poly, method: JacMethod::Exact });
        }
        let (ein, eout) = g.surface.vertices[v].edges;
        let a = g.surface.vertex_f64(g.surface.edges[ein].start);
        let b = g.surface.vertex_f64(g.surface.edges[eout].end);
        let unit = |d: [f64; 2]| {
            let l = d[0].hypot(d[1]);
            [d[0] / l, d[1] / l]
        };
        let (u, w) = (unit([a[0] - poly[0], a[1] - poly[1]]), unit([b[0] - poly[0], b[1] - poly[1]]));
        let x = g.jacobian_fd(&data.c, poly, unit([u[0] + w[0], u[1] + w[1]]))?;
        Some(Sample { signs: eigen_signs_f64(&x, ZERO_EIG), matrix: x, site: Site::Vertex(v), poly, method: JacMethod::FiniteDifference })
    }

    fn sample_site(&self, data: &DiffData, site: Site) -> Option<Sample> {
        match site {
            Site::Vertex(v) => self.sample_vertex(data, v),
            Site::EdgeTau(e, _) | Site::EdgeApprox(e, _) => self.sample_edge(data, e, site),
            Site::Interior { flat, .. } => {
                let x = self.geom.jacobian_f64(&data.c, flat);
                let poly = self.geom.moment_map(flat);
                Some(Sample { signs: eigen_signs_f64(&x, ZERO_EIG), matrix: x, site, poly, method: JacMethod::Float })
            }
        }
    }

    fn edge_samples(&self, data: &DiffData, carrier: &Carrier, fracs: &[(i64, i64)]) -> Vec<Sample> {
        let mut out = Vec::new();
        for &e in &carrier.edges {
            for &(a, b) in fracs {
                let tau = self.geom.edge_tau_at_fraction(e, a as f64 / b as f64);
                out.extend(self.sample_edge(data, e, Site::EdgeTau(e, tau)));
            }
        }
        out
    }

    /// Degree, (M1) and (M2) for one component.
    fn analyse(&self, data: &DiffData, i: IPoint, carrier: Carrier) -> Component {
        let c = data.c.clone();
        if carrier.whole {
            return Component { c, i, carrier, degree: Degree::Fixed(0), m1_ok: true, m2_ok: true, rejection: None, samples: Vec::new() };
        }
        let dim = carrier.dim();
        let mut samples = if carrier.edges.is_empty() {
            carrier.point_sites(&self.geom).into_iter().filter_map(|s| self.sample_site(data, s)).collect()
        } else {
            self.edge_samples(data, &carrier, &EDGE_SAMPLES)
        };
        let generic = |s: &Sample| s.signs.zero <= dim;
        let mut dims: Vec<u8> = samples.iter().filter(|s| generic(s)).map(|s| s.signs.negative).collect();
        let mut degree = match dims.first() {
            None => Degree::Undetermined,
            Some(&d) if dims.iter().all(|&x| x == d) => Degree::Fixed(d),
            Some(_) => Degree::NonConstant,
        };
        if degree == Degree::NonConstant {
            let extra = self.edge_samples(data, &carrier, &EXTRA_SAMPLES);
            dims.extend(extra.iter().filter(|s| generic(s)).map(|s| s.signs.negative));
            samples.extend(extra);
            let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
            for d in &dims {
                *counts.entry(*d).or_default() += 1;
            }
            let repeated = counts.values().filter(|&&n| n >= 2).count();
            if repeated < 2 {
                // a single outlier is treated as a non-generic sample
                degree = Degree::Fixed(*counts.iter().max_by_key(|(_, n)| **n).unwrap().0);
            }
        }
        let m1_ok = matches!(degree, Degree::Fixed(_));
        let m2_ok = match degree {
            Degree::Fixed(0) => true,
            Degree::Fixed(d) => samples.iter().filter(|s| generic(s) && s.signs.negative == d).any(|s| self.stable_manifold_inside(s)),
            _ => false,
        };
        let rejection = match degree {
            Degree::Undetermined => Some(Rejection::Undetermined),
            Degree::NonConstant => Some(Rejection::NonConstant),
            Degree::Fixed(d) if !m2_ok => Some(Rejection::M2 { degree: d }),
            Degree::Fixed(_) => None,
        };
        Component { c, i, carrier, degree, m1_ok, m2_ok, rejection, samples }
    }

    /// (M2) at one sample: every stable direction stays in P in both senses
    /// for some offset in the sweep `1e-2, 1e-3, 1e-4`.
    fn stable_manifold_inside(&self, s: &Sample) -> bool {
        let dirs = stable_directions(&s.matrix, ZERO_EIG);
        dirs.iter().all(|d| {
            [1e-2, 1e-3, 1e-4].iter().any(|&eps| {
                let a = [s.poly[0] + eps * d[0], s.poly[1] + eps * d[1]];
                let b = [s.poly[0] - eps * d[0], s.poly[1] - eps * d[1]];
                self.geom.surface.margin(a) >= -1e-12 && self.geom.surface.margin(b) >= -1e-12
            })
        })
    }

    /// Morphism space `Mo(L(from), L(to))` via the difference bundle.
    pub fn hom_space(&self, from: &BundleClass, to: &BundleClass) -> Result<HomSpace, Error> {
        self.geom.surface.check_bundle(from)?;
        self.geom.surface.check_bundle(to)?;
        let diff = to.sub(from);
        let data = self.diff_data(&diff)?;
        let (generators, rejected): (Vec<Component>, Vec<Component>) = data.components.iter().cloned().partition(|c| c.is_generator());
        Ok(HomSpace { from: from.clone(), to: to.clone(), diff, generators, rejected, warnings: data.warnings.clone() })
    }

    /// All ordered pairs of a collection, computed in parallel.
    pub fn hom_table(&self, coll: &[BundleClass]) -> Result<Vec<Vec<HomSpace>>, Error> {
        let pairs: Vec<(usize, usize)> = (0..coll.len()).flat_map(|a| (0..coll.len()).map(move |b| (a, b))).collect();
        let homs = par::map(self.exec, &pairs, |&(a, b)| self.hom_space(&coll[a], &coll[b]));
        let mut rows: Vec<Vec<HomSpace>> = (0..coll.len()).map(|_| Vec::with_capacity(coll.len())).collect();
        for ((a, _), h) in pairs.iter().zip(homs) {
            rows[*a].push(h?);
        }
        Ok(rows)
    }
}
