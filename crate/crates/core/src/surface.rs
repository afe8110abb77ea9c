//! Toric Fano surfaces encoded by weighted Newton polygons, their moment
//! polytopes with face lattice, and section polytopes of line bundles.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::symbolic::{fmt_q, parse_q, qi, Exp, Poly2, Q};
use crate::Error;

pub type IPoint = (i64, i64);

/// Rational point in polytope coordinates.
pub type QPoint = (Q, Q);

/// Outer normal with rational offset: the half-plane `⟨x, normal⟩ ≤ offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: IPoint,
    pub offset: Q,
}

/// Convex lattice polygon or lattice segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolygon {
    vertices: Vec<IPoint>,
    facets: Vec<Facet>,
}

impl LatticePolygon {
    /// Convex hull of the given lattice points. A segment is accepted; a
    /// single point is not.
    pub fn new(points: &[IPoint]) -> Result<Self, Error> {
        let hull = convex_hull(points);
        if hull.len() < 2 {
            return Err(Error::InvalidPolygon("fewer than two distinct points".into()));
        }
        let facets = if hull.len() == 2 {
            let e = (hull[1].0 - hull[0].0, hull[1].1 - hull[0].1);
            let n = primitive((e.1, -e.0));
            let m = (-n.0, -n.1);
            vec![
                Facet { normal: n, offset: qi(dot(n, hull[0])) },
                Facet { normal: m, offset: qi(dot(m, hull[0])) },
            ]
        } else {
            (0..hull.len())
                .map(|i| {
                    let a = hull[i];
                    let b = hull[(i + 1) % hull.len()];
                    let n = primitive((b.1 - a.1, a.0 - b.0));
                    Facet { normal: n, offset: qi(dot(n, a)) }
                })
                .collect()
        };
        Ok(Self { vertices: hull, facets })
    }

    pub fn segment(a: IPoint, b: IPoint) -> Self {
        Self::new(&[a, b]).expect("distinct endpoints")
    }

    /// Counter-clockwise vertices.
    pub fn vertices(&self) -> &[IPoint] {
        &self.vertices
    }

    /// Edge facets; for a segment these are the two sides, which are the
    /// walls of its normal fan.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    /// Support function `max_{m ∈ Δ} ⟨n, m⟩`.
    pub fn support(&self, n: IPoint) -> i64 {
        self.vertices.iter().map(|&v| dot(n, v)).max().unwrap()
    }

    /// A vertex maximising `⟨n, ·⟩`, unique when `n` is generic.
    pub fn argmax(&self, n: IPoint) -> IPoint {
        *self.vertices.iter().max_by_key(|&&v| dot(n, v)).unwrap()
    }

    pub fn contains(&self, m: IPoint) -> bool {
        if self.is_segment() {
            let (a, b) = (self.vertices[0], self.vertices[1]);
            let cross = (b.0 - a.0) * (m.1 - a.1) - (b.1 - a.1) * (m.0 - a.0);
            let t = dot((b.0 - a.0, b.1 - a.1), (m.0 - a.0, m.1 - a.1));
            let len2 = dot((b.0 - a.0, b.1 - a.1), (b.0 - a.0, b.1 - a.1));
            return cross == 0 && t >= 0 && t <= len2;
        }
        self.facets.iter().all(|f| qi(dot(f.normal, m)) <= f.offset)
    }

    pub fn lattice_points(&self) -> Vec<IPoint> {
        let (x0, x1) = minmax(self.vertices.iter().map(|v| v.0));
        let (y0, y1) = minmax(self.vertices.iter().map(|v| v.1));
        let mut out = Vec::new();
        for x in x0..=x1 {
            for y in y0..=y1 {
                if self.contains((x, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Vertices recomputed from the facet inequalities (polygons only).
    pub fn vertices_from_facets(&self) -> Vec<QPoint> {
        let k = self.facets.len();
        (0..k).map(|i| intersect(&self.facets[(i + k - 1) % k], &self.facets[i]).expect("adjacent facets meet")).collect()
    }
}

/// One summand `C_k · Δ_k` of the Kähler data with its posynomial `Q_k`.
#[derive(Clone, Debug)]
pub struct Factor {
    pub coeff: Q,
    pub delta: LatticePolygon,
    pub points: Vec<Exp>,
    pub poly: Poly2,
}

/// Open edge of the moment polytope, from vertex `start` to vertex `end`
/// counter-clockwise.
#[derive(Clone, Debug)]
pub struct Edge {
    pub index: usize,
    pub name: String,
    pub normal: IPoint,
    pub offset: Q,
    pub start: usize,
    pub end: usize,
}

impl Edge {
    /// Direction of increasing edge parameter `τ`.
    pub fn direction(&self) -> IPoint {
        (-self.normal.1, self.normal.0)
    }
}

#[derive(Clone, Debug)]
pub struct Vertex {
    pub index: usize,
    pub point: QPoint,
    /// Edge ending here and edge starting here.
    pub edges: (usize, usize),
}

/// Unimodular affine change of polytope coordinates used for display:
/// `X = A x + b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub a: [[i64; 2]; 2],
    pub b: (i64, i64),
}

impl Frame {
    pub fn identity() -> Self {
        Self { a: [[1, 0], [0, 1]], b: (0, 0) }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply_q(&self, p: &QPoint) -> QPoint {
        let a = &self.a;
        (
            qi(a[0][0]) * &p.0 + qi(a[0][1]) * &p.1 + qi(self.b.0),
            qi(a[1][0]) * &p.0 + qi(a[1][1]) * &p.1 + qi(self.b.1),
        )
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let a = &self.a;
        [
            a[0][0] as f64 * p[0] + a[0][1] as f64 * p[1] + self.b.0 as f64,
            a[1][0] as f64 * p[0] + a[1][1] as f64 * p[1] + self.b.1 as f64,
        ]
    }

    /// Linear part applied to a tangent vector.
    pub fn apply_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let a = &self.a;
        [a[0][0] as f64 * v[0] + a[0][1] as f64 * v[1], a[1][0] as f64 * v[0] + a[1][1] as f64 * v[1]]
    }

    pub fn invert(&self, p: [f64; 2]) -> [f64; 2] {
        let a = &self.a;
        let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) as f64;
        let (x, y) = (p[0] - self.b.0 as f64, p[1] - self.b.1 as f64);
        [(a[1][1] as f64 * x - a[0][1] as f64 * y) / det, (-(a[1][0] as f64) * x + a[0][0] as f64 * y) / det]
    }
}

/// Named preset surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Bl2,
    Bl3,
    Cp2,
    P1p1,
    F1,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bl2" => Some(Self::Bl2),
            "bl3" => Some(Self::Bl3),
            "cp2" => Some(Self::Cp2),
            "p1p1" => Some(Self::P1p1),
            "f1" => Some(Self::F1),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bl2 => "bl2",
            Self::Bl3 => "bl3",
            Self::Cp2 => "cp2",
            Self::P1p1 => "p1p1",
            Self::F1 => "f1",
        }
    }

    fn factor_polygons(self) -> Vec<LatticePolygon> {
        let seg = LatticePolygon::segment;
        let tri = |a, b, c| LatticePolygon::new(&[a, b, c]).unwrap();
        match self {
            Self::Bl2 => vec![seg((0, 0), (1, 0)), seg((0, 0), (0, 1)), tri((0, 0), (1, 0), (0, 1))],
            Self::Bl3 => vec![seg((0, 0), (1, 0)), seg((0, 0), (0, 1)), seg((0, 0), (1, 1)), tri((0, 0), (1, 1), (0, 1))],
            Self::Cp2 => vec![tri((0, 0), (1, 0), (0, 1))],
            Self::P1p1 => vec![seg((0, 0), (1, 0)), seg((0, 0), (0, 1))],
            Self::F1 => vec![seg((0, 0), (1, 0)), tri((0, 0), (1, 0), (0, 1))],
        }
    }

    fn frame(self) -> Frame {
        match self {
            // Shear taking the hexagon 2ΣΔ_k onto the conventional one with
            // vertices (0,2),(2,0),(6,0),(6,2),(2,6),(0,6).
            Self::Bl3 => Frame { a: [[1, 0], [-1, 1]], b: (0, 2) },
            _ => Frame::identity(),
        }
    }

    /// Divisor classes `O(D_ρ)` in the factor basis, by ray index.
    pub fn divisor_table(self) -> Vec<BundleClass> {
        let b = |v: &[i64]| BundleClass(v.to_vec());
        match self {
            Self::Bl2 => vec![b(&[1, 0, 0]), b(&[0, 1, 0]), b(&[0, -1, 1]), b(&[1, 1, -1]), b(&[-1, 0, 1])],
            Self::Bl3 => vec![
                b(&[1, 1, 0, -1]),
                b(&[-1, 0, 0, 1]),
                b(&[1, 0, 1, -1]),
                b(&[0, 0, -1, 1]),
                b(&[0, 1, 1, -1]),
                b(&[0, -1, 0, 1]),
            ],
            Self::Cp2 => vec![b(&[1]), b(&[1]), b(&[1])],
            Self::P1p1 => vec![b(&[1, 0]), b(&[0, 1]), b(&[1, 0]), b(&[0, 1])],
            Self::F1 => vec![b(&[0, 1]), b(&[1, 0]), b(&[-1, 1]), b(&[1, 0])],
        }
    }

    pub fn exceptional_collection(self) -> Vec<BundleClass> {
        let b = |v: &[i64]| BundleClass(v.to_vec());
        match self {
            Self::Bl2 => vec![b(&[0, 0, 0]), b(&[0, -1, 1]), b(&[-1, 0, 1]), b(&[0, 0, 1]), b(&[0, 0, 2])],
            Self::Bl3 => vec![
                b(&[0, 0, 0, 0]),
                b(&[-1, 0, 0, 1]),
                b(&[0, -1, 0, 1]),
                b(&[0, 0, -1, 1]),
                b(&[0, 0, 0, 1]),
                b(&[0, 0, 0, 2]),
            ],
            Self::Cp2 => vec![b(&[0]), b(&[1]), b(&[2])],
            Self::P1p1 | Self::F1 => vec![b(&[0, 0]), b(&[1, 0]), b(&[0, 1]), b(&[1, 1])],
        }
    }
}

/// Line bundle as an integer vector over the factor basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BundleClass(pub Vec<i64>);

impl BundleClass {
    pub fn zero(k: usize) -> Self {
        Self(vec![0; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    /// Parse `"a,b,c"`.
    pub fn parse(s: &str) -> Option<Self> {
        s.split(',').map(|x| x.trim().parse::<i64>().ok()).collect::<Option<Vec<_>>>().map(Self)
    }
}

impl fmt::Display for BundleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Global sections of a line bundle: the polytope `⟨I, n⟩ ≤ a_n(c)` over
/// the outer normals of P, with its lattice points.
#[derive(Clone, Debug)]
pub struct SectionPolytope {
    pub bundle: BundleClass,
    pub facets: Vec<(IPoint, i64)>,
    pub lattice_points: Vec<IPoint>,
}

impl SectionPolytope {
    pub fn contains(&self, m: IPoint) -> bool {
        self.facets.iter().all(|&(n, a)| dot(n, m) <= a)
    }
}

/// Toric surface: factors, moment polytope `P = 2 Σ C_k Δ_k` and faces.
#[derive(Clone, Debug)]
pub struct PolySurface {
    pub name: String,
    pub preset: Option<Preset>,
    pub factors: Vec<Factor>,
    pub edges: Vec<Edge>,
    pub vertices: Vec<Vertex>,
    pub frame: Frame,
}

impl PolySurface {
    /// Minkowski-sum construction from `(C_k, Δ_k)` pairs.
    pub fn build(factors: Vec<(Q, LatticePolygon)>) -> Result<Self, Error> {
        if factors.is_empty() {
            return Err(Error::EmptyFactors);
        }
        if let Some((c, _)) = factors.iter().find(|(c, _)| !c.is_positive()) {
            return Err(Error::InvalidPolygon(format!("Kähler coefficient {} is not positive", fmt_q(c))));
        }
        let mut normals: Vec<IPoint> = Vec::new();
        for (_, d) in &factors {
            for f in d.facets() {
                if !normals.contains(&f.normal) {
                    normals.push(f.normal);
                }
            }
        }
        // a 2-dimensional sum has at least three pairwise non-parallel walls
        let independent = normals.iter().any(|a| normals.iter().any(|b| a.0 * b.1 - a.1 * b.0 != 0));
        if !independent || normals.len() < 3 {
            return Err(Error::DegenerateSurface);
        }
        normals.sort_by(|a, b| angle_from_west(*a).partial_cmp(&angle_from_west(*b)).unwrap());
        let two = qi(2);
        let facets: Vec<Facet> = normals
            .iter()
            .map(|&n| Facet { normal: n, offset: factors.iter().map(|(c, d)| &two * c * qi(d.support(n))).sum() })
            .collect();
        let k = facets.len();
        let mut vertices = Vec::with_capacity(k);
        for i in 0..k {
            let prev = (i + k - 1) % k;
            let p = intersect(&facets[prev], &facets[i]).ok_or(Error::DegenerateSurface)?;
            vertices.push(Vertex { index: i, point: p, edges: (prev, i) });
        }
        let edges = facets
            .iter()
            .enumerate()
            .map(|(i, f)| Edge {
                index: i,
                name: format!("E{}", i + 1),
                normal: f.normal,
                offset: f.offset.clone(),
                start: i,
                end: (i + 1) % k,
            })
            .collect();
        let factors = factors
            .into_iter()
            .map(|(coeff, delta)| {
                let points: Vec<Exp> = delta.lattice_points().iter().map(|&(a, b)| (a as i32, b as i32)).collect();
                let poly = Poly2::posynomial(&points);
                Factor { coeff, delta, points, poly }
            })
            .collect();
        Ok(Self { name: "custom".into(), preset: None, factors, edges, vertices, frame: Frame::identity() })
    }

    /// Preset surface with all Kähler coefficients equal to one.
    pub fn preset(p: Preset) -> Self {
        let polys = p.factor_polygons();
        let mut s = Self::build(polys.into_iter().map(|d| (qi(1), d)).collect()).expect("preset surfaces are valid");
        s.name = p.name().into();
        s.preset = Some(p);
        s.frame = p.frame();
        s
    }

    pub fn with_coeffs(p: Preset, coeffs: &[Q]) -> Result<Self, Error> {
        let polys = p.factor_polygons();
        if coeffs.len() != polys.len() {
            return Err(Error::BundleLength { expected: polys.len(), got: coeffs.len() });
        }
        let mut s = Self::build(coeffs.iter().cloned().zip(polys).collect())?;
        s.name = p.name().into();
        s.preset = Some(p);
        s.frame = p.frame();
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn check_bundle(&self, c: &BundleClass) -> Result<(), Error> {
        if c.len() != self.rank() {
            return Err(Error::BundleLength { expected: self.rank(), got: c.len() });
        }
        Ok(())
    }

    /// Support numbers `a_n(c) = Σ c_k h_k(n)` for each edge normal of P.
    pub fn support_numbers(&self, c: &BundleClass) -> Vec<i64> {
        self.edges.iter().map(|e| self.support_along(c, e.normal)).collect()
    }

    pub fn support_along(&self, c: &BundleClass, n: IPoint) -> i64 {
        self.factors.iter().zip(&c.0).map(|(f, &ck)| ck * f.delta.support(n)).sum()
    }

    pub fn section_polytope(&self, c: &BundleClass) -> SectionPolytope {
        let facets: Vec<(IPoint, i64)> = self.edges.iter().map(|e| (e.normal, self.support_along(c, e.normal))).collect();
        let bound: i64 = self
            .factors
            .iter()
            .zip(&c.0)
            .map(|(f, &ck)| ck.abs() * f.delta.vertices().iter().map(|v| v.0.abs().max(v.1.abs())).max().unwrap())
            .sum::<i64>()
            + 1;
        let mut lattice_points = Vec::new();
        for x in -bound..=bound {
            for y in -bound..=bound {
                if facets.iter().all(|&(n, a)| dot(n, (x, y)) <= a) {
                    lattice_points.push((x, y));
                }
            }
        }
        SectionPolytope { bundle: c.clone(), facets, lattice_points }
    }

    /// Bounding box of the signed Minkowski combination `Σ c_k Δ_k`, which
    /// contains every value of the section `y/2π`.
    pub fn section_image_box(&self, c: &BundleClass) -> (IPoint, IPoint) {
        let mut lo = (0i64, 0i64);
        let mut hi = (0i64, 0i64);
        for (f, &ck) in self.factors.iter().zip(&c.0) {
            let (x0, x1) = minmax(f.delta.vertices().iter().map(|v| v.0));
            let (y0, y1) = minmax(f.delta.vertices().iter().map(|v| v.1));
            let (ax, bx) = if ck >= 0 { (ck * x0, ck * x1) } else { (ck * x1, ck * x0) };
            let (ay, by) = if ck >= 0 { (ck * y0, ck * y1) } else { (ck * y1, ck * y0) };
            lo = (lo.0 + ax, lo.1 + ay);
            hi = (hi.0 + bx, hi.1 + by);
        }
        (lo, hi)
    }

    pub fn divisor_to_pic(&self, rays: &[i64]) -> Result<BundleClass, Error> {
        let table = self.preset.ok_or(Error::NoDivisorTable)?.divisor_table();
        if rays.len() != table.len() {
            return Err(Error::BundleLength { expected: table.len(), got: rays.len() });
        }
        let mut acc = BundleClass::zero(self.rank());
        for (m, d) in rays.iter().zip(&table) {
            acc = acc.add(&BundleClass(d.0.iter().map(|x| x * m).collect()));
        }
        Ok(acc)
    }

    pub fn exceptional_collection(&self) -> Result<Vec<BundleClass>, Error> {
        Ok(self.preset.ok_or(Error::NoPresetCollection)?.exceptional_collection())
    }

    /// Vertex coordinates in the intrinsic frame.
    pub fn polytope(&self) -> Vec<QPoint> {
        self.vertices.iter().map(|v| v.point.clone()).collect()
    }

    /// Vertex coordinates in the display frame.
    pub fn display_polytope(&self) -> Vec<QPoint> {
        self.vertices.iter().map(|v| self.frame.apply_q(&v.point)).collect()
    }

    pub fn vertex_f64(&self, i: usize) -> [f64; 2] {
        let p = &self.vertices[i].point;
        [crate::symbolic::to_f64(&p.0), crate::symbolic::to_f64(&p.1)]
    }

    /// Signed slack `(a_n - ⟨x, n⟩) / |n|` to the nearest edge; positive inside.
    pub fn margin(&self, x: [f64; 2]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let n = (e.normal.0 as f64, e.normal.1 as f64);
                (crate::symbolic::to_f64(&e.offset) - x[0] * n.0 - x[1] * n.1) / n.0.hypot(n.1)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.name == name)
    }

    /// Factor vertex selected at polytope vertex `v`: the maximiser of the
    /// sum of the two adjacent outer normals.
    pub fn factor_vertex_at(&self, k: usize, v: usize) -> IPoint {
        let (a, b) = self.vertices[v].edges;
        let (na, nb) = (self.edges[a].normal, self.edges[b].normal);
        self.factors[k].delta.argmax((na.0 + nb.0, na.1 + nb.1))
    }
}

/// Surface description read from a JSON config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub factors: Vec<FactorConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorConfig {
    pub coeff: String,
    pub polygon: Vec<[i64; 2]>,
}

impl SurfaceConfig {
    pub fn from_json(src: &str) -> Result<Self, Error> {
        serde_json::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<PolySurface, Error> {
        let preset = match &self.preset {
            Some(p) => Some(Preset::parse(p).ok_or_else(|| Error::Config(format!("unknown preset {p}")))?),
            None => None,
        };
        let coeffs = self
            .factors
            .iter()
            .map(|f| parse_q(&f.coeff).ok_or_else(|| Error::Config(format!("bad coefficient {}", f.coeff))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut s = match preset {
            Some(p) if self.factors.is_empty() => PolySurface::preset(p),
            Some(p) => PolySurface::with_coeffs(p, &coeffs)?,
            None => {
                let polys = self
                    .factors
                    .iter()
                    .map(|f| LatticePolygon::new(&f.polygon.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>()))
                    .collect::<Result<Vec<_>, _>>()?;
                PolySurface::build(coeffs.into_iter().zip(polys).collect())?
            }
        };
        if let Some(n) = &self.name {
            s.name = n.clone();
        }
        Ok(s)
    }
}

pub(crate) fn dot(a: IPoint, b: IPoint) -> i64 {
    a.0 * b.0 + a.1 * b.1
}

fn primitive(v: IPoint) -> IPoint {
    let g = num_integer::gcd(v.0, v.1);
    (v.0 / g, v.1 / g)
}

fn minmax<I: Iterator<Item = i64>>(it: I) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(a, b), x| (a.min(x), b.max(x)))
}

/// Counter-clockwise angle of `n` measured from `(-1, 0)`, in `[0, 2π)`.
fn angle_from_west(n: IPoint) -> f64 {
    let a = (n.1 as f64).atan2(n.0 as f64) - std::f64::consts::PI;
    a.rem_euclid(2.0 * std::f64::consts::PI)
}

/// Intersection of the boundary lines of two facets.
fn intersect(f: &Facet, g: &Facet) -> Option<QPoint> {
    let det = f.normal.0 * g.normal.1 - f.normal.1 * g.normal.0;
    if det == 0 {
        return None;
    }
    let d = qi(det);
    let x = (&f.offset * qi(g.normal.1) - &g.offset * qi(f.normal.1)) / &d;
    let y = (&g.offset * qi(f.normal.0) - &f.offset * qi(g.normal.0)) / &d;
    Some((x, y))
}

/// Andrew's monotone chain; collinear points are dropped.
fn convex_hull(points: &[IPoint]) -> Vec<IPoint> {
    let mut p: Vec<IPoint> = points.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: IPoint, a: IPoint, b: IPoint| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<IPoint> = Vec::new();
    for &x in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], x) <= 0 {
            lower.pop();
        }
        lower.push(x);
    }
    let mut upper: Vec<IPoint> = Vec::new();
    for &x in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], x) <= 0 {
            upper.pop();
        }
        upper.push(x);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 || lower.iter().all(|&x| cross(lower[0], lower[1], x) == 0) {
        // all points collinear: keep the extremes
        return vec![p[0], *p.last().unwrap()];
    }
    lower
}

/// Formats a rational point as `(x,y)`.
pub fn fmt_point(p: &QPoint) -> String {
    format!("({},{})", fmt_q(&p.0), fmt_q(&p.1))
}

/// Integer coordinates if both entries are integers.
pub fn as_lattice(p: &QPoint) -> Option<IPoint> {
    use num_traits::ToPrimitive;
    if p.0.is_integer() && p.1.is_integer() {
        Some((p.0.to_integer().to_i64()?, p.1.to_integer().to_i64()?))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[QPoint]) -> Vec<IPoint> {
        v.iter().map(|p| as_lattice(p).unwrap()).collect()
    }

    #[test]
    fn preset_polytopes() {
        let bl2 = PolySurface::preset(Preset::Bl2);
        assert_eq!(pts(&bl2.display_polytope()), vec![(0, 4), (0, 0), (4, 0), (4, 2), (2, 4)]);
        let names: Vec<_> = bl2.edges.iter().map(|e| (e.name.as_str(), e.normal)).collect();
        assert_eq!(names, vec![("E1", (-1, 0)), ("E2", (0, -1)), ("E3", (1, 0)), ("E4", (1, 1)), ("E5", (0, 1))]);
        let bl3 = PolySurface::preset(Preset::Bl3);
        assert_eq!(pts(&bl3.display_polytope()), vec![(0, 6), (0, 2), (2, 0), (6, 0), (6, 2), (2, 6)]);
        let cp2 = PolySurface::preset(Preset::Cp2);
        assert_eq!(pts(&cp2.polytope()), vec![(0, 2), (0, 0), (2, 0)]);
    }

    #[test]
    fn degenerate_and_empty() {
        assert!(matches!(PolySurface::build(vec![]), Err(Error::EmptyFactors)));
        let s = LatticePolygon::segment((0, 0), (1, 0));
        let r = PolySurface::build(vec![(qi(1), s.clone()), (qi(2), s)]);
        assert!(matches!(r, Err(Error::DegenerateSurface)));
    }

    #[test]
    fn section_polytopes() {
        let bl2 = PolySurface::preset(Preset::Bl2);
        let c = |v: &[i64]| BundleClass(v.to_vec());
        assert_eq!(bl2.section_polytope(&c(&[0, 0, 1])).lattice_points.len(), 3);
        assert_eq!(bl2.section_polytope(&c(&[0, 1, 1])).lattice_points.len(), 5);
        assert_eq!(bl2.section_polytope(&c(&[0, 0, 0])).lattice_points, vec![(0, 0)]);
        let bl3 = PolySurface::preset(Preset::Bl3);
        let mut p = bl3.section_polytope(&c(&[0, 0, 0, 2])).lattice_points;
        p.sort();
        assert_eq!(p, vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn divisors() {
        let bl2 = PolySurface::preset(Preset::Bl2);
        assert_eq!(bl2.divisor_to_pic(&[0, 0, 1, 0, 0]).unwrap(), BundleClass(vec![0, -1, 1]));
        assert_eq!(bl2.divisor_to_pic(&[1, 0, 0, 0, 0]).unwrap(), BundleClass(vec![1, 0, 0]));
        let bl3 = PolySurface::preset(Preset::Bl3);
        assert_eq!(bl3.divisor_to_pic(&[0, 0, 0, 0, 0, 1]).unwrap(), BundleClass(vec![0, -1, 0, 1]));
        let custom = PolySurface::build(vec![(qi(1), LatticePolygon::new(&[(0, 0), (1, 0), (0, 1)]).unwrap())]).unwrap();
        assert!(matches!(custom.divisor_to_pic(&[1, 0, 0]), Err(Error::NoDivisorTable)));
        assert!(matches!(custom.exceptional_collection(), Err(Error::NoPresetCollection)));
    }

    #[test]
    fn config_roundtrip() {
        let cfg = SurfaceConfig::from_json(r#"{"factors":[{"coeff":"1/2","polygon":[[0,0],[1,0],[0,1]]}]}"#).unwrap();
        let s = cfg.build().unwrap();
        assert_eq!(pts(&s.polytope()), vec![(0, 1), (0, 0), (1, 0)]);
        let p = SurfaceConfig::from_json(r#"{"preset":"bl3"}"#).unwrap().build().unwrap();
        assert_eq!(p.edges.len(), 6);
    }
}
