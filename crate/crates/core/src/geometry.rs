//! Moment map and its inverse, Lagrangian sections, gradient fields with
//! their linearisation, and the normalised potentials `f_I`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::par::{self, Exec};
use crate::surface::{BundleClass, IPoint, PolySurface, QPoint};
use crate::symbolic::{q, qi, rationalize, to_f64, Divergent, Limit, LogValue, Poly1, Poly2, Rat1, RatFunc2, Root, Q};
use crate::Error;

pub type Mat2 = [[f64; 2]; 2];

/// Softmax statistics of one posynomial at a flat point: `log Q_k`, the
/// expectation of the exponent (equal to `L(Q_k)`) and its covariance.
#[derive(Clone, Debug)]
pub struct FactorStats {
    pub log_q: f64,
    pub mean: [f64; 2],
    pub cov: Mat2,
}

/// Value of a potential: exact when it is a combination of logarithms of
/// rationals, otherwise a float.
#[derive(Clone, Debug, PartialEq)]
pub enum Level {
    Exact(LogValue),
    Approx(f64),
}

impl Level {
    pub fn zero() -> Self {
        Self::Exact(LogValue::zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(v) => v.to_f64(),
            Self::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&LogValue> {
        match self {
            Self::Exact(v) => Some(v),
            Self::Approx(_) => None,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (Self::Exact(a), Self::Exact(b)) => Self::Exact(a.add(b)),
            _ => Self::Approx(self.to_f64() + o.to_f64()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Self::Exact(a) => Self::Exact(a.neg()),
            Self::Approx(x) => Self::Approx(-x),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Exact comparison when both sides are exact, else with tolerance `tol`.
    pub fn compare(&self, o: &Self, tol: f64) -> Ordering {
        if let (Self::Exact(a), Self::Exact(b)) = (self, o) {
            return match a.sub(b).signum() {
                Some(1) => Ordering::Greater,
                Some(-1) => Ordering::Less,
                _ => Ordering::Equal,
            };
        }
        let d = self.to_f64() - o.to_f64();
        if d.abs() <= tol {
            Ordering::Equal
        } else if d > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Exact(v) => write!(f, "{v}"),
            Self::Approx(x) => write!(f, "≈{x:.12}"),
        }
    }
}

/// Where the minimum of a potential is attained.
#[derive(Clone, Debug, PartialEq)]
pub enum MinSite {
    Vertex(usize),
    Edge(usize),
    EdgePoint { edge: usize, tau: Root },
    Interior { flat: [f64; 2] },
}

/// `f_I = ½ log R` with `R = Π Q_k^{c_k} · s^{-i₁} t^{-i₂}`, together with
/// the normalisation constant `min_P f_I`.
#[derive(Clone, Debug)]
pub struct PotentialFI {
    pub c: BundleClass,
    pub i: IPoint,
    pub ratio: RatFunc2,
    pub norm: Level,
    pub minimizers: Vec<MinSite>,
}

/// Exact Jacobian `J = ∂F/∂x^{poly} = H_f · (Hess ψ)^{-1}` of the gradient
/// field in polytope coordinates. It depends on the bundle only.
#[derive(Clone, Debug)]
pub struct JacobianField {
    pub entries: [[RatFunc2; 2]; 2],
}

/// Sign pattern of the (real) eigenvalues of a 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EigenSigns {
    pub negative: u8,
    pub zero: u8,
}

#[derive(Clone, Debug)]
pub struct InteriorZero {
    pub flat: [f64; 2],
    pub poly: [f64; 2],
    /// Exact flat point `(s, t)` when the zero is rational.
    pub exact: Option<(Q, Q)>,
}

/// Outcome of the multi-start interior solve of `F = 0`.
#[derive(Clone, Debug, Default)]
pub struct InteriorSolve {
    pub zeros: Vec<InteriorZero>,
    pub starts: usize,
    pub stalled: usize,
    /// Final residual of every start, in start order.
    pub residuals: Vec<f64>,
}

impl InteriorSolve {
    pub fn inconclusive(&self) -> bool {
        self.starts > 0 && self.stalled == self.starts
    }
}

enum StartOutcome {
    Zero([f64; 2]),
    Escaped,
    NoZero,
    Stalled,
}

/// Polytope sample with cached factor statistics.
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub poly: [f64; 2],
    pub flat: [f64; 2],
    pub stats: Vec<FactorStats>,
}

impl GridPoint {
    pub fn field(&self, c: &BundleClass, i: IPoint) -> [f64; 2] {
        let mut f = [-(i.0 as f64), -(i.1 as f64)];
        for (st, &ck) in self.stats.iter().zip(&c.0) {
            f[0] += ck as f64 * st.mean[0];
            f[1] += ck as f64 * st.mean[1];
        }
        f
    }

    pub fn potential(&self, c: &BundleClass, i: IPoint) -> f64 {
        let lin = i.0 as f64 * self.flat[0] + i.1 as f64 * self.flat[1];
        self.stats.iter().zip(&c.0).map(|(st, &ck)| 0.5 * ck as f64 * st.log_q).sum::<f64>() - lin
    }
}

/// Analytic layer over a surface: per-factor log-derivatives and their
/// restrictions to every edge of P.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub surface: PolySurface,
    l: Vec<[RatFunc2; 2]>,
    edge_l: Vec<Vec<[Rat1; 2]>>,
    points: Vec<Vec<[f64; 2]>>,
    kahler: Vec<f64>,
}

impl Geometry {
    pub fn new(surface: PolySurface) -> Self {
        let l: Vec<[RatFunc2; 2]> = surface
            .factors
            .iter()
            .map(|f| {
                let q = RatFunc2::from_poly(f.poly.clone());
                [q.log_deriv(0), q.log_deriv(1)]
            })
            .collect();
        let edge_l = surface
            .edges
            .iter()
            .map(|e| {
                l.iter()
                    .map(|lk| {
                        let r = |f: &RatFunc2| f.restrict(e.normal).expect("log-derivatives stay bounded");
                        [r(&lk[0]), r(&lk[1])]
                    })
                    .collect()
            })
            .collect();
        let points = surface.factors.iter().map(|f| f.points.iter().map(|&(a, b)| [a as f64, b as f64]).collect()).collect();
        let kahler = surface.factors.iter().map(|f| to_f64(&f.coeff)).collect();
        Self { surface, l, edge_l, points, kahler }
    }

    pub fn stats(&self, k: usize, x: [f64; 2]) -> FactorStats {
        let pts = &self.points[k];
        let a: Vec<f64> = pts.iter().map(|m| 2.0 * (m[0] * x[0] + m[1] * x[1])).collect();
        let mx = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = a.iter().map(|v| (v - mx).exp()).sum();
        let lse = mx + z.ln();
        let mut mean = [0.0; 2];
        let mut second = [[0.0; 2]; 2];
        for (m, v) in pts.iter().zip(&a) {
            let p = (v - lse).exp();
            for i in 0..2 {
                mean[i] += p * m[i];
                for j in 0..2 {
                    second[i][j] += p * m[i] * m[j];
                }
            }
        }
        let mut cov = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                cov[i][j] = second[i][j] - mean[i] * mean[j];
            }
        }
        FactorStats { log_q: lse, mean, cov }
    }

    pub fn all_stats(&self, x: [f64; 2]) -> Vec<FactorStats> {
        (0..self.points.len()).map(|k| self.stats(k, x)).collect()
    }

    /// Kähler potential `ψ = Σ C_k log Q_k`.
    pub fn psi(&self, x: [f64; 2]) -> f64 {
        (0..self.points.len()).map(|k| self.kahler[k] * self.stats(k, x).log_q).sum()
    }

    /// `μ = ∇ψ = 2 Σ C_k L(Q_k)`.
    pub fn moment_map(&self, x: [f64; 2]) -> [f64; 2] {
        let mut p = [0.0; 2];
        for k in 0..self.points.len() {
            let st = self.stats(k, x);
            p[0] += 2.0 * self.kahler[k] * st.mean[0];
            p[1] += 2.0 * self.kahler[k] * st.mean[1];
        }
        p
    }

    /// Moment map at an exact flat point given by `(s, t)`.
    pub fn moment_map_exact(&self, s: &Q, t: &Q) -> QPoint {
        let two = qi(2);
        let mut p = (Q::zero(), Q::zero());
        for (f, lk) in self.surface.factors.iter().zip(&self.l) {
            p.0 += &two * &f.coeff * lk[0].eval(s, t).unwrap();
            p.1 += &two * &f.coeff * lk[1].eval(s, t).unwrap();
        }
        p
    }

    pub fn hessian_psi(&self, x: [f64; 2]) -> Mat2 {
        let mut h = [[0.0; 2]; 2];
        for k in 0..self.points.len() {
            let st = self.stats(k, x);
            add_scaled(&mut h, &st.cov, 4.0 * self.kahler[k]);
        }
        h
    }

    /// Newton iteration on the strictly convex `ψ(x) - ⟨p, x⟩`.
    pub fn inverse_moment_map(&self, p: [f64; 2], tol: f64) -> Result<[f64; 2], Error> {
        if self.surface.margin(p) <= tol {
            return Err(Error::NotInterior);
        }
        let phi = |x: [f64; 2]| self.psi(x) - p[0] * x[0] - p[1] * x[1];
        let mut x = [0.0, 0.0];
        for _ in 0..200 {
            let m = self.moment_map(x);
            let g = [m[0] - p[0], m[1] - p[1]];
            let gn = g[0].abs().max(g[1].abs());
            if gn <= tol {
                return Ok(x);
            }
            let h = self.hessian_psi(x);
            let d = solve2(&h, [-g[0], -g[1]]).ok_or_else(|| Error::Numeric("singular Hessian of ψ".into()))?;
            let f0 = phi(x);
            let slope = g[0] * d[0] + g[1] * d[1];
            let mut alpha = 1.0;
            loop {
                let xn = [x[0] + alpha * d[0], x[1] + alpha * d[1]];
                let mn = self.moment_map(xn);
                let gn2 = (mn[0] - p[0]).abs().max((mn[1] - p[1]).abs());
                if phi(xn) <= f0 + 1e-4 * alpha * slope || gn2 < gn || alpha < 1e-12 {
                    x = xn;
                    break;
                }
                alpha *= 0.5;
            }
        }
        Err(Error::Numeric(format!("inverse moment map did not converge at ({}, {})", p[0], p[1])))
    }

    pub fn edge_count(&self) -> usize {
        self.edge_l.len()
    }

    /// Restriction of `L(Q_k)` to edge `e` as functions of `τ`.
    pub fn edge_factor(&self, e: usize, k: usize) -> &[Rat1; 2] {
        &self.edge_l[e][k]
    }

    pub fn edge_moment(&self, e: usize, tau: &Q) -> QPoint {
        let two = qi(2);
        let mut p = (Q::zero(), Q::zero());
        for (f, lk) in self.surface.factors.iter().zip(&self.edge_l[e]) {
            p.0 += &two * &f.coeff * lk[0].eval(tau).unwrap();
            p.1 += &two * &f.coeff * lk[1].eval(tau).unwrap();
        }
        p
    }

    pub fn edge_moment_f64(&self, e: usize, tau: f64) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (k, lk) in self.edge_l[e].iter().enumerate() {
            p[0] += 2.0 * self.kahler[k] * lk[0].eval_f64(tau);
            p[1] += 2.0 * self.kahler[k] * lk[1].eval_f64(tau);
        }
        p
    }

    /// Position along edge `e` as a fraction of its length, 0 at the start
    /// vertex and 1 at the end vertex.
    pub fn edge_fraction(&self, e: usize, p: [f64; 2]) -> f64 {
        let edge = &self.surface.edges[e];
        let a = self.surface.vertex_f64(edge.start);
        let b = self.surface.vertex_f64(edge.end);
        let d = [b[0] - a[0], b[1] - a[1]];
        ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])
    }

    /// `log τ` at which the edge point sits at fraction `frac`.
    pub fn edge_sigma_at_fraction(&self, e: usize, frac: f64) -> f64 {
        let (mut lo, mut hi) = (-300.0f64, 300.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.edge_fraction(e, self.edge_moment_f64(e, mid.exp())) < frac {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Exact parameter near the requested fraction; the simplest rational
    /// within a relative distance 1e-10.
    pub fn edge_tau_at_fraction(&self, e: usize, frac: f64) -> Q {
        rationalize(self.edge_sigma_at_fraction(e, frac).exp(), 1e-10)
    }

    /// `y/2π = Σ c_k L(Q_k)` as exact rational functions.
    pub fn section(&self, c: &BundleClass) -> [RatFunc2; 2] {
        let mut y = [RatFunc2::zero(), RatFunc2::zero()];
        for (lk, &ck) in self.l.iter().zip(&c.0) {
            if ck != 0 {
                for j in 0..2 {
                    y[j] = y[j].add(&lk[j].scale(&qi(ck)));
                }
            }
        }
        y
    }

    pub fn lagrangian_section_at(&self, c: &BundleClass, s: &Q, t: &Q) -> QPoint {
        let mut y = (Q::zero(), Q::zero());
        for (lk, &ck) in self.l.iter().zip(&c.0) {
            y.0 += qi(ck) * lk[0].eval(s, t).unwrap();
            y.1 += qi(ck) * lk[1].eval(s, t).unwrap();
        }
        y
    }

    pub fn section_on_edge(&self, c: &BundleClass, e: usize) -> [Rat1; 2] {
        let mut y = [Rat1::zero(), Rat1::zero()];
        for (lk, &ck) in self.edge_l[e].iter().zip(&c.0) {
            if ck != 0 {
                for j in 0..2 {
                    y[j] = y[j].add(&lk[j].scale(&qi(ck)));
                }
            }
        }
        [y[0].reduced(), y[1].reduced()]
    }

    /// Section value at a vertex: the sum of the selected factor vertices.
    pub fn section_at_vertex(&self, c: &BundleClass, v: usize) -> IPoint {
        let mut y = (0, 0);
        for (k, &ck) in c.0.iter().enumerate() {
            let m = self.surface.factor_vertex_at(k, v);
            y = (y.0 + ck * m.0, y.1 + ck * m.1);
        }
        y
    }

    /// Gradient field `F = y/2π - I` in the frame `∂/∂x¹, ∂/∂x²`.
    pub fn vector_field(&self, c: &BundleClass, i: IPoint) -> [RatFunc2; 2] {
        let y = self.section(c);
        [y[0].sub(&RatFunc2::constant(qi(i.0))), y[1].sub(&RatFunc2::constant(qi(i.1)))]
    }

    pub fn field_on_edge(&self, c: &BundleClass, i: IPoint, e: usize) -> [Rat1; 2] {
        let y = self.section_on_edge(c, e);
        [y[0].sub(&Rat1::constant(qi(i.0))).reduced(), y[1].sub(&Rat1::constant(qi(i.1))).reduced()]
    }

    pub fn field_f64(&self, c: &BundleClass, i: IPoint, x: [f64; 2]) -> [f64; 2] {
        let mut f = [-(i.0 as f64), -(i.1 as f64)];
        for (k, &ck) in c.0.iter().enumerate() {
            if ck != 0 {
                let st = self.stats(k, x);
                f[0] += ck as f64 * st.mean[0];
                f[1] += ck as f64 * st.mean[1];
            }
        }
        f
    }

    /// Flat Hessian of `f_I`, i.e. `∂F/∂x`.
    pub fn flat_hessian_f(&self, c: &BundleClass, x: [f64; 2]) -> Mat2 {
        let mut h = [[0.0; 2]; 2];
        for (k, &ck) in c.0.iter().enumerate() {
            if ck != 0 {
                add_scaled(&mut h, &self.stats(k, x).cov, 2.0 * ck as f64);
            }
        }
        h
    }

    pub fn jacobian_f64(&self, c: &BundleClass, x: [f64; 2]) -> Mat2 {
        let hf = self.flat_hessian_f(c, x);
        let g = inv2(&self.hessian_psi(x)).expect("Hessian of ψ is positive definite");
        mul2(&hf, &g)
    }

    /// Exact `J = ½ (Σ c_k B_k) adj(Σ C_k B_k) / det(Σ C_k B_k)` where
    /// `B_k` is the covariance of factor `k` over the common denominator.
    pub fn jacobian(&self, c: &BundleClass) -> JacobianField {
        let qs: Vec<&Poly2> = self.surface.factors.iter().map(|f| &f.poly).collect();
        let sq: Vec<Poly2> = qs.iter().map(|q| q.mul(q)).collect();
        let zero2 = || [[Poly2::zero(), Poly2::zero()], [Poly2::zero(), Poly2::zero()]];
        let mut a = zero2();
        let mut b = zero2();
        for (k, q) in qs.iter().enumerate() {
            let p = [q.delta(0), q.delta(1)];
            let mut others = Poly2::one();
            for (l, s) in sq.iter().enumerate() {
                if l != k {
                    others = others.mul(s);
                }
            }
            for i in 0..2 {
                for j in 0..2 {
                    let m = p[i].delta(j);
                    let cov = q.mul(&m).sub(&p[i].mul(&p[j])).mul(&others);
                    b[i][j] = b[i][j].add(&cov.scale(&self.surface.factors[k].coeff));
                    if c.0[k] != 0 {
                        a[i][j] = a[i][j].add(&cov.scale(&qi(c.0[k])));
                    }
                }
            }
        }
        let adj = [[b[1][1].clone(), b[0][1].neg()], [b[1][0].neg(), b[0][0].clone()]];
        let det = b[0][0].mul(&b[1][1]).sub(&b[0][1].mul(&b[1][0]));
        let half = q(1, 2);
        let entry = |i: usize, j: usize| {
            let n = a[i][0].mul(&adj[0][j]).add(&a[i][1].mul(&adj[1][j]));
            RatFunc2::new(n.scale(&half), det.clone())
        };
        JacobianField { entries: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]] }
    }

    pub fn jacobian_on_edge(&self, j: &JacobianField, e: usize) -> Result<[[Rat1; 2]; 2], Divergent> {
        let n = self.surface.edges[e].normal;
        let r = |x: &RatFunc2| x.restrict(n).map(|v| v.reduced());
        Ok([[r(&j.entries[0][0])?, r(&j.entries[0][1])?], [r(&j.entries[1][0])?, r(&j.entries[1][1])?]])
    }

    /// Vertex value as an iterated limit, accepted only when the limits
    /// along both adjacent edges exist and agree.
    pub fn jacobian_at_vertex(&self, j: &JacobianField, v: usize) -> Option<[[Q; 2]; 2]> {
        let (ein, eout) = self.surface.vertices[v].edges;
        let a = self.jacobian_on_edge(j, ein).ok()?;
        let b = self.jacobian_on_edge(j, eout).ok()?;
        let lim = |m: &[[Rat1; 2]; 2], at_inf: bool| -> Option<[[Q; 2]; 2]> {
            let f = |r: &Rat1| match r.limit(at_inf) {
                Limit::Finite(x) => Some(x),
                Limit::Infinite(_) => None,
            };
            Some([[f(&m[0][0])?, f(&m[0][1])?], [f(&m[1][0])?, f(&m[1][1])?]])
        };
        let x = lim(&a, true)?;
        let y = lim(&b, false)?;
        (x == y).then_some(x)
    }

    /// One-sided finite-difference estimate of `J` at a boundary point,
    /// Richardson-extrapolated from interior offsets `1e-3, 1e-4, 1e-5`
    /// along `inward`. `None` when the eigenvalue signs are not stable.
    pub fn jacobian_fd(&self, c: &BundleClass, p: [f64; 2], inward: [f64; 2]) -> Option<Mat2> {
        let eval = |d: f64| -> Option<Mat2> {
            let x = self.inverse_moment_map([p[0] + d * inward[0], p[1] + d * inward[1]], 1e-13).ok()?;
            Some(self.jacobian_f64(c, x))
        };
        let (j3, j4, j5) = (eval(1e-3)?, eval(1e-4)?, eval(1e-5)?);
        let rich = |a: &Mat2, b: &Mat2| {
            let mut r = [[0.0; 2]; 2];
            for i in 0..2 {
                for k in 0..2 {
                    r[i][k] = (10.0 * b[i][k] - a[i][k]) / 9.0;
                }
            }
            r
        };
        let r1 = rich(&j3, &j4);
        let r2 = rich(&j4, &j5);
        (eigen_signs_f64(&r1, 1e-6) == eigen_signs_f64(&r2, 1e-6)).then_some(r2)
    }

    /// Edge slacks `h_e = a_e(c) - ⟨I, n_e⟩`.
    pub fn slacks(&self, c: &BundleClass, i: IPoint) -> Vec<i64> {
        self.surface.edges.iter().map(|e| self.surface.support_along(c, e.normal) - (i.0 * e.normal.0 + i.1 * e.normal.1)).collect()
    }

    /// `R = Π Q_k^{c_k} · s^{-i₁} t^{-i₂}` with `f_I = ½ log R`.
    pub fn potential_ratio(&self, c: &BundleClass, i: IPoint) -> RatFunc2 {
        let mut num = Poly2::one();
        let mut den = Poly2::one();
        for (f, &ck) in self.surface.factors.iter().zip(&c.0) {
            match ck.cmp(&0) {
                Ordering::Greater => num = num.mul(&f.poly.pow(ck as u32)),
                Ordering::Less => den = den.mul(&f.poly.pow((-ck) as u32)),
                Ordering::Equal => {}
            }
        }
        let (ei, ej) = (-i.0 as i32, -i.1 as i32);
        RatFunc2::new(num.shift((ei, ej)), den)
    }

    pub fn potential_f64(&self, c: &BundleClass, i: IPoint, x: [f64; 2]) -> f64 {
        let mut f = -(i.0 as f64 * x[0] + i.1 as f64 * x[1]);
        for (k, &ck) in c.0.iter().enumerate() {
            if ck != 0 {
                f += 0.5 * ck as f64 * self.stats(k, x).log_q;
            }
        }
        f
    }

    /// `R` restricted to edge `e`; `None` unless `h_e = 0`, where `f_I` is
    /// either `+∞` (`h_e > 0`) or unbounded below (`h_e < 0`).
    pub fn ratio_on_edge(&self, ratio: &RatFunc2, slack: i64, e: usize) -> Option<Rat1> {
        if slack != 0 {
            return None;
        }
        ratio.restrict(self.surface.edges[e].normal).ok().map(|r| r.reduced())
    }

    /// Raw `f_I` at an exact edge point, `None` for `+∞`.
    pub fn potential_at_edge_point(&self, c: &BundleClass, i: IPoint, e: usize, tau: &Q) -> Option<LogValue> {
        let h = self.slacks(c, i)[e];
        let r = self.ratio_on_edge(&self.potential_ratio(c, i), h, e)?;
        LogValue::log(q(1, 2), &r.eval(tau)?).ok()
    }

    pub fn potential_at_edge_point_f64(&self, c: &BundleClass, i: IPoint, e: usize, tau: f64) -> f64 {
        let h = self.slacks(c, i)[e];
        match self.ratio_on_edge(&self.potential_ratio(c, i), h, e) {
            Some(r) => 0.5 * r.eval_f64(tau).ln(),
            None if h > 0 => f64::INFINITY,
            None => f64::NEG_INFINITY,
        }
    }

    /// Raw `f_I` at a vertex, `None` for `+∞`.
    pub fn potential_at_vertex(&self, c: &BundleClass, i: IPoint, v: usize) -> Option<LogValue> {
        let h = self.slacks(c, i);
        let (ein, eout) = self.surface.vertices[v].edges;
        if h[ein] != 0 || h[eout] != 0 {
            return None;
        }
        let r = self.ratio_on_edge(&self.potential_ratio(c, i), 0, ein)?;
        match r.limit_inf() {
            Limit::Finite(x) if x.is_positive() => LogValue::log(q(1, 2), &x).ok(),
            _ => None,
        }
    }

    /// Minimum of `f_I` over the closed polytope, located face by face:
    /// vertices with finite limits, critical points of the edge
    /// restrictions, and interior critical points.
    pub fn potential(&self, c: &BundleClass, i: IPoint) -> Result<PotentialFI, Error> {
        self.surface.check_bundle(c)?;
        let h = self.slacks(c, i);
        if h.iter().any(|&x| x < 0) {
            return Err(Error::NotContinuous { c: c.to_string(), i });
        }
        let ratio = self.potential_ratio(c, i);
        let mut cands: Vec<(Level, MinSite)> = Vec::new();
        for (v, vert) in self.surface.vertices.iter().enumerate() {
            let (ein, eout) = vert.edges;
            if h[ein] == 0 && h[eout] == 0 {
                if let Some(val) = self.potential_at_vertex(c, i, v) {
                    cands.push((Level::Exact(val), MinSite::Vertex(v)));
                }
            }
        }
        for e in 0..self.edge_count() {
            let Some(r) = self.ratio_on_edge(&ratio, h[e], e) else { continue };
            let g = r.num.derivative().mul(&r.den).sub(&r.num.mul(&r.den.derivative()));
            if g.is_zero() {
                let val = LogValue::log(q(1, 2), &r.eval(&Q::one()).unwrap()).map_err(|e| Error::Numeric(e.to_string()))?;
                cands.push((Level::Exact(val), MinSite::Edge(e)));
                continue;
            }
            for root in g.positive_roots() {
                let val = match &root {
                    Root::Exact(t) => Level::Exact(LogValue::log(q(1, 2), &r.eval(t).unwrap()).map_err(|e| Error::Numeric(e.to_string()))?),
                    Root::Approx { value, .. } => Level::Approx(0.5 * r.eval_f64(*value).ln()),
                };
                cands.push((val, MinSite::EdgePoint { edge: e, tau: root }));
            }
        }
        if !c.is_zero() {
            let solve = self.interior_zeros(c, i);
            for z in &solve.zeros {
                let val = match &z.exact {
                    Some((s, t)) => {
                        let r = ratio.eval(s, t).unwrap();
                        Level::Exact(LogValue::log(q(1, 2), &r).map_err(|e| Error::Numeric(e.to_string()))?)
                    }
                    None => Level::Approx(self.potential_f64(c, i, z.flat)),
                };
                cands.push((val, MinSite::Interior { flat: z.flat }));
            }
            if cands.is_empty() && solve.inconclusive() {
                return Err(Error::InteriorInconclusive { c: c.to_string(), i, residuals: solve.residuals });
            }
        } else if i == (0, 0) {
            cands.push((Level::zero(), MinSite::Interior { flat: [0.0, 0.0] }));
        }
        let norm = cands
            .iter()
            .map(|(l, _)| l.clone())
            .min_by(|a, b| a.compare(b, 1e-12))
            .ok_or_else(|| Error::Numeric(format!("no critical point found for c={c}, I=({},{})", i.0, i.1)))?;
        let minimizers = cands.into_iter().filter(|(l, _)| l.compare(&norm, 1e-9) == Ordering::Equal).map(|(_, s)| s).collect();
        Ok(PotentialFI { c: c.clone(), i, ratio, norm, minimizers })
    }

    /// Interior zeros of `F` by damped Newton from a 9×9 grid of flat starts.
    pub fn interior_zeros(&self, c: &BundleClass, i: IPoint) -> InteriorSolve {
        let mut out = InteriorSolve::default();
        if c.is_zero() {
            return out;
        }
        for a in 0..9 {
            for b in 0..9 {
                let x0 = [-4.0 + a as f64, -4.0 + b as f64];
                out.starts += 1;
                let (res, outcome) = self.newton_start(c, i, x0);
                out.residuals.push(res);
                match outcome {
                    StartOutcome::Zero(x) => {
                        if !out.zeros.iter().any(|z| (z.flat[0] - x[0]).abs() < 1e-8 && (z.flat[1] - x[1]).abs() < 1e-8) {
                            let exact = self.exact_interior_zero(c, i, x);
                            let poly = match &exact {
                                Some((s, t)) => {
                                    let p = self.moment_map_exact(s, t);
                                    [to_f64(&p.0), to_f64(&p.1)]
                                }
                                None => self.moment_map(x),
                            };
                            out.zeros.push(InteriorZero { flat: x, poly, exact });
                        }
                    }
                    StartOutcome::Stalled => out.stalled += 1,
                    StartOutcome::Escaped | StartOutcome::NoZero => {}
                }
            }
        }
        out
    }

    fn newton_start(&self, c: &BundleClass, i: IPoint, mut x: [f64; 2]) -> (f64, StartOutcome) {
        let norm = |f: [f64; 2]| f[0].hypot(f[1]);
        let mut f = self.field_f64(c, i, x);
        for _ in 0..120 {
            let r = norm(f);
            let big = x[0].abs().max(x[1].abs());
            if big > 25.0 {
                return (r, StartOutcome::Escaped);
            }
            if r < 1e-13 {
                let inside = big < 8.0 && self.surface.margin(self.moment_map(x)) > 1e-4;
                return (r, if inside { StartOutcome::Zero(x) } else { StartOutcome::Escaped });
            }
            let h = self.flat_hessian_f(c, x);
            let newton = solve2(&h, [-f[0], -f[1]]);
            // Levenberg–Marquardt fallback on ½|F|²
            let g = [h[0][0] * f[0] + h[1][0] * f[1], h[0][1] * f[0] + h[1][1] * f[1]];
            let hth = [
                [h[0][0] * h[0][0] + h[1][0] * h[1][0], h[0][0] * h[0][1] + h[1][0] * h[1][1]],
                [h[0][1] * h[0][0] + h[1][1] * h[1][0], h[0][1] * h[0][1] + h[1][1] * h[1][1]],
            ];
            let mu = 1e-10 * (hth[0][0] + hth[1][1]) + 1e-300;
            let lm = solve2(&[[hth[0][0] + mu, hth[0][1]], [hth[1][0], hth[1][1] + mu]], [-g[0], -g[1]]);
            let mut accepted = false;
            for d in [newton, lm].into_iter().flatten() {
                if !(d[0].is_finite() && d[1].is_finite()) {
                    continue;
                }
                let step = d[0].abs().max(d[1].abs());
                let mut alpha = if step > 4.0 { 4.0 / step } else { 1.0 };
                while alpha > 1e-10 {
                    let xn = [x[0] + alpha * d[0], x[1] + alpha * d[1]];
                    let fnew = self.field_f64(c, i, xn);
                    if norm(fnew) < (1.0 - 1e-4 * alpha) * r {
                        x = xn;
                        f = fnew;
                        accepted = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if accepted {
                    break;
                }
            }
            if !accepted {
                return (r, if r >= 1e-6 { StartOutcome::NoZero } else { StartOutcome::Stalled });
            }
        }
        let r = norm(f);
        (r, if r >= 1e-6 { StartOutcome::NoZero } else { StartOutcome::Stalled })
    }

    fn exact_interior_zero(&self, c: &BundleClass, i: IPoint, x: [f64; 2]) -> Option<(Q, Q)> {
        let s = rationalize((2.0 * x[0]).exp(), 1e-9);
        let t = rationalize((2.0 * x[1]).exp(), 1e-9);
        let f = self.vector_field(c, i);
        (f[0].eval(&s, &t)?.is_zero() && f[1].eval(&s, &t)?.is_zero()).then_some((s, t))
    }

    /// `n × n` grid over the bounding box of P, interior points only, with
    /// factor statistics cached per point.
    pub fn polytope_grid(&self, n: usize, exec: Exec) -> Vec<GridPoint> {
        let vs: Vec<[f64; 2]> = (0..self.surface.vertices.len()).map(|v| self.surface.vertex_f64(v)).collect();
        let (x0, x1) = vs.iter().fold((f64::MAX, f64::MIN), |a, v| (a.0.min(v[0]), a.1.max(v[0])));
        let (y0, y1) = vs.iter().fold((f64::MAX, f64::MIN), |a, v| (a.0.min(v[1]), a.1.max(v[1])));
        let mut pts = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let p = [x0 + (x1 - x0) * a as f64 / (n - 1) as f64, y0 + (y1 - y0) * b as f64 / (n - 1) as f64];
                if self.surface.margin(p) > 1e-9 {
                    pts.push(p);
                }
            }
        }
        par::map(exec, &pts, |&p| {
            let flat = self.inverse_moment_map(p, 1e-12).ok()?;
            Some(GridPoint { poly: p, flat, stats: self.all_stats(flat) })
        })
        .into_iter()
        .flatten()
        .collect()
    }
}

/// Exact eigenvalue sign pattern from trace and determinant; the
/// eigenvalues are assumed real.
pub fn eigen_signs_exact(m: &[[Q; 2]; 2]) -> EigenSigns {
    let tr = &m[0][0] + &m[1][1];
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_negative() {
        EigenSigns { negative: 1, zero: 0 }
    } else if det.is_positive() {
        EigenSigns { negative: if tr.is_negative() { 2 } else { 0 }, zero: 0 }
    } else if tr.is_zero() {
        EigenSigns { negative: 0, zero: 2 }
    } else {
        EigenSigns { negative: u8::from(tr.is_negative()), zero: 1 }
    }
}

pub fn eigenvalues(m: &Mat2) -> [f64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    [0.5 * tr - disc, 0.5 * tr + disc]
}

pub fn eigen_signs_f64(m: &Mat2, zero_tol: f64) -> EigenSigns {
    let ev = eigenvalues(m);
    EigenSigns {
        negative: ev.iter().filter(|&&l| l < -zero_tol).count() as u8,
        zero: ev.iter().filter(|&&l| l.abs() <= zero_tol).count() as u8,
    }
}

/// Unit eigenvectors for the eigenvalues below `-zero_tol`.
pub fn stable_directions(m: &Mat2, zero_tol: f64) -> Vec<[f64; 2]> {
    let ev = eigenvalues(m);
    let neg: Vec<f64> = ev.iter().cloned().filter(|&l| l < -zero_tol).collect();
    if neg.len() == 2 && (neg[0] - neg[1]).abs() <= zero_tol {
        return vec![[1.0, 0.0], [0.0, 1.0]];
    }
    neg.iter()
        .map(|&l| {
            let u = [m[0][1], l - m[0][0]];
            let w = [l - m[1][1], m[1][0]];
            let v = if u[0].hypot(u[1]) >= w[0].hypot(w[1]) { u } else { w };
            let n = v[0].hypot(v[1]);
            if n == 0.0 {
                [1.0, 0.0]
            } else {
                [v[0] / n, v[1] / n]
            }
        })
        .collect()
}

pub fn to_f64_mat(m: &[[Q; 2]; 2]) -> Mat2 {
    [[to_f64(&m[0][0]), to_f64(&m[0][1])], [to_f64(&m[1][0]), to_f64(&m[1][1])]]
}

pub fn eval_rat_mat(m: &[[Rat1; 2]; 2], tau: &Q) -> Option<[[Q; 2]; 2]> {
    Some([[m[0][0].eval(tau)?, m[0][1].eval(tau)?], [m[1][0].eval(tau)?, m[1][1].eval(tau)?]])
}

/// Roots in `(0, ∞)` of the numerator of a univariate rational function.
pub fn positive_zeros(r: &Rat1) -> Vec<Root> {
    if r.is_zero() {
        return Vec::new();
    }
    r.num.positive_roots()
}

/// Common positive roots of two numerators, via their gcd.
pub fn common_positive_zeros(a: &Rat1, b: &Rat1) -> Vec<Root> {
    let g: Poly1 = match (a.is_zero(), b.is_zero()) {
        (true, true) => return Vec::new(),
        (true, false) => b.num.clone(),
        (false, true) => a.num.clone(),
        (false, false) => a.num.gcd(&b.num),
    };
    g.positive_roots()
}

fn add_scaled(h: &mut Mat2, m: &Mat2, k: f64) {
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] += k * m[i][j];
        }
    }
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn inv2(m: &Mat2) -> Option<Mat2> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if det == 0.0 || det.abs() <= 1e-300 || det.abs() < 1e-15 * scale * scale {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

pub fn solve2(m: &Mat2, b: [f64; 2]) -> Option<[f64; 2]> {
    let inv = inv2(m)?;
    Some([inv[0][0] * b[0] + inv[0][1] * b[1], inv[1][0] * b[0] + inv[1][1] * b[1]])
}
