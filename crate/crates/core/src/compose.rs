//! Structure constants of the composition `m₂`, gradient-tree tracing along
//! boundary edges, and associativity of the resulting table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::geometry::{GridPoint, Level, PotentialFI};
use crate::morse::{Carrier, Component, HomSpace, MorseEngine, Site};
use crate::par;
use crate::surface::{BundleClass, IPoint};
use crate::symbolic::Weight;
use crate::Error;

const GRID: usize = 100;
const STEP: f64 = 1e-3;
const REACH: f64 = 1e-4;
const MAX_PATH: f64 = 100.0;

/// One incoming leaf of a gradient tree, running inside a single edge.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeLeaf {
    /// `Z` or `W`.
    pub source: &'static str,
    pub face: String,
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Display-coordinate polyline, subsampled.
    pub path: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeTrace {
    /// All three carriers share `point`.
    Trivial { point: [f64; 2] },
    Traced { leaves: Vec<TreeLeaf>, meeting: [f64; 2], root: [f64; 2] },
    NotFound(String),
}

impl TreeTrace {
    pub fn is_trivial(&self) -> bool {
        matches!(self, TreeTrace::Trivial { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            TreeTrace::Trivial { .. } => json!("trivial"),
            TreeTrace::Traced { leaves, meeting, root } => json!({
                "leaves": leaves.iter().map(|l| json!({"source": l.source, "face": l.face, "start": l.start, "end": l.end})).collect::<Vec<_>>(),
                "meeting": meeting, "root": root,
            }),
            TreeTrace::NotFound(why) => json!({"not_found": why}),
        }
    }
}

/// `m₂(Z_I ⊗ W_J)`: either zero or `e^{-κ} V_{I+J}`.
#[derive(Clone, Debug)]
pub struct CompositionEntry {
    pub i: IPoint,
    pub j: IPoint,
    /// `I+J` when it labels a generator of the composite space.
    pub target: Option<IPoint>,
    pub z_carrier: Carrier,
    pub w_carrier: Carrier,
    pub v_carrier: Option<Carrier>,
    /// `(f_I + f_J)(v*)` with both potentials normalised to minimum zero.
    pub kappa: Option<Level>,
    /// `min f_{I+J} − min f_I − min f_J` from the normalisation constants.
    pub kappa_sheaf: Option<Level>,
    pub weight: Option<Weight>,
    pub weight_float: f64,
    /// The three carriers share a point.
    pub meets: bool,
    /// Evaluation point in display coordinates.
    pub vstar: Option<[f64; 2]>,
    pub tree: Option<TreeTrace>,
}

impl CompositionEntry {
    pub fn is_zero(&self) -> bool {
        self.target.is_none()
    }

    pub fn to_json(&self, morse: &MorseEngine) -> Value {
        let g = &morse.geom;
        let kappa = match &self.kappa {
            Some(Level::Exact(l)) => {
                let terms: Vec<Value> = l.terms().map(|(q, r)| json!([q.to_string(), r.to_string()])).collect();
                json!({"linear": l.linear_part().to_string(), "terms": terms, "display": l.to_string()})
            }
            Some(Level::Approx(x)) => json!({"approx": x}),
            None => Value::Null,
        };
        json!({
            "I": [self.i.0, self.i.1],
            "J": [self.j.0, self.j.1],
            "target": self.target.map(|k| vec![k.0, k.1]),
            "carriers": {
                "Z": self.z_carrier.name(g),
                "W": self.w_carrier.name(g),
                "V": self.v_carrier.as_ref().map(|c| c.name(g)),
            },
            "kappa": kappa,
            "weight": self.weight.as_ref().map(|w| w.to_string()),
            "weight_float": self.weight_float,
            "tree": self.tree.as_ref().map(|t| t.to_json()),
        })
    }
}

/// All compositions for one triple `L1 → L2 → L3` of a collection.
#[derive(Clone, Debug)]
pub struct CompositionTable {
    pub indices: [usize; 3],
    pub triple: [BundleClass; 3],
    pub entries: Vec<CompositionEntry>,
}

impl CompositionTable {
    pub fn entry(&self, i: IPoint, j: IPoint) -> Option<&CompositionEntry> {
        self.entries.iter().find(|e| e.i == i && e.j == j)
    }

    pub fn to_json(&self, morse: &MorseEngine) -> Value {
        json!({
            "triple": self.triple.iter().map(|b| b.0.clone()).collect::<Vec<_>>(),
            "entries": self.entries.iter().map(|e| e.to_json(morse)).collect::<Vec<_>>(),
        })
    }
}

/// Outcome of the associativity check for one quadruple.
#[derive(Clone, Debug)]
pub struct AssocCheck {
    pub indices: [usize; 4],
    pub labels: (IPoint, IPoint, IPoint),
    pub left: Option<Level>,
    pub right: Option<Level>,
    pub ok: bool,
}

/// Composition engine with cached potentials and polytope grid.
pub struct Composer<'a> {
    pub morse: &'a MorseEngine,
    potentials: Mutex<HashMap<(BundleClass, IPoint), Arc<PotentialFI>>>,
    grid: OnceLock<Vec<GridPoint>>,
    trace: bool,
}

impl<'a> Composer<'a> {
    pub fn new(morse: &'a MorseEngine) -> Self {
        Self { morse, potentials: Mutex::new(HashMap::new()), grid: OnceLock::new(), trace: true }
    }

    /// Skip gradient-tree tracing.
    pub fn without_trees(mut self) -> Self {
        self.trace = false;
        self
    }

    pub fn potential(&self, c: &BundleClass, i: IPoint) -> Result<Arc<PotentialFI>, Error> {
        let key = (c.clone(), i);
        if let Some(p) = self.potentials.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let p = Arc::new(self.morse.geom.potential(c, i)?);
        self.potentials.lock().unwrap().insert(key, p.clone());
        Ok(p)
    }

    fn grid(&self) -> &[GridPoint] {
        self.grid.get_or_init(|| self.morse.geom.polytope_grid(GRID, self.morse.exec()))
    }

    /// `m₂(Z_I ⊗ W_J)` for `L1 → L2 → L3`.
    pub fn compose(&self, l: [&BundleClass; 3], i: IPoint, j: IPoint) -> Result<CompositionEntry, Error> {
        let h12 = self.morse.hom_space(l[0], l[1])?;
        let h23 = self.morse.hom_space(l[1], l[2])?;
        let h13 = self.morse.hom_space(l[0], l[2])?;
        let z = h12.generator(i).ok_or_else(|| Error::Config(format!("no generator I=({},{}) from {} to {}", i.0, i.1, l[0], l[1])))?;
        let w = h23.generator(j).ok_or_else(|| Error::Config(format!("no generator J=({},{}) from {} to {}", j.0, j.1, l[1], l[2])))?;
        self.entry(z, w, &h13)
    }

    fn entry(&self, z: &Component, w: &Component, h13: &HomSpace) -> Result<CompositionEntry, Error> {
        let g = &self.morse.geom;
        let k = (z.i.0 + w.i.0, z.i.1 + w.i.1);
        let mut e = CompositionEntry {
            i: z.i,
            j: w.i,
            target: None,
            z_carrier: z.carrier.clone(),
            w_carrier: w.carrier.clone(),
            v_carrier: None,
            kappa: None,
            kappa_sheaf: None,
            weight: None,
            weight_float: 0.0,
            meets: false,
            vstar: None,
            tree: None,
        };
        let Some(v) = h13.generator(k) else { return Ok(e) };
        let (c1, c2, c3) = (&z.c, &w.c, &v.c);
        let (pz, pw, pv) = (self.potential(c1, z.i)?, self.potential(c2, w.i)?, self.potential(c3, k)?);
        let common = z.carrier.intersect(&w.carrier).intersect(&v.carrier);
        e.meets = !common.is_empty();
        let vstar = if e.meets { common.representative(g) } else { v.carrier.representative(g) };
        let raw = |c: &BundleClass, i: IPoint| {
            vstar.potential(g, c, i).ok_or_else(|| Error::Numeric(format!("potential c={c}, I=({},{}) is infinite at the target", i.0, i.1)))
        };
        let kappa = raw(c1, z.i)?.add(&raw(c2, w.i)?).sub(&pz.norm).sub(&pw.norm);
        let kappa_sheaf = pv.norm.sub(&pz.norm).sub(&pw.norm);
        self.certify(c1, z.i, c2, w.i, &pz, &pw, &kappa)?;
        e.weight = kappa.exact().map(|l| l.weight());
        e.weight_float = (-kappa.to_f64()).exp();
        e.vstar = Some(vstar.display(g));
        if self.trace {
            e.tree = Some(if e.meets { TreeTrace::Trivial { point: vstar.display(g) } } else { self.trace_tree(z, w, &v.carrier, &vstar) });
        }
        e.target = Some(k);
        e.v_carrier = Some(v.carrier.clone());
        e.kappa = Some(kappa);
        e.kappa_sheaf = Some(kappa_sheaf);
        Ok(e)
    }

    /// `f_I + f_J ≥ κ` over the polytope grid, after normalisation.
    #[allow(clippy::too_many_arguments)]
    fn certify(&self, c1: &BundleClass, i: IPoint, c2: &BundleClass, j: IPoint, pz: &PotentialFI, pw: &PotentialFI, kappa: &Level) -> Result<(), Error> {
        let shift = pz.norm.to_f64() + pw.norm.to_f64();
        let k = kappa.to_f64();
        for p in self.grid() {
            let s = p.potential(c1, i) + p.potential(c2, j) - shift;
            if s < k - 1e-9 * (1.0 + k.abs()) {
                return Err(Error::Certificate(format!(
                    "f_I+f_J = {s} < κ = {k} at ({:.4},{:.4}) for c={c1}, I=({},{}), c'={c2}, J=({},{})",
                    p.poly[0], p.poly[1], i.0, i.1, j.0, j.1
                )));
            }
        }
        Ok(())
    }

    /// Follows the forward gradient of `f_I` from `Z` and of `f_J` from `W`
    /// along boundary edges until both reach the target.
    pub fn trace_tree(&self, z: &Component, w: &Component, target: &Carrier, vstar: &Site) -> TreeTrace {
        let g = &self.morse.geom;
        let root = vstar.display(g);
        let mut leaves = Vec::new();
        for (name, comp) in [("Z", z), ("W", w)] {
            if !comp.carrier.intersect(target).is_empty() {
                continue;
            }
            match self.trace_leaf(name, comp, target) {
                Some(leaf) => leaves.push(leaf),
                None => return TreeTrace::NotFound(format!("no boundary flow from {name} reaches the target")),
            }
        }
        TreeTrace::Traced { leaves, meeting: root, root }
    }

    fn trace_leaf(&self, name: &'static str, comp: &Component, target: &Carrier) -> Option<TreeLeaf> {
        let g = &self.morse.geom;
        let s = &g.surface;
        let h = g.slacks(&comp.c, comp.i);
        for e in 0..g.edge_count() {
            if h[e] != 0 || comp.carrier.edges.contains(&e) {
                continue;
            }
            let edge_carrier = Carrier::from_atoms(g, &[crate::morse::Atom::Edge(e)]);
            let goal = target.intersect(&edge_carrier);
            let start = comp.carrier.intersect(&edge_carrier);
            if goal.is_empty() || start.is_empty() {
                continue;
            }
            let goal_fracs: Vec<f64> = goal.point_sites(g).iter().map(|p| g.edge_fraction(e, p.poly(g))).collect();
            for st in start.point_sites(g) {
                let f0 = g.edge_fraction(e, st.poly(g));
                if let Some(path) = self.flow_on_edge(comp, e, f0, &goal_fracs) {
                    let disp: Vec<[f64; 2]> = path.iter().map(|p| s.frame.apply(*p)).collect();
                    let stride = (disp.len() / 50).max(1);
                    let mut sub: Vec<[f64; 2]> = disp.iter().step_by(stride).cloned().collect();
                    sub.push(*disp.last().unwrap());
                    return Some(TreeLeaf { source: name, face: s.edges[e].name.clone(), start: disp[0], end: *disp.last().unwrap(), path: sub });
                }
            }
        }
        None
    }

    /// RK4 in `σ = log τ` for `dσ/dt = ∂f/∂σ` along edge `e`, starting just
    /// off fraction `f0` and stopping at any of `goals`.
    fn flow_on_edge(&self, comp: &Component, e: usize, f0: f64, goals: &[f64]) -> Option<Vec<[f64; 2]>> {
        let g = &self.morse.geom;
        let r = g.ratio_on_edge(&g.potential_ratio(&comp.c, comp.i), 0, e)?;
        let f = |sigma: f64| 0.5 * r.eval_f64(sigma.exp()).ln();
        let rate = |sigma: f64| (f(sigma + 1e-6) - f(sigma - 1e-6)) / 2e-6;
        let pos = |sigma: f64| g.edge_moment_f64(e, sigma.exp());
        let nearest = goals.iter().cloned().min_by(|a, b| (a - f0).abs().total_cmp(&(b - f0).abs()))?;
        let toward = if nearest > f0 { 1e-6 } else { -1e-6 };
        let mut sigma = g.edge_sigma_at_fraction(e, (f0 + toward).clamp(1e-9, 1.0 - 1e-9));
        let goal_pts: Vec<[f64; 2]> = goals.iter().map(|&fr| pos(g.edge_sigma_at_fraction(e, fr))).collect();
        let mut path = vec![pos(sigma)];
        let mut length = 0.0;
        let mut frac = g.edge_fraction(e, path[0]);
        while length < MAX_PATH {
            let p = *path.last().unwrap();
            if goal_pts.iter().any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) < REACH) {
                return Some(path);
            }
            let speed = {
                let a = pos(sigma + 1e-6);
                let b = pos(sigma - 1e-6);
                (a[0] - b[0]).hypot(a[1] - b[1]) / 2e-6
            };
            let r0 = rate(sigma);
            if !r0.is_finite() || r0.abs() < 1e-14 || speed < 1e-14 {
                return None;
            }
            let dt = (STEP / speed / r0.abs()).min(0.5 / r0.abs());
            let k1 = r0;
            let k2 = rate(sigma + 0.5 * dt * k1);
            let k3 = rate(sigma + 0.5 * dt * k2);
            let k4 = rate(sigma + dt * k3);
            sigma += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let q = pos(sigma);
            length += (q[0] - p[0]).hypot(q[1] - p[1]);
            let nf = g.edge_fraction(e, q);
            if goals.iter().any(|&gf| (frac - gf) * (nf - gf) < 0.0) {
                let hit = goals.iter().position(|&gf| (frac - gf) * (nf - gf) < 0.0).unwrap();
                path.push(goal_pts[hit]);
                return Some(path);
            }
            frac = nf;
            path.push(q);
        }
        None
    }

    /// Every composable generator pair of one triple.
    pub fn table_for(&self, coll: &[BundleClass], idx: [usize; 3]) -> Result<CompositionTable, Error> {
        let l = [&coll[idx[0]], &coll[idx[1]], &coll[idx[2]]];
        let h12 = self.morse.hom_space(l[0], l[1])?;
        let h23 = self.morse.hom_space(l[1], l[2])?;
        let h13 = self.morse.hom_space(l[0], l[2])?;
        let mut pairs: Vec<(&Component, &Component)> = h12.generators.iter().flat_map(|z| h23.generators.iter().map(move |w| (z, w))).collect();
        pairs.sort_by_key(|(z, w)| (z.i, w.i));
        let entries: Result<Vec<_>, Error> = par::map(self.morse.exec(), &pairs, |(z, w)| self.entry(z, w, &h13)).into_iter().collect();
        Ok(CompositionTable { indices: idx, triple: [l[0].clone(), l[1].clone(), l[2].clone()], entries: entries? })
    }

    /// Tables for every strictly increasing triple with both consecutive
    /// morphism spaces nonzero.
    pub fn compose_table(&self, coll: &[BundleClass]) -> Result<Vec<CompositionTable>, Error> {
        let n = coll.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.morse.hom_space(&coll[a], &coll[b])?.dim() == 0 {
                    continue;
                }
                for c in b + 1..n {
                    if self.morse.hom_space(&coll[b], &coll[c])?.dim() == 0 {
                        continue;
                    }
                    out.push(self.table_for(coll, [a, b, c])?);
                }
            }
        }
        Ok(out)
    }

    /// `(X·Y)·W` against `X·(Y·W)` for every strictly increasing quadruple.
    pub fn verify_associativity(&self, coll: &[BundleClass], tables: &[CompositionTable]) -> Result<Vec<AssocCheck>, Error> {
        let find = |idx: [usize; 3], i: IPoint, j: IPoint| -> Option<&CompositionEntry> {
            tables.iter().find(|t| t.indices == idx).and_then(|t| t.entry(i, j))
        };
        let sum = |a: Option<&CompositionEntry>, b: Option<&CompositionEntry>| -> Option<Level> {
            let (a, b) = (a?, b?);
            Some(a.kappa.as_ref()?.add(b.kappa.as_ref()?))
        };
        let n = coll.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let hab = self.morse.hom_space(&coll[a], &coll[b])?;
                        let hbc = self.morse.hom_space(&coll[b], &coll[c])?;
                        let hcd = self.morse.hom_space(&coll[c], &coll[d])?;
                        for x in &hab.generators {
                            for y in &hbc.generators {
                                for w in &hcd.generators {
                                    let xy = find([a, b, c], x.i, y.i);
                                    let left = sum(xy, xy.and_then(|e| e.target).and_then(|k| find([a, c, d], k, w.i)));
                                    let yw = find([b, c, d], y.i, w.i);
                                    let right = sum(yw, yw.and_then(|e| e.target).and_then(|k| find([a, b, d], x.i, k)));
                                    let ok = match (&left, &right) {
                                        (None, None) => true,
                                        (Some(Level::Exact(l)), Some(Level::Exact(r))) => l == r,
                                        (Some(l), Some(r)) => (l.to_f64() - r.to_f64()).abs() < 1e-9,
                                        _ => false,
                                    };
                                    out.push(AssocCheck { indices: [a, b, c, d], labels: (x.i, y.i, w.i), left, right, ok });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}
