//! Property checks driven by proptest strategies and by the acceptance
//! harness. Every check reports failures as strings instead of panicking.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use toric_morse::geometry::{eigenvalues, Level};
use toric_morse::morse::Site;
use toric_morse::par::Exec;
use toric_morse::surface::IPoint;
use toric_morse::{BundleClass, Carrier, Geometry, MorseEngine, PolySurface, Preset};

pub const PRESETS: [Preset; 3] = [Preset::Bl2, Preset::Bl3, Preset::Cp2];

pub fn geom(p: Preset) -> &'static Geometry {
    static CELLS: [OnceLock<Geometry>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let k = PRESETS.iter().position(|&x| x == p).expect("preset with a cached geometry");
    CELLS[k].get_or_init(|| Geometry::new(PolySurface::preset(p)))
}

pub fn preset() -> impl Strategy<Value = Preset> {
    prop_oneof![Just(Preset::Bl2), Just(Preset::Bl3), Just(Preset::Cp2)]
}

fn flat_point() -> impl Strategy<Value = [f64; 2]> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| [a, b])
}

/// Random surface, bundle, label and flat point.
pub fn gradient_case() -> impl Strategy<Value = (Preset, BundleClass, IPoint, [f64; 2])> {
    preset().prop_flat_map(|p| {
        let k = geom(p).surface.rank();
        (Just(p), prop::collection::vec(-2i64..=2, k).prop_map(BundleClass), (-3i64..=3, -3i64..=3), flat_point())
    })
}

pub fn flat_case() -> impl Strategy<Value = (Preset, [f64; 2])> {
    (preset(), flat_point())
}

/// Two bundles and two labels on one surface.
pub fn additivity_case() -> impl Strategy<Value = (Preset, BundleClass, BundleClass, IPoint, IPoint, [f64; 2])> {
    preset().prop_flat_map(|p| {
        let k = geom(p).surface.rank();
        let b = || prop::collection::vec(-2i64..=2, k).prop_map(BundleClass);
        let l = || (-3i64..=3, -3i64..=3);
        (Just(p), b(), b(), l(), l(), flat_point())
    })
}

fn sup(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Centred differences of `f_I` in flat coordinates against the stored
/// gradient field, relative to `max(|F|, 1)`.
pub fn check_gradient(p: Preset, c: &BundleClass, i: IPoint, x: [f64; 2]) -> Result<f64, String> {
    let g = geom(p);
    let h = 1e-5;
    let f = |y: [f64; 2]| g.potential_f64(c, i, y);
    let fd = [
        (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h),
        (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h),
    ];
    let field = g.field_f64(c, i, x);
    let rel = sup([field[0] - fd[0], field[1] - fd[1]]) / sup(field).max(1.0);
    if rel <= 1e-6 {
        Ok(rel)
    } else {
        Err(format!("{p:?} c={c} I={i:?} x={x:?}: field {field:?} vs fd {fd:?} (rel {rel:e})"))
    }
}

/// The moment map is the gradient of ψ and Hess ψ is positive definite.
pub fn check_moment_gradient(p: Preset, x: [f64; 2]) -> Result<(), String> {
    let g = geom(p);
    let h = 1e-5;
    let fd = [
        (g.psi([x[0] + h, x[1]]) - g.psi([x[0] - h, x[1]])) / (2.0 * h),
        (g.psi([x[0], x[1] + h]) - g.psi([x[0], x[1] - h])) / (2.0 * h),
    ];
    let mu = g.moment_map(x);
    if sup([mu[0] - fd[0], mu[1] - fd[1]]) > 1e-6 * sup(mu).max(1.0) {
        return Err(format!("{p:?} x={x:?}: μ {mu:?} vs fd {fd:?}"));
    }
    let ev = eigenvalues(&g.hessian_psi(x));
    if ev.iter().any(|&l| l <= 0.0) {
        return Err(format!("{p:?} x={x:?}: Hess ψ eigenvalues {ev:?}"));
    }
    Ok(())
}

/// `μ(μ⁻¹(p)) = p` for `p = μ(x)`.
pub fn check_round_trip(p: Preset, x: [f64; 2]) -> Result<f64, String> {
    let g = geom(p);
    let target = g.moment_map(x);
    if g.surface.margin(target) < 1e-6 {
        return Ok(0.0);
    }
    let y = g.inverse_moment_map(target, 1e-13).map_err(|e| format!("{p:?} x={x:?}: {e}"))?;
    let back = g.moment_map(y);
    let err = sup([back[0] - target[0], back[1] - target[1]]);
    if err <= 1e-10 {
        Ok(err)
    } else {
        Err(format!("{p:?} x={x:?}: round trip error {err:e}"))
    }
}

/// `f_I + f_J − f_{I+J}` vanishes identically for `c, c'` and `c+c'`:
/// exact gradients agree and the raw potentials agree numerically.
pub fn check_additivity(p: Preset, c1: &BundleClass, c2: &BundleClass, i: IPoint, j: IPoint, x: [f64; 2]) -> Result<(), String> {
    let g = geom(p);
    let c = c1.add(c2);
    let k = (i.0 + j.0, i.1 + j.1);
    let (a, b, s) = (g.vector_field(c1, i), g.vector_field(c2, j), g.vector_field(&c, k));
    for d in 0..2 {
        if !a[d].add(&b[d]).sub(&s[d]).is_zero() {
            return Err(format!("{p:?} {c1}+{c2}, {i:?}+{j:?}: gradient component {d} differs"));
        }
    }
    let ratio = g.potential_ratio(c1, i).mul(&g.potential_ratio(c2, j)).sub(&g.potential_ratio(&c, k));
    if !ratio.is_zero() {
        return Err(format!("{p:?} {c1}+{c2}, {i:?}+{j:?}: potential ratios differ"));
    }
    let diff = g.potential_f64(c1, i, x) + g.potential_f64(c2, j, x) - g.potential_f64(&c, k, x);
    if diff.abs() > 1e-9 {
        return Err(format!("{p:?} {c1}+{c2}, {i:?}+{j:?} at {x:?}: difference {diff:e}"));
    }
    Ok(())
}

fn grid_cell(g: &Geometry, n: usize) -> f64 {
    let vs: Vec<[f64; 2]> = (0..g.surface.vertices.len()).map(|v| g.surface.vertex_f64(v)).collect();
    let w = vs.iter().map(|v| v[0]).fold(f64::MIN, f64::max) - vs.iter().map(|v| v[0]).fold(f64::MAX, f64::min);
    let h = vs.iter().map(|v| v[1]).fold(f64::MIN, f64::max) - vs.iter().map(|v| v[1]).fold(f64::MAX, f64::min);
    w.max(h) / (n - 1) as f64
}

/// Exact zero of the normalised potential at the carrier's vertices,
/// isolated points and the quarter points of its edges.
fn carrier_zero_sites(g: &Geometry, c: &BundleClass, i: IPoint, carrier: &Carrier, norm: &Level) -> Vec<String> {
    let mut sites = carrier.point_sites(g);
    for &e in &carrier.edges {
        for frac in [0.25, 0.5, 0.75] {
            sites.push(Site::EdgeTau(e, g.edge_tau_at_fraction(e, frac)));
        }
    }
    let mut bad = Vec::new();
    for s in sites {
        match s.potential(g, c, i) {
            Some(Level::Exact(v)) if norm.exact() == Some(&v) => {}
            Some(Level::Approx(v)) if (v - norm.to_f64()).abs() < 1e-9 => {}
            other => bad.push(format!("c={c} I={i:?}: value {other:?} at {s:?}, min {norm}")),
        }
    }
    bad
}

/// For every degree-0 generator of the preset collection: the normalised
/// potential is non-negative on an `n × n` grid, it is small only next to
/// the carrier, and it vanishes exactly on the carrier.
pub fn zero_set_scan(p: Preset, n: usize) -> Vec<String> {
    let g = geom(p);
    let coll = g.surface.exceptional_collection().expect("preset collection");
    let m = MorseEngine::new(g.clone());
    let grid = g.polytope_grid(n, Exec::Auto);
    let cell = grid_cell(g, n);
    let mut seen = BTreeSet::new();
    let mut bad = Vec::new();
    for a in 0..coll.len() {
        for b in a + 1..coll.len() {
            let h = m.hom_space(&coll[a], &coll[b]).expect("hom space");
            for gen in &h.generators {
                if !seen.insert((h.diff.clone(), gen.i)) {
                    continue;
                }
                let pot = g.potential(&h.diff, gen.i).expect("potential");
                let norm = pot.norm.to_f64();
                for gp in &grid {
                    let v = gp.potential(&h.diff, gen.i) - norm;
                    if v < -1e-9 {
                        bad.push(format!("{p:?} c={} I={:?}: f = {v:e} < 0 at {:?}", h.diff, gen.i, gp.poly));
                        break;
                    }
                    if v < 1e-6 && gen.carrier.distance(g, gp.poly) > 2.0 * cell {
                        bad.push(format!("{p:?} c={} I={:?}: f = {v:e} away from the carrier at {:?}", h.diff, gen.i, gp.poly));
                        break;
                    }
                }
                bad.extend(carrier_zero_sites(g, &h.diff, gen.i, &gen.carrier, &pot.norm));
            }
        }
    }
    bad
}

/// Every difference bundle of the collection and every label in a box
/// around its candidates: grid points where `|F| < 1e-4` must lie within
/// two cells of a reported component. Returns the failures and the number
/// of `(c, I)` pairs scanned.
pub fn completeness_scan(p: Preset, n: usize) -> (Vec<String>, usize) {
    let g = geom(p);
    let coll = g.surface.exceptional_collection().expect("preset collection");
    let m = MorseEngine::new(g.clone());
    let grid = g.polytope_grid(n, Exec::Auto);
    let cell = grid_cell(g, n);
    let diffs: BTreeSet<BundleClass> = coll.iter().flat_map(|a| coll.iter().map(move |b| b.sub(a))).filter(|c| !c.is_zero()).collect();
    let mut bad = Vec::new();
    let mut scanned = 0;
    for c in &diffs {
        let cand = m.candidate_labels(c);
        let lo = (cand.iter().map(|x| x.0).min().unwrap() - 1, cand.iter().map(|x| x.1).min().unwrap() - 1);
        let hi = (cand.iter().map(|x| x.0).max().unwrap() + 1, cand.iter().map(|x| x.1).max().unwrap() + 1);
        for x in lo.0..=hi.0 {
            for y in lo.1..=hi.1 {
                let i = (x, y);
                let comps = m.intersection_components(c, i).expect("components");
                scanned += 1;
                let hit = grid.iter().find(|gp| {
                    let f = gp.field(c, i);
                    sup(f) < 1e-4 && comps.iter().all(|k| k.carrier.distance(g, gp.poly) > 2.0 * cell)
                });
                if let Some(gp) = hit {
                    bad.push(format!("{p:?} c={c} I={i:?}: unreported zero near {:?}", gp.poly));
                }
            }
        }
    }
    (bad, scanned)
}
