//! Fixture tables for the Bl₂ and Bl₃ preset collections and the checks
//! shared by the fixture tests and the acceptance harness.

#![allow(dead_code)]

pub mod props;

use std::collections::BTreeSet;

use toric_morse::compose::TreeTrace;
use toric_morse::morse::{Degree, Rejection};
use toric_morse::{BundleClass, Composer, Geometry, HomSpace, MorseEngine, PolySurface, Preset};

pub type Label = (i64, i64);

/// Generators of `Hom(coll[from], coll[to])` as `(I, carrier)`.
pub struct HomFixture {
    pub from: usize,
    pub to: usize,
    pub gens: &'static [(Label, &'static str)],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    M2(u8),
    NonConstant,
}

/// A component that must be rejected, with its carrier and reason.
pub struct RejectFixture {
    pub from: usize,
    pub to: usize,
    pub i: Label,
    pub carrier: &'static str,
    pub reason: Reason,
}

/// `Z_I ⊗ W_J ↦ V_target`, with the face and display meeting point of the
/// tree when it is non-trivial.
pub struct ComposeFixture {
    pub i: Label,
    pub j: Label,
    pub target: Label,
    pub tree: Option<(&'static str, [f64; 2])>,
}

pub struct TripleFixture {
    pub idx: [usize; 3],
    pub entries: &'static [ComposeFixture],
}

const fn cf(i: Label, j: Label, target: Label) -> ComposeFixture {
    ComposeFixture { i, j, target, tree: None }
}

const fn ct(i: Label, j: Label, target: Label, face: &'static str, at: [f64; 2]) -> ComposeFixture {
    ComposeFixture { i, j, target, tree: Some((face, at)) }
}

const fn rj(from: usize, to: usize, i: Label, carrier: &'static str, reason: Reason) -> RejectFixture {
    RejectFixture { from, to, i, carrier, reason }
}

const fn hf(from: usize, to: usize, gens: &'static [(Label, &'static str)]) -> HomFixture {
    HomFixture { from, to, gens }
}

/// Upper-triangular Bl₂ table for the collection
/// `O, O(0,-1,1), O(-1,0,1), O(0,0,1), O(0,0,2)`.
pub const BL2_HOMS: &[HomFixture] = &[
    hf(0, 1, &[((0, 0), "E1∪E5")]),
    hf(0, 2, &[((0, 0), "E2∪E3")]),
    hf(0, 3, &[((0, 0), "{(0,0)}"), ((1, 0), "E3"), ((0, 1), "E5")]),
    hf(0, 4, &[((0, 2), "E5"), ((0, 1), "{(0,2)}"), ((1, 1), "{(3,3)}"), ((0, 0), "{(0,0)}"), ((1, 0), "{(2,0)}"), ((2, 0), "E3")]),
    hf(1, 2, &[]),
    hf(1, 3, &[((0, 0), "E2"), ((0, 1), "E4∪E5")]),
    hf(1, 4, &[((0, 2), "E5"), ((0, 1), "{(0,2)}"), ((1, 1), "{(4,2)}"), ((0, 0), "{(0,0)}"), ((1, 0), "{(4,0)}")]),
    hf(2, 3, &[((0, 0), "E1"), ((1, 0), "E3∪E4")]),
    hf(2, 4, &[((0, 1), "{(0,4)}"), ((1, 1), "{(2,4)}"), ((0, 0), "{(0,0)}"), ((1, 0), "{(2,0)}"), ((2, 0), "E3")]),
    hf(3, 4, &[((0, 0), "{(0,0)}"), ((1, 0), "E3"), ((0, 1), "E5")]),
];

/// Upper-triangular Bl₃ table for the collection
/// `O, O(-1,0,0,1), O(0,-1,0,1), O(0,0,-1,1), O(0,0,0,1), O(0,0,0,2)`.
pub const BL3_HOMS: &[HomFixture] = &[
    hf(0, 1, &[((0, 1), "E4∪E5∪E6")]),
    hf(0, 2, &[((0, 0), "E1∪E2∪E6")]),
    hf(0, 3, &[((0, 0), "E2∪E3∪E4")]),
    hf(0, 4, &[((0, 0), "E2"), ((0, 1), "E6"), ((1, 1), "E4")]),
    hf(0, 5, &[((0, 2), "E6"), ((0, 1), "{(0,4)}"), ((1, 2), "{(4,4)}"), ((0, 0), "E2"), ((1, 1), "{(4,0)}"), ((2, 2), "E4")]),
    hf(1, 2, &[]),
    hf(1, 3, &[]),
    hf(1, 4, &[((0, 0), "E1∪E6"), ((1, 0), "E3∪E4")]),
    hf(1, 5, &[((0, 1), "E6"), ((1, 1), "{(4,4)}"), ((0, 0), "{(0,2)}"), ((1, 0), "{(2,0)}"), ((2, 1), "E4")]),
    hf(2, 3, &[]),
    hf(2, 4, &[((0, 0), "E2∪E3"), ((0, 1), "E5∪E6")]),
    hf(2, 5, &[((0, 2), "E6"), ((0, 1), "{(0,4)}"), ((1, 2), "{(6,2)}"), ((0, 0), "E2"), ((1, 1), "{(6,0)}")]),
    hf(3, 4, &[((0, 0), "E1∪E2"), ((1, 1), "E4∪E5")]),
    hf(3, 5, &[((0, 1), "{(0,6)}"), ((1, 2), "{(2,6)}"), ((0, 0), "E2"), ((1, 1), "{(4,0)}"), ((2, 2), "E4")]),
    hf(4, 5, &[((0, 0), "E2"), ((0, 1), "E6"), ((1, 1), "E4")]),
];

pub const BL2_REJECTED: &[RejectFixture] = &[
    rj(0, 1, (1, 0), "{(4,0)}", Reason::M2(1)),
    rj(0, 1, (1, -1), "{(4,2)}", Reason::M2(1)),
    rj(0, 2, (0, 1), "{(0,4)}", Reason::M2(1)),
    rj(0, 2, (-1, 1), "{(2,4)}", Reason::M2(1)),
    rj(1, 2, (0, 1), "{(0,4)}", Reason::M2(1)),
    rj(1, 2, (0, 0), "{(0,0)}", Reason::M2(1)),
    rj(1, 2, (-1, 0), "{(4,0)}", Reason::M2(1)),
    rj(1, 2, (-1, 1), "E4", Reason::NonConstant),
];

pub const BL3_REJECTED: &[RejectFixture] = &[
    rj(0, 1, (0, 0), "{(0,2)}", Reason::M2(1)),
    rj(0, 1, (-1, 0), "{(2,0)}", Reason::M2(1)),
    rj(0, 2, (1, 0), "{(6,2)}", Reason::M2(1)),
    rj(0, 2, (1, 1), "{(6,0)}", Reason::M2(1)),
    rj(0, 3, (0, 1), "{(0,6)}", Reason::M2(1)),
    rj(0, 3, (-1, 0), "{(2,6)}", Reason::M2(1)),
    rj(1, 2, (0, 0), "{(0,2)}", Reason::M2(1)),
    rj(1, 2, (1, -1), "{(6,2)}", Reason::M2(1)),
    rj(1, 2, (1, 0), "E3", Reason::NonConstant),
    rj(1, 2, (0, -1), "E6", Reason::NonConstant),
    rj(1, 3, (1, 0), "{(2,0)}", Reason::M2(1)),
    rj(1, 3, (-1, -1), "{(2,6)}", Reason::M2(1)),
    rj(1, 3, (0, 0), "E1", Reason::NonConstant),
    rj(1, 3, (0, -1), "E4", Reason::NonConstant),
    rj(2, 3, (0, 1), "{(0,6)}", Reason::M2(1)),
    rj(2, 3, (-1, -1), "{(6,0)}", Reason::M2(1)),
    rj(2, 3, (0, 0), "E2", Reason::NonConstant),
    rj(2, 3, (-1, 0), "E5", Reason::NonConstant),
];

pub const BL2_COMPOSE: &[TripleFixture] = &[
    TripleFixture { idx: [0, 1, 3], entries: &[cf((0, 0), (0, 0), (0, 0)), cf((0, 0), (0, 1), (0, 1))] },
    TripleFixture { idx: [0, 2, 3], entries: &[cf((0, 0), (0, 0), (0, 0)), cf((0, 0), (1, 0), (1, 0))] },
    TripleFixture {
        idx: [0, 1, 4],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (0, 1), (0, 1)),
            cf((0, 0), (0, 2), (0, 2)),
            ct((0, 0), (1, 0), (1, 0), "E2", [2.0, 0.0]),
            ct((0, 0), (1, 1), (1, 1), "E4", [3.0, 3.0]),
        ],
    },
    TripleFixture {
        idx: [0, 2, 4],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (1, 0), (1, 0)),
            cf((0, 0), (2, 0), (2, 0)),
            ct((0, 0), (0, 1), (0, 1), "E1", [0.0, 2.0]),
            ct((0, 0), (1, 1), (1, 1), "E4", [3.0, 3.0]),
        ],
    },
    TripleFixture {
        idx: [0, 3, 4],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 1), (0, 1), (0, 2)),
            cf((1, 0), (1, 0), (2, 0)),
            ct((0, 0), (0, 1), (0, 1), "E1", [0.0, 2.0]),
            ct((0, 1), (0, 0), (0, 1), "E1", [0.0, 2.0]),
            ct((0, 0), (1, 0), (1, 0), "E2", [2.0, 0.0]),
            ct((1, 0), (0, 0), (1, 0), "E2", [2.0, 0.0]),
            ct((0, 1), (1, 0), (1, 1), "E4", [3.0, 3.0]),
            ct((1, 0), (0, 1), (1, 1), "E4", [3.0, 3.0]),
        ],
    },
    TripleFixture {
        idx: [1, 3, 4],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (1, 0), (1, 0)),
            cf((0, 1), (0, 1), (0, 2)),
            cf((0, 1), (1, 0), (1, 1)),
            ct((0, 0), (0, 1), (0, 1), "E1", [0.0, 2.0]),
            ct((0, 1), (0, 0), (0, 1), "E1", [0.0, 2.0]),
        ],
    },
    TripleFixture {
        idx: [2, 3, 4],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (0, 1), (0, 1)),
            cf((1, 0), (0, 1), (1, 1)),
            cf((1, 0), (1, 0), (2, 0)),
            ct((0, 0), (1, 0), (1, 0), "E2", [2.0, 0.0]),
            ct((1, 0), (0, 0), (1, 0), "E2", [2.0, 0.0]),
        ],
    },
];

pub const BL3_COMPOSE: &[TripleFixture] = &[
    TripleFixture { idx: [0, 1, 4], entries: &[cf((0, 1), (0, 0), (0, 1)), cf((0, 1), (1, 0), (1, 1))] },
    TripleFixture { idx: [0, 2, 4], entries: &[cf((0, 0), (0, 0), (0, 0)), cf((0, 0), (0, 1), (0, 1))] },
    TripleFixture { idx: [0, 3, 4], entries: &[cf((0, 0), (0, 0), (0, 0)), cf((0, 0), (1, 1), (1, 1))] },
    TripleFixture {
        idx: [0, 1, 5],
        entries: &[
            cf((0, 1), (0, 1), (0, 2)),
            cf((0, 1), (1, 1), (1, 2)),
            cf((0, 1), (2, 1), (2, 2)),
            ct((0, 1), (0, 0), (0, 1), "E1", [0.0, 4.0]),
            ct((0, 1), (1, 0), (1, 1), "E3", [4.0, 0.0]),
        ],
    },
    TripleFixture {
        idx: [0, 2, 5],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (0, 1), (0, 1)),
            cf((0, 0), (0, 2), (0, 2)),
            ct((0, 0), (1, 1), (1, 1), "E3", [4.0, 0.0]),
            ct((0, 0), (1, 2), (1, 2), "E5", [4.0, 4.0]),
        ],
    },
    TripleFixture {
        idx: [0, 3, 5],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (1, 1), (1, 1)),
            cf((0, 0), (2, 2), (2, 2)),
            ct((0, 0), (0, 1), (0, 1), "E1", [0.0, 4.0]),
            ct((0, 0), (1, 2), (1, 2), "E5", [4.0, 4.0]),
        ],
    },
    TripleFixture {
        idx: [0, 4, 5],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 1), (0, 1), (0, 2)),
            cf((1, 1), (1, 1), (2, 2)),
            ct((0, 0), (0, 1), (0, 1), "E1", [0.0, 4.0]),
            ct((0, 1), (0, 0), (0, 1), "E1", [0.0, 4.0]),
            ct((0, 0), (1, 1), (1, 1), "E3", [4.0, 0.0]),
            ct((1, 1), (0, 0), (1, 1), "E3", [4.0, 0.0]),
            ct((0, 1), (1, 1), (1, 2), "E5", [4.0, 4.0]),
            ct((1, 1), (0, 1), (1, 2), "E5", [4.0, 4.0]),
        ],
    },
    TripleFixture {
        idx: [1, 4, 5],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (0, 1), (0, 1)),
            cf((1, 0), (0, 0), (1, 0)),
            cf((1, 0), (1, 1), (2, 1)),
            ct((0, 0), (1, 1), (1, 1), "E5", [4.0, 4.0]),
            ct((1, 0), (0, 1), (1, 1), "E5", [4.0, 4.0]),
        ],
    },
    TripleFixture {
        idx: [2, 4, 5],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (1, 1), (1, 1)),
            cf((0, 1), (0, 1), (0, 2)),
            cf((0, 1), (1, 1), (1, 2)),
            ct((0, 0), (0, 1), (0, 1), "E1", [0.0, 4.0]),
            ct((0, 1), (0, 0), (0, 1), "E1", [0.0, 4.0]),
        ],
    },
    TripleFixture {
        idx: [3, 4, 5],
        entries: &[
            cf((0, 0), (0, 0), (0, 0)),
            cf((0, 0), (0, 1), (0, 1)),
            cf((1, 1), (0, 1), (1, 2)),
            cf((1, 1), (1, 1), (2, 2)),
            ct((0, 0), (1, 1), (1, 1), "E3", [4.0, 0.0]),
            ct((1, 1), (0, 0), (1, 1), "E3", [4.0, 0.0]),
        ],
    },
];

pub fn engine(p: Preset) -> (MorseEngine, Vec<BundleClass>) {
    let s = PolySurface::preset(p);
    let coll = s.exceptional_collection().expect("preset collection");
    (MorseEngine::new(Geometry::new(s)), coll)
}

pub fn homs_of(p: Preset) -> &'static [HomFixture] {
    match p {
        Preset::Bl2 => BL2_HOMS,
        Preset::Bl3 => BL3_HOMS,
        _ => &[],
    }
}

pub fn rejected_of(p: Preset) -> &'static [RejectFixture] {
    match p {
        Preset::Bl2 => BL2_REJECTED,
        Preset::Bl3 => BL3_REJECTED,
        _ => &[],
    }
}

pub fn compose_of(p: Preset) -> &'static [TripleFixture] {
    match p {
        Preset::Bl2 => BL2_COMPOSE,
        Preset::Bl3 => BL3_COMPOSE,
        _ => &[],
    }
}

fn gen_set(m: &MorseEngine, h: &HomSpace) -> BTreeSet<(Label, String)> {
    h.generators.iter().map(|g| (g.i, g.carrier.name(&m.geom))).collect()
}

/// Every ordered pair of the collection: upper pairs against the table,
/// the diagonal against the identity and reverse pairs against zero.
/// Returns one message per mismatch.
pub fn check_hom_table(p: Preset) -> Vec<String> {
    let (m, coll) = engine(p);
    let table = m.hom_table(&coll).expect("hom table");
    let n = coll.len();
    let mut bad = Vec::new();
    let fixtures = homs_of(p);
    if fixtures.len() != n * (n - 1) / 2 {
        bad.push(format!("fixture covers {} upper pairs, expected {}", fixtures.len(), n * (n - 1) / 2));
    }
    for a in 0..n {
        for b in 0..n {
            let h = &table[a][b];
            let got = gen_set(&m, h);
            let want: BTreeSet<(Label, String)> = if a == b {
                [((0, 0), "P".to_string())].into()
            } else if a > b {
                BTreeSet::new()
            } else {
                match fixtures.iter().find(|f| f.from == a && f.to == b) {
                    Some(f) => f.gens.iter().map(|(i, c)| (*i, c.to_string())).collect(),
                    None => continue,
                }
            };
            if got != want {
                bad.push(format!("Hom({a},{b}): got {got:?}, want {want:?}"));
            }
            if let Some(g) = h.generators.iter().find(|g| g.degree != Degree::Fixed(0)) {
                bad.push(format!("Hom({a},{b}): generator {:?} has degree {}", g.i, g.degree));
            }
        }
    }
    bad
}

/// Generator counts laid out as the rows `dim Hom(L_a, L_b)`, `b > a`.
pub fn dim_rows(p: Preset) -> Vec<Vec<usize>> {
    let (m, coll) = engine(p);
    let n = coll.len();
    (0..n - 1).map(|a| (a + 1..n).map(|b| m.hom_space(&coll[a], &coll[b]).unwrap().dim()).collect()).collect()
}

fn reason_of(r: Option<Rejection>) -> Option<Reason> {
    match r? {
        Rejection::M2 { degree } => Some(Reason::M2(degree)),
        Rejection::NonConstant => Some(Reason::NonConstant),
        Rejection::Undetermined => None,
    }
}

/// Named rejections plus the blanket rule that every component of a
/// reverse pair is rejected, for M2 with positive degree unless it is one
/// of the named non-constant edges.
pub fn check_rejections(p: Preset) -> Vec<String> {
    let (m, coll) = engine(p);
    let mut bad = Vec::new();
    for f in rejected_of(p) {
        let h = m.hom_space(&coll[f.from], &coll[f.to]).unwrap();
        match h.rejected.iter().find(|r| r.i == f.i) {
            None => bad.push(format!("Hom({},{}) I={:?}: not rejected", f.from, f.to, f.i)),
            Some(r) => {
                let name = r.carrier.name(&m.geom);
                let why = reason_of(r.rejection);
                if name != f.carrier || why != Some(f.reason) {
                    bad.push(format!("Hom({},{}) I={:?}: got {name} {why:?}, want {} {:?}", f.from, f.to, f.i, f.carrier, f.reason));
                }
            }
        }
    }
    let n = coll.len();
    for a in 0..n {
        for b in 0..a {
            let h = m.hom_space(&coll[a], &coll[b]).unwrap();
            if h.rejected.is_empty() {
                bad.push(format!("Hom({a},{b}): no components at all"));
            }
            for r in &h.rejected {
                let named_m1 = rejected_of(p).iter().any(|f| f.reason == Reason::NonConstant && f.to == a && f.from == b && f.carrier == r.carrier.name(&m.geom));
                let ok = match reason_of(r.rejection) {
                    Some(Reason::M2(d)) => d >= 1,
                    Some(Reason::NonConstant) => named_m1,
                    None => false,
                };
                if !ok {
                    bad.push(format!("Hom({a},{b}) I={:?}: unexpected verdict {:?}", r.i, r.rejection));
                }
            }
        }
    }
    bad
}

/// Composition fixtures: target label, trivial/non-trivial class, face of
/// both leaves and the meeting point to 1e-4.
pub fn check_compositions(p: Preset) -> Vec<String> {
    let (m, coll) = engine(p);
    let composer = Composer::new(&m);
    let tables = composer.compose_table(&coll).unwrap();
    let fixtures = compose_of(p);
    let mut bad = Vec::new();
    let got: BTreeSet<[usize; 3]> = tables.iter().map(|t| t.indices).collect();
    let want: BTreeSet<[usize; 3]> = fixtures.iter().map(|t| t.idx).collect();
    if got != want {
        bad.push(format!("triples: got {got:?}, want {want:?}"));
    }
    for tf in fixtures {
        let Some(t) = tables.iter().find(|t| t.indices == tf.idx) else { continue };
        if t.entries.len() != tf.entries.len() {
            bad.push(format!("{:?}: {} entries, want {}", tf.idx, t.entries.len(), tf.entries.len()));
        }
        for f in tf.entries {
            let Some(e) = t.entry(f.i, f.j) else {
                bad.push(format!("{:?}: missing {:?}⊗{:?}", tf.idx, f.i, f.j));
                continue;
            };
            if e.target != Some(f.target) {
                bad.push(format!("{:?} {:?}⊗{:?}: target {:?}, want {:?}", tf.idx, f.i, f.j, e.target, f.target));
            }
            match (&e.tree, f.tree) {
                (Some(TreeTrace::Trivial { .. }), None) => {}
                (Some(TreeTrace::Traced { leaves, root, .. }), Some((face, at))) => {
                    if leaves.len() != 2 || leaves.iter().any(|l| l.face != face) {
                        let faces: Vec<&str> = leaves.iter().map(|l| l.face.as_str()).collect();
                        bad.push(format!("{:?} {:?}⊗{:?}: leaves on {faces:?}, want {face}", tf.idx, f.i, f.j));
                    }
                    let d = (root[0] - at[0]).hypot(root[1] - at[1]);
                    if d > 1e-4 {
                        bad.push(format!("{:?} {:?}⊗{:?}: meets at {root:?}, want {at:?}", tf.idx, f.i, f.j));
                    }
                }
                (t, w) => bad.push(format!("{:?} {:?}⊗{:?}: tree {t:?}, want {w:?}", tf.idx, f.i, f.j)),
            }
        }
    }
    bad
}

/// `½ log(1 + e^{2x₁} + e^{2x₂}) − I·x`: the potential of `O(0,0,1)` on
/// Bl₂ written directly from its Laurent polynomial.
pub fn bl2_hyperplane_potential(i: Label, x: [f64; 2]) -> f64 {
    0.5 * (1.0 + (2.0 * x[0]).exp() + (2.0 * x[1]).exp()).ln() - i.0 as f64 * x[0] - i.1 as f64 * x[1]
}

/// Minimum of `f_{(1,0)} + f_{(0,1)}` for `O(0,0,1)` on Bl₂ over a flat
/// grid of half-width `r` and `n × n` points.
pub fn log2_oracle(r: f64, n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..n {
        for b in 0..n {
            let x = [-r + 2.0 * r * a as f64 / (n - 1) as f64, -r + 2.0 * r * b as f64 / (n - 1) as f64];
            best = best.min(bl2_hyperplane_potential((1, 0), x) + bl2_hyperplane_potential((0, 1), x));
        }
    }
    best
}
