//! Sheaf-side data and the checks comparing it with the Morse side:
//! dimensions, weights of compositions, exceptionality and associativity.

use serde_json::{json, Value};

use crate::compose::{AssocCheck, Composer, CompositionTable};
use crate::geometry::{Geometry, Level};
use crate::morse::MorseEngine;
use crate::par;
use crate::surface::{BundleClass, IPoint};
use crate::Error;

/// Normalised holomorphic section `e_{c;I}`; `norm` is `min f_I`, so that
/// `max |e_{c;I}| = 1`.
#[derive(Clone, Debug)]
pub struct BasisElement {
    pub i: IPoint,
    pub norm: Level,
}

#[derive(Clone, Debug)]
pub struct SectionBasis {
    pub c: BundleClass,
    pub elements: Vec<BasisElement>,
    /// Lattice points whose section does not extend continuously to P.
    pub excluded: Vec<(IPoint, String)>,
}

impl SectionBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn labels(&self) -> Vec<IPoint> {
        self.elements.iter().map(|e| e.i).collect()
    }
}

/// One element per lattice point of the section polytope of `c`.
pub fn h0_basis(geom: &Geometry, c: &BundleClass) -> Result<SectionBasis, Error> {
    let sp = geom.surface.section_polytope(c);
    let mut elements = Vec::new();
    let mut excluded = Vec::new();
    for &i in &sp.lattice_points {
        match geom.potential(c, i) {
            Ok(p) => elements.push(BasisElement { i, norm: p.norm }),
            Err(e @ Error::NotContinuous { .. }) => excluded.push((i, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(SectionBasis { c: c.clone(), elements, excluded })
}

#[derive(Clone, Debug)]
pub struct DimCheck {
    pub pair: (usize, usize),
    pub morse_dim: usize,
    pub sheaf_dim: usize,
    /// Generator labels coincide with the lattice points.
    pub labels_match: bool,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct WeightCheck {
    pub triple: [usize; 3],
    pub pair_of_gens: (IPoint, IPoint),
    pub weight_morse: Option<Level>,
    pub weight_sheaf: Option<Level>,
    /// The target label is `I+J` and is a sheaf basis label.
    pub grading_ok: bool,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct ExceptionalCheck {
    pub pair: (usize, usize),
    pub dim: usize,
    /// Reasons that kill each candidate component of a reverse pair.
    pub reasons: Vec<String>,
    pub ok: bool,
}

/// Outcome of the full verification suite.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub dims: Vec<DimCheck>,
    pub weights: Vec<WeightCheck>,
    pub exceptional: Vec<ExceptionalCheck>,
    pub associativity: Vec<AssocCheck>,
    pub warnings: Vec<String>,
}

impl VerifyReport {
    pub fn dims_ok(&self) -> bool {
        self.dims.iter().all(|d| d.ok)
    }

    pub fn weights_ok(&self) -> bool {
        self.weights.iter().all(|w| w.ok)
    }

    pub fn exceptional_ok(&self) -> bool {
        self.exceptional.iter().all(|e| e.ok)
    }

    pub fn associativity_ok(&self) -> bool {
        self.associativity.iter().all(|a| a.ok)
    }

    pub fn passed(&self) -> bool {
        self.dims_ok() && self.weights_ok() && self.exceptional_ok() && self.associativity_ok()
    }

    /// The first failing check, described in one line.
    pub fn first_failure(&self) -> Option<String> {
        if let Some(d) = self.dims.iter().find(|d| !d.ok) {
            return Some(format!("dimension mismatch for pair {:?}: morse {} vs sheaf {}", d.pair, d.morse_dim, d.sheaf_dim));
        }
        if let Some(w) = self.weights.iter().find(|w| !w.ok) {
            return Some(format!("weight mismatch for triple {:?}, gens {:?}: morse {:?} vs sheaf {:?}", w.triple, w.pair_of_gens, w.weight_morse, w.weight_sheaf));
        }
        if let Some(e) = self.exceptional.iter().find(|e| !e.ok) {
            return Some(format!("exceptionality fails for pair {:?}: dim {}", e.pair, e.dim));
        }
        self.associativity.iter().find(|a| !a.ok).map(|a| format!("associativity fails for {:?} with labels {:?}", a.indices, a.labels))
    }

    pub fn to_json(&self) -> Value {
        let lvl = |l: &Option<Level>| l.as_ref().map(|x| x.to_string());
        json!({
            "passed": self.passed(),
            "dim_match": {
                "ok": self.dims_ok(),
                "pairs": self.dims.iter().map(|d| json!({"pair": [d.pair.0, d.pair.1], "morse_dim": d.morse_dim, "sheaf_dim": d.sheaf_dim, "match": d.ok})).collect::<Vec<_>>(),
            },
            "functoriality": {
                "ok": self.weights_ok(),
                "pairs": self.weights.iter().map(|w| json!({
                    "triple": w.triple,
                    "pair_of_gens": [[w.pair_of_gens.0 .0, w.pair_of_gens.0 .1], [w.pair_of_gens.1 .0, w.pair_of_gens.1 .1]],
                    "weight_morse": lvl(&w.weight_morse), "weight_sheaf": lvl(&w.weight_sheaf), "equal": w.ok,
                })).collect::<Vec<_>>(),
            },
            "exceptionality": {
                "ok": self.exceptional_ok(),
                "pairs": self.exceptional.iter().map(|e| json!({"pair": [e.pair.0, e.pair.1], "dim": e.dim, "reasons": e.reasons, "ok": e.ok})).collect::<Vec<_>>(),
            },
            "associativity": {
                "ok": self.associativity_ok(),
                "checks": self.associativity.len(),
                "failures": self.associativity.iter().filter(|a| !a.ok).map(|a| json!({"indices": a.indices, "labels": format!("{:?}", a.labels)})).collect::<Vec<_>>(),
            },
            "first_failure": self.first_failure(),
            "warnings": self.warnings,
        })
    }
}

/// Dimension and label agreement for every ordered pair.
pub fn verify_dim_match(morse: &MorseEngine, coll: &[BundleClass]) -> Result<Vec<DimCheck>, Error> {
    let n = coll.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    par::map(morse.exec(), &pairs, |&(a, b)| {
        let h = morse.hom_space(&coll[a], &coll[b])?;
        let basis = h0_basis(&morse.geom, &h.diff)?;
        let mut gens: Vec<IPoint> = h.generators.iter().map(|g| g.i).collect();
        let mut labels = basis.labels();
        gens.sort();
        labels.sort();
        let labels_match = gens == labels;
        Ok(DimCheck { pair: (a, b), morse_dim: h.dim(), sheaf_dim: basis.dim(), labels_match, ok: h.dim() == basis.dim() && labels_match })
    })
    .into_iter()
    .collect()
}

/// Morse weight against the sheaf-side normalisation constant for every
/// composable generator pair.
pub fn verify_functoriality(morse: &MorseEngine, tables: &[CompositionTable]) -> Result<Vec<WeightCheck>, Error> {
    let mut out = Vec::new();
    for t in tables {
        let basis = h0_basis(&morse.geom, &t.triple[2].sub(&t.triple[0]))?;
        for e in &t.entries {
            let k = (e.i.0 + e.j.0, e.i.1 + e.j.1);
            let grading_ok = match e.target {
                Some(x) => x == k && basis.labels().contains(&k),
                None => !basis.labels().contains(&k),
            };
            let equal = match (&e.kappa, &e.kappa_sheaf) {
                (Some(Level::Exact(a)), Some(Level::Exact(b))) => a == b,
                (None, None) => true,
                _ => false,
            };
            out.push(WeightCheck {
                triple: t.indices,
                pair_of_gens: (e.i, e.j),
                weight_morse: e.kappa.clone(),
                weight_sheaf: e.kappa_sheaf.clone(),
                grading_ok,
                ok: equal && grading_ok,
            });
        }
    }
    Ok(out)
}

/// Reverse pairs vanish and endomorphisms are spanned by the identity.
pub fn verify_exceptionality(morse: &MorseEngine, coll: &[BundleClass]) -> Result<Vec<ExceptionalCheck>, Error> {
    let mut out = Vec::new();
    for a in 0..coll.len() {
        for b in 0..=a {
            let h = morse.hom_space(&coll[a], &coll[b])?;
            let reasons = h.rejected.iter().map(|r| format!("I=({},{}): {}", r.i.0, r.i.1, r.rejection.map(|x| x.to_string()).unwrap_or_default())).collect();
            let ok = if a == b { h.dim() == 1 && h.generators[0].carrier.whole } else { h.dim() == 0 };
            out.push(ExceptionalCheck { pair: (a, b), dim: h.dim(), reasons, ok });
        }
    }
    Ok(out)
}

/// Runs every check over a collection.
pub fn verify_all(morse: &MorseEngine, coll: &[BundleClass]) -> Result<VerifyReport, Error> {
    let composer = Composer::new(morse).without_trees();
    let tables = composer.compose_table(coll)?;
    let dims = verify_dim_match(morse, coll)?;
    let weights = verify_functoriality(morse, &tables)?;
    let exceptional = verify_exceptionality(morse, coll)?;
    let associativity = composer.verify_associativity(coll, &tables)?;
    let mut warnings = Vec::new();
    for a in coll {
        for b in coll {
            warnings.extend(morse.hom_space(a, b)?.warnings);
        }
    }
    warnings.sort();
    warnings.dedup();
    Ok(VerifyReport { dims, weights, exceptional, associativity, warnings })
}
