mod common;

use common::*;
use toric_morse::geometry::Level;
use toric_morse::Preset;

#[test]
fn bl2_hom_table() {
    let bad = check_hom_table(Preset::Bl2);
    assert!(bad.is_empty(), "{bad:#?}");
    assert_eq!(dim_rows(Preset::Bl2), vec![vec![1, 1, 3, 6], vec![0, 2, 5], vec![2, 5], vec![3]]);
}

#[test]
fn bl3_hom_table() {
    let bad = check_hom_table(Preset::Bl3);
    assert!(bad.is_empty(), "{bad:#?}");
    assert_eq!(dim_rows(Preset::Bl3), vec![vec![1, 1, 1, 3, 6], vec![0, 0, 2, 5], vec![0, 2, 5], vec![2, 5], vec![3]]);
}

#[test]
fn cp2_hom_table() {
    assert_eq!(dim_rows(Preset::Cp2), vec![vec![3, 6], vec![3]]);
}

#[test]
fn bl2_rejection_reasons() {
    let bad = check_rejections(Preset::Bl2);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn bl3_rejection_reasons() {
    let bad = check_rejections(Preset::Bl3);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn bl2_compositions() {
    let bad = check_compositions(Preset::Bl2);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn bl3_compositions() {
    let bad = check_compositions(Preset::Bl3);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn log2_structure_constant_matches_grid_oracle() {
    let (m, coll) = engine(Preset::Bl2);
    let c = toric_morse::Composer::new(&m);
    let e = c.compose([&coll[0], &coll[3], &coll[4]], (1, 0), (0, 1)).unwrap();
    assert_eq!(e.target, Some((1, 1)));
    assert_eq!(e.weight.as_ref().unwrap().as_rational(), Some(toric_morse::symbolic::q(1, 2)));
    let oracle = log2_oracle(20.0, 801);
    assert!((oracle - std::f64::consts::LN_2).abs() < 1e-9, "oracle {oracle}");
    match e.kappa.unwrap() {
        Level::Exact(k) => assert!((k.to_f64() - oracle).abs() < 1e-9),
        Level::Approx(_) => panic!("kappa must be exact"),
    }
}

#[test]
fn zero_kappa_means_unit_weight() {
    for p in [Preset::Bl2, Preset::Bl3] {
        let (m, coll) = engine(p);
        for t in toric_morse::Composer::new(&m).without_trees().compose_table(&coll).unwrap() {
            for e in &t.entries {
                let k = e.kappa.as_ref().unwrap();
                let w = e.weight.as_ref().unwrap().as_rational().unwrap();
                assert!(k.to_f64() >= 0.0);
                if k.exact().is_some_and(|k| k.is_zero()) {
                    assert_eq!(w, toric_morse::symbolic::q(1, 1));
                    assert!(e.meets);
                } else {
                    assert_eq!(w, toric_morse::symbolic::q(1, 2));
                    assert!(!e.meets);
                }
            }
        }
    }
}

#[test]
fn generator_sets_do_not_depend_on_kahler_coefficients() {
    use toric_morse::symbolic::q;
    use toric_morse::{Geometry, MorseEngine, PolySurface};
    let shape = |m: &MorseEngine, coll: &[toric_morse::BundleClass]| {
        let mut out = Vec::new();
        for a in coll {
            for b in coll {
                let h = m.hom_space(a, b).unwrap();
                let gens: Vec<_> = h.generators.iter().map(|g| (g.i, g.carrier.edges.clone(), g.carrier.vertices.len(), g.carrier.points.len(), g.degree)).collect();
                out.push(gens);
            }
        }
        out
    };
    for (p, coeffs) in [(Preset::Bl2, vec![q(2, 1), q(1, 2), q(3, 2)]), (Preset::Bl3, vec![q(1, 3), q(2, 1), q(3, 2), q(5, 4)])] {
        let (base, coll) = engine(p);
        let other = MorseEngine::new(Geometry::new(PolySurface::with_coeffs(p, &coeffs).unwrap()));
        assert_eq!(shape(&base, &coll), shape(&other, &coll), "{p:?}");
    }
}
