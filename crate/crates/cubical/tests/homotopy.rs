use cubical::complex::catalog;
use cubical::complex::{Map, Regime};
use cubical::functors;
use cubical::homotopy::{self, FamilyOptions, FillerOracle, FreeFillingComplex, LiftProblem, Verdict};
use cubical::opcalc::Flavor;

fn all_generators(fl: Flavor, cap: usize) -> Vec<homotopy::Generator> {
    homotopy::generators(fl, &FamilyOptions { dim_cap: cap, saturated: true, n_trivial: Some(0) }).unwrap()
}

#[test]
fn identities_lift_against_everything() {
    let fl = Flavor::NONE;
    let l = catalog::l_complex(fl);
    let id = Map::identity(&l);
    for g in all_generators(fl, 2) {
        assert!(homotopy::has_rlp(&id, &g.map).holds(), "{}", g.label);
    }
}

#[test]
fn the_point_is_comical() {
    for fl in Flavor::all() {
        let pt = catalog::point(fl, Regime::Full);
        let p = homotopy::terminal_map(&pt);
        for g in all_generators(fl, 3) {
            assert!(homotopy::has_rlp(&p, &g.map).holds(), "{} {fl}", g.label);
        }
        let opts = FamilyOptions { dim_cap: 3, saturated: true, n_trivial: Some(0) };
        assert!(homotopy::is_comical_set(&pt, &opts).unwrap().holds());
    }
}

#[test]
fn interval_over_point_fills_one_boxes() {
    let fl = Flavor::NONE;
    let p = homotopy::terminal_map(&catalog::standard_cube(1, fl));
    for e in 0..2 {
        let g = catalog::comical_open_box_inclusion(1, 1, e, fl).unwrap();
        assert!(homotopy::has_rlp(&p, &g).holds());
    }
}

#[test]
fn failing_squares_are_genuine() {
    let fl = Flavor::NONE;
    // an unmarked edge cannot be marked
    let p = homotopy::terminal_map(&catalog::standard_cube(1, fl));
    let g = catalog::marker(1, fl).unwrap();
    match homotopy::has_rlp(&p, &g) {
        Verdict::Holds => panic!("the interval is not 0-trivial"),
        Verdict::Fails(problem) => {
            assert!(problem.solve().is_none());
            assert!(commutes(&problem));
        }
    }
    // the boundary of the square has no square to fill it
    let b = catalog::boundary(2, fl);
    let v = homotopy::is_comical_set(&b, &FamilyOptions::comical(2)).unwrap();
    assert!(!v.holds());
}

fn commutes(p: &LiftProblem) -> bool {
    p.g.then(&p.v).unwrap().assign == p.u.then(&p.p).unwrap().assign
}

#[test]
fn lifts_are_witnessed() {
    let fl = Flavor::NEG;
    let x = catalog::standard_cube(2, fl);
    let p = homotopy::terminal_map(&x);
    let oracle = homotopy::brute_lift_oracle(&p);
    for g in all_generators(fl, 2) {
        for (u, v) in homotopy::squares(&g.map, &p).into_iter().take(20) {
            let problem = LiftProblem::new(g.map.clone(), u, v, p.clone()).unwrap();
            if let Some(h) = oracle.lift(&problem) {
                assert!(problem.is_solution(&h));
            }
        }
    }
}

#[test]
fn verdicts_are_deterministic() {
    let fl = Flavor::NONE;
    let b = catalog::boundary(2, fl);
    let a = homotopy::is_comical_set(&b, &FamilyOptions::comical(2)).unwrap();
    let c = homotopy::is_comical_set(&b, &FamilyOptions::comical(2)).unwrap();
    let (la, pa) = a.failure.unwrap();
    let (lc, pc) = c.failure.unwrap();
    assert_eq!(la, lc);
    assert_eq!(pa.u.assign, pc.u.assign);
    assert_eq!(pa.v.assign, pc.v.assign);
}

#[test]
fn free_filling_an_open_box() {
    let fl = Flavor::NONE;
    let g = homotopy::Generator {
        family: homotopy::Family::OpenBox,
        dim: 2,
        label: "box".into(),
        map: catalog::comical_open_box_inclusion(2, 1, 0, fl).unwrap(),
    };
    // the box itself, mapped identically
    let x = g.map.domain.clone();
    let mut h = FreeFillingComplex::over_point(&x);
    let u = Map::identity(&x);
    let v = homotopy::terminal_map(&g.map.codomain);
    let before = h.complex.counts();
    let filler = h.free_fill(&g, &u, &v).unwrap();
    assert!(h.complex.is_valid() && h.projection.is_valid() && h.inclusion.is_valid());
    let after = h.complex.counts();
    assert_eq!(after[2], before.get(2).copied().unwrap_or(0) + 1);
    assert_eq!(after[1], before[1] + 1);
    assert!(h.complex.is_marked(&filler));
    // the same problem again gets a second, distinct filler
    let u2 = u.then(&h.log[0].step).unwrap();
    let second = h.free_fill(&g, &u2, &v).unwrap();
    assert_ne!(second, h.log[1].step.apply(&filler));
    assert!(h.complex.is_valid() && h.projection.is_valid());
    assert_eq!(h.complex.counts()[2], 2);
}

#[test]
fn free_filling_a_marking_extension() {
    let fl = Flavor::NONE;
    let g = homotopy::Generator {
        family: homotopy::Family::MarkingExtension,
        dim: 2,
        label: "ext".into(),
        map: catalog::comical_marking_extension(2, 1, 0, fl).unwrap(),
    };
    let x = g.map.domain.clone();
    let mut h = FreeFillingComplex::over_point(&x);
    let u = Map::identity(&x);
    let v = homotopy::terminal_map(&g.map.codomain);
    let before = (h.complex.counts(), h.complex.marked_counts().iter().sum::<usize>());
    h.free_fill(&g, &u, &v).unwrap();
    assert_eq!(h.complex.counts(), before.0);
    assert_eq!(h.complex.marked_counts().iter().sum::<usize>(), before.1 + 1);
}

#[test]
fn fibrant_approximation_grows_and_validates() {
    let fl = Flavor::NONE;
    let x = catalog::standard_cube(1, fl);
    let opts = FamilyOptions::comical(2);
    let (h, report) = homotopy::bounded_fibrant_approx(&x, &opts, 1).unwrap();
    assert!(report.fillers > 0);
    assert!(h.complex.len() > x.len());
    assert!(h.complex.is_valid() && h.projection.is_valid() && h.inclusion.is_valid());
    assert!(h.inclusion.is_mono());
    // every adjoined step is a valid inclusion
    for rec in &h.log {
        assert!(rec.step.is_valid() && rec.step.is_mono());
    }
    // the point needs nothing
    let (hp, rp) = homotopy::bounded_fibrant_approx(&catalog::point(fl, Regime::Full), &opts, 2).unwrap();
    assert_eq!(rp.fillers, 0);
    assert!(rp.saturated);
    assert_eq!(hp.complex.len(), 1);
}

#[test]
fn saturated_approximation_is_comical_below_the_cap() {
    let fl = Flavor::NONE;
    // a single marked edge saturates quickly
    let x = catalog::marked_cube(1, fl).unwrap();
    let opts = FamilyOptions::comical(1);
    let (h, report) = homotopy::bounded_fibrant_approx(&x, &opts, 6).unwrap();
    assert!(report.saturated);
    assert!(homotopy::is_comical_set(&h.complex, &opts).unwrap().holds());
}

#[test]
fn rlp_transports_along_forgetting() {
    let (a, b) = (Flavor::NONE, Flavor::NEG);
    let e = catalog::standard_cube(1, b);
    let p = homotopy::terminal_map(&e);
    let cap = 3;
    let fe = functors::forget_connections(&e, a, cap).unwrap();
    let fpt = functors::forget_connections(&p.codomain, a, cap).unwrap();
    let ip = functors::forget_map(&p, &fe, &fpt).unwrap();
    for n in 1..=2 {
        for i in 1..=n {
            for s in 0..2 {
                for g in [catalog::comical_open_box_inclusion(n, i, s, a).ok(), catalog::comical_marking_extension(n, i, s, a).ok()]
                    .into_iter()
                    .flatten()
                {
                    let dom = functors::free_connections(&g.domain, b).unwrap();
                    let cod = functors::free_connections(&g.codomain, b).unwrap();
                    let ig = functors::free_connections_map(&g, &dom, &cod);
                    assert_eq!(homotopy::has_rlp(&p, &ig).holds(), homotopy::has_rlp(&ip, &g).holds(), "{n} {i} {s}");
                }
            }
        }
    }
}
