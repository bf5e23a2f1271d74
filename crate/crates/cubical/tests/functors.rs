use std::sync::Arc;

use cubical::complex::catalog::{self, CatalogItem, Cube};
use cubical::complex::random::{random_complex, RandomSpec};
use cubical::complex::search::{count_maps, maps_isomorphic};
use cubical::complex::{is_isomorphic, pushout, tensor, MCMap, MCSet, Map, Regime};
use cubical::functors::{self, marking, triangulate as tri};
use cubical::opcalc::Flavor;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn forgetting_connections_of_the_interval() {
    let x = catalog::standard_cube(1, Flavor::NEG);
    let fg = functors::forget_connections(&x, Flavor::NONE, 3).unwrap();
    assert!(fg.object.is_valid(), "{:?}", fg.object.validate());
    assert_eq!(fg.object.counts(), vec![2, 1, 1, 1]);
    assert_eq!(fg.object.marked_counts(), vec![0, 0, 1, 1]);
    // i* of the point
    let p = catalog::point(Flavor::BOTH, Regime::Full);
    let fp = functors::forget_connections(&p, Flavor::NONE, 3).unwrap();
    assert_eq!(fp.object.counts(), vec![1]);
}

#[test]
fn marked_cube_keeps_its_top_marked() {
    for n in 1..=2 {
        let x = catalog::marked_cube(n, Flavor::BOTH).unwrap();
        let fg = functors::forget_connections(&x, Flavor::NONE, n + 1).unwrap();
        let cube = Cube::standard(n, Flavor::BOTH);
        let top = fg.cell_of(cube.top(), &cubical::opcalc::NormalForm::identity(n)).unwrap();
        assert!(fg.object.cell(top).marked);
    }
}

#[test]
fn free_connections_on_representables() {
    for (a, b) in Flavor::inclusions() {
        for n in 0..=3 {
            let x = functors::free_connections(&catalog::standard_cube(n, a), b).unwrap();
            assert!(x.is_valid());
            assert!(is_isomorphic(&x, &catalog::standard_cube(n, b)));
        }
    }
    assert!(functors::free_connections(&catalog::standard_cube(1, Flavor::BOTH), Flavor::NONE).is_err());
}

fn transport(f: &MCMap, b: Flavor) -> MCMap {
    let dom = functors::free_connections(&f.domain, b).unwrap();
    let cod = functors::free_connections(&f.codomain, b).unwrap();
    functors::free_connections_map(f, &dom, &cod)
}

#[test]
fn generator_transport() {
    for (a, b) in Flavor::inclusions() {
        if a == b {
            continue;
        }
        for n in 1..=3 {
            for i in 1..=n {
                for e in 0..2 {
                    for name in ["boundary-inclusion", "comical-box", "marking-extension", "marker"] {
                        let (Ok(CatalogItem::Map(fa)), Ok(CatalogItem::Map(fb))) =
                            (catalog::family(name, n, 0, (i, e), a), catalog::family(name, n, 0, (i, e), b))
                        else {
                            continue;
                        };
                        let t = transport(&fa, b);
                        assert!(t.is_valid());
                        assert!(maps_isomorphic(&t, &fb), "{name} {n} {i} {e} {a}->{b}");
                    }
                }
            }
        }
        let t = transport(&catalog::rezk_elementary(a), b);
        assert!(maps_isomorphic(&t, &catalog::rezk_elementary(b)));
    }
}

fn corpus(fl: Flavor) -> Vec<Arc<MCSet>> {
    let mut out = vec![
        catalog::point(fl, Regime::Full),
        catalog::standard_cube(1, fl),
        catalog::marked_cube(1, fl).unwrap(),
        catalog::standard_cube(2, fl),
        catalog::boundary(2, fl),
    ];
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..3 {
        out.push(random_complex(&mut rng, &RandomSpec::new(fl, 2, 4)));
    }
    out
}

#[test]
fn triangle_identities() {
    for (a, b) in Flavor::inclusions() {
        for x in corpus(a) {
            let cap = x.max_dim().unwrap_or(0) + 1;
            // ε_{i_!X} ∘ i_!η_X = id
            let (fg, eta) = functors::unit_map(&x, b, cap).unwrap();
            assert!(eta.is_valid() && eta.is_mono() && eta.is_regular());
            let ix = functors::free_connections(&x, b).unwrap();
            let (fg2, eps) = functors::counit_map(&ix, a, cap).unwrap();
            assert_eq!(fg.cells, fg2.cells);
            let ieta = functors::free_connections_map(&eta, &ix, &eps.domain);
            let composite = ieta.then(&eps).unwrap();
            assert_eq!(composite.assign, Map::identity(&ix).assign, "{a}->{b}");
        }
        for y in corpus(b) {
            let cap = y.max_dim().unwrap_or(0) + 1;
            // i*ε_Y ∘ η_{i*Y} = id
            let (fy, eps) = functors::counit_map(&y, a, cap).unwrap();
            let (f2, eta) = functors::unit_map(&fy.object, b, cap).unwrap();
            assert!(eps.is_valid() && eta.is_valid());
            let ieps = functors::forget_map(&Map { domain: f2.source.clone(), ..eps.clone() }, &f2, &fy).unwrap();
            let composite = eta.then(&ieps).unwrap();
            assert_eq!(composite.assign, Map::identity(&fy.object).assign, "{a}->{b}");
        }
    }
}

#[test]
fn left_adjunction_hom_sets() {
    for (a, b) in Flavor::inclusions() {
        let xs = corpus(a);
        let ys = corpus(b);
        for x in &xs {
            for y in ys.iter().take(5) {
                let ix = functors::free_connections(x, b).unwrap();
                let fy = functors::forget_connections(y, a, x.max_dim().unwrap_or(0)).unwrap();
                assert_eq!(count_maps(&ix, y), count_maps(x, &fy.object), "{a}->{b}");
            }
        }
    }
}

#[test]
fn right_adjunction_hom_sets() {
    for (a, b) in [(Flavor::NONE, Flavor::NEG), (Flavor::NEG, Flavor::BOTH), (Flavor::NONE, Flavor::BOTH)] {
        let xs = corpus(a);
        for y in corpus(b).iter().take(5) {
            let top = y.max_dim().unwrap_or(0);
            let cap = 3;
            let fy = functors::forget_connections(y, a, cap).unwrap();
            for x in xs.iter().take(5) {
                let cf = functors::cofree(x, b, top, cap).unwrap();
                assert!(cf.object().is_valid(), "{:?}", cf.object().validate());
                assert_eq!(count_maps(&fy.object, x), count_maps(y, cf.object()), "{a}->{b}");
            }
        }
    }
    // vertices of i_*X are those of X
    let x = catalog::l_complex(Flavor::NONE);
    let cf = functors::cofree(&x, Flavor::BOTH, 1, 2).unwrap();
    assert_eq!(cf.object().counts()[0], 6);
}

#[test]
fn cofree_of_a_point_is_a_point() {
    let p = catalog::point(Flavor::NONE, Regime::Full);
    let cf = functors::cofree(&p, Flavor::BOTH, 2, 2).unwrap();
    assert_eq!(cf.object().counts(), vec![1]);
}

#[test]
fn unit_on_marked_cube_is_a_pushout() {
    for (a, b) in Flavor::inclusions() {
        if a == b {
            continue;
        }
        for n in 1..=2 {
            let cap = n + 2;
            let (_, eta) = functors::unit_map(&catalog::standard_cube(n, a), b, cap).unwrap();
            let (_, eta_m) = functors::unit_map(&catalog::marked_cube(n, a).unwrap(), b, cap).unwrap();
            let po = pushout(&eta, &catalog::marker(n, a).unwrap()).unwrap();
            let induced = po.in_b.clone();
            assert!(maps_isomorphic(&induced, &eta_m), "{n} {a}->{b}");
        }
    }
}

#[test]
fn triangulated_cubes() {
    for n in 0..=3 {
        let c = catalog::standard_cube(n, Flavor::NONE);
        let t = functors::triangulate(&c).unwrap();
        assert!(t.object.is_valid(), "{:?}", t.object.validate());
        let counts = t.object.counts();
        assert_eq!(counts[n], factorial(n));
        if n >= 1 {
            assert_eq!(t.object.marked_counts()[n], factorial(n) - 1);
            let iota = (1..=n).collect::<Vec<_>>();
            assert!(!t.object.cell(t.cell_of(Cube::standard(n, Flavor::NONE).top(), &iota).unwrap()).marked);
            let m = functors::triangulate(&catalog::marked_cube(n, Flavor::NONE).unwrap()).unwrap();
            assert_eq!(m.object.marked_counts()[n], factorial(n));
        }
    }
    let t2 = functors::triangulate(&catalog::standard_cube(2, Flavor::NONE)).unwrap();
    assert_eq!(t2.object.counts(), vec![4, 5, 2]);
    assert_eq!(t2.object.marked_counts(), vec![0, 0, 1]);
}

#[test]
fn triangulation_ignores_connections() {
    for (a, b) in Flavor::inclusions() {
        for n in 0..=3 {
            let ta = functors::triangulate(&catalog::standard_cube(n, a)).unwrap();
            let tb = functors::triangulate(&functors::free_connections(&catalog::standard_cube(n, a), b).unwrap()).unwrap();
            assert!(is_isomorphic(&ta.object, &tb.object));
        }
    }
}

#[test]
fn triangulation_is_functorial() {
    let fl = Flavor::BOTH;
    let reps = tri::TriangulatedCubes::new(fl, Regime::Full, 2).unwrap();
    for phi in cubical::opcalc::all_maps(2, 1, fl) {
        for psi in cubical::opcalc::all_maps(1, 2, fl) {
            let lhs = reps.map(&psi.after(&phi));
            let rhs = reps.map(&phi).then(&reps.map(&psi)).unwrap();
            assert_eq!(lhs.assign, rhs.assign, "{phi} then {psi}");
        }
    }
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..4 {
        let x = random_complex(&mut rng, &RandomSpec::new(fl, 2, 5));
        let t = functors::triangulate(&x).unwrap();
        assert!(t.object.is_valid(), "{:?}", t.object.validate());
    }
}

#[test]
fn edge_marked_triangulation() {
    let x = catalog::k_interval(Flavor::NONE);
    assert_eq!(x.regime, Regime::Edge);
    let t = functors::triangulate(&x).unwrap();
    assert!(t.object.is_valid());
    assert_eq!(t.object.regime, Regime::Edge);
    let marked_edges = (0..x.len()).filter(|&c| x.dim(c) == 1 && x.cell(c).marked).count();
    assert_eq!(t.object.marked_counts()[1], marked_edges);
}

#[test]
fn cubification_adjunction() {
    let fl = Flavor::NONE;
    let s = functors::triangulate(&catalog::standard_cube(1, fl)).unwrap().object;
    let point = functors::triangulate(&catalog::point(fl, Regime::Full)).unwrap().object;
    let up = functors::cubify(&point, fl, 2).unwrap();
    assert_eq!(up.object().counts(), vec![1]);
    let us = functors::cubify(&s, fl, 2).unwrap();
    assert_eq!(us.object().counts()[0], 2);
    for x in [catalog::standard_cube(1, fl), catalog::boundary(2, fl), catalog::standard_cube(2, fl)] {
        let tx = functors::triangulate(&x).unwrap().object;
        assert_eq!(count_maps(&tx, &s), count_maps(&x, us.object()));
    }
    let sq = functors::triangulate(&catalog::standard_cube(2, fl)).unwrap().object;
    let usq = functors::cubify(&sq, fl, 2).unwrap();
    for x in [catalog::standard_cube(1, fl), catalog::marked_cube(1, fl).unwrap(), catalog::standard_cube(2, fl)] {
        let tx = functors::triangulate(&x).unwrap().object;
        assert_eq!(count_maps(&tx, &sq), count_maps(&x, usq.object()));
    }
}

#[test]
fn trivialization() {
    let fl = Flavor::NONE;
    let sq = catalog::standard_cube(2, fl);
    let t = functors::trivialize(&sq, 0);
    assert_eq!(t.marked_counts(), vec![0, 4, 1]);
    assert_eq!(functors::trivialize(&t, 0).marked_counts(), t.marked_counts());
    let l = catalog::l_complex(fl);
    let tl = functors::trivialize(&l, 0);
    assert_eq!(tl.marked_counts(), vec![0, 7, 2]);
    assert!(is_isomorphic(&tl, &catalog::rezk_elementary(fl).codomain));
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..5 {
        let x = random_complex(&mut rng, &RandomSpec::new(fl, 2, 6));
        for n in 0..=1 {
            let a = functors::trivialize(&x, n);
            let b = functors::trivialize_by_pushouts(&x, n).unwrap();
            assert!(is_isomorphic(&a, &b));
        }
    }
}

#[test]
fn marking_functors() {
    let fl = Flavor::NONE;
    let x = catalog::l_complex(fl);
    let under = marking::forget_markings(&x).unwrap();
    assert_eq!(under.regime, Regime::Edge);
    assert_eq!(under.marked_counts(), vec![0, 4, 0]);
    assert_eq!(marking::forget_markings(&marking::flat(&under).unwrap()).unwrap().marked_counts(), under.marked_counts());
    assert_eq!(marking::forget_markings(&marking::sharp(&under).unwrap()).unwrap().marked_counts(), under.marked_counts());
    assert_eq!(marking::sharp(&under).unwrap().marked_counts(), vec![0, 4, 2]);
    assert_eq!(marking::flat(&under).unwrap().marked_counts(), vec![0, 4, 0]);
    // core of the marked interval
    let m1 = catalog::marked_cube(1, fl).unwrap();
    let (c, inc) = marking::core(&m1).unwrap();
    assert!(inc.is_valid());
    assert_eq!(c.counts(), vec![2, 1]);
    assert_eq!(c.marked_counts(), vec![0, 1]);
    // edge-level core keeps only marked edges
    let (ce, _) = marking::core(&under).unwrap();
    assert_eq!(ce.counts(), vec![6, 4]);
    assert_eq!(ce.regime, Regime::Unmarked);
    // flat and sharp commute with tensor
    let i1 = marking::forget_markings(&marking::forget_markings(&catalog::standard_cube(1, fl)).unwrap()).unwrap();
    let sq = tensor(&i1, &i1).unwrap().object;
    for f in [marking::flat, marking::sharp] {
        let lhs = f(&sq).unwrap();
        let rhs = tensor(&f(&i1).unwrap(), &f(&i1).unwrap()).unwrap().object;
        assert!(is_isomorphic(&lhs, &rhs));
    }
}

#[test]
fn forgetting_is_monoidal() {
    let (a, b) = (Flavor::NONE, Flavor::NEG);
    let cap = 3;
    for (m, n) in [(1, 1), (1, 2), (0, 2)] {
        let x = catalog::standard_cube(m, b);
        let y = catalog::standard_cube(n, b);
        let xy = tensor(&x, &y).unwrap().object;
        let lhs = functors::forget_connections(&xy, a, cap).unwrap().object;
        let fx = functors::forget_connections(&x, a, cap).unwrap().object;
        let fy = functors::forget_connections(&y, a, cap).unwrap().object;
        let rhs = tensor(&fx, &fy).unwrap().object;
        let (rhs_cap, _) = rhs.skeleton(Some(cap));
        assert!(is_isomorphic(&lhs, &rhs_cap), "{m} {n}");
        // and the free side
        let xa = catalog::standard_cube(m, a);
        let ya = catalog::standard_cube(n, a);
        let l = functors::free_connections(&tensor(&xa, &ya).unwrap().object, b).unwrap();
        let r = tensor(&functors::free_connections(&xa, b).unwrap(), &functors::free_connections(&ya, b).unwrap()).unwrap().object;
        assert!(is_isomorphic(&l, &r));
    }
}

mod properties {
    use cubical::complex::random::{random_complex, RandomSpec};
    use cubical::functors;
    use cubical::opcalc::Flavor;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn inclusion() -> impl Strategy<Value = (Flavor, Flavor)> {
        prop::sample::select(Flavor::inclusions())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn units_are_monos(inc in inclusion(), seed in any::<u64>()) {
            let (a, b) = inc;
            let x = random_complex(&mut StdRng::seed_from_u64(seed), &RandomSpec::new(a, 2, 5));
            let (fx, eta) = functors::unit_map(&x, b, 3).unwrap();
            prop_assert!(fx.object.validate().is_empty());
            prop_assert!(eta.validate().is_empty());
            prop_assert!(eta.is_mono());
        }

        #[test]
        fn triangulations_are_valid(fl in prop::sample::select(Flavor::all().to_vec()), seed in any::<u64>()) {
            let x = random_complex(&mut StdRng::seed_from_u64(seed), &RandomSpec::new(fl, 2, 5));
            let t = functors::triangulate(&x).unwrap();
            prop_assert!(t.object.validate().is_empty(), "{:?}", t.object.validate());
            // triangulation does not raise dimension
            prop_assert!(t.object.counts().len() <= x.counts().len());
        }
    }
}
