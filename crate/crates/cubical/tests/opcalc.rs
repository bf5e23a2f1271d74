use cubical::opcalc::{
    all_maps, critical_edge, critical_faces, ext_conn_face, is_critical_face, tail_form, Flavor, Generator, NormalForm,
    OperatorWord,
};
use cubical::simplex::SimplexOp;

fn nf(src: usize, w: &str) -> NormalForm {
    NormalForm::normalize(&OperatorWord::parse(src, w).unwrap(), Flavor::BOTH).unwrap()
}

#[test]
fn generator_semantics() {
    assert_eq!(Generator::Conn { i: 1, e: 0 }.apply(0b10), 1);
    assert_eq!(Generator::Conn { i: 1, e: 1 }.apply(0b10), 0);
    assert_eq!(Generator::Face { i: 2, e: 1 }.apply(0b1), 0b11);
    assert_eq!(Generator::Degen { i: 1 }.apply(0b10), 0b1);
}

#[test]
fn simple_normal_forms() {
    assert!(nf(1, "d(1,0),s(1)").is_identity());
    let g = nf(3, "g(1,0),g(1,0)");
    assert_eq!(g.conns(), &[(1, 0), (2, 0)]);
    let h = nf(1, "d(1,1),g(1,0)");
    assert_eq!(h.faces(), &[(1, 1)]);
    assert_eq!(h.degens(), &[1]);
    assert_eq!(h.conns(), &[]);
}

#[test]
fn word_round_trip() {
    let w = OperatorWord::parse(3, "d(2,1), g(1,0),s(3)").unwrap();
    assert_eq!(w.to_string(), "d(2,1),g(1,0),s(3)");
    assert!(OperatorWord::parse(1, "x(1)").is_err());
    assert!(OperatorWord::parse(1, "d(1,2)").is_err());
    assert!(OperatorWord::parse(1, "d(1,0),").is_err());
}

#[test]
fn every_rule_against_the_poset() {
    for flavor in Flavor::all() {
        for n in 0..=5 {
            for nf0 in all_maps(n, n.min(4), flavor).into_iter().take(400) {
                for g in Generator::all_from(nf0.target(), flavor) {
                    let mut w = nf0.to_word();
                    w.gens.push(g);
                    let got = NormalForm::normalize(&w, flavor).unwrap();
                    let expect: Vec<u32> = (0..1u32 << n).map(|x| w.eval(x)).collect();
                    assert_eq!(got.truth_table(), expect, "{w}");
                    assert!(NormalForm::from_parts(
                        got.source(),
                        got.faces().to_vec(),
                        got.conns().to_vec(),
                        got.degens().to_vec()
                    )
                    .is_ok());
                }
            }
        }
    }
}

#[test]
fn sections_of_small_epis() {
    let s = NormalForm::degen(1, 1).sections().unwrap();
    assert_eq!(s, vec![NormalForm::face(1, 1, 0), NormalForm::face(1, 1, 1)]);
    let g = NormalForm::conn(2, 1, 0);
    let secs = g.sections().unwrap();
    assert!(!secs.is_empty());
    for m in &secs {
        assert!(g.after(m).is_identity());
    }
}

#[test]
fn tail_forms_and_faces() {
    let w = nf(3, "g(2,0),g(1,0)");
    let t = tail_form(&w).unwrap();
    assert_eq!((t.j, t.q, t.mu), (1, 2, 0));
    assert!(t.head.is_identity());
    let t = tail_form(&NormalForm::conn(4, 3, 1)).unwrap();
    assert_eq!((t.j, t.q, t.mu), (3, 1, 1));
    assert!(ext_conn_face(1, 1, 0, 1, 0, 1).unwrap().is_identity());
    let f = ext_conn_face(1, 2, 0, 2, 1, 1).unwrap();
    assert_eq!(f.faces(), &[(1, 1)]);
    assert_eq!(f.degens(), &[1, 2]);
}

#[test]
fn critical_edges() {
    let ce = critical_edge(3, 2, 0).unwrap();
    assert_eq!(ce.faces(), &[(3, 1), (1, 1)]);
    assert!(is_critical_face(&ce, 3, 2, 0).unwrap());
    assert!(critical_edge(1, 1, 0).unwrap().is_identity());
    let crit = critical_faces(2, 1, 0).unwrap();
    assert_eq!(crit, {
        let mut v = vec![NormalForm::identity(2), NormalForm::face(2, 2, 1)];
        v.sort();
        v
    });
}

#[test]
fn simplicial_identities() {
    for n in 2..5 {
        for j in 0..=n {
            for i in 0..j {
                // d_j d_i = d_i d_{j-1} for i < j
                let lhs = SimplexOp::face(n, j).after(&SimplexOp::face(n - 1, i));
                let rhs = SimplexOp::face(n, i).after(&SimplexOp::face(n - 1, j - 1));
                assert_eq!(lhs, rhs);
            }
        }
    }
    assert!(SimplexOp::degen(1, 0).after(&SimplexOp::face(2, 0)).is_identity());
}

#[test]
fn factorization() {
    let op = SimplexOp::new(4, vec![0, 0, 2, 3, 3]).unwrap();
    let (e, m) = op.epi_mono();
    assert!(e.is_epi() && m.is_mono());
    assert_eq!(m.after(&e), op);
    let (i, rest) = m.split_first_face().unwrap();
    assert_eq!(i, 4);
    assert_eq!(SimplexOp::face(4, 4).after(&rest), m);
    assert_eq!(SimplexOp::epis(3, 1).len(), 3);
    assert_eq!(SimplexOp::monos(1, 3).len(), 6);
}

mod properties {
    use cubical::opcalc::{tail_form, Flavor, Generator, NormalForm, OperatorWord};
    use proptest::prelude::*;

    /// A valid word from `[1]^src`, built by choosing among the generators that act at each step.
    fn word(src: usize, picks: &[usize], flavor: Flavor) -> OperatorWord {
        let mut n = src;
        let mut gens = Vec::new();
        for &k in picks {
            let choices: Vec<Generator> = Generator::all_from(n, flavor)
                .into_iter()
                .filter(|g| !matches!(g, Generator::Face { .. }) || n < 6)
                .collect();
            if choices.is_empty() {
                break;
            }
            let g = choices[k % choices.len()];
            n = match g {
                Generator::Face { .. } => n + 1,
                _ => n - 1,
            };
            gens.push(g);
        }
        OperatorWord::new(src, gens)
    }

    fn flavor() -> impl Strategy<Value = Flavor> {
        prop::sample::select(Flavor::all().to_vec())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn normalizing_preserves_the_map(fl in flavor(), src in 0usize..5, picks in prop::collection::vec(0usize..64, 0..8)) {
            let w = word(src, &picks, fl);
            let nf = NormalForm::normalize(&w, fl).unwrap();
            let table: Vec<u32> = (0..1u32 << src).map(|x| w.eval(x)).collect();
            prop_assert_eq!(nf.truth_table(), table);
            prop_assert_eq!(NormalForm::normalize(&nf.to_word(), fl).unwrap(), nf);
        }

        #[test]
        fn composition_is_concatenation(
            fl in flavor(),
            src in 0usize..4,
            a in prop::collection::vec(0usize..64, 0..5),
            b in prop::collection::vec(0usize..64, 0..5),
            c in prop::collection::vec(0usize..64, 0..5),
        ) {
            let wf = word(src, &a, fl);
            let f = NormalForm::normalize(&wf, fl).unwrap();
            let wg = word(f.target(), &b, fl);
            let g = NormalForm::normalize(&wg, fl).unwrap();
            let h = NormalForm::normalize(&word(g.target(), &c, fl), fl).unwrap();
            let mut joined = wf.gens.clone();
            joined.extend(wg.gens.iter().copied());
            prop_assert_eq!(g.after(&f), NormalForm::normalize(&OperatorWord::new(src, joined), fl).unwrap());
            prop_assert_eq!(h.after(&g).after(&f), h.after(&g.after(&f)));
            prop_assert_eq!(g.compose(&f).unwrap(), g.after(&f));
        }

        #[test]
        fn tail_forms_recompose(fl in flavor(), src in 1usize..6, picks in prop::collection::vec(0usize..64, 1..5)) {
            // connections only
            let mut n = src;
            let mut gens = Vec::new();
            for k in picks {
                if n < 2 {
                    break;
                }
                let signs = fl.signs();
                if signs.is_empty() {
                    break;
                }
                gens.push(Generator::Conn { i: 1 + k % (n - 1), e: signs[k % signs.len()] });
                n -= 1;
            }
            let nf = NormalForm::normalize(&OperatorWord::new(src, gens), fl).unwrap();
            if !nf.conns().is_empty() {
                let t = tail_form(&nf).unwrap();
                prop_assert_eq!(t.to_normal_form(), nf);
            }
        }
    }
}
