use std::collections::BTreeSet;

use proptest::prelude::*;

use toroidal_core::curves::{AbelianProduct, Curve};
use toroidal_core::fpgroup::{coset_enumeration, parse_word, Enumeration, ParabolicSubgroup, Presentation, SubgroupSpec, Word};
use toroidal_core::picard::{derive_invariant_form, evaluate_word, is_unipotent, is_unipotent_by_char_poly};
use toroidal_core::quotient::{SearchElement, SearchScalar};
use toroidal_core::smith::abelian_invariants;
use toroidal_core::{Lattice, QuadraticField};

mod common;
use common::{brute_index, minors_oracle, ring_norm};

fn field() -> impl Strategy<Value = QuadraticField> {
    prop_oneof![Just(QuadraticField::Eisenstein), Just(QuadraticField::Gaussian)]
}

/// Freely reduced by construction in `Word::from_letters`.
fn word(generators: usize, max_len: usize) -> impl Strategy<Value = Word> {
    let g = generators as i32;
    prop::collection::vec((1..=g, any::<bool>()), 0..=max_len)
        .prop_map(|v| Word::from_letters(v.into_iter().map(|(l, inv)| if inv { -l } else { l })))
}

fn matrix() -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| (prop::collection::vec(prop::collection::vec(-8i64..=8, c), r), Just(c)))
}

// Graph pairs `w = αz + a`, `w = βz + b` on the square of the integers, with
// points found by scanning the grid `(1/(N(α − β)m))O` that must contain
// every solution `z` when the offsets lie in `(1/m)O`.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn intersection_points_match_grid_scan(
        f in field(),
        alpha in (-1i64..=1, -1i64..=1),
        beta in (-1i64..=1, -1i64..=1),
        m in 1i64..=3,
        offs in (0i64..3, 0i64..3, 0i64..3, 0i64..3),
    ) {
        prop_assume!(alpha != beta);
        let s = AbelianProduct::square(&Lattice::<SearchScalar>::integers(f));
        let a = SearchElement::from_fracs(f, (offs.0, m), (offs.1, m));
        let b = SearchElement::from_fracs(f, (offs.2, m), (offs.3, m));
        let (al, be) = (SearchElement::from_ints(f, alpha.0, alpha.1), SearchElement::from_ints(f, beta.0, beta.1));
        let c1 = Curve::over_z(al.clone(), a.clone());
        let c2 = Curve::over_z(be.clone(), b.clone());

        let delta = (alpha.0 - beta.0, alpha.1 - beta.1);
        let n = ring_norm(f, delta);
        let rhs = &b - &a;
        let d = &al - &be;
        let step = n * m;
        let mut expected = BTreeSet::new();
        for i in 0..step {
            for j in 0..step {
                let z = SearchElement::from_fracs(f, (i, step), (j, step));
                if (&(&d * &z) - &rhs).is_integral() {
                    expected.insert(s.point(&(&(&al * &z) + &a), &z).unwrap());
                }
            }
        }
        prop_assert_eq!(expected.len() as i64, n);
        prop_assert_eq!(s.intersection_number(&c1, &c2).unwrap() as i64, n);
        let got: BTreeSet<_> = s.intersection_points(&c1, &c2).unwrap().into_iter().collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn index_of_principal_ideal_is_norm(f in field(), a in -6i64..=6, b in -6i64..=6) {
        let n = ring_norm(f, (a, b));
        prop_assume!(n != 0);
        let o = Lattice::<SearchScalar>::integers(f);
        let sub = o.scaled(&SearchElement::from_ints(f, a, b)).unwrap();
        prop_assert_eq!(o.index_of(&sub).unwrap(), n as u64);
        prop_assert_eq!(o.coset_representatives(&sub).unwrap().len(), n as usize);
        if n <= 49 {
            prop_assert_eq!(brute_index(f, (a, b)), n as usize);
        }
    }

    #[test]
    fn reduction_is_idempotent(f in field(), x in (-20i64..20, 1i64..7, -20i64..20, 1i64..7)) {
        let o = Lattice::<SearchScalar>::integers(f);
        let v = SearchElement::from_fracs(f, (x.0, x.1), (x.2, x.3));
        let r = o.reduce(&v).unwrap();
        prop_assert!(o.contains(&(&v - &r)));
        prop_assert_eq!(o.reduce(&r).unwrap(), r);
    }

    #[test]
    fn words_preserve_the_invariant_form(w in word(3, 12)) {
        let form = derive_invariant_form().unwrap().form;
        let m = evaluate_word(&w).unwrap();
        prop_assert!(form.preserved_by(&m));
        prop_assert!(evaluate_word(&w.concat(&w.inverse())).unwrap().is_identity());
    }

    #[test]
    fn unipotency_survives_conjugation(s in 0usize..4, pick in any::<prop::sample::Index>(), g in word(3, 6)) {
        let sub = ParabolicSubgroup::ALL[s];
        let words = sub.generator_words();
        let h = Presentation::delta().parse_word(words[pick.index(words.len())]).unwrap();
        let m = evaluate_word(&h).unwrap();
        let conj = evaluate_word(&h.conjugate(&g)).unwrap();
        let before = is_unipotent(&m).map(|u| u.omega_power);
        prop_assert!(before.is_some());
        prop_assert_eq!(is_unipotent(&conj).map(|u| u.omega_power), before);
    }

    #[test]
    fn unipotency_criteria_agree(w in word(3, 8)) {
        let m = evaluate_word(&w).unwrap();
        prop_assert_eq!(is_unipotent(&m).map(|u| u.omega_power), is_unipotent_by_char_poly(&m));
    }

    #[test]
    fn smith_form_matches_minors(mc in matrix()) {
        let (m, cols) = mc;
        let inv = abelian_invariants(&m, cols).unwrap();
        prop_assert_eq!((inv.rank, inv.torsion), minors_oracle(&m, cols));
    }

    #[test]
    fn word_format_round_trips(w in word(3, 16), long_names in any::<bool>()) {
        let names: Vec<&str> = if long_names { vec!["s1", "s2", "s3"] } else { vec!["P", "Q", "R"] };
        let text = w.format(&names);
        prop_assert_eq!(parse_word(&text, &names).unwrap(), w);
    }
}

fn presentation() -> impl Strategy<Value = Presentation> {
    (2usize..=3).prop_flat_map(|n| {
        prop::collection::vec(word(n, 6), 1..=3).prop_map(move |rels| {
            let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
            Presentation::new(names, rels).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tietze_moves_keep_abelian_invariants(p in presentation(), g in word(3, 4), w in word(3, 4), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let n = p.generators().len();
        let clip = |x: &Word| Word::from_letters(x.letters().iter().copied().filter(|l| l.unsigned_abs() as usize <= n));
        let (g, w) = (clip(&g), clip(&w));
        let before = p.abelian_invariants().unwrap();
        let rels = p.relators().to_vec();

        // Add a consequence of the relators.
        let (ri, rj) = (&rels[i.index(rels.len())], &rels[j.index(rels.len())]);
        let mut more = rels.clone();
        more.push(ri.conjugate(&g).concat(&rj.inverse()));
        let q = Presentation::new(p.generators().to_vec(), more).unwrap();
        prop_assert_eq!(q.abelian_invariants().unwrap(), before.clone());

        // Add a generator t together with the relator t⁻¹w.
        let mut names = p.generators().to_vec();
        names.push("t".into());
        let mut with_t = rels.clone();
        with_t.push(Word::generator(n).inverse().concat(&w));
        let q = Presentation::new(names, with_t).unwrap();
        prop_assert_eq!(q.abelian_invariants().unwrap(), before);
    }

    #[test]
    fn coset_enumeration_is_stable_under_larger_bounds(gens in prop::collection::vec(word(2, 6), 1..=2)) {
        // A5 = ⟨a, b | a², b³, (ab)⁵⟩.
        let a5 = Presentation::parse(&["a", "b"], &["a^2", "b^3", "(ab)^5"]).unwrap();
        let h = SubgroupSpec { name: "random".into(), generators: gens.clone() };
        let small = coset_enumeration(&a5, &h, 400).unwrap();
        let large = coset_enumeration(&a5, &h, 20_000).unwrap();
        let Enumeration::Complete(table) = &large else {
            return Err(TestCaseError::fail("A5 enumeration did not finish"));
        };
        prop_assert_eq!(60 % table.index(), 0);
        prop_assert!(gens.iter().all(|g| table.contains(g)));
        if let Some(i) = small.index() {
            prop_assert_eq!(i, table.index());
        }
    }
}
