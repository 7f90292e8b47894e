use std::collections::{BTreeMap, BTreeSet, HashMap};

use autostruct::conv::{conv_language, convolve, deconvolve, order_relation_automaton};
use autostruct::nfa::{
    concat_unambiguous_with, guarded_product, guarded_union, nfa_product, nfa_union, run_automaton,
};
use autostruct::poly::{conv_word, poly_automaton_conv, poly_automaton_sharp, sharp_word};
use autostruct::{AlphabetOrder, Error, ExtendedCount, Nfa, OrderKind, Polynomial, Symbol, Transition};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::runs::*;

fn sym(s: &str) -> Symbol {
    Symbol::base(s)
}

fn ab() -> Vec<Symbol> {
    vec![sym("a"), sym("b")]
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn corpus() -> Vec<Nfa> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..100).map(|_| random_nfa(&mut rng, 5, ab())).collect()
}

#[test]
fn run_counts_match_path_enumeration() {
    for a in corpus() {
        for w in all_words(2, 6).into_iter().filter(|w| !w.is_empty()) {
            assert_eq!(a.count_runs_indices(&w).unwrap(), big(brute_runs(&a, &w)));
        }
    }
}

#[test]
fn run_automaton_preimages() {
    for a in corpus() {
        let run = run_automaton(&a);
        let mut preimages: HashMap<Vec<usize>, u64> = HashMap::new();
        let index = run.nfa.letter_map();
        for r in run.nfa.words_up_to(6).unwrap() {
            let r: Vec<usize> = r.iter().map(|s| index[s]).collect();
            let w: Vec<usize> = r.iter().map(|&i| run.projection[i]).collect();
            assert!(r.is_empty() || a.accepts_indices(&w));
            *preimages.entry(w).or_default() += 1;
        }
        for w in all_words(2, 6).into_iter().filter(|w| !w.is_empty()) {
            let n = preimages.get(&w).copied().unwrap_or(0);
            assert_eq!(big(n), a.count_runs_indices(&w).unwrap());
        }
    }
}

#[test]
fn union_and_product_laws() {
    let c = corpus();
    for pair in c.chunks(2) {
        let (x, y) = (&pair[0], &pair[1]);
        let u = nfa_union(x, y).unwrap();
        let p = nfa_product(x, y).unwrap();
        for w in all_words(2, 5).into_iter().filter(|w| !w.is_empty()) {
            let (rx, ry) = (brute_runs(x, &w), brute_runs(y, &w));
            assert_eq!(u.count_runs_indices(&w).unwrap(), big(rx + ry));
            assert_eq!(p.count_runs_indices(&w).unwrap(), big(rx * ry));
            assert_eq!(p.accepts_indices(&w), x.accepts_indices(&w) && y.accepts_indices(&w));
        }
    }
}

#[test]
fn empty_word_has_no_run_count() {
    let a = poly_automaton_conv(&"x1".parse().unwrap(), 1).unwrap();
    assert!(matches!(a.count_accepting_runs(&[]), Err(Error::EmptyWord)));
}

fn poly(s: &str) -> Polynomial {
    s.parse().unwrap()
}

fn runs_conv(p: &str, c: &[u64]) -> BigUint {
    poly_automaton_conv(&poly(p), c.len()).unwrap().count_accepting_runs(&conv_word(c, "a")).unwrap()
}

#[test]
fn union_and_product_examples() {
    let one = poly_automaton_conv(&poly("1"), 1).unwrap();
    let x1 = poly_automaton_conv(&poly("x1"), 1).unwrap();
    let a3 = conv_word(&[3], "a");
    let a2 = conv_word(&[2], "a");
    assert_eq!(nfa_union(&one, &one).unwrap().count_accepting_runs(&a3).unwrap(), big(2));
    assert_eq!(nfa_union(&x1, &x1).unwrap().count_accepting_runs(&a3).unwrap(), big(6));
    assert_eq!(nfa_product(&x1, &x1).unwrap().count_accepting_runs(&a2).unwrap(), big(4));
    assert_eq!(nfa_product(&one, &x1).unwrap().count_accepting_runs(&a3).unwrap(), big(3));
    let empty = Nfa::empty(x1.alphabet().to_vec());
    assert!(nfa_union(&x1, &empty).unwrap().equivalent(&x1).unwrap());
    assert!(guarded_union(&empty, &x1).unwrap().equivalent(&x1).unwrap());
}

#[test]
fn guarded_product_keeps_run_counts() {
    let x1 = poly_automaton_conv(&poly("x1"), 1).unwrap();
    let l = x1.alphabet()[0].clone();
    // a⁺ written ambiguously: two ways through the first letter.
    let a_plus = Nfa::new(
        vec![l.clone()],
        3,
        [0],
        [1, 2],
        [Transition::new(0, 0, 1), Transition::new(0, 0, 2), Transition::new(1, 0, 1), Transition::new(2, 0, 2)],
    )
    .unwrap();
    let g = guarded_product(&a_plus, &x1).unwrap();
    assert_eq!(g.count_accepting_runs(&conv_word(&[3], "a")).unwrap(), big(3));

    // a*b against an automaton over {a}: no common word.
    let astar_b = Nfa::new(ab(), 2, [0], [1], [Transition::new(0, 0, 0), Transition::new(0, 1, 1)]).unwrap();
    let only_a = Nfa::new(ab(), 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
    assert!(guarded_product(&astar_b, &only_a).unwrap().trim().is_empty());
}

#[test]
fn unambiguous_concatenation() {
    let a3 = poly_automaton_sharp(&poly("x1+x2"), 2).unwrap().with_alphabet(vec![sym("#"), sym("a"), sym("b2")]).unwrap();
    let prefix = Nfa::from_words(vec![sym("#"), sym("a"), sym("b2")], &[vec![sym("b2"), sym("#")]]).unwrap();
    let cat = concat_unambiguous_with(&prefix, &a3, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let c = [rng.gen_range(1..5), rng.gen_range(1..5)];
        let w = sharp_word(&c, "a");
        let mut full = vec![sym("b2"), sym("#")];
        full.extend(w.iter().cloned());
        assert_eq!(cat.count_accepting_runs(&full).unwrap(), a3.count_accepting_runs(&w).unwrap());
    }
    let eps = Nfa::epsilon(a3.alphabet().to_vec());
    let same = concat_unambiguous_with(&eps, &a3, true).unwrap();
    let w = sharp_word(&[2, 3], "a");
    assert_eq!(same.count_accepting_runs(&w).unwrap(), big(5));

    let a = vec![sym("a")];
    let a_star = Nfa::new(a.clone(), 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
    let a_plus = Nfa::new(a, 2, [0], [1], [Transition::new(0, 0, 1), Transition::new(1, 0, 1)]).unwrap();
    assert!(concat_unambiguous_with(&a_star, &a_plus, true).is_err());
}

#[test]
fn polynomial_automaton_examples() {
    assert_eq!(runs_conv("x1", &[3]), big(3));
    for c in [[1, 1], [2, 3], [3, 1]] {
        assert_eq!(runs_conv("1", &c), big(1));
    }
    assert_eq!(runs_conv("x1*x2+2", &[2, 3]), big(8));
    let sharp = |p: &str, c: &[u64]| {
        poly_automaton_sharp(&poly(p), c.len()).unwrap().count_accepting_runs(&sharp_word(c, "a")).unwrap()
    };
    assert_eq!(sharp("x2", &[2, 3]), big(3));
    assert_eq!(sharp("5", &[1, 1]), big(5));
    let a = poly_automaton_sharp(&poly("x1"), 2).unwrap();
    let outside = vec![sym("a"), sym("#")];
    assert_eq!(a.count_accepting_runs(&outside).unwrap(), big(0));
    assert!(matches!(poly_automaton_conv(&Polynomial::zero(1), 1), Err(Error::ZeroPolynomial)));
}

#[test]
fn run_count_law_on_monomials() {
    let exps = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
    for e in exps {
        for coef in 1..=3 {
            check_both_styles(&BTreeMap::from([(e.to_vec(), coef)]), 2);
        }
    }
}

#[test]
fn run_count_law_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let k = rng.gen_range(1..=3);
        check_both_styles(&random_terms(&mut rng, k), k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sum_and_product_are_preserved(seed in any::<u64>(), k in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tp, tq) = (random_terms(&mut rng, k), random_terms(&mut rng, k));
        let to_poly = |t: &BTreeMap<Vec<u32>, u64>| Polynomial::from_terms(k, t.iter().map(|(e, &c)| (c, e.clone()))).unwrap();
        let (p, q) = (to_poly(&tp), to_poly(&tq));
        for c in points(k) {
            let (vp, vq) = (eval(&tp, &c), eval(&tq, &c));
            let sum = poly_automaton_sharp(&p.add(&q), k).unwrap();
            let prod = poly_automaton_conv(&p.mul(&q), k).unwrap();
            prop_assert_eq!(sum.count_accepting_runs(&sharp_word(&c, "a")).unwrap(), &vp + &vq);
            prop_assert_eq!(prod.count_accepting_runs(&conv_word(&c, "a")).unwrap(), &vp * &vq);
        }
    }

    #[test]
    fn deconvolution_inverts_convolution(u in "[ab]{0,4}", v in "[ab]{0,4}", x in "[ab]{0,4}") {
        let tracks: Vec<Vec<String>> = [u, v, x].iter().map(|s| s.chars().map(String::from).collect()).collect();
        if tracks.iter().all(|t| t.is_empty()) {
            return Ok(());
        }
        let w = convolve(&tracks);
        prop_assert_eq!(w.len(), tracks.iter().map(Vec::len).max().unwrap());
        prop_assert_eq!(deconvolve(&w).unwrap(), tracks);
    }
}

#[test]
fn convolution_examples() {
    let w = convolve(&[vec!["a", "b"], vec!["b"]]);
    assert_eq!(w, vec![Symbol::Tuple(vec![Some("a".into()), Some("b".into())]), Symbol::Tuple(vec![Some("b".into()), None])]);
    let w = convolve(&[vec![], vec!["a"]]);
    assert_eq!(w, vec![Symbol::Tuple(vec![None, Some("a".into())])]);
}

#[test]
fn cardinality_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut finite = 0;
    for _ in 0..100 {
        // Random finite languages: acyclic transitions only, sometimes a loop.
        let n = rng.gen_range(1..=5);
        let mut ts = Vec::new();
        for src in 0..n {
            for s in 0..2 {
                for dst in src + 1..n {
                    if rng.gen_bool(0.4) {
                        ts.push(Transition::new(src, s, dst));
                    }
                }
            }
        }
        if rng.gen_bool(0.3) {
            let q = rng.gen_range(0..n);
            ts.push(Transition::new(q, 0, q));
        }
        let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let a = Nfa::new(ab(), n, [0], finals, ts).unwrap();
        match a.cardinality().unwrap() {
            ExtendedCount::Finite(m) => {
                let m: usize = m.try_into().unwrap();
                assert_eq!(a.enumerate(m + 1).unwrap().len(), m);
                finite += 1;
            }
            // Pumping: some accepted word is longer than the state count.
            ExtendedCount::Infinite => assert!(a.words_up_to(2 * n).unwrap().iter().any(|w| w.len() > n)),
        }
    }
    assert!(finite > 30);
}

#[test]
fn regular_toolkit_examples() {
    let a = vec![sym("a")];
    let a_star = Nfa::new(a.clone(), 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
    let a_plus = Nfa::new(a.clone(), 2, [0], [1], [Transition::new(0, 0, 1), Transition::new(1, 0, 1)]).unwrap();
    let eps = a_plus.complement_within(&a_star).unwrap();
    assert_eq!(eps.enumerate(5).unwrap(), vec![Vec::<Symbol>::new()]);
    let aa_plus = Nfa::new(
        a.clone(),
        3,
        [0],
        [2],
        [Transition::new(0, 0, 1), Transition::new(1, 0, 2), Transition::new(2, 0, 2)],
    )
    .unwrap();
    assert!(a_plus.includes(&aa_plus).unwrap());
    let first = a_star.enumerate(3).unwrap();
    assert_eq!(first, vec![vec![], vec![sym("a")], vec![sym("a"), sym("a")]]);
    let astar_b = Nfa::new(ab(), 2, [0], [1], [Transition::new(0, 0, 0), Transition::new(0, 1, 1)]).unwrap();
    assert_eq!(astar_b.cardinality().unwrap(), ExtendedCount::Infinite);
    let two = Nfa::from_words(ab(), &[vec![sym("a"), sym("b")], vec![sym("b")]]).unwrap();
    assert_eq!(two.cardinality().unwrap(), ExtendedCount::finite(2));
}

#[test]
fn conv_language_matches_set_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let a = random_nfa(&mut rng, 3, ab());
        let c = conv_language(&a, 2).unwrap();
        let words: Vec<Vec<String>> = all_words(2, 3)
            .into_iter()
            .map(|w| w.iter().map(|&i| ["a", "b"][i].to_string()).collect())
            .collect();
        let member = |w: &Vec<String>| a.accepts(&w.iter().map(|l| sym(l)).collect::<Vec<_>>());
        for u in &words {
            for v in &words {
                if u.is_empty() && v.is_empty() {
                    continue;
                }
                assert_eq!(c.accepts(&convolve(&[u.clone(), v.clone()])), member(u) && member(v), "{u:?} {v:?}");
            }
        }
    }
}

#[test]
fn order_relations_are_total_orders() {
    let ord = AlphabetOrder::new(["a", "b"]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let d = random_nfa(&mut rng, 3, ab());
        let words: Vec<Vec<String>> = d
            .words_up_to(5)
            .unwrap()
            .into_iter()
            .filter(|w| !w.is_empty())
            .map(|w| w.iter().map(|s| s.as_base().unwrap().to_string()).collect())
            .collect();
        for kind in [OrderKind::Lex, OrderKind::Llex] {
            let r = order_relation_automaton(&d, kind, &ord).unwrap();
            let le = |u: &Vec<String>, v: &Vec<String>| r.accepts(&convolve(&[u.clone(), v.clone()]));
            let cmp = |u: &Vec<String>, v: &Vec<String>| match kind {
                OrderKind::Lex => ord.lex_compare(u, v).unwrap(),
                OrderKind::Llex => ord.llex_compare(u, v).unwrap(),
            };
            for u in &words {
                assert!(le(u, u));
                for v in &words {
                    assert_eq!(le(u, v), cmp(u, v).is_le(), "{u:?} {v:?}");
                    assert!(le(u, v) || le(v, u));
                    if u != v {
                        assert!(!(le(u, v) && le(v, u)));
                    }
                }
            }
            // Transitivity through the comparator-consistent ranks.
            let ranks: BTreeSet<usize> =
                words.iter().map(|u| words.iter().filter(|v| le(v, u)).count()).collect();
            assert_eq!(ranks.len(), words.len());
        }
    }
}

#[test]
fn comparator_examples() {
    let ord = AlphabetOrder::new(["a", "b"]).unwrap();
    assert!(ord.lex_compare(&["a"], &["a", "b"]).unwrap().is_lt());
    assert!(ord.llex_compare(&["b"], &["a", "b"]).unwrap().is_lt());
    assert!(ord.lex_compare(&["a", "a"], &["a", "b"]).unwrap().is_lt());
    assert!(ord.lex_compare(&["c"], &["a"]).is_err());
}
