use autostruct::conv::convolve;
use autostruct::fo::{
    decide_sentence, eval_formula, infinity_projection, validate_linear_order, validate_tree, Engine, Formula,
    Presentation, Relation,
};
use autostruct::{ExtendedCount, Nfa, Symbol, Transition};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

use common::fo::*;


/// `(ℕ; ≤)` on `a*` with `≤` the prefix order.
fn unary_naturals() -> Presentation {
    let domain = Nfa::new(vec![Symbol::base("a")], 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
    let le = Nfa::new(
        vec![tup(&[Some("a"), Some("a")]), tup(&[None, Some("a")])],
        2,
        [0],
        [0, 1],
        [Transition::new(0, 0, 0), Transition::new(0, 1, 1), Transition::new(1, 1, 1)],
    )
    .unwrap();
    let mut rels = std::collections::BTreeMap::new();
    rels.insert("leq".to_string(), Relation::new(2, le).unwrap());
    Presentation::with_domain_order(domain, rels).unwrap()
}

fn word(n: usize) -> Vec<Symbol> {
    vec![Symbol::Tuple(vec![Some("a".into())]); n]
}

#[test]
fn least_element_of_the_naturals() {
    let p = unary_naturals();
    let f: Formula = "(forall y (leq x y))".parse().unwrap();
    let a = eval_formula(&p, &f, &["x"]).unwrap();
    assert!(a.accepts(&word(0)));
    assert_eq!(a.cardinality().unwrap(), ExtendedCount::Finite(1u32.into()));
}

#[test]
fn every_natural_has_infinitely_many_successors() {
    let p = unary_naturals();
    let f: Formula = "(exinf y (leq x y))".parse().unwrap();
    let a = eval_formula(&p, &f, &["x"]).unwrap();
    for n in 0..6 {
        assert!(a.accepts(&word(n)));
    }
    let below: Formula = "(exinf y (leq y x))".parse().unwrap();
    assert!(eval_formula(&p, &below, &["x"]).unwrap().is_empty());
}

#[test]
fn simple_sentences() {
    let p = unary_naturals();
    let yes = ["(exists x (forall y (leq x y)))", "(exists x (= x x))", "(exinf x (= x x))"];
    for s in yes {
        assert!(decide_sentence(&p, &s.parse().unwrap()).unwrap(), "{s}");
    }
    assert!(!decide_sentence(&p, &"(exists x (forall y (leq y x)))".parse().unwrap()).unwrap());
    assert!(validate_linear_order(&p).unwrap());
}

#[test]
fn unbound_names_are_errors() {
    let p = unary_naturals();
    assert!(eval_formula(&p, &"(R x)".parse().unwrap(), &["x"]).is_err());
    assert!(eval_formula(&p, &"(leq x y)".parse().unwrap(), &["x"]).is_err());
    assert!(eval_formula(&p, &"(leq x)".parse().unwrap(), &["x"]).is_err());
}

#[test]
fn agrees_with_model_checking_on_random_finite_structures() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let s = random_finite(&mut rng);
        for (text, free) in SUITE.iter().chain(COUNTING) {
            let f: Formula = text.parse().unwrap();
            assert!(f.depth() <= 3);
            check_against_oracle(&s, &f, free);
        }
    }
}

#[test]
fn double_negation_and_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let p = random_finite(&mut rng).presentation();
        let e = Engine::new(&p).unwrap();
        for (text, free) in SUITE {
            let f: Formula = text.parse().unwrap();
            let a = e.eval(&f, free).unwrap();
            let nn = e.eval(&Formula::not(Formula::not(f.clone())), free).unwrap();
            assert!(a.equivalent(&nn).unwrap(), "{f}");
        }
        let forall: Formula = "(forall y (implies (R x y) (U y)))".parse().unwrap();
        let dual: Formula = "(not (exists y (not (implies (R x y) (U y)))))".parse().unwrap();
        assert!(e.eval(&forall, &["x"]).unwrap().equivalent(&e.eval(&dual, &["x"]).unwrap()).unwrap());
    }
}

#[test]
fn infinity_projection_matches_pumping_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs = ab_words(4);
    for _ in 0..50 {
        let r = random_relation(&mut rng);
        let q = r.state_count();
        let inf = infinity_projection(&r).unwrap();
        for x in &xs {
            let expected = window_witness(&r, x, x.len() + q, x.len() + 2 * q);
            assert_eq!(inf.accepts(&convolve(&[x.clone()])), expected, "{x:?}");
        }
    }
}

#[test]
fn infinity_projection_examples() {
    let eq = Nfa::new(
        vec![tup(&[Some("a"), Some("a")])],
        1,
        [0],
        [0],
        [Transition::new(0, 0, 0)],
    )
    .unwrap();
    assert!(infinity_projection(&eq).unwrap().is_empty());
}

#[test]
fn tree_validator_needs_a_least_element() {
    // Two roots and no common parent.
    let words = |ws: &[&str]| ws.iter().map(|w| vec![Symbol::base(*w)]).collect::<Vec<_>>();
    let domain = explicit(words(&["a", "b"]));
    let edges = Nfa::empty(vec![tup(&[Some("a"), Some("b")])]);
    let mut rels = std::collections::BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, edges).unwrap());
    let p = Presentation::with_domain_order(domain.clone(), rels).unwrap();
    assert!(!validate_tree(&p, 1).unwrap());
    let edge = explicit(vec![vec![tup(&[Some("a"), Some("b")])]]);
    let mut rels = std::collections::BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, edge).unwrap());
    let p = Presentation::with_domain_order(domain, rels).unwrap();
    assert!(validate_tree(&p, 1).unwrap());
    assert!(!validate_tree(&p, 0).unwrap());
}
