//! Run-count oracles: explicit path enumeration and term-by-term
//! polynomial evaluation.

use std::collections::BTreeMap;

use autostruct::poly::{conv_word, poly_automaton_conv, poly_automaton_sharp, sharp_word};
use autostruct::{Nfa, Polynomial, Symbol, Transition};
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_nfa(rng: &mut ChaCha8Rng, max_states: usize, alphabet: Vec<Symbol>) -> Nfa {
    let n = rng.gen_range(1..=max_states);
    let mut ts = Vec::new();
    for src in 0..n {
        for s in 0..alphabet.len() {
            for dst in 0..n {
                if rng.gen_bool(0.3) {
                    ts.push(Transition::new(src, s, dst));
                }
            }
        }
    }
    let initial: Vec<usize> = (0..n).filter(|&q| q == 0 || rng.gen_bool(0.2)).collect();
    let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    Nfa::new(alphabet, n, initial, finals, ts).unwrap()
}

/// Accepting paths by explicit enumeration.
pub fn brute_runs(a: &Nfa, w: &[usize]) -> u64 {
    fn go(a: &Nfa, w: &[usize], q: usize) -> u64 {
        match w.split_first() {
            None => a.is_final(q) as u64,
            Some((&s, rest)) => {
                a.transitions().iter().filter(|t| t.src == q && t.sym == s).map(|t| go(a, rest, t.dst)).sum()
            }
        }
    }
    a.initial().iter().map(|&q| go(a, w, q)).sum()
}

pub fn all_words(letters: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in 0..letters {
                let mut v: Vec<usize> = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Term-by-term evaluation.
pub fn eval(terms: &BTreeMap<Vec<u32>, u64>, c: &[u64]) -> BigUint {
    terms
        .iter()
        .map(|(e, &k)| e.iter().zip(c).fold(BigUint::from(k), |acc, (&d, &x)| acc * BigUint::from(x).pow(d)))
        .sum()
}

pub fn points(k: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|p| (1..=3).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

pub fn check_both_styles(terms: &BTreeMap<Vec<u32>, u64>, k: usize) {
    let p = Polynomial::from_terms(k, terms.iter().map(|(e, &c)| (c, e.clone()))).unwrap();
    let conv = poly_automaton_conv(&p, k).unwrap();
    let sharp = poly_automaton_sharp(&p, k).unwrap();
    for c in points(k) {
        let want = eval(terms, &c);
        assert_eq!(conv.count_accepting_runs(&conv_word(&c, "a")).unwrap(), want, "{p} at {c:?}");
        assert_eq!(sharp.count_accepting_runs(&sharp_word(&c, "a")).unwrap(), want, "{p} at {c:?}");
    }
}

pub fn random_terms(rng: &mut ChaCha8Rng, k: usize) -> BTreeMap<Vec<u32>, u64> {
    let mut terms = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=4) {
        let mut e = vec![0u32; k];
        for _ in 0..rng.gen_range(0..=3) {
            e[rng.gen_range(0..k)] += 1;
        }
        *terms.entry(e).or_insert(0) += rng.gen_range(1..=5);
    }
    terms
}
