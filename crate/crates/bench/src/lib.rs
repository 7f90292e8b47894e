//! Fixtures shared by the benchmarks.

use autostruct::{Nfa, Polynomial, Symbol};

fn poly(s: &str) -> Polynomial {
    s.parse().expect("valid polynomial")
}

/// `x1*x2 + 2` as a two-variable automaton over convolutions.
pub fn sample_poly_automaton() -> Nfa {
    autostruct::poly::poly_automaton_conv(&poly("x1*x2+2"), 2).expect("non-zero")
}

/// `x1^2 + x2` over `#`-separated unary blocks, with a long input word.
pub fn sharp_fixture(block: usize) -> (Nfa, Vec<Symbol>) {
    let a = autostruct::poly::poly_automaton_sharp(&poly("x1^2+x2"), 2).expect("non-zero");
    let text = format!("{}#{}#", "a".repeat(block), "a".repeat(block));
    let w = autostruct::symbol::parse_word(&text, a.alphabet()).expect("word over the alphabet");
    (a, w)
}
