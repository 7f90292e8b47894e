//! Words, sizes and shapes for the linear-order gadgets.

use std::collections::BTreeSet;

use autostruct::{Nfa, Symbol, Transition};

pub fn w(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

pub fn syms(word: &[String]) -> Vec<Symbol> {
    word.iter().map(|l| Symbol::base(l.clone())).collect()
}

pub fn names(word: &[Symbol]) -> Vec<String> {
    word.iter().map(|s| s.as_base().unwrap().to_string()).collect()
}

/// `C(x, y) = (x + y)² + 3x + y`.
pub fn c(x: u64, y: u64) -> u64 {
    (x + y) * (x + y) + 3 * x + y
}

/// `a^{c1} # a^{c2} # ⋯`.
pub fn sharp(cs: &[u64], letter: &str) -> Vec<String> {
    let mut out = Vec::new();
    for &k in cs {
        out.extend(std::iter::repeat(letter.to_string()).take(k as usize));
        out.push("#".into());
    }
    out
}

pub fn d_language() -> Nfa {
    // a⁺♯ ∪ b₂♯
    let alphabet = vec![Symbol::base("#"), Symbol::base("a"), Symbol::base("b2")];
    let ts = vec![
        Transition::new(0, 1, 1),
        Transition::new(1, 1, 1),
        Transition::new(1, 0, 2),
        Transition::new(0, 2, 3),
        Transition::new(3, 0, 2),
    ];
    Nfa::new(alphabet, 4, [0], [2], ts).unwrap()
}

/// `((a⁺♯)ⁿ ∪ b₁⁺♯ ∪ b₂♯) $ R` with `R` starting with `0` or `1`.
pub fn has_level_shape(word: &[String], n: usize, level: usize) -> bool {
    let Some(d) = word.iter().position(|l| l == "$") else { return false };
    let (head, tail) = (&word[..d], &word[d + 1..]);
    let head_ok = if head.iter().all(|l| l == "b1" || l == "#") {
        head.len() >= 2 && head.last().unwrap() == "#" && head.iter().filter(|l| *l == "#").count() == 1
            && (level == 1 || head.len() == 2)
    } else if head == ["b2", "#"] {
        true
    } else {
        let mut blocks = 0;
        let mut run = 0;
        let mut ok = head.last().map(String::as_str) == Some("#");
        for l in head {
            match l.as_str() {
                "a" => run += 1,
                "#" if run > 0 => {
                    blocks += 1;
                    run = 0;
                }
                _ => ok = false,
            }
        }
        ok && blocks == n
    };
    head_ok && matches!(tail.first().map(String::as_str), Some("0") | Some("1"))
}

/// Sizes `C(x+y, x)` and `C(x, x+y)` up to `cap`, from the formula.
pub fn off_diagonal(cap: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for x in 1..10 {
        for y in 1..10 {
            for v in [c(x + y, x), c(x, x + y)] {
                if v <= cap {
                    out.insert(v);
                }
            }
        }
    }
    out
}

pub fn diagonal(cap: u64) -> BTreeSet<u64> {
    (1..10).map(|x| c(x, x)).filter(|&v| v <= cap).collect()
}
