//! Shuffle sums through the automaton `σ(A, E)` and the dense language
//! `σ(D) = ({0,1}*1D)⁺`.

use std::cmp::Ordering;

use crate::compose::name_of;
use crate::conv::AlphabetOrder;
use crate::error::{Error, Result};
use crate::limits::state_cap;
use crate::nfa::{explore, guarded_product, Nfa, Transition};
use crate::symbol::Symbol;

use super::{DOLLAR, GAMMA, ONE, ZERO};

fn check_gamma(m: &Nfa, what: &str) -> Result<()> {
    for s in m.trim().alphabet() {
        let n = name_of(s);
        if !GAMMA.contains(&n.as_str()) {
            return Err(Error::Validation(format!("{what} uses `{n}`, outside {{a, b1, b2, b3, #}}")));
        }
    }
    Ok(())
}

/// Position inside `E $ σ(D) $ Σ*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Guard {
    Head(usize),
    /// Inside `{0,1}*1`; the flag records a trailing `1`.
    Bits(bool),
    Color(usize),
    Tail,
}

/// Deterministic automaton for `E $ σ(D) $ Σ*`, or for `σ(D)` alone when
/// `head` is `None`.
fn guard(head: Option<&Nfa>, d: &Nfa, tail: &[Symbol]) -> Result<Nfa> {
    let d = d.determinize()?.trim();
    let e = match head {
        Some(e) => Some(e.determinize()?.trim()),
        None => None,
    };
    let mut letters: Vec<Symbol> = vec![Symbol::base(ZERO), Symbol::base(ONE), Symbol::base(DOLLAR)];
    for s in d.alphabet().iter().chain(tail) {
        if !letters.contains(s) {
            letters.push(s.clone());
        }
    }
    if let Some(e) = &e {
        for s in e.alphabet() {
            if !letters.contains(s) {
                letters.push(s.clone());
            }
        }
    }
    let starts = match &e {
        Some(e) => e.initial().iter().map(|&q| Guard::Head(q)).collect(),
        None => vec![Guard::Bits(false)],
    };
    let standalone = head.is_none();
    let (nfa, _) = explore(
        letters.clone(),
        starts,
        |g: &Guard, out| {
            fn push(out: &mut Vec<(Symbol, Guard)>, name: &str, n: Guard) {
                out.push((Symbol::base(name), n));
            }
            match *g {
                Guard::Head(q) => {
                    let e = e.as_ref().expect("head automaton");
                    for t in e.out(q) {
                        out.push((e.alphabet()[t.sym].clone(), Guard::Head(t.dst)));
                    }
                    if e.is_final(q) {
                        push(out, DOLLAR, Guard::Bits(false));
                    }
                }
                Guard::Bits(one) => {
                    push(out, ZERO, Guard::Bits(false));
                    push(out, ONE, Guard::Bits(true));
                    if one {
                        for &q0 in d.initial() {
                            for t in d.out(q0) {
                                out.push((d.alphabet()[t.sym].clone(), Guard::Color(t.dst)));
                            }
                        }
                    }
                }
                Guard::Color(q) => {
                    for t in d.out(q) {
                        out.push((d.alphabet()[t.sym].clone(), Guard::Color(t.dst)));
                    }
                    if d.is_final(q) {
                        push(out, ZERO, Guard::Bits(false));
                        push(out, ONE, Guard::Bits(true));
                        if !standalone {
                            push(out, DOLLAR, Guard::Tail);
                        }
                    }
                }
                Guard::Tail => {
                    for s in &letters {
                        out.push((s.clone(), Guard::Tail));
                    }
                }
            }
        },
        |g| match g {
            Guard::Tail => true,
            Guard::Color(q) => standalone && d.is_final(*q),
            _ => false,
        },
        state_cap(),
    )?;
    Ok(nfa.trim())
}

/// `σ(D) = ({0,1}*1D)⁺` for a language `D` over `{a, b1, b2, b3, #}`
/// without the empty word.
pub fn sigma_language(d: &Nfa) -> Result<Nfa> {
    check_gamma(d, "D")?;
    if d.accepts(&[]) {
        return Err(Error::Validation("D contains the empty word".into()));
    }
    guard(None, d, &[])
}

/// `σ(A, E)`: for `L(A) = E·D·$·F`, an automaton for `E $ σ(D) $ F` whose
/// runs on `u₁ $ v u₂ $ u₃` correspond to the runs of `A` on `u₁u₂$u₃`.
/// When `f` is given, `L(A) ⊆ E·D·$·F` is checked; otherwise only the
/// part before the second `$`.
pub fn shuffle_automaton(a: &Nfa, e: &Nfa, d: &Nfa, f: Option<&Nfa>) -> Result<Nfa> {
    check_gamma(e, "E")?;
    check_gamma(d, "D")?;
    if d.accepts(&[]) {
        return Err(Error::Validation("D contains the empty word".into()));
    }
    let a = a.trim();
    let shape = shape_language(e, d, f, a.alphabet())?;
    if !shape.includes(&a)? {
        return Err(Error::Validation("L(A) is not contained in E·D·$·F".into()));
    }

    // A′: copy 1 reads up to the first `$`, the loop copy skips to the
    // guessed last `1`, copy 2 resumes from the stored state.
    let n = a.state_count();
    let mut alphabet = a.alphabet().to_vec();
    let index = |s: &str, alphabet: &mut Vec<Symbol>| -> usize {
        let s = Symbol::base(s);
        match alphabet.iter().position(|x| *x == s) {
            Some(i) => i,
            None => {
                alphabet.push(s);
                alphabet.len() - 1
            }
        }
    };
    let dollar = index(DOLLAR, &mut alphabet);
    let zero = index(ZERO, &mut alphabet);
    let one = index(ONE, &mut alphabet);
    let gamma: Vec<usize> = GAMMA.iter().map(|g| index(g, &mut alphabet)).collect();
    let mut ts = Vec::new();
    for t in a.transitions() {
        if gamma.contains(&t.sym) {
            ts.push(Transition::new(t.src, t.sym, t.dst));
        }
        ts.push(Transition::new(2 * n + t.src, t.sym, 2 * n + t.dst));
    }
    for q in 0..n {
        ts.push(Transition::new(q, dollar, n + q));
        for &g in gamma.iter().chain([&zero, &one]) {
            ts.push(Transition::new(n + q, g, n + q));
        }
        ts.push(Transition::new(n + q, one, 2 * n + q));
    }
    let a2 = Nfa::new(alphabet, 3 * n, a.initial().to_vec(), a.finals().map(|q| 2 * n + q), ts)?;
    let g = guard(Some(e), d, a2.alphabet())?;
    Ok(guarded_product(&g, &a2)?.trim())
}

/// `E·D·$·F`, with `Σ*` for a missing `F`.
fn shape_language(e: &Nfa, d: &Nfa, f: Option<&Nfa>, sigma: &[Symbol]) -> Result<Nfa> {
    let ed = crate::nfa::concat_unambiguous_with(e, d, false)?;
    let dollar = Nfa::from_words(vec![Symbol::base(DOLLAR)], &[vec![Symbol::base(DOLLAR)]])?;
    let head = crate::nfa::concat_unambiguous_with(&ed, &dollar, false)?;
    let tail = match f {
        Some(f) => f.clone(),
        None => {
            let ts: Vec<Transition> = (0..sigma.len()).map(|i| Transition::new(0, i, 0)).collect();
            Nfa::new(sigma.to_vec(), 1, [0], [0], ts)?
        }
    };
    crate::nfa::concat_unambiguous_with(&head, &tail, false)
}

/// Position of the last `1` in a word of `σ(D)`: the color starts after it.
fn last_one(w: &[String]) -> Result<usize> {
    w.iter()
        .rposition(|l| l == ONE)
        .filter(|&i| i + 1 < w.len())
        .ok_or_else(|| Error::Parameters("not a word of σ(D)".into()))
}

/// The color `c(x1u) = u` of a word of `σ(D)`.
pub fn sigma_color(w: &[String]) -> Result<Vec<String>> {
    Ok(w[last_one(w)? + 1..].to_vec())
}

/// For `w = x1u`: the words `x01u` and `x11u` just below and above `w`.
pub fn sigma_neighbors(w: &[String]) -> Result<(Vec<String>, Vec<String>)> {
    let i = last_one(w)?;
    let (x, u) = (&w[..i], &w[i + 1..]);
    let build = |b: &str| {
        let mut v = x.to_vec();
        v.push(b.to_string());
        v.push(ONE.to_string());
        v.extend_from_slice(u);
        v
    };
    Ok((build(ZERO), build(ONE)))
}

/// A word of color `u` strictly between `w1 <lex w2` in `σ(D)`: `w1 1 u`
/// when the words differ at some position, `w1 0^{j+1} 1 u` when
/// `w2 = w1 0^j α y`.
pub fn sigma_between(w1: &[String], w2: &[String], u: &[String], ord: &AlphabetOrder) -> Result<Vec<String>> {
    if ord.lex_compare(w1, w2)? != Ordering::Less {
        return Err(Error::Parameters("the first word is not below the second".into()));
    }
    let mut z = w1.to_vec();
    if w2.len() > w1.len() && w2[..w1.len()] == *w1 {
        let j = w2[w1.len()..].iter().take_while(|l| *l == ZERO).count();
        z.extend(std::iter::repeat(ZERO.to_string()).take(j + 1));
    }
    z.push(ONE.to_string());
    z.extend_from_slice(u);
    Ok(z)
}
