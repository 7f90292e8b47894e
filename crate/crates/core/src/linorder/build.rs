//! The interval automata `A[q₁,q₂]`, the base automaton `A¹` and the two
//! tower steps.

use crate::compose::{name_of, repeat, union_all};
use crate::error::{Error, Result};
use crate::nfa::{concat_unambiguous_with, guarded_product, Nfa, Transition};
use crate::poly::{pairing, poly_automaton_sharp_letter, sharp_one, Polynomial};
use crate::symbol::Symbol;

use super::shuffle::shuffle_automaton;
use super::{dollar_n, DOLLAR, ONE, SHARP, ZERO};

/// An automaton of the tower with its level `i` and the number of
/// `a⁺♯` blocks in its `a`-prefixes (`n - i + 1`).
#[derive(Clone, Debug)]
pub struct LevelAutomaton {
    pub nfa: Nfa,
    pub level: usize,
    pub arity: usize,
}

/// `A[q₁,q₂]` over `{letter, ♯, $}`: language `(letter⁺♯)^k $`, with
/// `C(q₁(c̄), q₂(c̄))` runs on `letter^c̄ $`.
pub fn poly_interval_letter(q1: &Polynomial, q2: &Polynomial, k: usize, letter: &str) -> Result<Nfa> {
    let c = pairing(&q1.with_vars(k)?, &q2.with_vars(k)?);
    let m = poly_automaton_sharp_letter(&c, k, letter)?;
    let n = m.state_count();
    let mut alphabet = m.alphabet().to_vec();
    alphabet.push(Symbol::base(DOLLAR));
    let dollar = alphabet.len() - 1;
    let mut ts = m.transitions().to_vec();
    ts.extend(m.finals().map(|q| Transition::new(q, dollar, n)));
    Nfa::new(alphabet, n + 1, m.initial().to_vec(), [n], ts)
}

pub fn poly_interval(q1: &Polynomial, q2: &Polynomial, k: usize) -> Result<Nfa> {
    poly_interval_letter(q1, q2, k, "a")
}

/// `D·A` without the ambiguity check; every use splits at a fixed count
/// of `♯` or at the first `$`.
fn then(d: &Nfa, a: &Nfa) -> Result<Nfa> {
    concat_unambiguous_with(d, a, false)
}

fn word(letters: &[&str]) -> Nfa {
    let mut alphabet: Vec<Symbol> = Vec::new();
    for l in letters {
        if !alphabet.contains(&Symbol::base(*l)) {
            alphabet.push(Symbol::base(*l));
        }
    }
    let w: Vec<Symbol> = letters.iter().map(|l| Symbol::base(*l)).collect();
    Nfa::from_words(alphabet, &[w]).expect("letters present")
}

/// `letter⁺♯`.
fn block_plus(letter: &str) -> Result<Nfa> {
    then(&repeat(letter, 1), &word(&[SHARP]))
}

/// `(letter⁺♯)^k`.
fn blocks(letter: &str, k: usize) -> Nfa {
    if k == 0 {
        return Nfa::epsilon(vec![Symbol::base(SHARP), Symbol::base(letter)]);
    }
    sharp_one(k, letter)
}

fn x(vars: usize, i: usize) -> Polynomial {
    Polynomial::var(vars, i)
}

/// `A¹ = A¹₁ ⊎ A¹₂ ⊎ A¹₃` for `P₁(c̄) ⟺ ∀x̄ p₁(c̄,x̄) ≠ p₂(c̄,x̄)`, with
/// `p₁, p₂` in `ℓ` variables of which the first `n` are `c̄`.
pub fn build_base_a1(p1: &Polynomial, p2: &Polynomial, n: usize, l: usize) -> Result<LevelAutomaton> {
    if n == 0 || l <= n {
        return Err(Error::Parameters(format!("need 0 < n < l, got n = {n}, l = {l}")));
    }
    if p1.is_zero() || p2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let y = x(l + 1, l + 1);
    let q1 = p1.with_vars(l + 1)?.add(&y);
    let q2 = p2.with_vars(l + 1)?.add(&y);
    let s = x(2, 1).add(&x(2, 2));
    let a1 = poly_interval_letter(&q1, &q2, l + 1, "a")?;
    let a2 = poly_interval_letter(&s, &s, 2, "b1")?;
    let a3 = poly_interval_letter(&s, &x(2, 1), 2, "b2")?;
    let a4 = poly_interval_letter(&x(2, 1), &s, 2, "b3")?;
    let a34 = a3.union_merged(&a4);

    let e1 = blocks("a", n);
    let b1 = block_plus("b1")?;
    let b2 = word(&["b2", SHARP]);
    let d34 = blocks("b2", 2).union_merged(&blocks("b3", 2));

    let a01 = a1.union_merged(&then(&e1, &a34)?);
    let a02 = a2.union_merged(&then(&b1, &a34)?);
    let a03 = then(&b2, &a34)?;
    let d1 = blocks("a", l - n + 1).union_merged(&d34);
    let d2 = b1.union_merged(&d34);
    let parts = [
        shuffle_automaton(&a01, &e1, &d1, None)?,
        shuffle_automaton(&a02, &b1, &d2, None)?,
        shuffle_automaton(&a03, &b2, &d34, None)?,
    ];
    Ok(LevelAutomaton { nfa: union_all(&parts), level: 1, arity: n })
}

/// `P $ Σ*` over the letters of `sigma`, deterministic.
fn prefixed(p: &Nfa, sigma: &[Symbol]) -> Result<Nfa> {
    let mut alphabet = sigma.to_vec();
    for s in p.alphabet().iter().chain([&Symbol::base(DOLLAR)]) {
        if !alphabet.contains(s) {
            alphabet.push(s.clone());
        }
    }
    let ts: Vec<Transition> = (0..alphabet.len()).map(|i| Transition::new(0, i, 0)).collect();
    let tail = Nfa::new(alphabet, 1, [0], [0], ts)?;
    then(&then(p, &word(&[DOLLAR]))?, &tail)
}

/// `S_j = $₁⁺ ∪ ⋯ ∪ $_j⁺`.
pub fn s_language(j: usize) -> Nfa {
    let parts: Vec<Nfa> = (1..=j).map(|i| repeat(&dollar_n(i), 1)).collect();
    union_all(&parts)
}

/// `A^{i+1}` from `A^i`; the parity of `i` picks the wiring.
pub fn lo_tower_step(ai: &LevelAutomaton) -> Result<LevelAutomaton> {
    let i = ai.level;
    if ai.arity < 2 {
        return Err(Error::Parameters(format!("A^{i} has {} a-blocks; the step needs at least 2", ai.arity)));
    }
    let k = ai.arity - 1;
    let a = ai.nfa.trim();
    let sigma = a.alphabet().to_vec();
    let beta = if i == 1 { block_plus("b1")? } else { word(&["b1", SHARP]) };
    let b2 = word(&["b2", SHARP]);
    let b1 = word(&["b1", SHARP]);
    let ak1 = blocks("a", k + 1);
    let ak = blocks("a", k);
    let s = s_language(i);

    let b = |p: &Nfa| -> Result<Nfa> {
        let own = guarded_product(&prefixed(p, &sigma)?, &a)?;
        let omega = then(&then(p, &word(&[DOLLAR]))?, &s)?;
        Ok(own.union_merged(&omega))
    };
    let (bi1, bi2, bi3) = (b(&ak1)?, b(&beta)?, b(&b2)?);
    let a_plus = block_plus("a")?;
    let (c1, c2, c3, d1, d2, d3) = if i % 2 == 1 {
        (
            bi1.union_merged(&then(&ak, &bi2)?),
            then(&b1, &bi2)?,
            then(&b2, &bi2.union_merged(&bi3))?,
            a_plus.union_merged(&beta),
            beta.clone(),
            beta.union_merged(&b2),
        )
    } else {
        (
            bi1.union_merged(&then(&ak, &bi3)?),
            then(&b1, &bi2.union_merged(&bi3))?,
            then(&b2, &bi3)?,
            a_plus.union_merged(&b2),
            beta.union_merged(&b2),
            b2.clone(),
        )
    };
    let parts = [
        shuffle_automaton(&c1, &ak, &d1, None)?,
        shuffle_automaton(&c2, &b1, &d2, None)?,
        shuffle_automaton(&c3, &b2, &d3, None)?,
    ];
    Ok(LevelAutomaton { nfa: union_all(&parts), level: i + 1, arity: k })
}

/// The words `u` with `u$` a prefix of `L(A)`, read before the first `$`.
pub fn head_language(a: &Nfa) -> Nfa {
    let a = a.trim();
    let dollar = a.alphabet().iter().position(|s| name_of(s) == DOLLAR);
    let finals: Vec<usize> =
        (0..a.state_count()).filter(|&q| a.out(q).iter().any(|t| Some(t.sym) == dollar)).collect();
    let ts: Vec<Transition> = a.transitions().iter().filter(|t| Some(t.sym) != dollar).copied().collect();
    Nfa::new(a.alphabet().to_vec(), a.state_count(), a.initial().to_vec(), finals, ts)
        .expect("same states")
        .trim()
}

/// Letters that can follow the first `$`.
pub fn tail_first_letters(a: &Nfa) -> Vec<String> {
    let a = a.trim();
    let dollar = a.alphabet().iter().position(|s| name_of(s) == DOLLAR);
    let reach = head_reach(&a, dollar);
    let mut out: Vec<String> = Vec::new();
    for t in a.transitions() {
        if reach[t.src] && Some(t.sym) == dollar {
            for u in a.out(t.dst) {
                let l = name_of(&a.alphabet()[u.sym]);
                if !out.contains(&l) {
                    out.push(l);
                }
            }
        }
    }
    out.sort();
    out
}

/// States reachable from an initial state without reading `$`.
fn head_reach(a: &Nfa, dollar: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; a.state_count()];
    let mut stack: Vec<usize> = a.initial().to_vec();
    for &q in &stack {
        seen[q] = true;
    }
    while let Some(q) = stack.pop() {
        for t in a.out(q) {
            if Some(t.sym) != dollar && !seen[t.dst] {
                seen[t.dst] = true;
                stack.push(t.dst);
            }
        }
    }
    seen
}

/// `(a⁺♯)^k ∪ β♯ ∪ b₂♯` with `β = b₁⁺` at level 1 and `b₁` above.
pub fn expected_heads(level: usize, arity: usize) -> Result<Nfa> {
    let beta = if level == 1 { block_plus("b1")? } else { word(&["b1", SHARP]) };
    Ok(blocks("a", arity).union_merged(&beta).union_merged(&word(&["b2", SHARP])))
}

/// The language shape of a tower level: heads equal to
/// [`expected_heads`] (only contained in them after an even step) and
/// every tail starting with `0` or `1`.
pub fn check_level_shape(l: &LevelAutomaton) -> Result<bool> {
    let heads = head_language(&l.nfa);
    let want = expected_heads(l.level, l.arity)?;
    let from_even_step = l.level > 1 && (l.level - 1) % 2 == 0;
    let heads_ok = if from_even_step { want.includes(&heads)? } else { want.equivalent(&heads)? };
    let first = tail_first_letters(&l.nfa);
    Ok(heads_ok && !first.is_empty() && first.iter().all(|f| f == ZERO || f == ONE))
}
