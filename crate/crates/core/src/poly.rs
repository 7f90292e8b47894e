//! Polynomials over ℕ and the automata whose ambiguity realizes them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nfa::{Nfa, Transition};
use crate::symbol::Symbol;

/// A polynomial in `x1..xk` with natural coefficients, kept in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: usize,
    /// Exponent vector to coefficient; no zero coefficients.
    terms: BTreeMap<Vec<u32>, u64>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: u64) -> Self {
        let mut p = Self::zero(vars);
        if c > 0 {
            p.terms.insert(vec![0; vars], c);
        }
        p
    }

    /// The variable `x_i` (1-based).
    pub fn var(vars: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= vars, "variable x{i} outside 1..={vars}");
        let mut e = vec![0; vars];
        e[i - 1] = 1;
        Polynomial { vars, terms: BTreeMap::from([(e, 1)]) }
    }

    /// Builds from `(coefficient, exponents)` pairs, merging equal monomials.
    pub fn from_terms(vars: usize, terms: impl IntoIterator<Item = (u64, Vec<u32>)>) -> Result<Self> {
        let mut p = Self::zero(vars);
        for (c, e) in terms {
            if e.len() != vars {
                return Err(Error::Parse(format!("exponent vector {e:?} is not of length {vars}")));
            }
            if c > 0 {
                *p.terms.entry(e).or_insert(0) += c;
            }
        }
        Ok(p)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &[u32])> {
        self.terms.iter().map(|(e, &c)| (c, e.as_slice()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Same polynomial read in a ring with `vars ≥ self.vars()` variables.
    pub fn with_vars(&self, vars: usize) -> Result<Self> {
        if vars < self.vars {
            let used = self.terms.keys().any(|e| e[vars..].iter().any(|&x| x > 0));
            if used {
                return Err(Error::Parameters(format!("polynomial uses more than {vars} variables")));
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut e2 = e.clone();
                e2.resize(vars, 0);
                (e2, c)
            })
            .collect();
        Ok(Polynomial { vars, terms })
    }

    /// Number of variables actually occurring.
    pub fn used_vars(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|e| e.iter().rposition(|&x| x > 0))
            .map(|i| i + 1)
            .max()
            .unwrap_or(0)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let v = self.vars.max(other.vars);
        (self.with_vars(v).unwrap(), other.with_vars(v).unwrap())
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        for (e, c) in b.terms {
            *a.terms.entry(e).or_insert(0) += c;
        }
        a
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let mut p = Self::zero(a.vars);
        for (e1, c1) in &a.terms {
            for (e2, c2) in &b.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                *p.terms.entry(e).or_insert(0) += c1 * c2;
            }
        }
        p
    }

    pub fn scale(&self, c: u64) -> Self {
        self.mul(&Self::constant(self.vars, c))
    }

    /// Value at `c̄`; missing coordinates are an error.
    pub fn eval(&self, point: &[u64]) -> BigUint {
        assert!(point.len() >= self.vars, "point has {} coordinates, need {}", point.len(), self.vars);
        self.terms
            .iter()
            .map(|(e, &c)| {
                e.iter()
                    .zip(point)
                    .fold(BigUint::from(c), |acc, (&k, &x)| acc * BigUint::from(x).pow(k))
            })
            .sum()
    }

    pub fn eval_u64(&self, point: &[u64]) -> u64 {
        u64::try_from(self.eval(point)).expect("value fits in 64 bits")
    }
}

/// The injective pairing polynomial `C(x,y) = (x+y)^2 + 3x + y`.
pub fn pairing(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let s = p.add(q);
    s.mul(&s).add(&p.scale(3)).add(q)
}

/// `C(x, y)` on numbers.
pub fn pairing_value(x: u64, y: u64) -> u64 {
    (x + y) * (x + y) + 3 * x + y
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, &c) in self.terms.iter().rev() {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                .collect();
            match (c, factors.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => f.write_str(&factors.join("*"))?,
                _ => write!(f, "{c}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// `+`-separated terms of `*`-separated factors: naturals, `xN`, `xN^e`.
    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut raw: Vec<(u64, BTreeMap<usize, u32>)> = Vec::new();
        for term in text.split('+') {
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in `{s}`")));
            }
            let mut coef: u64 = 1;
            let mut exps: BTreeMap<usize, u32> = BTreeMap::new();
            for factor in term.split('*') {
                let (base, pow) = match factor.split_once('^') {
                    Some((b, p)) => {
                        let p: u32 = p.parse().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
                        (b, p)
                    }
                    None => (factor, 1),
                };
                if let Some(idx) = base.strip_prefix('x') {
                    let i: usize = idx.parse().map_err(|_| Error::Parse(format!("bad variable `{base}`")))?;
                    if i == 0 {
                        return Err(Error::Parse("variables are numbered from x1".into()));
                    }
                    *exps.entry(i).or_insert(0) += pow;
                } else {
                    let n: u64 = base.parse().map_err(|_| Error::Parse(format!("bad factor `{factor}`")))?;
                    coef = coef
                        .checked_mul(n.checked_pow(pow).ok_or_else(|| Error::Parse("coefficient overflow".into()))?)
                        .ok_or_else(|| Error::Parse("coefficient overflow".into()))?;
                }
            }
            raw.push((coef, exps));
        }
        let vars = raw.iter().filter_map(|(_, e)| e.keys().max().copied()).max().unwrap_or(0);
        Polynomial::from_terms(
            vars,
            raw.into_iter().map(|(c, e)| {
                let mut v = vec![0u32; vars];
                for (i, k) in e {
                    v[i - 1] = k;
                }
                (c, v)
            }),
        )
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The letters of `Σ_k^a`: tuples over `{a, pad}` other than all-pad, ordered
/// by the bit mask of their `a`-tracks.
pub fn conv_alphabet(k: usize, letter: &str) -> Vec<Symbol> {
    (1u32..(1 << k))
        .map(|mask| {
            Symbol::Tuple((0..k).map(|i| (mask >> i & 1 == 1).then(|| letter.to_string())).collect())
        })
        .collect()
}

fn mask_of(k: usize, s: &Symbol) -> u32 {
    s.entries()
        .unwrap()
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, x)| x.is_some())
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Deterministic automaton for `⊗_k(a⁺)`.
pub fn conv_one(k: usize, letter: &str) -> Nfa {
    let alphabet = conv_alphabet(k, letter);
    let full = (1u32 << k) - 1;
    // State 0: nothing read. State 1 + m: tracks outside mask m have ended.
    let mut ts = Vec::new();
    ts.push(Transition::new(0, (full - 1) as usize, 1 + full as usize));
    for m in 1..=full {
        for (sym, s) in alphabet.iter().enumerate() {
            let a = mask_of(k, s);
            if a & !m == 0 {
                ts.push(Transition::new(1 + m as usize, sym, 1 + a as usize));
            }
        }
    }
    let states = 2 + full as usize;
    Nfa::new(alphabet, states, [0], 2..states, ts).expect("well-formed")
}

/// Two-state automaton with `c_i` accepting runs on `a^c̄` (track `i`, 0-based).
fn conv_var(k: usize, i: usize, letter: &str) -> Nfa {
    let alphabet = conv_alphabet(k, letter);
    let mut ts = Vec::new();
    for (sym, s) in alphabet.iter().enumerate() {
        if s.entries().unwrap()[i].is_some() {
            ts.push(Transition::new(0, sym, 0));
            ts.push(Transition::new(0, sym, 1));
        }
        ts.push(Transition::new(1, sym, 1));
    }
    Nfa::new(alphabet, 2, [0], [1], ts).expect("well-formed")
}

/// Deterministic automaton for `(a⁺♯)^k`; alphabet `[♯, a]`.
pub fn sharp_one(k: usize, letter: &str) -> Nfa {
    let alphabet = vec![Symbol::base("#"), Symbol::base(letter)];
    let mut ts = Vec::new();
    for j in 0..k {
        ts.push(Transition::new(2 * j, 1, 2 * j + 1));
        ts.push(Transition::new(2 * j + 1, 1, 2 * j + 1));
        ts.push(Transition::new(2 * j + 1, 0, 2 * j + 2));
    }
    Nfa::new(alphabet, 2 * k + 1, [0], [2 * k], ts).expect("well-formed")
}

/// The `(k+2)`-state automaton with `c_i` runs on `a^{c1}♯…a^{ck}♯` (1-based `i`).
fn sharp_var(k: usize, i: usize, letter: &str) -> Nfa {
    let alphabet = vec![Symbol::base("#"), Symbol::base(letter)];
    let aside = k + 1;
    let mut ts = Vec::new();
    for j in 1..=k {
        if j != i {
            ts.push(Transition::new(j - 1, 0, j));
        }
    }
    for q in 0..=aside {
        ts.push(Transition::new(q, 1, q));
    }
    ts.push(Transition::new(i - 1, 1, aside));
    ts.push(Transition::new(aside, 0, i));
    Nfa::new(alphabet, k + 2, [0], [k], ts).expect("well-formed")
}

fn poly_automaton(p: &Polynomial, k: usize, one: &Nfa, var: impl Fn(usize) -> Nfa) -> Result<Nfa> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let p = p.with_vars(k)?;
    let mut result: Option<Nfa> = None;
    for (c, e) in p.terms() {
        let mut m = one.clone();
        for (i, &pow) in e.iter().enumerate() {
            for _ in 0..pow {
                m = m.product_merged(&var(i)).trim();
            }
        }
        let m = copies(&m, c);
        result = Some(match result {
            None => m,
            Some(r) => r.union_merged(&m),
        });
    }
    Ok(merge_equal_futures(&result.expect("non-zero polynomial has a term")))
}

/// Merges states with the same finality and the same outgoing transitions,
/// as long as no state reaches both on one letter and not both are initial;
/// then the same on the reversed automaton. Accepting-run counts are
/// unchanged; the transition set shrinks.
pub fn merge_equal_futures(m: &Nfa) -> Nfa {
    let mut cur = m.clone();
    loop {
        let n = cur.state_count();
        cur = merge_forward(&cur);
        cur = merge_forward(&cur.reverse()).reverse();
        if cur.state_count() == n {
            return cur;
        }
    }
}

fn merge_forward(m: &Nfa) -> Nfa {
    let mut cur = m.clone();
    loop {
        let n = cur.state_count();
        let mut by_sig: HashMap<(bool, Vec<(usize, usize)>), Vec<usize>> = HashMap::new();
        for q in 0..n {
            let sig: Vec<(usize, usize)> = cur.out(q).iter().map(|t| (t.sym, t.dst)).collect();
            by_sig.entry((cur.is_final(q), sig)).or_default().push(q);
        }
        // Predecessor pairs (src, sym) per state, to detect conflicting merges.
        let mut preds: Vec<HashSet<(usize, usize)>> = vec![HashSet::new(); n];
        for t in cur.transitions() {
            preds[t.dst].insert((t.src, t.sym));
        }
        let initial: HashSet<usize> = cur.initial().iter().copied().collect();
        let mut rep: Vec<usize> = (0..n).collect();
        let mut changed = false;
        let mut groups: Vec<Vec<usize>> = by_sig.into_values().filter(|g| g.len() > 1).collect();
        groups.sort();
        for g in groups {
            let mut taken: Vec<usize> = Vec::new();
            let mut used: HashSet<(usize, usize)> = HashSet::new();
            let mut has_init = false;
            for &q in &g {
                let init = initial.contains(&q);
                if (init && has_init) || preds[q].iter().any(|p| used.contains(p)) {
                    continue;
                }
                has_init |= init;
                used.extend(preds[q].iter().copied());
                taken.push(q);
            }
            for &q in &taken[1..] {
                rep[q] = taken[0];
                changed = true;
            }
        }
        if !changed {
            return cur;
        }
        let ts: Vec<Transition> = cur
            .transitions()
            .iter()
            .map(|t| Transition::new(rep[t.src], t.sym, rep[t.dst]))
            .collect();
        let merged = Nfa::new(
            cur.alphabet().to_vec(),
            n,
            cur.initial().iter().map(|&q| rep[q]),
            cur.finals().map(|q| rep[q]),
            ts,
        )
        .expect("well-formed");
        let keep: Vec<bool> = (0..n).map(|q| rep[q] == q).collect();
        cur = merged.restrict_states(&keep);
    }
}

/// An automaton with `c` times the runs of `m`. When `m` has a single initial
/// state without incoming transitions, the copies share everything but that
/// state; otherwise `c` disjoint copies are taken.
pub fn copies(m: &Nfa, c: u64) -> Nfa {
    let init = m.initial();
    let shareable = init.len() == 1 && m.transitions().iter().all(|t| t.dst != init[0]);
    if !shareable {
        let mut r = m.clone();
        for _ in 1..c {
            r = r.union_merged(m);
        }
        return r;
    }
    let q0 = init[0];
    let n = m.state_count();
    let extra = (c - 1) as usize;
    let mut ts = m.transitions().to_vec();
    let mut finals: Vec<usize> = m.finals().collect();
    for j in 0..extra {
        ts.extend(m.out(q0).iter().map(|t| Transition::new(n + j, t.sym, t.dst)));
        if m.is_final(q0) {
            finals.push(n + j);
        }
    }
    Nfa::new(m.alphabet().to_vec(), n + extra, std::iter::once(q0).chain(n..n + extra), finals, ts)
        .expect("well-formed")
}

/// Automaton over `Σ_k^a` with language `⊗_k(a⁺)` and `p(c̄)` runs on `a^c̄`.
pub fn poly_automaton_conv(p: &Polynomial, k: usize) -> Result<Nfa> {
    poly_automaton_conv_letter(p, k, "a")
}

pub fn poly_automaton_conv_letter(p: &Polynomial, k: usize, letter: &str) -> Result<Nfa> {
    let one = conv_one(k, letter);
    poly_automaton(p, k, &one, |i| conv_var(k, i, letter))
}

/// Automaton over `{a, ♯}` with language `(a⁺♯)^k` and `p(c̄)` runs on
/// `a^{c1}♯⋯a^{ck}♯`.
pub fn poly_automaton_sharp(p: &Polynomial, k: usize) -> Result<Nfa> {
    poly_automaton_sharp_letter(p, k, "a")
}

pub fn poly_automaton_sharp_letter(p: &Polynomial, k: usize, letter: &str) -> Result<Nfa> {
    let one = sharp_one(k, letter);
    poly_automaton(p, k, &one, |i| sharp_var(k, i + 1, letter))
}

/// `a^{c1}♯⋯a^{ck}♯` as letters.
pub fn sharp_word(c: &[u64], letter: &str) -> Vec<Symbol> {
    let mut w = Vec::new();
    for &x in c {
        w.extend((0..x).map(|_| Symbol::base(letter)));
        w.push(Symbol::base("#"));
    }
    w
}

/// `a^{c1}⊗⋯⊗a^{ck}` as tuple letters.
pub fn conv_word(c: &[u64], letter: &str) -> Vec<Symbol> {
    let tracks: Vec<Vec<&str>> = c.iter().map(|&x| vec![letter; x as usize]).collect();
    crate::conv::convolve(&tracks)
}

/// Evaluates `p` on every point of `{lo..=hi}^k`, reporting the image.
pub fn image_on_box(p: &Polynomial, k: usize, lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut point = vec![lo; k];
    loop {
        out.push(p.eval_u64(&point));
        let mut i = 0;
        loop {
            if i == k {
                out.sort_unstable();
                out.dedup();
                return out;
            }
            if point[i] < hi {
                point[i] += 1;
                break;
            }
            point[i] = lo;
            i += 1;
        }
    }
}

impl Polynomial {
    /// True when the polynomial is the constant 1.
    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|(e, &c)| c == 1 && e.iter().all(|&x| x == 0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn parse_and_print() {
        let p: Polynomial = "x1*x2+2".parse().unwrap();
        assert_eq!(p.vars(), 2);
        assert_eq!(p.eval_u64(&[2, 3]), 8);
        assert_eq!(p.to_string(), "x1*x2+2");
        let q: Polynomial = " 3 * x1 ^ 2 + x1^2 ".parse().unwrap();
        assert_eq!(q.to_string(), "4*x1^2");
        assert!("x0".parse::<Polynomial>().is_err());
        assert!("x1++1".parse::<Polynomial>().is_err());
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pairing_value(1, 1), 8);
        assert_eq!(pairing_value(1, 2), 14);
        assert_eq!(pairing_value(2, 3), 34);
        let x1 = Polynomial::var(2, 1);
        let x2 = Polynomial::var(2, 2);
        assert_eq!(pairing(&x1, &x2).eval_u64(&[2, 3]), 34);
    }

    #[test]
    fn variable_automata() {
        let a = poly_automaton_conv(&Polynomial::var(1, 1), 1).unwrap();
        assert_eq!(a.count_accepting_runs(&conv_word(&[3], "a")).unwrap(), BigUint::from(3u32));
        let s = poly_automaton_sharp(&Polynomial::var(2, 2), 2).unwrap();
        assert_eq!(s.count_accepting_runs(&sharp_word(&[2, 3], "a")).unwrap(), BigUint::from(3u32));
        let w = vec![Symbol::base("a"), Symbol::base("#")];
        assert_eq!(s.count_accepting_runs(&w).unwrap(), BigUint::zero());
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(matches!(poly_automaton_conv(&Polynomial::zero(1), 1), Err(Error::ZeroPolynomial)));
        assert!(matches!(poly_automaton_sharp(&Polynomial::zero(1), 1), Err(Error::ZeroPolynomial)));
    }
}
