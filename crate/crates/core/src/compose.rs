//! Building presentations from parts: disjoint unions, counter copies and
//! synchronous products of one-track languages whose letters are names.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::conv::AlphabetOrder;
use crate::error::{Error, Result};
use crate::fo::{Presentation, Relation};
use crate::limits::state_cap;
use crate::nfa::{explore, Nfa, Transition};
use crate::symbol::Symbol;

/// Disjoint union of presentations over disjoint alphabets with the same
/// relation names.
pub fn disjoint_union(parts: &[&Presentation]) -> Result<Presentation> {
    let (first, rest) = parts.split_first().ok_or_else(|| Error::Parameters("empty union".into()))?;
    let mut letters: Vec<String> = first.order().letters().to_vec();
    let mut domain = first.domain().clone();
    let mut rels: BTreeMap<String, Relation> = first.relations().clone();
    for p in rest {
        for l in p.order().letters() {
            if letters.contains(l) {
                return Err(Error::Parameters(format!("letter {l} occurs in two components")));
            }
            letters.push(l.clone());
        }
        domain = domain.union_merged(p.domain());
        for (name, r) in rels.iter_mut() {
            let other = p.relation(name)?;
            if other.arity != r.arity {
                return Err(Error::Arity { name: name.clone(), expected: r.arity, got: other.arity });
            }
            r.automaton = r.automaton.union_merged(&other.automaton);
        }
        if p.relations().len() != rels.len() {
            return Err(Error::Parameters("components declare different relations".into()));
        }
    }
    Presentation::new(AlphabetOrder::new(letters)?, domain, rels)
}

pub(crate) const DOLLAR: &str = "$";

/// Name of the letter carrying counter symbol `s` (or pad) over `l` (or pad).
pub(crate) fn counter_letter(dollar: bool, l: Option<&str>) -> Option<String> {
    match (dollar, l) {
        (false, None) => None,
        (d, l) => Some(Symbol::Tuple(vec![d.then(|| DOLLAR.to_string()), l.map(String::from)]).flat_name()),
    }
}

/// Puts a counter track `$^j` under every track of `m`, the same `j` on all
/// tracks; `entries` reads a letter of `m` as its tracks.
pub(crate) fn with_counter(m: &Nfa, entries: impl Fn(&Symbol) -> Vec<Option<String>>, build: impl Fn(Vec<Option<String>>) -> Symbol) -> Result<Nfa> {
    let n = m.state_count();
    let tail = 2 * n;
    let mut alphabet: Vec<Symbol> = Vec::new();
    let mut index: HashMap<Symbol, usize> = HashMap::new();
    let mut sym = |s: Symbol| -> usize {
        *index.entry(s.clone()).or_insert_with(|| {
            alphabet.push(s);
            alphabet.len() - 1
        })
    };
    let mut arity = 1;
    let mut ts = Vec::new();
    for t in m.transitions() {
        let e = entries(&m.alphabet()[t.sym]);
        arity = e.len();
        let with: Vec<Option<String>> = e.iter().map(|x| counter_letter(true, x.as_deref())).collect();
        ts.push(Transition::new(t.src, sym(build(with)), t.dst));
        let without: Vec<Option<String>> = e.iter().map(|x| counter_letter(false, x.as_deref())).collect();
        if without.iter().any(Option::is_some) {
            let s = sym(build(without));
            ts.push(Transition::new(t.src, s, n + t.dst));
            ts.push(Transition::new(n + t.src, s, n + t.dst));
        }
    }
    let pad_only = sym(build(vec![counter_letter(true, None); arity]));
    for q in m.finals() {
        ts.push(Transition::new(q, pad_only, tail));
    }
    ts.push(Transition::new(tail, pad_only, tail));
    let finals: Vec<usize> = m.finals().flat_map(|q| [q, n + q]).chain([tail]).collect();
    Ok(Nfa::new(alphabet, tail + 1, m.initial().to_vec(), finals, ts)?.trim())
}

/// `ℵ₀` disjoint copies: copy `j` is `$^j ⊗ D`, relations hold within a copy.
pub fn aleph0_copies(p: &Presentation) -> Result<Presentation> {
    let mut letters = vec![counter_letter(true, None).expect("named")];
    for l in p.order().letters() {
        letters.push(counter_letter(true, Some(l)).expect("named"));
        letters.push(counter_letter(false, Some(l)).expect("named"));
    }
    let base = |s: &Symbol| vec![Some(s.as_base().map_or_else(|| s.to_string(), String::from))];
    let domain = with_counter(p.domain(), base, |e| Symbol::Base(e[0].clone().expect("non-pad")))?;
    let mut rels = BTreeMap::new();
    for (name, r) in p.relations() {
        let entries = |s: &Symbol| match s {
            Symbol::Base(b) => vec![Some(b.clone())],
            Symbol::Tuple(e) => e.clone(),
        };
        let a = with_counter(&r.automaton, entries, Symbol::Tuple)?;
        rels.insert(name.clone(), Relation::new(r.arity, a)?);
    }
    Presentation::new(AlphabetOrder::new(letters)?, domain, rels)
}

/// The letter name of a one-track letter: base letters keep their name,
/// tuple letters are flattened.
pub(crate) fn name_of(s: &Symbol) -> String {
    match s {
        Symbol::Base(b) => b.clone(),
        Symbol::Tuple(_) => s.flat_name(),
    }
}

/// Same language with every letter turned into a base letter.
pub(crate) fn flatten(m: &Nfa) -> Nfa {
    m.map_letters(|s| Symbol::Base(name_of(s)))
}

/// Reads a one-track relation letter (base or 1-tuple) as its name.
pub(crate) fn track_name(s: &Symbol) -> String {
    match s {
        Symbol::Tuple(e) if e.len() == 1 => e[0].clone().expect("non-pad"),
        _ => name_of(s),
    }
}

/// `$* ⊗ L` for a language over base letters.
pub(crate) fn wrap_language(m: &Nfa) -> Result<Nfa> {
    with_counter(m, |s| vec![Some(name_of(s))], |e| Symbol::Base(e[0].clone().expect("non-pad")))
}

/// Inverse of the counter letter names over `inner`: name to
/// (carries `$`, inner letter).
pub(crate) fn counter_decode<'a>(inner: impl IntoIterator<Item = &'a str>) -> HashMap<String, (bool, Option<String>)> {
    let mut out = HashMap::new();
    out.insert(counter_letter(true, None).expect("named"), (true, None));
    for l in inner {
        for d in [true, false] {
            out.insert(counter_letter(d, Some(l)).expect("named"), (d, Some(l.to_string())));
        }
    }
    out
}

/// The single word `w` over its own letters.
pub(crate) fn word_language(w: &[String]) -> Nfa {
    let mut alphabet: Vec<Symbol> = Vec::new();
    for l in w {
        let s = Symbol::base(l.clone());
        if !alphabet.contains(&s) {
            alphabet.push(s);
        }
    }
    let word: Vec<Symbol> = w.iter().map(|l| Symbol::base(l.clone())).collect();
    Nfa::from_words(alphabet, &[word]).expect("letters present")
}

/// `l⁺` or `l*` over one letter.
pub(crate) fn repeat(letter: &str, at_least: usize) -> Nfa {
    let n = at_least + 1;
    let mut ts: Vec<Transition> = (0..at_least).map(|q| Transition::new(q, 0, q + 1)).collect();
    ts.push(Transition::new(at_least, 0, at_least));
    Nfa::new(vec![Symbol::base(letter)], n, [0], [at_least], ts).expect("well-formed")
}

/// Product of an automaton with a deterministic monitor reading its letters.
pub(crate) fn monitor<M: Clone + Eq + Hash>(
    m: &Nfa,
    init: M,
    step: impl Fn(&M, &Symbol) -> Option<M>,
    accept: impl Fn(&M) -> bool,
) -> Result<Nfa> {
    let starts = m.initial().iter().map(|&q| (q, init.clone())).collect();
    let (out, _) = explore(
        m.alphabet().to_vec(),
        starts,
        |(q, s): &(usize, M), out| {
            for t in m.out(*q) {
                if let Some(n) = step(s, &m.alphabet()[t.sym]) {
                    out.push((m.alphabet()[t.sym].clone(), (t.dst, n)));
                }
            }
        },
        |(q, s)| m.is_final(*q) && accept(s),
        state_cap(),
    )?;
    Ok(out.trim())
}

/// The relation `{(u, v) : u ∈ L(left), v ∈ L(right)}` cut down by a
/// deterministic monitor over letter pairs (`None` is the pad). Both
/// automata are over base letters; the result has 2-tuple letters.
pub(crate) fn conv_pair<M: Clone + Eq + Hash>(
    left: &Nfa,
    right: &Nfa,
    init: M,
    step: impl Fn(&M, Option<&str>, Option<&str>) -> Option<M>,
    accept: impl Fn(&M) -> bool,
) -> Result<Nfa> {
    type Key<M> = (Option<usize>, Option<usize>, M);
    let moves = |m: &Nfa, q: Option<usize>| -> Vec<(Option<String>, Option<usize>)> {
        match q {
            None => vec![(None, None)],
            Some(q) => {
                let mut v: Vec<_> =
                    m.out(q).iter().map(|t| (Some(name_of(&m.alphabet()[t.sym])), Some(t.dst))).collect();
                if m.is_final(q) {
                    v.push((None, None));
                }
                v
            }
        }
    };
    let mut starts: Vec<Key<M>> = Vec::new();
    for &p in left.initial() {
        for &q in right.initial() {
            starts.push((Some(p), Some(q), init.clone()));
        }
    }
    let (out, _) = explore(
        vec![],
        starts,
        |(p, q, s): &Key<M>, out| {
            for (l, p2) in moves(left, *p) {
                for (r, q2) in moves(right, *q) {
                    if l.is_none() && r.is_none() {
                        continue;
                    }
                    if let Some(n) = step(s, l.as_deref(), r.as_deref()) {
                        out.push((Symbol::Tuple(vec![l.clone(), r.clone()]), (p2, q2, n)));
                    }
                }
            }
        },
        |(p, q, s)| p.map_or(true, |p| left.is_final(p)) && q.map_or(true, |q| right.is_final(q)) && accept(s),
        state_cap(),
    )?;
    Ok(out.trim())
}

/// Union of relation automata with the same arity.
pub(crate) fn union_all(parts: &[Nfa]) -> Nfa {
    let mut it = parts.iter();
    let first = it.next().cloned().unwrap_or_else(|| Nfa::empty(vec![]));
    it.fold(first, |acc, p| acc.union_merged(p))
}

/// Letters of a domain in first-use order, as an alphabet order.
pub(crate) fn order_of(domain: &Nfa, extra: &[&Nfa]) -> Result<AlphabetOrder> {
    let mut letters: Vec<String> = domain.alphabet().iter().map(name_of).collect();
    for m in extra {
        for s in m.alphabet() {
            let names: Vec<String> = match s {
                Symbol::Base(b) => vec![b.clone()],
                Symbol::Tuple(e) => e.iter().flatten().cloned().collect(),
            };
            for n in names {
                if !letters.contains(&n) {
                    letters.push(n);
                }
            }
        }
    }
    AlphabetOrder::new(letters)
}

/// Presentation with the single binary relation `E`.
pub(crate) fn edge_presentation(domain: Nfa, edges: Nfa) -> Result<Presentation> {
    let domain = domain.trim();
    let edges = edges.trim();
    let order = order_of(&domain, &[&edges])?;
    let mut rels = BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, edges)?);
    Presentation::new(order, domain, rels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_with_length_monitor() {
        // (a^m, b^n) with m < n.
        let r = conv_pair(&repeat("a", 1), &repeat("b", 1), false, |_, l, r| Some(l.is_none() && r.is_some()), |s| *s)
            .unwrap();
        let t = |l: Option<&str>, r: Option<&str>| Symbol::Tuple(vec![l.map(String::from), r.map(String::from)]);
        assert!(r.accepts(&[t(Some("a"), Some("b")), t(None, Some("b"))]));
        assert!(!r.accepts(&[t(Some("a"), Some("b"))]));
        assert!(!r.accepts(&[t(Some("a"), Some("b")), t(Some("a"), None)]));
    }

    #[test]
    fn counter_names_round_trip() {
        let d = counter_decode(["x"]);
        assert_eq!(d[&counter_letter(false, Some("x")).unwrap()], (false, Some("x".to_string())));
        let w = wrap_language(&repeat("x", 1)).unwrap();
        assert!(w.alphabet().iter().all(|s| d.contains_key(s.as_base().unwrap())));
    }
}
