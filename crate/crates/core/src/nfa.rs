//! Nondeterministic finite automata with exact accepting-run counts.
//!
//! The automaton is generic over its letter type so the same algorithms run on
//! printable [`Symbol`]s and on the compact tuple letters of the query engine.
//! Transitions are kept sorted by `(src, sym, dst)`; that order is the fixed
//! order on transitions used by run-lexicographic comparisons.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::state_cap;
use crate::symbol::Symbol;

/// Bound on letter types.
pub trait Letter: Clone + Eq + Hash + Ord + Debug {}
impl<T: Clone + Eq + Hash + Ord + Debug> Letter for T {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub src: usize,
    pub sym: usize,
    pub dst: usize,
}

impl Transition {
    pub fn new(src: usize, sym: usize, dst: usize) -> Self {
        Transition { src, sym, dst }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa<S = Symbol> {
    alphabet: Vec<S>,
    states: usize,
    initial: Vec<usize>,
    finals: Vec<bool>,
    transitions: Vec<Transition>,
    offsets: Vec<usize>,
}

impl<S: Letter> Nfa<S> {
    /// Builds an automaton, sorting and deduplicating transitions.
    pub fn new(
        alphabet: Vec<S>,
        states: usize,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(alphabet.len());
        for s in &alphabet {
            if !seen.insert(s) {
                return Err(Error::InvalidAutomaton(format!("duplicate letter {s:?}")));
            }
        }
        let mut init: Vec<usize> = initial.into_iter().collect();
        init.sort_unstable();
        init.dedup();
        let mut fin = vec![false; states];
        for f in finals {
            if f >= states {
                return Err(Error::InvalidAutomaton(format!("final state {f} out of range")));
            }
            fin[f] = true;
        }
        if let Some(&q) = init.iter().find(|&&q| q >= states) {
            return Err(Error::InvalidAutomaton(format!("initial state {q} out of range")));
        }
        let mut ts: Vec<Transition> = transitions.into_iter().collect();
        for t in &ts {
            if t.src >= states || t.dst >= states || t.sym >= alphabet.len() {
                return Err(Error::InvalidAutomaton(format!("transition {t:?} out of range")));
            }
        }
        ts.sort_unstable();
        ts.dedup();
        Ok(Self::from_sorted(alphabet, states, init, fin, ts))
    }

    fn from_sorted(
        alphabet: Vec<S>,
        states: usize,
        initial: Vec<usize>,
        finals: Vec<bool>,
        transitions: Vec<Transition>,
    ) -> Self {
        let mut offsets = vec![0usize; states + 1];
        for t in &transitions {
            offsets[t.src + 1] += 1;
        }
        for i in 0..states {
            offsets[i + 1] += offsets[i];
        }
        Nfa { alphabet, states, initial, finals, transitions, offsets }
    }

    /// The automaton with no states over `alphabet`.
    pub fn empty(alphabet: Vec<S>) -> Self {
        Self::from_sorted(alphabet, 0, vec![], vec![], vec![])
    }

    /// Accepts exactly the empty word.
    pub fn epsilon(alphabet: Vec<S>) -> Self {
        Self::from_sorted(alphabet, 1, vec![0], vec![true], vec![])
    }

    /// Deterministic trie accepting a finite set of words.
    pub fn from_words(alphabet: Vec<S>, words: &[Vec<S>]) -> Result<Self> {
        let index = letter_index(&alphabet);
        let mut trans: Vec<HashMap<usize, usize>> = vec![HashMap::new()];
        let mut finals = vec![];
        for w in words {
            let mut q = 0;
            for s in w {
                let sym = *index.get(s).ok_or_else(|| Error::UnknownLetter(format!("{s:?}")))?;
                let next = trans.len();
                q = *trans[q].entry(sym).or_insert(next);
                if q == next {
                    trans.push(HashMap::new());
                }
            }
            finals.push(q);
        }
        let ts = trans
            .iter()
            .enumerate()
            .flat_map(|(q, m)| m.iter().map(move |(&s, &d)| Transition::new(q, s, d)));
        Nfa::new(alphabet, trans.len(), [0], finals, ts.collect::<Vec<_>>())
    }

    pub fn alphabet(&self) -> &[S] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.states).filter(move |&q| self.finals[q])
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Outgoing transitions of `q`, sorted by letter then target.
    pub fn out(&self, q: usize) -> &[Transition] {
        &self.transitions[self.offsets[q]..self.offsets[q + 1]]
    }

    /// Indices in [`Nfa::transitions`] of the outgoing transitions of `q`.
    pub fn out_range(&self, q: usize) -> std::ops::Range<usize> {
        self.offsets[q]..self.offsets[q + 1]
    }

    /// Outgoing transitions of `q` on letter `sym`.
    pub fn out_on(&self, q: usize, sym: usize) -> &[Transition] {
        let out = self.out(q);
        let lo = out.partition_point(|t| t.sym < sym);
        let hi = lo + out[lo..].partition_point(|t| t.sym == sym);
        &out[lo..hi]
    }

    pub fn letter_map(&self) -> HashMap<&S, usize> {
        self.alphabet.iter().enumerate().map(|(i, s)| (s, i)).collect()
    }

    /// Translates a word to alphabet indices.
    pub fn word_indices(&self, word: &[S]) -> Result<Vec<usize>> {
        let map = self.letter_map();
        word.iter()
            .map(|s| map.get(s).copied().ok_or_else(|| Error::UnknownLetter(format!("{s:?}"))))
            .collect()
    }

    pub fn word_letters(&self, word: &[usize]) -> Vec<S> {
        word.iter().map(|&i| self.alphabet[i].clone()).collect()
    }

    pub fn accepts_indices(&self, word: &[usize]) -> bool {
        let mut cur = vec![false; self.states];
        for &q in &self.initial {
            cur[q] = true;
        }
        for &a in word {
            let mut next = vec![false; self.states];
            let mut any = false;
            for q in 0..self.states {
                if cur[q] {
                    for t in self.out_on(q, a) {
                        next[t.dst] = true;
                        any = true;
                    }
                }
            }
            if !any {
                return false;
            }
            cur = next;
        }
        (0..self.states).any(|q| cur[q] && self.finals[q])
    }

    pub fn accepts(&self, word: &[S]) -> bool {
        match self.word_indices(word) {
            Ok(w) => self.accepts_indices(&w),
            Err(_) => false,
        }
    }

    /// Number of accepting runs on a non-empty word, by propagating a
    /// state-indexed count vector.
    pub fn count_runs_indices(&self, word: &[usize]) -> Result<BigUint> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        let mut cur = vec![BigUint::zero(); self.states];
        for &q in &self.initial {
            cur[q] = BigUint::one();
        }
        for &a in word {
            let mut next = vec![BigUint::zero(); self.states];
            for (q, c) in cur.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for t in self.out_on(q, a) {
                    next[t.dst] += c;
                }
            }
            cur = next;
        }
        Ok(cur
            .into_iter()
            .enumerate()
            .filter(|(q, _)| self.finals[*q])
            .map(|(_, c)| c)
            .sum())
    }

    pub fn count_accepting_runs(&self, word: &[S]) -> Result<BigUint> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        match self.word_indices(word) {
            Ok(w) => self.count_runs_indices(&w),
            Err(_) => Ok(BigUint::zero()),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.initial.len() <= 1
            && self.transitions.windows(2).all(|w| (w[0].src, w[0].sym) != (w[1].src, w[1].sym))
    }

    /// States reachable from an initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states];
        let mut stack: Vec<usize> = self.initial.clone();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for t in self.out(q) {
                if !seen[t.dst] {
                    seen[t.dst] = true;
                    stack.push(t.dst);
                }
            }
        }
        seen
    }

    /// States from which a final state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let mut rev: Vec<Vec<usize>> = vec![vec![]; self.states];
        for t in &self.transitions {
            rev[t.dst].push(t.src);
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<usize> = self.finals().collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Keeps only the states marked in `keep`, renumbering in order.
    pub fn restrict_states(&self, keep: &[bool]) -> Nfa<S> {
        let mut map = vec![usize::MAX; self.states];
        let mut n = 0;
        for q in 0..self.states {
            if keep[q] {
                map[q] = n;
                n += 1;
            }
        }
        let initial = self.initial.iter().filter(|&&q| keep[q]).map(|&q| map[q]).collect();
        let finals = (0..self.states).filter(|&q| keep[q]).map(|q| self.finals[q]).collect();
        let ts = self
            .transitions
            .iter()
            .filter(|t| keep[t.src] && keep[t.dst])
            .map(|t| Transition::new(map[t.src], t.sym, map[t.dst]))
            .collect();
        Self::from_sorted(self.alphabet.clone(), n, initial, finals, ts)
    }

    /// The reversed automaton: initial and final states swap, transitions flip.
    /// Runs correspond one to one with runs of `self` on the mirrored word.
    pub fn reverse(&self) -> Nfa<S> {
        let ts = self.transitions.iter().map(|t| Transition::new(t.dst, t.sym, t.src)).collect::<Vec<_>>();
        Nfa::new(self.alphabet.clone(), self.states, self.finals(), self.initial.clone(), ts).expect("indices in range")
    }

    /// Removes useless states. Accepting runs are untouched.
    pub fn trim(&self) -> Nfa<S> {
        let r = self.reachable();
        let c = self.coreachable();
        let keep: Vec<bool> = r.iter().zip(&c).map(|(a, b)| *a && *b).collect();
        self.restrict_states(&keep)
    }

    pub fn is_empty(&self) -> bool {
        let r = self.reachable();
        !(0..self.states).any(|q| r[q] && self.finals[q])
    }

    /// Replaces the alphabet by a superset, renumbering letters.
    pub fn with_alphabet(&self, alphabet: Vec<S>) -> Result<Nfa<S>> {
        let index = letter_index(&alphabet);
        let mut map = Vec::with_capacity(self.alphabet.len());
        for s in &self.alphabet {
            map.push(
                *index
                    .get(s)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("{s:?} missing from target alphabet")))?,
            );
        }
        let ts = self.transitions.iter().map(|t| Transition::new(t.src, map[t.sym], t.dst));
        Nfa::new(alphabet, self.states, self.initial.clone(), self.finals(), ts.collect::<Vec<_>>())
    }

    /// Applies a letter-to-letter map; letters with equal images merge.
    pub fn map_letters<T: Letter>(&self, f: impl Fn(&S) -> T) -> Nfa<T> {
        let mut alphabet: Vec<T> = Vec::new();
        let mut index: HashMap<T, usize> = HashMap::new();
        let map: Vec<usize> = self
            .alphabet
            .iter()
            .map(|s| {
                let t = f(s);
                *index.entry(t.clone()).or_insert_with(|| {
                    alphabet.push(t);
                    alphabet.len() - 1
                })
            })
            .collect();
        let mut ts: Vec<Transition> =
            self.transitions.iter().map(|t| Transition::new(t.src, map[t.sym], t.dst)).collect();
        ts.sort_unstable();
        ts.dedup();
        Nfa::from_sorted(alphabet, self.states, self.initial.clone(), self.finals.clone(), ts)
    }

    /// Same language over the letters satisfying `keep`; others are dropped.
    pub fn filter_letters(&self, keep: impl Fn(&S) -> bool) -> Nfa<S> {
        let ok: Vec<bool> = self.alphabet.iter().map(&keep).collect();
        let ts = self.transitions.iter().filter(|t| ok[t.sym]).copied().collect();
        Self::from_sorted(self.alphabet.clone(), self.states, self.initial.clone(), self.finals.clone(), ts)
    }

    /// Disjoint union over the merged alphabet: run counts add.
    pub fn union_merged(&self, other: &Nfa<S>) -> Nfa<S> {
        let mut alphabet = self.alphabet.clone();
        let mut index = letter_index(&alphabet);
        let map: Vec<usize> = other
            .alphabet
            .iter()
            .map(|s| {
                *index.entry(s.clone()).or_insert_with(|| {
                    alphabet.push(s.clone());
                    alphabet.len() - 1
                })
            })
            .collect();
        let off = self.states;
        let mut ts = self.transitions.clone();
        ts.extend(other.transitions.iter().map(|t| Transition::new(t.src + off, map[t.sym], t.dst + off)));
        ts.sort_unstable();
        let mut initial = self.initial.clone();
        initial.extend(other.initial.iter().map(|q| q + off));
        let mut finals = self.finals.clone();
        finals.extend_from_slice(&other.finals);
        Self::from_sorted(alphabet, self.states + other.states, initial, finals, ts)
    }

    /// Synchronous product over the merged alphabet, reachable part only:
    /// run counts multiply.
    pub fn product_merged(&self, other: &Nfa<S>) -> Nfa<S> {
        let other_index = other.letter_map();
        let to_other: Vec<Option<usize>> =
            self.alphabet.iter().map(|s| other_index.get(s).copied()).collect();
        let mut alphabet = self.alphabet.clone();
        for s in &other.alphabet {
            if !self.alphabet.contains(s) {
                alphabet.push(s.clone());
            }
        }
        let starts: Vec<(usize, usize)> = self
            .initial
            .iter()
            .flat_map(|&p| other.initial.iter().map(move |&q| (p, q)))
            .collect();
        let (nfa, _) = explore_indexed(
            alphabet,
            starts,
            |&(p, q), out| {
                for t in self.out(p) {
                    if let Some(o) = to_other[t.sym] {
                        for u in other.out_on(q, o) {
                            out.push((t.sym, (t.dst, u.dst)));
                        }
                    }
                }
            },
            |&(p, q)| self.finals[p] && other.finals[q],
            usize::MAX,
        )
        .expect("uncapped exploration");
        nfa
    }

    /// Subset construction (reachable subsets, no sink state).
    pub fn determinize_with_cap(&self, cap: usize) -> Result<Nfa<S>> {
        if self.is_deterministic() {
            return Ok(self.clone());
        }
        let start: Vec<usize> = self.initial.clone();
        let (nfa, _) = explore_indexed(
            self.alphabet.clone(),
            vec![start],
            |set: &Vec<usize>, out| {
                let mut pairs: Vec<(usize, usize)> = Vec::new();
                for &q in set {
                    pairs.extend(self.out(q).iter().map(|t| (t.sym, t.dst)));
                }
                pairs.sort_unstable();
                pairs.dedup();
                let mut i = 0;
                while i < pairs.len() {
                    let sym = pairs[i].0;
                    let mut j = i;
                    let mut target = Vec::new();
                    while j < pairs.len() && pairs[j].0 == sym {
                        target.push(pairs[j].1);
                        j += 1;
                    }
                    out.push((sym, target));
                    i = j;
                }
            },
            |set| set.iter().any(|&q| self.finals[q]),
            cap,
        )?;
        Ok(nfa)
    }

    pub fn determinize(&self) -> Result<Nfa<S>> {
        self.determinize_with_cap(state_cap())
    }

    /// Minimal partial DFA of the language, states numbered in BFS order.
    pub fn minimize(&self) -> Result<Nfa<S>> {
        let dfa = self.determinize()?.trim();
        if dfa.states == 0 {
            return Ok(Nfa::empty(self.alphabet.clone()));
        }
        let n = dfa.states;
        let mut class: Vec<usize> = (0..n).map(|q| usize::from(dfa.finals[q])).collect();
        let mut count = class.iter().copied().collect::<HashSet<_>>().len();
        loop {
            let mut sig_index: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let sig: Vec<(usize, usize)> = dfa.out(q).iter().map(|t| (t.sym, class[t.dst])).collect();
                let len = sig_index.len();
                next[q] = *sig_index.entry((class[q], sig)).or_insert(len);
            }
            let new_count = sig_index.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // Renumber classes in BFS order from the start state.
        let start = class[dfa.initial[0]];
        let mut rep = vec![usize::MAX; count];
        for q in 0..n {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let mut order = vec![usize::MAX; count];
        let mut queue = VecDeque::from([start]);
        order[start] = 0;
        let mut next_id = 1;
        let mut ts = Vec::new();
        let mut finals = Vec::new();
        while let Some(c) = queue.pop_front() {
            let q = rep[c];
            if dfa.finals[q] {
                finals.push(order[c]);
            }
            for t in dfa.out(q) {
                let d = class[t.dst];
                if order[d] == usize::MAX {
                    order[d] = next_id;
                    next_id += 1;
                    queue.push_back(d);
                }
                ts.push(Transition::new(order[c], t.sym, order[d]));
            }
        }
        Nfa::new(self.alphabet.clone(), next_id, [0], finals, ts)
    }

    /// Words of `universe` not accepted by `self`; the result lives on the
    /// universe's letters.
    pub fn complement_within(&self, universe: &Nfa<S>) -> Result<Nfa<S>> {
        let det = self.determinize()?;
        let to_det: HashMap<&S, usize> = det.letter_map();
        let umap: Vec<Option<usize>> = universe.alphabet.iter().map(|s| to_det.get(s).copied()).collect();
        let d0 = det.initial.first().copied();
        let starts: Vec<(Option<usize>, usize)> = universe.initial.iter().map(|&u| (d0, u)).collect();
        let (nfa, _) = explore_indexed(
            universe.alphabet.clone(),
            starts,
            |&(d, u), out| {
                for t in universe.out(u) {
                    let nd = match (d, umap[t.sym]) {
                        (Some(d), Some(s)) => det.out_on(d, s).first().map(|x| x.dst),
                        _ => None,
                    };
                    out.push((t.sym, (nd, t.dst)));
                }
            },
            |&(d, u)| universe.finals[u] && d.map_or(true, |d| !det.finals[d]),
            state_cap(),
        )?;
        Ok(nfa)
    }

    /// True when `L(other) ⊆ L(self)`.
    pub fn includes(&self, other: &Nfa<S>) -> Result<bool> {
        Ok(self.complement_within(other)?.is_empty())
    }

    /// Language equality through inclusion both ways.
    pub fn equivalent(&self, other: &Nfa<S>) -> Result<bool> {
        Ok(self.includes(other)? && other.includes(self)?)
    }

    /// True when the trimmed automaton has a cycle (the language is infinite).
    pub fn has_useful_cycle(&self) -> bool {
        let t = self.trim();
        // Kahn's algorithm: a cycle exists iff not every state gets removed.
        let mut indeg = vec![0usize; t.states];
        for tr in &t.transitions {
            indeg[tr.dst] += 1;
        }
        let mut stack: Vec<usize> = (0..t.states).filter(|&q| indeg[q] == 0).collect();
        let mut removed = 0;
        while let Some(q) = stack.pop() {
            removed += 1;
            for tr in t.out(q) {
                indeg[tr.dst] -= 1;
                if indeg[tr.dst] == 0 {
                    stack.push(tr.dst);
                }
            }
        }
        removed < t.states
    }

    /// Number of accepted words.
    pub fn cardinality(&self) -> Result<ExtendedCount> {
        if self.has_useful_cycle() {
            return Ok(ExtendedCount::Infinite);
        }
        let dfa = self.trim().determinize()?.trim();
        // Acyclic: count paths by memoized DFS.
        let mut memo: Vec<Option<BigUint>> = vec![None; dfa.states];
        fn paths<S: Letter>(d: &Nfa<S>, q: usize, memo: &mut Vec<Option<BigUint>>) -> BigUint {
            if let Some(v) = &memo[q] {
                return v.clone();
            }
            let mut total = if d.finals[q] { BigUint::one() } else { BigUint::zero() };
            for t in d.out(q) {
                total += paths(d, t.dst, memo);
            }
            memo[q] = Some(total.clone());
            total
        }
        let total = dfa.initial.iter().map(|&q| paths(&dfa, q, &mut memo)).sum();
        Ok(ExtendedCount::Finite(total))
    }

    /// Up to `limit` accepted words in length-lexicographic order, letters
    /// ranked by alphabet position.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<Vec<S>>> {
        let rank: Vec<usize> = (0..self.alphabet.len()).collect();
        self.enumerate_ranked(limit, usize::MAX, &rank)
    }

    /// Llex enumeration with an explicit letter ranking and a length bound.
    pub fn enumerate_ranked(&self, limit: usize, max_len: usize, rank: &[usize]) -> Result<Vec<Vec<S>>> {
        Ok(self
            .enumerate_indices(limit, max_len, rank)?
            .into_iter()
            .map(|w| self.word_letters(&w))
            .collect())
    }

    /// Llex enumeration returning alphabet indices.
    pub fn enumerate_indices(&self, limit: usize, max_len: usize, rank: &[usize]) -> Result<Vec<Vec<usize>>> {
        let dfa = self.trim().determinize()?.trim();
        let mut out = Vec::new();
        if dfa.states == 0 || limit == 0 {
            return Ok(out);
        }
        let cyclic = dfa.has_useful_cycle();
        let bound = if cyclic { max_len } else { max_len.min(dfa.states) };
        // Transitions per state sorted by rank.
        let mut succ: Vec<Vec<(usize, usize)>> = (0..dfa.states)
            .map(|q| dfa.out(q).iter().map(|t| (t.sym, t.dst)).collect())
            .collect();
        for s in &mut succ {
            s.sort_by_key(|&(sym, _)| rank[sym]);
        }
        // exact[r][q]: a final state is reachable from q in exactly r steps.
        let mut exact: Vec<Vec<bool>> = vec![dfa.finals.clone()];
        let start = dfa.initial[0];
        let mut len = 0;
        while len <= bound && out.len() < limit {
            while exact.len() <= len {
                let prev = exact.last().unwrap();
                let row: Vec<bool> = (0..dfa.states).map(|q| succ[q].iter().any(|&(_, d)| prev[d])).collect();
                if !cyclic && row.iter().all(|b| !b) && exact.len() > dfa.states {
                    break;
                }
                exact.push(row);
            }
            if exact.len() <= len {
                break;
            }
            if exact[len][start] {
                let mut word = Vec::with_capacity(len);
                dfs_words(&succ, &exact, start, len, &mut word, &mut out, limit);
            }
            len += 1;
        }
        Ok(out)
    }

    /// Runs with at most `limit` words: all accepted words of length at most `max_len`.
    pub fn words_up_to(&self, max_len: usize) -> Result<Vec<Vec<S>>> {
        let rank: Vec<usize> = (0..self.alphabet.len()).collect();
        self.enumerate_ranked(usize::MAX, max_len, &rank)
    }
}

fn dfs_words(
    succ: &[Vec<(usize, usize)>],
    exact: &[Vec<bool>],
    q: usize,
    remaining: usize,
    word: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if remaining == 0 {
        out.push(word.clone());
        return;
    }
    for &(sym, d) in &succ[q] {
        if exact[remaining - 1][d] {
            word.push(sym);
            dfs_words(succ, exact, d, remaining - 1, word, out, limit);
            word.pop();
            if out.len() >= limit {
                return;
            }
        }
    }
}

pub(crate) fn letter_index<S: Letter>(alphabet: &[S]) -> HashMap<S, usize> {
    alphabet.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()
}

type Explored<K> = (usize, Vec<usize>, Vec<usize>, Vec<Transition>, Vec<K>);

fn explore_core<K, F, G>(starts: Vec<K>, mut succ: F, mut is_final: G, cap: usize) -> Result<Explored<K>>
where
    K: Clone + Eq + Hash,
    F: FnMut(&K, &mut Vec<(usize, K)>),
    G: FnMut(&K) -> bool,
{
    let mut ids: HashMap<K, usize> = HashMap::new();
    let mut keys: Vec<K> = Vec::new();
    let mut initial = Vec::new();
    for k in starts {
        let id = *ids.entry(k.clone()).or_insert_with(|| {
            keys.push(k);
            keys.len() - 1
        });
        initial.push(id);
    }
    if keys.len() > cap {
        return Err(Error::StateCap { cap });
    }
    let mut ts = Vec::new();
    let mut buf = Vec::new();
    let mut i = 0;
    while i < keys.len() {
        buf.clear();
        let k = keys[i].clone();
        succ(&k, &mut buf);
        for (sym, dk) in buf.drain(..) {
            let d = match ids.get(&dk) {
                Some(&d) => d,
                None => {
                    keys.push(dk.clone());
                    ids.insert(dk, keys.len() - 1);
                    if keys.len() > cap {
                        return Err(Error::StateCap { cap });
                    }
                    keys.len() - 1
                }
            };
            ts.push(Transition::new(i, sym, d));
        }
        i += 1;
    }
    let finals: Vec<usize> = (0..keys.len()).filter(|&q| is_final(&keys[q])).collect();
    Ok((keys.len(), initial, finals, ts, keys))
}

/// Breadth-first construction of the reachable part of an implicitly given
/// automaton whose letters are indices into `alphabet`. Returns the automaton
/// and the key of every state.
pub fn explore_indexed<K, S, F, G>(
    alphabet: Vec<S>,
    starts: Vec<K>,
    succ: F,
    is_final: G,
    cap: usize,
) -> Result<(Nfa<S>, Vec<K>)>
where
    K: Clone + Eq + Hash,
    S: Letter,
    F: FnMut(&K, &mut Vec<(usize, K)>),
    G: FnMut(&K) -> bool,
{
    let (n, initial, finals, ts, keys) = explore_core(starts, succ, is_final, cap)?;
    Ok((Nfa::new(alphabet, n, initial, finals, ts)?, keys))
}

/// Like [`explore_indexed`] but with letters given by value; letters missing
/// from `alphabet` are appended in order of first use.
pub fn explore<K, S, F, G>(alphabet: Vec<S>, starts: Vec<K>, mut succ: F, is_final: G, cap: usize) -> Result<(Nfa<S>, Vec<K>)>
where
    K: Clone + Eq + Hash,
    S: Letter,
    F: FnMut(&K, &mut Vec<(S, K)>),
    G: FnMut(&K) -> bool,
{
    let mut index = letter_index(&alphabet);
    let mut letters = alphabet;
    let mut buf: Vec<(S, K)> = Vec::new();
    let (n, initial, finals, ts, keys) = explore_core(
        starts,
        |k, out| {
            buf.clear();
            succ(k, &mut buf);
            for (s, d) in buf.drain(..) {
                let sym = match index.get(&s) {
                    Some(&i) => i,
                    None => {
                        letters.push(s.clone());
                        index.insert(s, letters.len() - 1);
                        letters.len() - 1
                    }
                };
                out.push((sym, d));
            }
        },
        is_final,
        cap,
    )?;
    Ok((Nfa::new(letters, n, initial, finals, ts)?, keys))
}

/// Cardinality of a language: finite with an exact count, or infinite.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedCount {
    Finite(BigUint),
    Infinite,
}

impl ExtendedCount {
    pub fn finite(n: u64) -> Self {
        ExtendedCount::Finite(BigUint::from(n))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedCount::Finite(n) if n.is_zero())
    }
}

impl std::fmt::Display for ExtendedCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedCount::Finite(n) => write!(f, "{n}"),
            ExtendedCount::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedCount {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        match self {
            ExtendedCount::Finite(n) => match u64::try_from(n.clone()) {
                Ok(v) => s.serialize_u64(v),
                Err(_) => s.serialize_str(&n.to_string()),
            },
            ExtendedCount::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(ExtendedCount::finite)
                .ok_or_else(|| serde::de::Error::custom("count must be a natural number")),
            serde_json::Value::String(s) if s == "inf" => Ok(ExtendedCount::Infinite),
            serde_json::Value::String(s) => s
                .parse::<BigUint>()
                .map(ExtendedCount::Finite)
                .map_err(|_| serde::de::Error::custom("bad count")),
            _ => Err(serde::de::Error::custom("bad count")),
        }
    }
}

/// The set of letters of two alphabets must coincide.
pub(crate) fn same_letter_set<S: Letter>(a: &[S], b: &[S]) -> Result<()> {
    let x: HashSet<&S> = a.iter().collect();
    let y: HashSet<&S> = b.iter().collect();
    if x == y {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(format!(
            "{} letters vs {} letters, {} in common",
            x.len(),
            y.len(),
            x.intersection(&y).count()
        )))
    }
}

/// `A1 ⊎ A2`; run counts add. Both automata must use the same letters.
pub fn nfa_union<S: Letter>(a1: &Nfa<S>, a2: &Nfa<S>) -> Result<Nfa<S>> {
    same_letter_set(&a1.alphabet, &a2.alphabet)?;
    Ok(a1.union_merged(a2))
}

/// `A1 × A2`; run counts multiply. Both automata must use the same letters.
pub fn nfa_product<S: Letter>(a1: &Nfa<S>, a2: &Nfa<S>) -> Result<Nfa<S>> {
    same_letter_set(&a1.alphabet, &a2.alphabet)?;
    Ok(a1.product_merged(a2))
}

/// `D ⊎ A` with `D` determinized first.
pub fn guarded_union<S: Letter>(d: &Nfa<S>, a: &Nfa<S>) -> Result<Nfa<S>> {
    Ok(d.determinize()?.union_merged(a))
}

/// `D × A` with `D` determinized first, so runs of `A` are preserved on `L(D)`.
pub fn guarded_product<S: Letter>(d: &Nfa<S>, a: &Nfa<S>) -> Result<Nfa<S>> {
    Ok(d.determinize()?.product_merged(a).trim())
}

/// `D · L(A)` for an unambiguous product; verification is on in debug builds.
pub fn concat_unambiguous<S: Letter>(d: &Nfa<S>, a: &Nfa<S>) -> Result<Nfa<S>> {
    concat_unambiguous_with(d, a, cfg!(debug_assertions))
}

pub fn concat_unambiguous_with<S: Letter>(d: &Nfa<S>, a: &Nfa<S>, verify: bool) -> Result<Nfa<S>> {
    let dfa = d.determinize()?.trim();
    if verify {
        let a_dfa = a.minimize()?;
        let check = concat_raw(&dfa, &a_dfa);
        if is_ambiguous(&check.0, check.1) {
            return Err(Error::Ambiguous);
        }
    }
    Ok(concat_raw(&dfa, a).0)
}

/// States `0..n` of the result belong to the DFA part, the rest to `A`.
fn concat_raw<S: Letter>(dfa: &Nfa<S>, a: &Nfa<S>) -> (Nfa<S>, usize) {
    let merged = dfa.union_merged(a);
    let off = dfa.states;
    let mut ts = merged.transitions.clone();
    for t in &merged.transitions {
        if t.src < off && dfa.finals[t.dst] {
            for &p in &a.initial {
                ts.push(Transition::new(t.src, t.sym, p + off));
            }
        }
    }
    let mut initial: Vec<usize> = dfa.initial.clone();
    if dfa.initial.iter().any(|&q| dfa.finals[q]) {
        initial.extend(a.initial.iter().map(|q| q + off));
    }
    let finals: Vec<usize> = a.finals().map(|q| q + off).collect();
    let nfa = Nfa::new(merged.alphabet, merged.states, initial, finals, ts).expect("indices in range");
    (nfa, off)
}

/// Self-product search for two distinct accepting runs. Used on a
/// concatenation of two DFAs, where distinct runs mean distinct split points.
fn is_ambiguous<S: Letter>(m: &Nfa<S>, _split: usize) -> bool {
    let starts: Vec<(usize, usize, bool)> = m
        .initial
        .iter()
        .flat_map(|&p| m.initial.iter().map(move |&q| (p, q, p != q)))
        .collect();
    let (prod, _) = explore_indexed(
        m.alphabet.clone(),
        starts,
        |&(p, q, diff), out| {
            for t in m.out(p) {
                for u in m.out_on(q, t.sym) {
                    out.push((t.sym, (t.dst, u.dst, diff || t.dst != u.dst)));
                }
            }
        },
        |&(p, q, diff)| diff && m.finals[p] && m.finals[q],
        usize::MAX,
    )
    .expect("uncapped exploration");
    !prod.is_empty()
}

/// The run automaton of `A`: same states, one letter per transition.
#[derive(Clone, Debug)]
pub struct RunAutomaton<S = Symbol> {
    pub nfa: Nfa<S>,
    /// Letter index of the source transition's symbol, per run letter.
    pub projection: Vec<usize>,
}

/// Builds `Run_A`, naming the letter of transition `i` by `name(i)`.
pub fn run_automaton_named<S: Letter, T: Letter>(a: &Nfa<S>, name: impl Fn(usize) -> T) -> RunAutomaton<T> {
    let alphabet: Vec<T> = (0..a.transitions.len()).map(&name).collect();
    let ts: Vec<Transition> =
        a.transitions.iter().enumerate().map(|(i, t)| Transition::new(t.src, i, t.dst)).collect();
    let projection = a.transitions.iter().map(|t| t.sym).collect();
    let nfa = Nfa::new(alphabet, a.states, a.initial.clone(), a.finals(), ts).expect("run letters are distinct");
    RunAutomaton { nfa, projection }
}

/// `Run_A` with letters `t0, t1, …` in transition order.
pub fn run_automaton<S: Letter>(a: &Nfa<S>) -> RunAutomaton<Symbol> {
    run_automaton_named(a, |i| Symbol::Base(format!("t{i}")))
}

impl<T: Letter> RunAutomaton<T> {
    /// Letterwise projection of a run word to the source automaton's letters.
    pub fn project<S: Letter>(&self, source: &Nfa<S>, run: &[usize]) -> Vec<S> {
        run.iter().map(|&r| source.alphabet[self.projection[r]].clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Symbol {
        Symbol::base(s)
    }

    fn ab() -> Vec<Symbol> {
        vec![sym("a"), sym("b")]
    }

    /// a* b
    fn astar_b() -> Nfa {
        Nfa::new(ab(), 2, [0], [1], [Transition::new(0, 0, 0), Transition::new(0, 1, 1)]).unwrap()
    }

    #[test]
    fn transitions_are_sorted_and_unique() {
        let n = Nfa::new(
            ab(),
            2,
            [0],
            [1],
            [Transition::new(1, 0, 0), Transition::new(0, 1, 1), Transition::new(0, 1, 1)],
        )
        .unwrap();
        assert_eq!(n.transitions(), &[Transition::new(0, 1, 1), Transition::new(1, 0, 0)]);
        assert!(Nfa::new(ab(), 1, [0], [3], []).is_err());
    }

    #[test]
    fn empty_word_has_no_run_count() {
        assert!(matches!(astar_b().count_accepting_runs(&[]), Err(Error::EmptyWord)));
    }

    #[test]
    fn cardinality_and_enumeration() {
        assert_eq!(astar_b().cardinality().unwrap(), ExtendedCount::Infinite);
        let fin = Nfa::from_words(ab(), &[vec![sym("a"), sym("b")], vec![sym("b")]]).unwrap();
        assert_eq!(fin.cardinality().unwrap(), ExtendedCount::finite(2));
        assert_eq!(fin.enumerate(10).unwrap(), vec![vec![sym("b")], vec![sym("a"), sym("b")]]);
        let astar = Nfa::new(vec![sym("a")], 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
        assert_eq!(
            astar.enumerate(3).unwrap(),
            vec![vec![], vec![sym("a")], vec![sym("a"), sym("a")]]
        );
    }

    #[test]
    fn complement_and_inclusion() {
        let a = vec![sym("a")];
        let astar = Nfa::new(a.clone(), 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
        let aplus = Nfa::new(a.clone(), 2, [0], [1], [Transition::new(0, 0, 1), Transition::new(1, 0, 1)]).unwrap();
        let c = aplus.complement_within(&astar).unwrap();
        assert_eq!(c.enumerate(5).unwrap(), vec![Vec::<Symbol>::new()]);
        let aplus_a = concat_unambiguous(&aplus, &Nfa::from_words(a.clone(), &[vec![sym("a")]]).unwrap()).unwrap();
        assert!(aplus.includes(&aplus_a).unwrap());
        assert!(!aplus_a.includes(&aplus).unwrap());
    }

    #[test]
    fn ambiguous_concatenation_is_rejected() {
        let a = vec![sym("a")];
        let astar = Nfa::new(a.clone(), 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
        let aplus = Nfa::new(a.clone(), 2, [0], [1], [Transition::new(0, 0, 1), Transition::new(1, 0, 1)]).unwrap();
        assert!(matches!(concat_unambiguous_with(&astar, &aplus, true), Err(Error::Ambiguous)));
    }

    #[test]
    fn minimize_merges_equivalent_states() {
        // Two parallel copies of a*b.
        let n = astar_b().union_merged(&astar_b());
        let m = n.minimize().unwrap();
        assert_eq!(m.state_count(), 2);
        assert!(m.equivalent(&astar_b()).unwrap());
    }

    #[test]
    fn determinize_respects_cap() {
        // (a|b)* a (a|b)^6 needs 2^7 subsets.
        let mut ts = vec![Transition::new(0, 0, 0), Transition::new(0, 1, 0), Transition::new(0, 0, 1)];
        for i in 1..7 {
            ts.push(Transition::new(i, 0, i + 1));
            ts.push(Transition::new(i, 1, i + 1));
        }
        let n = Nfa::new(ab(), 8, [0], [7], ts).unwrap();
        assert!(matches!(n.determinize_with_cap(50), Err(Error::StateCap { cap: 50 })));
        assert_eq!(n.determinize_with_cap(1000).unwrap().state_count(), 128);
    }
}
