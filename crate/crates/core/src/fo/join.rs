//! Synchronized products of relation automata over shared tracks.
//!
//! A join reads one convolution over the union of the tracks of its parts.
//! Generator parts propose letters; filter parts only check them. Each
//! generator may stop once final, after which its tracks read pad.

use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;

use smallvec::SmallVec;

use crate::error::Result;
use crate::nfa::{explore, Nfa, Transition};

/// A letter over several tracks; entries are base-letter ids or [`PAD_ID`].
pub type Tup = SmallVec<[u32; 4]>;
pub type TNfa = Nfa<Tup>;

pub const PAD_ID: u32 = u32::MAX;
const UNSET: u32 = u32::MAX - 1;
/// Part state of a generator that has stopped.
const DONE: u32 = u32::MAX;
/// Part state of a deterministic filter that has no transition.
const SINK: u32 = u32::MAX - 1;

pub fn all_pad(t: &[u32]) -> bool {
    t.iter().all(|&x| x == PAD_ID)
}

/// A relation over variables `vars` (ascending ids), one track per variable.
#[derive(Clone, Debug)]
pub struct Rel {
    pub vars: Vec<usize>,
    pub nfa: Rc<TNfa>,
}

impl Rel {
    pub fn new(vars: Vec<usize>, nfa: TNfa) -> Rel {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        Rel { vars, nfa: Rc::new(nfa) }
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// Truth value of a relation without tracks.
    pub fn truth(&self) -> bool {
        debug_assert!(self.vars.is_empty());
        !self.nfa.is_empty()
    }

    pub fn boolean(b: bool) -> Rel {
        let nfa = if b { Nfa::epsilon(vec![]) } else { Nfa::empty(vec![]) };
        Rel::new(vec![], nfa)
    }
}

/// A deterministic automaton prepared for letter lookups.
#[derive(Debug)]
pub struct DfaFilter {
    pub dfa: TNfa,
    index: HashMap<Tup, usize>,
}

impl DfaFilter {
    pub fn new(nfa: &TNfa) -> Result<DfaFilter> {
        let dfa = nfa.determinize()?.trim();
        let index = dfa.alphabet().iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(DfaFilter { dfa, index })
    }

    fn start(&self) -> u32 {
        self.dfa.initial().first().map_or(SINK, |&q| q as u32)
    }

    fn step(&self, q: u32, letter: &Tup) -> u32 {
        if q == SINK {
            return SINK;
        }
        match self.index.get(letter) {
            Some(&sym) => self.dfa.out_on(q as usize, sym).first().map_or(SINK, |t| t.dst as u32),
            None => SINK,
        }
    }

    fn accepts(&self, q: u32) -> bool {
        q != SINK && self.dfa.is_final(q as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpKind {
    Eq,
    Lex,
    Llex,
}

/// Outcome sets are indexed by `Ordering as i8 + 1`: less, equal, greater.
pub type Outcomes = [bool; 3];

#[derive(Clone)]
pub enum PartKind {
    Gen(Rc<TNfa>),
    Filter { f: Rc<DfaFilter>, negate: bool },
    Cmp { kind: CmpKind, accept: Outcomes },
}

#[derive(Clone)]
pub struct Part {
    pub kind: PartKind,
    /// Target track of every track of the part.
    pub tracks: Vec<usize>,
}

impl Part {
    pub fn gen(nfa: Rc<TNfa>, tracks: Vec<usize>) -> Part {
        Part { kind: PartKind::Gen(nfa), tracks }
    }

    pub fn filter(f: Rc<DfaFilter>, negate: bool, tracks: Vec<usize>) -> Part {
        Part { kind: PartKind::Filter { f, negate }, tracks }
    }

    pub fn cmp(kind: CmpKind, accept: Outcomes, x: usize, y: usize) -> Part {
        Part { kind: PartKind::Cmp { kind, accept }, tracks: vec![x, y] }
    }

    fn is_gen(&self) -> bool {
        matches!(self.kind, PartKind::Gen(_))
    }
}

type State = SmallVec<[u32; 6]>;

// Comparison state: lexicographic verdict * 3 + length verdict, verdicts
// 0 = less, 1 = equal, 2 = greater.
const CMP_START: u32 = 4;

fn cmp_step(state: u32, a: u32, b: u32) -> u32 {
    let (mut lex, mut len) = (state / 3, state % 3);
    match (a == PAD_ID, b == PAD_ID) {
        (true, true) => {}
        (false, false) => {
            if lex == 1 {
                lex = match a.cmp(&b) {
                    std::cmp::Ordering::Less => 0,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => 2,
                };
            }
        }
        (true, false) => {
            if lex == 1 {
                lex = 0;
            }
            if len == 1 {
                len = 0;
            }
        }
        (false, true) => {
            if lex == 1 {
                lex = 2;
            }
            if len == 1 {
                len = 2;
            }
        }
    }
    lex * 3 + len
}

fn cmp_outcome(kind: CmpKind, state: u32) -> usize {
    let (lex, len) = (state / 3, state % 3);
    match kind {
        // Words are equal exactly when no difference was seen.
        CmpKind::Eq => {
            if lex == 1 && len == 1 {
                1
            } else {
                0
            }
        }
        CmpKind::Lex => lex as usize,
        CmpKind::Llex => {
            if len == 1 {
                lex as usize
            } else {
                len as usize
            }
        }
    }
}

/// Join plan: parts over `arity` target tracks, of which the ones
/// with `keep[t]` appear in the output letters.
pub struct Join {
    gens: Vec<Part>,
    filters: Vec<Part>,
    arity: usize,
    keep: Vec<bool>,
}

impl Join {
    pub fn new(parts: Vec<Part>, arity: usize, keep: Vec<bool>) -> Join {
        let (gens, filters): (Vec<Part>, Vec<Part>) = parts.into_iter().partition(Part::is_gen);
        debug_assert!({
            let covered: HashSet<usize> = gens.iter().flat_map(|p| p.tracks.iter().copied()).collect();
            (0..arity).all(|t| covered.contains(&t))
        });
        Join { gens, filters, arity, keep }
    }

    fn starts(&self) -> Vec<State> {
        let mut acc: Vec<State> = vec![State::new()];
        for p in &self.gens {
            let PartKind::Gen(nfa) = &p.kind else { unreachable!() };
            let mut next = Vec::new();
            for s in &acc {
                for &q in nfa.initial() {
                    let mut s2 = s.clone();
                    s2.push(q as u32);
                    next.push(s2);
                }
            }
            acc = next;
        }
        for s in &mut acc {
            for p in &self.filters {
                s.push(match &p.kind {
                    PartKind::Filter { f, .. } => f.start(),
                    PartKind::Cmp { .. } => CMP_START,
                    PartKind::Gen(_) => unreachable!(),
                });
            }
        }
        acc
    }

    fn is_final(&self, s: &State) -> bool {
        for (i, p) in self.gens.iter().enumerate() {
            let PartKind::Gen(nfa) = &p.kind else { unreachable!() };
            if s[i] != DONE && !nfa.is_final(s[i] as usize) {
                return false;
            }
        }
        let off = self.gens.len();
        for (i, p) in self.filters.iter().enumerate() {
            let q = s[off + i];
            let ok = match &p.kind {
                PartKind::Filter { f, negate } => f.accepts(q) != *negate,
                PartKind::Cmp { kind, accept } => accept[cmp_outcome(*kind, q)],
                PartKind::Gen(_) => unreachable!(),
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// All moves from `s`: the full letter and the successor state.
    fn successors(&self, s: &State, out: &mut Vec<(Tup, State)>) {
        let mut cur: Tup = SmallVec::from_elem(UNSET, self.arity);
        let mut next = s.clone();
        let mut raw = Vec::new();
        self.gen_rec(0, s, &mut cur, &mut next, &mut raw);
        let off = self.gens.len();
        'moves: for (letter, mut ns) in raw {
            for (i, p) in self.filters.iter().enumerate() {
                let proj: Tup = p.tracks.iter().map(|&t| letter[t]).collect();
                let q = s[off + i];
                let nq = match &p.kind {
                    PartKind::Filter { f, negate } => {
                        if all_pad(&proj) {
                            q
                        } else {
                            let nq = f.step(q, &proj);
                            if nq == SINK && !*negate {
                                continue 'moves;
                            }
                            nq
                        }
                    }
                    PartKind::Cmp { .. } => cmp_step(q, proj[0], proj[1]),
                    PartKind::Gen(_) => unreachable!(),
                };
                ns[off + i] = nq;
            }
            out.push((letter, ns));
        }
    }

    fn gen_rec(&self, i: usize, s: &State, cur: &mut Tup, next: &mut State, out: &mut Vec<(Tup, State)>) {
        if i == self.gens.len() {
            debug_assert!(cur.iter().all(|&x| x != UNSET));
            if !all_pad(cur) {
                out.push((cur.clone(), next.clone()));
            }
            return;
        }
        let p = &self.gens[i];
        let PartKind::Gen(nfa) = &p.kind else { unreachable!() };
        let q = s[i];
        let mut undo: SmallVec<[usize; 8]> = SmallVec::new();
        // Stopping (or already stopped): the part's tracks read pad.
        if q == DONE || nfa.is_final(q as usize) {
            if assign_pad(cur, &p.tracks, &mut undo) {
                next[i] = DONE;
                self.gen_rec(i + 1, s, cur, next, out);
            }
            for t in undo.drain(..) {
                cur[t] = UNSET;
            }
        }
        if q == DONE {
            return;
        }
        for tr in nfa.out(q as usize) {
            let letter = &nfa.alphabet()[tr.sym];
            if assign(cur, &p.tracks, letter, &mut undo) {
                next[i] = tr.dst as u32;
                self.gen_rec(i + 1, s, cur, next, out);
            }
            for t in undo.drain(..) {
                cur[t] = UNSET;
            }
        }
        next[i] = q;
    }

    fn out_letter(&self, letter: &Tup) -> Tup {
        letter.iter().zip(&self.keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect()
    }

    /// The output automaton; projected-away tracks are closed off.
    pub fn build(&self, cap: usize) -> Result<TNfa> {
        let mut buf = Vec::new();
        let (nfa, _) = explore(
            Vec::new(),
            self.starts(),
            |s: &State, out: &mut Vec<(Tup, State)>| {
                buf.clear();
                self.successors(s, &mut buf);
                for (letter, ns) in buf.drain(..) {
                    out.push((self.out_letter(&letter), ns));
                }
            },
            |s| self.is_final(s),
            cap,
        )?;
        Ok(close_tail(&nfa))
    }

    /// Whether some convolution is accepted, without building the product.
    pub fn nonempty(&self, cap: usize) -> Result<bool> {
        let mut seen: HashSet<State> = HashSet::new();
        let mut queue: VecDeque<State> = VecDeque::new();
        for s in self.starts() {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
        let mut buf = Vec::new();
        while let Some(s) = queue.pop_front() {
            if self.is_final(&s) {
                return Ok(true);
            }
            buf.clear();
            self.successors(&s, &mut buf);
            for (_, ns) in buf.drain(..) {
                if !seen.contains(&ns) {
                    if seen.len() >= cap {
                        return Err(crate::error::Error::StateCap { cap });
                    }
                    seen.insert(ns.clone());
                    queue.push_back(ns);
                }
            }
        }
        Ok(false)
    }
}

fn assign_pad(cur: &mut Tup, tracks: &[usize], undo: &mut SmallVec<[usize; 8]>) -> bool {
    for &t in tracks {
        match cur[t] {
            UNSET => {
                cur[t] = PAD_ID;
                undo.push(t);
            }
            PAD_ID => {}
            _ => return false,
        }
    }
    true
}

fn assign(cur: &mut Tup, tracks: &[usize], letter: &[u32], undo: &mut SmallVec<[usize; 8]>) -> bool {
    for (j, &t) in tracks.iter().enumerate() {
        let v = letter[j];
        match cur[t] {
            UNSET => {
                cur[t] = v;
                undo.push(t);
            }
            x if x == v => {}
            _ => return false,
        }
    }
    true
}

/// Removes all-pad letters: states that reach a final state through them
/// become final. Used after deleting tracks.
pub fn close_tail(nfa: &TNfa) -> TNfa {
    let tail: Vec<bool> = nfa.alphabet().iter().map(|t| all_pad(t)).collect();
    if !tail.iter().any(|&b| b) {
        return nfa.trim();
    }
    let n = nfa.state_count();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in nfa.transitions() {
        if tail[t.sym] {
            rev[t.dst].push(t.src);
        }
    }
    let mut fin = vec![false; n];
    let mut stack: Vec<usize> = nfa.finals().collect();
    for &q in &stack {
        fin[q] = true;
    }
    while let Some(q) = stack.pop() {
        for &p in &rev[q] {
            if !fin[p] {
                fin[p] = true;
                stack.push(p);
            }
        }
    }
    let mut map = vec![usize::MAX; tail.len()];
    let mut alphabet = Vec::new();
    for (i, l) in nfa.alphabet().iter().enumerate() {
        if !tail[i] {
            map[i] = alphabet.len();
            alphabet.push(l.clone());
        }
    }
    let ts: Vec<Transition> = nfa
        .transitions()
        .iter()
        .filter(|t| !tail[t.sym])
        .map(|t| Transition::new(t.src, map[t.sym], t.dst))
        .collect();
    let finals = (0..n).filter(|&q| fin[q]);
    Nfa::new(alphabet, n, nfa.initial().to_vec(), finals, ts).expect("indices in range").trim()
}
