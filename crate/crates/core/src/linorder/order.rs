//! The order `⊑` on accepting runs: first by the lexicographic order of the
//! words read, then by the lexicographic order of the transition sequences.

use std::cmp::Ordering;
use std::cell::OnceCell;
use std::collections::BTreeMap;

use crate::compose::name_of;
use crate::conv::{convolve, AlphabetOrder};
use crate::error::{Error, Result};
use crate::fo::{validate_linear_order, Presentation, Relation};
use crate::limits::state_cap;
use crate::nfa::{explore, guarded_product, Nfa, Transition};
use crate::symbol::Symbol;

use super::{DOLLAR, ORDER_RELATION, SHARP};

/// The automaton whose runs form the domain of a run order, with the
/// order on its letters. Run letter `t{i}` is transition `i`.
#[derive(Clone, Debug)]
pub struct RunSource {
    pub automaton: Nfa,
    pub order: AlphabetOrder,
    ranks: Vec<usize>,
}

impl RunSource {
    pub fn new(automaton: Nfa, order: AlphabetOrder) -> Result<RunSource> {
        let ranks = order.alphabet_ranks(automaton.alphabet())?;
        Ok(RunSource { automaton, order, ranks })
    }

    pub fn run_letter(i: usize) -> String {
        format!("t{i}")
    }

    /// Transition indices of a domain word.
    pub fn decode(&self, word: &[String]) -> Result<Vec<usize>> {
        word.iter()
            .map(|l| {
                l.strip_prefix('t')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i < self.automaton.transitions().len())
                    .ok_or_else(|| Error::UnknownLetter(l.clone()))
            })
            .collect()
    }

    pub fn encode(run: &[usize]) -> Vec<String> {
        run.iter().map(|&i| Self::run_letter(i)).collect()
    }

    /// Letter indices of the word read by a run.
    pub fn project(&self, run: &[usize]) -> Vec<usize> {
        run.iter().map(|&i| self.automaton.transitions()[i].sym).collect()
    }

    /// Rank of a letter index of the automaton.
    pub fn rank(&self, sym: usize) -> usize {
        self.ranks[sym]
    }

    /// Lexicographic comparison of letter-index words.
    pub fn lex(&self, u: &[usize], v: &[usize]) -> Ordering {
        for (a, b) in u.iter().zip(v) {
            match self.ranks[*a].cmp(&self.ranks[*b]) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        u.len().cmp(&v.len())
    }

    /// `⊑` on runs.
    pub fn compare(&self, x: &[usize], y: &[usize]) -> Ordering {
        self.lex(&self.project(x), &self.project(y)).then_with(|| x.cmp(y))
    }
}

/// A presentation whose relation `leq` is a linear order. Run orders keep
/// their source automaton and build the relation automaton on first use.
#[derive(Clone, Debug)]
pub struct OrderPresentation {
    domain: Nfa,
    source: Option<RunSource>,
    pres: OnceCell<Presentation>,
}

impl OrderPresentation {
    /// Checks the order axioms.
    pub fn new(pres: Presentation) -> Result<OrderPresentation> {
        if !validate_linear_order(&pres)? {
            return Err(Error::Validation(format!("{ORDER_RELATION} is not a linear order")));
        }
        Ok(OrderPresentation { domain: pres.domain().clone(), source: None, pres: OnceCell::from(pres) })
    }

    pub fn source(&self) -> Option<&RunSource> {
        self.source.as_ref()
    }

    pub fn domain(&self) -> &Nfa {
        &self.domain
    }

    /// The presentation; for run orders the relation automaton is built
    /// here, with up to `5 n²` states for `n` states of the source.
    pub fn presentation(&self) -> Result<&Presentation> {
        if let Some(p) = self.pres.get() {
            return Ok(p);
        }
        let src = self.source.as_ref().expect("run order without a presentation");
        let mut rels = BTreeMap::new();
        rels.insert(ORDER_RELATION.to_string(), Relation::new(2, sq_relation(src)?)?);
        let pres = Presentation::new(AlphabetOrder::of_alphabet(self.domain.alphabet())?, self.domain.clone(), rels)?;
        Ok(self.pres.get_or_init(|| pres))
    }

    pub fn relation(&self) -> Result<&Nfa> {
        Ok(&self.presentation()?.relation(ORDER_RELATION)?.automaton)
    }

    /// The order axioms through the first-order engine.
    pub fn validate(&self) -> Result<bool> {
        validate_linear_order(self.presentation()?)
    }

    /// `x ≤ y` for domain words. Run orders step through the relation
    /// without building it.
    pub fn leq(&self, x: &[String], y: &[String]) -> Result<bool> {
        match (&self.source, self.pres.get()) {
            (Some(src), None) => Ok(sq_accepts(src, &src.decode(x)?, &src.decode(y)?)),
            _ => Ok(self.relation()?.accepts(&convolve(&[x.to_vec(), y.to_vec()]))),
        }
    }

    /// Domain words of length at most `bound`.
    pub fn domain_words(&self, bound: usize) -> Result<Vec<Vec<String>>> {
        Ok(self.domain.words_up_to(bound)?.into_iter().map(|w| w.iter().map(name_of).collect()).collect())
    }

    /// The order axioms on the domain words of length at most `bound`:
    /// `leq` restricted to them is the order given by the number of
    /// elements below each word.
    pub fn validate_slice(&self, bound: usize) -> Result<bool> {
        let words = self.domain_words(bound)?;
        let m = words.len();
        let mut table = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = self.leq(&words[i], &words[j])?;
            }
        }
        let below: Vec<usize> = (0..m).map(|j| (0..m).filter(|&i| table[i * m + j]).count()).collect();
        let mut seen = vec![false; m + 1];
        for &b in &below {
            if b == 0 || seen[b] {
                return Ok(false);
            }
            seen[b] = true;
        }
        Ok((0..m).all(|i| (0..m).all(|j| table[i * m + j] == (below[i] <= below[j]))))
    }
}

/// Track position of the run automaton: before the first letter, at a
/// state, or past the end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Pos {
    Start,
    At(usize),
    Ended,
}

/// Comparison so far: `Same` and `Tie*` have equal projections, the
/// latter with a transition decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Verdict {
    Same,
    TieLess,
    TieGreater,
    Less,
    Greater,
}

type SqState = (Pos, Pos, Verdict);

fn ends(a: &Nfa, p: Pos) -> bool {
    match p {
        Pos::Ended => true,
        Pos::At(q) => a.is_final(q),
        Pos::Start => a.initial().iter().any(|&q| a.is_final(q)),
    }
}

/// One track: transition `l` (or a pad) from position `p`.
fn advance(a: &Nfa, p: Pos, l: Option<usize>) -> Option<Pos> {
    match (p, l) {
        (Pos::Ended, None) => Some(Pos::Ended),
        (Pos::Ended, Some(_)) => None,
        (p, None) => ends(a, p).then_some(Pos::Ended),
        (Pos::Start, Some(x)) => {
            let t = a.transitions()[x];
            a.initial().contains(&t.src).then_some(Pos::At(t.dst))
        }
        (Pos::At(q), Some(x)) => {
            let t = a.transitions()[x];
            (t.src == q).then_some(Pos::At(t.dst))
        }
    }
}

fn sq_step(src: &RunSource, (p, q, v): SqState, l: Option<usize>, r: Option<usize>) -> Option<SqState> {
    let a = &src.automaton;
    if l.is_none() && r.is_none() {
        return None;
    }
    let (p2, q2) = (advance(a, p, l)?, advance(a, q, r)?);
    let tie = matches!(v, Verdict::Same | Verdict::TieLess | Verdict::TieGreater);
    let nv = if !tie {
        v
    } else {
        match (l, r) {
            (Some(x), Some(y)) => {
                let (sx, sy) = (a.transitions()[x].sym, a.transitions()[y].sym);
                match src.rank(sx).cmp(&src.rank(sy)) {
                    Ordering::Less => Verdict::Less,
                    Ordering::Greater => Verdict::Greater,
                    Ordering::Equal if v == Verdict::Same => match x.cmp(&y) {
                        Ordering::Less => Verdict::TieLess,
                        Ordering::Greater => Verdict::TieGreater,
                        Ordering::Equal => Verdict::Same,
                    },
                    Ordering::Equal => v,
                }
            }
            (None, _) => Verdict::Less,
            (_, None) => Verdict::Greater,
        }
    };
    Some((p2, q2, nv))
}

fn sq_final(src: &RunSource, (p, q, v): SqState) -> bool {
    let a = &src.automaton;
    ends(a, p) && ends(a, q) && matches!(v, Verdict::Same | Verdict::TieLess | Verdict::Less)
}

const SQ_START: SqState = (Pos::Start, Pos::Start, Verdict::Same);

/// Membership in `⊑` for transition sequences, through the same steps as
/// the relation automaton.
fn sq_accepts(src: &RunSource, x: &[usize], y: &[usize]) -> bool {
    let mut s = SQ_START;
    for i in 0..x.len().max(y.len()) {
        match sq_step(src, s, x.get(i).copied(), y.get(i).copied()) {
            Some(n) => s = n,
            None => return false,
        }
    }
    // Both words empty: the start state decides.
    sq_final(src, s) && (!x.is_empty() || ends(&src.automaton, Pos::Start))
}

/// The relation automaton of `⊑` over run letters.
fn sq_relation(src: &RunSource) -> Result<Nfa> {
    let a = &src.automaton;
    let names: Vec<String> = (0..a.transitions().len()).map(RunSource::run_letter).collect();
    let options = |p: Pos| -> Vec<Option<usize>> {
        let mut v: Vec<Option<usize>> = match p {
            Pos::Ended => vec![],
            Pos::Start => {
                let mut init = a.initial().to_vec();
                init.sort_unstable();
                init.iter().flat_map(|&q| a.out_range(q)).map(Some).collect()
            }
            Pos::At(q) => a.out_range(q).map(Some).collect(),
        };
        if ends(a, p) {
            v.push(None);
        }
        v
    };
    let (rel, _) = explore(
        vec![],
        vec![SQ_START],
        |&s: &SqState, out| {
            for l in options(s.0) {
                for r in options(s.1) {
                    if let Some(n) = sq_step(src, s, l, r) {
                        let sym = Symbol::Tuple(vec![l.map(|i| names[i].clone()), r.map(|i| names[i].clone())]);
                        out.push((sym, n));
                    }
                }
            }
        },
        |&s| sq_final(src, s),
        state_cap(),
    )?;
    Ok(rel.trim())
}

/// `(L(Run_A); ⊑)` with `⊑` over the letter order `ord`.
pub fn sq_order_presentation(a: &Nfa, ord: &AlphabetOrder) -> Result<OrderPresentation> {
    let a = a.trim();
    let source = RunSource::new(a.clone(), ord.clone())?;
    let nt = a.transitions().len();
    let letters: Vec<Symbol> = (0..nt).map(|i| Symbol::base(RunSource::run_letter(i))).collect();
    let n = a.state_count();
    let mut ts = Vec::new();
    for (i, t) in a.transitions().iter().enumerate() {
        ts.push(Transition::new(t.src, i, t.dst));
        if a.initial().contains(&t.src) {
            ts.push(Transition::new(n, i, t.dst));
        }
    }
    let mut finals: Vec<usize> = a.finals().collect();
    if ends(&a, Pos::Start) {
        finals.push(n);
    }
    let domain = Nfa::new(letters, n + 1, [n], finals, ts)?.trim();
    Ok(OrderPresentation { domain, source: Some(source), pres: OnceCell::new() })
}

/// All accepting runs of `a` on `word` (letter names), as transition
/// indices in increasing order.
pub fn runs_on(a: &Nfa, word: &[String]) -> Vec<Vec<usize>> {
    let index: Vec<Option<usize>> = word
        .iter()
        .map(|l| a.alphabet().iter().position(|s| name_of(s) == *l))
        .collect();
    let mut out = Vec::new();
    if index.iter().any(Option::is_none) {
        return out;
    }
    let w: Vec<usize> = index.into_iter().flatten().collect();
    fn go(a: &Nfa, w: &[usize], q: usize, run: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if run.len() == w.len() {
            if a.is_final(q) {
                out.push(run.clone());
            }
            return;
        }
        for j in a.out_range(q) {
            let t = a.transitions()[j];
            if t.sym == w[run.len()] {
                run.push(j);
                go(a, w, t.dst, run, out);
                run.pop();
            }
        }
    }
    let mut init = a.initial().to_vec();
    init.sort_unstable();
    for q in init {
        go(a, &w, q, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// `u ∈ (a⁺♯)⁺ ∪ b₁⁺♯ ∪ b₂♯`.
fn is_root_prefix(u: &[String]) -> bool {
    let Some((last, body)) = u.split_last() else { return false };
    if last != SHARP || body.is_empty() {
        return false;
    }
    if body.iter().all(|l| l == "b1") || body == ["b2"] {
        return true;
    }
    let mut prev_sharp = true;
    for l in body {
        match l.as_str() {
            "a" => prev_sharp = false,
            SHARP if !prev_sharp => prev_sharp = true,
            _ => return false,
        }
    }
    !prev_sharp
}

/// `(π⁻¹(L(A)[u]) ∩ L(Run_A); ⊑)` for a root prefix `u`.
pub fn extract_fiber_order(a: &Nfa, u: &[String]) -> Result<OrderPresentation> {
    if !is_root_prefix(u) {
        return Err(Error::Parameters(format!("`{}` is not a root prefix", u.concat())));
    }
    let ord = super::sigma_order_for(a)?;
    let mut alphabet = a.alphabet().to_vec();
    for l in u.iter().map(String::as_str).chain([DOLLAR]) {
        if !alphabet.contains(&Symbol::base(l)) {
            alphabet.push(Symbol::base(l));
        }
    }
    // Deterministic automaton for `u$Σ*`.
    let idx = |l: &str| alphabet.iter().position(|s| name_of(s) == l).expect("letter added");
    let m = u.len() + 1;
    let mut ts: Vec<Transition> = u.iter().enumerate().map(|(i, l)| Transition::new(i, idx(l), i + 1)).collect();
    ts.push(Transition::new(u.len(), idx(DOLLAR), m));
    ts.extend((0..alphabet.len()).map(|s| Transition::new(m, s, m)));
    let guard = Nfa::new(alphabet, m + 1, [0], [m], ts)?;
    let fiber = guarded_product(&guard, a)?.trim();
    if fiber.is_empty() {
        return Err(Error::Parameters(format!("no word of L(A) starts with `{}$`", u.concat())));
    }
    sq_order_presentation(&fiber, &ord)
}
