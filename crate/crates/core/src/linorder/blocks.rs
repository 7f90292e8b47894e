//! Blocks: maximal finite intervals, discovered from the domain words up
//! to a length bound.
//!
//! For run orders, the runs on one word are consecutive, and a word is
//! followed immediately by another one only when `{v ∈ L(A) : v >lex w}`
//! has a lexicographic minimum. Both extremes are found greedily on the
//! subset automaton; a repeated subset means the extreme does not exist.

use std::collections::{BTreeMap, HashSet};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::compose::name_of;
use crate::conv::convolve;
use crate::error::Result;
use crate::fo::Engine;
use crate::nfa::{explore_indexed, Nfa};
use crate::trees::Word;

use super::order::{runs_on, OrderPresentation, RunSource};
use super::ORDER_RELATION;

/// Multiset of block sizes found with words of length at most `bound`,
/// keeping blocks of size at most `cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub bound: usize,
    pub cap: u64,
    pub blocks: BTreeMap<u64, u64>,
}

impl BlockProfile {
    pub fn sizes(&self) -> Vec<u64> {
        self.blocks.keys().copied().collect()
    }
}

/// A block, elements in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub elements: Vec<Word>,
}

impl Block {
    pub fn size(&self) -> u64 {
        self.elements.len() as u64
    }
}

pub fn block_profile(p: &OrderPresentation, bound: usize, cap: u64) -> Result<BlockProfile> {
    let mut blocks = BTreeMap::new();
    for b in find_blocks(p, bound, cap)? {
        *blocks.entry(b.size()).or_insert(0) += 1;
    }
    Ok(BlockProfile { bound, cap, blocks })
}

/// Blocks of size at most `cap` containing a domain word of length at
/// most `bound`.
pub fn find_blocks(p: &OrderPresentation, bound: usize, cap: u64) -> Result<Vec<Block>> {
    match p.source() {
        Some(src) => run_blocks(src, bound, cap),
        None => generic_blocks(p, bound, cap),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Cmp {
    Eq(usize),
    Decided,
}

/// The nearest word of `L(a)` above (or below) `w` in the lexicographic
/// order, when it exists.
fn neighbor(src: &RunSource, w: &[usize], above: bool) -> Result<Option<Vec<usize>>> {
    let a = &src.automaton;
    let starts: Vec<(usize, Cmp)> = a.initial().iter().map(|&q| (q, Cmp::Eq(0))).collect();
    let (prod, _) = explore_indexed(
        a.alphabet().to_vec(),
        starts,
        |&(q, c), out| {
            for t in a.out(q) {
                let next = match c {
                    Cmp::Decided => Some(Cmp::Decided),
                    Cmp::Eq(i) if i == w.len() => above.then_some(Cmp::Decided),
                    Cmp::Eq(i) => match src.rank(t.sym).cmp(&src.rank(w[i])) {
                        std::cmp::Ordering::Equal => Some(Cmp::Eq(i + 1)),
                        std::cmp::Ordering::Greater => above.then_some(Cmp::Decided),
                        std::cmp::Ordering::Less => (!above).then_some(Cmp::Decided),
                    },
                };
                if let Some(n) = next {
                    out.push((t.sym, (t.dst, n)));
                }
            }
        },
        |&(q, c)| {
            a.is_final(q)
                && match c {
                    Cmp::Decided => true,
                    Cmp::Eq(i) => !above && i < w.len(),
                }
        },
        crate::limits::state_cap(),
    )?;
    let prod = prod.trim();
    if prod.is_empty() {
        return Ok(None);
    }
    let mut subset: Vec<usize> = prod.initial().to_vec();
    let mut word = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    loop {
        if !seen.insert(subset.clone()) {
            return Ok(None);
        }
        let final_here = subset.iter().any(|&q| prod.is_final(q));
        // The minimum stops at the first accepted prefix; the maximum
        // extends while it can.
        if above && final_here {
            return Ok(Some(word));
        }
        let letters: Vec<usize> = subset.iter().flat_map(|&q| prod.out(q).iter().map(|t| t.sym)).collect();
        let pick = if above {
            letters.iter().copied().min_by_key(|&s| src.rank(s))
        } else {
            letters.iter().copied().max_by_key(|&s| src.rank(s))
        };
        let Some(s) = pick else {
            return Ok(Some(word));
        };
        let mut next: Vec<usize> =
            subset.iter().flat_map(|&q| prod.out_on(q, s).iter().map(|t| t.dst)).collect();
        next.sort_unstable();
        next.dedup();
        word.push(s);
        subset = next;
    }
}

fn letter_names(a: &Nfa, w: &[usize]) -> Vec<String> {
    w.iter().map(|&s| name_of(&a.alphabet()[s])).collect()
}

fn run_count(a: &Nfa, w: &[usize]) -> Result<u64> {
    let n = a.count_runs_indices(w)?;
    Ok(n.to_u64().unwrap_or(u64::MAX))
}

fn run_blocks(src: &RunSource, bound: usize, cap: u64) -> Result<Vec<Block>> {
    let a = &src.automaton;
    let index = a.letter_map();
    let mut words: Vec<Vec<usize>> = a
        .words_up_to(bound)?
        .into_iter()
        .filter(|w| !w.is_empty())
        .map(|w| w.iter().map(|s| index[s]).collect())
        .collect();
    words.sort_by(|u, v| src.lex(u, v));
    let mut done: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for w in words {
        if done.contains(&w) {
            continue;
        }
        // Walk down, then up, while the total stays within the cap.
        let mut total = run_count(a, &w)?;
        let mut chain = vec![w.clone()];
        let mut finite = total <= cap;
        let mut cur = w.clone();
        while finite {
            match neighbor(src, &cur, false)? {
                Some(v) => {
                    total = total.saturating_add(run_count(a, &v)?);
                    finite = total <= cap;
                    chain.insert(0, v.clone());
                    cur = v;
                }
                _ => break,
            }
        }
        cur = w.clone();
        while finite {
            match neighbor(src, &cur, true)? {
                Some(v) => {
                    total = total.saturating_add(run_count(a, &v)?);
                    finite = total <= cap;
                    chain.push(v.clone());
                    cur = v;
                }
                None => break,
            }
        }
        for v in &chain {
            done.insert(v.clone());
        }
        if !finite {
            continue;
        }
        let mut elements = Vec::new();
        for v in &chain {
            for r in runs_on(a, &letter_names(a, v)) {
                elements.push(RunSource::encode(&r));
            }
        }
        out.push(Block { elements });
    }
    Ok(out)
}

/// Blocks of an arbitrary order presentation through the successor
/// relation; a block counts only when all its elements have length at
/// most `bound`.
fn generic_blocks(p: &OrderPresentation, bound: usize, cap: u64) -> Result<Vec<Block>> {
    let r = ORDER_RELATION;
    let engine = Engine::new(p.presentation()?)?;
    let succ_text = format!(
        "(and ({r} x y) (not (= x y)) (not (exists z (and ({r} x z) ({r} z y) (not (= z x)) (not (= z y))))))"
    );
    let succ = engine.eval(&succ_text.parse()?, &["x", "y"])?;
    let has_pred = engine.eval(&format!("(exists x {succ_text})").parse()?, &["y"])?;
    let leq = p.relation()?;
    let mut elems: Vec<Word> = p
        .domain()
        .words_up_to(bound)?
        .into_iter()
        .map(|w| w.iter().map(name_of).collect())
        .collect();
    elems.sort_by(|u, v| {
        if u == v {
            std::cmp::Ordering::Equal
        } else if leq.accepts(&convolve(&[u.clone(), v.clone()])) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let is_succ = |x: &Word, y: &Word| succ.accepts(&convolve(&[x.clone(), y.clone()]));
    let mut out = Vec::new();
    let mut i = 0;
    while i < elems.len() {
        let start = i;
        while i + 1 < elems.len() && is_succ(&elems[i], &elems[i + 1]) {
            i += 1;
        }
        let first = &elems[start];
        let last = &elems[i];
        let opens = !has_pred.accepts(&convolve(&[first.clone()]));
        // A successor outside the slice means the block is cut off.
        let closes = !has_successor(&succ, last);
        let size = (i - start + 1) as u64;
        if opens && closes && size <= cap {
            out.push(Block { elements: elems[start..=i].to_vec() });
        }
        i += 1;
    }
    Ok(out)
}

/// Whether `x` has an immediate successor: the section of `succ` at `x`
/// is nonempty.
fn has_successor(succ: &Nfa, x: &Word) -> bool {
    // Positions along x; once x is consumed only pads appear on its track.
    let mut frontier: HashSet<(usize, usize)> = succ.initial().iter().map(|&q| (q, 0)).collect();
    let mut seen = frontier.clone();
    while !frontier.is_empty() {
        let mut next = HashSet::new();
        for &(q, i) in &frontier {
            if i == x.len() && succ.is_final(q) {
                return true;
            }
            for t in succ.out(q) {
                let e = succ.alphabet()[t.sym].entries().map(|e| e[0].clone());
                let ok = match e {
                    Some(Some(l)) => i < x.len() && x[i] == l,
                    Some(None) => i >= x.len(),
                    None => false,
                };
                if ok {
                    let n = (t.dst, (i + 1).min(x.len()));
                    if seen.insert(n) {
                        next.insert(n);
                    }
                }
            }
        }
        frontier = next;
    }
    false
}
