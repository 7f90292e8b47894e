//! Convolutions of words, alphabet orders, and the lex/llex order automata.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nfa::{explore, Nfa};
use crate::symbol::Symbol;

/// Overlays words track by track, padding the shorter ones.
pub fn convolve<S: AsRef<str>>(words: &[Vec<S>]) -> Vec<Symbol> {
    let len = words.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| Symbol::Tuple(words.iter().map(|w| w.get(i).map(|s| s.as_ref().to_string())).collect()))
        .collect()
}

/// Inverse of [`convolve`]; rejects words that are not valid convolutions.
pub fn deconvolve(word: &[Symbol]) -> Result<Vec<Vec<String>>> {
    let arity = match word.first() {
        None => return Err(Error::InvalidSymbol("empty convolution has no arity".into())),
        Some(s) => s.arity().ok_or_else(|| Error::InvalidSymbol(format!("{s} is not a tuple")))?,
    };
    let mut tracks: Vec<Vec<String>> = vec![Vec::new(); arity];
    let mut ended = vec![false; arity];
    for s in word {
        let e = s.entries().filter(|e| e.len() == arity).ok_or_else(|| {
            Error::InvalidSymbol(format!("{s} does not have arity {arity}"))
        })?;
        if e.iter().all(Option::is_none) {
            return Err(Error::InvalidSymbol("all-pad letter".into()));
        }
        for (i, x) in e.iter().enumerate() {
            match x {
                Some(l) if ended[i] => {
                    return Err(Error::InvalidSymbol(format!("letter {l} after pad on track {i}")))
                }
                Some(l) => tracks[i].push(l.clone()),
                None => ended[i] = true,
            }
        }
    }
    Ok(tracks)
}

/// A word over tuple letters of a fixed arity whose pads form suffixes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvWord {
    arity: usize,
    word: Vec<Symbol>,
}

impl ConvWord {
    pub fn from_tracks<S: AsRef<str>>(tracks: &[Vec<S>]) -> ConvWord {
        ConvWord { arity: tracks.len(), word: convolve(tracks) }
    }

    pub fn new(arity: usize, word: Vec<Symbol>) -> Result<ConvWord> {
        if !word.is_empty() {
            let tracks = deconvolve(&word)?;
            if tracks.len() != arity {
                return Err(Error::InvalidSymbol(format!("arity {} instead of {arity}", tracks.len())));
            }
        }
        Ok(ConvWord { arity, word })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn tracks(&self) -> Vec<Vec<String>> {
        if self.word.is_empty() {
            vec![Vec::new(); self.arity]
        } else {
            deconvolve(&self.word).expect("validated at construction")
        }
    }
}

/// A total order on letters, given as the ordered list of letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct AlphabetOrder {
    letters: Vec<String>,
    #[serde(skip)]
    rank: HashMap<String, usize>,
}

impl TryFrom<Vec<String>> for AlphabetOrder {
    type Error = Error;
    fn try_from(letters: Vec<String>) -> Result<Self> {
        AlphabetOrder::new(letters)
    }
}

impl From<AlphabetOrder> for Vec<String> {
    fn from(o: AlphabetOrder) -> Self {
        o.letters
    }
}

impl AlphabetOrder {
    pub fn new<S: Into<String>>(letters: impl IntoIterator<Item = S>) -> Result<Self> {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        let mut rank = HashMap::with_capacity(letters.len());
        for (i, l) in letters.iter().enumerate() {
            if l == crate::symbol::PAD || rank.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidSymbol(format!("letter `{l}` repeated or reserved")));
            }
        }
        Ok(AlphabetOrder { letters, rank })
    }

    /// The order in which letters are listed in `alphabet`.
    pub fn of_alphabet(alphabet: &[Symbol]) -> Result<Self> {
        AlphabetOrder::new(alphabet.iter().map(|s| s.to_string()))
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn rank(&self, letter: &str) -> Option<usize> {
        self.rank.get(letter).copied()
    }

    fn ranks<S: AsRef<str>>(&self, w: &[S]) -> Result<Vec<usize>> {
        w.iter()
            .map(|s| self.rank(s.as_ref()).ok_or_else(|| Error::UnknownLetter(s.as_ref().to_string())))
            .collect()
    }

    /// Lexicographic comparison: a proper prefix is smaller.
    pub fn lex_compare<S: AsRef<str>>(&self, u: &[S], v: &[S]) -> Result<Ordering> {
        Ok(self.ranks(u)?.cmp(&self.ranks(v)?))
    }

    /// Length first, then lexicographic.
    pub fn llex_compare<S: AsRef<str>>(&self, u: &[S], v: &[S]) -> Result<Ordering> {
        let (a, b) = (self.ranks(u)?, self.ranks(v)?);
        Ok(a.len().cmp(&b.len()).then(a.cmp(&b)))
    }

    /// Rank of every letter of an automaton alphabet made of base letters.
    pub fn alphabet_ranks(&self, alphabet: &[Symbol]) -> Result<Vec<usize>> {
        alphabet
            .iter()
            .map(|s| {
                let name = s.as_base().ok_or_else(|| Error::InvalidSymbol(format!("{s} is not a base letter")))?;
                self.rank(name).ok_or_else(|| Error::UnknownLetter(name.to_string()))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    Llex,
}

/// Per-track position in a deterministic track automaton: `None` once the
/// track has ended (read a pad).
type TrackState = Option<usize>;

/// Moves of one track: a letter transition, or a pad when the track may stop.
fn track_moves(d: &Nfa<Symbol>, s: TrackState) -> Vec<(Option<usize>, TrackState)> {
    let mut out = Vec::new();
    match s {
        None => out.push((None, None)),
        Some(q) => {
            for t in d.out(q) {
                out.push((Some(t.sym), Some(t.dst)));
            }
            if d.is_final(q) {
                out.push((None, None));
            }
        }
    }
    out
}

fn track_accepts(d: &Nfa<Symbol>, s: TrackState) -> bool {
    s.map_or(true, |q| d.is_final(q))
}

/// `⊗_k(L(A))` for an automaton over base letters.
pub fn conv_language(a: &Nfa<Symbol>, k: usize) -> Result<Nfa<Symbol>> {
    let d = a.determinize()?.trim();
    let starts: Vec<Vec<TrackState>> = d.initial().iter().map(|&q| vec![Some(q); k]).collect();
    let (nfa, _) = explore(
        Vec::new(),
        starts,
        |st: &Vec<TrackState>, out| {
            let mut acc: Vec<(Vec<Option<usize>>, Vec<TrackState>)> = vec![(vec![], vec![])];
            for &s in st {
                let moves = track_moves(&d, s);
                let mut next = Vec::with_capacity(acc.len() * moves.len());
                for (l, ns) in &acc {
                    for (m, t) in &moves {
                        let mut l2 = l.clone();
                        l2.push(*m);
                        let mut ns2 = ns.clone();
                        ns2.push(*t);
                        next.push((l2, ns2));
                    }
                }
                acc = next;
            }
            for (l, ns) in acc {
                if l.iter().all(Option::is_none) {
                    continue;
                }
                let sym = Symbol::Tuple(
                    l.iter().map(|x| x.map(|i| d.alphabet()[i].to_string())).collect(),
                );
                out.push((sym, ns));
            }
        },
        |st| st.iter().all(|&s| track_accepts(&d, s)),
        usize::MAX,
    )?;
    Ok(nfa)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Cmp {
    Eq,
    Lt,
    Gt,
}

/// Accepts `u⊗v` iff `u, v ∈ L(D)` and `u ≤ v` in the chosen order.
pub fn order_relation_automaton(d: &Nfa<Symbol>, kind: OrderKind, ord: &AlphabetOrder) -> Result<Nfa<Symbol>> {
    let dfa = d.determinize()?.trim();
    let ranks = ord.alphabet_ranks(dfa.alphabet())?;
    // State: track states, lexicographic verdict, length verdict.
    type St = (TrackState, TrackState, Cmp, Cmp);
    let starts: Vec<St> = dfa.initial().iter().map(|&q| (Some(q), Some(q), Cmp::Eq, Cmp::Eq)).collect();
    let name = |i: usize| dfa.alphabet()[i].to_string();
    let (nfa, _) = explore(
        Vec::new(),
        starts,
        |&(x, y, lex, len): &St, out| {
            for (mx, nx) in track_moves(&dfa, x) {
                for (my, ny) in track_moves(&dfa, y) {
                    let (nlex, nlen) = match (mx, my) {
                        (None, None) => continue,
                        (Some(a), Some(b)) => {
                            let l = if lex == Cmp::Eq {
                                match ranks[a].cmp(&ranks[b]) {
                                    Ordering::Less => Cmp::Lt,
                                    Ordering::Greater => Cmp::Gt,
                                    Ordering::Equal => Cmp::Eq,
                                }
                            } else {
                                lex
                            };
                            (l, len)
                        }
                        (None, Some(_)) => {
                            let l = if lex == Cmp::Eq { Cmp::Lt } else { lex };
                            let n = if len == Cmp::Eq { Cmp::Lt } else { len };
                            (l, n)
                        }
                        (Some(_), None) => {
                            let l = if lex == Cmp::Eq { Cmp::Gt } else { lex };
                            let n = if len == Cmp::Eq { Cmp::Gt } else { len };
                            (l, n)
                        }
                    };
                    let sym = Symbol::Tuple(vec![mx.map(name), my.map(name)]);
                    out.push((sym, (nx, ny, nlex, nlen)));
                }
            }
        },
        |&(x, y, lex, len)| {
            track_accepts(&dfa, x)
                && track_accepts(&dfa, y)
                && match kind {
                    OrderKind::Lex => lex != Cmp::Gt,
                    OrderKind::Llex => len == Cmp::Lt || (len == Cmp::Eq && lex != Cmp::Gt),
                }
        },
        usize::MAX,
    )?;
    Ok(nfa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfa::Transition;

    fn w(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn convolution_examples() {
        let cw = convolve(&[w("ab"), w("b")]);
        assert_eq!(crate::symbol::render_word(&cw), "ab|b");
        assert_eq!(cw[1].to_string(), "(b,_)");
        let cw = convolve(&[w(""), w("a")]);
        assert_eq!(cw.len(), 1);
        assert_eq!(cw[0].to_string(), "(_,a)");
        assert!(convolve(&[w("ab"), w("ba")]).iter().all(|s| s.entries().unwrap().iter().all(Option::is_some)));
        assert_eq!(deconvolve(&convolve(&[w("ab"), w("b")])).unwrap(), vec![w("ab"), w("b")]);
    }

    #[test]
    fn order_examples() {
        let ord = AlphabetOrder::new(["a", "b"]).unwrap();
        assert_eq!(ord.lex_compare(&w("a"), &w("ab")).unwrap(), Ordering::Less);
        assert_eq!(ord.llex_compare(&w("b"), &w("ab")).unwrap(), Ordering::Less);
        assert_eq!(ord.lex_compare(&w("aa"), &w("ab")).unwrap(), Ordering::Less);
        assert!(ord.lex_compare(&w("c"), &w("a")).is_err());
    }

    #[test]
    fn conv_language_of_a_plus() {
        let a = vec![Symbol::base("a")];
        let aplus = Nfa::new(a, 2, [0], [1], [Transition::new(0, 0, 1), Transition::new(1, 0, 1)]).unwrap();
        let c = conv_language(&aplus, 2).unwrap();
        assert!(c.accepts(&convolve(&[w("a"), w("aa")])));
        assert!(!c.accepts(&convolve(&[w("a"), w("")])));
    }
}
