//! Letters, tuple letters over `letters ∪ {pad}`, and their text forms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Printed form of the padding letter.
pub const PAD: &str = "_";

/// A letter of an automaton alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Symbol {
    Base(String),
    Tuple(Vec<Option<String>>),
}

impl Symbol {
    pub fn base(s: impl Into<String>) -> Symbol {
        Symbol::Base(s.into())
    }

    /// Builds a tuple symbol; rejects the all-pad tuple.
    pub fn tuple(entries: Vec<Option<String>>) -> Result<Symbol> {
        if entries.is_empty() || entries.iter().all(Option::is_none) {
            return Err(Error::InvalidSymbol(format!("{entries:?} is all-pad")));
        }
        Ok(Symbol::Tuple(entries))
    }

    pub fn arity(&self) -> Option<usize> {
        match self {
            Symbol::Base(_) => None,
            Symbol::Tuple(e) => Some(e.len()),
        }
    }

    pub fn as_base(&self) -> Option<&str> {
        match self {
            Symbol::Base(s) => Some(s),
            Symbol::Tuple(_) => None,
        }
    }

    pub fn entries(&self) -> Option<&[Option<String>]> {
        match self {
            Symbol::Base(_) => None,
            Symbol::Tuple(e) => Some(e),
        }
    }

    /// A single string naming this symbol, used when a tuple letter becomes a
    /// base letter of a new alphabet.
    pub fn flat_name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Base(s) => f.write_str(s),
            Symbol::Tuple(e) => {
                f.write_str("(")?;
                for (i, x) in e.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(x.as_deref().unwrap_or(PAD))?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Name of a tuple of base letters, as used for flattened tuple letters.
pub fn tuple_name(entries: &[Option<&str>]) -> String {
    let mut s = String::from("(");
    for (i, x) in entries.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(x.unwrap_or(PAD));
    }
    s.push(')');
    s
}

/// Splits a word into letters by greedy longest match against `letters`.
pub fn split_word<'a>(text: &str, letters: impl IntoIterator<Item = &'a str>) -> Result<Vec<String>> {
    let mut sorted: Vec<&str> = letters.into_iter().filter(|l| !l.is_empty()).collect();
    sorted.sort_by_key(|l| std::cmp::Reverse(l.len()));
    let mut out = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        match sorted.iter().find(|l| rest.starts_with(**l)) {
            Some(l) => {
                out.push((*l).to_string());
                rest = &rest[l.len()..];
            }
            None => {
                let c: String = rest.chars().take(8).collect();
                return Err(Error::UnknownLetter(c));
            }
        }
    }
    Ok(out)
}

/// Parses a command-line word for an automaton alphabet. Base alphabets take
/// a plain word; tuple alphabets take `|`-separated tracks that are convolved.
pub fn parse_word(text: &str, alphabet: &[Symbol]) -> Result<Vec<Symbol>> {
    let tuple_arity = alphabet.iter().find_map(Symbol::arity);
    match tuple_arity {
        None => {
            let letters: Vec<&str> = alphabet.iter().filter_map(Symbol::as_base).collect();
            Ok(split_word(text, letters)?.into_iter().map(Symbol::Base).collect())
        }
        Some(n) => {
            let mut base: Vec<&str> = Vec::new();
            for s in alphabet {
                for x in s.entries().unwrap_or(&[]).iter().flatten() {
                    if !base.contains(&x.as_str()) {
                        base.push(x);
                    }
                }
            }
            let tracks: Vec<&str> = if text.is_empty() { vec![""; n] } else { text.split('|').collect() };
            if tracks.len() != n {
                return Err(Error::Parse(format!("expected {n} tracks, got {}", tracks.len())));
            }
            let words = tracks
                .iter()
                .map(|t| split_word(t, base.iter().copied()))
                .collect::<Result<Vec<_>>>()?;
            Ok(crate::conv::convolve(&words))
        }
    }
}

/// Renders a word; tuple words print as `|`-separated tracks.
pub fn render_word(word: &[Symbol]) -> String {
    match word.first().and_then(Symbol::arity) {
        None => word.iter().map(|s| s.to_string()).collect(),
        Some(_) => crate::conv::deconvolve(word)
            .map(|tracks| tracks.iter().map(|t| t.concat()).collect::<Vec<_>>().join("|"))
            .unwrap_or_else(|_| word.iter().map(|s| s.to_string()).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_names() {
        let s = Symbol::tuple(vec![Some("a".into()), None]).unwrap();
        assert_eq!(s.to_string(), "(a,_)");
        assert_eq!(tuple_name(&[Some("a"), None]), "(a,_)");
        assert!(Symbol::tuple(vec![None, None]).is_err());
    }

    #[test]
    fn greedy_split() {
        let w = split_word("b1b1#$", ["b1", "#", "$", "b"]).unwrap();
        assert_eq!(w, vec!["b1", "b1", "#", "$"]);
        assert!(split_word("c", ["a"]).is_err());
    }
}
