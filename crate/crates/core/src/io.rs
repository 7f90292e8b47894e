//! JSON and DOT formats for automata.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nfa::{Nfa, Transition};
use crate::symbol::{Symbol, PAD};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphabetKind {
    Base,
    Tuple,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphabetJson {
    pub kind: AlphabetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    pub letters: Vec<serde_json::Value>,
}

/// Wire form of an automaton; the transition array order is significant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub alphabet: AlphabetJson,
    pub states: usize,
    pub initial: Vec<usize>,
    #[serde(rename = "final")]
    pub finals: Vec<usize>,
    pub transitions: Vec<Transition>,
}

fn letter_to_json(s: &Symbol) -> serde_json::Value {
    match s {
        Symbol::Base(b) => serde_json::Value::String(b.clone()),
        Symbol::Tuple(e) => serde_json::Value::Array(
            e.iter().map(|x| serde_json::Value::String(x.clone().unwrap_or_else(|| PAD.to_string()))).collect(),
        ),
    }
}

fn letter_from_json(v: &serde_json::Value, kind: &AlphabetKind, arity: Option<usize>) -> Result<Symbol> {
    match (kind, v) {
        (AlphabetKind::Base, serde_json::Value::String(s)) => {
            if s == PAD {
                return Err(Error::InvalidSymbol("the pad letter cannot be a base letter".into()));
            }
            Ok(Symbol::Base(s.clone()))
        }
        (AlphabetKind::Tuple, serde_json::Value::Array(items)) => {
            let entries = items
                .iter()
                .map(|x| match x {
                    serde_json::Value::String(s) if s == PAD => Ok(None),
                    serde_json::Value::String(s) => Ok(Some(s.clone())),
                    serde_json::Value::Null => Ok(None),
                    other => Err(Error::InvalidSymbol(format!("bad tuple entry {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(n) = arity {
                if entries.len() != n {
                    return Err(Error::InvalidSymbol(format!("tuple {v} does not have arity {n}")));
                }
            }
            Symbol::tuple(entries)
        }
        _ => Err(Error::InvalidSymbol(format!("letter {v} does not match alphabet kind {kind:?}"))),
    }
}

impl AutomatonJson {
    pub fn from_nfa(a: &Nfa) -> Self {
        let arity = a.alphabet().iter().find_map(Symbol::arity);
        let kind = if arity.is_some() { AlphabetKind::Tuple } else { AlphabetKind::Base };
        AutomatonJson {
            alphabet: AlphabetJson { kind, arity, letters: a.alphabet().iter().map(letter_to_json).collect() },
            states: a.state_count(),
            initial: a.initial().to_vec(),
            finals: a.finals().collect(),
            transitions: a.transitions().to_vec(),
        }
    }

    pub fn to_nfa(&self) -> Result<Nfa> {
        let letters = self
            .alphabet
            .letters
            .iter()
            .map(|v| letter_from_json(v, &self.alphabet.kind, self.alphabet.arity))
            .collect::<Result<Vec<_>>>()?;
        if self.alphabet.kind == AlphabetKind::Tuple && self.alphabet.arity.is_none() {
            let mut ar = letters.iter().filter_map(Symbol::arity);
            if let Some(first) = ar.next() {
                if ar.any(|n| n != first) {
                    return Err(Error::InvalidSymbol("tuple letters of different arities".into()));
                }
            }
        }
        Nfa::new(letters, self.states, self.initial.clone(), self.finals.clone(), self.transitions.clone())
    }
}

pub fn nfa_to_json(a: &Nfa) -> String {
    serde_json::to_string_pretty(&AutomatonJson::from_nfa(a)).expect("serializable")
}

pub fn nfa_from_json(text: &str) -> Result<Nfa> {
    let j: AutomatonJson = serde_json::from_str(text)?;
    j.to_nfa()
}

/// Arity recorded for a tuple alphabet, if any.
pub fn alphabet_arity(a: &Nfa) -> Option<usize> {
    a.alphabet().iter().find_map(Symbol::arity)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; parallel transitions are merged into one edge label.
pub fn to_dot(a: &Nfa, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(name));
    out.push_str("  rankdir=LR;\n  node [shape=circle];\n");
    for q in 0..a.state_count() {
        let shape = if a.is_final(q) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  q{q} [shape={shape}];");
    }
    for &q in a.initial() {
        let _ = writeln!(out, "  start{q} [shape=point];\n  start{q} -> q{q};");
    }
    let ts = a.transitions();
    let mut i = 0;
    while i < ts.len() {
        let src = ts[i].src;
        let j = i + ts[i..].iter().take_while(|t| t.src == src).count();
        let mut by_dst: Vec<(usize, Vec<String>)> = Vec::new();
        for t in &ts[i..j] {
            let label = a.alphabet()[t.sym].to_string();
            match by_dst.iter_mut().find(|(d, _)| *d == t.dst) {
                Some((_, l)) => l.push(label),
                None => by_dst.push((t.dst, vec![label])),
            }
        }
        for (d, l) in by_dst {
            let _ = writeln!(out, "  q{src} -> q{d} [label=\"{}\"];", dot_escape(&l.join(",")));
        }
        i = j;
    }
    out.push_str("}\n");
    out
}
