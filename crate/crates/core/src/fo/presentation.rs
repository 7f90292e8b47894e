//! Automatic presentations: a domain automaton and named relation automata.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conv::AlphabetOrder;
use crate::error::{Error, Result};
use crate::io::AutomatonJson;
use crate::nfa::Nfa;
use crate::symbol::Symbol;

#[derive(Clone, Debug)]
pub struct Relation {
    pub arity: usize,
    pub automaton: Nfa,
}

impl Relation {
    pub fn new(arity: usize, automaton: Nfa) -> Result<Relation> {
        for s in automaton.alphabet() {
            let ok = match s {
                Symbol::Base(_) => arity == 1,
                Symbol::Tuple(e) => e.len() == arity,
            };
            if !ok {
                return Err(Error::InvalidAutomaton(format!("letter {s} does not fit arity {arity}")));
            }
        }
        Ok(Relation { arity, automaton })
    }
}

#[derive(Clone, Debug)]
pub struct Presentation {
    order: AlphabetOrder,
    domain: Nfa,
    relations: BTreeMap<String, Relation>,
}

impl Presentation {
    /// Checks that every letter used is ordered; language containment in the
    /// domain is checked by the evaluation engine.
    pub fn new(order: AlphabetOrder, domain: Nfa, relations: BTreeMap<String, Relation>) -> Result<Presentation> {
        for s in domain.alphabet() {
            let b = s.as_base().ok_or_else(|| Error::InvalidAutomaton(format!("domain letter {s} is not a base letter")))?;
            if order.rank(b).is_none() {
                return Err(Error::UnknownLetter(b.to_string()));
            }
        }
        for (name, r) in &relations {
            for s in r.automaton.alphabet() {
                let letters: Vec<&str> = match s {
                    Symbol::Base(b) => vec![b.as_str()],
                    Symbol::Tuple(e) => e.iter().flatten().map(String::as_str).collect(),
                };
                if let Some(l) = letters.iter().find(|l| order.rank(l).is_none()) {
                    return Err(Error::UnknownLetter(format!("{l} in relation {name}")));
                }
            }
        }
        Ok(Presentation { order, domain, relations })
    }

    /// A presentation whose alphabet order is the domain alphabet order.
    pub fn with_domain_order(domain: Nfa, relations: BTreeMap<String, Relation>) -> Result<Presentation> {
        let order = AlphabetOrder::of_alphabet(domain.alphabet())?;
        Presentation::new(order, domain, relations)
    }

    pub fn order(&self) -> &AlphabetOrder {
        &self.order
    }

    pub fn domain(&self) -> &Nfa {
        &self.domain
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Result<&Relation> {
        self.relations.get(name).ok_or_else(|| Error::UnboundRelation(name.to_string()))
    }

    /// Adds or replaces a relation.
    pub fn with_relation(mut self, name: &str, rel: Relation) -> Result<Presentation> {
        self.relations.insert(name.to_string(), rel);
        Presentation::new(self.order, self.domain, self.relations)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PresentationJson::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Presentation> {
        let j: PresentationJson = serde_json::from_str(text)?;
        j.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    arity: usize,
    automaton: AutomatonJson,
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    alphabet_order: AlphabetOrder,
    domain: AutomatonJson,
    relations: BTreeMap<String, RelationJson>,
}

impl From<&Presentation> for PresentationJson {
    fn from(p: &Presentation) -> Self {
        PresentationJson {
            alphabet_order: p.order.clone(),
            domain: AutomatonJson::from_nfa(&p.domain),
            relations: p
                .relations
                .iter()
                .map(|(k, r)| (k.clone(), RelationJson { arity: r.arity, automaton: AutomatonJson::from_nfa(&r.automaton) }))
                .collect(),
        }
    }
}

impl TryFrom<PresentationJson> for Presentation {
    type Error = Error;

    fn try_from(j: PresentationJson) -> Result<Presentation> {
        let relations = j
            .relations
            .into_iter()
            .map(|(k, r)| Ok((k, Relation::new(r.arity, r.automaton.to_nfa()?)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Presentation::new(j.alphabet_order, j.domain.to_nfa()?, relations)
    }
}
