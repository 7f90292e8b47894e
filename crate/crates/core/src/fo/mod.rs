//! First-order logic over automatic presentations.

pub mod count;
mod engine;
pub mod formula;
pub mod join;
pub mod presentation;
mod validate;

pub use count::{CountLabel, CountSpec, CountingDfa};
pub use engine::Engine;
pub use formula::Formula;
pub use presentation::{Presentation, Relation};
pub use validate::{
    equivalence_axioms, linear_order_axioms, tree_axioms, validate_dag, validate_equivalence, validate_forest,
    validate_linear_order, validate_tree,
};

use crate::error::Result;
use crate::nfa::Nfa;

/// Automaton for the tuples over `free` satisfying `f`.
pub fn eval_formula(p: &Presentation, f: &Formula, free: &[&str]) -> Result<Nfa> {
    Engine::new(p)?.eval(f, free)
}

/// Truth of the sentence `f`.
pub fn decide_sentence(p: &Presentation, f: &Formula) -> Result<bool> {
    Engine::new(p)?.decide(f)
}

/// Accepts `x̄` iff infinitely many `y` satisfy `R(x̄, y)`, where `y` is the
/// last track of `r`.
pub fn infinity_projection(r: &Nfa) -> Result<Nfa> {
    let mut names: Vec<String> = Vec::new();
    let mut id = |s: &str| -> u32 {
        match names.iter().position(|n| n == s) {
            Some(i) => i as u32,
            None => {
                names.push(s.to_string());
                names.len() as u32 - 1
            }
        }
    };
    let mut arity = None;
    let mut letters = Vec::new();
    for s in r.alphabet() {
        let e = s
            .entries()
            .ok_or_else(|| crate::Error::InvalidSymbol(format!("{s} is not a tuple letter")))?;
        if *arity.get_or_insert(e.len()) != e.len() {
            return Err(crate::Error::InvalidSymbol(format!("{s} has the wrong arity")));
        }
        letters.push(e.iter().map(|x| x.as_deref().map_or(join::PAD_ID, &mut id)).collect::<join::Tup>());
    }
    let Some(arity) = arity else {
        return Ok(Nfa::empty(vec![]));
    };
    let t = Nfa::new(letters, r.state_count(), r.initial().to_vec(), r.finals().collect::<Vec<_>>(), r.transitions().to_vec())?;
    let p = count::infinity_projection(&t, arity - 1);
    Ok(p.map_letters(|l| {
        crate::Symbol::Tuple(l.iter().map(|&x| (x != join::PAD_ID).then(|| names[x as usize].clone())).collect())
    }))
}
