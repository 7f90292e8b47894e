//! First-order checks that a presentation belongs to a structure class.

use super::engine::Engine;
use super::formula::Formula;
use super::presentation::Presentation;
use crate::error::{Error, Result};

fn binary(p: &Presentation, rel: &str) -> Result<()> {
    let r = p.relation(rel)?;
    if r.arity != 2 {
        return Err(Error::Arity { name: rel.to_string(), expected: 2, got: r.arity });
    }
    Ok(())
}

fn all_hold(e: &Engine, sentences: &[String]) -> Result<bool> {
    for s in sentences {
        let f: Formula = s.parse()?;
        if !e.decide(&f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Reflexive, symmetric and transitive `E`.
pub fn validate_equivalence(p: &Presentation) -> Result<bool> {
    binary(p, "E")?;
    equivalence_axioms(&Engine::new(p)?, "E")
}

pub fn equivalence_axioms(e: &Engine, r: &str) -> Result<bool> {
    all_hold(
        e,
        &[
            format!("(forall x ({r} x x))"),
            format!("(not (exists (x y) (and ({r} x y) (not ({r} y x)))))"),
            format!("(not (exists (x y z) (and ({r} x y) ({r} y z) (not ({r} x z)))))"),
        ],
    )
}

/// `leq` is a total order.
pub fn validate_linear_order(p: &Presentation) -> Result<bool> {
    binary(p, "leq")?;
    linear_order_axioms(&Engine::new(p)?, "leq")
}

pub fn linear_order_axioms(e: &Engine, r: &str) -> Result<bool> {
    all_hold(
        e,
        &[
            format!("(forall (x y) (or ({r} x y) ({r} y x)))"),
            format!("(not (exists (x y) (and ({r} x y) ({r} y x) (not (= x y)))))"),
            format!("(not (exists (x y z) (and ({r} x y) ({r} y z) (not ({r} x z)))))"),
        ],
    )
}

/// No directed `E`-path with `n + 1` edges. Rules out cycles as well.
fn height_at_most(r: &str, n: usize) -> String {
    fn chain(r: &str, i: usize, n: usize) -> String {
        if i == n + 1 {
            return "true".into();
        }
        format!("(exists x{} (and ({r} x{i} x{}) {}))", i + 1, i + 1, chain(r, i + 1, n))
    }
    format!("(not (exists x0 {}))", chain(r, 0, n))
}

fn root(r: &str, x: &str) -> String {
    format!("(not (exists p ({r} p {x})))")
}

/// `E` is the parent-to-child relation of a tree of height at most `n`:
/// a unique root, unique parents and no path longer than `n`.
pub fn validate_tree(p: &Presentation, n: usize) -> Result<bool> {
    binary(p, "E")?;
    tree_axioms(&Engine::new(p)?, "E", n, true)
}

/// As [`validate_tree`] but allowing any number of roots.
pub fn validate_forest(p: &Presentation, n: usize) -> Result<bool> {
    binary(p, "E")?;
    tree_axioms(&Engine::new(p)?, "E", n, false)
}

pub fn tree_axioms(e: &Engine, r: &str, n: usize, single_root: bool) -> Result<bool> {
    // Counting the roots keeps the root axiom in one variable; the pair
    // form joins the domain with itself.
    let roots = if single_root {
        format!("(exactly 1 x {})", root(r, "x"))
    } else {
        format!("(exists x {})", root(r, "x"))
    };
    all_hold(
        e,
        &[roots, format!("(not (exists (x y z) (and ({r} y x) ({r} z x) (not (= y z)))))"), height_at_most(r, n)],
    )
}

/// `E` is a dag with a root and no path longer than `k`.
pub fn validate_dag(p: &Presentation, k: usize) -> Result<bool> {
    binary(p, "E")?;
    let e = Engine::new(p)?;
    all_hold(&e, &[format!("(exists x {})", root("E", "x")), height_at_most("E", k)])
}
