//! Unfolding dags into forests, cutting out components, and `T(E)`.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::{DagPresentation, TreePresentation};
use crate::compose::{conv_pair, edge_presentation, name_of, track_name, union_all, word_language};
use crate::conv::AlphabetOrder;
use crate::equiv::EquivPresentation;
use crate::error::{Error, Result};
use crate::fo::{Engine, Formula, Presentation, Relation};
use crate::limits::state_cap;
use crate::nfa::{explore, Nfa, Transition};
use crate::symbol::Symbol;

fn parse(s: &str) -> Result<Formula> {
    s.parse()
}

fn root_formula(x: &str) -> String {
    format!("(not (exists p (E p {x})))")
}

/// One-track result of the engine as an automaton over base letters.
fn one_track(m: &Nfa) -> Nfa {
    m.map_letters(|s| Symbol::Base(track_name(s)))
}

/// The roots of a dag or forest: nodes without a parent.
pub fn roots_of(p: &Presentation) -> Result<Nfa> {
    let e = Engine::new(p)?;
    Ok(one_track(&e.eval(&parse(&root_formula("x"))?, &["x"])?).trim())
}

/// The children of node `u` under the binary relation automaton `rel`, as an
/// automaton over base letters.
pub fn children_of(rel: &Nfa, u: &[String]) -> Result<Nfa> {
    let n = u.len();
    let entries: Vec<(Option<&str>, Option<&str>)> = rel
        .alphabet()
        .iter()
        .map(|s| match s.entries() {
            Some([l, r]) => Ok((l.as_deref(), r.as_deref())),
            _ => Err(Error::InvalidSymbol(format!("{s} is not a pair letter"))),
        })
        .collect::<Result<_>>()?;
    let fits = |pos: usize, l: Option<&str>| if pos < n { l == Some(u[pos].as_str()) } else { l.is_none() };
    // done[pos][q]: the rest of `u` can be read against pads from q.
    let states = rel.state_count();
    let mut done = vec![vec![false; states]; n + 1];
    for q in 0..states {
        done[n][q] = rel.is_final(q);
    }
    for pos in (0..n).rev() {
        for q in 0..states {
            done[pos][q] = rel
                .out(q)
                .iter()
                .any(|t| entries[t.sym].1.is_none() && fits(pos, entries[t.sym].0) && done[pos + 1][t.dst]);
        }
    }
    let (out, _) = explore(
        vec![],
        rel.initial().iter().map(|&q| (0usize, q)).collect(),
        |&(pos, q), out| {
            for t in rel.out(q) {
                let (l, r) = entries[t.sym];
                if let Some(r) = r {
                    if fits(pos, l) {
                        out.push((Symbol::base(r), ((pos + 1).min(n), t.dst)));
                    }
                }
            }
        },
        |&(pos, q)| done[pos][q],
        state_cap(),
    )?;
    Ok(out.trim())
}

fn path_formula(m: usize) -> String {
    let mut parts = vec![root_formula("x1")];
    for i in 1..m {
        parts.push(format!("(E x{i} x{})", i + 1));
    }
    format!("(and {})", parts.join(" "))
}

fn flat_entries(e: &[Option<String>]) -> Option<String> {
    e.iter().any(Option::is_some).then(|| Symbol::Tuple(e.to_vec()).flat_name())
}

/// Letter naming the root added by [`unfold_dag`].
pub const ADDED_ROOT: &str = "r";

/// The forest of root-anchored paths of `d`: a node is the convolution
/// `v₁ ⊗ ⋯ ⊗ v_m` of a path from a root `v₁`, and its children are its
/// one-step extensions. Path letters name their arity, so paths of
/// different lengths never share letters. With `add_root`, a new root
/// (the word `r`) gets every one-node path as a child.
pub fn unfold_dag(d: &DagPresentation, add_root: bool) -> Result<TreePresentation> {
    if !d.validate()? {
        return Err(Error::Validation(format!("not a rooted dag of height at most {}", d.height)));
    }
    let engine = Engine::new(&d.pres)?;
    let vars: Vec<String> = (1..=d.height + 1).map(|i| format!("x{i}")).collect();
    let mut domain_parts = Vec::new();
    let mut edge_parts = Vec::new();
    for m in 1..=d.height + 1 {
        let free: Vec<&str> = vars[..m].iter().map(String::as_str).collect();
        let paths = engine.eval(&parse(&path_formula(m))?, &free)?.trim();
        let entries = |s: &Symbol| s.entries().expect("tuple letters").to_vec();
        domain_parts.push(paths.map_letters(|s| Symbol::Base(flat_entries(&entries(s)).expect("non-pad"))));
        if m > 1 {
            edge_parts.push(paths.map_letters(|s| {
                let e = entries(s);
                Symbol::Tuple(vec![flat_entries(&e[..m - 1]), flat_entries(&e)])
            }));
        }
    }
    let domain = union_all(&domain_parts);
    if !add_root {
        let edges = union_all(&edge_parts);
        return Ok(TreePresentation { pres: edge_presentation(domain, edges)?, height: d.height, root: None });
    }
    let root = vec![ADDED_ROOT.to_string()];
    edge_parts.push(conv_pair(&word_language(&root), &domain_parts[0], (), |_, _, _| Some(()), |_| true)?);
    let domain = domain.union_merged(&word_language(&root));
    let edges = union_all(&edge_parts);
    Ok(TreePresentation { pres: edge_presentation(domain, edges)?, height: d.height + 1, root: Some(root) })
}

/// Nodes within `height` steps below a node of `W`.
fn below(height: usize, x: &str) -> String {
    let mut alts = vec![format!("(W {x})")];
    for len in 1..=height {
        let ys: Vec<String> = (0..len).map(|i| format!("y{i}")).collect();
        let mut parts = vec!["(W y0)".to_string()];
        for i in 0..len {
            let next = if i + 1 < len { ys[i + 1].clone() } else { x.to_string() };
            parts.push(format!("(E {} {next})", ys[i]));
        }
        alts.push(format!("(exists ({}) (and {}))", ys.join(" "), parts.join(" ")));
    }
    format!("(or {})", alts.join(" "))
}

/// The tree of `f` below the root `w`.
pub fn extract_component(f: &TreePresentation, w: &[String]) -> Result<TreePresentation> {
    let mut engine = Engine::new(&f.pres)?;
    let not_root = || Error::NotARoot(w.concat());
    if w.iter().any(|l| f.pres.order().rank(l).is_none()) || !f.pres.domain().accepts(&word(w)) {
        return Err(not_root());
    }
    engine.add_relation("W", 1, &word_language(w))?;
    if engine.decide(&parse("(exists x (and (W x) (exists p (E p x))))")?)? {
        return Err(not_root());
    }
    let desc = below(f.height, "x");
    let domain = one_track(&engine.eval(&parse(&desc)?, &["x"])?);
    let edges = engine.eval(&parse(&format!("(and {desc} (E x y))"))?, &["x", "y"])?;
    let mut rels = BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, edges.trim())?);
    let pres = Presentation::new(f.pres.order().clone(), domain.trim(), rels)?;
    Ok(TreePresentation { pres, height: f.height, root: Some(w.to_vec()) })
}

pub(crate) fn word(w: &[String]) -> Vec<Symbol> {
    w.iter().map(|l| Symbol::base(l.clone())).collect()
}

fn fresh(taken: &HashSet<String>, base: &str) -> String {
    let mut s = base.to_string();
    while taken.contains(&s) {
        s.push('\'');
    }
    s
}

/// `T(E)`: a root `r`, one child `a·u` for the llex-least member `u` of each
/// class, and the members of `[u]` below `a·u`.
pub fn tree_from_equiv(e: &EquivPresentation) -> Result<TreePresentation> {
    let p = e.presentation();
    let engine = Engine::new(p)?;
    let least = one_track(&engine.eval(&parse("(forall z (implies (E x z) (llex x z)))")?, &["x"])?).trim();
    let taken: HashSet<String> = p.order().letters().iter().cloned().collect();
    let r = fresh(&taken, "r");
    let a = fresh(&taken, "a");

    // a · least
    let s = least.state_count();
    let mut alphabet = least.alphabet().to_vec();
    alphabet.push(Symbol::base(a.clone()));
    let a_sym = alphabet.len() - 1;
    let mut ts = least.transitions().to_vec();
    ts.extend(least.initial().iter().map(|&q| Transition::new(s, a_sym, q)));
    let heads = Nfa::new(alphabet, s + 1, [s], least.finals().collect::<Vec<_>>(), ts)?;

    let root = vec![r.clone()];
    let top = conv_pair(&word_language(&root), &heads, (), |_, _, _| Some(()), |_| true)?;
    let members = shifted_members(e.relation(), &least, &a, p.order().letters())?;
    let domain = union_all(&[p.domain().clone(), word_language(&root), heads]);
    let mut letters = vec![r, a];
    letters.extend(p.order().letters().iter().cloned());
    let mut rels = BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, top.union_merged(&members).trim())?);
    let pres = Presentation::new(AlphabetOrder::new(letters)?, domain.trim(), rels)?;
    Ok(TreePresentation { pres, height: 2, root: Some(root) })
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Shift {
    Start,
    /// `rel` state, `least` state, `u` has ended, the `v` letter not yet fed.
    Mid(usize, usize, bool, Option<String>),
}

/// `{(a·u, v) : u least, E(u, v)}`. The first track runs one letter ahead,
/// so the last `v` letter waits in the state until its `u` letter arrives.
fn shifted_members(rel: &Nfa, least: &Nfa, a: &str, letters: &[String]) -> Result<Nfa> {
    let pair: Vec<(Option<String>, Option<String>)> = rel
        .alphabet()
        .iter()
        .map(|s| match s.entries() {
            Some([l, r]) => (l.clone(), r.clone()),
            _ => (Some(name_of(s)), None),
        })
        .collect();
    let least_sym: HashMap<String, usize> =
        least.alphabet().iter().enumerate().map(|(i, s)| (name_of(s), i)).collect();
    let v_choices: Vec<Option<String>> = std::iter::once(None).chain(letters.iter().cloned().map(Some)).collect();
    let sym = |x: Option<String>, v: Option<String>| Symbol::Tuple(vec![x, v]);
    let (out, _) = explore(
        vec![],
        vec![Shift::Start],
        |k: &Shift, out| match k {
            Shift::Start => {
                for &q in rel.initial() {
                    for &m in least.initial() {
                        for v in &v_choices {
                            out.push((sym(Some(a.to_string()), v.clone()), Shift::Mid(q, m, false, v.clone())));
                        }
                    }
                }
            }
            Shift::Mid(q, m, u_done, buf) => {
                for t in rel.out(*q) {
                    let (x, b) = &pair[t.sym];
                    if b != buf || (*u_done && x.is_some()) {
                        continue;
                    }
                    let next_m: Vec<(usize, bool)> = match x {
                        None => vec![(*m, true)],
                        Some(l) => match least_sym.get(l) {
                            Some(&s) => least.out_on(*m, s).iter().map(|t| (t.dst, false)).collect(),
                            None => vec![],
                        },
                    };
                    for (m2, done) in next_m {
                        for v in &v_choices {
                            if (buf.is_none() && v.is_some()) || (x.is_none() && v.is_none()) {
                                continue;
                            }
                            out.push((sym(x.clone(), v.clone()), Shift::Mid(t.dst, m2, done, v.clone())));
                        }
                    }
                }
            }
        },
        |k| match k {
            Shift::Start => false,
            Shift::Mid(q, m, _, buf) => {
                least.is_final(*m)
                    && match buf {
                        None => rel.is_final(*q),
                        Some(_) => rel.out(*q).iter().any(|t| pair[t.sym].0.is_none() && &pair[t.sym].1 == buf && rel.is_final(t.dst)),
                    }
            }
        },
        state_cap(),
    )?;
    Ok(out.trim())
}
