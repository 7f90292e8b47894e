//! Height-1 forests counted by run numbers, the height-2 dag `D²`, and the
//! step from `Dⁱ` to `Dⁱ⁺¹`.

use std::collections::{BTreeMap, HashMap};

use super::DagPresentation;
use crate::compose::{
    aleph0_copies, conv_pair, counter_decode, disjoint_union, edge_presentation, flatten, monitor, name_of, repeat,
    union_all, wrap_language,
};
use crate::error::{Error, Result};
use crate::fo::{Presentation, Relation};
use crate::limits::state_cap;
use crate::nfa::{explore, run_automaton_named, Nfa, Transition};
use crate::poly::{conv_alphabet, conv_one, pairing, poly_automaton_conv_letter, Polynomial};
use crate::symbol::{tuple_name, Symbol};

const SHARP: &str = "#";
const SHARP1: &str = "#1";
const SHARP2: &str = "#2";

/// Flattened names of `Σ_k^letter` with their track masks.
fn masks(k: usize, letter: &str) -> HashMap<String, u32> {
    conv_alphabet(k, letter)
        .iter()
        .map(|s| {
            let m = s.entries().expect("tuple").iter().enumerate().filter(|(_, x)| x.is_some()).fold(0, |m, (i, _)| m | 1 << i);
            (s.flat_name(), m)
        })
        .collect()
}

fn roots(k: usize, letter: &str) -> Nfa {
    flatten(&conv_one(k, letter))
}

/// Words of length at least 2.
fn min_len2(m: &Nfa) -> Result<Nfa> {
    monitor(m, 0u8, |c, _| Some((c + 1).min(2)), |c| *c >= 2)
}

fn any<M>(_: &M, _: Option<&str>, _: Option<&str>) -> Option<()> {
    Some(())
}

fn always(_: &()) -> bool {
    true
}

fn epsilon_b() -> Nfa {
    Nfa::epsilon(vec![Symbol::base("b")])
}

/// Height-1 forest: roots `⊗_ℓ(letter⁺)`, and the root `letter^ē` has
/// `C(q1(ē), q2(ē))` leaves, the accepting runs of an automaton with that
/// many runs on it. Leaf letters are `{letter}:{i}`.
pub fn build_forest_height1(q1: &Polynomial, q2: &Polynomial, l: usize, letter: &str) -> Result<Presentation> {
    let c = pairing(&q1.with_vars(l)?, &q2.with_vars(l)?);
    let a = poly_automaton_conv_letter(&c, l, letter)?;
    let run = run_automaton_named(&a, |i| Symbol::base(format!("{letter}:{i}")));
    let top = roots(l, letter);
    let edges = run.nfa.map_letters(|s| {
        let i: usize = s.as_base().and_then(|b| b.rsplit(':').next()).and_then(|n| n.parse().ok()).expect("run letter");
        Symbol::Tuple(vec![Some(a.alphabet()[run.projection[i]].flat_name()), Some(name_of(s))])
    });
    edge_presentation(top.union_merged(&run.nfa), edges)
}

/// `{b^{e1 e2} : e1 ≠ e2}` over flattened `Σ_2^b`.
fn offdiagonal() -> Nfa {
    let names: Vec<Symbol> = conv_alphabet(2, "b").iter().map(|s| Symbol::base(s.flat_name())).collect();
    // masks 1 = (b,_), 2 = (_,b), 3 = (b,b)
    let ts = [
        Transition::new(0, 2, 1),
        Transition::new(1, 2, 1),
        Transition::new(1, 0, 2),
        Transition::new(2, 0, 2),
        Transition::new(1, 1, 3),
        Transition::new(3, 1, 3),
    ];
    Nfa::new(names, 4, [0], [2, 3], ts).expect("well-formed")
}

/// Edges from `⊗_k(a⁺)` to `$* ⊗ a^{c̄ ȳ}` where `a^{c̄ ȳ}` ranges over
/// `targets` (wide `a`-convolutions) and `c̄` is the source.
fn prefix_edges(k: usize, wide: usize, decode: &HashMap<String, (bool, Option<String>)>) -> Result<Nfa> {
    let narrow = masks(k, "a");
    let wide_masks = masks(wide, "a");
    let low = (1u32 << k) - 1;
    let target = wrap_language(&roots(wide, "a"))?;
    conv_pair(
        &roots(k, "a"),
        &target,
        (),
        |_, l, r| {
            let lm = l.map_or(0, |l| narrow[l]);
            let rm = r.and_then(|r| decode[r].1.as_ref()).map_or(0, |i| wide_masks[i]);
            (rm & low == lm).then_some(())
        },
        always,
    )
}

fn check_polys(p1: &Polynomial, p2: &Polynomial) -> Result<()> {
    if p1.is_zero() || p2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(())
}

/// The dag `D²` over `⊗_k(a⁺) ∪ b* ∪ ($* ⊗ V_F)`. Below `a^c̄` hang `ℵ₀`
/// copies of every `T[p1(c̄,x̄)+y, p2(c̄,x̄)+y]` and of every `T[e1,e2]`
/// with `e1 ≠ e2`; below `ε` the latter only; below `b^m` also the
/// `T[e,e]` with `e > m`. `T[1,1]` is left out of the forest, since no root
/// reaches it.
pub fn build_d2(p1: &Polynomial, p2: &Polynomial, k: usize, l: usize) -> Result<DagPresentation> {
    check_polys(p1, p2)?;
    if k == 0 || l <= k {
        return Err(Error::Parameters(format!("need 0 < k < l, got k = {k}, l = {l}")));
    }
    let y = Polynomial::var(l + 1, l + 1);
    let f1 = build_forest_height1(&p1.with_vars(l + 1)?.add(&y), &p2.with_vars(l + 1)?.add(&y), l + 1, "a")?;
    let f2 = {
        let f = build_forest_height1(&Polynomial::var(2, 1), &Polynomial::var(2, 2), 2, "b")?;
        let mut rels = BTreeMap::new();
        rels.insert("E".to_string(), Relation::new(2, min_len2(&f.relation("E")?.automaton)?)?);
        Presentation::new(f.order().clone(), min_len2(f.domain())?, rels)?
    };
    let vf = disjoint_union(&[&f1, &f2])?;
    let copies = aleph0_copies(&vf)?;
    let decode = counter_decode(vf.order().letters().iter().map(String::as_str));
    let pair_masks = masks(2, "b");

    let to_f1 = prefix_edges(k, l + 1, &decode)?;
    let off = wrap_language(&offdiagonal())?;
    let to_off = conv_pair(&roots(k, "a"), &off, (), any, always)?;
    let eps_off = conv_pair(&epsilon_b(), &off, (), any, always)?;
    let diag_or_off = wrap_language(&min_len2(&roots(2, "b"))?)?;
    let from_b = conv_pair(
        &repeat("b", 1),
        &diag_or_off,
        (false, false),
        |&(single, deep), l, r| {
            let m = r.and_then(|r| decode[r].1.as_ref()).map_or(0, |i| pair_masks[i]);
            Some((single || m == 1 || m == 2, deep || (l.is_none() && m == 3)))
        },
        |&(single, deep)| single || deep,
    )?;
    let edges = union_all(&[copies.relation("E")?.automaton.clone(), to_f1, to_off, eps_off, from_b]);
    let domain = union_all(&[roots(k, "a"), repeat("b", 0), copies.domain().clone()]);
    Ok(DagPresentation { pres: edge_presentation(domain, edges)?, height: 2, a_tracks: Some(k) })
}

fn sharp_names() -> HashMap<String, bool> {
    [(Some(SHARP), Some("b")), (Some(SHARP), None), (None, Some("b"))]
        .iter()
        .map(|&(s, b)| (tuple_name(&[s, b]), s.is_some()))
        .collect()
}

/// `♯⁺ ⊗ b*` (or `b⁺`), flattened.
fn sharp_b(b_min: usize) -> Result<Nfa> {
    Ok(flatten(&conv_pair(&repeat(SHARP, 1), &repeat("b", b_min), (), any, always)?))
}

/// `♯₁⁺ ♯₂*`.
fn sharp12() -> Nfa {
    let ts = [Transition::new(0, 0, 1), Transition::new(1, 0, 1), Transition::new(1, 1, 2), Transition::new(2, 1, 2)];
    Nfa::new(vec![Symbol::base(SHARP1), Symbol::base(SHARP2)], 3, [0], [1, 2], ts).expect("well-formed")
}

fn left_entry(s: &Symbol) -> Option<&str> {
    s.entries().and_then(|e| e[0].as_deref())
}

/// `{(♯^x ⊗ b^m, v) : x ≥ 1, E(b^m, v)}` from the edges leaving `b*`.
fn sharp_over_left(from_b: &Nfa) -> Result<Nfa> {
    let pair = |s: &Symbol| -> (Option<String>, Option<String>) {
        let e = s.entries().expect("pair letters");
        (e[0].clone(), e[1].clone())
    };
    let lift = |s: bool, l: Option<&str>| -> Option<String> {
        (s || l.is_some()).then(|| tuple_name(&[s.then_some(SHARP), l]))
    };
    let (out, _) = explore(
        vec![],
        from_b.initial().iter().map(|&q| (Some(q), 0u8)).collect(),
        |&(q, ph): &(Option<usize>, u8), out| {
            let choices: &[(bool, u8)] = match ph {
                0 => &[(true, 1)],
                1 => &[(true, 1), (false, 2)],
                _ => &[(false, 2)],
            };
            match q {
                Some(q) => {
                    for t in from_b.out(q) {
                        let (l, r) = pair(&from_b.alphabet()[t.sym]);
                        for &(s, ph2) in choices {
                            out.push((Symbol::Tuple(vec![lift(s, l.as_deref()), r.clone()]), (Some(t.dst), ph2)));
                        }
                    }
                    if from_b.is_final(q) && ph == 1 {
                        out.push((Symbol::Tuple(vec![lift(true, None), None]), (None, 1)));
                    }
                }
                None => out.push((Symbol::Tuple(vec![lift(true, None), None]), (None, 1))),
            }
        },
        |&(q, ph)| ph != 0 && q.map_or(true, |q| from_b.is_final(q)),
        state_cap(),
    )?;
    Ok(out.trim())
}

/// `Dⁱ⁺¹` from `Dⁱ` (roots `⊗_k(a⁺) ∪ b*`, `k ≥ 3`). First `D′`: the `b*`
/// nodes give way to `♯^x ⊗ b^m`, which inherits the children of `b^m`,
/// and `a^{c̄xy}` and `♯^x ⊗ b^m` get the `x` new leaves `♯₁^i ♯₂^{x−i}`.
/// Then `ℵ₀` copies of `D′` hang below the new roots `⊗_{k−2}(a⁺) ∪ b*`.
pub fn tower_step(di: &DagPresentation, i: usize) -> Result<DagPresentation> {
    let k = di.a_tracks.ok_or_else(|| Error::Parameters("the dag has no gadget root conventions".into()))?;
    if k < 3 {
        return Err(Error::Parameters(format!("roots ⊗_{k}(a⁺) leave no room for another step")));
    }
    if di.height != i {
        return Err(Error::Parameters(format!("dag has height {}, step expects {i}", di.height)));
    }
    let k2 = k - 2;
    let v = di.pres.domain();
    let e = &di.pres.relation("E")?.automaton;
    let not_b = |l: Option<&str>| l.is_some_and(|l| l != "b");

    let v_rest = monitor(v, false, |f, s| Some(*f || not_b(Some(&name_of(s)))), |f| *f)?;
    let sb = sharp_b(0)?;
    let s12 = sharp12();
    let domain1 = union_all(&[v_rest, sb.clone(), s12.clone()]);

    let keep = monitor(e, false, |f, s| Some(*f || not_b(left_entry(s))), |f| *f)?;
    let from_b = monitor(e, (), |_, s| (!not_b(left_entry(s))).then_some(()), always)?;
    let top = masks(k, "a");
    let leaves_a = conv_pair(
        &roots(k, "a"),
        &s12,
        (),
        |_, l, r| (r.is_some() == (l.map_or(0, |l| top[l]) >> k2 & 1 == 1)).then_some(()),
        always,
    )?;
    let sharp = sharp_names();
    let leaves_sb = conv_pair(&sb, &s12, (), |_, l, r| (r.is_some() == l.is_some_and(|l| sharp[l])).then_some(()), always)?;
    let edges1 = union_all(&[keep, sharp_over_left(&from_b)?, leaves_a, leaves_sb]);
    let d1 = edge_presentation(domain1, edges1)?;

    let copies = aleph0_copies(&d1)?;
    let decode = counter_decode(d1.order().letters().iter().map(String::as_str));
    let to_a = prefix_edges(k2, k, &decode)?;
    let sb_plus = wrap_language(&sharp_b(1)?)?;
    let a_sb = conv_pair(&roots(k2, "a"), &sb_plus, (), any, always)?;
    let eps_sb = conv_pair(&epsilon_b(), &wrap_language(&sb)?, (), any, always)?;
    let b_sb = conv_pair(&repeat("b", 1), &sb_plus, (), any, always)?;
    let sharp_only = flatten(&conv_pair(&repeat(SHARP, 1), &epsilon_b(), (), any, always)?);
    let b_short = conv_pair(
        &repeat("b", 1),
        &wrap_language(&sharp_only)?,
        false,
        |&f, l, r| Some(f || (l.is_some() && r.map_or(true, |r| decode[r].1.is_none()))),
        |&f| f,
    )?;
    let edges = union_all(&[copies.relation("E")?.automaton.clone(), to_a, a_sb, eps_sb, b_sb, b_short]);
    let domain = union_all(&[roots(k2, "a"), repeat("b", 0), copies.domain().clone()]);
    Ok(DagPresentation { pres: edge_presentation(domain, edges)?, height: i + 1, a_tracks: Some(k2) })
}
