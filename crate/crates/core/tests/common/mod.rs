//! Builders and oracles shared by the integration tests.
#![allow(dead_code)]

pub mod census;
pub mod fo;
pub mod lo;
pub mod runs;

use std::collections::BTreeMap;

use autostruct::equiv::EquivPresentation;
use autostruct::fo::{Presentation, Relation};
use autostruct::trees::{DagPresentation, TreePresentation};
use autostruct::{Nfa, Symbol, Transition};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn node(i: usize) -> String {
    format!("n{i}")
}

/// Presentation of a finite graph on nodes `n0..n{k-1}` (one letter each)
/// with edge relation `E`.
pub fn finite_graph(n: usize, edges: &[(usize, usize)]) -> Presentation {
    let letters: Vec<Symbol> = (0..n).map(|i| Symbol::base(node(i))).collect();
    let words: Vec<Vec<Symbol>> = letters.iter().map(|l| vec![l.clone()]).collect();
    let domain = Nfa::from_words(letters, &words).unwrap();
    let pair = |a: usize, b: usize| Symbol::Tuple(vec![Some(node(a)), Some(node(b))]);
    let mut alpha: Vec<Symbol> = edges.iter().map(|&(a, b)| pair(a, b)).collect();
    alpha.sort();
    alpha.dedup();
    let ws: Vec<Vec<Symbol>> = edges.iter().map(|&(a, b)| vec![pair(a, b)]).collect();
    let e = Nfa::from_words(alpha, &ws).unwrap();
    let mut rels = BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, e).unwrap());
    Presentation::with_domain_order(domain, rels).unwrap()
}

pub fn finite_tree(n: usize, edges: &[(usize, usize)], height: usize) -> TreePresentation {
    let root = (0..n).find(|v| edges.iter().all(|&(_, c)| c != *v)).unwrap();
    TreePresentation { pres: finite_graph(n, edges), height, root: Some(vec![node(root)]) }
}

pub fn finite_dag(n: usize, edges: &[(usize, usize)], height: usize) -> DagPresentation {
    DagPresentation::new(finite_graph(n, edges), height).unwrap()
}

/// Equivalence with the given class of each element.
pub fn finite_equiv(class: &[usize]) -> EquivPresentation {
    let mut edges = Vec::new();
    for i in 0..class.len() {
        for j in 0..class.len() {
            if class[i] == class[j] {
                edges.push((i, j));
            }
        }
    }
    EquivPresentation::new(finite_graph(class.len(), &edges)).unwrap()
}

/// Random tree on `n` nodes with depth at most `depth`, node 0 the root
/// after a random relabeling.
pub fn random_tree(rng: &mut impl Rng, n: usize, depth: usize) -> Vec<(usize, usize)> {
    let mut level = vec![0usize];
    let mut edges = Vec::new();
    for v in 1..n {
        let choices: Vec<usize> = (0..v).filter(|&p| level[p] < depth).collect();
        let p = *choices.choose(rng).unwrap();
        level.push(level[p] + 1);
        edges.push((p, v));
    }
    edges
}

pub fn relabel(rng: &mut impl Rng, n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect()
}

/// Random dag with levels `0..=depth`; edges go to strictly higher levels.
pub fn random_dag(rng: &mut impl Rng, n: usize, depth: usize) -> Vec<(usize, usize)> {
    let level: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=depth)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if level[a] < level[b] && rng.gen_bool(0.3) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// AHU code computed directly on an explicit rooted tree given by child lists.
pub fn ahu_of(kids: &[Vec<usize>], v: usize) -> String {
    let mut cs: Vec<String> = kids[v].iter().map(|&c| ahu_of(kids, c)).collect();
    cs.sort();
    format!("({})", cs.concat())
}

/// AHU code of the recursive unfolding of a finite dag below a new root.
pub fn unfolding_code(n: usize, edges: &[(usize, usize)]) -> String {
    fn code(v: usize, n: usize, edges: &[(usize, usize)]) -> String {
        let mut cs: Vec<String> = edges.iter().filter(|e| e.0 == v).map(|e| code(e.1, n, edges)).collect();
        cs.sort();
        format!("({})", cs.concat())
    }
    let mut cs: Vec<String> = (0..n).filter(|v| edges.iter().all(|e| e.1 != *v)).map(|v| code(v, n, edges)).collect();
    cs.sort();
    format!("({})", cs.concat())
}

/// Exhaustive search for an isomorphism of finite equivalences given by
/// class labels.
pub fn equiv_isomorphic(a: &[usize], b: &[usize]) -> bool {
    fn extend(a: &[usize], b: &[usize], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if used[j] {
                continue;
            }
            let ok = (0..i).all(|k| (a[k] == a[i]) == (b[map[k]] == b[j]));
            if ok {
                map.push(j);
                used[j] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    a.len() == b.len() && extend(a, b, &mut Vec::new(), &mut vec![false; b.len()])
}

/// Exhaustive search for an isomorphism of finite rooted trees.
pub fn trees_isomorphic(n: usize, e1: &[(usize, usize)], e2: &[(usize, usize)]) -> bool {
    fn extend(n: usize, e1: &[(usize, usize)], e2: &[(usize, usize)], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] {
                continue;
            }
            let ok = (0..=i).all(|k| {
                let mk = if k == i { j } else { map[k] };
                e1.contains(&(k, i)) == e2.contains(&(mk, j)) && e1.contains(&(i, k)) == e2.contains(&(j, mk))
            });
            if ok {
                map.push(j);
                used[j] = true;
                if extend(n, e1, e2, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    extend(n, e1, e2, &mut Vec::new(), &mut vec![false; n])
}

/// Root `r` with the leaves `a⁺`, or `a^1..a^k` when `leaves` is given.
pub fn star(leaves: Option<usize>) -> TreePresentation {
    let (r, a) = (Symbol::base("r"), Symbol::base("a"));
    let domain = match leaves {
        None => Nfa::new(vec![r, a], 3, [0], [1, 2], [Transition::new(0, 0, 1), Transition::new(0, 1, 2), Transition::new(2, 1, 2)]).unwrap(),
        Some(k) => {
            let mut ws = vec![vec![r]];
            ws.extend((1..=k).map(|i| vec![a.clone(); i]));
            Nfa::from_words(vec![Symbol::base("r"), a], &ws).unwrap()
        }
    };
    let ra = Symbol::Tuple(vec![Some("r".into()), Some("a".into())]);
    let ua = Symbol::Tuple(vec![None, Some("a".into())]);
    let e = match leaves {
        None => Nfa::new(vec![ra, ua], 2, [0], [1], [Transition::new(0, 0, 1), Transition::new(1, 1, 1)]).unwrap(),
        Some(k) => {
            let ws: Vec<Vec<Symbol>> = (1..=k).map(|i| {
                let mut w = vec![ra.clone()];
                w.extend(std::iter::repeat(ua.clone()).take(i - 1));
                w
            }).collect();
            Nfa::from_words(vec![ra, ua], &ws).unwrap()
        }
    };
    let mut rels = BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, e).unwrap());
    let pres = Presentation::with_domain_order(domain, rels).unwrap();
    TreePresentation { pres, height: 1, root: Some(vec!["r".into()]) }
}
