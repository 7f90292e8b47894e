//! Isomorphism of trees: exact at height 1, and a bounded check that only
//! refutes with exactly computed statistics.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::unfold::{children_of, word};
use super::{TreePresentation, Word};
use crate::error::{Error, Result};
use crate::fo::{CountLabel, Engine, Formula};
use crate::nfa::{ExtendedCount, Nfa};
use crate::verdict::{Certificate, IsoVerdict};

/// Caps of [`iso_bounded`]: child counts `κ` examined exhaustively,
/// multiplicities told apart, and children enumerated per node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCaps {
    pub kappa: u64,
    pub multiplicity: u64,
    pub representatives: usize,
}

impl IsoCaps {
    pub fn new(kappa: u64, multiplicity: u64, representatives: usize) -> IsoCaps {
        IsoCaps { kappa, multiplicity, representatives }
    }

    fn verdict(&self) -> IsoVerdict {
        IsoVerdict::consistent(&[("K", self.kappa), ("L", self.multiplicity), ("M", self.representatives as u64)])
    }
}

fn show(w: &[String]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.concat()
    }
}

/// Exact comparison of the number of children of the two roots.
pub fn iso_height1(t1: &TreePresentation, t2: &TreePresentation) -> Result<IsoVerdict> {
    if t1.height > 1 || t2.height > 1 {
        return Err(Error::Parameters("iso_height1 needs trees of height at most 1".into()));
    }
    let count = |t: &TreePresentation| -> Result<ExtendedCount> {
        children_of(&t.pres.relation("E")?.automaton, t.root()?)?.cardinality()
    };
    let (a, b) = (count(t1)?, count(t2)?);
    Ok(if a == b { IsoVerdict::Isomorphic } else { IsoVerdict::differ("children of the root", a, b) })
}

enum Outcome {
    Iso,
    Differ(Certificate),
    Open,
}

struct Side<'a> {
    tree: &'a TreePresentation,
    engine: Engine,
    rel: &'a Nfa,
}

impl Side<'_> {
    fn children(&self, u: &[String]) -> Result<Nfa> {
        children_of(self.rel, u)
    }

    /// The first `limit` children in llex order.
    fn first_children(&self, c: &Nfa, limit: usize) -> Result<Vec<Word>> {
        let ranks = self.tree.pres.order().alphabet_ranks(c.alphabet())?;
        let words = c.enumerate_ranked(limit, usize::MAX, &ranks)?;
        Ok(words.iter().map(|w| w.iter().map(|s| s.as_base().expect("base").to_string()).collect()).collect())
    }
}

/// Number of children having exactly `κ` children, per `κ`, for `κ` in
/// `kappas`; the number with infinitely many; and the children with more
/// than `max(kappas)` children, counted and listed up to `reps`.
struct Profile {
    exact: BTreeMap<u64, ExtendedCount>,
    infinite: ExtendedCount,
    over: ExtendedCount,
    over_reps: Vec<Word>,
}

fn profile(side: &Side, c: &Nfa, kappas: &[u64], reps: usize) -> Result<Profile> {
    let zero = ExtendedCount::finite(0);
    if c.is_empty() {
        return Ok(Profile {
            exact: kappas.iter().map(|&k| (k, zero.clone())).collect(),
            infinite: zero.clone(),
            over: zero,
            over_reps: vec![],
        });
    }
    let cap = kappas.iter().copied().max().unwrap_or(0);
    let f: Formula = "(E x y)".parse()?;
    let counting = side.engine.count_witnesses_within(&f, &["x"], "y", cap, c)?;
    let set = |pred: &dyn Fn(CountLabel) -> bool| side.engine.to_symbols(&counting.select(pred));
    let one_track = |m: Nfa| m.map_letters(|s| crate::Symbol::base(crate::compose::track_name(s)));
    let mut exact = BTreeMap::new();
    for &k in kappas {
        exact.insert(k, set(&|l| l == CountLabel::Exact(k)).cardinality()?);
    }
    let over_set = one_track(set(&|l| l == CountLabel::Over));
    Ok(Profile {
        exact,
        infinite: set(&|l| l == CountLabel::Infinite).cardinality()?,
        over: over_set.cardinality()?,
        over_reps: side.first_children(&over_set, reps)?,
    })
}

struct Checker<'a> {
    sides: [Side<'a>; 2],
    caps: IsoCaps,
    memo: HashMap<(usize, Word, usize, Word, usize), Outcome>,
}

impl Outcome {
    fn copy(&self) -> Outcome {
        match self {
            Outcome::Iso => Outcome::Iso,
            Outcome::Differ(c) => Outcome::Differ(c.clone()),
            Outcome::Open => Outcome::Open,
        }
    }
}

impl Checker<'_> {
    /// Counts that provably differ: both below `L`, or one below `L` and
    /// the other at least `L`.
    fn differ(&self, a: &ExtendedCount, b: &ExtendedCount) -> bool {
        let small = |x: &ExtendedCount| match x {
            ExtendedCount::Finite(n) if *n < BigUint::from(self.caps.multiplicity) => Some(n.clone()),
            _ => None,
        };
        match (small(a), small(b)) {
            (Some(x), Some(y)) => x != y,
            (None, None) => false,
            _ => true,
        }
    }

    fn certificate(&self, stat: String, a: ExtendedCount, b: ExtendedCount) -> Outcome {
        Outcome::Differ(Certificate { statistic: stat, left: a, right: b })
    }

    fn compare(&mut self, a: usize, u: &[String], b: usize, v: &[String], h: usize) -> Result<Outcome> {
        let key = (a, u.to_vec(), b, v.to_vec(), h);
        if let Some(o) = self.memo.get(&key) {
            return Ok(o.copy());
        }
        let out = self.compare_fresh(a, u, b, v, h)?;
        self.memo.insert(key, out.copy());
        Ok(out)
    }

    fn compare_fresh(&mut self, a: usize, u: &[String], b: usize, v: &[String], h: usize) -> Result<Outcome> {
        let (cu, cv) = (self.sides[a].children(u)?, self.sides[b].children(v)?);
        let (nu, nv) = (cu.cardinality()?, cv.cardinality()?);
        let at = format!("{} / {}", show(u), show(v));
        if nu != nv {
            if self.differ(&nu, &nv) {
                return Ok(self.certificate(format!("children of {at}"), nu, nv));
            }
            return Ok(Outcome::Open);
        }
        match h {
            0 | 1 => Ok(Outcome::Iso),
            2 => self.compare_profiles(a, &cu, b, &cv, &at),
            _ => self.compare_children(a, &cu, b, &cv, h, &at),
        }
    }

    /// Subtrees of height at most 2 are determined by how many children
    /// have exactly `κ` children, for every `κ` including `ℵ₀`.
    fn compare_profiles(&mut self, a: usize, cu: &Nfa, b: usize, cv: &Nfa, at: &str) -> Result<Outcome> {
        let m = self.caps.representatives;
        let base: Vec<u64> = (0..=self.caps.kappa).collect();
        let pu = profile(&self.sides[a], cu, &base, m)?;
        let pv = profile(&self.sides[b], cv, &base, m)?;
        // Children with more than K children: their exact counts become
        // extra values of κ.
        let mut extra: Vec<u64> = Vec::new();
        for (side, p) in [(a, &pu), (b, &pv)] {
            for w in &p.over_reps {
                if let ExtendedCount::Finite(n) = self.sides[side].children(w)?.cardinality()? {
                    let n = u64::try_from(n).map_err(|_| Error::Parameters("child count out of range".into()))?;
                    if !extra.contains(&n) {
                        extra.push(n);
                    }
                }
            }
        }
        extra.sort_unstable();
        let (eu, ev) = if extra.is_empty() {
            (BTreeMap::new(), BTreeMap::new())
        } else {
            (profile(&self.sides[a], cu, &extra, 0)?.exact, profile(&self.sides[b], cv, &extra, 0)?.exact)
        };
        let mut rows: Vec<(String, &ExtendedCount, &ExtendedCount)> = Vec::new();
        for k in &base {
            rows.push((format!("children of {at} with {k} children"), &pu.exact[k], &pv.exact[k]));
        }
        rows.push((format!("children of {at} with infinitely many children"), &pu.infinite, &pv.infinite));
        for k in &extra {
            rows.push((format!("children of {at} with {k} children"), &eu[k], &ev[k]));
        }
        let mut all_equal = true;
        for (stat, x, y) in &rows {
            if x != y {
                if self.differ(x, y) {
                    return Ok(self.certificate(stat.clone(), (*x).clone(), (*y).clone()));
                }
                all_equal = false;
            }
        }
        let covered = |p: &Profile| match &p.over {
            ExtendedCount::Finite(n) => *n <= BigUint::from(m),
            ExtendedCount::Infinite => false,
        };
        Ok(if all_equal && covered(&pu) && covered(&pv) { Outcome::Iso } else { Outcome::Open })
    }

    /// Taller subtrees: with both child sets enumerated in full, children
    /// are grouped by the comparisons that did not refute, and each group
    /// must be equally large on both sides.
    fn compare_children(&mut self, a: usize, cu: &Nfa, b: usize, cv: &Nfa, h: usize, at: &str) -> Result<Outcome> {
        let m = self.caps.representatives;
        let ku = self.sides[a].first_children(cu, m + 1)?;
        let kv = self.sides[b].first_children(cv, m + 1)?;
        if ku.len() > m || kv.len() > m {
            return Ok(Outcome::Open);
        }
        let split = ku.len();
        let nodes: Vec<(usize, Word)> =
            ku.into_iter().map(|w| (a, w)).chain(kv.into_iter().map(|w| (b, w))).collect();
        let n = nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut exact = true;
        let mut outcomes = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let o = self.compare(nodes[i].0, &nodes[i].1, nodes[j].0, &nodes[j].1, h - 1)?;
                match o {
                    Outcome::Differ(_) => {}
                    Outcome::Iso => {
                        outcomes[i][j] = true;
                        let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                        parent[x] = y;
                    }
                    Outcome::Open => {
                        let (x, y) = (find(&mut parent, i), find(&mut parent, j));
                        parent[x] = y;
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, (u64, u64, usize)> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            let g = groups.entry(r).or_insert((0, 0, i));
            if i < split {
                g.0 += 1;
            } else {
                g.1 += 1;
            }
        }
        for (x, y, rep) in groups.values() {
            let (cx, cy) = (ExtendedCount::finite(*x), ExtendedCount::finite(*y));
            if x != y && self.differ(&cx, &cy) {
                let stat = format!("children of {at} like {}", show(&nodes[*rep].1));
                return Ok(self.certificate(stat, cx, cy));
            }
            if x != y {
                exact = false;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if find(&mut parent, i) == find(&mut parent, j) && !outcomes[i][j] {
                    exact = false;
                }
            }
        }
        Ok(if exact { Outcome::Iso } else { Outcome::Open })
    }
}

/// Bounded isomorphism of two trees of height at most `n`. Node pairs are
/// compared by their number of children; at remaining height 2 by the
/// number of children with exactly `κ` children, for `κ ≤ K`, `κ = ℵ₀` and
/// the child counts of the first `M` children with more than `K` children;
/// higher up by grouping fully enumerated child sets of at most `M`
/// elements. Refutations are exact; otherwise the verdict names the caps.
pub fn iso_bounded(t1: &TreePresentation, t2: &TreePresentation, n: usize, caps: IsoCaps) -> Result<IsoVerdict> {
    if t1.height > n || t2.height > n {
        return Err(Error::Parameters(format!("trees must have height at most {n}")));
    }
    fn side(t: &TreePresentation) -> Result<Side<'_>> {
        Ok(Side { tree: t, engine: Engine::new(&t.pres)?, rel: &t.pres.relation("E")?.automaton })
    }
    let (r1, r2) = (t1.root()?.clone(), t2.root()?.clone());
    for (t, r) in [(t1, &r1), (t2, &r2)] {
        if !t.pres.domain().accepts(&word(r)) {
            return Err(Error::NotARoot(show(r)));
        }
    }
    let mut checker = Checker { sides: [side(t1)?, side(t2)?], caps, memo: HashMap::new() };
    Ok(match checker.compare(0, &r1, 1, &r2, n)? {
        Outcome::Iso => IsoVerdict::Isomorphic,
        Outcome::Differ(c) => IsoVerdict::NonIsomorphic { certificate: c },
        Outcome::Open => caps.verdict(),
    })
}

/// All nodes and edges of a finite tree or forest, nodes in llex order.
pub fn materialize(t: &TreePresentation, limit: usize) -> Result<(Vec<Word>, Vec<(usize, usize)>)> {
    let dom = t.pres.domain();
    match dom.cardinality()? {
        ExtendedCount::Infinite => return Err(Error::Infinite),
        ExtendedCount::Finite(n) if n > BigUint::from(limit) => {
            return Err(Error::Parameters(format!("more than {limit} nodes")))
        }
        _ => {}
    }
    let ranks = t.pres.order().alphabet_ranks(dom.alphabet())?;
    let nodes: Vec<Word> = dom
        .enumerate_ranked(limit, usize::MAX, &ranks)?
        .iter()
        .map(|w| w.iter().map(|s| s.as_base().expect("base").to_string()).collect())
        .collect();
    let index: HashMap<&Word, usize> = nodes.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let rel = &t.pres.relation("E")?.automaton;
    let mut edges = Vec::new();
    for (i, u) in nodes.iter().enumerate() {
        for s in children_of(rel, u)?.enumerate(limit + 1)? {
            let w: Word = s.iter().map(|x| x.as_base().expect("base").to_string()).collect();
            let j = *index.get(&w).ok_or_else(|| Error::Validation(format!("child {} is not a node", show(&w))))?;
            edges.push((i, j));
        }
    }
    Ok((nodes, edges))
}

/// Canonical code of a finite rooted tree on nodes `0..n`: each node is
/// `(` followed by its children's codes in sorted order and `)`.
pub fn ahu_canonical(n: usize, edges: &[(usize, usize)]) -> Result<String> {
    let mut kids = vec![Vec::new(); n];
    let mut parent = vec![None; n];
    for &(p, c) in edges {
        if p >= n || c >= n {
            return Err(Error::Parameters(format!("edge ({p}, {c}) outside 0..{n}")));
        }
        if parent[c].replace(p).is_some() {
            return Err(Error::Validation(format!("node {c} has two parents")));
        }
        kids[p].push(c);
    }
    let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
    let [root] = roots[..] else {
        return Err(Error::Validation(format!("{} roots", roots.len())));
    };
    // Children before parents.
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        order.extend(kids[order[i]].iter().copied());
        i += 1;
    }
    if order.len() != n {
        return Err(Error::Validation("not connected".into()));
    }
    let mut code = vec![String::new(); n];
    for &v in order.iter().rev() {
        let mut cs: Vec<&str> = kids[v].iter().map(|&c| code[c].as_str()).collect();
        cs.sort_unstable();
        code[v] = format!("({})", cs.concat());
    }
    Ok(code[root].clone())
}
