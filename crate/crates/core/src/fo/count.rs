//! Quantifiers that count witnesses on one track: "infinitely many" and
//! threshold counts.

use std::collections::HashMap;

use smallvec::SmallVec;

use super::join::{TNfa, Tup, PAD_ID};
use crate::error::Result;
use crate::nfa::{explore_indexed, Nfa, Transition};

fn drop_track(t: &[u32], j: usize) -> Tup {
    t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect()
}

/// Letters whose tracks other than `j` are all pad: the witness on track `j`
/// continues alone.
fn is_tail(t: &[u32], j: usize) -> bool {
    t.iter().enumerate().all(|(i, &x)| i == j || x == PAD_ID)
}

/// For each state: whether infinitely many tail words lead to acceptance, and
/// otherwise their number saturated at `sat`.
fn tail_analysis(nfa: &TNfa, j: usize, sat: u64) -> (Vec<bool>, Vec<u64>) {
    let n = nfa.state_count();
    let tails: Vec<&Transition> = nfa.transitions().iter().filter(|t| is_tail(&nfa.alphabet()[t.sym], j)).collect();
    // States co-reachable to a final state along tail transitions.
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in &tails {
        rev[t.dst].push(t.src);
    }
    let mut useful = vec![false; n];
    let mut stack: Vec<usize> = nfa.finals().collect();
    for &q in &stack {
        useful[q] = true;
    }
    while let Some(q) = stack.pop() {
        for &p in &rev[q] {
            if !useful[p] {
                useful[p] = true;
                stack.push(p);
            }
        }
    }
    // Peel off states without useful successors; what remains reaches a cycle.
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in &tails {
        if useful[t.src] && useful[t.dst] {
            succ[t.src].push(t.dst);
            pred[t.dst].push(t.src);
        }
    }
    let mut outdeg: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut order = Vec::new();
    let mut removed = vec![false; n];
    let mut queue: Vec<usize> = (0..n).filter(|&q| useful[q] && outdeg[q] == 0).collect();
    while let Some(q) = queue.pop() {
        removed[q] = true;
        order.push(q);
        for &p in &pred[q] {
            outdeg[p] -= 1;
            if outdeg[p] == 0 {
                queue.push(p);
            }
        }
    }
    let inf: Vec<bool> = (0..n).map(|q| useful[q] && !removed[q]).collect();
    let mut weight = vec![0u64; n];
    for &q in &order {
        let mut w = u64::from(nfa.is_final(q));
        for &p in &succ[q] {
            w = w.saturating_add(weight[p]).min(sat);
        }
        weight[q] = w.min(sat);
    }
    (inf, weight)
}

/// Accepts `x̄` iff infinitely many `y` on track `j` complete it to an
/// accepted convolution.
pub fn infinity_projection(nfa: &TNfa, j: usize) -> TNfa {
    let (inf, _) = tail_analysis(nfa, j, 1);
    let mut index: HashMap<Tup, usize> = HashMap::new();
    let mut alphabet: Vec<Tup> = Vec::new();
    let mut ts = Vec::new();
    for t in nfa.transitions() {
        let l = &nfa.alphabet()[t.sym];
        if l[j] == PAD_ID || is_tail(l, j) {
            continue;
        }
        let p = drop_track(l, j);
        let sym = *index.entry(p.clone()).or_insert_with(|| {
            alphabet.push(p);
            alphabet.len() - 1
        });
        ts.push(Transition::new(t.src, sym, t.dst));
    }
    let finals = (0..nfa.state_count()).filter(|&q| inf[q]);
    Nfa::new(alphabet, nfa.state_count(), nfa.initial().to_vec(), finals, ts).expect("indices in range").trim()
}

/// Number of witnesses, as seen by a counting automaton with a cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountLabel {
    Exact(u64),
    /// More than the cap, finitely many.
    Over,
    Infinite,
}

/// Which witness counts are accepted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSpec {
    /// `exact[n]` for `n ≤ cap`.
    pub exact: Vec<bool>,
    pub over: bool,
    pub infinite: bool,
}

impl CountSpec {
    pub fn exactly(n: u64) -> CountSpec {
        let mut exact = vec![false; n as usize + 1];
        exact[n as usize] = true;
        CountSpec { exact, over: false, infinite: false }
    }

    pub fn at_least(n: u64) -> CountSpec {
        let mut exact = vec![false; n as usize + 1];
        exact[n as usize] = true;
        CountSpec { exact, over: true, infinite: true }
    }

    pub fn negate(&self) -> CountSpec {
        CountSpec { exact: self.exact.iter().map(|b| !b).collect(), over: !self.over, infinite: !self.infinite }
    }

    pub fn cap(&self) -> u64 {
        self.exact.len() as u64 - 1
    }

    pub fn accepts(&self, l: CountLabel) -> bool {
        match l {
            CountLabel::Exact(n) => self.exact.get(n as usize).copied().unwrap_or(self.over),
            CountLabel::Over => self.over,
            CountLabel::Infinite => self.infinite,
        }
    }
}

/// Deterministic automaton over the tracks other than `j` whose states carry
/// the number of witnesses on track `j`.
pub struct CountingDfa {
    pub nfa: TNfa,
    pub labels: Vec<CountLabel>,
    /// Whether the state is final in the universe of the remaining tracks.
    pub complete: Vec<bool>,
}

type CountVec = SmallVec<[(u32, u64); 8]>;

/// `rel` is over `arity` tracks, `universe` over the tracks other than `j`
/// and deterministic. Counts saturate above `cap`.
pub fn counting_dfa(rel: &TNfa, j: usize, universe: &TNfa, cap: u64, state_cap: usize) -> Result<CountingDfa> {
    let m = rel.determinize()?.trim();
    let sat = cap + 1;
    let (inf, weight) = tail_analysis(&m, j, sat);
    let mut step: HashMap<(u32, Tup), SmallVec<[u32; 2]>> = HashMap::new();
    for t in m.transitions() {
        let l = &m.alphabet()[t.sym];
        if is_tail(l, j) {
            continue;
        }
        step.entry((t.src as u32, drop_track(l, j))).or_default().push(t.dst as u32);
    }
    let start_vec: CountVec = m.initial().iter().map(|&q| (q as u32, 1u64)).collect();
    let starts: Vec<(usize, CountVec)> = universe.initial().iter().map(|&u| (u, start_vec.clone())).collect();
    let (nfa, keys) = explore_indexed(
        universe.alphabet().to_vec(),
        starts,
        |(u, v): &(usize, CountVec), out| {
            for t in universe.out(*u) {
                let letter = &universe.alphabet()[t.sym];
                let mut acc: HashMap<u32, u64> = HashMap::new();
                for &(q, c) in v {
                    if let Some(ds) = step.get(&(q, letter.clone())) {
                        for &d in ds {
                            let e = acc.entry(d).or_insert(0);
                            *e = e.saturating_add(c).min(sat);
                        }
                    }
                }
                let mut nv: CountVec = acc.into_iter().collect();
                nv.sort_unstable();
                out.push((t.sym, (t.dst, nv)));
            }
        },
        |_| false,
        state_cap,
    )?;
    let labels = keys
        .iter()
        .map(|(_, v)| {
            if v.iter().any(|&(q, c)| c > 0 && inf[q as usize]) {
                return CountLabel::Infinite;
            }
            let total = v
                .iter()
                .fold(0u64, |acc, &(q, c)| acc.saturating_add(c.saturating_mul(weight[q as usize])).min(sat));
            if total > cap {
                CountLabel::Over
            } else {
                CountLabel::Exact(total)
            }
        })
        .collect();
    let complete = keys.iter().map(|(u, _)| universe.is_final(*u)).collect();
    Ok(CountingDfa { nfa, labels, complete })
}

impl CountingDfa {
    /// The tuples whose witness count satisfies `pred`.
    pub fn select(&self, pred: impl Fn(CountLabel) -> bool) -> TNfa {
        let finals = (0..self.nfa.state_count()).filter(|&q| self.complete[q] && pred(self.labels[q]));
        Nfa::new(
            self.nfa.alphabet().to_vec(),
            self.nfa.state_count(),
            self.nfa.initial().to_vec(),
            finals,
            self.nfa.transitions().to_vec(),
        )
        .expect("indices in range")
        .trim()
    }

    /// Distinct labels carried by accepting-capable states.
    pub fn labels_present(&self) -> Vec<CountLabel> {
        let mut out: Vec<CountLabel> = (0..self.labels.len()).filter(|&q| self.complete[q]).map(|q| self.labels[q]).collect();
        out.sort_by_key(|l| match l {
            CountLabel::Exact(n) => (0, *n),
            CountLabel::Over => (1, 0),
            CountLabel::Infinite => (2, 0),
        });
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smallvec::smallvec;
    use crate::fo::join::all_pad;

    fn t(v: &[u32]) -> Tup {
        SmallVec::from_slice(v)
    }

    /// `{(a^n, a^m) : n ≤ m}` over letter id 0.
    fn prefix_le() -> TNfa {
        let alphabet = vec![t(&[0, 0]), t(&[PAD_ID, 0])];
        Nfa::new(alphabet, 2, [0], [0, 1], [Transition::new(0, 0, 0), Transition::new(0, 1, 1), Transition::new(1, 1, 1)]).unwrap()
    }

    #[test]
    fn infinitely_many_larger() {
        let r = infinity_projection(&prefix_le(), 1);
        assert!(r.accepts(&[]));
        let a: Tup = smallvec![0];
        assert!(r.accepts(&[a.clone(), a.clone(), a]));
    }

    #[test]
    fn counting_witnesses_below() {
        // Witnesses y ≤ x on track 0: x = a^m has m + 1 of them.
        let alphabet = vec![t(&[0, 0]), t(&[PAD_ID, 0])];
        let le = Nfa::new(alphabet, 2, [0], [0, 1], [Transition::new(0, 0, 0), Transition::new(0, 1, 1), Transition::new(1, 1, 1)]).unwrap();
        let universe = Nfa::new(vec![t(&[0])], 1, [0], [0], [Transition::new(0, 0, 0)]).unwrap();
        let c = counting_dfa(&le, 0, &universe, 3, 1000).unwrap();
        let two = c.select(|l| l == CountLabel::Exact(2));
        let a = t(&[0]);
        assert!(two.accepts(&[a.clone()]));
        assert!(!two.accepts(&[a.clone(), a.clone()]));
        let over = c.select(|l| l == CountLabel::Over);
        assert!(over.accepts(&[a.clone(), a.clone(), a.clone(), a]));
        assert!(all_pad(&[PAD_ID]));
    }
}
