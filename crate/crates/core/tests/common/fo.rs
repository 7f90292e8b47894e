//! Naive model checking on explicit finite structures, and a pumping
//! window oracle for `∃∞`.

use std::collections::{BTreeSet, HashMap};

use autostruct::conv::convolve;
use autostruct::fo::{eval_formula, Formula, Presentation, Relation};
use autostruct::{AlphabetOrder, ExtendedCount, Nfa, Symbol, Transition};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn tup(e: &[Option<&str>]) -> Symbol {
    Symbol::Tuple(e.iter().map(|x| x.map(String::from)).collect())
}

/// Random finite structures with words over {a, b}.
pub struct Finite {
    pub domain: Vec<Vec<String>>,
    pub r: BTreeSet<(usize, usize)>,
    pub u: BTreeSet<usize>,
}

pub fn ab_words(max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| ["a", "b"].map(|c| [w.clone(), vec![c.to_string()]].concat()))
            .collect();
        out.extend(layer.clone());
    }
    out
}

pub fn random_finite(rng: &mut ChaCha8Rng) -> Finite {
    let pool = ab_words(3);
    let size = rng.gen_range(0..=12);
    let mut picked: BTreeSet<usize> = BTreeSet::new();
    while picked.len() < size {
        picked.insert(rng.gen_range(0..pool.len()));
    }
    let domain: Vec<Vec<String>> = picked.into_iter().map(|i| pool[i].clone()).collect();
    let n = domain.len();
    let density = rng.gen_range(0.1..0.6);
    let r = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(density)).collect();
    let u = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    Finite { domain, r, u }
}

pub fn alphabet_of(words: &[Vec<Symbol>]) -> Vec<Symbol> {
    let set: BTreeSet<String> = words.iter().flatten().map(|s| s.to_string()).collect();
    let mut out: Vec<Symbol> = Vec::new();
    for w in words {
        for s in w {
            if !out.contains(s) {
                out.push(s.clone());
            }
        }
    }
    assert_eq!(set.len(), out.len());
    out
}

pub fn explicit(words: Vec<Vec<Symbol>>) -> Nfa {
    Nfa::from_words(alphabet_of(&words), &words).unwrap()
}

impl Finite {
    pub fn presentation(&self) -> Presentation {
        let order = AlphabetOrder::new(["a", "b"]).unwrap();
        let dom: Vec<Vec<Symbol>> =
            self.domain.iter().map(|w| w.iter().map(|c| Symbol::base(c.as_str())).collect()).collect();
        let r: Vec<Vec<Symbol>> =
            self.r.iter().map(|&(i, j)| convolve(&[self.domain[i].clone(), self.domain[j].clone()])).collect();
        let u: Vec<Vec<Symbol>> = self.u.iter().map(|&i| convolve(&[self.domain[i].clone()])).collect();
        let mut rels = std::collections::BTreeMap::new();
        rels.insert("R".to_string(), Relation::new(2, explicit(r)).unwrap());
        rels.insert("U".to_string(), Relation::new(1, explicit(u)).unwrap());
        Presentation::new(order, explicit(dom), rels).unwrap()
    }

    /// Direct model checking.
    pub fn holds(&self, f: &Formula, env: &mut HashMap<String, usize>) -> bool {
        let order = AlphabetOrder::new(["a", "b"]).unwrap();
        let n = self.domain.len();
        let count = |x: &str, g: &Formula, env: &mut HashMap<String, usize>| {
            let saved = env.get(x).copied();
            let mut c = 0u64;
            for i in 0..n {
                env.insert(x.to_string(), i);
                c += u64::from(self.holds(g, env));
            }
            match saved {
                Some(v) => env.insert(x.to_string(), v),
                None => env.remove(x),
            };
            c
        };
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(r, args) => match r.as_str() {
                "R" => self.r.contains(&(env[&args[0]], env[&args[1]])),
                _ => self.u.contains(&env[&args[0]]),
            },
            Formula::Eq(x, y) => env[x] == env[y],
            Formula::Lex(x, y) => order.lex_compare(&self.domain[env[x]], &self.domain[env[y]]).unwrap().is_le(),
            Formula::Llex(x, y) => order.llex_compare(&self.domain[env[x]], &self.domain[env[y]]).unwrap().is_le(),
            Formula::Not(g) => !self.holds(g, env),
            Formula::And(gs) => gs.iter().all(|g| self.holds(g, env)),
            Formula::Or(gs) => gs.iter().any(|g| self.holds(g, env)),
            Formula::Implies(a, b) => !self.holds(a, env) || self.holds(b, env),
            Formula::Exists(x, g) => count(x, g, env) > 0,
            Formula::Forall(x, g) => count(x, &Formula::not((**g).clone()), env) == 0,
            Formula::ExInf(..) => false,
            Formula::AtLeast(k, x, g) => count(x, g, env) >= *k,
            Formula::Exactly(k, x, g) => count(x, g, env) == *k,
        }
    }
}

pub const SUITE: &[(&str, &[&str])] = &[
    ("(R x y)", &["x", "y"]),
    ("(not (R x y))", &["x", "y"]),
    ("(exists y (R x y))", &["x"]),
    ("(forall y (R x y))", &["x"]),
    ("(exists y (and (R x y) (U y)))", &["x"]),
    ("(forall y (implies (R x y) (U y)))", &["x"]),
    ("(exinf y (R x y))", &["x"]),
    ("(exists y (and (R x y) (not (= x y))))", &["x"]),
    ("(or (U x) (exists y (R y x)))", &["x"]),
    ("(exists z (and (R x z) (R z y)))", &["x", "y"]),
    ("(forall z (implies (R x z) (R z y)))", &["y", "x"]),
    ("(and (lex x y) (not (R y x)))", &["x", "y"]),
    ("(exists y (forall z (implies (R y z) (llex z x))))", &["x"]),
    ("(forall x (exists y (R x y)))", &[]),
    ("(exists x (forall y (implies (U y) (R x y))))", &[]),
    ("(forall x (forall y (exists z (or (R x z) (R z y)))))", &[]),
    ("(exinf x (U x))", &[]),
    ("(not (exists y (exinf z (R y z))))", &[]),
    ("(exists y (and (R x y) (exists z (and (R y z) (not (R z x))))))", &["x"]),
    ("(or (U x) (U y) (= x y))", &["x", "y"]),
];

pub const COUNTING: &[(&str, &[&str])] = &[
    ("(atleast 2 y (R x y))", &["x"]),
    ("(exactly 1 y (and (R x y) (U y)))", &["x"]),
    ("(not (exactly 0 y (R y x)))", &["x"]),
    ("(exactly 2 x (U x))", &[]),
];

pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..k).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|t| (0..n).map(move |i| [t.clone(), vec![i]].concat())).collect()
    })
}

pub fn check_against_oracle(s: &Finite, f: &Formula, free: &[&str]) {
    let p = s.presentation();
    let a = eval_formula(&p, f, free).unwrap();
    let mut expected = 0u64;
    for t in tuples(s.domain.len(), free.len()) {
        let mut env: HashMap<String, usize> = free.iter().map(|v| v.to_string()).zip(t.iter().copied()).collect();
        let truth = s.holds(f, &mut env);
        expected += u64::from(truth);
        let w = convolve(&t.iter().map(|&i| s.domain[i].clone()).collect::<Vec<_>>());
        assert_eq!(a.accepts(&w), truth, "{f} at {t:?} over {:?}", s.domain);
    }
    // Nothing outside the domain is accepted.
    assert_eq!(a.cardinality().unwrap(), ExtendedCount::Finite(expected.into()), "{f}");
}

/// Random automata over two tracks on {a, b}, every letter shape allowed.
pub fn random_relation(rng: &mut ChaCha8Rng) -> Nfa {
    let l = [Some("a"), Some("b"), None];
    let mut alphabet = Vec::new();
    for x in l {
        for y in l {
            if x.is_some() || y.is_some() {
                alphabet.push(tup(&[x, y]));
            }
        }
    }
    let n = rng.gen_range(1..=4);
    let mut ts = Vec::new();
    for p in 0..n {
        for s in 0..alphabet.len() {
            for q in 0..n {
                if rng.gen_bool(0.15) {
                    ts.push(Transition::new(p, s, q));
                }
            }
        }
    }
    let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    Nfa::new(alphabet, n, [0], finals, ts).unwrap()
}

/// Whether some `y` with `lo < |y| ≤ hi` makes `x ⊗ y` accepted, by a
/// pruned search over `y` letter by letter.
pub fn window_witness(r: &Nfa, x: &[String], lo: usize, hi: usize) -> bool {
    fn go(r: &Nfa, x: &[String], states: Vec<usize>, len: usize, lo: usize, hi: usize) -> bool {
        if states.is_empty() {
            return false;
        }
        if len > lo && len >= x.len() && states.iter().any(|&q| r.is_final(q)) {
            return true;
        }
        if len == hi {
            return false;
        }
        let xl = x.get(len).map(String::as_str);
        ["a", "b"].iter().any(|y| {
            let letter = tup(&[xl, Some(y)]);
            let mut next: Vec<usize> = r
                .transitions()
                .iter()
                .filter(|t| states.contains(&t.src) && r.alphabet()[t.sym] == letter)
                .map(|t| t.dst)
                .collect();
            next.sort_unstable();
            next.dedup();
            go(r, x, next, len + 1, lo, hi)
        })
    }
    go(r, x, r.initial().to_vec(), 0, lo, hi)
}
