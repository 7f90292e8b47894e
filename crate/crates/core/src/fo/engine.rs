//! Compilation of formulas to automata over a presentation.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::rc::Rc;

use smallvec::SmallVec;

use super::count::{counting_dfa, infinity_projection, CountLabel, CountSpec, CountingDfa};
use super::formula::Formula;
use super::join::{all_pad, CmpKind, DfaFilter, Join, Outcomes, Part, Rel, TNfa, Tup, PAD_ID};
use super::presentation::Presentation;
use crate::conv::AlphabetOrder;
use crate::error::{Error, Result};
use crate::limits::state_cap;
use crate::nfa::{ExtendedCount, Nfa};
use crate::symbol::Symbol;

/// Formula in negation normal form over numbered variables.
#[derive(Clone, Debug)]
enum Node {
    Const(bool),
    Atom { rel: String, args: Vec<usize>, neg: bool },
    Cmp { kind: CmpKind, x: usize, y: usize, accept: Outcomes },
    And(Vec<Node>),
    Or(Vec<Node>),
    Exists { vars: Vec<usize>, body: Box<Node>, neg: bool },
    ExInf { var: usize, body: Box<Node>, neg: bool },
    Count { var: usize, body: Box<Node>, spec: CountSpec },
}

impl Node {
    fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Node::Const(_) => {}
            Node::Atom { args, .. } => out.extend(args.iter().copied()),
            Node::Cmp { x, y, .. } => {
                out.insert(*x);
                out.insert(*y);
            }
            Node::And(items) | Node::Or(items) => items.iter().for_each(|n| n.vars(out)),
            Node::Exists { vars, body, .. } => {
                let mut inner = BTreeSet::new();
                body.vars(&mut inner);
                out.extend(inner.into_iter().filter(|v| !vars.contains(v)));
            }
            Node::ExInf { var, body, .. } | Node::Count { var, body, .. } => {
                let mut inner = BTreeSet::new();
                body.vars(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }
}

struct Resolver<'a> {
    engine: &'a Engine,
    scope: Vec<(String, usize)>,
    next: usize,
}

const LE: Outcomes = [true, true, false];
const EQ: Outcomes = [false, true, false];

fn flip(o: Outcomes) -> Outcomes {
    [!o[0], !o[1], !o[2]]
}

impl Resolver<'_> {
    fn lookup(&self, v: &str) -> Result<usize> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|&(_, id)| id)
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))
    }

    fn bind(&mut self, v: &str) -> usize {
        let id = self.next;
        self.next += 1;
        self.scope.push((v.to_string(), id));
        id
    }

    fn cmp(&self, kind: CmpKind, x: &str, y: &str, accept: Outcomes, pos: bool) -> Result<Node> {
        let accept = if pos { accept } else { flip(accept) };
        Ok(Node::Cmp { kind, x: self.lookup(x)?, y: self.lookup(y)?, accept })
    }

    fn exists(&mut self, v: &str, g: &Formula, inner_pos: bool, neg: bool) -> Result<Node> {
        let id = self.bind(v);
        let body = self.nnf(g, inner_pos);
        self.scope.pop();
        let body = body?;
        Ok(match body {
            Node::Exists { mut vars, body, neg: false } => {
                vars.insert(0, id);
                Node::Exists { vars, body, neg }
            }
            body => Node::Exists { vars: vec![id], body: Box::new(body), neg },
        })
    }

    fn scoped(&mut self, v: &str, g: &Formula) -> Result<(usize, Node)> {
        let id = self.bind(v);
        let body = self.nnf(g, true);
        self.scope.pop();
        Ok((id, body?))
    }

    fn nnf(&mut self, f: &Formula, pos: bool) -> Result<Node> {
        Ok(match f {
            Formula::True => Node::Const(pos),
            Formula::False => Node::Const(!pos),
            Formula::Atom(r, args) => {
                let arity = self.engine.relation_arity(r)?;
                if arity != args.len() {
                    return Err(Error::Arity { name: r.clone(), expected: arity, got: args.len() });
                }
                let args = args.iter().map(|a| self.lookup(a)).collect::<Result<Vec<_>>>()?;
                Node::Atom { rel: r.clone(), args, neg: !pos }
            }
            Formula::Eq(x, y) => self.cmp(CmpKind::Eq, x, y, EQ, pos)?,
            Formula::Lex(x, y) => self.cmp(CmpKind::Lex, x, y, LE, pos)?,
            Formula::Llex(x, y) => self.cmp(CmpKind::Llex, x, y, LE, pos)?,
            Formula::Not(g) => self.nnf(g, !pos)?,
            Formula::And(fs) | Formula::Or(fs) => {
                let items = fs.iter().map(|g| self.nnf(g, pos)).collect::<Result<Vec<_>>>()?;
                if matches!(f, Formula::And(_)) == pos {
                    Node::And(items)
                } else {
                    Node::Or(items)
                }
            }
            Formula::Implies(a, b) => {
                if pos {
                    Node::Or(vec![self.nnf(a, false)?, self.nnf(b, true)?])
                } else {
                    Node::And(vec![self.nnf(a, true)?, self.nnf(b, false)?])
                }
            }
            Formula::Exists(v, g) => self.exists(v, g, true, !pos)?,
            Formula::Forall(v, g) => self.exists(v, g, false, pos)?,
            Formula::ExInf(v, g) => {
                let (var, body) = self.scoped(v, g)?;
                Node::ExInf { var, body: Box::new(body), neg: !pos }
            }
            Formula::AtLeast(n, v, g) | Formula::Exactly(n, v, g) => {
                let (var, body) = self.scoped(v, g)?;
                let spec = if matches!(f, Formula::AtLeast(..)) { CountSpec::at_least(*n) } else { CountSpec::exactly(*n) };
                let spec = if pos { spec } else { spec.negate() };
                Node::Count { var, body: Box::new(body), spec }
            }
        })
    }
}

/// Compiled form of a conjunct.
enum Item {
    Gen(Rc<TNfa>, Vec<usize>),
    Filter(Rc<DfaFilter>, bool, Vec<usize>),
    Cmp(CmpKind, Outcomes, usize, usize),
}

impl Item {
    fn vars(&self) -> Vec<usize> {
        match self {
            Item::Gen(_, v) | Item::Filter(_, _, v) => v.clone(),
            Item::Cmp(_, _, x, y) => vec![*x, *y],
        }
    }
}

/// Evaluation engine for one presentation. Letters are numbered by their
/// rank in the alphabet order, so order comparisons compare numbers.
pub struct Engine {
    order: AlphabetOrder,
    dom: Rc<TNfa>,
    dom_size: ExtendedCount,
    rels: HashMap<String, (usize, Rc<TNfa>)>,
    filters: RefCell<HashMap<String, Rc<DfaFilter>>>,
    universes: RefCell<HashMap<usize, Rc<TNfa>>>,
    cap: usize,
}

impl Engine {
    /// Prepares a presentation, checking that every relation only relates
    /// convolutions of domain words.
    pub fn new(p: &Presentation) -> Result<Engine> {
        let order = p.order().clone();
        let dom_min = p.domain().minimize()?;
        let dom_size = dom_min.cardinality()?;
        let dom = Rc::new(convert(&dom_min, &order)?);
        let mut e = Engine {
            order,
            dom,
            dom_size,
            rels: HashMap::new(),
            filters: RefCell::new(HashMap::new()),
            universes: RefCell::new(HashMap::new()),
            cap: state_cap(),
        };
        for (name, r) in p.relations() {
            e.add_relation(name, r.arity, &r.automaton)?;
        }
        Ok(e)
    }

    /// Adds a relation after checking it against the domain.
    pub fn add_relation(&mut self, name: &str, arity: usize, a: &Nfa) -> Result<()> {
        let t = convert(&a.trim(), &self.order)?;
        if t.alphabet().iter().any(|l| l.len() != arity) {
            return Err(Error::InvalidAutomaton(format!("relation {name} has letters of the wrong arity")));
        }
        check_convolutions(&t, arity).map_err(|e| Error::Validation(format!("relation {name}: {e}")))?;
        let t = Rc::new(t);
        for i in 0..arity {
            let mut parts = vec![Part::gen(t.clone(), (0..arity).collect())];
            parts.push(Part::filter(self.dom_filter()?, true, vec![i]));
            if Join::new(parts, arity, vec![false; arity]).nonempty(self.cap)? {
                return Err(Error::Validation(format!("relation {name} has track {i} outside the domain")));
            }
        }
        self.filters.borrow_mut().remove(name);
        self.rels.insert(name.to_string(), (arity, t));
        Ok(())
    }

    pub fn order(&self) -> &AlphabetOrder {
        &self.order
    }

    pub fn domain_size(&self) -> &ExtendedCount {
        &self.dom_size
    }

    fn relation_arity(&self, name: &str) -> Result<usize> {
        self.rels.get(name).map(|r| r.0).ok_or_else(|| Error::UnboundRelation(name.to_string()))
    }

    fn dom_filter(&self) -> Result<Rc<DfaFilter>> {
        self.filter_for("\0domain", || Ok(self.dom.clone()))
    }

    fn filter_for(&self, key: &str, nfa: impl FnOnce() -> Result<Rc<TNfa>>) -> Result<Rc<DfaFilter>> {
        if let Some(f) = self.filters.borrow().get(key) {
            return Ok(f.clone());
        }
        let f = Rc::new(DfaFilter::new(&*nfa()?)?);
        self.filters.borrow_mut().insert(key.to_string(), f.clone());
        Ok(f)
    }

    /// `⊗_k` of the domain: all convolutions of `k` domain words.
    fn universe(&self, k: usize) -> Result<Rc<TNfa>> {
        if let Some(u) = self.universes.borrow().get(&k) {
            return Ok(u.clone());
        }
        let u = if k == 0 {
            Nfa::epsilon(vec![])
        } else {
            let parts = (0..k).map(|i| Part::gen(self.dom.clone(), vec![i])).collect();
            Join::new(parts, k, vec![true; k]).build(self.cap)?
        };
        let u = Rc::new(u);
        self.universes.borrow_mut().insert(k, u.clone());
        Ok(u)
    }

    fn resolve(&self, f: &Formula, free: &[&str]) -> Result<Node> {
        let mut r = Resolver { engine: self, scope: Vec::new(), next: 0 };
        for v in free {
            r.bind(v);
        }
        r.nnf(f, true)
    }

    /// The relation defined by `f`, one track per variable of `free` in that
    /// order. Variables of `free` that do not occur range over the domain.
    pub fn eval_rel(&self, f: &Formula, free: &[&str]) -> Result<Rel> {
        let node = self.resolve(f, free)?;
        let rel = self.compile(&node)?;
        self.cylindrify(&rel, &(0..free.len()).collect::<Vec<_>>())
    }

    /// Automaton over tuple letters accepting the convolutions of the tuples
    /// satisfying `f`.
    pub fn eval(&self, f: &Formula, free: &[&str]) -> Result<Nfa> {
        Ok(self.to_symbols(&self.eval_rel(f, free)?.nfa))
    }

    /// Truth of a sentence.
    pub fn decide(&self, f: &Formula) -> Result<bool> {
        let free = f.free_vars();
        if let Some(v) = free.first() {
            return Err(Error::UnboundVariable(v.clone()));
        }
        Ok(self.eval_rel(f, &[])?.truth())
    }

    /// Counting automaton for the number of `witness` values satisfying `f`
    /// together with the tuple over `free`.
    pub fn count_witnesses(&self, f: &Formula, free: &[&str], witness: &str, cap: u64) -> Result<CountingDfa> {
        let mut all: Vec<&str> = free.to_vec();
        all.push(witness);
        let rel = self.eval_rel(f, &all)?;
        let universe = self.universe(free.len())?;
        counting_dfa(&rel.nfa, free.len(), &universe, cap, self.cap)
    }

    /// As [`Engine::count_witnesses`] with the tuples over `free` restricted
    /// to `universe`, which keeps the counting automaton small.
    pub fn count_witnesses_within(
        &self,
        f: &Formula,
        free: &[&str],
        witness: &str,
        cap: u64,
        universe: &Nfa,
    ) -> Result<CountingDfa> {
        let mut all: Vec<&str> = free.to_vec();
        all.push(witness);
        let rel = self.eval_rel(f, &all)?;
        let universe = convert(universe, &self.order)?.determinize()?.minimize()?;
        counting_dfa(&rel.nfa, free.len(), &universe, cap, self.cap)
    }

    /// Converts an internal automaton to tuple letters.
    pub fn to_symbols(&self, t: &TNfa) -> Nfa {
        let names = self.order.letters();
        t.map_letters(|l| {
            Symbol::Tuple(l.iter().map(|&x| if x == PAD_ID { None } else { Some(names[x as usize].clone()) }).collect())
        })
    }

    /// Converts tuple letters over this presentation's alphabet.
    pub fn from_symbols(&self, a: &Nfa) -> Result<TNfa> {
        convert(a, &self.order)
    }

    fn compile(&self, node: &Node) -> Result<Rel> {
        match node {
            Node::Const(b) => Ok(Rel::boolean(*b)),
            Node::Or(items) => self.disjunction(items),
            Node::Atom { rel, args, neg: false } if args.windows(2).all(|w| w[0] < w[1]) => {
                Ok(Rel { vars: args.clone(), nfa: self.rels[rel].1.clone() })
            }
            Node::Exists { vars, body, neg: false } => self.conjunction(&flatten(body), vars),
            Node::ExInf { var, body, neg: false } => {
                let r = self.compile(body)?;
                match r.vars.iter().position(|v| v == var) {
                    Some(j) => {
                        let vars = r.vars.iter().copied().filter(|v| v != var).collect();
                        Ok(Rel::new(vars, infinity_projection(&r.nfa, j)))
                    }
                    None if self.dom_size == ExtendedCount::Infinite => Ok(r),
                    None => Ok(Rel::new(r.vars.clone(), Nfa::empty(vec![]))),
                }
            }
            Node::Count { var, body, spec } => {
                let r = self.compile(body)?;
                self.count(&r, *var, spec)
            }
            _ => self.conjunction(&flatten(node), &[]),
        }
    }

    fn disjunction(&self, items: &[Node]) -> Result<Rel> {
        let mut vars = BTreeSet::new();
        for n in items {
            n.vars(&mut vars);
        }
        let vars: Vec<usize> = vars.into_iter().collect();
        let mut acc: Option<TNfa> = None;
        for n in items {
            let r = self.compile(n)?;
            if r.vars.is_empty() {
                if r.truth() {
                    let u = self.universe(vars.len())?;
                    return Ok(Rel { vars, nfa: u });
                }
                continue;
            }
            let c = self.cylindrify(&r, &vars)?;
            acc = Some(match acc {
                None => (*c.nfa).clone(),
                Some(a) => a.union_merged(&c.nfa),
            });
        }
        Ok(Rel::new(vars, acc.unwrap_or_else(|| Nfa::empty(vec![]))))
    }

    /// The same relation over a superset of its variables.
    fn cylindrify(&self, r: &Rel, vars: &[usize]) -> Result<Rel> {
        if r.vars == vars {
            return Ok(r.clone());
        }
        if vars.is_empty() {
            return Ok(r.clone());
        }
        let pos = |v: &usize| vars.iter().position(|w| w == v).expect("superset");
        let mut parts = Vec::new();
        if r.vars.is_empty() {
            if !r.truth() {
                return Ok(Rel::new(vars.to_vec(), Nfa::empty(vec![])));
            }
        } else {
            parts.push(Part::gen(r.nfa.clone(), r.vars.iter().map(pos).collect()));
        }
        for (i, v) in vars.iter().enumerate() {
            if !r.vars.contains(v) {
                parts.push(Part::gen(self.dom.clone(), vec![i]));
            }
        }
        let nfa = Join::new(parts, vars.len(), vec![true; vars.len()]).build(self.cap)?;
        Ok(Rel::new(vars.to_vec(), nfa))
    }

    fn count(&self, r: &Rel, var: usize, spec: &CountSpec) -> Result<Rel> {
        let Some(j) = r.vars.iter().position(|&v| v == var) else {
            // The witness does not occur: it ranges over the whole domain.
            let dom_label = match &self.dom_size {
                ExtendedCount::Infinite => CountLabel::Infinite,
                ExtendedCount::Finite(n) => match u64::try_from(n.clone()) {
                    Ok(n) if n <= spec.cap() => CountLabel::Exact(n),
                    _ => CountLabel::Over,
                },
            };
            let (when_true, when_false) = (spec.accepts(dom_label), spec.accepts(CountLabel::Exact(0)));
            return match (when_true, when_false) {
                (true, true) => Ok(Rel { vars: r.vars.clone(), nfa: self.universe(r.vars.len())? }),
                (true, false) => Ok(r.clone()),
                (false, true) => self.complement(r),
                (false, false) => Ok(Rel::new(r.vars.clone(), Nfa::empty(vec![]))),
            };
        };
        let xs: Vec<usize> = r.vars.iter().copied().filter(|&v| v != var).collect();
        let universe = self.universe(xs.len())?;
        let c = counting_dfa(&r.nfa, j, &universe, spec.cap(), self.cap)?;
        Ok(Rel::new(xs, c.select(|l| spec.accepts(l))))
    }

    fn complement(&self, r: &Rel) -> Result<Rel> {
        if r.vars.is_empty() {
            return Ok(Rel::boolean(!r.truth()));
        }
        let k = r.vars.len();
        let mut parts: Vec<Part> = (0..k).map(|i| Part::gen(self.dom.clone(), vec![i])).collect();
        parts.push(Part::filter(Rc::new(DfaFilter::new(&r.nfa)?), true, (0..k).collect()));
        let nfa = Join::new(parts, k, vec![true; k]).build(self.cap)?;
        Ok(Rel::new(r.vars.clone(), nfa.minimize()?))
    }

    fn conjunction(&self, items: &[&Node], project: &[usize]) -> Result<Rel> {
        let mut out_vars = BTreeSet::new();
        for n in items {
            n.vars(&mut out_vars);
        }
        let all_vars: Vec<usize> = out_vars.iter().copied().collect();
        let kept: Vec<usize> = all_vars.iter().copied().filter(|v| !project.contains(v)).collect();
        let empty = || Rel::new(kept.clone(), Nfa::empty(vec![]));
        // Quantifying a variable that does not occur needs a nonempty domain.
        if project.iter().any(|v| !all_vars.contains(v)) && self.dom_size.is_zero() {
            return Ok(empty());
        }
        let mut compiled: Vec<Item> = Vec::new();
        for n in items {
            match n {
                Node::Const(true) => {}
                Node::Const(false) => return Ok(empty()),
                Node::Atom { rel, args, neg } => {
                    let nfa = self.rels[rel].1.clone();
                    if *neg {
                        let f = self.filter_for(rel, || Ok(nfa))?;
                        compiled.push(Item::Filter(f, true, args.clone()));
                    } else {
                        compiled.push(Item::Gen(nfa, args.clone()));
                    }
                }
                Node::Cmp { kind, x, y, accept } => compiled.push(Item::Cmp(*kind, *accept, *x, *y)),
                Node::Exists { neg: true, .. } | Node::ExInf { neg: true, .. } => {
                    let positive = match n {
                        Node::Exists { vars, body, .. } => {
                            Node::Exists { vars: vars.clone(), body: body.clone(), neg: false }
                        }
                        Node::ExInf { var, body, .. } => Node::ExInf { var: *var, body: body.clone(), neg: false },
                        _ => unreachable!(),
                    };
                    let r = self.compile(&positive)?;
                    if r.vars.is_empty() {
                        if r.truth() {
                            return Ok(empty());
                        }
                        continue;
                    }
                    compiled.push(Item::Filter(Rc::new(DfaFilter::new(&r.nfa)?), true, r.vars.clone()));
                }
                other => {
                    let r = self.compile(other)?;
                    if r.vars.is_empty() {
                        if !r.truth() {
                            return Ok(empty());
                        }
                        continue;
                    }
                    compiled.push(Item::Gen(r.nfa.clone(), r.vars.clone()));
                }
            }
        }
        if all_vars.is_empty() {
            return Ok(Rel::boolean(true));
        }
        // Single generator without projection: nothing to join.
        if let [Item::Gen(nfa, args)] = compiled.as_slice() {
            if project.is_empty() && *args == all_vars {
                return Ok(Rel { vars: all_vars, nfa: nfa.clone() });
            }
        }
        let pos = |v: &usize| all_vars.iter().position(|w| w == v).expect("collected");
        let mut covered: HashSet<usize> = HashSet::new();
        let mut parts = Vec::new();
        for it in &compiled {
            if let Item::Gen(nfa, args) = it {
                covered.extend(args.iter().copied());
                parts.push(Part::gen(nfa.clone(), args.iter().map(pos).collect()));
            }
        }
        for it in &compiled {
            for v in it.vars() {
                if covered.insert(v) {
                    parts.push(Part::gen(self.dom.clone(), vec![pos(&v)]));
                }
            }
            match it {
                Item::Gen(..) => {}
                Item::Filter(f, negate, args) => parts.push(Part::filter(f.clone(), *negate, args.iter().map(pos).collect())),
                Item::Cmp(kind, accept, x, y) => parts.push(Part::cmp(*kind, *accept, pos(x), pos(y))),
            }
        }
        let keep: Vec<bool> = all_vars.iter().map(|v| !project.contains(v)).collect();
        let join = Join::new(parts, all_vars.len(), keep);
        if kept.is_empty() {
            return Ok(Rel::boolean(join.nonempty(self.cap)?));
        }
        Ok(Rel::new(kept, join.build(self.cap)?))
    }
}

fn flatten(node: &Node) -> Vec<&Node> {
    match node {
        Node::And(items) => items.iter().flat_map(flatten).collect(),
        other => vec![other],
    }
}

/// Letters of `a` as rank tuples; base letters become one-track tuples.
fn convert(a: &Nfa, order: &AlphabetOrder) -> Result<TNfa> {
    let id = |s: &str| order.rank(s).map(|r| r as u32).ok_or_else(|| Error::UnknownLetter(s.to_string()));
    let letters = a
        .alphabet()
        .iter()
        .map(|s| {
            Ok(match s {
                Symbol::Base(b) => SmallVec::from_elem(id(b)?, 1),
                Symbol::Tuple(e) => e.iter().map(|x| x.as_deref().map_or(Ok(PAD_ID), id)).collect::<Result<Tup>>()?,
            })
        })
        .collect::<Result<Vec<Tup>>>()?;
    if letters.iter().any(|l| all_pad(l)) {
        return Err(Error::InvalidSymbol("all-pad letter".into()));
    }
    let ts = a.transitions().to_vec();
    let finals: Vec<usize> = a.finals().collect();
    Nfa::new(letters, a.state_count(), a.initial().to_vec(), finals, ts)
}

/// Every accepted word must have pads only as a suffix of each track.
fn check_convolutions(t: &TNfa, arity: usize) -> Result<()> {
    let t = t.trim();
    let mut seen: HashSet<(usize, u64)> = HashSet::new();
    let mut queue: VecDeque<(usize, u64)> = t.initial().iter().map(|&q| (q, 0)).collect();
    while let Some((q, mask)) = queue.pop_front() {
        if !seen.insert((q, mask)) {
            continue;
        }
        for tr in t.out(q) {
            let l = &t.alphabet()[tr.sym];
            let mut m = mask;
            for (i, &x) in l.iter().enumerate().take(arity) {
                if x == PAD_ID {
                    m |= 1 << i;
                } else if mask >> i & 1 == 1 {
                    return Err(Error::InvalidSymbol(format!("track {i} continues after a pad")));
                }
            }
            queue.push_back((tr.dst, m));
        }
    }
    Ok(())
}
