//! Automatic equivalence structures: run-fiber gadgets, the class-size
//! census `h_E`, and a bounded isomorphism check.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use once_cell::sync::Lazy;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize};

use crate::conv::AlphabetOrder;
use crate::error::{Error, Result};
use crate::fo::{validate_equivalence, CountLabel, Engine, Formula, Presentation, Relation};
use crate::limits::state_cap;
use crate::nfa::{explore, run_automaton_named, ExtendedCount, Nfa, Transition};
use crate::poly::{pairing, poly_automaton_conv, Polynomial};
use crate::symbol::Symbol;
use crate::verdict::IsoVerdict;

/// Largest finite class size a census may ask for.
pub const DEFAULT_CENSUS_CAP: u64 = 64;
pub const CENSUS_CAP_ENV: &str = "AUTOSTRUCT_CENSUS_CAP";

static CENSUS_CAP: Lazy<u64> = Lazy::new(|| {
    std::env::var(CENSUS_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CENSUS_CAP)
});

pub fn census_cap() -> u64 {
    *CENSUS_CAP
}

/// A presentation whose relation `E` is an equivalence relation.
#[derive(Clone, Debug)]
pub struct EquivPresentation {
    pres: Presentation,
}

impl EquivPresentation {
    /// Checks the equivalence axioms.
    pub fn new(pres: Presentation) -> Result<EquivPresentation> {
        if !validate_equivalence(&pres)? {
            return Err(Error::Validation("E is not an equivalence relation".into()));
        }
        Ok(EquivPresentation { pres })
    }

    /// For constructions that yield equivalences by construction of the automaton;
    /// callers can still run [`validate_equivalence`].
    pub fn unchecked(pres: Presentation) -> EquivPresentation {
        EquivPresentation { pres }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn relation(&self) -> &Nfa {
        &self.pres.relations()["E"].automaton
    }
}

/// The same automaton without `ε`.
fn drop_epsilon(m: &Nfa) -> Nfa {
    if !m.initial().iter().any(|&q| m.is_final(q)) {
        return m.clone();
    }
    let s = m.state_count();
    let mut ts = m.transitions().to_vec();
    for &q in m.initial() {
        ts.extend(m.out(q).iter().map(|t| Transition::new(s, t.sym, t.dst)));
    }
    Nfa::new(m.alphabet().to_vec(), s + 1, [s], m.finals().collect::<Vec<_>>(), ts).expect("well-formed")
}

fn tuple(entries: &[&str]) -> Symbol {
    Symbol::Tuple(entries.iter().map(|s| Some(s.to_string())).collect())
}

/// `E(A)`: domain the nonempty accepting runs of `A`, two runs equivalent
/// iff they read the same word. Run letters are `{prefix}{i}`.
pub fn run_fiber_presentation(a: &Nfa, prefix: &str) -> Result<Presentation> {
    let name = |i: usize| format!("{prefix}{i}");
    let run = run_automaton_named(a, |i| Symbol::base(name(i)));
    let domain = drop_epsilon(&run.nfa).trim();
    let proj = |sym: usize| run.projection[sym];
    let starts: Vec<(usize, usize)> =
        domain.initial().iter().flat_map(|&p| domain.initial().iter().map(move |&q| (p, q))).collect();
    let (rel, _) = explore(
        vec![],
        starts,
        |&(p, q), out| {
            for t1 in domain.out(p) {
                for t2 in domain.out(q) {
                    if proj(t1.sym) == proj(t2.sym) {
                        out.push((tuple(&[&name(t1.sym), &name(t2.sym)]), (t1.dst, t2.dst)));
                    }
                }
            }
        },
        |&(p, q)| domain.is_final(p) && domain.is_final(q),
        state_cap(),
    )?;
    let order = AlphabetOrder::new((0..a.transitions().len()).map(name))?;
    let mut rels = BTreeMap::new();
    rels.insert("E".to_string(), Relation::new(2, rel.trim())?);
    Presentation::new(order, domain, rels)
}

/// `E(p)` over the convolution-style automaton of `p`: the class of the runs
/// on `a^c̄` has `p(c̄)` elements.
pub fn equiv_from_poly(p: &Polynomial, k: usize) -> Result<EquivPresentation> {
    equiv_from_poly_named(p, k, "t")
}

pub fn equiv_from_poly_named(p: &Polynomial, k: usize, prefix: &str) -> Result<EquivPresentation> {
    let a = poly_automaton_conv(p, k)?;
    Ok(EquivPresentation::unchecked(run_fiber_presentation(&a, prefix)?))
}

pub use crate::compose::{aleph0_copies, disjoint_union};

fn pairing_components(k: usize) -> Result<(Polynomial, Polynomial)> {
    let x1 = Polynomial::var(k, 1);
    let sum = x1.add(&Polynomial::var(k, 2));
    Ok((pairing(&sum, &x1), pairing(&x1, &sum)))
}

/// `ℵ₀` copies of `E(C(p1, p2)) ⊎ E(C(x1+x2, x1)) ⊎ E(C(x1, x1+x2))`. It is
/// isomorphic to [`build_e_good`] iff `p1` and `p2` differ on every positive
/// point.
pub fn e_good_reduction(p1: &Polynomial, p2: &Polynomial, k: usize) -> Result<EquivPresentation> {
    if k < 2 {
        return Err(Error::Parameters("the reduction needs at least two variables".into()));
    }
    if p1.is_zero() || p2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (above, below) = pairing_components(k)?;
    let s1 = pairing(&p1.with_vars(k)?, &p2.with_vars(k)?);
    let parts = [
        equiv_from_poly_named(&s1, k, "r")?,
        equiv_from_poly_named(&above, k, "u")?,
        equiv_from_poly_named(&below, k, "v")?,
    ];
    let union = disjoint_union(&parts.iter().map(EquivPresentation::presentation).collect::<Vec<_>>())?;
    Ok(EquivPresentation::unchecked(aleph0_copies(&union)?))
}

/// Infinitely many classes of every size `C(y, z)` with `y ≠ z` positive,
/// and no others.
pub fn build_e_good() -> Result<EquivPresentation> {
    let (above, below) = pairing_components(2)?;
    let parts = [equiv_from_poly_named(&above, 2, "u")?, equiv_from_poly_named(&below, 2, "v")?];
    let union = disjoint_union(&parts.iter().map(EquivPresentation::presentation).collect::<Vec<_>>())?;
    Ok(EquivPresentation::unchecked(aleph0_copies(&union)?))
}

/// A class size: positive integer or `ℵ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassSize {
    Finite(u64),
    Aleph0,
}

impl fmt::Display for ClassSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSize::Finite(n) => write!(f, "{n}"),
            ClassSize::Aleph0 => f.write_str("inf"),
        }
    }
}

impl FromStr for ClassSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClassSize> {
        match s.trim() {
            "inf" | "aleph0" | "ℵ₀" => Ok(ClassSize::Aleph0),
            t => match t.parse::<u64>() {
                Ok(n) if n >= 1 => Ok(ClassSize::Finite(n)),
                _ => Err(Error::Parse(format!("class size must be a positive integer or inf, got `{t}`"))),
            },
        }
    }
}

/// Values of `h_E` at the queried sizes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeCensus {
    pub counts: BTreeMap<ClassSize, ExtendedCount>,
}

impl SizeCensus {
    pub fn get(&self, n: ClassSize) -> Option<&ExtendedCount> {
        self.counts.get(&n)
    }
}

impl Serialize for SizeCensus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.counts.len()))?;
        for (k, v) in &self.counts {
            m.serialize_entry(&k.to_string(), v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for SizeCensus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, ExtendedCount> = BTreeMap::deserialize(d)?;
        let counts = raw
            .into_iter()
            .map(|(k, v)| Ok((k.parse().map_err(serde::de::Error::custom)?, v)))
            .collect::<std::result::Result<_, D::Error>>()?;
        Ok(SizeCensus { counts })
    }
}

/// `h_E` at every size in `sizes`.
///
/// Finite sizes: the elements with exactly `n` equivalents form a regular
/// set `X_n` read off one counting automaton; `h(n) = |X_n| / n`, and an
/// infinite `X_n` means infinitely many classes. `ℵ₀`: the llex-least
/// elements of infinite classes are counted.
pub fn census(e: &EquivPresentation, sizes: &[ClassSize]) -> Result<SizeCensus> {
    let cap = census_cap();
    let max = sizes.iter().filter_map(|s| if let ClassSize::Finite(n) = s { Some(*n) } else { None }).max();
    if let Some(n) = max.filter(|&n| n > cap) {
        return Err(Error::CensusCap { n, cap });
    }
    let engine = Engine::new(e.presentation())?;
    let mut out = SizeCensus::default();
    if let Some(max) = max {
        let counting = engine.count_witnesses(&Formula::atom("E", ["x", "y"]), &["x"], "y", max)?;
        for &s in sizes {
            let ClassSize::Finite(n) = s else { continue };
            if n == 0 {
                return Err(Error::Parameters("class sizes start at 1".into()));
            }
            let members = engine.to_symbols(&counting.select(|l| l == CountLabel::Exact(n)));
            let h = match members.cardinality()? {
                ExtendedCount::Infinite => ExtendedCount::Infinite,
                ExtendedCount::Finite(m) => {
                    let n = BigUint::from(n);
                    if !(&m % &n).is_zero() {
                        return Err(Error::Validation(format!("{m} elements with {n} equivalents")));
                    }
                    ExtendedCount::Finite(m / n)
                }
            };
            out.counts.insert(s, h);
        }
    }
    if sizes.contains(&ClassSize::Aleph0) {
        let least: Formula = "(and (exinf y (E x y)) (forall z (implies (E x z) (llex x z))))".parse()?;
        out.counts.insert(ClassSize::Aleph0, engine.eval(&least, &["x"])?.cardinality()?);
    }
    Ok(out)
}

pub fn class_size_count(e: &EquivPresentation, n: ClassSize) -> Result<ExtendedCount> {
    Ok(census(e, &[n])?.counts.remove(&n).expect("queried"))
}

fn sizes_up_to(n: u64) -> Vec<ClassSize> {
    (1..=n).map(ClassSize::Finite).chain([ClassSize::Aleph0]).collect()
}

/// Compares `h` on `{1..n} ∪ {ℵ₀}`. A difference is recomputed size by size
/// before it is reported. With two finite domains no class exceeds the
/// domain, so the comparison is extended to cover every size.
pub fn iso_check_equiv(a: &EquivPresentation, b: &EquivPresentation, n: u64) -> Result<IsoVerdict> {
    if n == 0 {
        return Err(Error::Parameters("bound must be at least 1".into()));
    }
    let size = |e: &EquivPresentation| e.presentation().domain().trim().cardinality();
    let (da, db) = (size(a)?, size(b)?);
    let exact_bound = match (&da, &db) {
        (ExtendedCount::Finite(x), ExtendedCount::Finite(y)) => x.max(y).to_u64().filter(|&m| m <= census_cap()),
        _ => None,
    };
    let bound = exact_bound.map_or(n, |m| m.max(1).max(n.min(census_cap())));
    let sizes = sizes_up_to(bound);
    let (ca, cb) = (census(a, &sizes)?, census(b, &sizes)?);
    for s in &sizes {
        if ca.counts[s] != cb.counts[s] {
            let left = class_size_count(a, *s)?;
            let right = class_size_count(b, *s)?;
            if left != right {
                return Ok(IsoVerdict::differ(format!("h({s})"), left, right));
            }
        }
    }
    if exact_bound.is_some() {
        return Ok(IsoVerdict::Isomorphic);
    }
    Ok(IsoVerdict::consistent(&[("N", n)]))
}
