//! First-order formulas with the infinity and counting quantifiers, in
//! s-expression syntax.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// `R(x1, …, xn)` for a relation of the presentation.
    Atom(String, Vec<String>),
    Eq(String, String),
    /// Non-strict lexicographic order `x ≤lex y`.
    Lex(String, String),
    /// Non-strict length-lexicographic order `x ≤llex y`.
    Llex(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// There are infinitely many.
    ExInf(String, Box<Formula>),
    /// There are at least `n`.
    AtLeast(u64, String, Box<Formula>),
    /// There are exactly `n`.
    Exactly(u64, String, Box<Formula>),
}

const KEYWORDS: &[&str] =
    &["true", "false", "not", "and", "or", "implies", "=", "lex", "llex", "exists", "forall", "exinf", "atleast", "exactly"];

impl Formula {
    pub fn atom<S: Into<String>>(rel: &str, args: impl IntoIterator<Item = S>) -> Formula {
        Formula::Atom(rel.to_string(), args.into_iter().map(Into::into).collect())
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.into(), y.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::And(fs.into_iter().collect())
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::Or(fs.into_iter().collect())
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(f))
    }

    /// `∃x1 … ∃xn f`.
    pub fn exists_all(xs: &[&str], f: Formula) -> Formula {
        xs.iter().rev().fold(f, |acc, x| Formula::exists(x, acc))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(f))
    }

    pub fn forall_all(xs: &[&str], f: Formula) -> Formula {
        xs.iter().rev().fold(f, |acc, x| Formula::forall(x, acc))
    }

    pub fn exinf(x: &str, f: Formula) -> Formula {
        Formula::ExInf(x.into(), Box::new(f))
    }

    pub fn at_least(n: u64, x: &str, f: Formula) -> Formula {
        Formula::AtLeast(n, x.into(), Box::new(f))
    }

    pub fn exactly(n: u64, x: &str, f: Formula) -> Formula {
        Formula::Exactly(n, x.into(), Box::new(f))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let see = |v: &String, bound: &Vec<String>, out: &mut Vec<String>| {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => args.iter().for_each(|v| see(v, bound, out)),
            Formula::Eq(x, y) | Formula::Lex(x, y) | Formula::Llex(x, y) => {
                see(x, bound, out);
                see(y, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, f)
            | Formula::Forall(x, f)
            | Formula::ExInf(x, f)
            | Formula::AtLeast(_, x, f)
            | Formula::Exactly(_, x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Quantifier depth.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::Eq(..) | Formula::Lex(..) | Formula::Llex(..) => 0,
            Formula::Not(f) => f.depth(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Implies(a, b) => a.depth().max(b.depth()),
            Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::ExInf(_, f)
            | Formula::AtLeast(_, _, f)
            | Formula::Exactly(_, _, f) => 1 + f.depth(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, fs: &[Formula]| -> fmt::Result {
            write!(f, "({head}")?;
            for x in fs {
                write!(f, " {x}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(r, args) => {
                write!(f, "({r}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(x, y) => write!(f, "(= {x} {y})"),
            Formula::Lex(x, y) => write!(f, "(lex {x} {y})"),
            Formula::Llex(x, y) => write!(f, "(llex {x} {y})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(fs) => list(f, "and", fs),
            Formula::Or(fs) => list(f, "or", fs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(x, g) => write!(f, "(exists {x} {g})"),
            Formula::Forall(x, g) => write!(f, "(forall {x} {g})"),
            Formula::ExInf(x, g) => write!(f, "(exinf {x} {g})"),
            Formula::AtLeast(n, x, g) => write!(f, "(atleast {n} {x} {g})"),
            Formula::Exactly(n, x, g) => write!(f, "(exactly {n} {x} {g})"),
        }
    }
}

#[derive(Debug)]
enum Sexp {
    Sym(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for line in text.lines() {
        let line = line.split(';').next().unwrap_or("");
        for c in line.chars() {
            match c {
                '(' | ')' => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                    out.push(c.to_string());
                }
                c if c.is_whitespace() => {
                    if !cur.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    out
}

fn read_sexp(tokens: &[String], pos: &mut usize) -> Result<Sexp> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Parse("unexpected end of formula".into()))?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    None => return Err(Error::Parse("unbalanced parenthesis".into())),
                    Some(")") => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    Some(_) => items.push(read_sexp(tokens, pos)?),
                }
            }
        }
        ")" => Err(Error::Parse("unexpected `)`".into())),
        s => Ok(Sexp::Sym(s.to_string())),
    }
}

fn var_name(s: &Sexp) -> Result<String> {
    match s {
        Sexp::Sym(v) if !KEYWORDS.contains(&v.as_str()) => Ok(v.clone()),
        other => Err(Error::Parse(format!("expected a variable, got {other:?}"))),
    }
}

fn binder_vars(s: &Sexp) -> Result<Vec<String>> {
    match s {
        Sexp::List(items) if !items.is_empty() => items.iter().map(var_name).collect(),
        other => Ok(vec![var_name(other)?]),
    }
}

fn to_formula(s: &Sexp) -> Result<Formula> {
    let items = match s {
        Sexp::Sym(t) if t == "true" => return Ok(Formula::True),
        Sexp::Sym(t) if t == "false" => return Ok(Formula::False),
        Sexp::Sym(t) => return Err(Error::Parse(format!("unexpected symbol `{t}`"))),
        Sexp::List(items) => items,
    };
    let head = match items.first() {
        Some(Sexp::Sym(h)) => h.as_str(),
        _ => return Err(Error::Parse("a formula list must start with a symbol".into())),
    };
    let args = &items[1..];
    let want = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!("`{head}` takes {n} arguments, got {}", args.len())))
        }
    };
    let count = |s: &Sexp| -> Result<u64> {
        match s {
            Sexp::Sym(n) => n.parse().map_err(|_| Error::Parse(format!("bad count `{n}`"))),
            _ => Err(Error::Parse("expected a count".into())),
        }
    };
    Ok(match head {
        "not" => {
            want(1)?;
            Formula::not(to_formula(&args[0])?)
        }
        "and" => Formula::And(args.iter().map(to_formula).collect::<Result<_>>()?),
        "or" => Formula::Or(args.iter().map(to_formula).collect::<Result<_>>()?),
        "implies" => {
            want(2)?;
            Formula::implies(to_formula(&args[0])?, to_formula(&args[1])?)
        }
        "=" | "lex" | "llex" => {
            want(2)?;
            let (x, y) = (var_name(&args[0])?, var_name(&args[1])?);
            match head {
                "=" => Formula::Eq(x, y),
                "lex" => Formula::Lex(x, y),
                _ => Formula::Llex(x, y),
            }
        }
        "exists" | "forall" => {
            want(2)?;
            let vars = binder_vars(&args[0])?;
            let body = to_formula(&args[1])?;
            vars.iter().rev().fold(body, |acc, v| {
                if head == "exists" {
                    Formula::Exists(v.clone(), Box::new(acc))
                } else {
                    Formula::Forall(v.clone(), Box::new(acc))
                }
            })
        }
        "exinf" => {
            want(2)?;
            Formula::ExInf(var_name(&args[0])?, Box::new(to_formula(&args[1])?))
        }
        "atleast" | "exactly" => {
            want(3)?;
            let n = count(&args[0])?;
            let (v, body) = (var_name(&args[1])?, Box::new(to_formula(&args[2])?));
            if head == "atleast" {
                Formula::AtLeast(n, v, body)
            } else {
                Formula::Exactly(n, v, body)
            }
        }
        "true" | "false" => return Err(Error::Parse(format!("`{head}` takes no arguments"))),
        rel => Formula::Atom(rel.to_string(), args.iter().map(var_name).collect::<Result<_>>()?),
    })
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let sexp = read_sexp(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse("trailing input after formula".into()));
        }
        to_formula(&sexp)
    }
}
