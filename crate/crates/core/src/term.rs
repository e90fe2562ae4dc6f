//! Terms over a signature: printing, parsing and evaluation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::Elem;

/// A term tree. Variables are zero-based and print as `x1, x2, ..`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(symbol.into(), args)
    }

    pub fn constant(symbol: impl Into<String>) -> Term {
        Term::App(symbol.into(), Vec::new())
    }

    /// One more than the largest variable index, or 0 for ground terms.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::App(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Replaces each variable `i` by `subst[i]`.
    pub fn substitute(&self, subst: &[Term]) -> Term {
        match self {
            Term::Var(i) => subst[*i].clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.substitute(subst)).collect())
            }
        }
    }

    /// Checks symbols and arities against the algebra's signature.
    pub fn check(&self, a: &FiniteAlgebra) -> Result<()> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let s = a
                    .signature()
                    .index_of(f)
                    .ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
                let arity = a.arity(s);
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: f.clone(),
                        arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|t| t.check(a))
            }
        }
    }

    /// Bottom-up evaluation through the operation tables.
    pub fn evaluate(&self, a: &FiniteAlgebra, assignment: &[Elem]) -> Result<Elem> {
        self.check(a)?;
        if self.var_bound() > assignment.len() {
            return Err(Error::UnboundVariable(assignment.len()));
        }
        let compiled = Compiled::new(self, a);
        Ok(compiled.eval(a, assignment))
    }
}

/// A term with symbol names resolved, for repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Var(usize),
    App(usize, Vec<Compiled>),
}

impl Compiled {
    /// The term must already pass `Term::check`.
    pub(crate) fn new(t: &Term, a: &FiniteAlgebra) -> Compiled {
        match t {
            Term::Var(i) => Compiled::Var(*i),
            Term::App(f, args) => Compiled::App(
                a.signature().index_of(f).expect("checked term"),
                args.iter().map(|t| Compiled::new(t, a)).collect(),
            ),
        }
    }

    pub(crate) fn eval(&self, a: &FiniteAlgebra, assignment: &[Elem]) -> Elem {
        match self {
            Compiled::Var(i) => assignment[*i],
            Compiled::App(s, args) => {
                let vals: Vec<Elem> = args.iter().map(|t| t.eval(a, assignment)).collect();
                a.apply(*s, &vals)
            }
        }
    }
}

/// `evaluate_term` as a free function.
pub fn evaluate_term(t: &Term, a: &FiniteAlgebra, assignment: &[Elem]) -> Result<Elem> {
    t.evaluate(a, assignment)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{}", i + 1),
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(t)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            line: 0,
            message: format!("term: {msg} at offset {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() || matches!(c, b'(' | b')' | b',') {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a symbol or variable"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.ident()?;
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                let i: usize = digits.parse().map_err(|_| self.error("bad variable"))?;
                if i == 0 {
                    return Err(self.error("variables start at x1"));
                }
                return Ok(Term::Var(i - 1));
            }
        }
        self.skip_ws();
        let mut args = Vec::new();
        if self.src.get(self.pos) == Some(&b'(') {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                self.skip_ws();
                match self.src.get(self.pos) {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        Ok(Term::App(name, args))
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Term, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
