//! Signatures and finite algebras given by total operation tables.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::Elem;

/// An operation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// A finite list of operation symbols, kept sorted by name so that two
/// signatures with the same symbols index their tables identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<Symbol>,
    designated: Option<usize>,
}

fn valid_symbol_name(name: &str) -> bool {
    let is_var = name.len() > 1
        && name.starts_with('x')
        && name[1..].chars().all(|c| c.is_ascii_digit());
    !name.is_empty()
        && !is_var
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '/' | '=' | '[' | ']' | '#'))
}

impl Signature {
    pub fn new(mut symbols: Vec<Symbol>, designated: Option<&str>) -> Result<Self> {
        symbols.sort();
        for w in symbols.windows(2) {
            if w[0].name == w[1].name {
                return Err(Error::DuplicateSymbol(w[0].name.clone()));
            }
        }
        if let Some(bad) = symbols.iter().find(|s| !valid_symbol_name(&s.name)) {
            return Err(Error::InvalidSymbolName(bad.name.clone()));
        }
        let designated = match designated {
            None => None,
            Some(name) => {
                let idx = symbols
                    .iter()
                    .position(|s| s.name == name)
                    .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
                if symbols[idx].arity != 0 {
                    return Err(Error::DesignatedNotConstant(name.to_string()));
                }
                Some(idx)
            }
        };
        Ok(Signature {
            symbols,
            designated,
        })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn designated(&self) -> Option<usize> {
        self.designated
    }

    /// Pointed means: a designated constant exists and it is the only
    /// nullary symbol.
    pub fn is_pointed(&self) -> bool {
        self.designated.is_some() && self.symbols.iter().filter(|s| s.arity == 0).count() == 1
    }

    /// Same signature with the designated constant removed.
    pub fn without_constants(&self) -> Signature {
        Signature {
            symbols: self.symbols.iter().filter(|s| s.arity > 0).cloned().collect(),
            designated: None,
        }
    }
}

/// A finite algebra on the universe `0..size`.
///
/// Each table is stored row-major: the tuple `(a_0, .., a_{k-1})` lives at
/// index `sum a_i * n^(k-1-i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    signature: Signature,
    tables: Vec<Vec<Elem>>,
}

pub type AlgebraRef = Arc<FiniteAlgebra>;

pub(crate) fn table_len(size: usize, arity: usize) -> Option<usize> {
    size.checked_pow(arity as u32)
}

impl FiniteAlgebra {
    /// Checks table lengths and entries. `tables` is indexed like
    /// `signature.symbols()`.
    pub fn new(
        name: impl Into<String>,
        size: usize,
        signature: Signature,
        tables: Vec<Vec<Elem>>,
    ) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::EmptyUniverse);
        }
        if tables.len() != signature.len() {
            return Err(Error::SizeMismatch {
                expected: signature.len(),
                found: tables.len(),
            });
        }
        for (sym, table) in signature.symbols().iter().zip(&tables) {
            let expected = table_len(size, sym.arity).unwrap_or(usize::MAX);
            if table.len() != expected {
                return Err(Error::TableLength {
                    algebra: name,
                    symbol: sym.name.clone(),
                    expected,
                    found: table.len(),
                });
            }
            if let Some(position) = table.iter().position(|&v| v >= size) {
                return Err(Error::EntryOutOfRange {
                    algebra: name,
                    symbol: sym.name.clone(),
                    position,
                    value: table[position],
                    size,
                });
            }
        }
        Ok(FiniteAlgebra {
            name,
            size,
            signature,
            tables,
        })
    }

    /// Builds an algebra from named tables in any order.
    pub fn from_named(
        name: impl Into<String>,
        size: usize,
        ops: Vec<(&str, usize, Vec<Elem>)>,
        designated: Option<&str>,
    ) -> Result<Self> {
        let symbols = ops.iter().map(|(n, a, _)| Symbol::new(*n, *a)).collect();
        let signature = Signature::new(symbols, designated)?;
        let mut tables = vec![Vec::new(); signature.len()];
        for (n, _, t) in ops {
            let idx = signature.index_of(n).expect("symbol was just inserted");
            tables[idx] = t;
        }
        FiniteAlgebra::new(name, size, signature, tables)
    }

    /// Builds an algebra by evaluating `op(symbol_index, args)` on every tuple.
    pub fn from_fn(
        name: impl Into<String>,
        size: usize,
        signature: Signature,
        mut op: impl FnMut(usize, &[Elem]) -> Elem,
    ) -> Result<Self> {
        let mut tables = Vec::with_capacity(signature.len());
        for (idx, sym) in signature.symbols().iter().enumerate() {
            let len = table_len(size, sym.arity).ok_or_else(|| Error::CapExceeded {
                what: "operation table".into(),
                cap: usize::MAX,
                bound: format!("{size}^{}", sym.arity),
            })?;
            let mut table = Vec::with_capacity(len);
            let mut args = vec![0; sym.arity];
            for _ in 0..len {
                table.push(op(idx, &args));
                increment(&mut args, size);
            }
            tables.push(table);
        }
        FiniteAlgebra::new(name, size, signature, tables)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn table(&self, symbol: usize) -> &[Elem] {
        &self.tables[symbol]
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.signature.symbols[symbol].arity
    }

    pub fn tuple_index(&self, args: &[Elem]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    #[inline]
    pub fn apply(&self, symbol: usize, args: &[Elem]) -> Elem {
        self.tables[symbol][self.tuple_index(args)]
    }

    /// Value of a nullary symbol.
    pub fn constant(&self, symbol: usize) -> Elem {
        self.tables[symbol][0]
    }

    /// Interpretation of the designated constant, if the signature is pointed.
    pub fn zero(&self) -> Option<Elem> {
        if self.signature.is_pointed() {
            self.signature.designated().map(|d| self.constant(d))
        } else {
            None
        }
    }

    pub fn require_zero(&self) -> Result<Elem> {
        self.zero().ok_or_else(|| Error::NotPointed(self.name.clone()))
    }

    pub fn check_element(&self, e: Elem) -> Result<()> {
        if e < self.size {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                element: e,
                size: self.size,
            })
        }
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.signature == other.signature {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(
                self.name.clone(),
                other.name.clone(),
            ))
        }
    }

    /// True iff `f(a,..,a) = a` for every basic operation. A constant is only
    /// idempotent on a one-element algebra.
    pub fn is_idempotent(&self) -> bool {
        self.signature.symbols().iter().enumerate().all(|(s, sym)| {
            (0..self.size).all(|a| {
                let args = vec![a; sym.arity];
                self.apply(s, &args) == a
            })
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The one-element algebra of a signature.
    pub fn trivial(signature: Signature) -> FiniteAlgebra {
        FiniteAlgebra::from_fn("1", 1, signature, |_, _| 0).expect("trivial tables are valid")
    }

    /// Same universe and tables, constants dropped.
    pub fn reduct_without_constants(&self) -> FiniteAlgebra {
        let signature = self.signature.without_constants();
        let tables = self
            .signature
            .symbols()
            .iter()
            .zip(&self.tables)
            .filter(|(s, _)| s.arity > 0)
            .map(|(_, t)| t.clone())
            .collect();
        FiniteAlgebra {
            name: format!("{}-", self.name),
            size: self.size,
            signature,
            tables,
        }
    }
}

/// Advances `args` to the next tuple in row-major order; wraps to all zeros.
pub(crate) fn increment(args: &mut [Elem], size: usize) -> bool {
    for a in args.iter_mut().rev() {
        *a += 1;
        if *a < size {
            return true;
        }
        *a = 0;
    }
    false
}

/// Iterates over all tuples of length `arity` over `0..size` in row-major order.
pub fn tuples(size: usize, arity: usize) -> impl Iterator<Item = Vec<Elem>> {
    let count = if size == 0 && arity > 0 {
        0
    } else {
        table_len(size, arity).unwrap_or(usize::MAX)
    };
    let mut cur = vec![0; arity];
    (0..count).map(move |i| {
        if i > 0 {
            increment(&mut cur, size);
        }
        cur.clone()
    })
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {}", self.name)?;
        writeln!(f, "size {}", self.size)?;
        if let Some(d) = self.signature.designated() {
            writeln!(
                f,
                "const {} = {}",
                self.signature.symbols[d].name,
                self.constant(d)
            )?;
        }
        for (i, sym) in self.signature.symbols().iter().enumerate() {
            if Some(i) == self.signature.designated() {
                continue;
            }
            let entries: Vec<String> = self.tables[i].iter().map(|v| v.to_string()).collect();
            writeln!(f, "op {}/{} = [{}]", sym.name, sym.arity, entries.join(" "))?;
        }
        Ok(())
    }
}
