//! Breadth-first subuniverse generation with derivation records.

use std::collections::HashMap;
use std::hash::Hash;

use crate::algebra::Signature;
use crate::term::Term;

/// How an element was first produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Derivation {
    /// The `j`-th generator.
    Generator(usize),
    /// A basic operation applied to earlier elements.
    Op { symbol: usize, args: Vec<usize> },
}

#[derive(Debug, Clone)]
pub(crate) struct Closure<T> {
    pub elements: Vec<T>,
    pub derivations: Vec<Derivation>,
    /// Element index of each generator (generators may coincide).
    pub generators: Vec<usize>,
    pub index: HashMap<T, usize>,
}

/// Signals that generation stopped after `cap` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

/// Closes `gens` under the operations of `sig`, level by level.
///
/// Level 0 is the generators. Level `k + 1` applies every symbol, in
/// signature order, to every tuple (row-major over element indices) of
/// elements found so far that uses at least one element of level `k`.
/// Constants enter at level 1. The first derivation of each element wins.
pub(crate) fn close<T: Clone + Eq + Hash>(
    sig: &Signature,
    gens: Vec<T>,
    mut apply: impl FnMut(usize, &[&T]) -> T,
    cap: usize,
) -> Result<Closure<T>, Overflow> {
    let mut c = Closure {
        elements: Vec::new(),
        derivations: Vec::new(),
        generators: Vec::with_capacity(gens.len()),
        index: HashMap::new(),
    };
    for (j, g) in gens.into_iter().enumerate() {
        let idx = match c.index.get(&g) {
            Some(&i) => i,
            None => {
                let i = c.elements.len();
                c.index.insert(g.clone(), i);
                c.elements.push(g);
                c.derivations.push(Derivation::Generator(j));
                i
            }
        };
        c.generators.push(idx);
    }
    if c.elements.len() > cap {
        return Err(Overflow);
    }

    let mut prev_end = 0;
    let mut first_round = true;
    loop {
        let cur_end = c.elements.len();
        for (s, sym) in sig.symbols().iter().enumerate() {
            let arity = sym.arity;
            if arity == 0 {
                if first_round {
                    let v = apply(s, &[]);
                    c.push(v, Derivation::Op { symbol: s, args: vec![] }, cap)?;
                }
                continue;
            }
            if cur_end == 0 {
                continue;
            }
            let mut args = vec![0usize; arity];
            loop {
                if args.iter().any(|&a| a >= prev_end) {
                    let refs: Vec<&T> = args.iter().map(|&a| &c.elements[a]).collect();
                    let v = apply(s, &refs);
                    c.push(
                        v,
                        Derivation::Op {
                            symbol: s,
                            args: args.clone(),
                        },
                        cap,
                    )?;
                }
                if !crate::algebra::increment(&mut args, cur_end) {
                    break;
                }
            }
        }
        first_round = false;
        if c.elements.len() == cur_end {
            return Ok(c);
        }
        prev_end = cur_end;
    }
}

impl<T: Clone + Eq + Hash> Closure<T> {
    fn push(&mut self, v: T, d: Derivation, cap: usize) -> Result<(), Overflow> {
        if !self.index.contains_key(&v) {
            if self.elements.len() >= cap {
                return Err(Overflow);
            }
            self.index.insert(v.clone(), self.elements.len());
            self.elements.push(v);
            self.derivations.push(d);
        }
        Ok(())
    }
}

/// Term label of element `e`; generator `j` becomes variable `j`.
pub(crate) fn label(sig: &Signature, derivations: &[Derivation], e: usize) -> Term {
    match &derivations[e] {
        Derivation::Generator(j) => Term::Var(*j),
        Derivation::Op { symbol, args } => Term::App(
            sig.symbols()[*symbol].name.clone(),
            args.iter().map(|&a| label(sig, derivations, a)).collect(),
        ),
    }
}

/// Evaluates every derivation bottom-up with `gen_value` for generators.
pub(crate) fn evaluate<V: Clone>(
    derivations: &[Derivation],
    mut gen_value: impl FnMut(usize) -> V,
    mut op: impl FnMut(usize, &[V]) -> V,
) -> Vec<V> {
    let mut out: Vec<V> = Vec::with_capacity(derivations.len());
    for d in derivations {
        let v = match d {
            Derivation::Generator(j) => gen_value(*j),
            Derivation::Op { symbol, args } => {
                let vals: Vec<V> = args.iter().map(|&a| out[a].clone()).collect();
                op(*symbol, &vals)
            }
        };
        out.push(v);
    }
    out
}
