//! Congruence generation with derivation traces, chains, kernels and
//! congruence lattices.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::algebra::{AlgebraRef, FiniteAlgebra, Signature};
use crate::error::{Error, Result};
use crate::hom::Homomorphism;
use crate::term::Term;
use crate::Elem;

/// Union-find whose roots are always the least element of their class.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let gp = self.parent[self.parent[x]];
            self.parent[x] = gp;
            x = gp;
        }
        x
    }

    /// Returns false if `a` and `b` were already in one class.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn reps(mut self) -> Vec<usize> {
        (0..self.parent.len()).map(|x| self.find(x)).collect()
    }
}

/// A basic translation `w ↦ f(c_1, .., w, .., c_k)` with the hole at `position`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Translation {
    pub symbol: usize,
    pub position: usize,
    /// The other `arity - 1` arguments, in order.
    pub fixed: Vec<Elem>,
}

impl Translation {
    pub fn args_with(&self, hole: Elem) -> Vec<Elem> {
        let mut args = Vec::with_capacity(self.fixed.len() + 1);
        args.extend_from_slice(&self.fixed[..self.position]);
        args.push(hole);
        args.extend_from_slice(&self.fixed[self.position..]);
        args
    }

    pub fn apply(&self, a: &FiniteAlgebra, hole: Elem) -> Elem {
        a.apply(self.symbol, &self.args_with(hole))
    }
}

/// Why a pair was merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// The `k`-th generating pair.
    Generator(usize),
    /// A translation applied to the pair merged at step `parent`.
    Polynomial {
        translation: Translation,
        parent: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub pair: (Elem, Elem),
    pub justification: Justification,
}

/// Every successful merge, in order. Replaying the merges from the
/// discrete partition reproduces the congruence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTrace {
    pub generators: Vec<(Elem, Elem)>,
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    /// Re-derives every step and returns the resulting representatives, or
    /// the index of the first step that does not follow from its
    /// justification.
    pub fn replay(&self, a: &FiniteAlgebra) -> std::result::Result<Vec<Elem>, usize> {
        let mut uf = UnionFind::new(a.size());
        for (i, step) in self.steps.iter().enumerate() {
            let expected = match &step.justification {
                Justification::Generator(k) => self.generators.get(*k).copied(),
                Justification::Polynomial { translation, parent } if *parent < i => {
                    let (x, y) = self.steps[*parent].pair;
                    Some((translation.apply(a, x), translation.apply(a, y)))
                }
                Justification::Polynomial { .. } => None,
            };
            if expected != Some(step.pair) || !uf.union(step.pair.0, step.pair.1) {
                return Err(i);
            }
        }
        Ok(uf.reps())
    }

    /// The composite translation that produced step `i` from its generator,
    /// innermost first, and that generator's index.
    fn unfold(&self, mut i: usize) -> (UnaryPolynomial, usize) {
        let mut translations = Vec::new();
        loop {
            match &self.steps[i].justification {
                Justification::Generator(k) => {
                    translations.reverse();
                    return (UnaryPolynomial { translations }, *k);
                }
                Justification::Polynomial {
                    translation,
                    parent,
                } => {
                    translations.push(translation.clone());
                    i = *parent;
                }
            }
        }
    }
}

/// A compatible equivalence relation, stored as least-element class
/// representatives.
#[derive(Debug, Clone)]
pub struct Congruence {
    algebra: AlgebraRef,
    reps: Vec<Elem>,
    trace: Option<Arc<DerivationTrace>>,
}

impl PartialEq for Congruence {
    fn eq(&self, other: &Self) -> bool {
        self.reps == other.reps && *self.algebra == *other.algebra
    }
}

impl Eq for Congruence {}

impl Congruence {
    pub fn discrete(a: &AlgebraRef) -> Congruence {
        Congruence {
            algebra: a.clone(),
            reps: (0..a.size()).collect(),
            trace: None,
        }
    }

    pub fn total(a: &AlgebraRef) -> Congruence {
        Congruence {
            algebra: a.clone(),
            reps: vec![0; a.size()],
            trace: None,
        }
    }

    /// Validates an explicit partition; fails on overlaps, gaps or
    /// incompatibility.
    pub fn from_classes(a: &AlgebraRef, classes: &[Vec<Elem>]) -> Result<Congruence> {
        let mut reps = vec![usize::MAX; a.size()];
        for class in classes {
            let min = *class.iter().min().ok_or(Error::EmptyUniverse)?;
            for &e in class {
                a.check_element(e)?;
                if reps[e] != usize::MAX {
                    return Err(Error::DuplicateName(e.to_string()));
                }
                reps[e] = min;
            }
        }
        if let Some(e) = reps.iter().position(|&r| r == usize::MAX) {
            return Err(Error::ElementOutOfRange {
                element: e,
                size: a.size(),
            });
        }
        let c = Congruence {
            algebra: a.clone(),
            reps,
            trace: None,
        };
        match c.compatibility_violation() {
            None => Ok(c),
            Some((symbol, args)) => Err(Error::NotHomomorphism {
                cod: a.name().to_string(),
                symbol,
                args,
            }),
        }
    }

    /// First tuple pair `ā θ b̄` with `f(ā)` and `f(b̄)` unrelated, as the
    /// symbol and the concatenation `ā ++ b̄`.
    pub fn compatibility_violation(&self) -> Option<(String, Vec<Elem>)> {
        let a = &self.algebra;
        for (s, sym) in a.signature().symbols().iter().enumerate() {
            for x in crate::algebra::tuples(a.size(), sym.arity) {
                for y in crate::algebra::tuples(a.size(), sym.arity) {
                    let related = x.iter().zip(&y).all(|(&p, &q)| self.related(p, q));
                    if related && !self.related(a.apply(s, &x), a.apply(s, &y)) {
                        let mut args = x.clone();
                        args.extend(y);
                        return Some((sym.name.clone(), args));
                    }
                }
            }
        }
        None
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn trace(&self) -> Option<&DerivationTrace> {
        self.trace.as_deref()
    }

    #[inline]
    pub fn rep(&self, e: Elem) -> Elem {
        self.reps[e]
    }

    pub fn reps(&self) -> &[Elem] {
        &self.reps
    }

    #[inline]
    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.reps[a] == self.reps[b]
    }

    /// Classes ordered by least member, members increasing.
    pub fn classes(&self) -> Vec<Vec<Elem>> {
        let mut out: Vec<Vec<Elem>> = Vec::new();
        let mut slot = HashMap::new();
        for (e, &r) in self.reps.iter().enumerate() {
            let i = *slot.entry(r).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[i].push(e);
        }
        out
    }

    pub fn num_classes(&self) -> usize {
        self.reps.iter().enumerate().filter(|(e, &r)| *e == r).count()
    }

    pub fn is_discrete(&self) -> bool {
        self.reps.iter().enumerate().all(|(e, &r)| e == r)
    }

    pub fn is_total(&self) -> bool {
        self.reps.iter().all(|&r| r == 0)
    }

    /// Refinement order: `self ⊆ other`.
    pub fn leq(&self, other: &Congruence) -> bool {
        (0..self.reps.len()).all(|e| other.related(e, self.reps[e]))
    }

    pub fn meet(&self, other: &Congruence) -> Congruence {
        let mut first: HashMap<(Elem, Elem), Elem> = HashMap::new();
        let reps = (0..self.reps.len())
            .map(|e| *first.entry((self.reps[e], other.reps[e])).or_insert(e))
            .collect();
        Congruence {
            algebra: self.algebra.clone(),
            reps,
            trace: None,
        }
    }

    /// The congruence generated by the union.
    pub fn join(&self, other: &Congruence) -> Congruence {
        let pairs: Vec<(Elem, Elem)> = (0..self.reps.len())
            .flat_map(|e| [(e, self.reps[e]), (e, other.reps[e])])
            .filter(|(a, b)| a != b)
            .collect();
        generated_congruence(&self.algebra, &pairs).expect("pairs are in range")
    }

    pub fn without_trace(mut self) -> Congruence {
        self.trace = None;
        self
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, class) in self.classes().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let items: Vec<String> = class.iter().map(|e| e.to_string()).collect();
            write!(f, "[{}]", items.join(" "))?;
        }
        write!(f, "]")
    }
}

/// The least congruence containing `pairs`, with a trace of every merge.
///
/// Worklist over merged pairs: for each merged `(x, y)` and every basic
/// translation `t`, merge `t(x)` with `t(y)`. Each merged pair is processed
/// once, so the work is linear in the number of merges.
pub fn generated_congruence(a: &AlgebraRef, pairs: &[(Elem, Elem)]) -> Result<Congruence> {
    for &(x, y) in pairs {
        a.check_element(x)?;
        a.check_element(y)?;
    }
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut queue = VecDeque::new();
    for (k, &(x, y)) in pairs.iter().enumerate() {
        if uf.union(x, y) {
            queue.push_back(steps.len());
            steps.push(TraceStep {
                pair: (x, y),
                justification: Justification::Generator(k),
            });
        }
    }
    let symbols: Vec<(usize, usize)> = a
        .signature()
        .symbols()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.arity > 0)
        .map(|(i, s)| (i, s.arity))
        .collect();
    let mut args_x = Vec::new();
    let mut args_y = Vec::new();
    while let Some(si) = queue.pop_front() {
        let (x, y) = steps[si].pair;
        for &(s, arity) in &symbols {
            let table = a.table(s);
            for position in 0..arity {
                let mut fixed = vec![0; arity - 1];
                loop {
                    args_x.clear();
                    args_x.extend_from_slice(&fixed[..position]);
                    args_x.push(x);
                    args_x.extend_from_slice(&fixed[position..]);
                    args_y.clone_from(&args_x);
                    args_y[position] = y;
                    let u = table[a.tuple_index(&args_x)];
                    let v = table[a.tuple_index(&args_y)];
                    if uf.union(u, v) {
                        queue.push_back(steps.len());
                        steps.push(TraceStep {
                            pair: (u, v),
                            justification: Justification::Polynomial {
                                translation: Translation {
                                    symbol: s,
                                    position,
                                    fixed: fixed.clone(),
                                },
                                parent: si,
                            },
                        });
                    }
                    if !crate::algebra::increment(&mut fixed, n) {
                        break;
                    }
                }
            }
        }
    }
    Ok(Congruence {
        algebra: a.clone(),
        reps: uf.reps(),
        trace: Some(Arc::new(DerivationTrace {
            generators: pairs.to_vec(),
            steps,
        })),
    })
}

/// `Eq(f)`: the partition of the domain into fibres.
pub fn eq_kernel(f: &Homomorphism) -> Congruence {
    let mut first: HashMap<Elem, Elem> = HashMap::new();
    let reps = f
        .map()
        .iter()
        .enumerate()
        .map(|(e, &v)| *first.entry(v).or_insert(e))
        .collect();
    Congruence {
        algebra: f.dom().clone(),
        reps,
        trace: None,
    }
}

/// Default cap on the algebra size for `all_congruences`.
pub const DEFAULT_MAX_CON_SIZE: usize = 12;

/// Every congruence, as the join-closure of the principal congruences
/// together with Δ. Sorted by decreasing number of classes, then by
/// representatives, so Δ comes first and ∇ last.
pub fn all_congruences(a: &AlgebraRef, cap: usize) -> Result<Vec<Congruence>> {
    if a.size() > cap {
        return Err(Error::CapExceeded {
            what: format!("congruence lattice of `{}`", a.name()),
            cap,
            bound: a.size().to_string(),
        });
    }
    let mut seen: HashMap<Vec<Elem>, usize> = HashMap::new();
    let mut all: Vec<Congruence> = Vec::new();
    let mut add = |c: Congruence, all: &mut Vec<Congruence>| {
        if !seen.contains_key(&c.reps) {
            seen.insert(c.reps.clone(), all.len());
            all.push(c.without_trace());
        }
    };
    add(Congruence::discrete(a), &mut all);
    for x in 0..a.size() {
        for y in x + 1..a.size() {
            add(generated_congruence(a, &[(x, y)])?, &mut all);
        }
    }
    let principal = all.len();
    let mut i = 1;
    while i < all.len() {
        for j in 1..principal {
            let joined = all[i].join(&all[j]);
            add(joined, &mut all);
        }
        i += 1;
    }
    all.sort_by(|p, q| {
        q.num_classes()
            .cmp(&p.num_classes())
            .then_with(|| p.reps.cmp(&q.reps))
    });
    Ok(all)
}

/// A composite of basic translations, applied innermost first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnaryPolynomial {
    pub translations: Vec<Translation>,
}

impl UnaryPolynomial {
    pub fn apply(&self, a: &FiniteAlgebra, e: Elem) -> Elem {
        self.translations.iter().fold(e, |acc, t| t.apply(a, acc))
    }

    /// Parameters in order of appearance.
    pub fn parameters(&self) -> impl Iterator<Item = Elem> + '_ {
        self.translations.iter().flat_map(|t| t.fixed.iter().copied())
    }

    /// The polynomial as a term: `hole` fills the hole and each parameter
    /// is replaced by `param(element)`.
    pub fn to_term(&self, sig: &Signature, hole: Term, mut param: impl FnMut(Elem) -> Term) -> Term {
        self.translations.iter().fold(hole, |inner, t| {
            let mut args: Vec<Term> = t.fixed.iter().map(|&c| param(c)).collect();
            args.insert(t.position, inner);
            Term::App(sig.symbols()[t.symbol].name.clone(), args)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub polynomial: UnaryPolynomial,
    /// Index of the generating pair used.
    pub generator: usize,
    /// False: `λ(g.0) → λ(g.1)`; true: `λ(g.1) → λ(g.0)`.
    pub reversed: bool,
}

/// `z_0, .., z_n` with each consecutive pair the image of a generating pair
/// under a unary polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub elements: Vec<Elem>,
    pub steps: Vec<ChainStep>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Re-evaluates every step; returns the first failing step index.
    pub fn validate(&self, a: &FiniteAlgebra, generators: &[(Elem, Elem)]) -> std::result::Result<(), usize> {
        if self.elements.len() != self.steps.len() + 1 {
            return Err(0);
        }
        for (i, step) in self.steps.iter().enumerate() {
            let Some(&(g0, g1)) = generators.get(step.generator) else {
                return Err(i);
            };
            let (from, to) = if step.reversed { (g1, g0) } else { (g0, g1) };
            if step.polynomial.apply(a, from) != self.elements[i]
                || step.polynomial.apply(a, to) != self.elements[i + 1]
            {
                return Err(i);
            }
        }
        Ok(())
    }
}

/// A shortest chain from `a` to `b`.
///
/// Edges are the merged pairs of the trace plus every image of a merged pair
/// under one more basic translation; each edge unfolds into its composite
/// translation and generator.
pub fn chain_between(theta: &Congruence, a: Elem, b: Elem) -> Result<Chain> {
    let alg = &theta.algebra;
    alg.check_element(a)?;
    alg.check_element(b)?;
    if !theta.related(a, b) {
        return Err(Error::NotRelated(a, b));
    }
    let trace = theta.trace().ok_or(Error::MissingTrace)?;
    let n = alg.size();

    // (from, to, polynomial, generator): polynomial(g.0) = from, polynomial(g.1) = to
    let mut edges: Vec<(Elem, Elem, UnaryPolynomial, usize)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let unfolded: Vec<(UnaryPolynomial, usize)> =
        (0..trace.steps.len()).map(|i| trace.unfold(i)).collect();
    for (i, step) in trace.steps.iter().enumerate() {
        let (x, y) = step.pair;
        if seen.insert((x.min(y), x.max(y))) {
            edges.push((x, y, unfolded[i].0.clone(), unfolded[i].1));
        }
    }
    for (i, step) in trace.steps.iter().enumerate() {
        let (x, y) = step.pair;
        for (s, sym) in alg.signature().symbols().iter().enumerate() {
            for position in 0..sym.arity {
                for fixed in crate::algebra::tuples(n, sym.arity - 1) {
                    let t = Translation {
                        symbol: s,
                        position,
                        fixed,
                    };
                    let (u, v) = (t.apply(alg, x), t.apply(alg, y));
                    if u != v && seen.insert((u.min(v), u.max(v))) {
                        let mut poly = unfolded[i].0.clone();
                        poly.translations.push(t);
                        edges.push((u, v, poly, unfolded[i].1));
                    }
                }
            }
        }
    }

    let mut adjacent: Vec<Vec<(usize, Elem)>> = vec![Vec::new(); n];
    for (i, (x, y, _, _)) in edges.iter().enumerate() {
        adjacent[*x].push((i, *y));
        adjacent[*y].push((i, *x));
    }
    let mut via: Vec<Option<(usize, Elem)>> = vec![None; n];
    let mut visited = vec![false; n];
    visited[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for &(i, v) in &adjacent[u] {
            if !visited[v] {
                visited[v] = true;
                via[v] = Some((i, u));
                queue.push_back(v);
            }
        }
    }
    let mut elements = vec![b];
    let mut steps = Vec::new();
    let mut cur = b;
    while cur != a {
        let (i, prev) = via[cur].expect("related elements are connected");
        let (from, _, polynomial, generator) = &edges[i];
        steps.push(ChainStep {
            polynomial: polynomial.clone(),
            generator: *generator,
            reversed: *from != prev,
        });
        elements.push(prev);
        cur = prev;
    }
    elements.reverse();
    steps.reverse();
    Ok(Chain { elements, steps })
}
