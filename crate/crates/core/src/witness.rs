//! Mal'tsev-term witnesses for anticommutativity and local
//! anticommutativity: compilation from congruence chains and verification
//! by evaluation on the basis algebras.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraRef, FiniteAlgebra, Signature};
use crate::congruence::Chain;
use crate::error::{Error, Result};
use crate::term::{Compiled, Term};
use crate::Elem;

/// Unary `u_1..u_m`, `v_1..v_m` and `(m+2)`-ary `p_1..p_n` with
///
/// 1. `p_1(ū, x, 0) = x` and `p_1(v̄, 0, x) = 0`
/// 2. `p_{i+1}(ū, x, 0) = p_i(ū, 0, x)`
/// 3. `p_{i+1}(v̄, 0, x) = p_i(v̄, x, 0)`
/// 4. `p_n(ū, 0, x) = 0` and `p_n(v̄, x, 0) = 0`
///
/// where `ū = u_1(x), .., u_m(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaltsevWitness {
    pub m: usize,
    pub n: usize,
    pub u: Vec<Term>,
    pub v: Vec<Term>,
    pub p: Vec<Term>,
}

/// Binary `b_1..b_m`, `c_1..c_m` and `(m+2)`-ary `p_1..p_n` with
///
/// 1. `p_1(b̄, x, y) = x`
/// 2. `p_1(c̄, y, x) = y`
/// 3. `p_{i+1}(b̄, x, y) = p_i(b̄, y, x)`
/// 4. `p_{i+1}(c̄, y, x) = p_i(c̄, x, y)`
/// 5. `p_n(b̄, y, x) = x`
/// 6. `p_n(c̄, x, y) = x`
/// 7. `b_i(x, x) = c_i(x, x)`
///
/// where `b̄ = b_1(x,y), .., b_m(x,y)`. Without family 7 these are the
/// terms for directly decomposable congruence classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalWitness {
    pub m: usize,
    pub n: usize,
    pub b: Vec<Term>,
    pub c: Vec<Term>,
    pub p: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalMode {
    Local,
    Ddcc,
}

/// The first equation instance that fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFailure {
    /// Family number as listed on the witness type.
    pub family: usize,
    /// 1-based term index (`i` in `p_i`, `b_i`); 0 where the family has none.
    pub index: usize,
    pub algebra: String,
    /// Values of `x` (and `y`).
    pub at: Vec<Elem>,
    pub lhs: Elem,
    pub rhs: Elem,
}

impl fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family {} (i = {}) fails in `{}` at {:?}: {} != {}",
            self.family, self.index, self.algebra, self.at, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessCheck {
    Passes,
    Fails(WitnessFailure),
}

impl WitnessCheck {
    pub fn passes(&self) -> bool {
        matches!(self, WitnessCheck::Passes)
    }
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedWitness(msg.into())
}

fn check_terms(
    what: &str,
    terms: &[Term],
    count: usize,
    vars: usize,
    a: &FiniteAlgebra,
) -> Result<Vec<Compiled>> {
    if terms.len() != count {
        return Err(malformed(format!("{} {what} terms, expected {count}", terms.len())));
    }
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.check(a)?;
            if t.var_bound() > vars {
                return Err(malformed(format!(
                    "{what}{} = {t} uses more than {vars} variables",
                    i + 1
                )));
            }
            Ok(Compiled::new(t, a))
        })
        .collect()
}

fn check_basis(basis: &[AlgebraRef]) -> Result<()> {
    let first = basis.first().ok_or(Error::EmptyUniverse)?;
    basis.iter().try_for_each(|b| first.same_signature(b))
}

/// Evaluates `p` at `params ++ [a, b]`.
fn eval_p(p: &Compiled, alg: &FiniteAlgebra, params: &[Elem], a: Elem, b: Elem, buf: &mut Vec<Elem>) -> Elem {
    buf.clear();
    buf.extend_from_slice(params);
    buf.push(a);
    buf.push(b);
    p.eval(alg, buf)
}

pub fn verify_anticommutativity_witness(
    w: &MaltsevWitness,
    basis: &[AlgebraRef],
) -> Result<WitnessCheck> {
    check_basis(basis)?;
    if w.n == 0 {
        return Err(malformed("n = 0: a chain must reach (0,0)"));
    }
    for alg in basis {
        let zero = alg.require_zero()?;
        let u = check_terms("u", &w.u, w.m, 1, alg)?;
        let v = check_terms("v", &w.v, w.m, 1, alg)?;
        let p = check_terms("p", &w.p, w.n, w.m + 2, alg)?;
        let n = w.n;
        let mut buf = Vec::new();
        for x in 0..alg.size() {
            let us: Vec<Elem> = u.iter().map(|t| t.eval(alg, &[x])).collect();
            let vs: Vec<Elem> = v.iter().map(|t| t.eval(alg, &[x])).collect();
            let mut ev = |i: usize, params: &[Elem], a, b| eval_p(&p[i], alg, params, a, b, &mut buf);
            let mut equations: Vec<(usize, usize, Elem, Elem)> = vec![
                (1, 1, ev(0, &us, x, zero), x),
                (1, 1, ev(0, &vs, zero, x), zero),
            ];
            for i in 0..n - 1 {
                equations.push((2, i + 1, ev(i + 1, &us, x, zero), ev(i, &us, zero, x)));
            }
            for i in 0..n - 1 {
                equations.push((3, i + 1, ev(i + 1, &vs, zero, x), ev(i, &vs, x, zero)));
            }
            equations.push((4, n, ev(n - 1, &us, zero, x), zero));
            equations.push((4, n, ev(n - 1, &vs, x, zero), zero));
            if let Some(&(family, index, lhs, rhs)) = equations.iter().find(|e| e.2 != e.3) {
                return Ok(WitnessCheck::Fails(WitnessFailure {
                    family,
                    index,
                    algebra: alg.name().to_string(),
                    at: vec![x],
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(WitnessCheck::Passes)
}

pub fn verify_local_witness(
    w: &LocalWitness,
    basis: &[AlgebraRef],
    mode: LocalMode,
) -> Result<WitnessCheck> {
    check_basis(basis)?;
    if w.n == 0 {
        return Err(malformed("n = 0: a chain must reach (x,x)"));
    }
    for alg in basis {
        let b = check_terms("b", &w.b, w.m, 2, alg)?;
        let c = check_terms("c", &w.c, w.m, 2, alg)?;
        let p = check_terms("p", &w.p, w.n, w.m + 2, alg)?;
        let n = w.n;
        let mut buf = Vec::new();
        for x in 0..alg.size() {
            for y in 0..alg.size() {
                let bs: Vec<Elem> = b.iter().map(|t| t.eval(alg, &[x, y])).collect();
                let cs: Vec<Elem> = c.iter().map(|t| t.eval(alg, &[x, y])).collect();
                let mut ev =
                    |i: usize, params: &[Elem], a, b| eval_p(&p[i], alg, params, a, b, &mut buf);
                let mut equations: Vec<(usize, usize, Elem, Elem)> =
                    vec![(1, 1, ev(0, &bs, x, y), x), (2, 1, ev(0, &cs, y, x), y)];
                for i in 0..n - 1 {
                    equations.push((3, i + 1, ev(i + 1, &bs, x, y), ev(i, &bs, y, x)));
                }
                for i in 0..n - 1 {
                    equations.push((4, i + 1, ev(i + 1, &cs, y, x), ev(i, &cs, x, y)));
                }
                equations.push((5, n, ev(n - 1, &bs, y, x), x));
                equations.push((6, n, ev(n - 1, &cs, x, y), x));
                if mode == LocalMode::Local && x == y {
                    for i in 0..w.m {
                        equations.push((7, i + 1, b[i].eval(alg, &[x, x]), c[i].eval(alg, &[x, x])));
                    }
                }
                if let Some(&(family, index, lhs, rhs)) = equations.iter().find(|e| e.2 != e.3) {
                    return Ok(WitnessCheck::Fails(WitnessFailure {
                        family,
                        index,
                        algebra: alg.name().to_string(),
                        at: vec![x, y],
                        lhs,
                        rhs,
                    }));
                }
            }
        }
    }
    Ok(WitnessCheck::Passes)
}

/// Terms read off a chain in an algebra of pairs.
pub(crate) struct CompiledChain {
    pub left: Vec<Term>,
    pub right: Vec<Term>,
    pub p: Vec<Term>,
}

/// Each chain step `λ(w) = t(e_1, .., e_m, w)` becomes `p_i`, with the hole
/// at argument `m+1` for forward steps and `m+2` for reversed ones, so that
/// consecutive elements are `p_i(ē, g_0, g_1)` and `p_i(ē, g_1, g_0)`
/// read componentwise. The parameters `e_j`, collected over all steps, are
/// pairs whose component labels become the `left`/`right` term lists.
///
/// An empty chain yields `n = 1` with `p_1` the first of the two trailing
/// arguments; this only arises when the endpoints coincide.
pub(crate) fn compile_chain(
    chain: &Chain,
    sig: &Signature,
    pair_of: impl Fn(Elem) -> (Elem, Elem),
    label: impl Fn(Elem) -> Term,
) -> CompiledChain {
    let mut slots: HashMap<Elem, usize> = HashMap::new();
    let mut params = Vec::new();
    for step in &chain.steps {
        for e in step.polynomial.parameters() {
            slots.entry(e).or_insert_with(|| {
                params.push(e);
                params.len() - 1
            });
        }
    }
    let m = params.len();
    let mut p: Vec<Term> = chain
        .steps
        .iter()
        .map(|step| {
            let hole = Term::var(if step.reversed { m + 1 } else { m });
            step.polynomial.to_term(sig, hole, |e| Term::var(slots[&e]))
        })
        .collect();
    if p.is_empty() {
        p.push(Term::var(m));
    }
    let (left, right) = params
        .iter()
        .map(|&e| {
            let (a, b) = pair_of(e);
            (label(a), label(b))
        })
        .unzip();
    CompiledChain { left, right, p }
}
