//! Triangular and shifting lemmas on algebras and on pullbacks, directly
//! decomposable congruence classes, and the decision of local
//! anticommutativity with witness extraction.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraRef, FiniteAlgebra};
use crate::congruence::{all_congruences, chain_between, generated_congruence, Chain, Congruence};
use crate::constructions::{generated_subalgebra, product, pullback, quotient, PullbackAlgebra};
use crate::error::{Error, Result};
use crate::free::{free_algebra, FreeAlgebra, Limits};
use crate::hom::{find_isomorphism, Homomorphism};
use crate::witness::{compile_chain, LocalWitness};
use crate::Elem;

type Classes = Vec<Vec<Elem>>;

/// A replayable violation. Pullback and product elements are written as
/// their component pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Counterexample {
    /// `x R y S z`, `x T z`, not `y T z`.
    Triangular {
        r: Classes,
        s: Classes,
        t: Classes,
        x: Elem,
        y: Elem,
        z: Elem,
    },
    /// `x R u`, `y R v`, `x S y`, `u S v`, `u T v`, not `x T y`.
    Shifting {
        r: Classes,
        s: Classes,
        t: Classes,
        x: Elem,
        y: Elem,
        u: Elem,
        v: Elem,
    },
    /// With `Θ = Cg(from, to)`, `corner` and `to` are not Θ-related; here
    /// `from = (x,y)`, `corner = (x',y)`, `to = (x',y')`.
    PullbackTriangular {
        from: (Elem, Elem),
        corner: (Elem, Elem),
        to: (Elem, Elem),
    },
    /// With `Θ = Cg((x,u), (y,u))`, `(x,v)` and `(y,v)` are not Θ-related.
    PullbackShifting {
        xu: (Elem, Elem),
        yu: (Elem, Elem),
        xv: (Elem, Elem),
        yv: (Elem, Elem),
    },
    /// `((s(p(a)), a), (s(p(a)), s(p(a))))` is missing from the congruence
    /// generated on `Eq(p)`.
    Point { a: Elem },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaVerdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl LemmaVerdict {
    pub fn from_counterexample(c: Option<Counterexample>) -> LemmaVerdict {
        LemmaVerdict {
            holds: c.is_none(),
            counterexample: c,
        }
    }
}

/// Indices of `R`, `S`, `T` in a [`Lattice`].
type Triple = (usize, usize, usize);

/// Fixed-width bitset over the elements of one algebra.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn intersects3(&self, b: &Bits, c: &Bits) -> bool {
        self.0.iter().zip(&b.0).zip(&c.0).any(|((x, y), z)| x & y & z != 0)
    }

    fn first_common(&self, other: &Bits) -> Option<Elem> {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .find_map(|(i, (a, b))| {
                let w = a & b;
                (w != 0).then(|| i * 64 + w.trailing_zeros() as usize)
            })
    }
}

/// `class[e]`: the class of `e` as a bitset.
fn class_bits(c: &Congruence) -> Vec<Bits> {
    let n = c.reps().len();
    let words = n.div_ceil(64);
    let mut by_rep: HashMap<Elem, Bits> = HashMap::new();
    for e in 0..n {
        let b = by_rep.entry(c.rep(e)).or_insert_with(|| Bits(vec![0; words]));
        b.0[e / 64] |= 1 << (e % 64);
    }
    (0..n).map(|e| by_rep[&c.rep(e)].clone()).collect()
}

/// Congruences with their class bitsets and the `R ∧ S ≤ T` table.
struct Lattice {
    cons: Vec<Congruence>,
    bits: Vec<Vec<Bits>>,
    /// `below[i][j]`: `cons[i] ≤ cons[j]`.
    below: Vec<Vec<bool>>,
    /// Index of `cons[i] ∧ cons[j]`.
    meet: Vec<Vec<usize>>,
}

impl Lattice {
    fn new(a: &AlgebraRef, cap: usize) -> Result<Lattice> {
        let cons = all_congruences(a, cap)?;
        let index: HashMap<&[Elem], usize> =
            cons.iter().enumerate().map(|(i, c)| (c.reps(), i)).collect();
        let meet = cons
            .iter()
            .map(|r| cons.iter().map(|s| index[r.meet(s).reps()]).collect())
            .collect();
        let below = cons
            .iter()
            .map(|r| cons.iter().map(|t| r.leq(t)).collect())
            .collect();
        let bits = cons.iter().map(class_bits).collect();
        Ok(Lattice {
            cons,
            bits,
            below,
            meet,
        })
    }

    /// `(R, S, T)` index triples with `R ∧ S ≤ T`.
    fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        let c = self.cons.len();
        (0..c).flat_map(move |r| {
            (0..c).flat_map(move |s| {
                let m = self.meet[r][s];
                (0..c).filter(move |&t| self.below[m][t]).map(move |t| (r, s, t))
            })
        })
    }
}

/// Every congruence triple `R ∧ S ≤ T` on `A`: `x R y S z` and `x T z`
/// imply `y T z`. Reports the least violating `(x, y, z)`.
pub fn triangular_lemma_holds(a: &AlgebraRef, cap: usize) -> Result<LemmaVerdict> {
    let lat = Lattice::new(a, cap)?;
    let n = a.size();
    let mut best: Option<((Elem, Elem, Elem), Triple)> = None;
    for (r, s, t) in lat.triples() {
        let (sc, tc) = (&lat.cons[s], &lat.cons[t]);
        for y in 0..n {
            for z in 0..n {
                if !sc.related(y, z) || tc.related(y, z) {
                    continue;
                }
                if let Some(x) = lat.bits[r][y].first_common(&lat.bits[t][z]) {
                    if best.is_none_or(|(b, _)| (x, y, z) < b) {
                        best = Some(((x, y, z), (r, s, t)));
                    }
                }
            }
        }
    }
    Ok(LemmaVerdict::from_counterexample(best.map(|((x, y, z), (r, s, t))| {
        Counterexample::Triangular {
            r: lat.cons[r].classes(),
            s: lat.cons[s].classes(),
            t: lat.cons[t].classes(),
            x,
            y,
            z,
        }
    })))
}

/// Every congruence triple `R ∧ S ≤ T` on `A`: `x R u`, `y R v`, `x S y`,
/// `u S v` and `u T v` imply `x T y`. Reports the least violating
/// `(x, y, u, v)`.
pub fn shifting_lemma_holds(a: &AlgebraRef, cap: usize) -> Result<LemmaVerdict> {
    let lat = Lattice::new(a, cap)?;
    let n = a.size();
    let mut best: Option<((Elem, Elem, Elem, Elem), Triple)> = None;
    for (r, s, t) in lat.triples() {
        let (sc, tc) = (&lat.cons[s], &lat.cons[t]);
        'pairs: for x in 0..n {
            for y in 0..n {
                if !sc.related(x, y) || tc.related(x, y) {
                    continue;
                }
                if best.is_some_and(|(b, _)| (x, y) > (b.0, b.1)) {
                    break 'pairs;
                }
                let (rx, ry) = (&lat.bits[r][x], &lat.bits[r][y]);
                for u in 0..n {
                    if rx.0[u / 64] >> (u % 64) & 1 == 0 {
                        continue;
                    }
                    if !ry.intersects3(&lat.bits[s][u], &lat.bits[t][u]) {
                        continue;
                    }
                    let v = (0..n)
                        .find(|&v| lat.cons[r].related(y, v) && sc.related(u, v) && tc.related(u, v))
                        .expect("intersection is nonempty");
                    if best.is_none_or(|(b, _)| (x, y, u, v) < b) {
                        best = Some(((x, y, u, v), (r, s, t)));
                    }
                    break;
                }
            }
        }
    }
    Ok(LemmaVerdict::from_counterexample(best.map(|((x, y, u, v), (r, s, t))| {
        Counterexample::Shifting {
            r: lat.cons[r].classes(),
            s: lat.cons[s].classes(),
            t: lat.cons[t].classes(),
            x,
            y,
            u,
            v,
        }
    })))
}

/// Principal congruences of one algebra, computed on demand.
struct PrincipalCache<'a> {
    algebra: &'a AlgebraRef,
    cache: HashMap<(Elem, Elem), Congruence>,
}

impl<'a> PrincipalCache<'a> {
    fn new(algebra: &'a AlgebraRef) -> Self {
        PrincipalCache {
            algebra,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, a: Elem, b: Elem) -> &Congruence {
        let key = (a.min(b), a.max(b));
        self.cache.entry(key).or_insert_with(|| {
            generated_congruence(self.algebra, &[key])
                .expect("elements are in range")
                .without_trace()
        })
    }
}

/// The triangular pattern on an algebra of pairs: for `(x,y)`, `(x',y)`,
/// `(x',y')` present, `(x',y) Cg((x,y),(x',y')) (x',y')`. The first
/// violation in lexicographic order of `(x,y), x', y'`.
fn triangular_scan(
    alg: &AlgebraRef,
    pairs: &[(Elem, Elem)],
    element: impl Fn(Elem, Elem) -> Option<Elem>,
    left_size: usize,
    right_size: usize,
) -> Option<Counterexample> {
    let mut principal = PrincipalCache::new(alg);
    for (from, &(x, y)) in pairs.iter().enumerate() {
        for x1 in (0..left_size).filter(|&x1| x1 != x) {
            let Some(corner) = element(x1, y) else { continue };
            for y1 in (0..right_size).filter(|&y1| y1 != y) {
                let Some(to) = element(x1, y1) else { continue };
                if !principal.get(from, to).related(corner, to) {
                    return Some(Counterexample::PullbackTriangular {
                        from: (x, y),
                        corner: (x1, y),
                        to: (x1, y1),
                    });
                }
            }
        }
    }
    None
}

fn pullback_or_empty(f: &Homomorphism, g: &Homomorphism) -> Result<Option<PullbackAlgebra>> {
    match pullback(f, g) {
        Ok(pb) => Ok(Some(pb)),
        Err(Error::EmptyUniverse) => Ok(None),
        Err(e) => Err(e),
    }
}

/// For every congruence Θ on `A ×_X B`: `(x,y) Θ (x',y')` implies
/// `(x',y) Θ (x',y')`. Checking the congruence generated by the hypothesis
/// suffices, since larger ones relate more.
pub fn triangular_on_pullback(f: &Homomorphism, g: &Homomorphism) -> Result<LemmaVerdict> {
    let Some(pb) = pullback_or_empty(f, g)? else {
        return Ok(LemmaVerdict::from_counterexample(None));
    };
    let c = triangular_scan(
        &pb.algebra,
        &pb.pairs,
        |a, b| pb.element(a, b),
        f.dom().size(),
        g.dom().size(),
    );
    Ok(LemmaVerdict::from_counterexample(c))
}

/// For every congruence Θ on `A ×_X B`: `(x,u) Θ (y,u)` implies
/// `(x,v) Θ (y,v)`, again via the principal congruence.
pub fn shifting_on_pullback(f: &Homomorphism, g: &Homomorphism) -> Result<LemmaVerdict> {
    let Some(pb) = pullback_or_empty(f, g)? else {
        return Ok(LemmaVerdict::from_counterexample(None));
    };
    let mut principal = PrincipalCache::new(&pb.algebra);
    for (e1, &(x, u)) in pb.pairs.iter().enumerate() {
        for (e2, &(y, u2)) in pb.pairs.iter().enumerate().skip(e1 + 1) {
            if u2 != u {
                continue;
            }
            for v in (0..g.dom().size()).filter(|&v| v != u) {
                let (Some(xv), Some(yv)) = (pb.element(x, v), pb.element(y, v)) else {
                    continue;
                };
                if !principal.get(e1, e2).related(xv, yv) {
                    return Ok(LemmaVerdict::from_counterexample(Some(
                        Counterexample::PullbackShifting {
                            xu: (x, u),
                            yu: (y, u),
                            xv: (x, v),
                            yv: (y, v),
                        },
                    )));
                }
            }
        }
    }
    Ok(LemmaVerdict::from_counterexample(None))
}

/// The triangular pattern on `A × B`: every congruence class of the product
/// is a product of its projections.
pub fn ddcc_on_product(a: &AlgebraRef, b: &AlgebraRef) -> Result<LemmaVerdict> {
    let p = product(a, b)?;
    let pairs: Vec<(Elem, Elem)> = (0..p.algebra.size()).map(|e| p.unpair(e)).collect();
    let c = triangular_scan(
        &p.algebra,
        &pairs,
        |x, y| Some(p.pair(x, y)),
        a.size(),
        b.size(),
    );
    Ok(LemmaVerdict::from_counterexample(c))
}

pub fn is_idempotent(a: &FiniteAlgebra) -> bool {
    a.is_idempotent()
}

#[derive(Debug, Clone)]
pub struct LocalVerdict {
    pub holds: bool,
    /// `F(x, y)`.
    pub free: FreeAlgebra,
    /// `Eq(f)` for `f: F(x,y) → F(z)`, `x, y ↦ z`.
    pub kernel: PullbackAlgebra,
    /// `Cg((x,y), (y,x))` on the kernel.
    pub theta: Congruence,
    /// From `(x,y)` to `(x,x)`, when they are related.
    pub chain: Option<Chain>,
    pub witness: Option<LocalWitness>,
    pub note: Option<String>,
}

/// Decides whether the variety generated by `basis` is locally
/// anticommutative: `(x,y)` and `(x,x)` are related by the congruence on
/// `Eq(F(x,y) → F(z))` generated by `((x,y), (y,x))`.
pub fn decide_locally_anticommutative(basis: &[AlgebraRef], limits: &Limits) -> Result<LocalVerdict> {
    let free = free_algebra(basis, 2, limits)?;
    let fz = free_algebra(basis, 1, limits)?;
    let z = fz.generators[0];
    let f = free.extend(&fz.carrier, &[z, z])?;
    let kernel = pullback(&f, &f)?;
    let (x, y) = (free.generators[0], free.generators[1]);
    let at = |a, b| kernel.element(a, b).expect("f(x) = f(y) = z");
    let start = at(x, y);
    let target = at(x, x);
    let theta = generated_congruence(&kernel.algebra, &[(start, at(y, x))])?;
    let holds = theta.related(start, target);
    let (chain, witness, note) = if holds {
        let chain = chain_between(&theta, start, target)?;
        let compiled = compile_chain(
            &chain,
            free.carrier.signature(),
            |e| kernel.pair_of(e),
            |e| free.label(e),
        );
        let witness = LocalWitness {
            m: compiled.left.len(),
            n: compiled.p.len(),
            b: compiled.left,
            c: compiled.right,
            p: compiled.p,
        };
        (Some(chain), Some(witness), None)
    } else {
        let note = format!(
            "(x,y) and (x,x) lie in different classes of Cg((x,y),(y,x)) on Eq(F(x,y) -> F(z)), \
             which has {} classes over {} elements",
            theta.num_classes(),
            kernel.size()
        );
        (None, None, Some(note))
    };
    Ok(LocalVerdict {
        holds,
        free,
        kernel,
        theta,
        chain,
        witness,
        note,
    })
}

/// A finite slice of the variety: the basis, pairwise products, the free
/// algebras on one and two generators (when at most 16 elements),
/// two-generated subalgebras of the products, and quotients of the basis
/// and products by principal congruences. Isomorphic repeats are dropped
/// and the list is capped at `cap` members.
pub fn variety_sample(basis: &[AlgebraRef], cap: usize) -> Result<Vec<AlgebraRef>> {
    let mut members: Vec<AlgebraRef> = Vec::new();
    let push = |a: AlgebraRef, members: &mut Vec<AlgebraRef>| -> Result<bool> {
        if members.len() >= cap {
            return Ok(false);
        }
        for m in members.iter() {
            if find_isomorphism(m, &a)?.is_some() {
                return Ok(true);
            }
        }
        members.push(a);
        Ok(true)
    };
    for a in basis {
        push(a.clone(), &mut members)?;
    }
    let mut products = Vec::new();
    for i in 0..basis.len() {
        for j in i..basis.len() {
            products.push(product(&basis[i], &basis[j])?.algebra);
        }
    }
    for p in &products {
        push(p.clone(), &mut members)?;
    }
    let small = Limits {
        max_free_size: 16,
        ..Limits::default()
    };
    for rank in 1..=2 {
        match free_algebra(basis, rank, &small) {
            Ok(f) => {
                let carrier = std::sync::Arc::new(
                    (*f.carrier).clone().with_name(format!("F{rank}")),
                );
                push(carrier, &mut members)?;
            }
            Err(Error::CapExceeded { .. } | Error::EmptyUniverse) => {}
            Err(e) => return Err(e),
        }
    }
    for p in &products {
        for x in 0..p.size() {
            for y in x + 1..p.size() {
                let sub = generated_subalgebra(p, &[x, y])?;
                if sub.algebra.size() < p.size() {
                    push(sub.algebra, &mut members)?;
                }
            }
        }
    }
    for src in basis.iter().chain(&products) {
        for x in 0..src.size() {
            for y in x + 1..src.size() {
                let theta = generated_congruence(src, &[(x, y)])?;
                let (q, _) = quotient(&theta)?;
                let q = std::sync::Arc::new(
                    (*q).clone().with_name(format!("{}/Cg({x},{y})", src.name())),
                );
                if !push(q, &mut members)? {
                    return Ok(members);
                }
            }
        }
    }
    Ok(members)
}
