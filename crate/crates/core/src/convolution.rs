//! Shifted homotopy Lie algebras: the generic interface, twisting,
//! restriction and sums, the convolution algebras of quasi-free dg properads,
//! and the explicit operations `⋆`, `U`, `D` on maps out of a coproperad.

use crate::cobar::{two_colored_resolution, cobar, DgProperad, GenKind, PGraph};
use crate::coproperad::{CDec, Coproperad, CoproperadMorphism};
use crate::exactlin::{koszul_sign, ChainComplex, Lin, Permutation, Vector, Q};
use crate::graphs::Graph;
use crate::sbimod::{compose_in_end, EndMap, Tuple};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LError {
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("expected degree {expected}, found {found}")]
    Degree { expected: i32, found: i32 },
    #[error("element has filtration level {0}, at least 1 is required")]
    Level(usize),
    #[error("bracket leaves the subspace at {0}")]
    Closure(String),
    #[error("not a Maurer-Cartan element")]
    NotMc,
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("polynomial degree cap {0} exceeded")]
    Overflow(u32),
}

/// One argument of a bracket, repeated `mult` times.
#[derive(Clone, Copy, Debug)]
pub struct Arg<'a> {
    pub x: &'a Vector,
    pub deg: i32,
    pub mult: usize,
}

impl<'a> Arg<'a> {
    pub fn one(x: &'a Vector, deg: i32) -> Self {
        Arg { x, deg, mult: 1 }
    }

    pub fn pow(x: &'a Vector, deg: i32, mult: usize) -> Self {
        Arg { x, deg, mult }
    }
}

/// A complete shifted curved L∞-algebra on a finite graded basis. Brackets
/// are symmetric of degree −1.
pub trait LInfinity: Send + Sync {
    fn dim(&self) -> usize;
    fn degree(&self, i: usize) -> i32;
    fn label(&self, i: usize) -> String {
        format!("e{i}")
    }
    /// canonical filtration level of a basis element
    fn level(&self, i: usize) -> usize;
    /// brackets of larger arity vanish identically
    fn max_arity(&self) -> usize;
    fn curvature(&self) -> Vector {
        Lin::new()
    }
    /// `ℓ_n` with `n = Σ mult ≥ 1`
    fn bracket(&self, args: &[Arg]) -> Result<Vector, LError>;
}

pub type Shared = Arc<dyn LInfinity>;

pub(crate) fn parity(n: i64) -> Q {
    if n.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

pub fn degree_of(l: &dyn LInfinity, x: &Vector) -> Result<Option<i32>, LError> {
    let mut degs = x.keys().map(|&i| l.degree(i));
    let Some(d) = degs.next() else { return Ok(None) };
    if degs.all(|e| e == d) {
        Ok(Some(d))
    } else {
        Err(LError::Inhomogeneous)
    }
}

/// Minimal level over the support; `usize::MAX` for zero.
pub fn level_of(l: &dyn LInfinity, x: &Vector) -> usize {
    x.keys().map(|&i| l.level(i)).min().unwrap_or(usize::MAX)
}

/// `ℓ_n(x_1, …, x_n)` on homogeneous arguments; `n = 0` gives the curvature.
pub fn ell(l: &dyn LInfinity, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
    if xs.is_empty() {
        return Ok(l.curvature());
    }
    if xs.len() > l.max_arity() || xs.iter().any(|(x, _)| x.is_zero()) {
        return Ok(Lin::new());
    }
    let args: Vec<Arg> = xs.iter().map(|&(x, d)| Arg::one(x, d)).collect();
    l.bracket(&args)
}

/// `Σ_{n≥0} 1/n! ℓ_n(x, …, x)` for `x` of degree 0.
pub fn mc_residual(l: &dyn LInfinity, x: &Vector) -> Result<Vector, LError> {
    match degree_of(l, x)? {
        Some(0) | None => {}
        Some(d) => return Err(LError::Degree { expected: 0, found: d }),
    }
    if level_of(l, x) == 0 {
        return Err(LError::Level(0));
    }
    let mut out = l.curvature();
    if x.is_zero() {
        return Ok(out);
    }
    for n in 1..=l.max_arity() {
        out.add_scaled(&l.bracket(&[Arg::pow(x, 0, n)])?, Q::inv_factorial(n));
    }
    Ok(out)
}

pub fn is_mc(l: &dyn LInfinity, x: &Vector) -> Result<bool, LError> {
    Ok(mc_residual(l, x)?.is_zero())
}

/// `Σ_{p+q=n} Σ_{σ ∈ Sh⁻¹_{q,p}} (ℓ_{p+1} ∘₁ ℓ_q)^σ (x_1, …, x_n)`, curvature included.
pub fn jacobi_residual(l: &dyn LInfinity, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
    let n = xs.len();
    let degs: Vec<i32> = xs.iter().map(|x| x.1).collect();
    let mut out = Lin::new();
    for q in 0..=n {
        for s in subsets_of(n, q) {
            let rest: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
            let images: Vec<usize> = s.iter().chain(&rest).copied().collect();
            let sign = Q::sign(koszul_sign(&images, &degs));
            let inner_args: Vec<(&Vector, i32)> = s.iter().map(|&i| xs[i]).collect();
            let inner = ell(l, &inner_args)?;
            if inner.is_zero() {
                continue;
            }
            let inner_deg = degs.iter().enumerate().filter(|(i, _)| s.contains(i)).map(|(_, d)| d).sum::<i32>() - 1;
            let mut outer_args = vec![(&inner, inner_deg)];
            outer_args.extend(rest.iter().map(|&i| xs[i]));
            out.add_scaled(&ell(l, &outer_args)?, sign);
        }
    }
    Ok(out)
}

fn subsets_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    crate::exactlin::subsets(n, k)
}

/// Random combination of the basis elements of one degree, with small
/// integer coefficients.
pub fn random_element(l: &dyn LInfinity, deg: i32, rng: &mut impl Rng) -> Vector {
    let mut x = Lin::new();
    for i in (0..l.dim()).filter(|&i| l.degree(i) == deg) {
        let c = rng.random_range(-2i64..=2);
        x.add_term(i, Q::int(c));
    }
    x
}

/// Degrees carried by at least one basis element.
pub fn degrees(l: &dyn LInfinity) -> Vec<i32> {
    (0..l.dim()).map(|i| l.degree(i)).collect::<BTreeSet<_>>().into_iter().collect()
}

/// `ℓ^a_n = Σ_k 1/k! ℓ_{k+n}(a, …, a, −)`, curvature the MC residual of `a`.
pub struct Twisted {
    pub base: Shared,
    pub a: Vector,
    curvature: Vector,
}

impl Twisted {
    pub fn new(base: Shared, a: Vector) -> Result<Self, LError> {
        let t = Twisted::curved(base, a)?;
        if !t.curvature.is_zero() {
            return Err(LError::NotMc);
        }
        Ok(t)
    }

    /// Twist by any degree-0 element; the result is curved by its residual.
    pub fn curved(base: Shared, a: Vector) -> Result<Self, LError> {
        let curvature = mc_residual(base.as_ref(), &a)?;
        Ok(Twisted { base, a, curvature })
    }
}

impl LInfinity for Twisted {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn degree(&self, i: usize) -> i32 {
        self.base.degree(i)
    }
    fn label(&self, i: usize) -> String {
        self.base.label(i)
    }
    fn level(&self, i: usize) -> usize {
        self.base.level(i)
    }
    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }
    fn curvature(&self) -> Vector {
        self.curvature.clone()
    }
    fn bracket(&self, args: &[Arg]) -> Result<Vector, LError> {
        let n: usize = args.iter().map(|a| a.mult).sum();
        let mut out = Lin::new();
        let top = self.base.max_arity();
        for k in 0..=top.saturating_sub(n) {
            if k > 0 && self.a.is_zero() {
                break;
            }
            let mut full = Vec::with_capacity(args.len() + 1);
            if k > 0 {
                full.push(Arg::pow(&self.a, 0, k));
            }
            full.extend_from_slice(args);
            out.add_scaled(&self.base.bracket(&full)?, Q::inv_factorial(k));
        }
        Ok(out)
    }
}

/// The sub-algebra spanned by a subset of the basis; brackets that leave it
/// are reported.
pub struct Restricted {
    pub base: Shared,
    pub keep: Vec<usize>,
    pos: HashMap<usize, usize>,
}

impl Restricted {
    pub fn new(base: Shared, keep: Vec<usize>) -> Self {
        let pos = keep.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        Restricted { base, keep, pos }
    }

    pub fn embed(&self, x: &Vector) -> Vector {
        x.map_keys(|&i| (self.keep[i], Q::one()))
    }

    pub fn project(&self, x: &Vector) -> Result<Vector, LError> {
        let mut out = Lin::new();
        for (i, c) in x.iter() {
            match self.pos.get(i) {
                Some(&j) => out.add_term(j, *c),
                None => return Err(LError::Closure(self.base.label(*i))),
            }
        }
        Ok(out)
    }
}

impl LInfinity for Restricted {
    fn dim(&self) -> usize {
        self.keep.len()
    }
    fn degree(&self, i: usize) -> i32 {
        self.base.degree(self.keep[i])
    }
    fn label(&self, i: usize) -> String {
        self.base.label(self.keep[i])
    }
    fn level(&self, i: usize) -> usize {
        self.base.level(self.keep[i])
    }
    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }
    fn curvature(&self) -> Vector {
        self.project(&self.base.curvature()).expect("curvature outside the subspace")
    }
    fn bracket(&self, args: &[Arg]) -> Result<Vector, LError> {
        let lifted: Vec<Vector> = args.iter().map(|a| self.embed(a.x)).collect();
        let full: Vec<Arg> = args.iter().zip(&lifted).map(|(a, x)| Arg { x, ..*a }).collect();
        self.project(&self.base.bracket(&full)?)
    }
}

/// Blockwise sum: mixed brackets vanish.
pub struct DirectSum {
    pub parts: Vec<Shared>,
    offsets: Vec<usize>,
}

impl DirectSum {
    pub fn new(parts: Vec<Shared>) -> Self {
        let mut offsets = vec![0];
        for p in &parts {
            offsets.push(offsets.last().unwrap() + p.dim());
        }
        DirectSum { parts, offsets }
    }

    pub fn offset(&self, part: usize) -> usize {
        self.offsets[part]
    }

    pub fn inject(&self, part: usize, x: &Vector) -> Vector {
        x.map_keys(|&i| (i + self.offsets[part], Q::one()))
    }

    pub fn component(&self, part: usize, x: &Vector) -> Vector {
        let (lo, hi) = (self.offsets[part], self.offsets[part + 1]);
        x.iter().filter(|(i, _)| (lo..hi).contains(*i)).map(|(i, c)| (i - lo, *c)).collect()
    }

    fn locate(&self, i: usize) -> (usize, usize) {
        let p = self.offsets.partition_point(|&o| o <= i) - 1;
        (p, i - self.offsets[p])
    }
}

impl LInfinity for DirectSum {
    fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }
    fn degree(&self, i: usize) -> i32 {
        let (p, j) = self.locate(i);
        self.parts[p].degree(j)
    }
    fn label(&self, i: usize) -> String {
        let (p, j) = self.locate(i);
        format!("{}:{}", p, self.parts[p].label(j))
    }
    fn level(&self, i: usize) -> usize {
        let (p, j) = self.locate(i);
        self.parts[p].level(j)
    }
    fn max_arity(&self) -> usize {
        self.parts.iter().map(|p| p.max_arity()).max().unwrap_or(0)
    }
    fn curvature(&self) -> Vector {
        let mut out = Lin::new();
        for (p, part) in self.parts.iter().enumerate() {
            out.add_scaled(&self.inject(p, &part.curvature()), Q::one());
        }
        out
    }
    fn bracket(&self, args: &[Arg]) -> Result<Vector, LError> {
        let mut out = Lin::new();
        for (p, part) in self.parts.iter().enumerate() {
            let xs: Vec<Vector> = args.iter().map(|a| self.component(p, a.x)).collect();
            if xs.iter().any(|x| x.is_zero()) {
                continue;
            }
            let sub: Vec<Arg> = args.iter().zip(&xs).map(|(a, x)| Arg { x, ..*a }).collect();
            out.add_scaled(&self.inject(p, &part.bracket(&sub)?), Q::one());
        }
        Ok(out)
    }
}

/// The zero algebra.
pub struct Zero;

impl LInfinity for Zero {
    fn dim(&self) -> usize {
        0
    }
    fn degree(&self, _: usize) -> i32 {
        0
    }
    fn level(&self, _: usize) -> usize {
        usize::MAX
    }
    fn max_arity(&self) -> usize {
        0
    }
    fn bracket(&self, _: &[Arg]) -> Result<Vector, LError> {
        Ok(Lin::new())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvBasis {
    pub gen: usize,
    pub inp: Tuple,
    pub out: Tuple,
    pub deg: i32,
}

/// Maps from the generators of a quasi-free dg properad `(F(E), d)` to the
/// endomorphism properad of a family of complexes, `x(γ) : E → End`, with
/// brackets read off from `d`. A basis element has degree
/// `deg(out) − deg(in) − deg(γ)`.
pub struct ConvAlgebra {
    pub prop: DgProperad,
    pub spaces: Vec<ChainComplex>,
    pub basis: Vec<ConvBasis>,
    index: HashMap<(usize, Tuple, Tuple), usize>,
    levels: Vec<usize>,
    /// per generator: the terms of its differential, grouped by vertex count
    terms: Vec<BTreeMap<usize, Vec<(PGraph, Q)>>>,
    max_arity: usize,
}

impl ConvAlgebra {
    pub fn new(prop: DgProperad, spaces: Vec<ChainComplex>, levels: Vec<usize>) -> Self {
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for (g, x) in prop.gens.iter().enumerate() {
            let (sx, sy) = (&spaces[x.in_color as usize], &spaces[x.out_color as usize]);
            for (inp, out, d) in EndMap::basis(x.outputs, x.inputs, sx, sy) {
                index.insert((g, inp.clone(), out.clone()), basis.len());
                basis.push(ConvBasis { gen: g, inp, out, deg: d - x.degree });
            }
        }
        let mut terms = Vec::new();
        let mut max_arity = 1;
        for d in &prop.diff {
            let mut by: BTreeMap<usize, Vec<(PGraph, Q)>> = BTreeMap::new();
            for (h, c) in d.iter() {
                max_arity = max_arity.max(h.vertices.len());
                by.entry(h.vertices.len()).or_default().push((h.clone(), *c));
            }
            terms.push(by);
        }
        ConvAlgebra { prop, spaces, basis, index, levels, terms, max_arity }
    }

    pub fn basis_index(&self, gen: usize, inp: &[u8], out: &[u8]) -> Option<usize> {
        self.index.get(&(gen, inp.to_vec(), out.to_vec())).copied()
    }

    /// `x(γ)` as a multilinear map, for `x` of degree `deg`.
    pub fn value(&self, x: &Vector, deg: i32, gen: usize) -> EndMap {
        let g = &self.prop.gens[gen];
        let mut m = EndMap::zero(g.outputs, g.inputs, g.in_color as usize, g.out_color as usize, deg + g.degree);
        for (i, c) in x.iter() {
            let b = &self.basis[*i];
            if b.gen == gen {
                m.add_entry(b.inp.clone(), b.out.clone(), *c);
            }
        }
        m
    }

    pub fn from_value(&self, gen: usize, m: &EndMap) -> Vector {
        m.entries
            .iter()
            .map(|((i, o), c)| (self.basis_index(gen, i, o).expect("entry outside the basis"), *c))
            .collect()
    }

    fn values(&self, x: &Vector, deg: i32) -> BTreeMap<usize, EndMap> {
        let gens: BTreeSet<usize> = x.keys().map(|&i| self.basis[i].gen).collect();
        gens.into_iter().map(|g| (g, self.value(x, deg, g))).collect()
    }

    /// Basis elements whose generator satisfies `pred`.
    pub fn indices_where(&self, pred: impl Fn(&GenKind) -> bool) -> Vec<usize> {
        (0..self.basis.len()).filter(|&i| pred(&self.prop.gens[self.basis[i].gen].kind)).collect()
    }

    /// Element with value `m(d)` on the generator of kind `kind(d)`, for
    /// every `d` in the support of `m`.
    pub fn embed(&self, m: &ConvMap, kind: impl Fn(CDec) -> GenKind) -> Vector {
        let mut out = Lin::new();
        for (d, v) in &m.values {
            let g = self.prop.find(kind(*d)).expect("generator exists");
            out.add_scaled(&self.from_value(g, v), Q::one());
        }
        out
    }

    /// The map `d ↦ x(kind(d))` for `x` of degree `deg`, shifted by `shift`.
    pub fn extract(&self, x: &Vector, deg: i32, shift: i32, src: usize, tgt: usize, dec: impl Fn(&GenKind) -> Option<CDec>) -> ConvMap {
        let mut m = ConvMap::zero(deg + shift, src, tgt);
        let gens: BTreeSet<usize> = x.keys().map(|&i| self.basis[i].gen).collect();
        for g in gens {
            if let Some(d) = dec(&self.prop.gens[g].kind) {
                m.set(d, self.value(x, deg, g));
            }
        }
        m
    }

    /// One assignment term of a bracket on the graph `h`.
    fn graph_terms(
        &self,
        h: &PGraph,
        mu: Q,
        vals: &[BTreeMap<usize, EndMap>],
        args: &[Arg],
        out: &mut EndMap,
    ) {
        let k = h.vertices.len();
        let mut remaining: Vec<usize> = args.iter().map(|a| a.mult).collect();
        let mut assign = vec![0usize; k];
        let slot_degs: Vec<i32> = args.iter().flat_map(|a| std::iter::repeat_n(a.deg, a.mult)).collect();
        let firsts: Vec<usize> = args
            .iter()
            .scan(0, |s, a| {
                let f = *s;
                *s += a.mult;
                Some(f)
            })
            .collect();
        let weight: Q = args.iter().fold(Q::one(), |acc, a| acc * factorial(a.mult));
        self.assign_rec(h, 0, &mut remaining, &mut assign, &|assign: &[usize]| {
            let mut next = firsts.clone();
            let images: Vec<usize> = assign
                .iter()
                .map(|&a| {
                    let s = next[a];
                    next[a] += 1;
                    s
                })
                .collect();
            let mut sign = (koszul_sign(&images, &slot_degs) < 0) as i64;
            let mut before = 0i64;
            for (v, &a) in assign.iter().enumerate() {
                sign += before * args[a].deg as i64;
                before += h.vertices[v].deg as i64;
            }
            let maps: Vec<&EndMap> = assign.iter().enumerate().map(|(v, &a)| &vals[a][&h.vertices[v].dec]).collect();
            (maps, mu * weight * parity(sign))
        }, vals, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn assign_rec<'a>(
        &self,
        h: &PGraph,
        v: usize,
        remaining: &mut Vec<usize>,
        assign: &mut Vec<usize>,
        term: &dyn Fn(&[usize]) -> (Vec<&'a EndMap>, Q),
        vals: &'a [BTreeMap<usize, EndMap>],
        out: &mut EndMap,
    ) {
        if v == h.vertices.len() {
            let (maps, c) = term(assign);
            let m = compose_in_end(h, &maps, &self.spaces);
            out.add_scaled(&m, c);
            return;
        }
        for a in 0..remaining.len() {
            if remaining[a] == 0 || !vals[a].contains_key(&h.vertices[v].dec) {
                continue;
            }
            remaining[a] -= 1;
            assign[v] = a;
            self.assign_rec(h, v + 1, remaining, assign, term, vals, out);
            remaining[a] += 1;
        }
    }
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(Q::one(), |acc, k| acc * Q::int(k))
}

impl LInfinity for ConvAlgebra {
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn degree(&self, i: usize) -> i32 {
        self.basis[i].deg
    }
    fn label(&self, i: usize) -> String {
        let b = &self.basis[i];
        let word = |t: &Tuple| t.iter().map(|x| x.to_string()).collect::<String>();
        format!("{}[{}→{}]", self.prop.gens[b.gen].label, word(&b.inp), word(&b.out))
    }
    fn level(&self, i: usize) -> usize {
        self.levels[self.basis[i].gen]
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn bracket(&self, args: &[Arg]) -> Result<Vector, LError> {
        let k: usize = args.iter().map(|a| a.mult).sum();
        if k == 0 {
            return Ok(self.curvature());
        }
        if args.iter().any(|a| a.x.is_zero() || (a.mult > 1 && a.deg % 2 != 0)) || k > self.max_arity {
            return Ok(Lin::new());
        }
        for a in args {
            if let Some(d) = degree_of(self, a.x)? {
                if d != a.deg {
                    return Err(LError::Degree { expected: a.deg, found: d });
                }
            }
        }
        let vals: Vec<BTreeMap<usize, EndMap>> = args.iter().map(|a| self.values(a.x, a.deg)).collect();
        let total: i64 = args.iter().map(|a| a.deg as i64 * a.mult as i64).sum();
        let tau = parity(total);
        let out_deg = (total - 1) as i32;
        let mut result = Lin::new();
        for (g, by) in self.terms.iter().enumerate() {
            let x = &self.prop.gens[g];
            let mut m = EndMap::zero(x.outputs, x.inputs, x.in_color as usize, x.out_color as usize, out_deg + x.degree);
            if let Some(list) = by.get(&k) {
                for (h, mu) in list {
                    self.graph_terms(h, *mu * tau, &vals, args, &mut m);
                }
            }
            if k == 1 {
                if let Some(v) = vals[0].get(&g) {
                    m.add_scaled(&v.differential(&self.spaces), -Q::one());
                }
            }
            if !m.is_zero() {
                result.add_scaled(&self.from_value(g, &m), Q::one());
            }
        }
        Ok(result)
    }
}

/// Filtration levels of the generators of a construction on `c`: shifted
/// atoms by the coradical filtration, arrows by the density filtration.
pub fn generator_levels(c: &Coproperad, prop: &DgProperad) -> Vec<usize> {
    prop.gens
        .iter()
        .map(|g| match g.kind {
            GenKind::Shifted { atom, .. } => c.coradical_level(CDec::Atom(atom)),
            GenKind::Arrow(d) => c.density_level(d),
            GenKind::Unit => 1,
        })
        .collect()
}

/// `𝔨_{C,A,B} = sHom(C̄, End_A) ⊕ Hom(C, End^A_B) ⊕ sHom(C̄, End_B)`.
pub fn build_k(c: &Coproperad, a: &ChainComplex, b: &ChainComplex) -> ConvAlgebra {
    let prop = two_colored_resolution(c);
    let levels = generator_levels(c, &prop);
    ConvAlgebra::new(prop, vec![a.clone(), b.clone()], levels)
}

/// `s𝔤_{C,A} = sHom(C̄, End_A)` with the shifted bracket.
pub fn build_g(c: &Coproperad, a: &ChainComplex) -> ConvAlgebra {
    let prop = cobar(c);
    let levels = generator_levels(c, &prop);
    ConvAlgebra::new(prop, vec![a.clone()], levels)
}

/// Which summand of `𝔨` a map belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Summand {
    A,
    Mid,
    B,
}

impl Summand {
    pub fn kind(self, d: CDec) -> GenKind {
        match (self, d) {
            (Summand::A, CDec::Atom(atom)) => GenKind::Shifted { copy: 0, atom },
            (Summand::B, CDec::Atom(atom)) => GenKind::Shifted { copy: 1, atom },
            (Summand::Mid, d) => GenKind::Arrow(d),
            _ => panic!("shifted summands live on atoms"),
        }
    }

    pub fn dec(self, k: &GenKind) -> Option<CDec> {
        match (self, *k) {
            (Summand::A, GenKind::Shifted { copy: 0, atom }) => Some(CDec::Atom(atom)),
            (Summand::B, GenKind::Shifted { copy: 1, atom }) => Some(CDec::Atom(atom)),
            (Summand::Mid, GenKind::Arrow(d)) => Some(d),
            _ => None,
        }
    }
}

/// The element `(sα, f, sβ)` of `𝔨`.
pub fn k_element(k: &ConvAlgebra, alpha: Option<&ConvMap>, f: Option<&ConvMap>, beta: Option<&ConvMap>) -> Vector {
    let mut x = Lin::new();
    for (m, s) in [(alpha, Summand::A), (f, Summand::Mid), (beta, Summand::B)] {
        if let Some(m) = m {
            x.add_scaled(&k.embed(m, |d| s.kind(d)), Q::one());
        }
    }
    x
}

/// The three components of an element of `𝔨` of degree `deg`, desuspended
/// on the outer summands.
pub fn k_split(k: &ConvAlgebra, x: &Vector, deg: i32) -> (ConvMap, ConvMap, ConvMap) {
    (
        k.extract(x, deg, -1, 0, 0, |g| Summand::A.dec(g)),
        k.extract(x, deg, 0, 0, 1, |g| Summand::Mid.dec(g)),
        k.extract(x, deg, -1, 1, 1, |g| Summand::B.dec(g)),
    )
}

/// A homogeneous map `C → End` (or `C → End^X_Y`), one value per basis
/// element of `C`; the value at `d` has degree `deg + |d|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvMap {
    pub deg: i32,
    pub src: usize,
    pub tgt: usize,
    pub values: BTreeMap<CDec, EndMap>,
}

impl ConvMap {
    pub fn zero(deg: i32, src: usize, tgt: usize) -> Self {
        ConvMap { deg, src, tgt, values: BTreeMap::new() }
    }

    /// The identity of a complex, supported on the identity of `C`.
    pub fn identity(color: usize, space: &ChainComplex) -> Self {
        let mut m = ConvMap::zero(0, color, color);
        m.set(CDec::Id, EndMap::identity(color, space));
        m
    }

    /// Supported on the identity of `C`, with the given linear map.
    pub fn linear(map: EndMap) -> Self {
        let mut m = ConvMap::zero(map.deg, map.src, map.tgt);
        m.set(CDec::Id, map);
        m
    }

    pub fn get(&self, d: CDec) -> Option<&EndMap> {
        self.values.get(&d)
    }

    pub fn set(&mut self, d: CDec, m: EndMap) {
        if m.is_zero() {
            self.values.remove(&d);
        } else {
            self.values.insert(d, m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add_at(&mut self, d: CDec, m: &EndMap, c: Q) {
        let mut v = self.values.remove(&d).unwrap_or_else(|| EndMap { entries: BTreeMap::new(), ..m.clone() });
        v.add_scaled(m, c);
        self.set(d, v);
    }

    pub fn add_scaled(&mut self, other: &ConvMap, c: Q) {
        for (d, m) in &other.values {
            self.add_at(*d, m, c);
        }
    }

    pub fn scaled(&self, c: Q) -> ConvMap {
        let mut m = ConvMap::zero(self.deg, self.src, self.tgt);
        m.add_scaled(self, c);
        m
    }

    pub fn sum(&self, other: &ConvMap) -> ConvMap {
        let mut m = self.clone();
        m.add_scaled(other, Q::one());
        m
    }

    pub fn restrict(&self, keep: impl Fn(CDec) -> bool) -> ConvMap {
        let mut m = self.clone();
        m.values.retain(|d, _| keep(*d));
        m
    }

    /// Minimal density level over the support.
    pub fn density_level(&self, c: &Coproperad) -> usize {
        self.values.keys().map(|&d| c.density_level(d)).min().unwrap_or(usize::MAX)
    }
}

/// Maps placed on the vertices of `g` (vertex order), each first moved past
/// the elements of `C` on the earlier vertices, then composed.
pub fn eval_graph<D: Clone + Ord>(g: &Graph<D>, maps: &[&EndMap], map_degs: &[i32], spaces: &[ChainComplex]) -> EndMap {
    let mut sign = 0i64;
    let mut before = 0i64;
    for (v, vx) in g.vertices.iter().enumerate() {
        sign += before * map_degs[v] as i64;
        before += vx.deg as i64;
    }
    compose_in_end(g, maps, spaces).scaled(parity(sign))
}

fn all_decs(c: &Coproperad) -> impl Iterator<Item = CDec> {
    std::iter::once(CDec::Id).chain((0..c.dim()).map(CDec::Atom))
}

fn check_colors(ok: bool, what: &str) -> Result<(), LError> {
    if ok {
        Ok(())
    } else {
        Err(LError::Mismatch(what.into()))
    }
}

/// `(f⋆g)(c) = Σ ± γ(f(c_b) ; g(c_t))` over the two-vertex decompositions,
/// `f` on the bottom vertex.
pub fn star(c: &Coproperad, f: &ConvMap, g: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    check_colors(f.src == f.tgt && g.src == g.tgt && f.src == g.src, "star needs maps into one End_A")?;
    let mut out = ConvMap::zero(f.deg + g.deg, f.src, f.tgt);
    for a in 0..c.dim() {
        let d = CDec::Atom(a);
        for (h, mu) in c.delta_11(d).iter() {
            let top = h.edges[0].0.v;
            let (h, s) = h.permute(&[1 - top, top]);
            let (Some(fb), Some(gt)) = (f.get(h.vertices[0].dec), g.get(h.vertices[1].dec)) else { continue };
            let m = eval_graph(&h, &[fb, gt], &[f.deg, g.deg], spaces);
            out.add_at(d, &m, *mu * Q::sign(s));
        }
    }
    Ok(out)
}

/// `∂f = d ∘ f − (−1)^{|f|} f ∘ d_C`
pub fn conv_differential(c: &Coproperad, f: &ConvMap, spaces: &[ChainComplex]) -> ConvMap {
    let mut out = ConvMap::zero(f.deg - 1, f.src, f.tgt);
    for d in all_decs(c) {
        if let Some(v) = f.get(d) {
            out.add_at(d, &v.differential(spaces), Q::one());
        }
        for (h, kappa) in c.differential(d).iter() {
            if let Some(v) = f.get(h.vertices[0].dec) {
                out.add_at(d, &compose_in_end(h, &[v], spaces), -parity(f.deg as i64) * *kappa);
            }
        }
    }
    out
}

/// `∂α + α⋆α`, zero iff `α` is an `ΩC`-gebra structure.
pub fn gebra_residual(c: &Coproperad, alpha: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    if alpha.deg != -1 {
        return Err(LError::Degree { expected: -1, found: alpha.deg });
    }
    let mut r = conv_differential(c, alpha, spaces);
    r.add_scaled(&star(c, alpha, alpha, spaces)?, Q::one());
    Ok(r)
}

/// The shifted bracket on `s𝔤_{C,A}`, from the displayed formula with the
/// sign that makes it graded symmetric.
pub fn shifted_bracket(c: &Coproperad, f: &ConvMap, g: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    let (p, q) = (f.deg as i64, g.deg as i64);
    let mut out = star(c, f, g, spaces)?.scaled(parity(p));
    out.add_scaled(&star(c, g, f, spaces)?, -parity(p * (q + 1)));
    Ok(out)
}

/// Shared body of `U` and `D`: the lone vertex `lone` gets `single`, the
/// other vertices get the `fs` in every order.
fn lone_operation(
    cut: &crate::coproperad::Cut,
    lone: usize,
    single: &ConvMap,
    fs: &[&ConvMap],
    single_first: bool,
    spaces: &[ChainComplex],
) -> EndMap {
    let n = fs.len();
    let others: Vec<usize> = (0..cut.vertices.len()).filter(|&v| v != lone).collect();
    // argument list: (single, f_1..f_n) or (f_1..f_n, single)
    let arg_degs: Vec<i32> = if single_first {
        std::iter::once(single.deg).chain(fs.iter().map(|f| f.deg)).collect()
    } else {
        fs.iter().map(|f| f.deg).chain(std::iter::once(single.deg)).collect()
    };
    let single_idx = if single_first { 0 } else { n };
    let f_idx = |i: usize| if single_first { i + 1 } else { i };
    let v0 = &cut.vertices[lone];
    let mut out = EndMap::zero(cut.outputs.len(), cut.inputs.len(), fs[0].src, single.tgt, 0);
    let Some(sv) = single.get(v0.dec.dec) else { return out };
    let mut first = true;
    for perm in Permutation::all(n) {
        let perm = perm.images();
        // others[j] receives f_{perm[j]}
        let mut images = vec![0usize; cut.vertices.len()];
        let mut maps: Vec<&EndMap> = Vec::with_capacity(cut.vertices.len());
        let mut degs = Vec::with_capacity(cut.vertices.len());
        let mut missing = false;
        for v in 0..cut.vertices.len() {
            if v == lone {
                images[v] = single_idx;
                maps.push(sv);
                degs.push(single.deg);
            } else {
                let j = others.iter().position(|&o| o == v).unwrap();
                let fi = perm[j];
                images[v] = f_idx(fi);
                match fs[fi].get(cut.vertices[v].dec.dec) {
                    Some(m) => maps.push(m),
                    None => missing = true,
                }
                degs.push(fs[fi].deg);
            }
        }
        if missing {
            continue;
        }
        let sign = Q::sign(koszul_sign(&images, &arg_degs));
        let m = eval_graph(cut, &maps, &degs, spaces);
        if first {
            out = EndMap { entries: BTreeMap::new(), ..m.clone() };
            first = false;
        }
        out.add_scaled(&m, sign);
    }
    out
}

fn lone_vertex(cut: &crate::coproperad::Cut, level: u8) -> usize {
    cut.vertices.iter().position(|v| v.dec.level == level && v.dec.dec != CDec::Id).expect("lone atom")
}

/// `U_{n+1}(sβ, f_1, …, f_n)`: `β` on the single bottom atom, the `f_i` on
/// the `n` top vertices in every order.
pub fn op_u(c: &Coproperad, beta: &ConvMap, fs: &[&ConvMap], spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    if fs.is_empty() {
        return Err(LError::Mismatch("U needs at least one map".into()));
    }
    check_colors(fs.iter().all(|f| f.tgt == beta.src && f.src == fs[0].src), "U: colors")?;
    let n = fs.len();
    let deg = beta.deg + fs.iter().map(|f| f.deg).sum::<i32>();
    let mut out = ConvMap::zero(deg, fs[0].src, beta.tgt);
    for d in all_decs(c) {
        for (cut, mu) in c.delta_left(n, d).iter() {
            let m = lone_operation(cut, lone_vertex(cut, 0), beta, fs, true, spaces);
            out.add_at(d, &m, *mu);
        }
    }
    Ok(out)
}

/// `D_{n+1}(f_1, …, f_n, sα)`: `α` on the single top atom, the `f_i` on the
/// `n` bottom vertices in every order; the suspension of `α` passes the `f_i`.
pub fn op_d(c: &Coproperad, fs: &[&ConvMap], alpha: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    if fs.is_empty() {
        return Err(LError::Mismatch("D needs at least one map".into()));
    }
    check_colors(fs.iter().all(|f| f.src == alpha.tgt && f.tgt == fs[0].tgt), "D: colors")?;
    let n = fs.len();
    let fdeg: i32 = fs.iter().map(|f| f.deg).sum();
    let mut out = ConvMap::zero(alpha.deg + fdeg, alpha.src, fs[0].tgt);
    for d in all_decs(c) {
        for (cut, mu) in c.delta_right(n, d).iter() {
            let m = lone_operation(cut, lone_vertex(cut, 1), alpha, fs, false, spaces);
            out.add_at(d, &m, *mu * parity(fdeg as i64));
        }
    }
    Ok(out)
}

/// Basis of `Hom(C, End^X_Y)` (identity included) or of `Hom(C̄, End^X_Y)`.
fn map_basis(c: &Coproperad, spaces: &[ChainComplex], src: usize, tgt: usize, with_id: bool) -> Vec<(CDec, Tuple, Tuple, i32)> {
    let mut out = Vec::new();
    for d in all_decs(c).filter(|d| with_id || *d != CDec::Id) {
        let v = c.vertex(d);
        for (i, o, deg) in EndMap::basis(v.outputs, v.inputs, &spaces[src], &spaces[tgt]) {
            out.push((d, i, o, deg - v.deg));
        }
    }
    out
}

/// `𝔥_{α,β} = Hom(C, End^A_B)` with `ℓ_1 = D₂(−, sα) − U₂(sβ, −) − ∂` and
/// `ℓ_n = D_{n+1}(−, …, sα) − U_{n+1}(sβ, −, …)`.
pub struct HAlgebra {
    pub c: Coproperad,
    pub spaces: Vec<ChainComplex>,
    pub src: usize,
    pub tgt: usize,
    pub alpha: ConvMap,
    pub beta: ConvMap,
    pub basis: Vec<(CDec, Tuple, Tuple, i32)>,
    index: HashMap<(CDec, Tuple, Tuple), usize>,
    max_arity: usize,
}

impl HAlgebra {
    /// `α` and `β` are checked to be gebra structures.
    pub fn new(c: &Coproperad, spaces: Vec<ChainComplex>, src: usize, tgt: usize, alpha: ConvMap, beta: ConvMap) -> Result<Self, LError> {
        if alpha.src != src || alpha.tgt != src || beta.src != tgt || beta.tgt != tgt {
            return Err(LError::Mismatch("structure colors".into()));
        }
        for m in [&alpha, &beta] {
            if !gebra_residual(c, m, &spaces)?.is_zero() {
                return Err(LError::NotMc);
            }
        }
        let basis = map_basis(c, &spaces, src, tgt, true);
        let index = basis.iter().enumerate().map(|(i, (d, a, b, _))| ((*d, a.clone(), b.clone()), i)).collect();
        let max_arity = (0..c.dim())
            .flat_map(|a| c.delta(CDec::Atom(a)).keys().map(|g| g.vertices.len()).collect::<Vec<_>>())
            .max()
            .unwrap_or(2)
            .max(2)
            - 1;
        Ok(HAlgebra { c: c.clone(), spaces, src, tgt, alpha, beta, basis, index, max_arity })
    }

    pub fn to_map(&self, x: &Vector, deg: i32) -> ConvMap {
        let mut m = ConvMap::zero(deg, self.src, self.tgt);
        for (i, q) in x.iter() {
            let (d, inp, out, _) = &self.basis[*i];
            let v = self.c.vertex(*d);
            let mut e = EndMap::zero(v.outputs, v.inputs, self.src, self.tgt, deg + v.deg);
            e.add_entry(inp.clone(), out.clone(), *q);
            m.add_at(*d, &e, Q::one());
        }
        m
    }

    pub fn to_vector(&self, m: &ConvMap) -> Vector {
        let mut x = Lin::new();
        for (d, e) in &m.values {
            for ((i, o), q) in &e.entries {
                x.add_term(self.index[&(*d, i.clone(), o.clone())], *q);
            }
        }
        x
    }
}

impl LInfinity for HAlgebra {
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn degree(&self, i: usize) -> i32 {
        self.basis[i].3
    }
    fn label(&self, i: usize) -> String {
        let (d, a, b, _) = &self.basis[i];
        let word = |t: &Tuple| t.iter().map(|x| x.to_string()).collect::<String>();
        format!("{}[{}→{}]", self.c.label(*d), word(a), word(b))
    }
    fn level(&self, i: usize) -> usize {
        self.c.density_level(self.basis[i].0)
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn bracket(&self, args: &[Arg]) -> Result<Vector, LError> {
        let maps: Vec<ConvMap> = args.iter().map(|a| self.to_map(a.x, a.deg)).collect();
        let fs: Vec<&ConvMap> = args.iter().zip(&maps).flat_map(|(a, m)| std::iter::repeat_n(m, a.mult)).collect();
        if fs.is_empty() {
            return Ok(Lin::new());
        }
        let mut out = op_d(&self.c, &fs, &self.alpha, &self.spaces)?;
        out.add_scaled(&op_u(&self.c, &self.beta, &fs, &self.spaces)?, -Q::one());
        if fs.len() == 1 {
            out.add_scaled(&conv_differential(&self.c, fs[0], &self.spaces), -Q::one());
        }
        Ok(self.to_vector(&out))
    }
}

/// `𝔥_{α,β}` as the middle summand of `𝔨` twisted by `(sα, 0, sβ)`.
pub fn build_h_twisted(k: Arc<ConvAlgebra>, alpha: &ConvMap, beta: &ConvMap) -> Result<Restricted, LError> {
    let a = k_element(&k, Some(alpha), None, Some(beta));
    let keep = k.indices_where(|g| matches!(g, GenKind::Arrow(_)));
    let tw = Twisted::new(k, a)?;
    Ok(Restricted::new(Arc::new(tw), keep))
}

/// Precomposition with a coproperad morphism `G : D → C`, on every summand
/// of a convolution algebra built from the same construction.
pub fn restrict_along(
    g: &CoproperadMorphism,
    big: &Coproperad,
    from: &ConvAlgebra,
    to: &ConvAlgebra,
    x: &Vector,
    deg: i32,
) -> Vector {
    let mut out = Lin::new();
    for (gi, gen) in to.prop.gens.iter().enumerate() {
        let image: Lin<(GenKind, crate::coproperad::CGraph)> = match gen.kind {
            GenKind::Shifted { copy, atom } => g
                .image(CDec::Atom(atom), big)
                .iter()
                .map(|(h, q)| {
                    let CDec::Atom(b) = h.vertices[0].dec else { unreachable!("atoms map to atoms") };
                    ((GenKind::Shifted { copy, atom: b }, h.clone()), *q)
                })
                .collect(),
            GenKind::Arrow(CDec::Atom(a)) => g
                .image(CDec::Atom(a), big)
                .iter()
                .map(|(h, q)| ((GenKind::Arrow(h.vertices[0].dec), h.clone()), *q))
                .collect(),
            GenKind::Arrow(CDec::Id) => {
                let h = big.element(CDec::Id);
                Lin::single((GenKind::Arrow(CDec::Id), h), Q::one())
            }
            GenKind::Unit => Lin::new(),
        };
        let mut m = EndMap::zero(gen.outputs, gen.inputs, gen.in_color as usize, gen.out_color as usize, deg + gen.degree);
        for ((kind, h), q) in image.iter() {
            let Some(src_gen) = from.prop.find(*kind) else { continue };
            let v = from.value(x, deg, src_gen);
            if v.is_zero() {
                continue;
            }
            let h = h.map_decorations(|_| 0usize);
            m.add_scaled(&compose_in_end(&h, &[&v], &from.spaces), *q);
        }
        if !m.is_zero() {
            out.add_scaled(&to.from_value(gi, &m), Q::one());
        }
    }
    out
}

/// `𝔨̄^f`: `𝔨` twisted by `(0, f₀, 0)`, restricted to the summands on `C̄`.
pub fn kbar_f(k: Arc<ConvAlgebra>, f0: &EndMap) -> Result<Restricted, LError> {
    let a = k.embed(&ConvMap::linear(f0.clone()), |d| Summand::Mid.kind(d));
    let keep = k.indices_where(|g| !matches!(g, GenKind::Arrow(CDec::Id)));
    let tw = Twisted::new(k, a).map_err(|e| match e {
        LError::NotMc => LError::Mismatch("f₀ is not a chain map".into()),
        e => e,
    })?;
    Ok(Restricted::new(Arc::new(tw), keep))
}

/// `Π_B` on `𝔨̄^f`: the coordinates on the `sHom(C̄, End_B)` summand, as an
/// element of `s𝔤_{C,B}`.
pub fn project_b(kbar: &Restricted, k: &ConvAlgebra, g_b: &ConvAlgebra, x: &Vector) -> Vector {
    let mut out = Lin::new();
    for (i, q) in x.iter() {
        let b = &k.basis[kbar.keep[*i]];
        if let GenKind::Shifted { copy: 1, atom } = k.prop.gens[b.gen].kind {
            let g = g_b.prop.find(GenKind::Shifted { copy: 0, atom }).expect("atom");
            out.add_term(g_b.basis_index(g, &b.inp, &b.out).expect("same words"), *q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coproperad::tests::gen;
    use crate::graphs::Reduced;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binary(w: usize) -> Coproperad {
        Coproperad::cofree(&[gen("x", 1, 2, 1)], w, (1, w + 1), Reduced::Both).unwrap()
    }

    fn pair(w: usize) -> Coproperad {
        Coproperad::cofree(&[gen("x", 1, 2, 1), gen("y", 2, 1, 1)], w, (2, 2), Reduced::Both).unwrap()
    }

    fn dual_numbers() -> ChainComplex {
        ChainComplex::new(vec![0, 1], vec![vec![], vec![(0, Q::one())]]).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn random_map(c: &Coproperad, spaces: &[ChainComplex], src: usize, tgt: usize, deg: i32, with_id: bool, r: &mut ChaCha8Rng) -> ConvMap {
        let mut m = ConvMap::zero(deg, src, tgt);
        for (d, i, o, e) in map_basis(c, spaces, src, tgt, with_id) {
            if e == deg {
                let v = c.vertex(d);
                let mut x = EndMap::zero(v.outputs, v.inputs, src, tgt, deg + v.deg);
                x.add_entry(i, o, Q::int(r.random_range(-2i64..=2)));
                m.add_at(d, &x, Q::one());
            }
        }
        m
    }

    #[test]
    fn trivial_coproperad_gives_chain_maps() {
        let c = Coproperad::trivial();
        let a = dual_numbers();
        let k = build_k(&c, &a, &a);
        assert_eq!(k.dim(), 4);
        let id = ConvMap::identity(0, &a);
        let mut idab = id.clone();
        idab.tgt = 1;
        idab.values.get_mut(&CDec::Id).unwrap().tgt = 1;
        let x = k_element(&k, None, Some(&idab), None);
        assert!(is_mc(&k, &x).unwrap());
        assert_eq!(k.max_arity(), 1);
    }

    #[test]
    fn jacobi_on_k_binary() {
        let c = binary(2);
        let a = dual_numbers();
        let k = build_k(&c, &a, &a);
        let mut r = rng();
        let degs = degrees(&k);
        for n in 1..=3 {
            for _ in 0..4 {
                let xs: Vec<(Vector, i32)> = (0..n)
                    .map(|_| {
                        let d = degs[r.random_range(0..degs.len())];
                        (random_element(&k, d, &mut r), d)
                    })
                    .collect();
                let refs: Vec<(&Vector, i32)> = xs.iter().map(|(x, d)| (x, *d)).collect();
                let j = jacobi_residual(&k, &refs).unwrap();
                assert!(j.is_zero(), "arity {n}: {j:?}");
            }
        }
    }

    #[test]
    fn bracket_is_symmetric() {
        let c = pair(2);
        let a = dual_numbers();
        let k = build_k(&c, &a, &a);
        let mut r = rng();
        let degs = degrees(&k);
        for _ in 0..6 {
            let (d1, d2) = (degs[r.random_range(0..degs.len())], degs[r.random_range(0..degs.len())]);
            let (x, y) = (random_element(&k, d1, &mut r), random_element(&k, d2, &mut r));
            let xy = ell(&k, &[(&x, d1), (&y, d2)]).unwrap();
            let yx = ell(&k, &[(&y, d2), (&x, d1)]).unwrap();
            assert_eq!(xy, yx.scaled(parity((d1 * d2) as i64)), "{d1} {d2}");
        }
    }

    #[test]
    fn shifted_bracket_matches_generic() {
        let c = binary(3);
        let a = dual_numbers();
        let spaces = vec![a.clone()];
        let g = build_g(&c, &a);
        let mut r = rng();
        for (p, q) in [(-1, -1), (-1, 0), (0, -2), (-2, 1)] {
            let f = random_map(&c, &spaces, 0, 0, p, false, &mut r);
            let h = random_map(&c, &spaces, 0, 0, q, false, &mut r);
            let xf = g.embed(&f, |d| Summand::A.kind(d));
            let xh = g.embed(&h, |d| Summand::A.kind(d));
            let generic = ell(&g, &[(&xf, p + 1), (&xh, q + 1)]).unwrap();
            let direct = shifted_bracket(&c, &f, &h, &spaces).unwrap();
            assert_eq!(generic, g.embed(&direct, |d| Summand::A.kind(d)), "degrees {p} {q}");
        }
    }

    #[test]
    fn mc_residual_splits_into_gebra_and_infinity_parts() {
        let c = binary(2);
        let a = dual_numbers();
        let spaces = vec![a.clone(), a.clone()];
        let k = build_k(&c, &a, &a);
        let mut r = rng();
        for _ in 0..3 {
            let al = random_map(&c, &spaces, 0, 0, -1, false, &mut r);
            let f = random_map(&c, &spaces, 0, 1, 0, true, &mut r);
            let be = random_map(&c, &spaces, 1, 1, -1, false, &mut r);
            let x = k_element(&k, Some(&al), Some(&f), Some(&be));
            let res = mc_residual(&k, &x).unwrap();
            let (ra, rf, rb) = k_split(&k, &res, -1);
            assert_eq!(ra, gebra_residual(&c, &al, &spaces).unwrap().scaled(-Q::one()));
            assert_eq!(rb, gebra_residual(&c, &be, &spaces).unwrap().scaled(-Q::one()));
            assert_eq!(rf.deg, -1);
        }
    }

    #[test]
    fn u_and_d_match_generic_brackets() {
        let c = pair(2);
        let a = dual_numbers();
        let spaces = vec![a.clone(), a.clone()];
        let k = build_k(&c, &a, &a);
        let mut r = rng();
        for n in 1..=2 {
            let al = random_map(&c, &spaces, 0, 0, -1, false, &mut r);
            let be = random_map(&c, &spaces, 1, 1, -1, false, &mut r);
            let fs: Vec<ConvMap> = (0..n).map(|i| random_map(&c, &spaces, 0, 1, i - 1, true, &mut r)).collect();
            let xf: Vec<Vector> = fs.iter().map(|f| k_element(&k, None, Some(f), None)).collect();
            let xa = k_element(&k, Some(&al), None, None);
            let xb = k_element(&k, None, None, Some(&be));
            let fr: Vec<&ConvMap> = fs.iter().collect();
            let mut args: Vec<(&Vector, i32)> = vec![(&xb, 0)];
            args.extend(xf.iter().zip(&fs).map(|(x, f)| (x, f.deg)));
            let u = op_u(&c, &be, &fr, &spaces).unwrap();
            assert_eq!(ell(&k, &args).unwrap(), k_element(&k, None, Some(&u.scaled(-Q::one())), None), "U at {n}");
            let mut args: Vec<(&Vector, i32)> = xf.iter().zip(&fs).map(|(x, f)| (x, f.deg)).collect();
            args.push((&xa, 0));
            let d = op_d(&c, &fr, &al, &spaces).unwrap();
            assert_eq!(ell(&k, &args).unwrap(), k_element(&k, None, Some(&d), None), "D at {n}");
        }
    }

    #[test]
    fn levels_are_additive() {
        let c = binary(3);
        let a = dual_numbers();
        let k = build_k(&c, &a, &a);
        let mut r = rng();
        let degs = degrees(&k);
        for _ in 0..6 {
            let (d1, d2) = (degs[r.random_range(0..degs.len())], degs[r.random_range(0..degs.len())]);
            let (x, y) = (random_element(&k, d1, &mut r), random_element(&k, d2, &mut r));
            let b = ell(&k, &[(&x, d1), (&y, d2)]).unwrap();
            assert!(level_of(&k, &b) >= level_of(&k, &x).saturating_add(level_of(&k, &y)));
        }
    }

    #[test]
    fn zero_twist_changes_nothing() {
        let c = binary(2);
        let a = dual_numbers();
        let k: Shared = Arc::new(build_k(&c, &a, &a));
        let t = Twisted::new(k.clone(), Lin::new()).unwrap();
        let mut r = rng();
        let x = random_element(k.as_ref(), 0, &mut r);
        let y = random_element(k.as_ref(), -1, &mut r);
        assert_eq!(ell(&t, &[(&x, 0), (&y, -1)]).unwrap(), ell(k.as_ref(), &[(&x, 0), (&y, -1)]).unwrap());
    }

    #[test]
    fn direct_sum_mixed_brackets_vanish() {
        let c = binary(2);
        let a = dual_numbers();
        let k: Shared = Arc::new(build_g(&c, &a));
        let s = DirectSum::new(vec![k.clone(), k.clone()]);
        let mut r = rng();
        let x = s.inject(0, &random_element(k.as_ref(), 0, &mut r));
        let y = s.inject(1, &random_element(k.as_ref(), 0, &mut r));
        assert!(ell(&s, &[(&x, 0), (&y, 0)]).unwrap().is_zero());
    }
}
