//! ∞-morphisms of gebras over a cobar construction, and the calculus of
//! curved ∞-morphisms between curved shifted L∞-algebras: composition,
//! sums, Maurer-Cartan images, and the enrichment maps.

use crate::convolution::{
    conv_differential, eval_graph, gebra_residual, level_of, op_d, op_u, ConvMap, DirectSum, HAlgebra, LError,
    Shared, Zero,
};
use crate::coproperad::{CDec, Coproperad, Cut};
use crate::exactlin::{koszul_sign, ChainComplex, Lin, Matrix, Permutation, Vector, Q};
use crate::sbimod::{tuples, EndMap};
use std::collections::BTreeMap;
use std::sync::Arc;

fn all_decs(c: &Coproperad) -> Vec<CDec> {
    std::iter::once(CDec::Id).chain((0..c.dim()).map(CDec::Atom)).collect()
}

/// Maps on the vertices of a cut chosen by level, composed.
fn eval_cut(cut: &Cut, bottom: &ConvMap, top: &ConvMap, spaces: &[ChainComplex]) -> Option<EndMap> {
    let mut maps = Vec::with_capacity(cut.vertices.len());
    let mut degs = Vec::with_capacity(cut.vertices.len());
    for v in &cut.vertices {
        let m = if v.dec.level == 0 { bottom } else { top };
        maps.push(m.get(v.dec.dec)?);
        degs.push(m.deg);
    }
    Some(eval_graph(cut, &maps, &degs, spaces))
}

fn max_cut(c: &Coproperad) -> usize {
    all_decs(c).iter().flat_map(|&d| c.delta(d).keys().map(|g| g.vertices.len()).collect::<Vec<_>>()).max().unwrap_or(1)
}

/// `f ▷ α`: `α` on the single top atom, `f` on every vertex below it.
pub fn act_right(c: &Coproperad, f: &ConvMap, alpha: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    let mut out = ConvMap::zero(f.deg + alpha.deg, alpha.src, f.tgt);
    for n in 1..max_cut(c) {
        out.add_scaled(&op_d(c, &vec![f; n], alpha, spaces)?, Q::inv_factorial(n));
    }
    Ok(out)
}

/// `β ◁ f`: `β` on the single bottom atom, `f` on every vertex above it.
pub fn act_left(c: &Coproperad, beta: &ConvMap, f: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    let mut out = ConvMap::zero(f.deg + beta.deg, f.src, beta.tgt);
    for n in 1..max_cut(c) {
        out.add_scaled(&op_u(c, beta, &vec![f; n], spaces)?, Q::inv_factorial(n));
    }
    Ok(out)
}

/// `∂f − f ▷ α + β ◁ f`, zero iff `f` is an ∞-morphism `(A, α) ⇝ (B, β)`.
pub fn infty_residual(c: &Coproperad, f: &ConvMap, alpha: &ConvMap, beta: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    if f.deg != 0 {
        return Err(LError::Degree { expected: 0, found: f.deg });
    }
    if alpha.tgt != f.src || beta.src != f.tgt {
        return Err(LError::Mismatch("endpoints of the ∞-morphism".into()));
    }
    let mut r = conv_differential(c, f, spaces);
    r.add_scaled(&act_right(c, f, alpha, spaces)?, -Q::one());
    r.add_scaled(&act_left(c, beta, f, spaces)?, Q::one());
    Ok(r)
}

/// `g ⊚ f`: over every cut, `g` on the bottom level and `f` on the top.
pub fn compose_gebra(c: &Coproperad, g: &ConvMap, f: &ConvMap, spaces: &[ChainComplex]) -> Result<ConvMap, LError> {
    if f.tgt != g.src {
        return Err(LError::Mismatch("g ⊚ f needs target(f) = source(g)".into()));
    }
    let mut out = ConvMap::zero(f.deg + g.deg, f.src, g.tgt);
    for d in all_decs(c) {
        for (cut, mu) in c.delta(d).iter() {
            if let Some(m) = eval_cut(cut, g, f, spaces) {
                out.add_at(d, &m, *mu);
            }
        }
    }
    Ok(out)
}

/// The strict ∞-morphism with first component `f0`.
pub fn strict(f0: EndMap) -> ConvMap {
    ConvMap::linear(f0)
}

pub fn first_component(f: &ConvMap) -> EndMap {
    f.get(CDec::Id).cloned().unwrap_or_else(|| EndMap::zero(1, 1, f.src, f.tgt, f.deg))
}

/// Matrix of a degree-0 linear map `X → Y` (rows indexed by `Y`).
pub fn linear_matrix(m: &EndMap, spaces: &[ChainComplex]) -> Matrix {
    let (x, y) = (&spaces[m.src], &spaces[m.tgt]);
    let mut mat = Matrix::zeros(y.dim(), x.dim());
    for ((i, o), c) in &m.entries {
        mat.add_at(o[0] as usize, i[0] as usize, *c);
    }
    mat
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Class {
    Isotopy,
    QuasiIso,
    Mono,
    Epi,
    Generic,
}

/// Every class the first component puts `f` in; `Generic` alone if none.
pub fn classify(f: &ConvMap, spaces: &[ChainComplex]) -> Vec<Class> {
    let f0 = first_component(f);
    let (x, y) = (&spaces[f.src], &spaces[f.tgt]);
    let mat = linear_matrix(&f0, spaces);
    let rank = mat.rank();
    let mut out = Vec::new();
    if x == y && f0.entries == EndMap::identity(f.src, x).entries {
        out.push(Class::Isotopy);
    }
    if mapping_cone(&f0, spaces).homology_ranks().values().all(|&r| r == 0) {
        out.push(Class::QuasiIso);
    }
    if rank == x.dim() {
        out.push(Class::Mono);
    }
    if rank == y.dim() {
        out.push(Class::Epi);
    }
    if out.is_empty() {
        out.push(Class::Generic);
    }
    out
}

/// `Cone(f)_n = X_{n−1} ⊕ Y_n`, `d(x, y) = (−dx, f x + dy)`; acyclic iff
/// `f` is a quasi-isomorphism.
pub fn mapping_cone(f0: &EndMap, spaces: &[ChainComplex]) -> ChainComplex {
    let (x, y) = (&spaces[f0.src], &spaces[f0.tgt]);
    let nx = x.dim();
    let mut degrees: Vec<i32> = x.degrees.iter().map(|d| d + 1).collect();
    degrees.extend(&y.degrees);
    let mut diff: Vec<Vec<(usize, Q)>> = x.diff.iter().map(|t| t.iter().map(|&(j, c)| (j, -c)).collect()).collect();
    for (i, t) in diff.iter_mut().enumerate() {
        for (o, c) in f0.apply(&[i as u8]) {
            t.push((nx + o[0] as usize, c));
        }
    }
    diff.extend(y.diff.iter().map(|t| t.iter().map(|&(j, c)| (nx + j, c)).collect::<Vec<_>>()));
    ChainComplex::new(degrees, diff).expect("cone of a chain map")
}

/// Some `X` of the given shape with `∂X = target`.
pub fn solve_boundary(target: &EndMap, spaces: &[ChainComplex]) -> Option<EndMap> {
    let (sx, sy) = (&spaces[target.src], &spaces[target.tgt]);
    let deg = target.deg + 1;
    let cols: Vec<(Vec<u8>, Vec<u8>)> = EndMap::basis(target.outputs, target.inputs, sx, sy)
        .into_iter()
        .filter(|b| b.2 == deg)
        .map(|(i, o, _)| (i, o))
        .collect();
    let rows: Vec<(Vec<u8>, Vec<u8>)> = EndMap::basis(target.outputs, target.inputs, sx, sy)
        .into_iter()
        .filter(|b| b.2 == target.deg)
        .map(|(i, o, _)| (i, o))
        .collect();
    let row_of: BTreeMap<&(Vec<u8>, Vec<u8>), usize> = rows.iter().enumerate().map(|(r, k)| (k, r)).collect();
    let mut mat = Matrix::zeros(rows.len(), cols.len());
    for (j, (i, o)) in cols.iter().enumerate() {
        let mut e = EndMap::zero(target.outputs, target.inputs, target.src, target.tgt, deg);
        e.add_entry(i.clone(), o.clone(), Q::one());
        for (k, c) in &e.differential(spaces).entries {
            mat.add_at(row_of[k], j, *c);
        }
    }
    let b: Vec<Q> = rows.iter().map(|k| target.entries.get(k).copied().unwrap_or_default()).collect();
    let x = mat.solve(&b)?;
    let mut out = EndMap::zero(target.outputs, target.inputs, target.src, target.tgt, deg);
    for (j, (i, o)) in cols.iter().enumerate() {
        out.add_entry(i.clone(), o.clone(), x[j]);
    }
    Some(out)
}

fn by_weight(c: &Coproperad) -> Vec<CDec> {
    let mut decs: Vec<CDec> = (0..c.dim()).map(CDec::Atom).collect();
    decs.sort_by_key(|&d| (c.weight(d), d));
    decs
}

/// Extend the values of `seed` on primitives to a gebra structure, one
/// weight at a time.
pub fn solve_gebra(c: &Coproperad, spaces: &[ChainComplex], seed: &ConvMap) -> Result<ConvMap, LError> {
    let mut alpha = seed.clone();
    for d in by_weight(c) {
        let r = gebra_residual(c, &alpha, spaces)?;
        let Some(rd) = r.get(d) else { continue };
        let x = solve_boundary(&rd.scaled(-Q::one()), spaces).ok_or_else(|| LError::Mismatch(format!("obstruction at {}", c.label(d))))?;
        alpha.add_at(d, &x, Q::one());
    }
    if !gebra_residual(c, &alpha, spaces)?.is_zero() {
        return Err(LError::NotMc);
    }
    Ok(alpha)
}

/// Extend `seed` (a chain map on the identity, optionally more) to an
/// ∞-morphism `(A, α) ⇝ (B, β)`, one weight at a time.
pub fn solve_morphism(c: &Coproperad, spaces: &[ChainComplex], alpha: &ConvMap, beta: &ConvMap, seed: &ConvMap) -> Result<ConvMap, LError> {
    let mut f = seed.clone();
    for d in std::iter::once(CDec::Id).chain(by_weight(c)) {
        let r = infty_residual(c, &f, alpha, beta, spaces)?;
        let Some(rd) = r.get(d) else { continue };
        let x = solve_boundary(&rd.scaled(-Q::one()), spaces).ok_or_else(|| LError::Mismatch(format!("obstruction at {}", c.label(d))))?;
        f.add_at(d, &x, Q::one());
    }
    if !infty_residual(c, &f, alpha, beta, spaces)?.is_zero() {
        return Err(LError::NotMc);
    }
    Ok(f)
}

/// A curved ∞-morphism, given by its components `Φ_n`.
pub trait CurvedMorphism: Send + Sync {
    fn source(&self) -> &Shared;
    fn target(&self) -> &Shared;
    /// components of larger arity vanish
    fn max_arity(&self) -> usize;
    /// `Φ_n(x_1, …, x_n)`; `n = 0` gives `Φ_0(1)`
    fn component(&self, xs: &[(&Vector, i32)]) -> Result<Vector, LError>;
}

pub type SharedMor = Arc<dyn CurvedMorphism>;

/// Set partitions of `0..n` into nonempty blocks, blocks ordered by least element.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for p in out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p;
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// `Σ_k Σ_{i_1+…+i_k=n} Σ_σ ψ_k ∘ (Φ_{i_1}, …, Φ_{i_k})^σ`, with empty
/// blocks carrying `Φ_0(1)`; `psi(args)` evaluates the outer `k`-ary map.
fn partition_sum(
    inner: &dyn CurvedMorphism,
    xs: &[(&Vector, i32)],
    outer_arity: usize,
    psi: &dyn Fn(&[(&Vector, i32)]) -> Result<Vector, LError>,
) -> Result<Vector, LError> {
    let n = xs.len();
    let degs: Vec<i32> = xs.iter().map(|x| x.1).collect();
    let phi0 = inner.component(&[])?;
    let mut out = Lin::new();
    for p in set_partitions(n) {
        let m = p.len();
        if m > outer_arity {
            continue;
        }
        let images: Vec<usize> = p.iter().flatten().copied().collect();
        let sign = Q::sign(koszul_sign(&images, &degs));
        let mut vals = Vec::with_capacity(m);
        let mut zero = false;
        for b in &p {
            let args: Vec<(&Vector, i32)> = b.iter().map(|&i| xs[i]).collect();
            let v = inner.component(&args)?;
            zero |= v.is_zero();
            vals.push((v, b.iter().map(|&i| degs[i]).sum::<i32>()));
        }
        if zero {
            continue;
        }
        for e in 0..=outer_arity - m {
            if e > 0 && phi0.is_zero() {
                break;
            }
            let mut args: Vec<(&Vector, i32)> = vals.iter().map(|(v, d)| (v, *d)).collect();
            args.extend(std::iter::repeat_n((&phi0, 0), e));
            if args.is_empty() {
                continue;
            }
            out.add_scaled(&psi(&args)?, sign * Q::inv_factorial(e));
        }
    }
    Ok(out)
}

/// Left side minus right side of the ∞-morphism equation at `xs`.
pub fn curved_residual(phi: &dyn CurvedMorphism, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
    let (src, tgt) = (phi.source().clone(), phi.target().clone());
    let n = xs.len();
    let degs: Vec<i32> = xs.iter().map(|x| x.1).collect();
    let mut out = Lin::new();
    for q in 0..=n {
        for s in crate::exactlin::subsets(n, q) {
            let rest: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
            let images: Vec<usize> = s.iter().chain(&rest).copied().collect();
            let sign = Q::sign(koszul_sign(&images, &degs));
            let inner_args: Vec<(&Vector, i32)> = s.iter().map(|&i| xs[i]).collect();
            let inner = crate::convolution::ell(src.as_ref(), &inner_args)?;
            if inner.is_zero() {
                continue;
            }
            let d = s.iter().map(|&i| degs[i]).sum::<i32>() - 1;
            let mut args = vec![(&inner, d)];
            args.extend(rest.iter().map(|&i| xs[i]));
            if args.len() <= phi.max_arity() {
                out.add_scaled(&phi.component(&args)?, sign);
            }
        }
    }
    let rhs = partition_sum(phi, xs, tgt.max_arity(), &|args| crate::convolution::ell(tgt.as_ref(), args))?;
    let rhs0 = if n == 0 { tgt.curvature() } else { Lin::new() };
    out.add_scaled(&rhs, -Q::one());
    out.add_scaled(&rhs0, -Q::one());
    Ok(out)
}

/// `Σ_n 1/n! Φ_n(a, …, a)`.
pub fn mc_image(phi: &dyn CurvedMorphism, a: &Vector) -> Result<Vector, LError> {
    let mut out = phi.component(&[])?;
    if a.is_zero() {
        return Ok(out);
    }
    for n in 1..=phi.max_arity() {
        let args = vec![(a, 0); n];
        out.add_scaled(&phi.component(&args)?, Q::inv_factorial(n));
    }
    Ok(out)
}

/// Whether `Φ_n(xs)` has level at least the sum of the levels of `xs`.
pub fn is_continuous_at(phi: &dyn CurvedMorphism, xs: &[(&Vector, i32)]) -> Result<bool, LError> {
    let v = phi.component(xs)?;
    let need = xs.iter().map(|(x, _)| level_of(phi.source().as_ref(), x)).fold(0usize, |a, b| a.saturating_add(b));
    Ok(v.is_zero() || level_of(phi.target().as_ref(), &v) >= need.max(1))
}

pub struct Identity {
    pub alg: Shared,
}

impl CurvedMorphism for Identity {
    fn source(&self) -> &Shared {
        &self.alg
    }
    fn target(&self) -> &Shared {
        &self.alg
    }
    fn max_arity(&self) -> usize {
        1
    }
    fn component(&self, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
        Ok(if xs.len() == 1 { xs[0].0.clone() } else { Lin::new() })
    }
}

/// A strict morphism: `Φ_1` a linear map, everything else zero.
pub struct Strict {
    pub source: Shared,
    pub target: Shared,
    pub map: Box<dyn Fn(&Vector, i32) -> Vector + Send + Sync>,
}

impl CurvedMorphism for Strict {
    fn source(&self) -> &Shared {
        &self.source
    }
    fn target(&self) -> &Shared {
        &self.target
    }
    fn max_arity(&self) -> usize {
        1
    }
    fn component(&self, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
        Ok(if xs.len() == 1 { (self.map)(xs[0].0, xs[0].1) } else { Lin::new() })
    }
}

/// Components given by a table `Φ_0(1)` plus linear `Φ_1`, e.g. `Υ^α`, `Ξ^f`.
pub struct Affine {
    pub source: Shared,
    pub target: Shared,
    pub constant: Vector,
    pub linear: Box<dyn Fn(&Vector, i32) -> Vector + Send + Sync>,
}

impl CurvedMorphism for Affine {
    fn source(&self) -> &Shared {
        &self.source
    }
    fn target(&self) -> &Shared {
        &self.target
    }
    fn max_arity(&self) -> usize {
        1
    }
    fn component(&self, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
        Ok(match xs.len() {
            0 => self.constant.clone(),
            1 => (self.linear)(xs[0].0, xs[0].1),
            _ => Lin::new(),
        })
    }
}

/// `Ψ ⊚ Φ`
pub struct Composite {
    pub outer: SharedMor,
    pub inner: SharedMor,
}

impl Composite {
    pub fn new(outer: SharedMor, inner: SharedMor) -> Result<Self, LError> {
        if outer.source().dim() != inner.target().dim() {
            return Err(LError::Mismatch("composite endpoints".into()));
        }
        Ok(Composite { outer, inner })
    }
}

impl CurvedMorphism for Composite {
    fn source(&self) -> &Shared {
        self.inner.source()
    }
    fn target(&self) -> &Shared {
        self.outer.target()
    }
    fn max_arity(&self) -> usize {
        self.outer.max_arity() * self.inner.max_arity().max(1)
    }
    fn component(&self, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
        let outer = self.outer.clone();
        partition_sum(self.inner.as_ref(), xs, outer.max_arity(), &|args| {
            if args.len() > outer.max_arity() {
                Ok(Lin::new())
            } else {
                outer.component(args)
            }
        })
    }
}

/// `Φ ⊕ Ψ : 𝔤 ⊕ 𝔤' ⇝ 𝔥 ⊕ 𝔥'`
pub struct SumMorphism {
    pub parts: Vec<SharedMor>,
    source: Shared,
    target: Shared,
    src_sum: Arc<DirectSum>,
    tgt_sum: Arc<DirectSum>,
}

impl SumMorphism {
    pub fn new(parts: Vec<SharedMor>) -> Self {
        let src_sum = Arc::new(DirectSum::new(parts.iter().map(|p| p.source().clone()).collect()));
        let tgt_sum = Arc::new(DirectSum::new(parts.iter().map(|p| p.target().clone()).collect()));
        SumMorphism { parts, source: src_sum.clone(), target: tgt_sum.clone(), src_sum, tgt_sum }
    }
}

impl CurvedMorphism for SumMorphism {
    fn source(&self) -> &Shared {
        &self.source
    }
    fn target(&self) -> &Shared {
        &self.target
    }
    fn max_arity(&self) -> usize {
        self.parts.iter().map(|p| p.max_arity()).max().unwrap_or(0)
    }
    fn component(&self, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
        let mut out = Lin::new();
        for (p, phi) in self.parts.iter().enumerate() {
            let ys: Vec<Vector> = xs.iter().map(|(x, _)| self.src_sum.component(p, x)).collect();
            if xs.len() > phi.max_arity() || ys.iter().any(|y| y.is_zero()) {
                continue;
            }
            let args: Vec<(&Vector, i32)> = ys.iter().zip(xs).map(|(y, (_, d))| (y, *d)).collect();
            out.add_scaled(&self.tgt_sum.inject(p, &phi.component(&args)?), Q::one());
        }
        Ok(out)
    }
}

/// `Φ^{α,β,γ} : 𝔥_{β,γ} ⊕ 𝔥_{α,β} ⇝ 𝔥_{α,γ}`: over the cuts with `n`
/// vertices, the arguments' `𝔥_{β,γ}` parts on the bottom and their
/// `𝔥_{α,β}` parts on the top.
pub struct Enrichment {
    pub c: Coproperad,
    pub spaces: Vec<ChainComplex>,
    pub h_bg: Arc<HAlgebra>,
    pub h_ab: Arc<HAlgebra>,
    pub h_ag: Arc<HAlgebra>,
    sum: Arc<DirectSum>,
    source: Shared,
    target: Shared,
    max_arity: usize,
}

impl Enrichment {
    pub fn new(h_bg: Arc<HAlgebra>, h_ab: Arc<HAlgebra>, h_ag: Arc<HAlgebra>) -> Result<Self, LError> {
        if h_ab.tgt != h_bg.src || h_ag.src != h_ab.src || h_ag.tgt != h_bg.tgt {
            return Err(LError::Mismatch("enrichment endpoints".into()));
        }
        let c = h_ag.c.clone();
        let sum = Arc::new(DirectSum::new(vec![h_bg.clone() as Shared, h_ab.clone() as Shared]));
        let max_arity = max_cut(&c);
        Ok(Enrichment {
            c,
            spaces: h_ag.spaces.clone(),
            h_bg,
            h_ab,
            target: h_ag.clone(),
            h_ag,
            source: sum.clone(),
            sum,
            max_arity,
        })
    }

    pub fn sum(&self) -> &Arc<DirectSum> {
        &self.sum
    }

    /// The pair `(g, f)` as an element of the source.
    pub fn pair(&self, g: &ConvMap, f: &ConvMap) -> Vector {
        let mut x = self.sum.inject(0, &self.h_bg.to_vector(g));
        x.add_scaled(&self.sum.inject(1, &self.h_ab.to_vector(f)), Q::one());
        x
    }
}

impl CurvedMorphism for Enrichment {
    fn source(&self) -> &Shared {
        &self.source
    }
    fn target(&self) -> &Shared {
        &self.target
    }
    fn max_arity(&self) -> usize {
        self.max_arity
    }
    fn component(&self, xs: &[(&Vector, i32)]) -> Result<Vector, LError> {
        let n = xs.len();
        if n < 2 || n > self.max_arity {
            return Ok(Lin::new());
        }
        let gs: Vec<ConvMap> = xs.iter().map(|(x, d)| self.h_bg.to_map(&self.sum.component(0, x), *d)).collect();
        let fs: Vec<ConvMap> = xs.iter().map(|(x, d)| self.h_ab.to_map(&self.sum.component(1, x), *d)).collect();
        let degs: Vec<i32> = xs.iter().map(|x| x.1).collect();
        let deg: i32 = degs.iter().sum();
        let mut out = ConvMap::zero(deg, self.h_ag.src, self.h_ag.tgt);
        let perms = Permutation::all(n);
        for d in all_decs(&self.c) {
            for (cut, mu) in self.c.delta_twolevel(n, d).iter() {
                for p in &perms {
                    // vertex v receives argument p[v]
                    let images = p.images();
                    let mut maps = Vec::with_capacity(n);
                    let mut ok = true;
                    for (v, vx) in cut.vertices.iter().enumerate() {
                        let m = if vx.dec.level == 0 { &gs[images[v]] } else { &fs[images[v]] };
                        match m.get(vx.dec.dec) {
                            Some(e) => maps.push(e),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let vdegs: Vec<i32> = images.iter().map(|&i| degs[i]).collect();
                    let sign = Q::sign(koszul_sign(images, &degs));
                    out.add_at(d, &eval_graph(cut, &maps, &vdegs, &self.spaces), *mu * sign);
                }
            }
        }
        Ok(self.h_ag.to_vector(&out))
    }
}

/// `Υ^α : 0 ⇝ 𝔥_{α,α}`, `Υ_0(1) = id_A`.
pub fn enrich_unit(h_aa: Arc<HAlgebra>) -> Affine {
    let id = ConvMap::identity(h_aa.src, &h_aa.spaces[h_aa.src]);
    Affine { source: Arc::new(Zero), constant: h_aa.to_vector(&id), target: h_aa, linear: Box::new(|_, _| Lin::new()) }
}

/// `Ξ^f : 𝔥_{β,γ} ⇝ 𝔥_{β,γ} ⊕ 𝔥_{α,β}`, `Ξ_0(1) = f`, `Ξ_1(g) = g`.
pub fn xi_upper(e: &Enrichment, f: &ConvMap) -> Affine {
    let sum = e.sum.clone();
    let s2 = sum.clone();
    Affine {
        source: e.h_bg.clone(),
        target: sum.clone(),
        constant: sum.inject(1, &e.h_ab.to_vector(f)),
        linear: Box::new(move |x, _| s2.inject(0, x)),
    }
}

/// `Ξ_f : 𝔥_{γ,α} ⇝ 𝔥_{α,β} ⊕ 𝔥_{γ,α}`, `Ξ_0(1) = f`, `Ξ_1(g) = g`.
pub fn xi_lower(e: &Enrichment, f: &ConvMap) -> Affine {
    let sum = e.sum.clone();
    let s2 = sum.clone();
    Affine {
        source: e.h_ab.clone(),
        target: sum.clone(),
        constant: sum.inject(0, &e.h_bg.to_vector(f)),
        linear: Box::new(move |x, _| s2.inject(1, x)),
    }
}

/// `f^* = Φ^{α,β,γ} ⊚ Ξ^f : 𝔥_{β,γ} ⇝ 𝔥_{α,γ}` for `f : α ⇝ β`.
pub fn pullback(e: Arc<Enrichment>, f: &ConvMap) -> Result<Composite, LError> {
    let xi = Arc::new(xi_upper(&e, f));
    Composite::new(e, xi)
}

/// `f_* = Φ^{γ,α,β} ⊚ Ξ_f : 𝔥_{γ,α} ⇝ 𝔥_{γ,β}` for `f : α ⇝ β`.
pub fn pushout(e: Arc<Enrichment>, f: &ConvMap) -> Result<Composite, LError> {
    let xi = Arc::new(xi_lower(&e, f));
    Composite::new(e, xi)
}

/// Pointwise `g ∘ f₀^{⊗}`: every input of `g(c)` precomposed with `f₀`.
pub fn precompose_linear(c: &Coproperad, g: &ConvMap, f0: &EndMap, spaces: &[ChainComplex]) -> ConvMap {
    let mut out = ConvMap::zero(g.deg, f0.src, g.tgt);
    for (d, m) in &g.values {
        let v = c.vertex(*d);
        let mut r = EndMap::zero(m.outputs, m.inputs, f0.src, m.tgt, m.deg);
        for inp in tuples(spaces[f0.src].dim(), v.inputs) {
            let mut words: Vec<(Vec<u8>, Q)> = vec![(Vec::new(), Q::one())];
            for &b in &inp {
                words = words
                    .into_iter()
                    .flat_map(|(w, c)| {
                        f0.apply(&[b]).map(move |(o, c2)| {
                            let mut w2 = w.clone();
                            w2.push(o[0]);
                            (w2, c * c2)
                        }).collect::<Vec<_>>()
                    })
                    .collect();
            }
            for (w, c1) in words {
                for (o, c2) in m.apply(&w) {
                    r.add_entry(inp.clone(), o.clone(), c1 * c2);
                }
            }
        }
        out.set(*d, r);
    }
    out
}

/// Weights of the atoms in the support.
pub fn support_weights(c: &Coproperad, m: &ConvMap) -> Vec<usize> {
    m.values.keys().map(|&d| c.weight(d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::{build_k, k_element, k_split, mc_residual, HAlgebra};
    use crate::coproperad::tests::gen;
    use crate::graphs::Reduced;

    fn binary(w: usize) -> Coproperad {
        Coproperad::cofree(&[gen("x", 1, 2, 1)], w, (1, w + 1), Reduced::Both).unwrap()
    }

    fn dual() -> ChainComplex {
        ChainComplex::new(vec![0, 1], vec![vec![], vec![(0, Q::one())]]).unwrap()
    }

    /// `a·a = a`, `a·b = b·a = b`
    fn product(color: usize) -> ConvMap {
        let mut m = EndMap::zero(1, 2, color, color, 0);
        m.add_entry(vec![0, 0], vec![0], Q::one());
        m.add_entry(vec![0, 1], vec![1], Q::one());
        m.add_entry(vec![1, 0], vec![1], Q::one());
        let mut s = ConvMap::zero(-1, color, color);
        s.set(CDec::Atom(0), m);
        s
    }

    fn id_map(src: usize, tgt: usize, space: &ChainComplex) -> ConvMap {
        let mut e = EndMap::identity(src, space);
        e.tgt = tgt;
        ConvMap::linear(e)
    }

    #[test]
    fn solved_structures_and_morphisms() {
        let c = binary(2);
        let spaces = vec![dual(), dual()];
        let al = solve_gebra(&c, &spaces, &product(0)).unwrap();
        let be = solve_gebra(&c, &spaces, &product(1)).unwrap();
        let f = solve_morphism(&c, &spaces, &al, &be, &id_map(0, 1, &spaces[0])).unwrap();
        assert!(infty_residual(&c, &f, &al, &be, &spaces).unwrap().is_zero());
        let k = build_k(&c, &spaces[0], &spaces[1]);
        let x = k_element(&k, Some(&al), Some(&f), Some(&be));
        assert!(mc_residual(&k, &x).unwrap().is_zero());
    }

    #[test]
    fn middle_residual_is_minus_infinity_residual() {
        let c = binary(2);
        let spaces = vec![dual(), dual()];
        let al = solve_gebra(&c, &spaces, &product(0)).unwrap();
        let be = solve_gebra(&c, &spaces, &product(1)).unwrap();
        let k = build_k(&c, &spaces[0], &spaces[1]);
        let h = HAlgebra::new(&c, spaces.clone(), 0, 1, al.clone(), be.clone()).unwrap();
        let mut f = id_map(0, 1, &spaces[0]);
        let mut e = EndMap::zero(1, 2, 0, 1, 1);
        e.add_entry(vec![0, 0], vec![1], Q::int(3));
        f.set(CDec::Atom(0), e);
        let x = k_element(&k, Some(&al), Some(&f), Some(&be));
        let (_, rf, _) = k_split(&k, &mc_residual(&k, &x).unwrap(), -1);
        let ir = infty_residual(&c, &f, &al, &be, &spaces).unwrap();
        assert!(!ir.is_zero());
        assert_eq!(rf, ir.scaled(-Q::one()));
        let rh = mc_residual(&h, &h.to_vector(&f)).unwrap();
        assert_eq!(h.to_map(&rh, -1), ir.scaled(-Q::one()));
    }

    #[test]
    fn composition_is_unital_and_first_components_compose() {
        let c = binary(2);
        let spaces = vec![dual(), dual()];
        let al = solve_gebra(&c, &spaces, &product(0)).unwrap();
        let be = solve_gebra(&c, &spaces, &product(1)).unwrap();
        let f = solve_morphism(&c, &spaces, &al, &be, &id_map(0, 1, &spaces[0])).unwrap();
        let id_a = ConvMap::identity(0, &spaces[0]);
        let id_b = ConvMap::identity(1, &spaces[1]);
        assert_eq!(compose_gebra(&c, &f, &id_a, &spaces).unwrap(), f);
        assert_eq!(compose_gebra(&c, &id_b, &f, &spaces).unwrap(), f);
        assert_eq!(classify(&id_a, &spaces), vec![Class::Isotopy, Class::QuasiIso, Class::Mono, Class::Epi]);
    }

    #[test]
    fn classification_by_first_component() {
        let a = ChainComplex::graded(vec![0]);
        let b = ChainComplex::new(vec![0, 1, 0], vec![vec![], vec![(2, Q::one())], vec![]]).unwrap();
        let spaces = vec![a, b];
        let mut inc = EndMap::zero(1, 1, 0, 1, 0);
        inc.add_entry(vec![0], vec![0], Q::one());
        assert_eq!(classify(&strict(inc), &spaces), vec![Class::QuasiIso, Class::Mono]);
        let mut proj = EndMap::zero(1, 1, 1, 0, 0);
        proj.add_entry(vec![0], vec![0], Q::one());
        assert_eq!(classify(&strict(proj), &spaces), vec![Class::QuasiIso, Class::Epi]);
        let zero = EndMap::zero(1, 1, 0, 1, 0);
        assert_eq!(classify(&strict(zero), &spaces), vec![Class::Generic]);
    }

    #[test]
    fn partitions_are_counted_by_bell_numbers() {
        let counts: Vec<usize> = (0..5).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15]);
    }

    #[test]
    fn enrichment_is_an_infinity_morphism() {
        let c = binary(2);
        let spaces = vec![dual(), dual(), dual()];
        let al = solve_gebra(&c, &spaces, &product(0)).unwrap();
        let be = solve_gebra(&c, &spaces, &product(1)).unwrap();
        let ga = solve_gebra(&c, &spaces, &product(2)).unwrap();
        let h = |s: usize, t: usize, x: &ConvMap, y: &ConvMap| Arc::new(HAlgebra::new(&c, spaces.clone(), s, t, x.clone(), y.clone()).unwrap());
        let e = Enrichment::new(h(1, 2, &be, &ga), h(0, 1, &al, &be), h(0, 2, &al, &ga)).unwrap();
        let f = solve_morphism(&c, &spaces, &al, &be, &id_map(0, 1, &spaces[0])).unwrap();
        let g = solve_morphism(&c, &spaces, &be, &ga, &id_map(1, 2, &spaces[1])).unwrap();
        let x = e.pair(&g, &f);
        let img = mc_image(&e, &x).unwrap();
        assert_eq!(e.h_ag.to_map(&img, 0), compose_gebra(&c, &g, &f, &spaces).unwrap());
        let src = e.source().clone();
        let mut r = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        for n in 0..=3 {
            let xs: Vec<(Vector, i32)> = (0..n).map(|i| {
                let d = [0, 1, -1][i % 3];
                (crate::convolution::random_element(src.as_ref(), d, &mut r), d)
            }).collect();
            let refs: Vec<(&Vector, i32)> = xs.iter().map(|(x, d)| (x, *d)).collect();
            assert!(curved_residual(&e, &refs).unwrap().is_zero(), "arity {n}");
        }
    }

    fn three(c: &Coproperad, spaces: &[ChainComplex]) -> (ConvMap, ConvMap, ConvMap) {
        (
            solve_gebra(c, spaces, &product(0)).unwrap(),
            solve_gebra(c, spaces, &product(1)).unwrap(),
            solve_gebra(c, spaces, &product(2)).unwrap(),
        )
    }

    #[test]
    fn direct_and_twisted_brackets_agree() {
        use crate::convolution::{build_h_twisted, ell, random_element, Summand};
        let c = binary(2);
        let spaces = vec![dual(), dual()];
        let (al, be, _) = three(&c, &[dual(), dual(), dual()]);
        let h = HAlgebra::new(&c, spaces.clone(), 0, 1, al.clone(), be.clone()).unwrap();
        let k = Arc::new(build_k(&c, &spaces[0], &spaces[1]));
        let t = build_h_twisted(k.clone(), &al, &be).unwrap();
        let into_t = |m: &ConvMap| t.project(&k.embed(m, |d| Summand::Mid.kind(d))).unwrap();
        let mut r = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        for degs in [vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 1], vec![0, 0, 0]] {
            let maps: Vec<ConvMap> = degs.iter().map(|&d| h.to_map(&random_element(&h, d, &mut r), d)).collect();
            let hx: Vec<Vector> = maps.iter().map(|m| h.to_vector(m)).collect();
            let tx: Vec<Vector> = maps.iter().map(&into_t).collect();
            let ha: Vec<(&Vector, i32)> = hx.iter().zip(&degs).map(|(x, d)| (x, *d)).collect();
            let ta: Vec<(&Vector, i32)> = tx.iter().zip(&degs).map(|(x, d)| (x, *d)).collect();
            let deg = degs.iter().sum::<i32>() - 1;
            let lh = h.to_map(&ell(&h, &ha).unwrap(), deg);
            let lt = ell(&t, &ta).unwrap();
            assert_eq!(into_t(&lh), lt, "degrees {degs:?}");
        }
    }

    fn enrichment(c: &Coproperad, spaces: &[ChainComplex], s: [&ConvMap; 3], colors: [usize; 3]) -> Enrichment {
        let h = |i: usize, j: usize| Arc::new(HAlgebra::new(c, spaces.to_vec(), colors[i], colors[j], s[i].clone(), s[j].clone()).unwrap());
        Enrichment::new(h(1, 2), h(0, 1), h(0, 2)).unwrap()
    }

    #[test]
    fn pullback_sends_morphisms_to_composites() {
        let c = binary(2);
        let spaces = vec![dual(), dual(), dual()];
        let (al, be, ga) = three(&c, &spaces);
        let e = Arc::new(enrichment(&c, &spaces, [&al, &be, &ga], [0, 1, 2]));
        let f = solve_morphism(&c, &spaces, &al, &be, &id_map(0, 1, &spaces[0])).unwrap();
        let mut g = solve_morphism(&c, &spaces, &be, &ga, &id_map(1, 2, &spaces[1])).unwrap();
        let mut extra = EndMap::zero(1, 2, 1, 2, 1);
        extra.add_entry(vec![0, 0], vec![1], Q::int(2));
        g.add_at(CDec::Atom(0), &extra, Q::one());
        g = solve_morphism(&c, &spaces, &be, &ga, &g).unwrap();
        let fstar = pullback(e.clone(), &f).unwrap();
        let img = mc_image(&fstar, &e.h_bg.to_vector(&g)).unwrap();
        assert_eq!(e.h_ag.to_map(&img, 0), compose_gebra(&c, &g, &f, &spaces).unwrap());
        let mut r = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let src = fstar.source().clone();
        for n in 0..=2 {
            let xs: Vec<(Vector, i32)> = (0..n).map(|i| (crate::convolution::random_element(src.as_ref(), i, &mut r), i)).collect();
            let refs: Vec<(&Vector, i32)> = xs.iter().map(|(x, d)| (x, *d)).collect();
            assert!(curved_residual(&fstar, &refs).unwrap().is_zero(), "arity {n}");
        }
    }

    #[test]
    fn unit_is_neutral() {
        let c = binary(2);
        let spaces = vec![dual(), dual()];
        let al = solve_gebra(&c, &spaces, &product(0)).unwrap();
        let be = solve_gebra(&c, &spaces, &product(1)).unwrap();
        let e = Arc::new(enrichment(&c, &spaces, [&al, &al, &be], [0, 0, 1]));
        let id = ConvMap::identity(0, &spaces[0]);
        let unit = enrich_unit(e.h_ab.clone());
        assert_eq!(unit.component(&[]).unwrap(), e.h_ab.to_vector(&id));
        let back = pullback(e.clone(), &id).unwrap();
        let mut r = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
        let h = e.h_bg.clone();
        let xs: Vec<Vector> = (0..2).map(|_| crate::convolution::random_element(h.as_ref(), 0, &mut r)).collect();
        assert_eq!(back.component(&[(&xs[0], 0)]).unwrap(), xs[0]);
        assert!(back.component(&[(&xs[0], 0), (&xs[1], 0)]).unwrap().is_zero());
    }

    #[test]
    fn enrichment_is_not_continuous() {
        let c = binary(2);
        let spaces = vec![dual()];
        let al = solve_gebra(&c, &spaces, &product(0)).unwrap();
        let e = enrichment(&c, &spaces, [&al, &al, &al], [0, 0, 0]);
        let id = ConvMap::identity(0, &spaces[0]);
        let zero = ConvMap::zero(0, 0, 0);
        let (x, y) = (e.pair(&id, &zero), e.pair(&zero, &id));
        let v = e.component(&[(&x, 0), (&y, 0)]).unwrap();
        assert_eq!(e.h_ag.to_map(&v, 0), id);
        assert!(!is_continuous_at(&e, &[(&x, 0), (&y, 0)]).unwrap());
    }
}
