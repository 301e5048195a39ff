//! Polynomial differential forms on the simplices `Δ^0`, `Δ^1`, `Δ^2`,
//! truncated at a polynomial degree, and shifted L∞-algebras tensored with
//! them. A 1-simplex of Maurer-Cartan elements is a homotopy.

use crate::convolution::{mc_residual, Arg, LError, LInfinity, Shared};
use crate::exactlin::{Lin, Vector, Q};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

pub const MAX_SIMPLEX: usize = 2;

/// `t_1^{e_1} t_2^{e_2} dt_{i}…`, with `t_0 = 1 − Σ t_i` eliminated; bit
/// `i − 1` of `dt` marks `dt_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form {
    pub exps: [u32; MAX_SIMPLEX],
    pub dt: u8,
}

impl Form {
    pub const ONE: Form = Form { exps: [0; MAX_SIMPLEX], dt: 0 };

    pub fn degree(&self) -> i32 {
        -(self.dt.count_ones() as i32)
    }

    pub fn poly_degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

pub type FormElt = Lin<Form>;

/// `Ω_n` with polynomial degree at most `cap`.
#[derive(Clone, Debug)]
pub struct PolyForms {
    pub n: usize,
    pub cap: u32,
    pub basis: Vec<Form>,
    index: HashMap<Form, usize>,
}

impl PolyForms {
    pub fn new(n: usize, cap: u32) -> Result<Self, LError> {
        if n > MAX_SIMPLEX {
            return Err(LError::Mismatch(format!("simplicial degree {n} is not supported")));
        }
        if cap == 0 {
            return Err(LError::Mismatch("polynomial cap must be at least 1".into()));
        }
        let mut basis = Vec::new();
        let e2 = if n == 2 { cap } else { 0 };
        let e1 = if n >= 1 { cap } else { 0 };
        for dt in 0..(1u8 << n) {
            for a in 0..=e1 {
                for b in 0..=e2.min(cap - a) {
                    basis.push(Form { exps: [a, b], dt });
                }
            }
        }
        let index = basis.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        Ok(PolyForms { n, cap, basis, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self, f: &Form) -> Option<usize> {
        self.index.get(f).copied()
    }

    fn overflow(&self, f: &Form) -> Result<(), LError> {
        if f.poly_degree() > self.cap {
            Err(LError::Overflow(self.cap))
        } else {
            Ok(())
        }
    }

    pub fn t(&self, i: usize) -> FormElt {
        match i {
            0 => {
                let mut x = Lin::single(Form::ONE, Q::one());
                for j in 1..=self.n {
                    x.add_scaled(&self.t(j), -Q::one());
                }
                x
            }
            _ => {
                let mut exps = [0; MAX_SIMPLEX];
                exps[i - 1] = 1;
                Lin::single(Form { exps, dt: 0 }, Q::one())
            }
        }
    }

    pub fn mul_basis(&self, a: &Form, b: &Form) -> Result<Option<(Form, Q)>, LError> {
        if a.dt & b.dt != 0 {
            return Ok(None);
        }
        let mut swaps = 0;
        for i in 0..MAX_SIMPLEX {
            if b.dt & (1 << i) != 0 {
                swaps += (a.dt >> (i + 1)).count_ones();
            }
        }
        let f = Form { exps: [a.exps[0] + b.exps[0], a.exps[1] + b.exps[1]], dt: a.dt | b.dt };
        self.overflow(&f)?;
        Ok(Some((f, Q::sign(if swaps % 2 == 0 { 1 } else { -1 }))))
    }

    pub fn mul(&self, a: &FormElt, b: &FormElt) -> Result<FormElt, LError> {
        let mut out = Lin::new();
        for (fa, ca) in a.iter() {
            for (fb, cb) in b.iter() {
                if let Some((f, s)) = self.mul_basis(fa, fb)? {
                    out.add_term(f, *ca * *cb * s);
                }
            }
        }
        Ok(out)
    }

    pub fn d_basis(&self, f: &Form) -> FormElt {
        let mut out = Lin::new();
        for i in 0..self.n {
            if f.exps[i] == 0 || f.dt & (1 << i) != 0 {
                continue;
            }
            let mut exps = f.exps;
            exps[i] -= 1;
            let sign = if (f.dt & ((1 << i) - 1)).count_ones().is_multiple_of(2) { 1 } else { -1 };
            out.add_term(Form { exps, dt: f.dt | (1 << i) }, Q::int(f.exps[i] as i64) * Q::sign(sign));
        }
        out
    }

    pub fn d(&self, x: &FormElt) -> FormElt {
        let mut out = Lin::new();
        for (f, c) in x.iter() {
            out.add_scaled(&self.d_basis(f), *c);
        }
        out
    }

    /// Pullback along the simplicial map `Δ^m → Δ^n` sending vertex `k` to
    /// `theta[k]`, landing in `target = Ω_m`.
    pub fn pullback(&self, theta: &[usize], target: &PolyForms, x: &FormElt) -> Result<FormElt, LError> {
        if theta.len() != target.n + 1 || theta.iter().any(|&j| j > self.n) || theta.windows(2).any(|w| w[0] > w[1]) {
            return Err(LError::Mismatch("not a monotone vertex map".into()));
        }
        let images: Vec<FormElt> = (1..=self.n)
            .map(|j| {
                let mut y = Lin::new();
                for (k, _) in theta.iter().enumerate().filter(|(_, &t)| t == j) {
                    y.add_scaled(&target.t(k), Q::one());
                }
                y
            })
            .collect();
        let mut out = Lin::new();
        for (f, c) in x.iter() {
            let mut y: FormElt = Lin::single(Form::ONE, Q::one());
            for i in 0..self.n {
                for _ in 0..f.exps[i] {
                    y = target.mul(&y, &images[i])?;
                }
            }
            for i in 0..self.n {
                if f.dt & (1 << i) != 0 {
                    y = target.mul(&y, &target.d(&images[i]))?;
                }
            }
            out.add_scaled(&y, *c);
        }
        Ok(out)
    }
}

/// `d_i`: the coface `Δ^{n−1} → Δ^n` missing vertex `i`.
pub fn face_map(n: usize, i: usize) -> Vec<usize> {
    (0..=n).filter(|&k| k != i).collect()
}

/// `s_i`: the codegeneracy `Δ^{n+1} → Δ^n` hitting vertex `i` twice.
pub fn degeneracy_map(n: usize, i: usize) -> Vec<usize> {
    (0..=n + 1).map(|k| if k <= i { k } else { k - 1 }).collect()
}

/// `𝔤 ⊗ Ω_n`, with brackets extended form-multilinearly.
pub struct Tensored {
    pub base: Shared,
    pub forms: Arc<PolyForms>,
}

impl Tensored {
    pub fn new(base: Shared, n: usize, cap: u32) -> Result<Self, LError> {
        Ok(Tensored { base, forms: Arc::new(PolyForms::new(n, cap)?) })
    }

    pub fn tensor(&self, x: &Vector, form: &Form) -> Vector {
        let j = self.forms.index(form).expect("form within the cap");
        x.map_keys(|&i| (i * self.forms.dim() + j, Q::one()))
    }

    pub fn tensor_elt(&self, x: &Vector, w: &FormElt) -> Vector {
        let mut out = Lin::new();
        for (f, c) in w.iter() {
            out.add_scaled(&self.tensor(x, f), *c);
        }
        out
    }

    /// `x = Σ_ω x_ω ⊗ ω`
    pub fn components(&self, x: &Vector) -> BTreeMap<Form, Vector> {
        let mut out: BTreeMap<Form, Vector> = BTreeMap::new();
        for (k, c) in x.iter() {
            let (i, j) = (k / self.forms.dim(), k % self.forms.dim());
            out.entry(self.forms.basis[j]).or_default().add_term(i, *c);
        }
        out
    }

    /// Apply a map of forms to every component.
    pub fn map_forms(&self, target: &Tensored, x: &Vector, f: impl Fn(&FormElt) -> Result<FormElt, LError>) -> Result<Vector, LError> {
        let mut out = Lin::new();
        for (form, y) in self.components(x) {
            out.add_scaled(&target.tensor_elt(&y, &f(&Lin::single(form, Q::one()))?), Q::one());
        }
        Ok(out)
    }

    /// `x` pulled back along `theta`, in the tensored algebra over `Ω_m`.
    pub fn pull(&self, theta: &[usize], x: &Vector) -> Result<(Tensored, Vector), LError> {
        let target = Tensored::new(self.base.clone(), theta.len() - 1, self.forms.cap)?;
        let y = self.map_forms(&target, x, |w| self.forms.pullback(theta, &target.forms, w))?;
        Ok((target, y))
    }

    pub fn face(&self, i: usize, x: &Vector) -> Result<(Tensored, Vector), LError> {
        if self.forms.n == 0 || i > self.forms.n {
            return Err(LError::Mismatch(format!("no face {i}")));
        }
        self.pull(&face_map(self.forms.n, i), x)
    }

    pub fn degeneracy(&self, i: usize, x: &Vector) -> Result<(Tensored, Vector), LError> {
        if self.forms.n + 1 > MAX_SIMPLEX || i > self.forms.n {
            return Err(LError::Mismatch(format!("no degeneracy {i}")));
        }
        self.pull(&degeneracy_map(self.forms.n, i), x)
    }

    /// Evaluation at vertex `i`; `𝔤 ⊗ Ω_0` is `𝔤` itself.
    pub fn evaluate_vertex(&self, x: &Vector, i: usize) -> Result<Vector, LError> {
        if i > self.forms.n {
            return Err(LError::Mismatch(format!("no vertex {i}")));
        }
        let (_, y) = self.pull(&[i], x)?;
        Ok(y)
    }
}

impl LInfinity for Tensored {
    fn dim(&self) -> usize {
        self.base.dim() * self.forms.dim()
    }
    fn degree(&self, k: usize) -> i32 {
        self.base.degree(k / self.forms.dim()) + self.forms.basis[k % self.forms.dim()].degree()
    }
    fn label(&self, k: usize) -> String {
        let f = self.forms.basis[k % self.forms.dim()];
        format!("{}⊗t{:?}dt{:b}", self.base.label(k / self.forms.dim()), f.exps, f.dt)
    }
    fn level(&self, k: usize) -> usize {
        self.base.level(k / self.forms.dim())
    }
    fn max_arity(&self) -> usize {
        self.base.max_arity()
    }
    fn curvature(&self) -> Vector {
        self.tensor(&self.base.curvature(), &Form::ONE)
    }
    fn bracket(&self, args: &[Arg]) -> Result<Vector, LError> {
        let slots: Vec<(Vec<(Form, Vector)>, i32)> = args
            .iter()
            .flat_map(|a| std::iter::repeat_n(a, a.mult))
            .map(|a| (self.components(a.x).into_iter().collect(), a.deg))
            .collect();
        let n = slots.len();
        if n > self.base.max_arity() {
            return Ok(Lin::new());
        }
        let mut out = Lin::new();
        let mut choice = vec![0usize; n];
        'outer: loop {
            let picked: Vec<(&Form, &Vector, i32)> =
                slots.iter().zip(&choice).map(|((cs, d), &c)| (&cs[c].0, &cs[c].1, d - cs[c].0.degree())).collect();
            // ω_i passes x_j for j > i
            let mut sign = 0i64;
            for i in 0..n {
                for j in i + 1..n {
                    sign += (picked[i].0.degree() * picked[j].2) as i64;
                }
            }
            let dts = picked.iter().fold(Some(0u8), |m, p| m.filter(|m| m & p.0.dt == 0).map(|m| m | p.0.dt));
            if dts.is_some() {
                let bargs: Vec<Arg> = picked.iter().map(|p| Arg::one(p.1, p.2)).collect();
                let y = self.base.bracket(&bargs)?;
                if !y.is_zero() {
                    let mut w: FormElt = Lin::single(Form::ONE, Q::one());
                    for p in &picked {
                        w = self.forms.mul(&w, &Lin::single(*p.0, Q::one()))?;
                    }
                    out.add_scaled(&self.tensor_elt(&y, &w), Q::sign(if sign % 2 == 0 { 1 } else { -1 }));
                }
            }
            for k in (0..n).rev() {
                choice[k] += 1;
                if choice[k] < slots[k].0.len() {
                    continue 'outer;
                }
                choice[k] = 0;
            }
            break;
        }
        if n == 1 {
            for (f, x) in &slots[0].0 {
                let s = if (slots[0].1 - f.degree()) % 2 == 0 { Q::one() } else { -Q::one() };
                out.add_scaled(&self.tensor_elt(x, &self.forms.d_basis(f)), s);
            }
        }
        Ok(out)
    }
}

/// `mc_n`: the Maurer-Cartan residual of an `n`-simplex.
pub fn mc_n(t: &Tensored, x: &Vector) -> Result<Vector, LError> {
    mc_residual(t, x)
}

/// `f ⊗ 1`, the constant simplex.
pub fn constant(t: &Tensored, f: &Vector) -> Vector {
    t.tensor(f, &Form::ONE)
}

/// A 1-simplex `F(t) + λ dt` starting at `f`, with the constant `λ` of
/// degree 1: solves `F' = −Σ_m 1/m! ℓ_{m+1}(F, …, F, λ)` by iterating
/// `F ↦ f − ∫_0^t (…)` on polynomial coefficients.
pub fn solve_homotopy(t: &Tensored, f: &Vector, lambda: &Vector) -> Result<Vector, LError> {
    if t.forms.n != 1 {
        return Err(LError::Mismatch("homotopies live on the 1-simplex".into()));
    }
    let dt = Form { exps: [0, 0], dt: 1 };
    let ldt = t.tensor(lambda, &dt);
    let mut poly: Vec<Vector> = vec![f.clone()];
    for _ in 0..=t.forms.cap + 1 {
        let mut x = ldt.clone();
        for (k, c) in poly.iter().enumerate() {
            x.add_scaled(&t.tensor(c, &Form { exps: [k as u32, 0], dt: 0 }), Q::one());
        }
        let r = mc_residual(t, &x)?;
        if r.is_zero() {
            return Ok(x);
        }
        // the dt part of the residual is F' + Σ 1/m! ℓ_{m+1}(F^m, λ)
        let mut dt_part: BTreeMap<usize, Vector> = t
            .components(&r)
            .into_iter()
            .filter(|(form, _)| form.dt == 1)
            .map(|(form, g)| (form.exps[0] as usize, g))
            .collect();
        let mut next = vec![f.clone()];
        for k in 0..=t.forms.cap as usize {
            let mut rk = dt_part.remove(&k).unwrap_or_default();
            if let Some(c) = poly.get(k + 1) {
                rk.add_scaled(c, -Q::int(k as i64 + 1));
            }
            if rk.is_zero() {
                next.push(Lin::new());
                continue;
            }
            if k + 1 > t.forms.cap as usize {
                return Err(LError::Overflow(t.forms.cap));
            }
            next.push(rk.scaled(-Q::new(1, k as i128 + 1).expect("nonzero")));
        }
        while next.len() > 1 && next.last().is_some_and(|v| v.is_zero()) {
            next.pop();
        }
        if next == poly {
            return Err(LError::Closure("homotopy iteration stalled".into()));
        }
        poly = next;
    }
    Err(LError::Closure("homotopy iteration did not converge".into()))
}

/// `H` is a Maurer-Cartan 1-simplex from `f` to `g`.
pub fn is_homotopy(t: &Tensored, h: &Vector, f: &Vector, g: &Vector) -> Result<bool, LError> {
    if t.forms.n != 1 {
        return Err(LError::Mismatch("homotopies live on the 1-simplex".into()));
    }
    Ok(mc_n(t, h)?.is_zero() && t.evaluate_vertex(h, 0)? == *f && t.evaluate_vertex(h, 1)? == *g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::{ell, HAlgebra, is_mc};
    use crate::coproperad::tests::gen;
    use crate::coproperad::{CDec, Coproperad};
    use crate::exactlin::ChainComplex;
    use crate::graphs::Reduced;
    use crate::inftymor::{solve_gebra, solve_morphism};
    use crate::convolution::ConvMap;
    use crate::sbimod::EndMap;

    fn f1() -> PolyForms {
        PolyForms::new(1, 3).unwrap()
    }

    fn mono(a: u32, b: u32, dt: u8) -> FormElt {
        Lin::single(Form { exps: [a, b], dt }, Q::one())
    }

    #[test]
    fn forms_on_the_interval() {
        let w = f1();
        assert_eq!(PolyForms::new(0, 2).unwrap().dim(), 1);
        assert_eq!(w.dim(), 8);
        assert_eq!(w.d(&mono(3, 0, 0)), mono(2, 0, 1).scaled(Q::int(3)));
        assert!(w.d(&w.d(&mono(3, 0, 0))).is_zero());
        assert!(w.mul(&mono(0, 0, 1), &mono(1, 0, 1)).unwrap().is_zero());
        assert_eq!(w.mul(&mono(2, 0, 0), &mono(2, 0, 0)), Err(LError::Overflow(3)));
        assert!(PolyForms::new(3, 2).is_err());
    }

    #[test]
    fn forms_on_the_triangle() {
        let w = PolyForms::new(2, 6).unwrap();
        let x = mono(1, 2, 0);
        let y = mono(2, 0, 2);
        assert!(w.d(&w.d(&x)).is_zero());
        // Leibniz for degree-0 x
        let mut rhs = w.mul(&w.d(&x), &y).unwrap();
        rhs.add_scaled(&w.mul(&x, &w.d(&y)).unwrap(), Q::one());
        assert_eq!(w.d(&w.mul(&x, &y).unwrap()), rhs);
        // dt_2 dt_1 = −dt_1 dt_2
        assert_eq!(w.mul(&mono(0, 0, 2), &mono(0, 0, 1)).unwrap(), mono(0, 0, 3).scaled(-Q::one()));
    }

    #[test]
    fn simplicial_identities() {
        let w = [PolyForms::new(0, 3).unwrap(), PolyForms::new(1, 3).unwrap(), PolyForms::new(2, 3).unwrap()];
        let compose = |a: &[usize], b: &[usize]| a.iter().map(|&k| b[k]).collect::<Vec<_>>();
        for f in w[2].basis.clone() {
            let x = Lin::single(f, Q::one());
            // d_i d_j = d_{j−1} d_i for i < j
            for j in 0..=2 {
                for i in 0..j {
                    let lhs = w[1].pullback(&face_map(1, i), &w[0], &w[2].pullback(&face_map(2, j), &w[1], &x).unwrap()).unwrap();
                    let rhs = w[1].pullback(&face_map(1, j - 1), &w[0], &w[2].pullback(&face_map(2, i), &w[1], &x).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                    assert_eq!(lhs, w[2].pullback(&compose(&face_map(1, i), &face_map(2, j)), &w[0], &x).unwrap());
                }
            }
        }
        for f in w[1].basis.clone() {
            let x = Lin::single(f, Q::one());
            // d_i s_i = d_{i+1} s_i = id
            for i in 0..=1 {
                let s = w[1].pullback(&degeneracy_map(1, i), &w[2], &x).unwrap();
                assert_eq!(w[2].pullback(&face_map(2, i), &w[1], &s).unwrap(), x);
                assert_eq!(w[2].pullback(&face_map(2, i + 1), &w[1], &s).unwrap(), x);
                // pullback commutes with d
                assert_eq!(w[2].d(&s), w[1].pullback(&degeneracy_map(1, i), &w[2], &w[1].d(&x)).unwrap());
            }
        }
    }

    fn dual() -> ChainComplex {
        ChainComplex::new(vec![0, 1], vec![vec![], vec![(0, Q::one())]]).unwrap()
    }

    fn product(color: usize) -> ConvMap {
        let mut m = EndMap::zero(1, 2, color, color, 0);
        m.add_entry(vec![0, 0], vec![0], Q::one());
        m.add_entry(vec![0, 1], vec![1], Q::one());
        m.add_entry(vec![1, 0], vec![1], Q::one());
        let mut s = ConvMap::zero(-1, color, color);
        s.set(CDec::Atom(0), m);
        s
    }

    fn fixture() -> (Arc<HAlgebra>, Vector) {
        let c = Coproperad::cofree(&[gen("x", 1, 2, 1)], 2, (1, 3), Reduced::Both).unwrap();
        let spaces = vec![dual(), dual()];
        let al = solve_gebra(&c, &spaces, &product(0)).unwrap();
        let be = solve_gebra(&c, &spaces, &product(1)).unwrap();
        let mut id = EndMap::identity(0, &spaces[0]);
        id.tgt = 1;
        let f = solve_morphism(&c, &spaces, &al, &be, &ConvMap::linear(id)).unwrap();
        let h = Arc::new(HAlgebra::new(&c, spaces, 0, 1, al, be).unwrap());
        let x = h.to_vector(&f);
        (h, x)
    }

    #[test]
    fn constant_simplices() {
        let (h, f) = fixture();
        assert!(is_mc(h.as_ref(), &f).unwrap());
        let t0 = Tensored::new(h.clone(), 0, 2).unwrap();
        assert!(mc_n(&t0, &constant(&t0, &f)).unwrap().is_zero());
        let t1 = Tensored::new(h.clone(), 1, 2).unwrap();
        let c = constant(&t1, &f);
        assert!(is_homotopy(&t1, &c, &f, &f).unwrap());
        let mut g = f.clone();
        g.add_scaled(&f, Q::one());
        assert!(!is_homotopy(&t1, &c, &f, &g).unwrap());
        for i in 0..2 {
            assert_eq!(t1.evaluate_vertex(&c, i).unwrap(), f);
        }
    }

    #[test]
    fn tensored_brackets_on_constants() {
        let (h, f) = fixture();
        let t = Tensored::new(h.clone(), 1, 2).unwrap();
        let x = constant(&t, &f);
        let lhs = ell(&t, &[(&x, 0), (&x, 0)]).unwrap();
        assert_eq!(lhs, constant(&t, &ell(h.as_ref(), &[(&f, 0), (&f, 0)]).unwrap()));
    }

    #[test]
    fn solved_homotopy_joins_distinct_endpoints() {
        let (h, f) = fixture();
        let t = Tensored::new(h.clone(), 1, 4).unwrap();
        let lambda = h.to_vector(&{
            let mut m = ConvMap::zero(1, 0, 1);
            let mut e = EndMap::zero(1, 1, 0, 1, 1);
            e.add_entry(vec![0], vec![1], Q::one());
            m.set(CDec::Id, e);
            m
        });
        let x = solve_homotopy(&t, &f, &lambda).unwrap();
        assert!(mc_n(&t, &x).unwrap().is_zero());
        let g = t.evaluate_vertex(&x, 1).unwrap();
        assert_ne!(g, f);
        assert!(is_mc(h.as_ref(), &g).unwrap());
        assert!(is_homotopy(&t, &x, &f, &g).unwrap());
        // a degenerate 2-simplex is again Maurer-Cartan, with the right faces
        let (t2, s) = t.degeneracy(0, &x).unwrap();
        assert!(mc_n(&t2, &s).unwrap().is_zero());
        let (_, back) = t2.face(0, &s).unwrap();
        assert_eq!(back, x);
        for v in 0..3 {
            assert!(is_mc(h.as_ref(), &t2.evaluate_vertex(&s, v).unwrap()).unwrap());
        }
    }

    #[test]
    fn overflow_is_reported() {
        let (h, f) = fixture();
        let t = Tensored::new(h.clone(), 1, 1).unwrap();
        let x = t.tensor(&f, &Form { exps: [1, 0], dt: 0 });
        assert_eq!(mc_n(&t, &x), Err(LError::Overflow(1)));
    }
}
