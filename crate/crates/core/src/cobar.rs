//! Quasi-free dg properads built from a coproperad: the cobar construction,
//! the two 2-colored versions, the cylinder, and the maps between them.

use crate::coproperad::{strip_ids, AuditReport, CDec, CGraph, Coproperad, Cut, LDec};
use crate::exactlin::{Lin, Q};
use crate::graphs::{port, Dst, Graph, Port, Src, Vertex};
use serde::{Deserialize, Serialize};

pub type PGraph = Graph<usize>;
pub type Elem = Lin<PGraph>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GenKind {
    /// desuspended atom, in copy 0 or 1
    Shifted { copy: u8, atom: usize },
    /// undesuspended element of C (identity included where present)
    Arrow(CDec),
    /// the strict arrow `i`
    Unit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gen {
    pub label: String,
    pub kind: GenKind,
    pub outputs: usize,
    pub inputs: usize,
    pub degree: i32,
    pub weight: usize,
    pub in_color: u8,
    pub out_color: u8,
}

/// Rewrite of an `i`-saturated copy-1 vertex into the `i`-saturated copy-0 form.
#[derive(Clone, Debug)]
pub struct StrictRewrite {
    pub unit: usize,
    /// (copy-1 generator, copy-0 generator)
    pub rules: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct DgProperad {
    pub name: String,
    pub colors: usize,
    pub gens: Vec<Gen>,
    pub diff: Vec<Elem>,
    pub rewrite: Option<StrictRewrite>,
}

#[derive(Clone, Debug)]
pub struct ProperadMorphism {
    pub name: String,
    pub images: Vec<Elem>,
}

fn parity(n: i32) -> Q {
    if n.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

fn canon(g: PGraph, c: Q, out: &mut Elem) {
    let (g, s) = g.canonical();
    out.add_term(g, c * Q::sign(s));
}

impl DgProperad {
    pub fn corolla(&self, g: usize) -> PGraph {
        let x = &self.gens[g];
        Graph::corolla(g, x.degree, x.outputs, x.inputs)
    }

    pub fn generator(&self, g: usize) -> Elem {
        Lin::single(self.corolla(g), Q::one())
    }

    pub fn find(&self, kind: GenKind) -> Option<usize> {
        self.gens.iter().position(|g| g.kind == kind)
    }

    pub fn vertex(&self, g: usize) -> Vertex<usize> {
        let x = &self.gens[g];
        Vertex { dec: g, deg: x.degree, outputs: x.outputs, inputs: x.inputs }
    }

    /// Derivation extension of the differential, followed by normal form.
    pub fn d(&self, x: &Elem) -> Elem {
        let mut out = Lin::new();
        for (g, c) in x.iter() {
            let mut before = 0;
            for (v, vx) in g.vertices.iter().enumerate() {
                for (h, c2) in self.diff[vx.dec].iter() {
                    canon(g.substitute(v, h), *c * *c2 * parity(before), &mut out);
                }
                before += vx.deg;
            }
        }
        self.reduce(&out)
    }

    pub fn colors_ok(&self, g: &PGraph) -> bool {
        g.edges.iter().all(|&(a, b)| self.gens[g.vertices[a.v].dec].out_color == self.gens[g.vertices[b.v].dec].in_color)
    }

    /// Normal form modulo the relations, if any.
    pub fn reduce(&self, x: &Elem) -> Elem {
        let Some(rw) = &self.rewrite else { return x.clone() };
        let mut out = Lin::new();
        let mut todo: Vec<(PGraph, Q)> = x.iter().map(|(g, c)| (g.clone(), *c)).collect();
        while let Some((g, c)) = todo.pop() {
            match self.rewrite_once(rw, &g) {
                Some(h) => todo.push((h, c)),
                None => canon(g, c, &mut out),
            }
        }
        out
    }

    fn rewrite_once(&self, rw: &StrictRewrite, g: &PGraph) -> Option<PGraph> {
        let w = g.wiring();
        for (v, vx) in g.vertices.iter().enumerate() {
            let Some(&(_, to)) = rw.rules.iter().find(|r| r.0 == vx.dec) else { continue };
            let feeders: Option<Vec<usize>> = w.src[v]
                .iter()
                .map(|s| match s {
                    Src::Out(p) if g.vertices[p.v].dec == rw.unit => Some(p.v),
                    _ => None,
                })
                .collect();
            let Some(feeders) = feeders else { continue };
            // units above v go away; v changes color; fresh units below v
            let n = g.vertices.len();
            let keep: Vec<usize> = (0..n).filter(|u| !feeders.contains(u)).collect();
            let pos = |u: usize| keep.iter().position(|&k| k == u).unwrap();
            let mut vertices: Vec<Vertex<usize>> = keep.iter().map(|&u| g.vertices[u].clone()).collect();
            let nv = pos(v);
            vertices[nv] = self.vertex(to);
            let mut edges = Vec::new();
            let mut inputs: Vec<Port> =
                g.inputs.iter().map(|p| if feeders.contains(&p.v) { *p } else { port(pos(p.v), p.slot) }).collect();
            // wire what fed each unit directly into v
            for (slot, &f) in feeders.iter().enumerate() {
                match w.src[f][0] {
                    Src::Leg(i) => inputs[i] = port(nv, slot),
                    Src::Out(p) => edges.push((port(pos(p.v), p.slot), port(nv, slot))),
                }
            }
            for &(a, b) in &g.edges {
                if feeders.contains(&a.v) || feeders.contains(&b.v) || a.v == v {
                    continue;
                }
                edges.push((port(pos(a.v), a.slot), port(pos(b.v), b.slot)));
            }
            let mut outputs: Vec<Port> = g.outputs.iter().map(|p| port(pos(p.v), p.slot)).collect();
            for (slot, d) in w.dst[v].iter().enumerate() {
                let u = vertices.len();
                vertices.push(self.vertex(rw.unit));
                edges.push((port(nv, slot), port(u, 0)));
                match d {
                    Dst::Leg(j) => outputs[*j] = port(u, 0),
                    Dst::In(p) => edges.push((port(u, 0), port(pos(p.v), p.slot))),
                }
            }
            edges.sort();
            let h = Graph { vertices, edges, inputs, outputs };
            debug_assert!(h.validate().is_ok());
            return Some(h);
        }
        None
    }

    pub fn relations(&self) -> Vec<Elem> {
        let Some(rw) = &self.rewrite else { return Vec::new() };
        rw.rules
            .iter()
            .map(|&(c1, c0)| {
                let mut e = Lin::new();
                canon(saturate_below(self, c0, rw.unit), Q::one(), &mut e);
                canon(saturate_above(self, c1, rw.unit), -Q::one(), &mut e);
                e
            })
            .collect()
    }

    pub fn check_d_squared(&self) -> AuditReport {
        let mut r = AuditReport::default();
        for g in 0..self.gens.len() {
            let dd = self.d(&self.d(&self.generator(g)));
            r.check(dd.is_zero(), || format!("d² ≠ 0 on {} in {}", self.gens[g].label, self.name));
            for (h, _) in self.diff[g].iter() {
                r.check(
                    h.degree() == self.gens[g].degree - 1 && h.arity() == (self.gens[g].outputs, self.gens[g].inputs),
                    || format!("d({}) is not homogeneous", self.gens[g].label),
                );
                r.check(self.colors_ok(h), || format!("d({}) mixes colors", self.gens[g].label));
            }
        }
        for (k, rel) in self.relations().iter().enumerate() {
            r.check(self.reduce(rel).is_zero(), || format!("relation {k} is not reduced to zero"));
            r.check(self.d(rel).is_zero(), || format!("d does not preserve relation {k}"));
        }
        r
    }
}

fn saturate_below(p: &DgProperad, c0: usize, unit: usize) -> PGraph {
    let x = p.vertex(c0);
    let mut vertices = vec![x.clone()];
    let mut edges = Vec::new();
    for s in 0..x.outputs {
        vertices.push(p.vertex(unit));
        edges.push((port(0, s), port(s + 1, 0)));
    }
    Graph {
        vertices,
        edges,
        inputs: (0..x.inputs).map(|s| port(0, s)).collect(),
        outputs: (0..x.outputs).map(|s| port(s + 1, 0)).collect(),
    }
}

fn saturate_above(p: &DgProperad, c1: usize, unit: usize) -> PGraph {
    let x = p.vertex(c1);
    let mut vertices = vec![x.clone()];
    let mut edges = Vec::new();
    for s in 0..x.inputs {
        vertices.push(p.vertex(unit));
        edges.push((port(s + 1, 0), port(0, s)));
    }
    edges.sort();
    Graph {
        vertices,
        edges,
        inputs: (0..x.inputs).map(|s| port(s + 1, 0)).collect(),
        outputs: (0..x.outputs).map(|s| port(0, s)).collect(),
    }
}

fn shifted_gens(c: &Coproperad, copy: u8, color: u8) -> Vec<Gen> {
    c.atoms
        .iter()
        .enumerate()
        .map(|(a, x)| Gen {
            label: format!("s{}_{copy}", x.label),
            kind: GenKind::Shifted { copy, atom: a },
            outputs: x.outputs,
            inputs: x.inputs,
            degree: x.degree - 1,
            weight: x.weight,
            in_color: color,
            out_color: color,
        })
        .collect()
}

fn arrow_gen(c: &Coproperad, d: CDec, suffix: &str, in_color: u8, out_color: u8) -> Gen {
    let v = c.vertex(d);
    Gen {
        label: format!("{}{suffix}", c.label(d)),
        kind: GenKind::Arrow(d),
        outputs: v.outputs,
        inputs: v.inputs,
        degree: v.deg,
        weight: c.weight(d),
        in_color,
        out_color,
    }
}

/// Relabel a one-vertex element of C.
fn relabel(c: &Coproperad, g: &CGraph, f: impl Fn(CDec) -> usize, gens: &[Gen]) -> PGraph {
    let _ = c;
    Graph {
        vertices: g
            .vertices
            .iter()
            .map(|v| {
                let k = f(v.dec);
                Vertex { dec: k, deg: gens[k].degree, outputs: v.outputs, inputs: v.inputs }
            })
            .collect(),
        edges: g.edges.clone(),
        inputs: g.inputs.clone(),
        outputs: g.outputs.clone(),
    }
}

/// `d(s⁻¹c) = −s⁻¹ d_C c − (s⁻¹ ⊗ s⁻¹) Δ_(1,1) c`, the bottom vertex written first.
fn cobar_diff(c: &Coproperad, a: usize, shifted: impl Fn(usize) -> usize, gens: &[Gen]) -> Elem {
    let gen_of = |d: CDec| match d {
        CDec::Atom(b) => shifted(b),
        CDec::Id => unreachable!("identity in C̄"),
    };
    let mut out = Lin::new();
    for (h, k) in c.differential(CDec::Atom(a)).iter() {
        canon(relabel(c, h, gen_of, gens), -*k, &mut out);
    }
    for (h, k) in c.delta_11(CDec::Atom(a)).iter() {
        let top = if h.edges[0].0.v == 0 { 0 } else { 1 };
        let (h, s) = h.permute(&[1 - top, top]);
        let sign = parity(h.vertices[0].deg) * Q::sign(s);
        canon(relabel(c, &h, gen_of, gens), -*k * sign, &mut out);
    }
    out
}

pub fn cobar(c: &Coproperad) -> DgProperad {
    let gens = shifted_gens(c, 0, 0);
    let diff = (0..c.dim()).map(|a| cobar_diff(c, a, |b| b, &gens)).collect();
    DgProperad { name: "cobar".into(), colors: 1, gens, diff, rewrite: None }
}

/// Two copies of the cobar construction side by side, in one color.
pub fn cobar_pair(c: &Coproperad) -> DgProperad {
    let n = c.dim();
    let mut gens = shifted_gens(c, 0, 0);
    gens.extend(shifted_gens(c, 1, 0));
    let mut diff: Vec<Elem> = (0..n).map(|a| cobar_diff(c, a, |b| b, &gens)).collect();
    diff.extend((0..n).map(|a| cobar_diff(c, a, |b| n + b, &gens)));
    DgProperad { name: "cobar-pair".into(), colors: 1, gens, diff, rewrite: None }
}

pub fn two_colored_strict(c: &Coproperad) -> DgProperad {
    let n = c.dim();
    let mut gens = shifted_gens(c, 0, 0);
    gens.push(Gen {
        label: "i".into(),
        kind: GenKind::Unit,
        outputs: 1,
        inputs: 1,
        degree: 0,
        weight: 0,
        in_color: 0,
        out_color: 1,
    });
    gens.extend(shifted_gens(c, 1, 1));
    let mut diff: Vec<Elem> = (0..n).map(|a| cobar_diff(c, a, |b| b, &gens)).collect();
    diff.push(Lin::new());
    diff.extend((0..n).map(|a| cobar_diff(c, a, |b| n + 1 + b, &gens)));
    let rewrite = StrictRewrite { unit: n, rules: (0..n).map(|a| (n + 1 + a, a)).collect() };
    DgProperad { name: "two-colored-strict".into(), colors: 2, gens, diff, rewrite: Some(rewrite) }
}

/// The decomposition terms with a single atom on one level (the `lone`
/// level, identities there erased), the other level written with
/// `arrow`, or erased when `arrow` gives `None` on an identity; the lone
/// atom is desuspended.
fn infinitesimal_terms(
    c: &Coproperad,
    a: usize,
    lone: u8,
    shifted: &dyn Fn(usize) -> usize,
    arrow: &dyn Fn(CDec) -> Option<usize>,
    gens: &[Gen],
) -> Elem {
    let mut out = Lin::new();
    for (g, k) in c.delta(CDec::Atom(a)).iter() {
        let lone_atoms = g.vertices.iter().filter(|v| v.dec.level == lone && v.dec.dec != CDec::Id).count();
        if lone_atoms != 1 {
            continue;
        }
        let h: Cut = strip_ids(g, |l| l == lone);
        let h = match h.remove_units(|v| v.dec.dec == CDec::Id && arrow(CDec::Id).is_none()) {
            Ok(h) => h,
            Err(_) => continue,
        };
        let v0 = h.vertices.iter().position(|v| v.dec.level == lone).unwrap();
        let before: i32 = h.vertices[..v0].iter().map(|v| v.deg).sum();
        let pg: PGraph = Graph {
            vertices: h
                .vertices
                .iter()
                .map(|v: &Vertex<LDec>| {
                    let k = if v.dec.level == lone {
                        match v.dec.dec {
                            CDec::Atom(b) => shifted(b),
                            CDec::Id => unreachable!(),
                        }
                    } else {
                        arrow(v.dec.dec).expect("identities erased")
                    };
                    Vertex { dec: k, deg: gens[k].degree, outputs: v.outputs, inputs: v.inputs }
                })
                .collect(),
            edges: h.edges.clone(),
            inputs: h.inputs.clone(),
            outputs: h.outputs.clone(),
        };
        canon(pg, *k * parity(before), &mut out);
    }
    out
}

/// `d(c) = (d_C c) + (one s⁻¹c₀ on top) − (one s⁻¹c₁ at the bottom)`.
fn arrow_diff(
    c: &Coproperad,
    d: CDec,
    top_shift: &dyn Fn(usize) -> usize,
    bottom_shift: &dyn Fn(usize) -> usize,
    arrow: &dyn Fn(CDec) -> Option<usize>,
    gens: &[Gen],
) -> Elem {
    let CDec::Atom(a) = d else { return Lin::new() };
    let mut out = Lin::new();
    for (h, k) in c.differential(d).iter() {
        canon(relabel(c, h, |x| arrow(x).unwrap(), gens), *k, &mut out);
    }
    out.add_scaled(&infinitesimal_terms(c, a, 1, top_shift, arrow, gens), Q::one());
    out.add_scaled(&infinitesimal_terms(c, a, 0, bottom_shift, arrow, gens), -Q::one());
    out
}

pub fn two_colored_resolution(c: &Coproperad) -> DgProperad {
    let n = c.dim();
    let mut gens = shifted_gens(c, 0, 0);
    gens.push(arrow_gen(c, CDec::Id, "_01", 0, 1));
    gens.extend((0..n).map(|a| arrow_gen(c, CDec::Atom(a), "_01", 0, 1)));
    gens.extend(shifted_gens(c, 1, 1));
    let arrow = |d: CDec| {
        Some(match d {
            CDec::Id => n,
            CDec::Atom(a) => n + 1 + a,
        })
    };
    let top = |b: usize| b;
    let bottom = |b: usize| 2 * n + 1 + b;
    let mut diff: Vec<Elem> = (0..n).map(|a| cobar_diff(c, a, top, &gens)).collect();
    diff.push(Lin::new());
    diff.extend((0..n).map(|a| arrow_diff(c, CDec::Atom(a), &top, &bottom, &arrow, &gens)));
    diff.extend((0..n).map(|a| cobar_diff(c, a, bottom, &gens)));
    DgProperad { name: "two-colored-resolution".into(), colors: 2, gens, diff, rewrite: None }
}

pub fn cylinder(c: &Coproperad) -> DgProperad {
    let n = c.dim();
    let mut gens = shifted_gens(c, 0, 0);
    gens.extend((0..n).map(|a| arrow_gen(c, CDec::Atom(a), "_mid", 0, 0)));
    gens.extend(shifted_gens(c, 1, 0));
    let arrow = |d: CDec| match d {
        CDec::Id => None,
        CDec::Atom(a) => Some(n + a),
    };
    let top = |b: usize| b;
    let bottom = |b: usize| 2 * n + b;
    let mut diff: Vec<Elem> = (0..n).map(|a| cobar_diff(c, a, top, &gens)).collect();
    diff.extend((0..n).map(|a| arrow_diff(c, CDec::Atom(a), &top, &bottom, &arrow, &gens)));
    diff.extend((0..n).map(|a| cobar_diff(c, a, bottom, &gens)));
    DgProperad { name: "cylinder".into(), colors: 1, gens, diff, rewrite: None }
}

impl ProperadMorphism {
    /// Images are substituted vertex by vertex; morphisms have degree 0.
    pub fn apply(&self, x: &Elem, target: &DgProperad) -> Elem {
        let mut out = Lin::new();
        for (g, c) in x.iter() {
            let mut acc = vec![(g.clone(), *c)];
            for v in (0..g.vertices.len()).rev() {
                let img = &self.images[g.vertices[v].dec];
                acc = acc
                    .into_iter()
                    .flat_map(|(h, c1)| img.iter().map(move |(i, c2)| (h.substitute(v, i), c1 * *c2)).collect::<Vec<_>>())
                    .collect();
            }
            for (h, c1) in acc {
                canon(h, c1, &mut out);
            }
        }
        target.reduce(&out)
    }

    pub fn then(&self, next: &ProperadMorphism, mid: &DgProperad, name: &str) -> ProperadMorphism {
        ProperadMorphism { name: name.into(), images: self.images.iter().map(|x| next.apply(x, mid)).collect() }
    }

    pub fn check_chain_map(&self, source: &DgProperad, target: &DgProperad) -> AuditReport {
        let mut r = AuditReport::default();
        for g in 0..source.gens.len() {
            let x = source.generator(g);
            let lhs = self.apply(&source.d(&x), target);
            let rhs = target.d(&self.apply(&x, target));
            r.check(lhs == rhs, || format!("{} does not commute with d on {}", self.name, source.gens[g].label));
            for (h, _) in self.images[g].iter() {
                r.check(h.degree() == source.gens[g].degree, || format!("{} changes the degree of {}", self.name, source.gens[g].label));
            }
        }
        r
    }
}

fn gen_image(p: &DgProperad, g: usize) -> Elem {
    p.generator(g)
}

/// `ρ`: shifted copies to themselves, `c⁰₁ ↦ ε(c) i`.
pub fn rho(c: &Coproperad, res: &DgProperad, strict: &DgProperad) -> ProperadMorphism {
    let n = c.dim();
    let mut images: Vec<Elem> = (0..n).map(|a| gen_image(strict, a)).collect();
    images.push(gen_image(strict, n));
    images.extend((0..n).map(|_| Lin::new()));
    images.extend((0..n).map(|a| gen_image(strict, n + 1 + a)));
    debug_assert_eq!(images.len(), res.gens.len());
    ProperadMorphism { name: "rho".into(), images }
}

/// `Φ`: the two copies of the cobar construction into the cylinder.
pub fn cyl_incl(c: &Coproperad, cyl: &DgProperad) -> ProperadMorphism {
    let n = c.dim();
    let images = (0..n).map(|a| gen_image(cyl, a)).chain((0..n).map(|a| gen_image(cyl, 2 * n + a))).collect();
    ProperadMorphism { name: "Phi".into(), images }
}

/// `Ψ`: both shifted copies to the cobar construction, the middle to zero.
pub fn cyl_proj(c: &Coproperad, omega: &DgProperad) -> ProperadMorphism {
    let n = c.dim();
    let images = (0..n)
        .map(|a| gen_image(omega, a))
        .chain((0..n).map(|_| Lin::new()))
        .chain((0..n).map(|a| gen_image(omega, a)))
        .collect();
    ProperadMorphism { name: "Psi".into(), images }
}

pub fn fold(c: &Coproperad, omega: &DgProperad) -> ProperadMorphism {
    let n = c.dim();
    let images = (0..2 * n).map(|a| gen_image(omega, a % n)).collect();
    ProperadMorphism { name: "fold".into(), images }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coproperad::Atom;
    use crate::graphs::Reduced;

    fn gen(label: &str, outputs: usize, inputs: usize, degree: i32) -> Atom {
        Atom { label: label.into(), outputs, inputs, degree, weight: 1 }
    }

    fn binary(w: usize) -> Coproperad {
        Coproperad::cofree(&[gen("x", 1, 2, 1)], w, (1, w + 1), Reduced::Both).unwrap()
    }

    fn bialg(w: usize) -> Coproperad {
        Coproperad::cofree(&[gen("x", 1, 2, 1), gen("y", 2, 1, 1)], w, (2, 2), Reduced::Both).unwrap()
    }

    #[test]
    fn trivial_cobar_is_empty() {
        let c = Coproperad::trivial();
        let p = cobar(&c);
        assert!(p.gens.is_empty());
        assert!(p.check_d_squared().ok());
        let s = two_colored_strict(&c);
        assert_eq!(s.gens.len(), 1);
        assert!(s.relations().is_empty());
        let res = two_colored_resolution(&c);
        assert!(rho(&c, &res, &s).check_chain_map(&res, &s).ok());
    }

    #[test]
    fn cobar_differential_of_weight_two() {
        let c = binary(2);
        let p = cobar(&c);
        assert!(p.diff[0].is_zero());
        for a in 1..3 {
            assert_eq!(p.diff[a].len(), 1);
            let (g, k) = p.diff[a].iter().next().unwrap();
            assert_eq!(g.weight(), 2);
            assert_eq!(k.abs(), Q::one());
        }
    }

    #[test]
    fn d_squared_vanishes() {
        for c in [binary(2), binary(3), bialg(2), bialg(3)] {
            for p in [cobar(&c), two_colored_strict(&c), two_colored_resolution(&c), cylinder(&c), cobar_pair(&c)] {
                let r = p.check_d_squared();
                assert!(r.ok(), "{}: {:?}", p.name, r.failures);
            }
        }
    }

    #[test]
    fn sign_corruption_is_caught() {
        let c = binary(3);
        let mut p = cobar(&c);
        let a = (0..c.dim()).find(|&a| c.atoms[a].weight == 3).unwrap();
        let (g, k) = p.diff[a].iter().next().map(|(g, k)| (g.clone(), *k)).unwrap();
        p.diff[a].add_term(g, -k * Q::int(2));
        assert!(!p.check_d_squared().ok());
    }

    #[test]
    fn strict_relations_and_primitive_arrow() {
        let c = binary(2);
        let s = two_colored_strict(&c);
        assert_eq!(s.relations().len(), c.dim());
        let res = two_colored_resolution(&c);
        // d(x⁰₁) = s⁻¹x₀ over identities minus s⁻¹x₁ under identities
        let x01 = res.find(GenKind::Arrow(CDec::Atom(0))).unwrap();
        let d = &res.diff[x01];
        assert_eq!(d.len(), 2);
        assert_eq!(d.iter().map(|(_, k)| *k).fold(Q::zero(), |a, b| a + b), Q::zero());
        let id01 = res.find(GenKind::Arrow(CDec::Id)).unwrap();
        assert!(res.diff[id01].is_zero());
    }

    #[test]
    fn rho_phi_psi_are_chain_maps() {
        for c in [binary(3), bialg(2)] {
            let s = two_colored_strict(&c);
            let res = two_colored_resolution(&c);
            let r = rho(&c, &res, &s).check_chain_map(&res, &s);
            assert!(r.ok(), "{:?}", r.failures);
            let omega = cobar(&c);
            let pair = cobar_pair(&c);
            let cyl = cylinder(&c);
            let phi = cyl_incl(&c, &cyl);
            let psi = cyl_proj(&c, &omega);
            assert!(phi.check_chain_map(&pair, &cyl).ok());
            assert!(psi.check_chain_map(&cyl, &omega).ok());
            let comp = phi.then(&psi, &omega, "Psi.Phi");
            assert_eq!(comp.images, fold(&c, &omega).images);
        }
    }
}
