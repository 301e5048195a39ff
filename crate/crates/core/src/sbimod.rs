//! Multilinear maps between chain complexes, their composition along graphs,
//! and the two-level products of free S-bimodules.

use crate::exactlin::{koszul_sign, ChainComplex, Q};
use crate::graphs::{port, Dst, Graph, OrbitForm, Port, Src, Vertex};
use std::collections::{BTreeMap, BTreeSet};

pub type Tuple = Vec<u8>;

/// Homogeneous multilinear map `X^{⊗inputs} → Y^{⊗outputs}` where `X`, `Y`
/// are the spaces of colors `src` and `tgt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndMap {
    pub outputs: usize,
    pub inputs: usize,
    pub src: usize,
    pub tgt: usize,
    pub deg: i32,
    /// (input tuple, output tuple) → coefficient
    pub entries: BTreeMap<(Tuple, Tuple), Q>,
}

pub fn tuples(dim: usize, len: usize) -> Vec<Tuple> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..dim as u8).map(move |b| {
                    let mut t2 = t.clone();
                    t2.push(b);
                    t2
                })
            })
            .collect();
    }
    out
}

pub fn tuple_degree(space: &ChainComplex, t: &[u8]) -> i32 {
    t.iter().map(|&b| space.degrees[b as usize]).sum()
}

/// Koszul-signed differential of a tensor word: Σ ± (.. d y_i ..).
pub fn tensor_differential(space: &ChainComplex, t: &[u8]) -> Vec<(Tuple, Q)> {
    let mut out = Vec::new();
    let mut before = 0;
    for i in 0..t.len() {
        let sign = if before % 2 == 0 { Q::one() } else { -Q::one() };
        for &(j, c) in &space.diff[t[i] as usize] {
            let mut u = t.to_vec();
            u[i] = j as u8;
            out.push((u, sign * c));
        }
        before += space.degrees[t[i] as usize];
    }
    out
}

impl EndMap {
    pub fn zero(outputs: usize, inputs: usize, src: usize, tgt: usize, deg: i32) -> Self {
        EndMap { outputs, inputs, src, tgt, deg, entries: BTreeMap::new() }
    }

    pub fn identity(color: usize, space: &ChainComplex) -> Self {
        let mut m = EndMap::zero(1, 1, color, color, 0);
        for b in 0..space.dim() as u8 {
            m.entries.insert((vec![b], vec![b]), Q::one());
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_entry(&mut self, inp: Tuple, out: Tuple, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (inp, out);
        match self.entries.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.entries.remove(&key);
                }
            }
            None => {
                self.entries.insert(key, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &EndMap, c: Q) {
        for ((i, o), v) in &other.entries {
            self.add_entry(i.clone(), o.clone(), *v * c);
        }
    }

    pub fn scaled(&self, c: Q) -> EndMap {
        let mut m = EndMap { entries: BTreeMap::new(), ..self.clone() };
        m.add_scaled(self, c);
        m
    }

    /// Output terms on a basis input word.
    pub fn apply(&self, inp: &[u8]) -> impl Iterator<Item = (&Tuple, Q)> {
        let lo = (inp.to_vec(), Vec::new());
        let key = inp.to_vec();
        self.entries.range(lo..).take_while(move |((i, _), _)| *i == key).map(|((_, o), c)| (o, *c))
    }

    /// `∂φ = d ∘ φ − (−1)^{|φ|} φ ∘ d`
    pub fn differential(&self, spaces: &[ChainComplex]) -> EndMap {
        let (sx, sy) = (&spaces[self.src], &spaces[self.tgt]);
        let mut out = EndMap::zero(self.outputs, self.inputs, self.src, self.tgt, self.deg - 1);
        for ((i, o), c) in &self.entries {
            for (o2, c2) in tensor_differential(sy, o) {
                out.add_entry(i.clone(), o2, *c * c2);
            }
        }
        let sign = if self.deg % 2 == 0 { -Q::one() } else { Q::one() };
        for i in tuples(sx.dim(), self.inputs) {
            for (i2, c2) in tensor_differential(sx, &i) {
                for (o, c) in self.apply(&i2) {
                    out.add_entry(i.clone(), o.clone(), sign * c * c2);
                }
            }
        }
        out
    }

    /// Basis of Hom(X^{⊗n}, Y^{⊗m}): pairs of words, with their degrees.
    pub fn basis(outputs: usize, inputs: usize, sx: &ChainComplex, sy: &ChainComplex) -> Vec<(Tuple, Tuple, i32)> {
        let mut out = Vec::new();
        for i in tuples(sx.dim(), inputs) {
            for o in tuples(sy.dim(), outputs) {
                let d = tuple_degree(sy, &o) - tuple_degree(sx, &i);
                out.push((i.clone(), o, d));
            }
        }
        out
    }
}

/// Basis of the endomorphism bimodule in arity (m, n) with degrees.
pub fn end_bimodule(space: &ChainComplex, m: usize, n: usize) -> Vec<(Tuple, Tuple, i32)> {
    EndMap::basis(m, n, space, space)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Wire {
    Leg(usize),
    Out(Port),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Map(usize),
    Val(Wire, u8, i32),
}

/// Composite of the maps placed on the vertices of `g`, read as a string
/// diagram: the tensor `maps[0] ⊗ … ⊗ maps[k-1]` (in vertex order) is
/// applied to the input word, each map consuming its inputs once they are
/// available, with Koszul signs for every interchange.
pub fn compose_in_end<D: Clone + Ord>(g: &Graph<D>, maps: &[&EndMap], spaces: &[ChainComplex]) -> EndMap {
    let k = g.vertices.len();
    assert_eq!(maps.len(), k);
    let w = g.wiring();
    let in_colors: Vec<usize> = g.inputs.iter().map(|p| maps[p.v].src).collect();
    let out_colors: Vec<usize> = g.outputs.iter().map(|p| maps[p.v].tgt).collect();
    let (src, tgt) = (in_colors.first().copied().unwrap_or(0), out_colors.first().copied().unwrap_or(0));
    let deg = maps.iter().map(|m| m.deg).sum();
    let mut out = EndMap::zero(g.outputs.len(), g.inputs.len(), src, tgt, deg);
    let order = g.topo_order().expect("acyclic");
    let map_deg: Vec<i32> = maps.iter().map(|m| m.deg).collect();
    let out_leg: BTreeMap<Port, usize> = g.outputs.iter().enumerate().map(|(j, &p)| (p, j)).collect();

    let mut inputs_all = vec![Vec::new()];
    for &c in &in_colors {
        let d = spaces[c].dim() as u8;
        inputs_all = inputs_all
            .into_iter()
            .flat_map(|t: Tuple| {
                (0..d).map(move |b| {
                    let mut t2 = t.clone();
                    t2.push(b);
                    t2
                })
            })
            .collect();
    }

    for x in inputs_all {
        let mut start: Vec<Tok> = (0..k).map(Tok::Map).collect();
        for (i, &b) in x.iter().enumerate() {
            start.push(Tok::Val(Wire::Leg(i), b, spaces[in_colors[i]].degrees[b as usize]));
        }
        let mut states = vec![(start, Q::one())];
        for &u in &order {
            let mut next = Vec::new();
            for (toks, c) in states {
                let p = toks.iter().position(|t| *t == Tok::Map(u)).unwrap();
                let qs: Vec<usize> = w.src[u]
                    .iter()
                    .map(|s| {
                        let wire = match *s {
                            Src::Leg(i) => Wire::Leg(i),
                            Src::Out(a) => Wire::Out(a),
                        };
                        toks.iter().position(|t| matches!(t, Tok::Val(w2, _, _) if *w2 == wire)).unwrap()
                    })
                    .collect();
                let mut images = Vec::with_capacity(toks.len());
                for j in 0..toks.len() {
                    if qs.contains(&j) {
                        continue;
                    }
                    images.push(j);
                    if j == p {
                        images.extend_from_slice(&qs);
                    }
                }
                let parities: Vec<i32> = toks.iter().map(|t| tok_deg(t, &map_deg)).collect();
                let sign = koszul_sign(&images, &parities);
                let args: Tuple = qs
                    .iter()
                    .map(|&q| match toks[q] {
                        Tok::Val(_, b, _) => b,
                        _ => unreachable!(),
                    })
                    .collect();
                let pos = images.iter().position(|&j| j == p).unwrap();
                for (o, coeff) in maps[u].apply(&args) {
                    let mut t2: Vec<Tok> = Vec::with_capacity(toks.len());
                    for &j in &images[..pos] {
                        t2.push(toks[j].clone());
                    }
                    for (s, &b) in o.iter().enumerate() {
                        t2.push(Tok::Val(Wire::Out(port(u, s)), b, spaces[maps[u].tgt].degrees[b as usize]));
                    }
                    for &j in &images[pos + 1 + qs.len()..] {
                        t2.push(toks[j].clone());
                    }
                    next.push((t2, c * coeff * Q::sign(sign)));
                }
            }
            states = next;
        }
        for (toks, c) in states {
            let mut images = vec![0; toks.len()];
            let mut word = vec![0u8; toks.len()];
            for (j, t) in toks.iter().enumerate() {
                let Tok::Val(Wire::Out(a), b, _) = t else { unreachable!("bare wire") };
                let leg = out_leg[a];
                images[leg] = j;
                word[leg] = *b;
            }
            let parities: Vec<i32> = toks.iter().map(|t| tok_deg(t, &map_deg)).collect();
            let sign = koszul_sign(&images, &parities);
            out.add_entry(x.clone(), word, c * Q::sign(sign));
        }
    }
    out
}

fn tok_deg(t: &Tok, map_deg: &[i32]) -> i32 {
    match t {
        Tok::Map(v) => map_deg[*v],
        Tok::Val(_, _, d) => *d,
    }
}

/// Decoration of a vertex in a two-level product: an identity or a
/// generator of the bottom (resp. top) free S-bimodule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Id,
    Bottom(usize),
    Top(usize),
}

/// Vertex shape of a generator of a free S-bimodule.
pub type Shape = Vertex<usize>;

/// Canonical saturated two-level graphs spanning `(M ⊠ N)(m, n)` as a free
/// S-bimodule: bottom vertices from `m_gens` or identities, top vertices from
/// `n_gens` or identities, every wire crossing the middle exactly once.
pub fn boxtimes(m_gens: &[Shape], n_gens: &[Shape], arity: (usize, usize), max_vertices: usize) -> Vec<Graph<Slot>> {
    let bottom: Vec<Vertex<Slot>> = m_gens
        .iter()
        .map(|s| Vertex { dec: Slot::Bottom(s.dec), deg: s.deg, outputs: s.outputs, inputs: s.inputs })
        .chain(std::iter::once(id_vertex()))
        .collect();
    let top: Vec<Vertex<Slot>> = n_gens
        .iter()
        .map(|s| Vertex { dec: Slot::Top(s.dec), deg: s.deg, outputs: s.outputs, inputs: s.inputs })
        .chain(std::iter::once(id_vertex()))
        .collect();
    let mut found = BTreeSet::new();
    for nb in 1..max_vertices {
        for nt in 1..=max_vertices - nb {
            for bs in multisets(bottom.len(), nb) {
                let bv: Vec<Vertex<Slot>> = bs.iter().map(|&i| bottom[i].clone()).collect();
                if bv.iter().map(|v| v.outputs).sum::<usize>() != arity.0 {
                    continue;
                }
                let mid: usize = bv.iter().map(|v| v.inputs).sum();
                for ts in multisets(top.len(), nt) {
                    let tv: Vec<Vertex<Slot>> = ts.iter().map(|&i| top[i].clone()).collect();
                    if tv.iter().map(|v| v.inputs).sum::<usize>() != arity.1
                        || tv.iter().map(|v| v.outputs).sum::<usize>() != mid
                    {
                        continue;
                    }
                    for g in wirings(&bv, &tv) {
                        if !g.is_connected() {
                            continue;
                        }
                        if let Some(OrbitForm { graph, .. }) = g.canonical_orbit() {
                            found.insert(graph);
                        }
                    }
                }
            }
        }
    }
    found.into_iter().collect()
}

/// Part of `M ⊠ N` linear in the bottom: exactly one non-identity bottom vertex.
pub fn inf_left(m_gens: &[Shape], n_gens: &[Shape], arity: (usize, usize), max_vertices: usize) -> Vec<Graph<Slot>> {
    boxtimes(m_gens, n_gens, arity, max_vertices)
        .into_iter()
        .filter(|g| g.vertices.iter().filter(|v| matches!(v.dec, Slot::Bottom(_))).count() == 1)
        .filter(|g| !is_bottom_id_present(g))
        .collect()
}

/// Part of `M ⊠ N` linear in the top: exactly one non-identity top vertex.
pub fn inf_right(m_gens: &[Shape], n_gens: &[Shape], arity: (usize, usize), max_vertices: usize) -> Vec<Graph<Slot>> {
    boxtimes(m_gens, n_gens, arity, max_vertices)
        .into_iter()
        .filter(|g| g.vertices.iter().filter(|v| matches!(v.dec, Slot::Top(_))).count() == 1)
        .filter(|g| !is_top_id_present(g))
        .collect()
}

fn id_vertex() -> Vertex<Slot> {
    Vertex { dec: Slot::Id, deg: 0, outputs: 1, inputs: 1 }
}

fn is_bottom_id_present(g: &Graph<Slot>) -> bool {
    let w = g.wiring();
    g.vertices
        .iter()
        .enumerate()
        .any(|(v, x)| x.dec == Slot::Id && matches!(w.dst[v][0], Dst::Leg(_)))
}

fn is_top_id_present(g: &Graph<Slot>) -> bool {
    let w = g.wiring();
    g.vertices
        .iter()
        .enumerate()
        .any(|(v, x)| x.dec == Slot::Id && matches!(w.src[v][0], Src::Leg(_)))
}

fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All ways of plugging the top outputs bijectively into the bottom inputs.
fn wirings(bottom: &[Vertex<Slot>], top: &[Vertex<Slot>]) -> Vec<Graph<Slot>> {
    let nb = bottom.len();
    let b_in: Vec<Port> = (0..nb).flat_map(|v| (0..bottom[v].inputs).map(move |s| port(v, s))).collect();
    let t_out: Vec<Port> = (0..top.len()).flat_map(|v| (0..top[v].outputs).map(move |s| port(v + nb, s))).collect();
    let vertices: Vec<Vertex<Slot>> = bottom.iter().chain(top).cloned().collect();
    crate::graphs::injections(b_in.len(), t_out.len())
        .into_iter()
        .map(|perm| {
            let mut edges: Vec<(Port, Port)> = t_out.iter().zip(&perm).map(|(&a, &i)| (a, b_in[i])).collect();
            edges.sort();
            Graph {
                vertices: vertices.clone(),
                edges,
                inputs: (0..top.len()).flat_map(|v| (0..top[v].inputs).map(move |s| port(v + nb, s))).collect(),
                outputs: (0..nb).flat_map(|v| (0..bottom[v].outputs).map(move |s| port(v, s))).collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;

    fn line(deg1: i32) -> ChainComplex {
        ChainComplex::new(vec![0, deg1], vec![vec![], if deg1 == 1 { vec![(0, Q::one())] } else { vec![] }]).unwrap()
    }

    /// product on a 2-dim algebra: basis e0 (unit), e1; e1·e1 = 0
    fn dual_numbers(space: usize) -> EndMap {
        let mut m = EndMap::zero(1, 2, space, space, 0);
        m.entries.insert((vec![0, 0], vec![0]), Q::one());
        m.entries.insert((vec![0, 1], vec![1]), Q::one());
        m.entries.insert((vec![1, 0], vec![1]), Q::one());
        m
    }

    fn comb(slot: usize) -> Graph<u8> {
        Graph {
            vertices: vec![
                Vertex { dec: 0, deg: 0, outputs: 1, inputs: 2 },
                Vertex { dec: 0, deg: 0, outputs: 1, inputs: 2 },
            ],
            edges: vec![(port(1, 0), port(0, slot))],
            inputs: vec![port(1, 0), port(1, 1), port(0, 1 - slot)],
            outputs: vec![port(0, 0)],
        }
    }

    #[test]
    fn associativity_of_composites() {
        let sp = vec![line(1)];
        let m = dual_numbers(0);
        assert!(m.differential(&sp).is_zero(), "product is a chain map");
        let left = compose_in_end(&comb(0), &[&m, &m], &sp);
        // (x y) z vs x (y z): the second comb reads legs in the order (x, y, z) too
        let mut right_graph = comb(1);
        right_graph.inputs = vec![port(0, 0), port(1, 0), port(1, 1)];
        let right = compose_in_end(&right_graph, &[&m, &m], &sp);
        assert_eq!(left, right);
    }

    #[test]
    fn odd_maps_pick_up_koszul_signs() {
        let sp = vec![ChainComplex::graded(vec![0, 1])];
        let mut h = EndMap::zero(1, 1, 0, 0, 1);
        h.entries.insert((vec![0], vec![1]), Q::one());
        let mut k = EndMap::zero(1, 1, 0, 0, -1);
        k.entries.insert((vec![1], vec![0]), Q::one());
        let unary = |deg| Vertex { dec: 0u8, deg, outputs: 1, inputs: 1 };
        let two: Graph<u8> = Graph {
            vertices: vec![unary(-1), unary(1)],
            edges: vec![],
            inputs: vec![port(0, 0), port(1, 0)],
            outputs: vec![port(0, 0), port(1, 0)],
        };
        // (k ⊗ h)(e1 ⊗ e0) = (−1)^{|h||e1|} k e1 ⊗ h e0
        let r = compose_in_end(&two, &[&k, &h], &sp);
        assert_eq!(r.entries.get(&(vec![1, 0], vec![0, 1])), Some(&-Q::one()));
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn differential_squares_to_zero() {
        let sp = vec![line(1)];
        let mut m = EndMap::zero(1, 2, 0, 0, 1);
        m.entries.insert((vec![0, 0], vec![1]), Q::one());
        m.entries.insert((vec![1, 0], vec![1]), Q::int(3));
        let dd = m.differential(&sp).differential(&sp);
        assert!(dd.is_zero());
    }

    #[test]
    fn two_level_products_of_a_binary_generator() {
        let x = Shape { dec: 0, deg: 0, outputs: 1, inputs: 2 };
        // (1,3) with one x at the bottom and one x plus an identity on top: 2 orbits
        let b = boxtimes(std::slice::from_ref(&x), std::slice::from_ref(&x), (1, 3), 3);
        assert_eq!(b.len(), 2);
        assert_eq!(inf_left(std::slice::from_ref(&x), std::slice::from_ref(&x), (1, 3), 3).len(), 2);
        assert_eq!(inf_right(std::slice::from_ref(&x), std::slice::from_ref(&x), (1, 3), 4).len(), 0);
        assert_eq!(inf_right(std::slice::from_ref(&x), std::slice::from_ref(&x), (1, 2), 4).len(), 1);
        assert_eq!(end_bimodule(&line(1), 1, 2).len(), 8);
    }
}
