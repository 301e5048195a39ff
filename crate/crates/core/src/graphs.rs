//! Directed connected graphs with slot-ordered vertices and labeled legs.
//!
//! Vertex order is part of the data: it fixes the order of the tensor
//! factors decorating the vertices, so reordering vertices costs a Koszul
//! sign on the vertex degrees.

use crate::exactlin::{koszul_sign, subsets};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Display};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("port v{0}.{1} out of range")]
    BadPort(usize, String),
    #[error("slot v{0}.{1} used {2} times")]
    SlotUse(usize, String, usize),
    #[error("graph has a directed cycle")]
    Cyclic,
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex v{0} violates reducedness")]
    NotReduced(usize),
    #[error("graph would contain a bare wire")]
    BareWire,
    #[error("parse error on line `{0}`: {1}")]
    Parse(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex<D> {
    pub dec: D,
    pub deg: i32,
    pub outputs: usize,
    pub inputs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub v: usize,
    pub slot: usize,
}

pub fn port(v: usize, slot: usize) -> Port {
    Port { v, slot }
}

/// Which side of the slot order legs must be nonempty on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Reduced {
    /// every vertex has at least one input
    Left,
    /// every vertex has at least one output
    Right,
    Both,
}

impl Reduced {
    pub fn admits(self, outputs: usize, inputs: usize) -> bool {
        match self {
            Reduced::Left => inputs >= 1,
            Reduced::Right => outputs >= 1,
            Reduced::Both => inputs >= 1 && outputs >= 1,
        }
    }
}

/// Edges go from an output port of a vertex to an input port of another
/// vertex; values flow from inputs (top) to outputs (bottom).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph<D> {
    pub vertices: Vec<Vertex<D>>,
    pub edges: Vec<(Port, Port)>,
    pub inputs: Vec<Port>,
    pub outputs: Vec<Port>,
}

/// Where the value entering an input slot comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Src {
    Leg(usize),
    Out(Port),
}

/// Where the value leaving an output slot goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dst {
    Leg(usize),
    In(Port),
}

pub struct Wiring {
    pub src: Vec<Vec<Src>>,
    pub dst: Vec<Vec<Dst>>,
}

/// Canonical representative modulo relabeling of legs.
#[derive(Clone, Debug)]
pub struct OrbitForm<D> {
    pub graph: Graph<D>,
    pub sign: i32,
    /// old input leg `i` becomes canonical input leg `in_map[i]`
    pub in_map: Vec<usize>,
    pub out_map: Vec<usize>,
}

impl<D: Clone + Ord> Graph<D> {
    pub fn corolla(dec: D, deg: i32, outputs: usize, inputs: usize) -> Self {
        Graph {
            vertices: vec![Vertex { dec, deg, outputs, inputs }],
            edges: Vec::new(),
            inputs: (0..inputs).map(|s| port(0, s)).collect(),
            outputs: (0..outputs).map(|s| port(0, s)).collect(),
        }
    }

    pub fn map_decorations<E>(&self, f: impl Fn(&D) -> E) -> Graph<E> {
        Graph {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex { dec: f(&v.dec), deg: v.deg, outputs: v.outputs, inputs: v.inputs })
                .collect(),
            edges: self.edges.clone(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
        }
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.outputs.len(), self.inputs.len())
    }
    pub fn weight(&self) -> usize {
        self.vertices.len()
    }
    pub fn degree(&self) -> i32 {
        self.vertices.iter().map(|v| v.deg).sum()
    }
    pub fn degrees(&self) -> Vec<i32> {
        self.vertices.iter().map(|v| v.deg).collect()
    }

    /// Wiring tables; assumes every slot is used once.
    pub fn wiring(&self) -> Wiring {
        let mut src: Vec<Vec<Src>> = self.vertices.iter().map(|v| vec![Src::Leg(usize::MAX); v.inputs]).collect();
        let mut dst: Vec<Vec<Dst>> = self.vertices.iter().map(|v| vec![Dst::Leg(usize::MAX); v.outputs]).collect();
        for &(a, b) in &self.edges {
            src[b.v][b.slot] = Src::Out(a);
            dst[a.v][a.slot] = Dst::In(b);
        }
        for (i, p) in self.inputs.iter().enumerate() {
            src[p.v][p.slot] = Src::Leg(i);
        }
        for (i, p) in self.outputs.iter().enumerate() {
            dst[p.v][p.slot] = Dst::Leg(i);
        }
        Wiring { src, dst }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.vertices.len();
        let mut in_use: Vec<Vec<usize>> = self.vertices.iter().map(|v| vec![0; v.inputs]).collect();
        let mut out_use: Vec<Vec<usize>> = self.vertices.iter().map(|v| vec![0; v.outputs]).collect();
        let mut mark_in = |p: Port| -> Result<(), GraphError> {
            if p.v >= n || p.slot >= self.vertices[p.v].inputs {
                return Err(GraphError::BadPort(p.v, format!("i{}", p.slot)));
            }
            in_use[p.v][p.slot] += 1;
            Ok(())
        };
        for &(_, b) in &self.edges {
            mark_in(b)?;
        }
        for &p in &self.inputs {
            mark_in(p)?;
        }
        let mut mark_out = |p: Port| -> Result<(), GraphError> {
            if p.v >= n || p.slot >= self.vertices[p.v].outputs {
                return Err(GraphError::BadPort(p.v, format!("o{}", p.slot)));
            }
            out_use[p.v][p.slot] += 1;
            Ok(())
        };
        for &(a, _) in &self.edges {
            mark_out(a)?;
        }
        for &p in &self.outputs {
            mark_out(p)?;
        }
        for v in 0..n {
            for (s, &c) in in_use[v].iter().enumerate() {
                if c != 1 {
                    return Err(GraphError::SlotUse(v, format!("i{s}"), c));
                }
            }
            for (s, &c) in out_use[v].iter().enumerate() {
                if c != 1 {
                    return Err(GraphError::SlotUse(v, format!("o{s}"), c));
                }
            }
        }
        if self.topo_order().is_none() {
            return Err(GraphError::Cyclic);
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(())
    }

    pub fn check_reduced(&self, r: Reduced) -> Result<(), GraphError> {
        match self.vertices.iter().position(|v| !r.admits(v.outputs, v.inputs)) {
            Some(v) => Err(GraphError::NotReduced(v)),
            None => Ok(()),
        }
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let adj = self.undirected();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn undirected(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a.v].push(b.v);
            adj[b.v].push(a.v);
        }
        adj
    }

    /// Vertices ordered so that every vertex comes after all vertices feeding it.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let n = self.vertices.len();
        let mut indeg = vec![0; n];
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            indeg[b.v] += 1;
            succ[a.v].push(b.v);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = ready.pop() {
            order.push(u);
            for &w in &succ[u] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// `reach[u][w]`: there is a directed path from `u` to `w` (u above w).
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut reach = vec![vec![false; n]; n];
        let order = self.topo_order().expect("acyclic");
        let mut succ = vec![BTreeSet::new(); n];
        for &(a, b) in &self.edges {
            succ[a.v].insert(b.v);
        }
        for &u in order.iter().rev() {
            for &w in &succ[u] {
                reach[u][w] = true;
                let row = reach[w].clone();
                for (x, r) in row.into_iter().enumerate() {
                    if r {
                        reach[u][x] = true;
                    }
                }
            }
        }
        reach
    }

    /// Renumber vertices: new vertex `i` is old vertex `order[i]`.
    /// Returns the graph and the Koszul sign of the reordering.
    pub fn permute(&self, order: &[usize]) -> (Graph<D>, i32) {
        let mut new_of = vec![0; order.len()];
        for (i, &o) in order.iter().enumerate() {
            new_of[o] = i;
        }
        let mp = |p: Port| port(new_of[p.v], p.slot);
        let mut edges: Vec<(Port, Port)> = self.edges.iter().map(|&(a, b)| (mp(a), mp(b))).collect();
        edges.sort();
        let g = Graph {
            vertices: order.iter().map(|&o| self.vertices[o].clone()).collect(),
            edges,
            inputs: self.inputs.iter().map(|&p| mp(p)).collect(),
            outputs: self.outputs.iter().map(|&p| mp(p)).collect(),
        };
        (g, koszul_sign(order, &self.degrees()))
    }

    fn traversal(&self, seeds: &[usize]) -> Vec<usize> {
        let n = self.vertices.len();
        let w = self.wiring();
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        let all_seeds = seeds.iter().copied().chain(0..n);
        for s in all_seeds {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for d in &w.dst[u] {
                    if let Dst::In(p) = d {
                        if !seen[p.v] {
                            seen[p.v] = true;
                            queue.push_back(p.v);
                        }
                    }
                }
                for s in &w.src[u] {
                    if let Src::Out(p) = s {
                        if !seen[p.v] {
                            seen[p.v] = true;
                            queue.push_back(p.v);
                        }
                    }
                }
            }
        }
        order
    }

    /// Canonical vertex order for a graph with labeled legs, found by a
    /// breadth-first walk anchored at the legs. Returns the reordered graph
    /// and the Koszul sign relating the two vertex orders.
    pub fn canonical(&self) -> (Graph<D>, i32) {
        if self.inputs.is_empty() && self.outputs.is_empty() {
            let f = self.canonical_orbit().expect("odd automorphism on a graph without legs");
            return (f.graph, f.sign);
        }
        let seeds: Vec<usize> = self.inputs.iter().chain(&self.outputs).map(|p| p.v).collect();
        let order = self.traversal(&seeds);
        self.permute(&order)
    }

    /// Canonical representative modulo relabeling of legs. `None` when the
    /// graph has an automorphism acting by an odd Koszul sign (the element
    /// then vanishes).
    pub fn canonical_orbit(&self) -> Option<OrbitForm<D>> {
        let n = self.vertices.len();
        let min_key = self.vertices.iter().map(|v| (&v.dec, v.deg, v.outputs, v.inputs)).min()?;
        let mut best: Option<(Graph<D>, i32, Vec<usize>)> = None;
        let mut odd_aut = false;
        for s in 0..n {
            let v = &self.vertices[s];
            if (&v.dec, v.deg, v.outputs, v.inputs) != min_key {
                continue;
            }
            let order = self.traversal(&[s]);
            let (mut g, sign) = self.permute(&order);
            g.inputs.sort();
            g.outputs.sort();
            match &best {
                Some((b, bs, _)) if *b == g => {
                    if *bs != sign {
                        odd_aut = true;
                    }
                }
                Some((b, _, _)) if *b < g => {}
                _ => best = Some((g, sign, order)),
            }
        }
        if odd_aut {
            return None;
        }
        let (graph, sign, order) = best?;
        let mut new_of = vec![0; n];
        for (i, &o) in order.iter().enumerate() {
            new_of[o] = i;
        }
        let leg_map = |legs: &[Port], sorted: &[Port]| -> Vec<usize> {
            legs.iter()
                .map(|p| sorted.iter().position(|q| *q == port(new_of[p.v], p.slot)).unwrap())
                .collect()
        };
        let in_map = leg_map(&self.inputs, &graph.inputs);
        let out_map = leg_map(&self.outputs, &graph.outputs);
        Some(OrbitForm { graph, sign, in_map, out_map })
    }

    /// Replace vertex `v` by the graph `h`, matching the slots of `v` with
    /// the legs of `h` in order. The vertices of `h` take the place of `v`
    /// in the vertex order.
    pub fn substitute(&self, v: usize, h: &Graph<D>) -> Graph<D> {
        let k = h.vertices.len();
        assert!(k >= 1, "substituting an empty graph");
        assert_eq!(h.arity(), (self.vertices[v].outputs, self.vertices[v].inputs));
        let mp = |u: usize| if u < v { u } else { u + k - 1 };
        let hp = |p: Port| port(p.v + v, p.slot);
        let mut vertices = Vec::with_capacity(self.vertices.len() + k - 1);
        vertices.extend_from_slice(&self.vertices[..v]);
        vertices.extend(h.vertices.iter().cloned());
        vertices.extend_from_slice(&self.vertices[v + 1..]);
        let mut edges = Vec::new();
        for &(a, b) in &self.edges {
            let a2 = if a.v == v { hp(h.outputs[a.slot]) } else { port(mp(a.v), a.slot) };
            let b2 = if b.v == v { hp(h.inputs[b.slot]) } else { port(mp(b.v), b.slot) };
            edges.push((a2, b2));
        }
        edges.extend(h.edges.iter().map(|&(a, b)| (hp(a), hp(b))));
        edges.sort();
        let inputs = self
            .inputs
            .iter()
            .map(|&p| if p.v == v { hp(h.inputs[p.slot]) } else { port(mp(p.v), p.slot) })
            .collect();
        let outputs = self
            .outputs
            .iter()
            .map(|&p| if p.v == v { hp(h.outputs[p.slot]) } else { port(mp(p.v), p.slot) })
            .collect();
        Graph { vertices, edges, inputs, outputs }
    }

    /// Delete (1,1) vertices selected by `is_unit`, joining their wires.
    pub fn remove_units(&self, is_unit: impl Fn(&Vertex<D>) -> bool) -> Result<Graph<D>, GraphError> {
        let mut g = self.clone();
        while let Some(u) = g.vertices.iter().position(|v| v.inputs == 1 && v.outputs == 1 && is_unit(v)) {
            let w = g.wiring();
            let (s, d) = (w.src[u][0], w.dst[u][0]);
            let mut edges: Vec<(Port, Port)> = g.edges.iter().copied().filter(|&(a, b)| a.v != u && b.v != u).collect();
            match (s, d) {
                (Src::Leg(_), Dst::Leg(_)) => return Err(GraphError::BareWire),
                (Src::Out(a), Dst::In(b)) => edges.push((a, b)),
                (Src::Leg(i), Dst::In(b)) => g.inputs[i] = b,
                (Src::Out(a), Dst::Leg(j)) => g.outputs[j] = a,
            }
            g.edges = edges;
            g.vertices.remove(u);
            let fix = |p: Port| if p.v > u { port(p.v - 1, p.slot) } else { p };
            g.edges = g.edges.iter().map(|&(a, b)| (fix(a), fix(b))).collect();
            g.edges.sort();
            g.inputs = g.inputs.iter().map(|&p| fix(p)).collect();
            g.outputs = g.outputs.iter().map(|&p| fix(p)).collect();
        }
        Ok(g)
    }

    /// Minimal, over placements of the vertices on horizontal levels, of the
    /// largest number of wires crossing a horizontal line (the lines above
    /// and below everything included).
    pub fn size(&self) -> usize {
        let n = self.vertices.len();
        if n == 0 {
            return 0;
        }
        let mut level = vec![1usize; n];
        let mut best = usize::MAX;
        loop {
            if self.edges.iter().all(|&(a, b)| level[a.v] > level[b.v]) {
                let mut worst = 0;
                for gap in 0..=n {
                    let mut c = self.edges.iter().filter(|&&(a, b)| level[b.v] <= gap && gap < level[a.v]).count();
                    c += self.inputs.iter().filter(|p| level[p.v] <= gap).count();
                    c += self.outputs.iter().filter(|p| level[p.v] > gap).count();
                    worst = worst.max(c);
                }
                best = best.min(worst);
            }
            let mut i = 0;
            while i < n {
                level[i] += 1;
                if level[i] <= n {
                    break;
                }
                level[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        best
    }
}

/// Every vertex-connected graph built from the given vertex shapes with at
/// most `max_weight` vertices and global arity within `bound` (outputs,
/// inputs), one representative per class modulo leg relabeling.
pub fn enumerate_graphs<D: Clone + Ord>(
    shapes: &[Vertex<D>],
    max_weight: usize,
    bound: (usize, usize),
) -> Vec<Graph<D>> {
    let mut found: BTreeSet<Graph<D>> = BTreeSet::new();
    let mut layer: BTreeSet<Graph<D>> = BTreeSet::new();
    for s in shapes {
        if let Some(f) = Graph::corolla(s.dec.clone(), s.deg, s.outputs, s.inputs).canonical_orbit() {
            layer.insert(f.graph);
        }
    }
    for w in 1..=max_weight {
        found.extend(layer.iter().cloned());
        if w == max_weight {
            break;
        }
        let mut next = BTreeSet::new();
        for g in &layer {
            for s in shapes {
                for h in attach(g, s) {
                    if let Some(f) = h.canonical_orbit() {
                        next.insert(f.graph);
                    }
                }
            }
        }
        layer = next;
    }
    found.into_iter().filter(|g| g.outputs.len() <= bound.0 && g.inputs.len() <= bound.1).collect()
}

/// All graphs obtained by adding one vertex of shape `s` joined to `g` by at
/// least one edge.
fn attach<D: Clone + Ord>(g: &Graph<D>, s: &Vertex<D>) -> Vec<Graph<D>> {
    let nv = g.vertices.len();
    let reach = g.reachability();
    let mut out = Vec::new();
    // new vertex outputs feed free inputs of g; new vertex inputs read free outputs of g
    for k_out in 0..=s.outputs.min(g.inputs.len()) {
        for my_out in subsets(s.outputs, k_out) {
            for their_in in injections(g.inputs.len(), k_out) {
                for k_in in 0..=s.inputs.min(g.outputs.len()) {
                    if k_out + k_in == 0 {
                        continue;
                    }
                    for my_in in subsets(s.inputs, k_in) {
                        for their_out in injections(g.outputs.len(), k_in) {
                            // cycle: some fed vertex reaches some feeding vertex
                            let fed: Vec<usize> = their_in.iter().map(|&i| g.inputs[i].v).collect();
                            let feeding: Vec<usize> = their_out.iter().map(|&j| g.outputs[j].v).collect();
                            if fed.iter().any(|&a| feeding.iter().any(|&b| a == b || reach[a][b])) {
                                continue;
                            }
                            let mut h = g.clone();
                            h.vertices.push(s.clone());
                            for (&o, &i) in my_out.iter().zip(&their_in) {
                                h.edges.push((port(nv, o), g.inputs[i]));
                            }
                            for (&i, &j) in my_in.iter().zip(&their_out) {
                                h.edges.push((g.outputs[j], port(nv, i)));
                            }
                            h.edges.sort();
                            h.inputs = g
                                .inputs
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| !their_in.contains(i))
                                .map(|(_, &p)| p)
                                .chain((0..s.inputs).filter(|i| !my_in.contains(i)).map(|i| port(nv, i)))
                                .collect();
                            h.outputs = g
                                .outputs
                                .iter()
                                .enumerate()
                                .filter(|(j, _)| !their_out.contains(j))
                                .map(|(_, &p)| p)
                                .chain((0..s.outputs).filter(|o| !my_out.contains(o)).map(|o| port(nv, o)))
                                .collect();
                            out.push(h);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Ordered selections of `k` distinct elements of `0..n`.
pub fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !cur.contains(&i) {
                cur.push(i);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, k, &mut cur, &mut out);
    out
}

impl<D: Display> Graph<D> {
    /// Line-oriented text form:
    /// `v0: out=1 in=2 dec=x deg=1`, `e: v1.o0 -> v0.i0`, `in: ...`, `out: ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            s += &format!("v{i}: out={} in={} dec={} deg={}\n", v.outputs, v.inputs, v.dec, v.deg);
        }
        for (a, b) in &self.edges {
            s += &format!("e: v{}.o{} -> v{}.i{}\n", a.v, a.slot, b.v, b.slot);
        }
        let legs = |ps: &[Port], c: char| ps.iter().map(|p| format!(" v{}.{c}{}", p.v, p.slot)).collect::<String>();
        s += &format!("in:{}\n", legs(&self.inputs, 'i'));
        s += &format!("out:{}\n", legs(&self.outputs, 'o'));
        s
    }

    /// Text form on one line, lines joined by `; `.
    pub fn to_line(&self) -> String {
        self.to_text().trim_end().replace('\n', "; ")
    }
}

impl<D: FromStr> Graph<D> {
    /// Parse the text form (newlines or `;` separate lines).
    pub fn from_text(text: &str) -> Result<Graph<D>, GraphError> {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut inputs = None;
        let mut outputs = None;
        for raw in text.split(['\n', ';']) {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| GraphError::Parse(line.to_string(), m.to_string());
            let (head, rest) = line.split_once(':').ok_or_else(|| err("missing `:`"))?;
            let head = head.trim();
            if head == "in" || head == "out" {
                let kind = if head == "in" { 'i' } else { 'o' };
                let ps = rest
                    .split_whitespace()
                    .map(|t| parse_port(t, kind).ok_or_else(|| err("bad leg")))
                    .collect::<Result<Vec<_>, _>>()?;
                if head == "in" {
                    inputs = Some(ps);
                } else {
                    outputs = Some(ps);
                }
            } else if head == "e" {
                let (a, b) = rest.split_once("->").ok_or_else(|| err("edge needs `->`"))?;
                let a = parse_port(a.trim(), 'o').ok_or_else(|| err("bad edge source"))?;
                let b = parse_port(b.trim(), 'i').ok_or_else(|| err("bad edge target"))?;
                edges.push((a, b));
            } else if let Some(idx) = head.strip_prefix('v') {
                let idx: usize = idx.parse().map_err(|_| err("bad vertex index"))?;
                if idx != vertices.len() {
                    return Err(err("vertices must be listed in order"));
                }
                let mut fields = BTreeMap::new();
                for tok in rest.split_whitespace() {
                    let (k, v) = tok.split_once('=').ok_or_else(|| err("expected key=value"))?;
                    fields.insert(k, v);
                }
                let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(&format!("missing {k}")));
                let num = |k: &str| -> Result<usize, GraphError> { get(k)?.parse().map_err(|_| err(k)) };
                vertices.push(Vertex {
                    outputs: num("out")?,
                    inputs: num("in")?,
                    deg: get("deg")?.parse().map_err(|_| err("deg"))?,
                    dec: get("dec")?.parse().map_err(|_| err("dec"))?,
                });
            } else {
                return Err(err("unknown line"));
            }
        }
        edges.sort();
        let missing = |k: &str| GraphError::Parse(text.to_string(), format!("missing `{k}:` line"));
        Ok(Graph {
            vertices,
            edges,
            inputs: inputs.ok_or_else(|| missing("in"))?,
            outputs: outputs.ok_or_else(|| missing("out"))?,
        })
    }
}

fn parse_port(t: &str, kind: char) -> Option<Port> {
    let t = t.strip_prefix('v')?;
    let (v, s) = t.split_once('.')?;
    let s = s.strip_prefix(kind)?;
    Some(port(v.parse().ok()?, s.parse().ok()?))
}

impl<D: Display> Display for Graph<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_line())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> Vertex<String> {
        Vertex { dec: "x".into(), deg: 1, outputs: 1, inputs: 2 }
    }

    /// x on top feeding input slot `slot` of x below
    fn comb(slot: usize) -> Graph<String> {
        let g = Graph {
            vertices: vec![x(), x()],
            edges: vec![(port(1, 0), port(0, slot))],
            inputs: vec![port(1, 0), port(1, 1), port(0, 1 - slot)],
            outputs: vec![port(0, 0)],
        };
        g.validate().unwrap();
        g
    }

    #[test]
    fn text_round_trip() {
        let g = comb(0);
        let t = g.to_text();
        assert_eq!(t, "v0: out=1 in=2 dec=x deg=1\nv1: out=1 in=2 dec=x deg=1\ne: v1.o0 -> v0.i0\nin: v1.i0 v1.i1 v0.i1\nout: v0.o0\n");
        let back: Graph<String> = Graph::from_text(&t).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), t);
        let one_line: Graph<String> = Graph::from_text(&g.to_line()).unwrap();
        assert_eq!(one_line, g);
    }

    #[test]
    fn validation_rejects_bad_graphs() {
        let mut g = comb(0);
        g.inputs.pop();
        assert!(matches!(g.validate(), Err(GraphError::SlotUse(..))));
        let cyc: Graph<String> = Graph {
            vertices: vec![
                Vertex { dec: "a".into(), deg: 0, outputs: 2, inputs: 2 },
                Vertex { dec: "a".into(), deg: 0, outputs: 2, inputs: 2 },
            ],
            edges: vec![(port(0, 0), port(1, 0)), (port(1, 0), port(0, 0))],
            inputs: vec![port(0, 1), port(1, 1)],
            outputs: vec![port(0, 1), port(1, 1)],
        };
        assert_eq!(cyc.validate(), Err(GraphError::Cyclic));
        let zero_in: Graph<String> = Graph::corolla("u".into(), 0, 1, 0);
        assert!(zero_in.check_reduced(Reduced::Left).is_err());
        assert!(zero_in.check_reduced(Reduced::Right).is_ok());
    }

    #[test]
    fn canonical_forms_are_invariant() {
        let g = comb(1);
        let (c, s) = g.canonical();
        let (p, ps) = g.permute(&[1, 0]);
        assert_eq!(ps, -1);
        let (c2, s2) = p.canonical();
        assert_eq!(c, c2);
        assert_eq!(s, s2 * ps);
        assert_eq!(c.canonical(), (c.clone(), 1));
    }

    #[test]
    fn orbit_form_forgets_leg_order() {
        let mut g = comb(0);
        g.inputs.reverse();
        let f = g.canonical_orbit().unwrap();
        let f0 = comb(0).canonical_orbit().unwrap();
        assert_eq!(f.graph, f0.graph);
        assert_ne!(comb(1).canonical_orbit().unwrap().graph, f0.graph);
        let mut seen = f.in_map.clone();
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2]);
    }

    fn cherry() -> Graph<String> {
        Graph {
            vertices: vec![x(), x(), x()],
            edges: vec![(port(1, 0), port(0, 0)), (port(2, 0), port(0, 1))],
            inputs: vec![port(1, 0), port(1, 1), port(2, 0), port(2, 1)],
            outputs: vec![port(0, 0)],
        }
    }

    #[test]
    fn substitution_builds_combs() {
        let c = Graph::corolla("y".to_string(), 0, 1, 3);
        let g = c.substitute(0, &comb(0));
        assert_eq!(g, comb(0));
        let mut big = cherry();
        big.vertices[1] = Vertex { dec: "y".into(), deg: 0, outputs: 1, inputs: 3 };
        big.inputs = vec![port(1, 0), port(1, 1), port(1, 2), port(2, 0), port(2, 1)];
        let h = big.substitute(1, &comb(1));
        h.validate().unwrap();
        assert_eq!(h.arity(), (1, 5));
        assert_eq!(h.weight(), 4);
    }

    #[test]
    fn size_of_small_graphs() {
        assert_eq!(Graph::corolla("x".to_string(), 1, 1, 2).size(), 2);
        assert_eq!(comb(0).size(), 3);
        // two vertices joined by two parallel edges: the middle line has two wires
        let g: Graph<String> = Graph {
            vertices: vec![
                Vertex { dec: "y".into(), deg: 0, outputs: 1, inputs: 2 },
                Vertex { dec: "x".into(), deg: 0, outputs: 2, inputs: 1 },
            ],
            edges: vec![(port(1, 0), port(0, 0)), (port(1, 1), port(0, 1))],
            inputs: vec![port(1, 0)],
            outputs: vec![port(0, 0)],
        };
        g.validate().unwrap();
        assert_eq!(g.size(), 2);
    }

    /// Four vertices on four levels: the top one feeds the right one twice
    /// and the left one once; left and right feed the bottom one.
    pub fn four_level_example() -> Graph<String> {
        let v = |d: &str, outputs, inputs| Vertex { dec: d.to_string(), deg: 0, outputs, inputs };
        let g = Graph {
            vertices: vec![v("t", 3, 2), v("l", 2, 3), v("r", 1, 2), v("b", 2, 2)],
            edges: vec![
                (port(0, 0), port(1, 0)),
                (port(0, 1), port(2, 0)),
                (port(0, 2), port(2, 1)),
                (port(1, 0), port(3, 0)),
                (port(2, 0), port(3, 1)),
            ],
            inputs: vec![port(1, 1), port(1, 2), port(0, 0), port(0, 1)],
            outputs: vec![port(1, 1), port(3, 0), port(3, 1)],
        };
        g.validate().unwrap();
        g
    }

    #[test]
    fn four_level_example_has_weight_four_and_size_five() {
        let g = four_level_example();
        assert_eq!(g.weight(), 4);
        assert_eq!(g.size(), 5);
    }

    #[test]
    fn binary_tree_with_four_leaves_has_size_four() {
        let v = |outputs, inputs| Vertex { dec: "x".to_string(), deg: 0, outputs, inputs };
        let g = Graph {
            vertices: vec![v(1, 2), v(1, 2), v(1, 2)],
            edges: vec![(port(0, 0), port(2, 0)), (port(1, 0), port(2, 1))],
            inputs: vec![port(0, 0), port(0, 1), port(1, 0), port(1, 1)],
            outputs: vec![port(2, 0)],
        };
        g.validate().unwrap();
        assert_eq!(g.size(), 4);
        assert_eq!(Graph::corolla("i".to_string(), 0, 1, 1).size(), 1);
    }

    #[test]
    fn enumeration_counts_binary_trees() {
        let gs = enumerate_graphs(&[x()], 1, (3, 3));
        assert_eq!(gs.len(), 1);
        let gs = enumerate_graphs(&[x()], 2, (3, 3));
        assert_eq!(gs.len(), 3);
        let gs = enumerate_graphs(&[x()], 3, (1, 4));
        // slot-ordered binary trees are planar trees: Catalan numbers
        assert_eq!(gs.iter().filter(|g| g.weight() == 3).count(), 5);
    }

    #[test]
    fn remove_units_joins_wires() {
        let idv = Vertex { dec: "id".to_string(), deg: 0, outputs: 1, inputs: 1 };
        let mut g = comb(0);
        g.vertices.push(idv.clone());
        g.inputs[2] = port(2, 0);
        g.edges.push((port(2, 0), port(0, 1)));
        g.edges.sort();
        g.validate().unwrap();
        let r = g.remove_units(|v| v.dec == "id").unwrap();
        assert_eq!(r, comb(0));
        let wire: Graph<String> = Graph::corolla("id".into(), 0, 1, 1);
        assert_eq!(wire.remove_units(|v| v.dec == "id"), Err(GraphError::BareWire));
    }

    proptest! {
        #[test]
        fn canonical_is_invariant_under_vertex_renumbering(seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = cherry();
            let mut order: Vec<usize> = (0..g.weight()).collect();
            order.shuffle(&mut rng);
            let (p, ps) = g.permute(&order);
            let (c1, s1) = g.canonical();
            let (c2, s2) = p.canonical();
            prop_assert_eq!(&c1, &c2);
            prop_assert_eq!(s1, s2 * ps);
            let o1 = g.canonical_orbit().unwrap();
            let o2 = p.canonical_orbit().unwrap();
            prop_assert_eq!(o1.graph, o2.graph);
            prop_assert_eq!(o1.sign, o2.sign * ps);
        }
    }
}
