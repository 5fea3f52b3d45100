//! Weighted marked graphs in the flag formalism.
//!
//! Flags are numbered as follows: edge `i` owns flags `2i` (rooted at its first
//! endpoint) and `2i + 1` (rooted at its second endpoint); legs follow as flags
//! `2E + k`, where legs are sorted by label.

mod canonical;
mod enumerate;
mod iso;

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub use canonical::{canonical_form, canonical_graph, to_canonical, CanonicalForm};
pub use enumerate::{enumerate_maximal, enumerate_stable};
pub use iso::{automorphisms, first_isomorphism, isomorphisms, morphisms};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkedGraph {
    weights: Vec<u32>,
    edges: Vec<(usize, usize)>,
    /// `(label, vertex)`, sorted by label.
    legs: Vec<(u32, usize)>,
}

impl MarkedGraph {
    pub fn new(weights: Vec<u32>, edges: Vec<(usize, usize)>, mut legs: Vec<(u32, usize)>) -> Result<Self> {
        let nv = weights.len();
        if nv == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        if edges.iter().any(|&(a, b)| a >= nv || b >= nv) || legs.iter().any(|&(_, v)| v >= nv) {
            return Err(Error::InvalidGraph("vertex index out of range".into()));
        }
        legs.sort();
        if legs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidGraph("leg labels must be distinct".into()));
        }
        let g = MarkedGraph { weights, edges, legs };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn num_flags(&self) -> usize {
        2 * self.edges.len() + self.legs.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weights[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn legs(&self) -> &[(u32, usize)] {
        &self.legs
    }

    pub fn labels(&self) -> Vec<u32> {
        self.legs.iter().map(|l| l.0).collect()
    }

    pub fn leg_flag(&self, label: u32) -> Option<usize> {
        self.legs.iter().position(|l| l.0 == label).map(|k| 2 * self.edges.len() + k)
    }

    pub fn leg_vertex(&self, label: u32) -> Option<usize> {
        self.legs.iter().find(|l| l.0 == label).map(|l| l.1)
    }

    pub fn root(&self, flag: usize) -> usize {
        let e2 = 2 * self.edges.len();
        if flag < e2 {
            let (a, b) = self.edges[flag / 2];
            if flag % 2 == 0 {
                a
            } else {
                b
            }
        } else {
            self.legs[flag - e2].1
        }
    }

    /// The flag paired with `flag`; legs are fixed points.
    pub fn involution(&self, flag: usize) -> usize {
        if flag < 2 * self.edges.len() {
            flag ^ 1
        } else {
            flag
        }
    }

    pub fn edge_of_flag(&self, flag: usize) -> Option<usize> {
        (flag < 2 * self.edges.len()).then_some(flag / 2)
    }

    pub fn leg_label_of_flag(&self, flag: usize) -> Option<u32> {
        let e2 = 2 * self.edges.len();
        (flag >= e2).then(|| self.legs[flag - e2].0)
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].0 == self.edges[e].1
    }

    /// Flags rooted at `v`, in increasing order.
    pub fn flags_at(&self, v: usize) -> Vec<usize> {
        (0..self.num_flags()).filter(|&f| self.root(f) == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        let e = self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum::<usize>();
        e + self.legs.iter().filter(|l| l.1 == v).count()
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count()
    }

    /// Number of edges joining `a` and `b` (loops when `a == b`).
    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.edges.iter().filter(|&&(x, y)| (x == a && y == b) || (x == b && y == a)).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    pub fn b1(&self) -> u32 {
        (self.edges.len() + 1 - self.weights.len()) as u32
    }

    pub fn genus(&self) -> u32 {
        self.b1() + self.weights.iter().sum::<u32>()
    }

    pub fn is_stable_at(&self, v: usize) -> bool {
        2 * self.weights[v] as i64 - 2 + self.valence(v) as i64 > 0
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| self.is_stable_at(v))
    }

    /// `g/S` together with the contraction morphism.
    pub fn contract(&self, s: &[usize]) -> (MarkedGraph, GraphMorphism) {
        let s: BTreeSet<usize> = s.iter().copied().collect();
        let nv = self.num_vertices();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &e in &s {
            let (a, b) = self.edges[e];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                parent[hi] = lo;
            }
        }
        // component representatives are minimal vertex indices, so ordering by
        // representative orders components by their smallest vertex
        let reps: Vec<usize> = (0..nv).map(|v| find(&mut parent, v)).collect();
        let mut order: Vec<usize> = reps.clone();
        order.sort();
        order.dedup();
        let vertex_map: Vec<usize> = reps.iter().map(|r| order.binary_search(r).unwrap()).collect();
        let mut weights = vec![0u32; order.len()];
        let mut nverts = vec![0i64; order.len()];
        let mut nedges = vec![0i64; order.len()];
        for v in 0..nv {
            weights[vertex_map[v]] += self.weights[v];
            nverts[vertex_map[v]] += 1;
        }
        for &e in &s {
            nedges[vertex_map[self.edges[e].0]] += 1;
        }
        for c in 0..order.len() {
            weights[c] += (nedges[c] - nverts[c] + 1) as u32;
        }
        let kept: Vec<usize> = (0..self.num_edges()).filter(|e| !s.contains(e)).collect();
        let edges: Vec<(usize, usize)> = kept.iter().map(|&e| (vertex_map[self.edges[e].0], vertex_map[self.edges[e].1])).collect();
        let legs: Vec<(u32, usize)> = self.legs.iter().map(|&(l, v)| (l, vertex_map[v])).collect();
        let target = MarkedGraph { weights, edges, legs };
        let mut flag_map = vec![None; self.num_flags()];
        for (i, &e) in kept.iter().enumerate() {
            flag_map[2 * e] = Some(2 * i);
            flag_map[2 * e + 1] = Some(2 * i + 1);
        }
        let e2 = 2 * self.num_edges();
        for k in 0..self.num_legs() {
            flag_map[e2 + k] = Some(2 * kept.len() + k);
        }
        let m = GraphMorphism { source: self.clone(), target: target.clone(), contracted: s.into_iter().collect(), vertex_map, flag_map };
        (target, m)
    }

    /// Applies a vertex permutation and edge relabeling: `vperm[v]` is the new
    /// index of `v`; edges are listed in `edge_order` with flags optionally swapped.
    pub fn relabel(&self, vperm: &[usize], edge_order: &[(usize, bool)]) -> (MarkedGraph, GraphMorphism) {
        let mut weights = vec![0; self.num_vertices()];
        for v in 0..self.num_vertices() {
            weights[vperm[v]] = self.weights[v];
        }
        let mut flag_map = vec![None; self.num_flags()];
        let edges: Vec<(usize, usize)> = edge_order
            .iter()
            .enumerate()
            .map(|(i, &(e, swap))| {
                let (a, b) = self.edges[e];
                if swap {
                    flag_map[2 * e] = Some(2 * i + 1);
                    flag_map[2 * e + 1] = Some(2 * i);
                    (vperm[b], vperm[a])
                } else {
                    flag_map[2 * e] = Some(2 * i);
                    flag_map[2 * e + 1] = Some(2 * i + 1);
                    (vperm[a], vperm[b])
                }
            })
            .collect();
        let e2 = 2 * self.num_edges();
        for k in 0..self.num_legs() {
            flag_map[e2 + k] = Some(e2 + k);
        }
        let legs = self.legs.iter().map(|&(l, v)| (l, vperm[v])).collect();
        let target = MarkedGraph { weights, edges, legs };
        let m =
            GraphMorphism { source: self.clone(), target: target.clone(), contracted: Vec::new(), vertex_map: vperm.to_vec(), flag_map };
        (target, m)
    }
}

/// A morphism `π: G -> G'`: an edge contraction followed by an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphMorphism {
    pub source: MarkedGraph,
    pub target: MarkedGraph,
    /// Source edges collapsed by the morphism, sorted.
    pub contracted: Vec<usize>,
    pub vertex_map: Vec<usize>,
    /// Image of each source flag; `None` exactly on flags of contracted edges.
    pub flag_map: Vec<Option<usize>>,
}

impl GraphMorphism {
    pub fn identity(g: &MarkedGraph) -> GraphMorphism {
        GraphMorphism {
            source: g.clone(),
            target: g.clone(),
            contracted: Vec::new(),
            vertex_map: (0..g.num_vertices()).collect(),
            flag_map: (0..g.num_flags()).map(Some).collect(),
        }
    }

    pub fn is_isomorphism(&self) -> bool {
        self.contracted.is_empty()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GraphMorphism) -> GraphMorphism {
        debug_assert_eq!(self.target, next.source);
        let flag_map: Vec<Option<usize>> = self.flag_map.iter().map(|f| f.and_then(|f| next.flag_map[f])).collect();
        let contracted: Vec<usize> = (0..self.source.num_edges()).filter(|&e| flag_map[2 * e].is_none()).collect();
        GraphMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            contracted,
            vertex_map: self.vertex_map.iter().map(|&v| next.vertex_map[v]).collect(),
            flag_map,
        }
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> GraphMorphism {
        assert!(self.is_isomorphism(), "only isomorphisms are invertible");
        let mut vertex_map = vec![0; self.vertex_map.len()];
        for (v, &w) in self.vertex_map.iter().enumerate() {
            vertex_map[w] = v;
        }
        let mut flag_map = vec![None; self.flag_map.len()];
        for (f, g) in self.flag_map.iter().enumerate() {
            flag_map[g.unwrap()] = Some(f);
        }
        GraphMorphism { source: self.target.clone(), target: self.source.clone(), contracted: Vec::new(), vertex_map, flag_map }
    }

    /// For a surviving source edge, its image edge.
    pub fn edge_image(&self, e: usize) -> Option<usize> {
        self.flag_map[2 * e].map(|f| f / 2)
    }

    /// Checks every defining condition of a morphism.
    pub fn is_valid(&self) -> bool {
        let (g, h) = (&self.source, &self.target);
        if self.flag_map.len() != g.num_flags() || self.vertex_map.len() != g.num_vertices() {
            return false;
        }
        let mut hit = vec![false; h.num_flags()];
        for f in 0..g.num_flags() {
            let contracted = g.edge_of_flag(f).is_some_and(|e| self.contracted.binary_search(&e).is_ok());
            match (self.flag_map[f], contracted) {
                (None, true) => {}
                (Some(t), false) => {
                    if t >= h.num_flags() || hit[t] {
                        return false;
                    }
                    hit[t] = true;
                    if h.root(t) != self.vertex_map[g.root(f)] {
                        return false;
                    }
                    if self.flag_map[g.involution(f)] != Some(h.involution(t)) {
                        return false;
                    }
                    if g.leg_label_of_flag(f) != h.leg_label_of_flag(t) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        if !hit.iter().all(|&x| x) {
            return false;
        }
        // each target vertex: preimage connected through contracted edges, with matching genus
        let (c, _) = g.contract(&self.contracted);
        if c.num_vertices() != h.num_vertices() {
            return false;
        }
        let (_, cm) = g.contract(&self.contracted);
        for v in 0..g.num_vertices() {
            let cv = cm.vertex_map[v];
            if (0..g.num_vertices()).any(|w| (cm.vertex_map[w] == cv) != (self.vertex_map[w] == self.vertex_map[v])) {
                return false;
            }
            if c.weight(cv) != h.weight(self.vertex_map[v]) {
                return false;
            }
        }
        true
    }
}

/// Small named graphs used throughout tests and examples.
pub mod named {
    use super::MarkedGraph;

    /// Two weight-0 vertices joined by three edges.
    pub fn theta() -> MarkedGraph {
        MarkedGraph::new(vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![]).unwrap()
    }

    /// Two loops joined by a bridge.
    pub fn dumbbell() -> MarkedGraph {
        MarkedGraph::new(vec![0, 0], vec![(0, 0), (0, 1), (1, 1)], vec![]).unwrap()
    }

    /// A loop at a weight-0 vertex with leg 1.
    pub fn loop_with_leg() -> MarkedGraph {
        MarkedGraph::new(vec![0], vec![(0, 0)], vec![(1, 0)]).unwrap()
    }

    /// A single vertex of weight `g` carrying legs `1..=n`.
    pub fn point(g: u32, n: u32) -> MarkedGraph {
        MarkedGraph::new(vec![g], vec![], (1..=n).map(|l| (l, 0)).collect()).unwrap()
    }
}
