use std::collections::BTreeMap;

use super::MarkedGraph;

/// Isomorphism-invariant encoding of a marked graph; equal exactly for isomorphic graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub Vec<u32>);

impl CanonicalForm {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|x| x.to_be_bytes()).collect()
    }
}

/// Colour refinement from `(weight, valence, loops, leg labels)`; colours are
/// ranks of sorted keys, so the result is invariant under relabeling.
fn refine(g: &MarkedGraph) -> Vec<usize> {
    let n = g.num_vertices();
    let initial: Vec<(u32, usize, usize, Vec<u32>)> = (0..n)
        .map(|v| {
            let labels = g.legs().iter().filter(|l| l.1 == v).map(|l| l.0).collect();
            (g.weight(v), g.valence(v), g.loops_at(v), labels)
        })
        .collect();
    let mut colour = ranks(&initial);
    loop {
        let keys: Vec<(usize, Vec<(usize, usize)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(usize, usize)> =
                    (0..n).filter(|&w| w != v).map(|w| (colour[w], g.multiplicity(v, w))).filter(|x| x.1 > 0).collect();
                nb.sort();
                (colour[v], nb)
            })
            .collect();
        let next = ranks(&keys);
        let classes = |c: &[usize]| c.iter().max().map_or(0, |m| m + 1);
        if classes(&next) == classes(&colour) {
            return next;
        }
        colour = next;
    }
}

fn ranks<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect()
}

struct Search<'a> {
    g: &'a MarkedGraph,
    slot_class: Vec<usize>,
    colour: Vec<usize>,
    labels_at: Vec<Vec<u32>>,
    best: Option<(Vec<u32>, Vec<usize>)>,
}

impl Search<'_> {
    fn block(&self, order: &[usize], v: usize) -> Vec<u32> {
        let mut b = vec![self.g.weight(v), self.labels_at[v].len() as u32];
        b.extend(&self.labels_at[v]);
        for &u in order {
            b.push(self.g.multiplicity(u, v) as u32);
        }
        b.push(self.g.loops_at(v) as u32);
        b
    }

    fn run(&mut self, order: &mut Vec<usize>, code: &mut Vec<u32>, used: &mut Vec<bool>) {
        let pos = order.len();
        if pos == self.g.num_vertices() {
            if self.best.as_ref().is_none_or(|(b, _)| *code < *b) {
                self.best = Some((code.clone(), order.clone()));
            }
            return;
        }
        for v in 0..self.g.num_vertices() {
            if used[v] || self.colour[v] != self.slot_class[pos] {
                continue;
            }
            let blk = self.block(order, v);
            let len = code.len();
            code.extend(blk);
            let prune = match &self.best {
                Some((b, _)) => code[..] > b[..code.len()],
                None => false,
            };
            if !prune {
                order.push(v);
                used[v] = true;
                self.run(order, code, used);
                used[v] = false;
                order.pop();
            }
            code.truncate(len);
        }
    }
}

/// The canonical form and the vertex order realising it.
pub(crate) fn canonical_labeling(g: &MarkedGraph) -> (CanonicalForm, Vec<usize>) {
    let colour = refine(g);
    let mut slot_class = colour.clone();
    slot_class.sort();
    let labels_at = (0..g.num_vertices()).map(|v| g.legs().iter().filter(|l| l.1 == v).map(|l| l.0).collect()).collect();
    let mut s = Search { g, slot_class, colour, labels_at, best: None };
    let mut code = vec![g.num_vertices() as u32, g.num_edges() as u32, g.num_legs() as u32];
    s.run(&mut Vec::new(), &mut code, &mut vec![false; g.num_vertices()]);
    let (code, order) = s.best.unwrap();
    (CanonicalForm(code), order)
}

pub fn canonical_form(g: &MarkedGraph) -> CanonicalForm {
    canonical_labeling(g).0
}

/// The representative graph encoded by a canonical form: vertices in code
/// order, edges `(j, i)` with `j <= i` listed by `i` then `j`.
pub fn canonical_graph(form: &CanonicalForm) -> MarkedGraph {
    let c = &form.0;
    let nv = c[0] as usize;
    let mut weights = Vec::with_capacity(nv);
    let mut legs = Vec::new();
    let mut edges = Vec::new();
    let mut k = 3;
    for i in 0..nv {
        weights.push(c[k]);
        let nl = c[k + 1] as usize;
        for &l in &c[k + 2..k + 2 + nl] {
            legs.push((l, i));
        }
        k += 2 + nl;
        for j in 0..i {
            for _ in 0..c[k + j] {
                edges.push((j, i));
            }
        }
        k += i;
        for _ in 0..c[k] {
            edges.push((i, i));
        }
        k += 1;
    }
    debug_assert_eq!(edges.len(), c[1] as usize);
    MarkedGraph::new(weights, edges, legs).expect("canonical forms encode connected graphs")
}

/// Vertex positions by canonical order, and the relabeling of `g` onto its
/// canonical representative.
pub fn to_canonical(g: &MarkedGraph) -> (MarkedGraph, super::GraphMorphism) {
    let (form, order) = canonical_labeling(g);
    let rep = canonical_graph(&form);
    let mut pos = vec![0; g.num_vertices()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut slots: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let (pa, pb) = (pos[a], pos[b]);
        let key = (pa.max(pb), pa.min(pb));
        slots.entry(key).or_default().push((e, pa > pb));
    }
    let edge_order: Vec<(usize, bool)> = slots.into_values().flatten().collect();
    let (h, m) = g.relabel(&pos, &edge_order);
    debug_assert_eq!(h, rep);
    (rep, m)
}

#[cfg(test)]
mod tests {
    use super::super::isomorphisms;
    use super::super::named::*;
    use super::*;

    #[test]
    fn relabeled_graphs_share_a_form() {
        let g = MarkedGraph::new(vec![0, 1, 0], vec![(0, 1), (1, 2), (2, 0), (2, 2)], vec![(1, 0), (2, 2)]).unwrap();
        let (h, _) = g.relabel(&[2, 0, 1], &[(3, false), (1, true), (0, false), (2, true)]);
        assert_eq!(canonical_form(&g), canonical_form(&h));
    }

    #[test]
    fn round_trip_through_representative() {
        for g in [theta(), dumbbell(), loop_with_leg(), point(2, 3)] {
            let form = canonical_form(&g);
            let rep = canonical_graph(&form);
            assert_eq!(canonical_form(&rep), form);
            assert!(!isomorphisms(&g, &rep).is_empty());
            let (r, m) = to_canonical(&g);
            assert_eq!(r, rep);
            assert!(m.is_valid());
        }
    }

    #[test]
    fn distinguishes_leg_placement() {
        let a = MarkedGraph::new(vec![0, 0], vec![(0, 1), (0, 1)], vec![(1, 0), (2, 0)]).unwrap();
        let b = MarkedGraph::new(vec![0, 0], vec![(0, 1), (0, 1)], vec![(1, 0), (2, 1)]).unwrap();
        assert_ne!(canonical_form(&a), canonical_form(&b));
        assert_ne!(canonical_form(&theta()), canonical_form(&dumbbell()));
    }

    #[test]
    fn bytes_are_big_endian_words() {
        let f = canonical_form(&point(1, 1));
        assert_eq!(f.to_bytes().len(), 4 * f.0.len());
    }
}
