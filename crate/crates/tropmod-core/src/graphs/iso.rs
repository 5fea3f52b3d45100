use itertools::Itertools;

use super::{GraphMorphism, MarkedGraph};

type VertexKey = (u32, usize, usize, Vec<u32>);

fn vertex_key(g: &MarkedGraph, v: usize) -> VertexKey {
    let labels = g.legs().iter().filter(|l| l.1 == v).map(|l| l.0).collect();
    (g.weight(v), g.valence(v), g.loops_at(v), labels)
}

fn bfs_order(g: &MarkedGraph) -> Vec<usize> {
    let mut order = vec![0];
    let mut seen = vec![false; g.num_vertices()];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &(a, b) in g.edges() {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
        }
        i += 1;
    }
    order
}

/// Isomorphisms `g1 -> g2`, at most `limit` of them, in a deterministic order.
fn search(g1: &MarkedGraph, g2: &MarkedGraph, limit: usize) -> Vec<GraphMorphism> {
    let mut out = Vec::new();
    if g1.num_vertices() != g2.num_vertices() || g1.num_edges() != g2.num_edges() || g1.labels() != g2.labels() {
        return out;
    }
    let k1: Vec<VertexKey> = (0..g1.num_vertices()).map(|v| vertex_key(g1, v)).collect();
    let k2: Vec<VertexKey> = (0..g2.num_vertices()).map(|v| vertex_key(g2, v)).collect();
    let mut s1 = k1.clone();
    let mut s2 = k2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return out;
    }
    let order = bfs_order(g1);
    let mut phi = vec![usize::MAX; g1.num_vertices()];
    let mut used = vec![false; g2.num_vertices()];
    assign(g1, g2, &k1, &k2, &order, 0, &mut phi, &mut used, limit, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn assign(
    g1: &MarkedGraph,
    g2: &MarkedGraph,
    k1: &[VertexKey],
    k2: &[VertexKey],
    order: &[usize],
    depth: usize,
    phi: &mut Vec<usize>,
    used: &mut Vec<bool>,
    limit: usize,
    out: &mut Vec<GraphMorphism>,
) {
    if out.len() >= limit {
        return;
    }
    if depth == order.len() {
        edge_bijections(g1, g2, phi, limit, out);
        return;
    }
    let v = order[depth];
    for w in 0..g2.num_vertices() {
        if used[w] || k1[v] != k2[w] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&u| g1.multiplicity(u, v) == g2.multiplicity(phi[u], w));
        if !consistent {
            continue;
        }
        phi[v] = w;
        used[w] = true;
        assign(g1, g2, k1, k2, order, depth + 1, phi, used, limit, out);
        used[w] = false;
        phi[v] = usize::MAX;
    }
}

fn edge_bijections(g1: &MarkedGraph, g2: &MarkedGraph, phi: &[usize], limit: usize, out: &mut Vec<GraphMorphism>) {
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    // classes of parallel edges, keyed by their image endpoint pair in g2
    let mut classes: Vec<((usize, usize), Vec<usize>, Vec<usize>)> = Vec::new();
    for (e, &(a, b)) in g1.edges().iter().enumerate() {
        let k = key(phi[a], phi[b]);
        match classes.iter_mut().find(|c| c.0 == k) {
            Some(c) => c.1.push(e),
            None => classes.push((k, vec![e], Vec::new())),
        }
    }
    for (f, &(a, b)) in g2.edges().iter().enumerate() {
        let k = key(a, b);
        if let Some(c) = classes.iter_mut().find(|c| c.0 == k) {
            c.2.push(f);
        }
    }
    // one choice per class: a permutation and, for loops, an orientation mask
    let per_class: Vec<Vec<Vec<(usize, bool)>>> = classes
        .iter()
        .map(|(k, src, dst)| {
            let is_loop = k.0 == k.1;
            let mut choices = Vec::new();
            for perm in dst.iter().copied().permutations(dst.len()) {
                let masks = if is_loop { 1usize << src.len() } else { 1 };
                for mask in 0..masks {
                    choices.push(
                        src.iter()
                            .enumerate()
                            .map(|(i, &e)| {
                                let f = perm[i];
                                let flip = if is_loop {
                                    mask >> i & 1 == 1
                                } else {
                                    // flag 2e sits at a = g1.edges()[e].0 and must land at phi[a]
                                    g2.edges()[f].0 != phi[g1.edges()[e].0]
                                };
                                (f, flip)
                            })
                            .collect(),
                    );
                }
            }
            choices
        })
        .collect();
    if classes.is_empty() {
        // no edges: the vertex map alone is the isomorphism
        out.push(GraphMorphism {
            source: g1.clone(),
            target: g2.clone(),
            contracted: Vec::new(),
            vertex_map: phi.to_vec(),
            flag_map: (0..g1.num_legs()).map(Some).collect(),
        });
        return;
    }
    let e2_1 = 2 * g1.num_edges();
    let e2_2 = 2 * g2.num_edges();
    for combo in per_class.iter().map(|c| c.iter()).multi_cartesian_product() {
        if out.len() >= limit {
            return;
        }
        let mut flag_map = vec![None; g1.num_flags()];
        for (class, choice) in classes.iter().zip(&combo) {
            for (&e, &(f, flip)) in class.1.iter().zip(choice.iter()) {
                let (x, y) = if flip { (2 * f + 1, 2 * f) } else { (2 * f, 2 * f + 1) };
                flag_map[2 * e] = Some(x);
                flag_map[2 * e + 1] = Some(y);
            }
        }
        for k in 0..g1.num_legs() {
            flag_map[e2_1 + k] = Some(e2_2 + k);
        }
        out.push(GraphMorphism { source: g1.clone(), target: g2.clone(), contracted: Vec::new(), vertex_map: phi.to_vec(), flag_map });
    }
}

/// All isomorphisms `g1 -> g2`.
pub fn isomorphisms(g1: &MarkedGraph, g2: &MarkedGraph) -> Vec<GraphMorphism> {
    search(g1, g2, usize::MAX)
}

pub fn first_isomorphism(g1: &MarkedGraph, g2: &MarkedGraph) -> Option<GraphMorphism> {
    search(g1, g2, 1).pop()
}

pub fn automorphisms(g: &MarkedGraph) -> Vec<GraphMorphism> {
    isomorphisms(g, g)
}

/// All morphisms `g -> h`: pairs of an edge set `S` and an isomorphism `g/S ≅ h`.
pub fn morphisms(g: &MarkedGraph, h: &MarkedGraph) -> Vec<GraphMorphism> {
    if g.genus() != h.genus() || g.labels() != h.labels() || g.num_edges() < h.num_edges() {
        return Vec::new();
    }
    let k = g.num_edges() - h.num_edges();
    let mut out = Vec::new();
    for s in (0..g.num_edges()).combinations(k) {
        let (c, m) = g.contract(&s);
        if c.num_vertices() != h.num_vertices() {
            continue;
        }
        for iso in isomorphisms(&c, h) {
            out.push(m.then(&iso));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&point(1, 1)).len(), 1);
        assert_eq!(automorphisms(&loop_with_leg()).len(), 2);
        assert_eq!(automorphisms(&theta()).len(), 12);
        assert_eq!(automorphisms(&dumbbell()).len(), 8);
    }

    #[test]
    fn automorphisms_are_valid_and_closed() {
        let auts = automorphisms(&theta());
        for a in &auts {
            assert!(a.is_valid());
            for b in &auts {
                assert!(auts.contains(&a.then(b)));
            }
        }
    }

    #[test]
    fn morphism_examples() {
        assert_eq!(morphisms(&loop_with_leg(), &loop_with_leg()).len(), 2);
        assert_eq!(morphisms(&loop_with_leg(), &point(1, 1)).len(), 1);
        assert!(morphisms(&theta(), &dumbbell()).is_empty());
        for m in morphisms(&theta(), &point(2, 0)) {
            assert!(m.is_valid());
        }
    }

    #[test]
    fn endomorphisms_without_contraction_are_automorphisms() {
        let g = theta();
        let ends: Vec<_> = morphisms(&g, &g).into_iter().filter(|m| m.contracted.is_empty()).collect();
        assert_eq!(ends, automorphisms(&g));
    }

    #[test]
    fn edgeless_isomorphism() {
        let p = point(2, 2);
        let isos = isomorphisms(&p, &p);
        assert_eq!(isos.len(), 1);
        assert!(isos[0].is_valid());
    }
}
