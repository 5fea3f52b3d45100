use std::collections::HashMap;

use super::{Arrow, ConeStack, StackObject};
use crate::cones::Cone;
use crate::error::Result;
use crate::graphs::{self, enumerate_stable, GraphMorphism, MarkedGraph};

/// The moduli stack of tropical curves as a finite category: one object per
/// stable graph class with cone `R^{E(G)}_{>=0}`, one arrow per graph morphism.
#[derive(Clone, Debug)]
pub struct ModuliStack {
    pub stack: ConeStack,
    pub graphs: Vec<MarkedGraph>,
    /// For arrow `a: x -> y`, the graph morphism `G_y -> G_x` it comes from.
    pub morphisms: Vec<GraphMorphism>,
}

/// Matrix of the face inclusion `σ_{G'} -> σ_G` induced by `m: G -> G'`.
pub(crate) fn contraction_matrix(m: &GraphMorphism) -> Vec<Vec<i64>> {
    let (e, e2) = (m.source.num_edges(), m.target.num_edges());
    let mut mat = vec![vec![0; e2]; e];
    for (i, row) in mat.iter_mut().enumerate() {
        if let Some(t) = m.edge_image(i) {
            row[t] = 1;
        }
    }
    mat
}

type MorphismKey = (usize, usize, Vec<Option<usize>>, Vec<usize>);

pub fn build_moduli_stack(g: u32, n: u32) -> Result<ModuliStack> {
    let graphs = enumerate_stable(g, n)?;
    let objects =
        graphs.iter().enumerate().map(|(i, gr)| StackObject { label: format!("G{i}"), cone: Cone::orthant(gr.num_edges()) }).collect();
    let mut arrows = Vec::new();
    let mut morphisms = Vec::new();
    let mut index: HashMap<MorphismKey, usize> = HashMap::new();
    for (i, gi) in graphs.iter().enumerate() {
        for (j, gj) in graphs.iter().enumerate() {
            for m in graphs::morphisms(gi, gj) {
                index.insert((i, j, m.flag_map.clone(), m.vertex_map.clone()), arrows.len());
                arrows.push(Arrow { src: j, dst: i, matrix: contraction_matrix(&m) });
                morphisms.push(m);
            }
        }
    }
    let position = |m: &GraphMorphism| graphs.iter().position(|x| x == &m.source).expect("source is a representative");
    let target_of = |m: &GraphMorphism| graphs.iter().position(|x| x == &m.target).expect("target is a representative");
    let identities: Vec<usize> = (0..graphs.len())
        .map(|i| {
            let id = GraphMorphism::identity(&graphs[i]);
            index[&(i, i, id.flag_map, id.vertex_map)]
        })
        .collect();
    let mut table = Vec::new();
    for (a, ma) in morphisms.iter().enumerate() {
        // a: x -> y from ma: G_y -> G_x; b: y -> z from mb: G_z -> G_y
        for (b, mb) in morphisms.iter().enumerate() {
            if arrows[b].src != arrows[a].dst {
                continue;
            }
            let m = mb.then(ma);
            let key = (position(&m), target_of(&m), m.flag_map, m.vertex_map);
            table.push([a, b, index[&key]]);
        }
    }
    let stack = ConeStack::from_parts(objects, arrows, Some(identities), Some(table))?;
    Ok(ModuliStack { stack, graphs, morphisms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_one_one_marking() {
        let m = build_moduli_stack(1, 1).unwrap();
        assert_eq!(m.stack.num_objects(), 2);
        let lp = m.graphs.iter().position(|g| g.num_edges() == 1).unwrap();
        assert_eq!(m.stack.automorphisms(lp).len(), 2);
        assert!(m.stack.verify().passed());
        assert_eq!(m.stack.is_cone_space(), Ok(false));
    }

    #[test]
    fn genus_one_two_markings() {
        let m = build_moduli_stack(1, 2).unwrap();
        assert_eq!(m.stack.num_objects(), 5);
        assert_eq!(m.stack.f_vector(), vec![1, 2, 2]);
        let cert = m.stack.verify();
        assert!(cert.passed(), "{cert:?}");
    }

    #[test]
    fn genus_two() {
        let m = build_moduli_stack(2, 0).unwrap();
        assert_eq!(m.stack.num_objects(), 7);
        assert_eq!(m.stack.f_vector().len() - 1, 3);
        assert!(m.stack.verify().passed());
        for (x, gr) in m.graphs.iter().enumerate() {
            assert_eq!(m.stack.automorphisms(x).len(), graphs::automorphisms(gr).len());
        }
    }
}
