use std::collections::HashMap;

use super::{Arrow, ConeStack, StackObject};
use crate::cones::{intersect_with_kernel, Cone, ConeMorphism, Face};
use crate::curves::{specialize, TropicalCurve};
use crate::error::Result;
use crate::graphs::{self, GraphMorphism, MarkedGraph};
use crate::linalg::{self, IMat};

/// The complex `Σ_{G,Γ}`: cones indexed by a face `τ` of the base and a graph
/// morphism `G -> G(Γ|τ)`, with its strict projection to the base.
#[derive(Clone, Debug)]
pub struct AtlasFiber {
    pub complex: ConeStack,
    pub projection: Vec<ConeMorphism>,
    /// Index into `base.face_lattice()` per object.
    pub faces: Vec<usize>,
    pub maps: Vec<GraphMorphism>,
}

/// Restrictions of a curve to every face of its base, plus the specialization
/// witnesses between them.
struct FaceCurves {
    faces: Vec<Face>,
    curves: Vec<TropicalCurve>,
    /// `(big, small) -> witness Γ|big -> Γ|small`.
    witnesses: HashMap<(usize, usize), GraphMorphism>,
}

impl FaceCurves {
    fn new(curve: &TropicalCurve) -> Result<FaceCurves> {
        let faces = curve.base.face_lattice();
        let curves: Vec<TropicalCurve> = faces.iter().map(|f| curve.restrict(f).map(|x| x.0)).collect::<Result<_>>()?;
        let mut witnesses = HashMap::new();
        for (b, big) in faces.iter().enumerate() {
            for (s, small) in faces.iter().enumerate() {
                if let Some(m) = big.subface_matrix(small) {
                    let step = ConeMorphism { source: small.as_cone.clone(), target: big.as_cone.clone(), matrix: m };
                    let (c, w) = specialize(&step, &curves[b])?;
                    debug_assert_eq!(c, curves[s]);
                    witnesses.insert((b, s), w);
                }
            }
        }
        Ok(FaceCurves { faces, curves, witnesses })
    }
}

type MorphKey = (usize, Vec<Option<usize>>, Vec<usize>);

pub fn atlas_fiber(curve: &TropicalCurve, g: &MarkedGraph) -> Result<AtlasFiber> {
    let fc = FaceCurves::new(curve)?;
    let mut objects = Vec::new();
    let mut faces = Vec::new();
    let mut maps: Vec<GraphMorphism> = Vec::new();
    let mut index: HashMap<MorphKey, usize> = HashMap::new();
    for (k, face) in fc.faces.iter().enumerate() {
        for m in graphs::morphisms(g, &fc.curves[k].graph) {
            index.insert((k, m.flag_map.clone(), m.vertex_map.clone()), objects.len());
            objects.push(StackObject { label: format!("τ{:?}#{}", face.ray_indices, maps.len()), cone: face.as_cone.clone() });
            faces.push(k);
            maps.push(m);
        }
    }
    let mut arrows = Vec::new();
    for (x, m) in maps.iter().enumerate() {
        let big = faces[x];
        for small in 0..fc.faces.len() {
            let Some(w) = fc.witnesses.get(&(big, small)) else { continue };
            let m2 = m.then(w);
            let y = index[&(small, m2.flag_map, m2.vertex_map)];
            let matrix = fc.faces[big].subface_matrix(&fc.faces[small]).expect("subface");
            arrows.push(Arrow { src: y, dst: x, matrix });
        }
    }
    let complex = ConeStack::from_parts(objects, arrows, None, None)?;
    let projection = faces.iter().map(|&k| fc.faces[k].inclusion_morphism()).collect();
    Ok(AtlasFiber { complex, projection, faces, maps })
}

/// The complex of triples `(τ1, τ2, ψ: G(Γ1|τ1) ≅ G(Γ2|τ2))`, each realized as
/// the cone of `τ1 × τ2` on which corresponding lengths agree.
#[derive(Clone, Debug)]
pub struct PairFiber {
    pub complex: ConeStack,
    pub first: Vec<ConeMorphism>,
    pub second: Vec<ConeMorphism>,
    /// Face indices into the two base face lattices.
    pub faces: Vec<(usize, usize)>,
    pub isos: Vec<GraphMorphism>,
    /// Inclusion of each cone into the product `τ1 × τ2`.
    pub inclusions: Vec<IMat>,
}

fn block_diag(a: &IMat, ac: usize, b: &IMat, bc: usize) -> IMat {
    let mut out: IMat = a.iter().map(|r| r.iter().copied().chain(std::iter::repeat_n(0, bc)).collect()).collect();
    out.extend(b.iter().map(|r| std::iter::repeat_n(0, ac).chain(r.iter().copied()).collect()));
    out
}

pub fn curve_pair_fiber(c1: &TropicalCurve, c2: &TropicalCurve) -> Result<PairFiber> {
    let f1 = FaceCurves::new(c1)?;
    let f2 = FaceCurves::new(c2)?;
    let mut objects = Vec::new();
    let mut faces = Vec::new();
    let mut isos: Vec<GraphMorphism> = Vec::new();
    let mut inclusions: Vec<IMat> = Vec::new();
    let mut index: HashMap<(usize, usize, Vec<Option<usize>>, Vec<usize>), usize> = HashMap::new();
    for (a, t1) in f1.faces.iter().enumerate() {
        for (b, t2) in f2.faces.iter().enumerate() {
            let (g1, g2) = (&f1.curves[a], &f2.curves[b]);
            let (k1, k2) = (t1.dim(), t2.dim());
            let product = t1.as_cone.product(&t2.as_cone);
            for psi in graphs::isomorphisms(&g1.graph, &g2.graph) {
                let eqs: Vec<Vec<i64>> = (0..g1.graph.num_edges())
                    .map(|e| {
                        let mut row = g1.lengths[e].covector.clone();
                        row.extend(g2.lengths[psi.edge_image(e).unwrap()].covector.iter().map(|x| -x));
                        row
                    })
                    .collect();
                let (cone, incl) = intersect_with_kernel(&product, &eqs)?;
                // keep only cells meeting the interior of τ1 × τ2
                let rays: Vec<Vec<i64>> = cone.rays().iter().map(|r| linalg::mat_vec(&incl, r)).collect::<Result<_>>()?;
                let interior = product.facets().iter().all(|f| rays.iter().any(|r| linalg::dot(f, r) > 0));
                if !interior {
                    continue;
                }
                debug_assert_eq!(incl.len(), k1 + k2);
                index.insert((a, b, psi.flag_map.clone(), psi.vertex_map.clone()), objects.len());
                objects.push(StackObject { label: format!("({:?},{:?})#{}", t1.ray_indices, t2.ray_indices, isos.len()), cone });
                faces.push((a, b));
                isos.push(psi);
                inclusions.push(incl);
            }
        }
    }
    let mut arrows = Vec::new();
    for x in 0..objects.len() {
        let (a, b) = faces[x];
        for y in 0..objects.len() {
            let (a2, b2) = faces[y];
            let (Some(w1), Some(w2)) = (f1.witnesses.get(&(a, a2)), f2.witnesses.get(&(b, b2))) else { continue };
            // ψ' ∘ c1 = c2 ∘ ψ
            let left = w1.then(&isos[y]);
            let right = isos[x].then(w2);
            if left.flag_map != right.flag_map || left.vertex_map != right.vertex_map {
                continue;
            }
            let s1 = f1.faces[a].subface_matrix(&f1.faces[a2]).expect("subface");
            let s2 = f2.faces[b].subface_matrix(&f2.faces[b2]).expect("subface");
            let (k1, k2) = (f1.faces[a2].dim(), f2.faces[b2].dim());
            let into_product = linalg::mat_mul(&block_diag(&s1, k1, &s2, k2), &inclusions[y], objects[y].cone.rank())?;
            let Some(m) = linalg::solve_mat(&inclusions[x], objects[x].cone.rank(), &into_product, objects[y].cone.rank()) else {
                continue;
            };
            arrows.push(Arrow { src: y, dst: x, matrix: m });
        }
    }
    let complex = ConeStack::from_parts(objects, arrows, None, None)?;
    let project = |x: usize, first: bool| -> Result<ConeMorphism> {
        let (a, b) = faces[x];
        let (t1, t2) = (&f1.faces[a], &f2.faces[b]);
        let (k1, k2) = (t1.dim(), t2.dim());
        let incl = &inclusions[x];
        let (part, face, base): (IMat, &Face, &Cone) =
            if first { (incl[..k1].to_vec(), t1, &c1.base) } else { (incl[k1..k1 + k2].to_vec(), t2, &c2.base) };
        let matrix = linalg::mat_mul(&face.inclusion, &part, complex.cone(x).rank())?;
        Ok(ConeMorphism { source: complex.cone(x).clone(), target: base.clone(), matrix })
    };
    let first = (0..complex.num_objects()).map(|x| project(x, true)).collect::<Result<_>>()?;
    let second = (0..complex.num_objects()).map(|x| project(x, false)).collect::<Result<_>>()?;
    Ok(PairFiber { complex, first, second, faces, isos, inclusions })
}
