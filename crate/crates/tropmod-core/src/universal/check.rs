use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use super::{attach, cone_over, forget, forget_morphism, h_leg, h_value, lattice_points_between, pullback_datum_to_face, SectionDatum};
use crate::certificate::Certificate;
use crate::cones::{Cone, ConeMorphism, DualElement};
use crate::curves::{self, specialize, TropicalCurve};
use crate::error::{Error, Result};
use crate::graphs::{enumerate_stable, GraphMorphism};
use crate::linalg::{self, IMat};
use crate::stacks::{build_moduli_stack, curve_pair_fiber, equivalent, Arrow, ConeStack, StackObject};

/// The sections of `Cone(Γ)` used by the checks.
#[derive(Clone, Debug)]
pub struct SectionData {
    pub data: Vec<SectionDatum>,
    /// Leg distances `d` are sampled with `<d, r> <= leg_bound` on every ray `r`;
    /// edge splittings are always enumerated completely.
    pub leg_bound: i64,
}

pub fn section_data(curve: &TropicalCurve, leg_bound: i64) -> Result<SectionData> {
    let sigma = &curve.base;
    let g = &curve.graph;
    let mut data: Vec<SectionDatum> = (0..g.num_vertices()).map(|vertex| SectionDatum::Vertex { vertex }).collect();
    let legs = lattice_points_between(sigma, &vec![leg_bound; sigma.rays().len()])?;
    for &(label, _) in g.legs() {
        for m in legs.iter().filter(|m| !linalg::is_zero(m)) {
            data.push(SectionDatum::Leg { label, d: m.clone().into() });
        }
    }
    for (edge, len) in curve.lengths.iter().enumerate() {
        let upper: Vec<i64> =
            sigma.rays().iter().map(|r| i64::try_from(len.pair(r)).map_err(|_| Error::Overflow)).collect::<Result<_>>()?;
        for m in lattice_points_between(sigma, &upper)? {
            let d: DualElement = m.into();
            let d2 = len.sub(&d)?;
            if !d.is_zero() && !d2.is_zero() {
                data.push(SectionDatum::Edge { edge, d, d2 });
            }
        }
    }
    Ok(SectionData { data, leg_bound })
}

/// The 2-fiber product `σ ×_{M_{g,n}} M_{g,n+1}` of the classifying map of `Γ`
/// and the forgetful map, as a cone stack.
#[derive(Clone, Debug)]
pub struct ModuliFiber {
    pub stack: ConeStack,
    /// Per object: face of `σ`, object of `M_{g,n+1}`, and `ψ: G(Γ|τ) ≅ π(G_y)`.
    pub cells: Vec<(usize, usize, GraphMorphism)>,
    /// `h_{n+1}` on each object.
    pub h: Vec<u32>,
}

fn block_diag(a: &IMat, ac: usize, b: &IMat, bc: usize) -> IMat {
    let mut out: IMat = a.iter().map(|r| r.iter().copied().chain(std::iter::repeat_n(0, bc)).collect()).collect();
    out.extend(b.iter().map(|r| std::iter::repeat_n(0, ac).chain(r.iter().copied()).collect()));
    out
}

fn same_map(a: &GraphMorphism, b: &GraphMorphism) -> bool {
    a.flag_map == b.flag_map && a.vertex_map == b.vertex_map
}

pub fn fiber_over_moduli(curve: &TropicalCurve) -> Result<ModuliFiber> {
    let g = curve.genus();
    let n = curve.graph.num_legs() as u32;
    let labels: Vec<u32> = curve.graph.labels();
    if labels != (1..=n).collect::<Vec<_>>() {
        return Err(Error::InvalidCurve("legs must be labelled 1..n".into()));
    }
    let label = n + 1;
    let moduli = build_moduli_stack(g, n + 1)?;
    let m = &moduli.stack;
    let sigma = &curve.base;
    let faces = sigma.face_lattice();
    let restricted: Vec<TropicalCurve> = faces.iter().map(|f| curve.restrict(f).map(|r| r.0)).collect::<Result<_>>()?;

    struct Obj {
        face: usize,
        y: usize,
        psi: GraphMorphism,
        /// Inclusion into `τ × R^{E(G_y)}` in face and orthant coordinates.
        ambient: IMat,
    }
    let mut objs: Vec<Obj> = Vec::new();
    let mut stack_objects = Vec::new();
    for (y, gy) in moduli.graphs.iter().enumerate() {
        let taut = TropicalCurve::tautological(gy);
        let fy = super::forget_leg(&taut, label)?.curve;
        let pf = curve_pair_fiber(curve, &fy)?;
        let top = fy.base.face_lattice().len() - 1;
        let whole = fy.base.whole_face();
        for x in 0..pf.complex.num_objects() {
            let (a, b) = pf.faces[x];
            if b != top {
                continue;
            }
            let k1 = faces[a].dim();
            let ambient = linalg::mat_mul(
                &block_diag(&linalg::identity(k1), k1, &whole.inclusion, whole.dim()),
                &pf.inclusions[x],
                pf.complex.cone(x).rank(),
            )?;
            stack_objects
                .push(StackObject {
                    label: format!("τ{:?}×G{y}#{}", faces[a].ray_indices, objs.len()), cone: pf.complex.cone(x).clone()
                });
            objs.push(Obj { face: a, y, psi: pf.isos[x].clone(), ambient });
        }
    }

    // contraction witnesses between restrictions of Γ
    let mut witness: HashMap<(usize, usize), GraphMorphism> = HashMap::new();
    for (b, big) in faces.iter().enumerate() {
        for (s, small) in faces.iter().enumerate() {
            if let Some(mat) = big.subface_matrix(small) {
                let step = ConeMorphism { source: small.as_cone.clone(), target: big.as_cone.clone(), matrix: mat };
                witness.insert((b, s), specialize(&step, &restricted[b])?.1);
            }
        }
    }
    let forgotten: Vec<GraphMorphism> = moduli.morphisms.iter().map(|mm| forget_morphism(mm, label)).collect::<Result<_>>()?;

    let mut arrows = Vec::new();
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (xi, big) in objs.iter().enumerate() {
        for (xj, small) in objs.iter().enumerate() {
            let Some(w) = witness.get(&(big.face, small.face)) else { continue };
            for &a in m.hom(small.y, big.y) {
                if !same_map(&w.then(&small.psi), &big.psi.then(&forgotten[a])) {
                    continue;
                }
                let sub = faces[big.face].subface_matrix(&faces[small.face]).expect("subface");
                let image = linalg::mat_mul(
                    &block_diag(&sub, faces[small.face].dim(), &m.arrows()[a].matrix, m.cone(small.y).rank()),
                    &small.ambient,
                    stack_objects[xj].cone.rank(),
                )?;
                let mat = linalg::solve_mat(&big.ambient, stack_objects[xi].cone.rank(), &image, stack_objects[xj].cone.rank())
                    .ok_or_else(|| Error::InvalidStack("compatible cells do not nest".into()))?;
                index.insert((xj, xi, a), arrows.len());
                arrows.push((a, Arrow { src: xj, dst: xi, matrix: mat }));
            }
        }
    }
    let identities: Vec<usize> = objs.iter().enumerate().map(|(x, o)| index[&(x, x, m.identity(o.y))]).collect();
    let mut table = Vec::new();
    for (i, (a, p)) in arrows.iter().enumerate() {
        for (j, (b, q)) in arrows.iter().enumerate() {
            if p.dst != q.src {
                continue;
            }
            let c = m.compose(*a, *b).ok_or_else(|| Error::InvalidStack("moduli composition missing".into()))?;
            let k =
                *index.get(&(p.src, q.dst, c)).ok_or_else(|| Error::InvalidStack("fiber product not closed under composition".into()))?;
            table.push([i, j, k]);
        }
    }
    let h = objs.iter().map(|o| h_leg(&TropicalCurve::tautological(&moduli.graphs[o.y]), label)).collect::<Result<_>>()?;
    let stack = ConeStack::from_parts(stack_objects, arrows.into_iter().map(|x| x.1).collect(), Some(identities), Some(table))?;
    let cells = objs.into_iter().map(|o| (o.face, o.y, o.psi)).collect();
    Ok(ModuliFiber { stack, cells, h })
}

fn orbit(datum: &SectionDatum, auts: &[GraphMorphism]) -> BTreeSet<SectionDatum> {
    auts.iter().map(|a| datum.transport(a)).collect()
}

/// Certifies the universal-curve statements for `Γ` at desk scale.
///
/// Leg distances are sampled up to `leg_bound`; `budget` bounds the
/// equivalence search against the moduli fiber product.
pub fn universal_fiber_check(curve: &TropicalCurve, leg_bound: i64, budget: u64) -> Result<Certificate> {
    let mut cert = Certificate::new("universal curve");
    let sd = section_data(curve, leg_bound)?;
    let edges = sd.data.iter().filter(|d| matches!(d, SectionDatum::Edge { .. })).count();
    cert.check(
        "sampling",
        true,
        format!("{} data; edge splittings exhaustive ({edges}); leg distances sampled up to {leg_bound}", sd.data.len()),
    );
    let (g, n) = (curve.genus(), curve.graph.num_legs());
    let mut attached = Vec::new();
    let mut bad = Vec::new();
    for d in &sd.data {
        let a = attach(curve, d)?;
        if a.genus() != g || a.graph.num_legs() != n + 1 {
            bad.push(format!("{d:?}: wrong type"));
        }
        let back = forget(&a)?;
        if back.curve != *curve || back.datum != *d {
            bad.push(format!("{d:?}: forget gives {:?}", back.datum));
        }
        attached.push(a);
    }
    cert.check("forget after attach is the identity", bad.is_empty(), bad.join("; "));

    let auts = curves::isomorphisms(curve, curve)?;
    let mut mismatches = Vec::new();
    for i in 0..sd.data.len() {
        let orb = orbit(&sd.data[i], &auts);
        for j in i + 1..sd.data.len() {
            let iso = curves::are_isomorphic(&attached[i], &attached[j]);
            if iso != orb.contains(&sd.data[j]) {
                mismatches.push(format!("{:?} vs {:?}", sd.data[i], sd.data[j]));
            }
        }
    }
    cert.check(
        "attach separates automorphism orbits",
        mismatches.is_empty(),
        format!("{} automorphisms; {}", auts.len(), mismatches.join("; ")),
    );

    if curve.base == Cone::ray() && curve.graph.labels() == (1..=n as u32).collect::<Vec<_>>() && 2 * g as i64 - 2 + n as i64 > 0 {
        let max_len = curve.lengths.iter().map(|d| d.covector[0]).max().unwrap_or(0).max(leg_bound);
        let data: BTreeSet<&SectionDatum> = sd.data.iter().collect();
        let mut seen = 0usize;
        let mut missing = Vec::new();
        for gt in enumerate_stable(g, n as u32 + 1)? {
            let ne = gt.num_edges();
            for lens in (0..ne).map(|_| 1..=max_len).multi_cartesian_product().chain((ne == 0).then(Vec::new)) {
                let lengths = lens.iter().map(|&l| DualElement::from(vec![l])).collect();
                let ct = TropicalCurve::new(Cone::ray(), gt.clone(), lengths)?;
                let f = forget(&ct)?;
                let Some(phi) = curves::isomorphisms(&f.curve, curve)?.into_iter().next() else { continue };
                let d = f.datum.transport(&phi);
                if let SectionDatum::Leg { d: dist, .. } = &d {
                    if dist.covector[0] > leg_bound {
                        continue;
                    }
                }
                seen += 1;
                if !data.contains(&d) || !curves::are_isomorphic(&attach(curve, &d)?, &ct) {
                    missing.push(format!("{:?}", ct.graph));
                }
            }
        }
        cert.check(
            "every sampled curve over the fiber is attached",
            missing.is_empty(),
            format!("{seen} curves forgetting to Γ; {}", missing.join("; ")),
        );
    }

    let label = super::next_label(&curve.graph);
    let wrong_h: Vec<String> = sd
        .data
        .iter()
        .zip(&attached)
        .filter(|(d, a)| h_leg(a, label).ok() != Some(h_value(curve, d)))
        .map(|(d, _)| format!("{d:?}"))
        .collect();
    cert.check("H equals the genus at the new leg", wrong_h.is_empty(), wrong_h.join("; "));

    let mut usc = Vec::new();
    let mut natural = Vec::new();
    for face in curve.base.face_lattice() {
        for (d, a) in sd.data.iter().zip(&attached) {
            let (restricted, pulled) = pullback_datum_to_face(&face, curve, d)?;
            if h_value(&restricted, &pulled) < h_value(curve, d) {
                usc.push(format!("{d:?} on {:?}", face.ray_indices));
            }
            let lhs = a.restrict(&face)?.0;
            let rhs = attach(&restricted, &pulled)?;
            if !curves::are_isomorphic(&lhs, &rhs) {
                natural.push(format!("{d:?} on {:?}", face.ray_indices));
            }
            if h_leg(&lhs, label)? < h_leg(a, label)? {
                usc.push(format!("h_n+1 drops for {d:?} on {:?}", face.ray_indices));
            }
        }
    }
    cert.check("H and h_n+1 are upper semicontinuous on faces", usc.is_empty(), usc.join("; "));
    cert.check("attach commutes with restriction to faces", natural.is_empty(), natural.join("; "));

    let cone = cone_over(curve)?;
    cert.check(
        "Cone(Γ) has one piece per vertex, leg and edge",
        cone.num_pieces() == curve.graph.num_vertices() + n + curve.graph.num_edges(),
        format!("{} pieces", cone.num_pieces()),
    );
    let space = cone.presentation.is_cone_space()?;
    cert.check("Cone(Γ) is a cone space", space, "");
    cert.absorb(cone.presentation.verify());

    if curve.graph.labels() == (1..=n as u32).collect::<Vec<_>>() && 2 * g as i64 - 2 + n as i64 > 0 {
        let fiber = fiber_over_moduli(curve)?;
        match equivalent(&cone.presentation, &fiber.stack, budget)? {
            Some(e) => {
                let ok = e.verify(&cone.presentation, &fiber.stack).passed();
                cert.check(
                    "Cone(Γ) is equivalent to the fiber of the forgetful map",
                    ok,
                    format!("{} fiber cells", fiber.stack.num_objects()),
                );
                let h_ok = (0..cone.presentation.num_objects()).all(|x| cone.h[x] == fiber.h[e.forward.object_map[x]]);
                cert.check("H matches h_n+1 across the equivalence", h_ok, "");
            }
            None => {
                cert.check("Cone(Γ) is equivalent to the fiber of the forgetful map", false, "no equivalence found");
            }
        }
    }
    Ok(cert)
}
