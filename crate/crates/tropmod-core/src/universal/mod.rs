//! The universal curve: sections of `Cone(Γ)`, the bijection with curves
//! carrying one more marked leg, forgetting and clutching.

mod check;
mod cone;

use serde::{Deserialize, Serialize};

use crate::cones::{pullback_element, Cone, ConeMorphism, DualElement, Face};
use crate::curves::{specialize, TropicalCurve};
use crate::error::{Error, Result};
use crate::graphs::{GraphMorphism, MarkedGraph};
use crate::linalg;

pub use check::{fiber_over_moduli, section_data, universal_fiber_check, ModuliFiber, SectionData};
pub use cone::{cone_over, fiber_at_one, Cell, Piece, PieceKind, RaySlice, UniversalCone};

/// A point of a tropical curve over `σ`, i.e. a section of `Cone(Γ) -> σ`.
///
/// Edge data are stored with `d` measured from the first endpoint of the edge,
/// so the swap `(f, f', d, d') ~ (f', f, d', d)` is already quotiented out.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SectionDatum {
    Vertex { vertex: usize },
    Leg { label: u32, d: DualElement },
    Edge { edge: usize, d: DualElement, d2: DualElement },
}

impl SectionDatum {
    /// The edge datum at distance `d` from the root of `flag` and `d2` from the other end.
    pub fn oriented_edge(flag: usize, d: DualElement, d2: DualElement) -> SectionDatum {
        if flag % 2 == 0 {
            SectionDatum::Edge { edge: flag / 2, d, d2 }
        } else {
            SectionDatum::Edge { edge: flag / 2, d: d2, d2: d }
        }
    }

    pub fn validate(&self, curve: &TropicalCurve) -> Result<()> {
        let g = &curve.graph;
        let in_monoid = |d: &DualElement| -> Result<()> {
            if d.covector.len() != curve.base.rank() || !curve.base.dual_contains(&d.covector) {
                return Err(Error::InvalidDatum(format!("{:?} is not in the dual monoid", d.covector)));
            }
            if d.is_zero() {
                return Err(Error::InvalidDatum("distances must be nonzero".into()));
            }
            Ok(())
        };
        match self {
            SectionDatum::Vertex { vertex } => {
                if *vertex >= g.num_vertices() {
                    return Err(Error::InvalidDatum(format!("no vertex {vertex}")));
                }
            }
            SectionDatum::Leg { label, d } => {
                if g.leg_flag(*label).is_none() {
                    return Err(Error::InvalidDatum(format!("no leg {label}")));
                }
                in_monoid(d)?;
            }
            SectionDatum::Edge { edge, d, d2 } => {
                if *edge >= g.num_edges() {
                    return Err(Error::InvalidDatum(format!("no edge {edge}")));
                }
                in_monoid(d)?;
                in_monoid(d2)?;
                if d.add(d2)? != curve.lengths[*edge] {
                    return Err(Error::InvalidDatum("d + d' differs from the edge length".into()));
                }
            }
        }
        Ok(())
    }

    /// Image under a curve isomorphism `Γ -> Γ'`.
    pub fn transport(&self, iso: &GraphMorphism) -> SectionDatum {
        match self {
            SectionDatum::Vertex { vertex } => SectionDatum::Vertex { vertex: iso.vertex_map[*vertex] },
            SectionDatum::Leg { .. } => self.clone(),
            SectionDatum::Edge { edge, d, d2 } => {
                let f = iso.flag_map[2 * edge].expect("isomorphisms keep every flag");
                SectionDatum::oriented_edge(f, d.clone(), d2.clone())
            }
        }
    }
}

/// `H`: the weight of the vertex for vertex sections, zero otherwise.
pub fn h_value(curve: &TropicalCurve, datum: &SectionDatum) -> u32 {
    match datum {
        SectionDatum::Vertex { vertex } => curve.graph.weight(*vertex),
        _ => 0,
    }
}

/// The weight of the vertex carrying leg `label`.
pub fn h_leg(curve: &TropicalCurve, label: u32) -> Result<u32> {
    let v = curve.graph.leg_vertex(label).ok_or(Error::MissingLeg(label))?;
    Ok(curve.graph.weight(v))
}

/// The label `attach` uses: one more than the largest label present.
pub fn next_label(g: &MarkedGraph) -> u32 {
    g.legs().iter().map(|l| l.0 + 1).max().unwrap_or(1)
}

fn rebuild(weights: Vec<u32>, edges: Vec<(usize, usize)>, legs: Vec<(u32, usize)>) -> Result<MarkedGraph> {
    MarkedGraph::new(weights, edges, legs)
}

/// Adds the leg `next_label` at the point described by `datum`.
pub fn attach(curve: &TropicalCurve, datum: &SectionDatum) -> Result<TropicalCurve> {
    attach_with_label(curve, datum, next_label(&curve.graph))
}

pub fn attach_with_label(curve: &TropicalCurve, datum: &SectionDatum, label: u32) -> Result<TropicalCurve> {
    datum.validate(curve)?;
    let g = &curve.graph;
    if g.leg_flag(label).is_some() {
        return Err(Error::LabelClash(label));
    }
    let mut weights = g.weights().to_vec();
    let mut edges = g.edges().to_vec();
    let mut legs = g.legs().to_vec();
    let mut lengths = curve.lengths.clone();
    match datum {
        SectionDatum::Vertex { vertex } => legs.push((label, *vertex)),
        SectionDatum::Leg { label: l, d } => {
            let w = weights.len();
            weights.push(0);
            let k = legs.iter().position(|x| x.0 == *l).expect("validated");
            let root = legs[k].1;
            legs[k].1 = w;
            edges.push((root, w));
            lengths.push(d.clone());
            legs.push((label, w));
        }
        SectionDatum::Edge { edge, d, d2 } => {
            let w = weights.len();
            weights.push(0);
            let (a, b) = edges[*edge];
            edges[*edge] = (a, w);
            lengths[*edge] = d.clone();
            edges.push((w, b));
            lengths.push(d2.clone());
            legs.push((label, w));
        }
    }
    TropicalCurve::new(curve.base.clone(), rebuild(weights, edges, legs)?, lengths)
}

/// Which clause of the forgetful map applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForgetCase {
    /// The curve stays stable after deleting the leg.
    Stable,
    /// The leg sat on a genus-0 vertex between two edges, which are merged.
    Merged,
    /// The leg sat on a genus-0 vertex with one edge and one other leg.
    Absorbed,
}

/// Bookkeeping of a forgetful map at graph level.
#[derive(Clone, Debug)]
struct GraphForget {
    graph: MarkedGraph,
    case: ForgetCase,
    /// The vertex that carried the leg.
    vertex: usize,
    /// New index of each old vertex; `None` for a removed vertex.
    vertex_of: Vec<Option<usize>>,
    /// New flag of each old flag rooted at a surviving vertex.
    flag_of: Vec<Option<usize>>,
    /// Old edges making up each new edge, listed from its first endpoint.
    parts: Vec<Vec<usize>>,
    /// For a merged edge: `(e1, g1, g2, e2)` with `g1`, `g2` the flags at the removed vertex.
    merged: Option<(usize, usize, usize, usize)>,
    /// For an absorbed edge: the edge and the leg label.
    absorbed: Option<(usize, u32)>,
}

fn forget_graph(g: &MarkedGraph, label: u32) -> Result<GraphForget> {
    let leg = g.leg_flag(label).ok_or(Error::MissingLeg(label))?;
    let v = g.root(leg);
    let n_after = g.num_legs() as i64 - 1;
    let genus = i64::from(g.genus());
    if 2 * genus - 2 + n_after <= 0 {
        return Err(Error::UnstablePair { g: g.genus(), n: n_after as u32 });
    }
    let others: Vec<usize> = g.flags_at(v).into_iter().filter(|&f| f != leg).collect();
    let stable = 2 * i64::from(g.weight(v)) - 2 + others.len() as i64 > 0;
    let e2n = 2 * g.num_edges();
    if stable {
        let legs: Vec<(u32, usize)> = g.legs().iter().copied().filter(|l| l.0 != label).collect();
        let graph = rebuild(g.weights().to_vec(), g.edges().to_vec(), legs.clone())?;
        let mut flag_of: Vec<Option<usize>> = (0..e2n).map(Some).collect();
        flag_of.extend(g.legs().iter().map(|l| legs.iter().position(|x| x.0 == l.0).map(|k| e2n + k)));
        return Ok(GraphForget {
            graph,
            case: ForgetCase::Stable,
            vertex: v,
            vertex_of: (0..g.num_vertices()).map(Some).collect(),
            flag_of,
            parts: (0..g.num_edges()).map(|e| vec![e]).collect(),
            merged: None,
            absorbed: None,
        });
    }
    // v has genus 0 and exactly two other flags; stability of g and of the
    // target pair rule out a loop at v and two legs at v
    if g.weight(v) != 0 || others.len() != 2 {
        return Err(Error::InvalidCurve("unstable vertex outside the forgetful cases".into()));
    }
    let vertex_of: Vec<Option<usize>> = (0..g.num_vertices()).map(|u| (u != v).then(|| if u < v { u } else { u - 1 })).collect();
    let vmap = |u: usize| vertex_of[u].expect("surviving vertex");
    let (fa, fb) = (others[0], others[1]);
    match (g.edge_of_flag(fa), g.edge_of_flag(fb)) {
        (Some(ea), Some(eb)) if ea != eb => {
            let (e1, g1, e2, g2) = if ea < eb { (ea, fa, eb, fb) } else { (eb, fb, ea, fa) };
            let (f1, f2) = (g.involution(g1), g.involution(g2));
            let mut edges = Vec::new();
            let mut parts = Vec::new();
            let mut flag_of = vec![None; g.num_flags()];
            for e in 0..g.num_edges() {
                if e == e2 {
                    continue;
                }
                let i = edges.len();
                if e == e1 {
                    edges.push((vmap(g.root(f1)), vmap(g.root(f2))));
                    parts.push(vec![e1, e2]);
                    flag_of[f1] = Some(2 * i);
                    flag_of[f2] = Some(2 * i + 1);
                } else {
                    let (a, b) = g.edges()[e];
                    edges.push((vmap(a), vmap(b)));
                    parts.push(vec![e]);
                    flag_of[2 * e] = Some(2 * i);
                    flag_of[2 * e + 1] = Some(2 * i + 1);
                }
            }
            let legs: Vec<(u32, usize)> = g.legs().iter().filter(|l| l.0 != label).map(|&(l, u)| (l, vmap(u))).collect();
            let ne = edges.len();
            for (k, l) in g.legs().iter().enumerate() {
                flag_of[e2n + k] = legs.iter().position(|x| x.0 == l.0).map(|j| 2 * ne + j);
            }
            let mut weights = g.weights().to_vec();
            weights.remove(v);
            Ok(GraphForget {
                graph: rebuild(weights, edges, legs)?,
                case: ForgetCase::Merged,
                vertex: v,
                vertex_of,
                flag_of,
                parts,
                merged: Some((e1, g1, g2, e2)),
                absorbed: None,
            })
        }
        (Some(e), None) | (None, Some(e)) => {
            let gflag = if g.edge_of_flag(fa).is_some() { fa } else { fb };
            let lflag = if gflag == fa { fb } else { fa };
            let other_label = g.leg_label_of_flag(lflag).expect("a leg flag");
            let far = g.involution(gflag);
            let x = g.root(far);
            let mut edges = Vec::new();
            let mut parts = Vec::new();
            let mut flag_of = vec![None; g.num_flags()];
            for e2 in 0..g.num_edges() {
                if e2 == e {
                    continue;
                }
                let i = edges.len();
                let (a, b) = g.edges()[e2];
                edges.push((vmap(a), vmap(b)));
                parts.push(vec![e2]);
                flag_of[2 * e2] = Some(2 * i);
                flag_of[2 * e2 + 1] = Some(2 * i + 1);
            }
            let legs: Vec<(u32, usize)> =
                g.legs().iter().filter(|l| l.0 != label).map(|&(l, u)| (l, if l == other_label { vmap(x) } else { vmap(u) })).collect();
            let ne = edges.len();
            for (k, l) in g.legs().iter().enumerate() {
                if l.0 != other_label {
                    flag_of[e2n + k] = legs.iter().position(|y| y.0 == l.0).map(|j| 2 * ne + j);
                }
            }
            flag_of[far] = legs.iter().position(|y| y.0 == other_label).map(|j| 2 * ne + j);
            let mut weights = g.weights().to_vec();
            weights.remove(v);
            Ok(GraphForget {
                graph: rebuild(weights, edges, legs)?,
                case: ForgetCase::Absorbed,
                vertex: v,
                vertex_of,
                flag_of,
                parts,
                merged: None,
                absorbed: Some((e, other_label)),
            })
        }
        _ => Err(Error::InvalidCurve("unstable vertex outside the forgetful cases".into())),
    }
}

/// Result of forgetting one leg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forgotten {
    pub curve: TropicalCurve,
    pub datum: SectionDatum,
    pub case: ForgetCase,
}

/// Forgets the leg with the largest label.
pub fn forget(curve: &TropicalCurve) -> Result<Forgotten> {
    let label = curve.graph.legs().iter().map(|l| l.0).max().ok_or(Error::MissingLeg(0))?;
    forget_leg(curve, label)
}

pub fn forget_leg(curve: &TropicalCurve, label: u32) -> Result<Forgotten> {
    let gf = forget_graph(&curve.graph, label)?;
    let lengths: Vec<DualElement> = gf
        .parts
        .iter()
        .map(|p| p.iter().skip(1).try_fold(curve.lengths[p[0]].clone(), |acc, &e| acc.add(&curve.lengths[e])))
        .collect::<Result<_>>()?;
    let datum = match gf.case {
        ForgetCase::Stable => SectionDatum::Vertex { vertex: gf.vertex },
        ForgetCase::Merged => {
            let (e1, _, _, e2) = gf.merged.expect("merged case");
            SectionDatum::Edge { edge: e1, d: curve.lengths[e1].clone(), d2: curve.lengths[e2].clone() }
        }
        ForgetCase::Absorbed => {
            let (e, l) = gf.absorbed.expect("absorbed case");
            SectionDatum::Leg { label: l, d: curve.lengths[e].clone() }
        }
    };
    let forgotten = TropicalCurve::new(curve.base.clone(), gf.graph, lengths)?;
    Ok(Forgotten { curve: forgotten, datum, case: gf.case })
}

/// The morphism `π(G) -> π(G')` induced by `m: G -> G'` when forgetting `label`.
pub fn forget_morphism(m: &GraphMorphism, label: u32) -> Result<GraphMorphism> {
    let src = forget_graph(&m.source, label)?;
    let dst = forget_graph(&m.target, label)?;
    let g = &m.source;
    let new_flag =
        |f: usize| -> Result<usize> { dst.flag_of[f].ok_or_else(|| Error::InvalidGraph("morphism meets the removed vertex".into())) };
    let contracted: Vec<usize> =
        (0..src.graph.num_edges()).filter(|&i| src.parts[i].iter().all(|&e| m.flag_map[2 * e].is_none())).collect();
    let mut flag_map = vec![None; src.graph.num_flags()];
    for (phi, slot) in flag_map.iter_mut().enumerate() {
        if let Some(l) = src.graph.leg_label_of_flag(phi) {
            *slot = dst.graph.leg_flag(l);
        }
    }
    for f in 0..g.num_flags() {
        let Some(phi) = src.flag_of[f] else { continue };
        match src.graph.edge_of_flag(phi) {
            None => continue,
            Some(e) if contracted.contains(&e) => continue,
            Some(_) => {}
        }
        let image = match m.flag_map[f] {
            Some(t) => new_flag(t)?,
            None => {
                // the old edge at this end is contracted; continue through the removed vertex
                let (e1, g1, g2, _) = src.merged.expect("only merged edges have two parts");
                let through = if g.edge_of_flag(f) == Some(e1) { g2 } else { g1 };
                new_flag(m.flag_map[through].expect("the other part survives"))?
            }
        };
        flag_map[phi] = Some(image);
    }
    let mut vertex_map = vec![0; src.graph.num_vertices()];
    for u in 0..g.num_vertices() {
        if let Some(nu) = src.vertex_of[u] {
            vertex_map[nu] =
                dst.vertex_of[m.vertex_map[u]].ok_or_else(|| Error::InvalidGraph("morphism meets the removed vertex".into()))?;
        }
    }
    let out = GraphMorphism { source: src.graph, target: dst.graph, contracted, vertex_map, flag_map };
    if !out.is_valid() {
        return Err(Error::InvalidGraph("induced map on forgotten graphs is not a morphism".into()));
    }
    Ok(out)
}

/// Pullback of a section along `f: τ -> σ`, together with the pulled-back curve.
pub fn pullback_datum(f: &ConeMorphism, curve: &TropicalCurve, datum: &SectionDatum) -> Result<(TropicalCurve, SectionDatum)> {
    datum.validate(curve)?;
    let (pulled, w) = specialize(f, curve)?;
    let out = match datum {
        SectionDatum::Vertex { vertex } => SectionDatum::Vertex { vertex: w.vertex_map[*vertex] },
        SectionDatum::Leg { label, d } => {
            let d = pullback_element(f, d)?;
            if d.is_zero() {
                SectionDatum::Vertex { vertex: w.vertex_map[curve.graph.leg_vertex(*label).expect("validated")] }
            } else {
                SectionDatum::Leg { label: *label, d }
            }
        }
        SectionDatum::Edge { edge, d, d2 } => {
            let (d, d2) = (pullback_element(f, d)?, pullback_element(f, d2)?);
            let (a, b) = curve.graph.edges()[*edge];
            match w.flag_map[2 * edge] {
                None => SectionDatum::Vertex { vertex: w.vertex_map[a] },
                Some(_) if d.is_zero() => SectionDatum::Vertex { vertex: w.vertex_map[a] },
                Some(_) if d2.is_zero() => SectionDatum::Vertex { vertex: w.vertex_map[b] },
                Some(t) => SectionDatum::oriented_edge(t, d, d2),
            }
        }
    };
    Ok((pulled, out))
}

pub fn pullback_datum_to_face(face: &Face, curve: &TropicalCurve, datum: &SectionDatum) -> Result<(TropicalCurve, SectionDatum)> {
    pullback_datum(&face.inclusion_morphism(), curve, datum)
}

fn check_clutch_length(base: &Cone, d: &DualElement) -> Result<()> {
    if d.is_zero() {
        return Err(Error::ZeroLength);
    }
    if d.covector.len() != base.rank() || !base.dual_contains(&d.covector) {
        return Err(Error::InvalidCurve(format!("{:?} is not in the dual monoid", d.covector)));
    }
    Ok(())
}

/// Glues leg `star` of `left` to leg `bullet` of `right` along a new edge of length `d`.
pub fn clutch(left: &TropicalCurve, star: u32, right: &TropicalCurve, bullet: u32, d: &DualElement) -> Result<TropicalCurve> {
    if left.base != right.base {
        return Err(Error::BaseMismatch);
    }
    check_clutch_length(&left.base, d)?;
    let a = left.graph.leg_vertex(star).ok_or(Error::MissingLeg(star))?;
    let b = right.graph.leg_vertex(bullet).ok_or(Error::MissingLeg(bullet))?;
    let kept1: Vec<(u32, usize)> = left.graph.legs().iter().copied().filter(|l| l.0 != star).collect();
    let kept2: Vec<(u32, usize)> = right.graph.legs().iter().copied().filter(|l| l.0 != bullet).collect();
    if let Some(&(l, _)) = kept2.iter().find(|l| kept1.iter().any(|k| k.0 == l.0)) {
        return Err(Error::LabelClash(l));
    }
    let off = left.graph.num_vertices();
    let mut weights = left.graph.weights().to_vec();
    weights.extend_from_slice(right.graph.weights());
    let mut edges = left.graph.edges().to_vec();
    edges.extend(right.graph.edges().iter().map(|&(x, y)| (x + off, y + off)));
    edges.push((a, b + off));
    let mut legs = kept1;
    legs.extend(kept2.into_iter().map(|(l, v)| (l, v + off)));
    let mut lengths = left.lengths.clone();
    lengths.extend(right.lengths.iter().cloned());
    lengths.push(d.clone());
    TropicalCurve::new(left.base.clone(), rebuild(weights, edges, legs)?, lengths)
}

/// Joins legs `star` and `bullet` of one curve by a new edge of length `d`.
pub fn self_clutch(curve: &TropicalCurve, star: u32, bullet: u32, d: &DualElement) -> Result<TropicalCurve> {
    check_clutch_length(&curve.base, d)?;
    if star == bullet {
        return Err(Error::LabelClash(star));
    }
    let a = curve.graph.leg_vertex(star).ok_or(Error::MissingLeg(star))?;
    let b = curve.graph.leg_vertex(bullet).ok_or(Error::MissingLeg(bullet))?;
    let legs: Vec<(u32, usize)> = curve.graph.legs().iter().copied().filter(|l| l.0 != star && l.0 != bullet).collect();
    let mut edges = curve.graph.edges().to_vec();
    edges.push((a, b));
    let mut lengths = curve.lengths.clone();
    lengths.push(d.clone());
    TropicalCurve::new(curve.base.clone(), rebuild(curve.graph.weights().to_vec(), edges, legs)?, lengths)
}

/// Every lattice point `m` with `0 <= <m, r> <= upper[i]` for each ray `r_i` of `cone`.
pub(crate) fn lattice_points_between(cone: &Cone, upper: &[i64]) -> Result<Vec<Vec<i64>>> {
    let n = cone.rank();
    if n == 0 {
        return Ok(vec![Vec::new()]);
    }
    let rays = cone.rays();
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..rays.len() {
        let mut trial: Vec<Vec<i64>> = basis.iter().map(|&j| rays[j].clone()).collect();
        trial.push(rays[i].clone());
        if linalg::rank_int(&trial, n) == trial.len() {
            basis.push(i);
        }
    }
    // <m, r_i> = v_i for the basis rays, so m = B^{-T} v
    let cols: Vec<Vec<num_rational::BigRational>> =
        (0..n).map(|c| basis.iter().map(|&i| num_rational::BigRational::from_integer(rays[i][c].into())).collect()).collect();
    let mut out = Vec::new();
    let ranges: Vec<std::ops::RangeInclusive<i64>> = basis.iter().map(|&i| 0..=upper[i]).collect();
    for v in itertools::Itertools::multi_cartesian_product(ranges.into_iter()) {
        let target = linalg::to_rat(&v);
        let Some(m) = linalg::solve(&cols, &target) else { continue };
        if m.iter().any(|x| !x.is_integer()) {
            continue;
        }
        let m: Vec<i64> = m.iter().map(|x| i64::try_from(x.to_integer()).map_err(|_| Error::Overflow)).collect::<Result<_>>()?;
        if rays.iter().zip(upper).all(|(r, &u)| (0..=i128::from(u)).contains(&linalg::dot(&m, r))) {
            out.push(m);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests;
