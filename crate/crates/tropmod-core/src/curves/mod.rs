//! Tropical curves over a cone: a stable graph with edge lengths in the dual monoid.

use num_rational::BigRational;
use num_traits::Signed;

use crate::cones::{pullback_element, Cone, ConeMorphism, DualElement, Face};
use crate::error::{Error, Result};
use crate::graphs::{self, GraphMorphism, MarkedGraph};
use crate::linalg;

/// A curve isomorphism is a graph isomorphism matching lengths edgewise.
pub type CurveIsomorphism = GraphMorphism;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropicalCurve {
    pub base: Cone,
    pub graph: MarkedGraph,
    /// `d(e)` for each edge, a covector on `base`.
    pub lengths: Vec<DualElement>,
}

impl TropicalCurve {
    pub fn new(base: Cone, graph: MarkedGraph, lengths: Vec<DualElement>) -> Result<TropicalCurve> {
        if lengths.len() != graph.num_edges() {
            return Err(Error::InvalidCurve("one length per edge is required".into()));
        }
        if !graph.is_stable() {
            return Err(Error::InvalidCurve("graph is not stable".into()));
        }
        for d in &lengths {
            if d.covector.len() != base.rank() {
                return Err(Error::InvalidCurve("length covector has the wrong rank".into()));
            }
            if d.is_zero() {
                return Err(Error::InvalidCurve("edge length is the zero covector".into()));
            }
            if !base.dual_contains(&d.covector) {
                return Err(Error::InvalidCurve(format!("{:?} is negative on the base", d.covector)));
            }
        }
        Ok(TropicalCurve { base, graph, lengths })
    }

    /// The curve over `R^{E(G)}_{>=0}` whose edge `i` has length `e_i^*`.
    pub fn tautological(graph: &MarkedGraph) -> TropicalCurve {
        let n = graph.num_edges();
        let lengths = (0..n).map(|i| DualElement::from((0..n).map(|j| i64::from(i == j)).collect::<Vec<_>>())).collect();
        TropicalCurve { base: Cone::orthant(n), graph: graph.clone(), lengths }
    }

    pub fn genus(&self) -> u32 {
        self.graph.genus()
    }

    pub fn length(&self, e: usize) -> &DualElement {
        &self.lengths[e]
    }

    /// Restriction to a face of the base.
    pub fn restrict(&self, face: &Face) -> Result<(TropicalCurve, GraphMorphism)> {
        specialize(&face.inclusion_morphism(), self)
    }
}

/// Pullback along `f: τ -> σ`: edges whose pulled-back length vanishes are contracted.
pub fn pullback(f: &ConeMorphism, curve: &TropicalCurve) -> Result<TropicalCurve> {
    Ok(specialize(f, curve)?.0)
}

/// Pullback together with the contraction witness `Γ -> f*Γ`.
pub fn specialize(f: &ConeMorphism, curve: &TropicalCurve) -> Result<(TropicalCurve, GraphMorphism)> {
    if f.target != curve.base {
        return Err(Error::BaseMismatch);
    }
    let pulled: Vec<DualElement> = curve.lengths.iter().map(|d| pullback_element(f, d)).collect::<Result<_>>()?;
    let zero: Vec<usize> = (0..pulled.len()).filter(|&e| pulled[e].is_zero()).collect();
    let (graph, witness) = curve.graph.contract(&zero);
    let mut lengths = vec![DualElement::from(Vec::new()); graph.num_edges()];
    for (e, d) in pulled.into_iter().enumerate() {
        if let Some(t) = witness.edge_image(e) {
            lengths[t] = d;
        }
    }
    Ok((TropicalCurve { base: f.source.clone(), graph, lengths }, witness))
}

/// All isomorphisms `a -> b` of curves over the same cone.
pub fn isomorphisms(a: &TropicalCurve, b: &TropicalCurve) -> Result<Vec<CurveIsomorphism>> {
    if a.base != b.base {
        return Err(Error::BaseMismatch);
    }
    Ok(graphs::isomorphisms(&a.graph, &b.graph)
        .into_iter()
        .filter(|m| (0..a.graph.num_edges()).all(|e| a.lengths[e] == b.lengths[m.edge_image(e).unwrap()]))
        .collect())
}

pub fn are_isomorphic(a: &TropicalCurve, b: &TropicalCurve) -> bool {
    a.base == b.base && isomorphisms(a, b).is_ok_and(|v| !v.is_empty())
}

/// A metric graph: the combinatorial type with positive rational lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    pub graph: MarkedGraph,
    pub lengths: Vec<BigRational>,
}

/// Evaluates the lengths at a rational point of the interior of the base.
pub fn realize_metric(curve: &TropicalCurve, p: &[BigRational]) -> Result<MetricGraph> {
    if p.len() != curve.base.rank() || !curve.base.contains_rational(p) {
        return Err(Error::OutsideCone);
    }
    if !curve.base.is_interior(p) {
        return Err(Error::NotInterior);
    }
    let lengths: Vec<BigRational> = curve.lengths.iter().map(|d| linalg::dot_rat_int(&d.covector, p)).collect();
    debug_assert!(lengths.iter().all(|l| l.is_positive()));
    Ok(MetricGraph { graph: curve.graph.clone(), lengths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::named::*;
    use num_bigint::BigInt;

    fn rat(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
    }

    fn loop_curve(len: i64) -> TropicalCurve {
        TropicalCurve::new(Cone::orthant(1), loop_with_leg(), vec![vec![len].into()]).unwrap()
    }

    /// Two loops at one genus-0 vertex, lengths `e_1^*` and `e_2^*`.
    fn two_loops() -> TropicalCurve {
        let g = MarkedGraph::new(vec![0], vec![(0, 0), (0, 0)], vec![]).unwrap();
        TropicalCurve::tautological(&g)
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(TropicalCurve::new(Cone::orthant(1), loop_with_leg(), vec![vec![0].into()]).is_err());
        assert!(TropicalCurve::new(Cone::orthant(1), loop_with_leg(), vec![vec![-1].into()]).is_err());
        assert!(TropicalCurve::new(Cone::zero(), point(0, 2), vec![]).is_err());
    }

    #[test]
    fn pullback_to_cone_point() {
        let f = ConeMorphism::new(Cone::zero(), Cone::orthant(1), vec![vec![]]).unwrap();
        let c = pullback(&f, &loop_curve(1)).unwrap();
        assert_eq!(c.graph, point(1, 1));
        assert!(c.lengths.is_empty());
    }

    #[test]
    fn pullback_identity() {
        let c = loop_curve(2);
        assert_eq!(pullback(&ConeMorphism::identity(&c.base), &c).unwrap(), c);
    }

    #[test]
    fn pullback_to_axis() {
        let c = two_loops();
        let x_axis = c.base.face_lattice().into_iter().find(|f| f.dim() == 1 && f.parent.rays()[f.ray_indices[0]] == vec![1, 0]).unwrap();
        let (r, w) = c.restrict(&x_axis).unwrap();
        assert_eq!(r.graph.num_edges(), 1);
        assert_eq!(r.lengths[0].covector, vec![1]);
        assert_eq!(r.graph.weight(0), 1);
        assert_eq!(w.contracted, vec![1]);
    }

    #[test]
    fn curve_isomorphism_examples() {
        assert_eq!(isomorphisms(&loop_curve(1), &loop_curve(1)).unwrap().len(), 2);
        assert!(isomorphisms(&loop_curve(1), &loop_curve(2)).unwrap().is_empty());
        let t = TropicalCurve::tautological(&theta());
        assert_eq!(graphs::automorphisms(&t.graph).len(), 12);
        assert_eq!(isomorphisms(&t, &t).unwrap().len(), 2);
        let other = TropicalCurve::new(Cone::orthant(3), theta(), vec![vec![1, 0, 0].into(); 3]).unwrap();
        assert_eq!(isomorphisms(&t, &other), Ok(vec![]));
        let ray = TropicalCurve::new(Cone::orthant(2), loop_with_leg(), vec![vec![1, 1].into()]).unwrap();
        assert_eq!(isomorphisms(&loop_curve(1), &ray), Err(Error::BaseMismatch));
    }

    #[test]
    fn automorphisms_form_a_group() {
        let t = TropicalCurve::tautological(&dumbbell());
        let auts = isomorphisms(&t, &t).unwrap();
        for a in &auts {
            assert!(auts.contains(&a.inverse()));
            for b in &auts {
                assert!(auts.contains(&a.then(b)));
            }
        }
    }

    #[test]
    fn specialization_is_functorial_over_faces() {
        for g in [theta(), dumbbell()] {
            let c = TropicalCurve::tautological(&g);
            let faces = c.base.face_lattice();
            for big in &faces {
                for small in faces.iter().filter(|f| big.contains_face(f)) {
                    let (c1, w1) = c.restrict(big).unwrap();
                    let step = ConeMorphism::new(small.as_cone.clone(), big.as_cone.clone(), big.subface_matrix(small).unwrap()).unwrap();
                    let (c2, w2) = specialize(&step, &c1).unwrap();
                    let (direct, wd) = c.restrict(small).unwrap();
                    assert_eq!(c2, direct);
                    assert_eq!(w1.then(&w2), wd);
                    assert_eq!(direct.genus(), c.genus());
                    assert_eq!(direct.graph.labels(), c.graph.labels());
                }
            }
        }
    }

    #[test]
    fn realize_examples() {
        assert_eq!(realize_metric(&loop_curve(3), &rat(&[1])).unwrap().lengths, rat(&[3]));
        assert_eq!(realize_metric(&loop_curve(3), &rat(&[2])).unwrap().lengths, rat(&[6]));
        let c = two_loops();
        assert_eq!(realize_metric(&c, &rat(&[1, 2])).unwrap().lengths, rat(&[1, 2]));
        assert_eq!(realize_metric(&c, &rat(&[1, 0])), Err(Error::NotInterior));
        assert_eq!(realize_metric(&c, &rat(&[1, -1])), Err(Error::OutsideCone));
    }

    #[test]
    fn face_points_match_pullback_edges() {
        let c = two_loops();
        for face in c.base.face_lattice() {
            let p: Vec<BigRational> = (0..2)
                .map(|i| BigRational::from_integer(face.ray_indices.iter().map(|&r| BigInt::from(face.parent.rays()[r][i])).sum()))
                .collect();
            let positive = c.lengths.iter().filter(|d| linalg::dot_rat_int(&d.covector, &p).is_positive()).count();
            assert_eq!(c.restrict(&face).unwrap().0.graph.num_edges(), positive);
        }
    }
}
