use super::*;
use crate::cones::{Cone, ConeMorphism, DualElement};
use crate::curves::{are_isomorphic, TropicalCurve};
use crate::graphs::{enumerate_stable, MarkedGraph};
use crate::linalg;
use crate::Error;

fn dual(v: &[i64]) -> DualElement {
    DualElement::from(v.to_vec())
}

fn curve(base: Cone, weights: Vec<u32>, edges: Vec<(usize, usize)>, legs: Vec<(u32, usize)>, lengths: &[&[i64]]) -> TropicalCurve {
    let g = MarkedGraph::new(weights, edges, legs).unwrap();
    TropicalCurve::new(base, g, lengths.iter().map(|l| dual(l)).collect()).unwrap()
}

fn marked_loop(k: i64) -> TropicalCurve {
    curve(Cone::ray(), vec![0], vec![(0, 0)], vec![(1, 0)], &[&[k]])
}

/// Every curve over a ray with the given type and edge lengths in `1..=max`.
fn ray_corpus(g: u32, n: u32, max: i64) -> Vec<TropicalCurve> {
    let mut out = Vec::new();
    for graph in enumerate_stable(g, n).unwrap() {
        let ne = graph.num_edges();
        let mut lens = vec![1i64; ne];
        loop {
            let lengths = lens.iter().map(|&l| dual(&[l])).collect();
            out.push(TropicalCurve::new(Cone::ray(), graph.clone(), lengths).unwrap());
            let Some(i) = lens.iter().position(|&l| l < max) else { break };
            lens[i] += 1;
            lens[..i].iter_mut().for_each(|l| *l = 1);
        }
    }
    out
}

#[test]
fn loop_cone_has_waffle_pattern() {
    let u = cone_over(&marked_loop(1)).unwrap();
    assert_eq!(u.num_pieces(), 3);
    assert_eq!(u.presentation.num_objects(), 5);
    assert_eq!(u.presentation.is_cone_space(), Ok(true));
    assert!(u.presentation.verify().passed());

    let edge = u.pieces.iter().find(|p| p.kind == PieceKind::Edge(0)).unwrap();
    let mut rays: Vec<Vec<i64>> = edge.cone.rays().iter().map(|r| linalg::mat_vec(&edge.embedding, r).unwrap()).collect();
    rays.sort();
    assert_eq!(rays, vec![vec![1, 0, 1], vec![1, 1, 0]]);

    let v = u.vertex_cell(0);
    let e = u.cells.iter().position(|c| matches!(c, Cell::Edge { edge: 0, rays } if rays.len() == 2)).unwrap();
    assert_eq!(u.presentation.hom(v, e).len(), 2);
    let leg = u.sections[0].1;
    assert_eq!(u.presentation.cone(leg).rank(), 2);
    assert_eq!(u.presentation.hom(v, leg).len(), 1);
}

#[test]
fn point_over_zero_cone() {
    let c = curve(Cone::zero(), vec![1], vec![], vec![(1, 0)], &[]);
    let u = cone_over(&c).unwrap();
    assert_eq!(u.num_pieces(), 2);
    let dims: Vec<usize> = u.presentation.objects().iter().map(|o| o.cone.rank()).collect();
    assert_eq!(dims, vec![0, 1]);
    assert_eq!(u.h, vec![1, 0]);
}

#[test]
fn bridge_over_quadrant() {
    let c = curve(Cone::orthant(2), vec![1, 1], vec![(0, 1)], vec![], &[&[0, 1]]);
    let u = cone_over(&c).unwrap();
    let edge = u.pieces.iter().find(|p| p.kind == PieceKind::Edge(0)).unwrap();
    assert_eq!(edge.cone.rank(), 3);

    // oracle: the fiber product of d(e) and the sum map
    let ray = Cone::ray();
    let d = ConeMorphism::new(Cone::orthant(2), ray.clone(), vec![vec![0, 1]]).unwrap();
    let sum = ConeMorphism::new(Cone::orthant(2), ray, vec![vec![1, 1]]).unwrap();
    let fp = crate::cones::fiber_product(&d, &sum).unwrap();
    assert_eq!(fp.cone.rays().len(), edge.cone.rays().len());

    let (a, b) = (u.vertex_cell(0), u.vertex_cell(1));
    assert_ne!(a, b);
    let top = u.cells.iter().position(|c| matches!(c, Cell::Edge { edge: 0, rays } if rays.len() == edge.cone.rays().len())).unwrap();
    assert_eq!(u.presentation.hom(a, top).len(), 1);
    assert_eq!(u.presentation.hom(b, top).len(), 1);
    // over the face where the edge has length zero the endpoints coincide
    let merged = u.cells.iter().filter(|c| matches!(c, Cell::Vertex { members, .. } if members.len() == 2)).count();
    assert_eq!(merged, 2);
    assert!(u.h.iter().any(|&h| h == 2));
}

#[test]
fn structure_map_splits_the_sections() {
    for c in [marked_loop(3), curve(Cone::orthant(2), vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![], &[&[1, 0], &[0, 1], &[1, 1]])] {
        let u = cone_over(&c).unwrap();
        for p in &u.pieces {
            for (_, s) in &p.sections {
                let back = linalg::mat_mul(
                    &p.projection,
                    &linalg::solve_mat(&p.embedding, p.cone.rank(), s, c.base.rank()).unwrap(),
                    c.base.rank(),
                )
                .unwrap();
                assert_eq!(back, linalg::identity(c.base.rank()));
            }
        }
    }
}

#[test]
fn ray_slices() {
    for k in [2, 3] {
        let s = fiber_at_one(&marked_loop(k)).unwrap();
        assert_eq!(s.lengths, vec![k as u64]);
        assert_eq!(s.weights, vec![0]);
        assert_eq!(s.infinite_legs, vec![1]);
    }
    let c = curve(Cone::orthant(2), vec![1, 1], vec![(0, 1)], vec![], &[&[0, 1]]);
    assert_eq!(fiber_at_one(&c), Err(Error::NotRay));
}

#[test]
fn ray_slices_on_a_corpus() {
    let mut corpus = ray_corpus(1, 2, 2);
    corpus.extend(ray_corpus(2, 0, 1));
    corpus.truncate(20);
    assert_eq!(corpus.len(), 20);
    for c in &corpus {
        let s = fiber_at_one(c).unwrap();
        let expected: Vec<u64> = c.lengths.iter().map(|d| d.covector[0] as u64).collect();
        assert_eq!(s.lengths, expected);
        assert_eq!(s.weights, c.graph.weights());
        assert_eq!(s.graph, c.graph);
    }
}

#[test]
fn h_values() {
    let c = curve(Cone::ray(), vec![2], vec![], vec![(1, 0)], &[]);
    assert_eq!(h_value(&c, &SectionDatum::Vertex { vertex: 0 }), 2);
    assert_eq!(h_value(&c, &SectionDatum::Leg { label: 1, d: dual(&[1]) }), 0);
}

#[test]
fn h_jumps_on_a_contracting_face() {
    // (0, 1) has no splitting into two nonzero elements, so use (0, 2)
    let c = curve(Cone::orthant(2), vec![1, 2], vec![(0, 1)], vec![], &[&[0, 2]]);
    let d = SectionDatum::Edge { edge: 0, d: dual(&[0, 1]), d2: dual(&[0, 1]) };
    d.validate(&c).unwrap();
    assert_eq!(h_value(&c, &d), 0);
    let killed = c.base.rays().iter().position(|r| r == &vec![1, 0]).unwrap();
    let face = c.base.face_of_rays(&[killed]);
    let (r, pulled) = pullback_datum_to_face(&face, &c, &d).unwrap();
    assert!(matches!(pulled, SectionDatum::Vertex { .. }));
    assert_eq!(h_value(&r, &pulled), 3);
}

#[test]
fn invalid_data_are_rejected() {
    let c = marked_loop(2);
    let bad = SectionDatum::Edge { edge: 0, d: dual(&[1]), d2: dual(&[2]) };
    assert!(matches!(attach(&c, &bad), Err(Error::InvalidDatum(_))));
    let zero = SectionDatum::Leg { label: 1, d: dual(&[0]) };
    assert!(matches!(attach(&c, &zero), Err(Error::InvalidDatum(_))));
    let clash = SectionDatum::Vertex { vertex: 0 };
    assert_eq!(attach_with_label(&c, &clash, 1), Err(Error::LabelClash(1)));
}

#[test]
fn splitting_a_loop() {
    let c = marked_loop(2);
    let a = attach(&c, &SectionDatum::Edge { edge: 0, d: dual(&[1]), d2: dual(&[1]) }).unwrap();
    let expected = curve(Cone::ray(), vec![0, 0], vec![(0, 1), (1, 0)], vec![(1, 0), (2, 1)], &[&[1], &[1]]);
    assert!(are_isomorphic(&a, &expected));
    let f = forget(&a).unwrap();
    assert_eq!(f.case, ForgetCase::Merged);
    assert_eq!(f.curve, c);
}

#[test]
fn attach_at_a_vertex() {
    let c = marked_loop(1);
    let a = attach(&c, &SectionDatum::Vertex { vertex: 0 }).unwrap();
    assert_eq!(a.graph.edges(), c.graph.edges());
    assert_eq!(a.graph.leg_vertex(2), Some(0));
    assert_eq!(forget(&a).unwrap().case, ForgetCase::Stable);
}

#[test]
fn tautological_section_is_a_tripod() {
    let c = curve(Cone::ray(), vec![1], vec![], vec![(1, 0)], &[]);
    let a = attach(&c, &SectionDatum::Leg { label: 1, d: dual(&[4]) }).unwrap();
    let expected = curve(Cone::ray(), vec![1, 0], vec![(0, 1)], vec![(1, 1), (2, 1)], &[&[4]]);
    assert!(are_isomorphic(&a, &expected));
}

#[test]
fn forget_absorbs_a_leg_vertex() {
    let c = curve(Cone::ray(), vec![1, 0], vec![(0, 1)], vec![(1, 1), (2, 1)], &[&[3]]);
    let f = forget(&c).unwrap();
    assert_eq!(f.case, ForgetCase::Absorbed);
    assert_eq!(f.curve, curve(Cone::ray(), vec![1], vec![], vec![(1, 0)], &[]));
    assert_eq!(f.datum, SectionDatum::Leg { label: 1, d: dual(&[3]) });

    let c = curve(Cone::ray(), vec![0, 0], vec![(0, 0), (0, 1)], vec![(1, 1), (2, 1)], &[&[2], &[5]]);
    let f = forget(&c).unwrap();
    assert_eq!(f.case, ForgetCase::Absorbed);
    assert_eq!(f.curve, curve(Cone::ray(), vec![0], vec![(0, 0)], vec![(1, 0)], &[&[2]]));
    assert_eq!(f.datum, SectionDatum::Leg { label: 1, d: dual(&[5]) });
}

#[test]
fn forget_a_stable_leg() {
    let c = curve(Cone::ray(), vec![1], vec![], vec![(1, 0), (2, 0)], &[]);
    let f = forget(&c).unwrap();
    assert_eq!(f.case, ForgetCase::Stable);
    assert_eq!(f.datum, SectionDatum::Vertex { vertex: 0 });
}

#[test]
fn forget_needs_a_stable_target() {
    let c = curve(Cone::ray(), vec![0], vec![], vec![(1, 0), (2, 0), (3, 0)], &[]);
    assert!(matches!(forget(&c), Err(Error::UnstablePair { .. })));
}

#[test]
fn clutching_two_elliptic_tails() {
    let left = curve(Cone::ray(), vec![1], vec![], vec![(1, 0)], &[]);
    let right = curve(Cone::ray(), vec![1], vec![], vec![(2, 0)], &[]);
    let c = clutch(&left, 1, &right, 2, &dual(&[5])).unwrap();
    assert_eq!(c.genus(), 2);
    assert_eq!(c.graph.num_legs(), 0);
    assert!(are_isomorphic(&c, &curve(Cone::ray(), vec![1, 1], vec![(0, 1)], vec![], &[&[5]])));
    assert_eq!(clutch(&left, 1, &right, 2, &dual(&[0])), Err(Error::ZeroLength));
    assert_eq!(clutch(&left, 2, &right, 2, &dual(&[1])), Err(Error::MissingLeg(2)));
}

#[test]
fn clutch_then_contract() {
    let left = curve(Cone::ray(), vec![1, 0], vec![(0, 1)], vec![(1, 1), (2, 1)], &[&[2]]);
    let right = curve(Cone::ray(), vec![0], vec![(0, 0)], vec![(3, 0), (4, 0)], &[&[1]]);
    let c = clutch(&left, 2, &right, 4, &dual(&[3])).unwrap();
    assert_eq!((c.genus(), c.graph.num_legs()), (left.genus() + right.genus(), 2));
    let new = c.graph.num_edges() - 1;
    let (contracted, _) = c.graph.contract(&[new]);
    let single = left.graph.contract(&[0]).0;
    assert_eq!(contracted.num_vertices(), left.graph.num_vertices() + right.graph.num_vertices() - 1);
    assert_eq!(contracted.genus(), 2);
    let (all, _) = c.graph.contract(&(0..c.graph.num_edges()).filter(|&e| !c.graph.is_loop(e)).collect::<Vec<_>>());
    assert_eq!(all.num_vertices(), 1);
    assert_eq!(all.weight(0) + all.b1(), single.weight(0) + 1);
    assert_eq!(all.labels(), vec![1, 3]);
}

#[test]
fn self_clutching() {
    let c = curve(Cone::ray(), vec![0], vec![], vec![(1, 0), (2, 0), (3, 0)], &[]);
    let s = self_clutch(&c, 2, 3, &dual(&[1])).unwrap();
    assert_eq!(s, marked_loop(1));
    assert_eq!(s.genus(), c.genus() + 1);

    let c = curve(Cone::ray(), vec![0, 0], vec![(0, 1)], vec![(1, 0), (2, 0), (3, 1), (4, 1)], &[&[1]]);
    let s = self_clutch(&c, 2, 4, &dual(&[2])).unwrap();
    assert!(!s.graph.is_loop(1));
    assert_eq!(s.genus(), 1);
    assert_eq!(self_clutch(&c, 2, 4, &dual(&[0])), Err(Error::ZeroLength));
}

#[test]
fn loop_of_length_two_has_one_splitting() {
    let sd = section_data(&marked_loop(2), 3).unwrap();
    let edges: Vec<&SectionDatum> = sd.data.iter().filter(|d| matches!(d, SectionDatum::Edge { .. })).collect();
    assert_eq!(edges, vec![&SectionDatum::Edge { edge: 0, d: dual(&[1]), d2: dual(&[1]) }]);
    assert!(sd.data.contains(&SectionDatum::Vertex { vertex: 0 }));
    assert_eq!(sd.data.iter().filter(|d| matches!(d, SectionDatum::Leg { .. })).count(), 3);
}

#[test]
fn point_over_zero_cone_has_only_the_vertex() {
    let c = curve(Cone::zero(), vec![1], vec![], vec![(1, 0)], &[]);
    let sd = section_data(&c, 5).unwrap();
    assert_eq!(sd.data, vec![SectionDatum::Vertex { vertex: 0 }]);
    let a = attach(&c, &sd.data[0]).unwrap();
    assert_eq!(a.graph, MarkedGraph::new(vec![1], vec![], vec![(1, 0), (2, 0)]).unwrap());
    let cert = universal_fiber_check(&c, 5, 100_000).unwrap();
    assert!(cert.passed(), "{:?}", cert.failures());
}

#[test]
fn round_trips_on_corpora() {
    for (g, n) in [(1, 2), (1, 3), (2, 1)] {
        for c in ray_corpus(g, n, 2) {
            let f = forget(&c).unwrap();
            let back = attach(&f.curve, &f.datum).unwrap();
            assert!(are_isomorphic(&back, &c), "{:?}", c.graph);
            assert_eq!(back.graph.labels(), c.graph.labels());
            assert_eq!(forget(&back).unwrap().curve, f.curve);
        }
    }
}

#[test]
fn forget_transports_morphisms() {
    for c in ray_corpus(1, 2, 1) {
        for e in 0..c.graph.num_edges() {
            let (small, m) = c.graph.contract(&[e]);
            if !small.is_stable() {
                continue;
            }
            let fm = forget_morphism(&m, 2).unwrap();
            assert!(fm.is_valid());
        }
    }
}

#[test]
fn universal_check_on_the_marked_loop() {
    let c = marked_loop(1);
    let fiber = fiber_over_moduli(&c).unwrap();
    // each cell shows up once per choice of ψ, and the choices are isomorphic
    assert_eq!(fiber.stack.num_objects(), 8);
    assert_eq!(crate::stacks::skeleton(&fiber.stack).unwrap().stack.num_objects(), 5);
    let cert = universal_fiber_check(&c, 3, 1_000_000).unwrap();
    assert!(cert.passed(), "{:?}", cert.failures());
    assert!(cert.get("Cone(Γ) is equivalent to the fiber of the forgetful map").unwrap().passed);
}

#[test]
fn universal_check_on_small_curves() {
    for c in [marked_loop(2), curve(Cone::ray(), vec![0, 1], vec![(0, 1)], vec![(1, 0), (2, 0)], &[&[2]])] {
        let cert = universal_fiber_check(&c, 2, 1_000_000).unwrap();
        assert!(cert.passed(), "{:?}", cert.failures());
    }
}

#[test]
fn dot_export_marks_sections() {
    let dot = cone_over(&marked_loop(1)).unwrap().to_dot("loop");
    assert!(dot.contains("xlabel=\"s_1\""));
    assert!(dot.contains("style=dashed"));
}
