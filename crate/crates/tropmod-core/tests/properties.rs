use proptest::prelude::*;

use tropmod_core::cones::{fiber_product, Cone, ConeMorphism, DualElement};
use tropmod_core::curves::{are_isomorphic, TropicalCurve};
use tropmod_core::graphs::{automorphisms, canonical_form, enumerate_stable, MarkedGraph};
use tropmod_core::io;
use tropmod_core::universal::{attach, forget, h_leg, h_value, next_label, section_data};
use tropmod_core::{linalg, Error};

fn generators(rank: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, rank), 1..=rank + 2)
}

fn pointed_cone() -> impl Strategy<Value = Cone> {
    (1usize..=3)
        .prop_flat_map(|r| (Just(r), prop::collection::vec(prop::collection::vec(0i64..=3, r), 1..=r + 2)))
        .prop_filter_map("zero cone", |(r, gens)| Cone::from_generators(r, &gens).ok().filter(|c| c.dim() > 0))
}

fn stable_graph() -> impl Strategy<Value = MarkedGraph> {
    let pool: Vec<MarkedGraph> =
        [(0, 4), (1, 2), (1, 3), (2, 0), (2, 1)].iter().flat_map(|&(g, n)| enumerate_stable(g, n).unwrap()).collect();
    prop::sample::select(pool)
}

fn ray_curve() -> impl Strategy<Value = TropicalCurve> {
    stable_graph().prop_flat_map(|g| {
        let e = g.num_edges();
        prop::collection::vec(1i64..=4, e).prop_map(move |lens| {
            TropicalCurve::new(Cone::ray(), g.clone(), lens.into_iter().map(|l| DualElement::from(vec![l])).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_lie_in_their_cone(gens in (1usize..=3).prop_flat_map(generators)) {
        let rank = gens[0].len();
        let c = Cone::from_generators(rank, &gens);
        prop_assume!(!matches!(c, Err(Error::InvalidCone(_))), "cone contains a line");
        let c = c.unwrap();
        for g in &gens {
            prop_assert!(c.contains(g));
        }
        for r in c.rays() {
            prop_assert_eq!(&linalg::primitive(r), r);
        }
        prop_assert_eq!(Cone::from_generators(rank, c.rays()).unwrap(), c);
    }

    #[test]
    fn faces_are_closed_under_intersection(c in pointed_cone()) {
        let faces = c.face_lattice();
        prop_assert_eq!(faces.last().unwrap().dim(), c.dim());
        for a in &faces {
            for b in &faces {
                let common: Vec<usize> = a.ray_indices.iter().filter(|i| b.ray_indices.contains(i)).copied().collect();
                let meet = c.face_of_rays(&common);
                prop_assert!(faces.iter().any(|f| f.ray_indices == meet.ray_indices));
            }
        }
        if c.is_simplicial() {
            prop_assert_eq!(faces.len(), 1 << c.dim());
        }
    }

    #[test]
    fn fiber_square_commutes(
        s1 in pointed_cone(),
        s2 in pointed_cone(),
        seed in prop::collection::vec(0i64..=2, 12),
    ) {
        let tau = Cone::orthant(2);
        let f = ConeMorphism::new(s1.clone(), tau.clone(), (0..2).map(|i| (0..s1.rank()).map(|j| seed[3 * i + j]).collect()).collect()).unwrap();
        let g = ConeMorphism::new(s2.clone(), tau, (0..2).map(|i| (0..s2.rank()).map(|j| seed[6 + 3 * i + j]).collect()).collect()).unwrap();
        let fp = fiber_product(&f, &g).unwrap();
        prop_assert_eq!(fp.first.then(&f).unwrap().matrix, fp.second.then(&g).unwrap().matrix);
        for r in fp.cone.rays() {
            prop_assert!(s1.contains(&fp.first.apply(r).unwrap()));
            prop_assert!(s2.contains(&fp.second.apply(r).unwrap()));
        }
        // the identity of P factors through itself
        let id = ConeMorphism::identity(&fp.cone);
        let h = fp.factor(&fp.first, &fp.second).unwrap();
        prop_assert_eq!(h.matrix, id.matrix);
    }

    #[test]
    fn canonical_form_ignores_labelling(
        g in stable_graph(),
        vseed in any::<u64>(),
        eseed in any::<u64>(),
    ) {
        let nv = g.num_vertices();
        let ne = g.num_edges();
        let mut vperm: Vec<usize> = (0..nv).collect();
        let mut order: Vec<(usize, bool)> = (0..ne).map(|e| (e, (eseed >> e) & 1 == 1)).collect();
        for i in (1..nv).rev() {
            vperm.swap(i, (vseed as usize >> i) % (i + 1));
        }
        order.rotate_left((eseed as usize) % ne.max(1));
        let (h, m) = g.relabel(&vperm, &order);
        prop_assert!(m.is_isomorphism());
        prop_assert_eq!(canonical_form(&h), canonical_form(&g));
        prop_assert_eq!(automorphisms(&h).len(), automorphisms(&g).len());
    }

    #[test]
    fn contraction_keeps_genus_and_stability(g in stable_graph(), pick in any::<prop::sample::Index>()) {
        prop_assume!(g.num_edges() > 0);
        let e = pick.index(g.num_edges());
        let (small, m) = g.contract(&[e]);
        prop_assert_eq!(small.genus(), g.genus());
        prop_assert!(small.is_stable());
        prop_assert!(m.is_valid());
        prop_assert_eq!(small.num_edges() + 1, g.num_edges());
    }

    #[test]
    fn subsets_of_edges_contract_in_any_order(g in stable_graph(), s in any::<u64>()) {
        let edges: Vec<usize> = (0..g.num_edges()).filter(|e| (s >> e) & 1 == 1).collect();
        let (once, _) = g.contract(&edges);
        let mut step = g.clone();
        for k in (0..edges.len()).rev() {
            step = step.contract(&[edges[k]]).0;
        }
        prop_assert_eq!(canonical_form(&once), canonical_form(&step));
    }

    #[test]
    fn attach_then_forget(c in ray_curve()) {
        let label = next_label(&c.graph);
        for d in section_data(&c, 2).unwrap().data {
            let a = attach(&c, &d).unwrap();
            prop_assert_eq!(h_value(&c, &d), h_leg(&a, label).unwrap());
            prop_assert_eq!(a.genus(), c.genus());
            let f = forget(&a).unwrap();
            prop_assert!(are_isomorphic(&f.curve, &c));
        }
    }

    #[test]
    fn json_round_trips(c in ray_curve()) {
        let text = io::curve_to_json(&c);
        prop_assert_eq!(io::curve_from_json(&text).unwrap(), c.clone());
        let cone = io::cone_to_json(&c.base);
        prop_assert_eq!(io::cone_from_json(&cone).unwrap(), c.base.clone());
    }

    #[test]
    fn faces_of_products_are_products(a in pointed_cone(), b in pointed_cone()) {
        prop_assume!(a.rank() + b.rank() <= 5);
        let p = a.product(&b);
        prop_assert_eq!(p.face_lattice().len(), a.face_lattice().len() * b.face_lattice().len());
        prop_assert_eq!(p.dim(), a.dim() + b.dim());
    }

    #[test]
    fn restriction_to_faces_keeps_genus(lens in prop::collection::vec(1i64..=3, 3)) {
        let g = MarkedGraph::new(vec![0, 0], vec![(0, 1), (0, 1), (0, 1)], vec![]).unwrap();
        let cone = Cone::orthant(3);
        let lengths: Vec<DualElement> = (0..3).map(|i| DualElement::from((0..3).map(|j| if i == j { lens[i] } else { 0 }).collect::<Vec<_>>())).collect();
        let c = TropicalCurve::new(cone.clone(), g, lengths).unwrap();
        for face in cone.face_lattice() {
            let (r, _) = c.restrict(&face).unwrap();
            prop_assert_eq!(r.genus(), 2);
            prop_assert_eq!(r.graph.num_edges(), face.dim());
        }
    }
}
