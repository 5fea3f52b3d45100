use super::*;
use crate::curves::are_isomorphic;
use crate::universal::ForgetCase;

fn dual(v: &[i64]) -> DualElement {
    DualElement::from(v.to_vec())
}

fn comp(id: &str, genus: u32) -> Component {
    Component { id: id.into(), genus }
}

fn node(a: &str, b: &str, d: &[i64]) -> Node {
    Node { a: a.into(), b: b.into(), delta: dual(d) }
}

fn marks(m: &[(u32, &str)]) -> BTreeMap<u32, String> {
    m.iter().map(|&(l, c)| (l, c.to_string())).collect()
}

fn smooth(cone: Cone, genus: u32, n: u32) -> NodalDegeneration {
    NodalDegeneration { cone, components: vec![comp("X", genus)], nodes: vec![], markings: (1..=n).map(|l| (l, "X".into())).collect() }
}

#[test]
fn square_degeneration_is_a_marked_square() {
    let x = square_degeneration();
    let c = tropicalize(&x).unwrap();
    // a 4-cycle v0..v3 with leg i at v_{i-1}; edge i has length e_i
    let g = MarkedGraph::new(vec![0; 4], vec![(0, 3), (0, 1), (1, 2), (2, 3)], (1..=4).map(|l| (l, l as usize - 1)).collect()).unwrap();
    let expected = TropicalCurve::new(
        Cone::orthant(4),
        g,
        (0..4).map(|i| DualElement::from((0..4).map(|j| i64::from(i == j)).collect::<Vec<_>>())).collect(),
    )
    .unwrap();
    assert!(are_isomorphic(&c, &expected));
    assert_eq!((c.genus(), c.graph.num_legs()), (1, 4));
}

#[test]
fn smooth_and_self_nodal() {
    let c = tropicalize(&smooth(Cone::ray(), 2, 3)).unwrap();
    assert_eq!(c.graph, MarkedGraph::new(vec![2], vec![], vec![(1, 0), (2, 0), (3, 0)]).unwrap());

    let x = NodalDegeneration {
        cone: Cone::ray(),
        components: vec![comp("E", 1)],
        nodes: vec![node("E", "E", &[3])],
        markings: BTreeMap::new(),
    };
    let c = tropicalize(&x).unwrap();
    assert_eq!(c.graph, MarkedGraph::new(vec![1], vec![(0, 0)], vec![]).unwrap());
    assert_eq!(c.lengths, vec![dual(&[3])]);
}

#[test]
fn instability_is_reported() {
    let x = NodalDegeneration {
        cone: Cone::ray(),
        components: vec![comp("A", 1), comp("B", 0)],
        nodes: vec![node("A", "B", &[1])],
        markings: marks(&[(1, "B")]),
    };
    assert_eq!(tropicalize(&x), Err(Error::Unstable { component: 1 }));
    let zero = NodalDegeneration { nodes: vec![node("A", "B", &[0])], ..x.clone() };
    assert!(matches!(tropicalize(&zero), Err(Error::InvalidDegeneration(_))));
    let unknown = NodalDegeneration { nodes: vec![node("A", "Z", &[1])], ..x };
    assert!(matches!(tropicalize(&unknown), Err(Error::InvalidDegeneration(_))));
    assert!(matches!(tropicalize(&smooth(Cone::ray(), 1, 0)), Err(Error::UnstablePair { .. })));
}

#[test]
fn genus_counts_cycles() {
    for x in random_corpus(7, 30) {
        let c = tropicalize(&x).unwrap();
        let sum: u32 = x.components.iter().map(|c| c.genus).sum();
        let b1 = x.nodes.len() as u32 + 1 - x.components.len() as u32;
        assert_eq!(c.genus(), sum + b1);
    }
}

#[test]
fn faces_of_the_square() {
    let x = square_degeneration();
    let cert = check_all_faces(&x).unwrap();
    assert!(cert.passed(), "{:?}", cert.failures());
    assert_eq!(cert.checks.len(), 16);

    // keep only the rays dual to δ2 and δ4: δ1 and δ3 vanish
    let rays: Vec<usize> = [1, 3].iter().map(|&i| x.cone.rays().iter().position(|r| r[i] == 1).unwrap()).collect();
    let face = x.cone.face_of_rays(&rays);
    let y = x.specialize_to_face(&face).unwrap();
    let c = tropicalize(&y).unwrap();
    assert_eq!(c.graph.num_vertices(), 2);
    assert_eq!(c.graph.num_edges(), 2);
    assert!((0..2).all(|e| !c.graph.is_loop(e)));
    assert!(check_specialization_square(&x, &face).unwrap().passed());
}

#[test]
fn identity_face() {
    let x = square_degeneration();
    let whole = x.cone.whole_face();
    let y = x.specialize_to_face(&whole).unwrap();
    assert_eq!(y.nodes.len(), 4);
    assert!(are_isomorphic(&tropicalize(&y).unwrap(), &tropicalize(&x).unwrap()));
}

#[test]
fn clutching_two_smooth_curves() {
    let left = smooth(Cone::ray(), 1, 1);
    let right = NodalDegeneration { markings: marks(&[(2, "X")]), ..smooth(Cone::ray(), 1, 0) };
    let cert = check_clutch_square(&left, 1, &right, 2, &dual(&[4])).unwrap();
    assert!(cert.passed(), "{:?}", cert.failures());
    let c = tropicalize(&glue_at_node(&left, 1, &right, 2, &dual(&[4])).unwrap()).unwrap();
    assert_eq!(c.graph.num_edges(), 1);
    assert_eq!(c.lengths, vec![dual(&[4])]);
    assert_eq!(glue_at_node(&left, 1, &right, 2, &dual(&[0])), Err(Error::ZeroLength));
}

#[test]
fn clutching_the_square_to_an_elliptic_curve() {
    let x = square_degeneration();
    let e = NodalDegeneration { markings: marks(&[(9, "X")]), ..smooth(Cone::orthant(4), 1, 0) };
    let cert = check_clutch_square(&x, 4, &e, 9, &dual(&[1, 1, 0, 0])).unwrap();
    assert!(cert.passed(), "{:?}", cert.failures());
    assert_eq!(glue_at_node(&x, 4, &x, 1, &dual(&[1, 0, 0, 0])), Err(Error::LabelClash(2)));
}

#[test]
fn self_gluing() {
    let x = smooth(Cone::ray(), 0, 3);
    let cert = check_self_clutch_square(&x, 2, 3, &dual(&[1])).unwrap();
    assert!(cert.passed(), "{:?}", cert.failures());
    let c = tropicalize(&self_glue(&x, 2, 3, &dual(&[1])).unwrap()).unwrap();
    assert_eq!(c.graph, MarkedGraph::new(vec![0], vec![(0, 0)], vec![(1, 0)]).unwrap());
}

#[test]
fn forget_cases() {
    // stable component
    let x = smooth(Cone::ray(), 1, 2);
    assert!(check_forget_square(&x).unwrap().passed());

    // rational bridge: the two nodes merge
    let bridge = NodalDegeneration {
        cone: Cone::orthant(2),
        components: vec![comp("A", 1), comp("P", 0), comp("B", 1)],
        nodes: vec![node("A", "P", &[1, 0]), node("P", "B", &[0, 2])],
        markings: marks(&[(1, "A"), (2, "P")]),
    };
    let cert = check_forget_square(&bridge).unwrap();
    assert!(cert.passed(), "{:?}", cert.failures());
    let y = bridge.forget_marking(2).unwrap();
    assert_eq!(y.nodes, vec![node("A", "B", &[1, 2])]);
    let f = crate::universal::forget(&tropicalize(&bridge).unwrap()).unwrap();
    assert_eq!(f.case, ForgetCase::Merged);

    // rational tail with one other marking
    let tail = NodalDegeneration {
        cone: Cone::ray(),
        components: vec![comp("A", 1), comp("T", 0)],
        nodes: vec![node("A", "T", &[5])],
        markings: marks(&[(1, "T"), (2, "T")]),
    };
    assert!(check_forget_square(&tail).unwrap().passed());
    assert_eq!(tail.forget_marking(2).unwrap(), smooth(Cone::ray(), 1, 1).clone_with_ids("A"));
}

impl NodalDegeneration {
    fn clone_with_ids(mut self, id: &str) -> Self {
        for c in &mut self.components {
            c.id = id.into();
        }
        for v in self.markings.values_mut() {
            *v = id.into();
        }
        self
    }
}

#[test]
fn random_squares() {
    let corpus = random_corpus(2024, 50);
    let mut forgotten = 0;
    for x in &corpus {
        let cert = check_all_faces(x).unwrap();
        assert!(cert.passed(), "{x:?}: {:?}", cert.failures());
        match check_forget_square(x) {
            Ok(cert) => {
                assert!(cert.passed(), "{x:?}: {:?}", cert.failures());
                forgotten += 1;
            }
            Err(Error::UnstablePair { .. }) => {}
            Err(e) => panic!("{x:?}: {e}"),
        }
    }
    assert!(forgotten > 25);
    // every ordered pair over a common base
    let mut clutched = 0;
    for x in &corpus {
        for y in corpus.iter().filter(|y| y.cone == x.cone) {
            let star = *x.markings.keys().next_back().unwrap();
            let y = NodalDegeneration { markings: y.markings.iter().map(|(&l, c)| (l + star, c.clone())).collect(), ..y.clone() };
            let bullet = *y.markings.keys().next().unwrap();
            let d = x.nodes.first().map_or_else(|| dual(&vec![1; x.cone.rank()]), |n| n.delta.clone());
            let cert = check_clutch_square(x, star, &y, bullet, &d).unwrap();
            assert!(cert.passed(), "{:?}", cert.failures());
            clutched += 1;
        }
    }
    assert!(clutched >= 50 * 50 / 4, "{clutched}");
}

#[test]
fn json_round_trip() {
    let x = square_degeneration();
    let text = degeneration_to_json(&x);
    assert!(text.contains("\"schema\": \"tropmod/1\""));
    assert_eq!(degeneration_from_json(&text).unwrap(), x);
    let raw = r#"{"cone": {"lattice_rank": 1, "rays": [[1]]},
        "components": [{"id": "E", "genus": 1}],
        "nodes": [{"a": "E", "b": "E", "delta": [2]}],
        "markings": {"1": "E"}}"#;
    let y = degeneration_from_json(raw).unwrap();
    assert_eq!(tropicalize(&y).unwrap().graph.genus(), 2);
}
