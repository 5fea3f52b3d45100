use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Component, NodalDegeneration, Node};
use crate::cones::{Cone, DualElement};

/// Four rational components in a cycle, one marking each; the nodes carry the
/// four coordinate parameters of `N^4`.
pub fn square_degeneration() -> NodalDegeneration {
    let comp = |id: &str| Component { id: id.into(), genus: 0 };
    let unit = |i: usize| DualElement::from((0..4).map(|j| i64::from(i == j)).collect::<Vec<_>>());
    let node = |a: &str, b: &str, i: usize| Node { a: a.into(), b: b.into(), delta: unit(i) };
    NodalDegeneration {
        cone: Cone::orthant(4),
        components: vec![comp("C1"), comp("C2"), comp("C3"), comp("C4")],
        nodes: vec![node("C1", "C4", 0), node("C1", "C2", 1), node("C2", "C3", 2), node("C3", "C4", 3)],
        markings: (1..=4).map(|l| (l, format!("C{l}"))).collect(),
    }
}

fn random_base(rng: &mut ChaCha8Rng) -> Cone {
    match rng.gen_range(0..4) {
        0 => Cone::ray(),
        1 => Cone::orthant(2),
        2 => Cone::orthant(3),
        _ => Cone::from_generators(2, &[vec![1, 0], vec![1, 2]]).expect("cone"),
    }
}

fn random_parameter(rng: &mut ChaCha8Rng, base: &Cone) -> DualElement {
    loop {
        let c: Vec<i64> = (0..base.rank()).map(|_| rng.gen_range(-1..=3)).collect();
        if base.dual_contains(&c) && c.iter().any(|&x| x != 0) {
            return DualElement::from(c);
        }
    }
}

/// A connected degeneration with at most four components, padded with
/// markings until every component is stable.
pub fn random_degeneration(rng: &mut ChaCha8Rng) -> NodalDegeneration {
    let cone = random_base(rng);
    let k = rng.gen_range(1..=4);
    let components: Vec<Component> = (0..k).map(|i| Component { id: format!("C{i}"), genus: u32::from(rng.gen_bool(0.3)) }).collect();
    let mut ends: Vec<(usize, usize)> = (1..k).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..rng.gen_range(0..=2) {
        ends.push((rng.gen_range(0..k), rng.gen_range(0..k)));
    }
    let nodes = ends
        .iter()
        .map(|&(a, b)| Node { a: components[a].id.clone(), b: components[b].id.clone(), delta: random_parameter(rng, &cone) })
        .collect();
    let mut markings: BTreeMap<u32, String> = BTreeMap::new();
    for l in 1..=rng.gen_range(1..=3) {
        markings.insert(l, components[rng.gen_range(0..k)].id.clone());
    }
    let mut x = NodalDegeneration { cone, components, nodes, markings };
    loop {
        let g = x.dual_graph().expect("connected by construction");
        let Some(v) = (0..g.num_vertices()).find(|&v| !g.is_stable_at(v)) else { break };
        let next = x.markings.keys().next_back().map_or(1, |l| l + 1);
        x.markings.insert(next, x.components[v].id.clone());
    }
    x
}

pub fn random_corpus(seed: u64, count: usize) -> Vec<NodalDegeneration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_degeneration(&mut rng)).collect()
}
