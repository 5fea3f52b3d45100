//! Small hand-built stacks: the waffle cone in its two descriptions, and
//! simple cone complexes.

use std::collections::BTreeMap;

use super::{face_complex, Arrow, ConeStack, GroupoidPresentation, StackObject, StrictMap};
use crate::cones::Cone;
use crate::linalg;

fn obj(label: &str, cone: Cone) -> StackObject {
    StackObject { label: label.into(), cone }
}

fn zero_map(rows: usize) -> Vec<Vec<i64>> {
    vec![Vec::new(); rows]
}

fn arrows_from_zero(targets: &[(usize, usize)]) -> Vec<Arrow> {
    targets.iter().map(|&(dst, rank)| Arrow { src: 0, dst, matrix: zero_map(rank) }).collect()
}

fn identities(objects: &[StackObject]) -> Vec<Arrow> {
    (0..objects.len()).map(|x| Arrow { src: x, dst: x, matrix: linalg::identity(objects[x].cone.rank()) }).collect()
}

/// The waffle as a combinatorial cone space: a quadrant `σ`, a ray `τ`, and
/// both boundary inclusions `τ -> σ`.
pub fn combinatorial_waffle() -> ConeStack {
    let objects = vec![obj("0", Cone::zero()), obj("tau", Cone::ray()), obj("sigma", Cone::orthant(2))];
    let mut arrows = identities(&objects);
    arrows.extend(arrows_from_zero(&[(1, 1), (2, 2)]));
    arrows.push(Arrow { src: 1, dst: 2, matrix: vec![vec![1], vec![0]] });
    arrows.push(Arrow { src: 1, dst: 2, matrix: vec![vec![0], vec![1]] });
    ConeStack::from_parts(objects, arrows, None, None).expect("waffle data is well formed")
}

/// The quadrant with its faces, the honest cone complex with one arrow per face.
pub fn quadrant() -> ConeStack {
    face_complex(&Cone::orthant(2))
}

/// Two quadrants sharing one ray.
pub fn glued_quadrants() -> ConeStack {
    let objects = vec![
        obj("0", Cone::zero()),
        obj("shared", Cone::ray()),
        obj("ra", Cone::ray()),
        obj("rb", Cone::ray()),
        obj("A", Cone::orthant(2)),
        obj("B", Cone::orthant(2)),
    ];
    let mut arrows = identities(&objects);
    arrows.extend(arrows_from_zero(&[(1, 1), (2, 1), (3, 1), (4, 2), (5, 2)]));
    let e1 = vec![vec![1], vec![0]];
    let e2 = vec![vec![0], vec![1]];
    arrows.push(Arrow { src: 1, dst: 4, matrix: e1.clone() });
    arrows.push(Arrow { src: 2, dst: 4, matrix: e2.clone() });
    arrows.push(Arrow { src: 1, dst: 5, matrix: e1 });
    arrows.push(Arrow { src: 3, dst: 5, matrix: e2 });
    ConeStack::from_parts(objects, arrows, None, None).expect("glued quadrants are well formed")
}

/// The waffle as a quotient: two quadrants glued along both boundary rays,
/// modulo the involution exchanging them.
pub fn waffle_groupoid() -> GroupoidPresentation {
    // atlas: 0, X, Y, σ1 = (X, Y), σ2 = (Y, X)
    let u_objects = vec![
        obj("0", Cone::zero()),
        obj("X", Cone::ray()),
        obj("Y", Cone::ray()),
        obj("sigma1", Cone::orthant(2)),
        obj("sigma2", Cone::orthant(2)),
    ];
    let e1 = vec![vec![1], vec![0]];
    let e2 = vec![vec![0], vec![1]];
    let mut u_arrows = identities(&u_objects);
    u_arrows.extend(arrows_from_zero(&[(1, 1), (2, 1), (3, 2), (4, 2)]));
    u_arrows.push(Arrow { src: 1, dst: 3, matrix: e1.clone() });
    u_arrows.push(Arrow { src: 2, dst: 3, matrix: e2.clone() });
    u_arrows.push(Arrow { src: 2, dst: 4, matrix: e1.clone() });
    u_arrows.push(Arrow { src: 1, dst: 4, matrix: e2.clone() });
    let atlas = ConeStack::from_parts(u_objects, u_arrows, None, None).expect("atlas");

    // relations: units e0, eX, eY, eσ1, eσ2, then the swap wX, wY, wσ1, wσ2
    let src = [0, 1, 2, 3, 4, 1, 2, 3, 4];
    let tgt = [0, 1, 2, 3, 4, 2, 1, 4, 3];
    let r_objects: Vec<StackObject> =
        ["e0", "eX", "eY", "es1", "es2", "wX", "wY", "ws1", "ws2"].iter().zip(src).map(|(l, s)| obj(l, atlas.cone(s).clone())).collect();
    let mut r_arrows = identities(&r_objects);
    r_arrows.extend(arrows_from_zero(&[(1, 1), (2, 1), (3, 2), (4, 2), (5, 1), (6, 1), (7, 2), (8, 2)]));
    for (s, d, m) in [(1, 3, &e1), (2, 3, &e2), (2, 4, &e1), (1, 4, &e2), (5, 7, &e1), (6, 7, &e2), (6, 8, &e1), (5, 8, &e2)] {
        r_arrows.push(Arrow { src: s, dst: d, matrix: m.clone() });
    }
    let relations = ConeStack::from_parts(r_objects, r_arrows, None, None).expect("relations");

    let strict = |objs: &[usize; 9]| -> Vec<StrictMap> {
        objs.iter().map(|&o| StrictMap { object: o, matrix: linalg::identity(atlas.cone(o).rank()) }).collect()
    };
    let source = strict(&src);
    let target = strict(&tgt);
    let unit = vec![0, 1, 2, 3, 4];
    let inverse = vec![0, 1, 2, 3, 4, 6, 5, 8, 7];
    let mut compose = BTreeMap::new();
    for r1 in 0..9 {
        for r2 in 0..9 {
            if tgt[r1] != src[r2] {
                continue;
            }
            let r = if r1 < 5 {
                r2
            } else if r2 < 5 {
                r1
            } else {
                unit[src[r1]]
            };
            compose.insert((r1, r2), r);
        }
    }
    let blocks = vec![(0, 0); 9];
    GroupoidPresentation { atlas, relations, source, target, unit, inverse, compose, blocks }
}
