//! Finite categories of cones and face morphisms: cone complexes, cone spaces
//! and combinatorial cone stacks, with eager axiom checks.
//!
//! A [`ConeStack`] stores objects with cones, arrows with integer matrices
//! (`dst.rank x src.rank`), one identity per object and an explicit
//! composition table. The table is needed because the functor to cones need
//! not be faithful: the moduli stack has distinct arrows with equal matrices.

mod equivalence;
pub mod examples;
mod fiber;
mod moduli;
mod presentation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::certificate::Certificate;
use crate::cones::{Cone, ConeMorphism, Face};
use crate::error::{Error, Result};
use crate::linalg::{self, IMat};

pub use equivalence::{equivalent, isomorphism, skeleton, Equivalence, Skeleton, StackMorphism};
pub use fiber::{atlas_fiber, curve_pair_fiber, AtlasFiber, PairFiber};
pub use moduli::{build_moduli_stack, ModuliStack};
pub use presentation::{groupoid_presentation, GroupoidPresentation, ModuliPresentation, Relation, StrictMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackObject {
    pub label: String,
    pub cone: Cone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
    pub matrix: IMat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeStack {
    objects: Vec<StackObject>,
    arrows: Vec<Arrow>,
    identities: Vec<usize>,
    /// `(a, b) -> b∘a` for `a: x -> y`, `b: y -> z`.
    compose: BTreeMap<(usize, usize), usize>,
    homs: BTreeMap<(usize, usize), Vec<usize>>,
}

/// Cone complexes use the same representation; the axioms differ.
pub type ConeComplexData = ConeStack;

impl ConeStack {
    /// Assembles a stack. Missing identities are taken to be the first endo-arrow
    /// with identity matrix; a missing composition table is derived from matrices,
    /// which fails if some composite is ambiguous.
    pub fn from_parts(
        objects: Vec<StackObject>,
        arrows: Vec<Arrow>,
        identities: Option<Vec<usize>>,
        compose: Option<Vec<[usize; 3]>>,
    ) -> Result<ConeStack> {
        for (i, a) in arrows.iter().enumerate() {
            if a.src >= objects.len() || a.dst >= objects.len() {
                return Err(Error::InvalidStack(format!("arrow {i} has an endpoint out of range")));
            }
            let (r, c) = (objects[a.dst].cone.rank(), objects[a.src].cone.rank());
            if a.matrix.len() != r || a.matrix.iter().any(|row| row.len() != c) {
                return Err(Error::InvalidStack(format!("arrow {i} has a {}-row matrix, expected {r}x{c}", a.matrix.len())));
            }
        }
        let mut homs: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, a) in arrows.iter().enumerate() {
            homs.entry((a.src, a.dst)).or_default().push(i);
        }
        let identities = match identities {
            Some(ids) => {
                if ids.len() != objects.len()
                    || ids.iter().enumerate().any(|(x, &a)| a >= arrows.len() || arrows[a].src != x || arrows[a].dst != x)
                {
                    return Err(Error::InvalidStack("identity list does not match the objects".into()));
                }
                ids
            }
            None => (0..objects.len())
                .map(|x| {
                    let id = linalg::identity(objects[x].cone.rank());
                    homs.get(&(x, x))
                        .and_then(|h| h.iter().copied().find(|&a| arrows[a].matrix == id))
                        .ok_or_else(|| Error::InvalidStack(format!("object {x} has no identity arrow")))
                })
                .collect::<Result<_>>()?,
        };
        let mut table = BTreeMap::new();
        match compose {
            Some(triples) => {
                for [a, b, c] in triples {
                    if a >= arrows.len() || b >= arrows.len() || c >= arrows.len() {
                        return Err(Error::InvalidStack("composition entry out of range".into()));
                    }
                    if arrows[a].dst != arrows[b].src || arrows[c].src != arrows[a].src || arrows[c].dst != arrows[b].dst {
                        return Err(Error::InvalidStack(format!("composition entry ({a}, {b}) -> {c} has wrong endpoints")));
                    }
                    if table.insert((a, b), c).is_some() {
                        return Err(Error::InvalidStack(format!("composition ({a}, {b}) listed twice")));
                    }
                }
            }
            None => {
                for (a, x) in arrows.iter().enumerate() {
                    for b in homs.range((x.dst, 0)..(x.dst + 1, 0)).flat_map(|(_, v)| v.iter().copied()) {
                        let y = &arrows[b];
                        let m = linalg::mat_mul(&y.matrix, &x.matrix, objects[x.src].cone.rank())?;
                        let cands: Vec<usize> = homs
                            .get(&(x.src, y.dst))
                            .map(|h| h.iter().copied().filter(|&c| arrows[c].matrix == m).collect())
                            .unwrap_or_default();
                        match cands.len() {
                            0 => {}
                            1 => {
                                table.insert((a, b), cands[0]);
                            }
                            _ => {
                                return Err(Error::InvalidStack(format!(
                                    "composite of arrows {a} and {b} is ambiguous; supply a composition table"
                                )))
                            }
                        }
                    }
                }
            }
        }
        Ok(ConeStack { objects, arrows, identities, compose: table, homs })
    }

    pub fn objects(&self) -> &[StackObject] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn cone(&self, x: usize) -> &Cone {
        &self.objects[x].cone
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    /// `b∘a`, if recorded.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.compose.get(&(a, b)).copied()
    }

    /// The composition table as sorted `[a, b, b∘a]` triples.
    pub fn composition_table(&self) -> Vec<[usize; 3]> {
        self.compose.iter().map(|(&(a, b), &c)| [a, b, c]).collect()
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        self.homs.get(&(x, y)).map_or(&[], |v| v.as_slice())
    }

    /// Arrows with target `y`.
    pub fn arrows_into(&self, y: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&a| self.arrows[a].dst == y).collect()
    }

    pub fn morphism(&self, a: usize) -> ConeMorphism {
        let ar = &self.arrows[a];
        ConeMorphism { source: self.cone(ar.src).clone(), target: self.cone(ar.dst).clone(), matrix: ar.matrix.clone() }
    }

    /// Ray indices (in the target cone) of the image face of each arrow.
    fn image_rays(&self) -> Vec<Option<Vec<usize>>> {
        (0..self.arrows.len()).map(|a| self.morphism(a).image_face().ok().map(|f| f.ray_indices)).collect()
    }

    /// Endo-arrows of `x`; all of them are automorphisms in a stack.
    pub fn automorphisms(&self, x: usize) -> &[usize] {
        self.hom(x, x)
    }

    /// Number of objects by cone dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let top = self.objects.iter().map(|o| o.cone.rank()).max().unwrap_or(0);
        let mut f = vec![0; top + 1];
        for o in &self.objects {
            f[o.cone.rank()] += 1;
        }
        f
    }

    fn check_identities(&self) -> std::result::Result<String, String> {
        for (x, &id) in self.identities.iter().enumerate() {
            if self.arrows[id].matrix != linalg::identity(self.cone(x).rank()) {
                return Err(format!("identity of object {x} has a non-identity matrix"));
            }
        }
        for (a, ar) in self.arrows.iter().enumerate() {
            if self.compose(self.identities[ar.src], a) != Some(a) || self.compose(a, self.identities[ar.dst]) != Some(a) {
                return Err(format!("identity law fails at arrow {a}"));
            }
        }
        Ok(format!("{} identities", self.identities.len()))
    }

    fn check_composition(&self) -> std::result::Result<String, String> {
        let mut pairs = 0;
        for (a, x) in self.arrows.iter().enumerate() {
            for b in (0..self.arrows.len()).filter(|&b| self.arrows[b].src == x.dst) {
                pairs += 1;
                let Some(c) = self.compose(a, b) else {
                    return Err(format!("composite of arrows {a} and {b} is undefined"));
                };
                let m = linalg::mat_mul(&self.arrows[b].matrix, &x.matrix, self.cone(x.src).rank()).map_err(|e| e.to_string())?;
                if self.arrows[c].matrix != m {
                    return Err(format!("matrix of {c} is not the product for ({a}, {b})"));
                }
            }
        }
        Ok(format!("{pairs} composable pairs"))
    }

    fn check_associativity(&self) -> std::result::Result<String, String> {
        for (&(a, b), &ab) in &self.compose {
            for c in (0..self.arrows.len()).filter(|&c| self.arrows[c].src == self.arrows[b].dst) {
                let left = self.compose(ab, c);
                let right = self.compose(b, c).and_then(|bc| self.compose(a, bc));
                if left.is_none() || left != right {
                    return Err(format!("associativity fails for ({a}, {b}, {c})"));
                }
            }
        }
        Ok("all composable triples".into())
    }

    fn check_face_morphisms(&self) -> std::result::Result<String, String> {
        match (0..self.arrows.len()).find(|&a| !self.morphism(a).is_face_morphism()) {
            Some(a) => Err(format!("arrow {a} is not a face morphism")),
            None => Ok(format!("{} arrows", self.arrows.len())),
        }
    }

    fn check_faces_lift(&self, images: &[Option<Vec<usize>>]) -> std::result::Result<String, String> {
        for x in 0..self.objects.len() {
            for face in self.cone(x).face_lattice() {
                let lifted = (0..self.arrows.len()).any(|a| self.arrows[a].dst == x && images[a].as_ref() == Some(&face.ray_indices));
                if !lifted {
                    return Err(format!("face {:?} of object {x} has no arrow onto it", face.ray_indices));
                }
            }
        }
        Ok("every face is an image".into())
    }

    fn check_unique_fillers(&self, images: &[Option<Vec<usize>>]) -> std::result::Result<String, String> {
        let mut count = 0;
        for x in 0..self.objects.len() {
            let into = self.arrows_into(x);
            for &u in &into {
                for &v in &into {
                    let (Some(iu), Some(iv)) = (&images[u], &images[v]) else {
                        return Err("an arrow has no image face".into());
                    };
                    if !iu.iter().all(|r| iv.contains(r)) {
                        continue;
                    }
                    count += 1;
                    let fillers =
                        self.hom(self.arrows[u].src, self.arrows[v].src).iter().filter(|&&w| self.compose(w, v) == Some(u)).count();
                    if fillers != 1 {
                        return Err(format!("{fillers} fillers for u = {u} through v = {v}"));
                    }
                }
            }
        }
        Ok(format!("{count} factorization problems"))
    }

    /// Checks that the data is a category fibered in groupoids over cones with
    /// face morphisms.
    pub fn verify(&self) -> Certificate {
        let mut c = Certificate::new("cone stack");
        c.record("identities", self.check_identities());
        c.record("composition", self.check_composition());
        c.record("associativity", self.check_associativity());
        c.record("face morphisms", self.check_face_morphisms());
        let images = self.image_rays();
        c.record("faces lift", self.check_faces_lift(&images));
        c.record("unique fillers", self.check_unique_fillers(&images));
        c
    }

    /// The three cone complex axioms, plus closure under composition.
    pub fn verify_cone_complex(&self) -> Certificate {
        let mut c = Certificate::new("cone complex");
        let ident = self.check_identities().and_then(|d| self.check_composition().map(|e| format!("{d}; {e}")));
        c.record("(i) identities", ident);
        let images = self.image_rays();
        let mut axiom2 = Ok("each face is the image of one arrow".to_string());
        'outer: for x in 0..self.objects.len() {
            if let Some(a) = self.arrows_into(x).into_iter().find(|&a| !self.morphism(a).is_face_morphism()) {
                axiom2 = Err(format!("arrow {a} is not a face morphism"));
                break;
            }
            for face in self.cone(x).face_lattice() {
                let hits: Vec<usize> = self.arrows_into(x).into_iter().filter(|&a| images[a].as_ref() == Some(&face.ray_indices)).collect();
                if hits.len() != 1 {
                    axiom2 = Err(format!("face {:?} of object {x} is the image of arrows {hits:?}", face.ray_indices));
                    break 'outer;
                }
            }
        }
        c.record("(ii) faces are images of exactly one arrow", axiom2);
        let crowded = self.homs.iter().find(|(_, v)| v.len() > 1);
        c.record(
            "(iii) at most one arrow per pair",
            match crowded {
                Some(((x, y), v)) => Err(format!("objects {x} -> {y} have arrows {v:?}")),
                None => Ok("all hom-sets have at most one element".into()),
            },
        );
        c
    }

    /// True iff the stack has no nontrivial automorphisms.
    pub fn is_cone_space(&self) -> Result<bool> {
        let cert = self.verify();
        if !cert.passed() {
            let names: Vec<String> = cert.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            return Err(Error::InvalidStack(names.join("; ")));
        }
        Ok((0..self.objects.len()).all(|x| self.hom(x, x).len() == 1))
    }

    /// Factors `f: ω -> cone(obj)` through the object over the smallest face
    /// containing its image: returns that object, the arrow into `obj`, and the
    /// factored morphism, whose image meets the interior.
    pub fn initial_strict_factorization(&self, obj: usize, f: &ConeMorphism) -> Result<(usize, usize, ConeMorphism)> {
        if &f.target != self.cone(obj) {
            return Err(Error::InvalidMorphism("morphism does not land in the object's cone".into()));
        }
        let face = f.image_face()?;
        let images = self.image_rays();
        let a = self
            .arrows_into(obj)
            .into_iter()
            .find(|&a| images[a].as_ref() == Some(&face.ray_indices))
            .ok_or_else(|| Error::InvalidStack("the image face has no lift".into()))?;
        let ar = &self.arrows[a];
        let m = linalg::solve_mat(&ar.matrix, self.cone(ar.src).rank(), &f.matrix, f.source.rank())
            .ok_or_else(|| Error::InvalidMorphism("morphism does not factor through the face".into()))?;
        let g = ConeMorphism::new(f.source.clone(), self.cone(ar.src).clone(), m)?;
        Ok((ar.src, a, g))
    }

    /// The face of `cone(obj)` hit by arrow `a`.
    pub fn image_face(&self, a: usize) -> Result<Face> {
        self.morphism(a).image_face()
    }

    /// Graphviz rendering: nodes labelled by object label and cone dimension.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{name}\" {{");
        for (i, o) in self.objects.iter().enumerate() {
            let _ = writeln!(s, "  o{i} [label=\"{} (dim {})\"];", o.label, o.cone.rank());
        }
        let ids: BTreeSet<usize> = self.identities.iter().copied().collect();
        for (i, a) in self.arrows.iter().enumerate() {
            if !ids.contains(&i) {
                let _ = writeln!(s, "  o{} -> o{} [label=\"a{i}\"];", a.src, a.dst);
            }
        }
        s.push_str("}\n");
        s
    }
}

/// The face complex of a single cone: one object per face, one inclusion per
/// containment.
pub fn face_complex(cone: &Cone) -> ConeStack {
    let faces = cone.face_lattice();
    let objects = faces.iter().map(|f| StackObject { label: format!("{:?}", f.ray_indices), cone: f.as_cone.clone() }).collect();
    let mut arrows = Vec::new();
    for (i, small) in faces.iter().enumerate() {
        for (j, big) in faces.iter().enumerate() {
            if let Some(m) = big.subface_matrix(small) {
                arrows.push(Arrow { src: i, dst: j, matrix: m });
            }
        }
    }
    ConeStack::from_parts(objects, arrows, None, None).expect("face complexes are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_face_complex_is_a_complex() {
        let c = face_complex(&Cone::orthant(3));
        assert_eq!(c.num_objects(), 8);
        assert_eq!(c.f_vector(), vec![1, 3, 3, 1]);
        assert!(c.verify_cone_complex().passed());
        assert!(c.verify().passed());
        assert_eq!(c.is_cone_space(), Ok(true));
    }

    #[test]
    fn single_cone_with_identity() {
        let s = ConeStack::from_parts(
            vec![StackObject { label: "pt".into(), cone: Cone::zero() }],
            vec![Arrow { src: 0, dst: 0, matrix: vec![] }],
            None,
            None,
        )
        .unwrap();
        assert_eq!(s.is_cone_space(), Ok(true));
        assert!(s.verify_cone_complex().passed());
    }

    #[test]
    fn missing_lift_is_reported() {
        // a ray with no object for its origin
        let s = ConeStack::from_parts(
            vec![StackObject { label: "ray".into(), cone: Cone::ray() }],
            vec![Arrow { src: 0, dst: 0, matrix: vec![vec![1]] }],
            None,
            None,
        )
        .unwrap();
        let cert = s.verify();
        assert!(!cert.get("faces lift").unwrap().passed);
        assert!(s.is_cone_space().is_err());
    }

    #[test]
    fn factorization_examples() {
        let c = face_complex(&Cone::orthant(2));
        let top = c.num_objects() - 1;
        let interior = ConeMorphism::new(Cone::ray(), Cone::orthant(2), vec![vec![1], vec![1]]).unwrap();
        let (obj, a, g) = c.initial_strict_factorization(top, &interior).unwrap();
        assert_eq!((obj, a), (top, c.identity(top)));
        assert_eq!(g.matrix, interior.matrix);

        let axis = ConeMorphism::new(Cone::ray(), Cone::orthant(2), vec![vec![2], vec![0]]).unwrap();
        let (obj, _, g) = c.initial_strict_factorization(top, &axis).unwrap();
        assert_eq!(c.cone(obj).rank(), 1);
        assert_eq!(g.matrix, vec![vec![2]]);

        let zero = ConeMorphism::new(Cone::ray(), Cone::orthant(2), vec![vec![0], vec![0]]).unwrap();
        let (obj, _, _) = c.initial_strict_factorization(top, &zero).unwrap();
        assert_eq!(c.cone(obj).rank(), 0);
    }

    #[test]
    fn ambiguous_composition_needs_a_table() {
        // two distinct automorphisms of a ray with the same matrix
        let objects = vec![StackObject { label: "r".into(), cone: Cone::ray() }];
        let arrows = vec![Arrow { src: 0, dst: 0, matrix: vec![vec![1]] }; 2];
        assert!(ConeStack::from_parts(objects.clone(), arrows.clone(), None, None).is_err());
        let s = ConeStack::from_parts(objects, arrows, Some(vec![0]), Some(vec![[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]])).unwrap();
        assert!(!s.verify().get("faces lift").unwrap().passed);
        assert_eq!(s.automorphisms(0).len(), 2);
    }
}
