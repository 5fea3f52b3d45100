use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;

use super::{Arrow, ConeStack, StackObject};
use crate::certificate::Certificate;
use crate::cones::Cone;
use crate::error::{Error, Result};
use crate::graphs::{self, enumerate_maximal, GraphMorphism, MarkedGraph};
use crate::linalg::{self, IMat};

/// A cone-wise map from an object of one complex to an object of another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictMap {
    pub object: usize,
    /// `cone(object).rank x cone(source).rank`.
    pub matrix: IMat,
}

/// A groupoid in cone complexes `R ⇉ U` with unit, inverse and composition,
/// all given object-by-object. Source maps are lattice isomorphisms, so a
/// relation object is identified with its source cone.
#[derive(Clone, Debug)]
pub struct GroupoidPresentation {
    pub atlas: ConeStack,
    pub relations: ConeStack,
    pub source: Vec<StrictMap>,
    pub target: Vec<StrictMap>,
    pub unit: Vec<usize>,
    pub inverse: Vec<usize>,
    /// `(r1, r2) -> r2∘r1` whenever `t(r1) = s(r2)` as atlas objects.
    pub compose: BTreeMap<(usize, usize), usize>,
    /// Pair of atlas blocks each relation object belongs to.
    pub blocks: Vec<(usize, usize)>,
}

type Check = std::result::Result<String, String>;

impl GroupoidPresentation {
    fn source_inverse(&self, r: usize) -> Option<IMat> {
        linalg::unimodular_inverse(&self.source[r].matrix)
    }

    /// `t_r ∘ s_r^{-1}`: the transition map `cone(s(r)) -> cone(t(r))`.
    pub fn transition(&self, r: usize) -> Result<IMat> {
        let inv = self.source_inverse(r).ok_or_else(|| Error::InvalidStack(format!("source of relation {r} is not invertible")))?;
        linalg::mat_mul(&self.target[r].matrix, &inv, self.atlas.cone(self.source[r].object).rank())
    }

    fn check_strict(&self, maps: &[StrictMap], name: &str) -> Check {
        for (r, m) in maps.iter().enumerate() {
            let mor = crate::cones::ConeMorphism {
                source: self.relations.cone(r).clone(),
                target: self.atlas.cone(m.object).clone(),
                matrix: m.matrix.clone(),
            };
            if !mor.is_isomorphism() {
                return Err(format!("{name} of relation {r} is not a cone isomorphism"));
            }
        }
        for (a, ar) in self.relations.arrows().iter().enumerate() {
            let (small, big) = (&maps[ar.src], &maps[ar.dst]);
            let hom = self.atlas.hom(small.object, big.object);
            let Some(&u) = hom.first() else {
                return Err(format!("{name} does not carry relation arrow {a} to an atlas arrow"));
            };
            let k = self.relations.cone(ar.src).rank();
            let left = linalg::mat_mul(&self.atlas.arrows()[u].matrix, &small.matrix, k).map_err(|e| e.to_string())?;
            let right = linalg::mat_mul(&big.matrix, &ar.matrix, k).map_err(|e| e.to_string())?;
            if left != right {
                return Err(format!("{name} square fails at relation arrow {a}"));
            }
        }
        let hit = (0..self.atlas.num_objects()).all(|x| maps.iter().any(|m| m.object == x));
        if !hit {
            return Err(format!("{name} is not surjective on atlas objects"));
        }
        Ok(format!("{} relation objects", maps.len()))
    }

    fn check_units_inverses(&self) -> Check {
        for (x, &e) in self.unit.iter().enumerate() {
            if self.source[e].object != x || self.target[e].object != x {
                return Err(format!("unit of {x} has wrong endpoints"));
            }
            let t = self.transition(e).map_err(|e| e.to_string())?;
            if t != linalg::identity(self.atlas.cone(x).rank()) {
                return Err(format!("unit of {x} acts nontrivially"));
            }
        }
        for r in 0..self.inverse.len() {
            let i = self.inverse[r];
            if self.source[i].object != self.target[r].object || self.target[i].object != self.source[r].object {
                return Err(format!("inverse of {r} has wrong endpoints"));
            }
            let k = self.atlas.cone(self.source[r].object).rank();
            let back = linalg::mat_mul(&self.transition(i).map_err(|e| e.to_string())?, &self.transition(r).map_err(|e| e.to_string())?, k)
                .map_err(|e| e.to_string())?;
            if back != linalg::identity(k) {
                return Err(format!("inverse of {r} does not invert its transition"));
            }
            let s = self.source[r].object;
            if self.compose.get(&(r, i)) != Some(&self.unit[s]) {
                return Err(format!("r∘r^-1 is not a unit at {r}"));
            }
        }
        Ok("units act trivially; inverses invert".into())
    }

    fn check_composition(&self) -> Check {
        let mut pairs = 0;
        for r1 in 0..self.source.len() {
            for r2 in 0..self.source.len() {
                if self.target[r1].object != self.source[r2].object {
                    continue;
                }
                pairs += 1;
                let Some(&m) = self.compose.get(&(r1, r2)) else {
                    return Err(format!("composite of {r1} and {r2} is missing"));
                };
                if self.source[m].object != self.source[r1].object || self.target[m].object != self.target[r2].object {
                    return Err(format!("composite of {r1} and {r2} has wrong endpoints"));
                }
                let k = self.atlas.cone(self.source[r1].object).rank();
                let tr = |r| self.transition(r).map_err(|e| e.to_string());
                if tr(m)? != linalg::mat_mul(&tr(r2)?, &tr(r1)?, k).map_err(|e| e.to_string())? {
                    return Err(format!("transition of {m} is not the composite of {r1}, {r2}"));
                }
                let s = self.source[r1].object;
                let t = self.target[r1].object;
                if self.compose.get(&(self.unit[s], r1)) != Some(&r1) || self.compose.get(&(r1, self.unit[t])) != Some(&r1) {
                    return Err(format!("unit law fails at {r1}"));
                }
                for r3 in (0..self.source.len()).filter(|&r3| self.source[r3].object == self.target[r2].object) {
                    let left = self.compose.get(&(m, r3));
                    let right = self.compose.get(&(r2, r3)).and_then(|&x| self.compose.get(&(r1, x)));
                    if left.is_none() || left != right {
                        return Err(format!("associativity fails at ({r1}, {r2}, {r3})"));
                    }
                }
            }
        }
        Ok(format!("{pairs} composable pairs"))
    }

    /// Machine check of the groupoid axioms and strictness of `s`, `t`.
    pub fn verify(&self) -> Certificate {
        let mut c = Certificate::new("groupoid presentation");
        c.check("atlas is a cone complex", self.atlas.verify_cone_complex().passed(), "");
        c.check("relations form a cone complex", self.relations.verify_cone_complex().passed(), "");
        c.record("source strict and surjective", self.check_strict(&self.source, "source"));
        c.record("target strict and surjective", self.check_strict(&self.target, "target"));
        c.record("units and inverses", self.check_units_inverses());
        c.record("composition", self.check_composition());
        c
    }

    /// The face of relation `r` whose source is atlas object `x`, if any.
    fn face_with_source(&self, r: usize, x: usize) -> Option<usize> {
        self.relations.arrows_into(r).into_iter().map(|a| self.relations.arrows()[a].src).find(|&f| self.source[f].object == x)
    }

    /// The quotient cone stack `[U/R]`. Arrows `a -> b` are pairs `(r, b)` with
    /// `s(r) = a` and `t(r)` a face of `b`.
    pub fn quotient(&self) -> Result<ConeStack> {
        let objects = self.atlas.objects().to_vec();
        let mut arrows = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = Vec::new();
        for r in 0..self.source.len() {
            let (a, t) = (self.source[r].object, self.target[r].object);
            let tr = self.transition(r)?;
            for b in 0..self.atlas.num_objects() {
                let Some(&u) = self.atlas.hom(t, b).first() else { continue };
                let matrix = linalg::mat_mul(&self.atlas.arrows()[u].matrix, &tr, self.atlas.cone(a).rank())?;
                index.insert((r, b), arrows.len());
                pairs.push((r, b));
                arrows.push(Arrow { src: a, dst: b, matrix });
            }
        }
        let identities = (0..objects.len()).map(|x| index[&(self.unit[x], x)]).collect();
        let mut table = Vec::new();
        for (i, &(r1, b)) in pairs.iter().enumerate() {
            for (j, &(r2, c)) in pairs.iter().enumerate() {
                if self.source[r2].object != b {
                    continue;
                }
                let face = self
                    .face_with_source(r2, self.target[r1].object)
                    .ok_or_else(|| Error::InvalidStack(format!("relation {r2} has no face over {}", self.target[r1].object)))?;
                let r = *self
                    .compose
                    .get(&(r1, face))
                    .ok_or_else(|| Error::InvalidStack(format!("composite of {r1} and {face} is missing")))?;
                table.push([i, j, index[&(r, c)]]);
            }
        }
        ConeStack::from_parts(objects, arrows, Some(identities), Some(table))
    }
}

/// A relation object `(i, j, S1, S2, ψ)` with `ψ: G_i/S1 ≅ G_j/S2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub left: usize,
    pub right: usize,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub iso: GraphMorphism,
}

/// The atlas presentation of the moduli stack.
#[derive(Clone, Debug)]
pub struct ModuliPresentation {
    pub presentation: GroupoidPresentation,
    /// Maximal graph classes `G_i` indexing the atlas blocks.
    pub maximal: Vec<MarkedGraph>,
    /// Atlas objects: `(i, T)`, the face of `σ_{G_i}` spanned by edges `T`.
    pub atlas_faces: Vec<(usize, Vec<usize>)>,
    pub relations: Vec<Relation>,
}

fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    (0..n).filter(|e| !s.contains(e)).collect()
}

/// Coordinate inclusion of `R^small` into `R^big` for sorted index sets.
fn inclusion(big: &[usize], small: &[usize]) -> IMat {
    big.iter().map(|b| small.iter().map(|s| i64::from(s == b)).collect()).collect()
}

type RelKey = (usize, usize, Vec<usize>, Vec<usize>, Vec<Option<usize>>, Vec<usize>);

fn rel_key(r: &Relation) -> RelKey {
    (r.left, r.right, r.s1.clone(), r.s2.clone(), r.iso.flag_map.clone(), r.iso.vertex_map.clone())
}

/// `ψ'` on `G_i/S1'` induced from `ψ` on `G_i/S1` by the contractions `c1`, `c2`.
fn induced_iso(c1: &GraphMorphism, psi: &GraphMorphism, c2: &GraphMorphism) -> GraphMorphism {
    let src = c1.target.clone();
    let mut vertex_map = vec![0; src.num_vertices()];
    for (v, &w) in c1.vertex_map.iter().enumerate() {
        vertex_map[w] = c2.vertex_map[psi.vertex_map[v]];
    }
    let mut flag_map = vec![None; src.num_flags()];
    for (f, img) in c1.flag_map.iter().enumerate() {
        if let Some(t) = img {
            flag_map[*t] = psi.flag_map[f].and_then(|x| c2.flag_map[x]);
        }
    }
    GraphMorphism { source: src, target: c2.target.clone(), contracted: Vec::new(), vertex_map, flag_map }
}

/// The groupoid presentation `R ⇉ U` of the moduli stack with atlas the
/// disjoint union of `σ_G` over maximal classes.
pub fn groupoid_presentation(g: u32, n: u32) -> Result<ModuliPresentation> {
    let maximal = enumerate_maximal(g, n)?;
    let mut atlas_faces: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, gi) in maximal.iter().enumerate() {
        let e = gi.num_edges();
        for k in 0..=e {
            for t in (0..e).combinations(k) {
                atlas_faces.push((i, t));
            }
        }
    }
    let atlas_index: HashMap<(usize, Vec<usize>), usize> = atlas_faces.iter().cloned().enumerate().map(|(x, key)| (key, x)).collect();
    let atlas_objects: Vec<StackObject> =
        atlas_faces.iter().map(|(i, t)| StackObject { label: format!("G{i}{t:?}"), cone: Cone::orthant(t.len()) }).collect();
    let mut atlas_arrows = Vec::new();
    for (x, (i, t)) in atlas_faces.iter().enumerate() {
        for (y, (j, t2)) in atlas_faces.iter().enumerate() {
            if i == j && t.iter().all(|e| t2.contains(e)) {
                atlas_arrows.push(Arrow { src: x, dst: y, matrix: inclusion(t2, t) });
            }
        }
    }
    let atlas = ConeStack::from_parts(atlas_objects, atlas_arrows, None, None)?;

    // contracted graphs G_i/S with their contraction witnesses
    let mut contracted: HashMap<(usize, Vec<usize>), (MarkedGraph, GraphMorphism)> = HashMap::new();
    for (i, t) in &atlas_faces {
        let s = complement(maximal[*i].num_edges(), t);
        contracted.insert((*i, s.clone()), maximal[*i].contract(&s));
    }

    let mut relations: Vec<Relation> = Vec::new();
    for i in 0..maximal.len() {
        for j in 0..maximal.len() {
            for (_, t1) in atlas_faces.iter().filter(|f| f.0 == i) {
                for (_, t2) in atlas_faces.iter().filter(|f| f.0 == j && f.1.len() == t1.len()) {
                    let s1 = complement(maximal[i].num_edges(), t1);
                    let s2 = complement(maximal[j].num_edges(), t2);
                    let (h1, _) = &contracted[&(i, s1.clone())];
                    let (h2, _) = &contracted[&(j, s2.clone())];
                    for iso in graphs::isomorphisms(h1, h2) {
                        relations.push(Relation { left: i, right: j, s1: s1.clone(), s2: s2.clone(), iso });
                    }
                }
            }
        }
    }
    let rel_index: HashMap<RelKey, usize> = relations.iter().enumerate().map(|(r, rel)| (rel_key(rel), r)).collect();

    let rel_objects: Vec<StackObject> = relations
        .iter()
        .map(|r| StackObject {
            label: format!("R{}{}{:?}{:?}", r.left, r.right, r.s1, r.s2),
            cone: Cone::orthant(r.iso.source.num_edges()),
        })
        .collect();
    let mut rel_arrows = Vec::new();
    for (r, rel) in relations.iter().enumerate() {
        let (gi, gj) = (&maximal[rel.left], &maximal[rel.right]);
        let t1 = complement(gi.num_edges(), &rel.s1);
        let ne = t1.len();
        for k in 0..=ne {
            for keep in (0..ne).combinations(k) {
                // contract the edges of G_i/S1 outside `keep`
                let x: Vec<usize> = complement(ne, &keep);
                let s1f: Vec<usize> = rel.s1.iter().copied().chain(x.iter().map(|&p| t1[p])).sorted().collect();
                let t2 = complement(gj.num_edges(), &rel.s2);
                let s2f: Vec<usize> =
                    rel.s2.iter().copied().chain(x.iter().map(|&p| t2[rel.iso.edge_image(p).unwrap()])).sorted().collect();
                let c1 = contracted[&(rel.left, rel.s1.clone())].0.contract(&x).1;
                let y: Vec<usize> = x.iter().map(|&p| rel.iso.edge_image(p).unwrap()).sorted().collect();
                let c2 = contracted[&(rel.right, rel.s2.clone())].0.contract(&y).1;
                let face = Relation { left: rel.left, right: rel.right, s1: s1f, s2: s2f, iso: induced_iso(&c1, &rel.iso, &c2) };
                let f = rel_index[&rel_key(&face)];
                let kept: Vec<usize> = keep.iter().map(|&p| t1[p]).collect();
                rel_arrows.push(Arrow { src: f, dst: r, matrix: inclusion(&t1, &kept) });
            }
        }
    }
    let rel_stack = ConeStack::from_parts(rel_objects, rel_arrows, None, None)?;

    let source: Vec<StrictMap> = relations
        .iter()
        .map(|r| {
            let t1 = complement(maximal[r.left].num_edges(), &r.s1);
            StrictMap { object: atlas_index[&(r.left, t1.clone())], matrix: linalg::identity(t1.len()) }
        })
        .collect();
    let target: Vec<StrictMap> = relations
        .iter()
        .map(|r| {
            let t2 = complement(maximal[r.right].num_edges(), &r.s2);
            let k = t2.len();
            let mut m = vec![vec![0; k]; k];
            for e in 0..k {
                m[r.iso.edge_image(e).unwrap()][e] = 1;
            }
            StrictMap { object: atlas_index[&(r.right, t2)], matrix: m }
        })
        .collect();
    let unit: Vec<usize> = atlas_faces
        .iter()
        .map(|(i, t)| {
            let s = complement(maximal[*i].num_edges(), t);
            let h = &contracted[&(*i, s.clone())].0;
            rel_index[&rel_key(&Relation { left: *i, right: *i, s1: s.clone(), s2: s, iso: GraphMorphism::identity(h) })]
        })
        .collect();
    let inverse: Vec<usize> = relations
        .iter()
        .map(|r| {
            let inv = Relation { left: r.right, right: r.left, s1: r.s2.clone(), s2: r.s1.clone(), iso: r.iso.inverse() };
            rel_index[&rel_key(&inv)]
        })
        .collect();
    let mut compose = BTreeMap::new();
    for (a, r1) in relations.iter().enumerate() {
        for (b, r2) in relations.iter().enumerate() {
            if r1.right == r2.left && r1.s2 == r2.s1 {
                let c = Relation { left: r1.left, right: r2.right, s1: r1.s1.clone(), s2: r2.s2.clone(), iso: r1.iso.then(&r2.iso) };
                compose.insert((a, b), rel_index[&rel_key(&c)]);
            }
        }
    }
    let blocks = relations.iter().map(|r| (r.left, r.right)).collect();
    let presentation = GroupoidPresentation { atlas, relations: rel_stack, source, target, unit, inverse, compose, blocks };
    Ok(ModuliPresentation { presentation, maximal, atlas_faces, relations })
}

impl ModuliPresentation {
    /// Relation objects in block `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.relations.len()).filter(|&r| self.presentation.blocks[r] == (i, j)).collect()
    }

    /// The block `R_{G_i,G_j}` as a cone complex on its own.
    pub fn block_complex(&self, i: usize, j: usize) -> Result<ConeStack> {
        let rel = &self.presentation.relations;
        let members = self.block(i, j);
        let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let objects = members.iter().map(|&r| rel.objects()[r].clone()).collect();
        let arrows = rel
            .arrows()
            .iter()
            .filter_map(|a| Some(Arrow { src: *local.get(&a.src)?, dst: *local.get(&a.dst)?, matrix: a.matrix.clone() }))
            .collect();
        ConeStack::from_parts(objects, arrows, None, None)
    }

    /// Relation objects of the block that are maximal, i.e. not proper faces.
    pub fn maximal_cells(&self, i: usize, j: usize) -> Vec<usize> {
        let rel = &self.presentation.relations;
        self.block(i, j).into_iter().filter(|&r| rel.arrows().iter().all(|a| a.src != r || a.dst == r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_one_one_marking() {
        let p = groupoid_presentation(1, 1).unwrap();
        let pres = &p.presentation;
        assert_eq!(p.maximal.len(), 1);
        // U: one ray and its origin
        assert_eq!(pres.atlas.f_vector(), vec![1, 1]);
        // R: two rays sharing the origin
        assert_eq!(pres.relations.f_vector(), vec![1, 2]);
        let cert = pres.verify();
        assert!(cert.passed(), "{cert:?}");
        // the nontrivial ray flips the loop
        let rays: Vec<usize> = (0..p.relations.len()).filter(|&r| pres.relations.cone(r).rank() == 1).collect();
        let flips: Vec<bool> = rays.iter().map(|&r| p.relations[r].iso != GraphMorphism::identity(&p.relations[r].iso.source)).collect();
        assert_eq!(flips.iter().filter(|&&f| f).count(), 1);
    }

    #[test]
    fn genus_one_two_markings() {
        let p = groupoid_presentation(1, 2).unwrap();
        let cert = p.presentation.verify();
        assert!(cert.passed(), "{cert:?}");
        let dims = |i, j| -> Vec<usize> {
            let mut d: Vec<usize> = p.maximal_cells(i, j).iter().map(|&r| p.presentation.relations.cone(r).rank()).collect();
            d.sort();
            d
        };
        let parallel = p.maximal.iter().position(|g| g.edges().iter().all(|&(a, b)| a != b)).unwrap();
        let other = 1 - parallel;
        // contracting one parallel edge yields a loop, whose flip is new
        assert_eq!(dims(parallel, parallel), vec![1, 1, 1, 1, 2, 2]);
        assert_eq!(dims(other, other), vec![2, 2]);
        assert_eq!(dims(parallel, other), vec![1, 1, 1, 1]);
        assert_eq!(dims(other, parallel), vec![1, 1, 1, 1]);
    }

    #[test]
    fn quotient_has_moduli_shape() {
        for (g, n) in [(1, 1), (1, 2)] {
            let p = groupoid_presentation(g, n).unwrap();
            let q = p.presentation.quotient().unwrap();
            let cert = q.verify();
            assert!(cert.passed(), "{cert:?}");
            assert_eq!(q.num_objects(), p.presentation.atlas.num_objects());
            let m = crate::stacks::build_moduli_stack(g, n).unwrap();
            let e = crate::stacks::equivalent(&q, &m.stack, 1_000_000).unwrap().expect("quotient is the moduli stack");
            assert!(e.verify(&q, &m.stack).passed());
        }
    }
}
