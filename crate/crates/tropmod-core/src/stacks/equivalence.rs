//! Brute-force equivalence of finite cone stacks: reduce both sides to
//! skeleta, search for an isomorphism of skeleta, then extend it along chosen
//! isomorphisms to representatives.

use std::collections::BTreeMap;

use super::ConeStack;
use crate::certificate::Certificate;
use crate::cones::{self, ConeMorphism};
use crate::error::{Error, Result};
use crate::linalg::{self, IMat};

/// A functor between cone stacks together with cone maps `φ_x: cone(x) -> cone(Φx)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackMorphism {
    pub object_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
    pub cone_maps: Vec<IMat>,
}

impl StackMorphism {
    pub fn identity(s: &ConeStack) -> StackMorphism {
        StackMorphism {
            object_map: (0..s.num_objects()).collect(),
            arrow_map: (0..s.num_arrows()).collect(),
            cone_maps: (0..s.num_objects()).map(|x| linalg::identity(s.cone(x).rank())).collect(),
        }
    }

    /// Functoriality, commuting squares, and that no `φ_x` lands in a proper face.
    pub fn verify(&self, a: &ConeStack, b: &ConeStack) -> Certificate {
        let mut c = Certificate::new("stack morphism");
        let mut functor = Ok("functor laws hold".to_string());
        for (i, ar) in a.arrows().iter().enumerate() {
            let img = &b.arrows()[self.arrow_map[i]];
            if img.src != self.object_map[ar.src] || img.dst != self.object_map[ar.dst] {
                functor = Err(format!("arrow {i} is sent to an arrow with wrong endpoints"));
                break;
            }
        }
        if functor.is_ok() {
            if let Some(x) = (0..a.num_objects()).find(|&x| self.arrow_map[a.identity(x)] != b.identity(self.object_map[x])) {
                functor = Err(format!("identity of {x} is not preserved"));
            }
        }
        if functor.is_ok() {
            for [p, q, r] in a.composition_table() {
                if b.compose(self.arrow_map[p], self.arrow_map[q]) != Some(self.arrow_map[r]) {
                    functor = Err(format!("composition ({p}, {q}) is not preserved"));
                    break;
                }
            }
        }
        c.record("functor", functor);
        let mut squares = Ok("all squares commute".to_string());
        for (i, ar) in a.arrows().iter().enumerate() {
            let k = a.cone(ar.src).rank();
            let left = linalg::mat_mul(&b.arrows()[self.arrow_map[i]].matrix, &self.cone_maps[ar.src], k);
            let right = linalg::mat_mul(&self.cone_maps[ar.dst], &ar.matrix, k);
            if left.is_err() || left != right {
                squares = Err(format!("square fails at arrow {i}"));
                break;
            }
        }
        c.record("squares", squares);
        let mut onto = Ok("every cone map meets the interior".to_string());
        for x in 0..a.num_objects() {
            let m =
                ConeMorphism { source: a.cone(x).clone(), target: b.cone(self.object_map[x]).clone(), matrix: self.cone_maps[x].clone() };
            let whole = m.image_face().map(|f| f.dim() == m.target.rank()).unwrap_or(false);
            if ConeMorphism::new(m.source.clone(), m.target.clone(), m.matrix.clone()).is_err() || !whole {
                onto = Err(format!("cone map of object {x} lands in a proper face"));
                break;
            }
        }
        c.record("not in a proper face", onto);
        c
    }
}

/// A pair of stack morphisms exhibiting an equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub forward: StackMorphism,
    pub backward: StackMorphism,
}

impl Equivalence {
    /// Both morphisms are valid, fully faithful, essentially surjective, with
    /// isomorphisms as cone maps.
    pub fn verify(&self, a: &ConeStack, b: &ConeStack) -> Certificate {
        let mut c = Certificate::new("equivalence");
        for (name, m, s, t) in [("forward", &self.forward, a, b), ("backward", &self.backward, b, a)] {
            let mut cert = m.verify(s, t);
            cert.name = name.into();
            c.absorb(cert);
            c.record(format!("{name} fully faithful"), fully_faithful(m, s, t));
            c.record(format!("{name} essentially surjective"), essentially_surjective(m, t));
            let isos = (0..s.num_objects()).all(|x| {
                ConeMorphism { source: s.cone(x).clone(), target: t.cone(m.object_map[x]).clone(), matrix: m.cone_maps[x].clone() }
                    .is_isomorphism()
            });
            c.check(format!("{name} cone maps are isomorphisms"), isos, "");
        }
        c
    }
}

fn fully_faithful(m: &StackMorphism, s: &ConeStack, t: &ConeStack) -> std::result::Result<String, String> {
    for x in 0..s.num_objects() {
        for y in 0..s.num_objects() {
            let mut imgs: Vec<usize> = s.hom(x, y).iter().map(|&a| m.arrow_map[a]).collect();
            imgs.sort();
            imgs.dedup();
            if imgs.len() != s.hom(x, y).len() || imgs.len() != t.hom(m.object_map[x], m.object_map[y]).len() {
                return Err(format!("Hom({x}, {y}) is not mapped bijectively"));
            }
        }
    }
    Ok("all hom-sets map bijectively".into())
}

fn essentially_surjective(m: &StackMorphism, t: &ConeStack) -> std::result::Result<String, String> {
    for y in 0..t.num_objects() {
        let hit = m.object_map.iter().any(|&x| x == y || (t.cone(x).rank() == t.cone(y).rank() && !t.hom(x, y).is_empty()));
        if !hit {
            return Err(format!("object {y} is not isomorphic to an image"));
        }
    }
    Ok("every object is isomorphic to an image".into())
}

/// The full subcategory on one representative per isomorphism class.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub stack: ConeStack,
    /// Original index of each skeleton object.
    pub objects: Vec<usize>,
    /// Original index of each skeleton arrow.
    pub arrows: Vec<usize>,
    /// Skeleton object of each original object.
    pub class_of: Vec<usize>,
}

pub fn skeleton(s: &ConeStack) -> Result<Skeleton> {
    let n = s.num_objects();
    let mut rep: Vec<usize> = (0..n).collect();
    fn find(rep: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while rep[r] != r {
            r = rep[r];
        }
        rep[x] = r;
        r
    }
    for a in s.arrows() {
        if s.cone(a.src).rank() == s.cone(a.dst).rank() {
            let (p, q) = (find(&mut rep, a.src), find(&mut rep, a.dst));
            if p != q {
                rep[p.max(q)] = p.min(q);
            }
        }
    }
    let reps: Vec<usize> = (0..n).filter(|&x| find(&mut rep, x) == x).collect();
    let class_of: Vec<usize> = (0..n).map(|x| reps.binary_search(&find(&mut rep, x)).unwrap()).collect();
    let arrows: Vec<usize> = (0..s.num_arrows())
        .filter(|&a| reps.binary_search(&s.arrows()[a].src).is_ok() && reps.binary_search(&s.arrows()[a].dst).is_ok())
        .collect();
    let new_index: BTreeMap<usize, usize> = arrows.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let objects = reps.iter().map(|&x| s.objects()[x].clone()).collect();
    let sk_arrows = arrows
        .iter()
        .map(|&a| {
            let ar = &s.arrows()[a];
            super::Arrow { src: class_of[ar.src], dst: class_of[ar.dst], matrix: ar.matrix.clone() }
        })
        .collect();
    let identities = reps.iter().map(|&x| new_index[&s.identity(x)]).collect();
    let table = s
        .composition_table()
        .into_iter()
        .filter_map(|[p, q, r]| Some([*new_index.get(&p)?, *new_index.get(&q)?, *new_index.get(&r)?]))
        .collect();
    let stack = ConeStack::from_parts(objects, sk_arrows, Some(identities), Some(table))?;
    Ok(Skeleton { stack, objects: reps, arrows, class_of })
}

type Signature = (usize, usize, Vec<(usize, usize)>, Vec<(usize, usize)>);

fn signatures(s: &ConeStack) -> Vec<Signature> {
    (0..s.num_objects())
        .map(|x| {
            let mut out: Vec<(usize, usize)> =
                (0..s.num_objects()).filter(|&y| y != x).map(|y| (s.cone(y).rank(), s.hom(x, y).len())).filter(|p| p.1 > 0).collect();
            let mut inc: Vec<(usize, usize)> =
                (0..s.num_objects()).filter(|&y| y != x).map(|y| (s.cone(y).rank(), s.hom(y, x).len())).filter(|p| p.1 > 0).collect();
            out.sort();
            inc.sort();
            (s.cone(x).rank(), s.hom(x, x).len(), out, inc)
        })
        .collect()
}

struct Search<'a> {
    a: &'a ConeStack,
    b: &'a ConeStack,
    sig_a: Vec<Signature>,
    sig_b: Vec<Signature>,
    order: Vec<usize>,
    budget: u64,
    steps: u64,
    /// composition triples each arrow takes part in
    triples: Vec<Vec<[usize; 3]>>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    fn objects(&mut self, depth: usize, phi: &mut Vec<usize>, used: &mut Vec<bool>, maps: &mut Vec<IMat>) -> Result<Option<StackMorphism>> {
        self.tick()?;
        if depth == self.order.len() {
            return self.arrows(phi, maps);
        }
        let x = self.order[depth];
        for y in 0..self.b.num_objects() {
            if used[y] || self.sig_a[x] != self.sig_b[y] {
                continue;
            }
            for iso in cones::isomorphisms(self.a.cone(x), self.b.cone(y)) {
                phi[x] = y;
                maps[x] = iso;
                if !self.arrows_have_candidates(x, phi, maps, &self.order[..=depth]) {
                    continue;
                }
                used[y] = true;
                let found = self.objects(depth + 1, phi, used, maps)?;
                used[y] = false;
                if found.is_some() {
                    return Ok(found);
                }
            }
        }
        phi[x] = usize::MAX;
        Ok(None)
    }

    fn candidates(&self, i: usize, phi: &[usize], maps: &[IMat]) -> Vec<usize> {
        let ar = &self.a.arrows()[i];
        let k = self.a.cone(ar.src).rank();
        let Ok(right) = linalg::mat_mul(&maps[ar.dst], &ar.matrix, k) else { return Vec::new() };
        self.b
            .hom(phi[ar.src], phi[ar.dst])
            .iter()
            .copied()
            .filter(|&j| linalg::mat_mul(&self.b.arrows()[j].matrix, &maps[ar.src], k).is_ok_and(|l| l == right))
            .collect()
    }

    fn arrows_have_candidates(&self, x: usize, phi: &[usize], maps: &[IMat], assigned: &[usize]) -> bool {
        self.a.arrows().iter().enumerate().all(|(i, ar)| {
            let touches = ar.src == x || ar.dst == x;
            let ready = assigned.contains(&ar.src) && assigned.contains(&ar.dst);
            !touches || !ready || self.candidates(i, phi, maps).len() >= 1
        })
    }

    fn arrows(&mut self, phi: &[usize], maps: &[IMat]) -> Result<Option<StackMorphism>> {
        let cands: Vec<Vec<usize>> = (0..self.a.num_arrows()).map(|i| self.candidates(i, phi, maps)).collect();
        let mut map = vec![usize::MAX; self.a.num_arrows()];
        let mut used = vec![false; self.b.num_arrows()];
        for x in 0..self.a.num_objects() {
            let (i, j) = (self.a.identity(x), self.b.identity(phi[x]));
            if !cands[i].contains(&j) {
                return Ok(None);
            }
            map[i] = j;
            used[j] = true;
        }
        let mut order: Vec<usize> = (0..self.a.num_arrows()).filter(|&i| map[i] == usize::MAX).collect();
        order.sort_by_key(|&i| cands[i].len());
        if self.assign(&order, 0, &cands, &mut map, &mut used)? {
            return Ok(Some(StackMorphism { object_map: phi.to_vec(), arrow_map: map, cone_maps: maps.to_vec() }));
        }
        Ok(None)
    }

    fn consistent(&self, i: usize, map: &[usize]) -> bool {
        self.triples[i].iter().all(|&[p, q, r]| {
            if map[p] == usize::MAX || map[q] == usize::MAX || map[r] == usize::MAX {
                return true;
            }
            self.b.compose(map[p], map[q]) == Some(map[r])
        })
    }

    fn assign(&mut self, order: &[usize], depth: usize, cands: &[Vec<usize>], map: &mut Vec<usize>, used: &mut Vec<bool>) -> Result<bool> {
        self.tick()?;
        if depth == order.len() {
            return Ok(true);
        }
        let i = order[depth];
        for &j in &cands[i] {
            if used[j] {
                continue;
            }
            map[i] = j;
            if self.consistent(i, map) {
                used[j] = true;
                if self.assign(order, depth + 1, cands, map, used)? {
                    return Ok(true);
                }
                used[j] = false;
            }
            map[i] = usize::MAX;
        }
        Ok(false)
    }
}

/// An isomorphism of finite cone stacks, if one exists within the budget.
pub fn isomorphism(a: &ConeStack, b: &ConeStack, budget: u64) -> Result<Option<StackMorphism>> {
    if a.num_objects() != b.num_objects() || a.num_arrows() != b.num_arrows() || a.f_vector() != b.f_vector() {
        return Ok(None);
    }
    let (sig_a, sig_b) = (signatures(a), signatures(b));
    let mut sa = sig_a.clone();
    let mut sb = sig_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Ok(None);
    }
    let mut order: Vec<usize> = (0..a.num_objects()).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(a.cone(x).rank()));
    let mut triples = vec![Vec::new(); a.num_arrows()];
    for t in a.composition_table() {
        for &i in &t {
            if !triples[i].contains(&t) {
                triples[i].push(t);
            }
        }
    }
    let mut s = Search { a, b, sig_a, sig_b, order, budget, steps: 0, triples };
    let n = a.num_objects();
    s.objects(0, &mut vec![usize::MAX; n], &mut vec![false; n], &mut vec![Vec::new(); n])
}

/// Inverse arrow of an isomorphism `a`.
fn inverse_arrow(s: &ConeStack, a: usize) -> usize {
    let ar = &s.arrows()[a];
    *s.hom(ar.dst, ar.src)
        .iter()
        .find(|&&b| s.compose(a, b) == Some(s.identity(ar.src)))
        .expect("arrows between equal-dimensional cones are invertible")
}

/// Extends a skeleton isomorphism `f: skel(a) -> skel(b)` to a morphism `a -> b`.
fn extend(a: &ConeStack, ska: &Skeleton, skb: &Skeleton, f: &StackMorphism) -> Result<StackMorphism> {
    let n = a.num_objects();
    // i_x: x -> rep(x)
    let to_rep: Vec<usize> = (0..n)
        .map(|x| {
            let r = ska.objects[ska.class_of[x]];
            if r == x {
                a.identity(x)
            } else {
                a.hom(x, r)[0]
            }
        })
        .collect();
    let from_rep: Vec<usize> = to_rep.iter().map(|&i| inverse_arrow(a, i)).collect();
    let sk_arrow: BTreeMap<usize, usize> = ska.arrows.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let object_map: Vec<usize> = (0..n).map(|x| skb.objects[f.object_map[ska.class_of[x]]]).collect();
    let cone_maps: Vec<IMat> = (0..n)
        .map(|x| {
            let s = ska.class_of[x];
            linalg::mat_mul(&f.cone_maps[s], &a.arrows()[to_rep[x]].matrix, a.cone(x).rank())
        })
        .collect::<Result<_>>()?;
    let arrow_map: Vec<usize> = a
        .arrows()
        .iter()
        .enumerate()
        .map(|(i, ar)| {
            let c1 = a.compose(from_rep[ar.src], i).expect("composable");
            let c2 = a.compose(c1, to_rep[ar.dst]).expect("composable");
            skb.arrows[f.arrow_map[sk_arrow[&c2]]]
        })
        .collect();
    Ok(StackMorphism { object_map, arrow_map, cone_maps })
}

fn invert(f: &StackMorphism, b: &ConeStack) -> Result<StackMorphism> {
    let mut object_map = vec![0; f.object_map.len()];
    for (x, &y) in f.object_map.iter().enumerate() {
        object_map[y] = x;
    }
    let mut arrow_map = vec![0; f.arrow_map.len()];
    for (i, &j) in f.arrow_map.iter().enumerate() {
        arrow_map[j] = i;
    }
    let cone_maps = (0..b.num_objects())
        .map(|y| linalg::unimodular_inverse(&f.cone_maps[object_map[y]]).ok_or(Error::InvalidMorphism("cone map is not invertible".into())))
        .collect::<Result<_>>()?;
    Ok(StackMorphism { object_map, arrow_map, cone_maps })
}

/// An equivalence `a ≃ b` found by exhaustive search, `None` if there is none.
pub fn equivalent(a: &ConeStack, b: &ConeStack, budget: u64) -> Result<Option<Equivalence>> {
    let (ska, skb) = (skeleton(a)?, skeleton(b)?);
    let Some(f) = isomorphism(&ska.stack, &skb.stack, budget)? else { return Ok(None) };
    let g = invert(&f, &skb.stack)?;
    let forward = extend(a, &ska, &skb, &f)?;
    let backward = extend(b, &skb, &ska, &g)?;
    Ok(Some(Equivalence { forward, backward }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::Cone;
    use crate::stacks::{build_moduli_stack, face_complex};

    #[test]
    fn stack_is_equivalent_to_itself() {
        for s in [face_complex(&Cone::orthant(2)), build_moduli_stack(1, 2).unwrap().stack] {
            let e = equivalent(&s, &s, 1_000_000).unwrap().unwrap();
            let cert = e.verify(&s, &s);
            assert!(cert.passed(), "{cert:?}");
            assert!(StackMorphism::identity(&s).verify(&s, &s).passed());
        }
    }

    #[test]
    fn different_stacks_are_not_equivalent() {
        let a = face_complex(&Cone::orthant(2));
        let b = face_complex(&Cone::orthant(3));
        assert_eq!(equivalent(&a, &b, 1_000_000), Ok(None));
    }

    #[test]
    fn budget_is_reported() {
        let s = build_moduli_stack(1, 2).unwrap().stack;
        assert_eq!(equivalent(&s, &s, 1), Err(Error::BudgetExceeded(1)));
    }
}
