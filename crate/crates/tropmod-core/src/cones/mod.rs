//! Rational polyhedral cones with exact arithmetic.
//!
//! Every [`Cone`] is strictly convex and full-dimensional in its own lattice
//! `Z^n`. Constructions that would leave a lower-dimensional cone (faces,
//! fiber products, intersections with subspaces) re-embed it into its span
//! lattice and hand back the inclusion.

pub mod dd;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IMat};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<i64>>,
    facets: Vec<Vec<i64>>,
}

impl Cone {
    /// Builds the cone generated by `gens` in `Z^rank`. Generators may be
    /// redundant or non-primitive; the result carries the canonical extreme rays.
    pub fn from_generators(rank: usize, gens: &[Vec<i64>]) -> Result<Cone> {
        dd::check_rank(rank)?;
        if gens.iter().any(|g| g.len() != rank) {
            return Err(Error::InvalidCone("generator length differs from lattice rank".into()));
        }
        let gens: Vec<Vec<BigInt>> = gens.iter().filter(|g| !linalg::is_zero(g)).map(|g| linalg::to_big(g)).collect();
        if linalg::rank_big(&gens, rank) != rank {
            return Err(Error::InvalidCone("rays do not span the lattice".into()));
        }
        let dual = dd::extreme_rays(&gens, rank)?;
        debug_assert!(dual.lineality.is_empty());
        if linalg::rank_big(&dual.rays, rank) != rank {
            return Err(Error::InvalidCone("cone contains a line".into()));
        }
        let primal = dd::extreme_rays(&dual.rays, rank)?;
        debug_assert!(primal.lineality.is_empty());
        let rays = primal.rays.iter().map(|r| linalg::from_big(r)).collect::<Result<Vec<_>>>()?;
        let facets = dual.rays.iter().map(|r| linalg::from_big(r)).collect::<Result<Vec<_>>>()?;
        Ok(Cone { rank, rays, facets })
    }

    /// Strict constructor: `rays` must already be the primitive extreme rays.
    /// Order is irrelevant; the stored list is sorted.
    pub fn new(rank: usize, rays: &[Vec<i64>]) -> Result<Cone> {
        let c = Cone::from_generators(rank, rays)?;
        let given: BTreeSet<&Vec<i64>> = rays.iter().collect();
        let canon: BTreeSet<&Vec<i64>> = c.rays.iter().collect();
        if given != canon || given.len() != rays.len() {
            return Err(Error::InvalidCone("rays are not the primitive extreme rays".into()));
        }
        Ok(c)
    }

    /// `R^n_{>=0}` with the standard basis as rays.
    pub fn orthant(n: usize) -> Cone {
        let rays: Vec<Vec<i64>> = (0..n).rev().map(|i| unit(n, i)).collect();
        Cone { rank: n, facets: rays.clone(), rays }
    }

    pub fn zero() -> Cone {
        Cone::orthant(0)
    }

    pub fn ray() -> Cone {
        Cone::orthant(1)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension; equal to the lattice rank since cones are full-dimensional.
    pub fn dim(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn facets(&self) -> &[Vec<i64>] {
        &self.facets
    }

    pub fn is_simplicial(&self) -> bool {
        self.rays.len() == self.rank
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.facets.iter().all(|f| linalg::dot(f, v) >= 0)
    }

    pub fn contains_rational(&self, p: &[BigRational]) -> bool {
        self.facets.iter().all(|f| !linalg::dot_rat_int(f, p).is_negative())
    }

    /// Membership of a covector in `S_σ`.
    pub fn dual_contains(&self, m: &[i64]) -> bool {
        m.len() == self.rank && self.rays.iter().all(|r| linalg::dot(m, r) >= 0)
    }

    pub fn is_interior(&self, p: &[BigRational]) -> bool {
        self.facets.iter().all(|f| linalg::dot_rat_int(f, p).is_positive())
    }

    /// `self × other` in `Z^(n1+n2)`.
    pub fn product(&self, other: &Cone) -> Cone {
        let (n1, n2) = (self.rank, other.rank);
        let pad = |v: &Vec<i64>, left: bool| -> Vec<i64> {
            let mut out = vec![0; n1 + n2];
            if left {
                out[..n1].copy_from_slice(v);
            } else {
                out[n1..].copy_from_slice(v);
            }
            out
        };
        let mut rays: Vec<Vec<i64>> = self.rays.iter().map(|r| pad(r, true)).collect();
        rays.extend(other.rays.iter().map(|r| pad(r, false)));
        rays.sort();
        let mut facets: Vec<Vec<i64>> = self.facets.iter().map(|f| pad(f, true)).collect();
        facets.extend(other.facets.iter().map(|f| pad(f, false)));
        facets.sort();
        Cone { rank: n1 + n2, rays, facets }
    }

    /// The face lattice, one entry per face, sorted by dimension and then by ray set.
    pub fn face_lattice(&self) -> Vec<Face> {
        let all: BTreeSet<usize> = (0..self.rays.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut stack = vec![all.into_iter().collect::<Vec<_>>()];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.clone()) {
                continue;
            }
            for facet in &self.facets {
                let sub: Vec<usize> = f.iter().copied().filter(|&i| linalg::dot(facet, &self.rays[i]) == 0).collect();
                if sub.len() < f.len() && !seen.contains(&sub) {
                    stack.push(self.close(&sub));
                }
            }
        }
        let mut faces: Vec<Face> = seen.into_iter().map(|s| self.face_from_closed(s)).collect();
        faces.sort_by(|a, b| (a.dim(), &a.ray_indices).cmp(&(b.dim(), &b.ray_indices)));
        faces
    }

    /// Facets vanishing on all the given rays.
    fn selector_of(&self, ray_idx: &[usize]) -> Vec<usize> {
        (0..self.facets.len()).filter(|&j| ray_idx.iter().all(|&i| linalg::dot(&self.facets[j], &self.rays[i]) == 0)).collect()
    }

    fn rays_of_selector(&self, sel: &[usize]) -> Vec<usize> {
        (0..self.rays.len()).filter(|&i| sel.iter().all(|&j| linalg::dot(&self.facets[j], &self.rays[i]) == 0)).collect()
    }

    fn close(&self, ray_idx: &[usize]) -> Vec<usize> {
        self.rays_of_selector(&self.selector_of(ray_idx))
    }

    fn face_from_closed(&self, ray_idx: Vec<usize>) -> Face {
        let selector = self.selector_of(&ray_idx);
        let gens: Vec<Vec<i64>> = ray_idx.iter().map(|&i| self.rays[i].clone()).collect();
        let (as_cone, inclusion) = embed_in_span(self.rank, &gens).expect("faces of valid cones embed");
        Face { parent: self.clone(), ray_indices: ray_idx, selector, as_cone, inclusion }
    }

    /// The face spanned by the given rays' closure.
    pub fn face_of_rays(&self, ray_idx: &[usize]) -> Face {
        self.face_from_closed(self.close(ray_idx))
    }

    /// The unique face whose relative interior meets all the given points.
    pub fn smallest_face_containing(&self, points: &[Vec<BigRational>]) -> Result<Face> {
        if points.iter().any(|p| p.len() != self.rank || !self.contains_rational(p)) {
            return Err(Error::OutsideCone);
        }
        let sel: Vec<usize> =
            (0..self.facets.len()).filter(|&j| points.iter().all(|p| linalg::dot_rat_int(&self.facets[j], p).is_zero())).collect();
        Ok(self.face_from_closed(self.rays_of_selector(&sel)))
    }

    pub fn smallest_face_containing_int(&self, points: &[Vec<i64>]) -> Result<Face> {
        let pts: Vec<Vec<BigRational>> = points.iter().map(|p| linalg::to_rat(p)).collect();
        self.smallest_face_containing(&pts)
    }

    pub fn whole_face(&self) -> Face {
        self.face_from_closed((0..self.rays.len()).collect())
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Re-embeds the cone generated by `gens` (a pointed cone in `Z^n`) into its
/// span lattice. Returns the full-dimensional cone and the `n x k` inclusion.
pub fn embed_in_span(n: usize, gens: &[Vec<i64>]) -> Result<(Cone, IMat)> {
    let big: Vec<Vec<BigInt>> = gens.iter().map(|g| linalg::to_big(g)).collect();
    let basis = linalg::saturated_span(&big, n);
    let k = basis.len();
    let basis: Vec<Vec<i64>> = basis.iter().map(|b| linalg::from_big(b)).collect::<Result<_>>()?;
    let coords: Vec<Vec<i64>> = gens.iter().map(|g| linalg::solve_int(&basis, g).ok_or(Error::Overflow)).collect::<Result<_>>()?;
    let cone = Cone::from_generators(k, &coords)?;
    Ok((cone, linalg::from_columns(&basis, n)))
}

/// A face of a parent cone with its own span-lattice model.
#[derive(Clone, Debug)]
pub struct Face {
    pub parent: Cone,
    /// Indices into `parent.rays()` of the rays lying on the face.
    pub ray_indices: Vec<usize>,
    /// Indices of all parent facets vanishing on the face (the maximal selector).
    pub selector: Vec<usize>,
    pub as_cone: Cone,
    /// `parent.rank() x as_cone.rank()` inclusion matrix.
    pub inclusion: IMat,
}

impl PartialEq for Face {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.ray_indices == other.ray_indices
    }
}

impl Eq for Face {}

impl Face {
    pub fn dim(&self) -> usize {
        self.as_cone.rank()
    }

    pub fn contains_face(&self, other: &Face) -> bool {
        other.ray_indices.iter().all(|i| self.ray_indices.contains(i))
    }

    pub fn inclusion_morphism(&self) -> ConeMorphism {
        ConeMorphism { source: self.as_cone.clone(), target: self.parent.clone(), matrix: self.inclusion.clone() }
    }

    /// Matrix of the inclusion `other.as_cone -> self.as_cone` for a subface `other`.
    pub fn subface_matrix(&self, other: &Face) -> Option<IMat> {
        if !self.contains_face(other) {
            return None;
        }
        linalg::solve_mat(&self.inclusion, self.dim(), &other.inclusion, other.dim())
    }
}

/// An integral linear map carrying the source cone into the target cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeMorphism {
    pub source: Cone,
    pub target: Cone,
    /// `target.rank() x source.rank()`.
    pub matrix: IMat,
}

impl ConeMorphism {
    pub fn new(source: Cone, target: Cone, matrix: IMat) -> Result<ConeMorphism> {
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::InvalidMorphism("matrix shape does not match the cones".into()));
        }
        for r in source.rays() {
            let img = linalg::mat_vec(&matrix, r)?;
            if !target.contains(&img) {
                return Err(Error::InvalidMorphism("a ray leaves the target cone".into()));
            }
        }
        Ok(ConeMorphism { source, target, matrix })
    }

    pub fn identity(c: &Cone) -> ConeMorphism {
        ConeMorphism { source: c.clone(), target: c.clone(), matrix: linalg::identity(c.rank()) }
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        linalg::mat_vec(&self.matrix, v)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ConeMorphism) -> Result<ConeMorphism> {
        if next.source != self.target {
            return Err(Error::InvalidMorphism("composition of non-composable morphisms".into()));
        }
        let matrix = linalg::mat_mul(&next.matrix, &self.matrix, self.source.rank())?;
        Ok(ConeMorphism { source: self.source.clone(), target: next.target.clone(), matrix })
    }

    /// Smallest face of the target containing the image.
    pub fn image_face(&self) -> Result<Face> {
        let imgs: Vec<Vec<i64>> = self.source.rays().iter().map(|r| self.apply(r)).collect::<Result<_>>()?;
        self.target.smallest_face_containing_int(&imgs)
    }

    /// True iff the map is a lattice isomorphism onto a face of the target.
    pub fn is_face_morphism(&self) -> bool {
        let k = self.source.rank();
        if linalg::rank_int(&self.matrix, k) != k {
            return false;
        }
        let Ok(face) = self.image_face() else { return false };
        if face.dim() != k {
            return false;
        }
        let Ok(imgs) = self.source.rays().iter().map(|r| self.apply(r).map(|v| linalg::primitive(&v))).collect::<Result<BTreeSet<_>>>()
        else {
            return false;
        };
        let face_rays: BTreeSet<Vec<i64>> = face.ray_indices.iter().map(|&i| self.target.rays()[i].clone()).collect();
        if imgs != face_rays {
            return false;
        }
        linalg::maximal_minor_gcd(&self.matrix, k) == BigInt::from(1)
    }

    /// Lattice isomorphism of cones (a face morphism onto the whole target).
    pub fn is_isomorphism(&self) -> bool {
        self.source.rank() == self.target.rank() && self.is_face_morphism()
    }
}

/// An element of the dual monoid `S_σ`, stored as a covector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DualElement {
    pub covector: Vec<i64>,
}

impl DualElement {
    pub fn new(cone: &Cone, covector: Vec<i64>) -> Result<DualElement> {
        if !cone.dual_contains(&covector) {
            return Err(Error::InvalidCurve(format!("{covector:?} is not in the dual monoid")));
        }
        Ok(DualElement { covector })
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero(&self.covector)
    }

    pub fn pair(&self, v: &[i64]) -> i128 {
        linalg::dot(&self.covector, v)
    }

    pub fn add(&self, other: &DualElement) -> Result<DualElement> {
        let covector =
            self.covector.iter().zip(&other.covector).map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow)).collect::<Result<_>>()?;
        Ok(DualElement { covector })
    }

    pub fn sub(&self, other: &DualElement) -> Result<DualElement> {
        let covector =
            self.covector.iter().zip(&other.covector).map(|(a, b)| a.checked_sub(*b).ok_or(Error::Overflow)).collect::<Result<_>>()?;
        Ok(DualElement { covector })
    }
}

impl From<Vec<i64>> for DualElement {
    fn from(covector: Vec<i64>) -> Self {
        DualElement { covector }
    }
}

/// `m ∘ f`, a dual element on the source of `f`.
pub fn pullback_element(f: &ConeMorphism, m: &DualElement) -> Result<DualElement> {
    Ok(DualElement { covector: linalg::vec_mat(&m.covector, &f.matrix, f.source.rank())? })
}

pub fn is_zero_on_face(m: &DualElement, face: &Face) -> bool {
    face.ray_indices.iter().all(|&i| m.pair(&face.parent.rays()[i]) == 0)
}

/// The cone `{x in c : eqs * x = 0}` re-embedded in its span lattice, with
/// the `c.rank() x k` inclusion.
pub fn intersect_with_kernel(c: &Cone, eqs: &[Vec<i64>]) -> Result<(Cone, IMat)> {
    let n = c.rank();
    let big: Vec<Vec<BigInt>> = eqs.iter().map(|e| linalg::to_big(e)).collect();
    let kernel = linalg::integer_kernel(&big, n);
    let k = kernel.len();
    let kernel: Vec<Vec<i64>> = kernel.iter().map(|v| linalg::from_big(v)).collect::<Result<_>>()?;
    let kmat = linalg::from_columns(&kernel, n);
    // facets of c pulled back to kernel coordinates
    let ineqs: Vec<Vec<BigInt>> =
        c.facets().iter().map(|f| linalg::vec_mat(f, &kmat, k).map(|v| linalg::to_big(&v))).collect::<Result<_>>()?;
    let gens = dd::extreme_rays(&ineqs, k)?;
    if !gens.lineality.is_empty() {
        return Err(Error::InvalidCone("intersection contains a line".into()));
    }
    let rays: Vec<Vec<i64>> = gens.rays.iter().map(|r| linalg::from_big(r)).collect::<Result<_>>()?;
    let (cone, sub) = embed_in_span(k, &rays)?;
    let incl = linalg::mat_mul(&kmat, &sub, cone.rank())?;
    Ok((cone, incl))
}

/// Fiber product of two morphisms into a common cone.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub cone: Cone,
    pub first: ConeMorphism,
    pub second: ConeMorphism,
}

impl FiberProduct {
    /// The unique morphism `ω -> P` induced by `h1: ω -> σ1`, `h2: ω -> σ2`
    /// with `f∘h1 = g∘h2`, or `None` if the pair is not compatible.
    pub fn factor(&self, h1: &ConeMorphism, h2: &ConeMorphism) -> Option<ConeMorphism> {
        let n1 = self.first.target.rank();
        let k = self.cone.rank();
        let stacked: IMat = self.first.matrix.iter().chain(self.second.matrix.iter()).cloned().collect();
        let rhs: IMat = h1.matrix.iter().chain(h2.matrix.iter()).cloned().collect();
        debug_assert_eq!(stacked.len(), n1 + self.second.target.rank());
        let m = linalg::solve_mat(&stacked, k, &rhs, h1.source.rank())?;
        ConeMorphism::new(h1.source.clone(), self.cone.clone(), m).ok()
    }
}

pub fn fiber_product(f: &ConeMorphism, g: &ConeMorphism) -> Result<FiberProduct> {
    if f.target != g.target {
        return Err(Error::InvalidMorphism("fiber product over different cones".into()));
    }
    let (n1, n2) = (f.source.rank(), g.source.rank());
    let prod = f.source.product(&g.source);
    let eqs: Vec<Vec<i64>> = (0..f.target.rank())
        .map(|i| {
            let mut row = f.matrix[i].clone();
            row.extend(g.matrix[i].iter().map(|x| -x));
            row
        })
        .collect();
    let (cone, incl) = intersect_with_kernel(&prod, &eqs)?;
    let first = ConeMorphism { source: cone.clone(), target: f.source.clone(), matrix: incl[..n1].to_vec() };
    let second = ConeMorphism { source: cone.clone(), target: g.source.clone(), matrix: incl[n1..n1 + n2].to_vec() };
    Ok(FiberProduct { cone, first, second })
}

/// All lattice isomorphisms `a -> b`, as matrices.
pub fn isomorphisms(a: &Cone, b: &Cone) -> Vec<IMat> {
    if a.rank() != b.rank() || a.rays().len() != b.rays().len() {
        return Vec::new();
    }
    let n = a.rank();
    if n == 0 {
        return vec![Vec::new()];
    }
    // choose n independent rays of a; their images determine the map
    let mut basis = Vec::new();
    for (i, r) in a.rays().iter().enumerate() {
        let mut trial: Vec<Vec<i64>> = basis.iter().map(|&j: &usize| a.rays()[j].clone()).collect();
        trial.push(r.clone());
        if linalg::rank_int(&trial, n) == trial.len() {
            basis.push(i);
        }
        if basis.len() == n {
            break;
        }
    }
    let src: IMat = linalg::from_columns(&basis.iter().map(|&i| a.rays()[i].clone()).collect::<Vec<_>>(), n);
    let src_t: Vec<Vec<BigRational>> = linalg::transpose(&src, n).iter().map(|r| linalg::to_rat(r)).collect();
    let mut out = Vec::new();
    let mut images: Vec<usize> = Vec::new();
    choose_images(a, b, &basis, &src_t, &mut images, &mut out);
    out.sort();
    out.dedup();
    out
}

fn choose_images(a: &Cone, b: &Cone, basis: &[usize], src_t: &[Vec<BigRational>], images: &mut Vec<usize>, out: &mut Vec<IMat>) {
    let n = a.rank();
    if images.len() == basis.len() {
        // solve M * src = dst, i.e. src^T * M^T = dst^T, row by row of M
        let dst: IMat = linalg::from_columns(&images.iter().map(|&j| b.rays()[j].clone()).collect::<Vec<_>>(), n);
        let mut m: IMat = Vec::with_capacity(n);
        let cols: Vec<Vec<BigRational>> = (0..n).map(|j| src_t.iter().map(|r| r[j].clone()).collect()).collect();
        for row in &dst {
            let Some(sol) = linalg::solve(&cols, &linalg::to_rat(row)) else { return };
            let Some(ints) = sol
                .iter()
                .map(|q| if q.is_integer() { num_traits::ToPrimitive::to_i64(&q.to_integer()) } else { None })
                .collect::<Option<Vec<i64>>>()
            else {
                return;
            };
            m.push(ints);
        }
        let f = ConeMorphism { source: a.clone(), target: b.clone(), matrix: m };
        if f.source.rays().iter().all(|r| f.apply(r).map(|v| b.contains(&v)).unwrap_or(false)) && f.is_isomorphism() {
            out.push(f.matrix);
        }
        return;
    }
    for j in 0..b.rays().len() {
        if images.contains(&j) {
            continue;
        }
        images.push(j);
        choose_images(a, b, basis, src_t, images, out);
        images.pop();
    }
}
