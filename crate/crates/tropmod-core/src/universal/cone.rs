use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_integer::Integer;

use crate::cones::{fiber_product, is_zero_on_face, Cone, ConeMorphism};
use crate::curves::TropicalCurve;
use crate::error::{Error, Result};
use crate::graphs::MarkedGraph;
use crate::linalg::{self, IMat};
use crate::stacks::{Arrow, ConeStack, StackObject};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceKind {
    Vertex(usize),
    Leg(u32),
    Edge(usize),
}

/// One of the cones `Cone(v) = σ`, `Cone(l) = σ × R_{>=0}`,
/// `Cone(e) = σ ×_{R_{>=0}} R^2_{>=0}`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub kind: PieceKind,
    pub cone: Cone,
    /// Embedding into the ambient lattice `σ`, `σ × Z` or `σ × Z^2`.
    pub embedding: IMat,
    /// `c` restricted to the piece.
    pub projection: IMat,
    /// The sections `σ -> σ(f)` into the ambient lattice, per flag glued here.
    pub sections: Vec<(usize, IMat)>,
}

/// What a cell of the presentation is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    /// Glued vertex cones over a face of the base; `members` are the vertices
    /// of `Γ` identified there, i.e. one vertex of the restricted curve.
    Vertex {
        face: usize,
        members: Vec<usize>,
    },
    /// A face of a leg or edge piece not lying over a vertex; `rays` index the piece's rays.
    Leg {
        label: u32,
        rays: Vec<usize>,
    },
    Edge {
        edge: usize,
        rays: Vec<usize>,
    },
}

#[derive(Clone, Debug)]
pub struct UniversalCone {
    pub curve: TropicalCurve,
    pub pieces: Vec<Piece>,
    /// Cells and face arrows of `Cone(Γ)`.
    pub presentation: ConeStack,
    pub cells: Vec<Cell>,
    /// The structure map `c` on each cell.
    pub structure_map: Vec<ConeMorphism>,
    /// `H` on each cell: the genus of the glued vertex, zero elsewhere.
    pub h: Vec<u32>,
    /// Leg label and the cell of the whole leg piece, the image of the marking `s_l`.
    pub sections: Vec<(u32, usize)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn stack_rows(top: &IMat, bottom: &[Vec<i64>]) -> IMat {
    top.iter().chain(bottom.iter()).cloned().collect()
}

fn section(n: usize, extra: &[Vec<i64>]) -> IMat {
    stack_rows(&linalg::identity(n), extra)
}

pub fn cone_over(curve: &TropicalCurve) -> Result<UniversalCone> {
    let sigma = &curve.base;
    let n = sigma.rank();
    let g = &curve.graph;
    let faces = sigma.face_lattice();
    let nf = faces.len();
    let face_index: HashMap<Vec<usize>, usize> = faces.iter().enumerate().map(|(i, f)| (f.ray_indices.clone(), i)).collect();

    let mut uf = UnionFind((0..g.num_vertices() * nf).collect());
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        for (k, f) in faces.iter().enumerate() {
            if is_zero_on_face(&curve.lengths[e], f) {
                uf.union(a * nf + k, b * nf + k);
            }
        }
    }
    let mut objects: Vec<StackObject> = Vec::new();
    let mut cells: Vec<Cell> = Vec::new();
    let mut structure: Vec<IMat> = Vec::new();
    let mut class_obj: HashMap<usize, usize> = HashMap::new();
    for (k, face) in faces.iter().enumerate() {
        for v in 0..g.num_vertices() {
            let root = uf.find(v * nf + k);
            match class_obj.get(&root) {
                Some(&o) => {
                    if let Cell::Vertex { members, .. } = &mut cells[o] {
                        members.push(v);
                    }
                }
                None => {
                    class_obj.insert(root, objects.len());
                    objects.push(StackObject { label: format!("v{v}@{:?}", face.ray_indices), cone: face.as_cone.clone() });
                    cells.push(Cell::Vertex { face: k, members: vec![v] });
                    structure.push(face.inclusion.clone());
                }
            }
        }
    }
    let mut class_of = |v: usize, k: usize| class_obj[&uf.find(v * nf + k)];

    let mut pieces = Vec::new();
    for v in 0..g.num_vertices() {
        pieces.push(Piece {
            kind: PieceKind::Vertex(v),
            cone: sigma.clone(),
            embedding: linalg::identity(n),
            projection: linalg::identity(n),
            sections: Vec::new(),
        });
    }
    for &(l, _) in g.legs() {
        let flag = g.leg_flag(l).expect("listed leg");
        pieces.push(Piece {
            kind: PieceKind::Leg(l),
            cone: sigma.product(&Cone::ray()),
            embedding: linalg::identity(n + 1),
            projection: linalg::identity(n)
                .into_iter()
                .map(|mut r| {
                    r.push(0);
                    r
                })
                .collect(),
            sections: vec![(flag, section(n, &[vec![0; n]]))],
        });
    }
    let ray = Cone::ray();
    let sum = ConeMorphism::new(Cone::orthant(2), ray.clone(), vec![vec![1, 1]])?;
    for (e, d) in curve.lengths.iter().enumerate() {
        let length = ConeMorphism::new(sigma.clone(), ray.clone(), vec![d.covector.clone()])?;
        let fp = fiber_product(&length, &sum)?;
        let embedding = stack_rows(&fp.first.matrix, &fp.second.matrix);
        let zero = vec![0; n];
        // σ(2e) is where the distance from the first endpoint vanishes
        let s0 = section(n, &[zero.clone(), d.covector.clone()]);
        let s1 = section(n, &[d.covector.clone(), zero]);
        pieces.push(Piece {
            kind: PieceKind::Edge(e),
            cone: fp.cone,
            projection: fp.first.matrix,
            embedding,
            sections: vec![(2 * e, s0), (2 * e + 1, s1)],
        });
    }

    let mut arrows: BTreeSet<(usize, usize, IMat)> = BTreeSet::new();
    let mut sections = Vec::new();
    let id = linalg::identity(n);
    for p in &pieces {
        let pfaces = p.cone.face_lattice();
        // object and ambient embedding of each face of the piece
        let mut placed: Vec<(usize, IMat)> = Vec::new();
        for h in &pfaces {
            let amb_rays: Vec<Vec<i64>> =
                h.ray_indices.iter().map(|&i| linalg::mat_vec(&p.embedding, &p.cone.rays()[i])).collect::<Result<_>>()?;
            let glued = match p.kind {
                PieceKind::Vertex(v) => Some((v, &id)),
                PieceKind::Leg(_) => {
                    let v = g.root(p.sections[0].0);
                    amb_rays.iter().all(|r| r[n] == 0).then(|| (v, &p.sections[0].1))
                }
                PieceKind::Edge(e) => {
                    let (a, b) = g.edges()[e];
                    if amb_rays.iter().all(|r| r[n] == 0) {
                        Some((a, &p.sections[0].1))
                    } else if amb_rays.iter().all(|r| r[n + 1] == 0) {
                        Some((b, &p.sections[1].1))
                    } else {
                        None
                    }
                }
            };
            match glued {
                Some((v, s)) => {
                    let projected: Vec<Vec<i64>> = amb_rays.iter().map(|r| r[..n].to_vec()).collect();
                    let k = face_index[&sigma.smallest_face_containing_int(&projected)?.ray_indices];
                    placed.push((class_of(v, k), linalg::mat_mul(s, &faces[k].inclusion, faces[k].dim())?));
                }
                None => {
                    let emb = linalg::mat_mul(&p.embedding, &h.inclusion, h.dim())?;
                    let (label, cell) = match p.kind {
                        PieceKind::Leg(l) => (format!("l{l}@{:?}", h.ray_indices), Cell::Leg { label: l, rays: h.ray_indices.clone() }),
                        PieceKind::Edge(e) => (format!("e{e}@{:?}", h.ray_indices), Cell::Edge { edge: e, rays: h.ray_indices.clone() }),
                        PieceKind::Vertex(_) => unreachable!("vertex faces are always glued"),
                    };
                    structure.push(emb[..n].to_vec());
                    objects.push(StackObject { label, cone: h.as_cone.clone() });
                    cells.push(cell);
                    placed.push((objects.len() - 1, emb));
                }
            }
        }
        if let PieceKind::Leg(l) = p.kind {
            sections.push((l, placed.last().expect("the whole face comes last").0));
        }
        for (i, small) in pfaces.iter().enumerate() {
            for (j, big) in pfaces.iter().enumerate() {
                if !big.contains_face(small) {
                    continue;
                }
                let (x, ex) = &placed[i];
                let (y, ey) = &placed[j];
                let m = linalg::solve_mat(ey, objects[*y].cone.rank(), ex, objects[*x].cone.rank())
                    .ok_or_else(|| Error::InvalidStack("face of a piece does not embed".into()))?;
                arrows.insert((*x, *y, m));
            }
        }
    }
    let arrows: Vec<Arrow> = arrows.into_iter().map(|(src, dst, matrix)| Arrow { src, dst, matrix }).collect();
    let presentation = ConeStack::from_parts(objects, arrows, None, None)?;

    let restricted: Vec<crate::graphs::GraphMorphism> = faces.iter().map(|f| curve.restrict(f).map(|r| r.1)).collect::<Result<_>>()?;
    let h = cells
        .iter()
        .map(|c| match c {
            Cell::Vertex { face, members } => {
                let w = &restricted[*face];
                w.target.weight(w.vertex_map[members[0]])
            }
            _ => 0,
        })
        .collect();
    let structure_map = structure
        .into_iter()
        .enumerate()
        .map(|(x, m)| ConeMorphism::new(presentation.cone(x).clone(), sigma.clone(), m))
        .collect::<Result<_>>()?;
    Ok(UniversalCone { curve: curve.clone(), pieces, presentation, cells, structure_map, h, sections })
}

impl UniversalCone {
    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// The cell of vertex `v` over the whole base.
    pub fn vertex_cell(&self, v: usize) -> usize {
        let top = self.curve.base.face_lattice().len() - 1;
        self.cells
            .iter()
            .position(|c| matches!(c, Cell::Vertex { face, members } if *face == top && members.contains(&v)))
            .expect("every vertex has a cell over the base")
    }

    /// Graphviz rendering with the structure map drawn to a node for the base.
    pub fn to_dot(&self, name: &str) -> String {
        let p = &self.presentation;
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{name}\" {{");
        let _ = writeln!(s, "  base [shape=box, label=\"σ (dim {})\"];", self.curve.base.rank());
        for (i, o) in p.objects().iter().enumerate() {
            let _ = writeln!(s, "  o{i} [label=\"{} (dim {}, H={})\"];", o.label, o.cone.rank(), self.h[i]);
        }
        let ids: BTreeSet<usize> = p.identities().iter().copied().collect();
        for (i, a) in p.arrows().iter().enumerate() {
            if !ids.contains(&i) {
                let _ = writeln!(s, "  o{} -> o{} [label=\"{:?}\"];", a.src, a.dst, a.matrix);
            }
        }
        for (i, c) in self.structure_map.iter().enumerate() {
            // only cells that are not proper faces of another cell
            if p.arrows().iter().any(|a| a.src == i && a.dst != i) {
                continue;
            }
            let _ = writeln!(s, "  o{i} -> base [style=dashed, label=\"c {:?}\"];", c.matrix);
        }
        for (l, x) in &self.sections {
            let _ = writeln!(s, "  o{x} [xlabel=\"s_{l}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// The slice `c^{-1}(1)` of `Cone(Γ)` over a ray: the graph of `Γ` with the
/// lattice length of each edge segment and `H` on the vertex points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaySlice {
    pub graph: MarkedGraph,
    pub lengths: Vec<u64>,
    pub weights: Vec<u32>,
    /// Legs become unbounded rays in the slice.
    pub infinite_legs: Vec<u32>,
}

pub fn fiber_at_one(curve: &TropicalCurve) -> Result<RaySlice> {
    if curve.base != Cone::ray() {
        return Err(Error::NotRay);
    }
    let u = cone_over(curve)?;
    let one = vec![vec![1i64]];
    let mut lengths = Vec::new();
    for p in &u.pieces {
        let PieceKind::Edge(_) = p.kind else { continue };
        // the segment joins the two flag sections at height 1
        let a = linalg::mat_mul(&p.sections[0].1, &one, 1)?;
        let b = linalg::mat_mul(&p.sections[1].1, &one, 1)?;
        let diff: IMat = a.iter().zip(&b).map(|(x, y)| vec![y[0] - x[0]]).collect();
        let coords = linalg::solve_mat(&p.embedding, p.cone.rank(), &diff, 1)
            .ok_or_else(|| Error::InvalidStack("segment leaves the edge lattice".into()))?;
        let len = coords.iter().fold(0i64, |acc, r| acc.gcd(&r[0]));
        lengths.push(len.unsigned_abs());
    }
    let weights = (0..curve.graph.num_vertices()).map(|v| u.h[u.vertex_cell(v)]).collect();
    Ok(RaySlice { graph: curve.graph.clone(), lengths, weights, infinite_legs: curve.graph.labels() })
}
