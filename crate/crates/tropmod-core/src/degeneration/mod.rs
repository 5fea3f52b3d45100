//! Dual tropical curves of nodal degenerations over a log point, and the
//! tropical squares for specialization, clutching and forgetting.
//!
//! A degeneration is recorded by its combinatorial shadow only: components
//! with genera, nodes with smoothing parameters in the dual monoid of the base
//! cone, and the component of each marking.

mod corpus;
mod squares;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cones::{pullback_element, Cone, DualElement, Face};
use crate::curves::TropicalCurve;
use crate::error::{Error, Result};
use crate::graphs::MarkedGraph;
use crate::io::ConeJson;

pub use corpus::{random_corpus, random_degeneration, square_degeneration};
pub use squares::{check_all_faces, check_clutch_square, check_forget_square, check_self_clutch_square, check_specialization_square};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub a: String,
    pub b: String,
    /// Smoothing parameter, a covector on the base cone.
    pub delta: DualElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DegenerationJson", into = "DegenerationJson")]
pub struct NodalDegeneration {
    pub cone: Cone,
    pub components: Vec<Component>,
    pub nodes: Vec<Node>,
    /// Marking label to component id.
    pub markings: BTreeMap<u32, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DegenerationJson {
    cone: ConeJson,
    components: Vec<Component>,
    nodes: Vec<Node>,
    markings: BTreeMap<u32, String>,
}

impl TryFrom<DegenerationJson> for NodalDegeneration {
    type Error = Error;

    fn try_from(j: DegenerationJson) -> Result<Self> {
        Ok(NodalDegeneration { cone: j.cone.to_cone()?, components: j.components, nodes: j.nodes, markings: j.markings })
    }
}

impl From<NodalDegeneration> for DegenerationJson {
    fn from(x: NodalDegeneration) -> Self {
        DegenerationJson { cone: ConeJson::from_cone(&x.cone), components: x.components, nodes: x.nodes, markings: x.markings }
    }
}

impl NodalDegeneration {
    fn index(&self) -> Result<BTreeMap<&str, usize>> {
        let mut index = BTreeMap::new();
        for (i, c) in self.components.iter().enumerate() {
            if index.insert(c.id.as_str(), i).is_some() {
                return Err(Error::InvalidDegeneration(format!("duplicate component {:?}", c.id)));
            }
        }
        Ok(index)
    }

    fn component(&self, index: &BTreeMap<&str, usize>, id: &str) -> Result<usize> {
        index.get(id).copied().ok_or_else(|| Error::InvalidDegeneration(format!("unknown component {id:?}")))
    }

    /// Arithmetic genus: component genera plus the first Betti number of the dual graph.
    pub fn genus(&self) -> Result<u32> {
        Ok(self.dual_graph()?.genus())
    }

    /// Components as vertices in list order, nodes as edges, markings as legs.
    pub fn dual_graph(&self) -> Result<MarkedGraph> {
        let index = self.index()?;
        let edges = self.nodes.iter().map(|n| Ok((self.component(&index, &n.a)?, self.component(&index, &n.b)?))).collect::<Result<_>>()?;
        let legs = self.markings.iter().map(|(&l, c)| Ok((l, self.component(&index, c)?))).collect::<Result<_>>()?;
        let g = MarkedGraph::new(self.components.iter().map(|c| c.genus).collect(), edges, legs)?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for n in &self.nodes {
            if n.delta.covector.len() != self.cone.rank() || !self.cone.dual_contains(&n.delta.covector) {
                return Err(Error::InvalidDegeneration(format!("{:?} is not in the dual monoid", n.delta.covector)));
            }
            if n.delta.is_zero() {
                return Err(Error::InvalidDegeneration(format!("node {}-{} has zero smoothing parameter", n.a, n.b)));
            }
        }
        let g = self.dual_graph()?;
        if 2 * g.genus() as i64 - 2 + g.num_legs() as i64 <= 0 {
            return Err(Error::UnstablePair { g: g.genus(), n: g.num_legs() as u32 });
        }
        Ok(())
    }

    /// Restricts the base to a face; nodes whose parameter vanishes there are
    /// smoothed, merging the components they join.
    pub fn specialize_to_face(&self, face: &Face) -> Result<NodalDegeneration> {
        if face.parent != self.cone {
            return Err(Error::BaseMismatch);
        }
        let index = self.index()?;
        let f = face.inclusion_morphism();
        let pulled: Vec<DualElement> = self.nodes.iter().map(|n| pullback_element(&f, &n.delta)).collect::<Result<_>>()?;
        let k = self.components.len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut ends = Vec::new();
        for n in &self.nodes {
            ends.push((self.component(&index, &n.a)?, self.component(&index, &n.b)?));
        }
        for (i, d) in pulled.iter().enumerate() {
            if d.is_zero() {
                let (a, b) = (find(&mut parent, ends[i].0), find(&mut parent, ends[i].1));
                parent[a.max(b)] = a.min(b);
            }
        }
        let roots: Vec<usize> = (0..k).map(|c| find(&mut parent, c)).collect();
        let classes: BTreeSet<usize> = roots.iter().copied().collect();
        let mut components = Vec::new();
        let mut id_of = BTreeMap::new();
        for &r in &classes {
            let members: Vec<usize> = (0..k).filter(|&c| roots[c] == r).collect();
            let smoothed = (0..self.nodes.len()).filter(|&i| pulled[i].is_zero() && roots[ends[i].0] == r).count();
            let genus = members.iter().map(|&c| self.components[c].genus).sum::<u32>() + smoothed as u32 + 1 - members.len() as u32;
            let id = members.iter().map(|&c| self.components[c].id.as_str()).collect::<Vec<_>>().join("+");
            id_of.insert(r, id.clone());
            components.push(Component { id, genus });
        }
        let nodes = self
            .nodes
            .iter()
            .zip(&pulled)
            .zip(&ends)
            .filter(|((_, d), _)| !d.is_zero())
            .map(|((_, d), &(a, b))| Node { a: id_of[&roots[a]].clone(), b: id_of[&roots[b]].clone(), delta: d.clone() })
            .collect();
        let markings =
            self.markings.iter().map(|(&l, c)| Ok((l, id_of[&roots[self.component(&index, c)?]].clone()))).collect::<Result<_>>()?;
        Ok(NodalDegeneration { cone: face.as_cone.clone(), components, nodes, markings })
    }

    /// Deletes marking `label` and absorbs a component that becomes unstable:
    /// a rational bridge merges its two nodes into one with the summed parameter,
    /// a rational tail with one other marking hands that marking to its neighbour.
    pub fn forget_marking(&self, label: u32) -> Result<NodalDegeneration> {
        let mut out = self.clone();
        let c = out.markings.remove(&label).ok_or(Error::MissingLeg(label))?;
        let g = out.dual_graph()?;
        if 2 * g.genus() as i64 - 2 + g.num_legs() as i64 <= 0 {
            return Err(Error::UnstablePair { g: g.genus(), n: g.num_legs() as u32 });
        }
        let index = out.index()?;
        let v = out.component(&index, &c)?;
        if g.is_stable_at(v) {
            return Ok(out);
        }
        let touching: Vec<usize> = (0..out.nodes.len()).filter(|&i| out.nodes[i].a == c || out.nodes[i].b == c).collect();
        let other = |n: &Node| if n.a == c { n.b.clone() } else { n.a.clone() };
        let marks: Vec<u32> = out.markings.iter().filter(|(_, m)| **m == c).map(|(&l, _)| l).collect();
        match (touching.as_slice(), marks.as_slice()) {
            (&[i, j], []) if out.nodes[i].a != out.nodes[i].b => {
                let merged = Node { a: other(&out.nodes[i]), b: other(&out.nodes[j]), delta: out.nodes[i].delta.add(&out.nodes[j].delta)? };
                out.nodes[i] = merged;
                out.nodes.remove(j);
            }
            (&[i], &[l]) => {
                let far = other(&out.nodes[i]);
                out.markings.insert(l, far);
                out.nodes.remove(i);
            }
            _ => return Err(Error::InvalidDegeneration(format!("component {c:?} cannot be absorbed"))),
        }
        out.components.retain(|x| x.id != c);
        Ok(out)
    }
}

/// The dual tropical curve: one vertex per component with its genus, one leg
/// per marking, one edge per node with length its smoothing parameter.
pub fn tropicalize(x: &NodalDegeneration) -> Result<TropicalCurve> {
    x.validate()?;
    let g = x.dual_graph()?;
    if let Some(v) = (0..g.num_vertices()).find(|&v| !g.is_stable_at(v)) {
        return Err(Error::Unstable { component: v as u32 });
    }
    TropicalCurve::new(x.cone.clone(), g, x.nodes.iter().map(|n| n.delta.clone()).collect())
}

/// Nodal union of `left` and `right` joining the points marked `star` and
/// `bullet` with a new node of parameter `d`. Component ids are prefixed `l/`, `r/`.
pub fn glue_at_node(
    left: &NodalDegeneration,
    star: u32,
    right: &NodalDegeneration,
    bullet: u32,
    d: &DualElement,
) -> Result<NodalDegeneration> {
    if left.cone != right.cone {
        return Err(Error::BaseMismatch);
    }
    if d.is_zero() {
        return Err(Error::ZeroLength);
    }
    let cs = left.markings.get(&star).ok_or(Error::MissingLeg(star))?;
    let cb = right.markings.get(&bullet).ok_or(Error::MissingLeg(bullet))?;
    let rename = |x: &NodalDegeneration, p: &str| -> (Vec<Component>, Vec<Node>) {
        (
            x.components.iter().map(|c| Component { id: format!("{p}/{}", c.id), genus: c.genus }).collect(),
            x.nodes.iter().map(|n| Node { a: format!("{p}/{}", n.a), b: format!("{p}/{}", n.b), delta: n.delta.clone() }).collect(),
        )
    };
    let (mut components, mut nodes) = rename(left, "l");
    let (rc, rn) = rename(right, "r");
    components.extend(rc);
    nodes.extend(rn);
    nodes.push(Node { a: format!("l/{cs}"), b: format!("r/{cb}"), delta: d.clone() });
    let mut markings = BTreeMap::new();
    for (&l, c) in left.markings.iter().filter(|(&l, _)| l != star) {
        markings.insert(l, format!("l/{c}"));
    }
    for (&l, c) in right.markings.iter().filter(|(&l, _)| l != bullet) {
        if markings.insert(l, format!("r/{c}")).is_some() {
            return Err(Error::LabelClash(l));
        }
    }
    Ok(NodalDegeneration { cone: left.cone.clone(), components, nodes, markings })
}

/// Self-gluing: the points marked `star` and `bullet` become a node of parameter `d`.
pub fn self_glue(x: &NodalDegeneration, star: u32, bullet: u32, d: &DualElement) -> Result<NodalDegeneration> {
    if d.is_zero() {
        return Err(Error::ZeroLength);
    }
    let mut out = x.clone();
    let a = out.markings.remove(&star).ok_or(Error::MissingLeg(star))?;
    let b = out.markings.remove(&bullet).ok_or(Error::MissingLeg(bullet))?;
    out.nodes.push(Node { a, b, delta: d.clone() });
    Ok(out)
}

pub fn degeneration_to_json(x: &NodalDegeneration) -> String {
    crate::io::to_json(x)
}

pub fn degeneration_from_json(text: &str) -> Result<NodalDegeneration> {
    crate::io::from_json(text)
}

#[cfg(test)]
mod tests;
