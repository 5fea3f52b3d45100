//! JSON documents and Graphviz exports.
//!
//! Every document carries `"schema": "tropmod/1"` next to its payload.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cones::{Cone, DualElement};
use crate::curves::TropicalCurve;
use crate::error::{Error, Result};
use crate::graphs::MarkedGraph;
use crate::linalg::IMat;
use crate::stacks::{Arrow, ConeStack, StackObject};

pub const SCHEMA: &str = "tropmod/1";

#[derive(Serialize, Deserialize)]
struct Versioned<T> {
    schema: String,
    #[serde(flatten)]
    body: T,
}

pub fn to_json<T: Serialize>(body: &T) -> String {
    let doc = Versioned { schema: SCHEMA.to_string(), body };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}

/// Parses a document; a missing `schema` field is accepted, a different one is not.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if let Some(obj) = value.as_object_mut() {
        match obj.remove("schema") {
            None => {}
            Some(serde_json::Value::String(s)) if s == SCHEMA => {}
            Some(other) => return Err(Error::Schema(format!("unsupported schema {other}"))),
        }
    }
    serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeJson {
    pub lattice_rank: usize,
    pub rays: Vec<Vec<i64>>,
}

impl ConeJson {
    pub fn from_cone(c: &Cone) -> Self {
        let mut rays = c.rays().to_vec();
        rays.sort();
        ConeJson { lattice_rank: c.rank(), rays }
    }

    /// Redundant or non-primitive generators are accepted.
    pub fn to_cone(&self) -> Result<Cone> {
        Cone::from_generators(self.lattice_rank, &self.rays)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegJson {
    pub label: u32,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub legs: Vec<LegJson>,
}

impl GraphJson {
    pub fn from_graph(g: &MarkedGraph) -> Self {
        GraphJson {
            vertices: g.weights().iter().enumerate().map(|(id, &weight)| VertexJson { id, weight }).collect(),
            edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
            legs: g.legs().iter().map(|&(label, vertex)| LegJson { label, vertex }).collect(),
        }
    }

    /// Vertex ids may be arbitrary distinct integers; they are renumbered in the order given.
    pub fn to_graph(&self) -> Result<MarkedGraph> {
        let index: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        if index.len() != self.vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex id".into()));
        }
        let at = |id: usize| index.get(&id).copied().ok_or_else(|| Error::InvalidGraph(format!("unknown vertex {id}")));
        let edges = self.edges.iter().map(|&[a, b]| Ok((at(a)?, at(b)?))).collect::<Result<_>>()?;
        let legs = self.legs.iter().map(|l| Ok((l.label, at(l.vertex)?))).collect::<Result<_>>()?;
        MarkedGraph::new(self.vertices.iter().map(|v| v.weight).collect(), edges, legs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveJson {
    pub cone: ConeJson,
    pub graph: GraphJson,
    /// Edge index (as a string key) to length covector.
    pub lengths: BTreeMap<String, Vec<i64>>,
}

impl CurveJson {
    pub fn from_curve(c: &TropicalCurve) -> Self {
        CurveJson {
            cone: ConeJson::from_cone(&c.base),
            graph: GraphJson::from_graph(&c.graph),
            lengths: c.lengths.iter().enumerate().map(|(e, d)| (e.to_string(), d.covector.clone())).collect(),
        }
    }

    pub fn to_curve(&self) -> Result<TropicalCurve> {
        let base = self.cone.to_cone()?;
        let graph = self.graph.to_graph()?;
        let mut lengths = vec![None; graph.num_edges()];
        for (k, d) in &self.lengths {
            let e: usize = k.parse().map_err(|_| Error::Schema(format!("edge index {k:?}")))?;
            let slot = lengths.get_mut(e).ok_or_else(|| Error::Schema(format!("no edge {e}")))?;
            *slot = Some(DualElement::from(d.clone()));
        }
        let lengths = lengths
            .into_iter()
            .enumerate()
            .map(|(e, d)| d.ok_or_else(|| Error::Schema(format!("missing length for edge {e}"))))
            .collect::<Result<_>>()?;
        TropicalCurve::new(base, graph, lengths)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectJson {
    pub id: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    pub cone: ConeJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowJson {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    pub matrix: IMat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackJson {
    pub objects: Vec<ObjectJson>,
    pub arrows: Vec<ArrowJson>,
    /// Triples `[a, b, c]` with `c = b∘a`; derived from matrices when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compose: Option<Vec<[usize; 3]>>,
}

impl StackJson {
    pub fn from_stack(s: &ConeStack) -> Self {
        StackJson {
            objects: s
                .objects()
                .iter()
                .enumerate()
                .map(|(id, o)| ObjectJson { id, label: o.label.clone(), cone: ConeJson::from_cone(&o.cone) })
                .collect(),
            arrows: s
                .arrows()
                .iter()
                .enumerate()
                .map(|(id, a)| ArrowJson { id, src: a.src, dst: a.dst, matrix: a.matrix.clone() })
                .collect(),
            compose: Some(s.composition_table()),
        }
    }

    /// Objects and arrows are taken in list order; ids must be `0, 1, 2, ...`.
    pub fn to_stack(&self) -> Result<ConeStack> {
        if self.objects.iter().enumerate().any(|(i, o)| o.id != i) || self.arrows.iter().enumerate().any(|(i, a)| a.id != i) {
            return Err(Error::Schema("ids must be consecutive from 0".into()));
        }
        let objects = self
            .objects
            .iter()
            .map(|o| {
                Ok(StackObject { label: if o.label.is_empty() { o.id.to_string() } else { o.label.clone() }, cone: o.cone.to_cone()? })
            })
            .collect::<Result<_>>()?;
        let arrows = self.arrows.iter().map(|a| Arrow { src: a.src, dst: a.dst, matrix: a.matrix.clone() }).collect();
        ConeStack::from_parts(objects, arrows, None, self.compose.clone())
    }
}

pub fn cone_to_json(c: &Cone) -> String {
    to_json(&ConeJson::from_cone(c))
}

pub fn cone_from_json(text: &str) -> Result<Cone> {
    from_json::<ConeJson>(text)?.to_cone()
}

pub fn graph_to_json(g: &MarkedGraph) -> String {
    to_json(&GraphJson::from_graph(g))
}

pub fn graph_from_json(text: &str) -> Result<MarkedGraph> {
    from_json::<GraphJson>(text)?.to_graph()
}

pub fn curve_to_json(c: &TropicalCurve) -> String {
    to_json(&CurveJson::from_curve(c))
}

pub fn curve_from_json(text: &str) -> Result<TropicalCurve> {
    from_json::<CurveJson>(text)?.to_curve()
}

pub fn stack_to_json(s: &ConeStack) -> String {
    to_json(&StackJson::from_stack(s))
}

pub fn stack_from_json(text: &str) -> Result<ConeStack> {
    from_json::<StackJson>(text)?.to_stack()
}

/// Vertices labelled `w=h(v)`; legs drawn as undirected pendant edges to point nodes.
pub fn graph_to_dot(g: &MarkedGraph, name: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "graph \"{name}\" {{");
    for (v, w) in g.weights().iter().enumerate() {
        let _ = writeln!(s, "  v{v} [label=\"w={w}\"];");
    }
    for (e, (a, b)) in g.edges().iter().enumerate() {
        let _ = writeln!(s, "  v{a} -- v{b} [label=\"e{e}\"];");
    }
    for (l, v) in g.legs() {
        let _ = writeln!(s, "  l{l} [shape=point];");
        let _ = writeln!(s, "  v{v} -- l{l} [label=\"{l}\"];");
    }
    s.push_str("}\n");
    s
}

/// Like [`graph_to_dot`], with edge lengths as labels.
pub fn curve_to_dot(c: &TropicalCurve, name: &str) -> String {
    let mut s = graph_to_dot(&c.graph, name);
    for (e, d) in c.lengths.iter().enumerate() {
        s = s.replace(&format!("[label=\"e{e}\"]"), &format!("[label=\"{:?}\"]", d.covector));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::named;
    use crate::stacks::{build_moduli_stack, examples};

    #[test]
    fn cone_round_trip() {
        let c = Cone::from_generators(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 2], vec![2, 2, 4]]).unwrap();
        let text = cone_to_json(&c);
        assert!(text.contains("\"schema\": \"tropmod/1\""));
        assert_eq!(cone_from_json(&text).unwrap(), c);
        let json = ConeJson::from_cone(&c);
        let mut sorted = json.rays.clone();
        sorted.sort();
        assert_eq!(json.rays, sorted);
    }

    #[test]
    fn schema_is_checked() {
        assert!(cone_from_json(r#"{"lattice_rank": 1, "rays": [[1]]}"#).is_ok());
        assert!(matches!(cone_from_json(r#"{"schema": "tropmod/2", "lattice_rank": 1, "rays": [[1]]}"#), Err(Error::Schema(_))));
        assert!(matches!(cone_from_json("[1]"), Err(Error::Schema(_))));
    }

    #[test]
    fn graph_and_curve_round_trip() {
        for g in [named::theta(), named::dumbbell(), named::loop_with_leg()] {
            assert_eq!(graph_from_json(&graph_to_json(&g)).unwrap(), g);
            let c = TropicalCurve::tautological(&g);
            assert_eq!(curve_from_json(&curve_to_json(&c)).unwrap(), c);
        }
        let text = r#"{"vertices":[{"id":7,"weight":0}],"edges":[[7,7]],"legs":[{"label":1,"vertex":7}]}"#;
        assert_eq!(graph_from_json(text).unwrap(), named::loop_with_leg());
    }

    #[test]
    fn stack_round_trip() {
        let w = examples::combinatorial_waffle();
        assert_eq!(stack_from_json(&stack_to_json(&w)).unwrap(), w);
        let m = build_moduli_stack(1, 2).unwrap().stack;
        let text = stack_to_json(&m);
        assert_eq!(stack_from_json(&text).unwrap(), m);
        assert_eq!(stack_to_json(&stack_from_json(&text).unwrap()), text);
    }

    #[test]
    fn dot_labels() {
        let dot = graph_to_dot(&named::loop_with_leg(), "g");
        assert!(dot.contains("label=\"w=0\""));
        assert!(dot.contains("v0 -- l1"));
    }
}
