//! Bracket/linear-combination certificates over the generator pair.
//!
//! A [`Certificate`] is a topologically ordered, hash-consed node table
//! plus a root id. Leaves are the two generators; interior nodes are
//! brackets or rational linear combinations. Evaluating the root yields a
//! concrete vector field, so a certificate is a checkable witness that its
//! value lies in the subalgebra generated by `U` and `V`.
//!
//! The JSON interchange form is
//! `{"n": int, "nodes": [node...], "root": int}` where a node is one of
//! `{"op":"U"}`, `{"op":"V"}`, `{"op":"br","l":id,"r":id}` or
//! `{"op":"lin","terms":[[scalar,id]...]}`; ids are 0-based table indices,
//! forward references are forbidden, and scalars are lowest-terms strings
//! (`"p/q"`, or `"p"` when the denominator is 1).

use crate::algebra::Rational;
use crate::vectorfield::{standard_generators, VectorField};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::str::FromStr;
use thiserror::Error;

pub type NodeId = usize;

/// One node of a certificate DAG. Node ids always point earlier in the
/// table, so the table order is a topological order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CertNode {
    GenU,
    GenV,
    Bracket(NodeId, NodeId),
    LinComb(Vec<(Rational, NodeId)>),
}

impl CertNode {
    fn children(&self) -> Vec<NodeId> {
        match self {
            CertNode::GenU | CertNode::GenV => Vec::new(),
            CertNode::Bracket(l, r) => vec![*l, *r],
            CertNode::LinComb(terms) => terms.iter().map(|(_, id)| *id).collect(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("invalid certificate JSON: {0}")]
    Json(String),
    #[error("node {node} references id {child}, which does not precede it")]
    ForwardReference { node: usize, child: usize },
    #[error("root id {root} out of range for table of {len} nodes")]
    RootOutOfRange { root: usize, len: usize },
    #[error("node {node} is a linear combination with no terms")]
    EmptyLinComb { node: usize },
    #[error("node {node} stores a zero scalar")]
    ZeroScalar { node: usize },
    #[error("node {node} has an unparsable scalar {text:?}")]
    BadScalar { node: usize, text: String },
    #[error("node {node} scalar {text:?} is not in lowest terms")]
    NonCanonicalScalar { node: usize, text: String },
    #[error("dimension must be at least 1")]
    InvalidDimension,
}

/// Size and shape summary of a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertMetrics {
    /// Total number of table entries.
    pub node_count: usize,
    /// Longest root-to-leaf path, counted in nodes.
    pub depth: usize,
    /// Largest bit length over all linear-combination numerators and
    /// denominators; 0 when there are no linear combinations.
    pub max_scalar_bits: u64,
}

/// An immutable, deduplicated certificate: dimension, node table, root id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    n: usize,
    nodes: Vec<CertNode>,
    root: NodeId,
}

impl Certificate {
    /// Validates table well-formedness (ids strictly precede their node,
    /// linear combinations are nonempty with nonzero scalars).
    pub fn from_parts(
        n: usize,
        nodes: Vec<CertNode>,
        root: NodeId,
    ) -> Result<Self, CertificateError> {
        if n == 0 {
            return Err(CertificateError::InvalidDimension);
        }
        if root >= nodes.len() {
            return Err(CertificateError::RootOutOfRange {
                root,
                len: nodes.len(),
            });
        }
        for (idx, node) in nodes.iter().enumerate() {
            for child in node.children() {
                if child >= idx {
                    return Err(CertificateError::ForwardReference { node: idx, child });
                }
            }
            if let CertNode::LinComb(terms) = node {
                if terms.is_empty() {
                    return Err(CertificateError::EmptyLinComb { node: idx });
                }
                if terms.iter().any(|(c, _)| c.is_zero()) {
                    return Err(CertificateError::ZeroScalar { node: idx });
                }
            }
        }
        Ok(Certificate { n, nodes, root })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn nodes(&self) -> &[CertNode] {
        &self.nodes
    }

    fn reachable(&self) -> Vec<bool> {
        let mut mark = vec![false; self.nodes.len()];
        mark[self.root] = true;
        for id in (0..=self.root).rev() {
            if mark[id] {
                for child in self.nodes[id].children() {
                    mark[child] = true;
                }
            }
        }
        mark
    }

    /// Evaluates the root to a concrete vector field. Each reachable node
    /// is evaluated exactly once, in table order.
    pub fn eval(&self) -> VectorField {
        let mark = self.reachable();
        let (u, v) = standard_generators(self.n);
        let mut vals: Vec<Option<VectorField>> = vec![None; self.nodes.len()];
        for id in 0..=self.root {
            if !mark[id] {
                continue;
            }
            let val = match &self.nodes[id] {
                CertNode::GenU => u.clone(),
                CertNode::GenV => v.clone(),
                CertNode::Bracket(l, r) => {
                    let lv = vals[*l].as_ref().expect("topological order");
                    let rv = vals[*r].as_ref().expect("topological order");
                    lv.bracket(rv)
                }
                CertNode::LinComb(terms) => {
                    let mut acc = VectorField::zero(self.n);
                    for (c, t) in terms {
                        let tv = vals[*t].as_ref().expect("topological order");
                        acc = acc.add(&tv.scale(c));
                    }
                    acc
                }
            };
            vals[id] = Some(val);
        }
        vals[self.root].take().expect("root evaluated")
    }

    pub fn metrics(&self) -> CertMetrics {
        let mark = self.reachable();
        let mut depth = vec![0usize; self.nodes.len()];
        for id in 0..=self.root {
            if !mark[id] {
                continue;
            }
            let below = self.nodes[id]
                .children()
                .into_iter()
                .map(|c| depth[c])
                .max()
                .unwrap_or(0);
            depth[id] = below + 1;
        }
        let mut max_scalar_bits = 0u64;
        for node in &self.nodes {
            if let CertNode::LinComb(terms) = node {
                for (c, _) in terms {
                    max_scalar_bits = max_scalar_bits.max(c.numer().bits()).max(c.denom().bits());
                }
            }
        }
        CertMetrics {
            node_count: self.nodes.len(),
            depth: depth[self.root],
            max_scalar_bits,
        }
    }

    /// Compact canonical JSON bytes. Re-serializing a deserialized
    /// certificate reproduces these bytes exactly.
    pub fn to_json(&self) -> Vec<u8> {
        let nodes = self
            .nodes
            .iter()
            .map(|node| match node {
                CertNode::GenU => NodeJson::GenU,
                CertNode::GenV => NodeJson::GenV,
                CertNode::Bracket(l, r) => NodeJson::Bracket { l: *l, r: *r },
                CertNode::LinComb(terms) => NodeJson::LinComb {
                    terms: terms
                        .iter()
                        .map(|(c, id)| (c.to_string(), *id))
                        .collect(),
                },
            })
            .collect();
        let doc = CertJson {
            n: self.n,
            nodes,
            root: self.root,
        };
        serde_json::to_vec(&doc).expect("certificate serialization cannot fail")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, CertificateError> {
        let doc: CertJson =
            serde_json::from_slice(bytes).map_err(|e| CertificateError::Json(e.to_string()))?;
        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for (idx, node) in doc.nodes.into_iter().enumerate() {
            nodes.push(match node {
                NodeJson::GenU => CertNode::GenU,
                NodeJson::GenV => CertNode::GenV,
                NodeJson::Bracket { l, r } => CertNode::Bracket(l, r),
                NodeJson::LinComb { terms } => {
                    let mut parsed = Vec::with_capacity(terms.len());
                    for (text, id) in terms {
                        let c = Rational::from_str(&text).map_err(|_| {
                            CertificateError::BadScalar {
                                node: idx,
                                text: text.clone(),
                            }
                        })?;
                        if c.to_string() != text {
                            return Err(CertificateError::NonCanonicalScalar { node: idx, text });
                        }
                        parsed.push((c, id));
                    }
                    CertNode::LinComb(parsed)
                }
            });
        }
        Certificate::from_parts(doc.n, nodes, doc.root)
    }
}

#[derive(Serialize, Deserialize)]
struct CertJson {
    n: usize,
    nodes: Vec<NodeJson>,
    root: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op")]
enum NodeJson {
    #[serde(rename = "U")]
    GenU,
    #[serde(rename = "V")]
    GenV,
    #[serde(rename = "br")]
    Bracket { l: usize, r: usize },
    #[serde(rename = "lin")]
    LinComb { terms: Vec<(String, usize)> },
}

/// Append-only hash-consed node table. Structurally identical nodes are
/// interned once; ids are assigned in insertion order, so children always
/// precede parents.
#[derive(Debug, Default, Clone)]
pub struct CertDag {
    nodes: Vec<CertNode>,
    index: HashMap<CertNode, NodeId>,
}

impl CertDag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, node: CertNode) -> NodeId {
        for child in node.children() {
            assert!(child < self.nodes.len(), "child id out of range");
        }
        if let CertNode::LinComb(terms) = &node {
            assert!(!terms.is_empty(), "empty linear combination");
            assert!(
                terms.iter().all(|(c, _)| !c.is_zero()),
                "zero scalar in linear combination"
            );
        }
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &CertNode {
        &self.nodes[id]
    }

    /// Extracts the sub-DAG reachable from `root` as a standalone
    /// certificate, renumbering ids while preserving relative order.
    pub fn extract(&self, n: usize, root: NodeId) -> Certificate {
        assert!(root < self.nodes.len(), "root id out of range");
        let mut mark = vec![false; root + 1];
        mark[root] = true;
        for id in (0..=root).rev() {
            if mark[id] {
                for child in self.nodes[id].children() {
                    mark[child] = true;
                }
            }
        }
        let mut remap = vec![usize::MAX; root + 1];
        let mut out = Vec::new();
        for id in 0..=root {
            if !mark[id] {
                continue;
            }
            let rewritten = match &self.nodes[id] {
                CertNode::GenU => CertNode::GenU,
                CertNode::GenV => CertNode::GenV,
                CertNode::Bracket(l, r) => CertNode::Bracket(remap[*l], remap[*r]),
                CertNode::LinComb(terms) => CertNode::LinComb(
                    terms.iter().map(|(c, id)| (c.clone(), remap[*id])).collect(),
                ),
            };
            remap[id] = out.len();
            out.push(rewritten);
        }
        Certificate::from_parts(n, out, remap[root]).expect("extracted table is well formed")
    }
}
