//! Typed metagraph store.
//!
//! Atoms are nodes or edges; edges hold an ordered target list and may target
//! other edges, so links between links (and between whole substructures built
//! from them) are first-class. Each atom carries an open-vocabulary type
//! label, an optional evidence truth value, and short/long-term importance
//! scalars used by attention spreading.
//!
//! Reads are freely shareable; mutation requires `&mut Metagraph`. All
//! returned collections are snapshots in ascending-id order, never live
//! views.

mod distinction;
mod format;

pub use distinction::{DistinctionGraph, GraphtropyMode};
pub use format::{read_graph, structurally_equal, write_graph, LoadedGraph};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::logic::EvidenceTv;

/// Reserved type labels understood by the built-in cognitive processes.
pub mod labels {
    pub const SIMILARITY: &str = "Similarity";
    pub const INHERITANCE: &str = "Inheritance";
    pub const MEMBER: &str = "Member";
    pub const CONCEPT: &str = "Concept";
    pub const OBSERVATION: &str = "Observation";
    pub const TEMPORAL_CONCEPT: &str = "TemporalConcept";
    pub const EXECUTION: &str = "Execution";
    pub const PREDICTIVE_IMPLICATION: &str = "PredictiveImplication";
    pub const SEQUENTIAL_AND: &str = "SequentialAnd";
    pub const XOR: &str = "Xor";
    pub const AND: &str = "And";
    pub const OR: &str = "Or";
    pub const NOT: &str = "Not";
}

/// Labels denoting symmetric relations; their target lists are stored in
/// canonical (ascending-id) order so structural equality is testable.
const SYMMETRIC_LABELS: [&str; 1] = [labels::SIMILARITY];

/// Stable identifier of an atom within one [`Metagraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u64);

impl std::fmt::Display for AtomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    Node,
    Edge,
}

/// A node or edge of the metagraph.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub id: AtomId,
    pub kind: AtomKind,
    pub type_label: String,
    pub targets: Vec<AtomId>,
    pub tv: Option<EvidenceTv>,
    pub sti: f64,
    pub lti: f64,
}

/// Errors raised by metagraph operations.
#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("target {0} does not exist")]
    DanglingTarget(AtomId),
    #[error("node cannot have targets (got {0})")]
    ArityViolation(usize),
    #[error("edge requires at least one target")]
    EmptyEdge,
    #[error("atom {0} does not exist or is not a node")]
    UnknownNode(AtomId),
    #[error("atom {0} does not exist")]
    UnknownAtom(AtomId),
    #[error("atom {atom} is still targeted by edge {edge}")]
    StillReferenced { atom: AtomId, edge: AtomId },
    #[error("type label {0:?} must be non-empty, without whitespace or parentheses")]
    InvalidTypeLabel(String),
    #[error("distinct-pairs graphtropy needs at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("distinction graphs range over different observation sets")]
    ObservationSetMismatch,
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
}

/// Typed metagraph: an atom store plus a target-to-incident-edges index.
#[derive(Clone, Debug, Default)]
pub struct Metagraph {
    atoms: BTreeMap<AtomId, Atom>,
    incidence: BTreeMap<AtomId, BTreeSet<AtomId>>,
    next_id: u64,
}

impl Metagraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, id: AtomId) -> bool {
        self.atoms.contains_key(&id)
    }

    pub fn get(&self, id: AtomId) -> Option<&Atom> {
        self.atoms.get(&id)
    }

    /// Atoms in ascending id order (creation order).
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.values()
    }

    pub fn node_ids(&self) -> Vec<AtomId> {
        self.atoms
            .values()
            .filter(|a| a.kind == AtomKind::Node)
            .map(|a| a.id)
            .collect()
    }

    pub fn edge_ids(&self) -> Vec<AtomId> {
        self.atoms
            .values()
            .filter(|a| a.kind == AtomKind::Edge)
            .map(|a| a.id)
            .collect()
    }

    /// Adds a node with the given type label.
    pub fn add_node(&mut self, type_label: &str) -> Result<AtomId, GraphError> {
        self.add_atom(AtomKind::Node, type_label, &[], None)
    }

    /// Adds an edge over existing atoms (nodes or edges).
    pub fn add_edge(
        &mut self,
        type_label: &str,
        targets: &[AtomId],
        tv: Option<EvidenceTv>,
    ) -> Result<AtomId, GraphError> {
        self.add_atom(AtomKind::Edge, type_label, targets, tv)
    }

    /// Inserts an atom. Nodes must have no targets; edges at least one, all
    /// existing. Symmetric-relation edges get canonical target order.
    pub fn add_atom(
        &mut self,
        kind: AtomKind,
        type_label: &str,
        targets: &[AtomId],
        tv: Option<EvidenceTv>,
    ) -> Result<AtomId, GraphError> {
        validate_label(type_label)?;
        match kind {
            AtomKind::Node if !targets.is_empty() => {
                return Err(GraphError::ArityViolation(targets.len()))
            }
            AtomKind::Edge if targets.is_empty() => return Err(GraphError::EmptyEdge),
            _ => {}
        }
        for t in targets {
            if !self.atoms.contains_key(t) {
                return Err(GraphError::DanglingTarget(*t));
            }
        }
        let mut targets = targets.to_vec();
        if SYMMETRIC_LABELS.contains(&type_label) {
            targets.sort();
        }
        let id = AtomId(self.next_id);
        self.next_id += 1;
        for t in &targets {
            self.incidence.entry(*t).or_default().insert(id);
        }
        self.atoms.insert(
            id,
            Atom {
                id,
                kind,
                type_label: type_label.to_string(),
                targets,
                tv,
                sti: 0.0,
                lti: 0.0,
            },
        );
        Ok(id)
    }

    /// Removes an atom; rejected while any edge still targets it.
    pub fn remove_atom(&mut self, id: AtomId) -> Result<(), GraphError> {
        if !self.atoms.contains_key(&id) {
            return Err(GraphError::UnknownAtom(id));
        }
        if let Some(edges) = self.incidence.get(&id) {
            if let Some(edge) = edges.iter().next() {
                return Err(GraphError::StillReferenced { atom: id, edge: *edge });
            }
        }
        let atom = self.atoms.remove(&id).expect("checked above");
        for t in &atom.targets {
            if let Some(set) = self.incidence.get_mut(t) {
                set.remove(&id);
                if set.is_empty() {
                    self.incidence.remove(t);
                }
            }
        }
        self.incidence.remove(&id);
        Ok(())
    }

    pub fn set_tv(&mut self, id: AtomId, tv: Option<EvidenceTv>) -> Result<(), GraphError> {
        self.atoms
            .get_mut(&id)
            .map(|a| a.tv = tv)
            .ok_or(GraphError::UnknownAtom(id))
    }

    pub fn set_importance(&mut self, id: AtomId, sti: f64, lti: f64) -> Result<(), GraphError> {
        self.atoms
            .get_mut(&id)
            .map(|a| {
                a.sti = sti;
                a.lti = lti;
            })
            .ok_or(GraphError::UnknownAtom(id))
    }

    /// Edges that directly target `id`.
    pub fn incident_edges(&self, id: AtomId) -> Vec<AtomId> {
        self.incidence
            .get(&id)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    /// Nodes sharing at least one edge with node `id` (excluding `id`).
    pub fn node_neighbors(&self, id: AtomId) -> Vec<AtomId> {
        let mut out = BTreeSet::new();
        if let Some(edges) = self.incidence.get(&id) {
            for e in edges {
                if let Some(edge) = self.atoms.get(e) {
                    for t in &edge.targets {
                        if *t != id {
                            if let Some(a) = self.atoms.get(t) {
                                if a.kind == AtomKind::Node {
                                    out.insert(*t);
                                }
                            }
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// The star of node `n`: `n` plus every node directly linked to it.
    pub fn star(&self, n: AtomId) -> Result<Star, GraphError> {
        match self.atoms.get(&n) {
            Some(a) if a.kind == AtomKind::Node => {}
            _ => return Err(GraphError::UnknownNode(n)),
        }
        let mut members: BTreeSet<AtomId> = self.node_neighbors(n).into_iter().collect();
        members.insert(n);
        Ok(Star { center: n, members })
    }

    /// Intuitionistic negation of the node subset `s`: the complement nodes
    /// plus exactly the edges all of whose targets lie in that complement.
    /// Edges crossing the boundary are dropped, which is why applying the
    /// operation twice does not restore `s`'s induced subgraph.
    pub fn subgraph_negation(
        &self,
        s: &BTreeSet<AtomId>,
    ) -> Result<(BTreeSet<AtomId>, BTreeSet<AtomId>), GraphError> {
        for id in s {
            match self.atoms.get(id) {
                Some(a) if a.kind == AtomKind::Node => {}
                _ => return Err(GraphError::UnknownNode(*id)),
            }
        }
        let nodes: BTreeSet<AtomId> = self
            .atoms
            .values()
            .filter(|a| a.kind == AtomKind::Node && !s.contains(&a.id))
            .map(|a| a.id)
            .collect();
        let edges: BTreeSet<AtomId> = self
            .atoms
            .values()
            .filter(|a| a.kind == AtomKind::Edge && a.targets.iter().all(|t| nodes.contains(t)))
            .map(|a| a.id)
            .collect();
        Ok((nodes, edges))
    }

    /// Checks referential integrity; used by property tests.
    pub fn check_integrity(&self) -> bool {
        self.atoms.values().all(|a| {
            let arity_ok = match a.kind {
                AtomKind::Node => a.targets.is_empty(),
                AtomKind::Edge => !a.targets.is_empty(),
            };
            arity_ok && a.targets.iter().all(|t| self.atoms.contains_key(t))
        }) && self.incidence.iter().all(|(t, es)| {
            es.iter().all(|e| {
                self.atoms
                    .get(e)
                    .map(|a| a.targets.contains(t))
                    .unwrap_or(false)
            })
        })
    }

    /// Crisp distinction-graph view: observations are all nodes; two nodes
    /// are indistinct when a Similarity edge over them is crisp (no tv) or
    /// has strength at least `threshold`.
    pub fn distinction_view(&self, threshold: f64) -> DistinctionGraph {
        let observations: BTreeSet<AtomId> = self.node_ids().into_iter().collect();
        let mut dg = DistinctionGraph::new(observations);
        for atom in self.atoms.values() {
            if atom.kind != AtomKind::Edge || atom.type_label != labels::SIMILARITY {
                continue;
            }
            if atom.targets.len() != 2 {
                continue;
            }
            let (a, b) = (atom.targets[0], atom.targets[1]);
            if a == b || !dg.observations().contains(&a) || !dg.observations().contains(&b) {
                continue;
            }
            let indistinct = match &atom.tv {
                None => true,
                Some(tv) => tv.to_simple().strength() >= threshold,
            };
            if indistinct {
                dg.link(a, b).expect("observations checked");
            }
        }
        dg
    }
}

fn validate_label(label: &str) -> Result<(), GraphError> {
    if label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || c == '(' || c == ')' || c == '#')
    {
        return Err(GraphError::InvalidTypeLabel(label.to_string()));
    }
    Ok(())
}

/// A node plus all nodes it is directly linked to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Star {
    pub center: AtomId,
    pub members: BTreeSet<AtomId>,
}
