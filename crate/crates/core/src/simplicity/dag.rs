//! Decision dags and combinatorial decision dags.
//!
//! A decision dag evaluates an input bit vector by a series of binary tests.
//! Tests either read an input bit directly or branch on the output of
//! another decision dag evaluated on the same input — the recursion that
//! turns plain decision dags into combinatorial ones.

use thiserror::Error;

/// Index of a dag within a [`DagEnv`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DagId(pub usize);

#[derive(Debug, Error, PartialEq)]
pub enum DagError {
    #[error("input index {0} out of range for input of length {1}")]
    IndexOutOfRange(usize, usize),
    #[error("referenced dag {0:?} is not in the environment")]
    UnresolvedDagRef(DagId),
    #[error("dag reference cycle through {0:?}")]
    CyclicDagRef(DagId),
    #[error("child index {child} does not follow parent {parent}")]
    ChildOrder { parent: usize, child: usize },
    #[error("dag has no nodes")]
    Empty,
}

/// What a branch node tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DagTest {
    /// An input bit.
    Input(usize),
    /// The output of another dag on the same input; branches on nonzero.
    SubDag(DagId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DagNode {
    Leaf(u64),
    Branch { test: DagTest, low: usize, high: usize },
}

/// A rooted decision dag. Node 0 is the root; children always point to
/// higher indices, so the structure is acyclic by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionDag {
    nodes: Vec<DagNode>,
}

impl DecisionDag {
    /// Constant dag: one leaf.
    pub fn leaf(value: u64) -> Self {
        Self { nodes: vec![DagNode::Leaf(value)] }
    }

    /// Validates the topological child order.
    pub fn new(nodes: Vec<DagNode>) -> Result<Self, DagError> {
        if nodes.is_empty() {
            return Err(DagError::Empty);
        }
        for (i, node) in nodes.iter().enumerate() {
            if let DagNode::Branch { low, high, .. } = node {
                for &child in [low, high] {
                    if child <= i || child >= nodes.len() {
                        return Err(DagError::ChildOrder { parent: i, child });
                    }
                }
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    /// Node count; the size simplicity of the dag.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }
}

/// Size simplicity measure of a dag.
pub fn dag_size_simplicity(d: &DecisionDag) -> f64 {
    d.size() as f64
}

/// An environment of dags resolvable by [`DagId`].
#[derive(Clone, Debug, Default)]
pub struct DagEnv {
    dags: Vec<DecisionDag>,
}

impl DagEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, dag: DecisionDag) -> DagId {
        self.dags.push(dag);
        DagId(self.dags.len() - 1)
    }

    pub fn get(&self, id: DagId) -> Option<&DecisionDag> {
        self.dags.get(id.0)
    }

    /// Evaluates a dag in this environment on an input bit vector.
    pub fn eval(&self, id: DagId, input: &[bool]) -> Result<u64, DagError> {
        let mut stack = Vec::new();
        self.eval_inner(id, input, &mut stack)
    }

    fn eval_inner(&self, id: DagId, input: &[bool], stack: &mut Vec<DagId>) -> Result<u64, DagError> {
        if stack.contains(&id) {
            return Err(DagError::CyclicDagRef(id));
        }
        let dag = self.get(id).ok_or(DagError::UnresolvedDagRef(id))?;
        stack.push(id);
        let mut at = 0usize;
        let out = loop {
            match &dag.nodes[at] {
                DagNode::Leaf(v) => break *v,
                DagNode::Branch { test, low, high } => {
                    let taken = match test {
                        DagTest::Input(i) => *input
                            .get(*i)
                            .ok_or(DagError::IndexOutOfRange(*i, input.len()))?,
                        DagTest::SubDag(sub) => self.eval_inner(*sub, input, stack)? != 0,
                    };
                    at = if taken { *high } else { *low };
                }
            }
        };
        stack.pop();
        Ok(out)
    }
}

/// Evaluates a standalone dag (no sub-dag references).
pub fn eval_dag(dag: &DecisionDag, input: &[bool]) -> Result<u64, DagError> {
    let mut env = DagEnv::new();
    let id = env.insert(dag.clone());
    env.eval(id, input)
}

/// A two-input XOR dag, used across the tests as the canonical example.
pub fn xor_dag() -> DecisionDag {
    DecisionDag::new(vec![
        DagNode::Branch { test: DagTest::Input(0), low: 1, high: 2 },
        DagNode::Branch { test: DagTest::Input(1), low: 3, high: 4 },
        DagNode::Branch { test: DagTest::Input(1), low: 4, high: 3 },
        DagNode::Leaf(0),
        DagNode::Leaf(1),
    ])
    .expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_dag_ignores_input() {
        let d = DecisionDag::leaf(7);
        assert_eq!(eval_dag(&d, &[]).unwrap(), 7);
        assert_eq!(eval_dag(&d, &[true, false]).unwrap(), 7);
        assert_eq!(dag_size_simplicity(&d), 1.0);
    }

    #[test]
    fn xor_truth_table() {
        let d = xor_dag();
        let mut outs = Vec::new();
        for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
            outs.push(eval_dag(&d, &[a, b]).unwrap());
        }
        assert_eq!(outs, vec![0, 1, 1, 0]);
    }

    #[test]
    fn codd_referencing_xor_matches_composed_function() {
        // Main dag: if xor(b0, b1) then bit 2 else not bit 2 — i.e.
        // xor(b0, b1) == b2 ... enumerated against the composed closure.
        let mut env = DagEnv::new();
        let xor = env.insert(xor_dag());
        let main = env
            .insert(
                DecisionDag::new(vec![
                    DagNode::Branch { test: DagTest::SubDag(xor), low: 1, high: 2 },
                    DagNode::Branch { test: DagTest::Input(2), low: 4, high: 3 },
                    DagNode::Branch { test: DagTest::Input(2), low: 3, high: 4 },
                    DagNode::Leaf(0),
                    DagNode::Leaf(1),
                ])
                .unwrap(),
            );
        for bits in 0..8u32 {
            let input = [(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0];
            let expect = ((input[0] ^ input[1]) == input[2]) as u64;
            assert_eq!(env.eval(main, &input).unwrap(), expect, "input {input:?}");
        }
    }

    #[test]
    fn unresolved_and_cyclic_refs() {
        let mut env = DagEnv::new();
        let d = DecisionDag::new(vec![
            DagNode::Branch { test: DagTest::SubDag(DagId(1)), low: 1, high: 2 },
            DagNode::Leaf(0),
            DagNode::Leaf(1),
        ])
        .unwrap();
        let id = env.insert(d);
        assert_eq!(env.eval(id, &[]).unwrap_err(), DagError::UnresolvedDagRef(DagId(1)));

        // Self-referencing dag: cycle.
        let mut env2 = DagEnv::new();
        let selfref = DecisionDag::new(vec![
            DagNode::Branch { test: DagTest::SubDag(DagId(0)), low: 1, high: 2 },
            DagNode::Leaf(0),
            DagNode::Leaf(1),
        ])
        .unwrap();
        let id2 = env2.insert(selfref);
        assert_eq!(env2.eval(id2, &[]).unwrap_err(), DagError::CyclicDagRef(DagId(0)));
    }

    #[test]
    fn input_index_out_of_range() {
        let d = xor_dag();
        assert_eq!(eval_dag(&d, &[true]).unwrap_err(), DagError::IndexOutOfRange(1, 1));
    }

    #[test]
    fn child_order_validated() {
        let bad = DecisionDag::new(vec![
            DagNode::Branch { test: DagTest::Input(0), low: 0, high: 1 },
            DagNode::Leaf(0),
        ]);
        assert_eq!(bad.unwrap_err(), DagError::ChildOrder { parent: 0, child: 0 });
    }
}
