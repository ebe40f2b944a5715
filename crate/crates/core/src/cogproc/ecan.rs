//! Economic attention spreading over the metagraph.
//!
//! Each iteration is one greedy stage of the attention decision process:
//! every node sends a fraction of its short-term importance, split equally
//! among the nodes it shares an edge with; then decay is applied and the
//! whole importance vector is rescaled so total STI is conserved exactly.
//! Long-term importance tracks STI as an exponential moving average with the
//! decay rate. Edge atoms hold their importance (they are conduits, not
//! spreaders); the spreading topology is node adjacency via shared edges.

use std::collections::BTreeMap;

use super::CogprocError;
use crate::metagraph::{AtomId, AtomKind, Metagraph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcanParams {
    /// Fraction of a node's STI sent out per iteration, in (0, 1].
    pub spread_fraction: f64,
    /// Decay rate in [0, 1); also the LTI moving-average rate.
    pub decay: f64,
    pub iterations: usize,
    pub focus_threshold: f64,
}

impl Default for EcanParams {
    fn default() -> Self {
        Self { spread_fraction: 0.5, decay: 0.0, iterations: 1, focus_threshold: 1.0 }
    }
}

impl EcanParams {
    fn validate(&self) -> Result<(), CogprocError> {
        if !(self.spread_fraction > 0.0 && self.spread_fraction <= 1.0) {
            return Err(CogprocError::BadParameter {
                name: "spread_fraction",
                value: self.spread_fraction,
                range: "(0, 1]",
            });
        }
        if !(0.0..1.0).contains(&self.decay) {
            return Err(CogprocError::BadParameter {
                name: "decay",
                value: self.decay,
                range: "[0, 1)",
            });
        }
        Ok(())
    }
}

/// Runs the spreading iterations in place and returns the updated
/// `(atom, sti, lti)` snapshot in id order.
pub fn ecan_spread(
    g: &mut Metagraph,
    params: &EcanParams,
) -> Result<Vec<(AtomId, f64, f64)>, CogprocError> {
    params.validate()?;
    let ids: Vec<AtomId> = g.atoms().map(|a| a.id).collect();
    if ids.iter().any(|&id| {
        let a = g.get(id).expect("listed");
        !(a.sti.is_finite() && a.lti.is_finite())
    }) {
        return Err(CogprocError::NonFiniteImportance);
    }
    let node_ids: Vec<AtomId> = g.node_ids();
    let neighbors: BTreeMap<AtomId, Vec<AtomId>> = node_ids
        .iter()
        .map(|&n| (n, g.node_neighbors(n)))
        .collect();

    let mut sti: BTreeMap<AtomId, f64> =
        ids.iter().map(|&id| (id, g.get(id).expect("listed").sti)).collect();
    let mut lti: BTreeMap<AtomId, f64> =
        ids.iter().map(|&id| (id, g.get(id).expect("listed").lti)).collect();

    for _ in 0..params.iterations {
        let total_before: f64 = sti.values().sum();

        // Spread between nodes; isolated nodes keep their STI.
        let mut next = sti.clone();
        for &n in &node_ids {
            let out = &neighbors[&n];
            if out.is_empty() {
                continue;
            }
            let sent = params.spread_fraction * sti[&n];
            let share = sent / out.len() as f64;
            *next.get_mut(&n).expect("node") -= sent;
            for m in out {
                *next.get_mut(m).expect("node") += share;
            }
        }

        // Decay, then rescale so the total is conserved exactly.
        if params.decay > 0.0 {
            for v in next.values_mut() {
                *v *= 1.0 - params.decay;
            }
        }
        let total_after: f64 = next.values().sum();
        if total_before != 0.0 && total_after != 0.0 {
            let scale = total_before / total_after;
            for v in next.values_mut() {
                *v *= scale;
            }
        }
        sti = next;

        // LTI: exponential moving average of STI at the decay rate.
        if params.decay > 0.0 {
            for (&id, l) in lti.iter_mut() {
                *l = (1.0 - params.decay) * *l + params.decay * sti[&id];
            }
        }
    }

    let mut out = Vec::with_capacity(ids.len());
    for &id in &ids {
        g.set_importance(id, sti[&id], lti[&id]).expect("listed");
        out.push((id, sti[&id], lti[&id]));
    }
    Ok(out)
}

/// Atoms with STI at or above the threshold, highest first (ties by id).
pub fn attentional_focus(g: &Metagraph, threshold: f64) -> Vec<AtomId> {
    let mut hot: Vec<(AtomId, f64)> = g
        .atoms()
        .filter(|a| a.sti >= threshold)
        .map(|a| (a.id, a.sti))
        .collect();
    hot.sort_by(|(ia, sa), (ib, sb)| sb.partial_cmp(sa).expect("finite").then(ia.cmp(ib)));
    hot.into_iter().map(|(id, _)| id).collect()
}

/// Node-only complete graph on `n` vertices, linked with Similarity edges.
pub fn complete_graph(n: usize) -> (Metagraph, Vec<AtomId>) {
    let mut g = Metagraph::new();
    let nodes: Vec<AtomId> = (0..n)
        .map(|_| g.add_node(crate::metagraph::labels::OBSERVATION).expect("valid label"))
        .collect();
    for i in 0..n {
        for j in (i + 1)..n {
            g.add_edge(crate::metagraph::labels::SIMILARITY, &[nodes[i], nodes[j]], None)
                .expect("nodes exist");
        }
    }
    (g, nodes)
}
