//! Pattern intensity, the subpattern relation, and its order structure.
//!
//! A decomposition `x in op(y, z)` is a pattern in `x` when producing `x`
//! from the pair is cheaper than `x`'s own reference simplicity:
//!
//! ```text
//! I(y,z -> x | w) = (sigma1(x|w) - h) / sigma1(x|w),
//! h = sigma1(y|w) + sigma1(z|w) + cost(op, y, z)
//! ```
//!
//! `sigma1` is the reference-vocabulary simplicity (see
//! [`CombinationSystem::reference_sigma`]); the pair is a pattern when the
//! intensity is strictly positive. The subpattern relation `x <= y` holds
//! when some partner `z` makes `(x, z)` a pattern in `y` (plus reflexivity
//! by definition), and under approximately cost-associative operators it is
//! approximately transitive.

use std::collections::BTreeSet;

use super::system::{CombinationSystem, EntityId, SimplicityAssignment};
use super::SimplicityError;

/// A scored decomposition: applying `op` to `(y, z)` yields `x` with the
/// given intensity. A pattern iff `intensity > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternRecord {
    pub y: EntityId,
    pub z: EntityId,
    pub op: usize,
    pub x: EntityId,
    pub intensity: f64,
    pub context: BTreeSet<EntityId>,
}

impl PatternRecord {
    pub fn is_pattern(&self) -> bool {
        self.intensity > 0.0
    }
}

/// Intensity of the decomposition `x in op(y, z)` under a precomputed
/// reference sigma. Total: returns `-inf` where the quotient is undefined
/// (zero or infinite target simplicity, infinite part cost).
fn intensity_raw(
    sys: &CombinationSystem,
    sigma1: &SimplicityAssignment,
    op: usize,
    y: EntityId,
    z: EntityId,
    x: EntityId,
) -> f64 {
    let target = sigma1.get(x);
    if !(target.is_finite() && target > 0.0) {
        return f64::NEG_INFINITY;
    }
    let cost = match sys.production_for(op, y, z) {
        Some(p) if p.outputs.contains(&x) => p.cost,
        _ => return f64::NEG_INFINITY,
    };
    let h = sigma1.get(y) + sigma1.get(z) + cost;
    if !h.is_finite() {
        return f64::NEG_INFINITY;
    }
    (target - h) / target
}

/// Normalized simplicity savings of producing `x` by `op(y, z)` in context
/// `w` (context entities are free).
pub fn pattern_intensity(
    sys: &CombinationSystem,
    x: EntityId,
    y: EntityId,
    z: EntityId,
    op: usize,
    context: &BTreeSet<EntityId>,
) -> Result<PatternRecord, SimplicityError> {
    match sys.production_for(op, y, z) {
        Some(p) if p.outputs.contains(&x) => {}
        _ => {
            return Err(SimplicityError::NotAProduction {
                op,
                y: sys.name(y).to_string(),
                z: sys.name(z).to_string(),
                x: sys.name(x).to_string(),
            })
        }
    }
    let sigma1 = sys.reference_sigma(context)?;
    let target = sigma1.get(x);
    if target == 0.0 {
        return Err(SimplicityError::ZeroSimplicity(sys.name(x).to_string()));
    }
    if target.is_infinite() {
        return Err(SimplicityError::InfiniteSimplicity(sys.name(x).to_string()));
    }
    Ok(PatternRecord {
        y,
        z,
        op,
        x,
        intensity: intensity_raw(sys, &sigma1, op, y, z, x),
        context: context.clone(),
    })
}

/// Best intensity over all ways `x` can serve as one argument of a
/// production yielding `y` (either argument position, any operator and
/// partner). `-inf` when no production applies.
pub(crate) fn best_intensity(
    sys: &CombinationSystem,
    sigma1: &SimplicityAssignment,
    x: EntityId,
    y: EntityId,
) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &pi in sys.producers_of(y) {
        let p = &sys.productions()[pi];
        if p.left == x {
            best = best.max(intensity_raw(sys, sigma1, p.op, p.left, p.right, y));
        }
        if p.right == x {
            best = best.max(intensity_raw(sys, sigma1, p.op, p.left, p.right, y));
        }
    }
    best
}

/// The compositional subpattern relation: `x <= y` iff some partner makes
/// `(x, partner)` a pattern in `y`. Reflexive by definition. Returns the
/// relation verdict and the best intensity found (`-inf` when no production
/// involves `x` in building `y`).
pub fn subpattern_leq(
    sys: &CombinationSystem,
    x: EntityId,
    y: EntityId,
) -> Result<(bool, f64), SimplicityError> {
    let sigma1 = sys.reference_sigma(&BTreeSet::new())?;
    let best = best_intensity(sys, &sigma1, x, y);
    if x == y {
        return Ok((true, best));
    }
    Ok((best > 0.0, best))
}

/// Transitive-reduction dag of the strict subpattern relation.
#[derive(Clone, Debug, PartialEq)]
pub struct SubpatternHierarchy {
    pub num_entities: usize,
    /// Edges `x -> y` with no intermediate `u`, `x <= u <= y`.
    pub edges: Vec<(EntityId, EntityId)>,
}

impl SubpatternHierarchy {
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over the edge list.
        let mut indeg = vec![0usize; self.num_entities];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_entities];
        for (x, y) in &self.edges {
            indeg[y.0] += 1;
            out[x.0].push(y.0);
        }
        let mut queue: Vec<usize> = (0..self.num_entities).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for &j in &out[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
        seen == self.num_entities
    }

    /// Longest path length (edge count); 0 for an edgeless hierarchy.
    pub fn depth(&self) -> usize {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.num_entities];
        for (x, y) in &self.edges {
            out[x.0].push(y.0);
        }
        let mut memo = vec![None; self.num_entities];
        fn longest(i: usize, out: &[Vec<usize>], memo: &mut [Option<usize>]) -> usize {
            if let Some(v) = memo[i] {
                return v;
            }
            let v = out[i].iter().map(|&j| 1 + longest(j, out, memo)).max().unwrap_or(0);
            memo[i] = Some(v);
            v
        }
        (0..self.num_entities)
            .map(|i| longest(i, &out, &mut memo))
            .max()
            .unwrap_or(0)
    }
}

/// Builds the subpattern hierarchy: strict relation edges minus edges with
/// an intermediate entity between the endpoints.
pub fn subpattern_hierarchy(sys: &CombinationSystem) -> Result<SubpatternHierarchy, SimplicityError> {
    let n = sys.num_entities();
    let sigma1 = sys.reference_sigma(&BTreeSet::new())?;
    let mut leq = vec![vec![false; n]; n];
    for x in sys.entity_ids() {
        for y in sys.entity_ids() {
            if x != y {
                leq[x.0][y.0] = best_intensity(sys, &sigma1, x, y) > 0.0;
            }
        }
    }
    let mut edges = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if !leq[x][y] {
                continue;
            }
            let covered = (0..n).any(|u| u != x && u != y && leq[x][u] && leq[u][y]);
            if !covered {
                edges.push((EntityId(x), EntityId(y)));
            }
        }
    }
    Ok(SubpatternHierarchy { num_entities: n, edges })
}

/// Result of the cost-associativity scan.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociativityReport {
    /// Max over argument triples of |C1 - C2|, where C1 prices building the
    /// triple right-associated and C2 left-associated (minimum over operator
    /// pairs each).
    pub max_deviation: f64,
    /// Triples where both association orders were defined.
    pub comparable_triples: usize,
}

/// Verifies mutual associativity on the operator domain and measures the
/// cost-associativity deviation. Association orders are compared only where
/// both sides are defined (partial operators).
pub fn check_approx_cost_associativity(
    sys: &CombinationSystem,
) -> Result<AssociativityReport, SimplicityError> {
    let ids: Vec<EntityId> = sys.entity_ids().collect();
    // Mutual associativity: op_i(op_j(x,y), z) == op_j(x, op_i(y,z))
    // as output sets, wherever both sides are nonempty.
    for i in 0..sys.num_ops() {
        for j in 0..sys.num_ops() {
            for &x in &ids {
                for &y in &ids {
                    for &z in &ids {
                        let lhs: BTreeSet<EntityId> = sys
                            .apply(j, x, y)
                            .iter()
                            .flat_map(|&v| sys.apply(i, v, z).iter().copied())
                            .collect();
                        let rhs: BTreeSet<EntityId> = sys
                            .apply(i, y, z)
                            .iter()
                            .flat_map(|&w| sys.apply(j, x, w).iter().copied())
                            .collect();
                        if !lhs.is_empty() && !rhs.is_empty() && lhs != rhs {
                            return Err(SimplicityError::NotMutuallyAssociative {
                                i,
                                j,
                                x: sys.name(x).to_string(),
                                y: sys.name(y).to_string(),
                                z: sys.name(z).to_string(),
                            });
                        }
                    }
                }
            }
        }
    }

    let mut max_deviation: f64 = 0.0;
    let mut comparable = 0usize;
    for &x in &ids {
        for &y in &ids {
            for &z in &ids {
                let mut c1 = f64::INFINITY;
                let mut c2 = f64::INFINITY;
                for i in 0..sys.num_ops() {
                    // Right association: w = op_i(y, z), then op_j(x, w).
                    if let Some(p1) = sys.production_for(i, y, z) {
                        for &w in &p1.outputs {
                            for j in 0..sys.num_ops() {
                                if let Some(p2) = sys.production_for(j, x, w) {
                                    c1 = c1.min(p1.cost + p2.cost);
                                }
                            }
                        }
                    }
                    // Left association: v = op_j(x, y), then op_i(v, z).
                    for j in 0..sys.num_ops() {
                        if let Some(p1) = sys.production_for(j, x, y) {
                            for &v in &p1.outputs {
                                if let Some(p2) = sys.production_for(i, v, z) {
                                    c2 = c2.min(p1.cost + p2.cost);
                                }
                            }
                        }
                    }
                }
                if c1.is_finite() && c2.is_finite() {
                    comparable += 1;
                    max_deviation = max_deviation.max((c1 - c2).abs());
                }
            }
        }
    }
    Ok(AssociativityReport { max_deviation, comparable_triples: comparable })
}

/// A counterexample to the approximate partial order.
#[derive(Clone, Debug, PartialEq)]
pub enum OrderViolation {
    /// Distinct entities below each other.
    Antisymmetry { x: EntityId, y: EntityId },
    /// A chain `x <= y <= z` whose best composed intensity fell below `-c`.
    Transitivity { x: EntityId, y: EntityId, z: EntityId, best: f64 },
}

/// Outcome of the approximate-partial-order check at bound `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderCheck {
    pub holds: bool,
    pub violation: Option<OrderViolation>,
    /// Strict relation pairs found.
    pub relation_size: usize,
    /// Chains `x <= y <= z` examined for the transitivity bound.
    pub chains_checked: usize,
}

/// Exhaustively verifies that the strict subpattern relation is an
/// approximate partial order at bound `c`: antisymmetry for distinct
/// entities, and `max_w I(x,w -> z) >= -c` for every chain `x <= y <= z` of
/// distinct entities.
pub fn check_approx_partial_order(
    sys: &CombinationSystem,
    c: f64,
) -> Result<OrderCheck, SimplicityError> {
    let n = sys.num_entities();
    let sigma1 = sys.reference_sigma(&BTreeSet::new())?;
    let mut leq = vec![vec![false; n]; n];
    let mut relation_size = 0usize;
    for x in 0..n {
        for y in 0..n {
            if x != y && best_intensity(sys, &sigma1, EntityId(x), EntityId(y)) > 0.0 {
                leq[x][y] = true;
                relation_size += 1;
            }
        }
    }
    for x in 0..n {
        for y in (x + 1)..n {
            if leq[x][y] && leq[y][x] {
                return Ok(OrderCheck {
                    holds: false,
                    violation: Some(OrderViolation::Antisymmetry {
                        x: EntityId(x),
                        y: EntityId(y),
                    }),
                    relation_size,
                    chains_checked: 0,
                });
            }
        }
    }
    let mut chains = 0usize;
    for x in 0..n {
        for y in 0..n {
            if !leq[x][y] {
                continue;
            }
            for z in 0..n {
                if z == x || z == y || !leq[y][z] {
                    continue;
                }
                chains += 1;
                let best = best_intensity(sys, &sigma1, EntityId(x), EntityId(z));
                if !(best >= -c) {
                    return Ok(OrderCheck {
                        holds: false,
                        violation: Some(OrderViolation::Transitivity {
                            x: EntityId(x),
                            y: EntityId(y),
                            z: EntityId(z),
                            best,
                        }),
                        relation_size,
                        chains_checked: chains,
                    });
                }
            }
        }
    }
    Ok(OrderCheck { holds: true, violation: None, relation_size, chains_checked: chains })
}
