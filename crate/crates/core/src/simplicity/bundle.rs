//! Simplicity bundles: Pareto frontiers over several simplicity measures.
//!
//! A single entity rarely has one best description: a decomposition cheap
//! under a size-like measure may be expensive under a runtime-like measure.
//! [`simplicity_bundle`] enumerates decomposition trees up to a depth bound,
//! prices each tree under every supplied cost model, and keeps the
//! Pareto-optimal cost vectors.

use super::system::{CombinationSystem, EntityId};

/// One simplicity measure over a combination system: a base cost per entity
/// (taken when the entity is used as a leaf) and a cost per production.
#[derive(Clone, Debug, PartialEq)]
pub struct CostModel {
    pub name: String,
    pub base: Vec<f64>,
    pub production_cost: Vec<f64>,
}

impl CostModel {
    /// The system's own costs as a measure.
    pub fn primary(sys: &CombinationSystem) -> Self {
        Self {
            name: "primary".to_string(),
            base: sys.base_costs().to_vec(),
            production_cost: sys.productions().iter().map(|p| p.cost).collect(),
        }
    }

    /// Description size: every leaf and every production costs 1.
    pub fn size(sys: &CombinationSystem) -> Self {
        Self {
            name: "size".to_string(),
            base: vec![1.0; sys.num_entities()],
            production_cost: vec![1.0; sys.productions().len()],
        }
    }
}

/// A set of mutually Pareto-incomparable simplicity vectors, one coordinate
/// per measure, sorted lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicityBundle {
    pub measures: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
}

impl SimplicityBundle {
    /// Antichain property: no vector coordinatewise-dominates another.
    pub fn is_antichain(&self) -> bool {
        for (i, v) in self.vectors.iter().enumerate() {
            for (j, w) in self.vectors.iter().enumerate() {
                if i != j && dominates(v, w) {
                    return false;
                }
            }
        }
        true
    }
}

/// `v` dominates `w`: no coordinate worse, at least one strictly better.
fn dominates(v: &[f64], w: &[f64]) -> bool {
    v.iter().zip(w).all(|(a, b)| a <= b) && v.iter().zip(w).any(|(a, b)| a < b)
}

/// Keeps the non-dominated, deduplicated vectors, sorted lexicographically.
fn pareto_filter(mut vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    vectors.retain(|v| v.iter().all(|c| c.is_finite()));
    vectors.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    vectors.dedup();
    let keep: Vec<Vec<f64>> = vectors
        .iter()
        .filter(|v| !vectors.iter().any(|w| dominates(w, v)))
        .cloned()
        .collect();
    keep
}

/// Enumerates decomposition trees of `x` to depth `max_depth` and returns
/// the Pareto frontier of their cost vectors under `measures`. Dominated
/// partial results are pruned during the recursion, which preserves the
/// frontier because tree costs add coordinatewise.
pub fn simplicity_bundle(
    sys: &CombinationSystem,
    x: EntityId,
    measures: &[CostModel],
    max_depth: usize,
) -> SimplicityBundle {
    assert!(!measures.is_empty(), "at least one measure required");
    let mut memo: Vec<Vec<Option<Vec<Vec<f64>>>>> =
        vec![vec![None; max_depth + 1]; sys.num_entities()];
    let vectors = frontier(sys, x, measures, max_depth, &mut memo);
    SimplicityBundle {
        measures: measures.iter().map(|m| m.name.clone()).collect(),
        vectors,
    }
}

fn frontier(
    sys: &CombinationSystem,
    x: EntityId,
    measures: &[CostModel],
    depth: usize,
    memo: &mut Vec<Vec<Option<Vec<Vec<f64>>>>>,
) -> Vec<Vec<f64>> {
    if let Some(v) = &memo[x.0][depth] {
        return v.clone();
    }
    let mut vectors: Vec<Vec<f64>> = vec![measures.iter().map(|m| m.base[x.0]).collect()];
    if depth > 0 {
        for &pi in sys.producers_of(x) {
            let p = &sys.productions()[pi];
            let lefts = frontier(sys, p.left, measures, depth - 1, memo);
            let rights = frontier(sys, p.right, measures, depth - 1, memo);
            for l in &lefts {
                for r in &rights {
                    let v: Vec<f64> = measures
                        .iter()
                        .enumerate()
                        .map(|(m, model)| l[m] + r[m] + model.production_cost[pi])
                        .collect();
                    vectors.push(v);
                }
            }
        }
    }
    let result = pareto_filter(vectors);
    memo[x.0][depth] = Some(result.clone());
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive tree enumeration without Pareto pruning; the oracle for
    /// the memoized frontier.
    fn all_tree_vectors(
        sys: &CombinationSystem,
        x: EntityId,
        measures: &[CostModel],
        depth: usize,
    ) -> Vec<Vec<f64>> {
        let mut out = vec![measures.iter().map(|m| m.base[x.0]).collect::<Vec<f64>>()];
        if depth > 0 {
            for &pi in sys.producers_of(x) {
                let p = &sys.productions()[pi];
                for l in all_tree_vectors(sys, p.left, measures, depth - 1) {
                    for r in all_tree_vectors(sys, p.right, measures, depth - 1) {
                        out.push(
                            measures
                                .iter()
                                .enumerate()
                                .map(|(m, model)| l[m] + r[m] + model.production_cost[pi])
                                .collect(),
                        );
                    }
                }
            }
        }
        out
    }

    fn two_route_system() -> CombinationSystem {
        // Two routes to x: a cheap-primary/expensive-size one and the
        // converse, so the measures conflict.
        let mut b = CombinationSystem::builder();
        let a = b.entity("a", 1.0).unwrap();
        let c = b.entity("c", 4.0).unwrap();
        let x = b.entity("x", 100.0).unwrap();
        b.production(0, a, a, x, 10.0).unwrap(); // primary 12, size 3
        b.production(1, c, c, x, 0.0).unwrap(); // primary 8, size 3
        b.build()
    }

    #[test]
    fn dominating_decomposition_gives_singleton_bundle() {
        let mut b = CombinationSystem::builder();
        let a = b.entity("a", 1.0).unwrap();
        let x = b.entity("x", 100.0).unwrap();
        b.production(0, a, a, x, 1.0).unwrap();
        let sys = b.build();
        // Describing x primitively is large under both measures, so the
        // composed route dominates and the frontier is a single vector.
        let mut size = CostModel::size(&sys);
        size.base[x.0] = 10.0;
        let measures = [CostModel::primary(&sys), size];
        let bundle = simplicity_bundle(&sys, x, &measures, 4);
        assert_eq!(bundle.vectors, vec![vec![3.0, 3.0]]);
        assert!(bundle.is_antichain());
    }

    #[test]
    fn conflicting_measures_give_a_real_frontier() {
        let sys = two_route_system();
        let x = sys.entity("x").unwrap();
        // Under primary alone route 1 wins; make size disagree by
        // weighting leaves unevenly.
        let mut size = CostModel::size(&sys);
        size.base[sys.entity("c").unwrap().0] = 5.0;
        let measures = [CostModel::primary(&sys), size];
        let bundle = simplicity_bundle(&sys, x, &measures, 4);
        assert!(bundle.vectors.len() >= 2, "bundle {:?}", bundle.vectors);
        assert!(bundle.is_antichain());
        // Equals the Pareto filter of the exhaustive scan.
        let oracle = pareto_filter(all_tree_vectors(&sys, x, &measures, 4));
        assert_eq!(bundle.vectors, oracle);
    }

    #[test]
    fn memoized_frontier_matches_exhaustive_scan_on_deep_system() {
        let mut b = CombinationSystem::builder();
        let a = b.entity("a", 1.0).unwrap();
        let bb = b.entity("b", 2.0).unwrap();
        let ab = b.entity("ab", 5.0).unwrap();
        let abab = b.entity("abab", 20.0).unwrap();
        b.production(0, a, bb, ab, 0.5).unwrap();
        b.production(0, ab, ab, abab, 1.0).unwrap();
        b.production(1, a, a, ab, 3.0).unwrap();
        let sys = b.build();
        let measures = [CostModel::primary(&sys), CostModel::size(&sys)];
        for depth in 0..=4 {
            let bundle = simplicity_bundle(&sys, abab, &measures, depth);
            let oracle = pareto_filter(all_tree_vectors(&sys, abab, &measures, depth));
            assert_eq!(bundle.vectors, oracle, "depth {depth}");
            assert!(bundle.is_antichain());
        }
    }
}
