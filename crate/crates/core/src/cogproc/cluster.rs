//! Agglomerative clustering as a greedy decision process.
//!
//! The state is a partition of the points, an action merges two clusters,
//! and the immediate reward is the negated increase of the objective (the
//! sum of within-cluster pairwise Euclidean distances). Running the greedy
//! DDS executor at temperature zero therefore reproduces classic
//! minimum-cost agglomerative merging. The resulting clusters are written
//! into the metagraph as Concept nodes with one Member edge per point.

use std::collections::BTreeMap;

use super::CogprocError;
use crate::decision::{run_greedy, Dds};
use crate::metagraph::{labels, AtomId, Metagraph};

/// Stopping rule: a target cluster count, or a merge-cost ceiling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClusterStop {
    NumClusters(usize),
    /// Merge while the cheapest merge adds at most this much objective.
    StopDistance(f64),
}

/// The clustering outcome: per-point assignments plus the atoms created.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterModel {
    /// Observation node per input point, in input order.
    pub point_atoms: Vec<AtomId>,
    /// Point atom -> cluster index.
    pub assignments: BTreeMap<AtomId, usize>,
    /// Concept node per cluster.
    pub concept_atoms: Vec<AtomId>,
    /// Member edges created, one per point.
    pub member_edges: Vec<AtomId>,
    /// Final objective: sum of within-cluster pairwise distances.
    pub objective: f64,
    /// Clusters as sorted point-index lists.
    pub clusters: Vec<Vec<usize>>,
}

/// Canonical partition: clusters sorted internally and by first element.
type Partition = Vec<Vec<usize>>;

fn canonical(mut partition: Partition) -> Partition {
    for cluster in &mut partition {
        cluster.sort_unstable();
    }
    partition.sort();
    partition
}

/// The merge process as a DDS: one stage per merge down to `target`.
struct MergeDds<'a> {
    distances: &'a Vec<Vec<f64>>,
    num_points: usize,
    target: usize,
}

fn merge_cost(distances: &[Vec<f64>], a: &[usize], b: &[usize]) -> f64 {
    let mut cost = 0.0;
    for &p in a {
        for &q in b {
            cost += distances[p][q];
        }
    }
    cost
}

impl Dds for MergeDds<'_> {
    type State = Partition;
    type Action = (usize, usize); // cluster indices, i < j

    fn horizon(&self) -> usize {
        self.num_points - self.target
    }

    fn initial_state(&self) -> Partition {
        (0..self.num_points).map(|i| vec![i]).collect()
    }

    fn feasible_actions(&self, _stage: usize, state: &Partition) -> Vec<(usize, usize)> {
        let mut acts = Vec::new();
        for i in 0..state.len() {
            for j in (i + 1)..state.len() {
                acts.push((i, j));
            }
        }
        acts
    }

    fn reward(&self, _stage: usize, state: &Partition, &(i, j): &(usize, usize)) -> f64 {
        -merge_cost(self.distances, &state[i], &state[j])
    }

    fn outcomes(&self, _stage: usize, state: &Partition, &(i, j): &(usize, usize)) -> Vec<(Partition, f64)> {
        let mut next: Partition = Vec::with_capacity(state.len() - 1);
        let mut merged = state[i].clone();
        merged.extend_from_slice(&state[j]);
        for (k, cluster) in state.iter().enumerate() {
            if k != i && k != j {
                next.push(cluster.clone());
            }
        }
        next.push(merged);
        vec![(canonical(next), 1.0)]
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn objective(distances: &[Vec<f64>], partition: &Partition) -> f64 {
    partition
        .iter()
        .map(|cluster| {
            let mut s = 0.0;
            for (a, &p) in cluster.iter().enumerate() {
                for &q in &cluster[a + 1..] {
                    s += distances[p][q];
                }
            }
            s
        })
        .sum()
}

/// Clusters `points` and writes Observation nodes, Concept nodes, and Member
/// edges into `g`.
pub fn agglomerative_cluster(
    points: &[Vec<f64>],
    stop: ClusterStop,
    g: &mut Metagraph,
) -> Result<ClusterModel, CogprocError> {
    if points.is_empty() {
        return Err(CogprocError::EmptyInput);
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(CogprocError::DimensionMismatch);
    }
    let n = points.len();
    let distances: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| euclidean(&points[i], &points[j])).collect())
        .collect();

    let partition: Partition = match stop {
        ClusterStop::NumClusters(k) => {
            if k == 0 || k > n {
                return Err(CogprocError::TooManyClusters { k, n });
            }
            let problem = MergeDds { distances: &distances, num_points: n, target: k };
            // Temperature zero: deterministic cheapest-merge choices; the
            // seed is irrelevant but fixed for the executor signature.
            let trajectory = run_greedy(&problem, 0, 0.0).expect("merges always feasible");
            trajectory.states.last().expect("nonempty").clone()
        }
        ClusterStop::StopDistance(ceiling) => {
            let mut state: Partition = (0..n).map(|i| vec![i]).collect();
            loop {
                if state.len() == 1 {
                    break;
                }
                let mut best: Option<((usize, usize), f64)> = None;
                for i in 0..state.len() {
                    for j in (i + 1)..state.len() {
                        let c = merge_cost(&distances, &state[i], &state[j]);
                        if best.map_or(true, |(_, bc)| c < bc) {
                            best = Some(((i, j), c));
                        }
                    }
                }
                let ((i, j), cost) = best.expect("at least two clusters");
                if cost > ceiling {
                    break;
                }
                let mut merged = state[i].clone();
                merged.extend_from_slice(&state[j]);
                let mut next: Partition = Vec::with_capacity(state.len() - 1);
                for (k2, cluster) in state.iter().enumerate() {
                    if k2 != i && k2 != j {
                        next.push(cluster.clone());
                    }
                }
                next.push(merged);
                state = canonical(next);
            }
            state
        }
    };

    let final_objective = objective(&distances, &partition);

    // Materialize the model in the metagraph.
    let point_atoms: Vec<AtomId> = (0..n)
        .map(|_| g.add_node(labels::OBSERVATION).expect("valid label"))
        .collect();
    let mut concept_atoms = Vec::with_capacity(partition.len());
    let mut member_edges = Vec::new();
    let mut assignments = BTreeMap::new();
    for (ci, cluster) in partition.iter().enumerate() {
        let concept = g.add_node(labels::CONCEPT).expect("valid label");
        concept_atoms.push(concept);
        for &p in cluster {
            let edge = g
                .add_edge(labels::MEMBER, &[point_atoms[p], concept], None)
                .expect("atoms exist");
            member_edges.push(edge);
            assignments.insert(point_atoms[p], ci);
        }
    }
    Ok(ClusterModel {
        point_atoms,
        assignments,
        concept_atoms,
        member_edges,
        objective: final_objective,
        clusters: partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn single_point_single_concept() {
        let mut g = Metagraph::new();
        let model =
            agglomerative_cluster(&[vec![0.5]], ClusterStop::NumClusters(1), &mut g).unwrap();
        assert_eq!(model.concept_atoms.len(), 1);
        assert_eq!(model.member_edges.len(), 1);
        assert_eq!(model.objective, 0.0);
    }

    #[test]
    fn singleton_clusters_have_zero_objective() {
        let points: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let mut g = Metagraph::new();
        let model =
            agglomerative_cluster(&points, ClusterStop::NumClusters(4), &mut g).unwrap();
        assert_eq!(model.clusters.len(), 4);
        assert_eq!(model.objective, 0.0);
    }

    /// Exhaustive 2-partition oracle: best split of the points into two
    /// nonempty clusters by the pairwise-distance objective.
    fn best_two_partition(points: &[Vec<f64>]) -> (f64, Vec<Vec<usize>>) {
        let n = points.len();
        let d: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| euclidean(&points[i], &points[j])).collect())
            .collect();
        let mut best = (f64::INFINITY, Vec::new());
        // Fix point 0 in side A to halve the enumeration.
        for mask in 0..(1u32 << (n - 1)) {
            let mut a = vec![0usize];
            let mut b = Vec::new();
            for p in 1..n {
                if mask & (1 << (p - 1)) != 0 {
                    a.push(p);
                } else {
                    b.push(p);
                }
            }
            if b.is_empty() {
                continue;
            }
            let partition = canonical(vec![a, b]);
            let obj = objective(&d, &partition);
            if obj < best.0 {
                best = (obj, partition);
            }
        }
        best
    }

    #[test]
    fn planted_two_clusters_recovered_exactly() {
        // Two 1-D blobs: 0.00..0.10 and 1.00..1.10, five points each.
        let mut points = Vec::new();
        for i in 0..5 {
            points.push(vec![0.025 * i as f64]);
        }
        for i in 0..5 {
            points.push(vec![1.0 + 0.025 * i as f64]);
        }
        let mut g = Metagraph::new();
        let model =
            agglomerative_cluster(&points, ClusterStop::NumClusters(2), &mut g).unwrap();
        let (oracle_obj, oracle_partition) = best_two_partition(&points);
        assert_eq!(model.clusters, oracle_partition);
        assert!((model.objective - oracle_obj).abs() < 1e-12);
        assert_eq!(model.clusters[0], vec![0, 1, 2, 3, 4]);
        assert_eq!(model.clusters[1], vec![5, 6, 7, 8, 9]);
    }

    #[test]
    fn planted_recovery_over_random_seeds() {
        // Separation at least 5x the within-cluster spread: recovery exact.
        for seed in 0..100u64 {
            let mut stream = crate::rng::substream(0xC1, seed);
            let spread = 0.1;
            let separation = 5.0 * spread + stream.gen_range(0.0..1.0);
            let per_side = 4 + (seed % 3) as usize;
            let mut points = Vec::new();
            for _ in 0..per_side {
                points.push(vec![stream.gen_range(0.0..spread), stream.gen_range(0.0..spread)]);
            }
            for _ in 0..per_side {
                points.push(vec![
                    separation + stream.gen_range(0.0..spread),
                    stream.gen_range(0.0..spread),
                ]);
            }
            let mut g = Metagraph::new();
            let model =
                agglomerative_cluster(&points, ClusterStop::NumClusters(2), &mut g).unwrap();
            let left: Vec<usize> = (0..per_side).collect();
            let right: Vec<usize> = (per_side..2 * per_side).collect();
            assert_eq!(model.clusters, canonical(vec![left, right]), "seed {seed}");
        }
    }

    #[test]
    fn members_written_into_graph() {
        let points = vec![vec![0.0], vec![0.1], vec![5.0]];
        let mut g = Metagraph::new();
        let model =
            agglomerative_cluster(&points, ClusterStop::NumClusters(2), &mut g).unwrap();
        // One Member edge per point, each targeting [point, concept].
        assert_eq!(model.member_edges.len(), 3);
        for (&point, &ci) in &model.assignments {
            let concept = model.concept_atoms[ci];
            let has_edge = model.member_edges.iter().any(|&e| {
                let edge = g.get(e).unwrap();
                edge.targets == vec![point, concept]
            });
            assert!(has_edge);
        }
    }

    #[test]
    fn stop_distance_merges_only_cheap_pairs() {
        let points = vec![vec![0.0], vec![0.05], vec![10.0]];
        let mut g = Metagraph::new();
        let model =
            agglomerative_cluster(&points, ClusterStop::StopDistance(0.1), &mut g).unwrap();
        assert_eq!(model.clusters, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn errors_on_bad_input() {
        let mut g = Metagraph::new();
        assert_eq!(
            agglomerative_cluster(&[], ClusterStop::NumClusters(1), &mut g).unwrap_err(),
            CogprocError::EmptyInput
        );
        assert_eq!(
            agglomerative_cluster(&[vec![0.0]], ClusterStop::NumClusters(2), &mut g).unwrap_err(),
            CogprocError::TooManyClusters { k: 2, n: 1 }
        );
        assert_eq!(
            agglomerative_cluster(
                &[vec![0.0], vec![0.0, 1.0]],
                ClusterStop::NumClusters(1),
                &mut g
            )
            .unwrap_err(),
            CogprocError::DimensionMismatch
        );
    }
}
