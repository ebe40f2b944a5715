//! The DDS abstraction and its greedy, exact-DP and stochastic-DP executors.

use std::collections::BTreeMap;
use std::fmt::Debug;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rng;

/// Default cap on enumerated states for exact dynamic programming.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum DdsError {
    #[error("no feasible action at stage {stage}")]
    NoFeasibleAction { stage: usize },
    #[error("reachable state space exceeds the {limit}-state limit")]
    StateSpaceTooLarge { limit: usize },
}

/// A staged decision problem. `outcomes` is the exact transition
/// distribution; stochastic executors sample from it, the exact solver takes
/// expectations over it. Implementations must keep `feasible_actions`
/// nonempty on every reachable (stage, state).
pub trait Dds {
    type State: Clone + Eq + Ord + Debug;
    type Action: Clone + Eq + Ord + Debug;

    fn horizon(&self) -> usize;
    fn initial_state(&self) -> Self::State;
    fn feasible_actions(&self, stage: usize, state: &Self::State) -> Vec<Self::Action>;
    fn reward(&self, stage: usize, state: &Self::State, action: &Self::Action) -> f64;
    /// Successor distribution; probabilities must sum to 1.
    fn outcomes(
        &self,
        stage: usize,
        state: &Self::State,
        action: &Self::Action,
    ) -> Vec<(Self::State, f64)>;
}

/// Samples a successor from the outcome distribution.
pub fn sample_outcome<S: Clone>(outcomes: &[(S, f64)], stream: &mut ChaCha8Rng) -> S {
    debug_assert!(!outcomes.is_empty());
    let u: f64 = stream.gen();
    let mut acc = 0.0;
    for (s, p) in outcomes {
        acc += p;
        if u < acc {
            return s.clone();
        }
    }
    outcomes.last().expect("nonempty").0.clone()
}

/// A complete run: `n+1` states, `n` actions, `n` rewards.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S, A> {
    pub states: Vec<S>,
    pub actions: Vec<A>,
    pub rewards: Vec<f64>,
}

impl<S, A> Trajectory<S, A> {
    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

/// Stagewise decision table produced by the exact solver.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy<S: Ord, A> {
    decisions: BTreeMap<(usize, S), A>,
}

impl<S: Ord + Clone, A: Clone> Policy<S, A> {
    pub fn action(&self, stage: usize, state: &S) -> Option<&A> {
        self.decisions.get(&(stage, state.clone()))
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }
}

/// Picks among `actions` the Ord-least action attaining the maximum score.
fn argmax_action<A: Clone + Ord>(actions: &[A], score: impl Fn(&A) -> f64) -> A {
    let mut best: Option<(&A, f64)> = None;
    for a in actions {
        let v = score(a);
        best = match best {
            None => Some((a, v)),
            Some((ba, bv)) => {
                if v > bv || (v == bv && a < ba) {
                    Some((a, v))
                } else {
                    Some((ba, bv))
                }
            }
        };
    }
    best.expect("nonempty action list").0.clone()
}

/// Greedy execution: at each stage samples an action with probability
/// proportional to `exp(reward / temperature)`. Temperature zero (or below)
/// degenerates to the deterministic argmax with Ord tie-break. Deterministic
/// given the seed.
pub fn run_greedy<P: Dds>(
    problem: &P,
    seed: u64,
    temperature: f64,
) -> Result<Trajectory<P::State, P::Action>, DdsError> {
    let mut stream = rng::substream(seed, 0);
    let mut state = problem.initial_state();
    let mut trajectory = Trajectory {
        states: vec![state.clone()],
        actions: Vec::new(),
        rewards: Vec::new(),
    };
    for stage in 0..problem.horizon() {
        let actions = problem.feasible_actions(stage, &state);
        if actions.is_empty() {
            return Err(DdsError::NoFeasibleAction { stage });
        }
        let action = if temperature <= 0.0 {
            argmax_action(&actions, |a| problem.reward(stage, &state, a))
        } else {
            let rewards: Vec<f64> =
                actions.iter().map(|a| problem.reward(stage, &state, a)).collect();
            // Shift by the max before exponentiation; the distribution is
            // unchanged and the weights stay bounded.
            let top = rewards.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let weights: Vec<f64> =
                rewards.iter().map(|r| ((r - top) / temperature).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mut u: f64 = stream.gen::<f64>() * total;
            let mut chosen = actions.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            actions[chosen].clone()
        };
        let reward = problem.reward(stage, &state, &action);
        let next = sample_outcome(&problem.outcomes(stage, &state, &action), &mut stream);
        trajectory.actions.push(action);
        trajectory.rewards.push(reward);
        trajectory.states.push(next.clone());
        state = next;
    }
    Ok(trajectory)
}

/// Exact backward induction over the enumerated reachable state space.
/// Returns the stagewise optimal policy and the optimal expected total
/// reward from the initial state.
pub fn solve_exact_dp<P: Dds>(
    problem: &P,
    state_limit: usize,
) -> Result<(Policy<P::State, P::Action>, f64), DdsError> {
    let n = problem.horizon();
    let mut layers: Vec<Vec<P::State>> = vec![vec![problem.initial_state()]];
    let mut total_states = 1usize;
    for stage in 0..n {
        let mut next: std::collections::BTreeSet<P::State> = Default::default();
        for state in &layers[stage] {
            let actions = problem.feasible_actions(stage, state);
            if actions.is_empty() {
                return Err(DdsError::NoFeasibleAction { stage });
            }
            for action in &actions {
                for (succ, _) in problem.outcomes(stage, state, action) {
                    next.insert(succ);
                }
            }
        }
        total_states += next.len();
        if total_states > state_limit {
            return Err(DdsError::StateSpaceTooLarge { limit: state_limit });
        }
        layers.push(next.into_iter().collect());
    }

    let mut value: BTreeMap<P::State, f64> =
        layers[n].iter().map(|s| (s.clone(), 0.0)).collect();
    let mut decisions: BTreeMap<(usize, P::State), P::Action> = BTreeMap::new();
    for stage in (0..n).rev() {
        let mut layer_value: BTreeMap<P::State, f64> = BTreeMap::new();
        for state in &layers[stage] {
            let actions = problem.feasible_actions(stage, state);
            let q = |a: &P::Action| -> f64 {
                problem.reward(stage, state, a)
                    + problem
                        .outcomes(stage, state, a)
                        .iter()
                        .map(|(s, p)| p * value[s])
                        .sum::<f64>()
            };
            let best = argmax_action(&actions, q);
            layer_value.insert(state.clone(), q(&best));
            decisions.insert((stage, state.clone()), best);
        }
        value = layer_value;
    }
    let optimal = value[&problem.initial_state()];
    Ok((Policy { decisions }, optimal))
}

/// Stochastic dynamic programming: at each stage every feasible action's
/// value is estimated as immediate reward plus the mean return of
/// `rollouts` uniform-random-policy rollouts from a sampled successor, then
/// the argmax is taken. Rollout streams are derived by (stage, action,
/// rollout) counters, so estimates do not depend on evaluation order.
pub fn run_stochastic_dp<P: Dds>(
    problem: &P,
    rollouts: usize,
    seed: u64,
) -> Result<Trajectory<P::State, P::Action>, DdsError> {
    assert!(rollouts >= 1, "at least one rollout");
    let n = problem.horizon();
    let mut path_stream = rng::substream(seed, 0);
    let mut state = problem.initial_state();
    let mut trajectory = Trajectory {
        states: vec![state.clone()],
        actions: Vec::new(),
        rewards: Vec::new(),
    };
    for stage in 0..n {
        let actions = problem.feasible_actions(stage, &state);
        if actions.is_empty() {
            return Err(DdsError::NoFeasibleAction { stage });
        }
        let mut estimates = Vec::with_capacity(actions.len());
        for (ai, action) in actions.iter().enumerate() {
            estimates.push(estimate_action_value(
                problem, stage, &state, action, ai, rollouts, seed,
            )?);
        }
        let action = argmax_action(&actions, |a| {
            let i = actions.iter().position(|b| b == a).expect("from the list");
            estimates[i]
        });
        let reward = problem.reward(stage, &state, &action);
        let next = sample_outcome(&problem.outcomes(stage, &state, &action), &mut path_stream);
        trajectory.actions.push(action);
        trajectory.rewards.push(reward);
        trajectory.states.push(next.clone());
        state = next;
    }
    Ok(trajectory)
}

/// Monte-Carlo estimate of an action's value: immediate reward plus the
/// mean return of uniform-random-policy rollouts from sampled successors.
/// Each rollout uses its own (stage, action, rollout)-derived stream.
pub fn estimate_action_value<P: Dds>(
    problem: &P,
    stage: usize,
    state: &P::State,
    action: &P::Action,
    action_index: usize,
    rollouts: usize,
    seed: u64,
) -> Result<f64, DdsError> {
    let immediate = problem.reward(stage, state, action);
    let mut future = 0.0;
    for k in 0..rollouts {
        let counter = rng::mix(((stage as u64) << 32) | action_index as u64, k as u64);
        let mut stream = rng::substream(seed.wrapping_add(1), counter);
        let next = sample_outcome(&problem.outcomes(stage, state, action), &mut stream);
        future += uniform_rollout(problem, stage + 1, next, &mut stream)?;
    }
    Ok(immediate + future / rollouts as f64)
}

fn uniform_rollout<P: Dds>(
    problem: &P,
    from_stage: usize,
    mut state: P::State,
    stream: &mut ChaCha8Rng,
) -> Result<f64, DdsError> {
    let mut total = 0.0;
    for stage in from_stage..problem.horizon() {
        let actions = problem.feasible_actions(stage, &state);
        if actions.is_empty() {
            return Err(DdsError::NoFeasibleAction { stage });
        }
        let action = &actions[stream.gen_range(0..actions.len())];
        total += problem.reward(stage, &state, action);
        state = sample_outcome(&problem.outcomes(stage, &state, action), stream);
    }
    Ok(total)
}
