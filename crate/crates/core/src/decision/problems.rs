//! Built-in decision problems: fixtures for the executors and the CLI.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::dds::Dds;

/// Two-stage trap: the myopic action pays 1 immediately but forfeits the
/// stage-two reward of 10; the patient action pays 0 now and collects 10.
/// Greedy at temperature zero takes the myopic action; exact DP and decent
/// lookahead take the patient one.
#[derive(Clone, Debug, Default)]
pub struct DeceptiveChain;

/// States of [`DeceptiveChain`].
pub mod deceptive {
    pub const START: usize = 0;
    pub const DEAD: usize = 1;
    pub const ALIVE: usize = 2;
    pub const MYOPIC: usize = 0;
    pub const PATIENT: usize = 1;
}

impl Dds for DeceptiveChain {
    type State = usize;
    type Action = usize;

    fn horizon(&self) -> usize {
        2
    }

    fn initial_state(&self) -> usize {
        deceptive::START
    }

    fn feasible_actions(&self, stage: usize, _state: &usize) -> Vec<usize> {
        if stage == 0 {
            vec![deceptive::MYOPIC, deceptive::PATIENT]
        } else {
            vec![0]
        }
    }

    fn reward(&self, stage: usize, state: &usize, action: &usize) -> f64 {
        match (stage, *state, *action) {
            (0, _, a) if a == deceptive::MYOPIC => 1.0,
            (0, _, _) => 0.0,
            (_, s, _) if s == deceptive::ALIVE => 10.0,
            _ => 0.0,
        }
    }

    fn outcomes(&self, stage: usize, state: &usize, action: &usize) -> Vec<(usize, f64)> {
        if stage == 0 {
            let next = if *action == deceptive::MYOPIC {
                deceptive::DEAD
            } else {
                deceptive::ALIVE
            };
            vec![(next, 1.0)]
        } else {
            vec![(*state, 1.0)]
        }
    }
}

/// Deterministic gridworld: 4-neighbor moves on a `width x height` grid from
/// the top-left corner; entering the bottom-right goal pays 1 and the goal
/// absorbs (only a zero-reward stay action remains). Used as a CLI demo
/// problem.
#[derive(Clone, Debug)]
pub struct Gridworld {
    pub width: usize,
    pub height: usize,
    pub horizon: usize,
}

impl Gridworld {
    pub fn new(width: usize, height: usize, horizon: usize) -> Self {
        Self { width, height, horizon }
    }

    fn goal(&self) -> (usize, usize) {
        (self.width - 1, self.height - 1)
    }
}

const STAY: usize = 4;

impl Dds for Gridworld {
    type State = (usize, usize);
    type Action = usize; // 0 right, 1 down, 2 left, 3 up, 4 stay (goal only)

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn initial_state(&self) -> (usize, usize) {
        (0, 0)
    }

    fn feasible_actions(&self, _stage: usize, state: &(usize, usize)) -> Vec<usize> {
        if *state == self.goal() {
            return vec![STAY];
        }
        let (x, y) = *state;
        let mut acts = Vec::new();
        if x + 1 < self.width {
            acts.push(0);
        }
        if y + 1 < self.height {
            acts.push(1);
        }
        if x > 0 {
            acts.push(2);
        }
        if y > 0 {
            acts.push(3);
        }
        acts
    }

    fn reward(&self, _stage: usize, state: &(usize, usize), action: &usize) -> f64 {
        if *action != STAY && step(*state, *action) == self.goal() {
            1.0
        } else {
            0.0
        }
    }

    fn outcomes(&self, _stage: usize, state: &(usize, usize), action: &usize) -> Vec<((usize, usize), f64)> {
        vec![(step(*state, *action), 1.0)]
    }
}

fn step((x, y): (usize, usize), action: usize) -> (usize, usize) {
    match action {
        0 => (x + 1, y),
        1 => (x, y + 1),
        2 => (x - 1, y),
        3 => (x, y - 1),
        _ => (x, y),
    }
}

/// Fully tabular random DDS over a fixed state set, optionally stochastic
/// (two-outcome transitions). Used by the executor property tests.
#[derive(Clone, Debug)]
pub struct TableDds {
    pub horizon: usize,
    pub num_states: usize,
    /// `[stage][state]` -> per-action reward.
    pub rewards: Vec<Vec<Vec<f64>>>,
    /// `[stage][state][action]` -> outcome distribution.
    pub outcomes: Vec<Vec<Vec<Vec<(usize, f64)>>>>,
}

impl TableDds {
    /// Draws a random problem: `horizon` stages, `num_states` states, one to
    /// `max_actions` actions per (stage, state), rewards uniform in [0,1).
    pub fn random(
        stream: &mut ChaCha8Rng,
        horizon: usize,
        num_states: usize,
        max_actions: usize,
        stochastic: bool,
    ) -> Self {
        let mut rewards = Vec::with_capacity(horizon);
        let mut outcomes = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let mut stage_r = Vec::with_capacity(num_states);
            let mut stage_o = Vec::with_capacity(num_states);
            for _ in 0..num_states {
                let actions = stream.gen_range(1..=max_actions);
                let r: Vec<f64> = (0..actions).map(|_| stream.gen::<f64>()).collect();
                let o: Vec<Vec<(usize, f64)>> = (0..actions)
                    .map(|_| {
                        if stochastic && stream.gen_bool(0.5) {
                            let a = stream.gen_range(0..num_states);
                            let b = stream.gen_range(0..num_states);
                            let p = stream.gen_range(0.1..0.9);
                            if a == b {
                                vec![(a, 1.0)]
                            } else {
                                vec![(a, p), (b, 1.0 - p)]
                            }
                        } else {
                            vec![(stream.gen_range(0..num_states), 1.0)]
                        }
                    })
                    .collect();
                stage_r.push(r);
                stage_o.push(o);
            }
            rewards.push(stage_r);
            outcomes.push(stage_o);
        }
        Self { horizon, num_states, rewards, outcomes }
    }

    pub fn is_deterministic(&self) -> bool {
        self.outcomes
            .iter()
            .flatten()
            .flatten()
            .all(|dist| dist.len() == 1)
    }
}

impl Dds for TableDds {
    type State = usize;
    type Action = usize;

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn initial_state(&self) -> usize {
        0
    }

    fn feasible_actions(&self, stage: usize, state: &usize) -> Vec<usize> {
        (0..self.rewards[stage][*state].len()).collect()
    }

    fn reward(&self, stage: usize, state: &usize, action: &usize) -> f64 {
        self.rewards[stage][*state][*action]
    }

    fn outcomes(&self, stage: usize, state: &usize, action: &usize) -> Vec<(usize, f64)> {
        self.outcomes[stage][*state][*action].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::super::dds::{run_greedy, run_stochastic_dp, solve_exact_dp, Dds, DdsError, Trajectory, DEFAULT_STATE_LIMIT};
    use super::*;
    use crate::rng;

    /// Oracle: exhaustive enumeration of open-loop action sequences on a
    /// deterministic problem; the best total reward equals the DP optimum.
    fn best_action_sequence(p: &TableDds) -> f64 {
        fn go(p: &TableDds, stage: usize, state: usize) -> f64 {
            if stage == p.horizon {
                return 0.0;
            }
            let mut best = f64::NEG_INFINITY;
            for a in 0..p.rewards[stage][state].len() {
                let r = p.rewards[stage][state][a];
                let next = p.outcomes[stage][state][a][0].0;
                best = best.max(r + go(p, stage + 1, next));
            }
            best
        }
        go(p, 0, 0)
    }

    #[test]
    fn single_action_per_stage_is_seed_independent() {
        let mut stream = rng::substream(1, 0);
        let p = TableDds::random(&mut stream, 4, 3, 1, false);
        let t1 = run_greedy(&p, 11, 1.0).unwrap();
        let t2 = run_greedy(&p, 99, 2.0).unwrap();
        assert_eq!(t1.actions, t2.actions);
    }

    #[test]
    fn greedy_takes_the_myopic_action() {
        let t = run_greedy(&DeceptiveChain, 5, 0.0).unwrap();
        assert_eq!(t.actions[0], deceptive::MYOPIC);
        assert_eq!(t.total_reward(), 1.0);
    }

    #[test]
    fn exact_dp_beats_greedy_on_the_trap() {
        let (policy, value) = solve_exact_dp(&DeceptiveChain, DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(value, 10.0);
        assert_eq!(
            policy.action(0, &deceptive::START).copied(),
            Some(deceptive::PATIENT)
        );
        let greedy = run_greedy(&DeceptiveChain, 5, 0.0).unwrap();
        assert!(value > greedy.total_reward());
    }

    #[test]
    fn stochastic_dp_finds_the_patient_action() {
        let mut hits = 0;
        for seed in 0..100 {
            let t = run_stochastic_dp(&DeceptiveChain, 8, seed).unwrap();
            if t.actions[0] == deceptive::PATIENT {
                hits += 1;
            }
        }
        assert!(hits >= 95, "non-myopic in {hits}/100 runs");
    }

    #[test]
    fn zero_reward_problem_has_zero_optimum() {
        let mut stream = rng::substream(2, 0);
        let mut p = TableDds::random(&mut stream, 3, 3, 3, true);
        for stage in &mut p.rewards {
            for state in stage {
                for r in state {
                    *r = 0.0;
                }
            }
        }
        let (_, value) = solve_exact_dp(&p, DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(value, 0.0);
    }

    #[test]
    fn exact_dp_matches_sequence_enumeration_on_deterministic_problems() {
        for trial in 0..100u64 {
            let mut stream = rng::substream(0xD9, trial);
            let p = TableDds::random(&mut stream, 3, 4, 4, false);
            assert!(p.is_deterministic());
            let (_, value) = solve_exact_dp(&p, DEFAULT_STATE_LIMIT).unwrap();
            let oracle = best_action_sequence(&p);
            assert!((value - oracle).abs() < 1e-12, "trial {trial}: {value} vs {oracle}");
        }
    }

    #[test]
    fn dp_dominates_greedy_and_stochastic_dp() {
        for trial in 0..40u64 {
            let mut stream = rng::substream(0xDA, trial);
            let p = TableDds::random(&mut stream, 4, 4, 3, false);
            let (_, value) = solve_exact_dp(&p, DEFAULT_STATE_LIMIT).unwrap();
            let tol = 1e-12;
            for seed in 0..5 {
                let g = run_greedy(&p, seed, 1.0).unwrap();
                assert!(value + tol >= g.total_reward(), "greedy beat DP on trial {trial}");
                let s = run_stochastic_dp(&p, 4, seed).unwrap();
                assert!(value + tol >= s.total_reward(), "mc beat DP on trial {trial}");
            }
        }
    }

    #[test]
    fn horizon_one_stochastic_dp_equals_greedy_argmax() {
        for trial in 0..20u64 {
            let mut stream = rng::substream(0xDB, trial);
            let p = TableDds::random(&mut stream, 1, 3, 4, true);
            let mc = run_stochastic_dp(&p, 3, trial).unwrap();
            let greedy = run_greedy(&p, trial, 0.0).unwrap();
            assert_eq!(mc.actions, greedy.actions);
        }
    }

    #[test]
    fn greedy_sampling_frequencies_match_softmax() {
        // One stage, three actions with rewards 0, ln 2, ln 3 at temperature
        // 1: softmax weights 1:2:3. Multinomial check at 3 sigma.
        #[derive(Clone, Debug)]
        struct ThreeArm;
        impl Dds for ThreeArm {
            type State = usize;
            type Action = usize;
            fn horizon(&self) -> usize {
                1
            }
            fn initial_state(&self) -> usize {
                0
            }
            fn feasible_actions(&self, _: usize, _: &usize) -> Vec<usize> {
                vec![0, 1, 2]
            }
            fn reward(&self, _: usize, _: &usize, a: &usize) -> f64 {
                [0.0, std::f64::consts::LN_2, 1.0986122886681098][*a]
            }
            fn outcomes(&self, _: usize, _: &usize, _: &usize) -> Vec<(usize, f64)> {
                vec![(0, 1.0)]
            }
        }
        let trials = 10_000;
        let mut counts = [0usize; 3];
        for seed in 0..trials {
            let t = run_greedy(&ThreeArm, seed as u64, 1.0).unwrap();
            counts[t.actions[0]] += 1;
        }
        for (i, expected_p) in [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0].into_iter().enumerate() {
            let n = trials as f64;
            let sigma = (n * expected_p * (1.0 - expected_p)).sqrt();
            let diff = (counts[i] as f64 - n * expected_p).abs();
            assert!(diff <= 3.0 * sigma, "arm {i}: count {} vs {}", counts[i], n * expected_p);
        }
    }

    #[test]
    fn executors_are_bit_reproducible() {
        let mut stream = rng::substream(3, 0);
        let p = TableDds::random(&mut stream, 5, 4, 3, true);
        let a: Trajectory<usize, usize> = run_greedy(&p, 123, 1.0).unwrap();
        let b = run_greedy(&p, 123, 1.0).unwrap();
        assert_eq!(a, b);
        let c = run_stochastic_dp(&p, 6, 42).unwrap();
        let d = run_stochastic_dp(&p, 6, 42).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn no_feasible_action_is_reported() {
        #[derive(Clone, Debug)]
        struct Stuck;
        impl Dds for Stuck {
            type State = usize;
            type Action = usize;
            fn horizon(&self) -> usize {
                1
            }
            fn initial_state(&self) -> usize {
                0
            }
            fn feasible_actions(&self, _: usize, _: &usize) -> Vec<usize> {
                Vec::new()
            }
            fn reward(&self, _: usize, _: &usize, _: &usize) -> f64 {
                0.0
            }
            fn outcomes(&self, _: usize, _: &usize, _: &usize) -> Vec<(usize, f64)> {
                Vec::new()
            }
        }
        assert_eq!(
            run_greedy(&Stuck, 0, 0.0).unwrap_err(),
            DdsError::NoFeasibleAction { stage: 0 }
        );
    }

    #[test]
    fn state_limit_is_enforced() {
        let mut stream = rng::substream(4, 0);
        let p = TableDds::random(&mut stream, 3, 4, 3, true);
        assert_eq!(
            solve_exact_dp(&p, 2).unwrap_err(),
            DdsError::StateSpaceTooLarge { limit: 2 }
        );
    }

    #[test]
    fn gridworld_dp_reaches_the_goal() {
        let g = Gridworld::new(3, 3, 6);
        let (_, value) = solve_exact_dp(&g, DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(value, 1.0);
    }

    #[test]
    fn mc_value_estimates_converge_at_root_n() {
        // Fixed 2-state chain with a single action per stage (the uniform
        // default policy is the only policy, so rollout estimates target the
        // exact DP value) and genuinely stochastic transitions. Quadrupling
        // the rollouts should roughly halve the RMSE.
        let p = TableDds {
            horizon: 6,
            num_states: 2,
            rewards: vec![vec![vec![0.2], vec![0.9]]; 6],
            outcomes: vec![
                vec![vec![vec![(0, 0.5), (1, 0.5)]], vec![vec![(0, 0.3), (1, 0.7)]]];
                6
            ],
        };
        let (_, exact) = solve_exact_dp(&p, DEFAULT_STATE_LIMIT).unwrap();
        let rmse = |rollouts: usize| -> f64 {
            let runs = 200;
            let mut sq = 0.0;
            for seed in 0..runs {
                let est = super::super::dds::estimate_action_value(
                    &p, 0, &0, &0, 0, rollouts, seed,
                )
                .unwrap();
                sq += (est - exact) * (est - exact);
            }
            (sq / runs as f64).sqrt()
        };
        let coarse = rmse(16);
        let fine = rmse(64);
        let ratio = fine / coarse;
        assert!(
            (0.25..=0.8).contains(&ratio),
            "expected ~0.5 error ratio for 4x rollouts, got {ratio} ({coarse} -> {fine})"
        );
    }
}
