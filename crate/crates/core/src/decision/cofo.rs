//! Combinatory-operation-based function optimization.
//!
//! A COFO process optimizes an objective `F` by repeatedly combining
//! previously evaluated points with combinatory operators, evaluating `F` at
//! the combination, and scoring each evaluation by how much guidance it
//! added to the dataset. Sampling favors the promising set: the top
//! `ceil(rho * |D|)` evaluated points by objective value.

use std::collections::BTreeSet;
use std::fmt::Debug;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::rng;

#[derive(Debug, Error, PartialEq)]
pub enum CofoError {
    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("initial sample pool is empty")]
    EmptyPool,
    #[error("evaluation budget {budget} below the initial pool size {pool}")]
    BudgetBelowPool { budget: usize, pool: usize },
}

/// How a step's reward is measured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Guidance {
    /// Improvement of the best objective value seen (zero when no
    /// improvement). Deterministic and oracle-checkable.
    BestSoFar,
    /// Entropy drop of the softmax(beta * F) distribution over the dataset:
    /// reward = H(before) - H(after). May be negative.
    EntropyReduction { beta: f64 },
}

/// A combinator: combines two evaluated points into a new candidate. The
/// stream argument makes stochastic operators (mutation, crossover)
/// reproducible.
pub type Combinator<X> = Box<dyn Fn(&X, &X, &mut ChaCha8Rng) -> X>;

/// A COFO problem instance.
pub struct CofoProblem<X> {
    pub objective: Box<dyn Fn(&X) -> f64>,
    pub initial_pool: Vec<X>,
    pub combinators: Vec<Combinator<X>>,
    /// Promising-set fraction in (0, 1].
    pub rho: f64,
    pub guidance: Guidance,
    /// Maximum number of distinct objective evaluations.
    pub eval_budget: usize,
}

/// Evaluated pairs `(x, F(x))` in insertion order; every value comes from an
/// actual objective evaluation and no point repeats.
#[derive(Clone, Debug, PartialEq)]
pub struct CofoDataset<X: Ord + Clone> {
    entries: Vec<(X, f64)>,
    seen: BTreeSet<X>,
}

impl<X: Ord + Clone> Default for CofoDataset<X> {
    fn default() -> Self {
        Self { entries: Vec::new(), seen: BTreeSet::new() }
    }
}

impl<X: Ord + Clone> CofoDataset<X> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, x: &X) -> bool {
        self.seen.contains(x)
    }

    pub fn entries(&self) -> &[(X, f64)] {
        &self.entries
    }

    fn insert(&mut self, x: X, fx: f64) {
        debug_assert!(!self.seen.contains(&x));
        self.seen.insert(x.clone());
        self.entries.push((x, fx));
    }

    /// Best entry by objective value, ties broken toward the Ord-least point.
    pub fn best(&self) -> Option<(&X, f64)> {
        self.entries
            .iter()
            .map(|(x, f)| (x, *f))
            .max_by(|(xa, fa), (xb, fb)| {
                fa.partial_cmp(fb).expect("finite objective").then(xb.cmp(xa))
            })
    }

    /// The top `ceil(rho * len)` entries by objective value (Ord-least first
    /// among ties), or the whole dataset when that set would be empty.
    pub fn promising_set(&self, rho: f64) -> Vec<&X> {
        let mut ranked: Vec<(&X, f64)> = self.entries.iter().map(|(x, f)| (x, *f)).collect();
        ranked.sort_by(|(xa, fa), (xb, fb)| {
            fb.partial_cmp(fa).expect("finite objective").then(xa.cmp(xb))
        });
        let k = ((rho * self.len() as f64).ceil() as usize).min(self.len());
        if k == 0 {
            return ranked.into_iter().map(|(x, _)| x).collect();
        }
        ranked.into_iter().take(k).map(|(x, _)| x).collect()
    }

    /// Guidance measure of the dataset.
    pub fn guidance_value(&self, guidance: Guidance) -> f64 {
        match guidance {
            Guidance::BestSoFar => self.best().map(|(_, f)| f).unwrap_or(f64::NEG_INFINITY),
            Guidance::EntropyReduction { beta } => -self.softmax_entropy(beta),
        }
    }

    /// Shannon entropy (nats) of softmax(beta * F) over the dataset.
    pub fn softmax_entropy(&self, beta: f64) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        let top = self
            .entries
            .iter()
            .map(|(_, f)| beta * f)
            .fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = self.entries.iter().map(|(_, f)| (beta * f - top).exp()).collect();
        let total: f64 = weights.iter().sum();
        weights
            .iter()
            .map(|w| {
                let p = w / total;
                if p > 0.0 {
                    -p * p.ln()
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// What one COFO step did.
#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome<X> {
    /// A new point was formed and evaluated.
    Evaluated { z: X, fz: f64, reward: f64 },
    /// Sixteen candidate draws in a row were already in the dataset; the
    /// step was skipped without consuming budget.
    SkippedDuplicates,
}

const DUPLICATE_RETRIES: usize = 16;
/// Consecutive skipped steps after which a run stops early (the reachable
/// candidate space is saturated).
const SATURATION_LIMIT: usize = 64;

/// One COFO decision step: sample a pair from the promising set and a
/// combinator, form `z`, evaluate it, and score the dataset improvement.
pub fn cofo_step<X: Ord + Clone + Debug>(
    problem: &CofoProblem<X>,
    dataset: &mut CofoDataset<X>,
    stream: &mut ChaCha8Rng,
) -> Result<StepOutcome<X>, CofoError> {
    if dataset.len() >= problem.eval_budget {
        return Err(CofoError::BudgetExhausted(problem.eval_budget));
    }
    for _ in 0..DUPLICATE_RETRIES {
        let promising = dataset.promising_set(problem.rho);
        debug_assert!(!promising.is_empty());
        let x = promising[stream.gen_range(0..promising.len())].clone();
        let y = promising[stream.gen_range(0..promising.len())].clone();
        let ci = stream.gen_range(0..problem.combinators.len());
        let z = (problem.combinators[ci])(&x, &y, stream);
        if dataset.contains(&z) {
            continue;
        }
        let before = dataset.guidance_value(problem.guidance);
        let fz = (problem.objective)(&z);
        dataset.insert(z.clone(), fz);
        let after = dataset.guidance_value(problem.guidance);
        let reward = match problem.guidance {
            Guidance::BestSoFar => (after - before).max(0.0),
            Guidance::EntropyReduction { .. } => after - before,
        };
        return Ok(StepOutcome::Evaluated { z, fz, reward });
    }
    Ok(StepOutcome::SkippedDuplicates)
}

/// Execution style for [`run_cofo`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CofoMode {
    /// Sample one candidate per step.
    Greedy,
    /// Score a sampled slate of candidate `(x, y, C_i)` triples by rollouts
    /// up to three steps deep before committing each evaluation. Planning
    /// evaluations are real evaluations and count against the budget.
    Dp,
}

/// A log line per evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<X> {
    pub step: usize,
    pub z: X,
    pub fz: f64,
    pub reward: f64,
    pub best_f: f64,
}

/// Result of a COFO run.
#[derive(Clone, Debug, PartialEq)]
pub struct CofoRun<X: Ord + Clone> {
    pub best_x: X,
    pub best_f: f64,
    pub dataset: CofoDataset<X>,
    pub log: Vec<StepRecord<X>>,
    /// Distinct objective evaluations performed (dataset size plus planning
    /// evaluations in DP mode).
    pub evals_used: usize,
}

/// Runs a COFO process to its evaluation budget (or until the candidate
/// space saturates). Deterministic given `(problem, mode, seed)`.
pub fn run_cofo<X: Ord + Clone + Debug>(
    problem: &CofoProblem<X>,
    mode: CofoMode,
    seed: u64,
) -> Result<CofoRun<X>, CofoError> {
    if problem.initial_pool.is_empty() {
        return Err(CofoError::EmptyPool);
    }
    if problem.eval_budget < problem.initial_pool.len() {
        return Err(CofoError::BudgetBelowPool {
            budget: problem.eval_budget,
            pool: problem.initial_pool.len(),
        });
    }
    assert!(problem.rho > 0.0 && problem.rho <= 1.0, "rho in (0,1]");
    assert!(!problem.combinators.is_empty(), "at least one combinator");

    let mut dataset = CofoDataset::default();
    let mut evals_used = 0usize;
    let mut log = Vec::new();
    let mut step = 0usize;
    for x in &problem.initial_pool {
        if dataset.contains(x) {
            continue;
        }
        let fx = (problem.objective)(x);
        evals_used += 1;
        dataset.insert(x.clone(), fx);
        let best_f = dataset.best().expect("nonempty").1;
        log.push(StepRecord { step, z: x.clone(), fz: fx, reward: 0.0, best_f });
        step += 1;
    }

    let mut stream = rng::substream(seed, 1);
    let mut consecutive_skips = 0usize;
    let mut cache: EvalCache<X> = EvalCache {
        values: dataset.entries().iter().cloned().collect(),
        misses: 0,
    };
    while evals_used < problem.eval_budget && consecutive_skips < SATURATION_LIMIT {
        let outcome = match mode {
            CofoMode::Greedy => cofo_step(problem, &mut dataset, &mut stream)?,
            CofoMode::Dp => {
                let budget_left = problem.eval_budget - evals_used;
                let out = dp_step(problem, &mut dataset, &mut cache, budget_left, &mut stream)?;
                evals_used += cache.misses;
                cache.misses = 0;
                out
            }
        };
        match outcome {
            StepOutcome::Evaluated { z, fz, reward } => {
                consecutive_skips = 0;
                if mode == CofoMode::Greedy {
                    evals_used += 1;
                }
                let best_f = dataset.best().expect("nonempty").1;
                log.push(StepRecord { step, z, fz, reward, best_f });
                step += 1;
            }
            StepOutcome::SkippedDuplicates => {
                consecutive_skips += 1;
            }
        }
    }
    let (best_x, best_f) = dataset.best().map(|(x, f)| (x.clone(), f)).expect("nonempty");
    Ok(CofoRun { best_x, best_f, dataset, log, evals_used })
}

/// Candidate slate size for DP-mode planning.
const DP_SLATE: usize = 4;
/// Lookahead depth including the committed step.
const DP_DEPTH: usize = 3;

/// Memo of points evaluated so far; planning never re-prices a known point.
struct EvalCache<X: Ord + Clone> {
    values: std::collections::BTreeMap<X, f64>,
    misses: usize,
}

impl<X: Ord + Clone> EvalCache<X> {
    /// Evaluates through the cache; `None` when a fresh evaluation would
    /// exceed `budget_left`.
    fn eval(
        &mut self,
        objective: &dyn Fn(&X) -> f64,
        x: &X,
        budget_left: usize,
    ) -> Option<f64> {
        if let Some(v) = self.values.get(x) {
            return Some(*v);
        }
        if self.misses >= budget_left {
            return None;
        }
        let v = objective(x);
        self.values.insert(x.clone(), v);
        self.misses += 1;
        Some(v)
    }
}

/// DP-style step: samples a slate of candidate triples, scores each by the
/// cumulative guidance gain of a depth-limited greedy rollout on a scratch
/// dataset, then commits the best candidate. Planning evaluations go
/// through the cache, so each distinct point is priced at most once.
fn dp_step<X: Ord + Clone + Debug>(
    problem: &CofoProblem<X>,
    dataset: &mut CofoDataset<X>,
    cache: &mut EvalCache<X>,
    budget_left: usize,
    stream: &mut ChaCha8Rng,
) -> Result<StepOutcome<X>, CofoError> {
    if budget_left == 0 {
        return Err(CofoError::BudgetExhausted(problem.eval_budget));
    }
    let mut best: Option<(f64, X, f64)> = None; // (rollout value, z, fz)
    let mut slate: BTreeSet<X> = BTreeSet::new();
    for _ in 0..DP_SLATE {
        let promising = dataset.promising_set(problem.rho);
        let x = promising[stream.gen_range(0..promising.len())].clone();
        let y = promising[stream.gen_range(0..promising.len())].clone();
        let ci = stream.gen_range(0..problem.combinators.len());
        let z = (problem.combinators[ci])(&x, &y, stream);
        if dataset.contains(&z) || slate.contains(&z) {
            continue;
        }
        let fz = match cache.eval(&problem.objective, &z, budget_left) {
            Some(v) => v,
            None => break,
        };
        slate.insert(z.clone());
        // Rollout on a scratch copy: commit z, then greedy steps to depth.
        let mut scratch = dataset.clone();
        let before = scratch.guidance_value(problem.guidance);
        scratch.insert(z.clone(), fz);
        let mut rollout_stream = stream.clone();
        'rollout: for _ in 1..DP_DEPTH {
            for _ in 0..DUPLICATE_RETRIES {
                let promising = scratch.promising_set(problem.rho);
                let rx = promising[rollout_stream.gen_range(0..promising.len())].clone();
                let ry = promising[rollout_stream.gen_range(0..promising.len())].clone();
                let rc = rollout_stream.gen_range(0..problem.combinators.len());
                let rz = (problem.combinators[rc])(&rx, &ry, &mut rollout_stream);
                if scratch.contains(&rz) {
                    continue;
                }
                match cache.eval(&problem.objective, &rz, budget_left) {
                    Some(v) => scratch.insert(rz, v),
                    None => break 'rollout,
                }
                break;
            }
        }
        let value = scratch.guidance_value(problem.guidance) - before;
        let better = match &best {
            None => true,
            Some((bv, bz, _)) => value > *bv || (value == *bv && z < *bz),
        };
        if better {
            best = Some((value, z, fz));
        }
    }
    match best {
        Some((_, z, fz)) => {
            let before = dataset.guidance_value(problem.guidance);
            dataset.insert(z.clone(), fz);
            let after = dataset.guidance_value(problem.guidance);
            let reward = match problem.guidance {
                Guidance::BestSoFar => (after - before).max(0.0),
                Guidance::EntropyReduction { .. } => after - before,
            };
            Ok(StepOutcome::Evaluated { z, fz, reward })
        }
        None => Ok(StepOutcome::SkippedDuplicates),
    }
}

/// The onemax benchmark: maximize the popcount of a `bits`-wide word.
/// Combinators: single-bit point mutation of the first parent, and uniform
/// crossover. The initial pool holds `pool_size` distinct words drawn from
/// the seed's pool stream.
pub fn onemax_problem(
    bits: u32,
    pool_size: usize,
    eval_budget: usize,
    rho: f64,
    guidance: Guidance,
    seed: u64,
) -> CofoProblem<u64> {
    assert!(bits >= 1 && bits <= 63);
    let mask: u64 = (1u64 << bits) - 1;
    let mut pool_stream = rng::substream(seed, 0);
    let mut pool: Vec<u64> = Vec::new();
    let mut seen = BTreeSet::new();
    // Exclude the all-ones optimum from the pool so runs must search.
    while pool.len() < pool_size.min(mask as usize) {
        let x = pool_stream.gen::<u64>() & mask;
        if x != mask && seen.insert(x) {
            pool.push(x);
        }
    }
    let mutation: Combinator<u64> = Box::new(move |x, _, stream| {
        let bit = stream.gen_range(0..bits);
        (*x ^ (1u64 << bit)) & mask
    });
    let crossover: Combinator<u64> = Box::new(move |x, y, stream| {
        let keep: u64 = stream.gen::<u64>() & mask;
        (x & keep) | (y & !keep)
    });
    CofoProblem {
        objective: Box::new(|x: &u64| x.count_ones() as f64),
        initial_pool: pool,
        combinators: vec![mutation, crossover],
        rho,
        guidance,
        eval_budget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn onemax(budget: usize, seed: u64) -> CofoProblem<u64> {
        onemax_problem(8, 8, budget, 0.25, Guidance::BestSoFar, seed)
    }

    #[test]
    fn best_so_far_reward_is_the_improvement() {
        let mut d = CofoDataset::default();
        d.insert(1u64, 3.0);
        let p = CofoProblem {
            objective: Box::new(|x: &u64| *x as f64),
            initial_pool: vec![1],
            combinators: vec![Box::new(|x, _, _| x + 4)],
            rho: 1.0,
            guidance: Guidance::BestSoFar,
            eval_budget: 10,
        };
        let mut stream = rng::substream(0, 1);
        // z = 5, F(z) = 5, improvement over 3 is 2.
        match cofo_step(&p, &mut d, &mut stream).unwrap() {
            StepOutcome::Evaluated { z, fz, reward } => {
                assert_eq!(z, 5);
                assert_eq!(fz, 5.0);
                assert_eq!(reward, 2.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn worse_candidate_earns_zero_under_best_so_far() {
        let mut d = CofoDataset::default();
        d.insert(8u64, 8.0);
        let p = CofoProblem {
            objective: Box::new(|x: &u64| *x as f64),
            initial_pool: vec![8],
            combinators: vec![Box::new(|x, _, _| x - 5)],
            rho: 1.0,
            guidance: Guidance::BestSoFar,
            eval_budget: 10,
        };
        let mut stream = rng::substream(0, 1);
        match cofo_step(&p, &mut d, &mut stream).unwrap() {
            StepOutcome::Evaluated { reward, .. } => assert_eq!(reward, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn entropy_reduction_matches_hand_computation() {
        // Four-point pool with values 0,0,1,2 at beta = 1; adding a point
        // with value 4 concentrates the softmax.
        let mut d = CofoDataset::default();
        for (i, f) in [0.0, 0.0, 1.0, 2.0].into_iter().enumerate() {
            d.insert(i as u64, f);
        }
        let entropy = |vals: &[f64]| -> f64 {
            let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ws: Vec<f64> = vals.iter().map(|v| (v - top).exp()).collect();
            let total: f64 = ws.iter().sum();
            ws.iter().map(|w| -(w / total) * (w / total).ln()).sum()
        };
        let before = entropy(&[0.0, 0.0, 1.0, 2.0]);
        assert!((d.softmax_entropy(1.0) - before).abs() < 1e-12);
        let p = CofoProblem {
            objective: Box::new(|x: &u64| *x as f64),
            initial_pool: vec![0],
            combinators: vec![Box::new(|_, _, _| 4u64)],
            rho: 1.0,
            guidance: Guidance::EntropyReduction { beta: 1.0 },
            eval_budget: 10,
        };
        let mut stream = rng::substream(0, 1);
        match cofo_step(&p, &mut d, &mut stream).unwrap() {
            StepOutcome::Evaluated { reward, .. } => {
                let after = entropy(&[0.0, 0.0, 1.0, 2.0, 4.0]);
                assert!((reward - (before - after)).abs() < 1e-12);
                assert!(reward > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn onemax_reaches_the_optimum_in_most_seeds() {
        let mut hits = 0;
        for seed in 0..100 {
            let p = onemax(500, seed);
            let run = run_cofo(&p, CofoMode::Greedy, seed).unwrap();
            if run.best_f == 8.0 {
                hits += 1;
            }
        }
        assert!(hits >= 90, "optimum reached in {hits}/100 seeds");
    }

    #[test]
    fn budget_equal_to_pool_returns_pool_argmax() {
        let p = onemax(8, 3);
        let pool_best = p
            .initial_pool
            .iter()
            .map(|x| x.count_ones())
            .max()
            .unwrap() as f64;
        let run = run_cofo(&p, CofoMode::Greedy, 3).unwrap();
        assert_eq!(run.best_f, pool_best);
        assert_eq!(run.dataset.len(), 8);
    }

    #[test]
    fn constant_objective_earns_zero_reward() {
        let p = CofoProblem {
            objective: Box::new(|_: &u64| 1.5),
            initial_pool: vec![0, 1, 2, 3],
            combinators: vec![Box::new(|x, y, _| x.wrapping_add(*y) % 64)],
            rho: 0.5,
            guidance: Guidance::BestSoFar,
            eval_budget: 30,
        };
        let run = run_cofo(&p, CofoMode::Greedy, 9).unwrap();
        assert!(run.log.iter().all(|r| r.reward == 0.0));
        assert_eq!(run.best_f, 1.5);
    }

    #[test]
    fn dataset_never_exceeds_budget_and_runs_reproduce() {
        for seed in [0u64, 7, 123] {
            let p1 = onemax(64, seed);
            let r1 = run_cofo(&p1, CofoMode::Greedy, seed).unwrap();
            assert!(r1.dataset.len() <= 64);
            assert!(r1.evals_used <= 64);
            let p2 = onemax(64, seed);
            let r2 = run_cofo(&p2, CofoMode::Greedy, seed).unwrap();
            assert_eq!(r1.log, r2.log);
        }
    }

    #[test]
    fn best_f_is_monotone_in_budget() {
        for seed in 0..20u64 {
            let mut prev = f64::NEG_INFINITY;
            for budget in [16, 64, 256] {
                let p = onemax(budget, seed);
                let run = run_cofo(&p, CofoMode::Greedy, seed).unwrap();
                assert!(run.best_f >= prev, "seed {seed} budget {budget}");
                prev = run.best_f;
            }
        }
    }

    #[test]
    fn dp_mode_respects_budget_and_reproduces() {
        let p1 = onemax(80, 5);
        let r1 = run_cofo(&p1, CofoMode::Dp, 5).unwrap();
        assert!(r1.evals_used <= 80);
        assert!(r1.dataset.len() <= r1.evals_used);
        let p2 = onemax(80, 5);
        let r2 = run_cofo(&p2, CofoMode::Dp, 5).unwrap();
        assert_eq!(r1.log, r2.log);
        assert_eq!(r1.best_f, r2.best_f);
    }

    #[test]
    fn saturated_space_terminates() {
        // Only two reachable points: pool {0} plus combinator output 1.
        let p = CofoProblem {
            objective: Box::new(|x: &u64| *x as f64),
            initial_pool: vec![0],
            combinators: vec![Box::new(|_, _, _| 1u64)],
            rho: 1.0,
            guidance: Guidance::BestSoFar,
            eval_budget: 100,
        };
        let run = run_cofo(&p, CofoMode::Greedy, 1).unwrap();
        assert_eq!(run.dataset.len(), 2);
        assert_eq!(run.best_f, 1.0);
    }

    #[test]
    fn budget_below_pool_is_rejected() {
        let p = onemax(4, 0);
        assert_eq!(
            run_cofo(&p, CofoMode::Greedy, 0).unwrap_err(),
            CofoError::BudgetBelowPool { budget: 4, pool: 8 }
        );
    }
}
