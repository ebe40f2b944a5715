//! Randomized check that cost-associativity bounds the subpattern order.
//!
//! Each trial draws a random mutually associative combination system,
//! measures its cost-associativity deviation `c`, and verifies that the
//! strict subpattern relation is an approximate partial order at bound `c`.
//!
//! Two generator families are mixed:
//!
//! * *Run systems*: entities are runs `r1..rL` of a single symbol with
//!   concatenation (`ri + rj -> r(i+j)` where the result fits), random
//!   argument-dependent costs, and convex length-priced base costs. Chains
//!   `x <= y <= z` are dense here, so the transitivity bound is exercised
//!   thousands of times per batch.
//! * *Translation systems*: entities `0..m` with up to three operators
//!   `x + y + k (mod m)` and coherent base costs (re-anchored at the solved
//!   simplicity), exercising the multi-operator associativity scan.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::pattern::{check_approx_cost_associativity, check_approx_partial_order};
use super::system::{CombinationSystem, EntityId};
use crate::rng;

/// Aggregate outcome of a batch of trials.
#[derive(Clone, Debug, PartialEq)]
pub struct Thm2Summary {
    pub trials: usize,
    pub violations: usize,
    /// Chains `x <= y <= z` whose transitivity bound was checked.
    pub chains_checked: usize,
    /// Strict subpattern pairs seen across all systems.
    pub relation_pairs: usize,
    /// Largest measured cost-associativity deviation.
    pub max_deviation: f64,
    /// Description of the first violating system, if any.
    pub first_violation: Option<String>,
}

/// Runs `trials` randomized Theorem-2 checks from `seed`.
pub fn run_thm2_trials(trials: usize, seed: u64) -> Thm2Summary {
    let mut summary = Thm2Summary {
        trials,
        violations: 0,
        chains_checked: 0,
        relation_pairs: 0,
        max_deviation: 0.0,
        first_violation: None,
    };
    for trial in 0..trials {
        let mut stream = rng::substream(seed, trial as u64);
        let sys = if stream.gen_bool(0.7) {
            random_run_system(&mut stream)
        } else {
            random_translation_system(&mut stream)
        };
        let report = check_approx_cost_associativity(&sys)
            .expect("generated systems are mutually associative");
        summary.max_deviation = summary.max_deviation.max(report.max_deviation);
        let check = check_approx_partial_order(&sys, report.max_deviation)
            .expect("base costs are finite");
        summary.chains_checked += check.chains_checked;
        summary.relation_pairs += check.relation_size;
        if !check.holds {
            summary.violations += 1;
            if summary.first_violation.is_none() {
                summary.first_violation = Some(format!(
                    "trial {trial}: {:?} at deviation {}",
                    check.violation, report.max_deviation
                ));
            }
        }
    }
    summary
}

/// Runs `r1..rL` under concatenation with convex base pricing. Convexity
/// makes every composition a strict pattern while keeping the order bound
/// safe for any cost draw in `[0, 2]`.
pub fn random_run_system(stream: &mut ChaCha8Rng) -> CombinationSystem {
    let max_len = stream.gen_range(4..=10usize);
    let mut b = CombinationSystem::builder();

    // Base costs phi(n) with nondecreasing increments and a +2 margin per
    // step: phi(a+b) - phi(a) - phi(b) >= 2 = the cost ceiling.
    let phi1 = 1.0 + stream.gen_range(0.0..1.0);
    let mut phi = vec![0.0; max_len + 1];
    phi[1] = phi1;
    let mut increment = 0.0;
    for n in 2..=max_len {
        increment += stream.gen_range(0.0..0.5);
        phi[n] = phi[n - 1] + phi1 + 2.0 + increment;
    }

    let ids: Vec<EntityId> = (1..=max_len)
        .map(|n| b.entity(&format!("r{n}"), phi[n]).unwrap())
        .collect();
    for i in 1..=max_len {
        for j in 1..=max_len {
            if i + j <= max_len {
                let cost = stream.gen_range(0.0..2.0);
                b.production(0, ids[i - 1], ids[j - 1], ids[i + j - 1], cost).unwrap();
            }
        }
    }
    b.build()
}

/// Entities `0..m` under `x + y + k (mod m)` for one to three distinct `k`,
/// base costs re-anchored at the solved simplicity so the assignment is
/// compositionally coherent.
pub fn random_translation_system(stream: &mut ChaCha8Rng) -> CombinationSystem {
    let m = stream.gen_range(3..=10usize);
    let num_ops = stream.gen_range(1..=3usize);
    let mut ks: Vec<usize> = (0..m).collect();
    for i in (1..ks.len()).rev() {
        let j = stream.gen_range(0..=i);
        ks.swap(i, j);
    }
    ks.truncate(num_ops);

    let raw_base: Vec<f64> = (0..m).map(|_| stream.gen_range(1.0..10.0)).collect();
    let costs: Vec<Vec<Vec<f64>>> = (0..num_ops)
        .map(|_| {
            (0..m)
                .map(|_| (0..m).map(|_| stream.gen_range(0.0..2.0)).collect())
                .collect()
        })
        .collect();

    let build = |base: &[f64]| {
        let mut b = CombinationSystem::builder();
        let ids: Vec<EntityId> = (0..m)
            .map(|i| b.entity(&format!("e{i}"), base[i]).unwrap())
            .collect();
        for (op, &k) in ks.iter().enumerate() {
            for y in 0..m {
                for z in 0..m {
                    b.production(op, ids[y], ids[z], ids[(y + z + k) % m], costs[op][y][z])
                        .unwrap();
                }
            }
        }
        b.build()
    };

    let provisional = build(&raw_base);
    let solved = provisional.solve_cosm().expect("finite raw bases");
    build(solved.values())
}
