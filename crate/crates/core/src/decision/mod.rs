//! Discrete decision systems and combinatory function optimization.
//!
//! A [`Dds`] is a staged decision problem: at each stage the system observes
//! a state, picks one of finitely many feasible actions, collects an
//! immediate reward, and transitions (possibly stochastically). Three
//! executors are provided:
//!
//! * [`run_greedy`] — samples each action with probability proportional to
//!   `exp(reward / temperature)`; temperature zero is a deterministic argmax.
//! * [`solve_exact_dp`] — full backward induction over the reachable state
//!   space, exact expectations over enumerated outcomes.
//! * [`run_stochastic_dp`] — Monte-Carlo lookahead: action values estimated
//!   by uniform-policy rollouts, counter-seeded so results are independent
//!   of evaluation order.
//!
//! [`cofo`] wraps a combinatory system in a DDS whose actions evaluate an
//! objective at points produced by combining previously evaluated points,
//! rewarded by guidance gain. [`assoc`] checks the mutual-associativity
//! property that lets such processes be computed as folds, and verifies the
//! fold-order invariance it implies.

pub mod assoc;
pub mod cofo;
mod dds;
pub mod problems;

pub use assoc::{check_mutual_associativity, AssocCheck};
pub use cofo::{
    onemax_problem, run_cofo, CofoDataset, CofoError, CofoMode, CofoProblem, CofoRun, Guidance,
    StepOutcome, StepRecord,
};
pub use dds::{
    estimate_action_value, run_greedy, run_stochastic_dp, sample_outcome, solve_exact_dp, Dds,
    DdsError, Policy, Trajectory, DEFAULT_STATE_LIMIT,
};
pub use problems::{DeceptiveChain, Gridworld, TableDds};
