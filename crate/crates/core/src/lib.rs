//! Cognitive-algorithms kernel: typed metagraphs with distinction-graph
//! semantics, paraconsistent/probabilistic truth values, compositional
//! simplicity and pattern theory, discrete decision systems with
//! combinatory-operation function optimization, concrete cognitive processes
//! (attention spreading, clustering, pattern mining), and Monte-Carlo
//! estimators of machine-intelligence functionals over finite environment
//! classes.
//!
//! Everything stochastic takes an explicit seed and is bit-reproducible;
//! see [`rng`] for the counter-based stream discipline.

pub mod decision;
pub mod logic;
pub mod metagraph;
pub mod rng;
pub mod simplicity;
