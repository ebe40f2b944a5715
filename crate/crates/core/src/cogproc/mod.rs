//! Concrete cognitive processes over the metagraph, framed as decision
//! processes: attention spreading (a greedy stagewise rule), agglomerative
//! clustering (greedy merge decisions over partitions), and pattern mining
//! (iterated template combination scored by compositional intensity).

pub mod cluster;
pub mod ecan;
pub mod mine;

pub use cluster::{agglomerative_cluster, ClusterModel, ClusterStop};
pub use ecan::{attentional_focus, ecan_spread, EcanParams};
pub use mine::{mine_patterns, MineConfig, MinedPattern, Template};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CogprocError {
    #[error("input point set is empty")]
    EmptyInput,
    #[error("cluster count {k} exceeds the number of points {n}")]
    TooManyClusters { k: usize, n: usize },
    #[error("points have mismatched dimensions")]
    DimensionMismatch,
    #[error("parameter {name} = {value} outside {range}")]
    BadParameter { name: &'static str, value: f64, range: &'static str },
    #[error("importance values must be finite")]
    NonFiniteImportance,
    #[error("template size {0} exceeds the supported maximum of 4 edges")]
    TemplateTooLarge(usize),
}
