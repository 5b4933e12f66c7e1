//! Monogamy of nonlocal games over graphs.
//!
//! Exact classical values and strategy graphs, graph machinery (homomorphisms,
//! `T_k` families, fractional `P3`-decompositions), NPA semidefinite upper
//! bounds, exact sum-of-squares verification over `Q(√2, √5)` and explicit
//! quantum strategies.

pub mod classical;
pub mod error;
pub mod game;
pub mod graph;
pub mod lp;
pub mod npa;
pub mod quantum;
pub mod rational;
pub mod report;
pub mod sos;
pub mod word;

pub use error::{Error, Result};
pub use game::{Game, GraphGame};
pub use graph::{named_graph, Graph};
pub use rational::Rational;
