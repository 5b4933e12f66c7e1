//! Explicit quantum strategies on graph games.

pub mod constructions;
pub mod linalg;
pub mod state;
pub mod strategy;

pub use constructions::{
    build_p4_strategy, build_polygamy_strategy, magic_square_strategy, p4_state, p4_state_from_swaps,
    tsirelson_strategy,
};
pub use linalg::{hermitian_eigenvalues, CMat};
pub use state::{ppt_min_eigenvalue, DensityMatrix, PureState, State};
pub use strategy::{strategy_value, QuantumStrategy};
