//! NPA upper bounds for CHSH played over small graphs.

use monogamy::game::{chsh, extend_over_graph};
use monogamy::npa::{quantum_upper_bound, Level, DEFAULT_TOL};
use monogamy::{named_graph, Result};

fn main() -> Result<()> {
    for (graph, level) in [("P2", Level::ONE), ("P3", Level::ONE_EDGE_PAIRS), ("P4", Level::TWO), ("P6", Level::TWO)] {
        let gg = extend_over_graph(&chsh(), &named_graph(graph)?)?;
        let r = quantum_upper_bound(&gg, level, DEFAULT_TOL)?;
        println!("{graph} at level {level}: {}", r.to_json());
    }
    Ok(())
}
