//! The four-player CHSH strategy on P4: edge biases, value and the partial
//! transpose of every two-party reduction.

use monogamy::game::{chsh, extend_over_graph};
use monogamy::quantum::constructions::{chain_biases, p4_observables};
use monogamy::quantum::{build_p4_strategy, ppt_min_eigenvalue, strategy_value};
use monogamy::{Graph, Result};

fn main() -> Result<()> {
    let s = build_p4_strategy();
    println!("biases {:?}", chain_biases(&s.state, &p4_observables())?);
    let gg = extend_over_graph(&chsh(), &Graph::path(4))?;
    println!("value {:.12} (1/2 + sqrt(10)/12 = {:.12})", strategy_value(&gg, &s)?, 0.5 + 10f64.sqrt() / 12.0);

    let names = ["A", "B", "C", "D"];
    for u in 0..4 {
        for v in u + 1..4 {
            let rho = s.state.partial_trace(&[u, v])?;
            println!("rho_{}{}: min eigenvalue of the partial transpose {:+.6}", names[u], names[v], ppt_min_eigenvalue(&rho, &[0])?);
        }
    }
    Ok(())
}
