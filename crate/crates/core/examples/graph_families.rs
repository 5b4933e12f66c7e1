//! The trees `T_k`, fractional P3-decompositions and homomorphisms.

use monogamy::graph::{enumerate_tk, fractional_p3_decomposition, homomorphism_exists, is_in_some_tk, DEFAULT_TK_CAP};
use monogamy::report::describe_tree;
use monogamy::{named_graph, Graph, Result};

fn main() -> Result<()> {
    for k in 1..=4 {
        let names: Vec<String> = enumerate_tk(k, DEFAULT_TK_CAP)?
            .iter()
            .enumerate()
            .map(|(i, t)| describe_tree(t, &format!("T{k}:{i}")))
            .collect();
        println!("T_{k}: {}", names.join(", "));
    }

    for name in ["P3", "P4", "C4", "K4", "star-1,1,1"] {
        let g = named_graph(name)?;
        match fractional_p3_decomposition(&g)? {
            Some(d) => println!("{name}: decomposition {}", d.to_json()),
            None => println!("{name}: no fractional P3-decomposition (in some T_k: {})", is_in_some_tk(&g)),
        }
    }

    let target = Graph::path(2);
    for name in ["C4", "C5", "P6"] {
        println!("{name} -> P2: {}", homomorphism_exists(&named_graph(name)?, &target));
    }
    Ok(())
}
