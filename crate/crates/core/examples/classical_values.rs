//! Exact classical values of base games and of their extensions over graphs.

use monogamy::classical::{classical_value, classical_value_on_graph, strategy_graph, verify_lemma1};
use monogamy::game::named_game;
use monogamy::rational::format_rational;
use monogamy::{named_graph, Result};

fn main() -> Result<()> {
    for name in ["chsh", "oc3", "oc5", "anti"] {
        let game = named_game(name)?;
        println!("omega({name}) = {}", format_rational(&classical_value(&game)?));
    }

    let chsh = named_game("chsh")?;
    let sg = strategy_graph(&chsh)?;
    println!("S_chsh: {} vertices, edges {:?}, loops {:?}", sg.graph.num_vertices(), sg.graph.edges(), sg.graph.loops());

    for h in ["P3", "P4", "C3", "C5", "star-1,2,2"] {
        let graph = named_graph(h)?;
        let r = verify_lemma1(&chsh, &graph)?;
        println!(
            "omega(chsh^{h}) = {}, homomorphism to S_chsh: {}",
            format_rational(&classical_value_on_graph(&chsh, &graph)?),
            r.hom_exists
        );
    }
    Ok(())
}
