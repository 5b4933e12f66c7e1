//! Exact classical values by exhaustive search over deterministic strategies,
//! strategy graphs, and the homomorphism criterion for classical values on
//! graphs.
//!
//! A deterministic single-player strategy `f: I -> O` is indexed by the
//! integer `Σ_x f(x)·|O|^x`. Shared randomness never helps (the value is
//! linear in the mixture), so maximising over deterministic assignments
//! gives the classical value.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::game::{extend_over_graph, Game};
use crate::graph::{homomorphism_exists, Graph};
use crate::rational::{self, Rational};

/// Default bound on predicate evaluations per search.
pub const DEFAULT_SEARCH_CAP: u64 = 1_000_000_000;

pub fn num_functions(game: &Game) -> Option<u64> {
    (game.num_answers() as u64).checked_pow(game.num_questions() as u32)
}

/// Answer table of strategy index `f`.
pub fn function_table(game: &Game, f: u64) -> Vec<usize> {
    let o = game.num_answers() as u64;
    let mut rest = f;
    (0..game.num_questions())
        .map(|_| {
            let a = rest % o;
            rest /= o;
            a as usize
        })
        .collect()
}

pub fn function_index(game: &Game, table: &[usize]) -> u64 {
    let o = game.num_answers() as u64;
    table.iter().rev().fold(0, |acc, &a| acc * o + a as u64)
}

/// Integer form of a game: weights over a common denominator.
struct Scored<'a> {
    game: &'a Game,
    w: Vec<u64>,
    den: u64,
}

impl<'a> Scored<'a> {
    fn new(game: &'a Game) -> Self {
        let (w, den) = game.integer_weights();
        Scored { game, w, den }
    }

    fn q(&self) -> usize {
        self.game.num_questions()
    }

    fn pair(&self, f: &[usize], g: &[usize]) -> u64 {
        let q = self.q();
        let mut s = 0;
        for x1 in 0..q {
            for x2 in 0..q {
                let w = self.w[x1 * q + x2];
                if w != 0 && self.game.wins(x1, x2, f[x1], g[x2]) {
                    s += w;
                }
            }
        }
        s
    }

    /// Best total score of one player against fixed partners, each partner
    /// sitting on its own edge.
    fn best_response(&self, partners: &[&[usize]]) -> (u64, Vec<usize>) {
        let (q, o) = (self.q(), self.game.num_answers());
        let mut total = 0;
        let mut table = vec![0; q];
        for y in 0..q {
            let mut best = (0, 0);
            for b in 0..o {
                let mut s = 0;
                for f in partners {
                    for x in 0..q {
                        let w = self.w[x * q + y];
                        if w != 0 && self.game.wins(x, y, f[x], b) {
                            s += w;
                        }
                    }
                }
                if s > best.0 || b == 0 {
                    best = (s, b);
                }
            }
            total += best.0;
            table[y] = best.1;
        }
        (total, table)
    }

    fn rational(&self, num: u64, edges: u64) -> Rational {
        Rational::new(BigInt::from(num), BigInt::from(self.den) * BigInt::from(edges))
    }
}

fn capacity(what: &str, needed: u128, cap: u64) -> Error {
    Error::Capacity(format!("{what} needs about {needed} predicate evaluations, cap is {cap}"))
}

/// `ω(G)`: the best deterministic pair, found by enumerating the first
/// player's strategy and best-responding per question for the second.
pub fn classical_value(game: &Game) -> Result<Rational> {
    classical_value_with_cap(game, DEFAULT_SEARCH_CAP)
}

pub fn classical_value_with_cap(game: &Game, cap: u64) -> Result<Rational> {
    Ok(optimal_pair(game, cap)?.0)
}

/// The value together with an optimal pair of answer tables.
pub fn optimal_pair(game: &Game, cap: u64) -> Result<(Rational, Vec<usize>, Vec<usize>)> {
    let (q, o) = (game.num_questions() as u128, game.num_answers() as u128);
    let n = num_functions(game).ok_or_else(|| capacity("classical value", u128::MAX, cap))?;
    let work = n as u128 * q * q * o;
    if work > cap as u128 {
        return Err(capacity("classical value", work, cap));
    }
    let scored = Scored::new(game);
    let mut best: Option<(u64, Vec<usize>, Vec<usize>)> = None;
    for f in 0..n {
        let fa = function_table(game, f);
        let (s, fb) = scored.best_response(&[&fa]);
        if best.as_ref().map_or(true, |b| s > b.0) {
            best = Some((s, fa, fb));
        }
    }
    let (s, fa, fb) = best.expect("at least one strategy");
    Ok((scored.rational(s, 1), fa, fb))
}

/// Graph on deterministic strategies: an edge (or loop) joins `f` and `g`
/// when the pair attains `ω(G)`.
#[derive(Clone, Debug)]
pub struct StrategyGraph {
    pub graph: Graph,
    pub value: Rational,
}

pub fn strategy_graph(game: &Game) -> Result<StrategyGraph> {
    strategy_graph_with_cap(game, DEFAULT_SEARCH_CAP)
}

pub fn strategy_graph_with_cap(game: &Game, cap: u64) -> Result<StrategyGraph> {
    let q = game.num_questions() as u128;
    let n = num_functions(game).ok_or_else(|| capacity("strategy graph", u128::MAX, cap))?;
    let work = (n as u128).pow(2) * q * q / 2;
    if work > cap as u128 || n > u32::MAX as u64 {
        return Err(capacity("strategy graph", work, cap));
    }
    let scored = Scored::new(game);
    let tables: Vec<Vec<usize>> = (0..n).map(|f| function_table(game, f)).collect();
    let n = n as usize;
    let mut values = vec![0u64; n * n];
    let mut best = 0;
    for f in 0..n {
        for g in f..n {
            let s = scored.pair(&tables[f], &tables[g]);
            values[f * n + g] = s;
            best = best.max(s);
        }
    }
    let mut graph = Graph::empty(n);
    for f in 0..n {
        if values[f * n + f] == best {
            graph.set_loop(f);
        }
        for g in f + 1..n {
            if values[f * n + g] == best {
                graph.add_edge(f, g);
            }
        }
    }
    Ok(StrategyGraph {
        graph,
        value: scored.rational(best, 1),
    })
}

/// One answer table per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterministicAssignment {
    pub tables: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct GraphOptimum {
    pub value: Rational,
    pub assignment: DeterministicAssignment,
}

/// `ω(G^H)`.
pub fn classical_value_on_graph(game: &Game, h: &Graph) -> Result<Rational> {
    Ok(optimal_assignment_on_graph(game, h, DEFAULT_SEARCH_CAP)?.value)
}

fn min_vertex_cover(h: &Graph) -> Vec<usize> {
    let n = h.num_vertices();
    let edges = h.edges();
    if n <= 20 {
        let mut best: Option<u32> = None;
        for mask in 0u32..(1 << n) {
            if best.is_some_and(|b| mask.count_ones() >= b.count_ones()) {
                continue;
            }
            if edges.iter().all(|&(u, v)| mask >> u & 1 == 1 || mask >> v & 1 == 1) {
                best = Some(mask);
            }
        }
        let mask = best.unwrap_or(0);
        return (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    }
    let mut chosen = vec![false; n];
    let mut uncovered = edges;
    while !uncovered.is_empty() {
        let mut count = vec![0usize; n];
        for &(u, v) in &uncovered {
            count[u] += 1;
            count[v] += 1;
        }
        let pick = (0..n).max_by_key(|&v| (count[v], std::cmp::Reverse(v))).unwrap();
        chosen[pick] = true;
        uncovered.retain(|&(u, v)| u != pick && v != pick);
    }
    (0..n).filter(|&v| chosen[v]).collect()
}

/// Exhaustive search over a minimum vertex cover `S`; vertices outside `S`
/// only neighbour `S` and are best-responded question by question.
/// Assignments on `S` are visited in lexicographic order of strategy
/// indices and the first optimum is kept.
pub fn optimal_assignment_on_graph(game: &Game, h: &Graph, cap: u64) -> Result<GraphOptimum> {
    let gg = extend_over_graph(game, h)?;
    let h = &gg.graph;
    let (q, o) = (game.num_questions() as u128, game.num_answers() as u128);
    let n_f = num_functions(game).ok_or_else(|| capacity("graph value", u128::MAX, cap))?;
    let cover = min_vertex_cover(h);
    let in_cover: Vec<bool> = (0..h.num_vertices()).map(|v| cover.contains(&v)).collect();
    let inner: Vec<(usize, usize)> =
        h.edges().into_iter().filter(|&(u, v)| in_cover[u] && in_cover[v]).collect();
    let outer: Vec<usize> = (0..h.num_vertices()).filter(|&v| !in_cover[v]).collect();
    let per = inner.len() as u128 * q * q
        + outer.iter().map(|&t| h.degree(t) as u128).sum::<u128>() * q * q * o;
    let work = (n_f as u128)
        .checked_pow(cover.len() as u32)
        .and_then(|c| c.checked_mul(per.max(1)))
        .unwrap_or(u128::MAX);
    if work > cap as u128 {
        return Err(capacity("graph value", work, cap));
    }

    let scored = Scored::new(game);
    let tables: Vec<Vec<usize>> = (0..n_f).map(|f| function_table(game, f)).collect();
    let small = n_f <= 1 << 11;
    let pair_table: Vec<u64> = if small && !inner.is_empty() {
        let n = n_f as usize;
        let mut t = vec![0; n * n];
        for f in 0..n {
            for g in 0..n {
                t[f * n + g] = scored.pair(&tables[f], &tables[g]);
            }
        }
        t
    } else {
        Vec::new()
    };
    let pair = |f: usize, g: usize| -> u64 {
        if pair_table.is_empty() {
            scored.pair(&tables[f], &tables[g])
        } else {
            pair_table[f * n_f as usize + g]
        }
    };

    let mut choice = vec![0usize; cover.len()];
    let mut slot = vec![usize::MAX; h.num_vertices()];
    for (i, &v) in cover.iter().enumerate() {
        slot[v] = i;
    }
    let mut best: Option<(u64, Vec<Vec<usize>>)> = None;
    loop {
        let mut score: u64 = inner.iter().map(|&(u, v)| pair(choice[slot[u]], choice[slot[v]])).sum();
        let mut outer_tables = Vec::with_capacity(outer.len());
        for &t in &outer {
            let partners: Vec<&[usize]> =
                h.neighbors(t).iter().map(|&u| tables[choice[slot[u]]].as_slice()).collect();
            let (s, table) = scored.best_response(&partners);
            score += s;
            outer_tables.push(table);
        }
        if best.as_ref().map_or(true, |b| score > b.0) {
            let mut assignment = vec![Vec::new(); h.num_vertices()];
            for (i, &v) in cover.iter().enumerate() {
                assignment[v] = tables[choice[i]].clone();
            }
            for (table, &t) in outer_tables.into_iter().zip(&outer) {
                assignment[t] = table;
            }
            best = Some((score, assignment));
        }
        // Odometer over the cover, last cover vertex fastest.
        let mut i = cover.len();
        loop {
            if i == 0 {
                let (score, tables) = best.expect("at least one assignment");
                return Ok(GraphOptimum {
                    value: scored.rational(score, h.num_edges() as u64),
                    assignment: DeterministicAssignment { tables },
                });
            }
            i -= 1;
            choice[i] += 1;
            if (choice[i] as u64) < n_f {
                break;
            }
            choice[i] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Report {
    #[serde(serialize_with = "rational::serialize")]
    pub omega_classical: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub omega_graph: Rational,
    pub hom_exists: bool,
    pub lemma1_consistent: bool,
}

/// Checks `ω(G^H) = ω(G)` against the existence of a homomorphism
/// `H -> S_G`.
pub fn verify_lemma1(game: &Game, h: &Graph) -> Result<Lemma1Report> {
    if h.num_edges() == 0 {
        return Err(invalid!("the value and homomorphism comparison needs a graph with at least one edge"));
    }
    let omega_classical = classical_value(game)?;
    let omega_graph = classical_value_on_graph(game, h)?;
    let sg = strategy_graph(game)?;
    let hom_exists = homomorphism_exists(h, &sg.graph);
    Ok(Lemma1Report {
        lemma1_consistent: (omega_classical == omega_graph) == hom_exists,
        omega_classical,
        omega_graph,
        hom_exists,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{always_lose, always_win, anti_correlation, chsh, odd_cycle};
    use crate::graph::is_isomorphic;
    use crate::rational::ratio;

    #[test]
    fn base_values() {
        assert_eq!(classical_value(&chsh()).unwrap(), ratio(3, 4));
        assert_eq!(classical_value(&odd_cycle(3).unwrap()).unwrap(), ratio(5, 6));
        assert_eq!(classical_value(&always_win(2, 3)).unwrap(), ratio(1, 1));
        assert_eq!(classical_value(&always_lose(2, 2)).unwrap(), ratio(0, 1));
        assert_eq!(classical_value(&anti_correlation()).unwrap(), ratio(1, 1));
    }

    #[test]
    fn strategy_graphs() {
        let sg = strategy_graph(&chsh()).unwrap();
        let expected = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)], &[0, 3]).unwrap();
        assert!(is_isomorphic(&sg.graph, &expected));

        let anti = strategy_graph(&anti_correlation()).unwrap();
        assert_eq!(anti.graph.edges(), vec![(0, 1)]);
        assert!(!anti.graph.has_any_loop());

        let all = strategy_graph(&always_win(2, 2)).unwrap();
        assert_eq!(all.graph.num_edges(), 6);
        assert_eq!(all.graph.loops().len(), 4);
    }

    #[test]
    fn graph_values() {
        let g = chsh();
        for h in [Graph::path(2), Graph::path(3), Graph::path(4), Graph::cycle(3)] {
            assert_eq!(classical_value_on_graph(&g, &h).unwrap(), ratio(3, 4));
        }
        let anti = anti_correlation();
        assert_eq!(classical_value_on_graph(&anti, &Graph::cycle(3)).unwrap(), ratio(2, 3));
        let opt = optimal_assignment_on_graph(&anti, &Graph::cycle(5), DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(opt.value, ratio(4, 5));
        let gg = extend_over_graph(&anti, &Graph::cycle(5)).unwrap();
        assert_eq!(gg.assignment_value(&opt.assignment.tables).unwrap(), opt.value);
    }

    #[test]
    fn function_indexing_round_trips() {
        let g = odd_cycle(3).unwrap();
        for f in 0..8 {
            assert_eq!(function_index(&g, &function_table(&g, f)), f);
        }
    }

    #[test]
    fn lemma1_cases() {
        let r = verify_lemma1(&chsh(), &Graph::cycle(3)).unwrap();
        assert!(r.hom_exists && r.lemma1_consistent);
        assert_eq!(r.omega_graph, ratio(3, 4));

        let r = verify_lemma1(&anti_correlation(), &Graph::cycle(3)).unwrap();
        assert!(!r.hom_exists && r.lemma1_consistent);
        assert_ne!(r.omega_classical, r.omega_graph);

        let r = verify_lemma1(&chsh(), &Graph::path(2)).unwrap();
        assert!(r.lemma1_consistent);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["omega_classical"], "3/4");
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(classical_value_with_cap(&chsh(), 10), Err(Error::Capacity(_))));
        let ms = crate::game::magic_square();
        assert!(matches!(strategy_graph(&ms), Err(Error::Capacity(_))));
    }
}
