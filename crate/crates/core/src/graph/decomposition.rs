//! Line graphs, fractional perfect matchings and fractional
//! `P3`-decompositions.
//!
//! Edges of `H` are the vertices of `L(H)`, and a `P3` subgraph of `H` is a
//! pair of edges sharing an endpoint, i.e. an edge of `L(H)`. A fractional
//! `P3`-decomposition of `H` is therefore exactly a fractional perfect
//! matching of `L(H)` read back through this correspondence.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::Graph;
use crate::error::{invalid, Result};
use crate::lp::{feasible_point, LpOutcome};
use crate::rational::{format_rational, Rational};

/// Line graph; vertex `i` is the `i`-th edge of `h.edges()`.
pub fn line_graph(h: &Graph) -> Result<Graph> {
    if !h.is_simple() {
        return Err(invalid!("line graph needs a loop-free graph"));
    }
    let edges = h.edges();
    let mut l = Graph::empty(edges.len());
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if a == c || a == d || b == c || b == d {
                l.add_edge(i, j);
            }
        }
    }
    Ok(l)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    /// Weight of every (non-loop) edge, zeros included.
    pub weights: BTreeMap<(usize, usize), Rational>,
}

impl Matching {
    /// Exact check of nonnegativity and unit vertex sums.
    pub fn is_valid_for(&self, h: &Graph) -> bool {
        let mut sums = vec![Rational::zero(); h.num_vertices()];
        for (&(u, v), w) in &self.weights {
            if w.is_negative() || w > &Rational::one() || !h.has_edge(u, v) || u == v {
                return false;
            }
            sums[u] += w;
            sums[v] += w;
        }
        sums.iter().all(One::is_one)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatchingOutcome {
    Found(Matching),
    /// Farkas certificate indexed by vertex: `y_u + y_v <= 0` on every edge
    /// while `Σ y_v > 0`.
    Infeasible(Vec<Rational>),
}

/// Solves the fractional perfect matching LP exactly. Loops are ignored.
pub fn solve_fractional_perfect_matching(h: &Graph) -> MatchingOutcome {
    let edges = h.edges();
    let n = h.num_vertices();
    let mut a = vec![vec![Rational::zero(); edges.len()]; n];
    for (j, &(u, v)) in edges.iter().enumerate() {
        a[u][j] = Rational::one();
        a[v][j] = Rational::one();
    }
    let b = vec![Rational::one(); n];
    match feasible_point(&a, &b) {
        LpOutcome::Feasible(x) => MatchingOutcome::Found(Matching {
            weights: edges.into_iter().zip(x).collect(),
        }),
        LpOutcome::Infeasible(y) => MatchingOutcome::Infeasible(y),
    }
}

pub fn fractional_perfect_matching(h: &Graph) -> Option<Matching> {
    match solve_fractional_perfect_matching(h) {
        MatchingOutcome::Found(m) => Some(m),
        MatchingOutcome::Infeasible(_) => None,
    }
}

/// A `P3` subgraph: its centre and the two outer vertices (`leaves.0 < leaves.1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct P3Key {
    pub center: usize,
    pub leaves: (usize, usize),
}

impl P3Key {
    pub fn new(center: usize, a: usize, b: usize) -> Self {
        P3Key {
            center,
            leaves: (a.min(b), a.max(b)),
        }
    }

    pub fn edges(&self) -> [(usize, usize); 2] {
        let c = self.center;
        let (a, b) = self.leaves;
        [(c.min(a), c.max(a)), (c.min(b), c.max(b))]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P3Decomposition {
    pub weights: BTreeMap<P3Key, Rational>,
}

impl P3Decomposition {
    /// Exact check: weights in `[0, 1]` and every edge covered with total
    /// weight exactly one.
    pub fn is_valid_for(&self, h: &Graph) -> bool {
        let mut cover: BTreeMap<(usize, usize), Rational> =
            h.edges().into_iter().map(|e| (e, Rational::zero())).collect();
        for (key, w) in &self.weights {
            if w.is_negative() || w > &Rational::one() {
                return false;
            }
            for e in key.edges() {
                match cover.get_mut(&e) {
                    Some(total) => *total += w,
                    None => return false,
                }
            }
        }
        cover.values().all(One::is_one)
    }

    /// `[{"center": c, "leaves": [a, b], "weight": "p/q"}, ...]`
    pub fn to_json(&self) -> serde_json::Value {
        self.weights
            .iter()
            .map(|(k, w)| {
                serde_json::json!({
                    "center": k.center,
                    "leaves": [k.leaves.0, k.leaves.1],
                    "weight": format_rational(w),
                })
            })
            .collect()
    }

    /// Weight of the `P3` with the given centre and outer vertices.
    pub fn weight(&self, center: usize, a: usize, b: usize) -> Rational {
        self.weights
            .get(&P3Key::new(center, a, b))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// Fractional `P3`-decomposition of a connected loop-free graph, obtained
/// from a fractional perfect matching of its line graph.
pub fn fractional_p3_decomposition(h: &Graph) -> Result<Option<P3Decomposition>> {
    if !h.is_connected() {
        return Err(invalid!("fractional P3-decomposition needs a connected graph"));
    }
    let edges = h.edges();
    let l = line_graph(h)?;
    let Some(matching) = fractional_perfect_matching(&l) else {
        return Ok(None);
    };
    let weights = matching
        .weights
        .into_iter()
        .map(|((i, j), w)| {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            let key = if a == c {
                P3Key::new(a, b, d)
            } else if a == d {
                P3Key::new(a, b, c)
            } else if b == c {
                P3Key::new(b, a, d)
            } else {
                P3Key::new(b, a, c)
            };
            (key, w)
        })
        .collect();
    Ok(Some(P3Decomposition { weights }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_isomorphic;

    fn q(p: i64, r: i64) -> Rational {
        Rational::new(p.into(), r.into())
    }

    #[test]
    fn line_graphs() {
        assert!(is_isomorphic(&line_graph(&Graph::path(4)).unwrap(), &Graph::path(3)));
        assert!(is_isomorphic(&line_graph(&Graph::cycle(3)).unwrap(), &Graph::cycle(3)));
        // Three hub edges pairwise adjacent, two pendant edges hanging off.
        let l = line_graph(&Graph::star(&[1, 2, 2])).unwrap();
        let expected =
            Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)], &[]).unwrap();
        assert!(is_isomorphic(&l, &expected));
        let looped = Graph::from_edges(2, &[(0, 1)], &[0]).unwrap();
        assert!(line_graph(&looped).is_err());
    }

    #[test]
    fn matchings() {
        let m = fractional_perfect_matching(&Graph::path(2)).unwrap();
        assert_eq!(m.weights[&(0, 1)], q(1, 1));

        match solve_fractional_perfect_matching(&Graph::path(3)) {
            MatchingOutcome::Infeasible(y) => {
                for (u, v) in Graph::path(3).edges() {
                    assert!(!(&y[u] + &y[v]).is_positive());
                }
                assert!(y.iter().sum::<Rational>().is_positive());
            }
            other => panic!("P3 has no fractional perfect matching, got {other:?}"),
        }

        let m = fractional_perfect_matching(&Graph::cycle(3)).unwrap();
        assert!(m.weights.values().all(|w| *w == q(1, 2)));
        assert!(m.is_valid_for(&Graph::cycle(3)));
    }

    #[test]
    fn decompositions() {
        let c3 = Graph::cycle(3);
        let d = fractional_p3_decomposition(&c3).unwrap().unwrap();
        assert_eq!(d.weights.len(), 3);
        assert!(d.weights.values().all(|w| *w == q(1, 2)));
        assert!(d.is_valid_for(&c3));

        assert_eq!(fractional_p3_decomposition(&Graph::path(4)).unwrap(), None);

        let p5 = Graph::path(5);
        let d = fractional_p3_decomposition(&p5).unwrap().unwrap();
        assert_eq!(d.weight(1, 0, 2), q(1, 1));
        assert_eq!(d.weight(2, 1, 3), q(0, 1));
        assert_eq!(d.weight(3, 2, 4), q(1, 1));
        assert!(d.is_valid_for(&p5));

        let split = Graph::from_edges(4, &[(0, 1), (2, 3)], &[]).unwrap();
        assert!(fractional_p3_decomposition(&split).is_err());
    }
}
