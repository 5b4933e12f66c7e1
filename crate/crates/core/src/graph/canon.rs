//! Canonical labelling of small graphs by colour refinement followed by a
//! pruned search over orderings within colour cells, and isomorphism-free
//! generation of connected graphs by vertex extension.

use std::collections::{BTreeMap, HashSet};

use super::Graph;

/// Canonical code: row `p` holds the adjacency of position `p` to positions
/// `0..=p` (bit `p` is the loop). Two graphs on the same vertex count are
/// isomorphic iff their codes are equal.
pub type Code = Vec<u32>;

const MAX_CANON_VERTICES: usize = 32;

fn refine(g: &Graph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut colour: Vec<usize> = {
        let keys: Vec<(bool, usize)> = (0..n).map(|v| (g.has_loop(v), g.degree(v))).collect();
        relabel(&keys)
    };
    let mut classes = count_distinct(&colour);
    loop {
        let keys: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nc: Vec<usize> = g.neighbors(v).iter().map(|&w| colour[w]).collect();
                nc.sort_unstable();
                (colour[v], nc)
            })
            .collect();
        let next = relabel(&keys);
        let next_classes = count_distinct(&next);
        colour = next;
        if next_classes == classes {
            return colour;
        }
        classes = next_classes;
    }
}

fn relabel<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    let index: BTreeMap<K, usize> = sorted.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    keys.iter().map(|k| index[k]).collect()
}

fn count_distinct(colour: &[usize]) -> usize {
    colour.iter().collect::<HashSet<_>>().len()
}

struct Search<'a> {
    g: &'a Graph,
    cell_of_position: Vec<usize>,
    cells: Vec<Vec<usize>>,
    order: Vec<usize>,
    used: Vec<bool>,
    rows: Vec<u32>,
    best: Option<Code>,
}

impl Search<'_> {
    fn row(&self, p: usize, v: usize) -> u32 {
        let mut bits = 0u32;
        for (q, &w) in self.order[..p].iter().enumerate() {
            if self.g.has_edge(v, w) {
                bits |= 1 << q;
            }
        }
        if self.g.has_loop(v) {
            bits |= 1 << p;
        }
        bits
    }

    fn go(&mut self, p: usize) {
        let n = self.g.num_vertices();
        if p == n {
            if self.best.as_ref().map_or(true, |best| self.rows < *best) {
                self.best = Some(self.rows.clone());
            }
            return;
        }
        let cell = self.cell_of_position[p];
        for i in 0..self.cells[cell].len() {
            let v = self.cells[cell][i];
            if self.used[v] {
                continue;
            }
            let row = self.row(p, v);
            // The current prefix never exceeds the best code's prefix.
            if let Some(best) = &self.best {
                if self.rows[..] == best[..p] && row > best[p] {
                    continue;
                }
            }
            self.order.push(v);
            self.used[v] = true;
            self.rows.push(row);
            self.go(p + 1);
            self.rows.pop();
            self.used[v] = false;
            self.order.pop();
        }
    }
}

/// Canonical code of a graph on at most 32 vertices.
pub fn canonical_code(g: &Graph) -> Code {
    let n = g.num_vertices();
    assert!(n <= MAX_CANON_VERTICES, "canonical form limited to {MAX_CANON_VERTICES} vertices");
    let colour = refine(g);
    let ncells = colour.iter().max().map_or(0, |&c| c + 1);
    let mut cells = vec![Vec::new(); ncells];
    for v in 0..n {
        cells[colour[v]].push(v);
    }
    let cell_of_position: Vec<usize> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, members)| std::iter::repeat(c).take(members.len()))
        .collect();
    let mut search = Search {
        g,
        cell_of_position,
        cells,
        order: Vec::with_capacity(n),
        used: vec![false; n],
        rows: Vec::with_capacity(n),
        best: None,
    };
    search.go(0);
    search.best.unwrap_or_default()
}

pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    a.num_vertices() == b.num_vertices()
        && a.num_edges() == b.num_edges()
        && a.loops().len() == b.loops().len()
        && canonical_code(a) == canonical_code(b)
}

/// Graph whose vertex `p` is position `p` of a canonical code.
pub(crate) fn graph_from_code(code: &Code) -> Graph {
    let n = code.len();
    let mut g = Graph::empty(n);
    for (p, &row) in code.iter().enumerate() {
        for q in 0..p {
            if row >> q & 1 == 1 {
                g.add_edge(q, p);
            }
        }
        if row >> p & 1 == 1 {
            g.set_loop(p);
        }
    }
    g
}

/// All connected loop-free graphs on exactly `n` vertices, one per
/// isomorphism class, sorted by canonical code.
///
/// Every connected graph has a vertex whose removal keeps it connected (a
/// leaf of a spanning tree), so extending the connected graphs on `n - 1`
/// vertices by one vertex with a non-empty neighbourhood reaches every class.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    if n == 0 {
        return Vec::new();
    }
    let mut layer: Vec<Code> = vec![canonical_code(&Graph::empty(1))];
    for size in 2..=n {
        let mut seen: HashSet<Code> = HashSet::new();
        for code in &layer {
            let base = graph_from_code(code);
            for mask in 1u32..(1 << (size - 1)) {
                let mut g = Graph::empty(size);
                for (u, v) in base.edges() {
                    g.add_edge(u, v);
                }
                for u in 0..size - 1 {
                    if mask >> u & 1 == 1 {
                        g.add_edge(u, size - 1);
                    }
                }
                seen.insert(canonical_code(&g));
            }
        }
        let mut next: Vec<Code> = seen.into_iter().collect();
        next.sort();
        layer = next;
    }
    layer.iter().map(graph_from_code).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn permuted(g: &Graph, perm: &[usize]) -> Graph {
        let edges: Vec<_> = g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let loops: Vec<_> = g.loops().iter().map(|&v| perm[v]).collect();
        Graph::from_edges(g.num_vertices(), &edges, &loops).unwrap()
    }

    #[test]
    fn code_is_invariant_under_relabelling() {
        let g = Graph::star(&[1, 2, 2]);
        let code = canonical_code(&g);
        for perm in [[5, 4, 3, 2, 1, 0], [1, 0, 3, 2, 5, 4], [2, 5, 0, 4, 1, 3]] {
            assert_eq!(canonical_code(&permuted(&g, &perm)), code);
        }
        assert_ne!(code, canonical_code(&Graph::path(6)));
        assert!(is_isomorphic(&graph_from_code(&code), &g));
    }

    #[test]
    fn regular_graphs_are_distinguished() {
        // C6 and two triangles are both 2-regular on 6 vertices.
        let two_triangles =
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], &[]).unwrap();
        assert!(!is_isomorphic(&Graph::cycle(6), &two_triangles));
        let relabelled = permuted(&Graph::cycle(6), &[3, 0, 4, 1, 5, 2]);
        assert!(is_isomorphic(&Graph::cycle(6), &relabelled));
    }

    #[test]
    fn loops_are_part_of_the_code() {
        let a = Graph::from_edges(2, &[(0, 1)], &[0]).unwrap();
        let b = Graph::from_edges(2, &[(0, 1)], &[1]).unwrap();
        let c = Graph::from_edges(2, &[(0, 1)], &[]).unwrap();
        assert!(is_isomorphic(&a, &b));
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn connected_graph_counts_match_known_sequence() {
        // Connected graphs on n unlabelled vertices: 1, 1, 2, 6, 21, 112.
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }
}
