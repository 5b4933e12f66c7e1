//! Finite undirected graphs (loops allowed, no multi-edges) and the graph
//! machinery used to transfer monogamy relations between configurations.

mod canon;
mod decomposition;
mod hom;
mod tk;

pub use canon::{canonical_code, connected_graphs, is_isomorphic};
pub use decomposition::{
    fractional_p3_decomposition, fractional_perfect_matching, line_graph,
    solve_fractional_perfect_matching, Matching, MatchingOutcome, P3Decomposition, P3Key,
};
pub use hom::{find_homomorphism, homomorphism_exists};
pub use tk::{
    all_trees, enumerate_tk, is_in_some_tk, tree_canonical_form, tree_perfect_matching,
    DEFAULT_TK_CAP,
};

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    loops: Vec<bool>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            loops: vec![false; n],
        }
    }

    /// Builds a graph, rejecting out-of-range endpoints and duplicate edges.
    /// A pair `(v, v)` in `edges` is read as a loop.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], loops: &[usize]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Range(format!("edge ({u},{v}) on {n} vertices")));
            }
            if u == v {
                if g.loops[u] {
                    return Err(invalid!("duplicate loop at {u}"));
                }
                g.loops[u] = true;
                continue;
            }
            if g.has_edge(u, v) {
                return Err(invalid!("duplicate edge ({u},{v})"));
            }
            g.add_edge(u, v);
        }
        for &v in loops {
            if v >= n {
                return Err(Error::Range(format!("loop at {v} on {n} vertices")));
            }
            if g.loops[v] {
                return Err(invalid!("duplicate loop at {v}"));
            }
            g.loops[v] = true;
        }
        Ok(g)
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        if let Err(pos) = self.adj[u].binary_search(&v) {
            self.adj[u].insert(pos, v);
        }
        if let Err(pos) = self.adj[v].binary_search(&u) {
            self.adj[v].insert(pos, u);
        }
    }

    pub(crate) fn set_loop(&mut self, v: usize) {
        self.loops[v] = true;
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    /// Number of non-loop edges.
    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_loop(&self, v: usize) -> bool {
        self.loops[v]
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| self.loops[v]).collect()
    }

    pub fn has_any_loop(&self) -> bool {
        self.loops.iter().any(|&l| l)
    }

    /// Adjacency test; `has_edge(v, v)` reports the loop at `v`.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            return self.loops[u];
        }
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Non-loop edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (u, nbrs) in self.adj.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_simple(&self) -> bool {
        !self.has_any_loop()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    pub fn is_tree(&self) -> bool {
        self.is_simple()
            && self.num_vertices() > 0
            && self.num_edges() + 1 == self.num_vertices()
            && self.is_connected()
    }

    /// Two-colouring by breadth-first search; loops make a graph non-bipartite.
    pub fn is_bipartite(&self) -> bool {
        if self.has_any_loop() {
            return false;
        }
        let n = self.num_vertices();
        let mut colour: Vec<Option<bool>> = vec![None; n];
        for s in 0..n {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u].unwrap();
                for &v in &self.adj[u] {
                    match colour[v] {
                        None => {
                            colour[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// Subgraph induced by `keep` (vertices renumbered in the given order).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::empty(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            if self.loops[v] {
                g.loops[i] = true;
            }
            for &w in &self.adj[v] {
                if index[w] != usize::MAX && index[w] > i {
                    g.add_edge(i, index[w]);
                }
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges, &[]).expect("path edges are valid")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycles need at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges, &[]).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Spider with a hub (vertex 0) and one leg of each given length.
    pub fn star(legs: &[usize]) -> Graph {
        let n = 1 + legs.iter().sum::<usize>();
        let mut g = Graph::empty(n);
        let mut next = 1;
        for &len in legs {
            let mut prev = 0;
            for _ in 0..len {
                g.add_edge(prev, next);
                prev = next;
                next += 1;
            }
        }
        g
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.num_vertices(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            loops: self.loops(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Graph> {
        let edges: Vec<_> = json.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(json.vertices, &edges, &json.loops)
    }

    /// Parses the plain-text edge list format: one `i j` pair per line, `#`
    /// comments, and `i i` for a loop. The vertex count is one more than the
    /// largest index unless a `vertices N` line is present.
    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut edges = Vec::new();
        let mut declared = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {}: bad vertex {s:?}", lineno + 1)))
            };
            match fields.as_slice() {
                ["vertices", n] => declared = Some(parse(n)?),
                [u, v] => edges.push((parse(u)?, parse(v)?)),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: expected `i j`, got {line:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let n = declared.unwrap_or(inferred);
        Graph::from_edges(n, &edges, &[])
    }

    /// Resolves a named graph, a `.json` file or an edge-list file.
    pub fn load(spec: &str) -> Result<Graph> {
        if let Ok(g) = named_graph(spec) {
            return Ok(g);
        }
        let path = Path::new(spec);
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            if spec.ends_with(".json") {
                let json: GraphJson = serde_json::from_str(&text)?;
                return Graph::from_json(&json);
            }
            return Graph::from_edge_list(&text);
        }
        Err(Error::Parse(format!("unknown graph {spec:?}")))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph({} vertices, edges {:?}", self.num_vertices(), self.edges())?;
        if self.has_any_loop() {
            write!(f, ", loops {:?}", self.loops())?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub loops: Vec<usize>,
}

/// Named graph families: `Pn`, `Cn`, `Kn`, `star-a,b,c` and `Tk:i` (the
/// `i`-th member of the canonical enumeration of `T_k`).
pub fn named_graph(name: &str) -> Result<Graph> {
    let bad = || Error::Parse(format!("unknown graph name {name:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if let Some(rest) = name.strip_prefix("star-") {
        let legs = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
        if legs.is_empty() || legs.contains(&0) {
            return Err(bad());
        }
        return Ok(Graph::star(&legs));
    }
    if let Some(rest) = name.strip_prefix('T') {
        let (k, i) = rest.split_once(':').ok_or_else(bad)?;
        let members = enumerate_tk(num(k)?, DEFAULT_TK_CAP)?;
        return members.into_iter().nth(num(i)?).ok_or_else(bad);
    }
    let (family, size) = name.split_at(name.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?);
    let n = num(size)?;
    match family {
        "P" if n >= 1 => Ok(Graph::path(n)),
        "C" if n >= 3 => Ok(Graph::cycle(n)),
        "K" if n >= 1 => Ok(Graph::complete(n)),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_families() {
        let p4 = named_graph("P4").unwrap();
        assert_eq!((p4.num_vertices(), p4.num_edges()), (4, 3));
        let c3 = named_graph("C3").unwrap();
        assert_eq!(c3.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        let star = named_graph("star-1,2,2").unwrap();
        assert_eq!((star.num_vertices(), star.num_edges()), (6, 5));
        assert!(star.is_tree());
        let mut degrees: Vec<_> = (0..6).map(|v| star.degree(v)).collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![1, 1, 1, 2, 2, 3]);
        assert!(named_graph("Q5").is_err());
        assert!(named_graph("C2").is_err());
        assert!(named_graph("star-").is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(Graph::from_edges(2, &[(0, 2)], &[]), Err(Error::Range(_))));
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)], &[]).is_err());
        let g = Graph::from_edges(2, &[(0, 1), (1, 1)], &[]).unwrap();
        assert!(g.has_edge(1, 1) && !g.has_edge(0, 0));
        assert!(!g.is_simple());
    }

    #[test]
    fn edge_list_and_json() {
        let g = Graph::from_edge_list("# triangle\n0 1\n1 2\n2 0\n").unwrap();
        assert!(is_isomorphic(&g, &Graph::cycle(3)));
        let back = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(text, r#"{"vertices":3,"edges":[[0,1],[0,2],[1,2]],"loops":[]}"#);
        assert!(Graph::from_edge_list("0 1 2").is_err());
    }

    #[test]
    fn bipartite_and_connectivity() {
        assert!(Graph::path(5).is_bipartite());
        assert!(!Graph::cycle(5).is_bipartite());
        assert!(Graph::cycle(6).is_bipartite());
        let split = Graph::from_edges(4, &[(0, 1), (2, 3)], &[]).unwrap();
        assert!(!split.is_connected());
    }
}
