//! The families `T_k`: trees on `2k` vertices obtained by joining `k` disjoint
//! copies of `P2` with `k - 1` further edges. Equivalently, the trees on `2k`
//! vertices that have a perfect matching.

use std::collections::BTreeMap;

use super::Graph;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_TK_CAP: usize = 6;

/// Greedy leaf matching. Returns the (necessarily unique) perfect matching
/// of a tree, or `None` when there is none.
pub fn tree_perfect_matching(tree: &Graph) -> Option<Vec<(usize, usize)>> {
    if !tree.is_tree() {
        return None;
    }
    let n = tree.num_vertices();
    let mut parent = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        order.push(u);
        for &v in tree.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                parent[v] = u;
                stack.push(v);
            }
        }
    }
    let mut mate = vec![usize::MAX; n];
    let mut matching = Vec::with_capacity(n / 2);
    for &v in order.iter().rev() {
        if mate[v] != usize::MAX {
            continue;
        }
        let p = parent[v];
        if p == usize::MAX || mate[p] != usize::MAX {
            return None;
        }
        mate[v] = p;
        mate[p] = v;
        matching.push((v.min(p), v.max(p)));
    }
    matching.sort_unstable();
    Some(matching)
}

/// Membership in `T_k` for some `k >= 1`, decided combinatorially: a tree on
/// an even number of vertices with a perfect matching.
pub fn is_in_some_tk(h: &Graph) -> bool {
    h.num_vertices() % 2 == 0 && tree_perfect_matching(h).is_some()
}

fn centers(tree: &Graph) -> Vec<usize> {
    let n = tree.num_vertices();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= leaves.len();
        for &leaf in &leaves {
            degree[leaf] = 0;
        }
        let mut next = Vec::new();
        for &leaf in &leaves {
            for &w in tree.neighbors(leaf) {
                if degree[w] == 0 {
                    continue;
                }
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        leaves = next;
    }
    leaves.sort_unstable();
    leaves
}

fn rooted_code(tree: &Graph, v: usize, parent: usize) -> String {
    let mut children: Vec<String> = tree
        .neighbors(v)
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(tree, w, v))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

/// AHU encoding rooted at the centre (the smaller of the two rootings for a
/// bicentral tree). Equal strings iff the trees are isomorphic.
pub fn tree_canonical_form(tree: &Graph) -> Result<String> {
    if !tree.is_tree() {
        return Err(invalid!("not a tree: {tree:?}"));
    }
    Ok(centers(tree)
        .into_iter()
        .map(|c| rooted_code(tree, c, usize::MAX))
        .min()
        .unwrap_or_default())
}

/// Members of `T_k` up to isomorphism, sorted by canonical form.
///
/// A leaf copy of `P2` in the joining tree hangs off the rest by a single
/// edge, so every member of `T_k` arises from a member of `T_{k-1}` by
/// attaching a pendant `P2` at some vertex.
pub fn enumerate_tk(k: usize, cap: usize) -> Result<Vec<Graph>> {
    if k == 0 {
        return Err(invalid!("T_k needs k >= 1"));
    }
    if k > cap {
        return Err(Error::Capacity(format!("T_{k} exceeds the enumeration cap k <= {cap}")));
    }
    let mut layer = vec![Graph::path(2)];
    for j in 1..k {
        let mut next: BTreeMap<String, Graph> = BTreeMap::new();
        for tree in &layer {
            for w in 0..2 * j {
                let mut grown = Graph::empty(2 * j + 2);
                for (a, b) in tree.edges() {
                    grown.add_edge(a, b);
                }
                grown.add_edge(w, 2 * j);
                grown.add_edge(2 * j, 2 * j + 1);
                let key = tree_canonical_form(&grown)?;
                next.entry(key).or_insert(grown);
            }
        }
        layer = next.into_values().collect();
    }
    Ok(layer)
}

/// Every tree on `n` vertices up to isomorphism, by decoding all `n^(n-2)`
/// Prüfer sequences. Exponential; intended as an independent oracle.
pub fn all_trees(n: usize) -> Vec<Graph> {
    match n {
        0 => return Vec::new(),
        1 => return vec![Graph::empty(1)],
        2 => return vec![Graph::path(2)],
        _ => {}
    }
    let mut found: BTreeMap<String, Graph> = BTreeMap::new();
    let len = n - 2;
    let mut seq = vec![0usize; len];
    loop {
        let tree = decode_pruefer(&seq, n);
        let key = tree_canonical_form(&tree).expect("Prüfer sequences decode to trees");
        found.entry(key).or_insert(tree);
        let mut i = 0;
        while i < len {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == len {
            break;
        }
    }
    found.into_values().collect()
}

fn decode_pruefer(seq: &[usize], n: usize) -> Graph {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut g = Graph::empty(n);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        g.add_edge(leaf, s);
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    g.add_edge(rest[0], rest[1]);
    g
}
