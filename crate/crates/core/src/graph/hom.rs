use std::collections::VecDeque;

use super::Graph;

/// Searches for an adjacency-preserving map `V(h1) -> V(h2)`. Edges of `h1`
/// may land on edges or loops of `h2`; a loop of `h1` needs a loop.
pub fn find_homomorphism(h1: &Graph, h2: &Graph) -> Option<Vec<usize>> {
    let n1 = h1.num_vertices();
    if n1 == 0 {
        return Some(Vec::new());
    }
    if h2.num_vertices() == 0 {
        return None;
    }
    if let Some(w) = (0..h2.num_vertices()).find(|&w| h2.has_loop(w)) {
        return Some(vec![w; n1]);
    }
    if h1.has_any_loop() {
        return None;
    }

    // Breadth-first order from high-degree vertices so that every vertex
    // after the first of its component has an already-placed neighbour.
    let mut by_degree: Vec<usize> = (0..n1).collect();
    by_degree.sort_by_key(|&v| std::cmp::Reverse(h1.degree(v)));
    let mut order = Vec::with_capacity(n1);
    let mut placed = vec![false; n1];
    for &s in &by_degree {
        if placed[s] {
            continue;
        }
        placed[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nbrs: Vec<usize> = h1.neighbors(u).to_vec();
            nbrs.sort_by_key(|&v| std::cmp::Reverse(h1.degree(v)));
            for v in nbrs {
                if !placed[v] {
                    placed[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    let mut image = vec![usize::MAX; n1];
    if extend(h1, h2, &order, 0, &mut image) {
        Some(image)
    } else {
        None
    }
}

fn extend(h1: &Graph, h2: &Graph, order: &[usize], depth: usize, image: &mut [usize]) -> bool {
    let Some(&v) = order.get(depth) else {
        return true;
    };
    let anchor = h1.neighbors(v).iter().copied().find(|&u| image[u] != usize::MAX);
    let candidates: Vec<usize> = match anchor {
        Some(u) => h2.neighbors(image[u]).to_vec(),
        None => {
            let mut all: Vec<usize> = (0..h2.num_vertices()).collect();
            all.sort_by_key(|&w| std::cmp::Reverse(h2.degree(w)));
            all
        }
    };
    for w in candidates {
        let consistent = h1
            .neighbors(v)
            .iter()
            .all(|&u| image[u] == usize::MAX || h2.has_edge(image[u], w));
        if !consistent {
            continue;
        }
        image[v] = w;
        if extend(h1, h2, order, depth + 1, image) {
            return true;
        }
        image[v] = usize::MAX;
    }
    false
}

pub fn homomorphism_exists(h1: &Graph, h2: &Graph) -> bool {
    find_homomorphism(h1, h2).is_some()
}
