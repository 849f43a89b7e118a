//! Strongly connected components of the kernel support digraph.
//!
//! Iterative Tarjan so that deep chain graphs (up to the 4096-cell cap) do
//! not overflow the call stack. Components are returned sorted by their
//! smallest member index, members ascending, so reports are deterministic.

/// Computes the strongly connected components of `graph` (adjacency lists).
pub fn strongly_connected_components(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = graph.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut comps: Vec<Vec<usize>> = Vec::new();

    // explicit DFS frames: (vertex, next child position)
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child < graph[v].len() {
                let w = graph[v][*child];
                *child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }

    comps.sort_by_key(|c| c[0]);
    comps
}

/// Edges of the condensation DAG: `(from_component, to_component)` pairs,
/// deduplicated and sorted, indices into the component list returned by
/// [`strongly_connected_components`].
pub fn condensation_edges(graph: &[Vec<usize>], comps: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let n = graph.len();
    let mut comp_of = vec![0usize; n];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = ci;
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (v, adj) in graph.iter().enumerate() {
        for &w in adj {
            let (a, b) = (comp_of[v], comp_of[w]);
            if a != b {
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cycle_is_one_component() {
        let g = vec![vec![1], vec![2], vec![0]];
        let comps = strongly_connected_components(&g);
        assert_eq!(comps, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn chain_gives_singletons() {
        let g = vec![vec![1], vec![2], vec![]];
        let comps = strongly_connected_components(&g);
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn two_blocks_with_bridge() {
        // {0,1} cycle, {2,3} cycle, bridge 1 -> 2
        let g = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let comps = strongly_connected_components(&g);
        assert_eq!(comps, vec![vec![0, 1], vec![2, 3]]);
        let edges = condensation_edges(&g, &comps);
        assert_eq!(edges, vec![(0, 1)]);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let mut g: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i + 1]).collect();
        g.push(vec![0]); // close the loop -> one big SCC
        let comps = strongly_connected_components(&g);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), n);
    }

    #[test]
    fn agrees_with_reachability_bruteforce() {
        // pseudo-random small digraphs vs O(n^3) mutual-reachability check
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let n = 2 + (next() % 7) as usize;
            let mut g = vec![Vec::new(); n];
            for v in 0..n {
                for w in 0..n {
                    if v != w && next() % 3 == 0 {
                        g[v].push(w);
                    }
                }
            }
            // reachability closure
            let mut reach = vec![vec![false; n]; n];
            for v in 0..n {
                reach[v][v] = true;
            }
            for (v, adj) in g.iter().enumerate() {
                for &w in adj {
                    reach[v][w] = true;
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        reach[i][j] |= reach[i][k] && reach[k][j];
                    }
                }
            }
            let comps = strongly_connected_components(&g);
            let mut comp_of = vec![0; n];
            for (ci, c) in comps.iter().enumerate() {
                for &v in c {
                    comp_of[v] = ci;
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let same = comp_of[i] == comp_of[j];
                    let mutual = reach[i][j] && reach[j][i];
                    assert_eq!(same, mutual, "n={n} i={i} j={j}");
                }
            }
        }
    }
}
