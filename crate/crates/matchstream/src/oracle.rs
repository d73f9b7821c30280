//! Exact desk-scale reference solvers: maximum weight matching by memoized
//! branching, bipartite maximum cardinality matching, and the short
//! augmentation probe used to certify near-optimality.

use std::collections::{HashMap, VecDeque};

use crate::augment::Augmentation;
use crate::error::Error;
use crate::graph::{Edge, WeightedGraph};
use crate::matching::Matching;
use crate::Result;

/// Size gate for the exponential solver. Vertices are counted after dropping
/// isolated ones, since they cannot affect any matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_vertices: 20,
            max_edges: 64,
        }
    }
}

/// Exact maximum weight matching by branching on the busiest vertex, with a
/// memo on the set of still-active vertices. Ties between equally good edge
/// sets resolve to the lexicographically smallest set of canonical edges, so
/// the answer is a deterministic function of the graph.
pub fn exact_mwm(g: &WeightedGraph, budget: &OracleBudget) -> Result<Matching> {
    let active: Vec<u32> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
    if active.len() > budget.max_vertices {
        return Err(Error::Oversize(format!(
            "exact matching solver: {} non-isolated vertices exceeds cap {}",
            active.len(),
            budget.max_vertices
        )));
    }
    if g.m() > budget.max_edges {
        return Err(Error::Oversize(format!(
            "exact matching solver: {} edges exceeds cap {}",
            g.m(),
            budget.max_edges
        )));
    }
    // The memo key is a u32 bitmask, so no budget may push past 32 vertices.
    if active.len() > 32 {
        return Err(Error::Oversize(
            "exact matching solver is limited to 32 non-isolated vertices".into(),
        ));
    }
    let idx_of: HashMap<u32, usize> =
        active.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // Compact copies: (u_idx, v_idx, weight), plus per-vertex incidence.
    let edges: Vec<(usize, usize, i64)> = g
        .edges()
        .iter()
        .map(|e| (idx_of[&e.u], idx_of[&e.v], e.w))
        .collect();
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); active.len()];
    for (i, &(u, v, _)) in edges.iter().enumerate() {
        inc[u].push(i);
        inc[v].push(i);
    }

    let full: u32 = if active.len() == 32 {
        u32::MAX
    } else {
        (1u32 << active.len()) - 1
    };
    let mut memo: HashMap<u32, i64> = HashMap::new();
    let value = solve_mask(full, &edges, &inc, &mut memo);

    // Reconstruct the lexicographically smallest optimal edge set: keep
    // taking the smallest canonical edge that is consistent with the memoized
    // optimum. Any optimal set containing a larger first edge can swap it for
    // this one, so the greedy choice is safe.
    let mut mask = full;
    let mut chosen: Vec<Edge> = Vec::new();
    let mut remaining = value;
    while remaining > 0 {
        let mut picked = None;
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if mask & (1 << u) == 0 || mask & (1 << v) == 0 {
                continue;
            }
            let rest = mask & !(1 << u) & !(1 << v);
            if w + solve_mask(rest, &edges, &inc, &mut memo) == remaining {
                picked = Some((i, rest, w));
                break;
            }
        }
        let (i, rest, w) = picked.expect("optimum must be witnessed by some edge");
        chosen.push(Edge::new(active[edges[i].0], active[edges[i].1], w));
        mask = rest;
        remaining -= w;
    }
    Matching::from_edges(g.n(), chosen)
}

fn solve_mask(
    mask: u32,
    edges: &[(usize, usize, i64)],
    inc: &[Vec<usize>],
    memo: &mut HashMap<u32, i64>,
) -> i64 {
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    // Branch on the active vertex with the most live edges (smallest id on
    // ties): either it stays unmatched, or one of its edges is taken.
    let mut pivot = None;
    let mut best_deg = 0usize;
    for (v, vinc) in inc.iter().enumerate() {
        if mask & (1 << v) == 0 {
            continue;
        }
        let deg = vinc
            .iter()
            .filter(|&&i| {
                let (a, b, _) = edges[i];
                mask & (1 << a) != 0 && mask & (1 << b) != 0
            })
            .count();
        if deg > best_deg {
            best_deg = deg;
            pivot = Some(v);
        }
    }
    let result = match pivot {
        None => 0,
        Some(v) => {
            let mut best = solve_mask(mask & !(1 << v), edges, inc, memo);
            for &i in &inc[v] {
                let (a, b, w) = edges[i];
                if mask & (1 << a) == 0 || mask & (1 << b) == 0 {
                    continue;
                }
                let rest = mask & !(1 << a) & !(1 << b);
                best = best.max(w + solve_mask(rest, edges, inc, memo));
            }
            best
        }
    };
    memo.insert(mask, result);
    result
}

/// Two-color the graph; None if some component has an odd cycle. Isolated
/// vertices land on the left side.
pub fn bipartition(g: &WeightedGraph) -> Option<Vec<bool>> {
    let n = g.n() as usize;
    let mut color: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut queue = VecDeque::from([s as u32]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u as usize].unwrap();
            for &ei in g.incident(u) {
                let w = g.edge(ei as usize).other(u);
                match color[w as usize] {
                    None => {
                        color[w as usize] = Some(!cu);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cu => return None,
                    _ => {}
                }
            }
        }
    }
    Some(color.into_iter().map(|c| c.unwrap()).collect())
}

/// Maximum cardinality matching on a bipartite graph via layered augmenting
/// phases. Errors with a structural complaint on non-bipartite input. Runs in
/// O(m sqrt(n)); no size budget applies.
pub fn exact_mcm_bipartite(g: &WeightedGraph) -> Result<Matching> {
    let color = bipartition(g)
        .ok_or_else(|| Error::Structure("cardinality solver requires a bipartite graph".into()))?;
    let n = g.n() as usize;
    let mut partner: Vec<Option<u32>> = vec![None; n];
    loop {
        // BFS layering from free left vertices, measured in left-side hops.
        let mut dist: Vec<u32> = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if !color[v] && partner[v].is_none() && g.degree(v as u32) > 0 {
                dist[v] = 0;
                queue.push_back(v as u32);
            }
        }
        let mut reachable_free = false;
        while let Some(u) = queue.pop_front() {
            for &ei in g.incident(u) {
                let w = g.edge(ei as usize).other(u);
                match partner[w as usize] {
                    None => reachable_free = true,
                    Some(next) if dist[next as usize] == u32::MAX => {
                        dist[next as usize] = dist[u as usize] + 1;
                        queue.push_back(next);
                    }
                    _ => {}
                }
            }
        }
        if !reachable_free {
            break;
        }
        let mut progressed = false;
        for v in 0..n as u32 {
            if !color[v as usize] && partner[v as usize].is_none() && g.degree(v) > 0 {
                progressed |= augment_layered(v, g, &mut dist, &mut partner);
            }
        }
        if !progressed {
            break;
        }
    }
    let mut edges = Vec::new();
    for v in 0..n as u32 {
        if !color[v as usize] {
            if let Some(w) = partner[v as usize] {
                edges.push(g.find_edge(v, w).expect("matched pair is a graph edge"));
            }
        }
    }
    Matching::from_edges(g.n(), edges)
}

fn augment_layered(
    u: u32,
    g: &WeightedGraph,
    dist: &mut [u32],
    partner: &mut [Option<u32>],
) -> bool {
    for &ei in g.incident(u) {
        let w = g.edge(ei as usize).other(u);
        match partner[w as usize] {
            None => {
                partner[w as usize] = Some(u);
                partner[u as usize] = Some(w);
                return true;
            }
            Some(next) => {
                if dist[next as usize] == dist[u as usize].saturating_add(1)
                    && augment_layered(next, g, dist, partner)
                {
                    partner[w as usize] = Some(u);
                    partner[u as usize] = Some(w);
                    return true;
                }
            }
        }
    }
    dist[u as usize] = u32::MAX;
    false
}

/// Does the matching admit any alternating path or cycle with at most
/// 2ℓ−1 edges and strictly positive gain? Exhaustive walk search; meant for
/// desk-scale certification only.
pub fn has_short_augmentation(g: &WeightedGraph, m: &Matching, ell: u32) -> bool {
    let max_edges = (2 * ell as usize).saturating_sub(1);
    if max_edges == 0 {
        return false;
    }
    let mut visited = vec![false; g.n() as usize];
    let mut walk: Vec<Edge> = Vec::new();
    (0..g.n()).any(|s| short_aug_dfs(g, m, s, s, None, &mut visited, &mut walk, max_edges))
}

#[allow(clippy::too_many_arguments)]
fn short_aug_dfs(
    g: &WeightedGraph,
    m: &Matching,
    start: u32,
    cur: u32,
    last_in_m: Option<bool>,
    visited: &mut [bool],
    walk: &mut Vec<Edge>,
    max_edges: usize,
) -> bool {
    visited[cur as usize] = true;
    for &ei in g.incident(cur) {
        let e = g.edge(ei as usize);
        let next = e.other(cur);
        let e_in_m = m.contains(&e);
        if last_in_m == Some(e_in_m) {
            continue;
        }
        if next == start && !walk.is_empty() {
            // Closing a cycle: needs even length and alternation at `start`.
            if (walk.len() + 1) % 2 == 0
                && walk.len() + 1 <= max_edges
                && m.contains(&walk[0]) != e_in_m
            {
                let mut cyc = walk.clone();
                cyc.push(e);
                let aug = Augmentation::cycle(cyc, m).expect("walk alternates");
                if aug.gain > 0 {
                    visited[cur as usize] = false;
                    return true;
                }
            }
            continue;
        }
        if visited[next as usize] || walk.len() >= max_edges {
            continue;
        }
        walk.push(e);
        let aug = Augmentation::path(walk.clone(), m).expect("walk alternates");
        if aug.gain > 0
            || short_aug_dfs(g, m, start, next, Some(e_in_m), visited, walk, max_edges)
        {
            walk.pop();
            visited[cur as usize] = false;
            return true;
        }
        walk.pop();
    }
    visited[cur as usize] = false;
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: u32, edges: &[(u32, u32, i64)]) -> WeightedGraph {
        WeightedGraph::from_edges_unchecked(n, edges.to_vec()).unwrap()
    }

    #[test]
    fn star_plus_pendants() {
        // a=0 b=1 c=2 d=3 e=4 f=5; best is {a,c} + {d,f} = 8, beating the
        // heavy middle edge {c,d} = 5.
        let g = graph(
            6,
            &[(1, 2, 2), (0, 2, 4), (2, 3, 5), (3, 4, 2), (3, 5, 4)],
        );
        let m = exact_mwm(&g, &OracleBudget::default()).unwrap();
        assert_eq!(m.weight(), 8);
        assert_eq!(
            m.edges(),
            vec![Edge::new(0, 2, 4), Edge::new(3, 5, 4)]
        );
    }

    #[test]
    fn lex_smallest_on_ties() {
        let g = graph(3, &[(0, 1, 3), (1, 2, 3)]);
        let m = exact_mwm(&g, &OracleBudget::default()).unwrap();
        assert_eq!(m.edges(), vec![Edge::new(0, 1, 3)]);
    }

    #[test]
    fn budget_is_enforced() {
        let edges: Vec<(u32, u32, i64)> = (0..21).map(|i| (i, 21 + i, 1)).collect();
        let g = graph(42, &edges);
        assert!(matches!(
            exact_mwm(&g, &OracleBudget::default()),
            Err(Error::Oversize(_))
        ));
    }

    #[test]
    fn bipartite_cardinality() {
        // 6-cycle: perfect matching of size 3.
        let g = graph(6, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (0, 5, 1)]);
        let m = exact_mcm_bipartite(&g).unwrap();
        assert_eq!(m.len(), 3);
        // Triangle: not bipartite.
        let t = graph(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
        assert!(matches!(exact_mcm_bipartite(&t), Err(Error::Structure(_))));
    }

    #[test]
    fn short_augmentation_probe() {
        // Path a-b-c-d with M = {bc}: the 3-edge augmentation exists.
        let g = graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let m = Matching::from_edges(4, [Edge::new(1, 2, 1)]).unwrap();
        assert!(has_short_augmentation(&g, &m, 2));
        // With l = 1 only single-edge augmentations count; none is positive.
        assert!(!has_short_augmentation(&g, &m, 1));
        // A maximum weight matching admits no augmentation at any length.
        let opt = exact_mwm(&g, &OracleBudget::default()).unwrap();
        assert!(!has_short_augmentation(&g, &opt, 4));
    }

    #[test]
    fn weighted_cycle_augmentation() {
        // Alternating 4-cycle (3,4,3,4): swapping sides gains 2.
        let g = graph(4, &[(0, 1, 3), (1, 2, 4), (2, 3, 3), (0, 3, 4)]);
        let m = Matching::from_edges(4, [Edge::new(0, 1, 3), Edge::new(2, 3, 3)]).unwrap();
        assert!(has_short_augmentation(&g, &m, 3));
    }
}
