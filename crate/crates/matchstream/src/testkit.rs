//! Reference implementations and fixtures for tests and benchmarking: an
//! enumeration-based optimum independent of the production solver, a general
//! blossom matcher for cardinality baselines, and a local-search reference
//! for sizes where exact search is out of reach.

use crate::augment::{self, Augmentation};
use crate::graph::{Edge, WeightedGraph};
use crate::matching::Matching;
use crate::rng::SplitMix64;

/// Maximum matching weight by direct enumeration over the matching lattice:
/// process vertices in order, either leaving the current vertex unmatched or
/// pairing it with a free higher neighbor. Shares no code or memo with the
/// production solver, so it can stand witness against it.
pub fn mwm_by_enumeration(g: &WeightedGraph) -> i64 {
    assert!(g.n() <= 24, "enumeration checker is for tiny graphs");
    fn rec(g: &WeightedGraph, v: u32, used: u32) -> i64 {
        if v == g.n() {
            return 0;
        }
        if used & (1 << v) != 0 {
            return rec(g, v + 1, used);
        }
        let mut best = rec(g, v + 1, used);
        for &ei in g.incident(v) {
            let e = g.edge(ei as usize);
            let w = e.other(v);
            if w > v && used & (1 << w) == 0 {
                best = best.max(e.w + rec(g, v + 1, used | (1 << v) | (1 << w)));
            }
        }
        best
    }
    rec(g, 0, 0)
}

const NONE: usize = usize::MAX;

/// Maximum cardinality matching on a general graph (blossom contraction via
/// base pointers). O(n^3); deterministic for a fixed graph.
pub fn mcm_blossom(g: &WeightedGraph) -> Matching {
    let n = g.n() as usize;
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            g.incident(v as u32)
                .iter()
                .map(|&ei| g.edge(ei as usize).other(v as u32) as usize)
                .collect()
        })
        .collect();
    let mut mate: Vec<usize> = vec![NONE; n];
    for root in 0..n {
        if mate[root] == NONE && !adj[root].is_empty() {
            blossom_augment(root, &adj, &mut mate);
        }
    }
    let mut edges = Vec::new();
    for v in 0..n {
        if mate[v] != NONE && v < mate[v] {
            let e = g
                .find_edge(v as u32, mate[v] as u32)
                .expect("matched pair is a graph edge");
            edges.push(e);
        }
    }
    Matching::from_edges(g.n(), edges).expect("mate array is a matching")
}

fn blossom_augment(root: usize, adj: &[Vec<usize>], mate: &mut [usize]) -> bool {
    let n = adj.len();
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut queued = vec![false; n];
    let mut queue = std::collections::VecDeque::from([root]);
    queued[root] = true;

    let lca = |a: usize, b: usize, base: &[usize], parent: &[usize], mate: &[usize]| {
        let mut seen = vec![false; n];
        let mut x = a;
        loop {
            x = base[x];
            seen[x] = true;
            if mate[x] == NONE {
                break;
            }
            x = parent[mate[x]];
        }
        let mut y = b;
        loop {
            y = base[y];
            if seen[y] {
                return y;
            }
            y = parent[mate[y]];
        }
    };

    // Contract the odd cycle through `anchor`: everything on the two stem
    // paths joins the blossom and becomes an outer vertex.
    let mark_path = |mut v: usize,
                     anchor: usize,
                     mut child: usize,
                     in_blossom: &mut [bool],
                     base: &[usize],
                     parent: &mut [usize],
                     mate: &[usize]| {
        while base[v] != anchor {
            in_blossom[base[v]] = true;
            in_blossom[base[mate[v]]] = true;
            parent[v] = child;
            child = mate[v];
            v = parent[mate[v]];
        }
    };

    while let Some(v) = queue.pop_front() {
        for &to in &adj[v] {
            if base[v] == base[to] || mate[v] == to {
                continue;
            }
            if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                let anchor = lca(v, to, &base, &parent, mate);
                let mut in_blossom = vec![false; n];
                mark_path(v, anchor, to, &mut in_blossom, &base, &mut parent, mate);
                mark_path(to, anchor, v, &mut in_blossom, &base, &mut parent, mate);
                for i in 0..n {
                    if in_blossom[base[i]] {
                        base[i] = anchor;
                        if !queued[i] {
                            queued[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if parent[to] == NONE {
                parent[to] = v;
                if mate[to] == NONE {
                    // Augment along parent pointers back to the root.
                    let mut u = to;
                    while u != NONE {
                        let pv = parent[u];
                        let next = mate[pv];
                        mate[u] = pv;
                        mate[pv] = u;
                        u = next;
                    }
                    return true;
                }
                let m = mate[to];
                if !queued[m] {
                    queued[m] = true;
                    queue.push_back(m);
                }
            }
        }
    }
    false
}

/// Greedy matching by decreasing weight (canonical order on ties).
pub fn greedy_matching(g: &WeightedGraph) -> Matching {
    let mut order: Vec<&Edge> = g.edges().iter().collect();
    order.sort_by(|a, b| b.w.cmp(&a.w).then_with(|| a.cmp(b)));
    let mut m = Matching::new(g.n());
    for e in order {
        if m.can_add(e) {
            m.add(*e).expect("checked free");
        }
    }
    m
}

/// Best-gain alternating path or cycle with at most 2ℓ−1 edges, if any has
/// strictly positive gain. Exhaustive; intended for small ℓ.
pub fn find_short_augmentation(
    g: &WeightedGraph,
    m: &Matching,
    ell: u32,
) -> Option<Augmentation> {
    let max_edges = (2 * ell as usize).saturating_sub(1);
    if max_edges == 0 {
        return None;
    }
    let mut best: Option<Augmentation> = None;
    let mut visited = vec![false; g.n() as usize];
    let mut walk: Vec<Edge> = Vec::new();
    for s in 0..g.n() {
        best_aug_dfs(g, m, s, s, None, &mut visited, &mut walk, max_edges, &mut best);
    }
    best
}

#[allow(clippy::too_many_arguments)]
fn best_aug_dfs(
    g: &WeightedGraph,
    m: &Matching,
    start: u32,
    cur: u32,
    last_in_m: Option<bool>,
    visited: &mut [bool],
    walk: &mut Vec<Edge>,
    max_edges: usize,
    best: &mut Option<Augmentation>,
) {
    let consider = |cand: Augmentation, best: &mut Option<Augmentation>| {
        if cand.gain > 0 && best.as_ref().map_or(true, |b| cand.gain > b.gain) {
            *best = Some(cand);
        }
    };
    visited[cur as usize] = true;
    for &ei in g.incident(cur) {
        let e = g.edge(ei as usize);
        let next = e.other(cur);
        let e_in_m = m.contains(&e);
        if last_in_m == Some(e_in_m) {
            continue;
        }
        if next == start && !walk.is_empty() {
            if (walk.len() + 1) % 2 == 0
                && walk.len() + 1 <= max_edges
                && m.contains(&walk[0]) != e_in_m
            {
                let mut cyc = walk.clone();
                cyc.push(e);
                consider(Augmentation::cycle(cyc, m).expect("walk alternates"), best);
            }
            continue;
        }
        if visited[next as usize] || walk.len() >= max_edges {
            continue;
        }
        walk.push(e);
        consider(
            Augmentation::path(walk.clone(), m).expect("walk alternates"),
            best,
        );
        best_aug_dfs(g, m, start, next, Some(e_in_m), visited, walk, max_edges, best);
        walk.pop();
    }
    visited[cur as usize] = false;
}

/// Apply best short augmentations until none with positive gain remains. The
/// result certifiably admits no augmenting structure of ≤ 2ℓ−1 edges.
pub fn saturate_short_augmentations(g: &WeightedGraph, m: &Matching, ell: u32) -> Matching {
    let mut cur = m.clone();
    while let Some(aug) = find_short_augmentation(g, &cur, ell) {
        cur = augment::apply_augmentation(&cur, &aug).expect("augmentation applies");
    }
    cur
}

/// Local-search reference: greedy by weight, then saturated against all
/// augmentations of up to three edges. Cheap enough for mid-size graphs and
/// strong enough to anchor approximation ratios.
pub fn reference_matching(g: &WeightedGraph) -> Matching {
    saturate_short_augmentations(g, &greedy_matching(g), 2)
}

/// Check that `m` is an actual matching over `g`'s edges with consistent
/// weights; panics with a description otherwise.
pub fn assert_valid_matching(g: &WeightedGraph, m: &Matching) {
    assert_eq!(m.n(), g.n(), "vertex count mismatch");
    for e in m.edges() {
        let ge = g
            .find_edge(e.u, e.v)
            .unwrap_or_else(|| panic!("matching edge {}-{} not in graph", e.u, e.v));
        assert_eq!(ge.w, e.w, "weight mismatch on {}-{}", e.u, e.v);
    }
    assert_eq!(m.weight(), m.recompute_weight(), "cached weight drifted");
}

/// Path graph on weights.len()+1 vertices with the given edge weights.
pub fn path_graph(weights: &[i64]) -> WeightedGraph {
    let edges = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (i as u32, i as u32 + 1, w))
        .collect();
    WeightedGraph::from_edges_unchecked(weights.len() as u32 + 1, edges).unwrap()
}

/// Cycle graph on weights.len() vertices, edge i joining i and i+1 mod n.
pub fn cycle_graph(weights: &[i64]) -> WeightedGraph {
    let n = weights.len() as u32;
    assert!(n >= 3);
    let edges = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (i as u32, (i as u32 + 1) % n, w))
        .collect();
    WeightedGraph::from_edges_unchecked(n, edges).unwrap()
}

/// Random simple graph: up to `m` distinct edges over `n` vertices, weights
/// uniform in [1, w_max]. Deterministic in `seed`.
pub fn random_graph(n: u32, m: usize, w_max: i64, seed: u64) -> WeightedGraph {
    assert!(n >= 2 && w_max >= 1);
    let mut rng = SplitMix64::new(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut edges = Vec::new();
    let max_m = (n as usize * (n as usize - 1)) / 2;
    let mut attempts = 0usize;
    while edges.len() < m.min(max_m) && attempts < 50 * m.max(1) {
        attempts += 1;
        let u = rng.below(n as u64) as u32;
        let v = rng.below(n as u64) as u32;
        if u == v || !seen.insert((u.min(v), u.max(v))) {
            continue;
        }
        let w = 1 + rng.below(w_max as u64) as i64;
        edges.push((u.min(v), u.max(v), w));
    }
    WeightedGraph::from_edges_unchecked(n, edges).unwrap()
}

/// Even cycle alternating between two weights, starting with `w_matched` on
/// edge (0,1); the natural planted matching is every even-indexed edge.
pub fn alternating_cycle(half: usize, w_matched: i64, w_unmatched: i64) -> (WeightedGraph, Matching) {
    assert!(half >= 2);
    let weights: Vec<i64> = (0..2 * half)
        .map(|i| if i % 2 == 0 { w_matched } else { w_unmatched })
        .collect();
    let g = cycle_graph(&weights);
    let planted = (0..half).map(|i| g.find_edge(2 * i as u32, 2 * i as u32 + 1).unwrap());
    let m = Matching::from_edges(g.n(), planted).unwrap();
    (g, m)
}
