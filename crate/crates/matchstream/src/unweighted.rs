//! Streaming recovery of length-3 unweighted augmenting paths (the support
//! set black box) and the three-branch single-pass pipeline that lifts a
//! greedy prefix matching above half-optimal cardinality.

use crate::error::Error;
use crate::graph::{Edge, WeightedGraph};
use crate::matching::Matching;
use crate::oracle;
use crate::stream::{MemoryMeter, StreamSession};
use crate::Result;

/// Advantage parameter for the pipeline's 3-augmentation branch, from the
/// case analysis (1/2 − 5θ)(1 − 2p)/(1/2 + θ) with θ = 1/154 and a p → 0
/// prefix; kept as a named constant so the derivation stays visible.
pub const UNWEIGHTED_BETA: f64 = 0.92;

/// A vertex-disjoint 3-augmenting path a–u–v–b: `middle` is the matched edge
/// uv, `left` joins free a to u, `right` joins v to free b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeAug {
    pub left: Edge,
    pub middle: Edge,
    pub right: Edge,
    /// Walk order [a, u, v, b].
    pub vertices: [u32; 4],
}

/// Support-set state: stores stream edges joining a free vertex to a matched
/// one, with the free side capped at λ = ceil(8/β) support edges and the
/// matched side at 2. Size is therefore at most 4|M|.
#[derive(Debug, Clone)]
pub struct UnwAugPathState {
    m: Matching,
    lambda: u32,
    support: Vec<Edge>,
    deg: Vec<u32>,
}

pub fn unw_init(m: Matching, beta: f64) -> Result<UnwAugPathState> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Param(format!(
            "support-set beta must be in (0, 1], got {beta}"
        )));
    }
    let lambda = (8.0 / beta).ceil() as u32;
    let n = m.n() as usize;
    Ok(UnwAugPathState {
        m,
        lambda,
        support: Vec::new(),
        deg: vec![0; n],
    })
}

impl UnwAugPathState {
    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn support(&self) -> &[Edge] {
        &self.support
    }

    /// Feed one stream edge; returns whether it was stored.
    pub fn feed(&mut self, e: &Edge, meter: &mut MemoryMeter) -> Result<bool> {
        let um = self.m.is_matched(e.u);
        let vm = self.m.is_matched(e.v);
        if um == vm {
            return Ok(false);
        }
        let (free, matched) = if um { (e.v, e.u) } else { (e.u, e.v) };
        if self.deg[free as usize] >= self.lambda || self.deg[matched as usize] >= 2 {
            return Ok(false);
        }
        meter.charge("unweighted", 1)?;
        self.deg[free as usize] += 1;
        self.deg[matched as usize] += 1;
        self.support.push(*e);
        debug_assert!(self.support.len() <= 4 * self.m.len().max(1));
        Ok(true)
    }

    /// Greedily assemble vertex-disjoint 3-augmenting paths, scanning support
    /// edges in insertion order and completing each across its matched edge.
    pub fn finalize(&self) -> Vec<ThreeAug> {
        greedy_three_augs(&self.m, &self.support)
    }
}

/// Greedy vertex-disjoint 3-augmenting paths from an ordered list of support
/// edges (each joining a free vertex to a matched one w.r.t. `m`): take the
/// earliest support edge, complete it across its matched edge with the
/// earliest compatible partner, and lock the four vertices.
pub fn greedy_three_augs(m: &Matching, support: &[Edge]) -> Vec<ThreeAug> {
    // Support edges indexed by their matched endpoint, insertion order.
    let mut at_matched: Vec<Vec<usize>> = vec![Vec::new(); m.n() as usize];
    for (i, e) in support.iter().enumerate() {
        let matched = if m.is_matched(e.u) { e.u } else { e.v };
        at_matched[matched as usize].push(i);
    }
    let mut used = vec![false; m.n() as usize];
    let mut out = Vec::new();
    for first in support {
        let (a, u) = if m.is_matched(first.u) {
            (first.v, first.u)
        } else {
            (first.u, first.v)
        };
        if used[a as usize] || used[u as usize] {
            continue;
        }
        let v = m.edge_at(u).expect("support edge hits matched vertex").other(u);
        if used[v as usize] {
            continue;
        }
        // Complete across uv: the earliest support edge at v whose free
        // endpoint differs from a (same endpoint would close a triangle,
        // not an augmentation).
        let second = at_matched[v as usize].iter().find_map(|&j| {
            let s = &support[j];
            let b = s.other(v);
            (b != a && !used[b as usize]).then_some((*s, b))
        });
        if let Some((second, b)) = second {
            let middle = m.edge_at(u).unwrap();
            for x in [a, u, v, b] {
                used[x as usize] = true;
            }
            out.push(ThreeAug {
                left: *first,
                middle,
                right: second,
                vertices: [a, u, v, b],
            });
        }
    }
    out
}

/// An M-edge uv is 3-augmentable if distinct free vertices a, b exist with
/// edges au and vb (in either orientation of uv).
pub fn count_three_augmentable(g: &WeightedGraph, m: &Matching) -> usize {
    m.edges()
        .iter()
        .filter(|e| {
            for (u, v) in [(e.u, e.v), (e.v, e.u)] {
                let free_at = |x: u32| -> Vec<u32> {
                    g.incident(x)
                        .iter()
                        .map(|&ei| g.edge(ei as usize).other(x))
                        .filter(|&y| !m.is_matched(y))
                        .collect()
                };
                let au = free_at(u);
                let bv = free_at(v);
                if au.iter().any(|a| bv.iter().any(|b| a != b)) {
                    return true;
                }
            }
            false
        })
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnweightedBranch {
    /// M₀ plus a maximum matching among vertices M₀ leaves free.
    FreePairs,
    /// M₀ grown greedily over the rest of the stream.
    Greedy,
    /// M₀ improved by recovered 3-augmenting paths.
    ThreeAug,
}

#[derive(Debug, Clone)]
pub struct UnweightedOutcome {
    pub matching: Matching,
    pub branch: UnweightedBranch,
}

/// Single-pass random-arrival pipeline for maximum cardinality: greedy
/// matching M₀ on the first ⌊p·m⌋ arrivals, then three parallel branches over
/// the remainder — store free-free edges and finish with a maximum matching
/// on them, keep growing greedily, and run the 3-augmentation black box —
/// returning the largest result.
pub fn random_arrival_unweighted(
    session: &StreamSession,
    p: f64,
    meter: &mut MemoryMeter,
) -> Result<UnweightedOutcome> {
    let g = session.graph();
    if session.is_empty() {
        return Ok(UnweightedOutcome {
            matching: Matching::new(g.n()),
            branch: UnweightedBranch::Greedy,
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Param(format!("prefix fraction must be in (0,1), got {p}")));
    }
    let prefix = (p * session.len() as f64).floor() as usize;
    if prefix < 1 {
        return Err(Error::Param(format!(
            "prefix fraction {p} selects no edges out of {}; increase p",
            session.len()
        )));
    }

    let mut m0 = Matching::new(g.n());
    for e in session.arrivals().take(prefix) {
        if m0.can_add(&e) {
            meter.charge("unweighted", 1)?;
            m0.add(e)?;
        }
    }

    let mut s1: Vec<Edge> = Vec::new();
    let mut grown = m0.clone();
    let mut unw = unw_init(m0.clone(), UNWEIGHTED_BETA)?;
    for e in session.arrivals().skip(prefix) {
        if !m0.is_matched(e.u) && !m0.is_matched(e.v) {
            meter.charge("unweighted", 1)?;
            s1.push(e);
        }
        if grown.can_add(&e) {
            meter.charge("unweighted", 1)?;
            grown.add(e)?;
        }
        unw.feed(&e, meter)?;
    }

    // Branch 1: maximum matching among the free-free survivors, atop M₀.
    let mut free_pairs = m0.clone();
    if !s1.is_empty() {
        let sub = WeightedGraph::from_edges_unchecked(g.n(), s1.iter().map(|e| (e.u, e.v, e.w)).collect())?;
        let s1_matching = match oracle::exact_mcm_bipartite(&sub) {
            Ok(m) => m,
            // Odd cycles among the free vertices: fall back to an
            // augmenting-path search without blossom contraction.
            Err(Error::Structure(_)) => kuhn_general(&sub),
            Err(e) => return Err(e),
        };
        for e in s1_matching.edges() {
            free_pairs.add(e)?;
        }
    }

    // Branch 3: apply the recovered vertex-disjoint 3-augmentations.
    let mut augmented = m0.clone();
    for aug in unw.finalize() {
        augmented.remove_at(aug.middle.u);
        augmented.add(aug.left)?;
        augmented.add(aug.right)?;
    }

    let mut best = UnweightedOutcome {
        matching: free_pairs,
        branch: UnweightedBranch::FreePairs,
    };
    for (cand, branch) in [
        (grown, UnweightedBranch::Greedy),
        (augmented, UnweightedBranch::ThreeAug),
    ] {
        if cand.len() > best.matching.len() {
            best = UnweightedOutcome {
                matching: cand,
                branch,
            };
        }
    }
    Ok(best)
}

/// Maximal-then-augment cardinality search that ignores blossoms: repeatedly
/// look for a simple alternating path between free vertices by DFS. Exact on
/// bipartite inputs, a deterministic heuristic on odd components.
fn kuhn_general(g: &WeightedGraph) -> Matching {
    let mut m = Matching::new(g.n());
    for e in g.edges() {
        if m.can_add(e) {
            m.add(*e).expect("checked free");
        }
    }
    let cap = g.m();
    for _ in 0..cap {
        let mut improved = false;
        'outer: for s in 0..g.n() {
            if m.is_matched(s) || g.degree(s) == 0 {
                continue;
            }
            let mut visited = vec![false; g.n() as usize];
            if let Some(path) = alt_path_dfs(g, &m, s, false, &mut visited) {
                // Path alternates free-matched-…-free; flip it.
                for (i, e) in path.iter().enumerate() {
                    if i % 2 == 1 {
                        m.remove_at(e.u);
                    }
                }
                for (i, e) in path.iter().enumerate() {
                    if i % 2 == 0 {
                        m.add(*e).expect("alternating flip");
                    }
                }
                improved = true;
                break 'outer;
            }
        }
        if !improved {
            break;
        }
    }
    m
}

fn alt_path_dfs(
    g: &WeightedGraph,
    m: &Matching,
    cur: u32,
    expect_matched: bool,
    visited: &mut [bool],
) -> Option<Vec<Edge>> {
    visited[cur as usize] = true;
    for &ei in g.incident(cur) {
        let e = g.edge(ei as usize);
        let next = e.other(cur);
        if visited[next as usize] || m.contains(&e) != expect_matched {
            continue;
        }
        if !expect_matched && !m.is_matched(next) {
            return Some(vec![e]);
        }
        if let Some(mut rest) = alt_path_dfs(g, m, next, !expect_matched, visited) {
            rest.insert(0, e);
            return Some(rest);
        }
    }
    None
}
