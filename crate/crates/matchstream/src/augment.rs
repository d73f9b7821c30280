//! Augmenting paths/cycles, their matching neighborhood, gain accounting,
//! and the symmetric-difference decomposition of two matchings.

use crate::error::Error;
use crate::graph::Edge;
use crate::matching::Matching;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AugKind {
    Path,
    Cycle,
}

/// An alternating path or cycle together with its matching neighborhood
/// N_M(C) — every matched edge incident to a vertex of C, which for paths may
/// include edges that are not on the walk — and the cached gain
/// `w(C \ M) − w(N_M(C))`. Gain may be negative for candidates.
///
/// Stored in canonical form: cycles are rotated to start at their smallest
/// vertex (smaller second vertex breaks the direction tie), paths run from
/// their smaller endpoint. That makes augmentations directly comparable and
/// test output stable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Augmentation {
    pub kind: AugKind,
    /// Walk-ordered edges, strictly alternating between M and non-M.
    pub edges: Vec<Edge>,
    /// N_M(C), sorted canonically.
    pub neighborhood: Vec<Edge>,
    pub gain: i64,
}

impl Augmentation {
    /// The empty augmentation: applying it is a no-op.
    pub fn empty() -> Self {
        Augmentation {
            kind: AugKind::Path,
            edges: Vec::new(),
            neighborhood: Vec::new(),
            gain: 0,
        }
    }

    /// Build a path augmentation from walk-ordered edges.
    pub fn path(edges: Vec<Edge>, m: &Matching) -> Result<Self> {
        Self::build(AugKind::Path, edges, m)
    }

    /// Build a cycle augmentation from walk-ordered edges (closed, even).
    pub fn cycle(edges: Vec<Edge>, m: &Matching) -> Result<Self> {
        Self::build(AugKind::Cycle, edges, m)
    }

    fn build(kind: AugKind, edges: Vec<Edge>, m: &Matching) -> Result<Self> {
        if edges.is_empty() {
            return Ok(Self::empty());
        }
        let walk = vertex_walk(kind, &edges)?;
        // Simplicity: a repeated vertex would make apply() ill-defined.
        {
            let mut seen: Vec<u32> = match kind {
                AugKind::Path => walk.clone(),
                AugKind::Cycle => walk[..walk.len() - 1].to_vec(),
            };
            seen.sort_unstable();
            if seen.windows(2).any(|p| p[0] == p[1]) {
                return Err(Error::Structure("augmentation revisits a vertex".into()));
            }
        }
        // Strict alternation between matched and unmatched edges.
        let in_m: Vec<bool> = edges.iter().map(|e| m.contains(e)).collect();
        if in_m.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::Structure("augmentation does not alternate".into()));
        }
        if kind == AugKind::Cycle {
            if edges.len() % 2 != 0 {
                return Err(Error::Structure("odd cycle cannot alternate".into()));
            }
            if in_m[0] == in_m[edges.len() - 1] {
                return Err(Error::Structure(
                    "cycle closure breaks alternation".into(),
                ));
            }
        }
        // N_M(C): all matched edges incident to the walk's vertices.
        let mut neighborhood: Vec<Edge> = Vec::new();
        for &v in &walk {
            if let Some(me) = m.edge_at(v) {
                if !neighborhood.contains(&me) {
                    neighborhood.push(me);
                }
            }
        }
        neighborhood.sort_unstable();
        if kind == AugKind::Cycle {
            // Alternation forces every on-cycle vertex to be matched by a
            // cycle edge, so the neighborhood is exactly edges ∩ M.
            debug_assert_eq!(neighborhood.len(), edges.len() / 2);
        }
        let added: i64 = edges
            .iter()
            .zip(&in_m)
            .filter(|(_, &inm)| !inm)
            .map(|(e, _)| e.w)
            .sum();
        let removed: i64 = neighborhood.iter().map(|e| e.w).sum();
        let mut aug = Augmentation {
            kind,
            edges,
            neighborhood,
            gain: added - removed,
        };
        aug.canonicalize();
        Ok(aug)
    }

    fn canonicalize(&mut self) {
        match self.kind {
            AugKind::Path => {
                let walk = vertex_walk(self.kind, &self.edges).expect("validated walk");
                if walk[walk.len() - 1] < walk[0] {
                    self.edges.reverse();
                }
            }
            AugKind::Cycle => {
                let walk = vertex_walk(self.kind, &self.edges).expect("validated walk");
                let ring = &walk[..walk.len() - 1];
                let start = (0..ring.len()).min_by_key(|&i| ring[i]).expect("nonempty");
                let n = ring.len();
                let fwd = ring[(start + 1) % n];
                let bwd = ring[(start + n - 1) % n];
                let mut edges = Vec::with_capacity(n);
                if fwd <= bwd {
                    for i in 0..n {
                        edges.push(self.edges[(start + i) % n]);
                    }
                } else {
                    for i in 0..n {
                        edges.push(self.edges[(start + n - 1 - i) % n]);
                    }
                }
                self.edges = edges;
            }
        }
    }

    /// Distinct vertices of the walk, sorted.
    pub fn vertices(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .edges
            .iter()
            .flat_map(|e| [e.u, e.v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Walk plus neighborhood vertices, sorted: everything an application
    /// touches. Two augmentations with disjoint footprints can be applied in
    /// either order; walk-disjointness alone is not enough, because a path's
    /// neighborhood may reach one matched edge beyond each endpoint.
    pub fn footprint(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .edges
            .iter()
            .chain(&self.neighborhood)
            .flat_map(|e| [e.u, e.v])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Recover the vertex walk from walk-ordered edges. For cycles the first
/// vertex is repeated at the end.
fn vertex_walk(kind: AugKind, edges: &[Edge]) -> Result<Vec<u32>> {
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    if edges.len() == 1 {
        if kind == AugKind::Cycle {
            return Err(Error::Structure("one-edge cycle".into()));
        }
        return Ok(vec![edges[0].u, edges[0].v]);
    }
    // Orient the first edge away from the vertex it shares with the second.
    let shared = |a: &Edge, b: &Edge| -> Option<u32> {
        [a.u, a.v].into_iter().find(|&x| b.touches(x))
    };
    let s01 = shared(&edges[0], &edges[1])
        .ok_or_else(|| Error::Structure("walk edges not connected".into()))?;
    let mut walk = vec![edges[0].other(s01), s01];
    for i in 1..edges.len() {
        let at = walk[walk.len() - 1];
        if !edges[i].touches(at) {
            return Err(Error::Structure("walk edges not connected".into()));
        }
        walk.push(edges[i].other(at));
    }
    if kind == AugKind::Cycle && walk[walk.len() - 1] != walk[0] {
        return Err(Error::Structure("cycle walk does not close".into()));
    }
    Ok(walk)
}

/// Gain of `aug` with respect to `m`, recomputed from scratch. Errors if the
/// edge sequence does not alternate w.r.t. `m`.
pub fn gain(aug: &Augmentation, m: &Matching) -> Result<i64> {
    let rebuilt = Augmentation::build(aug.kind, aug.edges.clone(), m)?;
    Ok(rebuilt.gain)
}

/// Apply `aug` to `m`: remove N_M(C), add the unmatched edges of C. The
/// result's weight moves by exactly `gain(aug, m)`.
pub fn apply_augmentation(m: &Matching, aug: &Augmentation) -> Result<Matching> {
    let mut out = m.clone();
    for e in &aug.neighborhood {
        if !out.contains(e) {
            return Err(Error::Structure(
                "neighborhood edge not in matching".into(),
            ));
        }
        out.remove_at(e.u);
    }
    for e in &aug.edges {
        if m.contains(e) {
            continue;
        }
        out.add(*e)?;
    }
    Ok(out)
}

/// Decompose M △ M' into maximal alternating paths and cycles, reported as
/// augmentations w.r.t. `m`. Every edge of the symmetric difference appears
/// in exactly one component; output is sorted canonically.
pub fn symmetric_difference_augmentations(m: &Matching, m2: &Matching) -> Vec<Augmentation> {
    assert_eq!(m.n(), m2.n(), "matchings over different vertex sets");
    let n = m.n();
    // Degree in the symmetric difference is at most 2, so components are
    // paths and cycles; walk them directly off the two lookup tables.
    let diff_at = |v: u32| -> Vec<Edge> {
        let mut out = Vec::new();
        if let Some(e) = m.edge_at(v) {
            if !m2.contains(&e) {
                out.push(e);
            }
        }
        if let Some(e) = m2.edge_at(v) {
            if !m.contains(&e) {
                out.push(e);
            }
        }
        out
    };
    let mut visited = vec![false; n as usize];
    let mut out = Vec::new();
    // Paths first: start from vertices of degree 1 in the difference.
    for start in 0..n {
        if visited[start as usize] {
            continue;
        }
        let inc = diff_at(start);
        if inc.len() != 1 {
            continue;
        }
        let mut edges = Vec::new();
        let mut prev = start;
        let mut cur = inc[0].other(start);
        visited[start as usize] = true;
        edges.push(inc[0]);
        loop {
            visited[cur as usize] = true;
            match diff_at(cur).into_iter().find(|e| !e.touches(prev)) {
                Some(e) => {
                    prev = cur;
                    cur = e.other(prev);
                    edges.push(e);
                }
                None => break,
            }
        }
        out.push(Augmentation::path(edges, m).expect("difference path alternates"));
    }
    // Remaining components are cycles.
    for start in 0..n {
        if visited[start as usize] {
            continue;
        }
        let inc = diff_at(start);
        if inc.is_empty() {
            continue;
        }
        debug_assert_eq!(inc.len(), 2);
        let mut edges = vec![inc[0]];
        visited[start as usize] = true;
        let mut prev = start;
        let mut cur = inc[0].other(start);
        while cur != start {
            visited[cur as usize] = true;
            let e = diff_at(cur)
                .into_iter()
                .find(|e| !e.touches(prev))
                .expect("degree 2 on cycle");
            prev = cur;
            cur = e.other(prev);
            edges.push(e);
        }
        out.push(Augmentation::cycle(edges, m).expect("difference cycle alternates"));
    }
    out.sort();
    out
}
