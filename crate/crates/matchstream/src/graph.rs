//! Weighted graph storage and the plain-text graph file format.

use crate::error::Error;
use crate::Result;
use std::fmt::Write as _;

/// Default cap exponent: weights must satisfy `w <= n^C`.
pub const DEFAULT_WEIGHT_EXP: u32 = 4;

/// An undirected edge, normalized so `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub w: i64,
}

impl Edge {
    pub fn new(u: u32, v: u32, w: i64) -> Self {
        if u < v {
            Edge { u, v, w }
        } else {
            Edge { u: v, v: u, w }
        }
    }

    /// Unordered endpoint pair, normalized; edge identity ignores weight.
    pub fn key(&self) -> (u32, u32) {
        (self.u, self.v)
    }

    pub fn touches(&self, x: u32) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: u32) -> u32 {
        if self.u == x {
            self.v
        } else {
            debug_assert_eq!(self.v, x);
            self.u
        }
    }
}

/// Immutable weighted graph. Owns a sorted edge list plus a per-vertex
/// adjacency index. All algorithms treat it as a shared read-only universe.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    n: u32,
    edges: Vec<Edge>,
    /// adjacency: for each vertex, indices into `edges`, sorted by edge order.
    adj: Vec<Vec<u32>>,
}

impl WeightedGraph {
    /// Validating constructor: rejects self-loops, parallel edges, ids out of
    /// range, and weights outside `1..=n^weight_exp`.
    pub fn new(n: u32, edges: Vec<(u32, u32, i64)>, weight_exp: u32) -> Result<Self> {
        let cap = weight_cap(n, weight_exp);
        for &(u, v, w) in &edges {
            if u == v {
                return Err(Error::Param(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Param(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if w < 1 || w > cap {
                return Err(Error::Param(format!(
                    "weight {w} on ({u},{v}) outside 1..={cap} (n^{weight_exp})"
                )));
            }
        }
        Self::build(n, edges)
    }

    pub fn with_default_cap(n: u32, edges: Vec<(u32, u32, i64)>) -> Result<Self> {
        Self::new(n, edges, DEFAULT_WEIGHT_EXP)
    }

    /// Constructor that skips the weight-range check (still rejects
    /// self-loops, range errors and parallel edges). Needed for internal
    /// residual subgraphs and for test fixtures that model unmatched vertices
    /// through explicit zero-weight edges.
    pub fn from_edges_unchecked(n: u32, edges: Vec<(u32, u32, i64)>) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u == v {
                return Err(Error::Param(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::Param(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if w < 0 {
                return Err(Error::Param(format!("negative weight {w} on ({u},{v})")));
            }
        }
        Self::build(n, edges)
    }

    fn build(n: u32, raw: Vec<(u32, u32, i64)>) -> Result<Self> {
        let mut edges: Vec<Edge> = raw.into_iter().map(|(u, v, w)| Edge::new(u, v, w)).collect();
        edges.sort_unstable();
        for pair in edges.windows(2) {
            if pair[0].key() == pair[1].key() {
                return Err(Error::Param(format!(
                    "parallel edge ({},{})",
                    pair[0].u, pair[0].v
                )));
            }
        }
        let mut adj = vec![Vec::new(); n as usize];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u as usize].push(i as u32);
            adj[e.v as usize].push(i as u32);
        }
        Ok(WeightedGraph { n, edges, adj })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order (sorted by (u, v, w)).
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> Edge {
        self.edges[idx]
    }

    /// Indices of edges incident to `v`, in canonical edge order.
    pub fn incident(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Look up an edge by endpoints.
    pub fn find_edge(&self, u: u32, v: u32) -> Option<Edge> {
        let key = Edge::new(u, v, 0).key();
        self.adj[u as usize]
            .iter()
            .map(|&i| self.edges[i as usize])
            .find(|e| e.key() == key)
    }

    /// Parse the plain-text format: line 1 `n m`, then m lines `u v w`
    /// (0-indexed, whitespace-separated, LF).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Param("empty graph file".into()))?;
        let mut it = header.split_whitespace();
        let n: u32 = parse_field(it.next(), "n")?;
        let m: usize = parse_field(it.next(), "m")?;
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Param(format!("expected {m} edges, got {i}")))?;
            let mut f = line.split_whitespace();
            let u: u32 = parse_field(f.next(), "u")?;
            let v: u32 = parse_field(f.next(), "v")?;
            let w: i64 = parse_field(f.next(), "w")?;
            edges.push((u, v, w));
        }
        Self::with_default_cap(n, edges)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| Error::Input {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }

    /// Serialize in the same format `parse` reads. Round-trips byte-exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
        }
        out
    }
}

fn weight_cap(n: u32, exp: u32) -> i64 {
    (n as i64).saturating_pow(exp).max(1)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, name: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Param(format!("missing field {name}")))?
        .parse()
        .map_err(|_| Error::Param(format!("bad field {name}")))
}
