//! Matching container with O(1) per-vertex lookup and a cached total weight.

use crate::error::Error;
use crate::graph::Edge;
use crate::Result;

/// A matching over vertices `0..n`. Lookup on an unmatched vertex reports an
/// implicit zero-weight edge: `matched_weight(v) == 0`. That convention shows
/// up in every filter formula of the streaming algorithms, so it lives here
/// rather than at each call site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    slots: Vec<Option<Edge>>,
    weight: i64,
    size: usize,
}

impl Matching {
    pub fn new(n: u32) -> Self {
        Matching {
            slots: vec![None; n as usize],
            weight: 0,
            size: 0,
        }
    }

    pub fn from_edges(n: u32, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut m = Matching::new(n);
        for e in edges {
            m.add(e)?;
        }
        Ok(m)
    }

    pub fn n(&self) -> u32 {
        self.slots.len() as u32
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// The matched edge at `v`, if any.
    pub fn edge_at(&self, v: u32) -> Option<Edge> {
        self.slots[v as usize]
    }

    /// w(M(v)) with the zero-edge convention for unmatched vertices.
    pub fn matched_weight(&self, v: u32) -> i64 {
        self.slots[v as usize].map_or(0, |e| e.w)
    }

    pub fn is_matched(&self, v: u32) -> bool {
        self.slots[v as usize].is_some()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.slots[e.u as usize].is_some_and(|m| m.key() == e.key())
    }

    /// Both endpoints free?
    pub fn can_add(&self, e: &Edge) -> bool {
        self.slots[e.u as usize].is_none() && self.slots[e.v as usize].is_none()
    }

    pub fn add(&mut self, e: Edge) -> Result<()> {
        if !self.can_add(&e) {
            return Err(Error::Structure(format!(
                "edge ({},{}) conflicts with matched edge",
                e.u, e.v
            )));
        }
        self.slots[e.u as usize] = Some(e);
        self.slots[e.v as usize] = Some(e);
        self.weight = self
            .weight
            .checked_add(e.w)
            .expect("matching weight overflow");
        self.size += 1;
        Ok(())
    }

    /// Remove the matched edge at `v` (no-op when unmatched); returns it.
    pub fn remove_at(&mut self, v: u32) -> Option<Edge> {
        let e = self.slots[v as usize].take()?;
        self.slots[e.other(v) as usize] = None;
        self.weight -= e.w;
        self.size -= 1;
        Some(e)
    }

    /// Member edges in canonical order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .slots
            .iter()
            .enumerate()
            .filter_map(|(v, s)| s.filter(|e| e.u == v as u32))
            .collect();
        out.sort_unstable();
        out
    }

    /// Recompute the weight from the slots; used by tests to cross-check the
    /// cached value.
    pub fn recompute_weight(&self) -> i64 {
        self.edges().iter().map(|e| e.w).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: u32, v: u32, w: i64) -> Edge {
        Edge::new(u, v, w)
    }

    #[test]
    fn zero_edge_convention() {
        let mut m = Matching::new(4);
        assert_eq!(m.matched_weight(2), 0);
        m.add(e(0, 1, 7)).unwrap();
        assert_eq!(m.matched_weight(0), 7);
        assert_eq!(m.matched_weight(1), 7);
        assert_eq!(m.matched_weight(2), 0);
    }

    #[test]
    fn add_remove_tracks_weight_and_size() {
        let mut m = Matching::new(6);
        m.add(e(0, 1, 3)).unwrap();
        m.add(e(2, 3, 4)).unwrap();
        assert!(m.add(e(1, 2, 9)).is_err());
        assert_eq!(m.weight(), 7);
        assert_eq!(m.len(), 2);
        assert_eq!(m.remove_at(3), Some(e(2, 3, 4)));
        assert_eq!(m.remove_at(3), None);
        assert_eq!(m.weight(), 3);
        assert_eq!(m.weight(), m.recompute_weight());
    }

    #[test]
    fn edges_deduped_and_sorted() {
        let mut m = Matching::new(6);
        m.add(e(4, 5, 1)).unwrap();
        m.add(e(0, 1, 1)).unwrap();
        assert_eq!(m.edges(), vec![e(0, 1, 1), e(4, 5, 1)]);
    }
}
