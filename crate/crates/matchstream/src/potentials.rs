//! Per-vertex dual potentials for the local-ratio pass.

use crate::error::Error;
use crate::graph::Edge;
use crate::Result;

/// Vertex potentials α. They start at zero, may only increase, and become
/// immutable once frozen; the second phase of the streaming algorithm filters
/// against the frozen values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexPotentials {
    alpha: Vec<i64>,
    frozen: bool,
}

impl VertexPotentials {
    pub fn new(n: u32) -> Self {
        VertexPotentials {
            alpha: vec![0; n as usize],
            frozen: false,
        }
    }

    pub fn n(&self) -> u32 {
        self.alpha.len() as u32
    }

    pub fn get(&self, v: u32) -> i64 {
        self.alpha[v as usize]
    }

    /// α_u + α_v for the endpoints of `e`.
    pub fn edge_sum(&self, e: &Edge) -> i64 {
        self.alpha[e.u as usize] + self.alpha[e.v as usize]
    }

    /// Residual weight w(e) − α_u − α_v. Negative once the endpoints have
    /// absorbed more than the edge is worth.
    pub fn residual(&self, e: &Edge) -> i64 {
        e.w - self.edge_sum(e)
    }

    pub fn increase(&mut self, v: u32, delta: i64) -> Result<()> {
        if self.frozen {
            return Err(Error::Structure(
                "potentials are frozen; no further increases".into(),
            ));
        }
        if delta < 0 {
            return Err(Error::Param(format!(
                "potential increase must be non-negative, got {delta}"
            )));
        }
        let slot = &mut self.alpha[v as usize];
        *slot = slot
            .checked_add(delta)
            .ok_or_else(|| Error::Oversize("potential overflow".into()))?;
        Ok(())
    }

    /// Freeze the potentials. Idempotent.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_then_frozen() {
        let mut a = VertexPotentials::new(3);
        a.increase(0, 5).unwrap();
        a.increase(0, 2).unwrap();
        assert_eq!(a.get(0), 7);
        let e = Edge::new(0, 1, 10);
        assert_eq!(a.edge_sum(&e), 7);
        assert_eq!(a.residual(&e), 3);
        a.freeze();
        a.freeze();
        assert!(a.is_frozen());
        assert!(a.increase(1, 1).is_err());
        assert_eq!(a.get(1), 0);
    }

    #[test]
    fn negative_delta_rejected() {
        let mut a = VertexPotentials::new(1);
        assert!(a.increase(0, -1).is_err());
    }
}
