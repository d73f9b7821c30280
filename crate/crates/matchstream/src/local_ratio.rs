//! Streaming local-ratio pass: maintain vertex potentials, push each edge
//! that beats the potentials of its endpoints onto a stack together with its
//! residual, and unwind the stack in reverse to read off a matching worth at
//! least half the optimum.

use crate::graph::Edge;
use crate::matching::Matching;
use crate::error::Error;
use crate::potentials::VertexPotentials;
use crate::stream::MemoryMeter;
use crate::Result;

#[derive(Debug, Clone)]
pub struct LocalRatio {
    potentials: VertexPotentials,
    stack: Vec<(Edge, i64)>,
}

impl LocalRatio {
    pub fn new(n: u32) -> Self {
        LocalRatio {
            potentials: VertexPotentials::new(n),
            stack: Vec::new(),
        }
    }

    /// Feed one stream edge. If w(e) exceeds α_u + α_v the residual
    /// w(e) − α_u − α_v is added to both endpoint potentials and the edge is
    /// pushed; otherwise the edge is dropped. Returns whether it was pushed.
    pub fn process(&mut self, e: &Edge, meter: &mut MemoryMeter) -> Result<bool> {
        if self.potentials.is_frozen() {
            return Err(Error::Structure(
                "local-ratio pass is frozen; edges can no longer be processed".into(),
            ));
        }
        let residual = self.potentials.residual(e);
        if residual <= 0 {
            return Ok(false);
        }
        meter.charge("local_ratio", 1)?;
        self.potentials.increase(e.u, residual)?;
        self.potentials.increase(e.v, residual)?;
        self.stack.push((*e, residual));
        Ok(true)
    }

    /// End the pass: potentials become immutable and serve as the filter for
    /// everything that arrives later. Idempotent.
    pub fn freeze(&mut self) {
        self.potentials.freeze();
    }

    pub fn is_frozen(&self) -> bool {
        self.potentials.is_frozen()
    }

    pub fn potentials(&self) -> &VertexPotentials {
        &self.potentials
    }

    /// Stack of pushed edges with their residuals, in push order.
    pub fn stack(&self) -> &[(Edge, i64)] {
        &self.stack
    }

    pub fn stack_len(&self) -> usize {
        self.stack.len()
    }

    /// Pop the stack in reverse push order, adding every edge whose endpoints
    /// are still free, on top of `base`. Non-destructive: the stack survives
    /// and the call can be repeated against different bases.
    pub fn unwind_onto(&self, base: &Matching) -> Matching {
        let mut out = base.clone();
        for (e, _) in self.stack.iter().rev() {
            if out.can_add(e) {
                out.add(*e).expect("checked free");
            }
        }
        out
    }
}

/// Phase-2 filter: keep an edge iff its weight still beats the frozen
/// potentials of its endpoints.
pub fn residual_filter(e: &Edge, potentials: &VertexPotentials) -> bool {
    debug_assert!(potentials.is_frozen(), "filtering against live potentials");
    potentials.residual(e) > 0
}
