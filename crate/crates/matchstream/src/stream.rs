//! Random-arrival stream sessions and the edge-count memory meter that keeps
//! the streaming algorithms honest about their footprint.

use crate::error::Error;
use crate::graph::{Edge, WeightedGraph};
use crate::rng::SplitMix64;
use crate::Result;

/// A graph plus a fixed arrival order of its edges. The order is a uniform
/// permutation drawn from the session seed, or an explicit order supplied by
/// a test. Iterating the session replays the same arrivals every time.
#[derive(Debug, Clone)]
pub struct StreamSession {
    graph: WeightedGraph,
    order: Vec<u32>,
    seed: u64,
}

impl StreamSession {
    pub fn new(graph: WeightedGraph, seed: u64) -> Self {
        let mut order: Vec<u32> = (0..graph.m() as u32).collect();
        SplitMix64::new(seed).shuffle(&mut order);
        StreamSession { graph, order, seed }
    }

    /// Fixed arrival order for worked examples; must be a permutation of the
    /// edge indices.
    pub fn with_order(graph: WeightedGraph, order: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; graph.m()];
        if order.len() != graph.m() {
            return Err(Error::Param(format!(
                "arrival order has {} entries for {} edges",
                order.len(),
                graph.m()
            )));
        }
        for &i in &order {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::Param(format!("edge index {i} out of range")))?;
            if *slot {
                return Err(Error::Param(format!("edge index {i} repeated")));
            }
            *slot = true;
        }
        Ok(StreamSession {
            graph,
            order,
            seed: 0,
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The i-th arriving edge.
    pub fn arrival(&self, i: usize) -> Edge {
        self.graph.edge(self.order[i] as usize)
    }

    pub fn arrivals(&self) -> impl Iterator<Item = Edge> + '_ {
        self.order.iter().map(move |&i| self.graph.edge(i as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeterMode {
    /// Exceeding the budget is a hard error.
    Strict,
    /// Violations are recorded and reported but execution continues.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeterViolation {
    pub module: &'static str,
    pub stored: usize,
    pub budget: usize,
}

/// Counts stored edges against a budget of ceil(c · n · (log₂ n)^k). Every
/// structure that retains stream edges charges the meter when it stores one
/// and releases when it drops one; the peak is what reports quote.
#[derive(Debug, Clone)]
pub struct MemoryMeter {
    budget: usize,
    mode: MeterMode,
    stored: usize,
    peak: usize,
    violations: Vec<MeterViolation>,
}

impl MemoryMeter {
    pub fn new(n: u32, c: f64, log_k: u32, mode: MeterMode) -> Self {
        let lg = if n > 1 { (n as f64).log2() } else { 0.0 };
        let budget = (c * n as f64 * lg.powi(log_k as i32)).ceil() as usize;
        Self::with_budget(budget, mode)
    }

    pub fn with_budget(budget: usize, mode: MeterMode) -> Self {
        MemoryMeter {
            budget,
            mode,
            stored: 0,
            peak: 0,
            violations: Vec::new(),
        }
    }

    /// A meter that never trips; for offline paths and tests.
    pub fn unlimited() -> Self {
        Self::with_budget(usize::MAX, MeterMode::Lenient)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn stored(&self) -> usize {
        self.stored
    }

    pub fn peak(&self) -> usize {
        self.peak
    }

    pub fn violations(&self) -> &[MeterViolation] {
        &self.violations
    }

    pub fn charge(&mut self, module: &'static str, amount: usize) -> Result<()> {
        self.stored += amount;
        self.peak = self.peak.max(self.stored);
        if self.stored > self.budget {
            self.violations.push(MeterViolation {
                module,
                stored: self.stored,
                budget: self.budget,
            });
            if self.mode == MeterMode::Strict {
                return Err(Error::Budget {
                    module,
                    stored: self.stored,
                    budget: self.budget,
                });
            }
        }
        Ok(())
    }

    pub fn release(&mut self, amount: usize) {
        self.stored = self.stored.saturating_sub(amount);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> WeightedGraph {
        WeightedGraph::from_edges_unchecked(4, vec![(0, 1, 1), (1, 2, 2), (2, 3, 3)]).unwrap()
    }

    #[test]
    fn same_seed_same_order() {
        let a = StreamSession::new(tiny(), 7);
        let b = StreamSession::new(tiny(), 7);
        assert_eq!(a.order, b.order);
        let c = StreamSession::new(tiny(), 8);
        // All m! orders are possible; just check the permutation property.
        let mut sorted = c.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn explicit_order_validated() {
        assert!(StreamSession::with_order(tiny(), vec![2, 0, 1]).is_ok());
        assert!(StreamSession::with_order(tiny(), vec![0, 0, 1]).is_err());
        assert!(StreamSession::with_order(tiny(), vec![0, 1]).is_err());
        assert!(StreamSession::with_order(tiny(), vec![0, 1, 3]).is_err());
    }

    #[test]
    fn arrivals_follow_order() {
        let s = StreamSession::with_order(tiny(), vec![2, 0, 1]).unwrap();
        let ws: Vec<i64> = s.arrivals().map(|e| e.w).collect();
        assert_eq!(ws, vec![3, 1, 2]);
    }

    #[test]
    fn meter_budget_formula() {
        // 8 * 16 * 4^2 = 2048.
        let m = MemoryMeter::new(16, 8.0, 2, MeterMode::Strict);
        assert_eq!(m.budget(), 2048);
        // k = 0 ignores the log factor.
        let m = MemoryMeter::new(16, 2.0, 0, MeterMode::Strict);
        assert_eq!(m.budget(), 32);
    }

    #[test]
    fn strict_trips_lenient_records() {
        let mut m = MemoryMeter::with_budget(2, MeterMode::Strict);
        m.charge("a", 2).unwrap();
        assert!(matches!(
            m.charge("a", 1),
            Err(Error::Budget {
                module: "a",
                stored: 3,
                budget: 2
            })
        ));
        let mut m = MemoryMeter::with_budget(2, MeterMode::Lenient);
        m.charge("b", 3).unwrap();
        assert_eq!(m.violations().len(), 1);
        assert_eq!(m.peak(), 3);
        m.release(3);
        assert_eq!(m.stored(), 0);
        assert_eq!(m.peak(), 3);
    }
}
