//! Deterministic instance generators for benchmarks and acceptance suites:
//! uniform random graphs, greedy-tightness gadget chains, augmenting-cycle
//! chains, and geometric weight classes.

use std::str::FromStr;

use crate::error::Error;
use crate::graph::WeightedGraph;
use crate::rng::SplitMix64;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ErdosRenyi,
    /// Chains of 3-edge paths whose middle edge ties the ends in weight but
    /// precedes them in canonical order, so greedy scores exactly half the
    /// optimum on every gadget.
    TightHalf,
    /// Chains of 4-cycles weighted (3, 4, 3, 4): matching either pair of
    /// opposite edges is maximal, and only the augmenting cycle moves between
    /// them.
    CycleFamily,
    /// Uniform random edges with weights drawn from powers of two.
    WeightClasses,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erdos_renyi" => Ok(Family::ErdosRenyi),
            "tight_half" => Ok(Family::TightHalf),
            "cycle_family" => Ok(Family::CycleFamily),
            "weight_classes" => Ok(Family::WeightClasses),
            other => Err(Error::Param(format!(
                "unknown family {other:?}; expected erdos_renyi, tight_half, cycle_family, or weight_classes"
            ))),
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::ErdosRenyi => "erdos_renyi",
            Family::TightHalf => "tight_half",
            Family::CycleFamily => "cycle_family",
            Family::WeightClasses => "weight_classes",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: u32,
    /// Edge count; used by the random families, implied by n for the gadget
    /// chains.
    pub m: usize,
    pub weight_max: i64,
    pub seed: u64,
}

pub fn gen(spec: &GeneratorSpec) -> Result<WeightedGraph> {
    if spec.n < 2 {
        return Err(Error::Param(format!("need n >= 2, got {}", spec.n)));
    }
    let max_m = spec.n as usize * (spec.n as usize - 1) / 2;
    if spec.m > max_m {
        return Err(Error::Param(format!(
            "m={} exceeds the {} simple edges on n={} vertices",
            spec.m, max_m, spec.n
        )));
    }
    if spec.weight_max < 1 {
        return Err(Error::Param(format!(
            "need weight_max >= 1, got {}",
            spec.weight_max
        )));
    }
    match spec.family {
        Family::ErdosRenyi => random_edges(spec, |rng| 1 + rng.below(spec.weight_max as u64) as i64),
        Family::WeightClasses => {
            let classes = spec.weight_max.ilog2() as u64 + 1;
            random_edges(spec, move |rng| 1i64 << rng.below(classes))
        }
        Family::TightHalf => tight_half(spec),
        Family::CycleFamily => cycle_chain(spec),
    }
}

/// `m` distinct edges chosen by shuffling the full pair list, so generation
/// terminates for every feasible (n, m).
fn random_edges(
    spec: &GeneratorSpec,
    mut weight: impl FnMut(&mut SplitMix64) -> i64,
) -> Result<WeightedGraph> {
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for u in 0..spec.n {
        for v in u + 1..spec.n {
            pairs.push((u, v));
        }
    }
    let mut rng = SplitMix64::new(spec.seed);
    rng.shuffle(&mut pairs);
    let edges = pairs[..spec.m]
        .iter()
        .map(|&(u, v)| (u, v, weight(&mut rng)))
        .collect();
    WeightedGraph::from_edges_unchecked(spec.n, edges)
}

/// Per 4 vertices: a 3-edge path 2–0–1–3 with one weight on all edges. The
/// middle edge (0,1) sorts first among equals, so greedy takes it and blocks
/// both ends: greedy = w, optimum = 2w, per gadget and in total.
fn tight_half(spec: &GeneratorSpec) -> Result<WeightedGraph> {
    let mut rng = SplitMix64::new(spec.seed);
    let mut edges = Vec::new();
    for base in (0..spec.n.saturating_sub(3)).step_by(4) {
        let w = 1 + rng.below(spec.weight_max as u64) as i64;
        edges.push((base, base + 1, w));
        edges.push((base, base + 2, w));
        edges.push((base + 1, base + 3, w));
    }
    WeightedGraph::from_edges_unchecked(spec.n, edges)
}

/// Per 4 vertices: the cycle base–base+1–base+2–base+3 weighted (3, 4, 3, 4).
fn cycle_chain(spec: &GeneratorSpec) -> Result<WeightedGraph> {
    if spec.weight_max < 4 {
        return Err(Error::Param(
            "cycle_family needs weight_max >= 4 for the (3,4,3,4) pattern".into(),
        ));
    }
    let mut edges = Vec::new();
    for base in (0..spec.n.saturating_sub(3)).step_by(4) {
        edges.push((base, base + 1, 3));
        edges.push((base + 1, base + 2, 4));
        edges.push((base + 2, base + 3, 3));
        edges.push((base, base + 3, 4));
    }
    WeightedGraph::from_edges_unchecked(spec.n, edges)
}
