//! Weighted augmentation over a frozen base matching. Base edges are sampled
//! into a marked set (probability ½ each); stream edges that are light enough
//! relative to the base yet heavy against a marked neighbor become unweighted
//! support edges, bucketed by weight class, while edges heavier than both
//! displaced base edges feed a parallel excess local-ratio pass. Finalize
//! returns the better of the excess repair and the greedy class repair.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use crate::error::Error;
use crate::graph::Edge;
use crate::local_ratio::LocalRatio;
use crate::matching::Matching;
use crate::rng::SplitMix64;
use crate::rounding::{rat_int, ratio};
use crate::stream::MemoryMeter;
use crate::unweighted::{greedy_three_augs, unw_init, ThreeAug, UnwAugPathState};
use crate::Result;

/// Weight class index j such that 2^{j−1} ≤ w < 2^j (weight 1 is class 1).
pub fn weight_class(w: i64) -> u32 {
    assert!(w >= 1, "weight classes are defined for positive weights");
    64 - (w as u64).leading_zeros()
}

#[derive(Debug, Clone, Copy)]
pub struct WapParams {
    pub alpha: f64,
    pub beta: f64,
    /// Classes holding fewer base edges than this are solved offline at
    /// finalize, from a store of every stream edge incident on the class.
    pub small_class_threshold: usize,
}

impl WapParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Param(format!(
                "alpha must be in (0, 1), got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Param(format!("beta must be in (0, 1), got {beta}")));
        }
        Ok(WapParams {
            alpha,
            beta,
            small_class_threshold: (100.0 / beta).ceil() as usize,
        })
    }
}

impl Default for WapParams {
    fn default() -> Self {
        WapParams::new(0.02, 1.0 / 16000.0).expect("default constants are valid")
    }
}

/// A weight class too small for the streaming instance: keep its marked base
/// edges plus every incident stream edge, and solve at finalize.
#[derive(Debug, Clone)]
struct SmallClass {
    middles: Matching,
    store: Vec<Edge>,
}

#[derive(Debug, Clone)]
pub struct WapState {
    m0: Matching,
    /// Per vertex: the base edge covering it (if any) is marked.
    marked: Vec<bool>,
    /// Thresholds held exactly; weights reach n^4, where f64 comparisons slip.
    one_plus_alpha: BigRational,
    one_plus_two_alpha: BigRational,
    /// Streaming support-set instances for classes at or above the threshold.
    classes: BTreeMap<u32, UnwAugPathState>,
    small: BTreeMap<u32, SmallClass>,
    excess: LocalRatio,
    /// Per class: edges that passed the support filter (fed even when the
    /// class keeps no instance; useful for diagnostics).
    fed_counts: BTreeMap<u32, usize>,
    store_cap: usize,
}

pub fn wap_initialize(m0: Matching, seed: u64, params: WapParams) -> Result<WapState> {
    let n = m0.n();
    let mut rng = SplitMix64::new(seed);
    let mut marked = vec![false; n as usize];
    // Per class: (all base edges, marked base edges), in canonical edge order.
    let mut by_class: BTreeMap<u32, (Vec<Edge>, Vec<Edge>)> = BTreeMap::new();
    for e in m0.edges() {
        let is_marked = rng.coin();
        if is_marked {
            marked[e.u as usize] = true;
            marked[e.v as usize] = true;
        }
        if e.w >= 1 {
            let slot = by_class.entry(weight_class(e.w)).or_default();
            slot.0.push(e);
            if is_marked {
                slot.1.push(e);
            }
        }
    }
    let alpha = BigRational::from_float(params.alpha)
        .ok_or_else(|| Error::Param("alpha must be finite".into()))?;
    let mut classes = BTreeMap::new();
    let mut small = BTreeMap::new();
    for (j, (all, marked_middles)) in by_class {
        // A class without marked middles can never host an augmentation.
        if marked_middles.is_empty() {
            continue;
        }
        let middles = Matching::from_edges(n, marked_middles)?;
        if all.len() < params.small_class_threshold {
            small.insert(
                j,
                SmallClass {
                    middles,
                    store: Vec::new(),
                },
            );
        } else {
            classes.insert(j, unw_init(middles, params.beta)?);
        }
    }
    Ok(WapState {
        m0,
        marked,
        one_plus_alpha: BigRational::one() + &alpha,
        one_plus_two_alpha: BigRational::one() + &alpha + &alpha,
        classes,
        small,
        excess: LocalRatio::new(n),
        fed_counts: BTreeMap::new(),
        store_cap: 4usize
            .saturating_mul(params.small_class_threshold)
            .saturating_mul(n as usize),
    })
}

impl WapState {
    pub fn base(&self) -> &Matching {
        &self.m0
    }

    /// Whether the base edge covering `v` is marked (false if `v` is free).
    pub fn is_marked_at(&self, v: u32) -> bool {
        self.marked[v as usize]
    }

    pub fn marked_edges(&self) -> Vec<Edge> {
        self.m0
            .edges()
            .into_iter()
            .filter(|e| self.marked[e.u as usize])
            .collect()
    }

    /// Classes with a streaming support-set instance.
    pub fn class_ids(&self) -> Vec<u32> {
        self.classes.keys().copied().collect()
    }

    /// Classes flagged small and solved offline.
    pub fn small_class_ids(&self) -> Vec<u32> {
        self.small.keys().copied().collect()
    }

    pub fn small_store_len(&self, class: u32) -> usize {
        self.small.get(&class).map_or(0, |sc| sc.store.len())
    }

    pub fn fed_count(&self, class: u32) -> usize {
        self.fed_counts.get(&class).copied().unwrap_or(0)
    }

    pub fn excess(&self) -> &LocalRatio {
        &self.excess
    }

    /// The support filter: e must carry small excess over the base edges it
    /// displaces, exactly one of those base edges must be marked, and e must
    /// be heavy against that middle: w(e) ≥ (1+2α)(½·w(marked) + w(unmarked)).
    /// Returns the class of e's own weight when all three hold.
    fn support_filter(&self, e: &Edge) -> Option<u32> {
        let wu = self.m0.matched_weight(e.u);
        let wv = self.m0.matched_weight(e.v);
        if rat_int(e.w) > &self.one_plus_alpha * rat_int(wu + wv) {
            return None;
        }
        let (mu, mv) = (self.marked[e.u as usize], self.marked[e.v as usize]);
        if mu == mv {
            // Neither or both neighbors marked: the filter needs exactly one.
            return None;
        }
        let (wm, wun) = if mu { (wu, wv) } else { (wv, wu) };
        if rat_int(e.w) < &self.one_plus_two_alpha * (ratio(wm, 2) + rat_int(wun)) {
            return None;
        }
        Some(weight_class(e.w))
    }
}

/// Feed one stream edge. Both branches are tested independently: the excess
/// branch fires when w(e) ≥ w(M₀(u)) + w(M₀(v)) (feeding the residual), and
/// the support branch when the filter in `support_filter` passes.
pub fn wap_feed(state: &mut WapState, e: &Edge, meter: &mut MemoryMeter) -> Result<()> {
    let wu = state.m0.matched_weight(e.u);
    let wv = state.m0.matched_weight(e.v);
    if e.w >= wu + wv {
        let excess = Edge::new(e.u, e.v, e.w - wu - wv);
        state.excess.process(&excess, meter)?;
    }
    if let Some(j) = state.support_filter(e) {
        *state.fed_counts.entry(j).or_insert(0) += 1;
        if let Some(inst) = state.classes.get_mut(&j) {
            inst.feed(e, meter)?;
        }
    }
    // Small classes store every incident edge, unfiltered; the filter is
    // re-applied offline at finalize where it can certify gains.
    let cap = state.store_cap;
    for sc in state.small.values_mut() {
        if (sc.middles.is_matched(e.u) || sc.middles.is_matched(e.v)) && sc.store.len() < cap {
            meter.charge("wgt_aug_paths", 1)?;
            sc.store.push(*e);
        }
    }
    Ok(())
}

/// Finalize: M₁ patches the base with the unwound excess matching (each edge
/// lifted back to its original weight), M₂ applies vertex-disjoint
/// 3-augmentations greedily from the highest class down. Returns the heavier.
pub fn wap_finalize(state: WapState) -> Matching {
    let n = state.m0.n();

    let mprime = state.excess.unwind_onto(&Matching::new(n));
    let mut m1 = state.m0.clone();
    for ep in mprime.edges() {
        // The excess pass saw w′ = w − w(M₀(u)) − w(M₀(v)); lift back.
        let w_orig = ep.w + state.m0.matched_weight(ep.u) + state.m0.matched_weight(ep.v);
        m1.remove_at(ep.u);
        m1.remove_at(ep.v);
        m1.add(Edge::new(ep.u, ep.v, w_orig))
            .expect("endpoints freed above");
    }

    let mut m2 = state.m0.clone();
    let mut touched = vec![false; n as usize];
    let mut ids: Vec<u32> = state.classes.keys().copied().collect();
    ids.extend(state.small.keys().copied());
    ids.sort_unstable();
    ids.dedup();
    for &j in ids.iter().rev() {
        let augs: Vec<ThreeAug> = match (state.small.get(&j), state.classes.get(&j)) {
            (Some(sc), _) => {
                // Offline pass over the store: orient each edge against this
                // class's middles and re-apply the support filter.
                let support: Vec<Edge> = sc
                    .store
                    .iter()
                    .filter(|e| sc.middles.is_matched(e.u) != sc.middles.is_matched(e.v))
                    .filter(|e| state.support_filter(e).is_some())
                    .copied()
                    .collect();
                greedy_three_augs(&sc.middles, &support)
            }
            (None, Some(inst)) => inst.finalize(),
            (None, None) => unreachable!("class id came from one of the maps"),
        };
        for aug in augs {
            // Conflict set: the path's four vertices plus the base partners
            // of its free endpoints (at most 6 vertices).
            let mut verts: Vec<u32> = aug.vertices.to_vec();
            for &x in &aug.vertices {
                if let Some(me) = state.m0.edge_at(x) {
                    verts.push(me.other(x));
                }
            }
            if verts.iter().any(|&x| touched[x as usize]) {
                continue;
            }
            let [a, u, _v, b] = aug.vertices;
            // Deduplicate removals: the outer base edges coincide when a and
            // b are base partners of each other.
            let mut removed: Vec<Edge> = Vec::new();
            for x in [a, u, b] {
                if let Some(me) = m2.edge_at(x) {
                    if !removed.contains(&me) {
                        removed.push(me);
                    }
                }
            }
            let gain = aug.left.w + aug.right.w - removed.iter().map(|e| e.w).sum::<i64>();
            // Both outers passed the filter, so together they outweigh the
            // whole removal set: w(o₁)+w(o₂) ≥ (1+2α)(w(e₁)+w(e₂)+w(e₃)).
            assert!(gain > 0, "applied 3-augmentation must have positive gain");
            for me in &removed {
                m2.remove_at(me.u);
            }
            m2.add(aug.left).expect("left endpoints freed");
            m2.add(aug.right).expect("right endpoints freed");
            for x in verts {
                touched[x as usize] = true;
            }
        }
    }

    if m2.weight() > m1.weight() {
        m2
    } else {
        m1
    }
}
