//! Multi-pass (1−ε) weighted matching: per-weight-class augmentation search
//! over layered graphs with a plug-in bipartite cardinality matcher, a greedy
//! cross-class combiner, and the outer improvement loop.
//!
//! The per-weight search fixes one random bipartition, then walks candidate
//! window-sequence pairs. Candidates are generated from the window units
//! actually realized by crossing edge weights rather than the full grid:
//! a window with no edge in it can only produce an empty layered graph, so
//! the restriction is lossless for nonempty batches while keeping fine
//! granularities (needed to see blown-up augmenting cycles) tractable.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::augment::{apply_augmentation, Augmentation};
use crate::error::Error;
use crate::graph::{Edge, WeightedGraph};
use crate::layered::{
    in_augmentation_class_with_g, random_bipartition, rounded_gain_units,
    decompose_alternating_path, Parametrization, Side,
};
use crate::matching::Matching;
use crate::oracle::exact_mcm_bipartite;
use crate::rng::mix;
use crate::rounding::{ceil_units, floor_units, rat_int, rat_pow, ratio};
use crate::Result;

#[derive(Debug, Clone)]
pub struct MultipassConfig {
    pub eps: f64,
    /// Window granularity; windows are multiples of g, augmentation gains
    /// are certified in units of g·W.
    pub g: BigRational,
    /// Maximum window-sequence length |τ^A|.
    pub k_max: usize,
    /// Improvement rounds in `solve`.
    pub iters: usize,
    /// Candidate-pair guard per weight class.
    pub pair_cap: usize,
    pub seed: u64,
}

impl MultipassConfig {
    /// Practical defaults: coarse granularity, short window sequences.
    pub fn relaxed(eps: f64) -> Result<Self> {
        let cfg = MultipassConfig {
            eps,
            g: ratio(1, 8),
            k_max: 9,
            iters: 50,
            pair_cap: 100_000,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Theory constants: g = ε¹² and the full length bound. Requires
    /// eps < 1/16; the enumeration guard is doing real work here.
    pub fn paper_faithful(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0 / 16.0) {
            return Err(Error::Param(format!(
                "faithful mode needs eps in (0, 1/16), got {eps}"
            )));
        }
        let eps_rat = BigRational::from_float(eps)
            .ok_or_else(|| Error::Param("eps must be finite".into()))?;
        let cfg = MultipassConfig {
            eps,
            g: rat_pow(&eps_rat, 12),
            k_max: (32.0 / (eps * eps)).floor() as usize + 1,
            iters: 50,
            pair_cap: 100_000,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 0.9) {
            return Err(Error::Param(format!(
                "eps must be in (0, 0.9], got {}",
                self.eps
            )));
        }
        if !self.g.is_positive() || self.g > rat_int(1) {
            return Err(Error::Param("granularity must be in (0, 1]".into()));
        }
        let len_bound = (32.0 / (self.eps * self.eps)).floor() as usize + 1;
        if self.k_max < 2 || self.k_max > len_bound {
            return Err(Error::Param(format!(
                "k_max must be in [2, {len_bound}] for eps {}",
                self.eps
            )));
        }
        if self.iters == 0 || self.pair_cap == 0 {
            return Err(Error::Param("iters and pair_cap must be positive".into()));
        }
        Ok(())
    }

    /// The matcher slack δ = ε^(28 + 900/ε²) from the approximation
    /// statement; informational (the exact matcher gives δ = 0).
    pub fn delta(&self) -> f64 {
        self.eps.powf(28.0 + 900.0 / (self.eps * self.eps))
    }

    fn eps_rat(&self) -> BigRational {
        BigRational::from_float(self.eps).expect("validated eps is finite")
    }

    /// Σ τ^B budget in whole units of g: floor((1 + ε⁴) / g).
    fn unit_budget(&self) -> u64 {
        let units = ((rat_int(1) + rat_pow(&self.eps_rat(), 4)) / &self.g)
            .floor()
            .to_integer();
        if units.is_negative() {
            0
        } else {
            u64::try_from(units).unwrap_or(u64::MAX)
        }
    }
}

/// Cardinality matcher over an unweighted bipartite graph, the plug-in slot
/// for external (1−δ) matchers. `adj[l]` lists right-side neighbors of left
/// vertex `l`; the result maps each left vertex to its matched right vertex.
pub trait BipartiteMatcher: Sync {
    fn max_matching(&self, left: usize, right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>>;

    /// Streaming passes one invocation costs; used for pass accounting only.
    fn passes_per_call(&self) -> usize {
        1
    }
}

/// Exact maximum-cardinality matching (δ = 0).
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMatcher;

impl BipartiteMatcher for ExactMatcher {
    fn max_matching(&self, left: usize, right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
        let mut out = vec![None; left];
        if left == 0 || right == 0 {
            return out;
        }
        let mut edges = Vec::new();
        for (l, rs) in adj.iter().enumerate() {
            for &r in rs {
                edges.push((l as u32, (left + r) as u32, 1));
            }
        }
        if edges.is_empty() {
            return out;
        }
        let bg = WeightedGraph::from_edges_unchecked((left + right) as u32, edges)
            .expect("matcher instance has no loops or bad weights");
        let mm = exact_mcm_bipartite(&bg).expect("instance is bipartite by construction");
        for e in mm.edges() {
            out[e.u as usize] = Some(e.v as usize - left);
        }
        out
    }
}

/// Vertex-disjoint augmentations for one weight class W, each passing the
/// class membership test at W.
#[derive(Debug, Clone)]
pub struct AugmentationBatch {
    pub w: BigRational,
    pub augmentations: Vec<Augmentation>,
    pub total_gain: i64,
}

impl AugmentationBatch {
    fn empty(w: &BigRational) -> Self {
        AugmentationBatch {
            w: w.clone(),
            augmentations: Vec::new(),
            total_gain: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct SearchStats {
    matcher_calls: usize,
    peak_edges: usize,
}

/// Per-improvement-round accounting.
#[derive(Debug, Clone, Copy, Default)]
pub struct IterationStats {
    pub gain: i64,
    pub matcher_calls: usize,
    /// Conservative streaming-pass count: matcher invocations times the
    /// matcher's per-call passes (one (W, pair) group per pass).
    pub passes: usize,
    pub peak_edges: usize,
    pub admitted: usize,
}

#[derive(Debug, Clone)]
pub struct MultipassOutcome {
    pub matching: Matching,
    pub iterations_run: usize,
    pub per_iteration_gains: Vec<i64>,
    pub passes: usize,
    pub matcher_calls: usize,
    pub peak_edges: usize,
}

fn hash_rat(w: &BigRational) -> u64 {
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for &b in w.numer().to_signed_bytes_le().iter() {
        h = mix(h, b as u64);
    }
    h = mix(h, 0xD6E8_FEB8_6659_FD93);
    for &b in w.denom().to_signed_bytes_le().iter() {
        h = mix(h, b as u64);
    }
    h
}

/// One weight class: fix a random bipartition from cfg.seed ⊕ hash(W), search
/// every feasible good window pair, and return the best batch found.
pub fn find_augmentations_for_weight(
    g: &WeightedGraph,
    m: &Matching,
    w: &BigRational,
    cfg: &MultipassConfig,
    matcher: &dyn BipartiteMatcher,
) -> Result<AugmentationBatch> {
    cfg.validate()?;
    let p = random_bipartition(g, m, mix(cfg.seed, hash_rat(w)));
    search_with_parametrization(g, m, w, cfg, matcher, &p).map(|(b, _)| b)
}

/// Same search under a caller-fixed bipartition; the deterministic entry
/// point for planted-instance tests.
pub fn find_augmentations_with_parametrization(
    g: &WeightedGraph,
    m: &Matching,
    w: &BigRational,
    cfg: &MultipassConfig,
    matcher: &dyn BipartiteMatcher,
    p: &Parametrization,
) -> Result<AugmentationBatch> {
    cfg.validate()?;
    search_with_parametrization(g, m, w, cfg, matcher, p).map(|(b, _)| b)
}

fn search_with_parametrization(
    g: &WeightedGraph,
    m: &Matching,
    w: &BigRational,
    cfg: &MultipassConfig,
    matcher: &dyn BipartiteMatcher,
    p: &Parametrization,
) -> Result<(AugmentationBatch, SearchStats)> {
    if !w.is_positive() {
        return Err(Error::Param("weight scale W must be positive".into()));
    }
    let mut stats = SearchStats::default();
    let gw = &cfg.g * w;
    let ub = cfg.unit_budget();

    // Bucket crossing edges by the one window unit that can catch them:
    // matched edges go to layers with τ^A = ceil(w/gW)·g, unmatched edges to
    // gaps with τ^B = floor(w/gW)·g. Units beyond the Σ τ^B budget can never
    // appear in a good pair.
    let n = g.n() as usize;
    let mut unit_of_matched: Vec<Option<u64>> = vec![None; n];
    let mut a_buckets: BTreeMap<u64, Vec<Edge>> = BTreeMap::new();
    for e in p.a() {
        if let Ok(u) = u64::try_from(ceil_units(e.w, &gw)) {
            if u >= 1 && u <= ub {
                a_buckets.entry(u).or_default().push(*e);
                unit_of_matched[e.u as usize] = Some(u);
                unit_of_matched[e.v as usize] = Some(u);
            }
        }
    }
    let mut b_buckets: BTreeMap<u64, Vec<Edge>> = BTreeMap::new();
    for e in p.b() {
        if let Ok(u) = u64::try_from(floor_units(e.w, &gw)) {
            if u >= 2 && u <= ub {
                b_buckets.entry(u).or_default().push(*e);
            }
        }
    }
    let free_exists = (0..n as u32).any(|v| !m.is_matched(v));

    let mut boundary_opts: Vec<u64> = a_buckets.keys().copied().collect();
    if free_exists {
        boundary_opts.insert(0, 0);
    }
    let interior_opts: Vec<u64> = a_buckets.keys().copied().filter(|&u| u >= 2).collect();
    let gap_opts: Vec<u64> = b_buckets.keys().copied().collect();

    let mut best: Option<(i64, Vec<Augmentation>)> = None;
    let mut count = 0usize;
    if !gap_opts.is_empty() && !boundary_opts.is_empty() {
        for len in 2..=cfg.k_max {
            if 2 * (len as u64 - 1) > ub {
                break;
            }
            let mut a_units = vec![0u64; len];
            let b_units = vec![0u64; len - 1];
            dfs_units(
                0,
                ub.saturating_sub(1),
                &boundary_opts,
                &interior_opts,
                &mut a_units,
                &mut |au| {
                    let sum_a: u64 = au.iter().sum();
                    let mut b_scratch = b_units.clone();
                    dfs_units(0, ub, &gap_opts, &gap_opts, &mut b_scratch, &mut |bu| {
                        let sum_b: u64 = bu.iter().sum();
                        if sum_b < sum_a + 1 {
                            return Ok(());
                        }
                        count += 1;
                        if count > cfg.pair_cap {
                            return Err(Error::EnumerationGuard {
                                cap: cfg.pair_cap as u64,
                                estimate: count as u64,
                            });
                        }
                        debug_assert!(
                            {
                                let ta: Vec<BigRational> =
                                    au.iter().map(|&u| &cfg.g * rat_int(u as i64)).collect();
                                let tb: Vec<BigRational> =
                                    bu.iter().map(|&u| &cfg.g * rat_int(u as i64)).collect();
                                crate::layered::is_good_pair(&ta, &tb, cfg.eps, &cfg.g)
                            },
                            "candidate {au:?}/{bu:?} must be a good pair"
                        );
                        let augs = candidate_batch(
                            g,
                            m,
                            p,
                            au,
                            bu,
                            w,
                            &gw,
                            cfg,
                            matcher,
                            &a_buckets,
                            &b_buckets,
                            &unit_of_matched,
                            &mut stats,
                        )?;
                        if augs.is_empty() {
                            return Ok(());
                        }
                        let gain: i64 = augs.iter().map(|a| a.gain).sum();
                        if best.as_ref().map_or(true, |(bg, _)| gain > *bg) {
                            best = Some((gain, augs));
                        }
                        Ok(())
                    })
                },
            )?;
        }
    }
    let batch = match best {
        Some((gain, augs)) => AugmentationBatch {
            w: w.clone(),
            augmentations: augs,
            total_gain: gain,
        },
        None => AugmentationBatch::empty(w),
    };
    Ok((batch, stats))
}

/// Unit sequences in lexicographic order: positions 0 and len−1 draw from
/// `boundary`, the rest from `interior`; the running sum stays within budget.
fn dfs_units(
    pos: usize,
    budget: u64,
    boundary: &[u64],
    interior: &[u64],
    units: &mut Vec<u64>,
    sink: &mut dyn FnMut(&[u64]) -> Result<()>,
) -> Result<()> {
    if pos == units.len() {
        return sink(units);
    }
    let opts = if pos == 0 || pos == units.len() - 1 {
        boundary
    } else {
        interior
    };
    for &u in opts {
        if u > budget {
            break; // options are sorted ascending
        }
        units[pos] = u;
        dfs_units(pos + 1, budget - u, boundary, interior, units, sink)?;
    }
    Ok(())
}

/// Build the layered graph for one unit pair, run the matcher on it minus
/// the boundary-layer matched copies, and harvest augmentations: every
/// matcher-surplus path is projected, decomposed, and contributes its best
/// class-passing component if vertex-disjoint from earlier picks.
#[allow(clippy::too_many_arguments)]
fn candidate_batch(
    g: &WeightedGraph,
    m: &Matching,
    p: &Parametrization,
    a_units: &[u64],
    b_units: &[u64],
    w: &BigRational,
    gw: &BigRational,
    cfg: &MultipassConfig,
    matcher: &dyn BipartiteMatcher,
    a_buckets: &BTreeMap<u64, Vec<Edge>>,
    b_buckets: &BTreeMap<u64, Vec<Edge>>,
    unit_of_matched: &[Option<u64>],
    stats: &mut SearchStats,
) -> Result<Vec<Augmentation>> {
    let layers = a_units.len();
    let n = m.n() as usize;

    // Survivor copies. A matched copy v^t lives iff v's matched edge crosses
    // and its window unit equals the layer's; free vertices live in boundary
    // layers whose window is 0.
    let mut alive = vec![vec![false; layers + 1]; n];
    for v in 0..n {
        match unit_of_matched[v] {
            Some(u) => {
                for (t, &unit) in a_units.iter().enumerate() {
                    if unit == u {
                        alive[v][t + 1] = true;
                    }
                }
            }
            None => {
                if !m.is_matched(v as u32) {
                    if a_units[0] == 0 {
                        alive[v][1] = true;
                    }
                    if a_units[layers - 1] == 0 {
                        alive[v][layers] = true;
                    }
                }
            }
        }
    }
    // Augmenting paths run from a layer-1 R copy to a layer-k+1 L copy; if
    // either end is missing there is nothing to find.
    let has_start = (0..n).any(|v| alive[v][1] && p.side(v as u32) == Side::R);
    let has_end = (0..n).any(|v| alive[v][layers] && p.side(v as u32) == Side::L);
    if !has_start || !has_end {
        return Ok(Vec::new());
    }

    // Dense per-side copy ids, in (vertex, layer) order.
    let mut left: Vec<(u32, u32)> = Vec::new();
    let mut right: Vec<(u32, u32)> = Vec::new();
    let mut left_id: HashMap<(u32, u32), usize> = HashMap::new();
    let mut right_id: HashMap<(u32, u32), usize> = HashMap::new();
    for v in 0..n {
        for t in 1..=layers {
            if alive[v][t] {
                let copy = (v as u32, t as u32);
                if p.side(v as u32) == Side::L {
                    left_id.insert(copy, left.len());
                    left.push(copy);
                } else {
                    right_id.insert(copy, right.len());
                    right.push(copy);
                }
            }
        }
    }

    // L′ edges: matched copies only in interior layers, unmatched copies in
    // every gap with both endpoint copies alive.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); left.len()];
    let mut mprime: Vec<Option<usize>> = vec![None; left.len()];
    let mut x_count = 0usize;
    for t in 2..layers {
        if let Some(es) = a_buckets.get(&a_units[t - 1]) {
            for e in es {
                let (lv, rv) = p.oriented(e);
                let li = left_id[&(lv, t as u32)];
                let ri = right_id[&(rv, t as u32)];
                adj[li].push(ri);
                mprime[li] = Some(ri);
                x_count += 1;
            }
        }
    }
    let mut y_count = 0usize;
    for t in 1..layers {
        if let Some(es) = b_buckets.get(&b_units[t - 1]) {
            for e in es {
                let (lv, rv) = p.oriented(e);
                if alive[rv as usize][t] && alive[lv as usize][t + 1] {
                    adj[left_id[&(lv, (t + 1) as u32)]].push(right_id[&(rv, t as u32)]);
                    y_count += 1;
                }
            }
        }
    }
    if y_count == 0 {
        return Ok(Vec::new());
    }
    stats.peak_edges = stats.peak_edges.max(x_count + y_count + m.len());

    let matched = matcher.max_matching(left.len(), right.len(), &adj);
    stats.matcher_calls += 1;
    if matched.len() != left.len() {
        return Err(Error::Structure("matcher returned wrong arity".into()));
    }
    let mut right_used = vec![false; right.len()];
    for (l, mr) in matched.iter().enumerate() {
        if let Some(r) = *mr {
            if r >= right.len() || right_used[r] || !adj[l].contains(&r) {
                return Err(Error::Structure("matcher output is not a matching".into()));
            }
            right_used[r] = true;
        }
    }

    // Symmetric difference of the matcher result and the current matching's
    // copies, as a degree ≤ 2 graph over copy nodes.
    let nodes = left.len() + right.len();
    let mut dadj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nodes];
    for l in 0..left.len() {
        if mprime[l] == matched[l] {
            continue;
        }
        if let Some(r) = mprime[l] {
            dadj[l].push((left.len() + r, false));
            dadj[left.len() + r].push((l, false));
        }
        if let Some(r) = matched[l] {
            dadj[l].push((left.len() + r, true));
            dadj[left.len() + r].push((l, true));
        }
    }

    let copy_of = |node: usize| {
        if node < left.len() {
            left[node]
        } else {
            right[node - left.len()]
        }
    };
    let mut selected: Vec<Augmentation> = Vec::new();
    let mut used = vec![false; n];
    let mut seen = vec![false; nodes];
    for start in 0..nodes {
        if seen[start] || dadj[start].len() != 1 {
            continue; // cycles and interior nodes; components are paths/cycles
        }
        let mut walk_nodes = vec![start];
        let mut surplus: i64 = 0;
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            seen[cur] = true;
            match dadj[cur].iter().find(|&&(nb, _)| nb != prev) {
                Some(&(nb, from_matcher)) => {
                    surplus += if from_matcher { 1 } else { -1 };
                    prev = cur;
                    cur = nb;
                    walk_nodes.push(cur);
                    if dadj[cur].len() == 1 {
                        seen[cur] = true;
                        break;
                    }
                }
                None => break,
            }
        }
        if surplus != 1 {
            continue;
        }
        let copies: Vec<(u32, u32)> = walk_nodes.iter().map(|&nd| copy_of(nd)).collect();
        let mut layer_hit = vec![false; layers + 1];
        for c in &copies {
            layer_hit[c.1 as usize] = true;
        }
        assert!(
            (1..=layers).all(|t| layer_hit[t]),
            "augmenting path must pass through every layer"
        );
        let walk: Vec<u32> = copies.iter().map(|c| c.0).collect();
        let (path_aug, cycles) = decompose_alternating_path(g, &walk, m)?;
        let mut comps = Vec::new();
        if !path_aug.is_empty() {
            comps.push(path_aug);
        }
        comps.extend(cycles);
        // Window accounting guarantees one whole g·W unit across components.
        assert!(
            comps
                .iter()
                .any(|c| rounded_gain_units(c, gw) >= BigInt::one()),
            "decomposition must retain a unit of gain"
        );
        let mut pick: Option<&Augmentation> = None;
        for c in &comps {
            if in_augmentation_class_with_g(c, w, cfg.eps, &cfg.g)
                && pick.map_or(true, |b| c.gain > b.gain)
            {
                pick = Some(c);
            }
        }
        if let Some(b) = pick {
            // Disjointness must cover the matching neighborhood, or two
            // picks could both claim the matched edge hanging off a shared
            // endpoint and the second application would find it gone.
            let vs = b.footprint();
            if vs.iter().all(|&v| !used[v as usize]) {
                for &v in &vs {
                    used[v as usize] = true;
                }
                selected.push(b.clone());
            }
        }
    }
    Ok(selected)
}

/// One improvement round: search every weight class W = (1+ε⁴)^i up to
/// i_max = ⌈log_{1+ε⁴}((64/ε² + 1)·max w)⌉, then admit augmentations
/// greedily in decreasing W, skipping vertex conflicts.
pub fn improve_matching(g: &WeightedGraph, m: &Matching, cfg: &MultipassConfig) -> Result<Matching> {
    improve_matching_with(g, m, cfg, &ExactMatcher).map(|(m, _)| m)
}

pub fn improve_matching_with(
    g: &WeightedGraph,
    m: &Matching,
    cfg: &MultipassConfig,
    matcher: &dyn BipartiteMatcher,
) -> Result<(Matching, IterationStats)> {
    cfg.validate()?;
    if g.m() == 0 {
        return Ok((m.clone(), IterationStats::default()));
    }
    let max_w = g.edges().iter().map(|e| e.w).max().expect("nonempty");
    let base = 1.0 + cfg.eps.powi(4);
    let target = (64.0 / (cfg.eps * cfg.eps) + 1.0) * max_w as f64;
    let i_max = (target.ln() / base.ln()).ceil().max(0.0) as i32;
    // The weight grid is the float power frozen to its exact rational value;
    // window comparisons against it stay exact, and the grid ratio matches
    // 1+ε⁴ to a relative 1e−16, which no guarantee is sensitive to.
    let ws: Vec<BigRational> = (0..=i_max)
        .map(|i| BigRational::from_float(base.powi(i)).expect("finite power"))
        .collect();
    let results: Vec<(AugmentationBatch, SearchStats)> = ws
        .par_iter()
        .map(|w| {
            let p = random_bipartition(g, m, mix(cfg.seed, hash_rat(w)));
            search_with_parametrization(g, m, w, cfg, matcher, &p)
        })
        .collect::<Result<_>>()?;

    let mut used = vec![false; g.n() as usize];
    let mut out = m.clone();
    let mut st = IterationStats::default();
    for (batch, _) in results.iter().rev() {
        for aug in &batch.augmentations {
            let vs = aug.footprint();
            if vs.iter().any(|&v| used[v as usize]) {
                continue;
            }
            assert!(
                rat_int(aug.gain) >= &cfg.g * &batch.w,
                "admitted augmentation clears the g·W floor"
            );
            for &v in &vs {
                used[v as usize] = true;
            }
            out = apply_augmentation(&out, aug)?;
            st.admitted += 1;
        }
    }
    for (_, s) in &results {
        st.matcher_calls += s.matcher_calls;
        st.peak_edges = st.peak_edges.max(s.peak_edges);
    }
    st.passes = st.matcher_calls * matcher.passes_per_call();
    st.gain = out.weight() - m.weight();
    debug_assert!(st.gain >= 0);
    Ok((out, st))
}

/// Iterate improvement rounds from the empty matching until the configured
/// round count or a zero-gain round. Parametrizations are refreshed each
/// round via a per-iteration sub-seed.
pub fn solve(g: &WeightedGraph, cfg: &MultipassConfig) -> Result<MultipassOutcome> {
    solve_with(g, cfg, &ExactMatcher)
}

pub fn solve_with(
    g: &WeightedGraph,
    cfg: &MultipassConfig,
    matcher: &dyn BipartiteMatcher,
) -> Result<MultipassOutcome> {
    cfg.validate()?;
    let mut m = Matching::new(g.n());
    let mut outcome = MultipassOutcome {
        matching: Matching::new(g.n()),
        iterations_run: 0,
        per_iteration_gains: Vec::new(),
        passes: 0,
        matcher_calls: 0,
        peak_edges: 0,
    };
    for it in 0..cfg.iters {
        let mut round_cfg = cfg.clone();
        round_cfg.seed = mix(cfg.seed, it as u64);
        let (next, st) = improve_matching_with(g, &m, &round_cfg, matcher)?;
        outcome.iterations_run += 1;
        outcome.passes += st.passes;
        outcome.matcher_calls += st.matcher_calls;
        outcome.peak_edges = outcome.peak_edges.max(st.peak_edges);
        outcome.per_iteration_gains.push(st.gain);
        m = next;
        if st.gain == 0 {
            break;
        }
    }
    outcome.matching = m;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layered::{build_layered, enumerate_good_pairs, GoodPair};
    use crate::oracle::{exact_mwm, OracleBudget};
    use crate::testkit::assert_valid_matching;

    fn sides(pattern: &[Side]) -> Vec<Side> {
        pattern.to_vec()
    }

    #[test]
    fn config_validation() {
        assert!(MultipassConfig::relaxed(0.4).is_ok());
        assert!(MultipassConfig::relaxed(0.0).is_err());
        assert!(MultipassConfig::relaxed(0.95).is_err());
        assert!(MultipassConfig::paper_faithful(0.0625).is_err()); // 1/16 excluded
        let pf = MultipassConfig::paper_faithful(0.05).unwrap();
        // f64 0.05 sits just above 1/20, so 32/eps^2 lands under 12800.
        assert_eq!(pf.k_max, 12800);
        assert!(pf.g.is_positive());
        assert!(pf.delta() >= 0.0);
        // k_max above the length bound for eps is rejected.
        let mut bad = MultipassConfig::relaxed(0.9).unwrap();
        bad.k_max = 60;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_edge_graph_solved_in_one_round() {
        let g = WeightedGraph::with_default_cap(2, vec![(0, 1, 5)]).unwrap();
        let mut cfg = MultipassConfig::relaxed(0.4).unwrap();
        cfg.seed = 11;
        let out = solve(&g, &cfg).unwrap();
        assert_eq!(out.matching.weight(), 5);
        assert_eq!(out.per_iteration_gains[0], 5);
        assert_eq!(*out.per_iteration_gains.last().unwrap(), 0);
        assert!(out.passes >= out.matcher_calls);
    }

    #[test]
    fn optimal_matching_is_a_fixed_point() {
        // 4-cycle (3,4,3,4) already at its optimum {bc, ad}.
        let g = WeightedGraph::with_default_cap(
            4,
            vec![(0, 1, 3), (0, 3, 4), (1, 2, 4), (2, 3, 3)],
        )
        .unwrap();
        let opt = Matching::from_edges(4, [Edge::new(1, 2, 4), Edge::new(0, 3, 4)]).unwrap();
        let mut cfg = MultipassConfig::relaxed(0.4).unwrap();
        cfg.g = ratio(1, 64);
        for seed in 0..6 {
            cfg.seed = seed;
            let m = improve_matching(&g, &opt, &cfg).unwrap();
            assert_eq!(m.edges(), opt.edges());
        }
        // And the per-weight batches are empty, checked against the oracle.
        let best = exact_mwm(&g, &OracleBudget::default()).unwrap();
        assert_eq!(best.weight(), opt.weight());
        let w = BigRational::from_float(33.5f64).unwrap();
        let batch = find_augmentations_for_weight(&g, &opt, &w, &cfg, &ExactMatcher).unwrap();
        assert!(batch.augmentations.is_empty());
    }

    #[test]
    fn planted_six_path_batch_finds_the_gain_one_path() {
        // Path a-b-c-d-e-f, matched weight 1, unmatched weight 2: the unique
        // improving augmentation adds {bc, de} and removes {ab, cd, ef}.
        let g = WeightedGraph::with_default_cap(
            6,
            vec![(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 2), (4, 5, 1)],
        )
        .unwrap();
        let m = Matching::from_edges(
            6,
            [Edge::new(0, 1, 1), Edge::new(2, 3, 1), Edge::new(4, 5, 1)],
        )
        .unwrap();
        let p = Parametrization::from_sides(
            &g,
            &m,
            sides(&[Side::L, Side::R, Side::L, Side::R, Side::L, Side::R]),
        )
        .unwrap();
        let mut cfg = MultipassConfig::relaxed(0.4).unwrap();
        cfg.k_max = 3;
        let batch = find_augmentations_with_parametrization(
            &g,
            &m,
            &rat_int(4),
            &cfg,
            &ExactMatcher,
            &p,
        )
        .unwrap();
        let expected = Augmentation::path(
            vec![Edge::new(1, 2, 2), Edge::new(2, 3, 1), Edge::new(3, 4, 2)],
            &m,
        )
        .unwrap();
        assert_eq!(batch.total_gain, 1);
        assert_eq!(batch.augmentations, vec![expected]);
        let improved = apply_augmentation(&m, &batch.augmentations[0]).unwrap();
        assert_eq!(improved.weight(), 4);
    }

    #[test]
    fn four_cycle_blow_up_recovers_the_augmenting_cycle() {
        // Cycle (2, 3, 2, 3) matched on the weight-2 edges. The improving
        // cycle only appears once the walk wraps the 4-cycle twice, which
        // needs a fine granularity and a 4-layer window pair; the search
        // derives that pair from the edge weights on its own.
        let g = WeightedGraph::with_default_cap(
            4,
            vec![(0, 1, 2), (0, 3, 3), (1, 2, 3), (2, 3, 2)],
        )
        .unwrap();
        let m = Matching::from_edges(4, [Edge::new(0, 1, 2), Edge::new(2, 3, 2)]).unwrap();
        let p = Parametrization::from_sides(&g, &m, sides(&[Side::L, Side::R, Side::L, Side::R]))
            .unwrap();
        let mut cfg = MultipassConfig::relaxed(0.4).unwrap();
        cfg.g = ratio(1, 1024);
        cfg.k_max = 5;
        let batch = find_augmentations_with_parametrization(
            &g,
            &m,
            &rat_int(512),
            &cfg,
            &ExactMatcher,
            &p,
        )
        .unwrap();
        assert_eq!(batch.total_gain, 2);
        assert_eq!(batch.augmentations.len(), 1);
        let expected = Augmentation::cycle(
            vec![
                Edge::new(0, 1, 2),
                Edge::new(1, 2, 3),
                Edge::new(2, 3, 2),
                Edge::new(0, 3, 3),
            ],
            &m,
        )
        .unwrap();
        assert_eq!(batch.augmentations[0], expected);
        let improved = apply_augmentation(&m, &batch.augmentations[0]).unwrap();
        assert_eq!(improved.weight(), 6);
    }

    #[test]
    fn four_cycle_3434_reaches_weight_eight() {
        let g = WeightedGraph::with_default_cap(
            4,
            vec![(0, 1, 3), (0, 3, 4), (1, 2, 4), (2, 3, 3)],
        )
        .unwrap();
        let mut m = Matching::from_edges(4, [Edge::new(0, 1, 3), Edge::new(2, 3, 3)]).unwrap();
        let mut cfg = MultipassConfig::relaxed(0.4).unwrap();
        cfg.g = ratio(1, 64);
        for round in 0..50 {
            cfg.seed = mix(0xC0FFEE, round);
            m = improve_matching(&g, &m, &cfg).unwrap();
            if m.weight() == 8 {
                break;
            }
        }
        assert_eq!(m.weight(), 8);
        assert_valid_matching(&g, &m);
    }

    #[test]
    fn restricted_candidates_match_blind_enumeration() {
        // The weight-driven candidate set must reproduce the best batch the
        // full good-pair grid would find.
        let g = WeightedGraph::with_default_cap(
            6,
            vec![(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 2), (4, 5, 1)],
        )
        .unwrap();
        let m = Matching::from_edges(
            6,
            [Edge::new(0, 1, 1), Edge::new(2, 3, 1), Edge::new(4, 5, 1)],
        )
        .unwrap();
        let p = Parametrization::from_sides(
            &g,
            &m,
            sides(&[Side::L, Side::R, Side::L, Side::R, Side::L, Side::R]),
        )
        .unwrap();
        let mut cfg = MultipassConfig::relaxed(0.4).unwrap();
        cfg.g = ratio(1, 8);
        cfg.k_max = 3;
        let w = rat_int(4);
        let restricted =
            find_augmentations_with_parametrization(&g, &m, &w, &cfg, &ExactMatcher, &p).unwrap();

        let sum_b_max = rat_int(1) + rat_pow(&cfg.eps_rat(), 4);
        let pairs = enumerate_good_pairs(cfg.eps, &cfg.g, cfg.k_max, &sum_b_max, 100_000).unwrap();
        let mut best_blind = 0i64;
        for pair in &pairs {
            let gw = &cfg.g * &w;
            let to_units = |ts: &Vec<BigRational>| -> Vec<u64> {
                ts.iter()
                    .map(|t| u64::try_from((t / &cfg.g).to_integer()).unwrap())
                    .collect()
            };
            let (au, bu) = (to_units(&pair.tau_a), to_units(&pair.tau_b));
            let mut stats = SearchStats::default();
            // Rebuild the bucket context exactly as the search would.
            let mut unit_of_matched = vec![None; 6];
            let mut a_buckets: BTreeMap<u64, Vec<Edge>> = BTreeMap::new();
            for e in p.a() {
                let u = u64::try_from(ceil_units(e.w, &gw)).unwrap();
                a_buckets.entry(u).or_default().push(*e);
                unit_of_matched[e.u as usize] = Some(u);
                unit_of_matched[e.v as usize] = Some(u);
            }
            let mut b_buckets: BTreeMap<u64, Vec<Edge>> = BTreeMap::new();
            for e in p.b() {
                let u = u64::try_from(floor_units(e.w, &gw)).unwrap();
                if u >= 2 {
                    b_buckets.entry(u).or_default().push(*e);
                }
            }
            let augs = candidate_batch(
                &g,
                &m,
                &p,
                &au,
                &bu,
                &w,
                &gw,
                &cfg,
                &ExactMatcher,
                &a_buckets,
                &b_buckets,
                &unit_of_matched,
                &mut stats,
            )
            .unwrap();
            best_blind = best_blind.max(augs.iter().map(|a| a.gain).sum());
        }
        assert_eq!(restricted.total_gain, best_blind);
        assert_eq!(restricted.total_gain, 1);
    }

    #[test]
    fn layered_build_agrees_with_bucket_construction() {
        // The unit-bucket path used by the search must produce the same
        // survivors and edge copies as the rational-window construction.
        let g = WeightedGraph::with_default_cap(
            6,
            vec![(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 4, 2), (4, 5, 1)],
        )
        .unwrap();
        let m = Matching::from_edges(
            6,
            [Edge::new(0, 1, 1), Edge::new(2, 3, 1), Edge::new(4, 5, 1)],
        )
        .unwrap();
        let p = Parametrization::from_sides(
            &g,
            &m,
            sides(&[Side::L, Side::R, Side::L, Side::R, Side::L, Side::R]),
        )
        .unwrap();
        let gp = GoodPair {
            tau_a: vec![ratio(1, 4), ratio(1, 4), ratio(1, 4)],
            tau_b: vec![ratio(1, 2), ratio(1, 2)],
            g: ratio(1, 8),
        };
        let w = rat_int(4);
        let lg = build_layered(&p, &gp, &w, &m);
        let gw = ratio(1, 2);
        // Every X copy's weight has ceil-unit equal to its layer's τ unit,
        // and every Y copy floor-unit equal to its gap's τ unit.
        for e in &lg.x {
            assert_eq!(ceil_units(e.origin.w, &gw), BigInt::from(2));
        }
        for e in &lg.y {
            assert_eq!(floor_units(e.origin.w, &gw), BigInt::from(4));
        }
        assert_eq!(lg.x.len(), 9);
        assert_eq!(lg.y.len(), 4);
    }

    #[test]
    fn random_instances_improve_monotonically() {
        for seed in 0..10u64 {
            let g = crate::testkit::random_graph(10, 16, 9, seed);
            let mut cfg = MultipassConfig::relaxed(0.4).unwrap();
            cfg.k_max = 5;
            cfg.iters = 8;
            cfg.seed = seed;
            let out = solve(&g, &cfg).unwrap();
            assert_valid_matching(&g, &out.matching);
            assert!(out.per_iteration_gains.iter().all(|&g| g >= 0));
            assert_eq!(
                out.per_iteration_gains.iter().sum::<i64>(),
                out.matching.weight()
            );
        }
    }
}
