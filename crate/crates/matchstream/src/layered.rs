//! Layered-graph machinery for weighted augmentation search: random L/R
//! bipartition, good window-sequence pairs, layered-graph construction with
//! survivor filtering, augmentation-class membership, and the decomposition
//! of projected walks into one simple path plus even alternating cycles.
//!
//! All window and rounding comparisons run on exact rationals; weights reach
//! n^4 where floats would mis-round boundary cases like "gain exactly 2W".

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::augment::Augmentation;
use crate::error::Error;
use crate::graph::{Edge, WeightedGraph};
use crate::matching::Matching;
use crate::rng::SplitMix64;
use crate::rounding::{ceil_units, floor_units, rat_int};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

/// A vertex bipartition together with the crossing edges it induces:
/// `a` holds the matched crossing edges, `b` the unmatched ones.
#[derive(Debug, Clone)]
pub struct Parametrization {
    side: Vec<Side>,
    a: Vec<Edge>,
    b: Vec<Edge>,
}

impl Parametrization {
    pub fn from_sides(g: &WeightedGraph, m: &Matching, side: Vec<Side>) -> Result<Self> {
        if side.len() != g.n() as usize {
            return Err(Error::Param(format!(
                "{} side assignments for {} vertices",
                side.len(),
                g.n()
            )));
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..g.m() {
            let e = g.edge(i);
            if side[e.u as usize] != side[e.v as usize] {
                if m.contains(&e) {
                    a.push(e);
                } else {
                    b.push(e);
                }
            }
        }
        Ok(Parametrization { side, a, b })
    }

    pub fn side(&self, v: u32) -> Side {
        self.side[v as usize]
    }

    pub fn is_crossing(&self, e: &Edge) -> bool {
        self.side[e.u as usize] != self.side[e.v as usize]
    }

    /// Matched crossing edges.
    pub fn a(&self) -> &[Edge] {
        &self.a
    }

    /// Unmatched crossing edges.
    pub fn b(&self) -> &[Edge] {
        &self.b
    }

    /// The endpoints of a crossing edge ordered (L side, R side).
    pub fn oriented(&self, e: &Edge) -> (u32, u32) {
        debug_assert!(self.is_crossing(e));
        if self.side[e.u as usize] == Side::L {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        }
    }
}

/// Fair i.i.d. vertex sides drawn from the seed.
pub fn random_bipartition(g: &WeightedGraph, m: &Matching, seed: u64) -> Parametrization {
    let mut rng = SplitMix64::new(seed);
    let side: Vec<Side> = (0..g.n())
        .map(|_| if rng.coin() { Side::L } else { Side::R })
        .collect();
    Parametrization::from_sides(g, m, side).expect("sides sized to n")
}

/// A pair of window sequences: τ^A holds one matched-edge window per layer,
/// τ^B one unmatched-edge window per gap, all entries multiples of the
/// granularity g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodPair {
    pub tau_a: Vec<BigRational>,
    pub tau_b: Vec<BigRational>,
    pub g: BigRational,
}

impl GoodPair {
    pub fn layers(&self) -> usize {
        self.tau_a.len()
    }

    pub fn k(&self) -> usize {
        self.tau_a.len() - 1
    }
}

/// The six admissibility checks for a window-sequence pair:
/// lengths (|τ^A| ≤ 32/ε² + 1 and |τ^B| = |τ^A| − 1), entries non-negative
/// multiples of g, τ^B entries ≥ 2g, interior τ^A entries ≥ 2g,
/// Σ τ^B ≤ 1 + ε⁴, and Σ τ^B − Σ τ^A ≥ g.
pub fn is_good_pair(tau_a: &[BigRational], tau_b: &[BigRational], eps: f64, g: &BigRational) -> bool {
    let Some(eps_rat) = BigRational::from_float(eps) else {
        return false;
    };
    if !(eps > 0.0) || !g.is_positive() {
        return false;
    }
    if tau_a.is_empty() || tau_b.len() + 1 != tau_a.len() {
        return false;
    }
    // |τ^A| ≤ (2/ε)(16/ε) + 1, exactly: (|τ^A| − 1)·ε² ≤ 32.
    let eps_sq = &eps_rat * &eps_rat;
    if rat_int(tau_a.len() as i64 - 1) * &eps_sq > rat_int(32) {
        return false;
    }
    let on_grid = |t: &BigRational| !t.is_negative() && (t / g).is_integer();
    if !tau_a.iter().all(on_grid) || !tau_b.iter().all(on_grid) {
        return false;
    }
    let two_g = g + g;
    if tau_b.iter().any(|t| *t < two_g) {
        return false;
    }
    if tau_a[1..tau_a.len() - 1].iter().any(|t| *t < two_g) {
        return false;
    }
    let sum_a: BigRational = tau_a.iter().sum();
    let sum_b: BigRational = tau_b.iter().sum();
    if sum_b > rat_int(1) + &eps_sq * &eps_sq {
        return false;
    }
    sum_b - sum_a >= *g
}

/// Enumerate every good pair with |τ^A| ≤ k_max and Σ τ^B ≤ sum_b_max, in
/// lexicographic order of (|τ^A|, τ^A, τ^B). Refuses with an enumeration
/// guard once more than `cap` pairs exist.
pub fn enumerate_good_pairs(
    eps: f64,
    g: &BigRational,
    k_max: usize,
    sum_b_max: &BigRational,
    cap: usize,
) -> Result<Vec<GoodPair>> {
    let eps_rat = BigRational::from_float(eps)
        .filter(|_| eps > 0.0 && eps < 1.0)
        .ok_or_else(|| Error::Param(format!("eps must be in (0, 1), got {eps}")))?;
    if !g.is_positive() {
        return Err(Error::Param("granularity must be positive".into()));
    }
    if k_max >= 2 {
        let eps_sq = &eps_rat * &eps_rat;
        if rat_int(k_max as i64 - 1) * eps_sq > rat_int(32) {
            return Err(Error::Param(format!(
                "k_max={k_max} exceeds the window-sequence length bound 32/eps^2 + 1"
            )));
        }
    }
    // Work in integer units of g. Σ τ^B may use at most `ub` units.
    let ub: u64 = {
        let units = (sum_b_max / g).floor().to_integer();
        if units.is_negative() {
            0
        } else {
            u64::try_from(units).unwrap_or(u64::MAX)
        }
    };
    let mut out: Vec<GoodPair> = Vec::new();
    for len in 2..=k_max {
        if ub == 0 {
            break;
        }
        let mut a_units = vec![0u64; len];
        let b_units = vec![0u64; len - 1];
        gen_a_units(0, ub - 1, &mut a_units, &mut |a| {
            let sum_a: u64 = a.iter().sum();
            gen_b_units(0, ub, &mut b_units.clone(), &mut |b| {
                let sum_b: u64 = b.iter().sum();
                if sum_b < sum_a + 1 {
                    return Ok(());
                }
                let to_rat = |units: &[u64]| -> Vec<BigRational> {
                    units.iter().map(|&u| g * rat_int(u as i64)).collect()
                };
                let (ta, tb) = (to_rat(a), to_rat(b));
                debug_assert!(is_good_pair(&ta, &tb, eps, g), "{ta:?} {tb:?}");
                if is_good_pair(&ta, &tb, eps, g) {
                    out.push(GoodPair {
                        tau_a: ta,
                        tau_b: tb,
                        g: g.clone(),
                    });
                    if out.len() > cap {
                        return Err(Error::EnumerationGuard {
                            cap: cap as u64,
                            estimate: out.len() as u64,
                        });
                    }
                }
                Ok(())
            })
        })?;
    }
    Ok(out)
}

/// τ^A unit sequences: boundary entries ≥ 0, interior ≥ 2, sum ≤ budget,
/// lexicographic (entries ascending position by position).
fn gen_a_units(
    i: usize,
    budget: u64,
    units: &mut Vec<u64>,
    sink: &mut dyn FnMut(&[u64]) -> Result<()>,
) -> Result<()> {
    if i == units.len() {
        return sink(units);
    }
    let min = if i == 0 || i == units.len() - 1 { 0 } else { 2 };
    let mut val = min;
    while val <= budget {
        units[i] = val;
        gen_a_units(i + 1, budget - val, units, sink)?;
        val += 1;
    }
    Ok(())
}

/// τ^B unit sequences: every entry ≥ 2, sum ≤ budget, lexicographic.
fn gen_b_units(
    i: usize,
    budget: u64,
    units: &mut Vec<u64>,
    sink: &mut dyn FnMut(&[u64]) -> Result<()>,
) -> Result<()> {
    if i == units.len() {
        return sink(units);
    }
    let mut val = 2;
    while val <= budget {
        units[i] = val;
        gen_b_units(i + 1, budget - val, units, sink)?;
        val += 1;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerEdgeKind {
    X,
    Y,
}

/// One edge of the layered graph. `from`/`to` are (vertex, layer) copies:
/// X edges run L→R inside a layer, Y edges run R (layer t) → L (layer t+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayeredEdge {
    pub from: (u32, u32),
    pub to: (u32, u32),
    pub origin: Edge,
    pub kind: LayerEdgeKind,
}

#[derive(Debug, Clone)]
pub struct LayeredGraph {
    /// Layer count minus one.
    pub k: usize,
    /// Surviving copies (vertex, layer), sorted; layers are 1-based.
    pub vertices: Vec<(u32, u32)>,
    pub x: Vec<LayeredEdge>,
    pub y: Vec<LayeredEdge>,
}

impl LayeredGraph {
    /// Dense ids for the surviving copies, in sorted copy order.
    pub fn vertex_ids(&self) -> BTreeMap<(u32, u32), u32> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect()
    }

    /// Structural bipartiteness: every X edge runs L→R inside a layer and
    /// every Y edge R→L across consecutive layers, so original sides
    /// 2-color the copies.
    pub fn check_bipartite(&self, p: &Parametrization) -> bool {
        self.x.iter().all(|e| {
            p.side(e.from.0) == Side::L && p.side(e.to.0) == Side::R && e.from.1 == e.to.1
        }) && self.y.iter().all(|e| {
            p.side(e.from.0) == Side::R && p.side(e.to.0) == Side::L && e.from.1 + 1 == e.to.1
        })
    }
}

/// Matched-window test: w ∈ ((τ − g)·W, τ·W].
fn in_x_window(we: i64, tau: &BigRational, g: &BigRational, w: &BigRational) -> bool {
    let rw = rat_int(we);
    rw > (tau - g) * w && rw <= tau * w
}

/// Unmatched-window test: w ∈ [τ·W, (τ + g)·W).
fn in_y_window(we: i64, tau: &BigRational, g: &BigRational, w: &BigRational) -> bool {
    let rw = rat_int(we);
    rw >= tau * w && rw < (tau + g) * w
}

/// Build the layered graph for one (parametrization, pair, W) choice.
///
/// Survival rules: an interior copy v^t lives iff v's matched edge crosses
/// the bipartition and passes layer t's window. A boundary copy additionally
/// lives when v is free in M and the boundary window is 0 — applied
/// symmetrically to both sides of the bipartition (the rule is stated for
/// one side only; free vertices of the other side stay isolated and
/// harmless).
pub fn build_layered(
    p: &Parametrization,
    pair: &GoodPair,
    w: &BigRational,
    m: &Matching,
) -> LayeredGraph {
    let layers = pair.tau_a.len();
    let n = m.n() as usize;
    // alive[v][t] for 1-based t.
    let mut alive = vec![vec![false; layers + 1]; n];
    for v in 0..n as u32 {
        match m.edge_at(v) {
            Some(me) if p.is_crossing(&me) => {
                for t in 1..=layers {
                    if in_x_window(me.w, &pair.tau_a[t - 1], &pair.g, w) {
                        alive[v as usize][t] = true;
                    }
                }
            }
            Some(_) => {} // matched off the bipartition: no copy survives
            None => {
                if pair.tau_a[0].is_zero() {
                    alive[v as usize][1] = true;
                }
                if pair.tau_a[layers - 1].is_zero() {
                    alive[v as usize][layers] = true;
                }
            }
        }
    }

    let mut x = Vec::new();
    for e in p.a() {
        let (l, r) = p.oriented(e);
        for t in 1..=layers {
            if in_x_window(e.w, &pair.tau_a[t - 1], &pair.g, w) {
                debug_assert!(alive[l as usize][t] && alive[r as usize][t]);
                x.push(LayeredEdge {
                    from: (l, t as u32),
                    to: (r, t as u32),
                    origin: *e,
                    kind: LayerEdgeKind::X,
                });
            }
        }
    }
    let mut y = Vec::new();
    for e in p.b() {
        let (l, r) = p.oriented(e);
        for t in 1..layers {
            if in_y_window(e.w, &pair.tau_b[t - 1], &pair.g, w)
                && alive[r as usize][t]
                && alive[l as usize][t + 1]
            {
                y.push(LayeredEdge {
                    from: (r, t as u32),
                    to: (l, (t + 1) as u32),
                    origin: *e,
                    kind: LayerEdgeKind::Y,
                });
            }
        }
    }

    let mut vertices = Vec::new();
    for v in 0..n as u32 {
        for t in 1..=layers {
            if alive[v as usize][t] {
                vertices.push((v, t as u32));
            }
        }
    }
    LayeredGraph {
        k: layers - 1,
        vertices,
        x,
        y,
    }
}

/// Decompose the projection of a layered walk into one simple alternating
/// path plus simple even alternating cycles, preserving the edge multiset.
/// Peels a cycle whenever the walk returns to a vertex still on the stack;
/// for walks that really are projections of layered paths the peeled seam
/// always alternates, and anything else fails validation.
pub fn decompose_alternating_path(
    g: &WeightedGraph,
    walk: &[u32],
    m: &Matching,
) -> Result<(Augmentation, Vec<Augmentation>)> {
    if walk.len() < 2 {
        return Ok((Augmentation::empty(), Vec::new()));
    }
    let mut arcs: Vec<Edge> = Vec::with_capacity(walk.len() - 1);
    for pair in walk.windows(2) {
        let e = g.find_edge(pair[0], pair[1]).ok_or_else(|| {
            Error::Structure(format!("projection uses missing edge ({}, {})", pair[0], pair[1]))
        })?;
        arcs.push(e);
    }
    let flags: Vec<bool> = arcs.iter().map(|e| m.contains(e)).collect();
    if flags.windows(2).any(|p| p[0] == p[1]) {
        return Err(Error::Structure("projection does not alternate".into()));
    }

    let mut cycles = Vec::new();
    let mut stack_v: Vec<u32> = vec![walk[0]];
    let mut stack_a: Vec<Edge> = Vec::new();
    let mut pos: HashMap<u32, usize> = HashMap::from([(walk[0], 0)]);
    for (i, arc) in arcs.iter().enumerate() {
        let next = walk[i + 1];
        if let Some(&p) = pos.get(&next) {
            let mut cyc = stack_a.split_off(p);
            cyc.push(*arc);
            for v in stack_v.drain(p + 1..) {
                pos.remove(&v);
            }
            cycles.push(Augmentation::cycle(cyc, m)?);
        } else {
            stack_a.push(*arc);
            stack_v.push(next);
            pos.insert(next, stack_v.len() - 1);
        }
    }
    let path = Augmentation::path(stack_a, m)?;
    Ok((path, cycles))
}

/// Gain of an augmentation rounded pessimistically to whole units of `gw`:
/// added weights round down, removed (neighborhood) weights round up. For
/// components decomposed from an all-layers projection of a good pair, the
/// window bounds make these units sum to Σ τ^B/g − Σ τ^A/g ≥ 1 across the
/// components, so at least one component has a whole positive unit — and
/// therefore raw gain ≥ g·W.
pub(crate) fn rounded_gain_units(c: &Augmentation, gw: &BigRational) -> BigInt {
    let mut units = BigInt::from(0);
    for e in &c.edges {
        if !c.neighborhood.contains(e) {
            units += floor_units(e.w, gw);
        }
    }
    for e in &c.neighborhood {
        units -= ceil_units(e.w, gw);
    }
    units
}

/// Augmentation-class membership at weight scale W and granularity ε¹².
pub fn in_augmentation_class(c: &Augmentation, w: &BigRational, eps: f64) -> bool {
    let Some(eps_rat) = BigRational::from_float(eps) else {
        return false;
    };
    let g = crate::rounding::rat_pow(&eps_rat, 12);
    in_augmentation_class_with_g(c, w, eps, &g)
}

/// The four membership conditions with an explicit granularity g (the
/// paper-faithful test fixes g = ε¹²):
/// (1) every walk edge weighs within [gW, 2W];
/// (2) gain ≤ 2W;
/// (3) rounding the removed weights up and the added weights down to
///     multiples of gW leaves a gain of at least gW;
/// (4) at most 64/ε² + 1 vertices.
pub fn in_augmentation_class_with_g(
    c: &Augmentation,
    w: &BigRational,
    eps: f64,
    g: &BigRational,
) -> bool {
    let Some(eps_rat) = BigRational::from_float(eps) else {
        return false;
    };
    if c.is_empty() || !g.is_positive() || !w.is_positive() {
        return false;
    }
    let gw = g * w;
    let two_w = rat_int(2) * w;
    for e in &c.edges {
        let rw = rat_int(e.w);
        if rw < gw || rw > two_w {
            return false;
        }
    }
    if rat_int(c.gain) > two_w {
        return false;
    }
    // Rounded gain in units of gW: adds round down, removals round up.
    if rounded_gain_units(c, &gw) < BigInt::from(1) {
        return false;
    }
    // (|V(C)| − 1)·ε² ≤ 64, exactly.
    let count = c.vertices().len() as i64;
    rat_int(count - 1) * &eps_rat * &eps_rat <= rat_int(64)
}
