//! Property tests for the cross-module invariants: serialization round
//! trips, stream permutations, symmetric-difference reconstruction, walk
//! decomposition, meter accounting, and the good-pair enumerator against its
//! own predicate.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use matchstream::augment::{apply_augmentation, symmetric_difference_augmentations};
use matchstream::generators::{gen, Family, GeneratorSpec};
use matchstream::layered::{decompose_alternating_path, enumerate_good_pairs, is_good_pair};
use matchstream::rng::SplitMix64;
use matchstream::stream::{MemoryMeter, MeterMode, StreamSession};
use matchstream::testkit::random_graph;
use matchstream::{Edge, Matching, WeightedGraph};

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn family_of(idx: u8) -> Family {
    match idx % 4 {
        0 => Family::ErdosRenyi,
        1 => Family::TightHalf,
        2 => Family::CycleFamily,
        _ => Family::WeightClasses,
    }
}

fn shuffled_maximal(g: &WeightedGraph, seed: u64) -> Matching {
    let mut idx: Vec<usize> = (0..g.m()).collect();
    SplitMix64::new(seed).shuffle(&mut idx);
    let mut m = Matching::new(g.n());
    for i in idx {
        let e = g.edge(i);
        if m.can_add(&e) {
            m.add(e).unwrap();
        }
    }
    m
}

fn sorted_edges(m: &Matching) -> Vec<Edge> {
    let mut es = m.edges();
    es.sort_unstable();
    es
}

proptest! {
    /// gen → serialize → parse → serialize is byte-identical, and repeating
    /// gen with the same spec reproduces the same graph.
    #[test]
    fn gen_serialize_parse_roundtrip(
        fam in 0u8..4,
        n in 2u32..40,
        m_frac in 0u32..=100,
        weight_max in 4i64..64,
        seed in any::<u64>(),
    ) {
        let max_m = (n as usize * (n as usize - 1) / 2).min(80);
        let spec = GeneratorSpec {
            family: family_of(fam),
            n,
            m: max_m * m_frac as usize / 100,
            weight_max,
            seed,
        };
        let g = gen(&spec).unwrap();
        let text = g.serialize();
        let h = WeightedGraph::parse(&text).unwrap();
        prop_assert_eq!(&text, &h.serialize());
        prop_assert_eq!(g.n(), h.n());
        prop_assert_eq!(g.edges(), h.edges());
        let again = gen(&spec).unwrap();
        prop_assert_eq!(g.edges(), again.edges());
    }

    /// A seeded session replays every edge exactly once.
    #[test]
    fn session_arrivals_are_a_permutation(
        n in 2u32..30,
        m_frac in 0u32..=100,
        seed in any::<u64>(),
        order_seed in any::<u64>(),
    ) {
        let max_m = (n as usize * (n as usize - 1) / 2).min(60);
        let g = random_graph(n, max_m * m_frac as usize / 100, 9, seed);
        let session = StreamSession::new(g.clone(), order_seed);
        let mut seen: Vec<Edge> = session.arrivals().collect();
        seen.sort_unstable();
        let mut all = g.edges().to_vec();
        all.sort_unstable();
        prop_assert_eq!(seen, all);
    }

    /// Applying every component of M △ M' onto M lands exactly on M'. The
    /// components are footprint-disjoint, so the application order is
    /// irrelevant; this exercises neighborhood bookkeeping end to end.
    #[test]
    fn symmetric_difference_reconstructs(
        n in 2u32..24,
        m_frac in 10u32..=100,
        gseed in any::<u64>(),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
    ) {
        let max_m = (n as usize * (n as usize - 1) / 2).min(60);
        let g = random_graph(n, max_m * m_frac as usize / 100, 9, gseed);
        let m1 = shuffled_maximal(&g, s1);
        let m2 = shuffled_maximal(&g, s2);
        let comps = symmetric_difference_augmentations(&m1, &m2);
        let mut cur = m1.clone();
        for c in &comps {
            cur = apply_augmentation(&cur, c).unwrap();
        }
        prop_assert_eq!(sorted_edges(&cur), sorted_edges(&m2));
        prop_assert_eq!(cur.weight(), m2.weight());
    }

    /// Decomposing an alternating walk preserves the edge multiset: a simple
    /// path stays whole, a closed tour peels into the cycle, and a
    /// wrap-around walk (tour plus one repeated matched edge) splits into
    /// the cycle and a leftover path with the duplicate counted twice.
    #[test]
    fn decompose_preserves_edge_multiset(
        k in 1usize..6,
        d in 2usize..8,
        wseed in any::<u64>(),
        shape in 0u8..3,
    ) {
        let mut rng = SplitMix64::new(wseed);
        let (g, m, walk) = match shape {
            0 => {
                // Alternating path: 2k+2 vertices, k matched edges.
                let len = 2 * k + 2;
                let mut edges = Vec::new();
                let mut matched = Vec::new();
                for i in 0..len - 1 {
                    let w = 1 + rng.below(9) as i64;
                    edges.push((i as u32, i as u32 + 1, w));
                    if i % 2 == 1 {
                        matched.push((i as u32, i as u32 + 1));
                    }
                }
                let g = WeightedGraph::from_edges_unchecked(len as u32, edges).unwrap();
                let m = Matching::from_edges(
                    len as u32,
                    matched.iter().map(|&(u, v)| g.find_edge(u, v).unwrap()),
                ).unwrap();
                let walk: Vec<u32> = (0..len as u32).collect();
                (g, m, walk)
            }
            _ => {
                // Even cycle on 2d vertices, every other edge matched; shape
                // 2 appends one extra traversal of the first matched edge.
                let len = 2 * d;
                let mut edges = Vec::new();
                let mut matched = Vec::new();
                for i in 0..len {
                    let j = (i + 1) % len;
                    let w = 1 + rng.below(9) as i64;
                    edges.push((i as u32, j as u32, w));
                    if i % 2 == 0 {
                        matched.push((i as u32, j as u32));
                    }
                }
                let g = WeightedGraph::from_edges_unchecked(len as u32, edges).unwrap();
                let m = Matching::from_edges(
                    len as u32,
                    matched.iter().map(|&(u, v)| g.find_edge(u, v).unwrap()),
                ).unwrap();
                let mut walk: Vec<u32> = (0..len as u32).collect();
                walk.push(0);
                if shape == 2 {
                    walk.push(1);
                }
                (g, m, walk)
            }
        };
        let mut walk_edges: Vec<Edge> = walk
            .windows(2)
            .map(|p| g.find_edge(p[0], p[1]).unwrap())
            .collect();
        let (path, cycles) = decompose_alternating_path(&g, &walk, &m).unwrap();
        let mut comp_edges: Vec<Edge> = Vec::new();
        if !path.is_empty() {
            comp_edges.extend(&path.edges);
        }
        for c in &cycles {
            comp_edges.extend(&c.edges);
        }
        walk_edges.sort_unstable();
        comp_edges.sort_unstable();
        prop_assert_eq!(walk_edges, comp_edges);
        match shape {
            0 => {
                prop_assert!(cycles.is_empty());
                prop_assert_eq!(path.edges.len(), 2 * k + 1);
            }
            1 => {
                prop_assert!(path.is_empty());
                prop_assert_eq!(cycles.len(), 1);
            }
            _ => {
                prop_assert_eq!(cycles.len(), 1);
                prop_assert_eq!(path.edges.len(), 1);
            }
        }
    }

    /// Meter accounting: stored tracks the charge/release sum, peak is the
    /// running maximum, and strict mode errors exactly on the first charge
    /// that lands above budget.
    #[test]
    fn meter_accounting(
        budget in 0usize..40,
        ops in prop::collection::vec((any::<bool>(), 0usize..12), 0..50),
    ) {
        for mode in [MeterMode::Strict, MeterMode::Lenient] {
            let mut meter = MemoryMeter::with_budget(budget, mode);
            let mut stored = 0usize;
            let mut peak = 0usize;
            let mut tripped = false;
            for &(charge, amount) in &ops {
                if charge {
                    let r = meter.charge("prop", amount);
                    stored += amount;
                    peak = peak.max(stored);
                    if stored > budget && mode == MeterMode::Strict {
                        prop_assert!(r.is_err());
                        tripped = true;
                        break;
                    }
                    prop_assert!(r.is_ok());
                } else {
                    meter.release(amount);
                    stored = stored.saturating_sub(amount);
                }
                prop_assert_eq!(meter.stored(), stored);
            }
            prop_assert_eq!(meter.peak(), peak);
            if !tripped && mode == MeterMode::Lenient {
                // Lenient mode records rather than errors.
                prop_assert_eq!(meter.violations().is_empty(), peak <= budget);
            }
        }
    }

    /// Seeded shuffling permutes, and identically so for identical seeds.
    #[test]
    fn shuffle_is_a_seeded_permutation(n in 0usize..200, seed in any::<u64>()) {
        let mut a: Vec<usize> = (0..n).collect();
        let mut b: Vec<usize> = (0..n).collect();
        SplitMix64::new(seed).shuffle(&mut a);
        SplitMix64::new(seed).shuffle(&mut b);
        prop_assert_eq!(&a, &b);
        a.sort_unstable();
        prop_assert_eq!(a, (0..n).collect::<Vec<_>>());
    }
}

/// The enumerator agrees with the predicate on a brute-forced grid: every
/// emitted pair satisfies is_good_pair, and every grid pair that does is
/// emitted.
#[test]
fn good_pair_enumeration_matches_predicate() {
    let eps = 0.4f64;
    let g = rat(1, 4);
    let k_max = 4usize;
    let eps_rat = BigRational::from_float(eps).unwrap();
    let sum_b_max = BigRational::from_integer(BigInt::from(1)) + (&eps_rat).pow(4i32);
    let pairs = enumerate_good_pairs(eps, &g, k_max, &sum_b_max, 100_000).unwrap();

    let mut emitted: Vec<(Vec<BigRational>, Vec<BigRational>)> = pairs
        .iter()
        .map(|p| (p.tau_a.clone(), p.tau_b.clone()))
        .collect();
    emitted.sort();
    let before = emitted.len();
    emitted.dedup();
    assert_eq!(before, emitted.len(), "enumerator repeats a pair");

    // Σ τ^B ≤ 1 + ε⁴ caps any feasible entry at 4 units of 1/4; 5 leaves a
    // unit of margin so the grid provably brackets the budget.
    let max_unit = 5u64;
    let mut brute: Vec<(Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    for layers in 2..=k_max {
        let a_cands: Vec<Vec<u64>> = unit_vectors(layers, max_unit);
        let b_cands: Vec<Vec<u64>> = unit_vectors(layers - 1, max_unit);
        for au in &a_cands {
            for bu in &b_cands {
                let ta: Vec<BigRational> =
                    au.iter().map(|&u| &g * rat(u as i64, 1)).collect();
                let tb: Vec<BigRational> =
                    bu.iter().map(|&u| &g * rat(u as i64, 1)).collect();
                if is_good_pair(&ta, &tb, eps, &g) {
                    brute.push((ta, tb));
                }
            }
        }
    }
    brute.sort();
    assert_eq!(emitted, brute);
}

fn unit_vectors(len: usize, max_unit: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max_unit).map(move |u| {
                    let mut w = v.clone();
                    w.push(u);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn session_with_order_validates() {
    let g = WeightedGraph::from_edges_unchecked(3, vec![(0, 1, 1), (1, 2, 2)]).unwrap();
    assert!(StreamSession::with_order(g.clone(), vec![1, 0]).is_ok());
    assert!(StreamSession::with_order(g.clone(), vec![0]).is_err());
    assert!(StreamSession::with_order(g.clone(), vec![0, 0]).is_err());
    assert!(StreamSession::with_order(g, vec![0, 2]).is_err());
}
