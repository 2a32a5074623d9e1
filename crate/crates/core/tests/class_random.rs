use spfar::abacus::{build_abacus, AbacusStructure};
use spfar::bead_chain::{build_bead_chain, BeadChainStructure};
use spfar::exact::{Length, SCALE};
use spfar::parallel_path::build_parallel_path;
use spfar::testkit::check::{check_equivalence, sample_points, FarthestQuery};
use spfar::testkit::gen::{generate_full, GenSpec, NetClass, Shape, WeightRange};

const UNIT: WeightRange = WeightRange { lo: Length(SCALE), hi: Length(2 * SCALE), decimals: 0 };
const FINE: WeightRange = WeightRange { lo: Length(SCALE / 10), hi: Length(3 * SCALE), decimals: 1 };

fn sweep<S: FarthestQuery>(class: NetClass, count: u64, s: usize, p: usize, weights: WeightRange, build: impl Fn(&spfar::testkit::gen::Generated) -> S) {
    for seed in 0..count {
        let g = generate_full(&GenSpec { seed, class, s, p, weights }).unwrap();
        let st = build(&g);
        let r = check_equivalence(&st, 40, seed);
        if let Some(m) = r.mismatches.first() {
            panic!("{class:?} seed {seed}: expected {:?} got {:?}\n{}", m.expected, m.got, m.witness);
        }
    }
}

fn pp(g: &spfar::testkit::gen::Generated) -> spfar::parallel_path::ParallelPathStructure {
    let Shape::ParallelPath { u, v, .. } = g.shape else { panic!("not a parallel-path shape") };
    build_parallel_path(&g.net, u, v).unwrap()
}

fn bc(g: &spfar::testkit::gen::Generated) -> BeadChainStructure {
    let Shape::BeadChain { cycle, arcs } = &g.shape else { panic!("not a bead-chain shape") };
    build_bead_chain(&g.net, cycle, arcs).unwrap()
}

fn ab(g: &spfar::testkit::gen::Generated) -> AbacusStructure {
    let Shape::Abacus { u, v, paths, arcs } = &g.shape else { panic!("not an abacus shape") };
    build_abacus(&g.net, *u, *v, paths, arcs).unwrap()
}

#[test]
fn parallel_path_matches_oracle() {
    sweep(NetClass::ParallelPath, 200, 20, 4, WeightRange::default(), pp);
    sweep(NetClass::ParallelPath, 200, 12, 5, UNIT, pp);
    sweep(NetClass::ParallelPath, 100, 40, 8, FINE, pp);
    sweep(NetClass::ParallelPath, 50, 3, 1, UNIT, pp);
    sweep(NetClass::ParallelPath, 50, 0, 2, UNIT, pp);
}

/// Worst `(probes - k) / log2 n` over sampled queries.
fn probe_ratio<S, F>(class: NetClass, s: usize, p: usize, build: impl Fn(&spfar::testkit::gen::Generated) -> S, count: F) -> f64
where
    F: Fn(&S, &spfar::network::PointOnEdge, &mut u64) -> spfar::network::FarthestResult,
{
    let mut worst = 0f64;
    for seed in 0..100 {
        let g = generate_full(&GenSpec { seed, class, s, p, weights: UNIT }).unwrap();
        let st = build(&g);
        let n = g.net.vertex_count() as f64;
        for q in sample_points(&g.net, 30, seed) {
            let mut probes = 0;
            let r = count(&st, &q, &mut probes);
            worst = worst.max((probes as f64 - r.k() as f64) / n.log2());
        }
    }
    worst
}

#[test]
fn parallel_path_probes() {
    let worst = probe_ratio(NetClass::ParallelPath, 200, 12, pp, |st, q, pr| st.farthest_points_counted(q, pr));
    assert!(worst <= 4.0, "probes exceed k + 4 log n: {worst}");
}

#[test]
fn bead_chain_probes() {
    let worst = probe_ratio(NetClass::BeadChain, 300, 40, bc, |st, q, pr| st.farthest_points_counted(q, pr));
    assert!(worst <= 4.0, "probes exceed k + 4 log n: {worst}");
}

#[test]
fn bead_chain_matches_oracle() {
    sweep(NetClass::BeadChain, 300, 20, 4, WeightRange::default(), bc);
    sweep(NetClass::BeadChain, 300, 10, 4, UNIT, bc);
    sweep(NetClass::BeadChain, 200, 30, 8, FINE, bc);
    sweep(NetClass::BeadChain, 100, 6, 2, UNIT, bc);
    sweep(NetClass::BeadChain, 50, 3, 1, UNIT, bc);
}

#[test]
fn abacus_matches_oracle() {
    sweep(NetClass::Abacus, 300, 20, 4, WeightRange::default(), ab);
    sweep(NetClass::Abacus, 300, 12, 4, UNIT, ab);
    sweep(NetClass::Abacus, 200, 40, 8, FINE, ab);
    sweep(NetClass::Abacus, 100, 9, 2, UNIT, ab);
    sweep(NetClass::Abacus, 50, 6, 1, UNIT, ab);
}

#[test]
fn abacus_probes() {
    let worst = probe_ratio(NetClass::Abacus, 300, 30, ab, |st, q, pr| st.farthest_points_counted(q, pr));
    assert!(worst <= 4.0, "probes exceed k + 4 log n: {worst}");
}

#[test]
fn sp_decomposition_is_linear_and_exact() {
    let mut worst = 0f64;
    for seed in 0..150 {
        let g = generate_full(&GenSpec { seed, class: NetClass::SeriesParallel, s: 40, p: 12, weights: UNIT }).unwrap();
        let t = spfar::sp::nest::decompose(&g.net).unwrap();
        worst = worst.max(t.total_vertices() as f64 / g.net.vertex_count() as f64);
        for node in &t.nodes {
            let r = check_equivalence(&node.abacus, 10, seed);
            assert!(r.mismatches.is_empty(), "seed {seed}: node abacus disagrees with the oracle");
        }
    }
    assert!(worst <= 3.0, "vertex copies {worst} n");
}
