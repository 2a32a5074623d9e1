//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::Instant;

use spfar::abacus::build_abacus;
use spfar::bead_chain::build_bead_chain;
use spfar::exact::{half, Q, SCALE};
use spfar::network::{build_network, Network, PointOnEdge, VertexId};
use spfar::oracle::{network_distance, oracle_farthest};
use spfar::parallel_path::build_parallel_path;
use spfar::plf::arcshape::{envelope_two_pass, ArcDistanceShape};
use spfar::plf::envelope::{envelope_and_second_level, PLFunction};
use spfar::sp::engine::SpStructure;
use spfar::testkit::check::{sample_points, FarthestQuery};
use spfar::testkit::engines::{class_engine, generate_sized, sweep_seed, CountedQuery};
use spfar::testkit::gen::{generate_full, GenSpec, NetClass, Shape, WeightRange};
use spfar::Error;

type Outcome = Result<String, String>;

/// The one probe constant asserted everywhere.
const C: f64 = 8.0;

/// Worst `(probes - k) / log2 n` seen anywhere in the run.
#[derive(Default)]
struct Probes {
    worst: f64,
    queries: u64,
}

impl Probes {
    fn record(&mut self, n: usize, probes: u64, k: usize) {
        let ratio = (probes as f64 - k as f64) / (n as f64).log2().max(1.0);
        self.worst = self.worst.max(ratio);
        self.queries += 1;
    }
}

fn w(x: f64) -> Q {
    Q::new((x * 4.0).round() as i128 * SCALE as i128, 4)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Queries one engine and the oracle; the engine must match exactly.
fn compare(engine: &dyn CountedQuery, q: &PointOnEdge, probes: &mut Probes) -> Result<(), String> {
    let net = engine.network();
    let mut count = 0;
    let got = engine.farthest_points_counted(q, &mut count);
    let want = oracle_farthest(net, q);
    probes.record(net.vertex_count(), count, got.k());
    ensure(got == want, || format!("query {} {}: expected {want:?}, got {got:?}\n{}", q.edge, q.lambda, net.to_text()))
}

fn criterion_1(probes: &mut Probes) -> Outcome {
    let t = Instant::now();
    let mut networks = 0;
    let mut queries = 0;
    for class in NetClass::ALL {
        for i in 0..200 {
            let seed = sweep_seed(1, i);
            let g = generate_sized(class, 60, seed).map_err(|e| e.to_string())?;
            ensure(g.net.vertex_count() <= 60, || format!("{} network {i} has {} vertices", class.name(), g.net.vertex_count()))?;
            let engine = class_engine(&g).map_err(|e| format!("{} network {i}: {e}", class.name()))?;
            let general = SpStructure::build(&g.net).map_err(|e| e.to_string())?;
            for q in sample_points(&g.net, 50, seed).into_iter().take(50) {
                compare(engine.as_ref(), &q, probes).map_err(|e| format!("{} network {i}: {e}", class.name()))?;
                compare(&general, &q, probes).map_err(|e| format!("{} network {i} (general engine): {e}", class.name()))?;
                queries += 1;
            }
            networks += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{networks} networks, {queries} queries, all exact, {secs:.1} s"))
}

// u=0 v=1 x=2
fn pp1() -> Network {
    build_network(3, &[(0, 1, "2"), (0, 2, "3"), (2, 1, "3")]).unwrap()
}

// a=0 b=1 c=2 d=3 e=4
fn bc1() -> Network {
    build_network(5, &[(0, 1, "1"), (1, 2, "1"), (2, 3, "1"), (3, 0, "1"), (0, 4, "1.5"), (4, 1, "1.5")]).unwrap()
}

// u=0 v=1 x=2 y=3
fn ab1() -> Network {
    build_network(4, &[(0, 1, "2"), (0, 2, "3"), (2, 1, "3"), (0, 3, "2.5"), (3, 2, "2.5")]).unwrap()
}

// u=0 v=1 a=2 b=3 c=4
fn sp1() -> Network {
    build_network(5, &[(0, 1, "10"), (0, 2, "2"), (2, 3, "1.5"), (3, 1, "1.5"), (2, 4, "2"), (4, 1, "2")]).unwrap()
}

/// Checks a fixture query on every given engine and on the oracle.
fn pin(name: &str, engines: &[&dyn FarthestQuery], q: PointOnEdge, dist: f64, points: Option<&[(usize, Q)]>) -> Result<(), String> {
    let net = engines[0].network();
    let q = q.canonical(net);
    let oracle = oracle_farthest(net, &q);
    ensure(oracle.distance == w(dist), || format!("{name}: oracle distance {:?}", oracle.distance))?;
    if let Some(ps) = points {
        let want: Vec<PointOnEdge> = ps.iter().map(|&(e, l)| PointOnEdge::new(e, l).canonical(net)).collect();
        let got: Vec<PointOnEdge> = oracle.points.iter().cloned().collect();
        ensure(got == want, || format!("{name}: oracle points {got:?}"))?;
    }
    for e in engines {
        ensure(e.farthest_points(&q) == oracle, || format!("{name}: engine disagrees with the oracle"))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let r = Q::new;
    let net = pp1();
    let pp = build_parallel_path(&net, 0, 1).map_err(|e| e.to_string())?;
    let sp = SpStructure::build(&net).map_err(|e| e.to_string())?;
    let es: [&dyn FarthestQuery; 2] = [&pp, &sp];
    pin("PP1 lambda 1/6 on ux", &es, PointOnEdge::new(1, r(1, 6)), 4.0, Some(&[(2, r(1, 2))]))?;
    pin("PP1 q = x", &es, PointOnEdge::vertex(&net, 2), 4.0, Some(&[(0, r(1, 2))]))?;
    // t = 2 from u along u-x-v, the boundary of the left case
    pin("PP1 t = 2", &es, PointOnEdge::new(1, r(2, 3)), 4.0, Some(&[(2, r(1, 1))]))?;

    let net = bc1();
    let bc = build_bead_chain(&net, &[0, 1, 2, 3], &[vec![0, 4, 1]]).map_err(|e| e.to_string())?;
    let sp = SpStructure::build(&net).map_err(|e| e.to_string())?;
    let es: [&dyn FarthestQuery; 2] = [&bc, &sp];
    pin("BC1 q = e", &es, PointOnEdge::vertex(&net, 4), 3.0, Some(&[(2, r(1, 2))]))?;
    pin("BC1 q = c", &es, PointOnEdge::vertex(&net, 2), 3.0, Some(&[(4, r(2, 3))]))?;

    let net = ab1();
    let ab = build_abacus(&net, 0, 1, &[vec![0, 1], vec![0, 2, 1]], &[(1, vec![0, 3, 2])]).map_err(|e| e.to_string())?;
    let sp = SpStructure::build(&net).map_err(|e| e.to_string())?;
    let es: [&dyn FarthestQuery; 2] = [&ab, &sp];
    pin("AB1 q = mid-uv", &es, PointOnEdge::new(0, r(1, 2)), 5.0, Some(&[(4, r(3, 5))]))?;

    let net = sp1();
    let sp = SpStructure::build(&net).map_err(|e| e.to_string())?;
    let es: [&dyn FarthestQuery; 1] = [&sp];
    pin("SP1 q = u", &es, PointOnEdge::vertex(&net, 0), 7.5, None)?;
    pin("SP1 q = c", &es, PointOnEdge::vertex(&net, 4), 8.0, None)?;
    Ok("PP1 x3, BC1 x2, AB1, SP1 x2 pinned on engines and oracle".into())
}

/// The point at distance `t` from the start of a vertex path.
fn point_along(net: &Network, seq: &[VertexId], t: Q) -> PointOnEdge {
    let mut at = Q::from_integer(0);
    for p in seq.windows(2) {
        let e = net.find_edge(p[0], p[1]).unwrap();
        let len = net.edge(e).w.to_q();
        if t <= at + len {
            return PointOnEdge::at_offset(net, e, p[0], t - at);
        }
        at += len;
    }
    PointOnEdge::vertex(net, *seq.last().unwrap())
}

fn path_len(net: &Network, seq: &[VertexId]) -> Q {
    seq.windows(2).map(|p| net.edge(net.find_edge(p[0], p[1]).unwrap()).w.to_q()).fold(Q::from_integer(0), |a, b| a + b)
}

/// On every path, the stretch where the path itself is a shortest route to
/// both terminals runs from `(w_i - d)/2` to `(w_i + d)/2` and so has length `d`.
fn bar_stretch_is_d(net: &Network, u: VertexId, v: VertexId, paths: &[Vec<VertexId>]) -> Result<(), String> {
    let (pu, pv) = (PointOnEdge::vertex(net, u), PointOnEdge::vertex(net, v));
    let d = network_distance(net, &pu, &pv);
    let eps = Q::new(1, 7);
    for seq in paths {
        let wi = path_len(net, seq);
        let (bu, bv) = (half(wi + d), half(wi - d));
        ensure(bu - bv == d, || "stretch length differs from d".into())?;
        ensure(network_distance(net, &pu, &point_along(net, seq, bu)) == bu, || format!("u side fails on path {seq:?}"))?;
        ensure(network_distance(net, &pv, &point_along(net, seq, bv)) == wi - bv, || format!("v side fails on path {seq:?}"))?;
        if bu < wi {
            let y = point_along(net, seq, bu + eps);
            ensure(network_distance(net, &pu, &y) < bu + eps, || format!("u side extends past bar u on {seq:?}"))?;
        }
        if bv > Q::from_integer(0) {
            let y = point_along(net, seq, bv - eps);
            ensure(network_distance(net, &pv, &y) < wi - bv + eps, || format!("v side extends past bar v on {seq:?}"))?;
        }
    }
    Ok(())
}

fn forward(len: Q, x: Q, y: Q) -> Q {
    spfar::plf::arcshape::wrap(len, y - x)
}

/// Low plateaus `[a, b]` and high plateaus `[bar a, bar b]` are pairwise
/// disjoint and appear around the cycle in arc order.
fn plateaus_ordered(shapes: &[ArcDistanceShape]) -> bool {
    if shapes.len() < 2 {
        return true;
    }
    let len = shapes[0].cycle_len;
    let ordered = |lo: &dyn Fn(&ArcDistanceShape) -> Q, hi: &dyn Fn(&ArcDistanceShape) -> Q| {
        let mut total = Q::from_integer(0);
        for k in 0..shapes.len() {
            let (cur, nxt) = (&shapes[k], &shapes[(k + 1) % shapes.len()]);
            let gap = forward(len, lo(cur), lo(nxt));
            if gap < forward(len, lo(cur), hi(cur)) || gap == Q::from_integer(0) {
                return false;
            }
            total += gap;
        }
        total == len
    };
    ordered(&|s| s.a, &|s| s.b()) && ordered(&|s| s.bar_a(), &|s| s.bar_b())
}

fn criterion_3() -> Outcome {
    let mut instances = 0;
    for class in [NetClass::ParallelPath, NetClass::Abacus] {
        for i in 0..200 {
            let g = generate_sized(class, 60, sweep_seed(3, i)).map_err(|e| e.to_string())?;
            let (u, v, paths) = match &g.shape {
                Shape::ParallelPath { u, v, paths } | Shape::Abacus { u, v, paths, .. } => (*u, *v, paths),
                _ => unreachable!(),
            };
            bar_stretch_is_d(&g.net, u, v, paths).map_err(|e| format!("{} #{i}: {e}", class.name()))?;
            if let Shape::Abacus { arcs, .. } = &g.shape {
                let ab = build_abacus(&g.net, u, v, paths, arcs).map_err(|e| e.to_string())?;
                let (lo, hi) = ab.bar_stretch();
                ensure(hi - lo == ab.d, || format!("abacus #{i}: virtual stretch is not d"))?;
            } else {
                let pp = build_parallel_path(&g.net, u, v).map_err(|e| e.to_string())?;
                for k in 0..pp.path_count() {
                    let (bu, bv) = pp.bar_positions(k);
                    ensure(bu - bv == network_distance(&g.net, &PointOnEdge::vertex(&g.net, u), &PointOnEdge::vertex(&g.net, v)), || format!("pp #{i}: bar positions"))?;
                }
            }
            instances += 1;
        }
    }

    let (mut with_overlong, mut worst_bp) = (0, 0f64);
    for i in 0..1000u64 {
        let weights = if i % 2 == 0 { WeightRange::default() } else { WeightRange { lo: spfar::Length(SCALE / 10), hi: spfar::Length(3 * SCALE), decimals: 1 } };
        let spec = GenSpec { seed: i, class: NetClass::BeadChain, s: 4 + (i as usize * 7) % 56, p: 2 + (i as usize % 11), weights };
        let g = generate_full(&spec).map_err(|e| e.to_string())?;
        let Shape::BeadChain { cycle, arcs } = &g.shape else { unreachable!() };
        let bc = build_bead_chain(&g.net, cycle, arcs).map_err(|e| format!("bead-chain #{i}: {e}"))?;
        let ch = &bc.chain;
        let len = ch.cycle_len();
        let overlong = ch.arcs.iter().chain(&ch.overlong).filter(|a| a.w_beta + a.w_beta > len).count();
        ensure(overlong <= 1, || format!("bead-chain #{i}: {overlong} overlong arcs"))?;
        ensure(ch.overlong.is_some() == (overlong == 1), || format!("bead-chain #{i}: overlong arc not separated"))?;
        with_overlong += overlong;
        let s = ch.shapes.len();
        if let (Some(env), Some(lv)) = (&ch.envelope, ch.levels()) {
            let bp = env.full.shape().len().max(lv.u1.shape().len());
            ensure(bp <= 4 * s + 2, || format!("bead-chain #{i}: {bp} breakpoints for {s} arcs"))?;
            worst_bp = worst_bp.max(bp as f64 / (4 * s + 2) as f64);
        }
        ensure(plateaus_ordered(&ch.shapes), || format!("bead-chain #{i}: plateaus overlap or are out of order"))?;
    }
    Ok(format!("{instances} pp/abacus stretch checks; 1000 bead-chains, {with_overlong} with one overlong arc, none with two; breakpoints at most {:.0}% of 4s+2; plateaus ordered", worst_bp * 100.0))
}

fn criterion_4() -> Outcome {
    let mut total_bp = 0;
    for seed in 0..500u64 {
        let s = 2 + (seed as usize % 19);
        let shapes = spfar::testkit::gen::arc_family(seed, s);
        let two = envelope_two_pass(&shapes).map_err(|e| format!("family {seed}: {e}"))?;
        let fs: Vec<PLFunction> = shapes.iter().map(|s| s.to_function()).collect();
        let (u1, _) = envelope_and_second_level(&fs).map_err(|e| format!("family {seed}: {e}"))?;
        ensure(two.full.shape() == u1.shape(), || format!("family {seed}: envelopes differ"))?;
        let e = &two.full;
        for k in 0..e.segments() {
            let mid = half(e.xs[k] + e.xs[k + 1]);
            let owners = u1.owners_at(mid);
            ensure(e.seg_owners[k].iter().all(|o| owners.contains(o)), || format!("family {seed}: owner not in U1 at {mid:?}"))?;
        }
        ensure(e.shape().len() <= 4 * s + 2, || format!("family {seed}: too many breakpoints"))?;
        total_bp += e.shape().len();
    }
    Ok(format!("500 families identical ({total_bp} breakpoints compared)"))
}

fn criterion_5(probes: &mut Probes) -> Outcome {
    // larger instances on top of the sweep of criterion 1
    for class in NetClass::ALL {
        for i in 0..10 {
            let g = generate_full(&GenSpec { seed: i, class, s: 3000, p: 20 + 40 * i as usize, weights: WeightRange::default() }).map_err(|e| e.to_string())?;
            let engine = class_engine(&g).map_err(|e| e.to_string())?;
            let general = SpStructure::build(&g.net).map_err(|e| e.to_string())?;
            for q in sample_points(&g.net, g.net.vertex_count() + 100, i).into_iter().rev().take(100) {
                for e in [engine.as_ref(), &general as &dyn CountedQuery] {
                    let mut count = 0;
                    let r = e.farthest_points_counted(&q, &mut count);
                    probes.record(g.net.vertex_count(), count, r.k());
                }
            }
        }
    }
    ensure(probes.worst <= C, || format!("probes exceed k + {C} log2 n: worst constant {:.2}", probes.worst))?;

    for i in 0..300u64 {
        let g = generate_full(&GenSpec { seed: i, class: NetClass::SeriesParallel, s: (i as usize * 13) % 200, p: (i as usize * 7) % 90, weights: WeightRange::default() }).map_err(|e| e.to_string())?;
        let st = SpStructure::build(&g.net).map_err(|e| e.to_string())?;
        ensure(st.reduction_steps() == g.series + g.parallel, || format!("instance {i}: {} steps for s + p = {}", st.reduction_steps(), g.series + g.parallel))?;
    }

    let g = generate_full(&GenSpec { seed: 5, class: NetClass::SeriesParallel, s: 100_000 - 2, p: 1000, weights: WeightRange::default() }).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let st = SpStructure::build(&g.net).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    ensure(g.net.vertex_count() == 100_000, || format!("built {} vertices", g.net.vertex_count()))?;
    ensure(secs < 5.0, || format!("build took {secs:.2} s"))?;
    ensure(st.reduction_steps() == g.series + g.parallel, || "large instance step count".into())?;
    Ok(format!(
        "c = {C}: worst (probes - k)/log2 n {:.2} over {} queries; 300 reductions take s + p steps; n = 1e5, p = 1e3 built in {secs:.2} s",
        probes.worst, probes.queries
    ))
}

fn criterion_6() -> Outcome {
    let parse = |t: &str| Network::parse(t);
    let k4 = parse("4 6\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n").map_err(|e| e.to_string())?;
    // bridge s-a, s-b, a-b, a-t, b-t with the chord s-t routed through vertex 4
    let bridge = parse("5 7\n0 1 1\n0 2 2\n1 2 1\n1 3 2\n2 3 1\n0 4 3\n4 3 3\n").map_err(|e| e.to_string())?;
    for (name, net) in [("K4", &k4), ("Wheatstone bridge with chord", &bridge)] {
        ensure(matches!(SpStructure::build(net), Err(Error::NotSeriesParallel)), || format!("{name} accepted"))?;
        ensure(matches!(spfar::sp::nest::decompose(net), Err(Error::NotSeriesParallel)), || format!("{name} decomposed"))?;
    }
    let cases = [
        ("loop", "2 2\n0 1 1\n1 1 1\n"),
        ("multi-edge", "2 2\n0 1 1\n1 0 2\n"),
        ("disconnected", "4 2\n0 1 1\n2 3 1\n"),
    ];
    for (name, text) in cases {
        let r = parse(text);
        let ok = match name {
            "disconnected" => r == Err(Error::NotConnected),
            _ => matches!(r, Err(Error::NotSimple(_))),
        };
        ensure(ok, || format!("{name}: {r:?}"))?;
    }
    Ok("K4 and bridge-with-chord raise NotSeriesParallel; loop, multi-edge, disconnected rejected".into())
}

fn main() -> ExitCode {
    let mut probes = Probes::default();
    let results = [
        ("1 oracle equivalence per class", criterion_1(&mut probes)),
        ("2 worked fixtures", criterion_2()),
        ("3 structural properties", criterion_3()),
        ("4 two-pass envelope equals U1", criterion_4()),
        ("5 complexity evidence", criterion_5(&mut probes)),
        ("6 rejection", criterion_6()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
