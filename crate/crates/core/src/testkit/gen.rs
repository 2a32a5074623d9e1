//! Seeded generators for the four network classes.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{Length, Q, SCALE};
use crate::network::{Network, VertexId};
use crate::plf::arcshape::ArcDistanceShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetClass {
    ParallelPath,
    BeadChain,
    Abacus,
    SeriesParallel,
}

impl NetClass {
    pub const ALL: [NetClass; 4] = [NetClass::ParallelPath, NetClass::BeadChain, NetClass::Abacus, NetClass::SeriesParallel];

    pub fn name(self) -> &'static str {
        match self {
            NetClass::ParallelPath => "pp",
            NetClass::BeadChain => "beadchain",
            NetClass::Abacus => "abacus",
            NetClass::SeriesParallel => "sp",
        }
    }
}

impl std::str::FromStr for NetClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<NetClass> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "pp" | "parallelpath" => Ok(NetClass::ParallelPath),
            "bc" | "beadchain" => Ok(NetClass::BeadChain),
            "ab" | "abacus" => Ok(NetClass::Abacus),
            "sp" | "seriesparallel" => Ok(NetClass::SeriesParallel),
            _ => Err(Error::Parse(format!("unknown network class `{s}`"))),
        }
    }
}

/// Inclusive weight range; weights are multiples of `10^-decimals`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightRange {
    pub lo: Length,
    pub hi: Length,
    pub decimals: u32,
}

impl Default for WeightRange {
    fn default() -> Self {
        WeightRange { lo: Length(SCALE), hi: Length(9 * SCALE), decimals: 0 }
    }
}

/// Generator input. `s` counts series operations, i.e. vertices beyond the
/// two terminals. `p` counts parallel operations for series-parallel and
/// bead-chain networks (a bead-chain with `p` has `p - 1` arcs) and u-v paths
/// for parallel-path networks and abaci.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    pub class: NetClass,
    pub s: usize,
    pub p: usize,
    pub weights: WeightRange,
}

/// Largest vertex count the generators accept.
pub const MAX_GENERATED_VERTICES: usize = 5_000_000;

/// How a generated network decomposes into its class shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// Vertex sequences from `u` to `v`.
    ParallelPath { u: VertexId, v: VertexId, paths: Vec<Vec<VertexId>> },
    /// The main cycle as a closed vertex sequence (first vertex not repeated)
    /// and each arc as a vertex sequence between two cycle vertices.
    BeadChain { cycle: Vec<VertexId>, arcs: Vec<Vec<VertexId>> },
    /// Paths from `u` to `v`; arcs as (path index, vertex sequence).
    Abacus { u: VertexId, v: VertexId, paths: Vec<Vec<VertexId>>, arcs: Vec<(usize, Vec<VertexId>)> },
    SeriesParallel,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub net: Network,
    pub shape: Shape,
    /// Series and parallel operations actually used (generators add series
    /// operations when the requested budget cannot keep the graph simple).
    pub series: usize,
    pub parallel: usize,
}

pub fn generate(spec: &GenSpec) -> Result<Network> {
    Ok(generate_full(spec)?.net)
}

struct Builder {
    rng: ChaCha8Rng,
    weights: WeightRange,
    n: usize,
    edges: Vec<(VertexId, VertexId, Length)>,
}

impl Builder {
    fn vertex(&mut self) -> VertexId {
        self.n += 1;
        self.n - 1
    }

    fn weight(&mut self) -> Length {
        let step = SCALE / 10i64.pow(self.weights.decimals.min(6));
        let lo = (self.weights.lo.0 + step - 1) / step;
        let hi = (self.weights.hi.0 / step).max(lo.max(1));
        Length(self.rng.gen_range(lo.max(1)..=hi) * step)
    }

    fn path_weights(&mut self, len: usize) -> Vec<Length> {
        (0..len).map(|_| self.weight()).collect()
    }

    fn add_path(&mut self, seq: &[VertexId], ws: &[Length]) {
        for (k, w) in ws.iter().enumerate() {
            self.edges.push((seq[k], seq[k + 1], *w));
        }
    }

    /// Arc weights summing to at least `min_total`, resampled a few times
    /// before falling back to the range maximum.
    fn arc_weights(&mut self, len: usize, min_total: Length) -> Vec<Length> {
        for _ in 0..64 {
            let ws = self.path_weights(len);
            if ws.iter().map(|w| w.0).sum::<i64>() >= min_total.0 {
                return ws;
            }
        }
        let each = Length((min_total.0 + len as i64 - 1) / len as i64).0.max(self.weights.hi.0);
        let step = SCALE / 10i64.pow(self.weights.decimals.min(6));
        vec![Length((each + step - 1) / step * step); len]
    }

    /// Relabels vertices and shuffles edge order and orientation.
    fn finish(mut self, shape: Shape, series: usize, parallel: usize) -> Result<Generated> {
        let mut perm: Vec<VertexId> = (0..self.n).collect();
        perm.shuffle(&mut self.rng);
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b, w)| if self.rng.gen_bool(0.5) { (perm[a], perm[b], w) } else { (perm[b], perm[a], w) })
            .collect();
        edges.shuffle(&mut self.rng);
        let map = |s: &Vec<VertexId>| s.iter().map(|&x| perm[x]).collect::<Vec<_>>();
        let shape = match shape {
            Shape::ParallelPath { u, v, paths } => Shape::ParallelPath { u: perm[u], v: perm[v], paths: paths.iter().map(map).collect() },
            Shape::BeadChain { cycle, arcs } => Shape::BeadChain { cycle: map(&cycle), arcs: arcs.iter().map(map).collect() },
            Shape::Abacus { u, v, paths, arcs } => Shape::Abacus {
                u: perm[u],
                v: perm[v],
                paths: paths.iter().map(map).collect(),
                arcs: arcs.iter().map(|(i, a)| (*i, map(a))).collect(),
            },
            Shape::SeriesParallel => Shape::SeriesParallel,
        };
        let net = Network::new(self.n, edges)?;
        Ok(Generated { net, shape, series, parallel })
    }
}

/// Splits `total` into `parts` non-negative random summands.
fn composition(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![0; parts];
    if parts == 0 {
        return out;
    }
    for _ in 0..total {
        out[rng.gen_range(0..parts)] += 1;
    }
    out
}

pub fn generate_full(spec: &GenSpec) -> Result<Generated> {
    if spec.s + spec.p + 2 > MAX_GENERATED_VERTICES {
        return Err(Error::BudgetExceeded(format!("s + p = {} exceeds the generator budget", spec.s + spec.p)));
    }
    if spec.weights.lo.0 <= 0 || spec.weights.hi.0 < spec.weights.lo.0 {
        return Err(Error::BudgetExceeded("empty or non-positive weight range".into()));
    }
    let mut b = Builder { rng: ChaCha8Rng::seed_from_u64(spec.seed), weights: spec.weights, n: 0, edges: Vec::new() };
    if spec.s == 0 && spec.p == 0 {
        let (u, v) = (b.vertex(), b.vertex());
        let w = b.weight();
        b.edges.push((u, v, w));
        return b.finish(Shape::ParallelPath { u, v, paths: vec![vec![u, v]] }, 0, 0);
    }
    match spec.class {
        NetClass::ParallelPath => gen_parallel_path(b, spec.s, spec.p.max(1)),
        NetClass::SeriesParallel => gen_series_parallel(b, spec.s, spec.p),
        NetClass::BeadChain => gen_bead_chain(b, spec.s, spec.p.max(1)),
        NetClass::Abacus => gen_abacus(b, spec.s, spec.p.max(1)),
    }
}

/// Internal vertex counts for `p` u-v paths, at most one of them empty.
fn path_counts(rng: &mut ChaCha8Rng, s: usize, p: usize) -> Vec<usize> {
    let base = p - 1;
    let mut counts: Vec<usize> = (0..p).map(|i| usize::from(i + 1 < p)).collect();
    for (c, e) in counts.iter_mut().zip(composition(rng, s.saturating_sub(base), p)) {
        *c += e;
    }
    counts.shuffle(rng);
    counts
}

/// Builds the paths and returns them with their edge weights.
fn build_paths(b: &mut Builder, u: VertexId, v: VertexId, counts: &[usize]) -> (Vec<Vec<VertexId>>, Vec<Vec<Length>>) {
    counts
        .iter()
        .map(|&c| {
            let mut seq = vec![u];
            for _ in 0..c {
                seq.push(b.vertex());
            }
            seq.push(v);
            let ws = b.path_weights(seq.len() - 1);
            b.add_path(&seq, &ws);
            (seq, ws)
        })
        .unzip()
}

fn gen_parallel_path(mut b: Builder, s: usize, p: usize) -> Result<Generated> {
    let (u, v) = (b.vertex(), b.vertex());
    let counts = path_counts(&mut b.rng, s, p);
    let (paths, _) = build_paths(&mut b, u, v, &counts);
    let series = counts.iter().sum();
    b.finish(Shape::ParallelPath { u, v, paths }, series, p - 1)
}

fn pair(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

fn gen_series_parallel(mut b: Builder, s: usize, p: usize) -> Result<Generated> {
    let (u, v) = (b.vertex(), b.vertex());
    let mut edges = vec![(u, v)];
    let mut groups: HashMap<(VertexId, VertexId), Vec<usize>> = HashMap::from([(pair(u, v), vec![0])]);
    let mut dup_keys: Vec<(VertexId, VertexId)> = Vec::new();
    let mut excess = 0usize;
    let (mut rem_s, mut rem_p) = (s, p);
    let mut series = 0;
    let short = s < p;
    loop {
        if rem_s == 0 && rem_p == 0 && excess == 0 {
            break;
        }
        // every pending parallel op and duplicate needs one series op later
        let free_series = rem_s > 0 && (short || rem_s > excess + rem_p);
        let any_series = free_series || (excess > 0 && (rem_s > 0 || rem_p == 0));
        let do_parallel = rem_p > 0 && (!any_series || b.rng.gen_range(0..rem_s + rem_p) < rem_p);
        if do_parallel {
            let e = b.rng.gen_range(0..edges.len());
            let key = pair(edges[e].0, edges[e].1);
            edges.push(edges[e]);
            let g = groups.get_mut(&key).expect("every edge is grouped");
            g.push(edges.len() - 1);
            excess += 1;
            if g.len() == 2 {
                dup_keys.push(key);
            }
            rem_p -= 1;
            continue;
        }
        // series: on a duplicated edge once the budget has no slack
        let e = if excess > 0 && !free_series {
            loop {
                let key = *dup_keys.last().expect("excess implies a duplicated pair");
                if groups[&key].len() >= 2 {
                    break groups[&key][b.rng.gen_range(0..groups[&key].len())];
                }
                dup_keys.pop();
            }
        } else {
            b.rng.gen_range(0..edges.len())
        };
        let (x, y) = edges[e];
        let g = groups.get_mut(&pair(x, y)).expect("grouped");
        g.retain(|&i| i != e);
        if !g.is_empty() {
            excess -= 1;
        }
        let z = b.vertex();
        edges[e] = (x, z);
        edges.push((z, y));
        groups.insert(pair(x, z), vec![e]);
        groups.insert(pair(z, y), vec![edges.len() - 1]);
        series += 1;
        rem_s = rem_s.saturating_sub(1);
    }
    for (x, y) in edges {
        let w = b.weight();
        b.edges.push((x, y, w));
    }
    b.finish(Shape::SeriesParallel, series, p)
}

fn gen_bead_chain(mut b: Builder, s: usize, p: usize) -> Result<Generated> {
    let arcs_n = p - 1;
    let c_min = 3.max(arcs_n);
    let total = (s + 2).max(c_min + arcs_n);
    let parts = composition(&mut b.rng, total - c_min - arcs_n, arcs_n + 1);
    let c = c_min + parts[0];
    let cycle: Vec<VertexId> = (0..c).map(|_| b.vertex()).collect();
    let cw = b.path_weights(c);
    for k in 0..c {
        b.edges.push((cycle[k], cycle[(k + 1) % c], cw[k]));
    }
    // alternate gaps and spans around the cycle
    let mut arcs = Vec::new();
    if arcs_n > 0 {
        let mut layout = composition(&mut b.rng, c - arcs_n, 2 * arcs_n);
        if arcs_n == 1 && layout[0] == 0 {
            // a lone arc must not span the whole cycle
            layout[1] -= 1;
            layout[0] += 1;
        }
        let mut cursor = b.rng.gen_range(0..c);
        for i in 0..arcs_n {
            cursor += layout[2 * i];
            let span = layout[2 * i + 1] + 1;
            let start = cursor;
            cursor += span;
            let w_beta = Length((start..cursor).map(|k| cw[k % c].0).sum());
            let mut seq = vec![cycle[start % c]];
            for _ in 0..parts[i + 1] + 1 {
                seq.push(b.vertex());
            }
            seq.push(cycle[cursor % c]);
            let ws = b.arc_weights(seq.len() - 1, w_beta);
            b.add_path(&seq, &ws);
            arcs.push(seq);
        }
    }
    let series = b.n - 2;
    b.finish(Shape::BeadChain { cycle, arcs }, series, p)
}

fn gen_abacus(mut b: Builder, s: usize, p: usize) -> Result<Generated> {
    let (u, v) = (b.vertex(), b.vertex());
    let mut arc_target = if s >= 3 { b.rng.gen_range(0..=s / 3) } else { 0 };
    let mut arc_budget = arc_target + b.rng.gen_range(0..=arc_target);
    if s < arc_budget + p - 1 {
        arc_target = 0;
        arc_budget = 0;
    }
    let counts = path_counts(&mut b.rng, s - arc_budget, p);
    let (paths, path_ws) = build_paths(&mut b, u, v, &counts);
    // arcs per path, each path of L edges holding at most L arcs and a lone
    // arc never spanning the whole path
    let cap: Vec<usize> = counts.iter().map(|&c| if c >= 1 { c + 1 } else { 0 }).collect();
    let mut per_path = vec![0usize; p];
    let mut placed = 0;
    for _ in 0..arc_target {
        let open: Vec<usize> = (0..p).filter(|&i| per_path[i] < cap[i]).collect();
        let Some(&i) = open.choose(&mut b.rng) else { break };
        per_path[i] += 1;
        placed += 1;
    }
    let extras = if placed > 0 { composition(&mut b.rng, arc_budget - arc_target, placed) } else { Vec::new() };
    let mut arcs = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let k = per_path[i];
        if k == 0 {
            continue;
        }
        let len = path.len() - 1;
        let mut layout = composition(&mut b.rng, len - k, 2 * k + 1);
        if k == 1 && layout[0] + layout[2] == 0 {
            layout[1] -= 1;
            layout[0] += 1;
        }
        let mut cursor = 0;
        for j in 0..k {
            cursor += layout[2 * j];
            let start = cursor;
            cursor += layout[2 * j + 1] + 1;
            let w_beta = Length(path_ws[i][start..cursor].iter().map(|w| w.0).sum());
            let mut seq = vec![path[start]];
            for _ in 0..extras[arcs.len()] + 1 {
                seq.push(b.vertex());
            }
            seq.push(path[cursor]);
            let ws = b.arc_weights(seq.len() - 1, w_beta);
            b.add_path(&seq, &ws);
            arcs.push((i, seq));
        }
    }
    let series = b.n - 2;
    b.finish(Shape::Abacus { u, v, paths, arcs }, series, p - 1)
}

/// Random non-overlong arc functions on one cycle, listed in cycle order.
/// Small integer lengths make ties between arcs common.
pub fn arc_family(seed: u64, s: usize) -> Vec<ArcDistanceShape> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let gaps: Vec<i64> = (0..2 * s).map(|_| rng.gen_range(1..=6)).collect();
        let len: i64 = gaps.iter().sum();
        if gaps.iter().step_by(2).any(|&b| 2 * b > len) {
            continue;
        }
        let shift = rng.gen_range(0..len);
        let mut arcs: Vec<(i64, i64)> = Vec::with_capacity(s);
        let mut pos = 0;
        for k in 0..s {
            arcs.push(((pos + shift) % len, gaps[2 * k]));
            pos += gaps[2 * k] + gaps[2 * k + 1];
        }
        let first = arcs.iter().enumerate().min_by_key(|(_, a)| a.0).map(|(i, _)| i).unwrap_or(0);
        arcs.rotate_left(first);
        return arcs
            .into_iter()
            .enumerate()
            .map(|(i, (a, beta))| {
                let alpha = beta + rng.gen_range(0..=6);
                ArcDistanceShape::new(Q::from_integer(len as i128), Q::from_integer(a as i128), Q::from_integer(beta as i128), Q::from_integer(alpha as i128), i)
            })
            .collect();
    }
}
