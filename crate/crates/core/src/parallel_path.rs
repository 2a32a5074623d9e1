//! Farthest-point queries on networks made of internally disjoint paths
//! between two terminals.

use crate::error::{Error, Result};
use crate::exact::{half, Q};
use crate::network::{FarthestResult, MaxCollector, Network, PointOnEdge, VertexId};
use crate::plf::cascade::Cascade;
use crate::testkit::check::FarthestQuery;
use crate::walk::{trace, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryCase {
    /// Every shortest path to `v` passes through `u`.
    Left,
    Middle,
    /// Every shortest path to `u` passes through `v`.
    Right,
}

/// Predecessor search over the stretches between `bar v_j` and `bar u_j` of
/// a group of equally long paths, keyed by distance back from `bar u_j`.
#[derive(Debug, Clone)]
struct Stretches {
    paths: Vec<usize>,
    /// Walk index of each key, per path.
    vertex_of: Vec<Vec<usize>>,
    cascade: Cascade<Q>,
}

#[derive(Debug, Clone)]
pub struct ParallelPathStructure {
    net: Network,
    pub u: VertexId,
    pub v: VertexId,
    /// Paths from `u` to `v`, by non-decreasing length.
    pub paths: Vec<Walk>,
    pub lengths: Vec<Q>,
    /// `d(u, v)`, the length of the shortest path.
    pub d: Q,
    /// Path and edge index of every edge.
    edge_loc: Vec<(usize, usize)>,
    bar_u_pt: Vec<PointOnEdge>,
    bar_v_pt: Vec<PointOnEdge>,
    /// Edge holding the positions just below `bar u_j`.
    bar_u_edge: Vec<usize>,
    /// Paths of maximum length, and paths of the next smaller length.
    top: Vec<usize>,
    second: Vec<usize>,
    top_stretch: Stretches,
    second_stretch: Stretches,
}

fn stretches(paths: &[Walk], lengths: &[Q], d: Q, group: &[usize]) -> Stretches {
    let mut lists = Vec::with_capacity(group.len());
    let mut vertex_of = Vec::with_capacity(group.len());
    for &j in group {
        let (w, bu) = (&paths[j], half(lengths[j] + d));
        let bv = half(lengths[j] - d);
        let idx: Vec<usize> = (0..w.vertices.len()).rev().filter(|&m| bv <= w.prefix[m] && w.prefix[m] <= bu).collect();
        lists.push(idx.iter().map(|&m| bu - w.prefix[m]).collect());
        vertex_of.push(idx);
    }
    Stretches { paths: group.to_vec(), vertex_of, cascade: Cascade::build(&lists).expect("keys are sorted") }
}

impl ParallelPathStructure {
    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn path_count(&self) -> usize {
        self.paths.len()
    }

    /// Positions of `bar u_i` and `bar v_i` along path `i`, measured from `u`.
    pub fn bar_positions(&self, i: usize) -> (Q, Q) {
        (half(self.lengths[i] + self.d), half(self.lengths[i] - self.d))
    }

    /// Path index and position from `u` of a point.
    pub fn locate(&self, q: &PointOnEdge) -> (usize, Q) {
        let (i, k) = self.edge_loc[q.edge];
        (i, self.paths[i].position(&self.net, k, q))
    }

    pub fn classify_query(&self, q: &PointOnEdge) -> QueryCase {
        let (i, t) = self.locate(q);
        let (bu, bv) = self.bar_positions(i);
        if t < bv {
            QueryCase::Left
        } else if t > bu {
            QueryCase::Right
        } else {
            QueryCase::Middle
        }
    }

    /// The paths other than `i` that are longest, and their length.
    fn others(&self, i: usize) -> (&[usize], &Stretches, Q) {
        if self.top.len() >= 2 || self.top[0] != i {
            (&self.top, &self.top_stretch, self.lengths[self.top[0]])
        } else {
            (&self.second, &self.second_stretch, self.lengths[self.second[0]])
        }
    }

    pub fn farthest_distance_pp(&self, q: &PointOnEdge) -> Q {
        let (i, t) = self.locate(q);
        let wi = self.lengths[i];
        if self.paths.len() == 1 {
            return t.max(wi - t);
        }
        let (_, _, wo) = self.others(i);
        let own = half(self.d + wi);
        match self.classify_query(q) {
            QueryCase::Left => own.max(t + half(self.d + wo)),
            QueryCase::Right => own.max(wi - t + half(self.d + wo)),
            QueryCase::Middle => half(wi + wo),
        }
    }

    pub fn farthest_points_pp(&self, q: &PointOnEdge) -> FarthestResult {
        self.farthest_points_counted(q, &mut 0)
    }

    /// As [`farthest_points_pp`](Self::farthest_points_pp), counting search
    /// steps into `probes`.
    pub fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        let net = &self.net;
        let (i, t) = self.locate(q);
        let wi = self.lengths[i];
        let mut out = MaxCollector::new();
        if self.paths.len() == 1 {
            out.offer(t, PointOnEdge::vertex(net, self.u));
            out.offer(wi - t, PointOnEdge::vertex(net, self.v));
            return out.finish();
        }
        let (group, stretch, wo) = self.others(i);
        let own = half(self.d + wi);
        let (bu, bv) = self.bar_positions(i);
        match self.classify_query(q) {
            QueryCase::Left | QueryCase::Right => {
                let left = t < bv;
                let s = if left { t } else { wi - t };
                let other = s + half(self.d + wo);
                if own >= other {
                    let pos = if left { bu + t } else { bv - s };
                    out.offer(own, self.paths[i].point_at(net, pos, probes));
                }
                if other >= own {
                    for &j in group.iter().filter(|&&j| j != i) {
                        *probes += 1;
                        let pt = if left { &self.bar_u_pt[j] } else { &self.bar_v_pt[j] };
                        out.offer(other, pt.clone());
                    }
                }
            }
            QueryCase::Middle => {
                let best = half(wi + wo);
                let key = t - bv;
                let found = stretch.cascade.query(key, probes);
                for (slot, &j) in stretch.paths.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let w = &self.paths[j];
                    let x = self.bar_positions(j).0 - key;
                    let pt = match found[slot] {
                        Some(r) => {
                            let m = stretch.vertex_of[slot][r];
                            if w.prefix[m] == x {
                                PointOnEdge::vertex(net, w.vertices[m])
                            } else {
                                w.point_on(net, m - 1, x)
                            }
                        }
                        None => w.point_on(net, self.bar_u_edge[j], x),
                    };
                    out.offer(best, pt);
                }
            }
        }
        out.finish()
    }
}

/// Builds the structure for the parallel-path network `net` with terminals
/// `u` and `v`.
pub fn build_parallel_path(net: &Network, u: VertexId, v: VertexId) -> Result<ParallelPathStructure> {
    let bad = |m: String| Err(Error::NotParallelPath(m));
    let n = net.vertex_count();
    if u == v || u >= n || v >= n {
        return bad("terminals must be two distinct vertices".into());
    }
    if net.degree(u) != net.degree(v) {
        return bad("terminals have different degrees".into());
    }
    let mut paths = Vec::with_capacity(net.degree(u));
    for &(_, e) in net.neighbors(u) {
        match trace(net, u, e, |x| x == v) {
            Some(w) => paths.push(w),
            None => return bad(format!("edge {e} does not lead to the other terminal through degree-two vertices")),
        }
    }
    let covered: usize = paths.iter().map(|w| w.edges.len()).sum();
    if covered != net.edge_count() {
        return bad("some edges lie on no terminal path".into());
    }
    paths.sort_by(|a, b| a.len().cmp(&b.len()));
    let lengths: Vec<Q> = paths.iter().map(Walk::len).collect();
    let d = lengths[0];
    let mut edge_loc = vec![(0, 0); net.edge_count()];
    for (i, w) in paths.iter().enumerate() {
        for (k, &e) in w.edges.iter().enumerate() {
            edge_loc[e] = (i, k);
        }
    }
    let mut probes = 0;
    let bar_u_pt = paths.iter().enumerate().map(|(i, w)| w.point_at(net, half(lengths[i] + d), &mut probes)).collect();
    let bar_v_pt = paths.iter().enumerate().map(|(i, w)| w.point_at(net, half(lengths[i] - d), &mut probes)).collect();
    let bar_u_edge = paths
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let bu = half(lengths[i] + d);
            let k = w.locate(bu, &mut probes);
            if k > 0 && w.prefix[k] == bu {
                k - 1
            } else {
                k
            }
        })
        .collect();
    let p = paths.len();
    let top: Vec<usize> = (0..p).filter(|&j| lengths[j] == lengths[p - 1]).collect();
    let second: Vec<usize> = match (0..p).rev().find(|&j| lengths[j] < lengths[p - 1]) {
        Some(s) => (0..p).filter(|&j| lengths[j] == lengths[s]).collect(),
        None => Vec::new(),
    };
    let top_stretch = stretches(&paths, &lengths, d, &top);
    let second_stretch = stretches(&paths, &lengths, d, &second);
    Ok(ParallelPathStructure {
        net: net.clone(),
        u,
        v,
        paths,
        lengths,
        d,
        edge_loc,
        bar_u_pt,
        bar_v_pt,
        bar_u_edge,
        top,
        second,
        top_stretch,
        second_stretch,
    })
}

/// The two vertices of degree other than two, or the lowest vertex and its
/// first neighbour when the network is a plain cycle.
pub fn find_terminals(net: &Network) -> Option<(VertexId, VertexId)> {
    let odd: Vec<VertexId> = (0..net.vertex_count()).filter(|&x| net.degree(x) != 2).collect();
    match odd.len() {
        2 => Some((odd[0], odd[1])),
        0 if net.vertex_count() > 0 => Some((0, net.neighbors(0)[0].0)),
        _ => None,
    }
}

impl FarthestQuery for ParallelPathStructure {
    fn network(&self) -> &Network {
        &self.net
    }

    fn farthest_points(&self, q: &PointOnEdge) -> FarthestResult {
        self.farthest_points_pp(q)
    }
}
