//! Brute-force network distances and farthest points.
//!
//! The query point is treated as a temporary vertex: its two edge endpoints get
//! initial labels and a label-setting search runs from there. Every edge is then
//! scanned for its peak. This is the reference every fast structure is checked
//! against.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Zero;

use crate::exact::{half, q_max, q_min, Q};
use crate::network::{EdgeId, MaxCollector, Network, FarthestResult, PointOnEdge, VertexId};

/// Distances from a point to every vertex.
pub fn distances_from(net: &Network, p: &PointOnEdge) -> Vec<Q> {
    let e = net.edge(p.edge);
    let off = p.offset(net);
    let mut init = vec![(e.u, off), (e.v, e.w.to_q() - off)];
    if let Some(v) = p.as_vertex(net) {
        init = vec![(v, Q::zero())];
    }
    multi_source(net, &init)
}

/// Label-setting search from several weighted sources.
pub fn multi_source(net: &Network, sources: &[(VertexId, Q)]) -> Vec<Q> {
    let n = net.vertex_count();
    let mut dist: Vec<Option<Q>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for (v, d) in sources {
        if dist[*v].as_ref().map_or(true, |c| d < c) {
            dist[*v] = Some(*d);
            heap.push(Reverse((*d, *v)));
        }
    }
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, eid) in net.neighbors(x) {
            let nd = d + net.edge(eid).w.to_q();
            if dist[y].as_ref().map_or(true, |c| nd < *c) {
                dist[y] = Some(nd);
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist.into_iter().map(|d| d.expect("network is connected")).collect()
}

/// Exact network distance between two points.
pub fn network_distance(net: &Network, p: &PointOnEdge, q: &PointOnEdge) -> Q {
    let dist = distances_from(net, p);
    let e = net.edge(q.edge);
    let oq = q.offset(net);
    let mut best = q_min(dist[e.u] + oq, dist[e.v] + e.w.to_q() - oq);
    if p.edge == q.edge {
        let d = p.offset(net) - oq;
        best = q_min(best, if d < Q::zero() { -d } else { d });
    }
    best
}

/// Per-edge farthest candidate for an edge not carrying the query point:
/// the offset from `u` and the distance there.
pub fn edge_peak(du: Q, dv: Q, w: Q) -> (Q, Q) {
    let x = half(dv + w - du);
    if x < Q::zero() {
        (Q::zero(), du)
    } else if x > w {
        (w, dv)
    } else {
        (x, half(du + dv + w))
    }
}

/// Brute-force farthest distance and farthest-point set from `p`.
pub fn oracle_farthest(net: &Network, p: &PointOnEdge) -> FarthestResult {
    let dist = distances_from(net, p);
    let mut acc = MaxCollector::new();
    for (eid, e) in net.edges().iter().enumerate() {
        let w = e.w.to_q();
        if eid == p.edge && p.as_vertex(net).is_none() {
            own_edge_candidates(net, eid, p.offset(net), dist[e.u], dist[e.v], &mut acc);
            continue;
        }
        let (x, d) = edge_peak(dist[e.u], dist[e.v], w);
        acc.offer(d, PointOnEdge::at_offset(net, eid, e.u, x));
    }
    acc.finish()
}

fn own_edge_candidates(net: &Network, eid: EdgeId, o: Q, du: Q, dv: Q, acc: &mut MaxCollector) {
    let e = net.edge(eid);
    let w = e.w.to_q();
    let f = |r: Q| {
        let direct = if r < o { o - r } else { r - o };
        q_min(direct, q_min(du + r, dv + w - r))
    };
    // Lines in r: o - r, r - o, du + r, dv + w - r. Breakpoints of the lower
    // envelope are pairwise intersections of an increasing and a decreasing line.
    let mut cands = vec![Q::zero(), w, o];
    for inc in [-o, du] {
        for (dec_c, _) in [(o, ()), (dv + w, ())] {
            // inc + r = dec_c - r
            cands.push(half(dec_c - inc));
        }
    }
    let mut best: Option<Q> = None;
    let mut vals = Vec::new();
    for r in cands {
        if r < Q::zero() || r > w {
            continue;
        }
        let v = f(r);
        best = Some(best.map_or(v, |b| q_max(b, v)));
        vals.push((r, v));
    }
    let best = best.expect("candidate set contains the endpoints");
    for (r, v) in vals {
        if v == best {
            acc.offer(v, PointOnEdge::at_offset(net, eid, e.u, r));
        }
    }
}
