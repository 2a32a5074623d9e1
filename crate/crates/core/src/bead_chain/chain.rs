//! The query engine for a cycle with attached arcs, on cycle positions.
//!
//! One stretch of the cycle may be virtual: it carries distance but no
//! reportable points. The abacus closes each of its chains with such a
//! stretch.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{half, q_min, Q};
use crate::network::{EdgeId, FarthestResult, MaxCollector, Network, PointOnEdge, VertexId};
use crate::plf::arcshape::{cycle_dist, envelope_two_pass, wrap, ArcDistanceShape, TwoPassEnvelope};
use crate::plf::envelope::{Levels, PLFunction};
use crate::walk::Walk;

/// An arc from the cycle vertex at position `a` to the one at `a + w_beta`.
#[derive(Debug, Clone)]
pub struct ChainArc {
    pub a: Q,
    pub w_beta: Q,
    pub walk: Walk,
}

impl ChainArc {
    pub fn w_alpha(&self) -> Q {
        self.walk.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loc {
    Cycle(usize),
    Arc(usize, usize),
    Overlong(usize),
}

#[derive(Debug, Clone)]
pub struct BeadChain {
    /// Closed vertex sequence; `cycle_vertices[m] == cycle_vertices[0]`.
    cycle_vertices: Vec<VertexId>,
    /// `None` marks the virtual stretch.
    cycle_edges: Vec<Option<EdgeId>>,
    prefix: Vec<Q>,
    virt: Option<(Q, Q)>,
    /// Non-overlong arcs in cycle order.
    pub arcs: Vec<ChainArc>,
    pub overlong: Option<ChainArc>,
    pub shapes: Vec<ArcDistanceShape>,
    levels: Option<Levels>,
    pub envelope: Option<TwoPassEnvelope>,
    loc: HashMap<EdgeId, Loc>,
}

/// The unique arc whose cycle side is longer than the rest of the cycle.
pub fn detect_overlong(shapes: &[ArcDistanceShape]) -> Result<Option<usize>> {
    let mut found = None;
    for (i, s) in shapes.iter().enumerate() {
        if s.is_overlong() {
            if found.is_some() {
                return Err(Error::TwoOverlongArcs);
            }
            found = Some(i);
        }
    }
    Ok(found)
}

/// Farthest positions from `x` on a cycle of length `len` whose stretch
/// `virt` (in the same coordinates, possibly past `len`) cannot be reported.
fn clamped_antipode(len: Q, x: Q, virt: Option<(Q, Q)>) -> Vec<(Q, Q)> {
    let y = wrap(len, x + half(len));
    if let Some((s0, s1)) = virt {
        let inside = {
            let off = wrap(len, y - s0);
            off > Q::zero() && off < s1 - s0
        };
        if inside {
            return vec![(cycle_dist(len, x, s0), wrap(len, s0)), (cycle_dist(len, x, s1), wrap(len, s1))];
        }
    }
    vec![(half(len), y)]
}

impl BeadChain {
    /// `arcs` hold `(start index, end index, walk)` with indices into the
    /// cycle's vertex sequence; each arc spans forward from start to end.
    pub fn new(net: &Network, cycle_vertices: Vec<VertexId>, cycle_edges: Vec<Option<EdgeId>>, virtual_len: Q, arcs: Vec<(usize, usize, Walk)>) -> Result<BeadChain> {
        let bad = |m: &str| Err(Error::InvalidBeadChain(m.to_string()));
        let m = cycle_edges.len();
        if cycle_vertices.len() != m + 1 || m < 2 {
            return bad("cycle needs at least two edges");
        }
        let mut prefix = vec![Q::zero()];
        let mut virt = None;
        let mut loc = HashMap::new();
        for (k, e) in cycle_edges.iter().enumerate() {
            let w = match e {
                Some(e) => {
                    loc.insert(*e, Loc::Cycle(k));
                    net.edge(*e).w.to_q()
                }
                None => {
                    if virt.is_some() {
                        return bad("more than one virtual stretch");
                    }
                    virt = Some((prefix[k], prefix[k] + virtual_len));
                    virtual_len
                }
            };
            prefix.push(prefix[k] + w);
        }
        let len = prefix[m];
        let mut shaped: Vec<(ChainArc, ArcDistanceShape)> = Vec::with_capacity(arcs.len());
        for (i, j, walk) in arcs {
            if i >= j || j > m {
                return bad("arc endpoints out of order");
            }
            if let Some((s0, s1)) = virt {
                if prefix[i] < s1 && s0 < prefix[j] {
                    return bad("an arc spans the virtual stretch");
                }
            }
            let arc = ChainArc { a: prefix[i], w_beta: prefix[j] - prefix[i], walk };
            if arc.w_alpha() < arc.w_beta {
                return bad("an arc is shorter than the cycle stretch it spans");
            }
            let shape = ArcDistanceShape::new(len, arc.a, arc.w_beta, arc.w_alpha(), 0);
            shaped.push((arc, shape));
        }
        shaped.sort_by(|x, y| x.0.a.cmp(&y.0.a));
        let all: Vec<ArcDistanceShape> = shaped.iter().map(|s| s.1).collect();
        let ov = detect_overlong(&all)?;
        let mut chain_arcs = Vec::with_capacity(shaped.len());
        let mut shapes = Vec::with_capacity(shaped.len());
        let mut overlong = None;
        for (idx, (arc, mut shape)) in shaped.into_iter().enumerate() {
            if Some(idx) == ov {
                for (k, &e) in arc.walk.edges.iter().enumerate() {
                    loc.insert(e, Loc::Overlong(k));
                }
                overlong = Some(arc);
            } else {
                let i = chain_arcs.len();
                for (k, &e) in arc.walk.edges.iter().enumerate() {
                    loc.insert(e, Loc::Arc(i, k));
                }
                shape.owner = i;
                shapes.push(shape);
                chain_arcs.push(arc);
            }
        }
        let (levels, envelope) = if shapes.is_empty() {
            (None, None)
        } else {
            let fs: Vec<PLFunction> = shapes.iter().map(ArcDistanceShape::to_function).collect();
            (Some(Levels::new(&fs)?), Some(envelope_two_pass(&shapes)?))
        };
        Ok(BeadChain { cycle_vertices, cycle_edges, prefix, virt, arcs: chain_arcs, overlong, shapes, levels, envelope, loc })
    }

    pub fn cycle_len(&self) -> Q {
        self.prefix[self.prefix.len() - 1]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len() + usize::from(self.overlong.is_some())
    }

    pub fn levels(&self) -> Option<&Levels> {
        self.levels.as_ref()
    }

    /// Cycle position of vertex index `k`.
    pub fn vertex_position(&self, k: usize) -> Q {
        self.prefix[k]
    }

    pub fn cycle_vertices(&self) -> &[VertexId] {
        &self.cycle_vertices[..self.cycle_vertices.len() - 1]
    }

    /// Does this chain contain the edge?
    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.loc.contains_key(&e)
    }

    fn cycle_point(&self, net: &Network, y: Q, probes: &mut u64) -> Option<PointOnEdge> {
        let (mut lo, mut hi) = (0, self.cycle_edges.len());
        while hi - lo > 1 {
            *probes += 1;
            let mid = (lo + hi) / 2;
            if self.prefix[mid] <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if self.prefix[lo] == y {
            return Some(PointOnEdge::vertex(net, self.cycle_vertices[lo]));
        }
        let e = self.cycle_edges[lo]?;
        Some(PointOnEdge::at_offset(net, e, self.cycle_vertices[lo], y - self.prefix[lo]))
    }

    fn offer_cycle(&self, net: &Network, out: &mut MaxCollector, d: Q, y: Q, probes: &mut u64) {
        if out.best().is_some_and(|b| d < *b) {
            return;
        }
        if let Some(p) = self.cycle_point(net, y, probes) {
            out.offer(d, p);
        }
    }

    fn b_of(&self, arc: &ChainArc) -> Q {
        wrap(self.cycle_len(), arc.a + arc.w_beta)
    }

    /// Farthest distance from cycle position `x` to `arc`, and the offset of
    /// the farthest point along the arc.
    fn arc_far(&self, arc: &ChainArc, x: Q) -> (Q, Q) {
        let len = self.cycle_len();
        let da = cycle_dist(len, x, arc.a);
        let db = cycle_dist(len, x, self.b_of(arc));
        (half(da + db + arc.w_alpha()), half(db + arc.w_alpha() - da))
    }

    fn offer_arc(&self, net: &Network, out: &mut MaxCollector, arc: &ChainArc, x: Q, extra: Q, probes: &mut u64) {
        let (v, off) = self.arc_far(arc, x);
        if out.best().is_some_and(|b| v + extra < *b) {
            return;
        }
        out.offer(v + extra, arc.walk.point_at(net, off, probes));
    }

    /// Everything reachable from cycle position `x` through the cycle, at
    /// distances shifted by `extra`. `skip` excludes one non-overlong arc.
    fn offer_from_cycle(&self, net: &Network, out: &mut MaxCollector, x: Q, extra: Q, skip: Option<usize>, probes: &mut u64) {
        for (d, y) in clamped_antipode(self.cycle_len(), x, self.virt) {
            self.offer_cycle(net, out, d + extra, y, probes);
        }
        if let Some(lv) = &self.levels {
            if let Some((v, owners)) = lv.top_excluding(x, skip, probes) {
                if !out.best().is_some_and(|b| v + extra < *b) {
                    for i in owners {
                        *probes += 1;
                        self.offer_arc(net, out, &self.arcs[i], x, extra, probes);
                    }
                }
            }
        }
        if let Some(ov) = &self.overlong {
            self.offer_arc(net, out, ov, x, extra, probes);
        }
    }

    /// Farthest points of the chain from cycle position `x`.
    pub fn query_cycle(&self, net: &Network, x: Q, out: &mut MaxCollector, probes: &mut u64) {
        self.offer_from_cycle(net, out, wrap(self.cycle_len(), x), Q::zero(), None, probes);
    }

    /// As `query_cycle`, with every distance increased by `extra`.
    pub fn query_cycle_shifted(&self, net: &Network, x: Q, extra: Q, out: &mut MaxCollector, probes: &mut u64) {
        self.offer_from_cycle(net, out, wrap(self.cycle_len(), x), extra, None, probes);
    }

    /// Distance from `q`, a point of the chain, to cycle position `y`.
    pub fn distance_to(&self, net: &Network, q: &PointOnEdge, y: Q) -> Q {
        let len = self.cycle_len();
        let off = q.offset(net);
        let e = net.edge(q.edge);
        let via_arc = |arc: &ChainArc, k: usize| {
            let t = arc.walk.position(net, k, q);
            q_min(t + cycle_dist(len, arc.a, y), arc.w_alpha() - t + cycle_dist(len, self.b_of(arc), y))
        };
        match self.loc[&q.edge] {
            Loc::Cycle(k) => {
                let along = if e.u == self.cycle_vertices[k] { off } else { e.w.to_q() - off };
                cycle_dist(len, self.prefix[k] + along, y)
            }
            Loc::Arc(i, k) => via_arc(&self.arcs[i], k),
            Loc::Overlong(k) => via_arc(self.overlong.as_ref().unwrap(), k),
        }
    }

    /// Farthest distance from `x` to the non-overlong arcs, and those arcs.
    pub fn farthest_arc_query(&self, x: Q) -> Option<(Q, Vec<usize>)> {
        self.levels.as_ref()?.top_excluding(wrap(self.cycle_len(), x), None, &mut 0)
    }

    fn query_arc(&self, net: &Network, i: usize, t: Q, out: &mut MaxCollector, probes: &mut u64) {
        let arc = &self.arcs[i];
        let (wa, wb) = (arc.w_alpha(), arc.w_beta);
        let da = q_min(t, wa - t + wb);
        let db = q_min(wa - t, t + wb);
        // the cycle formed by the arc and its own stretch
        let own = wa + wb;
        let pos = wrap(own, t + half(own));
        if pos <= wa {
            out.offer(half(own), arc.walk.point_at(net, pos, probes));
        } else {
            self.offer_cycle(net, out, half(own), arc.a + wb - (pos - wa), probes);
        }
        // everything else is reached through a or b, exactly as from this
        // point of the stretch, shifted by c
        let c = half(da + db - wb);
        let z = wrap(self.cycle_len(), arc.a + half(da - db + wb));
        self.offer_from_cycle(net, out, z, c, Some(i), probes);
    }

    fn query_overlong(&self, net: &Network, t: Q, out: &mut MaxCollector, probes: &mut u64) {
        let arc = self.overlong.as_ref().expect("overlong arc");
        let len = self.cycle_len();
        let (wa, wb) = (arc.w_alpha(), arc.w_beta);
        let wg = len - wb;
        let da = q_min(t, wa - t + wg);
        let db = q_min(wa - t, t + wg);
        // the cycle of the arc and the rest of the main cycle, parametrized
        // from a along the arc, then from b forward along the cycle
        let b = arc.a + wb;
        let own = wa + wg;
        let virt = self.virt.map(|(s0, s1)| {
            let p0 = wa + wrap(len, s0 - b);
            (p0, p0 + s1 - s0)
        });
        for (d, pos) in clamped_antipode(own, t, virt) {
            if pos <= wa {
                out.offer(d, arc.walk.point_at(net, pos, probes));
            } else {
                self.offer_cycle(net, out, d, wrap(len, b + pos - wa), probes);
            }
        }
        // the arc's own stretch
        self.offer_cycle(net, out, half(da + db + wb), wrap(len, arc.a + half(db + wb - da)), probes);
        // the other arcs, seen from the matching point of the stretch
        let c = half(da + db - wb);
        let z = wrap(len, arc.a + half(da - db + wb));
        if let Some(lv) = &self.levels {
            if let Some((v, owners)) = lv.top_excluding(z, None, probes) {
                if !out.best().is_some_and(|bst| v + c < *bst) {
                    for i in owners {
                        *probes += 1;
                        self.offer_arc(net, out, &self.arcs[i], z, c, probes);
                    }
                }
            }
        }
    }

    /// Adds the farthest points of the chain from `q` to `out`; `q` must lie on
    /// the chain.
    pub fn query_point(&self, net: &Network, q: &PointOnEdge, out: &mut MaxCollector, probes: &mut u64) {
        let off = q.offset(net);
        let e = net.edge(q.edge);
        match self.loc[&q.edge] {
            Loc::Cycle(k) => {
                let along = if e.u == self.cycle_vertices[k] { off } else { e.w.to_q() - off };
                self.query_cycle(net, self.prefix[k] + along, out, probes);
            }
            Loc::Arc(i, k) => {
                let t = self.arcs[i].walk.position(net, k, q);
                self.query_arc(net, i, t, out, probes);
            }
            Loc::Overlong(k) => {
                let t = self.overlong.as_ref().unwrap().walk.position(net, k, q);
                self.query_overlong(net, t, out, probes);
            }
        }
    }

    pub fn farthest_points(&self, net: &Network, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        let mut out = MaxCollector::new();
        self.query_point(net, q, &mut out, probes);
        out.finish()
    }

    /// Arcs that are farthest from some cycle point, in cycle order.
    pub fn relevant_arcs(&self) -> Vec<usize> {
        let Some(lv) = &self.levels else { return Vec::new() };
        let mut seen = vec![false; self.arcs.len()];
        for o in lv.u1.seg_owners.iter().chain(lv.u1.vertex_owners.iter()) {
            for &i in o {
                seen[i] = true;
            }
        }
        (0..self.arcs.len()).filter(|&i| seen[i]).collect()
    }
}
