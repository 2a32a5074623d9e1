//! Paths through a network addressed by arc length.

use num_traits::Zero;

use crate::exact::Q;
use crate::network::{EdgeId, Network, PointOnEdge, VertexId};

#[derive(Debug, Clone)]
pub struct Walk {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    /// `prefix[k]` is the arc length from the start to `vertices[k]`.
    pub prefix: Vec<Q>,
}

impl Walk {
    pub fn new(net: &Network, start: VertexId, edges: Vec<EdgeId>) -> Walk {
        let mut vertices = vec![start];
        let mut prefix = vec![Q::zero()];
        for &e in &edges {
            let last = *vertices.last().unwrap();
            vertices.push(net.edge(e).other(last));
            prefix.push(*prefix.last().unwrap() + net.edge(e).w.to_q());
        }
        Walk { vertices, edges, prefix }
    }

    pub fn len(&self) -> Q {
        *self.prefix.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Index of an edge containing position `t`, preferring the later edge at
    /// interior vertices.
    pub fn locate(&self, t: Q, probes: &mut u64) -> usize {
        let (mut lo, mut hi) = (0, self.edges.len());
        while hi - lo > 1 {
            *probes += 1;
            let mid = (lo + hi) / 2;
            if self.prefix[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// The point at position `t`, which must lie on edge `k`.
    pub fn point_on(&self, net: &Network, k: usize, t: Q) -> PointOnEdge {
        PointOnEdge::at_offset(net, self.edges[k], self.vertices[k], t - self.prefix[k])
    }

    pub fn point_at(&self, net: &Network, t: Q, probes: &mut u64) -> PointOnEdge {
        let k = self.locate(t, probes);
        self.point_on(net, k, t)
    }

    /// Position of `q`, given that it lies on edge `k` of this walk.
    pub fn position(&self, net: &Network, k: usize, q: &PointOnEdge) -> Q {
        let e = net.edge(self.edges[k]);
        let off = q.offset(net);
        self.prefix[k] + if e.u == self.vertices[k] { off } else { e.w.to_q() - off }
    }
}

/// Follows degree-two vertices from `start` along `first` until reaching a
/// vertex for which `stop` holds. `None` if the walk returns to a vertex it
/// already passed or gets stuck.
pub fn trace(net: &Network, start: VertexId, first: EdgeId, stop: impl Fn(VertexId) -> bool) -> Option<Walk> {
    let mut edges = vec![first];
    let mut cur = net.edge(first).other(start);
    let mut steps = 0;
    while !stop(cur) {
        if net.degree(cur) != 2 || cur == start || steps > net.vertex_count() {
            return None;
        }
        let &(next, e) = net.neighbors(cur).iter().find(|&&(_, e)| e != *edges.last().unwrap())?;
        edges.push(e);
        cur = next;
        steps += 1;
    }
    Some(Walk::new(net, start, edges))
}
