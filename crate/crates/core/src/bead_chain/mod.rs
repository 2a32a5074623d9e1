//! Farthest-point queries on bead-chains: a main cycle with arcs whose
//! attachment stretches are pairwise disjoint.

pub mod chain;

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::Q;
use crate::network::{EdgeId, FarthestResult, Network, PointOnEdge, VertexId};
use crate::plf::arcshape::ArcDistanceShape;
use crate::testkit::check::FarthestQuery;
use crate::walk::Walk;

pub use chain::{detect_overlong, BeadChain, ChainArc};

#[derive(Debug, Clone)]
pub struct BeadChainStructure {
    net: Network,
    pub chain: BeadChain,
}

impl BeadChainStructure {
    pub fn network(&self) -> &Network {
        &self.net
    }

    /// Farthest-arc function of arc `i` (non-overlong arcs in cycle order).
    pub fn arc_distance(&self, i: usize) -> ArcDistanceShape {
        self.chain.shapes[i]
    }

    pub fn farthest_points_bc(&self, q: &PointOnEdge) -> FarthestResult {
        self.chain.farthest_points(&self.net, q, &mut 0)
    }

    pub fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        self.chain.farthest_points(&self.net, q, probes)
    }
}

impl FarthestQuery for BeadChainStructure {
    fn network(&self) -> &Network {
        &self.net
    }

    fn farthest_points(&self, q: &PointOnEdge) -> FarthestResult {
        self.farthest_points_bc(q)
    }
}

fn path_edges(net: &Network, vs: &[VertexId]) -> Result<Vec<EdgeId>> {
    vs.windows(2)
        .map(|w| net.find_edge(w[0], w[1]).ok_or_else(|| Error::InvalidBeadChain(format!("no edge between {} and {}", w[0], w[1]))))
        .collect()
}

/// Builds the structure for `net`, given its main cycle (vertex sequence,
/// first vertex not repeated) and its arcs (vertex sequences between two
/// cycle vertices). Whichever side of a bead is shorter becomes part of the
/// main cycle.
pub fn build_bead_chain(net: &Network, cycle: &[VertexId], arcs: &[Vec<VertexId>]) -> Result<BeadChainStructure> {
    let bad = |m: &str| Err(Error::InvalidBeadChain(m.to_string()));
    let m = cycle.len();
    if m < 3 {
        return bad("main cycle needs three vertices");
    }
    let mut pos: HashMap<VertexId, usize> = HashMap::with_capacity(m);
    for (k, &x) in cycle.iter().enumerate() {
        if pos.insert(x, k).is_some() {
            return bad("main cycle repeats a vertex");
        }
    }
    let mut closed = cycle.to_vec();
    closed.push(cycle[0]);
    let cycle_edges = path_edges(net, &closed)?;
    let mut ends: Vec<usize> = Vec::with_capacity(2 * arcs.len());
    let mut walks = Vec::with_capacity(arcs.len());
    let mut covered = m;
    for arc in arcs {
        if arc.len() < 2 {
            return bad("arc needs two vertices");
        }
        let (Some(&i), Some(&j)) = (pos.get(&arc[0]), pos.get(&arc[arc.len() - 1])) else {
            return bad("arc does not end on the main cycle");
        };
        if i == j || arc[1..arc.len() - 1].iter().any(|x| pos.contains_key(x)) {
            return bad("arc must join two distinct cycle vertices through new vertices");
        }
        ends.push(i);
        ends.push(j);
        let edges = path_edges(net, arc)?;
        covered += edges.len();
        walks.push((i, j, Walk::new(net, arc[0], edges)));
    }
    if covered != net.edge_count() {
        return bad("cycle and arcs do not cover the network exactly");
    }
    ends.sort_unstable();
    // arc endpoints strictly inside the forward stretch from i to j
    let inside = |i: usize, j: usize| {
        let open = |lo: usize, hi: usize| ends.partition_point(|&e| e < hi) - ends.partition_point(|&e| e <= lo);
        if i < j {
            open(i, j)
        } else {
            open(i, m) + ends.partition_point(|&e| e < j)
        }
    };
    // (start, end, arc) with the stretch running forward from start
    let mut spans: Vec<(usize, usize, usize)> = Vec::with_capacity(walks.len());
    let mut open_choice = Vec::new();
    for (k, &(i, j, _)) in walks.iter().enumerate() {
        match (inside(i, j) == 0, inside(j, i) == 0) {
            (true, false) => spans.push((i, j, k)),
            (false, true) => spans.push((j, i, k)),
            (true, true) => open_choice.push(k),
            (false, false) => return bad("arc attachment stretches overlap"),
        }
    }
    for k in open_choice {
        let (i, j, _) = walks[k];
        let taken = |a: usize, b: usize| spans.iter().any(|&(x, y, _)| (x, y) == (a, b));
        // the stretch running forward from the arc's first vertex, unless taken
        let pick = if taken(i, j) { (j, i) } else { (i, j) };
        spans.push((pick.0, pick.1, k));
    }
    spans.sort_unstable();
    for w in 0..spans.len() {
        let (s, e, _) = spans[w];
        let (ns, _, _) = spans[(w + 1) % spans.len()];
        let span_end = if e < s { e + m } else { e };
        let next_start = if w + 1 == spans.len() { ns + m } else { ns };
        if span_end > next_start && spans.len() > 1 {
            return bad("arc attachment stretches overlap");
        }
    }

    // walk the cycle from the first stretch start, taking the shorter side of
    // every bead
    let origin = spans.first().map_or(0, |s| s.0);
    let span_at: HashMap<usize, (usize, usize)> = spans.iter().map(|&(s, e, k)| (s, (e, k))).collect();
    let mut verts = vec![cycle[origin]];
    let mut edges: Vec<Option<EdgeId>> = Vec::new();
    let mut chain_arcs = Vec::new();
    let mut k = origin;
    let mut steps = 0;
    while steps < m {
        if let Some(&(e, a)) = span_at.get(&k) {
            let (i, _, ref walk) = walks[a];
            let arc_walk = if i == k { walk.clone() } else { reversed(net, walk) };
            let len = if e > k { e - k } else { e + m - k };
            let side: Vec<EdgeId> = (0..len).map(|t| cycle_edges[(k + t) % m]).collect();
            let side_walk = Walk::new(net, cycle[k], side);
            let (cyc, arc) = if arc_walk.len() < side_walk.len() { (arc_walk, side_walk) } else { (side_walk, arc_walk) };
            let start = edges.len();
            verts.extend(cyc.vertices[1..].iter().copied());
            edges.extend(cyc.edges.iter().map(|&x| Some(x)));
            chain_arcs.push((start, edges.len(), arc));
            k = e;
            steps += len;
        } else {
            edges.push(Some(cycle_edges[k]));
            k = (k + 1) % m;
            verts.push(cycle[k]);
            steps += 1;
        }
    }
    let chain = BeadChain::new(net, verts, edges, Q::zero(), chain_arcs)?;
    Ok(BeadChainStructure { net: net.clone(), chain })
}

/// The same walk traversed from its other end.
pub fn reversed(net: &Network, w: &Walk) -> Walk {
    let mut edges = w.edges.clone();
    edges.reverse();
    Walk::new(net, *w.vertices.last().unwrap(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q_int, SCALE};
    use crate::network::build_network;
    use crate::oracle::oracle_farthest;

    fn sc(x: f64) -> Q {
        Q::new((x * 2.0).round() as i128 * SCALE as i128, 2)
    }

    // a=0 b=1 c=2 d=3 e=4
    fn bc1() -> (Network, Vec<VertexId>, Vec<Vec<VertexId>>) {
        let net = build_network(5, &[(0, 1, "1"), (1, 2, "1"), (2, 3, "1"), (3, 0, "1"), (0, 4, "1.5"), (4, 1, "1.5")]).unwrap();
        (net, vec![0, 1, 2, 3], vec![vec![0, 4, 1]])
    }

    #[test]
    fn bc1_shape_and_queries() {
        let (net, cycle, arcs) = bc1();
        let s = build_bead_chain(&net, &cycle, &arcs).unwrap();
        assert!(s.chain.overlong.is_none());
        let h = s.arc_distance(0);
        assert_eq!((h.low(), h.high()), (sc(2.0), sc(3.0)));
        let e = PointOnEdge::vertex(&net, 4);
        let r = s.farthest_points_bc(&e);
        assert_eq!(r.distance, sc(3.0));
        assert_eq!(r.points.iter().cloned().collect::<Vec<_>>(), vec![PointOnEdge::new(2, Q::new(1, 2))]);
        let c = PointOnEdge::vertex(&net, 2);
        let r = s.farthest_points_bc(&c);
        assert_eq!(r.distance, sc(3.0));
        assert_eq!(r, oracle_farthest(&net, &c));
        let (d, arcs) = s.chain.farthest_arc_query(s.chain.vertex_position(2)).unwrap();
        assert_eq!((d, arcs), (sc(3.0), vec![0]));
    }

    #[test]
    fn bc2_overlong() {
        // a-b:5 b-c:1 c-d:1 d-a:1, arc a-f-b 3+3
        let net = build_network(5, &[(0, 1, "5"), (1, 2, "1"), (2, 3, "1"), (3, 0, "1"), (0, 4, "3"), (4, 1, "3")]).unwrap();
        let s = build_bead_chain(&net, &[0, 1, 2, 3], &[vec![0, 4, 1]]).unwrap();
        let ov = s.chain.overlong.as_ref().unwrap();
        assert_eq!((ov.w_beta, ov.w_alpha()), (sc(5.0), sc(6.0)));
        assert!(s.chain.arcs.is_empty());
        for e in 0..net.edge_count() {
            for k in 0..=4 {
                let q = PointOnEdge::new(e, Q::new(k, 4)).canonical(&net);
                assert_eq!(s.farthest_points_bc(&q), oracle_farthest(&net, &q), "edge {e} at {k}/4");
            }
        }
    }

    #[test]
    fn short_arc_swaps_sides() {
        // arc a-e-b of length 1 against a cycle side of 3
        let net = build_network(5, &[(0, 1, "3"), (1, 2, "1"), (2, 3, "1"), (3, 0, "1"), (0, 4, "0.5"), (4, 1, "0.5")]).unwrap();
        let s = build_bead_chain(&net, &[0, 1, 2, 3], &[vec![0, 4, 1]]).unwrap();
        assert_eq!(s.chain.cycle_len(), q_int(4) * Q::from_integer(SCALE as i128));
        for e in 0..net.edge_count() {
            let q = PointOnEdge::new(e, Q::new(1, 3));
            assert_eq!(s.farthest_points_bc(&q), oracle_farthest(&net, &q));
        }
    }

    #[test]
    fn rejects_overlapping_arcs() {
        let net = build_network(6, &[(0, 1, "1"), (1, 2, "1"), (2, 3, "1"), (3, 0, "1"), (0, 4, "2"), (4, 2, "2"), (1, 5, "2"), (5, 3, "2")]).unwrap();
        assert!(matches!(build_bead_chain(&net, &[0, 1, 2, 3], &[vec![0, 4, 2], vec![1, 5, 3]]), Err(Error::InvalidBeadChain(_))));
    }
}
