//! Farthest-point queries on an abacus: parallel paths between terminals `u`
//! and `v`, with arcs attached to the paths.
//!
//! Chain `i` is path `P_i` with its arcs. Distances inside a chain are those
//! of the chain closed by a virtual `v`-`u` stretch of length `d = d(u, v)`.
//! A point `q` of chain `i`, at distances `δu, δv` from the terminals, reaches a
//! point `y` of another chain `j` at `min(δu + d_j(u, y), δv + d_j(v, y))`.
//! With chain `j` closed by a virtual stretch of length `W` (the longest path)
//! instead, this is `c + F_j(z)`, where `z = (δv - δu + W) / 2` is measured from
//! `v` along the stretch, `c = (δu + δv - W) / 2`, and `F_j(z)` is the farthest
//! distance from `z` to a real point of chain `j`. The `F_j` share one
//! two-level envelope, so the best other chain is found with one search.

mod outward;

use std::collections::{HashMap, HashSet};

use num_traits::Zero;

use crate::bead_chain::{reversed, BeadChain};
use crate::error::{Error, Result};
use crate::exact::{half, Q};
use crate::network::{EdgeId, FarthestResult, MaxCollector, Network, PointOnEdge, VertexId};
use crate::plf::envelope::{PLFunction, UpperEnvelope};
use crate::testkit::check::FarthestQuery;
use crate::walk::Walk;
use outward::{ChainOutward, OutwardIndex};

#[derive(Debug, Clone)]
pub struct AbacusStructure {
    net: Network,
    pub u: VertexId,
    pub v: VertexId,
    /// `d(u, v)`, the shortest path length.
    pub d: Q,
    /// The longest path length.
    pub w: Q,
    pub path_lengths: Vec<Q>,
    inward: Vec<BeadChain>,
    outward: Option<OutwardIndex>,
    chain_of: HashMap<EdgeId, usize>,
}

impl AbacusStructure {
    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn chain_count(&self) -> usize {
        self.inward.len()
    }

    /// Chain `i` closed by a virtual stretch of length `d`.
    pub fn chain(&self, i: usize) -> &BeadChain {
        &self.inward[i]
    }

    /// The stretch of the virtual edge that outward queries land on, as
    /// distances from `v`; its length is `d`.
    pub fn bar_stretch(&self) -> (Q, Q) {
        (half(self.w - self.d), half(self.w + self.d))
    }

    /// `F_j` over the virtual edge, parametrized from `v`.
    pub fn outward_function(&self, j: usize) -> Option<PLFunction> {
        self.outward.as_ref()?.function(j).ok()
    }

    /// Upper envelope of all `F_j` (owners are chain indices).
    pub fn outward_envelope(&self) -> Option<&UpperEnvelope> {
        self.outward.as_ref().map(|o| o.envelope())
    }

    fn locate(&self, q: &PointOnEdge) -> Result<usize> {
        q.validate(&self.net)?;
        self.chain_of.get(&q.edge).copied().ok_or_else(|| Error::InvalidQuery(format!("edge {} is not in the abacus", q.edge)))
    }

    /// Terminal distances of `q` on chain `i`.
    fn terminal_distances(&self, i: usize, q: &PointOnEdge) -> (Q, Q) {
        let c = &self.inward[i];
        (c.distance_to(&self.net, q, Q::zero()), c.distance_to(&self.net, q, self.path_lengths[i]))
    }

    fn outward_into(&self, i: usize, q: &PointOnEdge, out: &mut MaxCollector, probes: &mut u64) {
        let Some(ow) = &self.outward else { return };
        let (du, dv) = self.terminal_distances(i, q);
        ow.query(&self.net, half(dv - du + self.w), half(du + dv - self.w), i, out, probes);
    }

    /// Farthest points from `q` on its own chain.
    pub fn inward_query(&self, q: &PointOnEdge) -> Result<FarthestResult> {
        let i = self.locate(q)?;
        let mut out = MaxCollector::new();
        self.inward[i].query_point(&self.net, &q.canonical(&self.net), &mut out, &mut 0);
        Ok(out.finish())
    }

    /// Farthest points from `q` on the other chains.
    pub fn outward_query(&self, q: &PointOnEdge) -> Result<FarthestResult> {
        let i = self.locate(q)?;
        if self.outward.is_none() {
            return Err(Error::SingleChain);
        }
        let mut out = MaxCollector::new();
        self.outward_into(i, &q.canonical(&self.net), &mut out, &mut 0);
        Ok(out.finish())
    }

    pub fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        let q = q.canonical(&self.net);
        let i = self.chain_of[&q.edge];
        let mut out = MaxCollector::new();
        self.inward[i].query_point(&self.net, &q, &mut out, probes);
        self.outward_into(i, &q, &mut out, probes);
        out.finish()
    }

    pub fn farthest_points_abacus(&self, q: &PointOnEdge) -> FarthestResult {
        self.farthest_points_counted(q, &mut 0)
    }
}

impl FarthestQuery for AbacusStructure {
    fn network(&self) -> &Network {
        &self.net
    }

    fn farthest_points(&self, q: &PointOnEdge) -> FarthestResult {
        self.farthest_points_abacus(q)
    }
}

fn path_edges(net: &Network, vs: &[VertexId]) -> Result<Vec<EdgeId>> {
    vs.windows(2)
        .map(|p| net.find_edge(p[0], p[1]).ok_or_else(|| Error::InvalidAbacus(format!("no edge between {} and {}", p[0], p[1]))))
        .collect()
}

/// Builds the structure from the paths (each from `u` to `v`) and the arcs,
/// given as `(path index, vertex sequence)` with both ends on that path.
pub fn build_abacus(net: &Network, u: VertexId, v: VertexId, paths: &[Vec<VertexId>], arcs: &[(usize, Vec<VertexId>)]) -> Result<AbacusStructure> {
    let bad = |m: String| Err(Error::InvalidAbacus(m));
    if u == v || paths.is_empty() {
        return bad("need two terminals and a path".into());
    }
    let mut used: HashSet<VertexId> = HashSet::from([u, v]);
    let mut seen_edges: HashSet<EdgeId> = HashSet::new();
    let mut chain_of = HashMap::new();
    let mut claim = |e: EdgeId, i: usize, chain_of: &mut HashMap<EdgeId, usize>| {
        chain_of.insert(e, i);
        seen_edges.insert(e)
    };
    let mut path_walks = Vec::with_capacity(paths.len());
    let mut index_on: Vec<HashMap<VertexId, usize>> = Vec::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let mut p = p.clone();
        if p.first() == Some(&v) {
            p.reverse();
        }
        if p.len() < 2 || p[0] != u || p[p.len() - 1] != v {
            return bad(format!("path {i} does not run from u to v"));
        }
        for &x in &p[1..p.len() - 1] {
            if !used.insert(x) {
                return bad(format!("vertex {x} is shared"));
            }
        }
        let edges = path_edges(net, &p)?;
        for &e in &edges {
            if !claim(e, i, &mut chain_of) {
                return bad(format!("edge {e} is used twice"));
            }
        }
        index_on.push(p.iter().enumerate().map(|(k, &x)| (x, k)).collect());
        path_walks.push(Walk::new(net, u, edges));
    }
    let mut chain_arcs: Vec<Vec<(usize, usize, Walk)>> = vec![Vec::new(); paths.len()];
    for (i, seq) in arcs {
        let i = *i;
        if i >= paths.len() || seq.len() < 2 {
            return bad("arc refers to a missing path or is empty".into());
        }
        let (Some(&s), Some(&t)) = (index_on[i].get(&seq[0]), index_on[i].get(&seq[seq.len() - 1])) else {
            return bad(format!("arc does not end on path {i}"));
        };
        if s == t {
            return bad("arc returns to its start".into());
        }
        for &x in &seq[1..seq.len() - 1] {
            if !used.insert(x) {
                return bad(format!("vertex {x} is shared"));
            }
        }
        let edges = path_edges(net, seq)?;
        for &e in &edges {
            if !claim(e, i, &mut chain_of) {
                return bad(format!("edge {e} is used twice"));
            }
        }
        let walk = Walk::new(net, seq[0], edges);
        let (s, t, walk) = if s < t { (s, t, walk) } else { (t, s, reversed(net, &walk)) };
        let pw = &path_walks[i];
        if walk.len() < pw.prefix[t] - pw.prefix[s] {
            return bad("arc is shorter than the path stretch it spans".into());
        }
        chain_arcs[i].push((s, t, walk));
    }
    if seen_edges.len() != net.edge_count() {
        return bad("paths and arcs do not cover the network".into());
    }
    for list in &mut chain_arcs {
        list.sort_by_key(|a| a.0);
        if list.windows(2).any(|p| p[0].1 > p[1].0) {
            return bad("arc stretches overlap".into());
        }
    }
    let path_lengths: Vec<Q> = path_walks.iter().map(Walk::len).collect();
    let d = *path_lengths.iter().min().unwrap();
    let w = *path_lengths.iter().max().unwrap();
    let close = |i: usize, virtual_len: Q| -> Result<BeadChain> {
        let pw = &path_walks[i];
        let mut verts = pw.vertices.clone();
        verts.push(u);
        let mut edges: Vec<Option<EdgeId>> = pw.edges.iter().map(|&e| Some(e)).collect();
        edges.push(None);
        BeadChain::new(net, verts, edges, virtual_len, chain_arcs[i].clone()).map_err(|e| Error::InvalidAbacus(e.to_string()))
    };
    let inward = (0..paths.len()).map(|i| close(i, d)).collect::<Result<Vec<_>>>()?;
    let outward = if paths.len() >= 2 {
        let chains = (0..paths.len()).map(|i| ChainOutward::new(path_walks[i].clone(), close(i, w)?, w)).collect::<Result<Vec<_>>>()?;
        Some(OutwardIndex::new(chains)?)
    } else {
        None
    };
    Ok(AbacusStructure { net: net.clone(), u, v, d, w, path_lengths, inward, outward, chain_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::SCALE;
    use crate::network::build_network;
    use crate::oracle::oracle_farthest;

    fn sc(x: f64) -> Q {
        Q::new((x * 2.0).round() as i128 * SCALE as i128, 2)
    }

    // u=0 v=1 x=2 y=3: uv:2, ux:3, xv:3, arc u-y-x 2.5+2.5
    fn ab1() -> AbacusStructure {
        let net = build_network(4, &[(0, 1, "2"), (0, 2, "3"), (2, 1, "3"), (0, 3, "2.5"), (3, 2, "2.5")]).unwrap();
        build_abacus(&net, 0, 1, &[vec![0, 1], vec![0, 2, 1]], &[(1, vec![0, 3, 2])]).unwrap()
    }

    #[test]
    fn ab1_bookkeeping() {
        let s = ab1();
        assert_eq!((s.chain_count(), s.d, s.w), (2, sc(2.0), sc(6.0)));
        let (lo, hi) = s.bar_stretch();
        assert_eq!(hi - lo, s.d);
    }

    #[test]
    fn ab1_queries() {
        let s = ab1();
        let net = s.network().clone();
        let mid = PointOnEdge::new(0, Q::new(1, 2));
        let r = s.farthest_points_abacus(&mid);
        assert_eq!(r.distance, sc(5.0));
        // on yx at 1.5 from y
        let yx = net.find_edge(3, 2).unwrap();
        assert_eq!(r.points.iter().cloned().collect::<Vec<_>>(), vec![PointOnEdge::at_offset(&net, yx, 3, sc(1.5))]);
        assert_eq!(s.outward_query(&mid).unwrap(), r);
        assert!(s.inward_query(&mid).unwrap().distance < r.distance);
        let y = PointOnEdge::vertex(&net, 3);
        let r = s.farthest_points_abacus(&y);
        assert_eq!(r.distance, sc(5.0));
        assert_eq!(r, oracle_farthest(&net, &y));
        for e in 0..net.edge_count() {
            for k in 0..=6 {
                let q = PointOnEdge::new(e, Q::new(k, 6)).canonical(&net);
                assert_eq!(s.farthest_points_abacus(&q), oracle_farthest(&net, &q), "edge {e} at {k}/6");
            }
        }
    }

    #[test]
    fn single_path_with_arcs() {
        // u-a-b-v with an arc a-c-b
        let net = build_network(5, &[(0, 2, "1"), (2, 3, "1"), (3, 1, "1"), (2, 4, "1"), (4, 3, "1")]).unwrap();
        let s = build_abacus(&net, 0, 1, &[vec![0, 2, 3, 1]], &[(0, vec![2, 4, 3])]).unwrap();
        assert_eq!(s.outward_query(&PointOnEdge::vertex(&net, 0)), Err(Error::SingleChain));
        for e in 0..net.edge_count() {
            for k in 0..=4 {
                let q = PointOnEdge::new(e, Q::new(k, 4)).canonical(&net);
                assert_eq!(s.farthest_points_abacus(&q), oracle_farthest(&net, &q), "edge {e} at {k}/4");
            }
        }
    }

    #[test]
    fn rejects_short_arc() {
        let net = build_network(4, &[(0, 1, "2"), (0, 2, "3"), (2, 1, "3"), (0, 3, "1"), (3, 2, "1")]).unwrap();
        let r = build_abacus(&net, 0, 1, &[vec![0, 1], vec![0, 2, 1]], &[(1, vec![0, 3, 2])]);
        assert!(matches!(r, Err(Error::InvalidAbacus(_))));
    }
}
