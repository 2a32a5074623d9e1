//! Series-parallel recognition by reduction.
//!
//! Degree-2 vertices are contracted and parallel edges merged (looked up by
//! endpoint pair) until one edge remains. The reductions form a binary
//! decomposition tree; read backwards they are the creation history.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::network::{EdgeId, Network, VertexId};

/// One step of building a network from a single edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryOp {
    /// Split history edge `edge` at the new vertex `vertex`. The edge keeps its
    /// first endpoint; the second half gets the next free history edge id.
    Series { edge: usize, vertex: VertexId },
    /// Duplicate history edge `edge`; the copy gets the next free id.
    Parallel { edge: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreationHistory {
    pub terminals: (VertexId, VertexId),
    pub ops: Vec<HistoryOp>,
    /// Series operations performed.
    pub series: usize,
    /// Parallel operations performed.
    pub parallel: usize,
    /// Network edge realized by each history edge id.
    pub edge_map: Vec<EdgeId>,
}

impl CreationHistory {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Endpoints of every history edge after applying all operations.
    pub fn replay(&self) -> Vec<(VertexId, VertexId)> {
        let mut edges = vec![self.terminals];
        for op in &self.ops {
            match *op {
                HistoryOp::Series { edge, vertex } => {
                    let (p, q) = edges[edge];
                    edges[edge] = (p, vertex);
                    edges.push((vertex, q));
                }
                HistoryOp::Parallel { edge } => edges.push(edges[edge]),
            }
        }
        edges
    }

    /// True if replaying yields exactly the edges of `net`.
    pub fn reproduces(&self, net: &Network) -> bool {
        let edges = self.replay();
        if edges.len() != net.edge_count() || self.edge_map.len() != edges.len() {
            return false;
        }
        let mut seen = vec![false; net.edge_count()];
        edges.iter().zip(&self.edge_map).all(|(&(p, q), &e)| {
            let ed = net.edge(e);
            let ok = !seen[e] && ((ed.u, ed.v) == (p, q) || (ed.u, ed.v) == (q, p));
            seen[e] = true;
            ok
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinNode {
    Leaf(EdgeId),
    /// `left` joins the first end to `mid`, `right` joins `mid` to the second end.
    Series { left: usize, right: usize, mid: VertexId },
    Parallel { first: usize, second: usize },
}

/// Binary decomposition produced by the reduction. Nodes `0..m` are the
/// network edges; later nodes are created in reduction order.
#[derive(Debug, Clone)]
pub struct BinTree {
    pub nodes: Vec<BinNode>,
    pub ends: Vec<(VertexId, VertexId)>,
    pub root: usize,
}

pub fn reduce(net: &Network) -> Result<BinTree> {
    let n = net.vertex_count();
    let m = net.edge_count();
    let mut nodes: Vec<BinNode> = (0..m).map(BinNode::Leaf).collect();
    let mut ends: Vec<(VertexId, VertexId)> = net.edges().iter().map(|e| (e.u, e.v)).collect();
    let mut adj: Vec<HashMap<VertexId, usize>> = vec![HashMap::new(); n];
    for (i, e) in net.edges().iter().enumerate() {
        adj[e.u].insert(e.v, i);
        adj[e.v].insert(e.u, i);
    }
    let mut queue: Vec<VertexId> = (0..n).filter(|&v| adj[v].len() == 2).collect();
    let mut alive = m;
    while alive > 1 {
        let x = queue.pop().ok_or(Error::NotSeriesParallel)?;
        if adj[x].len() != 2 {
            continue;
        }
        let mut it = adj[x].iter().map(|(&y, &e)| (y, e));
        let (mut y, mut e1) = it.next().expect("degree two");
        let (mut z, mut e2) = it.next().expect("degree two");
        if z < y {
            std::mem::swap(&mut y, &mut z);
            std::mem::swap(&mut e1, &mut e2);
        }
        adj[x].clear();
        adj[y].remove(&x);
        adj[z].remove(&x);
        nodes.push(BinNode::Series { left: e1, right: e2, mid: x });
        ends.push((y, z));
        let mut c = nodes.len() - 1;
        alive -= 1;
        if let Some(&d) = adj[y].get(&z) {
            nodes.push(BinNode::Parallel { first: d, second: c });
            ends.push((y, z));
            c = nodes.len() - 1;
            alive -= 1;
        }
        adj[y].insert(z, c);
        adj[z].insert(y, c);
        for v in [y, z] {
            if adj[v].len() == 2 {
                queue.push(v);
            }
        }
    }
    Ok(BinTree { root: nodes.len() - 1, nodes, ends })
}

impl BinTree {
    /// The creation history: the reductions in reverse, with history edge ids
    /// assigned as the replay creates them.
    pub fn history(&self, edge_count: usize) -> CreationHistory {
        let mut hist = vec![usize::MAX; self.nodes.len()];
        let mut replay_ends = vec![self.ends[self.root]];
        hist[self.root] = 0;
        let mut ops = Vec::new();
        let (mut series, mut parallel) = (0, 0);
        for c in (0..self.nodes.len()).rev() {
            let h = hist[c];
            match self.nodes[c] {
                BinNode::Leaf(_) => {}
                BinNode::Series { left, right, mid } => {
                    let (p, q) = replay_ends[h];
                    let g = replay_ends.len();
                    let (near, far) = if p == self.ends[c].0 { (left, right) } else { (right, left) };
                    hist[near] = h;
                    hist[far] = g;
                    replay_ends[h] = (p, mid);
                    replay_ends.push((mid, q));
                    ops.push(HistoryOp::Series { edge: h, vertex: mid });
                    series += 1;
                }
                BinNode::Parallel { first, second } => {
                    let g = replay_ends.len();
                    hist[first] = h;
                    hist[second] = g;
                    replay_ends.push(replay_ends[h]);
                    ops.push(HistoryOp::Parallel { edge: h });
                    parallel += 1;
                }
            }
        }
        let mut edge_map = vec![0; edge_count];
        for (e, &h) in hist.iter().enumerate().take(edge_count) {
            edge_map[h] = e;
        }
        CreationHistory { terminals: self.ends[self.root], ops, series, parallel, edge_map }
    }
}

/// Recovers terminals and a creation history of a two-terminal
/// series-parallel network.
pub fn sp_reduce(net: &Network) -> Result<CreationHistory> {
    Ok(reduce(net)?.history(net.edge_count()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_network;

    #[test]
    fn triangle_history_replays() {
        let net = build_network(3, &[(0, 1, "2"), (0, 2, "3"), (2, 1, "3")]).unwrap();
        let h = sp_reduce(&net).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!((h.series, h.parallel), (1, 1));
        assert!(matches!(h.ops[0], HistoryOp::Parallel { .. }));
        assert!(h.reproduces(&net));
    }

    #[test]
    fn single_edge_is_empty() {
        let net = build_network(2, &[(0, 1, "1")]).unwrap();
        let h = sp_reduce(&net).unwrap();
        assert!(h.is_empty());
        assert_eq!(h.terminals, (0, 1));
    }

    #[test]
    fn k4_is_rejected() {
        let k4: Vec<_> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].iter().map(|&(u, v)| (u, v, "1")).collect();
        let net = build_network(4, &k4).unwrap();
        assert_eq!(sp_reduce(&net), Err(Error::NotSeriesParallel));
    }

    #[test]
    fn pendant_path_and_cycle() {
        // triangle with a tail
        let net = build_network(5, &[(0, 1, "1"), (1, 2, "1"), (2, 0, "1"), (2, 3, "1"), (3, 4, "2")]).unwrap();
        let h = sp_reduce(&net).unwrap();
        assert_eq!(h.len(), 4);
        assert!(h.reproduces(&net));
    }
}
