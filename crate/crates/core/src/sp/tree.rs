//! Canonical series-parallel tree: n-ary, no series child of a series node and
//! no parallel child of a parallel node, every node oriented from terminal `a`
//! to terminal `b` and series children listed in order from `a`.

use crate::network::{EdgeId, Network, VertexId};

use super::reduce::{BinNode, BinTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Leaf(EdgeId),
    Series,
    Parallel,
}

#[derive(Debug, Clone)]
pub struct SpNode {
    pub kind: Kind,
    pub a: VertexId,
    pub b: VertexId,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    /// Index among the parent's children.
    pub pos: usize,
}

#[derive(Debug, Clone)]
pub struct SpTree {
    pub nodes: Vec<SpNode>,
    pub root: usize,
    pub leaf_of_edge: Vec<usize>,
}

fn other(ends: (VertexId, VertexId), v: VertexId) -> VertexId {
    if ends.0 == v {
        ends.1
    } else {
        ends.0
    }
}

impl SpTree {
    pub fn from_bin(bin: &BinTree, edge_count: usize) -> SpTree {
        let mut nodes = vec![SpNode { kind: Kind::Series, a: 0, b: 0, children: Vec::new(), parent: None, pos: 0 }];
        // (binary node, start vertex, canonical id)
        let mut work = vec![(bin.root, bin.ends[bin.root].0, 0usize)];
        let mut leaf_of_edge = vec![usize::MAX; edge_count];
        while let Some((c, start, id)) = work.pop() {
            let end = other(bin.ends[c], start);
            nodes[id].a = start;
            nodes[id].b = end;
            let items = match bin.nodes[c] {
                BinNode::Leaf(e) => {
                    nodes[id].kind = Kind::Leaf(e);
                    leaf_of_edge[e] = id;
                    continue;
                }
                BinNode::Series { .. } => {
                    nodes[id].kind = Kind::Series;
                    flatten_series(bin, c, start)
                }
                BinNode::Parallel { .. } => {
                    nodes[id].kind = Kind::Parallel;
                    flatten_parallel(bin, c, start)
                }
            };
            for (pos, (child, s)) in items.into_iter().enumerate() {
                let cid = nodes.len();
                nodes.push(SpNode { kind: Kind::Series, a: 0, b: 0, children: Vec::new(), parent: Some(id), pos });
                nodes[id].children.push(cid);
                work.push((child, s, cid));
            }
        }
        SpTree { nodes, root: 0, leaf_of_edge }
    }

    pub fn build(net: &Network, bin: &BinTree) -> SpTree {
        SpTree::from_bin(bin, net.edge_count())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &SpNode {
        &self.nodes[i]
    }

    /// Node ids with every child after its parent.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.nodes[x].children.iter().rev());
        }
        out
    }
}

/// Maximal series chain below `c`, in order from `start`, with each part's start vertex.
fn flatten_series(bin: &BinTree, c: usize, start: VertexId) -> Vec<(usize, VertexId)> {
    let mut out = Vec::new();
    let mut stack = vec![(c, start)];
    while let Some((x, s)) = stack.pop() {
        match bin.nodes[x] {
            BinNode::Series { left, right, mid } => {
                let (first, second) = if bin.ends[x].0 == s { (left, right) } else { (right, left) };
                stack.push((second, mid));
                stack.push((first, s));
            }
            _ => out.push((x, s)),
        }
    }
    out
}

fn flatten_parallel(bin: &BinTree, c: usize, start: VertexId) -> Vec<(usize, VertexId)> {
    let mut out = Vec::new();
    let mut stack = vec![c];
    while let Some(x) = stack.pop() {
        match bin.nodes[x] {
            BinNode::Parallel { first, second } => {
                stack.push(second);
                stack.push(first);
            }
            _ => out.push((x, start)),
        }
    }
    out
}
