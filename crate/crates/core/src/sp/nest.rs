//! The tree of nested abaci. Every parallel component hanging off a path of
//! an abacus is replaced by an arc as long as its longest terminal path, with
//! its shortest terminal path kept on the path. A component made of just two
//! simple paths is an ordinary arc; anything richer becomes a child node.

use std::collections::HashMap;

use crate::abacus::{build_abacus, AbacusStructure};
use crate::error::Result;
use crate::exact::Length;
use crate::network::{EdgeId, Network, VertexId};

use super::reduce::reduce;
use super::tree::{Kind, SpTree};

/// `(shortest, longest)` terminal path length of every tree node.
pub fn terminal_path_lengths(net: &Network, tree: &SpTree) -> Vec<(Length, Length)> {
    let mut out = vec![(Length::ZERO, Length::ZERO); tree.len()];
    for &x in tree.preorder().iter().rev() {
        let node = tree.node(x);
        let parts = node.children.iter().map(|&c| out[c]);
        out[x] = match node.kind {
            Kind::Leaf(e) => (net.edge(e).w, net.edge(e).w),
            Kind::Series => parts.fold((Length::ZERO, Length::ZERO), |acc, p| (acc.0 + p.0, acc.1 + p.1)),
            Kind::Parallel => parts.fold((Length(i64::MAX), Length::ZERO), |acc, p| (acc.0.min(p.0), acc.1.max(p.1))),
        };
    }
    out
}

#[derive(Debug, Clone)]
pub struct AbacusNode {
    /// Terminals in the original network.
    pub a: VertexId,
    pub b: VertexId,
    pub shortest: Length,
    pub longest: Length,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// The node's own network: paths and arcs, children replaced.
    pub abacus: AbacusStructure,
    /// Original vertex of every local vertex; `None` for arc midpoints.
    pub vertex_map: Vec<Option<VertexId>>,
    /// Original edge of every local edge; `None` for stand-ins of children.
    pub edge_map: Vec<Option<EdgeId>>,
    /// For every child: its node, the local edge standing for its shortest
    /// path, and the two local edges of its arc.
    pub child_arcs: Vec<(usize, EdgeId, [EdgeId; 2])>,
}

#[derive(Debug, Clone)]
pub struct AbacusTree {
    pub nodes: Vec<AbacusNode>,
    pub root: usize,
}

impl AbacusTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Local vertices summed over all nodes.
    pub fn total_vertices(&self) -> usize {
        self.nodes.iter().map(|n| n.vertex_map.len()).sum()
    }
}

/// Local network under construction for one node.
#[derive(Default)]
struct Local {
    ids: HashMap<VertexId, usize>,
    vertex_map: Vec<Option<VertexId>>,
    edges: Vec<(VertexId, VertexId, Length)>,
    edge_map: Vec<Option<EdgeId>>,
}

impl Local {
    fn vertex(&mut self, v: VertexId) -> usize {
        *self.ids.entry(v).or_insert_with(|| {
            self.vertex_map.push(Some(v));
            self.vertex_map.len() - 1
        })
    }

    fn midpoint(&mut self) -> usize {
        self.vertex_map.push(None);
        self.vertex_map.len() - 1
    }

    fn edge(&mut self, x: usize, y: usize, w: Length, orig: Option<EdgeId>) -> EdgeId {
        self.edges.push((x, y, w));
        self.edge_map.push(orig);
        self.edges.len() - 1
    }
}

struct Builder<'a> {
    net: &'a Network,
    tree: SpTree,
    lengths: Vec<(Length, Length)>,
    nodes: Vec<Option<AbacusNode>>,
}

impl Builder<'_> {
    /// Parts of a branch from `start`, each `(tree node, its far end)`.
    fn parts(&self, branch: usize, start: VertexId) -> Vec<(usize, VertexId)> {
        let node = self.tree.node(branch);
        let mut items: Vec<usize> = match node.kind {
            Kind::Series => node.children.clone(),
            _ => vec![branch],
        };
        if node.a != start {
            items.reverse();
        }
        let mut at = start;
        items
            .into_iter()
            .map(|c| {
                let n = self.tree.node(c);
                at = if n.a == at { n.b } else { n.a };
                (c, at)
            })
            .collect()
    }

    /// Is every part of the branch a single edge?
    fn is_simple(&self, branch: usize) -> bool {
        let node = self.tree.node(branch);
        match node.kind {
            Kind::Leaf(_) => true,
            Kind::Series => node.children.iter().all(|&c| matches!(self.tree.node(c).kind, Kind::Leaf(_))),
            Kind::Parallel => false,
        }
    }

    /// Appends the edges of a simple branch from local vertex `from`; returns
    /// the local vertex sequence.
    fn copy_simple(&self, local: &mut Local, branch: usize, start: VertexId) -> Vec<usize> {
        let mut seq = vec![local.vertex(start)];
        let mut at = start;
        for (c, end) in self.parts(branch, start) {
            let Kind::Leaf(e) = self.tree.node(c).kind else { unreachable!("simple branch") };
            let (x, y) = (local.vertex(at), local.vertex(end));
            local.edge(x, y, self.net.edge(e).w, Some(e));
            seq.push(y);
            at = end;
        }
        seq
    }

    /// Builds the node for tree node `x` (a parallel node, or the root).
    fn build(&mut self, x: usize, parent: Option<usize>) -> Result<usize> {
        let id = self.nodes.len();
        self.nodes.push(None);
        let node = self.tree.node(x).clone();
        let branches = if node.kind == Kind::Parallel { node.children.clone() } else { vec![x] };
        let mut local = Local::default();
        let (u, v) = (local.vertex(node.a), local.vertex(node.b));
        let mut paths: Vec<Vec<usize>> = Vec::new();
        let mut arcs: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut pending: Vec<(usize, EdgeId, [EdgeId; 2])> = Vec::new();
        for (pi, &br) in branches.iter().enumerate() {
            let mut seq = vec![u];
            let mut at = node.a;
            for (c, end) in self.parts(br, node.a) {
                let cn = self.tree.node(c).clone();
                match cn.kind {
                    Kind::Leaf(e) => {
                        let y = local.vertex(end);
                        local.edge(*seq.last().unwrap(), y, self.net.edge(e).w, Some(e));
                        seq.push(y);
                    }
                    Kind::Parallel if cn.children.len() == 2 && cn.children.iter().all(|&b| self.is_simple(b)) => {
                        let (s, l) = (cn.children[0], cn.children[1]);
                        let (short, long) = if self.lengths[s].0 <= self.lengths[l].0 { (s, l) } else { (l, s) };
                        let path_part = self.copy_simple(&mut local, short, at);
                        seq.extend_from_slice(&path_part[1..]);
                        arcs.push((pi, self.copy_simple(&mut local, long, at)));
                    }
                    _ => {
                        let (sh, lo) = self.lengths[c];
                        let (p, q) = (*seq.last().unwrap(), local.vertex(end));
                        let stand_in = local.edge(p, q, sh, None);
                        let m = local.midpoint();
                        let half = Length(lo.0 / 2);
                        let arc = [local.edge(p, m, half, None), local.edge(m, q, lo - half, None)];
                        arcs.push((pi, vec![p, m, q]));
                        pending.push((c, stand_in, arc));
                        seq.push(q);
                    }
                }
                at = end;
            }
            paths.push(seq);
        }
        let lnet = Network::new(local.vertex_map.len(), local.edges.clone())?;
        let abacus = build_abacus(&lnet, u, v, &paths, &arcs)?;
        let mut children = Vec::new();
        let mut child_arcs = Vec::new();
        for (c, stand_in, arc) in pending {
            let ch = self.build(c, Some(id))?;
            children.push(ch);
            child_arcs.push((ch, stand_in, arc));
        }
        let (shortest, longest) = self.lengths[x];
        self.nodes[id] = Some(AbacusNode {
            a: node.a,
            b: node.b,
            shortest,
            longest,
            parent,
            children,
            abacus,
            vertex_map: local.vertex_map,
            edge_map: local.edge_map,
            child_arcs,
        });
        Ok(id)
    }
}

/// Decomposes a two-terminal series-parallel network into nested abaci.
pub fn decompose(net: &Network) -> Result<AbacusTree> {
    let bin = reduce(net)?;
    let tree = SpTree::build(net, &bin);
    let lengths = terminal_path_lengths(net, &tree);
    let root = tree.root;
    let mut b = Builder { net, tree, lengths, nodes: Vec::new() };
    let root = b.build(root, None)?;
    Ok(AbacusTree { nodes: b.nodes.into_iter().map(|n| n.expect("built")).collect(), root })
}
