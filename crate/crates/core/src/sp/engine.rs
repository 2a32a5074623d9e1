//! Farthest-point queries on series-parallel networks.
//!
//! For every node `X` of the canonical tree with terminals `a, b`:
//!
//! * `D_X` is the shortest `a`-`b` distance inside `X`, `Ω_X` the shortest one
//!   through the rest of the network (`None` when there is no rest).
//! * `G_X(t) = max_y min(t + d_X(a, y), d_X(b, y))` over points `y` of `X`, for
//!   `|t| ≤ D_X`. A query outside `X` at distances `δa, δb` from the terminals
//!   sees its farthest point in `X` at distance `δb + G_X(δa - δb)`.
//! * The outside profile is the same function over the points not in `X`.
//!
//! Profiles are built bottom-up for `G` and top-down for the outside, each cell
//! remembering the cells below it that realize it, so a query answers with one
//! lookup at its edge and reports points by walking those links.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::exact::{half, q_max, q_min, Q};
use crate::network::{EdgeId, FarthestResult, MaxCollector, Network, PointOnEdge, VertexId};
use crate::plf::profile::{Affine, FnId, Level, Line, Profile};
use crate::plf::store::{Piece, Store};

use super::reduce::{reduce, BinTree, CreationHistory};
use super::tree::{Kind, SpTree};

#[derive(Debug, Clone)]
pub struct SpStructure {
    net: Network,
    history: CreationHistory,
    tree: SpTree,
    store: Store,
    /// Internal terminal distance per node.
    d: Vec<Q>,
    /// Outside terminal distance per node; `None` is unbounded.
    omega: Vec<Option<Q>>,
    /// Series nodes: prefix sums of child distances, starting at 0.
    prefix: Vec<Vec<Q>>,
    g: Vec<FnId>,
    /// Outside profile of inner nodes below the root.
    outside: Vec<Option<FnId>>,
    /// Envelope over a node's parts plus its outside, with second level.
    env: Vec<Option<Profile>>,
    leaf_fn: HashMap<FnId, usize>,
    build_steps: usize,
}

/// Statistics of one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub probes: u64,
}

fn zero() -> Q {
    Q::zero()
}

fn opt_min(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(q_min(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn q_abs(x: Q) -> Q {
    if x < zero() {
        -x
    } else {
        x
    }
}

/// `x ↦ dist(x, p)` on a cycle of circumference `lam` (a line if unbounded),
/// as the line valid on an interval containing `mid` in its interior.
fn dcyc_line(p: Q, lam: Option<Q>, mid: Q) -> Line {
    let diff = mid - p;
    let up = diff >= zero();
    if let Some(l) = lam {
        if l - q_abs(diff) < q_abs(diff) {
            return if up { Line::new(-Q::one(), l + p) } else { Line::new(Q::one(), l - p) };
        }
    }
    if up {
        Line::new(Q::one(), -p)
    } else {
        Line::new(-Q::one(), p)
    }
}

/// Pieces for `x ↦ f(dcyc(x, p0) - dcyc(x, p1)) + dcyc(x, p1)` over `[lo, hi]`.
fn cycle_pieces(lo: Q, hi: Q, p0: Q, p1: Q, lam: Option<Q>) -> Vec<Piece> {
    let mut cuts = vec![lo, hi];
    for p in [p0, p1] {
        cuts.push(p);
        if let Some(l) = lam {
            cuts.push(p + half(l));
            cuts.push(p - half(l));
        }
    }
    cuts.retain(|c| *c >= lo && *c <= hi);
    cuts.sort();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let mid = half(w[0] + w[1]);
            let l0 = dcyc_line(p0, lam, mid);
            let l1 = dcyc_line(p1, lam, mid);
            let map = Affine::new(l0.slope - l1.slope, l0.icpt - l1.icpt);
            let map = if map.alpha.is_zero() { Affine::constant(map.beta) } else { map };
            Piece { lo: w[0], hi: w[1], map, add: l1 }
        })
        .collect()
}

/// Pieces reading a series child `G_k` (domain `[-dk, dk]`) at `t + shift`,
/// extended with slope 1 below and flat above, over `[lo, hi]`.
fn shifted_pieces(lo: Q, hi: Q, dk: Q, shift: Q, base: Q) -> Vec<Piece> {
    let cut_lo = -dk - shift;
    let cut_hi = dk - shift;
    let mut out = Vec::new();
    if lo < cut_lo {
        out.push(Piece {
            lo,
            hi: cut_lo,
            map: Affine::constant(-dk),
            add: Line::new(Q::one(), base + shift + dk),
        });
    }
    out.push(Piece { lo: q_max(lo, cut_lo), hi: q_min(hi, cut_hi), map: Affine::new(Q::one(), shift), add: Line::constant(base) });
    if cut_hi < hi {
        out.push(Piece { lo: cut_hi, hi, map: Affine::constant(dk), add: Line::constant(base) });
    }
    out
}

fn identity_piece(lo: Q, hi: Q) -> Piece {
    Piece { lo, hi, map: Affine::identity(), add: Line::constant(zero()) }
}

impl SpStructure {
    pub fn build(net: &Network) -> Result<SpStructure> {
        let bin = reduce(net)?;
        Ok(SpStructure::from_reduction(net, &bin))
    }

    pub fn from_reduction(net: &Network, bin: &BinTree) -> SpStructure {
        let history = bin.history(net.edge_count());
        let tree = SpTree::build(net, bin);
        let count = tree.len();
        let mut s = SpStructure {
            net: net.clone(),
            build_steps: history.len(),
            history,
            tree,
            store: Store::new(),
            d: vec![zero(); count],
            omega: vec![None; count],
            prefix: vec![Vec::new(); count],
            g: vec![0; count],
            outside: vec![None; count],
            env: vec![None; count],
            leaf_fn: HashMap::new(),
        };
        let order = s.tree.preorder();
        for &x in order.iter().rev() {
            s.build_inner(x);
        }
        for &x in &order {
            s.build_outside(x);
        }
        s
    }

    fn build_inner(&mut self, x: usize) {
        let node = self.tree.node(x).clone();
        match node.kind {
            Kind::Leaf(e) => {
                let w = self.net.edge(e).w.to_q();
                self.d[x] = w;
                let id = self.store.push_leaf_tagged(-w, w, Line::new(half(Q::one()), half(w)), node.b as u32, node.a as u32);
                self.leaf_fn.insert(id, x);
                self.g[x] = id;
            }
            Kind::Parallel => {
                let d = node.children.iter().map(|&c| self.d[c]).min().expect("children");
                self.d[x] = d;
                let parts = node.children.iter().map(|&c| self.store.compose(self.g[c], &[identity_piece(-d, d)])).collect();
                self.g[x] = self.store.push(Profile::envelope(parts, false));
            }
            Kind::Series => {
                let mut prefix = vec![zero()];
                for &c in &node.children {
                    prefix.push(*prefix.last().unwrap() + self.d[c]);
                }
                let d = *prefix.last().unwrap();
                self.d[x] = d;
                let parts = node
                    .children
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| {
                        let shift = prefix[k] + prefix[k + 1] - d;
                        let pieces = shifted_pieces(-d, d, self.d[c], shift, d - prefix[k + 1]);
                        self.store.compose(self.g[c], &pieces)
                    })
                    .collect();
                self.prefix[x] = prefix;
                self.g[x] = self.store.push(Profile::envelope(parts, false));
            }
        }
    }

    /// `min(D, Ω)`: the network distance between the terminals.
    fn span(&self, x: usize) -> Q {
        opt_min(Some(self.d[x]), self.omega[x]).expect("bounded")
    }

    fn build_outside(&mut self, x: usize) {
        let node = self.tree.node(x).clone();
        let outside = self.outside[x];
        let omega = self.omega[x];
        match node.kind {
            Kind::Leaf(_) => {}
            Kind::Parallel => {
                let d = self.span(x);
                let mut parts: Vec<Profile> =
                    node.children.iter().map(|&c| self.store.compose(self.g[c], &[identity_piece(-d, d)])).collect();
                if let Some(o) = outside {
                    parts.push(self.store.compose(o, &[identity_piece(-d, d)]));
                }
                let env = Profile::envelope(parts, true);
                // two smallest child distances give each child's best sibling
                let mut ds: Vec<(Q, usize)> = node.children.iter().map(|&c| (self.d[c], c)).collect();
                ds.sort();
                for &c in &node.children {
                    let sib = if ds[0].1 == c { ds[1].0 } else { ds[0].0 };
                    self.omega[c] = opt_min(omega, Some(sib));
                    if !matches!(self.tree.node(c).kind, Kind::Leaf(_)) {
                        let o = env.derive(-d, d, Affine::identity(), Line::constant(zero()), Some(self.g[c]));
                        self.outside[c] = Some(self.store.push(o));
                    }
                }
                self.env[x] = Some(env);
            }
            Kind::Series => {
                let d = self.d[x];
                let lam = omega.map(|o| d + o);
                let prefix = self.prefix[x].clone();
                let mut parts: Vec<Profile> = node
                    .children
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| self.store.compose(self.g[c], &cycle_pieces(zero(), d, prefix[j], prefix[j + 1], lam)))
                    .collect();
                if let Some(o) = outside {
                    parts.push(self.store.compose(o, &cycle_pieces(zero(), d, zero(), d, lam)));
                }
                let env = Profile::envelope(parts, true);
                for (k, &c) in node.children.iter().enumerate() {
                    self.omega[c] = omega.map(|o| d - self.d[c] + o);
                    if !matches!(self.tree.node(c).kind, Kind::Leaf(_)) {
                        let dk = self.span(c);
                        let mid = half(prefix[k] + prefix[k + 1]);
                        let xmap = Affine::new(half(Q::one()), mid);
                        let add = Line::new(half(Q::one()), mid - prefix[k + 1]);
                        let o = env.derive(-dk, dk, xmap, add, Some(self.g[c]));
                        self.outside[c] = Some(self.store.push(o));
                    }
                }
                self.env[x] = Some(env);
            }
        }
    }
}

/// Where the outside of a leaf is read: an envelope cell coordinate plus the
/// affine correction turning the envelope value into the outside profile.
struct OutsideRead<'a> {
    env: &'a Profile,
    coord: Q,
    correction: Q,
    exclude: FnId,
}

impl SpStructure {
    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn history(&self) -> &CreationHistory {
        &self.history
    }

    pub fn tree(&self) -> &SpTree {
        &self.tree
    }

    /// Reduction steps taken while recognizing the network.
    pub fn reduction_steps(&self) -> usize {
        self.build_steps
    }

    /// Internal shortest terminal distance of a tree node.
    pub fn internal_distance(&self, x: usize) -> Q {
        self.d[x]
    }

    /// Stored function cells, a measure of the structure's size.
    pub fn size(&self) -> usize {
        self.store.total_cells() + self.env.iter().flatten().map(|p| p.cells.len()).sum::<usize>()
    }

    /// Query edge, its leaf, the offset from the leaf's `a`, and the two
    /// terminal distances.
    fn locate_query(&self, q: &PointOnEdge) -> (EdgeId, usize, Q, Q, Q) {
        let e = q.edge;
        let leaf = self.tree.leaf_of_edge[e];
        let node = self.tree.node(leaf);
        let edge = self.net.edge(e);
        let w = edge.w.to_q();
        let s = if node.a == edge.u { q.offset(&self.net) } else { w - q.offset(&self.net) };
        let (da, db) = match self.omega[leaf] {
            Some(o) => (q_min(s, w - s + o), q_min(w - s, s + o)),
            None => (s, w - s),
        };
        (e, leaf, s, da, db)
    }

    fn outside_read(&self, leaf: usize, t: Q) -> Option<OutsideRead<'_>> {
        let node = self.tree.node(leaf);
        let parent = node.parent?;
        let env = self.env[parent].as_ref().expect("inner nodes carry an envelope");
        let exclude = self.g[leaf];
        Some(match self.tree.node(parent).kind {
            Kind::Parallel => OutsideRead { env, coord: t, correction: zero(), exclude },
            Kind::Series => {
                let p = &self.prefix[parent];
                let x = half(t + p[node.pos] + p[node.pos + 1]);
                OutsideRead { env, coord: x, correction: x - p[node.pos + 1], exclude }
            }
            Kind::Leaf(_) => unreachable!("leaves have no children"),
        })
    }

    fn read_level(&self, r: &OutsideRead, probes: &mut u64) -> (Level, Q) {
        let cell = crate::plf::profile::locate_counted(&r.env.xs, r.coord, probes);
        let level = r.env.cells[cell].level_excluding(Some(r.exclude));
        let v = level.line.at(r.coord) + r.correction;
        (level, v)
    }

    /// Farthest distance only.
    pub fn farthest_distance(&self, q: &PointOnEdge) -> Q {
        self.farthest_distance_stats(q).0
    }

    pub fn farthest_distance_stats(&self, q: &PointOnEdge) -> (Q, QueryStats) {
        let (e, leaf, s, da, db) = self.locate_query(q);
        let mut acc = MaxCollector::new();
        own_edge(&self.net, e, self.tree.node(leaf).a, s, da, db, &mut acc);
        let mut best = *acc.best().expect("own edge has candidates");
        let mut probes = 0;
        if let Some(r) = self.outside_read(leaf, da - db) {
            let (_, v) = self.read_level(&r, &mut probes);
            best = q_max(best, db + v);
        }
        (best, QueryStats { probes })
    }

    pub fn farthest_points(&self, q: &PointOnEdge) -> FarthestResult {
        self.farthest_points_stats(q).0
    }

    pub fn farthest_points_stats(&self, q: &PointOnEdge) -> (FarthestResult, QueryStats) {
        let (e, leaf, s, da, db) = self.locate_query(q);
        let mut acc = MaxCollector::new();
        own_edge(&self.net, e, self.tree.node(leaf).a, s, da, db, &mut acc);
        let mut probes = 0;
        if let Some(r) = self.outside_read(leaf, da - db) {
            let (level, v) = self.read_level(&r, &mut probes);
            let value = db + v;
            if acc.best().map_or(true, |b| value >= *b) {
                for o in &level.owners {
                    self.store.report(o.func, o.cell as usize, o.map.apply(r.coord), &mut probes, &mut |f, _, t| {
                        acc.offer(value, self.leaf_point(f, t));
                    });
                }
            }
        }
        (acc.finish(), QueryStats { probes })
    }

    fn leaf_point(&self, f: FnId, t: Q) -> PointOnEdge {
        let leaf = self.leaf_fn[&f];
        let node = self.tree.node(leaf);
        let Kind::Leaf(e) = node.kind else { unreachable!("leaf functions belong to leaves") };
        let w = self.net.edge(e).w.to_q();
        PointOnEdge::at_offset(&self.net, e, node.a, half(w - t))
    }
}

/// Candidates on the query's own edge: `r` measured from `a`, reached directly
/// or around through either end.
fn own_edge(net: &Network, e: EdgeId, a: VertexId, s: Q, da: Q, db: Q, acc: &mut MaxCollector) {
    let w = net.edge(e).w.to_q();
    let f = |r: Q| q_min(q_abs(s - r), q_min(da + r, db + w - r));
    let mut cands = vec![zero(), w, s];
    for inc in [-s, da] {
        for dec in [s, db + w] {
            cands.push(half(dec - inc));
        }
    }
    cands.retain(|r| *r >= zero() && *r <= w);
    let vals: Vec<(Q, Q)> = cands.into_iter().map(|r| (r, f(r))).collect();
    let best = vals.iter().map(|v| v.1).max().expect("endpoints are candidates");
    for (r, v) in vals {
        if v == best {
            acc.offer(v, PointOnEdge::at_offset(net, e, a, r));
        }
    }
}

pub fn farthest_points_sp(s: &SpStructure, q: &PointOnEdge) -> FarthestResult {
    s.farthest_points(q)
}

pub fn farthest_distance_sp(s: &SpStructure, q: &PointOnEdge) -> Q {
    s.farthest_distance(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::build_network;
    use crate::oracle::oracle_farthest;

    fn sp1() -> Network {
        build_network(5, &[(0, 1, "10"), (0, 2, "2"), (2, 3, "1.5"), (3, 1, "1.5"), (2, 4, "2"), (4, 1, "2")]).unwrap()
    }

    fn check_all(net: &Network) {
        let s = SpStructure::build(net).unwrap();
        for e in 0..net.edge_count() {
            for (a, b) in [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1), (1, 3), (2, 7)] {
                let q = PointOnEdge::new(e, Q::new(a, b));
                let want = oracle_farthest(net, &q);
                let got = s.farthest_points(&q);
                assert_eq!(got, want, "edge {e} lambda {a}/{b}");
                assert_eq!(s.farthest_distance(&q), want.distance);
            }
        }
    }

    #[test]
    fn sp1_examples() {
        let net = sp1();
        let s = SpStructure::build(&net).unwrap();
        let u = PointOnEdge::vertex(&net, 0);
        assert_eq!(s.farthest_distance(&u), Q::from_integer(15_000_000));
        let c = PointOnEdge::vertex(&net, 4);
        assert_eq!(s.farthest_distance(&c), Q::from_integer(16_000_000));
        check_all(&net);
    }

    #[test]
    fn small_shapes() {
        check_all(&build_network(2, &[(0, 1, "3")]).unwrap());
        check_all(&build_network(3, &[(0, 1, "2"), (0, 2, "3"), (2, 1, "3")]).unwrap());
        check_all(&build_network(4, &[(0, 1, "1"), (1, 2, "2"), (2, 3, "1")]).unwrap());
        check_all(&build_network(5, &[(0, 1, "1"), (1, 2, "1"), (2, 0, "1"), (2, 3, "1"), (3, 4, "2")]).unwrap());
        check_all(&build_network(4, &[(0, 1, "1"), (1, 2, "1"), (2, 3, "1"), (3, 0, "1")]).unwrap());
    }
}

impl crate::testkit::check::FarthestQuery for SpStructure {
    fn network(&self) -> &Network {
        &self.net
    }

    fn farthest_points(&self, q: &PointOnEdge) -> FarthestResult {
        SpStructure::farthest_points(self, q)
    }

    fn farthest_distance(&self, q: &PointOnEdge) -> Q {
        SpStructure::farthest_distance(self, q)
    }
}
