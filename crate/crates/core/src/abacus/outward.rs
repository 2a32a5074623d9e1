//! Outward reporting. Each chain gets its farthest function over the virtual
//! edge, built from one local function per arc plus one for the path, split
//! wherever the farthest point changes edge. One two-level envelope covers
//! all chains; its cells link into the chains' envelopes, so after one search
//! every reported point costs a constant number of steps.

use num_traits::Zero;

use crate::bead_chain::BeadChain;
use crate::error::Result;
use crate::exact::{half, q_min, Q};
use crate::network::{MaxCollector, Network, PointOnEdge};
use crate::plf::arcshape::{cycle_dist, wrap};
use crate::plf::envelope::{upper_envelope_fine, Domain, EnvCell, Levels, PLFunction, UpperEnvelope};
use crate::walk::Walk;

#[derive(Debug, Clone, Copy)]
enum Spot {
    /// A terminal: 0 for `u`, 1 for `v`.
    Terminal(usize),
    /// On edge `k` of the path.
    Path(usize),
    /// On edge `k` of arc `a`.
    Arc(usize, usize),
}

/// Chain `j` seen from the virtual edge, positions `z` measured from `v`.
#[derive(Debug, Clone)]
pub(crate) struct ChainOutward {
    path: Walk,
    /// The chain closed by the virtual edge.
    chain: BeadChain,
    /// Position on the path (from `u`) of the antipode of `z` is `z - shift`.
    shift: Q,
    /// Breakpoints of each local function: 0 is the path, `1 + a` arc `a`.
    xs: Vec<Vec<Q>>,
    spots: Vec<Vec<Spot>>,
    env: UpperEnvelope,
    seg_pieces: Vec<Vec<usize>>,
    vtx_pieces: Vec<Vec<usize>>,
}

fn piece_at(xs: &[Q], x: Q) -> usize {
    (xs.partition_point(|&b| b <= x).max(1) - 1).min(xs.len() - 2)
}

impl ChainOutward {
    pub(crate) fn new(path: Walk, chain: BeadChain, w: Q) -> Result<ChainOutward> {
        let wj = path.len();
        let shift = half(w - wj);
        let dom = Domain::Linear(w);
        let mut xs = Vec::with_capacity(chain.arcs.len() + 1);
        let mut spots = Vec::with_capacity(chain.arcs.len() + 1);

        // the path: a tent clipped at the antipodal plateau
        let mut px = vec![Q::zero()];
        px.extend(path.prefix.iter().map(|&p| p + shift));
        px.push(w);
        px.dedup();
        let mut ps = Vec::with_capacity(px.len());
        let mut k = 0;
        for p in px.windows(2) {
            let mid = half(p[0] + p[1]);
            ps.push(if mid < shift {
                Spot::Terminal(0)
            } else if mid > shift + wj {
                Spot::Terminal(1)
            } else {
                k += 1;
                Spot::Path(k - 1)
            });
        }
        xs.push(px);
        spots.push(ps);

        let len = chain.cycle_len();
        for (a, (arc, h)) in chain.arcs.iter().zip(&chain.shapes).enumerate() {
            let off = |z: Q| {
                let p = wj + z;
                half(cycle_dist(len, p, h.b()) + arc.w_alpha() - cycle_dist(len, p, h.a))
            };
            let mut base: Vec<Q> = [h.a, h.b(), h.bar_a(), h.bar_b()].iter().map(|&p| wrap(len, p) - wj).filter(|&z| z > Q::zero() && z < w).collect();
            base.push(Q::zero());
            base.push(w);
            base.sort();
            base.dedup();
            // where the farthest point passes an interior vertex of the arc
            let mut zs = base.clone();
            for p in base.windows(2) {
                let (o0, o1) = (off(p[0]), off(p[1]));
                if o0 == o1 {
                    continue;
                }
                let (lo, hi) = if o0 < o1 { (o0, o1) } else { (o1, o0) };
                for &o in &arc.walk.prefix[1..arc.walk.prefix.len() - 1] {
                    if lo < o && o < hi {
                        zs.push(p[0] + (o - o0) * (p[1] - p[0]) / (o1 - o0));
                    }
                }
            }
            zs.sort();
            zs.dedup();
            spots.push(zs.windows(2).map(|p| Spot::Arc(a, arc.walk.locate(off(half(p[0] + p[1])), &mut 0))).collect());
            xs.push(zs);
        }

        let mut fs = Vec::with_capacity(xs.len());
        let top = half(w + wj);
        fs.push(PLFunction::new(dom, xs[0].iter().map(|&z| (z, q_min(q_min(wj + z, top), wj + w - z))).collect(), 0)?);
        for (a, h) in chain.shapes.iter().enumerate() {
            fs.push(PLFunction::new(dom, xs[a + 1].iter().map(|&z| (z, h.value_at(wj + z))).collect(), a + 1)?);
        }
        let env = upper_envelope_fine(&fs)?;
        let seg_pieces = (0..env.segments()).map(|k| env.seg_owners[k].iter().map(|&f| piece_at(&xs[f], env.xs[k])).collect()).collect();
        let vtx_pieces = (0..env.xs.len()).map(|k| env.vertex_owners[k].iter().map(|&f| piece_at(&xs[f], env.xs[k])).collect()).collect();
        Ok(ChainOutward { path, chain, shift, xs, spots, env, seg_pieces, vtx_pieces })
    }

    /// `F_j`, with a breakpoint wherever a farthest point changes edge.
    pub(crate) fn function(&self, owner: usize) -> Result<PLFunction> {
        PLFunction::new(Domain::Linear(*self.xs[0].last().unwrap()), self.env.breakpoints(), owner)
    }

    /// The cell of this chain's envelope containing the cell `[x0, x1]` of an
    /// envelope with all of our breakpoints.
    fn link(&self, x0: Q, vertex: bool) -> EnvCell {
        let k = self.env.xs.partition_point(|&b| b < x0);
        if k < self.env.xs.len() && self.env.xs[k] == x0 && vertex {
            EnvCell::Vertex(k)
        } else {
            EnvCell::Segment(piece_at(&self.env.xs, x0))
        }
    }

    fn report(&self, net: &Network, cell: EnvCell, z: Q, dist: Q, out: &mut MaxCollector, probes: &mut u64) {
        let (owners, pieces) = match cell {
            EnvCell::Vertex(k) => (&self.env.vertex_owners[k], &self.vtx_pieces[k]),
            EnvCell::Segment(k) => (&self.env.seg_owners[k], &self.seg_pieces[k]),
        };
        let len = self.chain.cycle_len();
        for (&f, &piece) in owners.iter().zip(pieces) {
            *probes += 1;
            let p = match self.spots[f][piece] {
                Spot::Terminal(t) => PointOnEdge::vertex(net, if t == 0 { self.path.vertices[0] } else { *self.path.vertices.last().unwrap() }),
                Spot::Path(k) => self.path.point_on(net, k, z - self.shift),
                Spot::Arc(a, k) => {
                    let (arc, h) = (&self.chain.arcs[a], &self.chain.shapes[a]);
                    let pos = self.path.len() + z;
                    let off = half(cycle_dist(len, pos, h.b()) + arc.w_alpha() - cycle_dist(len, pos, h.a));
                    arc.walk.point_on(net, k, off)
                }
            };
            out.offer(dist, p);
        }
    }
}

/// Both levels over all chains, with every owner of every cell linked to its
/// cell in that chain's envelope.
#[derive(Debug, Clone)]
pub(crate) struct OutwardIndex {
    pub(crate) chains: Vec<ChainOutward>,
    levels: Levels,
    /// `[u1, u2]`, then segments and vertices, aligned with the owner lists.
    seg_links: [Vec<Vec<EnvCell>>; 2],
    vtx_links: [Vec<Vec<EnvCell>>; 2],
}

fn links(e: &UpperEnvelope, chains: &[ChainOutward]) -> (Vec<Vec<EnvCell>>, Vec<Vec<EnvCell>>) {
    let seg = (0..e.segments()).map(|k| e.seg_owners[k].iter().map(|&j| chains[j].link(e.xs[k], false)).collect()).collect();
    let vtx = (0..e.xs.len()).map(|k| e.vertex_owners[k].iter().map(|&j| chains[j].link(e.xs[k], true)).collect()).collect();
    (seg, vtx)
}

impl OutwardIndex {
    pub(crate) fn new(chains: Vec<ChainOutward>) -> Result<OutwardIndex> {
        let fs = chains.iter().enumerate().map(|(j, c)| c.function(j)).collect::<Result<Vec<_>>>()?;
        let levels = Levels::fine(&fs)?;
        let (s1, v1) = links(&levels.u1, &chains);
        let (s2, v2) = levels.u2.as_ref().map(|u2| links(u2, &chains)).unwrap_or_default();
        Ok(OutwardIndex { chains, levels, seg_links: [s1, s2], vtx_links: [v1, v2] })
    }

    pub(crate) fn envelope(&self) -> &UpperEnvelope {
        &self.levels.u1
    }

    pub(crate) fn function(&self, j: usize) -> Result<PLFunction> {
        self.chains[j].function(j)
    }

    /// Farthest points outside chain `skip` from virtual position `z`, with
    /// every distance increased by `extra`.
    pub(crate) fn query(&self, net: &Network, z: Q, extra: Q, skip: usize, out: &mut MaxCollector, probes: &mut u64) {
        let Some((second, cell)) = self.levels.locate_excluding(z, Some(skip), probes) else { return };
        let e = if second { self.levels.u2.as_ref().unwrap() } else { &self.levels.u1 };
        let dist = e.cell_value(cell, z) + extra;
        if out.best().is_some_and(|b| dist < *b) {
            return;
        }
        let l = usize::from(second);
        let (owners, links) = match cell {
            EnvCell::Vertex(k) => (&e.vertex_owners[k], &self.vtx_links[l][k]),
            EnvCell::Segment(k) => (&e.seg_owners[k], &self.seg_links[l][k]),
        };
        // every linked chain yields at least one candidate, counted there
        for (&j, &c) in owners.iter().zip(links) {
            if j != skip {
                self.chains[j].report(net, c, z, dist, out, probes);
            }
        }
    }
}
