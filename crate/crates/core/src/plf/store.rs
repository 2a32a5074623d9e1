//! Arena of finished piecewise-linear functions.
//!
//! Functions reference cells of earlier functions through [`OwnerRef`]s, which
//! lets a farthest-point query walk from an envelope cell down to the leaf
//! functions that realize it. Chains of single-owner cells are collapsed into
//! one precomputed jump, so only cells where the answer branches are visited.

use crate::exact::Q;

use super::profile::{locate_counted, locate_in, owners_vertex, Affine, Cell, FnId, Level, Line, OwnerRef, Profile};

#[derive(Debug, Clone)]
pub struct FnCell {
    pub line: Line,
    pub owners: Vec<OwnerRef>,
    /// For single-owner cells: the first cell further down with zero or
    /// several owners, and the composed coordinate map to reach it.
    pub jump: Option<OwnerRef>,
    /// The single vertex realizing this cell, when there is one.
    pub vertex: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct PlFn {
    pub xs: Vec<Q>,
    pub cells: Vec<FnCell>,
}

impl PlFn {
    pub fn lo(&self) -> Q {
        self.xs[0]
    }

    pub fn hi(&self) -> Q {
        *self.xs.last().expect("non-empty function")
    }

    pub fn locate(&self, x: Q) -> usize {
        locate_in(&self.xs, x)
    }

    pub fn locate_counted(&self, x: Q, probes: &mut u64) -> usize {
        locate_counted(&self.xs, x, probes)
    }

    pub fn value_at(&self, x: Q) -> Q {
        self.cells[self.locate(x)].line.at(x)
    }

    pub fn segments(&self) -> usize {
        self.xs.len() - 1
    }

    /// Breakpoints as `(x, value)` pairs.
    pub fn breakpoints(&self) -> Vec<(Q, Q)> {
        self.xs.iter().enumerate().map(|(i, x)| (*x, self.cells[2 * i].line.at(*x))).collect()
    }
}

/// One affine piece of a composition `x ↦ f(map(x)) + add(x)` on `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct Piece {
    pub lo: Q,
    pub hi: Q,
    pub map: Affine,
    pub add: Line,
}

#[derive(Debug, Clone, Default)]
pub struct Store {
    fns: Vec<PlFn>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn len(&self) -> usize {
        self.fns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fns.is_empty()
    }

    pub fn get(&self, id: FnId) -> &PlFn {
        &self.fns[id as usize]
    }

    pub fn total_cells(&self) -> usize {
        self.fns.iter().map(|f| f.cells.len()).sum()
    }

    /// Stores the top level of a profile.
    pub fn push(&mut self, profile: Profile) -> FnId {
        let cells = profile
            .cells
            .into_iter()
            .map(|c| {
                let jump = self.jump_for(&c.top.owners);
                let vertex = owners_vertex(&c.top.owners);
                FnCell { line: c.top.line, owners: c.top.owners, jump, vertex }
            })
            .collect();
        self.fns.push(PlFn { xs: profile.xs, cells });
        (self.fns.len() - 1) as FnId
    }

    /// Stores a single line with no owners: a leaf of the ownership graph.
    pub fn push_leaf(&mut self, lo: Q, hi: Q, line: Line) -> FnId {
        self.push(Profile::from_line(lo, hi, line))
    }

    /// A leaf whose end cells are realized by the given vertices.
    pub fn push_leaf_tagged(&mut self, lo: Q, hi: Q, line: Line, at_lo: u32, at_hi: u32) -> FnId {
        let id = self.push_leaf(lo, hi, line);
        let f = &mut self.fns[id as usize];
        f.cells[0].vertex = Some(at_lo);
        let last = f.cells.len() - 1;
        f.cells[last].vertex = Some(at_hi);
        id
    }

    fn jump_for(&self, owners: &[OwnerRef]) -> Option<OwnerRef> {
        if owners.len() != 1 {
            return None;
        }
        let o = owners[0];
        let target = &self.get(o.func).cells[o.cell as usize];
        match target.jump {
            Some(j) => Some(OwnerRef { map: o.map.then(&j.map), ..j }),
            None => Some(o),
        }
    }

    /// Builds the profile of `x ↦ f(map(x)) + add(x)` over consecutive pieces.
    /// Each cell of the result is owned by the cell of `f` it reads from.
    pub fn compose(&self, fid: FnId, pieces: &[Piece]) -> Profile {
        let f = self.get(fid);
        let mut xs = Vec::new();
        let mut cells = Vec::new();
        let owned = |cell: usize, map: Affine, line: Line| Cell {
            top: Level { line, owners: vec![OwnerRef::new(fid, cell as u32, map, f.cells[cell].vertex)] },
            second: None,
        };
        let vertex = |x: Q, map: &Affine, add: &Line| {
            let cx = map.apply(x);
            let c = f.locate(cx);
            owned(c, *map, Line::constant(f.cells[c].line.at(cx) + add.at(x)))
        };
        for (pi, pc) in pieces.iter().enumerate() {
            debug_assert!(pc.lo < pc.hi, "empty composition piece");
            if pi > 0 {
                debug_assert_eq!(pieces[pi - 1].hi, pc.lo, "pieces must be consecutive");
            }
            let mut cuts = vec![pc.lo];
            if pc.map.alpha != Q::from_integer(0) {
                let (a, b) = (pc.map.apply(pc.lo), pc.map.apply(pc.hi));
                let (cmin, cmax) = if a < b { (a, b) } else { (b, a) };
                let mut inner: Vec<Q> = f
                    .xs
                    .iter()
                    .filter(|&&c| c > cmin && c < cmax)
                    .map(|&c| (c - pc.map.beta) / pc.map.alpha)
                    .collect();
                inner.sort();
                cuts.extend(inner);
            }
            cuts.push(pc.hi);
            for w in cuts.windows(2) {
                let (l, r) = (w[0], w[1]);
                xs.push(l);
                cells.push(vertex(l, &pc.map, &pc.add));
                let mid = (l + r) / Q::from_integer(2);
                let c = f.locate(pc.map.apply(mid));
                let line = f.cells[c].line.compose(&pc.map).plus(&pc.add);
                cells.push(owned(c, pc.map, line));
            }
        }
        let last = pieces.last().expect("at least one piece");
        xs.push(last.hi);
        cells.push(vertex(last.hi, &last.map, &last.add));
        let mut p = Profile { xs, cells };
        p.compact();
        p
    }

    /// Walks from a cell down to the leaf cells that realize it, calling
    /// `visit(leaf_fn, leaf_cell, leaf_coordinate)` once per path.
    pub fn report(&self, func: FnId, cell: usize, x: Q, probes: &mut u64, visit: &mut impl FnMut(FnId, usize, Q)) {
        let mut stack = vec![(func, cell, x)];
        while let Some((f, c, x)) = stack.pop() {
            *probes += 1;
            let fc = &self.get(f).cells[c];
            match fc.owners.len() {
                0 => visit(f, c, x),
                1 => {
                    let j = fc.jump.expect("single-owner cells carry a jump");
                    stack.push((j.func, j.cell as usize, j.map.apply(x)));
                }
                _ => {
                    for o in &fc.owners {
                        stack.push((o.func, o.cell as usize, o.map.apply(x)));
                    }
                }
            }
        }
    }
}

impl Profile {
    /// Re-parametrizes a slice of this profile. The new coordinate `t` maps to
    /// `x = xmap(t)` (`xmap.alpha > 0`) over `t ∈ [t_lo, t_hi]`; the value becomes
    /// `old(x) + add(t)`. With `exclude`, owners from that function are removed
    /// and the second level is used where nothing else attains the top.
    pub fn derive(&self, t_lo: Q, t_hi: Q, xmap: Affine, add: Line, exclude: Option<FnId>) -> Profile {
        debug_assert!(xmap.alpha > Q::from_integer(0));
        let x_lo = xmap.apply(t_lo);
        let x_hi = xmap.apply(t_hi);
        let choose = |c: &Cell| -> Level { c.level_excluding(exclude) };
        let inv = |x: Q| (x - xmap.beta) / xmap.alpha;
        let remap = |lvl: Level, point: Option<Q>| -> Cell {
            let owners = lvl.owners.iter().map(|o| OwnerRef { map: xmap.then(&o.map), ..*o }).collect();
            let line = match point {
                Some(t) => Line::constant(lvl.line.at(xmap.apply(t)) + add.at(t)),
                None => lvl.line.compose(&xmap).plus(&add),
            };
            Cell { top: Level { line, owners }, second: None }
        };
        let mut xs = Vec::new();
        let mut cells = Vec::new();
        let start = locate_in(&self.xs, x_lo);
        let end = locate_in(&self.xs, x_hi);
        xs.push(t_lo);
        cells.push(remap(choose(&self.cells[start]), Some(t_lo)));
        let mut c = if start % 2 == 0 { start + 1 } else { start };
        loop {
            // c is a segment cell starting at or before the current position
            cells.push(remap(choose(&self.cells[c]), None));
            if c + 1 > end || c == end {
                break;
            }
            let vx = self.xs[(c + 1) / 2];
            if vx >= x_hi {
                break;
            }
            xs.push(inv(vx));
            cells.push(remap(choose(&self.cells[c + 1]), Some(inv(vx))));
            c += 2;
        }
        xs.push(t_hi);
        cells.push(remap(choose(&self.cells[end]), Some(t_hi)));
        let mut p = Profile { xs, cells };
        p.compact();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    #[test]
    fn compose_clamped_shift() {
        let mut s = Store::new();
        // f(t) = (t + 4)/2 on [-4, 4]
        let f = s.push_leaf(q_int(-4), q_int(4), Line::new(Q::new(1, 2), q_int(2)));
        // g(x) = f(clamp(x - 2)) with slope-1 extension below -4, on [-10, 10]
        let pieces = [
            Piece { lo: q_int(-10), hi: q_int(-2), map: Affine::constant(q_int(-4)), add: Line::new(q_int(1), q_int(-2 + 4)) },
            Piece { lo: q_int(-2), hi: q_int(6), map: Affine::new(q_int(1), q_int(-2)), add: Line::constant(q_int(0)) },
            Piece { lo: q_int(6), hi: q_int(10), map: Affine::constant(q_int(4)), add: Line::constant(q_int(0)) },
        ];
        let p = s.compose(f, &pieces);
        assert_eq!(p.value_at(q_int(-10)), q_int(-8));
        assert_eq!(p.value_at(q_int(-2)), q_int(0));
        assert_eq!(p.value_at(q_int(2)), q_int(2));
        assert_eq!(p.value_at(q_int(6)), q_int(4));
        assert_eq!(p.value_at(q_int(9)), q_int(4));
        let id = s.push(p);
        let mut probes = 0;
        let mut hits = Vec::new();
        let g = s.get(id);
        s.report(id, g.locate(q_int(2)), q_int(2), &mut probes, &mut |fid, _, x| hits.push((fid, x)));
        assert_eq!(hits, vec![(f, q_int(0))]);
        let mut hits = Vec::new();
        s.report(id, g.locate(q_int(9)), q_int(9), &mut probes, &mut |fid, _, x| hits.push((fid, x)));
        assert_eq!(hits, vec![(f, q_int(4))]);
    }

    #[test]
    fn derive_with_exclusion() {
        let mut s = Store::new();
        let a = s.push_leaf(q_int(0), q_int(10), Line::constant(q_int(5)));
        let b = s.push_leaf(q_int(0), q_int(10), Line::new(q_int(1), q_int(0)));
        let pa = s.compose(a, &[Piece { lo: q_int(0), hi: q_int(10), map: Affine::identity(), add: Line::constant(q_int(0)) }]);
        let pb = s.compose(b, &[Piece { lo: q_int(0), hi: q_int(10), map: Affine::identity(), add: Line::constant(q_int(0)) }]);
        let env = Profile::envelope(vec![pa, pb], true);
        assert_eq!(env.value_at(q_int(2)), q_int(5));
        // exclude a on [2, 8], reparametrized by t = x - 2
        let d = env.derive(q_int(0), q_int(6), Affine::new(q_int(1), q_int(2)), Line::constant(q_int(0)), Some(a));
        assert_eq!(d.value_at(q_int(0)), q_int(2));
        assert_eq!(d.value_at(q_int(5)), q_int(7));
        assert_eq!(d.segments(), 1);
        // exclude b: a's constant below x=5, nothing of b remains
        let d = env.derive(q_int(0), q_int(6), Affine::new(q_int(1), q_int(2)), Line::constant(q_int(0)), Some(b));
        assert_eq!(d.value_at(q_int(6)), q_int(5));
    }
}
