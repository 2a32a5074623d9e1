//! Owner-tracking piecewise-linear profiles and their upper envelopes.
//!
//! A [`Profile`] lives on a closed interval `[xs[0], xs[last]]` and is stored as
//! alternating cells: even cells are the breakpoints `xs[i]`, odd cells the open
//! segments between them. Every cell carries the topmost [`Level`] (a line plus
//! every source function attaining it) and optionally the second level, i.e.
//! the best value among the functions not attaining the top.

use num_traits::{One, Zero};

use crate::exact::{half, Q};

pub type FnId = u32;

/// `v(x) = slope·x + icpt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub slope: Q,
    pub icpt: Q,
}

impl Line {
    pub fn new(slope: Q, icpt: Q) -> Line {
        Line { slope, icpt }
    }

    pub fn constant(v: Q) -> Line {
        Line { slope: Q::zero(), icpt: v }
    }

    /// The line through `(x, v)` with the given slope.
    pub fn through(x: Q, v: Q, slope: Q) -> Line {
        Line { slope, icpt: v - slope * x }
    }

    pub fn at(&self, x: Q) -> Q {
        self.slope * x + self.icpt
    }

    pub fn plus(&self, o: &Line) -> Line {
        Line { slope: self.slope + o.slope, icpt: self.icpt + o.icpt }
    }

    /// `self ∘ map`.
    pub fn compose(&self, map: &Affine) -> Line {
        Line { slope: self.slope * map.alpha, icpt: self.slope * map.beta + self.icpt }
    }

    pub fn crossing(&self, o: &Line) -> Option<Q> {
        if self.slope == o.slope {
            None
        } else {
            Some((o.icpt - self.icpt) / (self.slope - o.slope))
        }
    }
}

/// Coordinate map `x ↦ alpha·x + beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub alpha: Q,
    pub beta: Q,
}

impl Affine {
    pub fn new(alpha: Q, beta: Q) -> Affine {
        Affine { alpha, beta }
    }

    pub fn identity() -> Affine {
        Affine { alpha: Q::one(), beta: Q::zero() }
    }

    pub fn constant(c: Q) -> Affine {
        Affine { alpha: Q::zero(), beta: c }
    }

    pub fn apply(&self, x: Q) -> Q {
        self.alpha * x + self.beta
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Affine) -> Affine {
        Affine { alpha: next.alpha * self.alpha, beta: next.alpha * self.beta + next.beta }
    }
}

/// A cell of a stored function, reached through a coordinate map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OwnerRef {
    pub func: FnId,
    pub cell: u32,
    pub map: Affine,
    /// Set when every point realizing the referenced cell is this one vertex.
    pub vertex: Option<u32>,
}

impl OwnerRef {
    pub fn new(func: FnId, cell: u32, map: Affine, vertex: Option<u32>) -> OwnerRef {
        OwnerRef { func, cell, map, vertex }
    }
}

/// The common vertex of a non-empty owner list, if all owners are tagged with it.
pub fn owners_vertex(owners: &[OwnerRef]) -> Option<u32> {
    let v = owners.first()?.vertex?;
    owners.iter().all(|o| o.vertex == Some(v)).then_some(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub line: Line,
    pub owners: Vec<OwnerRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub top: Level,
    pub second: Option<Level>,
}

impl Cell {
    /// The top level without the owners from `exclude`, falling back to the
    /// second level where only that function attains the top.
    pub fn level_excluding(&self, exclude: Option<FnId>) -> Level {
        let Some(ex) = exclude else { return self.top.clone() };
        if !self.top.owners.iter().any(|o| o.func == ex) {
            return self.top.clone();
        }
        let owners: Vec<OwnerRef> = self.top.owners.iter().copied().filter(|o| o.func != ex).collect();
        if !owners.is_empty() {
            Level { line: self.top.line, owners }
        } else {
            self.second.clone().expect("second level present where the excluded function is alone on top")
        }
    }

    fn same_owners(&self, o: &Cell) -> bool {
        self.top.owners == o.top.owners
            && match (&self.second, &o.second) {
                (None, None) => true,
                (Some(a), Some(b)) => a.owners == b.owners,
                _ => false,
            }
    }

    fn same_segment(&self, o: &Cell) -> bool {
        self.top.line == o.top.line
            && self.same_owners(o)
            && match (&self.second, &o.second) {
                (Some(a), Some(b)) => a.line == b.line,
                _ => true,
            }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub xs: Vec<Q>,
    pub cells: Vec<Cell>,
}

/// Index of the cell containing `x` (vertex cells are even, segments odd).
pub fn locate_in(xs: &[Q], x: Q) -> usize {
    match xs.binary_search(&x) {
        Ok(i) => 2 * i,
        Err(i) => {
            debug_assert!(i > 0 && i < xs.len(), "coordinate outside the domain");
            let i = i.clamp(1, xs.len() - 1);
            2 * (i - 1) + 1
        }
    }
}

/// Like [`locate_in`], counting binary-search steps.
pub fn locate_counted(xs: &[Q], x: Q, probes: &mut u64) -> usize {
    let (mut lo, mut hi) = (0usize, xs.len());
    while lo < hi {
        *probes += 1;
        let mid = (lo + hi) / 2;
        if xs[mid] < x {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if lo < xs.len() && xs[lo] == x {
        2 * lo
    } else {
        debug_assert!(lo > 0 && lo < xs.len(), "coordinate outside the domain");
        let i = lo.clamp(1, xs.len() - 1);
        2 * (i - 1) + 1
    }
}

fn union_owners(a: &[OwnerRef], b: &[OwnerRef]) -> Vec<OwnerRef> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    dedup_vertices(&mut out);
    out
}

/// Several owners that all realize the same single vertex are one point; keep
/// the owner from the most recently built function.
fn dedup_vertices(owners: &mut Vec<OwnerRef>) {
    let mut tagged: Vec<(u32, FnId)> = owners.iter().filter_map(|o| o.vertex.map(|v| (v, o.func))).collect();
    if tagged.len() < 2 {
        return;
    }
    tagged.sort_unstable_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
    tagged.dedup_by_key(|t| t.0);
    if tagged.len() == owners.iter().filter(|o| o.vertex.is_some()).count() {
        return;
    }
    let mut kept = vec![false; tagged.len()];
    owners.retain(|o| match o.vertex {
        None => true,
        Some(v) => {
            let i = tagged.binary_search_by_key(&v, |t| t.0).expect("tag collected");
            if tagged[i].1 == o.func && !kept[i] {
                kept[i] = true;
                true
            } else {
                false
            }
        }
    });
}

/// A level evaluated at the comparison coordinate.
#[derive(Clone, Copy)]
struct Ev<'a> {
    v: Q,
    level: &'a Level,
}

fn ev<'a>(level: &'a Level, x: Q) -> Ev<'a> {
    Ev { v: level.line.at(x), level }
}

/// Output level: on segments keep the source line, at points freeze the value.
fn out_level(e: &Ev, owners: Vec<OwnerRef>, point: bool) -> Level {
    let line = if point { Line::constant(e.v) } else { e.level.line };
    Level { line, owners }
}

fn max_group(a: Option<Ev>, b: Option<Ev>, point: bool) -> Option<Level> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(out_level(&x, x.level.owners.clone(), point)),
        (Some(x), Some(y)) => {
            if x.v > y.v {
                Some(out_level(&x, x.level.owners.clone(), point))
            } else if y.v > x.v {
                Some(out_level(&y, y.level.owners.clone(), point))
            } else {
                Some(out_level(&x, union_owners(&x.level.owners, &y.level.owners), point))
            }
        }
    }
}

fn combine(a: &Cell, b: &Cell, x: Q, point: bool, second: bool) -> Cell {
    let at = ev(&a.top, x);
    let bt = ev(&b.top, x);
    let a2 = a.second.as_ref().map(|l| ev(l, x));
    let b2 = b.second.as_ref().map(|l| ev(l, x));
    let (top, sec) = if at.v > bt.v {
        (out_level(&at, at.level.owners.clone(), point), if second { max_group(a2, Some(bt), point) } else { None })
    } else if bt.v > at.v {
        (out_level(&bt, bt.level.owners.clone(), point), if second { max_group(b2, Some(at), point) } else { None })
    } else {
        (
            out_level(&at, union_owners(&at.level.owners, &bt.level.owners), point),
            if second { max_group(a2, b2, point) } else { None },
        )
    };
    Cell { top, second: sec }
}

fn cell_lines(c: &Cell) -> impl Iterator<Item = &Line> {
    std::iter::once(&c.top.line).chain(c.second.as_ref().map(|l| &l.line))
}

/// Segment cell of a profile covering the open interval starting at `x`.
fn seg_after(p: &Profile, idx: &mut usize, x: Q) -> usize {
    while *idx + 2 < p.xs.len() && p.xs[*idx + 1] <= x {
        *idx += 1;
    }
    2 * *idx + 1
}

/// Cell of a profile at coordinate `x`, advancing a monotone cursor.
fn cell_at(p: &Profile, idx: &mut usize, x: Q) -> usize {
    while *idx + 1 < p.xs.len() && p.xs[*idx + 1] <= x {
        *idx += 1;
    }
    if p.xs[*idx] == x {
        2 * *idx
    } else {
        2 * *idx + 1
    }
}

impl Profile {
    pub fn lo(&self) -> Q {
        self.xs[0]
    }

    pub fn hi(&self) -> Q {
        *self.xs.last().expect("non-empty profile")
    }

    pub fn segments(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn value_at(&self, x: Q) -> Q {
        let c = locate_in(&self.xs, x);
        self.cells[c].top.line.at(x)
    }

    pub fn cell(&self, x: Q) -> &Cell {
        &self.cells[locate_in(&self.xs, x)]
    }

    /// Pointwise envelope of two profiles on the same domain.
    pub fn merge(a: &Profile, b: &Profile, second: bool) -> Profile {
        assert_eq!(a.lo(), b.lo(), "profiles must share a domain");
        assert_eq!(a.hi(), b.hi(), "profiles must share a domain");
        let mut xs: Vec<Q> = Vec::with_capacity(a.xs.len() + b.xs.len());
        let (mut i, mut j) = (0, 0);
        while i < a.xs.len() || j < b.xs.len() {
            let next = match (a.xs.get(i), b.xs.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                    *x
                }
                (Some(x), Some(y)) if x < y => {
                    i += 1;
                    *x
                }
                (Some(x), None) => {
                    i += 1;
                    *x
                }
                (_, Some(y)) => {
                    j += 1;
                    *y
                }
                (None, None) => unreachable!(),
            };
            xs.push(next);
        }
        let mut out_xs = Vec::with_capacity(xs.len() * 2);
        let mut out_cells = Vec::with_capacity(xs.len() * 4);
        let (mut ca, mut cb) = (0usize, 0usize);
        let (mut sa, mut sb) = (0usize, 0usize);
        for k in 0..xs.len() {
            let x = xs[k];
            let va = cell_at(a, &mut ca, x);
            let vb = cell_at(b, &mut cb, x);
            out_xs.push(x);
            out_cells.push(combine(&a.cells[va], &b.cells[vb], x, true, second));
            if k + 1 == xs.len() {
                break;
            }
            let xn = xs[k + 1];
            let ia = seg_after(a, &mut sa, x);
            let ib = seg_after(b, &mut sb, x);
            let (ac, bc) = (&a.cells[ia], &b.cells[ib]);
            let lines: Vec<&Line> = cell_lines(ac).chain(cell_lines(bc)).collect();
            let mut cuts: Vec<Q> = Vec::new();
            for p in 0..lines.len() {
                for q in p + 1..lines.len() {
                    if let Some(c) = lines[p].crossing(lines[q]) {
                        if c > x && c < xn {
                            cuts.push(c);
                        }
                    }
                }
            }
            cuts.sort();
            cuts.dedup();
            let mut l = x;
            for c in cuts.iter().copied().chain(std::iter::once(xn)) {
                out_cells.push(combine(ac, bc, half(l + c), false, second));
                if c != xn {
                    out_xs.push(c);
                    out_cells.push(combine(ac, bc, c, true, second));
                }
                l = c;
            }
        }
        let mut p = Profile { xs: out_xs, cells: out_cells };
        p.compact();
        p
    }

    /// Drops breakpoints whose neighbouring segments and the point itself carry
    /// the same lines and owners.
    pub fn compact(&mut self) {
        let n = self.xs.len();
        if n <= 2 {
            return;
        }
        let mut xs = Vec::with_capacity(n);
        let mut cells: Vec<Cell> = Vec::with_capacity(self.cells.len());
        let old_cells = std::mem::take(&mut self.cells);
        let mut it = old_cells.into_iter();
        xs.push(self.xs[0]);
        cells.push(it.next().expect("first vertex"));
        for i in 1..n {
            let seg = it.next().expect("segment");
            let vtx = it.next().expect("vertex");
            // The previously pushed vertex goes away when the segments on both
            // sides of it agree and it has no extra owners.
            if cells.len() >= 3 {
                let prev_seg = &cells[cells.len() - 2];
                let prev_vtx = &cells[cells.len() - 1];
                if prev_seg.same_segment(&seg) && prev_vtx.same_owners(&seg) {
                    cells.pop();
                    xs.pop();
                    xs.push(self.xs[i]);
                    cells.push(vtx);
                    continue;
                }
            }
            cells.push(seg);
            xs.push(self.xs[i]);
            cells.push(vtx);
        }
        self.xs = xs;
        self.cells = cells;
    }

    /// Envelope of many profiles on a common domain by pairwise merging.
    pub fn envelope(mut parts: Vec<Profile>, second: bool) -> Profile {
        assert!(!parts.is_empty(), "envelope of nothing");
        while parts.len() > 1 {
            let mut next = Vec::with_capacity(parts.len() / 2 + 1);
            let mut it = parts.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(Profile::merge(&a, &b, second)),
                    None => next.push(a),
                }
            }
            parts = next;
        }
        parts.pop().expect("one profile left")
    }

    /// A profile consisting of a single line owned by nobody.
    pub fn from_line(lo: Q, hi: Q, line: Line) -> Profile {
        Profile {
            xs: vec![lo, hi],
            cells: vec![
                Cell { top: Level { line: Line::constant(line.at(lo)), owners: vec![] }, second: None },
                Cell { top: Level { line, owners: vec![] }, second: None },
                Cell { top: Level { line: Line::constant(line.at(hi)), owners: vec![] }, second: None },
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    fn single(id: FnId, pts: &[(i64, i64)]) -> Profile {
        // builds a profile whose cell k is owned by (id, k)
        let mut xs = Vec::new();
        let mut cells = Vec::new();
        for (k, &(x, v)) in pts.iter().enumerate() {
            if k > 0 {
                let (x0, v0) = pts[k - 1];
                let slope = Q::new((v - v0) as i128, (x - x0) as i128);
                let line = Line::through(q_int(x0), q_int(v0), slope);
                let c = cells.len() as u32;
                cells.push(Cell {
                    top: Level { line, owners: vec![OwnerRef::new(id, c, Affine::identity(), None)] },
                    second: None,
                });
            }
            xs.push(q_int(x));
            let c = cells.len() as u32;
            cells.push(Cell {
                top: Level {
                    line: Line::constant(q_int(v)),
                    owners: vec![OwnerRef::new(id, c, Affine::identity(), None)],
                },
                second: None,
            });
        }
        Profile { xs, cells }
    }

    #[test]
    fn two_constants() {
        let a = single(0, &[(0, 5), (10, 5)]);
        let b = single(1, &[(0, 3), (10, 3)]);
        let e = Profile::merge(&a, &b, true);
        assert_eq!(e.segments(), 1);
        assert_eq!(e.value_at(q_int(4)), q_int(5));
        let c = e.cell(q_int(4));
        assert_eq!(c.top.owners[0].func, 0);
        let s = c.second.as_ref().unwrap();
        assert_eq!(s.line.at(q_int(4)), q_int(3));
        assert_eq!(s.owners[0].func, 1);
    }

    #[test]
    fn crossing_lines_split() {
        let a = single(0, &[(0, 0), (10, 10)]);
        let b = single(1, &[(0, 10), (10, 0)]);
        let e = Profile::merge(&a, &b, true);
        assert_eq!(e.xs, vec![q_int(0), q_int(5), q_int(10)]);
        let mid = &e.cells[2];
        assert_eq!(mid.top.owners.len(), 2);
        assert!(mid.second.is_none());
        assert_eq!(e.value_at(q_int(2)), q_int(8));
        assert_eq!(e.cell(q_int(2)).second.as_ref().unwrap().line.at(q_int(2)), q_int(2));
    }

    #[test]
    fn touching_peak_is_a_vertex_owner() {
        // tent touching a constant from below at x = 5
        let a = single(0, &[(0, 5), (10, 5)]);
        let b = single(1, &[(0, 0), (5, 5), (10, 0)]);
        let e = Profile::merge(&a, &b, false);
        let v = e.cell(q_int(5));
        assert_eq!(v.top.owners.len(), 2);
        assert_eq!(e.cell(q_int(4)).top.owners.len(), 1);
    }

    #[test]
    fn compact_drops_redundant_breakpoints() {
        let a = single(0, &[(0, 0), (10, 10)]);
        let b = single(1, &[(0, -5), (3, -5), (7, -5), (10, -5)]);
        let e = Profile::merge(&a, &b, false);
        assert_eq!(e.segments(), 1);
    }
}
