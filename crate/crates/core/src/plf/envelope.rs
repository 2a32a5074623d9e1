//! Upper envelopes of piecewise-linear functions with exact owner sets, and
//! second levels.
//!
//! The sweep keeps, per slope, the active lines grouped by intercept. Inside
//! one elementary interval only the top two groups of each slope can reach
//! either level, so every cell is decided from a handful of candidates and
//! its owners are read off the matching groups.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{half, Q};

use super::profile::Line;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Linear(Q),
    /// A cycle of the given circumference, cut at position 0.
    Cycle(Q),
}

impl Domain {
    pub fn length(&self) -> Q {
        match *self {
            Domain::Linear(l) | Domain::Cycle(l) => l,
        }
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, Domain::Cycle(_))
    }
}

/// Continuous piecewise-linear function given by its breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    pub domain: Domain,
    pub points: Vec<(Q, Q)>,
    pub owner: usize,
}

impl PLFunction {
    pub fn new(domain: Domain, points: Vec<(Q, Q)>, owner: usize) -> Result<PLFunction> {
        let bad = |m: &str| Err(Error::InvalidFunction(m.to_string()));
        if points.len() < 2 {
            return bad("fewer than two breakpoints");
        }
        if !points[0].0.is_zero() || points[points.len() - 1].0 != domain.length() {
            return bad("breakpoints must span the domain");
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return bad("breakpoint positions must increase");
            }
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if !(slope.is_zero() || slope.abs().is_one()) {
                return bad("slopes must be -1, 0 or 1");
            }
        }
        if domain.is_cyclic() && points[0].1 != points[points.len() - 1].1 {
            return bad("cyclic function must close up");
        }
        Ok(PLFunction { domain, points, owner })
    }

    pub fn value_at(&self, x: Q) -> Q {
        let k = self.points.partition_point(|p| p.0 <= x).clamp(1, self.points.len() - 1);
        self.line(k - 1).at(x)
    }

    /// The line of segment `k` (between breakpoints `k` and `k + 1`).
    pub fn line(&self, k: usize) -> Line {
        let ((x0, y0), (x1, y1)) = (self.points[k], self.points[k + 1]);
        Line::through(x0, y0, (y1 - y0) / (x1 - x0))
    }
}

/// Where a position falls in an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvCell {
    Vertex(usize),
    Segment(usize),
}

/// A level of an envelope: breakpoints, one line per segment, and the owners
/// realizing each segment and each breakpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperEnvelope {
    pub xs: Vec<Q>,
    pub lines: Vec<Line>,
    pub seg_owners: Vec<Vec<usize>>,
    pub vertex_owners: Vec<Vec<usize>>,
    next_other: Vec<usize>,
    prev_other: Vec<usize>,
}

impl UpperEnvelope {
    pub(crate) fn from_parts(xs: Vec<Q>, lines: Vec<Line>, seg_owners: Vec<Vec<usize>>, vertex_owners: Vec<Vec<usize>>) -> UpperEnvelope {
        Self::assemble(xs, lines, seg_owners, vertex_owners, true)
    }

    fn assemble(xs: Vec<Q>, lines: Vec<Line>, seg_owners: Vec<Vec<usize>>, vertex_owners: Vec<Vec<usize>>, compact: bool) -> UpperEnvelope {
        let mut e = UpperEnvelope { xs, lines, seg_owners, vertex_owners, next_other: Vec::new(), prev_other: Vec::new() };
        if compact {
            e.compact();
        }
        e.link();
        e
    }

    pub fn segments(&self) -> usize {
        self.lines.len()
    }

    pub fn vertex_value(&self, k: usize) -> Q {
        let seg = k.min(self.lines.len() - 1);
        self.lines[seg].at(self.xs[k])
    }

    /// `(position, value)` at every breakpoint.
    pub fn breakpoints(&self) -> Vec<(Q, Q)> {
        (0..self.xs.len()).map(|k| (self.xs[k], self.vertex_value(k))).collect()
    }

    /// Breakpoints with collinear interior points dropped: the graph of the
    /// envelope, independent of owners.
    pub fn shape(&self) -> Vec<(Q, Q)> {
        let mut out: Vec<(Q, Q)> = Vec::new();
        for k in 0..self.xs.len() {
            let keep = k == 0 || k + 1 == self.xs.len() || self.lines[k - 1] != self.lines[k];
            if keep {
                out.push((self.xs[k], self.vertex_value(k)));
            }
        }
        out
    }

    pub fn locate(&self, x: Q, probes: &mut u64) -> EnvCell {
        let (mut lo, mut hi) = (0usize, self.xs.len());
        while lo < hi {
            *probes += 1;
            let mid = (lo + hi) / 2;
            if self.xs[mid] < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo < self.xs.len() && self.xs[lo] == x {
            EnvCell::Vertex(lo)
        } else {
            EnvCell::Segment(lo.clamp(1, self.lines.len()) - 1)
        }
    }

    pub fn value_at(&self, x: Q) -> Q {
        self.cell_value(self.locate(x, &mut 0), x)
    }

    /// Value at `x`, which must lie in cell `c`.
    pub fn cell_value(&self, c: EnvCell, x: Q) -> Q {
        match c {
            EnvCell::Vertex(k) => self.vertex_value(k),
            EnvCell::Segment(k) => self.lines[k].at(x),
        }
    }

    pub fn owners_at(&self, x: Q) -> &[usize] {
        self.cell_owners(self.locate(x, &mut 0))
    }

    pub fn cell_owners(&self, c: EnvCell) -> &[usize] {
        match c {
            EnvCell::Vertex(k) => &self.vertex_owners[k],
            EnvCell::Segment(k) => &self.seg_owners[k],
        }
    }

    /// Next segment after `k` whose owner set differs (or `segments()`).
    pub fn next_other(&self, k: usize) -> usize {
        self.next_other[k]
    }

    /// Previous segment before `k` whose owner set differs (or `usize::MAX`).
    pub fn prev_other(&self, k: usize) -> usize {
        self.prev_other[k]
    }

    fn compact(&mut self) {
        let mut xs = vec![self.xs[0]];
        let mut lines: Vec<Line> = Vec::new();
        let mut seg_owners: Vec<Vec<usize>> = Vec::new();
        let mut vertex_owners = vec![self.vertex_owners[0].clone()];
        for k in 0..self.lines.len() {
            let merge = k > 0
                && lines.last() == Some(&self.lines[k])
                && seg_owners.last() == Some(&self.seg_owners[k])
                && vertex_owners.last() == Some(&self.seg_owners[k]);
            if merge {
                *xs.last_mut().unwrap() = self.xs[k + 1];
                *vertex_owners.last_mut().unwrap() = self.vertex_owners[k + 1].clone();
            } else {
                xs.push(self.xs[k + 1]);
                lines.push(self.lines[k]);
                seg_owners.push(self.seg_owners[k].clone());
                vertex_owners.push(self.vertex_owners[k + 1].clone());
            }
        }
        self.xs = xs;
        self.lines = lines;
        self.seg_owners = seg_owners;
        self.vertex_owners = vertex_owners;
    }

    fn link(&mut self) {
        let m = self.lines.len();
        self.next_other = vec![m; m];
        self.prev_other = vec![usize::MAX; m];
        for k in (0..m.saturating_sub(1)).rev() {
            self.next_other[k] = if self.seg_owners[k + 1] != self.seg_owners[k] { k + 1 } else { self.next_other[k + 1] };
        }
        for k in 1..m {
            self.prev_other[k] = if self.seg_owners[k - 1] != self.seg_owners[k] { k - 1 } else { self.prev_other[k - 1] };
        }
    }
}

/// Active lines grouped by slope, then intercept.
#[derive(Default)]
struct Groups {
    by_slope: BTreeMap<Q, BTreeMap<Q, BTreeSet<usize>>>,
}

impl Groups {
    fn insert(&mut self, line: Line, f: usize) {
        self.by_slope.entry(line.slope).or_default().entry(line.icpt).or_default().insert(f);
    }

    fn remove(&mut self, line: Line, f: usize) {
        let class = self.by_slope.get_mut(&line.slope).expect("active slope");
        let g = class.get_mut(&line.icpt).expect("active line");
        g.remove(&f);
        if g.is_empty() {
            class.remove(&line.icpt);
            if class.is_empty() {
                self.by_slope.remove(&line.slope);
            }
        }
    }

    /// The top two intercept groups of every slope.
    fn candidates(&self) -> Vec<(Line, &BTreeSet<usize>)> {
        let mut out = Vec::new();
        for (&slope, class) in &self.by_slope {
            for (&icpt, g) in class.iter().rev().take(2) {
                out.push((Line::new(slope, icpt), g));
            }
        }
        out
    }

    /// Every function whose current line passes through `(x, v)`.
    fn through(&self, x: Q, v: Q, skip: Option<usize>) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for (&slope, class) in &self.by_slope {
            if let Some(g) = class.get(&(v - slope * x)) {
                out.extend(g.iter().copied().filter(|&f| Some(f) != skip));
            }
        }
        out.sort_unstable();
        out
    }

    /// Both levels at position `x`.
    fn levels_at(&self, x: Q) -> ((Q, Vec<usize>), Option<(Q, Vec<usize>)>) {
        let cands = self.candidates();
        let v1 = cands.iter().map(|(l, _)| l.at(x)).max().expect("active functions");
        let o1 = self.through(x, v1, None);
        if o1.len() >= 2 {
            return ((v1, o1.clone()), Some((v1, o1)));
        }
        let only = o1[0];
        let v2 = cands
            .iter()
            .filter(|(_, g)| !(g.len() == 1 && g.contains(&only)))
            .map(|(l, _)| l.at(x))
            .max();
        let second = v2.map(|v2| (v2, self.through(x, v2, Some(only))));
        ((v1, o1), second)
    }
}

#[derive(Default)]
struct Builder {
    xs: Vec<Q>,
    lines: Vec<Line>,
    seg_owners: Vec<Vec<usize>>,
    vertex_owners: Vec<Vec<usize>>,
}

impl Builder {
    fn vertex(&mut self, x: Q, owners: Vec<usize>) {
        self.xs.push(x);
        self.vertex_owners.push(owners);
    }

    fn segment(&mut self, line: Line, owners: Vec<usize>) {
        self.lines.push(line);
        self.seg_owners.push(owners);
    }

    fn finish(self, compact: bool) -> UpperEnvelope {
        UpperEnvelope::assemble(self.xs, self.lines, self.seg_owners, self.vertex_owners, compact)
    }
}

fn sweep(fs: &[PLFunction], second: bool, compact: bool) -> (UpperEnvelope, Option<UpperEnvelope>) {
    let mut events: Vec<(Q, usize)> = Vec::new();
    let mut xs: Vec<Q> = Vec::new();
    for (f, func) in fs.iter().enumerate() {
        for &(x, _) in &func.points[1..func.points.len() - 1] {
            events.push((x, f));
        }
        xs.extend(func.points.iter().map(|p| p.0));
    }
    events.sort();
    xs.sort();
    xs.dedup();

    let mut seg = vec![0usize; fs.len()];
    let mut groups = Groups::default();
    for (f, func) in fs.iter().enumerate() {
        groups.insert(func.line(0), f);
    }
    let mut next_event = 0;
    let (mut b1, mut b2) = (Builder::default(), Builder::default());
    let push_vertex = |groups: &Groups, x: Q, b1: &mut Builder, b2: &mut Builder| {
        let ((_, o1), lv2) = groups.levels_at(x);
        b1.vertex(x, o1);
        if second {
            b2.vertex(x, lv2.expect("two functions").1);
        }
    };
    for e in 0..xs.len() {
        let x = xs[e];
        while next_event < events.len() && events[next_event].0 == x {
            let f = events[next_event].1;
            groups.remove(fs[f].line(seg[f]), f);
            seg[f] += 1;
            groups.insert(fs[f].line(seg[f]), f);
            next_event += 1;
        }
        push_vertex(&groups, x, &mut b1, &mut b2);
        if e + 1 == xs.len() {
            break;
        }
        let x1 = xs[e + 1];
        let cands = groups.candidates();
        let mut cuts: Vec<Q> = Vec::new();
        for i in 0..cands.len() {
            for j in i + 1..cands.len() {
                if let Some(c) = cands[i].0.crossing(&cands[j].0) {
                    if x < c && c < x1 {
                        cuts.push(c);
                    }
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        let mut lo = x;
        for hi in cuts.iter().copied().chain(std::iter::once(x1)) {
            let mid = half(lo + hi);
            let mut order: Vec<&(Line, &BTreeSet<usize>)> = cands.iter().collect();
            order.sort_by(|a, b| b.0.at(mid).cmp(&a.0.at(mid)));
            let (top, set) = order[0];
            b1.segment(*top, set.iter().copied().collect());
            if second {
                if set.len() >= 2 {
                    b2.segment(*top, set.iter().copied().collect());
                } else {
                    let (l2, s2) = order[1];
                    b2.segment(*l2, s2.iter().copied().collect());
                }
            }
            if hi != x1 {
                push_vertex(&groups, hi, &mut b1, &mut b2);
            }
            lo = hi;
        }
    }
    (b1.finish(compact), second.then(|| b2.finish(compact)))
}

fn check_domains(fs: &[PLFunction]) -> Result<()> {
    if fs.iter().any(|f| f.domain != fs[0].domain) {
        return Err(Error::InvalidFunction("functions must share one domain".into()));
    }
    Ok(())
}

/// Pointwise maximum with every function realizing it.
pub fn upper_envelope(fs: &[PLFunction]) -> Result<UpperEnvelope> {
    if fs.is_empty() {
        return Err(Error::InvalidFunction("no functions".into()));
    }
    check_domains(fs)?;
    Ok(sweep(fs, false, true).0)
}

/// As `upper_envelope`, but split at every breakpoint of every input, so each
/// segment lies within one piece of each function.
pub fn upper_envelope_fine(fs: &[PLFunction]) -> Result<UpperEnvelope> {
    if fs.is_empty() {
        return Err(Error::InvalidFunction("no functions".into()));
    }
    check_domains(fs)?;
    Ok(sweep(fs, false, false).0)
}

/// The upper envelope `U1` and the second level `U2`: at every position `U2`
/// is the largest value left after removing one function that realizes `U1`,
/// so it equals `U1` wherever two functions tie for the maximum.
pub fn envelope_and_second_level(fs: &[PLFunction]) -> Result<(UpperEnvelope, UpperEnvelope)> {
    if fs.len() < 2 {
        return Err(Error::FewerThanTwoFunctions);
    }
    check_domains(fs)?;
    let (u1, u2) = sweep(fs, true, true);
    Ok((u1, u2.expect("second level requested")))
}

/// Both levels, answering "the maximum over all functions except one label".
#[derive(Debug, Clone)]
pub struct Levels {
    pub u1: UpperEnvelope,
    pub u2: Option<UpperEnvelope>,
}

impl Levels {
    pub fn new(fs: &[PLFunction]) -> Result<Levels> {
        if fs.len() >= 2 {
            let (u1, u2) = envelope_and_second_level(fs)?;
            Ok(Levels { u1, u2: Some(u2) })
        } else {
            Ok(Levels { u1: upper_envelope(fs)?, u2: None })
        }
    }

    /// Both levels, split at every breakpoint of every input.
    pub fn fine(fs: &[PLFunction]) -> Result<Levels> {
        check_domains(fs)?;
        if fs.len() >= 2 {
            let (u1, u2) = sweep(fs, true, false);
            Ok(Levels { u1, u2 })
        } else {
            Ok(Levels { u1: upper_envelope_fine(fs)?, u2: None })
        }
    }

    /// The level and cell holding the maximum at `x` over all functions except
    /// `skip`: `(false, c)` for `u1`, `(true, c)` for `u2`.
    pub fn locate_excluding(&self, x: Q, skip: Option<usize>, probes: &mut u64) -> Option<(bool, EnvCell)> {
        let c = self.u1.locate(x, probes);
        let owners = self.u1.cell_owners(c);
        match skip {
            Some(s) if owners.len() == 1 && owners[0] == s => Some((true, self.u2.as_ref()?.locate(x, probes))),
            _ => Some((false, c)),
        }
    }

    /// Maximum and realizing owners at `x` over all functions whose owner is
    /// not `skip`; `None` if nothing is left.
    pub fn top_excluding(&self, x: Q, skip: Option<usize>, probes: &mut u64) -> Option<(Q, Vec<usize>)> {
        let (second, c) = self.locate_excluding(x, skip, probes)?;
        let e = if second { self.u2.as_ref().unwrap() } else { &self.u1 };
        Some((e.cell_value(c, x), e.cell_owners(c).iter().copied().filter(|&o| Some(o) != skip).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    fn f(points: &[(i64, i64)], owner: usize) -> PLFunction {
        let pts = points.iter().map(|&(x, y)| (q_int(x), q_int(y))).collect::<Vec<_>>();
        PLFunction::new(Domain::Linear(pts.last().unwrap().0), pts, owner).unwrap()
    }

    #[test]
    fn constants() {
        let (u1, u2) = envelope_and_second_level(&[f(&[(0, 5), (10, 5)], 0), f(&[(0, 3), (10, 3)], 1)]).unwrap();
        assert_eq!(u1.breakpoints(), vec![(q_int(0), q_int(5)), (q_int(10), q_int(5))]);
        assert_eq!(u2.breakpoints(), vec![(q_int(0), q_int(3)), (q_int(10), q_int(3))]);
        assert_eq!(u1.owners_at(q_int(4)), &[0]);
        assert_eq!(u2.owners_at(q_int(4)), &[1]);
    }

    #[test]
    fn one_function() {
        let g = f(&[(0, 0), (4, 4), (6, 2)], 7);
        assert_eq!(envelope_and_second_level(&[g.clone()]), Err(Error::FewerThanTwoFunctions));
        let u = upper_envelope(&[g.clone()]).unwrap();
        assert_eq!(u.breakpoints(), g.points);
    }

    #[test]
    fn crossing_and_ties() {
        // up 0..4 then down; a flat 2; a copy of the first
        let a = f(&[(0, 0), (4, 4), (8, 0)], 0);
        let b = f(&[(0, 2), (8, 2)], 1);
        let c = f(&[(0, 0), (4, 4), (8, 0)], 2);
        let (u1, u2) = envelope_and_second_level(&[a, b, c]).unwrap();
        assert_eq!(u1.owners_at(q_int(1)), &[1]);
        assert_eq!(u1.owners_at(q_int(2)), &[0, 1, 2]);
        assert_eq!(u1.owners_at(q_int(3)), &[0, 2]);
        assert_eq!(u2.value_at(q_int(3)), q_int(3));
        assert_eq!(u2.value_at(q_int(1)), q_int(1));
        assert_eq!(u2.owners_at(q_int(1)), &[0, 2]);
        let lv = Levels { u1: u1.clone(), u2: Some(u2) };
        assert_eq!(lv.top_excluding(q_int(1), Some(1), &mut 0), Some((q_int(1), vec![0, 2])));
        assert_eq!(lv.top_excluding(q_int(3), Some(0), &mut 0), Some((q_int(3), vec![2])));
    }

    #[test]
    fn matches_pointwise_max() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let fs: Vec<PLFunction> = (0..n)
                .map(|o| {
                    let mut pts = vec![(0i64, rng.gen_range(0..6))];
                    let mut x = 0;
                    while x < 12 {
                        let step = rng.gen_range(1..4).min(12 - x);
                        let slope = rng.gen_range(-1..=1);
                        let y = pts.last().unwrap().1 + slope * step;
                        x += step;
                        pts.push((x, y));
                    }
                    f(&pts, o)
                })
                .collect();
            let (u1, u2) = envelope_and_second_level(&fs).unwrap();
            for k in 0..=48 {
                let x = Q::new(k, 4);
                let mut vals: Vec<(Q, usize)> = fs.iter().map(|g| (g.value_at(x), g.owner)).collect();
                vals.sort_by(|a, b| b.cmp(a));
                assert_eq!(u1.value_at(x), vals[0].0);
                assert_eq!(u2.value_at(x), vals[1].0);
                let mut top: Vec<usize> = vals.iter().filter(|v| v.0 == vals[0].0).map(|v| v.1).collect();
                top.sort();
                assert_eq!(u1.owners_at(x), &top[..]);
            }
        }
    }
}
