//! Farthest distance from the main cycle of a bead-chain to one arc, and the
//! linear-time envelope of those functions.

use std::collections::VecDeque;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{half, q_min, Q};

use super::envelope::{Domain, PLFunction, UpperEnvelope};
use super::profile::Line;

/// Cycle distance between positions on a cycle of length `len`.
pub fn cycle_dist(len: Q, x: Q, y: Q) -> Q {
    let d = (x - y).abs();
    let d = d - (d / len).floor() * len;
    q_min(d, len - d)
}

/// Reduces a position into `[0, len)`.
pub fn wrap(len: Q, x: Q) -> Q {
    x - (x / len).floor() * len
}

/// `ĥ(x) = max over y on the arc of d(x, y)` for `x` on the cycle. The arc
/// joins `a` and `b`; its cycle side `β` runs forward from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcDistanceShape {
    pub cycle_len: Q,
    pub a: Q,
    pub w_alpha: Q,
    pub w_beta: Q,
    pub owner: usize,
}

impl ArcDistanceShape {
    pub fn new(cycle_len: Q, a: Q, w_beta: Q, w_alpha: Q, owner: usize) -> ArcDistanceShape {
        ArcDistanceShape { cycle_len, a: wrap(cycle_len, a), w_alpha, w_beta, owner }
    }

    pub fn b(&self) -> Q {
        wrap(self.cycle_len, self.a + self.w_beta)
    }

    pub fn bar_a(&self) -> Q {
        wrap(self.cycle_len, self.a + half(self.cycle_len))
    }

    pub fn bar_b(&self) -> Q {
        wrap(self.cycle_len, self.a + self.w_beta + half(self.cycle_len))
    }

    pub fn w_gamma(&self) -> Q {
        self.cycle_len - self.w_beta
    }

    pub fn low(&self) -> Q {
        half(self.w_beta + self.w_alpha)
    }

    pub fn high(&self) -> Q {
        half(self.w_gamma() + self.w_alpha)
    }

    pub fn is_overlong(&self) -> bool {
        self.w_beta > self.w_gamma()
    }

    pub fn value_at(&self, x: Q) -> Q {
        let l = self.cycle_len;
        half(cycle_dist(l, x, self.a) + cycle_dist(l, x, self.b()) + self.w_alpha)
    }

    pub fn to_function(&self) -> PLFunction {
        let l = self.cycle_len;
        let mut xs = vec![Q::zero(), l, self.a, self.b(), self.bar_a(), self.bar_b()];
        xs.sort();
        xs.dedup();
        let points = xs.into_iter().map(|x| (x, self.value_at(x))).collect();
        PLFunction::new(Domain::Cycle(l), points, self.owner).expect("arc shape is a valid function")
    }
}

/// A linear piece `line` on `[lo, hi]`, attributed to input `src`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Piece {
    lo: Q,
    hi: Q,
    line: Line,
    src: usize,
}

fn push_piece(out: &mut Vec<Piece>, p: Piece) {
    if let Some(last) = out.last_mut() {
        if last.hi == p.lo && last.line == p.line && last.src == p.src {
            last.hi = p.hi;
            return;
        }
    }
    out.push(p);
}

/// Pointwise maximum of two sorted lists of disjoint pieces. Ties go to the
/// smaller source index.
fn max2(f: &[Piece], g: &[Piece], steps: &mut u64) -> Vec<Piece> {
    let mut cuts: Vec<Q> = Vec::with_capacity(2 * (f.len() + g.len()));
    {
        let (mut i, mut j) = (0, 0);
        let ends = |p: &[Piece], k: usize| if k % 2 == 0 { p[k / 2].lo } else { p[k / 2].hi };
        while i < 2 * f.len() || j < 2 * g.len() {
            let take_f = j >= 2 * g.len() || (i < 2 * f.len() && ends(f, i) <= ends(g, j));
            let x = if take_f {
                i += 1;
                ends(f, i - 1)
            } else {
                j += 1;
                ends(g, j - 1)
            };
            if cuts.last() != Some(&x) {
                cuts.push(x);
            }
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        while i < f.len() && f[i].hi <= x0 {
            i += 1;
        }
        while j < g.len() && g[j].hi <= x0 {
            j += 1;
        }
        let pf = f.get(i).filter(|p| p.lo <= x0);
        let pg = g.get(j).filter(|p| p.lo <= x0);
        if pf.is_some() || pg.is_some() {
            *steps += 1;
        }
        match (pf, pg) {
            (None, None) => {}
            (Some(p), None) | (None, Some(p)) => push_piece(&mut out, Piece { lo: x0, hi: x1, ..*p }),
            (Some(p), Some(q)) => {
                let mut bounds = vec![x0];
                if let Some(c) = p.line.crossing(&q.line) {
                    if x0 < c && c < x1 {
                        bounds.push(c);
                    }
                }
                bounds.push(x1);
                for b in bounds.windows(2) {
                    let mid = half(b[0] + b[1]);
                    let (vp, vq) = (p.line.at(mid), q.line.at(mid));
                    let top = if vp > vq || (vp == vq && p.src <= q.src) { p } else { q };
                    push_piece(&mut out, Piece { lo: b[0], hi: b[1], ..*top });
                }
            }
        }
    }
    out
}

/// Lines of one slope, each alive on a window `[start, start + len]`;
/// windows arrive sorted by start.
struct Window {
    start: Q,
    line: Line,
    src: usize,
}

/// Sliding maximum over equal-length windows: a monotone deque whose front
/// is the best live line, ties going to the smaller source.
struct SlidingMax<'a> {
    windows: &'a [Window],
    len: Q,
    next: usize,
    deque: VecDeque<usize>,
}

impl<'a> SlidingMax<'a> {
    fn new(windows: &'a [Window], len: Q) -> SlidingMax<'a> {
        SlidingMax { windows, len, next: 0, deque: VecDeque::new() }
    }

    /// Best line alive on `[x0, x0 + ε)`.
    fn advance(&mut self, x0: Q, steps: &mut u64) -> Option<&'a Window> {
        let w = self.windows;
        while self.next < w.len() && w[self.next].start <= x0 {
            let n = &w[self.next];
            while self.deque.back().is_some_and(|&k| {
                let b = &w[k];
                b.line.icpt < n.line.icpt || (b.line.icpt == n.line.icpt && b.src > n.src)
            }) {
                self.deque.pop_back();
            }
            // pops are paid for by the push that put the element there
            self.deque.push_back(self.next);
            *steps += 1;
            self.next += 1;
        }
        while self.deque.front().is_some_and(|&k| w[k].start + self.len <= x0) {
            self.deque.pop_front();
        }
        self.deque.front().map(|&k| &w[k])
    }
}

/// Merges sorted lists into one sorted list without duplicates.
fn merge_sorted(lists: Vec<Vec<Q>>) -> Vec<Q> {
    let mut acc: Vec<Q> = Vec::new();
    for l in lists {
        let mut out = Vec::with_capacity(acc.len() + l.len());
        let (mut i, mut j) = (0, 0);
        while i < acc.len() || j < l.len() {
            let x = if j >= l.len() || (i < acc.len() && acc[i] <= l[j]) {
                i += 1;
                acc[i - 1]
            } else {
                j += 1;
                l[j - 1]
            };
            if out.last() != Some(&x) {
                out.push(x);
            }
        }
        acc = out;
    }
    acc
}

/// Copies of per-arc items shifted by `0, -len, -2len`, in increasing order,
/// keeping those for which `keep` holds.
fn shifted<T>(n: usize, len: Q, max_shift: i128, make: impl Fn(usize, Q) -> T, keep: impl Fn(&T) -> bool) -> Vec<T> {
    let mut out = Vec::new();
    for k in (0..=max_shift).rev() {
        let shift = -Q::from_integer(k) * len;
        for i in 0..n {
            let item = make(i, shift);
            if keep(&item) {
                out.push(item);
            }
        }
    }
    out
}

fn to_envelope(pieces: &[Piece], len: Q, owner: impl Fn(usize) -> usize) -> UpperEnvelope {
    let mut xs = vec![pieces[0].lo];
    let mut lines = Vec::new();
    let mut seg_owners = Vec::new();
    let mut vertex_owners = Vec::new();
    for (k, p) in pieces.iter().enumerate() {
        debug_assert_eq!(xs[k], p.lo, "envelope covers the cycle");
        xs.push(p.hi);
        lines.push(p.line);
        seg_owners.push(vec![owner(p.src)]);
    }
    debug_assert!(xs[0].is_zero() && xs[xs.len() - 1] == len);
    let joint = |l: &Piece, r: &Piece| {
        let mut o = vec![owner(l.src), owner(r.src)];
        o.sort_unstable();
        o.dedup();
        o
    };
    vertex_owners.push(joint(&pieces[pieces.len() - 1], &pieces[0]));
    for w in pieces.windows(2) {
        vertex_owners.push(joint(&w[0], &w[1]));
    }
    vertex_owners.push(vertex_owners[0].clone());
    UpperEnvelope::from_parts(xs, lines, seg_owners, vertex_owners)
}

/// Result of [`envelope_two_pass`].
#[derive(Debug, Clone)]
pub struct TwoPassEnvelope {
    /// The envelope `Ĥ` of the arc functions.
    pub full: UpperEnvelope,
    /// `Ĥ'`: low plateaus replaced by the extended sloped segments.
    pub partial: UpperEnvelope,
    pub steps: u64,
}

/// Upper envelope of non-overlong arc functions given in cycle order, in time
/// linear in their number. Segments shared by several arcs go to the one
/// listed first.
pub fn envelope_two_pass(shapes: &[ArcDistanceShape]) -> Result<TwoPassEnvelope> {
    if shapes.is_empty() {
        return Err(Error::InvalidFunction("no arc functions".into()));
    }
    let len = shapes[0].cycle_len;
    if shapes.iter().any(|s| s.cycle_len != len) {
        return Err(Error::InvalidFunction("arc functions must share one cycle".into()));
    }
    if shapes.iter().any(ArcDistanceShape::is_overlong) {
        return Err(Error::OverlongArcPresent);
    }
    // Arc order: a strictly increasing, each span ending before the next starts,
    // the last one wrapping at most to the first.
    let s = shapes.len();
    for k in 0..s {
        let (cur, nxt) = (&shapes[k], &shapes[(k + 1) % s]);
        let next_a = if k + 1 == s { nxt.a + len } else { nxt.a };
        if (k + 1 < s && nxt.a <= cur.a) || cur.a + cur.w_beta > next_a {
            return Err(Error::PlateauOverlap);
        }
    }
    let half_len = half(len);
    let zero = Q::zero();
    // Sloped parts live on windows of length len/2: increasing from a to bar a,
    // decreasing from bar b to a + len; every window is unrolled so that the
    // copies meeting [0, len] come out sorted.
    let inc = shifted(
        s,
        len,
        1,
        |i, sh| {
            let x = &shapes[i];
            Window { start: x.a + sh, line: Line::through(x.a + half_len + sh, x.high(), Q::one()), src: i }
        },
        |w| w.start + half_len > zero,
    );
    let dec = shifted(
        s,
        len,
        2,
        |i, sh| {
            let x = &shapes[i];
            let bb = x.a + x.w_beta + half_len + sh;
            Window { start: bb, line: Line::through(bb, x.high(), -Q::one()), src: i }
        },
        |w| w.start < len && w.start + half_len > zero,
    );
    let plateau = |lo: Q, hi: Q, v: Q, src: usize| Piece { lo: lo.max(zero), hi: hi.min(len), line: Line::constant(v), src };
    let high = shifted(
        s,
        len,
        2,
        |i, sh| {
            let x = &shapes[i];
            plateau(x.a + half_len + sh, x.a + x.w_beta + half_len + sh, x.high(), i)
        },
        |p| p.lo < p.hi,
    );
    let low = shifted(
        s,
        len,
        1,
        |i, sh| {
            let x = &shapes[i];
            plateau(x.a + sh, x.a + x.w_beta + sh, x.low(), i)
        },
        |p| p.lo < p.hi,
    );

    let mut steps = 0u64;
    // First pass: sloped segments and high plateaus.
    let clip = |v: Vec<Q>| v.into_iter().filter(|x| *x > zero && *x < len).collect::<Vec<Q>>();
    let cuts = merge_sorted(vec![
        vec![zero, len],
        clip(inc.iter().map(|w| w.start).collect()),
        clip(inc.iter().map(|w| w.start + half_len).collect()),
        clip(dec.iter().map(|w| w.start).collect()),
        clip(dec.iter().map(|w| w.start + half_len).collect()),
        clip(high.iter().flat_map(|p| [p.lo, p.hi]).collect()),
    ]);
    let (mut up, mut down) = (SlidingMax::new(&inc, half_len), SlidingMax::new(&dec, half_len));
    let mut h = 0;
    let mut partial: Vec<Piece> = Vec::new();
    for c in cuts.windows(2) {
        let (x0, x1) = (c[0], c[1]);
        steps += 1;
        while h < high.len() && high[h].hi <= x0 {
            h += 1;
        }
        let mut cands: Vec<(Line, usize)> = Vec::with_capacity(3);
        if let Some(w) = up.advance(x0, &mut steps) {
            cands.push((w.line, w.src));
        }
        if let Some(w) = down.advance(x0, &mut steps) {
            cands.push((w.line, w.src));
        }
        if h < high.len() && high[h].lo <= x0 {
            cands.push((high[h].line, high[h].src));
        }
        let mut bounds = vec![x0, x1];
        for i in 0..cands.len() {
            for j in i + 1..cands.len() {
                if let Some(c) = cands[i].0.crossing(&cands[j].0) {
                    if x0 < c && c < x1 {
                        bounds.push(c);
                    }
                }
            }
        }
        bounds.sort();
        bounds.dedup();
        for b in bounds.windows(2) {
            let mid = half(b[0] + b[1]);
            let &(line, src) = cands
                .iter()
                .max_by(|p, q| p.0.at(mid).cmp(&q.0.at(mid)).then(q.1.cmp(&p.1)))
                .expect("every point of the cycle lies in some window");
            push_piece(&mut partial, Piece { lo: b[0], hi: b[1], line, src });
        }
    }
    // Second pass: the low plateaus, which never overlap one another.
    let full = max2(&partial, &low, &mut steps);
    let owner = |i: usize| shapes[i].owner;
    Ok(TwoPassEnvelope { full: to_envelope(&full, len, owner), partial: to_envelope(&partial, len, owner), steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;
    use crate::plf::envelope::envelope_and_second_level;

    fn q(x: f64) -> Q {
        Q::new((x * 2.0).round() as i128, 2)
    }

    /// Cycle a-b-c-d of unit edges with arcs a-e-b and c-g-d of length 3.
    fn bc1_pair() -> Vec<ArcDistanceShape> {
        vec![ArcDistanceShape::new(q_int(4), q_int(0), q_int(1), q_int(3), 0), ArcDistanceShape::new(q_int(4), q_int(2), q_int(1), q_int(3), 1)]
    }

    #[test]
    fn shape_of_one_arc() {
        let s = bc1_pair()[0];
        assert_eq!((s.low(), s.high()), (q_int(2), q_int(3)));
        assert_eq!((s.b(), s.bar_a(), s.bar_b()), (q_int(1), q_int(2), q_int(3)));
        assert_eq!(s.value_at(q(0.5)), q_int(2));
        assert_eq!(s.value_at(q(1.5)), q(2.5));
        assert_eq!(s.value_at(q(2.5)), q_int(3));
        assert_eq!(s.value_at(q(3.5)), q(2.5));
        let t = envelope_two_pass(&[s]).unwrap();
        assert_eq!(t.full.shape(), s.to_function().points);
    }

    #[test]
    fn symmetric_pair() {
        let shapes = bc1_pair();
        let t = envelope_two_pass(&shapes).unwrap();
        let pts: Vec<(Q, Q)> = vec![(0.0, 3.0), (1.0, 3.0), (1.5, 2.5), (2.0, 3.0), (3.0, 3.0), (3.5, 2.5), (4.0, 3.0)]
            .into_iter()
            .map(|(x, y)| (q(x), q(y)))
            .collect();
        assert_eq!(t.full.shape(), pts);
        assert_eq!(t.full.owners_at(q(0.5)), &[1]);
        assert_eq!(t.full.owners_at(q(2.5)), &[0]);
        let fs: Vec<PLFunction> = shapes.iter().map(|s| s.to_function()).collect();
        let (u1, u2) = envelope_and_second_level(&fs).unwrap();
        assert_eq!(u1.shape(), pts);
        for k in 0..=16 {
            let x = Q::new(k, 4);
            assert_eq!(u2.value_at(x), shapes[0].value_at(x).min(shapes[1].value_at(x)));
        }
    }

    #[test]
    fn overlapping_slopes_go_to_first() {
        // both increasing segments lie on y = x + 1 and overlap on [6, 10]
        let a = ArcDistanceShape::new(q_int(20), q_int(0), q_int(2), q_int(4), 0);
        let b = ArcDistanceShape::new(q_int(20), q_int(4), q_int(2), q_int(12), 1);
        let la = Line::through(a.bar_a(), a.high(), Q::one());
        let lb = Line::through(b.bar_a(), b.high(), Q::one());
        assert_eq!(la, lb);
        let t = envelope_two_pass(&[a, b]).unwrap();
        assert_eq!(t.full.owners_at(q_int(9)), &[0]);
    }

    #[test]
    fn rejects_bad_input() {
        let over = ArcDistanceShape::new(q_int(4), q_int(0), q_int(3), q_int(5), 0);
        assert_eq!(envelope_two_pass(&[over]).unwrap_err(), Error::OverlongArcPresent);
        let x = ArcDistanceShape::new(q_int(10), q_int(0), q_int(3), q_int(5), 0);
        let y = ArcDistanceShape::new(q_int(10), q_int(2), q_int(3), q_int(5), 1);
        assert_eq!(envelope_two_pass(&[x, y]).unwrap_err(), Error::PlateauOverlap);
        assert_eq!(envelope_two_pass(&[y, x]).unwrap_err(), Error::PlateauOverlap);
    }

    #[test]
    fn two_pass_matches_sweep() {
        let mut worst = 0f64;
        for seed in 0..300 {
            let s = 1 + (seed as usize % 9);
            let shapes = crate::testkit::gen::arc_family(seed, s);
            let t = envelope_two_pass(&shapes).unwrap();
            assert!(t.steps <= 16 * s as u64, "steps {} for s = {}", t.steps, s);
            worst = worst.max(t.steps as f64 / s as f64);
            assert!(t.full.shape().len() <= 4 * s + 2);
            let fs: Vec<PLFunction> = shapes.iter().map(|s| s.to_function()).collect();
            let u1 = crate::plf::envelope::upper_envelope(&fs).unwrap();
            assert_eq!(t.full.shape(), u1.shape(), "seed {seed}");
            for (x, v) in t.full.breakpoints() {
                let best = shapes.iter().map(|s| s.value_at(x)).max().unwrap();
                assert_eq!(v, best);
            }
        }
        eprintln!("worst steps per arc {worst}");
    }
}
