//! Weighted networks, points on edges, and farthest-point answers.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{format_fraction, format_q, format_scaled, is_unit_interval, Length, Q, MAX_TOTAL_WEIGHT};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Length,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A simple, connected, undirected network with positive weights.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Network {
    /// Validates and builds a network from scaled weights.
    pub fn new(n: usize, edges: Vec<(VertexId, VertexId, Length)>) -> Result<Network> {
        if n == 0 {
            return Err(Error::NotConnected);
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(edges.len());
        let mut total: i64 = 0;
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::Parse(format!("edge {i}: vertex out of range 0..{n}")));
            }
            if u == v {
                return Err(Error::NotSimple(format!("loop at vertex {u}")));
            }
            if w.0 <= 0 {
                return Err(Error::NonPositiveWeight(format!("edge {i} ({u},{v})")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::NotSimple(format!("multiple edges between {u} and {v}")));
            }
            total = total.checked_add(w.0).ok_or(Error::Overflow)?;
            if total >= MAX_TOTAL_WEIGHT {
                return Err(Error::Overflow);
            }
            adj[u].push((v, i));
            adj[v].push((u, i));
            out.push(Edge { u, v, w });
        }
        let net = Network { n, edges: out, adj };
        if !net.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok(net)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn total_weight(&self) -> Length {
        Length(self.edges.iter().map(|e| e.w.0).sum())
    }

    /// Looks up the edge joining `u` and `v`.
    pub fn find_edge(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adj.get(u)?.iter().find(|&&(y, _)| y == v).map(|&(_, e)| e)
    }

    /// Lowest-index edge incident to `v`; the canonical carrier of a vertex.
    pub fn canonical_edge(&self, v: VertexId) -> EdgeId {
        self.adj[v].iter().map(|&(_, e)| e).min().expect("connected network has no isolated vertex")
    }

    /// Parses the text network format: `n m` followed by `m` lines `u v w`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Network> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty network file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = parse_count(it.next(), "vertex count")?;
        let m: usize = parse_count(it.next(), "edge count")?;
        if it.next().is_some() {
            return Err(Error::Parse("trailing tokens in header".into()));
        }
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("expected {m} edges, found {i}")))?;
            let mut t = line.split_whitespace();
            let u = parse_count(t.next(), "edge endpoint")?;
            let v = parse_count(t.next(), "edge endpoint")?;
            let w = t.next().ok_or_else(|| Error::Parse(format!("edge {i}: missing weight")))?;
            if t.next().is_some() {
                return Err(Error::Parse(format!("edge {i}: trailing tokens")));
            }
            edges.push((u, v, Length::parse_decimal(w)?));
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing lines after edge list".into()));
        }
        Network::new(n, edges)
    }

    /// Serializes in the format accepted by [`Network::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
        }
        s
    }
}

fn parse_count(tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
    tok.parse().map_err(|_| Error::Parse(format!("invalid {what} `{tok}`")))
}

/// Builds a network from decimal weights.
pub fn build_network(n: usize, edges: &[(VertexId, VertexId, &str)]) -> Result<Network> {
    let scaled = edges
        .iter()
        .map(|&(u, v, w)| Length::parse_decimal(w).map(|w| (u, v, w)))
        .collect::<Result<Vec<_>>>()?;
    Network::new(n, scaled)
}

/// A point on an edge, at `λ·w` from the edge's `u` endpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointOnEdge {
    pub edge: EdgeId,
    pub lambda: Q,
}

impl PointOnEdge {
    pub fn new(edge: EdgeId, lambda: Q) -> PointOnEdge {
        PointOnEdge { edge, lambda }
    }

    /// The canonical representation of vertex `v`.
    pub fn vertex(net: &Network, v: VertexId) -> PointOnEdge {
        let e = net.canonical_edge(v);
        let lambda = if net.edge(e).u == v { Q::zero() } else { Q::one() };
        PointOnEdge { edge: e, lambda }
    }

    /// The point at scaled distance `offset` from `from` along edge `e`.
    pub fn at_offset(net: &Network, e: EdgeId, from: VertexId, offset: Q) -> PointOnEdge {
        let edge = net.edge(e);
        let frac = offset / edge.w.to_q();
        let lambda = if from == edge.u { frac } else { Q::one() - frac };
        PointOnEdge { edge: e, lambda }.canonical(net)
    }

    pub fn validate(&self, net: &Network) -> Result<()> {
        if self.edge >= net.edge_count() {
            return Err(Error::InvalidQuery(format!("edge {} does not exist", self.edge)));
        }
        if !is_unit_interval(&self.lambda) {
            return Err(Error::InvalidQuery(format!("lambda {} outside [0,1]", format_q(&self.lambda))));
        }
        Ok(())
    }

    /// The vertex this point coincides with, if any.
    pub fn as_vertex(&self, net: &Network) -> Option<VertexId> {
        let e = net.edge(self.edge);
        if self.lambda.is_zero() {
            Some(e.u)
        } else if self.lambda.is_one() {
            Some(e.v)
        } else {
            None
        }
    }

    /// Snaps endpoint positions to the canonical vertex representation.
    pub fn canonical(&self, net: &Network) -> PointOnEdge {
        match self.as_vertex(net) {
            Some(v) => PointOnEdge::vertex(net, v),
            None => self.clone(),
        }
    }

    /// Scaled distance from the edge's `u` endpoint.
    pub fn offset(&self, net: &Network) -> Q {
        self.lambda * net.edge(self.edge).w.to_q()
    }

    pub fn display(&self, decimal: bool) -> String {
        if decimal {
            format!("{} {}", self.edge, format_q(&self.lambda))
        } else {
            format!("{} {}", self.edge, format_fraction(&self.lambda))
        }
    }
}

/// Farthest distance from a query point and every point realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarthestResult {
    pub distance: Q,
    pub points: BTreeSet<PointOnEdge>,
}

impl FarthestResult {
    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn distance_string(&self) -> String {
        format_scaled(&self.distance)
    }
}

impl fmt::Display for FarthestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "distance {}", self.distance_string())?;
        writeln!(f, "k {}", self.points.len())?;
        for p in &self.points {
            writeln!(f, "{}", p.display(false))?;
        }
        Ok(())
    }
}

/// Collects candidate points at exact distances and keeps those at the maximum.
#[derive(Debug, Default)]
pub struct MaxCollector {
    best: Option<Q>,
    points: BTreeSet<PointOnEdge>,
}

impl MaxCollector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn offer(&mut self, dist: Q, point: PointOnEdge) {
        match &self.best {
            Some(b) if dist < *b => {}
            Some(b) if dist == *b => {
                self.points.insert(point);
            }
            _ => {
                self.best = Some(dist);
                self.points.clear();
                self.points.insert(point);
            }
        }
    }

    pub fn best(&self) -> Option<&Q> {
        self.best.as_ref()
    }

    pub fn finish(self) -> FarthestResult {
        FarthestResult { distance: self.best.unwrap_or_else(Q::zero), points: self.points }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp1() -> Network {
        build_network(3, &[(0, 1, "2"), (0, 2, "3"), (2, 1, "3")]).unwrap()
    }

    #[test]
    fn builds_pp1() {
        let net = pp1();
        assert_eq!(net.vertex_count(), 3);
        assert_eq!(net.edge_count(), 3);
        assert_eq!(net.edge(0).w, Length(4_000_000));
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!(build_network(2, &[(0, 0, "1"), (0, 1, "1")]), Err(Error::NotSimple(_))));
        assert!(matches!(build_network(2, &[(0, 1, "1"), (1, 0, "2")]), Err(Error::NotSimple(_))));
        assert!(matches!(build_network(4, &[(0, 1, "1"), (2, 3, "1")]), Err(Error::NotConnected)));
        assert!(matches!(build_network(2, &[(0, 1, "0")]), Err(Error::NonPositiveWeight(_))));
        assert!(matches!(build_network(2, &[(0, 1, "-1")]), Err(Error::NonPositiveWeight(_))));
        assert!(matches!(build_network(2, &[(0, 1, "1.0000001")]), Err(Error::WeightPrecisionExceeded(_))));
    }

    #[test]
    fn parses_text_format() {
        let net = Network::parse("3 3\n0 1 2\n0 2 3\n2 1 3\n").unwrap();
        assert_eq!(net, pp1());
        assert_eq!(Network::parse(&net.to_text()).unwrap(), net);
        assert!(Network::parse("3 2\n0 1 2\n").is_err());
        assert!(Network::parse("x").is_err());
        assert!(Network::parse("2 1\n0 1 2 9\n").is_err());
    }

    #[test]
    fn canonical_vertices() {
        let net = pp1();
        // vertex 1 (v) is endpoint of edges 0 and 2; edge 0 is canonical.
        let p = PointOnEdge::new(2, Q::one()).canonical(&net);
        assert_eq!(p, PointOnEdge::new(0, Q::one()));
        let x = PointOnEdge::new(2, Q::zero()).canonical(&net);
        assert_eq!(x, PointOnEdge::new(1, Q::one()));
        let mid = PointOnEdge::new(2, Q::new(1, 2));
        assert_eq!(mid.canonical(&net), mid);
    }
}
