//! Exact comparison of a query structure against the brute-force oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{format_fraction, Q};
use crate::network::{FarthestResult, Network, PointOnEdge};
use crate::oracle::oracle_farthest;

/// Anything that answers farthest-point queries on a fixed network.
pub trait FarthestQuery {
    fn network(&self) -> &Network;
    fn farthest_points(&self, q: &PointOnEdge) -> FarthestResult;

    fn farthest_distance(&self, q: &PointOnEdge) -> Q {
        self.farthest_points(q).distance
    }
}

/// Largest denominator used for sampled interior positions.
pub const MAX_DENOMINATOR: i128 = 64;

/// All vertices, then random interior points until `count` samples in total
/// (or just the vertices if there are more of them).
pub fn sample_points(net: &Network, count: usize, seed: u64) -> Vec<PointOnEdge> {
    let mut out: Vec<PointOnEdge> = (0..net.vertex_count()).map(|v| PointOnEdge::vertex(net, v)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let den = rng.gen_range(2..=MAX_DENOMINATOR);
        let num = rng.gen_range(1..den);
        out.push(PointOnEdge::new(rng.gen_range(0..net.edge_count()), Q::new(num, den)));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub query: PointOnEdge,
    pub expected: FarthestResult,
    pub got: FarthestResult,
    /// Network file text with the query appended as a `# query` line.
    pub witness: String,
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub queries: usize,
    pub mismatches: Vec<Mismatch>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Replayable witness: the network file followed by `# query <edge> <lambda>`.
pub fn witness_text(net: &Network, q: &PointOnEdge) -> String {
    format!("{}# query {} {}\n", net.to_text(), q.edge, format_fraction(&q.lambda))
}

/// Reads the `# query` line of a witness, if present.
pub fn witness_query(text: &str) -> Option<(usize, String)> {
    text.lines().find_map(|l| {
        let mut t = l.trim().strip_prefix('#')?.split_whitespace();
        if t.next()? != "query" {
            return None;
        }
        Some((t.next()?.parse().ok()?, t.next()?.to_string()))
    })
}

pub fn check_points<S: FarthestQuery + ?Sized>(structure: &S, points: &[PointOnEdge]) -> CheckReport {
    let net = structure.network();
    let mut report = CheckReport::default();
    for q in points {
        report.queries += 1;
        let expected = oracle_farthest(net, q);
        let got = structure.farthest_points(q);
        if got != expected || structure.farthest_distance(q) != expected.distance {
            report.mismatches.push(Mismatch { query: q.clone(), witness: witness_text(net, q), expected, got });
        }
    }
    report
}

pub fn check_equivalence<S: FarthestQuery + ?Sized>(structure: &S, sample_count: usize, seed: u64) -> CheckReport {
    check_points(structure, &sample_points(structure.network(), sample_count, seed))
}

/// The oracle itself as a query structure.
pub struct OracleEngine<'a>(pub &'a Network);

impl FarthestQuery for OracleEngine<'_> {
    fn network(&self) -> &Network {
        self.0
    }

    fn farthest_points(&self, q: &PointOnEdge) -> FarthestResult {
        oracle_farthest(self.0, q)
    }
}
