//! Class engines built from generator shapes, and size-bounded generation
//! for sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abacus::build_abacus;
use crate::bead_chain::build_bead_chain;
use crate::error::{Error, Result};
use crate::exact::{Length, SCALE};
use crate::network::{FarthestResult, PointOnEdge};
use crate::parallel_path::{build_parallel_path, ParallelPathStructure};
use crate::sp::engine::SpStructure;
use crate::{abacus::AbacusStructure, bead_chain::BeadChainStructure};

use super::check::FarthestQuery;
use super::gen::{generate_full, GenSpec, Generated, NetClass, Shape, WeightRange};

/// A query structure that also reports how many probes a query took.
pub trait CountedQuery: FarthestQuery {
    fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult;
}

impl CountedQuery for ParallelPathStructure {
    fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        ParallelPathStructure::farthest_points_counted(self, q, probes)
    }
}

impl CountedQuery for BeadChainStructure {
    fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        BeadChainStructure::farthest_points_counted(self, q, probes)
    }
}

impl CountedQuery for AbacusStructure {
    fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        AbacusStructure::farthest_points_counted(self, q, probes)
    }
}

impl CountedQuery for SpStructure {
    fn farthest_points_counted(&self, q: &PointOnEdge, probes: &mut u64) -> FarthestResult {
        let (r, stats) = self.farthest_points_stats(q);
        *probes += stats.probes;
        r
    }
}

/// The engine for a generated network's class, built from its shape.
pub fn class_engine(g: &Generated) -> Result<Box<dyn CountedQuery>> {
    Ok(match &g.shape {
        Shape::ParallelPath { u, v, .. } => Box::new(build_parallel_path(&g.net, *u, *v)?),
        Shape::BeadChain { cycle, arcs } => Box::new(build_bead_chain(&g.net, cycle, arcs)?),
        Shape::Abacus { u, v, paths, arcs } => Box::new(build_abacus(&g.net, *u, *v, paths, arcs)?),
        Shape::SeriesParallel => Box::new(SpStructure::build(&g.net)?),
    })
}

/// Seed of the `index`-th network of a sweep.
pub fn sweep_seed(seed: u64, index: u64) -> u64 {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15)).gen()
}

/// A random network of `class` with at most `size` vertices. Sizes, path or
/// arc counts and weight ranges (integer, near-unit with many ties, one
/// decimal) all vary with the seed.
pub fn generate_sized(class: NetClass, size: usize, seed: u64) -> Result<Generated> {
    if size < 2 {
        return Err(Error::BudgetExceeded("size must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = match rng.gen_range(0..3) {
        0 => WeightRange::default(),
        1 => WeightRange { lo: Length(SCALE), hi: Length(2 * SCALE), decimals: 0 },
        _ => WeightRange { lo: Length(SCALE / 10), hi: Length(3 * SCALE), decimals: 1 },
    };
    let room = size - 2;
    let mut s = if room == 0 { 0 } else { rng.gen_range(room / 3..=room) };
    let p_max = match class {
        NetClass::SeriesParallel => (s / 2).max(1),
        _ => (s / 3 + 1).clamp(1, 12),
    };
    let p = rng.gen_range(1..=p_max);
    let gseed = rng.gen();
    loop {
        let g = generate_full(&GenSpec { seed: gseed, class, s, p, weights })?;
        if g.net.vertex_count() <= size {
            return Ok(g);
        }
        let excess = g.net.vertex_count() - size;
        if s == 0 {
            // p alone overflows the budget; fall back to one parallel step
            return generate_full(&GenSpec { seed: gseed, class, s: room.min(1), p: 1, weights });
        }
        s = s.saturating_sub(excess);
    }
}
