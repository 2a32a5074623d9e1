use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spfar::exact::{format_scaled, parse_rational, Length, Q};
use spfar::oracle::oracle_farthest;
use spfar::plf::envelope::UpperEnvelope;
use spfar::sp::engine::SpStructure;
use spfar::sp::nest::decompose;
use spfar::testkit::check::{check_equivalence, witness_query, MAX_DENOMINATOR};
use spfar::testkit::engines::{class_engine, generate_sized, sweep_seed, CountedQuery};
use spfar::testkit::gen::{generate_full, GenSpec, NetClass, WeightRange};
use spfar::{Error, FarthestResult, Network, PointOnEdge};

#[derive(Parser)]
#[command(name = "spfar", version, about = "Farthest-point queries on series-parallel networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the query structure for a network and print its statistics.
    Build(BuildArgs),
    /// Answer one farthest-distance or farthest-point query.
    Query(QueryArgs),
    /// Compare the class engines against the oracle on random networks.
    Verify(VerifyArgs),
    /// Generate a random network.
    Gen(GenArgs),
    /// Time construction and queries, and count probes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct BuildArgs {
    file: PathBuf,
    /// Write the root abacus's upper envelope as CSV (position, value, owner).
    #[arg(long)]
    dump_envelope: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Distance,
    Points,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Fast,
    Oracle,
}

#[derive(Args)]
struct QueryArgs {
    file: PathBuf,
    /// Edge index in file order; defaults to the file's `# query` line.
    #[arg(long, requires = "lambda")]
    edge: Option<usize>,
    /// Position on the edge, as a decimal or a fraction `a/b`.
    #[arg(long, requires = "edge")]
    lambda: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Points)]
    mode: Mode,
    #[arg(long, value_enum, default_value_t = Engine::Fast)]
    engine: Engine,
    /// Print lambdas as decimals where they terminate.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    class: NetClass,
    #[arg(long, default_value_t = 200)]
    count: u64,
    /// Largest vertex count.
    #[arg(long, default_value_t = 60)]
    size: usize,
    #[arg(long, default_value_t = 50)]
    queries: usize,
    #[arg(long, env = "SPFAR_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    class: NetClass,
    /// Series operations.
    #[arg(long, default_value_t = 8)]
    s: usize,
    /// Parallel operations (paths for pp and abacus).
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Pick s and p at random for at most this many vertices instead.
    #[arg(long, conflicts_with_all = ["s", "p"])]
    size: Option<usize>,
    #[arg(long, default_value = "1")]
    lo: String,
    #[arg(long, default_value = "9")]
    hi: String,
    /// Fractional digits of generated weights.
    #[arg(long, default_value_t = 0)]
    decimals: u32,
    #[arg(long, env = "SPFAR_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Network file; without it a network of `--class` is generated.
    file: Option<PathBuf>,
    #[arg(long, default_value = "sp")]
    class: NetClass,
    /// Vertex count of the generated network.
    #[arg(long, default_value_t = 100_000)]
    size: usize,
    /// Parallel operations of the generated network.
    #[arg(long, default_value_t = 1000)]
    p: usize,
    #[arg(long, default_value_t = 10_000)]
    queries: usize,
    /// One row per size, doubling from 1024 up to `--size`.
    #[arg(long)]
    scaling: bool,
    #[arg(long, env = "SPFAR_SEED", default_value_t = 0)]
    seed: u64,
}

/// A failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::InvalidQuery(_) => 3,
            Error::NotSeriesParallel => 4,
            Error::Parse(_) | Error::NotSimple(_) | Error::NotConnected | Error::NonPositiveWeight(_) | Error::WeightPrecisionExceeded(_) | Error::Overflow => 2,
            _ => 1,
        };
        Fail(code, e.to_string())
    }
}

type Out = Result<String, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| Fail(1, format!("{}: {e}", path.display())))
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn envelope_csv(e: &UpperEnvelope) -> String {
    let mut s = String::from("position,value,owner\n");
    for (k, (x, y)) in e.breakpoints().into_iter().enumerate() {
        let owners: Vec<String> = e.vertex_owners[k].iter().map(|o| o.to_string()).collect();
        let _ = writeln!(s, "{},{},{}", format_scaled(&x), format_scaled(&y), owners.join(";"));
    }
    s
}

fn cmd_build(a: &BuildArgs) -> Out {
    let net = Network::parse(&read(&a.file)?)?;
    let t = Instant::now();
    let st = SpStructure::build(&net)?;
    let built = t.elapsed();
    let t = Instant::now();
    let tree = decompose(&net)?;
    let nested = t.elapsed();
    let (n, m) = (net.vertex_count(), net.edge_count());
    let root = st.tree().node(st.tree().root);
    let mut s = String::new();
    let _ = writeln!(s, "n {n}\nm {m}\nterminals {} {}", root.a, root.b);
    let _ = writeln!(s, "series {}\nparallel {}\nreduction_steps {}", n - 2, m + 1 - n, st.reduction_steps());
    let _ = writeln!(s, "abacus_nodes {}\nbuild_ms {}\ndecompose_ms {}", tree.len(), ms(built), ms(nested));
    if let Some(path) = &a.dump_envelope {
        let ab = &tree.nodes[tree.root].abacus;
        let env = ab.outward_envelope().or_else(|| ab.chain(0).levels().map(|l| &l.u1));
        let csv = env.map_or_else(|| "position,value,owner\n".to_string(), envelope_csv);
        write(path, &csv)?;
        let _ = writeln!(s, "envelope {}", path.display());
    }
    Ok(s)
}

fn render(r: &FarthestResult, mode: Mode, decimal: bool) -> String {
    let mut s = format!("distance {}\n", r.distance_string());
    if mode == Mode::Points {
        let _ = writeln!(s, "k {}", r.k());
        for p in &r.points {
            let _ = writeln!(s, "{}", p.display(decimal));
        }
    }
    s
}

fn cmd_query(a: &QueryArgs) -> Out {
    let text = read(&a.file)?;
    let net = Network::parse(&text)?;
    let (edge, lambda) = match (a.edge, &a.lambda) {
        (Some(e), Some(l)) => (e, l.clone()),
        _ => witness_query(&text).ok_or_else(|| Fail(3, "no query given and no `# query` line in the file".into()))?,
    };
    let lambda = parse_rational(&lambda).map_err(|_| Fail(3, format!("invalid lambda `{lambda}`")))?;
    let q = PointOnEdge::new(edge, lambda);
    q.validate(&net)?;
    let q = q.canonical(&net);
    let r = match a.engine {
        Engine::Fast => SpStructure::build(&net)?.farthest_points(&q),
        Engine::Oracle => oracle_farthest(&net, &q),
    };
    Ok(render(&r, a.mode, a.decimal))
}

fn cmd_verify(a: &VerifyArgs) -> Out {
    let mut s = format!("# verify class {} count {} size {} queries {} seed {}\n", a.class.name(), a.count, a.size, a.queries, a.seed);
    let mut ok = 0;
    for i in 0..a.count {
        let seed = sweep_seed(a.seed, i);
        let g = generate_sized(a.class, a.size, seed)?;
        let engine = class_engine(&g)?;
        let report = check_equivalence(engine.as_ref(), a.queries, seed);
        match report.mismatches.first() {
            None => ok += 1,
            Some(m) => {
                let _ = writeln!(s, "# mismatch on network {i} (seed {seed})\n# expected distance {}, got {}", format_scaled(&m.expected.distance), format_scaled(&m.got.distance));
                s.push_str(&m.witness);
            }
        }
    }
    let _ = writeln!(s, "{ok}/{} ok", a.count);
    if ok == a.count {
        Ok(s)
    } else {
        print!("{s}");
        Err(Fail(1, format!("{} of {} networks mismatched", a.count - ok, a.count)))
    }
}

fn cmd_gen(a: &GenArgs) -> Out {
    let weights = WeightRange { lo: Length::parse_decimal(&a.lo)?, hi: Length::parse_decimal(&a.hi)?, decimals: a.decimals };
    let g = match a.size {
        Some(size) => generate_sized(a.class, size, a.seed)?,
        None => generate_full(&GenSpec { seed: a.seed, class: a.class, s: a.s, p: a.p, weights })?,
    };
    let mut s = format!("# gen class {} seed {} series {} parallel {}\n", a.class.name(), a.seed, g.series, g.parallel);
    s.push_str(&g.net.to_text());
    match &a.out {
        Some(path) => {
            write(path, &s)?;
            Ok(String::new())
        }
        None => Ok(s),
    }
}

/// Uniform random edge-interior or endpoint queries.
fn random_queries(net: &Network, count: usize, seed: u64) -> Vec<PointOnEdge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let den = rng.gen_range(1..=MAX_DENOMINATOR);
            PointOnEdge::new(rng.gen_range(0..net.edge_count()), Q::new(rng.gen_range(0..=den), den)).canonical(net)
        })
        .collect()
}

fn percentile(sorted: &[Duration], p: f64) -> Duration {
    sorted.get(((sorted.len() as f64 - 1.0) * p).round() as usize).copied().unwrap_or_default()
}

fn bench_row(net: &Network, engine: &dyn CountedQuery, built: Duration, queries: usize, seed: u64) -> String {
    let mut times = Vec::with_capacity(queries);
    let (mut total, mut worst) = (0u64, 0f64);
    let log_n = (net.vertex_count() as f64).log2().max(1.0);
    for q in random_queries(net, queries, seed) {
        let mut probes = 0;
        let t = Instant::now();
        let r = engine.farthest_points_counted(&q, &mut probes);
        times.push(t.elapsed());
        total += probes;
        worst = worst.max((probes as f64 - r.k() as f64) / log_n);
    }
    times.sort();
    let mean = if queries == 0 { 0.0 } else { total as f64 / queries as f64 };
    format!(
        "{:>9} {:>9} {:>11} {:>11} {:>11} {:>9.1} {:>7.2}\n",
        net.vertex_count(),
        net.edge_count(),
        ms(built),
        format!("{:.2}", percentile(&times, 0.5).as_secs_f64() * 1e6),
        format!("{:.2}", percentile(&times, 0.95).as_secs_f64() * 1e6),
        mean,
        worst
    )
}

fn cmd_bench(a: &BenchArgs) -> Out {
    let mut s = format!("# bench queries {} seed {}\n", a.queries, a.seed);
    s.push_str("        n         m    build_ms  median_us     p95_us  probes/q  max_c\n");
    let mut run = |net: &Network, engine: Result<Box<dyn CountedQuery>, Error>, t: Instant| -> Result<(), Fail> {
        let engine = engine?;
        s.push_str(&bench_row(net, engine.as_ref(), t.elapsed(), a.queries, a.seed));
        Ok(())
    };
    if let Some(file) = &a.file {
        let net = Network::parse(&read(file)?)?;
        let t = Instant::now();
        run(&net, SpStructure::build(&net).map(|st| Box::new(st) as Box<dyn CountedQuery>), t)?;
    } else {
        let sizes: Vec<usize> = if a.scaling {
            std::iter::successors(Some(1024usize), |&n| (n * 2 <= a.size).then_some(n * 2)).collect()
        } else {
            vec![a.size]
        };
        for size in sizes {
            let p = a.p.min(size / 4).max(1);
            let spec = GenSpec { seed: a.seed, class: a.class, s: size.saturating_sub(2), p, weights: WeightRange::default() };
            let g = generate_full(&spec)?;
            let t = Instant::now();
            run(&g.net, class_engine(&g), t)?;
        }
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.cmd {
        Cmd::Build(a) => cmd_build(a),
        Cmd::Query(a) => cmd_query(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match out {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(Fail(code, msg)) => {
            eprintln!("spfar: {msg}");
            ExitCode::from(code)
        }
    }
}
