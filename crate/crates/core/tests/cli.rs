use std::path::PathBuf;
use std::process::{Command, Output};

fn spfar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spfar")).args(args).env_remove("SPFAR_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spfar-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const PP1: &str = "3 3\n0 1 2\n0 2 3\n2 1 3\n";
const SP1: &str = "5 6\n0 1 10\n0 2 2\n2 3 1.5\n3 1 1.5\n2 4 2\n4 1 2\n";

#[test]
fn pp1_left_case() {
    let f = fixture("pp1.txt", PP1);
    let o = spfar(&["query", f.to_str().unwrap(), "--edge", "1", "--lambda", "1/6", "--mode", "points"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "distance 4\nk 1\n2 1/2\n");
    let o = spfar(&["query", f.to_str().unwrap(), "--edge", "1", "--lambda", "1/6", "--decimal"]);
    assert_eq!(stdout(&o), "distance 4\nk 1\n2 0.5\n");
}

#[test]
fn sp1_distances() {
    let f = fixture("sp1.txt", SP1);
    let o = spfar(&["query", f.to_str().unwrap(), "--edge", "0", "--lambda", "0", "--mode", "distance"]);
    assert_eq!(stdout(&o), "distance 7.5\n");
}

#[test]
fn engines_print_identical_bytes() {
    let f = fixture("sp1-all.txt", SP1);
    for e in 0..6 {
        for l in ["0", "1/3", "0.5", "1"] {
            let args = |engine| vec!["query".to_string(), f.to_str().unwrap().into(), "--edge".into(), e.to_string(), "--lambda".into(), l.into(), "--engine".into(), engine];
            let a = Command::new(env!("CARGO_BIN_EXE_spfar")).args(args("fast".into())).output().unwrap();
            let b = Command::new(env!("CARGO_BIN_EXE_spfar")).args(args("oracle".into())).output().unwrap();
            assert!(a.status.success());
            assert_eq!(a.stdout, b.stdout, "edge {e} lambda {l}");
        }
    }
}

#[test]
fn witness_query_line_is_used() {
    let f = fixture("witness.txt", &format!("{PP1}# query 1 1/6\n"));
    assert_eq!(stdout(&spfar(&["query", f.to_str().unwrap()])), "distance 4\nk 1\n2 1/2\n");
}

#[test]
fn exit_codes() {
    let bad = fixture("bad.txt", "3 3\n0 1 2\n");
    assert_eq!(spfar(&["query", bad.to_str().unwrap(), "--edge", "0", "--lambda", "0"]).status.code(), Some(2));
    let pp1 = fixture("pp1-q.txt", PP1);
    assert_eq!(spfar(&["query", pp1.to_str().unwrap(), "--edge", "7", "--lambda", "0"]).status.code(), Some(3));
    assert_eq!(spfar(&["query", pp1.to_str().unwrap(), "--edge", "0", "--lambda", "1.5"]).status.code(), Some(3));
    let k4 = fixture("k4.txt", "4 6\n0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n");
    assert_eq!(spfar(&["query", k4.to_str().unwrap(), "--edge", "0", "--lambda", "0"]).status.code(), Some(4));
    assert_eq!(spfar(&["build", k4.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn verify_sweeps() {
    let o = spfar(&["verify", "--class", "sp", "--count", "200", "--size", "60", "--seed", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("200/200 ok\n"));
    assert!(stdout(&o).starts_with("# verify class sp count 200 size 60 queries 50 seed 7\n"));
    let o = spfar(&["verify", "--class", "beadchain", "--count", "200", "--size", "40", "--seed", "7"]);
    assert!(stdout(&o).ends_with("200/200 ok\n"));
    let o = spfar(&["verify", "--class", "pp", "--count", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("0/0 ok\n"));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_spfar"));
        c.args(["gen", "--class", "abacus", "--s", "12", "--p", "3"]);
        match seed {
            Some(s) => c.env("SPFAR_SEED", s),
            None => c.env_remove("SPFAR_SEED"),
        };
        stdout(&c.output().unwrap())
    };
    let a = run(Some("42"));
    assert!(a.starts_with("# gen class abacus seed 42 "));
    assert_eq!(a, run(Some("42")));
    assert_ne!(a, run(None));
}

#[test]
fn generated_file_round_trips() {
    let o = spfar(&["gen", "--class", "sp", "--s", "20", "--p", "6", "--seed", "5"]);
    let f = fixture("gen.txt", &stdout(&o));
    let b = spfar(&["build", f.to_str().unwrap()]);
    assert!(b.status.success());
    let text = stdout(&b);
    assert!(text.contains("series 20\n") && text.contains("parallel 6\n") && text.contains("reduction_steps 26\n"), "{text}");
}

#[test]
fn envelope_dump() {
    let f = fixture("ab1.txt", "4 5\n0 1 2\n0 2 3\n2 1 3\n0 3 2.5\n3 2 2.5\n");
    let csv = f.with_extension("csv");
    assert!(spfar(&["build", f.to_str().unwrap(), "--dump-envelope", csv.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("position,value,owner"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 2);
    assert!(rows.iter().all(|r| r.len() == 3 && !r[2].is_empty()));
}

#[test]
fn bench_reports_probes() {
    let o = spfar(&["bench", "--class", "beadchain", "--size", "2000", "--p", "40", "--queries", "200", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# bench queries 200 seed 1\n"));
    let row: Vec<f64> = text.lines().nth(2).unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(row.len(), 7);
    assert!(row[6] <= 4.0, "probe constant {}", row[6]);
}
