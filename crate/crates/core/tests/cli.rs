use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bcbounds::rational::{fmt_exact, ratio};
use bcbounds::{gk_bound, kat_bound, parse_space};

const PAPER_FILE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/six_events.space");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcbounds")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn bounds_prints_exact_then_decimal() {
    let out = run(&["bounds", "--input", PAPER_FILE]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0], ["instance", "bound", "exact", "decimal"]);
    let find = |b: &str| rows.iter().find(|r| r[1] == b).unwrap().clone();
    assert_eq!(&find("gk")[2..], ["54/55", "0.981818181818"]);
    assert_eq!(find("kat")[2], "1/1");
    assert_eq!(find("ce")[2], "54/55");
    assert_eq!(find("union")[2], "1/1");
    assert!(text.contains("#   rank = 4; free = [3 5]"));
    assert!(text.contains("#   theta = 2/3 2/3 2/3 2/3 2/3 2/3"));

    let only = run(&["bounds", "--input", PAPER_FILE, "--bound", "kat"]);
    assert_eq!(stdout(&only).lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn verify_command_is_deterministic() {
    let a = run(&["verify-paper"]);
    let b = run(&["verify-paper"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.lines().last().unwrap().ends_with("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let bad_sum = write(d, "sum.space", "atom a 1/2\natom b 1/3\nevent A a\n");
    let out = run(&["bounds", "--input", &bad_sum]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let unknown = write(d, "unknown.space", "atom a 1\nevent A a b\n");
    let out = run(&["bounds", "--input", &unknown]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("column"));

    let zero = write(d, "zero.space", "atom a 0\natom b 1\nevent A a\nevent B b\n");
    assert_eq!(code(&run(&["bounds", "--input", &zero, "--bound", "gk"])), 3);
    assert_eq!(code(&run(&["bounds", "--input", &zero, "--bound", "union"])), 0);

    let missing = d.join("missing.space");
    assert_eq!(code(&run(&["bounds", "--input", missing.to_str().unwrap()])), 5);
    assert_eq!(code(&run(&["bounds", "--input", PAPER_FILE, "--bound", "nope"])), 2);

    assert_eq!(code(&run(&["dyadic", "--N", "64", "--p", "1.0"])), 3);
    assert_eq!(code(&run(&["dyadic", "--N", "64", "--p", "1/2,3/2"])), 3);
    assert_eq!(code(&run(&["dyadic", "--N", "2000000"])), 4);
    assert_eq!(code(&run(&["dyadic", "--N", "64", "--tau", "stride:n^"])), 2);
    assert_eq!(code(&run(&["dyadic", "--N", "64", "--tau", "stride:2^n"])), 4);

    let out_dir = d.join("out");
    let out_dir = out_dir.to_str().unwrap();
    let base = ["search", "--atoms", "5", "--events", "6", "--trials", "10", "--out", out_dir];
    assert_eq!(code(&run(&[&base[..], &["--granularity", "4"]].concat())), 3);
    assert_eq!(
        code(&run(&[
            "search",
            "--atoms",
            "5",
            "--events",
            "6",
            "--granularity",
            "5",
            "--trials",
            "0",
            "--out",
            out_dir
        ])),
        2
    );
}

#[test]
fn dyadic_report() {
    let out = run(&["dyadic", "--N", "256", "--p", "0.5,1/10"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let chain_rows: Vec<&str> = text.lines().filter(|l| l.split('\t').count() == 8 && !l.starts_with('n')).collect();
    // checkpoints 2, 4, ..., 256 for two exponents
    assert_eq!(chain_rows.len(), 16);
    assert!(chain_rows.iter().all(|r| r.ends_with("PASS\tPASS\tPASS\tPASS")));
    assert!(text.contains("ms_sup\t"));
    assert!(text.trim_end().ends_with("chain\tPASS"));

    let dir = tempfile::tempdir().unwrap();
    let list = write(dir.path(), "tau.txt", &(1..=64).map(|i| (3 * i).to_string()).collect::<Vec<_>>().join("\n"));
    let out = run(&["dyadic", "--N", "64", "--p", "0.25", "--tau", &format!("list:{list}")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["dyadic", "--N", "10", "--p", "0.25", "--tau", "stride:2^(n-1)"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn search_writes_verifiable_hits() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("hits");
    let args = [
        "search",
        "--atoms",
        "5",
        "--events",
        "6",
        "--granularity",
        "5",
        "--trials",
        "3000",
        "--seed",
        "9",
        "--include",
        PAPER_FILE,
        "--out",
    ];
    let out = run(&[&args[..], &[out_dir.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0);
    let first = stdout(&out);
    assert!(first.starts_with("# evaluated 3001;"));

    let summary = fs::read_to_string(out_dir.join("summary.tsv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), "rank\tsource\tgap\tgk\tkat\tunion\tgap_decimal");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert!(rows.iter().any(|r| r[1] == "include:0" && r[2] == "1/55"));
    for r in &rows {
        let text = fs::read_to_string(out_dir.join(format!("hit_{}.space", r[0]))).unwrap();
        let sys = parse_space(&text).unwrap();
        let (gk, kat) = (gk_bound(&sys).unwrap(), kat_bound(&sys).unwrap().0);
        assert_eq!(fmt_exact(&gk), r[3]);
        assert_eq!(fmt_exact(&kat), r[4]);
        assert!(kat > gk);
    }
    let include_row = rows.iter().find(|r| r[1] == "include:0").unwrap();
    assert_eq!(include_row[3], fmt_exact(&ratio(54, 55)));

    let again = run(&[&args[..], &[out_dir.to_str().unwrap()]].concat());
    assert_eq!(again.stdout, out.stdout);
}
