use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn plse(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plse"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("failed to run plse")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_complete_square_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = plse(&["gen", "--scheme", "qwh", "--n", "3", "--r", "1", "-o", "full.pls"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "9");
    let inst = plse::pls::parse_instance(&fs::read_to_string(dir.path().join("full.pls")).unwrap()).unwrap();
    assert!(inst.is_complete());

    let o = plse(&["gen", "--scheme", "qc", "--n", "40", "--r", "0.6", "--seed", "3", "-o", "a.pls"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "960");
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.pls", "b.pls"] {
        let o = plse(&["gen", "--scheme", "qc", "--n", "12", "--r", "0.5", "--seed", "9", "-o", name], dir.path());
        assert!(o.status.success());
    }
    assert_eq!(
        fs::read(dir.path().join("a.pls")).unwrap(),
        fs::read(dir.path().join("b.pls")).unwrap()
    );
}

#[test]
fn gen_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = plse(&["gen", "--scheme", "qc", "--n", "5", "--r", "1.5", "-o", "x.pls"], dir.path());
    assert!(!o.status.success());
    let o = plse(&["gen", "--scheme", "magic", "--n", "5", "--r", "0.5", "-o", "x.pls"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn solve_tiny_instance_is_optimal_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("tiny.pls"), "2\n1 0\n0 0\n").unwrap();
    for alg in ["ls1", "ls2", "ls3", "tr-ls", "ils1", "ils2", "ils3", "tr-ils"] {
        let o = plse(
            &["solve", "--alg", alg, "--time-limit", "1", "--seed", "2", "tiny.pls", "-o", "out.pls", "--stats", "st.json"],
            dir.path(),
        );
        assert!(o.status.success(), "{alg}: {}", stderr(&o));
        assert_eq!(fs::read_to_string(dir.path().join("out.pls")).unwrap(), "2\n1 2\n2 1\n");
        let stats: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("st.json")).unwrap()).unwrap();
        assert_eq!(stats["opt"], true);
        assert_eq!(stats["final"], 3);
        assert_eq!(stats["alg"], alg);
        assert!(!stats["series"].as_array().unwrap().is_empty());
        let o = plse(&["verify", "tiny.pls", "out.pls"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("4 of 4"));
    }
}

#[test]
fn solve_stats_series_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    plse(&["gen", "--scheme", "qc", "--n", "15", "--r", "0.5", "--seed", "4", "-o", "i.pls"], dir.path());
    let o = plse(
        &["solve", "--alg", "tr-ils", "--time-limit", "0.5", "i.pls", "-o", "o.pls", "--stats", "s.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let series = stats["series"].as_array().unwrap();
    let sizes: Vec<u64> = series.iter().map(|p| p[1].as_u64().unwrap()).collect();
    assert!(sizes.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*sizes.last().unwrap(), stats["final"].as_u64().unwrap());
    assert_eq!(sizes[0], stats["init"].as_u64().unwrap());
    assert!(plse(&["verify", "i.pls", "o.pls"], dir.path()).status.success());
}

#[test]
fn local_search_is_deterministic_and_stops_early() {
    let dir = tempfile::tempdir().unwrap();
    plse(&["gen", "--scheme", "qc", "--n", "20", "--r", "0.4", "--seed", "1", "-o", "i.pls"], dir.path());
    let start = std::time::Instant::now();
    for out in ["a.pls", "b.pls"] {
        let o = plse(&["solve", "--alg", "ls3", "--time-limit", "60", "--seed", "5", "i.pls", "-o", out], dir.path());
        assert!(o.status.success());
    }
    assert!(start.elapsed().as_secs() < 30);
    assert_eq!(
        fs::read(dir.path().join("a.pls")).unwrap(),
        fs::read(dir.path().join("b.pls")).unwrap()
    );
}

#[test]
fn solve_rejects_invalid_instance() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.pls"), "2\n1 1\n0 0\n").unwrap();
    let o = plse(&["solve", "bad.pls", "-o", "o.pls"], dir.path());
    assert!(!o.status.success());
    assert!(!dir.path().join("o.pls").exists());
    let o = plse(&["solve", "missing.pls", "-o", "o.pls"], dir.path());
    assert!(!o.status.success());
    fs::write(dir.path().join("ok.pls"), "2\n1 0\n0 0\n").unwrap();
    let o = plse(&["solve", "--time-limit", "0", "ok.pls", "-o", "o.pls"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn verify_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("i.pls"), "3\n1 0 0\n0 0 0\n0 0 0\n").unwrap();
    fs::write(p.join("good.pls"), "3\n1 2 3\n2 3 1\n3 1 2\n").unwrap();
    fs::write(p.join("missing.pls"), "3\n0 2 3\n2 3 1\n3 1 2\n").unwrap();
    fs::write(p.join("column.pls"), "3\n1 2 3\n2 0 1\n3 2 0\n").unwrap();

    assert!(plse(&["verify", "i.pls", "good.pls"], p).status.success());
    let o = plse(&["verify", "i.pls", "missing.pls"], p);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cell (1,1)"), "{}", stderr(&o));
    let o = plse(&["verify", "i.pls", "column.pls"], p);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("column 2"), "{}", stderr(&o));
}

#[test]
fn bench_writes_rows_and_means() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::create_dir(p.join("inst")).unwrap();
    for (i, seed) in ["1", "2"].iter().enumerate() {
        let name = format!("inst/qc_n10_{i}.pls");
        plse(&["gen", "--scheme", "qc", "--n", "10", "--r", "0.5", "--seed", seed, "-o", &name], p);
    }
    let o = plse(
        &[
            "bench", "--dir", "inst", "--alg", "ils1,tr-ils", "--time-limit", "0.3", "--seeds", "7", "--csv", "out.csv",
            "--checkpoints", "0.1,0.2,0.3",
        ],
        p,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(p.join("out.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header.join(","),
        "instance,n,r,scheme,alg,seed,given,init,final,iters,elapsed_ms,opt,ckpt_0.1s,ckpt_0.2s,ckpt_0.3s"
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let (means, runs): (Vec<_>, Vec<_>) = rows.iter().partition(|r| &r[0] == "MEAN");
    assert_eq!(runs.len(), 4);
    assert_eq!(means.len(), 2);
    for r in &runs {
        assert_eq!(&r[3], "qc");
        assert_eq!(&r[2], "0.5");
        let ck: Vec<u64> = (12..15).map(|i| r[i].parse().unwrap()).collect();
        assert!(ck.windows(2).all(|w| w[0] <= w[1]));
        assert!(ck[2] <= r[8].parse().unwrap());
        assert!(r[8].parse::<u64>().unwrap() >= r[7].parse().unwrap());
    }
    // Means reproduce from the rows.
    for m in &means {
        let alg = &m[4];
        let finals: Vec<f64> = runs.iter().filter(|r| &r[4] == alg).map(|r| r[8].parse().unwrap()).collect();
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        assert!((m[8].parse::<f64>().unwrap() - mean).abs() < 1e-3);
    }
}

#[test]
fn bench_default_checkpoints_header() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::create_dir(p.join("inst")).unwrap();
    fs::write(p.join("inst/tiny.pls"), "2\n1 0\n0 0\n").unwrap();
    fs::write(p.join("inst/broken.pls"), "2\n1 1\n0 0\n").unwrap();
    let o = plse(&["bench", "--dir", "inst", "--alg", "ls1", "--time-limit", "0.1", "--csv", "o.csv"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(p.join("o.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,n,r,scheme,alg,seed,given,init,final,iters,elapsed_ms,opt,ckpt_5s,ckpt_10s,ckpt_30s"
    );
    // The broken instance gets a row of its own with empty results.
    assert!(text.lines().any(|l| l.starts_with("broken,,,,ls1,0,")));
    assert!(text.lines().any(|l| l.starts_with("tiny,2,0.25,unknown,ls1,0,1,3,3,1,")));
}
