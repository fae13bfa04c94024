use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn asfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asfam")).args(args).output().expect("run asfam")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn body(s: &str) -> String {
    s.lines().skip(1).collect::<Vec<_>>().join("\n")
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes());
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn dir_arg(d: &Path) -> String {
    d.to_str().unwrap().to_string()
}

#[test]
fn avg_points_rank0_is_exact() {
    let d = tempfile::tempdir().unwrap();
    let o = asfam(&["avg-points", "--family", "rank0", "--p", "3", "--d", "4", "--k-range", "1,4", "--out-dir", &dir_arg(d.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let r = rows(&out);
    let avg: Vec<(&str, &str)> =
        r.iter().filter(|x| x[3] == "avg_points").map(|x| (x[4].as_str(), x[5].as_str())).collect();
    assert_eq!(avg, vec![("4", "4"), ("10", "10"), ("34", "34"), ("82", "82")]);
    assert_eq!(fs::read_to_string(d.path().join("avg-points.csv")).unwrap(), out);
    assert!(d.path().join("avg-points.plotdata.csv").exists());
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let out = dir_arg(d.path());
    let bad_p = asfam(&["avg-points", "--family", "rank0", "--p", "4", "--d", "4", "--out-dir", &out]);
    assert_eq!(bad_p.status.code(), Some(3));
    assert!(stderr(&bad_p).contains("p: 4 is not prime"));
    let cfg = d.path().join("c.json");
    fs::write(&cfg, r#"{"family":"rank0","p":3,"d":4,"colour":"red"}"#).unwrap();
    let unknown = asfam(&["avg-points", "--config", cfg.to_str().unwrap(), "--out-dir", &out]);
    assert_eq!(unknown.status.code(), Some(3));
    assert!(stderr(&unknown).contains("colour"));
    let budget = asfam(&["avg-points", "--family", "rank0", "--p", "3", "--d", "6", "--budget", "10", "--out-dir", &out]);
    assert_eq!(budget.status.code(), Some(4));
    let rh = asfam(&["verify", "--suite", "rh", "--family", "ord", "--p", "3", "--d", "2", "--out-dir", &out]);
    assert_eq!(rh.status.code(), Some(0), "{}", stderr(&rh));
}

#[test]
fn output_is_independent_of_worker_count() {
    let d = tempfile::tempdir().unwrap();
    let out = dir_arg(d.path());
    let base = ["--family", "ord", "--p", "3", "--d", "2", "--K", "6", "--partition-size", "20", "--out-dir", &out];
    let mut got = Vec::new();
    for w in ["1", "8"] {
        for cmd in ["zeros", "moments"] {
            let mut a = vec![cmd];
            a.extend(base);
            a.extend(["--workers", w]);
            let o = asfam(&a);
            assert!(o.status.success(), "{}", stderr(&o));
            got.push(fs::read(d.path().join(format!("{cmd}.csv"))).unwrap());
            got.push(fs::read(d.path().join(format!("{cmd}.plotdata.csv"))).unwrap());
        }
    }
    assert_eq!(got[..4], got[4..]);
}

#[test]
fn repeated_runs_are_identical() {
    let d = tempfile::tempdir().unwrap();
    let out = dir_arg(d.path());
    let a = ["verify", "--suite", "explicit-formula", "--family", "rank0", "--p", "3", "--d", "4", "--samples", "40", "--seed", "7", "--format", "json", "--out-dir", &out];
    let first = stdout(&asfam(&a));
    let second = stdout(&asfam(&a));
    assert_eq!(first, second);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["failures"], 0);
    assert!(v["config"].get("workers").is_none());
}

#[test]
fn resume_matches_uninterrupted_run() {
    let d = tempfile::tempdir().unwrap();
    let out = dir_arg(d.path());
    let c1 = d.path().join("a.jsonl");
    let c2 = d.path().join("b.jsonl");
    let args = |cache: &Path| {
        ["zeros", "--family", "rank0", "--p", "3", "--d", "4", "--K", "6", "--partition-size", "40", "--out-dir", &out, "--cache", cache.to_str().unwrap()]
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<String>>()
    };
    let run = |a: Vec<String>| asfam(&a.iter().map(String::as_str).collect::<Vec<_>>());

    let full = run(args(&c1));
    assert!(full.status.success());

    let mut partial = args(&c2);
    partial.extend(["--max-partitions".into(), "2".into()]);
    let cut = run(partial);
    assert!(cut.status.success());
    assert!(stdout(&cut).is_empty());
    let resumed = run(args(&c2));
    assert!(resumed.status.success());
    assert!(stderr(&resumed).contains("2 partitions resumed"), "{}", stderr(&resumed));

    assert_eq!(body(&stdout(&full)), body(&stdout(&resumed)));
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());

    let plain = asfam(&["zeros", "--family", "rank0", "--p", "3", "--d", "4", "--K", "6", "--out-dir", &out]);
    assert_eq!(body(&stdout(&plain)), body(&stdout(&full)));

    let mut changed = args(&c2);
    changed.extend(["--seed".into(), "9".into()]);
    let restarted = run(changed);
    assert!(stderr(&restarted).contains("starting over"));
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
}

#[test]
fn zero_histogram_has_32_bins() {
    let d = tempfile::tempdir().unwrap();
    let o = asfam(&["zeros", "--family", "rank0", "--p", "3", "--d", "5", "--K", "6", "--interval", "0.5", "--out-dir", &dir_arg(d.path())]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    let bins: Vec<_> = r.iter().filter(|x| x[3].starts_with("hist[")).collect();
    assert_eq!(bins.len(), 32);
    let total: u64 = bins.iter().map(|x| x[4].parse::<u64>().unwrap()).sum();
    let skipped = r.iter().find(|x| x[3] == "hist_skipped").unwrap()[4].parse::<u64>().unwrap();
    assert!(total + skipped <= 486);
    assert!(total > 0);
}

#[test]
fn cache_inspect_reports_bad_lines() {
    let d = tempfile::tempdir().unwrap();
    let out = dir_arg(d.path());
    let cache = d.path().join("c.jsonl");
    let o = asfam(&["zeros", "--family", "ord", "--p", "3", "--d", "2", "--K", "4", "--out-dir", &out, "--cache", cache.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&cache).unwrap();
    let n = text.lines().count();
    let ok = asfam(&["cache", "inspect", cache.to_str().unwrap()]);
    assert!(stdout(&ok).contains(&format!("records: {n}")));

    let mut lines: Vec<&str> = text.lines().collect();
    lines.insert(2, "{not json");
    fs::write(&cache, lines.join("\n") + "\n").unwrap();
    let strict = asfam(&["cache", "inspect", cache.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(3));
    assert!(stderr(&strict).contains("line 3"), "{}", stderr(&strict));
    let lenient = asfam(&["cache", "inspect", "--lenient", cache.to_str().unwrap()]);
    assert!(lenient.status.success());
    assert!(stdout(&lenient).contains("skipped line 3"));
    assert!(stdout(&lenient).contains(&format!("records: {n}")));

    let empty = d.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let e = asfam(&["cache", "inspect", empty.to_str().unwrap()]);
    assert!(e.status.success());
    assert!(stdout(&e).contains("records: 0"));
}
