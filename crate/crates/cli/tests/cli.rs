use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn networks() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../networks")
}

fn net(name: &str) -> String {
    networks().join(name).display().to_string()
}

fn emtr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emtr"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_curve(path: &Path) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("position_m,energy"));
    lines
        .map(|l| {
            let (x, e) = l.split_once(',').unwrap();
            (x.parse().unwrap(), e.parse().unwrap())
        })
        .collect()
}

#[test]
fn decompose_examples() {
    let o = emtr(&["decompose", "--network", &net("t_network.net")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "k=2\n1 2 3\n2 4\n");

    let o = emtr(&["decompose", "--network", &net("canonical_11.net")]);
    assert_eq!(stdout(&o), "k=5\n1 2 3 4 5\n2 6\n3 7\n8 4 9 10\n9 11\n");

    let o = emtr(&["decompose", "--network", &net("single_line.net")]);
    assert_eq!(stdout(&o), "k=1\n1 2\n");
}

#[test]
fn unpinned_canonical_decomposition_still_has_five_paths() {
    let o = emtr(&["decompose", "--network", &net("canonical_11.net"), "--unpinned", "--seed", "3"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k=5"));
    let edges: usize = lines.map(|l| l.split(' ').count() - 1).sum();
    assert_eq!(edges, 10);
}

#[test]
fn missing_network_file_exits_1_and_names_it() {
    let o = emtr(&["decompose", "--network", "/nonexistent/grid.net"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/grid.net"));
}

#[test]
fn bad_flags_exit_1() {
    assert_eq!(emtr(&["locate", "--bogus"]).status.code(), Some(1));
    let o = emtr(&[
        "locate",
        "--network",
        &net("t_network.net"),
        "--fault",
        "edge=zz,offset=10",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = emtr(&[
        "locate",
        "--network",
        &net("t_network.net"),
        "--fault",
        "edge=a,offset=10",
        "--guess-r",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn healthy_network_exits_2() {
    let o = emtr(&[
        "locate",
        "--network",
        &net("t_network.net"),
        "--fault",
        "edge=a,offset=1000,R=inf",
        "--dx",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no transient"));
}

#[test]
fn locates_single_line_fault() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = emtr(&[
        "locate",
        "--network",
        &net("single_line.net"),
        "--fault",
        "edge=e1,offset=4000,R=0,angle=90",
        "--accuracy",
        "5",
        "--seed",
        "7",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("located:")).unwrap();
    let pos: f64 = line.rsplit(" at ").next().unwrap().trim_end_matches(" m").parse().unwrap();
    assert!((pos - 4000.0).abs() <= 5.0, "{line}");
    for f in ["measured.csv", "summary.txt", "trace_path1.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let trace = std::fs::read_to_string(dir.path().join("trace_path1.csv")).unwrap();
    assert!(trace.starts_with("iteration,position_m,energy,accepted,temperature\n"));
}

#[test]
fn exhaustive_canonical_counts_2010() {
    // A coarse simulation grid keeps this fast; the count depends only on
    // the search step.
    let o = emtr(&[
        "locate",
        "--network",
        &net("canonical_11.net"),
        "--fault",
        "edge=e2-3,offset=800,R=1",
        "--mode",
        "exhaustive",
        "--accuracy",
        "10",
        "--dx",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("evaluations: 2010 (exhaustive: 2010)"), "{}", stdout(&o));
}

#[test]
fn sweep_with_step_longer_than_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = emtr(&[
        "sweep",
        "--network",
        &net("t_network.net"),
        "--fault",
        "edge=a,offset=1000",
        "--step",
        "2600",
        "--dx",
        "100",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let short = read_curve(&dir.path().join("sweep_path2.csv"));
    assert_eq!(short.len(), 1);
    assert_eq!(short[0].0, 2500.0);
    assert_eq!(read_curve(&dir.path().join("sweep_path1.csv")).len(), 1);
}

#[test]
fn healthy_sweep_is_silent() {
    let sweep = |fault: &str, dir: &Path| {
        let o = emtr(&[
            "sweep",
            "--network",
            &net("t_network.net"),
            "--fault",
            fault,
            "--step",
            "250",
            "--dx",
            "50",
            "--out",
            &dir.display().to_string(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (1..=2)
            .flat_map(|k| read_curve(&dir.join(format!("sweep_path{k}.csv"))))
            .map(|(_, e)| e)
            .collect::<Vec<f64>>()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let faulted = sweep("edge=a,offset=1000,R=0", a.path());
    let healthy = sweep("edge=a,offset=1000,R=inf", b.path());
    let peak = faulted.iter().copied().fold(0.0, f64::max);
    assert!(peak > 0.0);
    assert!(healthy.iter().all(|&e| e <= 1e-12 * peak));
}

#[test]
fn campaign_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenarios = dir.path().join("faults.txt");
    std::fs::write(&scenarios, "# two faults\nedge=a,offset=1500\nedge=c,offset=1000,R=5 # branch\n").unwrap();
    let o = emtr(&[
        "campaign",
        "--network",
        &net("t_network.net"),
        "--scenarios",
        &scenarios.display().to_string(),
        "--repeats",
        "2",
        "--accuracy",
        "100",
        "--dx",
        "100",
        "--jobs",
        "1",
        "--out",
        &dir.path().display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("campaign.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scenario,repeat,seed,located_path,located_pos_m,true_pos_m,error_m,energy,evaluations,mode"
    );
    assert_eq!(lines.count(), 4);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("scenario ")).count(), 2);
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let o = emtr(&[
            "locate",
            "--network",
            &net("t_network.net"),
            "--fault",
            "edge=c,offset=700,R=1,angle=60",
            "--accuracy",
            "20",
            "--dx",
            "50",
            "--seed",
            "11",
            "--out",
            &dir.path().display().to_string(),
        ]);
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        (o.stdout, files)
    };
    let (a, b) = (run(), run());
    assert!(!a.1.is_empty());
    assert_eq!(a, b);
}
