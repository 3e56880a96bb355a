use mpjc_cli::main_with_args;

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("mpjc").chain(args.iter().copied()))
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["codeword", "--N", "1", "--S", "1", "--mu", "0"]), 0);
    assert_eq!(run(&["codeword", "--N", "1", "--S", "1", "--mu", "2"]), 2);
    assert_eq!(run(&["scan2", "--target", "0,1,1", "--n1", "2", "--m", "4"]), 2);
    assert_eq!(run(&["no-such-command"]), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("unstable.json");
    std::fs::write(
        &cfg,
        r#"{"steps": 1, "lindblad": {"os_relax": 50.0, "os_absorb": 50.0, "os_dephase": 50.0,
            "qb_relax": 0.0, "qb_absorb": 0.0, "qb_dephase": 0.0,
            "scenario": "oscillator", "channels": "both"}}"#,
    )
    .unwrap();
    assert_eq!(run(&["lindblad-sweep", "--config", cfg.to_str().unwrap()]), 3);
}

#[test]
fn scan_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    std::fs::write(
        &cfg,
        r#"{"target": "0,1,1", "n1": 4, "m": 4, "records": "all",
            "grid": {"tau": {"start": 0.0, "end": 6.283185307179586, "count": 11},
                     "theta": {"start": 0.0, "end": 3.141592653589793, "count": 5}, "phi": []}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    assert_eq!(run(&["scan2", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]), 0);
    let csv = std::fs::read_to_string(out.join("scan2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 11 * 5);
    assert!(csv.starts_with("tauIndex,thetaIndex,tau,theta,fidelity"));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["points"], 55);
    assert!(out.join("timings.json").exists());
}
