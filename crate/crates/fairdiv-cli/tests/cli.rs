//! End-to-end runs of the compiled binary: file formats, exit codes, and
//! the guarantees the subcommands advertise.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fairdiv::fixtures::get_fixture;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairdiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let output = run(&[
            "gen",
            "--shape",
            "path",
            "--vertices",
            "5",
            "--agents",
            "3",
            "--seed",
            "7",
            "--out",
            path_str(out),
        ]);
        assert_eq!(code(&output), 0, "{output:?}");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.path().join("c.json");
    let output = run(&[
        "gen",
        "--shape",
        "path",
        "--vertices",
        "5",
        "--agents",
        "3",
        "--seed",
        "8",
        "--out",
        path_str(&c),
    ]);
    assert_eq!(code(&output), 0);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn exported_fixture_solves_to_the_frozen_nash_product() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let alloc = dir.path().join("alloc.json");

    let output = run(&[
        "fixture",
        "--name",
        "prop3.2-mnw-half",
        "--out",
        path_str(&inst),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");

    let output = run(&[
        "solve",
        "--algo",
        "brute-mnw",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&alloc),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");

    let parsed: Value = serde_json::from_str(&fs::read_to_string(&alloc).unwrap()).unwrap();
    let bundles: Vec<Vec<usize>> = parsed["bundles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| {
            b.as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_u64().unwrap() as usize)
                .collect()
        })
        .collect();
    let fixture = get_fixture("prop3.2-mnw-half").unwrap();
    let product: u64 = fixture
        .instance
        .agents()
        .iter()
        .zip(&bundles)
        .map(|(u, bundle)| u.value(bundle))
        .product();
    assert_eq!(product, 4);
}

#[test]
fn two_agent_solution_verifies_at_three_quarters() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let alloc = dir.path().join("alloc.json");

    let output = run(&[
        "gen",
        "--shape",
        "gnp",
        "--vertices",
        "7",
        "--agents",
        "2",
        "--umax",
        "9",
        "--seed",
        "11",
        "--out",
        path_str(&inst),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");

    let output = run(&[
        "solve",
        "--algo",
        "two34",
        "--in",
        path_str(&inst),
        "--out",
        path_str(&alloc),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");

    let output = run(&[
        "verify",
        "--criterion",
        "pmms",
        "--alpha",
        "3/4",
        "--in",
        path_str(&inst),
        "--alloc",
        path_str(&alloc),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
    let witness = stdout_json(&output);
    assert_eq!(witness["passes"], Value::Bool(true));
}

#[test]
fn failed_verification_exits_two_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let alloc = dir.path().join("alloc.json");
    fs::write(
        &inst,
        r#"{"graph":{"vertices":3,"edges":[[0,1],[1,2]]},"agents":[{"type":"additive","values":[1,1,10]},{"type":"additive","values":[1,1,10]}]}"#,
    )
    .unwrap();
    fs::write(&alloc, r#"{"bundles":[[0],[1,2]]}"#).unwrap();

    let output = run(&[
        "verify",
        "--criterion",
        "pmms",
        "--in",
        path_str(&inst),
        "--alloc",
        path_str(&alloc),
    ]);
    assert_eq!(code(&output), 2, "{output:?}");
    let witness = stdout_json(&output);
    assert_eq!(witness["passes"], Value::Bool(false));
    assert_eq!(witness["violations"][0]["agent"], Value::from(0));

    let output = run(&[
        "verify",
        "--criterion",
        "ef1",
        "--in",
        path_str(&inst),
        "--alloc",
        path_str(&alloc),
    ]);
    assert_eq!(code(&output), 0, "removing the last item clears the envy");
}

#[test]
fn oracle_prints_exact_share_values() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    fs::write(
        &inst,
        r#"{"graph":{"vertices":4,"edges":[[0,1],[1,2],[2,3]]},"agents":[{"type":"additive","values":[1,3,3,1]},{"type":"additive","values":[1,3,3,1]},{"type":"additive","values":[1,3,3,1]}]}"#,
    )
    .unwrap();

    let output = run(&[
        "oracle",
        "--value",
        "mu",
        "--agent",
        "0",
        "--bundle",
        "0,1,2",
        "--k",
        "2",
        "--in",
        path_str(&inst),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
    assert_eq!(String::from_utf8_lossy(&output.stdout).trim(), "3");

    let output = run(&[
        "oracle",
        "--value",
        "pmms",
        "--agent",
        "1",
        "--bundle",
        "0,1",
        "--in",
        path_str(&inst),
    ]);
    assert_eq!(code(&output), 0);
    assert_eq!(String::from_utf8_lossy(&output.stdout).trim(), "1");

    let output = run(&[
        "oracle",
        "--value",
        "mms",
        "--agent",
        "0",
        "--in",
        path_str(&inst),
    ]);
    assert_eq!(code(&output), 0);
    assert_eq!(String::from_utf8_lossy(&output.stdout).trim(), "1");
}

#[test]
fn exit_codes_separate_failure_classes() {
    let dir = tempfile::tempdir().unwrap();

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "not json").unwrap();
    let output = run(&["solve", "--in", path_str(&garbage)]);
    assert_eq!(code(&output), 1, "{output:?}");

    let unknown = run(&["fixture", "--name", "unknown"]);
    assert_eq!(code(&unknown), 1);

    let big = dir.path().join("big.json");
    let output = run(&[
        "gen",
        "--shape",
        "path",
        "--vertices",
        "13",
        "--agents",
        "2",
        "--seed",
        "1",
        "--out",
        path_str(&big),
    ]);
    assert_eq!(code(&output), 0);
    let output = run(&["solve", "--algo", "brute-mnw", "--in", path_str(&big)]);
    assert_eq!(code(&output), 3, "{output:?}");

    let star = dir.path().join("star.json");
    let output = run(&[
        "gen",
        "--shape",
        "star",
        "--vertices",
        "6",
        "--agents",
        "3",
        "--seed",
        "1",
        "--out",
        path_str(&star),
    ]);
    assert_eq!(code(&output), 0);
    let output = run(&["solve", "--algo", "path3", "--in", path_str(&star)]);
    assert_eq!(code(&output), 4, "{output:?}");

    let output = run(&[
        "verify",
        "--criterion",
        "efx",
        "--alpha",
        "1/2",
        "--in",
        path_str(&star),
        "--alloc",
        path_str(&star),
    ]);
    assert_eq!(code(&output), 1, "efx takes no alpha");
}

#[test]
fn tabulated_fixture_survives_the_file_format() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("cycle.json");
    let output = run(&[
        "fixture",
        "--name",
        "appxA-cycle4-submodular",
        "--out",
        path_str(&inst),
        "--canonical",
    ]);
    assert_eq!(code(&output), 0, "{output:?}");
    let text = fs::read_to_string(&inst).unwrap();
    assert!(text.contains(r#""type":"table""#));
    assert!(text.contains(r#""monotone":true"#));

    // Not additive, so auto falls through to the exhaustive solver.
    let output = run(&["solve", "--algo", "auto", "--in", path_str(&inst)]);
    assert_eq!(code(&output), 0, "{output:?}");
    let alloc = stdout_json(&output);
    assert_eq!(alloc["bundles"].as_array().unwrap().len(), 2);
}

#[test]
fn bench_reports_exact_ratios_per_instance() {
    let dir = tempfile::tempdir().unwrap();
    let work = dir.path().join("instances");
    fs::create_dir(&work).unwrap();
    for (name, args) in [
        (
            "a.json",
            vec![
                "gen",
                "--shape",
                "gnp",
                "--vertices",
                "7",
                "--agents",
                "2",
                "--seed",
                "1",
            ],
        ),
        (
            "b.json",
            vec![
                "gen",
                "--shape",
                "tree",
                "--vertices",
                "6",
                "--agents",
                "2",
                "--seed",
                "2",
            ],
        ),
        (
            "c.json",
            vec![
                "gen",
                "--shape",
                "path",
                "--vertices",
                "8",
                "--agents",
                "3",
                "--seed",
                "3",
            ],
        ),
    ] {
        let out = work.join(name);
        let mut full = args.clone();
        full.extend_from_slice(&["--out", path_str(&out)]);
        let output = run(&full);
        assert_eq!(code(&output), 0, "{output:?}");
    }

    let report_path = dir.path().join("report.json");
    let output = run(&[
        "bench",
        "--dir",
        path_str(&work),
        "--out",
        path_str(&report_path),
    ]);
    assert_eq!(code(&output), 0, "{output:?}");

    let report: Value = serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    let instances = report["instances"].as_array().unwrap();
    assert_eq!(instances.len(), 3);
    assert_eq!(instances[0]["file"], Value::from("a.json"));
    assert_eq!(instances[0]["algo"], Value::from("two34"));
    assert_eq!(instances[1]["algo"], Value::from("two34"));
    assert_eq!(instances[2]["algo"], Value::from("path3"));
    assert_eq!(instances[2]["min_ratio"], Value::from("1/1"));

    let parse_ratio = |text: &str| -> (u64, u64) {
        let (p, q) = text.split_once('/').unwrap();
        (p.parse().unwrap(), q.parse().unwrap())
    };
    let mut worst = (1, 1);
    for instance in instances {
        let ratio = parse_ratio(instance["min_ratio"].as_str().unwrap());
        assert!(ratio.0 * 4 >= 3 * ratio.1, "ratio {ratio:?} below 3/4");
        for agent in instance["agents"].as_array().unwrap() {
            let (num, den) = (
                agent["ratio_num"].as_u64().unwrap(),
                agent["ratio_den"].as_u64().unwrap(),
            );
            assert!(num * 4 >= 3 * den);
        }
        if ratio.0 * worst.1 <= worst.0 * ratio.1 {
            worst = ratio;
        }
    }
    let global = parse_ratio(report["global_min_ratio"].as_str().unwrap());
    assert_eq!(global, worst);
}
