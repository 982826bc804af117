use std::io::Write as _;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::NamedTempFile;

use massdiff::edgelist::parse_edge_list;
use massdiff::{run, RunError, EXIT_INPUT, EXIT_OK, EXIT_VERIFICATION};
use massdiff_core::fixture;
use massdiff_core::graph::{build_graph, IsolatedPolicy};
use massdiff_core::ranking::nbi_topk;
use massdiff_core::DiffusionOperator;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json_lines(&self) -> Vec<Value> {
        self.stdout
            .lines()
            .map(|l| serde_json::from_str(l).expect("stdout line is JSON"))
            .collect()
    }
}

fn massdiff(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("massdiff").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn edge_file(text: &str) -> NamedTempFile {
    let mut file = NamedTempFile::new().unwrap();
    file.write_all(text.as_bytes()).unwrap();
    file.flush().unwrap();
    file
}

fn reference_file() -> NamedTempFile {
    edge_file(fixture::reference_edge_list())
}

fn path(file: &NamedTempFile) -> &str {
    file.path().to_str().unwrap()
}

/// Connected random edge list: a path through alternating users and objects
/// plus extra pairs from a small LCG.
fn random_edge_list(seed: u64, n: usize, m: usize) -> String {
    let mut state = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = move |bound: usize| {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) as usize) % bound
    };
    let mut text = String::new();
    for j in 0..n.max(m) {
        text += &format!("u{}\to{}\n", j % m, j % n);
        text += &format!("u{}\to{}\n", (j + 1) % m, j % n);
    }
    for _ in 0..(n * m) / 4 {
        text += &format!("u{}\to{}\n", next(m), next(n));
    }
    text
}

#[test]
fn paper_example_matches_and_reports_eleven_rounds() {
    let r = massdiff(&["paper-example"]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.stdout, r.stderr);
    assert!(r.stdout.contains("[0.6111, 0.1667, 0.2778]"));
    assert!(r.stdout.contains("e_r = [3.0, 2.0, 3.0]"));
    assert!(r.stdout.contains("|lambda2| = 0.4033"));
    assert!(r.stdout.contains("N = 11"));
    assert!(!r.stdout.contains("MISMATCH"));
}

#[test]
fn grm_on_reference_file() {
    let file = reference_file();
    let r = massdiff(&["grm", "--input", path(&file), "--top-k", "3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let lines = r.json_lines();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].get("user").is_none());
    let objects: Vec<&str> = lines[0]["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["object"].as_str().unwrap())
        .collect();
    assert_eq!(objects, ["o1", "o3", "o2"]);
    assert_eq!(lines[0]["items"][2]["score"], 2.0);
}

#[test]
fn recommend_zero_rounds_is_a_usage_error() {
    let file = reference_file();
    let r = massdiff(&["recommend", "--input", path(&file), "--rounds", "0"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("--rounds"), "{}", r.stderr);
}

#[test]
fn usage_errors_and_help() {
    let file = reference_file();
    assert_eq!(
        massdiff(&["grm", "--input", path(&file), "--bogus"]).code,
        EXIT_INPUT
    );
    assert_eq!(massdiff(&["grm"]).code, EXIT_INPUT);
    assert_eq!(massdiff(&[]).code, EXIT_INPUT);
    assert_eq!(massdiff(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(
        massdiff(&["grm", "-i", path(&file), "--top-k", "0"]).code,
        EXIT_INPUT
    );
    assert_eq!(
        massdiff(&["recommend", "-i", path(&file), "--threads", "0"]).code,
        EXIT_INPUT
    );
    let help = massdiff(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    for sub in [
        "recommend",
        "grm",
        "spectrum",
        "converge",
        "verify-limit",
        "eval",
        "paper-example",
    ] {
        assert!(help.stdout.contains(sub), "help lists {sub}");
    }
    assert_eq!(massdiff(&["--version"]).code, EXIT_OK);
}

#[test]
fn recommend_matches_core_scores() {
    let file = reference_file();
    let r = massdiff(&[
        "recommend",
        "-i",
        path(&file),
        "--rounds",
        "3",
        "--top-k",
        "2",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let graph = fixture::reference_graph();
    let op = DiffusionOperator::new(&graph).unwrap();
    let lines = r.json_lines();
    assert_eq!(lines.len(), graph.n_users());
    for (l, line) in lines.iter().enumerate() {
        assert_eq!(line["user"], graph.user_label(l));
        let expected = nbi_topk(&op, l, 3, 2).unwrap();
        let items = line["items"].as_array().unwrap();
        assert_eq!(items.len(), expected.len());
        for (item, entry) in items.iter().zip(&expected.entries) {
            assert_eq!(item["object"], graph.object_label(entry.object));
            assert_eq!(item["score"].as_f64().unwrap(), entry.score);
        }
    }
    // u1 collected only o1; two rounds give o3 ahead of o2.
    assert_eq!(lines[0]["items"][0]["object"], "o3");
    // u2 collected everything.
    assert_eq!(lines[1]["items"].as_array().unwrap().len(), 0);
}

#[test]
fn recommend_user_filter_and_thread_count_keep_index_order() {
    let file = edge_file(&random_edge_list(7, 40, 30));
    let base = massdiff(&[
        "recommend",
        "-i",
        path(&file),
        "--rounds",
        "2",
        "--threads",
        "1",
    ]);
    assert_eq!(base.code, EXIT_OK, "{}", base.stderr);
    for threads in ["2", "4", "8"] {
        let r = massdiff(&[
            "recommend",
            "-i",
            path(&file),
            "--rounds",
            "2",
            "--threads",
            threads,
        ]);
        assert_eq!(r.stdout, base.stdout, "threads = {threads}");
    }
    let r = massdiff(&[
        "recommend",
        "-i",
        path(&file),
        "--rounds",
        "2",
        "--user",
        "u5",
        "--user",
        "u1",
        "--user",
        "u5",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let users: Vec<String> = r
        .json_lines()
        .iter()
        .map(|l| l["user"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(
        users,
        ["u1", "u5"],
        "first-appearance index order, deduplicated"
    );
    let all: Vec<Value> = base.json_lines();
    let picked: Vec<&Value> = all
        .iter()
        .filter(|l| l["user"] == "u1" || l["user"] == "u5")
        .collect();
    assert_eq!(r.json_lines().iter().collect::<Vec<_>>(), picked);

    let r = massdiff(&["recommend", "-i", path(&file), "--user", "nobody"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.stderr.contains("nobody"));
}

#[test]
fn spectrum_and_converge_on_reference_file() {
    let file = reference_file();
    let r = massdiff(&["spectrum", "-i", path(&file)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = &r.json_lines()[0];
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["alpha", "e_r", "lambda2_abs"]);
    assert_eq!(v["alpha"], 0.125);
    assert_eq!(v["e_r"], serde_json::json!([3.0, 2.0, 3.0]));
    assert!((v["lambda2_abs"].as_f64().unwrap() - 0.403355).abs() < 1e-6);

    let r = massdiff(&["converge", "-i", path(&file)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v = &r.json_lines()[0];
    assert_eq!(v["rounds"], 11);
    assert!(v["residual"].as_f64().unwrap() <= 5e-5);

    let loose = massdiff(&["converge", "-i", path(&file), "--tol", "1e-2"]);
    assert!(loose.json_lines()[0]["rounds"].as_u64().unwrap() < 11);
    assert_eq!(
        massdiff(&["converge", "-i", path(&file), "--tol", "-1"]).code,
        EXIT_INPUT
    );
    assert_eq!(
        massdiff(&["spectrum", "-i", path(&file), "--tol", "0"]).code,
        EXIT_INPUT
    );
}

#[test]
fn verify_limit_passes_on_reference_and_random_graphs() {
    let file = reference_file();
    let r = massdiff(&["verify-limit", "-i", path(&file)]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.stdout, r.stderr);
    let checks: Vec<String> = r
        .json_lines()
        .iter()
        .map(|c| c["check"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(
        checks,
        [
            "column_sums",
            "degree_fixed_point",
            "mass_conservation",
            "limit_convergence",
            "residual_decay"
        ]
    );
    assert!(r.json_lines().iter().all(|c| c["pass"] == true));

    for seed in 0..30 {
        let n = 3 + (seed as usize * 7) % 40;
        let m = 3 + (seed as usize * 11) % 40;
        let file = edge_file(&random_edge_list(seed, n, m));
        let r = massdiff(&["verify-limit", "-i", path(&file)]);
        assert_eq!(r.code, EXIT_OK, "seed {seed}: {}{}", r.stdout, r.stderr);
    }
}

#[test]
fn eval_report_is_deterministic_and_complete() {
    let file = edge_file(&random_edge_list(3, 30, 25));
    let args = [
        "eval",
        "-i",
        path(&file),
        "--fraction",
        "0.8",
        "--seed",
        "42",
        "--rounds",
        "2",
        "--top-k",
        "5",
    ];
    let first = massdiff(&args);
    assert_eq!(first.code, EXIT_OK, "{}", first.stderr);
    assert_eq!(massdiff(&args).stdout, first.stdout);
    let v = &first.json_lines()[0];
    assert_eq!(v["fraction"], 0.8);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["rounds"], 2);
    assert_eq!(v["top_k"], 5);
    for method in ["nbi", "limit", "grm"] {
        let m = &v[method];
        let score = m["mean_ranking_score"].as_f64().unwrap();
        let hit = m["hit_rate_at_k"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&score), "{method}");
        assert!((0.0..=1.0).contains(&hit), "{method}");
        assert_eq!(m["k"], 5);
    }
    let other_seed = massdiff(&[
        "eval",
        "-i",
        path(&file),
        "--fraction",
        "0.8",
        "--seed",
        "43",
    ]);
    assert_eq!(other_seed.code, EXIT_OK);

    for bad in ["0", "-0.5", "1.5"] {
        assert_eq!(
            massdiff(&["eval", "-i", path(&file), "--fraction", bad]).code,
            EXIT_INPUT,
            "{bad}"
        );
    }
}

#[test]
fn input_errors_exit_one_with_a_message() {
    let malformed = edge_file("u1\to1\nu2 o2\n");
    let r = massdiff(&["grm", "-i", path(&malformed)]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let r = massdiff(&["grm", "-i", "/nonexistent/edges.tsv"]);
    assert_eq!(r.code, EXIT_INPUT);

    let empty = edge_file("# nothing here\n");
    assert_eq!(massdiff(&["grm", "-i", path(&empty)]).code, EXIT_INPUT);

    let split = edge_file("u1\to1\nu2\to2\n");
    for sub in ["recommend", "spectrum", "converge", "verify-limit"] {
        let r = massdiff(&[sub, "-i", path(&split)]);
        assert_eq!(r.code, EXIT_INPUT, "{sub}");
        assert!(
            r.stderr.contains("connected components"),
            "{sub}: {}",
            r.stderr
        );
    }
    // The degree baseline does not need a connected graph.
    assert_eq!(massdiff(&["grm", "-i", path(&split)]).code, EXIT_OK);
}

#[test]
fn duplicates_are_reported_on_stderr() {
    let file = edge_file("u1\to1\nu1\to1\n# c\nu2\to1\n");
    let r = massdiff(&["grm", "-i", path(&file), "--isolated", "drop"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(
        r.stderr.contains("4 lines, 1 comments, 1 duplicates"),
        "{}",
        r.stderr
    );
    assert_eq!(r.json_lines()[0]["items"][0]["score"], 2.0);
}

#[test]
fn parse_then_build_matches_the_fixture() {
    let (records, report) = parse_edge_list(fixture::reference_edge_list().as_bytes()).unwrap();
    assert_eq!(report.comments, 1);
    assert_eq!(records, fixture::reference_records());
    let graph = build_graph(&records, IsolatedPolicy::Reject).unwrap();
    assert_eq!(graph.object_degrees(), [3, 2, 3]);
    assert_eq!(graph.user_degrees(), [1, 3, 2, 2]);
}

#[test]
fn verification_errors_map_to_exit_two() {
    let e: RunError = massdiff_core::Error::Verification("W e_r != e_r".into()).into();
    assert_eq!(e.exit_code(), EXIT_VERIFICATION);
    let e: RunError = massdiff_core::Error::EmptyGraph.into();
    assert_eq!(e.exit_code(), EXIT_INPUT);
}

#[test]
fn binary_propagates_exit_codes() {
    let bin = Path::new(env!("CARGO_BIN_EXE_massdiff"));
    let ok = Command::new(bin).arg("paper-example").output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("all values match"));
    let file = reference_file();
    let bad = Command::new(bin)
        .args(["recommend", "--input", path(&file), "--rounds", "0"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
    assert!(bad.stdout.is_empty());
}
