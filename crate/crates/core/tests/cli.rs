//! End-to-end tests of the command-line interface: output contents, exit
//! codes, determinism, and the enumeration-cap environment override.

mod common;

use rescue_games::files::parse_str;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rescue-games"))
}

fn instance_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../instances")
        .join(name)
}

static COUNTER: AtomicU32 = AtomicU32::new(0);

fn temp_file(stem: &str, content: &str) -> PathBuf {
    let unique = COUNTER.fetch_add(1, Ordering::Relaxed);
    let path = std::env::temp_dir().join(format!(
        "rescue-games-cli-{}-{unique}-{stem}.json",
        std::process::id()
    ));
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn solves_the_reference_tree_file() {
    let output = binary()
        .args(["solve", instance_path("tree.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("value: 14/177"), "{text}");
    assert!(text.contains("A: 5/59"), "{text}");
    assert!(text.contains("B: 36/59"), "{text}");
    assert!(text.contains("C: 18/59"), "{text}");
    assert!(text.contains("O: 9/59"), "{text}");
    assert!(text.contains("D: 2/3"), "{text}");
}

#[test]
fn solves_a_rescue_file_and_echoes_the_instance() {
    let path = instance_path("rescue.json");
    let output = binary()
        .args(["solve", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("value: 15/32"), "{text}");

    let echoed = text
        .lines()
        .find_map(|line| line.strip_prefix("instance: "))
        .expect("the report echoes the instance");
    let original = parse_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parse_str(echoed).unwrap(), original);
}

#[test]
fn cost_paid_presentation_flag() {
    let output = binary()
        .args([
            "solve",
            instance_path("additive.json").to_str().unwrap(),
            "--cost-paid",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("expected cost paid"));

    let output = binary()
        .args([
            "solve",
            instance_path("rescue.json").to_str().unwrap(),
            "--cost-paid",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn rejects_decimal_literals_with_exit_2() {
    let path = temp_file(
        "decimal",
        r#"{"kind":"rescue","k":1,"locations":[{"id":"1","p":"0.5"},{"id":"2","p":"3/4"}]}"#,
    );
    let output = binary()
        .args(["solve", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("decimal"), "{}", stderr(&output));
}

#[test]
fn best_response_prints_indices_and_order() {
    let game = temp_file(
        "br-game",
        r#"{"kind":"rescue","k":1,"locations":[
            {"id":"1","p":"1/2"},{"id":"2","p":"9/10"},{"id":"3","p":"4/5"}]}"#,
    );
    let hider = temp_file("br-x", r#"{"1":"1/2","2":"3/10","3":"1/5"}"#);
    let output = binary()
        .args([
            "best-response",
            game.to_str().unwrap(),
            "--hider",
            hider.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("order (maximize): 2 > 3 > 1"), "{text}");
    assert!(text.contains("1: 1/2"), "{text}");
    assert!(text.contains("2: 27/10"), "{text}");
    assert!(text.contains("3: 4/5"), "{text}");

    let output = binary()
        .args([
            "best-response",
            game.to_str().unwrap(),
            "--hider",
            hider.to_str().unwrap(),
            "--min",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("order (minimize): 1 > 3 > 2"));
}

#[test]
fn best_response_rejects_multiple_targets_and_bad_weights() {
    let game = temp_file(
        "br-k2",
        r#"{"kind":"rescue","k":2,"locations":[
            {"id":"1","p":"1/2"},{"id":"2","p":"1/3"},{"id":"3","p":"1/4"}]}"#,
    );
    let hider = temp_file("br-k2-x", r#"{"1":"1/2","2":"1/2","3":"0"}"#);
    let output = binary()
        .args([
            "best-response",
            game.to_str().unwrap(),
            "--hider",
            hider.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));

    let game = temp_file(
        "br-badsum",
        r#"{"kind":"rescue","k":1,"locations":[{"id":"1","p":"1/2"},{"id":"2","p":"1/3"}]}"#,
    );
    let hider = temp_file("br-badsum-x", r#"{"1":"1/2","2":"1/3"}"#);
    let output = binary()
        .args([
            "best-response",
            game.to_str().unwrap(),
            "--hider",
            hider.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_passes_on_the_sample_instances() {
    for name in ["rescue.json", "tree.json", "additive.json"] {
        let output = binary()
            .args(["verify", instance_path(name).to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "{name}: {}", stderr(&output));
        assert!(stdout(&output).contains("VERIFY: PASS"), "{name}");
    }
}

#[test]
fn verify_passes_with_two_targets_and_a_discount() {
    let pairs = temp_file(
        "verify-k2",
        r#"{"kind":"rescue","k":2,"locations":[
            {"id":"1","p":"1/2"},{"id":"2","p":"2/3"},{"id":"3","p":"3/4"},
            {"id":"4","p":"1/5"},{"id":"5","p":"5/7"}]}"#,
    );
    let output = binary()
        .args(["verify", pairs.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("VERIFY: PASS"));

    let discounted = temp_file(
        "verify-discounted",
        r#"{"kind":"discounted","k":1,"gamma":"9/10","locations":[
            {"id":"1","p":"1/2"},{"id":"2","p":"2/3"},{"id":"3","p":"3/4"}]}"#,
    );
    let output = binary()
        .args(["solve", discounted.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("kind: discounted"));
    let output = binary()
        .args(["verify", discounted.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    assert!(stdout(&output).contains("VERIFY: PASS"));
}

#[test]
fn non_indexable_tables_point_at_the_oracle() {
    let path = instance_path("table-not-indexable.json");
    let output = binary()
        .args(["solve", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(
        stderr(&output).contains("oracle-only"),
        "{}",
        stderr(&output)
    );

    let output = binary()
        .args(["verify", path.to_str().unwrap(), "--oracle-only"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("oracle value:"), "{text}");
    assert!(text.contains("certificate: tight"), "{text}");
}

#[test]
fn enumeration_caps_stop_big_instances_with_exit_4() {
    let locations: Vec<String> = (1..=12)
        .map(|i| format!(r#"{{"id":"{i:02}","p":"1/2"}}"#))
        .collect();
    let big = temp_file(
        "big",
        &format!(
            r#"{{"kind":"rescue","k":1,"locations":[{}]}}"#,
            locations.join(",")
        ),
    );
    let output = binary()
        .args(["verify", big.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4), "{}", stderr(&output));

    // The environment override shrinks the cap below a 3-location game.
    let small = temp_file(
        "small",
        r#"{"kind":"rescue","k":1,"locations":[
            {"id":"1","p":"1/2"},{"id":"2","p":"1/3"},{"id":"3","p":"1/4"}]}"#,
    );
    let output = binary()
        .args(["verify", small.to_str().unwrap()])
        .env("RESCUE_GAMES_ENUM_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4), "{}", stderr(&output));
    let output = binary()
        .args(["verify", small.to_str().unwrap()])
        .env("RESCUE_GAMES_ENUM_CAP", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let tree = instance_path("tree.json");
    let args = [
        "sample",
        tree.to_str().unwrap(),
        "--seed",
        "1",
        "--count",
        "3",
    ];
    let first = binary().args(args).output().unwrap();
    let second = binary().args(args).output().unwrap();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
    for line in stdout(&first).lines() {
        assert!(line.starts_with("O > "), "{line}");
        assert_eq!(line.split(" > ").count(), 5);
    }
}

#[test]
fn sampled_branch_frequencies_match_the_solution() {
    let output = binary()
        .args([
            "sample",
            instance_path("tree.json").to_str().unwrap(),
            "--seed",
            "5",
            "--count",
            "59000",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let a_first = text
        .lines()
        .filter(|line| line.split(" > ").nth(1) == Some("A"))
        .count() as i64;
    // Binomial(59000, 9/59): mean 9000, three sigmas is about 262.
    assert!((a_first - 9000).abs() < 262, "got {a_first}");
}

#[test]
fn unstructured_sampling_starts_with_the_drawn_block() {
    let path = temp_file(
        "sample-pairs",
        r#"{"kind":"rescue","k":2,"locations":[
            {"id":"1","p":"1/2"},{"id":"2","p":"1/3"},{"id":"3","p":"1/4"}]}"#,
    );
    let output = binary()
        .args([
            "sample",
            path.to_str().unwrap(),
            "--seed",
            "2",
            "--count",
            "10",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", stderr(&output));
    for line in stdout(&output).lines() {
        let ids: Vec<&str> = line.split(" > ").collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec!["1", "2", "3"], "{line}");
        // First two entries are the block, in ascending id order.
        assert!(ids[0] < ids[1], "{line}");
    }
}

#[test]
fn help_is_not_an_error() {
    let output = binary().arg("--help").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("solve"));
}
