use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn twinforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinforge")).args(args).output().expect("binary runs")
}

const SMALL: &[&str] =
    &["--accuracy.ns", "[9, 16]", "--accuracy.seeds", "1", "--sim.horizon_ticks", "60", "--eval.warmup_ticks", "10"];

fn resolved(dir: &Path) -> String {
    fs::read_to_string(dir.join("config.resolved")).expect("config.resolved written")
}

fn line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find(|l| l.starts_with(&format!("{key} ="))).unwrap_or_else(|| panic!("{key} missing"))
}

#[test]
fn flags_override_file_and_seed_overrides_both() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 5\n[sim]\nn_junctions = 16\ninsertion_rate = 30.0\n[channel]\nloss_prob = 0.2\n").unwrap();
    let out = tmp.path().join("out");
    let mut args = vec!["accuracy", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(&["--sim.insertion_rate", "45.5", "--seed", "9"]);
    let o = twinforge(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let r = resolved(&out);
    assert_eq!(line(&r, "sim.insertion_rate"), "sim.insertion_rate = 45.5");
    assert_eq!(line(&r, "channel.loss_prob"), "channel.loss_prob = 0.2");
    assert_eq!(line(&r, "sim.n_junctions"), "sim.n_junctions = 16");
    assert_eq!(line(&r, "seed"), "seed = 9");
    assert!(out.join("accuracy.csv").exists());
}

#[test]
fn unknown_keys_and_bad_values_fail_with_nonzero_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    for bad in [
        vec!["accuracy", "--out", out, "--sim.topology", "hexagon"],
        vec!["accuracy", "--out", out, "--sim.no_such_key", "1"],
        vec!["accuracy", "--out", out, "--agent.gamma", "1.5"],
        vec!["accuracy", "--out", out, "--sim.n_junctions", "many"],
        vec!["accuracy", "--out", out, "--sim.topology", "grid", "--sim.n_junctions", "10"],
    ] {
        let o = twinforge(&bad);
        assert!(!o.status.success(), "{bad:?} should fail");
        assert!(!o.stderr.is_empty());
    }
    assert!(!twinforge(&["teleport"]).status.success());
}

#[test]
fn same_seed_gives_byte_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let mut args = vec!["accuracy", "--seed", "3", "--out", out.to_str().unwrap()];
        args.extend_from_slice(SMALL);
        let o = twinforge(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out.join("accuracy.csv")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn key_equals_value_form_is_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("q");
    let o = twinforge(&[
        "query-bench",
        "--out",
        out.to_str().unwrap(),
        "--query.records=300",
        "--query.sizes=[10, 50]",
        "--query.repeats=1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("query_bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("backend,query_size,elapsed_us"));
}
