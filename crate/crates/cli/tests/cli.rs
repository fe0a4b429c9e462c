//! End-to-end behaviour of the `natgen` binary and its output files.

use std::path::Path;
use std::process::{Command, Output};

use natgen_cli::{read_csv, ExperimentReport};

fn natgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_natgen")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_into(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["run"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", dir.to_str().unwrap()]);
    natgen(&all)
}

#[test]
fn list_names_every_experiment() {
    let o = natgen(&["list"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["fig4", "fig5", "fig6", "eda_sphere", "igo_quadratic"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing from:\n{text}");
    }
}

#[test]
fn passing_run_exits_zero_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_into(tmp.path(), &["eda_sphere", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["report.txt", "eda_sphere_trace.csv", "eda_sphere.svg"] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    let v = natgen(&["verify", tmp.path().to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
}

#[test]
fn tampered_csv_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_into(tmp.path(), &["igo_quadratic", "--seed", "2", "--override", "replicates=3"]).status.success());
    let path = tmp.path().join("igo_trace.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let last = lines.len() - 1;
    let mut cells: Vec<String> = lines[last].split(',').map(str::to_string).collect();
    let v: f64 = cells.last().unwrap().parse().unwrap();
    *cells.last_mut().unwrap() = format!("{:.16e}", v - 1.0);
    lines[last] = cells.join(",");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = natgen(&["verify", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).lines().any(|l| l.starts_with("FAIL ")), "{}", stderr(&o));
}

#[test]
fn failed_check_exits_one_with_failure_list() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_into(tmp.path(), &["eda_sphere", "--seed", "1", "--override", "generations=2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    let fails: Vec<&str> = err.lines().filter(|l| l.starts_with("FAIL ")).collect();
    assert!(!fails.is_empty());
    for line in fails {
        assert_eq!(line.split_whitespace().count(), 5, "{line}");
    }
    // the report is still written and still consistent with its data
    assert_eq!(natgen(&["verify", tmp.path().to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn bad_input_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run_into(tmp.path(), &["fig7"]).status.code(), Some(2));
    assert_eq!(run_into(tmp.path(), &["fig5", "--override", "no_such_key=1"]).status.code(), Some(2));
    assert_eq!(run_into(tmp.path(), &["fig5", "--override", "rmp"]).status.code(), Some(2));
    assert_eq!(natgen(&["verify", tmp.path().join("missing").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn command_line_overrides_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("eda.cfg");
    std::fs::write(&file, "# short run\nseed = 11\ngenerations = 5\npop_size = 40\n").unwrap();
    let out = tmp.path().join("out");
    let o = natgen(&[
        "run",
        "eda_sphere",
        "--config",
        file.to_str().unwrap(),
        "--override",
        "generations=7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.code().is_some_and(|c| c < 2), "{}", stderr(&o));
    let report = ExperimentReport::read(&out).unwrap();
    assert_eq!(report.seed, 11);
    let get = |k: &str| report.config.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str());
    assert_eq!(get("generations"), Some("7"));
    assert_eq!(get("pop_size"), Some("40"));
}

#[test]
fn figures_are_well_formed_svg() {
    let tmp = tempfile::tempdir().unwrap();
    run_into(tmp.path(), &["fig6", "--seed", "4", "--override", "replicates=2"]);
    let mut seen = 0;
    for entry in std::fs::read_dir(tmp.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "svg") {
            continue;
        }
        seen += 1;
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("viewBox"), Some("0 0 800 800"));
        let dashed = root
            .descendants()
            .filter(|n| n.has_tag_name("polygon") && n.attribute("stroke-dasharray").is_some())
            .count();
        assert_eq!(dashed, 2, "{}", path.display());
    }
    assert_eq!(seen, 3);
}

#[test]
fn emitted_csv_parses_back() {
    let tmp = tempfile::tempdir().unwrap();
    run_into(tmp.path(), &["fig5", "--seed", "5", "--override", "replicates=1"]);
    let (header, rows) = read_csv(&tmp.path().join("fig5_offspring.csv")).unwrap();
    assert_eq!(header, ["replicate", "method", "task", "source", "operator", "x", "y"]);
    assert_eq!(rows.len(), 2 * 2 * 500);
    for row in &rows {
        assert_eq!(row.len(), header.len());
        for cell in &row[5..] {
            let v: f64 = cell.parse().unwrap();
            assert!(v.is_finite());
        }
    }
    let raw = std::fs::read(tmp.path().join("fig5_offspring.csv")).unwrap();
    assert!(!raw.contains(&b'\r'));
}
