use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn beatdbn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beatdbn"))
        .args(args)
        .output()
        .expect("spawn beatdbn")
}

fn ok(args: &[&str]) -> String {
    let out = beatdbn(args);
    assert!(
        out.status.success(),
        "beatdbn {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn value(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {stdout}"))
        .to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Scene {
    dir: TempDir,
}

impl Scene {
    fn new() -> Self {
        Scene {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn files(&self) -> Vec<String> {
        let mut v: Vec<String> = fs::read_dir(self.dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    }

    /// Writes a synth spec and generates `rec.txt` and `truth.txt`.
    fn synth(&self, spec: &str) -> String {
        let spec = self.write("spec.txt", spec);
        ok(&[
            "synth",
            "--spec",
            s(&spec),
            "--out",
            s(&self.path("rec.txt")),
            "--truth",
            s(&self.path("truth.txt")),
        ])
    }
}

const SMALL: &str = "n_particles=500\nseed=3\n";

#[test]
fn synth_writes_both_files_deterministically() {
    let sc = Scene::new();
    let out = sc.synth("duration_s=20\nhr=0,60\nseed=5\n");
    assert_eq!(value(&out, "beats"), "20");
    let rec = fs::read(sc.path("rec.txt")).unwrap();
    let truth = fs::read(sc.path("truth.txt")).unwrap();
    sc.synth("duration_s=20\nhr=0,60\nseed=5\n");
    assert_eq!(fs::read(sc.path("rec.txt")).unwrap(), rec);
    assert_eq!(fs::read(sc.path("truth.txt")).unwrap(), truth);
}

#[test]
fn synth_bad_interval_leaves_nothing() {
    let sc = Scene::new();
    let spec = sc.write("spec.txt", "duration_s=20\necg_dropout=15,30\n");
    let out = beatdbn(&[
        "synth",
        "--spec",
        s(&spec),
        "--out",
        s(&sc.path("rec.txt")),
        "--truth",
        s(&sc.path("truth.txt")),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("interval"));
    assert_eq!(sc.files(), vec!["spec.txt"]);
}

#[test]
fn run_clean_record_scores_against_truth() {
    let sc = Scene::new();
    sc.synth("duration_s=60\nhr=0,60\nseed=1\n");
    let cfg = sc.write("cfg.txt", SMALL);
    let out = ok(&[
        "run",
        "--record",
        s(&sc.path("rec.txt")),
        "--config",
        s(&cfg),
        "--out",
        s(&sc.path("beats.txt")),
        "--trace",
        s(&sc.path("trace.csv")),
    ]);
    assert_eq!(value(&out, "windows"), "2500");
    assert!(value(&out, "beats").parse::<usize>().unwrap() > 50);
    let trace = fs::read_to_string(sc.path("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2 + 2500);

    let score = ok(&[
        "score",
        "--ref",
        s(&sc.path("truth.txt")),
        "--test",
        s(&sc.path("beats.txt")),
        "--fs",
        "250",
    ]);
    let se: f64 = value(&score, "se").parse().unwrap();
    assert!(se >= 0.99, "{score}");
}

#[test]
fn run_keeps_beating_through_ecg_dropout() {
    let sc = Scene::new();
    sc.synth("duration_s=60\nhr=0,60\necg_dropout=20,40\nseed=2\n");
    let cfg = sc.write("cfg.txt", SMALL);
    ok(&[
        "run",
        "--record",
        s(&sc.path("rec.txt")),
        "--config",
        s(&cfg),
        "--out",
        s(&sc.path("beats.txt")),
    ]);
    let beats = fs::read_to_string(sc.path("beats.txt")).unwrap();
    let during = beats
        .lines()
        .filter_map(|l| l.parse::<usize>().ok())
        .filter(|&i| (31 * 250..40 * 250).contains(&i))
        .count();
    // The SQI window needs its 10 s to empty before the ABP channel takes over.
    assert!(during >= 8, "only {during} beats in the dropout");
}

#[test]
fn run_with_external_annotations() {
    let sc = Scene::new();
    sc.synth("duration_s=30\nhr=0,60\nseed=4\n");
    ok(&[
        "detect",
        "--record",
        s(&sc.path("rec.txt")),
        "--ecg-ann",
        s(&sc.path("ecg.ann")),
        "--abp-ann",
        s(&sc.path("abp.ann")),
    ]);
    let cfg = sc.write("cfg.txt", SMALL);
    let out = ok(&[
        "run",
        "--record",
        s(&sc.path("rec.txt")),
        "--config",
        s(&cfg),
        "--out",
        s(&sc.path("beats.txt")),
        "--ecg-ann",
        s(&sc.path("truth.txt")),
        "--abp-ann",
        s(&sc.path("abp.ann")),
    ]);
    assert!(value(&out, "beats").parse::<usize>().unwrap() >= 25);
}

#[test]
fn run_missing_config_value_names_the_key() {
    let sc = Scene::new();
    sc.synth("duration_s=5\nseed=1\n");
    let cfg = sc.write("cfg.txt", "n_particles=100\npeak_fraction_threshold=\n");
    let out = beatdbn(&[
        "run",
        "--record",
        s(&sc.path("rec.txt")),
        "--config",
        s(&cfg),
        "--out",
        s(&sc.path("beats.txt")),
        "--trace",
        s(&sc.path("trace.csv")),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("peak_fraction_threshold"), "{err}");
    assert!(err.contains("line 2"), "{err}");
    assert!(!sc.path("beats.txt").exists());
    assert!(!sc.path("trace.csv").exists());
}

#[test]
fn run_rejects_malformed_record() {
    let sc = Scene::new();
    let rec = sc.write("rec.txt", "fs=250\nECG,ABP\n0,80\n0\n");
    let out = beatdbn(&["run", "--record", s(&rec), "--out", s(&sc.path("b.txt"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    assert!(!sc.path("b.txt").exists());
}

#[test]
fn score_conventions_and_averages() {
    let sc = Scene::new();
    let a = sc.write("a.txt", "100\n350\n600\n850\n");
    let empty = sc.write("empty.txt", "");
    let half = sc.write("half.txt", "100\n600\n");

    let out = ok(&["score", "--ref", s(&a), "--test", s(&a), "--fs", "250"]);
    assert_eq!(
        (value(&out, "se"), value(&out, "ppv")),
        ("1".into(), "1".into())
    );

    let out = ok(&["score", "--ref", s(&a), "--test", s(&empty), "--fs", "250"]);
    assert_eq!(
        (value(&out, "se"), value(&out, "ppv")),
        ("0".into(), "1".into())
    );
    assert_eq!(value(&out, "fn"), "4");

    let out = ok(&[
        "score",
        "--ref",
        s(&a),
        "--test",
        s(&a),
        "--ref",
        s(&a),
        "--test",
        s(&half),
        "--fs",
        "250",
    ]);
    assert_eq!(value(&out, "records"), "2");
    assert_eq!(value(&out, "mean_se"), "0.75");
    assert_eq!(value(&out, "mean_ppv"), "1");

    let out = ok(&[
        "score",
        "--ref",
        s(&a),
        "--test",
        s(&half),
        "--fs",
        "250",
        "--tol-ms",
        "1",
    ]);
    assert_eq!(value(&out, "tp"), "2");

    let bad = sc.write("bad.txt", "5\n3\n");
    let out = beatdbn(&["score", "--ref", s(&a), "--test", s(&bad), "--fs", "250"]);
    assert!(!out.status.success());
}
