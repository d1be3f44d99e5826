use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use mute::baseline::one_hot;
use mute::nn::{evaluate, BlobSpec, Dataset, MlpModel};
use mute::perturb::PerturbationSpec;
use mute::similarity::ConfusionMatrix;
use mute::{min_pairwise_distance, Codebook, WeightMatrix};

fn mute(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mute"))
        .current_dir(dir)
        .env_remove("MUTE_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = mute(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    mute(dir, args).status.code().unwrap()
}

fn separable_blobs(dir: &Path) {
    let mut spec = BlobSpec::new(2, 2, 0.04, 5);
    spec.margin = 0.1;
    spec.sample(40, 0).unwrap().write_csv(dir.join("train.csv")).unwrap();
    spec.sample(40, 1).unwrap().write_csv(dir.join("test.csv")).unwrap();
}

#[test]
fn gen_exact_small_instance() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(
        dir.path(),
        &["gen", "--classes", "4", "--bits", "4", "--k", "2", "--uniform", "--exact", "--out", "cb.json"],
    );
    let result: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(result["objective"], 16.0);
    let cb = Codebook::read(dir.path().join("cb.json")).unwrap();
    assert_eq!(cb.n_classes(), 4);
}

#[test]
fn gen_writes_result_and_lp_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen", "--classes", "5", "--bits", "6", "--k", "3", "--out", "cb.json", "--result",
            "r.json", "--lp", "model.lp",
        ],
    );
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    for key in ["objective", "min_distance", "iterations", "wall_time_s", "restarts_used"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    let lp = std::fs::read_to_string(dir.path().join("model.lp")).unwrap();
    assert!(lp.contains("Maximize") && lp.trim_end().ends_with("End"));
}

#[test]
fn gen_shuffle_only_keeps_the_unweighted_words() {
    let dir = tempfile::tempdir().unwrap();
    let mut rows = vec![vec![0.1; 6]; 6];
    (0..6).for_each(|i| rows[i][i] = 0.0);
    rows[0][5] = 3.0;
    rows[5][0] = 3.0;
    WeightMatrix::from_rows(&rows).unwrap().write_csv(dir.path().join("w.csv")).unwrap();
    ok(dir.path(), &["gen", "--classes", "6", "--k", "3", "--uniform", "--out", "plain.json"]);
    ok(
        dir.path(),
        &["gen", "--classes", "6", "--k", "3", "--weights", "w.csv", "--shuffle-only", "--out", "shuffled.json"],
    );
    let plain = Codebook::read(dir.path().join("plain.json")).unwrap();
    let shuffled = Codebook::read(dir.path().join("shuffled.json")).unwrap();
    let mut a = plain.codes().to_vec();
    let mut b = shuffled.codes().to_vec();
    a.sort();
    b.sort();
    assert_eq!(a, b);
    assert_eq!(mute::hamming_distance(shuffled.code(0), shuffled.code(5)).unwrap(), 6);
}

#[test]
fn infeasible_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(dir.path(), &["gen", "--classes", "3", "--bits", "2", "--k", "1", "--out", "x.json"]), 2);
    assert!(!dir.path().join("x.json").exists());
    assert_eq!(code(dir.path(), &["gen", "--classes", "3"]), 1);
    assert_eq!(code(dir.path(), &["baseline", "--hadamard", "2", "--classes", "5", "--out", "h.json"]), 2);
    assert_eq!(code(dir.path(), &["train", "--data", "missing.csv", "--codebook", "c.json", "--out", "m.json"]), 3);
    assert_eq!(code(dir.path(), &["--version"]), 0);
}

#[test]
fn failed_commands_leave_no_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let status = code(
        dir.path(),
        &["gen", "--classes", "4", "--k", "2", "--out", "cb.json", "--lp", "no/such/dir/m.lp"],
    );
    assert_eq!(status, 3);
    assert!(!dir.path().join("cb.json").exists());
}

#[test]
fn baselines() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["baseline", "--hadamard", "6", "--classes", "10", "--out", "h.json"]);
    let h = Codebook::read(dir.path().join("h.json")).unwrap();
    assert_eq!((h.n_classes(), h.n_bits()), (10, 63));
    ok(dir.path(), &["baseline", "--onehot", "--classes", "10", "--out", "o.json"]);
    assert_eq!(Codebook::read(dir.path().join("o.json")).unwrap(), one_hot(10).unwrap());
    ok(dir.path(), &["baseline", "--random", "4", "--classes", "10", "--seed", "3", "--out", "r.json"]);
    assert_eq!(min_pairwise_distance(&Codebook::read(dir.path().join("r.json")).unwrap()).unwrap() % 2, 0);
}

#[test]
fn weights_command() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["weights", "--uniform", "--classes", "4", "--out", "u.csv"]);
    let u = WeightMatrix::read_csv(dir.path().join("u.csv")).unwrap();
    assert_eq!(u, WeightMatrix::uniform(4).unwrap());

    ConfusionMatrix::from_rows(&[vec![9, 0, 0], vec![0, 9, 0], vec![0, 0, 9]])
        .unwrap()
        .write_csv(dir.path().join("diag.csv"))
        .unwrap();
    ok(dir.path(), &["weights", "--confusion", "diag.csv", "--floor", "0.1", "--out", "w.csv"]);
    assert!(WeightMatrix::read_csv(dir.path().join("w.csv")).unwrap().is_uniform());
    assert_eq!(code(dir.path(), &["weights", "--confusion", "diag.csv", "--floor", "0", "--out", "z.csv"]), 2);
    assert!(!dir.path().join("z.csv").exists());
}

#[test]
fn train_eval_and_weights_from_model() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    separable_blobs(d);
    ok(d, &["baseline", "--onehot", "--classes", "2", "--out", "cb.json"]);
    ok(
        d,
        &[
            "train", "--data", "train.csv", "--codebook", "cb.json", "--epochs", "50", "--batch", "16",
            "--hidden", "8", "--seed", "1", "--out", "m.json", "--trace", "trace.csv",
        ],
    );
    let trace = std::fs::read_to_string(d.join("trace.csv")).unwrap();
    assert!(trace.starts_with("epoch,mean_loss\n1,"));
    assert!(trace.trim_end().ends_with("# train_accuracy=1"), "{trace}");

    ok(
        d,
        &[
            "eval", "--model", "m.json", "--codebook", "cb.json", "--data", "test.csv", "--perturb",
            "negative", "--perturb", "fgsm:eps=0.1", "--report", "report.json", "--table", "t.txt",
            "--confusion-dir", "conf",
        ],
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
    let rows = report["results"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["accuracy"], 1.0);

    let model = MlpModel::read(d.join("m.json")).unwrap();
    let cb = Codebook::read(d.join("cb.json")).unwrap();
    let test = Dataset::read_csv(d.join("test.csv"), Some(2)).unwrap();
    let fgsm: PerturbationSpec = "fgsm:eps=0.1".parse().unwrap();
    let lib = evaluate(&model, &fgsm.apply(&test, Some((&model, &cb))).unwrap(), &cb).unwrap();
    assert!((rows[2]["accuracy"].as_f64().unwrap() - lib.accuracy).abs() < 1e-12);
    assert!(d.join("conf/confusion_2.csv").exists());
    assert!(std::fs::read_to_string(d.join("t.txt")).unwrap().contains("fgsm:eps=0.1"));

    ok(d, &["weights", "--model", "m.json", "--data", "test.csv", "--out", "w.csv", "--confusion-out", "c.csv"]);
    let c = ConfusionMatrix::read_csv(d.join("c.csv")).unwrap();
    assert_eq!(c.total(), 80);
    assert!(WeightMatrix::read_csv(d.join("w.csv")).is_ok());
}

#[test]
fn zero_learning_rate_keeps_initial_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    separable_blobs(d);
    ok(d, &["baseline", "--onehot", "--classes", "2", "--out", "cb.json"]);
    ok(
        d,
        &[
            "train", "--data", "train.csv", "--codebook", "cb.json", "--epochs", "3", "--lr", "0", "--wd",
            "0", "--hidden", "5", "--seed", "9", "--out", "m.json",
        ],
    );
    assert_eq!(MlpModel::read(d.join("m.json")).unwrap(), MlpModel::new(&[2, 5, 2], 9).unwrap());
}

#[test]
fn seed_comes_from_environment_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--classes", "8", "--bits", "12", "--k", "4", "--seed", "42", "--out", "a.json"]);
    let out = Command::new(env!("CARGO_BIN_EXE_mute"))
        .current_dir(d)
        .env("MUTE_SEED", "42")
        .args(["gen", "--classes", "8", "--bits", "12", "--k", "4", "--out", "b.json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read(d.join("a.json")).unwrap(), std::fs::read(d.join("b.json")).unwrap());
}

#[test]
fn perturb_and_synth_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--kind", "digits", "--per-class", "3", "--noise", "0.05", "--out", "digits.csv"]);
    let digits = Dataset::read_csv(d.join("digits.csv"), None).unwrap();
    assert_eq!((digits.len(), digits.dim()), (30, 144));
    ok(d, &["perturb", "--data", "digits.csv", "--spec", "blur:sigma=1.0", "--out", "blur.csv"]);
    ok(d, &["perturb", "--data", "digits.csv", "--spec", "sp:p=0.05,seed=7", "--out", "sp.csv"]);
    let sp = Dataset::read_csv(d.join("sp.csv"), None).unwrap();
    assert_eq!(sp.labels(), digits.labels());
    assert_eq!(code(d, &["perturb", "--data", "digits.csv", "--spec", "fgsm:eps=0.1", "--out", "f.csv"]), 1);
    assert_eq!(code(d, &["perturb", "--data", "digits.csv", "--spec", "twirl", "--out", "f.csv"]), 1);
}

#[test]
fn pipeline_smoke_under_a_minute() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--kind", "blobs", "--classes", "6", "--dim", "16", "--per-class", "100", "--noise", "0.15", "--seed", "3", "--out", "train.csv"]);
    ok(d, &["synth", "--kind", "blobs", "--classes", "6", "--dim", "16", "--per-class", "100", "--noise", "0.15", "--seed", "3", "--stream", "1", "--out", "test.csv"]);
    ok(d, &["baseline", "--onehot", "--classes", "6", "--out", "onehot.json"]);
    ok(d, &["train", "--data", "train.csv", "--codebook", "onehot.json", "--batch", "32", "--out", "onehot_model.json"]);
    ok(d, &["weights", "--model", "onehot_model.json", "--data", "test.csv", "--out", "w.csv"]);
    ok(d, &["gen", "--classes", "6", "--k", "3", "--weights", "w.csv", "--out", "cb.json", "--result", "r.json"]);
    ok(d, &["train", "--data", "train.csv", "--codebook", "cb.json", "--batch", "32", "--out", "model.json"]);
    let table = ok(d, &["eval", "--model", "model.json", "--codebook", "cb.json", "--data", "test.csv", "--perturb", "sp:p=0.05,seed=1"]);
    assert!(table.contains("original"));
    assert!(start.elapsed() < Duration::from_secs(60));
}
