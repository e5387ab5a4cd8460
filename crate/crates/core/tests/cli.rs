use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tensor_topics::cli::cli_run;
use tensor_topics::pipeline::{read_selection, PipelineConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tensor-topics"))
}

fn toy() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.csv")
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn unknown_subcommand_and_flag_fail() {
    assert_ne!(cli_run(["tensor-topics", "frobnicate"]), 0);
    assert_ne!(cli_run(["tensor-topics", "ingest", "--no-such-flag"]), 0);
    assert_ne!(cli_run(["tensor-topics", "select", "--strategy", "best"]), 0);
    let out = bin().arg("bogus").output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn runtime_errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let work = dir.path().join("w");
    let out = bin()
        .args(["factorize", "--workdir", work.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = bin()
        .args(["select", "--workdir", work.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run factorize first"));
    // Threshold outside [0, 1] is rejected before any work happens.
    assert_eq!(cli_run(["tensor-topics", "--threshold", "1.5", "select"]), 1);
}

#[test]
fn staged_run_writes_models_and_selection() {
    let dir = tempfile::tempdir().unwrap();
    let work = dir.path().join("work");
    let w = work.to_str().unwrap();
    let out = run(&["ingest", "--corpus", toy().to_str().unwrap(), "--workdir", w]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("[15, 37, 8, 71]"));

    run(&["factorize", "--ranks", "2,3", "--seed", "7", "--workdir", w]);
    assert!(work.join("models/rank-0002.model").is_file());
    assert!(work.join("models/rank-0003.model").is_file());
    assert!(work.join("models/fits.json").is_file());

    let out = run(&[
        "select",
        "--ranks",
        "2,3",
        "--threshold",
        "0.35",
        "--strategy",
        "stable-then-dedup",
        "--similarity-matrix",
        "--workdir",
        w,
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("of 5 components"), "{stdout}");
    let sel = read_selection(&work.join("selection.json")).unwrap();
    assert_eq!(sel.pooled_components, 5);
    assert_eq!(sel.similarity.as_ref().unwrap().matrix.len(), 5);
    for k in &sel.kept {
        // Stable-then-dedup only keeps components confirmed by another rank.
        assert!(!k.stability_partners.is_empty());
        assert!(stdout.contains(&k.id.to_string()));
        for (p, c) in &k.stability_partners {
            assert_ne!(p.origin_rank, k.id.origin_rank);
            assert!(*c >= 0.35);
        }
    }

    let report_dir = dir.path().join("report");
    run(&["report", "--workdir", w, "--output", report_dir.to_str().unwrap()]);
    for f in ["report.json", "summary.json", "index.html"] {
        assert!(report_dir.join(f).is_file(), "{f}");
    }
}

#[test]
fn pipeline_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let go = |tag: &str| {
        let work = dir.path().join(format!("work-{tag}"));
        let out = dir.path().join(format!("out-{tag}"));
        run(&[
            "pipeline",
            "--corpus",
            toy().to_str().unwrap(),
            "--ranks",
            "2,3,4",
            "--seed",
            "11",
            "--workdir",
            work.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]);
        (work, out)
    };
    let (wa, oa) = go("a");
    let (wb, ob) = go("b");
    for rel in [
        "tensor/tensor.tns",
        "ingest.json",
        "models/rank-0002.model",
        "models/rank-0004.model",
        "models/fits.json",
        "selection.json",
    ] {
        assert_eq!(fs::read(wa.join(rel)).unwrap(), fs::read(wb.join(rel)).unwrap(), "{rel}");
    }
    for rel in ["report.json", "summary.json", "index.html"] {
        assert_eq!(fs::read(oa.join(rel)).unwrap(), fs::read(ob.join(rel)).unwrap(), "{rel}");
    }
}

#[test]
fn config_file_is_honored_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(
        &cfg_path,
        format!(
            "corpus = {:?}\nworkdir = \"w\"\nranks = [2, 3]\nseed = 5\nthreshold = 0.5\n",
            toy().to_str().unwrap()
        ),
    )
    .unwrap();
    let cfg = PipelineConfig::from_file(&cfg_path).unwrap();
    assert_eq!(cfg.selection.ranks, vec![2, 3]);
    assert_eq!(cfg.workdir, dir.path().join("w"));

    run(&["--config", cfg_path.to_str().unwrap(), "ingest"]);
    run(&["--config", cfg_path.to_str().unwrap(), "--ranks", "2", "factorize"]);
    assert!(dir.path().join("w/models/rank-0002.model").is_file());
    assert!(!dir.path().join("w/models/rank-0003.model").exists());

    fs::write(&cfg_path, "typo_key = 1\n").unwrap();
    assert_eq!(cli_run(["tensor-topics", "--config", cfg_path.to_str().unwrap(), "ingest"]), 1);
}

#[test]
fn bundled_toy_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy.toml");
    let cfg = PipelineConfig::from_file(&path).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.selection.ranks, vec![3, 5]);
    assert_eq!(cfg.als.seed, 7);
    assert!(cfg.corpus.unwrap().is_file());
}
