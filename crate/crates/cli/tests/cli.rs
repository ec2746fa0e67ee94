use std::fs;
use std::path::Path;

use aqa_cli::{run, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use aqa_core::dataset::{read_manifest_file, read_questions, write_questions, MANIFEST_FILE};

fn aqa(args: &[&str]) -> i32 {
    run(std::iter::once("aqa").chain(args.iter().copied()))
}

fn generate_small(out: &Path) {
    let out = out.to_str().unwrap();
    let code = aqa(&[
        "generate",
        "--scenes",
        "12",
        "--questions-per-scene",
        "5",
        "--seed",
        "42",
        "--out",
        out,
        "--no-audio",
        "--no-spectrograms",
        "--workers",
        "2",
    ]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(aqa(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(aqa(&["generate", "--bogus"]), EXIT_USAGE);
    assert_eq!(aqa(&["generate", "--split", "0.5,0.5"]), EXIT_USAGE);
    assert_eq!(
        aqa(&["generate", "--scenes", "3", "--no-audio"]),
        EXIT_USAGE
    );
    assert_eq!(aqa(&[]), EXIT_USAGE);
    assert_eq!(aqa(&["--help"]), EXIT_OK);
}

#[test]
fn generate_verify_and_corrupt() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    generate_small(&d);
    let manifest = read_manifest_file(&d).unwrap();
    assert_eq!(manifest.config.n_scenes, 12);
    assert_eq!(manifest.config.master_seed, 42);
    assert_eq!(aqa(&["verify", d.to_str().unwrap()]), EXIT_OK);

    let path = d.join("questions_train.jsonl");
    let mut records = read_questions(&path).unwrap();
    let other = if records[0].answer.to_string() == "yes" {
        "no"
    } else {
        "yes"
    };
    records[0].answer = other.parse().unwrap();
    write_questions(&path, &records).unwrap();
    assert_eq!(
        aqa(&["verify", "--json", d.to_str().unwrap()]),
        EXIT_FAILURE
    );
    assert_eq!(
        aqa(&["verify", dir.path().join("missing").to_str().unwrap()]),
        EXIT_FAILURE
    );
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("c.toml");
    fs::write(&toml_path, "n_scenes = 10\nquestions_per_scene = 3\nmaster_seed = 7\nrender_audio = false\nrender_spectrograms = false\n").unwrap();
    let d = dir.path().join("t");
    let code = aqa(&[
        "questions",
        "--config",
        toml_path.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let m = read_manifest_file(&d).unwrap();
    assert_eq!(
        (
            m.config.n_scenes,
            m.config.questions_per_scene,
            m.config.master_seed
        ),
        (10, 3, 9)
    );

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n_scenes\": 10, \"colour\": 1}").unwrap();
    assert_eq!(
        aqa(&["generate", "--config", bad.to_str().unwrap()]),
        EXIT_USAGE
    );
}

#[test]
fn echoed_config_reproduces_the_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    generate_small(&a);
    let echoed = read_manifest_file(&a).unwrap().config;
    let cfg = dir.path().join("echo.json");
    fs::write(&cfg, serde_json::to_vec(&echoed).unwrap()).unwrap();
    let b = dir.path().join("b");
    assert_eq!(
        aqa(&[
            "generate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            b.to_str().unwrap()
        ]),
        EXIT_OK
    );
    for f in [
        "questions_train.jsonl",
        "questions_val.jsonl",
        "questions_test.jsonl",
        "scenes.json",
        MANIFEST_FILE,
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn render_matches_direct_generation() {
    let dir = tempfile::tempdir().unwrap();
    let sym = dir.path().join("sym");
    generate_small(&sym);
    assert_eq!(
        aqa(&["render", "--no-audio", sym.to_str().unwrap()]),
        EXIT_OK
    );
    let direct = dir.path().join("direct");
    let code = aqa(&[
        "generate",
        "--scenes",
        "12",
        "--questions-per-scene",
        "5",
        "--seed",
        "42",
        "--out",
        direct.to_str().unwrap(),
        "--no-audio",
    ]);
    assert_eq!(code, EXIT_OK);
    let (m1, m2) = (
        read_manifest_file(&sym).unwrap(),
        read_manifest_file(&direct).unwrap(),
    );
    assert_eq!(m1.digests, m2.digests);
    assert_eq!(m1.config, m2.config);
    assert_eq!(
        aqa(&[
            "render",
            "--no-audio",
            "--no-spectrograms",
            sym.to_str().unwrap()
        ]),
        EXIT_USAGE
    );
}

#[test]
fn evaluate_and_baselines() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    generate_small(&d);
    let gold_path = d.join("questions_test.jsonl");
    let gold = read_questions(&gold_path).unwrap();
    let pred: String = gold
        .iter()
        .map(|g| {
            format!(
                "{{\"question_id\":{},\"answer\":\"{}\"}}\n",
                g.question_id, g.answer
            )
        })
        .collect();
    let pred_path = dir.path().join("p.jsonl");
    fs::write(&pred_path, pred).unwrap();
    let report = dir.path().join("r.json");
    let code = aqa(&[
        "evaluate",
        "--gold",
        gold_path.to_str().unwrap(),
        "--pred",
        pred_path.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let r: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["overall_accuracy"], 1.0);

    fs::write(
        &pred_path,
        "{\"question_id\":1,\"answer\":\"yes\"}\n{\"question_id\":1,\"answer\":\"no\"}\n",
    )
    .unwrap();
    assert_eq!(
        aqa(&[
            "evaluate",
            "--gold",
            gold_path.to_str().unwrap(),
            "--pred",
            pred_path.to_str().unwrap()
        ]),
        EXIT_FAILURE
    );
    assert_eq!(
        aqa(&["baselines", "--gold", gold_path.to_str().unwrap()]),
        EXIT_OK
    );
    assert_eq!(
        aqa(&[
            "baselines",
            "--gold",
            gold_path.to_str().unwrap(),
            "--trials",
            "0"
        ]),
        EXIT_USAGE
    );
}
