use std::fs;
use std::path::Path;

use aqa_core::audio_io::{read_wav, write_wav_pcm16};
use aqa_core::dataset::{
    generate_dataset, read_manifest_file, read_questions, read_scenes, verify_dataset,
    write_questions, DatasetConfig, DatasetError, Split, ViolationKind,
};
use aqa_core::soundbank::{
    synthesize_sound, Brightness, InstrumentFamily, Loudness, ManifestEntry, Note,
};

fn symbolic(dir: &Path, n_scenes: usize, qps: usize, seed: u64) -> DatasetConfig {
    DatasetConfig {
        n_scenes,
        questions_per_scene: qps,
        master_seed: seed,
        render_audio: false,
        render_spectrograms: false,
        output_dir: dir.to_path_buf(),
        ..DatasetConfig::default()
    }
}

#[test]
fn small_dataset_layout_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = generate_dataset(&symbolic(dir.path(), 20, 10, 42)).unwrap();
    assert_eq!(manifest.splits[&Split::Train].len(), 14);
    assert_eq!(manifest.splits[&Split::Val].len(), 3);
    assert_eq!(manifest.splits[&Split::Test].len(), 3);
    for f in [
        "manifest.json",
        "scenes.json",
        "questions_train.jsonl",
        "questions_val.jsonl",
        "questions_test.jsonl",
    ] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    assert_eq!(read_scenes(dir.path()).unwrap().len(), 20);
    let train = read_questions(&dir.path().join("questions_train.jsonl")).unwrap();
    assert_eq!(train.len(), manifest.counts[&Split::Train].questions);
    for r in &train {
        assert!(manifest.splits[&Split::Train].contains(&r.scene_id));
        assert_eq!(r.question_id / 10, r.scene_id);
    }
    let report = verify_dataset(dir.path()).unwrap();
    assert!(report.is_clean(), "{:?}", report.violations);
    assert!(report.warnings.is_empty());
    assert_eq!(report.n_questions, 200);
    // The echo leaves out the output directory and worker count.
    let echoed = read_manifest_file(dir.path()).unwrap();
    assert_eq!(echoed.digests, manifest.digests);
    assert_eq!(
        echoed.config.output_dir,
        DatasetConfig::default().output_dir
    );
}

#[test]
fn corrupted_answer_is_named() {
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(&symbolic(dir.path(), 10, 5, 7)).unwrap();
    let path = dir.path().join("questions_train.jsonl");
    let mut records = read_questions(&path).unwrap();
    let victim = &mut records[3];
    let id = victim.question_id;
    victim.answer = victim
        .question_type
        .answer_row()
        .into_iter()
        .find(|a| *a != victim.answer)
        .unwrap();
    write_questions(&path, &records).unwrap();
    let report = verify_dataset(dir.path()).unwrap();
    assert_eq!(report.violations.len(), 1, "{:?}", report.violations);
    assert_eq!(report.violations[0].kind, ViolationKind::WrongAnswer);
    assert_eq!(report.violations[0].question_id, Some(id));
    // The rewritten file no longer matches its digest.
    assert_eq!(report.warnings.len(), 1);
}

#[test]
fn shared_scene_is_a_split_violation() {
    let dir = tempfile::tempdir().unwrap();
    generate_dataset(&symbolic(dir.path(), 10, 3, 8)).unwrap();
    let path = dir.path().join("manifest.json");
    let mut manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    let shared = manifest["splits"]["train"][0].clone();
    manifest["splits"]["test"]
        .as_array_mut()
        .unwrap()
        .push(shared.clone());
    fs::write(&path, serde_json::to_vec(&manifest).unwrap()).unwrap();
    let report = verify_dataset(dir.path()).unwrap();
    assert_eq!(report.count(ViolationKind::SplitOverlap), 1);
    assert_eq!(report.violations[0].scene_id, shared.as_u64());
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = generate_dataset(&DatasetConfig {
        workers: 1,
        ..symbolic(a.path(), 30, 20, 99)
    })
    .unwrap();
    let mb = generate_dataset(&DatasetConfig {
        workers: 4,
        ..symbolic(b.path(), 30, 20, 99)
    })
    .unwrap();
    assert_eq!(ma.digests, mb.digests);
    for f in [
        "manifest.json",
        "scenes.json",
        "questions_train.jsonl",
        "questions_val.jsonl",
        "questions_test.jsonl",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn too_few_scenes_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        generate_dataset(&symbolic(dir.path(), 9, 20, 0)),
        Err(DatasetError::Config(_))
    ));
}

#[test]
fn rendered_dataset_has_audio_and_images() {
    let dir = tempfile::tempdir().unwrap();
    let config = DatasetConfig {
        render_audio: true,
        render_spectrograms: true,
        ..symbolic(dir.path(), 10, 2, 5)
    };
    let manifest = generate_dataset(&config).unwrap();
    let wav = read_wav(&dir.path().join("audio/scene_000003.wav")).unwrap();
    assert_eq!(wav.sample_rate, 48_000);
    assert_eq!(wav.samples.len(), 2_400_000);
    let decoder = png::Decoder::new(std::io::BufReader::new(
        fs::File::open(dir.path().join("spectrograms/scene_000009.png")).unwrap(),
    ));
    let info = decoder.read_info().unwrap().info().clone();
    assert_eq!((info.width, info.height), (480, 320));
    assert_eq!(manifest.digests.len(), 10 * 2 + 4);
    assert!(verify_dataset(dir.path()).unwrap().warnings.is_empty());
}

#[test]
fn bank_backed_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let bank_dir = dir.path().join("bank");
    fs::create_dir(&bank_dir).unwrap();
    let mut entries = Vec::new();
    for &instrument in InstrumentFamily::ALL {
        for &note in Note::ALL {
            for &brightness in Brightness::ALL {
                for &loudness in Loudness::ALL {
                    let s =
                        synthesize_sound(instrument, note, brightness, loudness, 2.0, 1).unwrap();
                    let name = format!(
                        "{instrument}_{}_{brightness}_{loudness}.wav",
                        note.as_str().replace('#', "s")
                    );
                    write_wav_pcm16(&bank_dir.join(&name), &s.waveform, 48_000).unwrap();
                    entries.push(ManifestEntry {
                        path: name,
                        instrument: instrument.to_string(),
                        note: note.to_string(),
                    });
                }
            }
        }
    }
    let manifest_path = bank_dir.join("bank.json");
    fs::write(&manifest_path, serde_json::to_vec(&entries).unwrap()).unwrap();
    let out = dir.path().join("out");
    let config = DatasetConfig {
        bank_manifest: Some(manifest_path),
        ..symbolic(&out, 10, 5, 3)
    };
    generate_dataset(&config).unwrap();
    let scenes = read_scenes(&out).unwrap();
    assert!(scenes
        .iter()
        .all(|s| s.sounds.iter().all(|x| x.sound_id.is_some())));
    for s in &scenes {
        s.validate().unwrap();
        // Bank sounds are two seconds long.
        assert!(s.sounds.iter().all(|x| (x.duration_s - 2.0).abs() < 1e-9));
    }
    assert!(verify_dataset(&out).unwrap().is_clean());
}
