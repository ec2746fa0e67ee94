//! End-to-end dataset generation, on-disk layout and verification.

mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use verify::{verify_dataset, VerificationReport, Violation, ViolationKind};

use crate::audio_io::write_wav_pcm16;
use crate::render::{render_scene, spectrogram, RenderError, RenderOptions};
use crate::rng::{mix, rng_from, stream};
use crate::scene::{compose_scene, Scene, SceneError, SoundSource};
use crate::soundbank::{
    load_bank, read_manifest, AnnotationConfig, SoundBank, SoundError, SAMPLE_RATE,
};
use crate::template::{builtin_catalog, generate_questions, BalanceConfig, QuestionRecord};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SCENES_FILE: &str = "scenes.json";
pub const SPLITS: [Split; 3] = [Split::Train, Split::Val, Split::Test];

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Parse { path: String, detail: String },
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Sound(#[from] SoundError),
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn questions_file(self) -> String {
        format!("questions_{}.jsonl", self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub n_scenes: usize,
    pub questions_per_scene: usize,
    pub master_seed: u64,
    /// Train, validation and test fractions.
    pub split_fractions: [f64; 3],
    pub render_audio: bool,
    pub render_spectrograms: bool,
    pub cap_fraction: f64,
    /// JSON bank manifest; synthesis is used when absent.
    pub bank_manifest: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core. Does not affect output.
    #[serde(skip_serializing)]
    pub workers: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            n_scenes: 1000,
            questions_per_scene: 20,
            master_seed: 0,
            split_fractions: [0.70, 0.15, 0.15],
            render_audio: true,
            render_spectrograms: true,
            cap_fraction: 0.5,
            bank_manifest: None,
            output_dir: PathBuf::from("dataset"),
            workers: 0,
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: String| Err(DatasetError::Config(m));
        if self.n_scenes < 10 {
            return bad(format!(
                "n_scenes must be at least 10, got {}",
                self.n_scenes
            ));
        }
        if self.questions_per_scene == 0 {
            return bad("questions_per_scene must be positive".into());
        }
        let sum: f64 = self.split_fractions.iter().sum();
        if self
            .split_fractions
            .iter()
            .any(|f| !(0.0..=1.0).contains(f))
            || (sum - 1.0).abs() > 1e-9
        {
            return bad(format!(
                "split fractions {:?} must be in [0, 1] and sum to 1",
                self.split_fractions
            ));
        }
        if !(self.cap_fraction > 0.0 && self.cap_fraction <= 1.0) {
            return bad(format!(
                "cap_fraction must be in (0, 1], got {}",
                self.cap_fraction
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub scenes: usize,
    pub questions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub tool_version: String,
    pub config: DatasetConfig,
    pub splits: BTreeMap<Split, Vec<u64>>,
    pub counts: BTreeMap<Split, SplitCounts>,
    pub answer_frequencies: BTreeMap<Split, BTreeMap<String, usize>>,
    pub warnings: Vec<String>,
    /// SHA-256 of every emitted file, keyed by path relative to the dataset root.
    pub digests: BTreeMap<String, String>,
}

/// Splits scene ids `0..n` by a seeded shuffle: floor for train and val,
/// the remainder to test.
pub fn split_scene_ids(
    n_scenes: usize,
    fractions: [f64; 3],
    master_seed: u64,
) -> BTreeMap<Split, Vec<u64>> {
    let mut ids: Vec<u64> = (0..n_scenes as u64).collect();
    ids.shuffle(&mut rng_from(mix(master_seed, stream::SPLIT)));
    // The epsilon keeps 0.7 * 1000 from flooring to 699.
    let n_train = ((fractions[0] * n_scenes as f64) + 1e-9).floor() as usize;
    let n_val =
        (((fractions[1] * n_scenes as f64) + 1e-9).floor() as usize).min(n_scenes - n_train);
    let mut out = BTreeMap::new();
    let mut parts = [
        ids[..n_train].to_vec(),
        ids[n_train..n_train + n_val].to_vec(),
        ids[n_train + n_val..].to_vec(),
    ];
    for (split, part) in SPLITS.iter().zip(parts.iter_mut()) {
        part.sort_unstable();
        out.insert(*split, std::mem::take(part));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(root: &Path, rel: &str, bytes: &[u8]) -> Result<(String, String), DatasetError> {
    let path = root.join(rel);
    fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok((rel.to_string(), sha256_hex(bytes)))
}

pub fn audio_file(scene_id: u64) -> String {
    format!("audio/scene_{scene_id:06}.wav")
}

pub fn spectrogram_file(scene_id: u64) -> String {
    format!("spectrograms/scene_{scene_id:06}.png")
}

struct SceneOutput {
    scene: Scene,
    records: Vec<QuestionRecord>,
    warning: Option<String>,
    digests: Vec<(String, String)>,
}

fn produce_scene(
    config: &DatasetConfig,
    source: SoundSource<'_>,
    catalog: &[crate::template::Template],
    scene_id: u64,
) -> Result<SceneOutput, DatasetError> {
    let scene = compose_scene(source, scene_id, config.master_seed)?;
    let balance = BalanceConfig {
        cap_fraction: config.cap_fraction,
        ..BalanceConfig::default()
    };
    let generated = generate_questions(
        &scene,
        catalog,
        config.questions_per_scene,
        mix(scene.seed, stream::QUESTIONS),
        balance,
    );
    let warning = generated.partial.as_ref().map(|p| {
        format!(
            "scene {scene_id}: {} of {} questions after {} attempts",
            p.accepted, p.requested, p.attempts
        )
    });
    let qps = config.questions_per_scene as u64;
    let records = generated
        .records
        .into_iter()
        .enumerate()
        .map(|(k, mut r)| {
            r.question_id = scene_id * qps + k as u64;
            r
        })
        .collect();

    let digests = if config.render_audio || config.render_spectrograms {
        render_scene_files(
            &config.output_dir,
            &scene,
            source,
            config.render_audio,
            config.render_spectrograms,
        )?
    } else {
        Vec::new()
    };
    Ok(SceneOutput {
        scene,
        records,
        warning,
        digests,
    })
}

/// Renders one scene's WAV and/or PNG under `root`; returns (path, digest) pairs.
fn render_scene_files(
    root: &Path,
    scene: &Scene,
    source: SoundSource<'_>,
    audio: bool,
    spectrograms: bool,
) -> Result<Vec<(String, String)>, DatasetError> {
    let mut digests = Vec::new();
    let waveform = render_scene(scene, source, RenderOptions::default())?;
    if audio {
        let rel = audio_file(scene.scene_id);
        let path = root.join(&rel);
        write_wav_pcm16(&path, &waveform, SAMPLE_RATE).map_err(SoundError::from)?;
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        digests.push((rel, sha256_hex(&bytes)));
    }
    if spectrograms {
        let rel = spectrogram_file(scene.scene_id);
        let path = root.join(&rel);
        spectrogram(&waveform)?.write_png(&path)?;
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        digests.push((rel, sha256_hex(&bytes)));
    }
    Ok(digests)
}

fn create_media_dirs(root: &Path, audio: bool, spectrograms: bool) -> Result<(), DatasetError> {
    for (flag, sub) in [(audio, "audio"), (spectrograms, "spectrograms")] {
        if flag {
            let dir = root.join(sub);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        }
    }
    Ok(())
}

/// Loads the bank named by `config.bank_manifest`; entry paths are relative
/// to the manifest's directory.
pub fn load_configured_bank(config: &DatasetConfig) -> Result<Option<SoundBank>, DatasetError> {
    let Some(manifest_path) = &config.bank_manifest else {
        return Ok(None);
    };
    let entries = read_manifest(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let load = load_bank(dir, &entries, &AnnotationConfig::default())?;
    for e in &load.rejected {
        log::warn!("bank entry {} ({}) rejected: {}", e.index, e.path, e.reason);
    }
    Ok(Some(load.bank))
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, DatasetError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| DatasetError::Config(format!("thread pool: {e}")))
}

/// Generates the full dataset under `config.output_dir` and returns the
/// manifest that was written.
pub fn generate_dataset(config: &DatasetConfig) -> Result<DatasetManifest, DatasetError> {
    config.validate()?;
    let root = &config.output_dir;
    fs::create_dir_all(root).map_err(io_err(root))?;
    create_media_dirs(root, config.render_audio, config.render_spectrograms)?;
    let bank = load_configured_bank(config)?;
    let source = match &bank {
        Some(b) => SoundSource::Bank(b),
        None => SoundSource::Synthesis,
    };
    let catalog = builtin_catalog();

    let outputs: Vec<SceneOutput> = thread_pool(config.workers)?.install(|| {
        (0..config.n_scenes as u64)
            .into_par_iter()
            .map(|id| produce_scene(config, source, &catalog, id))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let splits = split_scene_ids(config.n_scenes, config.split_fractions, config.master_seed);
    let mut split_of = vec![Split::Train; config.n_scenes];
    for (split, ids) in &splits {
        for &id in ids {
            split_of[id as usize] = *split;
        }
    }

    let mut digests: BTreeMap<String, String> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut per_split: BTreeMap<Split, Vec<u8>> = SPLITS.iter().map(|s| (*s, Vec::new())).collect();
    let mut counts: BTreeMap<Split, SplitCounts> = SPLITS
        .iter()
        .map(|s| (*s, SplitCounts::default()))
        .collect();
    let mut freqs: BTreeMap<Split, BTreeMap<String, usize>> =
        SPLITS.iter().map(|s| (*s, BTreeMap::new())).collect();
    let mut scenes = Vec::with_capacity(outputs.len());
    for out in outputs {
        let split = split_of[out.scene.scene_id as usize];
        let c = counts.get_mut(&split).expect("all splits present");
        c.scenes += 1;
        c.questions += out.records.len();
        if out.records.is_empty() {
            warnings.push(format!("scene {}: no valid questions", out.scene.scene_id));
        } else if let Some(w) = out.warning {
            warnings.push(w);
        }
        let buf = per_split.get_mut(&split).expect("all splits present");
        let freq = freqs.get_mut(&split).expect("all splits present");
        for r in &out.records {
            serde_json::to_writer(&mut *buf, r).expect("records serialize");
            buf.push(b'\n');
            *freq.entry(r.answer.to_string()).or_default() += 1;
        }
        digests.extend(out.digests);
        scenes.push(out.scene);
    }

    let scenes_json = serde_json::to_vec_pretty(&scenes).expect("scenes serialize");
    let (k, v) = write_file(root, SCENES_FILE, &scenes_json)?;
    digests.insert(k, v);
    for (split, buf) in &per_split {
        let (k, v) = write_file(root, &split.questions_file(), buf)?;
        digests.insert(k, v);
    }

    let manifest = DatasetManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        splits,
        counts,
        answer_frequencies: freqs,
        warnings,
        digests,
    };
    write_manifest(root, &manifest)?;
    log::info!(
        "wrote {} scenes and {} questions to {}",
        config.n_scenes,
        manifest.counts.values().map(|c| c.questions).sum::<usize>(),
        root.display()
    );
    Ok(manifest)
}

fn write_manifest(root: &Path, manifest: &DatasetManifest) -> Result<(), DatasetError> {
    let path = root.join(MANIFEST_FILE);
    let mut bytes = serde_json::to_vec_pretty(manifest).expect("manifest serializes");
    bytes.push(b'\n');
    fs::write(&path, bytes).map_err(io_err(&path))
}

/// Renders audio and/or spectrograms for an existing symbolic dataset and
/// records them in its manifest, as if `generate_dataset` had rendered them.
pub fn render_dataset(
    dir: &Path,
    audio: bool,
    spectrograms: bool,
    workers: usize,
) -> Result<DatasetManifest, DatasetError> {
    let mut manifest = read_manifest_file(dir)?;
    let scenes = read_scenes(dir)?;
    create_media_dirs(dir, audio, spectrograms)?;
    let mut config = manifest.config.clone();
    config.output_dir = dir.to_path_buf();
    let bank = load_configured_bank(&config)?;
    let source = match &bank {
        Some(b) => SoundSource::Bank(b),
        None => SoundSource::Synthesis,
    };
    let rendered: Vec<Vec<(String, String)>> = thread_pool(workers)?.install(|| {
        scenes
            .par_iter()
            .map(|s| render_scene_files(dir, s, source, audio, spectrograms))
            .collect::<Result<Vec<_>, _>>()
    })?;
    manifest.digests.extend(rendered.into_iter().flatten());
    manifest.config.render_audio |= audio;
    manifest.config.render_spectrograms |= spectrograms;
    write_manifest(dir, &manifest)?;
    log::info!("rendered {} scenes in {}", scenes.len(), dir.display());
    Ok(manifest)
}

pub fn read_manifest_file(dir: &Path) -> Result<DatasetManifest, DatasetError> {
    read_json(&dir.join(MANIFEST_FILE))
}

pub fn read_scenes(dir: &Path) -> Result<Vec<Scene>, DatasetError> {
    read_json(&dir.join(SCENES_FILE))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, DatasetError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    serde_json::from_slice(&bytes).map_err(|e| DatasetError::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

/// Reads a JSON-lines question file.
pub fn read_questions(path: &Path) -> Result<Vec<QuestionRecord>, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| DatasetError::Parse {
                path: format!("{}:{}", path.display(), i + 1),
                detail: e.to_string(),
            })
        })
        .collect()
}

/// Writes records as JSON lines.
pub fn write_questions(path: &Path, records: &[QuestionRecord]) -> Result<(), DatasetError> {
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("records serialize");
        buf.push(b'\n');
    }
    fs::write(path, buf).map_err(io_err(path))
}
