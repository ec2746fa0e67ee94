//! Ingesting a user-provided bank of recordings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::annotate::{annotate_brightness, annotate_loudness, AnnotationConfig};
use super::attributes::{InstrumentFamily, Note, SoundAttributes};
use super::{ElementarySound, SoundError, SAMPLE_RATE};
use crate::audio_io::{read_wav, resample};

/// One manifest line: labels stay strings so a bad label is a per-entry error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub instrument: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BankEntryError {
    pub index: usize,
    pub path: String,
    pub reason: String,
}

impl fmt::Display for BankEntryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry {} ({}): {}", self.index, self.path, self.reason)
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, SoundError> {
    let text = std::fs::read_to_string(path).map_err(|e| SoundError::Manifest {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| SoundError::Manifest {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

/// Annotated sounds indexed by their full attribute tuple.
#[derive(Debug, Clone, Default)]
pub struct SoundBank {
    sounds: Vec<ElementarySound>,
    by_attributes: BTreeMap<SoundAttributes, Vec<usize>>,
    by_id: BTreeMap<String, usize>,
}

impl SoundBank {
    pub fn from_sounds(sounds: Vec<ElementarySound>) -> Self {
        let mut bank = SoundBank::default();
        for s in sounds {
            bank.insert(s);
        }
        bank
    }

    fn insert(&mut self, sound: ElementarySound) {
        let idx = self.sounds.len();
        self.by_attributes
            .entry(sound.attributes)
            .or_default()
            .push(idx);
        self.by_id.insert(sound.id.clone(), idx);
        self.sounds.push(sound);
    }

    pub fn len(&self) -> usize {
        self.sounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sounds.is_empty()
    }

    pub fn sounds(&self) -> &[ElementarySound] {
        &self.sounds
    }

    pub fn get(&self, id: &str) -> Option<&ElementarySound> {
        self.by_id.get(id).map(|&i| &self.sounds[i])
    }

    /// Sounds carrying exactly these attributes, in insertion order.
    pub fn matching(&self, attributes: &SoundAttributes) -> Vec<&ElementarySound> {
        self.by_attributes
            .get(attributes)
            .map(|ids| ids.iter().map(|&i| &self.sounds[i]).collect())
            .unwrap_or_default()
    }

    /// Attribute tuples with at least one sound.
    pub fn covered(&self) -> impl Iterator<Item = &SoundAttributes> {
        self.by_attributes.keys()
    }
}

/// Result of ingesting a manifest: the bank plus entries that were skipped.
#[derive(Debug)]
pub struct BankLoad {
    pub bank: SoundBank,
    pub rejected: Vec<BankEntryError>,
}

/// Decodes, resamples to 48 kHz and annotates every manifest entry. Relative
/// paths are resolved against `dir`. Bad entries are reported individually;
/// an empty result is fatal.
pub fn load_bank(
    dir: &Path,
    manifest: &[ManifestEntry],
    cfg: &AnnotationConfig,
) -> Result<BankLoad, SoundError> {
    let mut bank = SoundBank::default();
    let mut rejected = Vec::new();
    for (index, entry) in manifest.iter().enumerate() {
        match load_entry(dir, entry, cfg) {
            Ok(sound) => bank.insert(sound),
            Err(reason) => {
                log::warn!("bank entry {index} ({}) rejected: {reason}", entry.path);
                rejected.push(BankEntryError {
                    index,
                    path: entry.path.clone(),
                    reason,
                });
            }
        }
    }
    if bank.is_empty() {
        return Err(SoundError::EmptyBank { rejected });
    }
    Ok(BankLoad { bank, rejected })
}

fn load_entry(
    dir: &Path,
    entry: &ManifestEntry,
    cfg: &AnnotationConfig,
) -> Result<ElementarySound, String> {
    let instrument: InstrumentFamily = entry.instrument.parse().map_err(|e| format!("{e}"))?;
    let note: Note = entry.note.parse().map_err(|e| format!("{e}"))?;
    let path: PathBuf = if Path::new(&entry.path).is_absolute() {
        PathBuf::from(&entry.path)
    } else {
        dir.join(&entry.path)
    };
    let audio = read_wav(&path).map_err(|e| e.to_string())?;
    let samples =
        resample(&audio.samples, audio.sample_rate, SAMPLE_RATE).map_err(|e| e.to_string())?;
    let brightness = annotate_brightness(&samples, cfg).map_err(|e| e.to_string())?;
    let loudness = annotate_loudness(&samples, cfg).map_err(|e| e.to_string())?;
    let peak = samples.iter().fold(0.0f32, |m, s| m.max(s.abs()));
    if peak > 1.0 {
        return Err(format!("peak {peak} exceeds full scale"));
    }
    Ok(ElementarySound {
        id: entry.path.clone(),
        attributes: SoundAttributes {
            instrument,
            note,
            brightness,
            loudness,
        },
        duration_s: samples.len() as f64 / f64::from(SAMPLE_RATE),
        waveform: samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio_io::write_wav_pcm16;
    use crate::soundbank::{synthesize_sound, Brightness, Loudness};

    fn write_bank(dir: &Path) -> Vec<ManifestEntry> {
        let specs = [
            (
                InstrumentFamily::Cello,
                Note::A,
                Brightness::Dark,
                Loudness::Loud,
            ),
            (
                InstrumentFamily::Clarinet,
                Note::C,
                Brightness::Bright,
                Loudness::Quiet,
            ),
            (
                InstrumentFamily::Flute,
                Note::D,
                Brightness::Bright,
                Loudness::Loud,
            ),
            (
                InstrumentFamily::Trumpet,
                Note::GSharp,
                Brightness::Dark,
                Loudness::Quiet,
            ),
            (
                InstrumentFamily::Violin,
                Note::F,
                Brightness::Bright,
                Loudness::Loud,
            ),
        ];
        specs
            .iter()
            .enumerate()
            .map(|(i, (inst, note, b, l))| {
                let s = synthesize_sound(*inst, *note, *b, *l, 1.0, i as u64).unwrap();
                let name = format!("s{i}.wav");
                write_wav_pcm16(&dir.join(&name), &s.waveform, SAMPLE_RATE).unwrap();
                ManifestEntry {
                    path: name,
                    instrument: inst.to_string(),
                    note: note.to_string(),
                }
            })
            .collect()
    }

    #[test]
    fn loads_and_indexes_valid_entries() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_bank(dir.path());
        let load = load_bank(dir.path(), &manifest, &AnnotationConfig::default()).unwrap();
        assert_eq!(load.bank.len(), 5);
        assert!(load.rejected.is_empty());
        let key = SoundAttributes {
            instrument: InstrumentFamily::Flute,
            note: Note::D,
            brightness: Brightness::Bright,
            loudness: Loudness::Loud,
        };
        assert_eq!(load.bank.matching(&key).len(), 1);
        assert!(load.bank.get("s2.wav").is_some());
    }

    #[test]
    fn unknown_instrument_names_the_entry() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = write_bank(dir.path());
        manifest[1].instrument = "piano".into();
        let load = load_bank(dir.path(), &manifest, &AnnotationConfig::default()).unwrap();
        assert_eq!(load.bank.len(), 4);
        assert_eq!(load.rejected.len(), 1);
        assert_eq!(load.rejected[0].path, "s1.wav");
        assert!(load.rejected[0].reason.contains("piano"));
    }

    #[test]
    fn unreadable_file_is_per_entry() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = write_bank(dir.path());
        manifest[0].path = "missing.wav".into();
        let load = load_bank(dir.path(), &manifest, &AnnotationConfig::default()).unwrap();
        assert_eq!(load.rejected[0].path, "missing.wav");
    }

    #[test]
    fn empty_manifest_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_bank(dir.path(), &[], &AnnotationConfig::default()),
            Err(SoundError::EmptyBank { .. })
        ));
    }

    #[test]
    fn resamples_foreign_rates() {
        let dir = tempfile::tempdir().unwrap();
        let s = synthesize_sound(
            InstrumentFamily::Trumpet,
            Note::A,
            Brightness::Bright,
            Loudness::Loud,
            1.0,
            0,
        )
        .unwrap();
        let at_24k: Vec<f32> = s.waveform.iter().step_by(2).copied().collect();
        write_wav_pcm16(&dir.path().join("x.wav"), &at_24k, 24_000).unwrap();
        let manifest = vec![ManifestEntry {
            path: "x.wav".into(),
            instrument: "trumpet".into(),
            note: "A".into(),
        }];
        let load = load_bank(dir.path(), &manifest, &AnnotationConfig::default()).unwrap();
        let sound = &load.bank.sounds()[0];
        assert_eq!(sound.waveform.len(), 48_000);
        assert!((sound.duration_s - 1.0).abs() < 1e-9);
    }

    #[test]
    fn manifest_json_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(
            &path,
            r#"[{"path": "a.wav", "instrument": "flute", "note": "C#"}]"#,
        )
        .unwrap();
        let entries = read_manifest(&path).unwrap();
        assert_eq!(entries[0].note, "C#");
    }
}
