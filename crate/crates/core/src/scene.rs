//! Symbolic acoustic scenes: ten sequential sounds over fifty seconds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{mix, rng_from};
use crate::soundbank::{
    Brightness, GlobalPosition, InstrumentFamily, Loudness, Note, Ordinal, SoundAttributes,
    SoundBank, SAMPLE_RATE,
};

pub const SCENE_DURATION_S: f64 = 50.0;
pub const SCENE_SAMPLES: usize = 2_400_000;
pub const SOUNDS_PER_SCENE: usize = 10;
pub const MIN_REVERB_MS: f64 = 50.0;
pub const MAX_REVERB_MS: f64 = 400.0;
const MIN_SYNTH_DURATION_S: f64 = 2.0;
const MAX_SYNTH_DURATION_S: f64 = 3.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SceneError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bank has no sound for {0:?}")]
    MissingCombination(SoundAttributes),
    #[error("sounds total {total_s:.3} s and do not fit in the scene")]
    DoesNotFit { total_s: f64 },
    #[error("scene invariant violated: {0}")]
    Invariant(String),
}

/// Where waveforms for scene sounds come from.
#[derive(Debug, Clone, Copy)]
pub enum SoundSource<'a> {
    /// Parametric synthesis seeded per sound.
    Synthesis,
    /// Recordings from an ingested bank; scene sounds carry a `sound_id`.
    Bank(&'a SoundBank),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSound {
    pub instrument: InstrumentFamily,
    pub note: Note,
    pub brightness: Brightness,
    pub loudness: Loudness,
    pub onset_s: f64,
    pub duration_s: f64,
    pub absolute_position: u8,
    pub relative_position: u8,
    pub global_position: GlobalPosition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sound_id: Option<String>,
}

impl SceneSound {
    /// A sound with positions still unset; fill them with [`derive_positions`].
    pub fn unplaced(attributes: SoundAttributes, onset_s: f64, duration_s: f64) -> Self {
        SceneSound {
            instrument: attributes.instrument,
            note: attributes.note,
            brightness: attributes.brightness,
            loudness: attributes.loudness,
            onset_s,
            duration_s,
            absolute_position: 0,
            relative_position: 0,
            global_position: GlobalPosition::Beginning,
            sound_id: None,
        }
    }

    pub fn attributes(&self) -> SoundAttributes {
        SoundAttributes {
            instrument: self.instrument,
            note: self.note,
            brightness: self.brightness,
            loudness: self.loudness,
        }
    }

    pub fn end_s(&self) -> f64 {
        self.onset_s + self.duration_s
    }

    pub fn absolute_ordinal(&self) -> Option<Ordinal> {
        Ordinal::new(self.absolute_position)
    }

    pub fn relative_ordinal(&self) -> Option<Ordinal> {
        Ordinal::new(self.relative_position)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub scene_id: u64,
    pub duration_s: f64,
    pub reverb_time_ms: f64,
    pub seed: u64,
    pub sounds: Vec<SceneSound>,
}

impl Scene {
    /// Builds a scene from explicit attributes and timings, deriving positions.
    pub fn from_layout(
        scene_id: u64,
        seed: u64,
        reverb_time_ms: f64,
        layout: &[(SoundAttributes, f64, f64)],
    ) -> Result<Scene, SceneError> {
        let mut sounds: Vec<SceneSound> = layout
            .iter()
            .map(|(a, onset, dur)| SceneSound::unplaced(*a, *onset, *dur))
            .collect();
        derive_positions(&mut sounds, SCENE_DURATION_S)?;
        Ok(Scene {
            scene_id,
            duration_s: SCENE_DURATION_S,
            reverb_time_ms,
            seed,
            sounds,
        })
    }

    /// Checks every structural invariant of a composed scene.
    pub fn validate(&self) -> Result<(), SceneError> {
        let bad = |msg: String| Err(SceneError::Invariant(msg));
        if self.sounds.len() != SOUNDS_PER_SCENE {
            return bad(format!(
                "{} sounds, expected {SOUNDS_PER_SCENE}",
                self.sounds.len()
            ));
        }
        if !(MIN_REVERB_MS..=MAX_REVERB_MS).contains(&self.reverb_time_ms) {
            return bad(format!(
                "reverb time {} ms out of range",
                self.reverb_time_ms
            ));
        }
        for pair in self.sounds.windows(2) {
            if pair[1].onset_s <= pair[0].onset_s {
                return bad("onsets not strictly increasing".into());
            }
            if pair[1].onset_s < pair[0].end_s() {
                return bad(format!(
                    "sounds at {} s and {} s overlap",
                    pair[0].onset_s, pair[1].onset_s
                ));
            }
        }
        if let Some(last) = self.sounds.last() {
            // Sample-quantized layouts may land a rounding error past the end.
            if last.end_s() > self.duration_s + 0.5 / f64::from(SAMPLE_RATE) {
                return bad(format!("last sound ends at {} s", last.end_s()));
            }
        }
        let mut expected = self.sounds.clone();
        derive_positions(&mut expected, self.duration_s)?;
        for (have, want) in self.sounds.iter().zip(&expected) {
            if (
                have.absolute_position,
                have.relative_position,
                have.global_position,
            ) != (
                want.absolute_position,
                want.relative_position,
                want.global_position,
            ) {
                return bad(format!(
                    "positions of sound at {} s are inconsistent",
                    have.onset_s
                ));
            }
        }
        Ok(())
    }
}

/// Fills absolute, relative and global positions from onset times.
///
/// Global position splits the scene into exact thirds by onset.
pub fn derive_positions(
    sounds: &mut [SceneSound],
    scene_duration_s: f64,
) -> Result<(), SceneError> {
    if sounds.windows(2).any(|w| w[1].onset_s <= w[0].onset_s) {
        return Err(SceneError::InvalidArgument(
            "onsets must be strictly increasing".into(),
        ));
    }
    if sounds.len() > usize::from(Ordinal::MAX) {
        return Err(SceneError::InvalidArgument(format!(
            "{} sounds exceed the ordinal range",
            sounds.len()
        )));
    }
    let mut per_instrument = [0u8; 5];
    for (i, sound) in sounds.iter_mut().enumerate() {
        sound.absolute_position = i as u8 + 1;
        let slot = InstrumentFamily::ALL
            .iter()
            .position(|f| *f == sound.instrument)
            .expect("instrument in taxonomy");
        per_instrument[slot] += 1;
        sound.relative_position = per_instrument[slot];
        sound.global_position = if sound.onset_s < scene_duration_s / 3.0 {
            GlobalPosition::Beginning
        } else if sound.onset_s < 2.0 * scene_duration_s / 3.0 {
            GlobalPosition::Middle
        } else {
            GlobalPosition::End
        };
    }
    Ok(())
}

pub fn scene_seed(master_seed: u64, scene_id: u64) -> u64 {
    mix(master_seed, scene_id)
}

/// Composes scene `scene_id` deterministically from `master_seed`.
///
/// Durations and gaps are laid out in whole samples so that the last sound
/// ends exactly at 50 s.
pub fn compose_scene(
    source: SoundSource<'_>,
    scene_id: u64,
    master_seed: u64,
) -> Result<Scene, SceneError> {
    let seed = scene_seed(master_seed, scene_id);
    let mut rng = rng_from(seed);
    let sr = f64::from(SAMPLE_RATE);

    let mut picks: Vec<(SoundAttributes, usize, Option<String>)> =
        Vec::with_capacity(SOUNDS_PER_SCENE);
    for _ in 0..SOUNDS_PER_SCENE {
        let attributes = SoundAttributes {
            instrument: InstrumentFamily::ALL[rng.random_range(0..InstrumentFamily::ALL.len())],
            note: Note::ALL[rng.random_range(0..Note::ALL.len())],
            brightness: Brightness::ALL[rng.random_range(0..2)],
            loudness: Loudness::ALL[rng.random_range(0..2)],
        };
        match source {
            SoundSource::Synthesis => {
                let d = rng.random_range(MIN_SYNTH_DURATION_S..=MAX_SYNTH_DURATION_S);
                picks.push((attributes, (d * sr).round() as usize, None));
            }
            SoundSource::Bank(bank) => {
                let candidates = bank.matching(&attributes);
                if candidates.is_empty() {
                    return Err(SceneError::MissingCombination(attributes));
                }
                let chosen = candidates[rng.random_range(0..candidates.len())];
                picks.push((attributes, chosen.waveform.len(), Some(chosen.id.clone())));
            }
        }
    }

    let total_sound: usize = picks.iter().map(|p| p.1).sum();
    if total_sound > SCENE_SAMPLES {
        return Err(SceneError::DoesNotFit {
            total_s: total_sound as f64 / sr,
        });
    }
    let silence = (SCENE_SAMPLES - total_sound) as f64;
    let weights: Vec<f64> = (0..SOUNDS_PER_SCENE)
        .map(|_| 0.05 + rng.random::<f64>())
        .collect();
    let weight_total: f64 = weights.iter().sum();
    let reverb_time_ms = rng.random_range(MIN_REVERB_MS..=MAX_REVERB_MS);

    let mut sounds = Vec::with_capacity(SOUNDS_PER_SCENE);
    let mut cumulative_weight = 0.0;
    let mut sound_samples = 0usize;
    for (i, (attributes, len, sound_id)) in picks.into_iter().enumerate() {
        cumulative_weight += weights[i];
        let gap_samples = if i + 1 == SOUNDS_PER_SCENE {
            SCENE_SAMPLES - total_sound
        } else {
            (silence * cumulative_weight / weight_total).round() as usize
        };
        let onset = gap_samples + sound_samples;
        sound_samples += len;
        let mut s = SceneSound::unplaced(attributes, onset as f64 / sr, len as f64 / sr);
        s.sound_id = sound_id;
        sounds.push(s);
    }
    derive_positions(&mut sounds, SCENE_DURATION_S)?;
    let scene = Scene {
        scene_id,
        duration_s: SCENE_DURATION_S,
        reverb_time_ms,
        seed,
        sounds,
    };
    scene.validate()?;
    Ok(scene)
}
