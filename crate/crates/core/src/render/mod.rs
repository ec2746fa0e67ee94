//! Scene rendering: waveform assembly, reverberation and spectrograms.

pub mod reverb;
pub mod spectrogram;

use std::path::Path;

pub use reverb::{apply_reverb, impulse_response};
pub use spectrogram::{spectrogram, stft_magnitudes, SpectrogramImage, IMAGE_HEIGHT, IMAGE_WIDTH};

use crate::rng::{mix, stream};
use crate::scene::{Scene, SoundSource, SCENE_SAMPLES};
use crate::soundbank::{synthesize_sound, SoundError, SAMPLE_RATE};

/// Peak level of a rendered scene after reverberation.
pub const OUTPUT_PEAK_DBFS: f64 = -1.0;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no waveform for scene sound {index} ({detail})")]
    MissingSound { index: usize, detail: String },
    #[error(transparent)]
    Sound(#[from] SoundError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("encoding failed: {0}")]
    Encode(String),
    #[error("decoding failed: {0}")]
    Decode(String),
}

impl RenderError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RenderError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub reverb: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { reverb: true }
    }
}

/// Seed used to synthesize sound `index` of a scene.
pub fn sound_seed(scene: &Scene, index: usize) -> u64 {
    mix(scene.seed, stream::SOUND_BASE + index as u64)
}

/// Renders 50 s at 48 kHz: sounds placed at their onset sample, reverberated,
/// then peak-normalized to -1 dBFS.
pub fn render_scene(
    scene: &Scene,
    source: SoundSource<'_>,
    options: RenderOptions,
) -> Result<Vec<f32>, RenderError> {
    let sr = f64::from(SAMPLE_RATE);
    let mut mix_buf = vec![0f32; SCENE_SAMPLES];
    for (index, s) in scene.sounds.iter().enumerate() {
        let synthesized;
        let waveform: &[f32] = match source {
            SoundSource::Synthesis => {
                let a = s.attributes();
                synthesized = synthesize_sound(
                    a.instrument,
                    a.note,
                    a.brightness,
                    a.loudness,
                    s.duration_s,
                    sound_seed(scene, index),
                )?;
                &synthesized.waveform
            }
            SoundSource::Bank(bank) => {
                let id = s
                    .sound_id
                    .as_deref()
                    .ok_or_else(|| RenderError::MissingSound {
                        index,
                        detail: "no sound_id".into(),
                    })?;
                &bank
                    .get(id)
                    .ok_or_else(|| RenderError::MissingSound {
                        index,
                        detail: format!("'{id}' not in bank"),
                    })?
                    .waveform
            }
        };
        let start = (s.onset_s * sr).round() as usize;
        if start >= SCENE_SAMPLES {
            continue;
        }
        for (out, x) in mix_buf[start..].iter_mut().zip(waveform) {
            *out += *x;
        }
    }
    if options.reverb {
        mix_buf = apply_reverb(
            &mix_buf,
            scene.reverb_time_ms,
            mix(scene.seed, stream::REVERB),
        )?;
    }
    let peak = mix_buf.iter().fold(0f32, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        let gain = (10f64.powf(OUTPUT_PEAK_DBFS / 20.0) / f64::from(peak)) as f32;
        mix_buf.iter_mut().for_each(|x| *x *= gain);
    }
    Ok(mix_buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::compose_scene;
    use crate::soundbank::{
        Brightness, InstrumentFamily, Loudness, Note, SoundAttributes, SoundBank,
    };

    fn one_flute_scene() -> Scene {
        let attrs = SoundAttributes {
            instrument: InstrumentFamily::Flute,
            note: Note::A,
            brightness: Brightness::Bright,
            loudness: Loudness::Loud,
        };
        Scene::from_layout(0, 17, 200.0, &[(attrs, 20.0, 2.5)]).unwrap()
    }

    #[test]
    fn rendered_length_is_fixed() {
        let scene = compose_scene(SoundSource::Synthesis, 3, 9).unwrap();
        let audio = render_scene(&scene, SoundSource::Synthesis, RenderOptions::default()).unwrap();
        assert_eq!(audio.len(), 2_400_000);
        let peak = audio.iter().fold(0f32, |m, x| m.max(x.abs()));
        assert!((20.0 * f64::from(peak).log10() + 1.0).abs() < 1e-3);
    }

    #[test]
    fn dry_energy_stays_inside_sound_interval() {
        let scene = one_flute_scene();
        let audio = render_scene(
            &scene,
            SoundSource::Synthesis,
            RenderOptions { reverb: false },
        )
        .unwrap();
        let (start, end) = (20 * 48_000, (22.5 * 48_000.0) as usize);
        let total: f64 = audio.iter().map(|x| f64::from(*x).powi(2)).sum();
        let inside: f64 = audio[start..end]
            .iter()
            .map(|x| f64::from(*x).powi(2))
            .sum();
        assert!((total - inside) / total < 0.01);
    }

    #[test]
    fn rendering_is_deterministic() {
        let scene = compose_scene(SoundSource::Synthesis, 1, 1).unwrap();
        let a = render_scene(&scene, SoundSource::Synthesis, RenderOptions::default()).unwrap();
        let b = render_scene(&scene, SoundSource::Synthesis, RenderOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bank_scene_without_ids_fails() {
        let bank = SoundBank::default();
        let err = render_scene(
            &one_flute_scene(),
            SoundSource::Bank(&bank),
            RenderOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, RenderError::MissingSound { index: 0, .. }));
    }
}
