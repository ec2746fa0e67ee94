//! Additive synthesis of elementary sounds.
//!
//! Each family has a fixed harmonic amplitude profile. Brightness is a
//! per-harmonic spectral tilt (first-order low-pass at 1.5 kHz for dark,
//! first-order +6 dB high shelf at 2 kHz for bright); the tilt is cascaded
//! until the measured centroid clears the annotation threshold with margin,
//! so requested labels always survive re-annotation.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::annotate::{spectral_centroid, AnnotationConfig};
use super::attributes::{Brightness, InstrumentFamily, Loudness, Note, SoundAttributes};
use super::{ElementarySound, SoundError, SAMPLE_RATE};
use crate::rng::rng_from;

pub const DEFAULT_OCTAVE: i32 = 4;
pub const MIN_DURATION_S: f64 = 0.5;
pub const MAX_DURATION_S: f64 = 5.0;

const MAX_HARMONICS: usize = 30;
const MAX_PARTIAL_HZ: f64 = 20_000.0;
const ATTACK_S: f64 = 0.030;
const RELEASE_S: f64 = 0.100;
const LOUD_PEAK_DBFS: f64 = -6.0;
const QUIET_PEAK_DBFS: f64 = -18.0;
const DARK_CUTOFF_HZ: f64 = 1_500.0;
const SHELF_CORNER_HZ: f64 = 2_000.0;
const SHELF_GAIN: f64 = 2.0;
const VIBRATO_RATE_HZ: f64 = 5.0;
const VIBRATO_DEPTH: f64 = 0.003;
const MAX_TILT_PASSES: u32 = 16;
// Margins around the brightness threshold the measured centroid must clear.
const BRIGHT_MARGIN: f64 = 1.10;
const DARK_MARGIN: f64 = 0.90;

/// Equal-tempered frequency with A4 = 440 Hz.
pub fn note_frequency(note: Note, octave: i32) -> Result<f64, SoundError> {
    if !(0..=8).contains(&octave) {
        return Err(SoundError::InvalidArgument(format!(
            "octave {octave} outside [0, 8]"
        )));
    }
    let from_a4 = (octave - 4) * 12 + note.semitone_from_c() - Note::A.semitone_from_c();
    Ok(440.0 * 2f64.powf(f64::from(from_a4) / 12.0))
}

fn base_profile(instrument: InstrumentFamily, k: usize) -> f64 {
    let kf = k as f64;
    match instrument {
        InstrumentFamily::Cello => {
            if k % 2 == 1 {
                1.5 / kf
            } else {
                1.0 / kf
            }
        }
        InstrumentFamily::Clarinet => {
            if k % 2 == 1 {
                1.0 / kf
            } else {
                0.0
            }
        }
        InstrumentFamily::Flute => 1.0 / (kf * kf),
        InstrumentFamily::Trumpet => {
            if k <= 6 {
                1.0
            } else {
                6.0 / kf
            }
        }
        InstrumentFamily::Violin => kf.powf(-1.2),
    }
}

fn tilt_gain(brightness: Brightness, freq: f64) -> f64 {
    match brightness {
        Brightness::Dark => 1.0 / (1.0 + (freq / DARK_CUTOFF_HZ).powi(2)).sqrt(),
        Brightness::Bright => {
            let x = (freq / SHELF_CORNER_HZ).powi(2);
            ((1.0 + SHELF_GAIN * SHELF_GAIN * x) / (1.0 + x)).sqrt()
        }
    }
}

struct Partials {
    amplitudes: Vec<f64>,
    jitter: Vec<f64>,
}

impl Partials {
    fn shaped(&self, f0: f64, brightness: Brightness, passes: u32) -> Vec<f64> {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let f = f0 * (i + 1) as f64;
                a * tilt_gain(brightness, f).powi(passes as i32)
            })
            .collect()
    }

    /// Schroeder's low-crest phases for an arbitrary amplitude spectrum,
    /// phi_k = -2 pi sum_{j<k} (k - j) p_j with p_j the power share of
    /// partial j, plus the seeded jitter.
    fn phases(&self, amplitudes: &[f64]) -> Vec<f64> {
        let total: f64 = amplitudes.iter().map(|a| a * a).sum();
        let shares: Vec<f64> = amplitudes.iter().map(|a| a * a / total).collect();
        (0..amplitudes.len())
            .map(|k| {
                let spread: f64 = (0..k).map(|j| (k - j) as f64 * shares[j]).sum();
                -TAU * spread + self.jitter[k]
            })
            .collect()
    }
}

fn analytic_centroid(f0: f64, amplitudes: &[f64]) -> f64 {
    let (num, den) = amplitudes
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(n, d), (i, a)| {
            (n + a * f0 * (i + 1) as f64, d + a)
        });
    num / den
}

fn envelope(t: f64, total: f64) -> f64 {
    let attack = (t / ATTACK_S).min(1.0);
    let release = ((total - t) / RELEASE_S).clamp(0.0, 1.0);
    attack * release
}

/// Renders a harmonic tone; phases of all partials are advanced from one
/// complex phasor so the per-sample cost is two trig calls.
fn render_partials(
    f0: f64,
    amplitudes: &[f64],
    phases: &[f64],
    vibrato_phase: Option<f64>,
    n: usize,
) -> Vec<f64> {
    let sr = f64::from(SAMPLE_RATE);
    let total = n as f64 / sr;
    let offsets: Vec<(f64, f64)> = phases.iter().map(|p| (p.cos(), p.sin())).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / sr;
        let mut theta = TAU * f0 * t;
        if let Some(psi) = vibrato_phase {
            // integral of f0 * depth * sin(2 pi r t + psi)
            let w = TAU * VIBRATO_RATE_HZ;
            theta += TAU * f0 * VIBRATO_DEPTH / w * ((psi).cos() - (w * t + psi).cos());
        }
        let (zs, zc) = theta.sin_cos();
        let (mut pr, mut pi) = (1.0f64, 0.0f64);
        let mut acc = 0.0;
        for (a, (oc, os)) in amplitudes.iter().zip(&offsets) {
            let nr = pr * zc - pi * zs;
            let ni = pr * zs + pi * zc;
            pr = nr;
            pi = ni;
            if *a != 0.0 {
                // Im(e^{i phi} * p)
                acc += a * (os * pr + oc * pi);
            }
        }
        out.push(acc * envelope(t, total));
    }
    out
}

fn sample_count(duration_s: f64) -> usize {
    (duration_s * f64::from(SAMPLE_RATE)).round() as usize
}

/// Synthesizes one attributed tone in octave 4.
///
/// The output is a pure function of the arguments. The seed only drives the
/// per-partial phase jitter and the vibrato phase, so it never moves the
/// spectral envelope that the labels depend on.
pub fn synthesize_sound(
    instrument: InstrumentFamily,
    note: Note,
    brightness: Brightness,
    loudness: Loudness,
    duration_s: f64,
    seed: u64,
) -> Result<ElementarySound, SoundError> {
    if !(MIN_DURATION_S..=MAX_DURATION_S).contains(&duration_s) || duration_s.is_nan() {
        return Err(SoundError::InvalidArgument(format!(
            "duration {duration_s} s outside [{MIN_DURATION_S}, {MAX_DURATION_S}]"
        )));
    }
    let f0 = note_frequency(note, DEFAULT_OCTAVE)?;
    let n = sample_count(duration_s);
    let cfg = AnnotationConfig::default();

    let mut rng = rng_from(seed);
    let harmonics = MAX_HARMONICS.min((MAX_PARTIAL_HZ / f0).floor() as usize);
    let partials = Partials {
        amplitudes: (1..=harmonics)
            .map(|k| base_profile(instrument, k))
            .collect(),
        jitter: (0..harmonics)
            .map(|_| rng.random_range(-PI / 16.0..PI / 16.0))
            .collect(),
    };
    let vibrato = (instrument == InstrumentFamily::Violin).then(|| rng.random_range(0.0..TAU));

    let clears = |centroid: f64, bright_margin: f64, dark_margin: f64| match brightness {
        Brightness::Bright => centroid > cfg.brightness_threshold_hz * bright_margin,
        Brightness::Dark => centroid < cfg.brightness_threshold_hz * dark_margin,
    };

    let mut passes = 1;
    while passes < MAX_TILT_PASSES
        && !clears(
            analytic_centroid(f0, &partials.shaped(f0, brightness, passes)),
            1.25,
            0.8,
        )
    {
        passes += 1;
    }

    loop {
        let amplitudes = partials.shaped(f0, brightness, passes);
        let phases = partials.phases(&amplitudes);
        let raw = render_partials(f0, &amplitudes, &phases, vibrato, n);
        let centroid =
            spectral_centroid(&raw).ok_or(SoundError::UndefinedAttribute("brightness"))?;
        if clears(centroid, BRIGHT_MARGIN, DARK_MARGIN) {
            let waveform = normalize_peak(&raw, loudness);
            let sound = ElementarySound {
                id: format!(
                    "synth:{}:{}:{}:{}:{:016x}",
                    instrument, note, brightness, loudness, seed
                ),
                attributes: SoundAttributes {
                    instrument,
                    note,
                    brightness,
                    loudness,
                },
                duration_s,
                waveform,
            };
            let measured = super::annotate::annotate_loudness(&sound.waveform, &cfg)?;
            if measured != loudness {
                return Err(SoundError::LabelNotRealizable {
                    attributes: sound.attributes,
                    detail: format!("loudness annotated as {measured}"),
                });
            }
            return Ok(sound);
        }
        passes += 1;
        if passes > MAX_TILT_PASSES {
            return Err(SoundError::LabelNotRealizable {
                attributes: SoundAttributes {
                    instrument,
                    note,
                    brightness,
                    loudness,
                },
                detail: format!("centroid {centroid:.0} Hz after {MAX_TILT_PASSES} tilt passes"),
            });
        }
    }
}

fn normalize_peak(raw: &[f64], loudness: Loudness) -> Vec<f32> {
    let target_db = match loudness {
        Loudness::Loud => LOUD_PEAK_DBFS,
        Loudness::Quiet => QUIET_PEAK_DBFS,
    };
    let target = 10f64.powf(target_db / 20.0);
    let peak = raw.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let gain = if peak > 0.0 { target / peak } else { 0.0 };
    raw.iter().map(|s| (s * gain) as f32).collect()
}
