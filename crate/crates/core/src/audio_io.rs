//! WAV reading/writing and sample-rate conversion.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use rubato::{FftFixedIn, Resampler};

#[derive(Debug, thiserror::Error)]
pub enum AudioIoError {
    #[error("{path}: {source}")]
    Wav {
        path: String,
        #[source]
        source: hound::Error,
    },
    #[error("{path}: unsupported sample format ({bits}-bit {format:?})")]
    UnsupportedFormat {
        path: String,
        bits: u16,
        format: SampleFormat,
    },
    #[error("resampling failed: {0}")]
    Resample(String),
}

/// Decoded mono audio.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoAudio {
    pub sample_rate: u32,
    pub samples: Vec<f32>,
}

/// Reads a WAV file and downmixes to mono by channel averaging.
pub fn read_wav(path: &Path) -> Result<MonoAudio, AudioIoError> {
    let wav_err = |source| AudioIoError::Wav {
        path: path.display().to_string(),
        source,
    };
    let mut reader = WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .collect::<Result<_, _>>()
            .map_err(wav_err)?,
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f32;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f32 * scale))
                .collect::<Result<_, _>>()
                .map_err(wav_err)?
        }
        (format, bits) => {
            return Err(AudioIoError::UnsupportedFormat {
                path: path.display().to_string(),
                bits,
                format,
            })
        }
    };
    let channels = usize::from(spec.channels.max(1));
    let samples = interleaved
        .chunks(channels)
        .map(|frame| frame.iter().sum::<f32>() / channels as f32)
        .collect();
    Ok(MonoAudio {
        sample_rate: spec.sample_rate,
        samples,
    })
}

/// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
pub fn write_wav_pcm16(path: &Path, samples: &[f32], sample_rate: u32) -> Result<(), AudioIoError> {
    let wav_err = |source| AudioIoError::Wav {
        path: path.display().to_string(),
        source,
    };
    let spec = WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err)?;
    for s in samples {
        let v = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        writer.write_sample(v).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)
}

/// Band-limited conversion to `target_rate`. Output length is
/// `round(len * target / source)` with the filter delay removed.
pub fn resample(
    samples: &[f32],
    source_rate: u32,
    target_rate: u32,
) -> Result<Vec<f32>, AudioIoError> {
    if source_rate == target_rate || samples.is_empty() {
        return Ok(samples.to_vec());
    }
    let err = |e: &dyn std::fmt::Display| AudioIoError::Resample(e.to_string());
    let chunk = 1024;
    let mut resampler =
        FftFixedIn::<f32>::new(source_rate as usize, target_rate as usize, chunk, 2, 1)
            .map_err(|e| err(&e))?;
    let expected =
        (samples.len() as f64 * f64::from(target_rate) / f64::from(source_rate)).round() as usize;
    let delay = resampler.output_delay();
    let mut out: Vec<f32> = Vec::with_capacity(expected + delay + chunk);

    let mut pos = 0;
    while pos < samples.len() {
        let need = resampler.input_frames_next();
        let end = (pos + need).min(samples.len());
        let block = if end - pos == need {
            resampler.process(&[&samples[pos..end]], None)
        } else {
            resampler.process_partial(Some(&[&samples[pos..end]]), None)
        }
        .map_err(|e| err(&e))?;
        out.extend_from_slice(&block[0]);
        pos = end;
    }
    while out.len() < expected + delay {
        let block = resampler
            .process_partial::<&[f32]>(None, None)
            .map_err(|e| err(&e))?;
        out.extend_from_slice(&block[0]);
    }
    Ok(out[delay..delay + expected].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcm16_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let samples: Vec<f32> = (0..480).map(|i| ((i as f32) * 0.05).sin() * 0.5).collect();
        write_wav_pcm16(&path, &samples, 48_000).unwrap();
        let back = read_wav(&path).unwrap();
        assert_eq!(back.sample_rate, 48_000);
        assert_eq!(back.samples.len(), samples.len());
        for (a, b) in samples.iter().zip(&back.samples) {
            assert!((a - b).abs() < 1.0 / 16_000.0);
        }
    }

    #[test]
    fn resample_keeps_frequency_and_length() {
        let sr_in = 44_100;
        let n = 44_100;
        let tone: Vec<f32> = (0..n)
            .map(|i| (std::f32::consts::TAU * 1000.0 * i as f32 / sr_in as f32).sin())
            .collect();
        let out = resample(&tone, sr_in, 48_000).unwrap();
        assert_eq!(out.len(), 48_000);
        // Compare against the ideal tone away from the edges.
        for i in 2000..46_000 {
            let ideal = (std::f32::consts::TAU * 1000.0 * i as f32 / 48_000.0).sin();
            assert!(
                (out[i] - ideal).abs() < 0.01,
                "sample {i}: {} vs {ideal}",
                out[i]
            );
        }
    }
}
