//! Brightness and loudness labelling from a waveform.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use super::attributes::{Brightness, Loudness};
use super::{SoundError, SAMPLE_RATE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotationConfig {
    /// Centroid strictly above this is bright.
    pub brightness_threshold_hz: f64,
    /// RMS level (20 log10 rms) strictly above this is loud.
    pub loudness_threshold_dbfs: f64,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        Self {
            brightness_threshold_hz: 1200.0,
            loudness_threshold_dbfs: -15.0,
        }
    }
}

/// Magnitude-weighted mean frequency of the Hann-windowed waveform.
///
/// The whole signal is one zero-padded FFT frame. Returns `None` for an
/// empty or all-zero signal.
pub fn spectral_centroid<T: Copy + Into<f64>>(waveform: &[T]) -> Option<f64> {
    let n = waveform.len();
    if n == 0 {
        return None;
    }
    let size = n.next_power_of_two().max(2);
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let mut buf: Vec<Complex<f64>> = waveform
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let w = if n > 1 {
                0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / denom).cos()
            } else {
                1.0
            };
            Complex::new((*x).into() * w, 0.0)
        })
        .collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(size).process(&mut buf);

    let bin_hz = f64::from(SAMPLE_RATE) / size as f64;
    let (num, den) = buf[..=size / 2]
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(num, den), (k, c)| {
            let m = c.norm();
            (num + m * k as f64 * bin_hz, den + m)
        });
    (den > 0.0).then(|| num / den)
}

pub fn rms<T: Copy + Into<f64>>(waveform: &[T]) -> Option<f64> {
    if waveform.is_empty() {
        return None;
    }
    let sum: f64 = waveform.iter().map(|x| (*x).into().powi(2)).sum();
    let r = (sum / waveform.len() as f64).sqrt();
    (r > 0.0).then_some(r)
}

pub fn rms_dbfs<T: Copy + Into<f64>>(waveform: &[T]) -> Option<f64> {
    rms(waveform).map(|r| 20.0 * r.log10())
}

pub fn annotate_brightness<T: Copy + Into<f64>>(
    waveform: &[T],
    cfg: &AnnotationConfig,
) -> Result<Brightness, SoundError> {
    let centroid =
        spectral_centroid(waveform).ok_or(SoundError::UndefinedAttribute("brightness"))?;
    Ok(if centroid > cfg.brightness_threshold_hz {
        Brightness::Bright
    } else {
        Brightness::Dark
    })
}

pub fn annotate_loudness<T: Copy + Into<f64>>(
    waveform: &[T],
    cfg: &AnnotationConfig,
) -> Result<Loudness, SoundError> {
    let level = rms_dbfs(waveform).ok_or(SoundError::UndefinedAttribute("loudness"))?;
    Ok(if level > cfg.loudness_threshold_dbfs {
        Loudness::Loud
    } else {
        Loudness::Quiet
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, amplitude: f64, seconds: f64) -> Vec<f64> {
        let n = (seconds * f64::from(SAMPLE_RATE)) as usize;
        (0..n)
            .map(|i| {
                amplitude * (std::f64::consts::TAU * freq * i as f64 / f64::from(SAMPLE_RATE)).sin()
            })
            .collect()
    }

    #[test]
    fn centroid_of_sine_is_its_frequency() {
        for f in [200.0, 1000.0, 4000.0] {
            let c = spectral_centroid(&sine(f, 0.5, 1.0)).unwrap();
            assert!((c - f).abs() < 5.0, "{f} -> {c}");
        }
    }

    #[test]
    fn brightness_labels() {
        let cfg = AnnotationConfig::default();
        assert_eq!(
            annotate_brightness(&sine(200.0, 0.5, 1.0), &cfg).unwrap(),
            Brightness::Dark
        );
        assert_eq!(
            annotate_brightness(&sine(4000.0, 0.5, 1.0), &cfg).unwrap(),
            Brightness::Bright
        );
        assert!(matches!(
            annotate_brightness(&[0.0f64; 512], &cfg),
            Err(SoundError::UndefinedAttribute(_))
        ));
    }

    #[test]
    fn brightness_tie_is_dark() {
        let c = spectral_centroid(&sine(1000.0, 0.5, 1.0)).unwrap();
        let cfg = AnnotationConfig {
            brightness_threshold_hz: c,
            ..AnnotationConfig::default()
        };
        assert_eq!(
            annotate_brightness(&sine(1000.0, 0.5, 1.0), &cfg).unwrap(),
            Brightness::Dark
        );
    }

    #[test]
    fn loudness_labels() {
        let cfg = AnnotationConfig::default();
        // A sine with rms r has amplitude r * sqrt(2).
        let amp = |db: f64| 10f64.powf(db / 20.0) * 2f64.sqrt();
        let loud = sine(440.0, amp(-9.0), 1.0);
        let quiet = sine(440.0, amp(-21.0), 1.0);
        assert!((rms_dbfs(&loud).unwrap() + 9.0).abs() < 0.01);
        assert_eq!(annotate_loudness(&loud, &cfg).unwrap(), Loudness::Loud);
        assert_eq!(annotate_loudness(&quiet, &cfg).unwrap(), Loudness::Quiet);
        assert!(annotate_loudness(&[0.0f32; 100], &cfg).is_err());
    }

    #[test]
    fn loudness_tie_is_quiet() {
        let wave = sine(440.0, 0.3, 1.0);
        let cfg = AnnotationConfig {
            loudness_threshold_dbfs: rms_dbfs(&wave).unwrap(),
            ..AnnotationConfig::default()
        };
        assert_eq!(annotate_loudness(&wave, &cfg).unwrap(), Loudness::Quiet);
    }
}
