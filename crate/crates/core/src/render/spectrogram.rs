//! Fixed-size spectrogram images.
//!
//! STFT with a 1024-sample Hann window and 512-sample hop. Magnitudes are
//! scaled so a full-scale sine peaks at 0 dB, floored at -80 dB and mapped
//! linearly onto [0, 1]. The frame x bin matrix is then area-averaged to
//! 480 columns (time) by 320 rows (frequency). Row `r` counted from the
//! bottom covers the linear band `[75 r, 75 (r + 1))` Hz.

use std::io::{Read, Write};
use std::path::Path;

use rustfft::{num_complex::Complex, FftPlanner};

use super::RenderError;
use crate::soundbank::SAMPLE_RATE;

pub const IMAGE_WIDTH: usize = 480;
pub const IMAGE_HEIGHT: usize = 320;
pub const WINDOW_SIZE: usize = 1024;
pub const HOP_SIZE: usize = 512;
pub const DB_FLOOR: f64 = -80.0;
pub const RAW_MAGIC: &[u8; 8] = b"CLRSPEC1";

const BINS: usize = WINDOW_SIZE / 2 + 1;

/// Grayscale image in [0, 1], stored top row first (highest frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramImage {
    values: Vec<f32>,
}

impl SpectrogramImage {
    pub fn width(&self) -> usize {
        IMAGE_WIDTH
    }

    pub fn height(&self) -> usize {
        IMAGE_HEIGHT
    }

    /// Row-major values, row 0 at the top.
    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// Pixel at time column `col` and frequency row `row` counted from the bottom.
    pub fn at(&self, col: usize, row_from_bottom: usize) -> f32 {
        self.values[(IMAGE_HEIGHT - 1 - row_from_bottom) * IMAGE_WIDTH + col]
    }

    /// Frequency band `[lo, hi)` in Hz covered by a row counted from the bottom.
    pub fn row_band_hz(row_from_bottom: usize) -> (f64, f64) {
        let width = nyquist() / IMAGE_HEIGHT as f64;
        (
            row_from_bottom as f64 * width,
            (row_from_bottom + 1) as f64 * width,
        )
    }

    /// Row (from the bottom) with the largest value in a time column.
    pub fn peak_row(&self, col: usize) -> usize {
        (0..IMAGE_HEIGHT)
            .max_by(|a, b| self.at(col, *a).total_cmp(&self.at(col, *b)))
            .unwrap_or(0)
    }

    pub fn to_gray8(&self) -> Vec<u8> {
        self.values
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }

    pub fn write_png(&self, path: &Path) -> Result<(), RenderError> {
        let file = std::fs::File::create(path).map_err(|e| RenderError::io(path, e))?;
        let mut encoder = png::Encoder::new(
            std::io::BufWriter::new(file),
            IMAGE_WIDTH as u32,
            IMAGE_HEIGHT as u32,
        );
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| RenderError::Encode(e.to_string()))?;
        writer
            .write_image_data(&self.to_gray8())
            .map_err(|e| RenderError::Encode(e.to_string()))?;
        writer
            .finish()
            .map_err(|e| RenderError::Encode(e.to_string()))
    }

    /// 16-byte header (`CLRSPEC1`, u32 height, u32 width, little endian)
    /// followed by row-major f32 values.
    pub fn to_raw_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.values.len());
        out.extend_from_slice(RAW_MAGIC);
        out.extend_from_slice(&(IMAGE_HEIGHT as u32).to_le_bytes());
        out.extend_from_slice(&(IMAGE_WIDTH as u32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_raw_bytes(bytes: &[u8]) -> Result<Self, RenderError> {
        let bad = |m: &str| RenderError::Decode(m.to_string());
        if bytes.len() < 16 || &bytes[..8] != RAW_MAGIC {
            return Err(bad("missing CLRSPEC1 header"));
        }
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let width = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        if (height, width) != (IMAGE_HEIGHT, IMAGE_WIDTH) {
            return Err(bad(&format!("unexpected dimensions {height}x{width}")));
        }
        let body = &bytes[16..];
        if body.len() != 4 * height * width {
            return Err(bad("truncated body"));
        }
        let values = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(SpectrogramImage { values })
    }

    pub fn write_raw(&self, path: &Path) -> Result<(), RenderError> {
        let mut f = std::fs::File::create(path).map_err(|e| RenderError::io(path, e))?;
        f.write_all(&self.to_raw_bytes())
            .map_err(|e| RenderError::io(path, e))
    }

    pub fn read_raw(path: &Path) -> Result<Self, RenderError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| RenderError::io(path, e))?;
        Self::from_raw_bytes(&bytes)
    }
}

fn nyquist() -> f64 {
    f64::from(SAMPLE_RATE) / 2.0
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// STFT magnitudes, one row of 513 bins per frame, scaled so that a
/// full-scale sinusoid centred on a bin has magnitude 1.
pub fn stft_magnitudes(waveform: &[f32]) -> Result<Vec<Vec<f64>>, RenderError> {
    if waveform.len() < WINDOW_SIZE {
        return Err(RenderError::InvalidArgument(format!(
            "waveform of {} samples is shorter than one {WINDOW_SIZE}-sample window",
            waveform.len()
        )));
    }
    let window = hann(WINDOW_SIZE);
    let norm = 2.0 / window.iter().sum::<f64>();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(WINDOW_SIZE);
    let frames = 1 + (waveform.len() - WINDOW_SIZE) / HOP_SIZE;
    let mut buf = vec![Complex::new(0.0, 0.0); WINDOW_SIZE];
    let mut out = Vec::with_capacity(frames);
    for f in 0..frames {
        let start = f * HOP_SIZE;
        for (i, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(f64::from(waveform[start + i]) * window[i], 0.0);
        }
        fft.process(&mut buf);
        out.push(buf[..BINS].iter().map(|c| c.norm() * norm).collect());
    }
    Ok(out)
}

fn to_unit(magnitude: f64) -> f64 {
    let db = if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    };
    ((db - DB_FLOOR) / -DB_FLOOR).clamp(0.0, 1.0)
}

/// Area-averaging weights from source intervals onto destination intervals.
/// Both edge lists are increasing; weights of each destination sum to 1.
fn area_weights(src_edges: &[f64], dst_edges: &[f64]) -> Vec<Vec<(usize, f64)>> {
    let mut out = Vec::with_capacity(dst_edges.len() - 1);
    let mut first = 0;
    for d in dst_edges.windows(2) {
        let (lo, hi) = (d[0], d[1]);
        while first + 1 < src_edges.len() - 1 && src_edges[first + 1] <= lo {
            first += 1;
        }
        let mut weights = Vec::new();
        let mut s = first;
        while s < src_edges.len() - 1 && src_edges[s] < hi {
            let overlap = src_edges[s + 1].min(hi) - src_edges[s].max(lo);
            if overlap > 0.0 {
                weights.push((s, overlap));
            }
            s += 1;
        }
        let total: f64 = weights.iter().map(|w| w.1).sum();
        for w in &mut weights {
            w.1 /= total;
        }
        out.push(weights);
    }
    out
}

pub fn spectrogram(waveform: &[f32]) -> Result<SpectrogramImage, RenderError> {
    let frames = stft_magnitudes(waveform)?;
    let n_frames = frames.len();

    let time_src: Vec<f64> = (0..=n_frames).map(|i| i as f64).collect();
    let time_dst: Vec<f64> = (0..=IMAGE_WIDTH)
        .map(|c| c as f64 * n_frames as f64 / IMAGE_WIDTH as f64)
        .collect();
    let bin_hz = f64::from(SAMPLE_RATE) / WINDOW_SIZE as f64;
    let mut freq_src: Vec<f64> = Vec::with_capacity(BINS + 1);
    freq_src.push(0.0);
    freq_src.extend((0..BINS - 1).map(|k| (k as f64 + 0.5) * bin_hz));
    freq_src.push(nyquist());
    let freq_dst: Vec<f64> = (0..=IMAGE_HEIGHT)
        .map(|r| r as f64 * nyquist() / IMAGE_HEIGHT as f64)
        .collect();

    let time_w = area_weights(&time_src, &time_dst);
    let freq_w = area_weights(&freq_src, &freq_dst);

    // Time first: 480 columns of 513 bins in the unit scale.
    let columns: Vec<Vec<f64>> = time_w
        .iter()
        .map(|weights| {
            let mut col = vec![0.0; BINS];
            for &(f, w) in weights {
                for (c, m) in col.iter_mut().zip(&frames[f]) {
                    *c += w * to_unit(*m);
                }
            }
            col
        })
        .collect();

    let mut values = vec![0f32; IMAGE_WIDTH * IMAGE_HEIGHT];
    for (c, col) in columns.iter().enumerate() {
        for (r, weights) in freq_w.iter().enumerate() {
            let v: f64 = weights.iter().map(|&(k, w)| w * col[k]).sum();
            values[(IMAGE_HEIGHT - 1 - r) * IMAGE_WIDTH + c] = v.clamp(0.0, 1.0) as f32;
        }
    }
    Ok(SpectrogramImage { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, amplitude: f32, len: usize) -> Vec<f32> {
        (0..len)
            .map(|i| {
                amplitude
                    * (std::f64::consts::TAU * freq * i as f64 / f64::from(SAMPLE_RATE)).sin()
                        as f32
            })
            .collect()
    }

    #[test]
    fn dimensions_and_silence() {
        let img = spectrogram(&vec![0.0; 2_400_000]).unwrap();
        assert_eq!((img.width(), img.height()), (480, 320));
        assert_eq!(img.values().len(), 480 * 320);
        assert!(img.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn short_input_rejected() {
        assert!(matches!(
            spectrogram(&[0.0; 1023]),
            Err(RenderError::InvalidArgument(_))
        ));
        assert!(spectrogram(&[0.0; 1024]).is_ok());
    }

    #[test]
    fn frame_count() {
        assert_eq!(stft_magnitudes(&vec![0.0; 2_400_000]).unwrap().len(), 4686);
    }

    #[test]
    fn full_scale_sine_is_zero_db() {
        // 750 Hz sits exactly on bin 16.
        let m = stft_magnitudes(&sine(750.0, 1.0, 4096)).unwrap();
        assert!((m[2][16] - 1.0).abs() < 1e-3, "{}", m[2][16]);
    }

    #[test]
    fn pure_tone_peak_row() {
        for f in [100.0, 440.0, 1000.0, 5000.0, 15_000.0, 23_000.0] {
            let img = spectrogram(&sine(f, 0.5, 96_000)).unwrap();
            for col in [10, 240, 470] {
                let row = img.peak_row(col);
                let (lo, hi) = SpectrogramImage::row_band_hz(row);
                let centre = (lo + hi) / 2.0;
                assert!((centre - f).abs() <= 75.0, "{f} Hz -> row {row}");
            }
        }
        let img = spectrogram(&sine(440.0, 0.5, 96_000)).unwrap();
        assert_eq!(img.peak_row(100), (440.0f64 / 75.0).floor() as usize);
    }

    #[test]
    fn values_in_unit_range() {
        let noise: Vec<f32> = (0..50_000)
            .map(|i| (((i * 2_654_435_761u64) % 1000) as f32 / 500.0) - 1.0)
            .collect();
        let img = spectrogram(&noise).unwrap();
        assert!(img.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn scaled_copies_have_monotone_energy() {
        let base = sine(1234.0, 0.1, 20_000);
        let energy = |g: f32| -> f64 {
            let scaled: Vec<f32> = base.iter().map(|x| x * g).collect();
            stft_magnitudes(&scaled)
                .unwrap()
                .iter()
                .flatten()
                .map(|m| m * m)
                .sum()
        };
        let e: Vec<f64> = [0.1, 0.5, 1.0, 2.0, 8.0]
            .iter()
            .map(|g| energy(*g))
            .collect();
        assert!(e.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn raw_round_trip() {
        let img = spectrogram(&sine(3000.0, 0.3, 48_000)).unwrap();
        let bytes = img.to_raw_bytes();
        assert_eq!(&bytes[..8], b"CLRSPEC1");
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 320);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 480);
        assert_eq!(bytes.len(), 16 + 4 * 480 * 320);
        assert_eq!(SpectrogramImage::from_raw_bytes(&bytes).unwrap(), img);
    }

    #[test]
    fn png_is_gray8() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.png");
        let img = spectrogram(&sine(3000.0, 0.3, 48_000)).unwrap();
        img.write_png(&path).unwrap();
        let decoder =
            png::Decoder::new(std::io::BufReader::new(std::fs::File::open(&path).unwrap()));
        let reader = decoder.read_info().unwrap();
        let info = reader.info();
        assert_eq!((info.width, info.height), (480, 320));
        assert_eq!(info.color_type, png::ColorType::Grayscale);
        assert_eq!(info.bit_depth, png::BitDepth::Eight);
    }

    #[test]
    fn area_weights_conserve_mass() {
        let src: Vec<f64> = (0..=7).map(f64::from).collect();
        let dst = [0.0, 2.5, 7.0];
        let w = area_weights(&src, &dst);
        assert_eq!(w[0], vec![(0, 0.4), (1, 0.4), (2, 0.2)]);
        let total: f64 = w[1].iter().map(|x| x.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
