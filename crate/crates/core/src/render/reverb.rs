//! Synthetic room reverberation.
//!
//! The impulse response is a unit direct-path impulse followed by Gaussian
//! noise under an exponential envelope that loses 60 dB of energy at RT60.
//! The tail is cut at 1.5 x RT60.

use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};

use super::RenderError;
use crate::rng::rng_from;
use crate::scene::{MAX_REVERB_MS, MIN_REVERB_MS};
use crate::soundbank::SAMPLE_RATE;

/// Amplitude of the reverberant tail relative to the direct path.
pub const TAIL_GAIN: f64 = 0.03;
const IR_LENGTH_FACTOR: f64 = 1.5;
/// ln(10^3): amplitude decay exponent reaching -60 dB at t = RT60.
const LN_1000: f64 = 6.907_755_278_982_137;

fn check_rt60(rt60_ms: f64) -> Result<(), RenderError> {
    if !(MIN_REVERB_MS..=MAX_REVERB_MS).contains(&rt60_ms) {
        return Err(RenderError::InvalidArgument(format!(
            "rt60 {rt60_ms} ms outside [{MIN_REVERB_MS}, {MAX_REVERB_MS}]"
        )));
    }
    Ok(())
}

pub fn impulse_response(rt60_ms: f64, seed: u64) -> Result<Vec<f64>, RenderError> {
    check_rt60(rt60_ms)?;
    let sr = f64::from(SAMPLE_RATE);
    let rt60_s = rt60_ms / 1000.0;
    let len = (IR_LENGTH_FACTOR * rt60_s * sr).round() as usize;
    let decay = LN_1000 / (rt60_s * sr);
    let mut rng = rng_from(seed);
    let mut ir = Vec::with_capacity(len);
    ir.push(1.0);
    for n in 1..len {
        let noise: f64 = StandardNormal.sample(&mut rng);
        ir.push(TAIL_GAIN * noise * (-decay * n as f64).exp());
    }
    Ok(ir)
}

/// Convolves with a fresh impulse response; output has the input's length.
pub fn apply_reverb(waveform: &[f32], rt60_ms: f64, seed: u64) -> Result<Vec<f32>, RenderError> {
    let ir = impulse_response(rt60_ms, seed)?;
    let input: Vec<f64> = waveform.iter().map(|&x| f64::from(x)).collect();
    Ok(convolve_truncated(&input, &ir)
        .into_iter()
        .map(|x| x as f32)
        .collect())
}

/// Overlap-add FFT convolution keeping the first `signal.len()` outputs.
pub fn convolve_truncated(signal: &[f64], kernel: &[f64]) -> Vec<f64> {
    let n = signal.len();
    if n == 0 || kernel.is_empty() {
        return vec![0.0; n];
    }
    let fft_size = (2 * kernel.len()).next_power_of_two().max(4096);
    let block = fft_size - kernel.len() + 1;
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(fft_size);
    let inverse = planner.plan_fft_inverse(fft_size);

    let mut kernel_spec: Vec<Complex<f64>> = kernel.iter().map(|&h| Complex::new(h, 0.0)).collect();
    kernel_spec.resize(fft_size, Complex::new(0.0, 0.0));
    forward.process(&mut kernel_spec);

    let scale = 1.0 / fft_size as f64;
    let mut out = vec![0.0; n];
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
    let mut start = 0;
    while start < n {
        let end = (start + block).min(n);
        buf.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
        for (b, &x) in buf.iter_mut().zip(&signal[start..end]) {
            b.re = x;
        }
        forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&kernel_spec) {
            *b *= k;
        }
        inverse.process(&mut buf);
        let valid = (n - start).min(fft_size);
        for (o, b) in out[start..start + valid].iter_mut().zip(&buf) {
            *o += b.re * scale;
        }
        start = end;
    }
    out
}
