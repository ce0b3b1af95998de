//! Welch-averaged power spectral density estimation.
//!
//! Hann-windowed, overlapped periodograms of a real, uniformly sampled
//! record. Densities are two-sided and reported on the non-negative
//! frequency half-axis in angular units `omega_k = 2 pi k / (L dt)`, scaled
//! so that white noise of density `S` (per-sample variance `S/dt`) reads `S`
//! flat, matching the cavity output-spectrum convention where vacuum sits at
//! 1/2.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::cavity::SpectrumGrid;
use crate::error::invalid;
use crate::{Error, Result};

/// Shared plan for accumulating Welch periodograms.
#[derive(Clone)]
pub struct WelchSpec {
    segment_length: usize,
    step: usize,
    window: Arc<Vec<f64>>,
    window_power: f64,
    fft: Arc<dyn Fft<f64>>,
    dt: f64,
}

impl WelchSpec {
    /// `overlap` is the fraction of a segment shared with its successor
    /// (0.5 is the usual choice for Hann windows).
    pub fn new(segment_length: usize, overlap: f64, dt: f64) -> Result<Self> {
        if segment_length < 8 {
            return Err(invalid(format!(
                "segment length must be >= 8, got {segment_length}"
            )));
        }
        if !(0.0..1.0).contains(&overlap) {
            return Err(invalid(format!(
                "overlap must lie in [0, 1), got {overlap}"
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid(format!("dt must be positive, got {dt}")));
        }
        let window = hann(segment_length);
        let window_power = window.iter().map(|w| w * w).sum();
        let step = ((segment_length as f64 * (1.0 - overlap)).round() as usize).max(1);
        let fft = FftPlanner::new().plan_fft_forward(segment_length);
        Ok(Self {
            segment_length,
            step,
            window: Arc::new(window),
            window_power,
            fft,
            dt,
        })
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    /// Number of one-sided output bins, `L/2 + 1`.
    pub fn n_bins(&self) -> usize {
        self.segment_length / 2 + 1
    }

    /// Angular frequency of each output bin.
    pub fn omegas(&self) -> Vec<f64> {
        let domega = 2.0 * std::f64::consts::PI / (self.segment_length as f64 * self.dt);
        (0..self.n_bins()).map(|k| k as f64 * domega).collect()
    }

    /// Add every full segment of `samples` into `accum` (length [`Self::n_bins`]),
    /// returning the number of segments consumed.
    pub fn accumulate(&self, samples: &[f64], accum: &mut [f64]) -> usize {
        assert_eq!(accum.len(), self.n_bins());
        if samples.len() < self.segment_length {
            return 0;
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.segment_length];
        let mut n_segments = 0;
        let mut start = 0;
        while start + self.segment_length <= samples.len() {
            for (b, (s, w)) in buf.iter_mut().zip(
                samples[start..start + self.segment_length]
                    .iter()
                    .zip(self.window.iter()),
            ) {
                *b = Complex::new(s * w, 0.0);
            }
            self.fft.process(&mut buf);
            for (a, b) in accum.iter_mut().zip(buf.iter().take(self.n_bins())) {
                *a += b.norm_sqr();
            }
            n_segments += 1;
            start += self.step;
        }
        n_segments
    }

    /// Convert an accumulator into the averaged density grid.
    pub fn spectrum(&self, accum: &[f64], n_segments: usize) -> Result<SpectrumGrid> {
        if n_segments == 0 {
            return Err(Error::InsufficientData(
                "no full segment fit into the supplied records".into(),
            ));
        }
        let scale = self.dt / (self.window_power * n_segments as f64);
        let values = accum.iter().map(|a| a * scale).collect();
        SpectrumGrid::new(self.omegas(), values)
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let phase = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            0.5 * (1.0 - phase.cos())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn white_noise_reads_its_density() {
        // Density S = 0.5 means per-sample variance 0.5 / dt.
        let dt = 0.01f64;
        let density = 0.5;
        let sigma = (density / dt).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let samples: Vec<f64> = (0..1 << 20)
            .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let spec = WelchSpec::new(256, 0.5, dt).unwrap();
        let mut accum = vec![0.0; spec.n_bins()];
        let n = spec.accumulate(&samples, &mut accum);
        assert!(n > 4000);
        let grid = spec.spectrum(&accum, n).unwrap();
        for (omega, value) in grid.omegas.iter().zip(grid.values.iter()) {
            assert!(
                (value - density).abs() < 0.05 * density,
                "bin at omega {omega} reads {value}, want {density}"
            );
        }
    }

    #[test]
    fn tone_lands_in_its_bin() {
        let dt = 1.0;
        let n = 1 << 14;
        let l = 128;
        let bin = 16;
        let omega0 = 2.0 * std::f64::consts::PI * bin as f64 / (l as f64 * dt);
        let samples: Vec<f64> = (0..n).map(|i| (omega0 * i as f64 * dt).cos()).collect();
        let spec = WelchSpec::new(l, 0.5, dt).unwrap();
        let mut accum = vec![0.0; spec.n_bins()];
        let segs = spec.accumulate(&samples, &mut accum);
        let grid = spec.spectrum(&accum, segs).unwrap();
        let peak = grid
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak, bin);
    }

    #[test]
    fn overlap_increases_segment_count() {
        let samples = vec![0.0; 4096];
        let spec_none = WelchSpec::new(256, 0.0, 1.0).unwrap();
        let spec_half = WelchSpec::new(256, 0.5, 1.0).unwrap();
        let mut a = vec![0.0; spec_none.n_bins()];
        let n0 = spec_none.accumulate(&samples, &mut a);
        let mut b = vec![0.0; spec_half.n_bins()];
        let n1 = spec_half.accumulate(&samples, &mut b);
        assert!(n1 > n0);
    }

    #[test]
    fn refuses_empty_input() {
        let spec = WelchSpec::new(64, 0.5, 1.0).unwrap();
        let accum = vec![0.0; spec.n_bins()];
        assert!(spec.spectrum(&accum, 0).is_err());
    }
}
