//! Orthonormal wavelet filter banks on zero-padded, periodically extended
//! signals.
//!
//! Analysis at each level is the correlation
//!
//! ```text
//! a[k] = Σ_m h[m]·x[(2k + m) mod n]     d[k] = Σ_m g[m]·x[(2k + m) mod n]
//! ```
//!
//! with `g[m] = (−1)^m·h[N−1−m]`, so Haar details are `(x[2k] − x[2k+1])/√2`
//! and a pressure drop produces a positive detail. The periodic extension
//! keeps the transform orthogonal for every power-of-two length, which gives
//! exact energy preservation and perfect reconstruction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

const HAAR_LO: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];

// Daubechies, four vanishing moments (8 taps).
#[allow(clippy::excessive_precision)]
const DB4_LO: [f64; 8] = [
    0.230_377_813_308_896_500_86,
    0.714_846_570_552_915_647_09,
    0.630_880_767_929_858_907_88,
    -0.027_983_769_416_859_854_211,
    -0.187_034_811_719_093_084_08,
    0.030_841_381_835_560_763_627,
    0.032_883_011_666_885_199_735,
    -0.010_597_401_785_069_032_105,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Wavelet {
    #[default]
    #[serde(rename = "haar")]
    Haar,
    #[serde(rename = "db4")]
    Db4,
}

impl Wavelet {
    pub fn name(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db4 => "db4",
        }
    }

    /// Scaling (low-pass) analysis filter.
    pub fn lowpass(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR_LO,
            Wavelet::Db4 => &DB4_LO,
        }
    }

    /// Wavelet (high-pass) analysis filter, the alternating flip of the
    /// low-pass filter.
    pub fn highpass(self) -> Vec<f64> {
        let h = self.lowpass();
        let n = h.len();
        (0..n)
            .map(|m| if m % 2 == 0 { h[n - 1 - m] } else { -h[n - 1 - m] })
            .collect()
    }

    pub fn filter_len(self) -> usize {
        self.lowpass().len()
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Wavelet::Haar),
            "db4" => Ok(Wavelet::Db4),
            _ => Err(Error::UnknownWavelet(s.to_string())),
        }
    }
}

/// Multi-level decomposition. `detail_coeffs[0]` is the finest level
/// (length `padded_length/2`), the last entry the coarsest.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    pub wavelet: Wavelet,
    pub levels: usize,
    pub detail_coeffs: Vec<Vec<f64>>,
    pub approx_coeffs: Vec<f64>,
    pub original_length: usize,
    pub padded_length: usize,
}

impl WaveletDecomposition {
    pub fn padding(&self) -> usize {
        self.padded_length - self.original_length
    }

    pub fn coefficient_count(&self) -> usize {
        self.detail_coeffs.iter().map(Vec::len).sum::<usize>() + self.approx_coeffs.len()
    }

    pub fn energy(&self) -> f64 {
        self.detail_coeffs
            .iter()
            .flatten()
            .chain(self.approx_coeffs.iter())
            .map(|c| c * c)
            .sum()
    }
}

/// Largest level count a signal of `len` samples supports after padding.
pub fn max_levels(len: usize) -> usize {
    len.max(1).next_power_of_two().trailing_zeros() as usize
}

fn analysis_step(x: &[f64], lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (m, (&h, &g)) in lo.iter().zip(hi).enumerate() {
            let v = x[(2 * k + m) % n];
            a += h * v;
            d += g * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
    (approx, detail)
}

fn synthesis_step(approx: &[f64], detail: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let n = 2 * approx.len();
    let mut x = vec![0.0; n];
    for k in 0..approx.len() {
        for (m, (&h, &g)) in lo.iter().zip(hi).enumerate() {
            x[(2 * k + m) % n] += h * approx[k] + g * detail[k];
        }
    }
    x
}

/// Pyramid decomposition of `signal` over `levels` levels. The input is
/// zero-padded to the next power of two.
pub fn dwt(signal: &[f64], wavelet: Wavelet, levels: usize) -> Result<WaveletDecomposition> {
    if signal.len() < 2 {
        return Err(Error::invalid(format!(
            "dwt needs at least 2 samples (got {})",
            signal.len()
        )));
    }
    let max = max_levels(signal.len());
    if levels == 0 || levels > max {
        return Err(Error::TooManyLevels {
            levels,
            length: signal.len(),
            max,
        });
    }
    let padded_length = signal.len().next_power_of_two();
    let mut current = signal.to_vec();
    current.resize(padded_length, 0.0);

    let lo = wavelet.lowpass();
    let hi = wavelet.highpass();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analysis_step(&current, lo, &hi);
        details.push(d);
        current = a;
    }
    Ok(WaveletDecomposition {
        wavelet,
        levels,
        detail_coeffs: details,
        approx_coeffs: current,
        original_length: signal.len(),
        padded_length,
    })
}

/// Inverse of [`dwt`]; returns the padded signal.
pub fn idwt(decomposition: &WaveletDecomposition) -> Result<Vec<f64>> {
    let dec = decomposition;
    if dec.levels == 0 || dec.detail_coeffs.len() != dec.levels {
        return Err(Error::InconsistentCoefficients(format!(
            "{} levels declared, {} detail vectors present",
            dec.levels,
            dec.detail_coeffs.len()
        )));
    }
    if !dec.padded_length.is_power_of_two() || dec.original_length > dec.padded_length {
        return Err(Error::InconsistentCoefficients(format!(
            "padded length {} is not a power of two covering {} samples",
            dec.padded_length, dec.original_length
        )));
    }
    for (j, d) in dec.detail_coeffs.iter().enumerate() {
        let expected = dec.padded_length >> (j + 1);
        if d.len() != expected {
            return Err(Error::InconsistentCoefficients(format!(
                "level {} has {} details, expected {expected}",
                j + 1,
                d.len()
            )));
        }
    }
    let expected = dec.padded_length >> dec.levels;
    if dec.approx_coeffs.len() != expected || expected == 0 {
        return Err(Error::InconsistentCoefficients(format!(
            "approximation has {} coefficients, expected {expected}",
            dec.approx_coeffs.len()
        )));
    }

    let lo = dec.wavelet.lowpass();
    let hi = dec.wavelet.highpass();
    let mut current = dec.approx_coeffs.clone();
    for d in dec.detail_coeffs.iter().rev() {
        current = synthesis_step(&current, d, lo, &hi);
    }
    Ok(current)
}

/// Full convolution of two filters.
fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn upsample(filter: &[f64], factor: usize) -> Vec<f64> {
    let mut out = vec![0.0; (filter.len() - 1) * factor + 1];
    for (i, &c) in filter.iter().enumerate() {
        out[i * factor] = c;
    }
    out
}

/// Equivalent single-stage detail filter of `level` (1-based): correlating
/// it with the signal at offset `2^level·k` reproduces the decimated detail
/// `d_level[k]` away from the boundary. Unit norm for orthonormal wavelets.
pub fn equivalent_detail_filter(wavelet: Wavelet, level: usize) -> Vec<f64> {
    assert!(level >= 1, "levels are 1-based");
    let lo = wavelet.lowpass();
    let hi = wavelet.highpass();
    let mut scaling = vec![1.0];
    for j in 1..level {
        scaling = convolve(&scaling, &upsample(lo, 1 << (j - 1)));
    }
    convolve(&scaling, &upsample(&hi, 1 << (level - 1)))
}

/// Undecimated detail coefficients at one level: the equivalent detail
/// filter correlated with the signal at every shift where it fits entirely
/// inside the signal. Entry `i` covers samples `i .. i + filter_len`.
pub fn undecimated_details(signal: &[f64], wavelet: Wavelet, level: usize) -> Vec<f64> {
    let filter = equivalent_detail_filter(wavelet, level);
    if signal.len() < filter.len() {
        return Vec::new();
    }
    signal
        .windows(filter.len())
        .map(|w| w.iter().zip(&filter).map(|(x, f)| x * f).sum())
        .collect()
}
