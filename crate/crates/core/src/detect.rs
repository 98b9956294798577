//! Onset detection of pressure steps and inlet/outlet event pairing.
//!
//! Noise scale comes from the finest decimated details,
//! `σ̂ = median(|d₁|)/0.6745`, and the detection threshold is the universal
//! threshold `τ = λ·σ̂·sqrt(2·ln n)`. Steps are searched for in the
//! undecimated details of the configured level, where a step of height `s`
//! shows up as a lobe spanning several consecutive coefficients (peak
//! `s·2^(J/2−1)` for Haar) while white noise keeps unit variance. An onset
//! needs `persistence` consecutive same-sign exceedances; its sample index is
//! the lobe peak plus the filter's step-response offset. A candidate is kept
//! only if the median level across it moves by at least `min_step_sigma·σ̂`
//! in the same direction, which rejects noise bursts that are not steps.

use serde::{Deserialize, Serialize};

use crate::domain::TimeSeries;
use crate::wavelet::{dwt, equivalent_detail_filter, max_levels, undecimated_details, Wavelet};
use crate::{Error, Result};

/// MAD-to-σ factor for Gaussian noise.
pub const MAD_TO_SIGMA: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    pub wavelet: Wavelet,
    /// Detail level searched for step lobes.
    pub levels: usize,
    /// Threshold multiplier λ.
    pub lambda: f64,
    /// Consecutive same-sign exceedances required for an onset.
    pub persistence: usize,
    /// Threshold floor relative to `max|x|`, keeps rounding residue of
    /// noiseless signals below threshold.
    pub relative_floor: f64,
    /// Smallest confirmed level change, in units of σ̂; 0 disables the check.
    pub min_step_sigma: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            wavelet: Wavelet::Haar,
            levels: 4,
            lambda: 1.0,
            persistence: 2,
            relative_floor: 1e-9,
            min_step_sigma: 1.0,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::invalid("detection levels must be >= 1"));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid(format!("lambda must be > 0 (got {})", self.lambda)));
        }
        if self.persistence == 0 {
            return Err(Error::invalid("persistence must be >= 1"));
        }
        if !(self.relative_floor.is_finite() && self.relative_floor >= 0.0) {
            return Err(Error::invalid("relative_floor must be >= 0"));
        }
        if !(self.min_step_sigma.is_finite() && self.min_step_sigma >= 0.0) {
            return Err(Error::invalid("min_step_sigma must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Drop,
    Rise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetEvent {
    pub station_id: String,
    pub onset_time_s: f64,
    /// Sample index of the first post-step sample.
    pub sample_index: usize,
    pub polarity: Polarity,
    /// Peak detail magnitude over the noise scale.
    pub strength: f64,
}

/// Robust noise estimate from the finest details that see only original
/// samples (no padding, no wrap-around).
pub fn noise_scale(values: &[f64], wavelet: Wavelet) -> Result<f64> {
    let dec = dwt(values, wavelet, 1)?;
    let taps = wavelet.filter_len();
    let interior = if values.len() >= taps {
        (values.len() - taps) / 2 + 1
    } else {
        0
    };
    let coeffs = &dec.detail_coeffs[0];
    let used = if interior > 0 { &coeffs[..interior] } else { &coeffs[..] };
    let mut mags: Vec<f64> = used.iter().map(|d| d.abs()).collect();
    Ok(median(&mut mags) / MAD_TO_SIGMA)
}

fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Offset from a window start to the step position that maximizes the
/// filter's step response, and the coefficient sign a drop produces there.
fn step_response_peak(filter: &[f64]) -> (usize, f64) {
    // A unit drop at position p gives, at window start p − m, the
    // coefficient −Σ_{k ≥ m} filter[k].
    let mut best = (1, 0.0_f64);
    let mut tail: f64 = filter.iter().sum();
    for m in 1..filter.len() {
        tail -= filter[m - 1];
        let response = -tail;
        if response.abs() > best.1.abs() {
            best = (m, response);
        }
    }
    (best.0, best.1.signum())
}

/// Detects step onsets in one pressure channel.
pub fn detect_onsets(signal: &TimeSeries, config: &DetectionConfig) -> Result<Vec<OnsetEvent>> {
    config.validate()?;
    let x = signal.values();
    let n = x.len();
    if n < 8 {
        return Err(Error::invalid(format!("onset detection needs >= 8 samples (got {n})")));
    }
    let max = max_levels(n);
    let filter = equivalent_detail_filter(config.wavelet, config.levels);
    if config.levels > max || filter.len() > n {
        return Err(Error::TooManyLevels {
            levels: config.levels,
            length: n,
            max,
        });
    }

    let sigma = noise_scale(x, config.wavelet)?;
    let universal = (2.0 * (n as f64).ln()).sqrt();
    let peak_abs = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor_scale = config.relative_floor * peak_abs / (config.lambda * universal);
    let scale = sigma.max(floor_scale);
    if scale == 0.0 {
        // All-zero signal.
        return Ok(Vec::new());
    }
    let tau = config.lambda * scale * universal;

    let w = undecimated_details(x, config.wavelet, config.levels);
    let (offset, drop_sign) = step_response_peak(&filter);
    let confirm_window = 4 * filter.len();
    let exceeds = |i: usize, sign: f64| w[i].abs() > tau && w[i].signum() == sign;

    let mut events = Vec::new();
    let mut i = 0;
    while i < w.len() {
        if w[i].abs() <= tau {
            i += 1;
            continue;
        }
        let sign = w[i].signum();
        let mut end = i;
        while end + 1 < w.len() && exceeds(end + 1, sign) {
            end += 1;
        }
        if end + 1 - i < config.persistence {
            i = end + 1;
            continue;
        }
        // The lobe found first may be a side lobe; the main lobe of the same
        // step lies within one filter length.
        let search_end = (i + filter.len() - 1).min(w.len() - 1).max(end);
        let peak = (i..=search_end)
            .max_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs()))
            .expect("non-empty range");
        let index = (peak + offset).min(n - 1);
        let polarity = if w[peak].signum() == drop_sign {
            Polarity::Drop
        } else {
            Polarity::Rise
        };
        i = (end + 1).max(peak + offset);
        if config.min_step_sigma > 0.0 {
            let h = step_height(signal, index, confirm_window);
            let needed = config.min_step_sigma * scale;
            let confirmed = match polarity {
                Polarity::Drop => h <= -needed,
                Polarity::Rise => h >= needed,
            };
            if !confirmed {
                continue;
            }
        }
        events.push(OnsetEvent {
            station_id: signal.station_id().to_string(),
            onset_time_s: signal.time_at(index),
            sample_index: index,
            polarity,
            strength: w[peak].abs() / scale,
        });
    }
    Ok(events)
}

/// Step height at `index`: median of the samples after minus median of the
/// samples before, each over at most `half_window` samples. Negative for a
/// drop.
pub fn step_height(signal: &TimeSeries, index: usize, half_window: usize) -> f64 {
    let x = signal.values();
    let index = index.min(x.len() - 1);
    let before_start = index.saturating_sub(half_window);
    let after_end = (index + half_window).min(x.len());
    let mut before: Vec<f64> = x[before_start..index].to_vec();
    let mut after: Vec<f64> = x[index..after_end].to_vec();
    if before.is_empty() || after.is_empty() {
        return 0.0;
    }
    median(&mut after) - median(&mut before)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pairing {
    pub pairs: Vec<(OnsetEvent, OnsetEvent)>,
    pub unpaired_inlet: Vec<OnsetEvent>,
    pub unpaired_outlet: Vec<OnsetEvent>,
}

/// Greedy chronological matching: each inlet event, earliest first, takes
/// the nearest unmatched outlet event of the same polarity within
/// `max_lag_s`.
pub fn pair_events(inlet_events: &[OnsetEvent], outlet_events: &[OnsetEvent], max_lag_s: f64) -> Pairing {
    let mut inlet: Vec<&OnsetEvent> = inlet_events.iter().collect();
    inlet.sort_by(|a, b| a.onset_time_s.total_cmp(&b.onset_time_s));
    let mut outlet: Vec<&OnsetEvent> = outlet_events.iter().collect();
    outlet.sort_by(|a, b| a.onset_time_s.total_cmp(&b.onset_time_s));
    let mut taken = vec![false; outlet.len()];

    let mut out = Pairing::default();
    for ev in inlet {
        let best = outlet
            .iter()
            .enumerate()
            .filter(|(j, o)| {
                !taken[*j]
                    && o.polarity == ev.polarity
                    && (o.onset_time_s - ev.onset_time_s).abs() <= max_lag_s
            })
            .min_by(|(_, a), (_, b)| {
                let da = (a.onset_time_s - ev.onset_time_s).abs();
                let db = (b.onset_time_s - ev.onset_time_s).abs();
                da.total_cmp(&db)
            })
            .map(|(j, _)| j);
        match best {
            Some(j) => {
                taken[j] = true;
                out.pairs.push((ev.clone(), outlet[j].clone()));
            }
            None => out.unpaired_inlet.push(ev.clone()),
        }
    }
    out.unpaired_outlet = outlet
        .iter()
        .zip(&taken)
        .filter(|(_, &t)| !t)
        .map(|(o, _)| (*o).clone())
        .collect();
    out
}
