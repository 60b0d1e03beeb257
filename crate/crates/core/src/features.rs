//! Per-window observations from raw ECG and ABP signals.
//!
//! The beat detectors here are simple stand-ins: a derivative-energy QRS
//! detector and a slope-sum pulse onset detector. Annotation files from
//! other detectors can replace them (see [`crate::io::read_annotations`]).

use crate::error::{Error, Result};
use crate::model::WindowObservation;
use crate::scoring::match_sorted;

/// Sorted beat positions in samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAnnotations {
    pub sample_indices: Vec<usize>,
    /// Sampling frequency, Hz.
    pub fs: f64,
}

impl RawAnnotations {
    pub fn new(sample_indices: Vec<usize>, fs: f64) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid(format!(
                "sampling frequency {fs} must be > 0"
            )));
        }
        if let Some(i) = sample_indices.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "annotations not strictly increasing at position {}",
                i + 1
            )));
        }
        Ok(RawAnnotations { sample_indices, fs })
    }

    pub fn empty(fs: f64) -> Self {
        RawAnnotations {
            sample_indices: Vec::new(),
            fs,
        }
    }

    pub fn len(&self) -> usize {
        self.sample_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_indices.is_empty()
    }

    /// Annotation times in seconds.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.sample_indices.iter().map(move |&s| s as f64 / self.fs)
    }

    /// Indices (into `sample_indices`) of annotations with time in `[t0, t1]`.
    fn range_in(&self, t0: f64, t1: f64) -> std::ops::Range<usize> {
        let lo = self
            .sample_indices
            .partition_point(|&s| (s as f64) < t0 * self.fs);
        let hi = self
            .sample_indices
            .partition_point(|&s| (s as f64) <= t1 * self.fs);
        lo..hi.max(lo)
    }
}

/// Tunables for heart rate, signal quality and windowing.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    /// Nominal analysis window, seconds; rounded to whole samples.
    pub window_length_s: f64,
    /// Trailing window for the local heart rate, seconds.
    pub hr_window_s: f64,
    /// Trailing window for the ECG quality index, seconds.
    pub sqi_window_s: f64,
    /// Inter-detector match tolerance for the ECG quality index, seconds.
    pub sqi_match_tol_s: f64,
    /// Threshold multiplier of the second QRS detector.
    pub secondary_threshold_scale: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window_length_s: 0.025,
            hr_window_s: 10.0,
            sqi_window_s: 10.0,
            sqi_match_tol_s: 0.15,
            secondary_threshold_scale: 1.5,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("window_length_s", self.window_length_s),
            ("hr_window_s", self.hr_window_s),
            ("sqi_window_s", self.sqi_window_s),
            ("sqi_match_tol_s", self.sqi_match_tol_s),
            ("secondary_threshold_scale", self.secondary_threshold_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name}={v} must be > 0")));
            }
        }
        Ok(())
    }

    /// Window length in whole samples at `fs`.
    pub fn window_samples(&self, fs: f64) -> Result<usize> {
        let n = (self.window_length_s * fs).round();
        if n < 1.0 {
            return Err(Error::invalid(format!(
                "window of {} s is shorter than one sample at {fs} Hz",
                self.window_length_s
            )));
        }
        Ok(n as usize)
    }
}

/// Minimum spacing between two detections of either stand-in detector.
pub const REFRACTORY_S: f64 = 0.25;

/// Gap without a QRS detection after which its levels are re-learned.
const RELEARN_S: f64 = 3.0;

fn moving_average_centered(x: &[f64], width: usize) -> Vec<f64> {
    let n = x.len();
    if n == 0 || width <= 1 {
        return x.to_vec();
    }
    let half = width / 2;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in x {
        acc += v;
        prefix.push(acc);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

fn moving_integral_trailing(x: &[f64], width: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += x[i];
        if i >= width {
            acc -= x[i - width];
        }
        out.push(acc.max(0.0) / width as f64);
    }
    out
}

/// Local maxima that dominate a neighborhood of `radius` samples.
fn dominant_peaks(x: &[f64], radius: usize) -> Vec<usize> {
    let mut peaks = Vec::new();
    let n = x.len();
    let mut i = 1;
    while i + 1 < n {
        let v = x[i];
        if v > 0.0 && v > x[i - 1] && v >= x[i + 1] {
            let lo = i.saturating_sub(radius);
            let hi = (i + radius + 1).min(n);
            if x[lo..hi].iter().all(|&u| u <= v) {
                peaks.push(i);
                i += radius.max(1);
                continue;
            }
        }
        i += 1;
    }
    peaks
}

fn validate_signal(signal: &[f64], fs: f64) -> Result<()> {
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::invalid(format!(
            "sampling frequency {fs} must be > 0"
        )));
    }
    if let Some(i) = signal.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite sample at index {i}")));
    }
    Ok(())
}

/// Derivative-energy QRS detector.
pub fn detect_qrs(signal: &[f64], fs: f64) -> Result<RawAnnotations> {
    detect_qrs_scaled(signal, fs, 1.0)
}

/// [`detect_qrs`] with its adaptive threshold multiplied by `threshold_scale`.
pub fn detect_qrs_scaled(signal: &[f64], fs: f64, threshold_scale: f64) -> Result<RawAnnotations> {
    validate_signal(signal, fs)?;
    let n = signal.len();
    if n < 8 {
        return Ok(RawAnnotations::empty(fs));
    }
    let samples = |s: f64| ((s * fs).round() as usize).max(1);

    // Band-pass: remove baseline (200 ms mean) and smooth (~20 ms).
    let baseline = moving_average_centered(signal, samples(0.2));
    let hp: Vec<f64> = signal.iter().zip(&baseline).map(|(x, b)| x - b).collect();
    let bp = moving_average_centered(&hp, samples(0.02));

    // Five-point derivative, squared, integrated over 150 ms.
    let mut energy = vec![0.0; n];
    for i in 4..n {
        let d = (2.0 * bp[i] + bp[i - 1] - bp[i - 3] - 2.0 * bp[i - 4]) / 8.0;
        energy[i] = d * d;
    }
    let mwi_width = samples(0.15);
    let mwi = moving_integral_trailing(&energy, mwi_width);

    let peaks = dominant_peaks(&mwi, samples(0.1));
    if peaks.is_empty() {
        return Ok(RawAnnotations::empty(fs));
    }

    // Initial levels from the first two seconds.
    let train_end = samples(2.0).min(n);
    let train_max = mwi[..train_end].iter().cloned().fold(0.0, f64::max);
    let train_mean = mwi[..train_end].iter().sum::<f64>() / train_end as f64;
    let mut signal_level = train_max / 3.0;
    let mut noise_level = train_mean / 2.0;

    let refractory = samples(REFRACTORY_S);
    let search_back = mwi_width + samples(0.05);
    let relearn_after = samples(RELEARN_S);
    let mut out: Vec<usize> = Vec::new();
    let mut last_event = 0usize;
    for &p in &peaks {
        let v = mwi[p];
        // Nothing accepted for a while: the levels may still reflect a
        // burst of noise. Re-learn them from the recent past.
        if p >= last_event + relearn_after {
            let lo = p.saturating_sub(train_end);
            let recent = &mwi[lo..=p];
            signal_level = recent.iter().cloned().fold(0.0, f64::max) / 3.0;
            noise_level = recent.iter().sum::<f64>() / recent.len() as f64 / 2.0;
            last_event = p;
        }
        let threshold = threshold_scale * (noise_level + 0.25 * (signal_level - noise_level));
        if v > threshold && v > 0.0 {
            // The integrator lags the QRS; locate the largest deflection.
            let lo = p.saturating_sub(search_back);
            let r = (lo..=p)
                .max_by(|&a, &b| hp[a].abs().total_cmp(&hp[b].abs()))
                .unwrap_or(p);
            match out.last() {
                Some(&last) if r < last + refractory => {
                    noise_level = 0.125 * v + 0.875 * noise_level;
                }
                _ => {
                    out.push(r);
                    last_event = p;
                    signal_level = 0.125 * v + 0.875 * signal_level;
                }
            }
        } else {
            noise_level = 0.125 * v + 0.875 * noise_level;
        }
    }
    Ok(RawAnnotations {
        sample_indices: out,
        fs,
    })
}

/// Slope-sum pulse onset detector for arterial pressure.
pub fn detect_abp_pulses(signal: &[f64], fs: f64) -> Result<RawAnnotations> {
    validate_signal(signal, fs)?;
    let n = signal.len();
    if n < 4 {
        return Ok(RawAnnotations::empty(fs));
    }
    let samples = |s: f64| ((s * fs).round() as usize).max(1);

    let smooth = moving_average_centered(signal, samples(0.032));
    let mut rise = vec![0.0; n];
    for i in 1..n {
        rise[i] = (smooth[i] - smooth[i - 1]).max(0.0);
    }
    let ssf = {
        let w = samples(0.128);
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0;
        for i in 0..n {
            acc += rise[i];
            if i >= w {
                acc -= rise[i - w];
            }
            out.push(acc.max(0.0));
        }
        out
    };

    let train_end = samples(10.0).min(n);
    let mut base = 3.0 * ssf[..train_end].iter().sum::<f64>() / train_end as f64;
    if !(base > 0.0) {
        return Ok(RawAnnotations::empty(fs));
    }

    let refractory = samples(REFRACTORY_S);
    let peak_search = samples(0.15);
    let onset_search = samples(0.25);
    let mut out: Vec<usize> = Vec::new();
    let mut i = 1;
    while i < n {
        let threshold = 0.6 * base;
        if ssf[i] >= threshold && ssf[i - 1] < threshold {
            let hi = (i + peak_search).min(n);
            let (pk, &pk_val) = ssf[i..hi]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(k, v)| (i + k, v))
                .unwrap_or((i, &ssf[i]));
            let lo = i.saturating_sub(onset_search);
            let floor = ssf[lo..=i].iter().cloned().fold(f64::INFINITY, f64::min);
            let level = floor + 0.1 * (pk_val - floor);
            let mut onset = i;
            while onset > lo && ssf[onset - 1] > level {
                onset -= 1;
            }
            let accept = out.last().is_none_or(|&last| onset >= last + refractory);
            if accept && pk_val - floor > 0.0 {
                out.push(onset);
                base = 0.75 * base + 0.25 * pk_val;
            }
            i = pk.max(i) + 1;
            continue;
        }
        i += 1;
    }
    Ok(RawAnnotations {
        sample_indices: out,
        fs,
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

/// Median-interval heart rate over the trailing `window_s` seconds ending at
/// `t`. `None` with fewer than two annotations in that span.
pub fn local_heart_rate_over(ann: &RawAnnotations, t: f64, window_s: f64) -> Option<f64> {
    let r = ann.range_in(t - window_s, t);
    if r.len() < 2 {
        return None;
    }
    let idx = &ann.sample_indices[r];
    let mut intervals: Vec<f64> = idx
        .windows(2)
        .map(|w| (w[1] - w[0]) as f64 / ann.fs)
        .collect();
    Some(60.0 / median(&mut intervals))
}

pub fn local_heart_rate(ann: &RawAnnotations, t: f64) -> Option<f64> {
    local_heart_rate_over(ann, t, FeatureConfig::default().hr_window_s)
}

/// Beat agreement between two detectors over the trailing window: matched
/// pairs divided by the number of distinct beats either detector reported.
pub fn ecg_sqi_over(
    primary: &RawAnnotations,
    secondary: &RawAnnotations,
    t: f64,
    window_s: f64,
    tol_s: f64,
) -> f64 {
    let a = &primary.sample_indices[primary.range_in(t - window_s, t)];
    let b = &secondary.sample_indices[secondary.range_in(t - window_s, t)];
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let c = match_sorted(a, b, tol_s * primary.fs);
    let union = c.tp + c.fp + c.fn_;
    c.tp as f64 / union as f64
}

pub fn ecg_sqi(primary: &RawAnnotations, secondary: &RawAnnotations, t: f64) -> f64 {
    let cfg = FeatureConfig::default();
    ecg_sqi_over(primary, secondary, t, cfg.sqi_window_s, cfg.sqi_match_tol_s)
}

/// Acceptable ranges for the pressure quality check.
pub const SYSTOLIC_RANGE: (f64, f64) = (40.0, 250.0);
pub const MAP_RANGE: (f64, f64) = (30.0, 200.0);
pub const MIN_PULSE_PRESSURE: f64 = 10.0;
pub const HR_RANGE: (f64, f64) = (20.0, 240.0);
/// Longest beat the quality check accepts (the 20 bpm floor).
const MAX_BEAT_S: f64 = 60.0 / HR_RANGE.0;

fn in_range(v: f64, (lo, hi): (f64, f64)) -> bool {
    v >= lo && v <= hi
}

/// Pressure quality at time `t`: 1 when the most recent complete beat has
/// systolic, mean and pulse pressure and the local rate within physiological
/// ranges. A beat counts as current only if it ended within the last
/// [`MAX_BEAT_S`] seconds.
pub fn abp_sqi_over(signal: &[f64], pulses: &RawAnnotations, t: f64, hr_window_s: f64) -> bool {
    let fs = pulses.fs;
    let idx = &pulses.sample_indices;
    let now = (t * fs).floor();
    // Pulses at or before t.
    let k = idx.partition_point(|&s| (s as f64) <= now);
    if k < 2 {
        return false;
    }
    let (start, end) = (idx[k - 2], idx[k - 1]);
    if end > signal.len() || end <= start {
        return false;
    }
    let beat_s = (end - start) as f64 / fs;
    if beat_s > MAX_BEAT_S || (now - end as f64) / fs > MAX_BEAT_S {
        return false;
    }
    let beat = &signal[start..end];
    let sys = beat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dia = beat.iter().cloned().fold(f64::INFINITY, f64::min);
    let map = beat.iter().sum::<f64>() / beat.len() as f64;
    let Some(hr) = local_heart_rate_over(pulses, t, hr_window_s) else {
        return false;
    };
    in_range(sys, SYSTOLIC_RANGE)
        && in_range(map, MAP_RANGE)
        && sys - dia >= MIN_PULSE_PRESSURE
        && in_range(hr, HR_RANGE)
}

pub fn abp_sqi(signal: &[f64], pulses: &RawAnnotations, t: f64) -> bool {
    abp_sqi_over(signal, pulses, t, FeatureConfig::default().hr_window_s)
}

/// Heart rate and quality values sampled at a point in time.
pub trait ObservationProvider {
    fn ecg_hr(&self, t: f64) -> Option<f64>;
    fn abp_hr(&self, t: f64) -> Option<f64>;
    fn ecg_sqi(&self, t: f64) -> f64;
    fn abp_sqi(&self, t: f64) -> bool;
}

/// Provider backed by detector annotations and the pressure signal.
#[derive(Debug, Clone, Copy)]
pub struct DetectorFeatures<'a> {
    pub ecg: &'a RawAnnotations,
    /// Second ECG detector, compared against `ecg` for the quality index.
    pub ecg_secondary: &'a RawAnnotations,
    pub abp: &'a RawAnnotations,
    pub abp_signal: &'a [f64],
    pub config: &'a FeatureConfig,
}

impl ObservationProvider for DetectorFeatures<'_> {
    fn ecg_hr(&self, t: f64) -> Option<f64> {
        local_heart_rate_over(self.ecg, t, self.config.hr_window_s)
    }

    fn abp_hr(&self, t: f64) -> Option<f64> {
        local_heart_rate_over(self.abp, t, self.config.hr_window_s)
    }

    fn ecg_sqi(&self, t: f64) -> f64 {
        ecg_sqi_over(
            self.ecg,
            self.ecg_secondary,
            t,
            self.config.sqi_window_s,
            self.config.sqi_match_tol_s,
        )
    }

    fn abp_sqi(&self, t: f64) -> bool {
        abp_sqi_over(self.abp_signal, self.abp, t, self.config.hr_window_s)
    }
}

fn window_flags(ann: &RawAnnotations, window_samples: usize, n_windows: usize) -> Vec<bool> {
    let mut flags = vec![false; n_windows];
    for &s in &ann.sample_indices {
        let w = s / window_samples;
        if w < n_windows {
            flags[w] = true;
        }
    }
    flags
}

/// Splits the record into `n_windows` windows of `window_samples` samples.
/// Annotation flags mark windows containing at least one annotation; rates
/// and quality indices are sampled at each window's end.
pub fn windowize<P: ObservationProvider + ?Sized>(
    ecg_ann: &RawAnnotations,
    abp_ann: &RawAnnotations,
    provider: &P,
    window_samples: usize,
    n_windows: usize,
) -> Result<Vec<WindowObservation>> {
    if ecg_ann.fs != abp_ann.fs {
        return Err(Error::invalid(format!(
            "ECG annotations at {} Hz but ABP annotations at {} Hz",
            ecg_ann.fs, abp_ann.fs
        )));
    }
    if window_samples == 0 {
        return Err(Error::invalid("window must span at least one sample"));
    }
    let fs = ecg_ann.fs;
    let ecg_flags = window_flags(ecg_ann, window_samples, n_windows);
    let abp_flags = window_flags(abp_ann, window_samples, n_windows);
    Ok((0..n_windows)
        .map(|w| {
            let t = ((w + 1) * window_samples) as f64 / fs;
            WindowObservation {
                ecg_ann: ecg_flags[w],
                abp_ann: abp_flags[w],
                ecg_hr: provider.ecg_hr(t),
                abp_hr: provider.abp_hr(t),
                ecg_sqi: provider.ecg_sqi(t).clamp(0.0, 1.0),
                abp_sqi: provider.abp_sqi(t),
            }
        })
        .collect())
}
