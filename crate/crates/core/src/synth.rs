//! Synthetic dual-channel records with known beat times.
//!
//! Beat times come from integrating a piecewise-linear heart rate profile.
//! The ECG is a train of triangular QRS spikes and the ABP a train of
//! raised-cosine upstrokes with exponential runoff, delayed by a fixed
//! latency. Dropouts and artifact bursts corrupt the signals only; the
//! truth annotations never depend on them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::features::RawAnnotations;
use crate::model::Channel;

pub const QRS_WIDTH_S: f64 = 0.04;
pub const QRS_AMPLITUDE_MV: f64 = 1.0;
pub const DIASTOLIC_MMHG: f64 = 80.0;
pub const SYSTOLIC_MMHG: f64 = 120.0;
pub const UPSTROKE_S: f64 = 0.1;
pub const RUNOFF_TAU_S: f64 = 0.25;
/// Delay of the extra ECG spike in double-spike mode.
pub const DOUBLE_SPIKE_DELAY_S: f64 = 0.12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start_s: f64,
    pub end_s: f64,
}

impl Interval {
    pub fn new(start_s: f64, end_s: f64) -> Self {
        Interval { start_s, end_s }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start_s && t < self.end_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtifactBurst {
    pub channel: Channel,
    pub interval: Interval,
    /// Standard deviation of the added noise, in the channel's units.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub duration_s: f64,
    pub fs: f64,
    /// `(time s, rate bpm)` knots, linearly interpolated and held constant
    /// beyond the ends.
    pub hr_profile: Vec<(f64, f64)>,
    pub latency_ms: f64,
    pub ecg_dropouts: Vec<Interval>,
    pub abp_dropouts: Vec<Interval>,
    pub artifact_bursts: Vec<ArtifactBurst>,
    pub double_spike: bool,
    /// Gaussian baseline noise as a fraction of each channel's amplitude.
    pub noise_fraction: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            duration_s: 60.0,
            fs: 250.0,
            hr_profile: vec![(0.0, 60.0)],
            latency_ms: 200.0,
            ecg_dropouts: Vec::new(),
            abp_dropouts: Vec::new(),
            artifact_bursts: Vec::new(),
            double_spike: false,
            noise_fraction: 0.02,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthRecord {
    pub fs: f64,
    /// ECG, millivolts.
    pub ecg: Vec<f64>,
    /// Arterial pressure, mmHg.
    pub abp: Vec<f64>,
    pub truth: RawAnnotations,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::invalid("duration_s must be > 0"));
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return Err(Error::invalid("fs must be > 0"));
        }
        if self.hr_profile.is_empty() {
            return Err(Error::invalid("hr_profile needs at least one knot"));
        }
        for w in self.hr_profile.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid("hr_profile knot times must increase"));
            }
        }
        for &(t, hr) in &self.hr_profile {
            if !(20.0..=240.0).contains(&hr) || !t.is_finite() {
                return Err(Error::invalid(format!(
                    "hr_profile knot ({t}, {hr}) outside [20, 240] bpm"
                )));
            }
        }
        if !(self.latency_ms >= 0.0 && self.latency_ms.is_finite()) {
            return Err(Error::invalid("latency_ms must be >= 0"));
        }
        if !(self.noise_fraction >= 0.0 && self.noise_fraction.is_finite()) {
            return Err(Error::invalid("noise_fraction must be >= 0"));
        }
        let intervals = self
            .ecg_dropouts
            .iter()
            .chain(&self.abp_dropouts)
            .chain(self.artifact_bursts.iter().map(|b| &b.interval));
        for iv in intervals {
            if !(iv.start_s >= 0.0 && iv.start_s < iv.end_s && iv.end_s <= self.duration_s) {
                return Err(Error::invalid(format!(
                    "interval [{}, {}] must satisfy 0 <= start < end <= duration ({})",
                    iv.start_s, iv.end_s, self.duration_s
                )));
            }
        }
        for b in &self.artifact_bursts {
            if !(b.amplitude >= 0.0 && b.amplitude.is_finite()) {
                return Err(Error::invalid("artifact amplitude must be >= 0"));
            }
        }
        Ok(())
    }

    /// Heart rate at time `t`, bpm.
    pub fn heart_rate_at(&self, t: f64) -> f64 {
        let knots = &self.hr_profile;
        let first = knots[0];
        if t <= first.0 {
            return first.1;
        }
        for w in knots.windows(2) {
            let ((t0, h0), (t1, h1)) = (w[0], w[1]);
            if t <= t1 {
                return h0 + (h1 - h0) * (t - t0) / (t1 - t0);
            }
        }
        knots[knots.len() - 1].1
    }

    fn n_samples(&self) -> usize {
        (self.duration_s * self.fs).round() as usize
    }

    /// Beat times in seconds: instants where the integrated beat phase
    /// crosses a half-integer, so a constant rate puts the first beat half a
    /// period into the record.
    pub fn beat_times(&self) -> Vec<f64> {
        let dt = 1.0 / self.fs;
        let n = self.n_samples();
        let mut beats = Vec::new();
        let mut phase = 0.0;
        let mut next = 0.5;
        for i in 0..n {
            let t = i as f64 * dt;
            let rate = 0.5 * (self.heart_rate_at(t) + self.heart_rate_at(t + dt)) / 60.0;
            let step = rate * dt;
            if phase + step >= next {
                beats.push(t + (next - phase) / rate);
                next += 1.0;
            }
            phase += step;
        }
        beats
    }
}

fn noise_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Gaussian noise smoothed over a few samples and rescaled to unit variance.
fn band_limited_noise(rng: &mut ChaCha8Rng, n: usize, width: usize) -> Vec<f64> {
    let white: Vec<f64> = (0..n + width).map(|_| StandardNormal.sample(rng)).collect();
    let scale = 1.0 / (width as f64).sqrt();
    (0..n)
        .map(|i| white[i..i + width].iter().sum::<f64>() * scale)
        .collect()
}

fn upstroke_shape(tau: f64) -> f64 {
    if tau < 0.0 {
        0.0
    } else if tau <= UPSTROKE_S {
        0.5 * (1.0 - (std::f64::consts::PI * tau / UPSTROKE_S).cos())
    } else {
        (-(tau - UPSTROKE_S) / RUNOFF_TAU_S).exp()
    }
}

fn add_spike(signal: &mut [f64], center_s: f64, fs: f64) {
    let half = QRS_WIDTH_S / 2.0;
    let lo = ((center_s - half) * fs).floor().max(0.0) as usize;
    let hi = (((center_s + half) * fs).ceil() as usize).min(signal.len().saturating_sub(1));
    for (i, v) in signal.iter_mut().enumerate().take(hi + 1).skip(lo) {
        let d = (i as f64 / fs - center_s).abs();
        if d < half {
            *v += QRS_AMPLITUDE_MV * (1.0 - d / half);
        }
    }
}

fn flatten(signal: &mut [f64], iv: &Interval, fs: f64) {
    let lo = (iv.start_s * fs).round() as usize;
    let hi = ((iv.end_s * fs).round() as usize).min(signal.len());
    for v in &mut signal[lo.min(hi)..hi] {
        *v = 0.0;
    }
}

pub fn generate(spec: &SynthSpec) -> Result<SynthRecord> {
    spec.validate()?;
    let fs = spec.fs;
    let n = spec.n_samples();
    let beats = spec.beat_times();

    let mut ecg = vec![0.0; n];
    for &b in &beats {
        add_spike(&mut ecg, b, fs);
        if spec.double_spike {
            add_spike(&mut ecg, b + DOUBLE_SPIKE_DELAY_S, fs);
        }
    }

    let pulse_amp = SYSTOLIC_MMHG - DIASTOLIC_MMHG;
    let mut abp = vec![DIASTOLIC_MMHG; n];
    let latency = spec.latency_ms / 1000.0;
    let reach = UPSTROKE_S + 10.0 * RUNOFF_TAU_S;
    for &b in &beats {
        let onset = b + latency;
        let lo = (onset * fs).ceil().max(0.0) as usize;
        let hi = (((onset + reach) * fs).ceil() as usize).min(n);
        for (i, v) in abp.iter_mut().enumerate().take(hi).skip(lo) {
            *v += pulse_amp * upstroke_shape(i as f64 / fs - onset);
        }
    }

    // Independent streams so adding a fault never changes the baseline noise.
    let mut ecg_rng = noise_stream(spec.seed, 1);
    let mut abp_rng = noise_stream(spec.seed, 2);
    for v in &mut ecg {
        let z: f64 = StandardNormal.sample(&mut ecg_rng);
        *v += spec.noise_fraction * QRS_AMPLITUDE_MV * z;
    }
    for v in &mut abp {
        let z: f64 = StandardNormal.sample(&mut abp_rng);
        *v += spec.noise_fraction * pulse_amp * z;
    }

    let smoothing = ((0.02 * fs).round() as usize).max(1);
    for (k, burst) in spec.artifact_bursts.iter().enumerate() {
        let lo = (burst.interval.start_s * fs).round() as usize;
        let hi = ((burst.interval.end_s * fs).round() as usize).min(n);
        if hi <= lo {
            continue;
        }
        let mut rng = noise_stream(spec.seed, 16 + k as u64);
        let noise = band_limited_noise(&mut rng, hi - lo, smoothing);
        let target = match burst.channel {
            Channel::Ecg => &mut ecg,
            Channel::Abp => &mut abp,
        };
        for (v, z) in target[lo..hi].iter_mut().zip(noise) {
            *v += burst.amplitude * z;
        }
    }

    for iv in &spec.ecg_dropouts {
        flatten(&mut ecg, iv, fs);
    }
    for iv in &spec.abp_dropouts {
        flatten(&mut abp, iv, fs);
    }

    let mut truth: Vec<usize> = beats
        .iter()
        .map(|&b| (b * fs).round() as usize)
        .filter(|&s| s < n)
        .collect();
    truth.dedup();
    Ok(SynthRecord {
        fs,
        ecg,
        abp,
        truth: RawAnnotations {
            sample_indices: truth,
            fs,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rate_beat_count() {
        let spec = SynthSpec::default();
        let rec = generate(&spec).unwrap();
        assert_eq!(rec.ecg.len(), 15_000);
        let n = rec.truth.len();
        assert!((59..=61).contains(&n), "{n} beats");
        for w in rec.truth.sample_indices.windows(2) {
            assert!((w[1] - w[0]).abs_diff(250) <= 1);
        }
    }

    #[test]
    fn profile_interpolation() {
        let spec = SynthSpec {
            hr_profile: vec![(10.0, 60.0), (20.0, 120.0)],
            ..SynthSpec::default()
        };
        assert_eq!(spec.heart_rate_at(0.0), 60.0);
        assert_eq!(spec.heart_rate_at(15.0), 90.0);
        assert_eq!(spec.heart_rate_at(50.0), 120.0);
    }

    #[test]
    fn dropout_flattens_but_keeps_truth() {
        let base = SynthSpec::default();
        let spec = SynthSpec {
            ecg_dropouts: vec![Interval::new(10.0, 20.0)],
            ..base.clone()
        };
        let clean = generate(&base).unwrap();
        let rec = generate(&spec).unwrap();
        assert_eq!(rec.truth, clean.truth);
        assert!(rec.ecg[2500..5000].iter().all(|&v| v == 0.0));
        assert_eq!(rec.abp, clean.abp);
        assert_eq!(rec.ecg[..2500], clean.ecg[..2500]);
    }

    #[test]
    fn rejects_bad_intervals() {
        let spec = SynthSpec {
            ecg_dropouts: vec![Interval::new(20.0, 10.0)],
            ..SynthSpec::default()
        };
        assert!(generate(&spec).is_err());
        let spec = SynthSpec {
            abp_dropouts: vec![Interval::new(50.0, 70.0)],
            ..SynthSpec::default()
        };
        assert!(generate(&spec).is_err());
        let spec = SynthSpec {
            hr_profile: vec![(0.0, 300.0)],
            ..SynthSpec::default()
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn same_seed_same_record() {
        let spec = SynthSpec {
            artifact_bursts: vec![ArtifactBurst {
                channel: Channel::Ecg,
                interval: Interval::new(5.0, 8.0),
                amplitude: 0.5,
            }],
            seed: 42,
            ..SynthSpec::default()
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = SynthSpec {
            seed: 43,
            ..spec.clone()
        };
        assert_ne!(generate(&spec).unwrap().ecg, generate(&other).unwrap().ecg);
    }
}
