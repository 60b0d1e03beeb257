//! Dynamic Bayesian network of beat-to-beat physiology.
//!
//! Each particle carries two static parameters (resting heart rate and the
//! ECG to ABP latency) and seven dynamic variables (true heart rate, a peak
//! flag and last-peak index per channel, and an artifact flag per channel).
//! Time is measured in fixed-length analysis windows; a window index of `-1`
//! denotes the prior, before the first observed window.
//!
//! Everything here is a pure function of its arguments plus an explicit
//! random source, so particles can be propagated and weighted in parallel.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Window index. Signed because last-peak priors point before the record start.
pub type WindowIndex = i64;

/// Window index the prior ensemble lives at.
pub const PRIOR_WINDOW: WindowIndex = -1;

/// Floor applied to sampled heart rates so the beat period stays finite.
pub const MIN_HEART_RATE: f64 = 20.0;

/// Success probability of the repeated binomial that shapes the beat prior.
/// With `n = 1.5 * beat_window` this puts the mean at one beat period.
const BEAT_BINOMIAL_P: f64 = 2.0 / 3.0;
const BEAT_BINOMIAL_N_SCALE: f64 = 1.5;

/// Static per-patient parameters, fixed once drawn from the prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticParams {
    /// Resting heart rate, beats/min.
    pub rest_hr: f64,
    /// ECG peak to ABP upstroke delay, in windows.
    pub latency: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicState {
    /// Current heart rate, beats/min.
    pub true_hr: f64,
    pub ecg_peak: bool,
    pub ecg_last_peak: WindowIndex,
    pub abp_peak: bool,
    pub abp_last_peak: WindowIndex,
    pub ecg_artifact: bool,
    pub abp_artifact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub static_params: StaticParams,
    pub dynamic: DynamicState,
}

/// Observed values for one analysis window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowObservation {
    /// At least one ECG detector annotation fell in the window.
    pub ecg_ann: bool,
    /// At least one ABP detector annotation fell in the window.
    pub abp_ann: bool,
    pub ecg_hr: Option<f64>,
    pub abp_hr: Option<f64>,
    /// Inter-detector agreement, in `[0, 1]`.
    pub ecg_sqi: f64,
    /// Physiological range check passed.
    pub abp_sqi: bool,
}

impl WindowObservation {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.ecg_sqi) {
            return Err(Error::invalid(format!(
                "ecg_sqi {} outside [0, 1]",
                self.ecg_sqi
            )));
        }
        Ok(())
    }
}

/// Conditional probability table for a detector annotation given the
/// channel's peak and artifact states. Only the rows with a peak are free
/// parameters; the no-peak rows derive from the beat prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnotationCpt {
    /// Pr(ann | peak, no artifact).
    pub peak_clean: f64,
    /// Pr(ann | peak, artifact).
    pub peak_artifact: f64,
}

impl Default for AnnotationCpt {
    fn default() -> Self {
        AnnotationCpt {
            peak_clean: 0.99,
            peak_artifact: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Demographic prior mean of the resting heart rate, beats/min.
    pub avg_hr: f64,
    pub rest_hr_sigma: f64,
    pub true_hr_init_sigma: f64,
    /// Per-window process noise of the true heart rate, beats/min.
    pub true_hr_noise_sigma: f64,
    pub latency_prior_mean_ms: f64,
    pub latency_prior_sigma_windows: f64,
    pub peak_prior_prob: f64,
    pub artifact_prior_prob: f64,
    /// Pr(artifact stays in its current state) per window.
    pub artifact_stay_prob: f64,
    /// Actual window duration, seconds.
    pub window_s: f64,
    pub annotation_cpt: AnnotationCpt,
    /// ECG SQI below this (with a good ABP SQI) switches weighting to ABP.
    pub ecg_sqi_threshold: f64,
    /// Also multiply in the annotation factor of the channel the gate did
    /// not select. Off by default: weighting uses the gated channel only.
    pub weight_both_channels: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            avg_hr: 70.0,
            rest_hr_sigma: 10.0,
            true_hr_init_sigma: 5.0,
            true_hr_noise_sigma: 15.0,
            latency_prior_mean_ms: 200.0,
            latency_prior_sigma_windows: 2.0,
            peak_prior_prob: 0.01,
            artifact_prior_prob: 0.01,
            artifact_stay_prob: 0.99,
            window_s: 0.025,
            annotation_cpt: AnnotationCpt::default(),
            ecg_sqi_threshold: 0.8,
            weight_both_channels: false,
        }
    }
}

fn is_open_prob(p: f64) -> bool {
    p > 0.0 && p < 1.0
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("peak_prior_prob", self.peak_prior_prob),
            ("artifact_prior_prob", self.artifact_prior_prob),
            ("artifact_stay_prob", self.artifact_stay_prob),
            ("ann_prob_peak_clean", self.annotation_cpt.peak_clean),
            ("ann_prob_peak_artifact", self.annotation_cpt.peak_artifact),
        ];
        for (name, p) in probs {
            if !is_open_prob(p) {
                return Err(Error::invalid(format!("{name}={p} must lie in (0, 1)")));
            }
        }
        let sigmas = [
            ("rest_hr_sigma", self.rest_hr_sigma),
            ("true_hr_init_sigma", self.true_hr_init_sigma),
            ("true_hr_noise_sigma", self.true_hr_noise_sigma),
            (
                "latency_prior_sigma_windows",
                self.latency_prior_sigma_windows,
            ),
        ];
        for (name, s) in sigmas {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::invalid(format!("{name}={s} must be >= 0")));
            }
        }
        if !(self.window_s > 0.0 && self.window_s.is_finite()) {
            return Err(Error::invalid(format!(
                "window_s={} must be > 0",
                self.window_s
            )));
        }
        if !(self.avg_hr > 0.0 && self.avg_hr.is_finite()) {
            return Err(Error::invalid(format!(
                "avg_hr={} must be > 0",
                self.avg_hr
            )));
        }
        if !(self.latency_prior_mean_ms >= 0.0 && self.latency_prior_mean_ms.is_finite()) {
            return Err(Error::invalid("latency_prior_mean_ms must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.ecg_sqi_threshold) {
            return Err(Error::invalid("ecg_sqi_threshold must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Prior mean latency in whole windows.
    pub fn latency_prior_mean_windows(&self) -> f64 {
        (self.latency_prior_mean_ms / 1000.0 / self.window_s).round()
    }
}

/// Binomial pmf extended to real `x` and `n` through the log-gamma function.
///
/// Zero outside `[0, n]`. Agrees with the integer pmf at integer arguments.
pub fn binomial_pmf_general(x: f64, n: f64, p: f64) -> Result<f64> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::domain(format!("binomial n={n} must be > 0")));
    }
    if !is_open_prob(p) {
        return Err(Error::domain(format!("binomial p={p} must lie in (0, 1)")));
    }
    if x.is_nan() {
        return Err(Error::domain("binomial x is NaN"));
    }
    Ok(binomial_pmf_unchecked(x, n, p))
}

#[inline]
fn binomial_pmf_unchecked(x: f64, n: f64, p: f64) -> f64 {
    if x < 0.0 || x > n {
        return 0.0;
    }
    let ln = ln_gamma(n + 1.0) - ln_gamma(x + 1.0) - ln_gamma(n - x + 1.0)
        + x * p.ln()
        + (n - x) * (1.0 - p).ln();
    ln.exp()
}

/// Expected number of windows per beat at the given heart rate.
pub fn beat_window(true_hr: f64, window_s: f64) -> Result<f64> {
    if !(true_hr > 0.0) || !(window_s > 0.0) {
        return Err(Error::domain(format!(
            "beat_window needs positive inputs, got hr={true_hr} window={window_s}"
        )));
    }
    Ok(beat_window_unchecked(true_hr, window_s))
}

#[inline]
fn beat_window_unchecked(true_hr: f64, window_s: f64) -> f64 {
    60.0 / (window_s * true_hr)
}

/// Probability of a beat `diff` windows after the last one, for a beat
/// period of `bw` windows. Periodic in `diff` with period `bw`; within each
/// period it peaks at phase zero and vanishes for phases past half a period.
pub fn peak_probability(diff: f64, bw: f64) -> Result<f64> {
    if !(bw > 0.0 && bw.is_finite()) {
        return Err(Error::domain(format!("beat window {bw} must be > 0")));
    }
    if !(diff >= 0.0) {
        return Err(Error::domain(format!("diff {diff} must be >= 0")));
    }
    Ok(peak_probability_unchecked(diff, bw))
}

#[inline]
fn peak_probability_unchecked(diff: f64, bw: f64) -> f64 {
    // max(phase, phase + bw) always picks the second argument.
    let x = diff.rem_euclid(bw) + bw;
    binomial_pmf_unchecked(x, BEAT_BINOMIAL_N_SCALE * bw, BEAT_BINOMIAL_P).clamp(0.0, 1.0)
}

fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample::<f64, _>(StandardNormal)
}

/// Draws one particle from the prior. The state lives at [`PRIOR_WINDOW`].
pub fn init_particle<R: Rng + ?Sized>(cfg: &ModelConfig, rng: &mut R) -> ParticleState {
    let rest_hr = (cfg.avg_hr + cfg.rest_hr_sigma * normal(rng)).max(MIN_HEART_RATE);
    let true_hr = (rest_hr + cfg.true_hr_init_sigma * normal(rng)).max(MIN_HEART_RATE);

    let latency_mean = cfg.latency_prior_mean_ms / 1000.0 / cfg.window_s;
    let latency = (latency_mean + cfg.latency_prior_sigma_windows * normal(rng))
        .round()
        .max(0.0) as i64;

    // Uniform over the integers in [-BeatWindow, -1].
    let span = beat_window_unchecked(true_hr, cfg.window_s)
        .round()
        .max(1.0) as i64;
    let mut ecg_last_peak = -rng.random_range(1..=span);
    let ecg_peak = bernoulli(rng, cfg.peak_prior_prob);
    if ecg_peak {
        ecg_last_peak = PRIOR_WINDOW;
    }

    let abp_peak = PRIOR_WINDOW == ecg_last_peak + latency;
    // The ABP last peak is the ECG last peak shifted by the latency, but
    // never later than the prior window itself.
    let abp_last_peak = (ecg_last_peak + latency).min(PRIOR_WINDOW);

    let ecg_artifact = bernoulli(rng, cfg.artifact_prior_prob);
    let abp_artifact = bernoulli(rng, cfg.artifact_prior_prob);

    ParticleState {
        static_params: StaticParams { rest_hr, latency },
        dynamic: DynamicState {
            true_hr,
            ecg_peak,
            ecg_last_peak,
            abp_peak,
            abp_last_peak,
            ecg_artifact,
            abp_artifact,
        },
    }
}

/// Pr(artifact at the next window = `next` | artifact now = `current`).
pub fn artifact_transition(current: bool, next: bool, stay: f64) -> f64 {
    let p_on = if current { stay } else { 1.0 - stay };
    if next {
        p_on
    } else {
        1.0 - p_on
    }
}

fn next_artifact<R: Rng + ?Sized>(current: bool, stay: f64, rng: &mut R) -> bool {
    bernoulli(rng, artifact_transition(current, true, stay))
}

/// Samples the state at window `t_next` given the state at `t_next - 1`.
///
/// `mean_latency` is the ensemble mean of the latency parameter; the ABP
/// peak is placed that many windows after the particle's last ECG peak.
pub fn propagate_particle<R: Rng + ?Sized>(
    prev: &ParticleState,
    t_next: WindowIndex,
    mean_latency: f64,
    cfg: &ModelConfig,
    rng: &mut R,
) -> ParticleState {
    let s = prev.static_params;
    let d = prev.dynamic;

    let true_hr = (0.8 * d.true_hr + 0.2 * s.rest_hr + cfg.true_hr_noise_sigma * normal(rng))
        .max(MIN_HEART_RATE);

    let bw = beat_window_unchecked(d.true_hr, cfg.window_s);
    let diff = (t_next - d.ecg_last_peak) as f64;
    let ecg_peak = bernoulli(rng, peak_probability_unchecked(diff, bw));
    let ecg_last_peak = if ecg_peak { t_next } else { d.ecg_last_peak };

    let abp_peak = t_next == ecg_last_peak + mean_latency.round() as i64;
    let abp_last_peak = if abp_peak { t_next } else { d.abp_last_peak };

    let ecg_artifact = next_artifact(d.ecg_artifact, cfg.artifact_stay_prob, rng);
    let abp_artifact = next_artifact(d.abp_artifact, cfg.artifact_stay_prob, rng);

    ParticleState {
        static_params: s,
        dynamic: DynamicState {
            true_hr,
            ecg_peak,
            ecg_last_peak,
            abp_peak,
            abp_last_peak,
            ecg_artifact,
            abp_artifact,
        },
    }
}

/// Pr(ann | peak, artifact) from the annotation table. `beat_prob` is the
/// beat prior at the particle's current phase.
pub fn annotation_likelihood(
    cpt: &AnnotationCpt,
    peak: bool,
    artifact: bool,
    ann: bool,
    beat_prob: f64,
) -> f64 {
    let p_ann = match (peak, artifact) {
        (true, false) => cpt.peak_clean,
        (true, true) => cpt.peak_artifact,
        (false, false) => beat_prob,
        (false, true) => 0.5 * (0.5 + beat_prob),
    };
    if ann {
        p_ann
    } else {
        1.0 - p_ann
    }
}

/// Gaussian density of `true_hr` around an observed rate, with a spread of
/// a quarter of the observation (floored at 20 bpm before scaling).
pub fn hr_likelihood(true_hr: f64, hr_obs: f64) -> f64 {
    let sigma = hr_obs.max(MIN_HEART_RATE) / 4.0;
    let z = (true_hr - hr_obs) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Ecg,
    Abp,
}

/// Chooses the channel whose observations weight the particles.
pub fn gate(ecg_sqi: f64, abp_sqi: bool) -> Channel {
    gate_with_threshold(ecg_sqi, abp_sqi, 0.8)
}

pub fn gate_with_threshold(ecg_sqi: f64, abp_sqi: bool, threshold: f64) -> Channel {
    if ecg_sqi < threshold && abp_sqi {
        Channel::Abp
    } else {
        Channel::Ecg
    }
}

fn channel_annotation_factor(
    p: &ParticleState,
    obs: &WindowObservation,
    channel: Channel,
    t: WindowIndex,
    cfg: &ModelConfig,
) -> f64 {
    let d = &p.dynamic;
    let (peak, artifact, ann, last_peak) = match channel {
        Channel::Ecg => (d.ecg_peak, d.ecg_artifact, obs.ecg_ann, d.ecg_last_peak),
        Channel::Abp => (d.abp_peak, d.abp_artifact, obs.abp_ann, d.abp_last_peak),
    };
    let bw = beat_window_unchecked(d.true_hr, cfg.window_s);
    // last_peak never exceeds t, so diff >= 0.
    let beat_prob = peak_probability_unchecked((t - last_peak).max(0) as f64, bw);
    annotation_likelihood(&cfg.annotation_cpt, peak, artifact, ann, beat_prob)
}

/// Likelihood of one window's observations under a particle propagated to
/// window `t`.
pub fn particle_weight(
    p: &ParticleState,
    obs: &WindowObservation,
    t: WindowIndex,
    cfg: &ModelConfig,
) -> f64 {
    let channel = gate_with_threshold(obs.ecg_sqi, obs.abp_sqi, cfg.ecg_sqi_threshold);
    let mut w = channel_annotation_factor(p, obs, channel, t, cfg);
    let hr_obs = match channel {
        Channel::Ecg => obs.ecg_hr,
        Channel::Abp => obs.abp_hr,
    };
    if let Some(hr) = hr_obs {
        w *= hr_likelihood(p.dynamic.true_hr, hr);
    }
    if cfg.weight_both_channels {
        let other = match channel {
            Channel::Ecg => Channel::Abp,
            Channel::Abp => Channel::Ecg,
        };
        w *= channel_annotation_factor(p, obs, other, t, cfg);
    }
    w
}
