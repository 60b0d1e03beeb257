//! Sequential importance resampling over the beat model.
//!
//! Every window the ensemble is propagated, weighted against that window's
//! observations, summarized into the trace, and resampled. Beats are read
//! off the trace afterwards: windows where enough weight sits on the ABP
//! peak state, shifted back by the ensemble latency.
//!
//! Each particle slot owns a ChaCha stream derived from the seed, and all
//! reductions run in slot order, so results do not depend on how the
//! per-particle work is scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    init_particle, particle_weight, propagate_particle, ModelConfig, ParticleState, WindowIndex,
    WindowObservation,
};

#[derive(Debug, Clone, PartialEq)]
pub struct FilterConfig {
    pub n_particles: usize,
    /// Minimum weighted fraction of particles in the ABP peak state for a
    /// window to produce a beat.
    pub peak_fraction_threshold: f64,
    /// Beats closer than this many windows are merged.
    pub refractory_windows: usize,
    pub seed: u64,
    pub model: ModelConfig,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            n_particles: 2000,
            peak_fraction_threshold: 0.1,
            refractory_windows: 10,
            seed: 0,
            model: ModelConfig::default(),
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < 2 {
            return Err(Error::invalid("n_particles must be >= 2"));
        }
        if !(self.peak_fraction_threshold > 0.0 && self.peak_fraction_threshold <= 1.0) {
            return Err(Error::invalid("peak_fraction_threshold must lie in (0, 1]"));
        }
        self.model.validate()
    }
}

/// Weighted ensemble means for one window. Boolean states are fractions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceEntry {
    pub rest_hr: f64,
    pub latency: f64,
    pub true_hr: f64,
    pub ecg_peak: f64,
    pub ecg_last_peak: f64,
    pub abp_peak: f64,
    pub abp_last_peak: f64,
    pub ecg_artifact: f64,
    pub abp_artifact: f64,
    /// Sum of unnormalized particle weights.
    pub weight_sum: f64,
    /// All weights vanished and were reset to uniform.
    pub degenerate: bool,
}

impl TraceEntry {
    /// Names of the traced state means, in column order.
    pub const STATE_COLUMNS: [&'static str; 9] = [
        "rest_hr",
        "latency",
        "true_hr",
        "ecg_peak",
        "ecg_last_peak",
        "abp_peak",
        "abp_last_peak",
        "ecg_artifact",
        "abp_artifact",
    ];

    pub fn state_values(&self) -> [f64; 9] {
        [
            self.rest_hr,
            self.latency,
            self.true_hr,
            self.ecg_peak,
            self.ecg_last_peak,
            self.abp_peak,
            self.abp_last_peak,
            self.ecg_artifact,
            self.abp_artifact,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilterTrace {
    pub entries: Vec<TraceEntry>,
}

impl FilterTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degenerate_steps(&self) -> usize {
        self.entries.iter().filter(|e| e.degenerate).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beat {
    /// Window of the beat after shifting back by the latency.
    pub window: WindowIndex,
    /// ABP peak fraction that produced it.
    pub peak_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BeatAnnotations {
    pub beats: Vec<Beat>,
}

impl BeatAnnotations {
    /// Beat positions at the center sample of each beat window.
    pub fn sample_indices(&self, window_samples: usize) -> Vec<usize> {
        self.beats
            .iter()
            .filter(|b| b.window >= 0)
            .map(|b| b.window as usize * window_samples + window_samples / 2)
            .collect()
    }
}

/// Systematic resampling: one uniform offset strides the weight CDF in
/// steps of `1/N`. Returns `None` if no weight is positive.
pub fn systematic_resample<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<Vec<usize>> {
    systematic_resample_n(weights, weights.len(), rng)
}

/// [`systematic_resample`] drawing `n` indices.
pub fn systematic_resample_n<R: Rng + ?Sized>(
    weights: &[f64],
    n: usize,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let total: f64 = weights.iter().sum();
    if weights.is_empty() || n == 0 || !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let last = weights.len() - 1;
    let step = total / n as f64;
    let mut u = rng.random::<f64>() * step;
    let mut out = Vec::with_capacity(n);
    let mut cum = weights[0];
    let mut i = 0;
    for _ in 0..n {
        while u >= cum && i < last {
            i += 1;
            cum += weights[i];
        }
        out.push(i);
        u += step;
    }
    Some(out)
}

fn slot_rng(seed: u64, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Stream 0 belongs to the resampler.
    rng.set_stream(slot as u64 + 1);
    rng
}

fn weighted_means(particles: &[ParticleState], weights: &[f64], total: f64) -> TraceEntry {
    let mut e = TraceEntry::default();
    let b = |v: bool| if v { 1.0 } else { 0.0 };
    for (p, &w) in particles.iter().zip(weights) {
        let w = w / total;
        let d = &p.dynamic;
        e.rest_hr += w * p.static_params.rest_hr;
        e.latency += w * p.static_params.latency as f64;
        e.true_hr += w * d.true_hr;
        e.ecg_peak += w * b(d.ecg_peak);
        e.ecg_last_peak += w * d.ecg_last_peak as f64;
        e.abp_peak += w * b(d.abp_peak);
        e.abp_last_peak += w * d.abp_last_peak as f64;
        e.ecg_artifact += w * b(d.ecg_artifact);
        e.abp_artifact += w * b(d.abp_artifact);
    }
    for f in [
        &mut e.ecg_peak,
        &mut e.abp_peak,
        &mut e.ecg_artifact,
        &mut e.abp_artifact,
    ] {
        *f = f.clamp(0.0, 1.0);
    }
    e
}

/// The particle ensemble with its per-slot random streams.
pub struct ParticleFilter {
    cfg: FilterConfig,
    particles: Vec<ParticleState>,
    weights: Vec<f64>,
    rngs: Vec<ChaCha8Rng>,
    resample_rng: ChaCha8Rng,
    next_window: WindowIndex,
}

impl ParticleFilter {
    pub fn new(cfg: FilterConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n_particles;
        let mut rngs: Vec<ChaCha8Rng> = (0..n).map(|i| slot_rng(cfg.seed, i)).collect();
        let particles = rngs
            .iter_mut()
            .map(|rng| init_particle(&cfg.model, rng))
            .collect();
        let mut resample_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        resample_rng.set_stream(0);
        Ok(ParticleFilter {
            particles,
            weights: vec![1.0; n],
            rngs,
            resample_rng,
            next_window: 0,
            cfg,
        })
    }

    pub fn particles(&self) -> &[ParticleState] {
        &self.particles
    }

    /// Propagates, weights, summarizes and resamples for the next window.
    pub fn step(&mut self, obs: &WindowObservation) -> TraceEntry {
        let t = self.next_window;
        let n = self.particles.len();
        let mean_latency = self
            .particles
            .iter()
            .map(|p| p.static_params.latency as f64)
            .sum::<f64>()
            / n as f64;

        let model = &self.cfg.model;
        let work = |(p, (rng, w)): (&mut ParticleState, (&mut ChaCha8Rng, &mut f64))| {
            *p = propagate_particle(p, t, mean_latency, model, rng);
            *w = particle_weight(p, obs, t, model);
        };
        #[cfg(feature = "parallel")]
        self.particles
            .par_iter_mut()
            .zip(self.rngs.par_iter_mut().zip(self.weights.par_iter_mut()))
            .with_min_len(64)
            .for_each(work);
        #[cfg(not(feature = "parallel"))]
        self.particles
            .iter_mut()
            .zip(self.rngs.iter_mut().zip(self.weights.iter_mut()))
            .for_each(work);

        let mut total: f64 = self.weights.iter().sum();
        let degenerate = !(total > 0.0 && total.is_finite());
        let weight_sum = total;
        if degenerate {
            self.weights.iter_mut().for_each(|w| *w = 1.0);
            total = n as f64;
        }
        let mut entry = weighted_means(&self.particles, &self.weights, total);
        entry.weight_sum = if weight_sum.is_finite() {
            weight_sum
        } else {
            0.0
        };
        entry.degenerate = degenerate;

        let parents = systematic_resample(&self.weights, &mut self.resample_rng)
            .expect("weights are positive after the degeneracy reset");
        self.particles = parents.iter().map(|&i| self.particles[i]).collect();
        self.next_window += 1;
        entry
    }
}

/// Runs the filter over a whole observation sequence and extracts beats.
pub fn run_filter(
    obs: &[WindowObservation],
    cfg: &FilterConfig,
) -> Result<(FilterTrace, BeatAnnotations)> {
    if obs.is_empty() {
        return Err(Error::invalid("observation sequence is empty"));
    }
    for (i, o) in obs.iter().enumerate() {
        o.validate()
            .map_err(|e| Error::invalid(format!("window {i}: {e}")))?;
    }
    let mut pf = ParticleFilter::new(cfg.clone())?;
    let entries = obs.iter().map(|o| pf.step(o)).collect();
    let trace = FilterTrace { entries };
    let beats = extract_beats(&trace, cfg);
    Ok((trace, beats))
}

/// Beats from windows whose ABP peak fraction reaches the threshold,
/// shifted back by the rounded mean latency at that window. Beats within
/// the refractory distance merge, keeping the larger peak fraction.
pub fn extract_beats(trace: &FilterTrace, cfg: &FilterConfig) -> BeatAnnotations {
    let mut beats: Vec<Beat> = Vec::new();
    for (w, e) in trace.entries.iter().enumerate() {
        if e.abp_peak < cfg.peak_fraction_threshold {
            continue;
        }
        let window = w as WindowIndex - e.latency.round() as WindowIndex;
        if window < 0 {
            continue;
        }
        let beat = Beat {
            window,
            peak_fraction: e.abp_peak,
        };
        match beats.last_mut() {
            Some(last) if (window - last.window).unsigned_abs() < cfg.refractory_windows as u64 => {
                if beat.peak_fraction > last.peak_fraction {
                    *last = beat;
                }
            }
            _ => beats.push(beat),
        }
    }
    beats.sort_by_key(|b| b.window);
    beats.dedup_by_key(|b| b.window);
    BeatAnnotations { beats }
}
