//! Browser bindings for the beat annotator.
//!
//! Three operations back the demo page: the beat-prior curve, a simulated
//! record pushed through the whole pipeline, and scoring of pasted
//! annotation lists. Everything is plain Rust underneath, so the same
//! functions run natively in tests.

use beatdbn::features::RawAnnotations;
use beatdbn::io::parse_annotations;
use beatdbn::model::{beat_window, peak_probability, Channel};
use beatdbn::pipeline::{run_record, ExternalAnnotations, RunConfig};
use beatdbn::scoring::score;
use beatdbn::synth::{generate, ArtifactBurst, Interval, SynthSpec};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Beat prior for `diff` = 0..n windows after the last beat.
pub fn beat_prior_curve(true_hr: f64, window_ms: f64, n: u32) -> beatdbn::Result<Vec<f64>> {
    let bw = beat_window(true_hr, window_ms / 1000.0)?;
    (0..n).map(|d| peak_probability(d as f64, bw)).collect()
}

#[wasm_bindgen]
pub fn peak_curve(true_hr: f64, window_ms: f64, n: u32) -> Result<Vec<f64>, JsError> {
    beat_prior_curve(true_hr, window_ms, n).map_err(js_err)
}

/// Scenario knobs for [`simulate`]. Zero-length intervals are skipped.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Scenario {
    pub duration_s: f64,
    pub heart_rate: f64,
    pub latency_ms: f64,
    pub dropout_start_s: f64,
    pub dropout_end_s: f64,
    pub burst_start_s: f64,
    pub burst_end_s: f64,
    pub burst_amplitude: f64,
    pub n_particles: u32,
    pub seed: u32,
}

#[wasm_bindgen]
impl Scenario {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Scenario {
        Scenario {
            duration_s: 60.0,
            heart_rate: 60.0,
            latency_ms: 200.0,
            dropout_start_s: 0.0,
            dropout_end_s: 0.0,
            burst_start_s: 0.0,
            burst_end_s: 0.0,
            burst_amplitude: 1.0,
            n_particles: 500,
            seed: 1,
        }
    }
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::new()
    }
}

impl Scenario {
    fn spec(&self) -> SynthSpec {
        let mut spec = SynthSpec {
            duration_s: self.duration_s,
            hr_profile: vec![(0.0, self.heart_rate)],
            latency_ms: self.latency_ms,
            seed: self.seed as u64,
            ..SynthSpec::default()
        };
        if self.dropout_end_s > self.dropout_start_s {
            spec.ecg_dropouts
                .push(Interval::new(self.dropout_start_s, self.dropout_end_s));
        }
        if self.burst_end_s > self.burst_start_s {
            spec.artifact_bursts.push(ArtifactBurst {
                channel: Channel::Ecg,
                interval: Interval::new(self.burst_start_s, self.burst_end_s),
                amplitude: self.burst_amplitude,
            });
        }
        spec
    }
}

/// Signals, truth, emitted beats and a few trace columns of one run.
#[wasm_bindgen]
pub struct Simulation {
    fs: f64,
    window_s: f64,
    ecg: Vec<f64>,
    abp: Vec<f64>,
    truth: Vec<u32>,
    beats: Vec<u32>,
    true_hr: Vec<f64>,
    latency: Vec<f64>,
    abp_peak: Vec<f64>,
    ecg_artifact: Vec<f64>,
    sensitivity: f64,
    positive_predictivity: f64,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(getter)]
    pub fn fs(&self) -> f64 {
        self.fs
    }
    #[wasm_bindgen(getter)]
    pub fn window_s(&self) -> f64 {
        self.window_s
    }
    #[wasm_bindgen(getter)]
    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }
    #[wasm_bindgen(getter)]
    pub fn positive_predictivity(&self) -> f64 {
        self.positive_predictivity
    }
    pub fn ecg(&self) -> Vec<f64> {
        self.ecg.clone()
    }
    pub fn abp(&self) -> Vec<f64> {
        self.abp.clone()
    }
    /// True beats, sample indices.
    pub fn truth(&self) -> Vec<u32> {
        self.truth.clone()
    }
    /// Filter beats, sample indices.
    pub fn beats(&self) -> Vec<u32> {
        self.beats.clone()
    }
    pub fn true_hr(&self) -> Vec<f64> {
        self.true_hr.clone()
    }
    pub fn latency(&self) -> Vec<f64> {
        self.latency.clone()
    }
    pub fn abp_peak(&self) -> Vec<f64> {
        self.abp_peak.clone()
    }
    pub fn ecg_artifact(&self) -> Vec<f64> {
        self.ecg_artifact.clone()
    }
}

fn to_u32(ann: &RawAnnotations) -> Vec<u32> {
    ann.sample_indices.iter().map(|&i| i as u32).collect()
}

/// Generates a record for `scenario` and annotates it.
pub fn run_scenario(scenario: &Scenario) -> beatdbn::Result<Simulation> {
    let rec = generate(&scenario.spec())?;
    let mut cfg = RunConfig::default();
    cfg.filter.n_particles = scenario.n_particles as usize;
    cfg.filter.seed = scenario.seed as u64;
    let out = run_record(
        &rec.ecg,
        &rec.abp,
        rec.fs,
        &cfg,
        &ExternalAnnotations::default(),
    )?;
    let r = score(&rec.truth, &out.beats, 0.15)?;
    let column = |f: fn(&beatdbn::filter::TraceEntry) -> f64| -> Vec<f64> {
        out.trace.entries.iter().map(f).collect()
    };
    Ok(Simulation {
        fs: rec.fs,
        window_s: out.prepared.window_s,
        truth: to_u32(&rec.truth),
        beats: to_u32(&out.beats),
        true_hr: column(|e| e.true_hr),
        latency: column(|e| e.latency),
        abp_peak: column(|e| e.abp_peak),
        ecg_artifact: column(|e| e.ecg_artifact),
        sensitivity: r.sensitivity,
        positive_predictivity: r.positive_predictivity,
        ecg: rec.ecg,
        abp: rec.abp,
    })
}

#[wasm_bindgen]
pub fn simulate(scenario: &Scenario) -> Result<Simulation, JsError> {
    run_scenario(scenario).map_err(js_err)
}

/// Scores pasted annotation lists (one sample index per line). Returns
/// `[tp, fp, fn, sensitivity, positive predictivity]`.
pub fn score_text(reference: &str, test: &str, fs: f64, tol_ms: f64) -> beatdbn::Result<Vec<f64>> {
    let r = parse_annotations(reference, fs)?;
    let t = parse_annotations(test, fs)?;
    let s = score(&r, &t, tol_ms / 1000.0)?;
    Ok(vec![
        s.tp as f64,
        s.fp as f64,
        s.fn_ as f64,
        s.sensitivity,
        s.positive_predictivity,
    ])
}

#[wasm_bindgen]
pub fn score_lists(reference: &str, test: &str, fs: f64, tol_ms: f64) -> Result<Vec<f64>, JsError> {
    score_text(reference, test, fs, tol_ms).map_err(js_err)
}
