//! Record to beats: detectors, windowed observations, filter.

use crate::error::{Error, Result};
use crate::features::{
    detect_abp_pulses, detect_qrs, detect_qrs_scaled, windowize, DetectorFeatures, FeatureConfig,
    RawAnnotations,
};
use crate::filter::{run_filter, FilterConfig, FilterTrace};
use crate::model::WindowObservation;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub features: FeatureConfig,
    pub filter: FilterConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        self.filter.validate()
    }
}

/// Annotations from external detectors that replace the stand-ins.
#[derive(Debug, Clone, Default)]
pub struct ExternalAnnotations {
    pub ecg: Option<RawAnnotations>,
    pub abp: Option<RawAnnotations>,
}

#[derive(Debug, Clone)]
pub struct PreparedObservations {
    pub observations: Vec<WindowObservation>,
    pub window_samples: usize,
    /// Actual window duration, seconds.
    pub window_s: f64,
    pub ecg_ann: RawAnnotations,
    pub ecg_secondary: RawAnnotations,
    pub abp_ann: RawAnnotations,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub prepared: PreparedObservations,
    pub trace: FilterTrace,
    pub beats: RawAnnotations,
}

fn check_external(ann: &RawAnnotations, fs: f64, len: usize, what: &str) -> Result<()> {
    if ann.fs != fs {
        return Err(Error::invalid(format!(
            "{what} annotations at {} Hz, record at {fs} Hz",
            ann.fs
        )));
    }
    if let Some(&last) = ann.sample_indices.last() {
        if last >= len {
            return Err(Error::invalid(format!(
                "{what} annotation at sample {last} beyond record length {len}"
            )));
        }
    }
    Ok(())
}

pub fn prepare_observations(
    ecg: &[f64],
    abp: &[f64],
    fs: f64,
    cfg: &FeatureConfig,
    external: &ExternalAnnotations,
) -> Result<PreparedObservations> {
    cfg.validate()?;
    if ecg.len() != abp.len() {
        return Err(Error::invalid(format!(
            "channel lengths differ: ECG {} vs ABP {}",
            ecg.len(),
            abp.len()
        )));
    }
    if ecg.is_empty() {
        return Err(Error::invalid("record has no samples"));
    }
    let window_samples = cfg.window_samples(fs)?;
    let n_windows = ecg.len().div_ceil(window_samples);

    let ecg_ann = match &external.ecg {
        Some(a) => {
            check_external(a, fs, ecg.len(), "ECG")?;
            a.clone()
        }
        None => detect_qrs(ecg, fs)?,
    };
    let ecg_secondary = detect_qrs_scaled(ecg, fs, cfg.secondary_threshold_scale)?;
    let abp_ann = match &external.abp {
        Some(a) => {
            check_external(a, fs, abp.len(), "ABP")?;
            a.clone()
        }
        None => detect_abp_pulses(abp, fs)?,
    };

    let provider = DetectorFeatures {
        ecg: &ecg_ann,
        ecg_secondary: &ecg_secondary,
        abp: &abp_ann,
        abp_signal: abp,
        config: cfg,
    };
    let observations = windowize(&ecg_ann, &abp_ann, &provider, window_samples, n_windows)?;
    Ok(PreparedObservations {
        observations,
        window_samples,
        window_s: window_samples as f64 / fs,
        ecg_ann,
        ecg_secondary,
        abp_ann,
    })
}

/// Runs the whole pipeline. The model's window duration is taken from the
/// whole-sample window length, overriding `cfg.filter.model.window_s`.
pub fn run_record(
    ecg: &[f64],
    abp: &[f64],
    fs: f64,
    cfg: &RunConfig,
    external: &ExternalAnnotations,
) -> Result<RunOutput> {
    let prepared = prepare_observations(ecg, abp, fs, &cfg.features, external)?;
    let mut filter_cfg = cfg.filter.clone();
    filter_cfg.model.window_s = prepared.window_s;
    let (trace, beats) = run_filter(&prepared.observations, &filter_cfg)?;
    let mut samples = beats.sample_indices(prepared.window_samples);
    samples.retain(|&s| s < ecg.len());
    let beats = RawAnnotations::new(samples, fs)?;
    Ok(RunOutput {
        prepared,
        trace,
        beats,
    })
}
