//! Plain-text record, annotation, trace, config and synth-spec files.
//!
//! Every format carries an optional `format=1` key. Readers accept files
//! without it; writers always emit it. Floats are written in Rust's
//! shortest round-trip form, so write then read is lossless.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::{FeatureConfig, RawAnnotations};
use crate::filter::{FilterConfig, FilterTrace, TraceEntry};
use crate::model::Channel;
use crate::pipeline::RunConfig;
use crate::synth::{ArtifactBurst, Interval, SynthRecord, SynthSpec};

pub const FORMAT_VERSION: u32 = 1;

/// Named, equal-length sample series at a common rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub fs: f64,
    pub names: Vec<String>,
    pub channels: Vec<Vec<f64>>,
}

impl Record {
    pub fn new(fs: f64, names: Vec<String>, channels: Vec<Vec<f64>>) -> Result<Self> {
        if !(fs > 0.0 && fs.is_finite()) {
            return Err(Error::invalid(format!(
                "sampling frequency {fs} must be > 0"
            )));
        }
        if names.len() != channels.len() || names.is_empty() {
            return Err(Error::invalid(
                "need one name per channel and at least one channel",
            ));
        }
        if let Some(c) = channels.iter().find(|c| c.len() != channels[0].len()) {
            return Err(Error::invalid(format!(
                "channel lengths differ: {} vs {}",
                c.len(),
                channels[0].len()
            )));
        }
        Ok(Record {
            fs,
            names,
            channels,
        })
    }

    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Case-insensitive lookup.
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
            .map(|i| self.channels[i].as_slice())
    }

    /// Two-channel record named `ECG` and `ABP`.
    pub fn from_synth(s: &SynthRecord) -> Self {
        Record {
            fs: s.fs,
            names: vec!["ECG".into(), "ABP".into()],
            channels: vec![s.ecg.clone(), s.abp.clone()],
        }
    }

    pub fn require(&self, name: &str) -> Result<&[f64]> {
        self.channel(name)
            .ok_or_else(|| Error::invalid(format!("record has no {name} channel")))
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `contents` next to `path` and renames it into place, so a failed
/// write never leaves a partial file at `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents)?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(e));
    }
    Ok(())
}

/// Numbered, trimmed lines with blanks and `#` comments dropped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn split_key_value(line: &str) -> Option<(&str, &str)> {
    line.split_once('=').map(|(k, v)| (k.trim(), v.trim()))
}

fn parse_num<T: FromStr>(line: usize, what: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::parse(line, format!("{what}: cannot parse {v:?}")))
}

fn check_format(line: usize, v: &str) -> Result<()> {
    let version: u32 = parse_num(line, "format", v)?;
    if version != FORMAT_VERSION {
        return Err(Error::parse(
            line,
            format!("unsupported format version {version}"),
        ));
    }
    Ok(())
}

pub fn parse_record(text: &str) -> Result<Record> {
    let mut lines = content_lines(text).peekable();
    let mut fs_hz = None;
    while let Some(&(no, line)) = lines.peek() {
        let Some((k, v)) = split_key_value(line) else {
            break;
        };
        match k {
            "fs" => {
                let f: f64 = parse_num(no, "fs", v)?;
                if !(f > 0.0 && f.is_finite()) {
                    return Err(Error::parse(no, format!("fs must be > 0, got {v}")));
                }
                fs_hz = Some(f);
            }
            "format" => check_format(no, v)?,
            _ => return Err(Error::parse(no, format!("unknown header key {k:?}"))),
        }
        lines.next();
    }
    let fs_hz = fs_hz.ok_or_else(|| Error::parse(1, "missing fs=<Hz> header"))?;
    let (no, names_line) = lines
        .next()
        .ok_or_else(|| Error::parse(text.lines().count().max(1), "missing channel names line"))?;
    let names: Vec<String> = names_line
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    if names.iter().any(String::is_empty) {
        return Err(Error::parse(no, "empty channel name"));
    }
    let mut channels = vec![Vec::new(); names.len()];
    for (no, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() {
            return Err(Error::parse(
                no,
                format!("expected {} values, found {}", names.len(), fields.len()),
            ));
        }
        for (ch, f) in channels.iter_mut().zip(fields) {
            ch.push(parse_num(no, "sample", f.trim())?);
        }
    }
    Ok(Record {
        fs: fs_hz,
        names,
        channels,
    })
}

pub fn format_record(rec: &Record) -> String {
    let mut s = String::with_capacity(rec.len() * 16 * rec.channels.len() + 64);
    let _ = writeln!(s, "fs={}", rec.fs);
    let _ = writeln!(s, "format={FORMAT_VERSION}");
    let _ = writeln!(s, "{}", rec.names.join(","));
    for i in 0..rec.len() {
        for (c, ch) in rec.channels.iter().enumerate() {
            if c > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", ch[i]);
        }
        s.push('\n');
    }
    s
}

pub fn read_record(path: &Path) -> Result<Record> {
    parse_record(&read_text(path)?).map_err(|e| e.with_path(path))
}

pub fn write_record(rec: &Record, path: &Path) -> Result<()> {
    write_atomic(path, format_record(rec).as_bytes())
}

pub fn parse_annotations(text: &str, fs: f64) -> Result<RawAnnotations> {
    let mut out: Vec<usize> = Vec::new();
    for (no, line) in content_lines(text) {
        if let Some((k, v)) = split_key_value(line) {
            if k == "format" && out.is_empty() {
                check_format(no, v)?;
                continue;
            }
            return Err(Error::parse(no, format!("unexpected {line:?}")));
        }
        let idx: usize = parse_num(no, "sample index", line)?;
        if let Some(&prev) = out.last() {
            if idx <= prev {
                return Err(Error::parse(
                    no,
                    format!("index {idx} does not increase on previous {prev}"),
                ));
            }
        }
        out.push(idx);
    }
    RawAnnotations::new(out, fs)
}

pub fn format_annotations(ann: &RawAnnotations) -> String {
    let mut s = format!("format={FORMAT_VERSION}\n");
    for i in &ann.sample_indices {
        let _ = writeln!(s, "{i}");
    }
    s
}

pub fn read_annotations(path: &Path, fs: f64) -> Result<RawAnnotations> {
    parse_annotations(&read_text(path)?, fs).map_err(|e| e.with_path(path))
}

pub fn write_annotations(ann: &RawAnnotations, path: &Path) -> Result<()> {
    write_atomic(path, format_annotations(ann).as_bytes())
}

/// Column names of the trace table, in order.
pub fn trace_columns() -> Vec<&'static str> {
    let mut cols = vec!["window"];
    cols.extend(TraceEntry::STATE_COLUMNS);
    cols.extend(["weight_sum", "degenerate"]);
    cols
}

pub fn format_trace(trace: &FilterTrace) -> String {
    let mut s = String::with_capacity(trace.len() * 160 + 128);
    let _ = writeln!(s, "format={FORMAT_VERSION}");
    let _ = writeln!(s, "{}", trace_columns().join(","));
    for (w, e) in trace.entries.iter().enumerate() {
        let _ = write!(s, "{w}");
        for v in e.state_values() {
            let _ = write!(s, ",{v}");
        }
        let _ = writeln!(s, ",{},{}", e.weight_sum, u8::from(e.degenerate));
    }
    s
}

pub fn parse_trace(text: &str) -> Result<FilterTrace> {
    let mut lines = content_lines(text).peekable();
    if let Some(&(no, line)) = lines.peek() {
        if let Some(("format", v)) = split_key_value(line) {
            check_format(no, v)?;
            lines.next();
        }
    }
    let cols = trace_columns();
    let (no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    if header.split(',').map(str::trim).ne(cols.iter().copied()) {
        return Err(Error::parse(no, "unexpected trace columns"));
    }
    let mut entries = Vec::new();
    for (no, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != cols.len() {
            return Err(Error::parse(
                no,
                format!("expected {} values, found {}", cols.len(), f.len()),
            ));
        }
        let window: usize = parse_num(no, "window", f[0])?;
        if window != entries.len() {
            return Err(Error::parse(no, format!("window {window} out of sequence")));
        }
        let mut v = [0.0; 10];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = parse_num(no, cols[k + 1], f[k + 1])?;
        }
        let degenerate = match f[11] {
            "0" => false,
            "1" => true,
            other => return Err(Error::parse(no, format!("degenerate flag {other:?}"))),
        };
        entries.push(TraceEntry {
            rest_hr: v[0],
            latency: v[1],
            true_hr: v[2],
            ecg_peak: v[3],
            ecg_last_peak: v[4],
            abp_peak: v[5],
            abp_last_peak: v[6],
            ecg_artifact: v[7],
            abp_artifact: v[8],
            weight_sum: v[9],
            degenerate,
        });
    }
    Ok(FilterTrace { entries })
}

pub fn write_trace(trace: &FilterTrace, path: &Path) -> Result<()> {
    write_atomic(path, format_trace(trace).as_bytes())
}

pub fn read_trace(path: &Path) -> Result<FilterTrace> {
    parse_trace(&read_text(path)?).map_err(|e| e.with_path(path))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(Error::parse(
            line,
            format!("{key}: expected true or false, got {v:?}"),
        )),
    }
}

/// Applies one `key=value` setting. The model's window duration follows
/// `window_length_s` and the record's sampling rate, so it has no key.
fn apply_config_key(cfg: &mut RunConfig, line: usize, key: &str, v: &str) -> Result<()> {
    let f: &mut FeatureConfig = &mut cfg.features;
    let p: &mut FilterConfig = &mut cfg.filter;
    let num = |v: &str| parse_num::<f64>(line, key, v);
    match key {
        "window_length_s" => f.window_length_s = num(v)?,
        "hr_window_s" => f.hr_window_s = num(v)?,
        "sqi_window_s" => f.sqi_window_s = num(v)?,
        "sqi_match_tol_s" => f.sqi_match_tol_s = num(v)?,
        "secondary_threshold_scale" => f.secondary_threshold_scale = num(v)?,
        "n_particles" => p.n_particles = parse_num(line, key, v)?,
        "peak_fraction_threshold" => p.peak_fraction_threshold = num(v)?,
        "refractory_windows" => p.refractory_windows = parse_num(line, key, v)?,
        "seed" => p.seed = parse_num(line, key, v)?,
        "avg_hr" => p.model.avg_hr = num(v)?,
        "rest_hr_sigma" => p.model.rest_hr_sigma = num(v)?,
        "true_hr_init_sigma" => p.model.true_hr_init_sigma = num(v)?,
        "true_hr_noise_sigma" => p.model.true_hr_noise_sigma = num(v)?,
        "latency_prior_mean_ms" => p.model.latency_prior_mean_ms = num(v)?,
        "latency_prior_sigma_windows" => p.model.latency_prior_sigma_windows = num(v)?,
        "peak_prior_prob" => p.model.peak_prior_prob = num(v)?,
        "artifact_prior_prob" => p.model.artifact_prior_prob = num(v)?,
        "artifact_stay_prob" => p.model.artifact_stay_prob = num(v)?,
        "peak_clean" => p.model.annotation_cpt.peak_clean = num(v)?,
        "peak_artifact" => p.model.annotation_cpt.peak_artifact = num(v)?,
        "ecg_sqi_threshold" => p.model.ecg_sqi_threshold = num(v)?,
        "weight_both_channels" => p.model.weight_both_channels = parse_bool(line, key, v)?,
        "format" => check_format(line, v)?,
        _ => return Err(Error::parse(line, format!("unknown config key {key:?}"))),
    }
    Ok(())
}

/// Parses a flat `key=value` config on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (no, line) in content_lines(text) {
        let (k, v) = split_key_value(line)
            .ok_or_else(|| Error::parse(no, format!("expected key=value, got {line:?}")))?;
        if v.is_empty() {
            return Err(Error::parse(no, format!("missing value for key {k:?}")));
        }
        apply_config_key(&mut cfg, no, k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn format_config(cfg: &RunConfig) -> String {
    let f = &cfg.features;
    let p = &cfg.filter;
    let m = &p.model;
    let mut s = format!("format={FORMAT_VERSION}\n");
    let pairs: [(&str, String); 22] = [
        ("window_length_s", f.window_length_s.to_string()),
        ("hr_window_s", f.hr_window_s.to_string()),
        ("sqi_window_s", f.sqi_window_s.to_string()),
        ("sqi_match_tol_s", f.sqi_match_tol_s.to_string()),
        (
            "secondary_threshold_scale",
            f.secondary_threshold_scale.to_string(),
        ),
        ("n_particles", p.n_particles.to_string()),
        (
            "peak_fraction_threshold",
            p.peak_fraction_threshold.to_string(),
        ),
        ("refractory_windows", p.refractory_windows.to_string()),
        ("seed", p.seed.to_string()),
        ("avg_hr", m.avg_hr.to_string()),
        ("rest_hr_sigma", m.rest_hr_sigma.to_string()),
        ("true_hr_init_sigma", m.true_hr_init_sigma.to_string()),
        ("true_hr_noise_sigma", m.true_hr_noise_sigma.to_string()),
        ("latency_prior_mean_ms", m.latency_prior_mean_ms.to_string()),
        (
            "latency_prior_sigma_windows",
            m.latency_prior_sigma_windows.to_string(),
        ),
        ("peak_prior_prob", m.peak_prior_prob.to_string()),
        ("artifact_prior_prob", m.artifact_prior_prob.to_string()),
        ("artifact_stay_prob", m.artifact_stay_prob.to_string()),
        ("peak_clean", m.annotation_cpt.peak_clean.to_string()),
        ("peak_artifact", m.annotation_cpt.peak_artifact.to_string()),
        ("ecg_sqi_threshold", m.ecg_sqi_threshold.to_string()),
        ("weight_both_channels", m.weight_both_channels.to_string()),
    ];
    for (k, v) in pairs {
        let _ = writeln!(s, "{k}={v}");
    }
    s
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    parse_config(&read_text(path)?).map_err(|e| e.with_path(path))
}

fn parse_pair(line: usize, key: &str, v: &str) -> Result<(f64, f64)> {
    let (a, b) = v.split_once(',').ok_or_else(|| {
        Error::parse(line, format!("{key}: expected two comma-separated numbers"))
    })?;
    Ok((
        parse_num(line, key, a.trim())?,
        parse_num(line, key, b.trim())?,
    ))
}

/// Parses a synth spec. Repeatable keys: `hr` (`time,bpm` knot),
/// `ecg_dropout` / `abp_dropout` (`start,end`) and `burst`
/// (`ecg|abp,start,end,amplitude`).
pub fn parse_synth_spec(text: &str) -> Result<SynthSpec> {
    let mut spec = SynthSpec {
        hr_profile: Vec::new(),
        ..SynthSpec::default()
    };
    for (no, line) in content_lines(text) {
        let (k, v) = split_key_value(line)
            .ok_or_else(|| Error::parse(no, format!("expected key=value, got {line:?}")))?;
        if v.is_empty() {
            return Err(Error::parse(no, format!("missing value for key {k:?}")));
        }
        match k {
            "duration_s" => spec.duration_s = parse_num(no, k, v)?,
            "fs" => spec.fs = parse_num(no, k, v)?,
            "latency_ms" => spec.latency_ms = parse_num(no, k, v)?,
            "noise_fraction" => spec.noise_fraction = parse_num(no, k, v)?,
            "seed" => spec.seed = parse_num(no, k, v)?,
            "double_spike" => spec.double_spike = parse_bool(no, k, v)?,
            "hr" => spec.hr_profile.push(parse_pair(no, k, v)?),
            "ecg_dropout" => {
                let (a, b) = parse_pair(no, k, v)?;
                spec.ecg_dropouts.push(Interval::new(a, b));
            }
            "abp_dropout" => {
                let (a, b) = parse_pair(no, k, v)?;
                spec.abp_dropouts.push(Interval::new(a, b));
            }
            "burst" => {
                let f: Vec<&str> = v.split(',').map(str::trim).collect();
                if f.len() != 4 {
                    return Err(Error::parse(
                        no,
                        "burst: expected channel,start,end,amplitude",
                    ));
                }
                let channel = match f[0].to_ascii_lowercase().as_str() {
                    "ecg" => Channel::Ecg,
                    "abp" => Channel::Abp,
                    other => {
                        return Err(Error::parse(
                            no,
                            format!("burst: unknown channel {other:?}"),
                        ))
                    }
                };
                spec.artifact_bursts.push(ArtifactBurst {
                    channel,
                    interval: Interval::new(parse_num(no, k, f[1])?, parse_num(no, k, f[2])?),
                    amplitude: parse_num(no, k, f[3])?,
                });
            }
            "format" => check_format(no, v)?,
            _ => return Err(Error::parse(no, format!("unknown synth key {k:?}"))),
        }
    }
    if spec.hr_profile.is_empty() {
        spec.hr_profile = SynthSpec::default().hr_profile;
    }
    spec.validate()?;
    Ok(spec)
}

pub fn read_synth_spec(path: &Path) -> Result<SynthSpec> {
    parse_synth_spec(&read_text(path)?).map_err(|e| e.with_path(path))
}
