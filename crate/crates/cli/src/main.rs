use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use beatdbn::features::{detect_abp_pulses, detect_qrs};
use beatdbn::io::{self, Record};
use beatdbn::pipeline::{run_record, ExternalAnnotations, RunConfig};
use beatdbn::scoring::{aggregate, score, ScoreReport};
use beatdbn::synth::generate;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "beatdbn",
    version,
    about = "Heart beat annotation from ECG and arterial pressure"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic record and its true beats.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        /// Output record.
        #[arg(long)]
        out: PathBuf,
        /// Output truth annotations.
        #[arg(long)]
        truth: PathBuf,
    },
    /// Run the stand-in beat detectors on a record.
    Detect {
        #[arg(long)]
        record: PathBuf,
        /// Output ECG annotations.
        #[arg(long)]
        ecg_ann: Option<PathBuf>,
        /// Output ABP annotations.
        #[arg(long)]
        abp_ann: Option<PathBuf>,
    },
    /// Annotate beats with the particle filter.
    Run {
        #[arg(long)]
        record: PathBuf,
        /// key=value settings; defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output beat annotations.
        #[arg(long)]
        out: PathBuf,
        /// Output per-window filter trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// ECG annotations replacing the stand-in QRS detector.
        #[arg(long)]
        ecg_ann: Option<PathBuf>,
        /// ABP annotations replacing the stand-in pulse detector.
        #[arg(long)]
        abp_ann: Option<PathBuf>,
    },
    /// Compare test annotations against reference annotations.
    ///
    /// Repeat --ref and --test in pairs to score several records and print
    /// their averages.
    Score {
        #[arg(long = "ref", required = true)]
        reference: Vec<PathBuf>,
        #[arg(long, required = true)]
        test: Vec<PathBuf>,
        #[arg(long)]
        fs: f64,
        #[arg(long, default_value_t = 150.0)]
        tol_ms: f64,
    },
}

/// Stages every file next to its destination and renames only once all
/// were written.
fn commit(files: &[(&Path, String)]) -> Result<()> {
    let mut staged: Vec<(PathBuf, &Path)> = Vec::new();
    let result = (|| -> Result<()> {
        for (path, contents) in files {
            let tmp = staging_path(path)?;
            io::write_atomic(&tmp, contents.as_bytes())?;
            staged.push((tmp, path));
        }
        for (tmp, path) in &staged {
            fs::rename(tmp, path).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    })();
    if result.is_err() {
        for (tmp, _) in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}

fn staging_path(path: &Path) -> Result<PathBuf> {
    let Some(name) = path.file_name() else {
        bail!("{} is not a file path", path.display());
    };
    let mut s = std::ffi::OsString::from(".");
    s.push(name);
    s.push(".staged");
    Ok(path.with_file_name(s))
}

fn cmd_synth(spec: &Path, out: &Path, truth: &Path) -> Result<()> {
    let spec = io::read_synth_spec(spec)?;
    let rec = generate(&spec)?;
    commit(&[
        (out, io::format_record(&Record::from_synth(&rec))),
        (truth, io::format_annotations(&rec.truth)),
    ])?;
    println!("samples={}", rec.ecg.len());
    println!("fs={}", rec.fs);
    println!("beats={}", rec.truth.len());
    Ok(())
}

fn cmd_detect(record: &Path, ecg_out: Option<&Path>, abp_out: Option<&Path>) -> Result<()> {
    if ecg_out.is_none() && abp_out.is_none() {
        bail!("nothing to do: give --ecg-ann and/or --abp-ann");
    }
    let rec = io::read_record(record)?;
    let mut files = Vec::new();
    if let Some(p) = ecg_out {
        let ann = detect_qrs(rec.require("ECG")?, rec.fs)?;
        println!("ecg_annotations={}", ann.len());
        files.push((p, io::format_annotations(&ann)));
    }
    if let Some(p) = abp_out {
        let ann = detect_abp_pulses(rec.require("ABP")?, rec.fs)?;
        println!("abp_annotations={}", ann.len());
        files.push((p, io::format_annotations(&ann)));
    }
    commit(&files)
}

fn cmd_run(
    record: &Path,
    config: Option<&Path>,
    out: &Path,
    trace: Option<&Path>,
    ecg_ann: Option<&Path>,
    abp_ann: Option<&Path>,
) -> Result<()> {
    let cfg = match config {
        Some(p) => io::read_config(p)?,
        None => RunConfig::default(),
    };
    let rec = io::read_record(record)?;
    let external = ExternalAnnotations {
        ecg: ecg_ann
            .map(|p| io::read_annotations(p, rec.fs))
            .transpose()?,
        abp: abp_ann
            .map(|p| io::read_annotations(p, rec.fs))
            .transpose()?,
    };
    let started = Instant::now();
    let output = run_record(
        rec.require("ECG")?,
        rec.require("ABP")?,
        rec.fs,
        &cfg,
        &external,
    )?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut files = vec![(out, io::format_annotations(&output.beats))];
    if let Some(p) = trace {
        files.push((p, io::format_trace(&output.trace)));
    }
    commit(&files)?;
    println!("windows={}", output.trace.len());
    println!("beats={}", output.beats.len());
    println!("degenerate_steps={}", output.trace.degenerate_steps());
    println!("elapsed_s={elapsed:.3}");
    Ok(())
}

fn print_report(prefix: &str, r: &ScoreReport) {
    println!("{prefix}tp={}", r.tp);
    println!("{prefix}fp={}", r.fp);
    println!("{prefix}fn={}", r.fn_);
    println!("{prefix}se={}", r.sensitivity);
    println!("{prefix}ppv={}", r.positive_predictivity);
}

fn cmd_score(reference: &[PathBuf], test: &[PathBuf], fs: f64, tol_ms: f64) -> Result<()> {
    if reference.len() != test.len() {
        bail!(
            "--ref given {} times but --test {} times; they must pair up",
            reference.len(),
            test.len()
        );
    }
    if !(fs > 0.0 && fs.is_finite()) {
        bail!("--fs must be > 0");
    }
    let reports = reference
        .iter()
        .zip(test)
        .map(|(r, t)| {
            let r = io::read_annotations(r, fs)?;
            let t = io::read_annotations(t, fs)?;
            Ok(score(&r, &t, tol_ms / 1000.0)?)
        })
        .collect::<Result<Vec<_>>>()?;
    if let [only] = reports.as_slice() {
        print_report("", only);
        return Ok(());
    }
    for (i, r) in reports.iter().enumerate() {
        print_report(&format!("record{i}."), r);
    }
    let (se, ppv) = aggregate(&reports)?;
    println!("records={}", reports.len());
    println!("mean_se={se}");
    println!("mean_ppv={ppv}");
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Synth { spec, out, truth } => cmd_synth(&spec, &out, &truth),
        Command::Detect {
            record,
            ecg_ann,
            abp_ann,
        } => cmd_detect(&record, ecg_ann.as_deref(), abp_ann.as_deref()),
        Command::Run {
            record,
            config,
            out,
            trace,
            ecg_ann,
            abp_ann,
        } => cmd_run(
            &record,
            config.as_deref(),
            &out,
            trace.as_deref(),
            ecg_ann.as_deref(),
            abp_ann.as_deref(),
        ),
        Command::Score {
            reference,
            test,
            fs,
            tol_ms,
        } => cmd_score(&reference, &test, fs, tol_ms),
    }
}
