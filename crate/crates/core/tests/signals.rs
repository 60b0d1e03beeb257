use beatdbn::features::{abp_sqi, detect_abp_pulses, detect_qrs, RawAnnotations, REFRACTORY_S};
use beatdbn::model::Channel;
use beatdbn::scoring::score;
use beatdbn::synth::{generate, ArtifactBurst, Interval, SynthSpec, UPSTROKE_S};

fn spec(duration_s: f64, seed: u64) -> SynthSpec {
    SynthSpec {
        duration_s,
        seed,
        ..SynthSpec::default()
    }
}

fn shifted(truth: &RawAnnotations, by_s: f64) -> RawAnnotations {
    let by = (by_s * truth.fs).round() as usize;
    RawAnnotations::new(
        truth.sample_indices.iter().map(|&i| i + by).collect(),
        truth.fs,
    )
    .unwrap()
}

fn assert_refractory(ann: &RawAnnotations) {
    let min_gap = (REFRACTORY_S * ann.fs).floor() as usize;
    for w in ann.sample_indices.windows(2) {
        assert!(
            w[1] - w[0] >= min_gap,
            "annotations {} and {} too close",
            w[0],
            w[1]
        );
    }
}

#[test]
fn qrs_one_detection_per_beat() {
    for seed in 0..3 {
        let rec = generate(&spec(60.0, seed)).unwrap();
        let det = detect_qrs(&rec.ecg, rec.fs).unwrap();
        let r = score(&rec.truth, &det, 0.04).unwrap();
        assert_eq!((r.fp, r.fn_), (0, 0), "seed {seed}: {r:?}");
    }
}

#[test]
fn qrs_silent_in_gap() {
    let mut s = spec(60.0, 1);
    s.ecg_dropouts.push(Interval::new(20.0, 30.0));
    let rec = generate(&s).unwrap();
    let det = detect_qrs(&rec.ecg, rec.fs).unwrap();
    let (lo, hi) = (20 * 250, 30 * 250);
    assert!(det.sample_indices.iter().all(|&i| !(lo..hi).contains(&i)));
    let after: Vec<usize> = det
        .sample_indices
        .iter()
        .copied()
        .filter(|&i| i >= hi)
        .collect();
    assert!(
        after.len() >= 28,
        "detector did not recover: {}",
        after.len()
    );
}

#[test]
fn abp_onsets_follow_latency() {
    for latency_ms in [150.0, 200.0, 300.0] {
        let mut s = spec(60.0, 2);
        s.latency_ms = latency_ms;
        let rec = generate(&s).unwrap();
        let det = detect_abp_pulses(&rec.abp, rec.fs).unwrap();
        let r = score(&shifted(&rec.truth, latency_ms / 1000.0), &det, 0.04).unwrap();
        assert_eq!((r.fp, r.fn_), (0, 0), "latency {latency_ms}: {r:?}");
    }
}

#[test]
fn abp_burst_errors_stay_in_burst() {
    let mut s = spec(90.0, 3);
    s.artifact_bursts.push(ArtifactBurst {
        channel: Channel::Abp,
        interval: Interval::new(30.0, 50.0),
        amplitude: 15.0,
    });
    let rec = generate(&s).unwrap();
    let det = detect_abp_pulses(&rec.abp, rec.fs).unwrap();
    let expected = shifted(&rec.truth, 0.2);
    let outside = |a: &RawAnnotations| {
        let keep = |&i: &usize| {
            let t = i as f64 / 250.0;
            !(29.0..55.0).contains(&t)
        };
        RawAnnotations::new(
            a.sample_indices.iter().copied().filter(keep).collect(),
            250.0,
        )
        .unwrap()
    };
    let r = score(&outside(&expected), &outside(&det), 0.04).unwrap();
    assert_eq!((r.fp, r.fn_), (0, 0), "{r:?}");
}

#[test]
fn detectors_respect_refractory() {
    for seed in 0..4 {
        let mut s = spec(60.0, seed);
        s.hr_profile = vec![(0.0, 50.0), (60.0, 200.0)];
        s.double_spike = seed % 2 == 0;
        s.artifact_bursts.push(ArtifactBurst {
            channel: Channel::Ecg,
            interval: Interval::new(10.0, 30.0),
            amplitude: 1.0,
        });
        s.artifact_bursts.push(ArtifactBurst {
            channel: Channel::Abp,
            interval: Interval::new(20.0, 40.0),
            amplitude: 20.0,
        });
        let rec = generate(&s).unwrap();
        assert_refractory(&detect_qrs(&rec.ecg, rec.fs).unwrap());
        assert_refractory(&detect_abp_pulses(&rec.abp, rec.fs).unwrap());
    }
}

#[test]
fn abp_quality_on_synthetic_wave() {
    let mut s = spec(60.0, 4);
    s.abp_dropouts.push(Interval::new(30.0, 40.0));
    let rec = generate(&s).unwrap();
    let pulses = detect_abp_pulses(&rec.abp, rec.fs).unwrap();
    for t in [5.0, 15.0, 25.0, 50.0, 59.0] {
        assert!(abp_sqi(&rec.abp, &pulses, t), "t={t}");
    }
    assert!(!abp_sqi(&rec.abp, &pulses, 36.0));
}

#[test]
fn synth_latency_by_cross_correlation() {
    let mut s = spec(60.0, 5);
    s.noise_fraction = 0.0;
    let rec = generate(&s).unwrap();
    let slope: Vec<f64> = rec.abp.windows(2).map(|w| w[1] - w[0]).collect();
    let best = (0..150usize)
        .map(|lag| {
            let c: f64 = rec.ecg[..slope.len() - lag]
                .iter()
                .zip(&slope[lag..])
                .map(|(a, b)| a * b)
                .sum();
            (lag, c)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    // The slope peaks mid-upstroke; the difference adds half a sample.
    let lag_s = (best as f64 + 0.5) / rec.fs - UPSTROKE_S / 2.0;
    assert!((lag_s - 0.2).abs() <= 1.0 / rec.fs, "lag {lag_s}");
}
