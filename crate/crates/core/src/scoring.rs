//! Beat-by-beat comparison of test annotations against a reference.

use crate::error::{Error, Result};
use crate::features::RawAnnotations;

/// Default matching window, seconds.
pub const DEFAULT_TOLERANCE_S: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreReport {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub sensitivity: f64,
    pub positive_predictivity: f64,
}

impl ScoreReport {
    /// Ratios with the empty-denominator convention: a ratio over zero
    /// events is 1.
    pub fn from_counts(c: MatchCounts) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                1.0
            } else {
                num as f64 / den as f64
            }
        };
        ScoreReport {
            tp: c.tp,
            fp: c.fp,
            fn_: c.fn_,
            sensitivity: ratio(c.tp, c.tp + c.fn_),
            positive_predictivity: ratio(c.tp, c.tp + c.fp),
        }
    }
}

/// Greedy chronological one-to-one matching on sorted sample positions.
///
/// Each reference beat takes the earliest unmatched test beat within
/// `tol` samples. Test beats too early for the current reference beat can
/// match nothing later and count as false positives.
pub(crate) fn match_sorted(reference: &[usize], test: &[usize], tol: f64) -> MatchCounts {
    let mut counts = MatchCounts::default();
    let mut j = 0;
    for &r in reference {
        let r = r as f64;
        while j < test.len() && (test[j] as f64) < r - tol {
            counts.fp += 1;
            j += 1;
        }
        if j < test.len() && (test[j] as f64) <= r + tol {
            counts.tp += 1;
            j += 1;
        } else {
            counts.fn_ += 1;
        }
    }
    counts.fp += test.len() - j;
    counts
}

fn check_sorted(ann: &RawAnnotations, what: &str) -> Result<()> {
    if ann.sample_indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "{what} annotations are not strictly increasing"
        )));
    }
    Ok(())
}

pub fn match_beats(
    reference: &RawAnnotations,
    test: &RawAnnotations,
    tol_s: f64,
) -> Result<MatchCounts> {
    if !(tol_s > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol_s} s must be > 0")));
    }
    if reference.fs != test.fs {
        return Err(Error::invalid(format!(
            "sampling frequencies differ: reference {} Hz, test {} Hz",
            reference.fs, test.fs
        )));
    }
    check_sorted(reference, "reference")?;
    check_sorted(test, "test")?;
    Ok(match_sorted(
        &reference.sample_indices,
        &test.sample_indices,
        tol_s * reference.fs,
    ))
}

pub fn score(reference: &RawAnnotations, test: &RawAnnotations, tol_s: f64) -> Result<ScoreReport> {
    match_beats(reference, test, tol_s).map(ScoreReport::from_counts)
}

/// Unweighted means of sensitivity and positive predictivity over records.
pub fn aggregate(reports: &[ScoreReport]) -> Result<(f64, f64)> {
    if reports.is_empty() {
        return Err(Error::invalid("cannot aggregate an empty list of reports"));
    }
    let n = reports.len() as f64;
    let se = reports.iter().map(|r| r.sensitivity).sum::<f64>() / n;
    let ppv = reports.iter().map(|r| r.positive_predictivity).sum::<f64>() / n;
    Ok((se, ppv))
}
