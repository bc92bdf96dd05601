//! Error metrics against the double-precision solution and solution
//! histograms at the channel center.

use std::collections::BTreeMap;

use crate::channel_flow::FlowParams;
use crate::error::{Error, Result};
use crate::fixed_point::FixedPointFormat;
use crate::samplers::SampleSet;
use crate::selection::Strategy;

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "compared vectors have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Euclidean norm of the difference.
pub fn l2_error(q_sol: &[f64], c_sol: &[f64]) -> Result<f64> {
    check_lengths(q_sol, c_sol)?;
    Ok(q_sol
        .iter()
        .zip(c_sol)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Difference between the two profile maxima, `|max(q) - max(c)|`.
///
/// This tracks the peak (centerline) velocity error. It is not the
/// max-norm of the difference; see [`chebyshev_error`] for that.
pub fn linf_error(q_sol: &[f64], c_sol: &[f64]) -> Result<f64> {
    check_lengths(q_sol, c_sol)?;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if q_sol.is_empty() {
        return Ok(0.0);
    }
    Ok((max(q_sol) - max(c_sol)).abs())
}

/// `max_i |q_i - c_i|`.
pub fn chebyshev_error(q_sol: &[f64], c_sol: &[f64]) -> Result<f64> {
    check_lengths(q_sol, c_sol)?;
    Ok(q_sol
        .iter()
        .zip(c_sol)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Errors of one selected profile at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepError {
    pub step: usize,
    pub strategy: Strategy,
    pub precision: usize,
    pub grid_points: usize,
    pub l2: f64,
    pub linf: f64,
    pub chebyshev: f64,
}

impl StepError {
    pub fn compute(
        step: usize,
        strategy: Strategy,
        precision: usize,
        q_sol: &[f64],
        c_sol: &[f64],
    ) -> Result<Self> {
        Ok(Self {
            step,
            strategy,
            precision,
            grid_points: q_sol.len(),
            l2: l2_error(q_sol, c_sol)?,
            linf: linf_error(q_sol, c_sol)?,
            chebyshev: chebyshev_error(q_sol, c_sol)?,
        })
    }
}

/// Per-step errors for one strategy.
pub type ErrorSeries = Vec<StepError>;

/// Occurrence-weighted histograms of the decoded center value, one per step.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterDistribution {
    /// Grid index (walls included) of the point histogrammed.
    pub grid_index: usize,
    /// False when the grid has no single center point and the lower of the
    /// two middle points was used instead.
    pub exact_center: bool,
    /// `(value, occurrences)` ascending by value, for each step.
    pub steps: Vec<Vec<(f64, u64)>>,
}

/// Grid index used as the channel center and whether it is exact.
pub fn center_index(grid_points: usize) -> (usize, bool) {
    ((grid_points - 1) / 2, grid_points % 2 == 1)
}

pub fn center_distribution(
    samples_per_step: &[SampleSet],
    fmt: &FixedPointFormat,
    params: &FlowParams,
) -> Result<CenterDistribution> {
    params.validate()?;
    let (grid_index, exact_center) = center_index(params.grid_points);
    let n = fmt.precision();
    let expected = params.interior_points() * n;
    let first_bit = (grid_index - 1) * n;

    let mut steps = Vec::with_capacity(samples_per_step.len());
    for samples in samples_per_step {
        if samples.num_vars() != expected {
            return Err(Error::Length {
                expected,
                found: samples.num_vars(),
            });
        }
        let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
        for s in samples.iter() {
            let code = (0..n).fold(0u64, |acc, j| (acc << 1) | u64::from(s.bit(first_bit + j)));
            *histogram.entry(code).or_insert(0) += s.occurrences;
        }
        steps.push(
            histogram
                .into_iter()
                .map(|(code, occ)| (fmt.code_value(code), occ))
                .collect(),
        );
    }
    Ok(CenterDistribution {
        grid_index,
        exact_center,
        steps,
    })
}
