// SPDX-License-Identifier: Apache-2.0

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::GLPolynomial;
use crate::engine::RunResult;
use crate::error::{Error, Result};

/// Smallest sample count accepted by [`fit_landscape`].
pub const MIN_SAMPLES: usize = 100;
/// Smallest bin count accepted by [`fit_landscape`].
pub const MIN_BINS: usize = 8;

/// Binned landscape `L(o) = −ln(p + ε)` on `[−1, 1]`, where `p` is the
/// fraction of samples in a bin and `ε = 1/(2n)`.
///
/// Each sample is booked half in its bin and half in the mirrored bin, so
/// the landscape is exactly symmetric and does not change when the samples
/// are mirrored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landscape {
    pub centers: Vec<f64>,
    pub values: Vec<f64>,
    /// Bins hit by at least one sample before symmetrization.
    pub occupied_bins: usize,
}

pub fn empirical_landscape(samples: &[f64], bins: usize) -> Result<Landscape> {
    if bins == 0 {
        return Err(Error::parameter("bins", "need at least one bin"));
    }
    if let Some(x) = samples.iter().find(|x| !(x.abs() <= 1.0)) {
        return Err(Error::parameter(
            "samples",
            format!("order parameter {x} outside [-1, 1]"),
        ));
    }
    let index = |x: f64| (((x + 1.0) / 2.0 * bins as f64) as usize).min(bins - 1);
    let mut raw = vec![0usize; bins];
    let mut folded = vec![0usize; bins];
    for &x in samples {
        raw[index(x)] += 1;
        let k = index(x.abs());
        folded[k] += 1;
        folded[bins - 1 - k] += 1;
    }
    // folded holds twice the symmetrized counts.
    let n = samples.len() as f64;
    let eps = 1.0 / (2.0 * n);
    let values = folded
        .iter()
        .map(|&c| -(c as f64 / (2.0 * n) + eps).ln())
        .collect();
    let centers = (0..bins)
        .map(|k| -1.0 + (2 * k + 1) as f64 / bins as f64)
        .collect();
    Ok(Landscape {
        centers,
        values,
        occupied_bins: raw.iter().filter(|&&c| c > 0).count(),
    })
}

/// Least-squares fit of the symmetric quartic `C + α·o² + (β/2)·o⁴` to the
/// [`empirical_landscape`] of `samples`. A double-well sample distribution
/// gives `α < 0`, a single peak at zero gives `α > 0`.
pub fn fit_landscape(samples: &[f64], bins: usize) -> Result<GLPolynomial> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::parameter(
            "samples",
            format!("need at least {MIN_SAMPLES} samples, got {}", samples.len()),
        ));
    }
    if bins < MIN_BINS {
        return Err(Error::parameter("bins", format!("need at least {MIN_BINS} bins, got {bins}")));
    }
    let land = empirical_landscape(samples, bins)?;
    if land.occupied_bins < 3 {
        return Err(Error::Underdetermined(format!(
            "samples occupy {} bins, need at least 3",
            land.occupied_bins
        )));
    }
    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for (&c, &l) in land.centers.iter().zip(&land.values) {
        let c2 = c * c;
        let basis = Vector3::new(1.0, c2, 0.5 * c2 * c2);
        normal += basis * basis.transpose();
        rhs += basis * l;
    }
    let coef = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Underdetermined("singular normal equations".into()))?;
    Ok(GLPolynomial::symmetric(coef[0], coef[1], coef[2]))
}

/// Which order-parameter values to feed into a landscape fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// `o(t) = A(t)/N` for every post-burn-in step of every run.
    #[default]
    PerStep,
    /// The mean of `o(t)` over the post-burn-in steps, one value per run.
    PerRunMean,
}

/// Order-parameter samples from runs that kept their full trajectory.
/// Runs without post-burn-in steps contribute nothing.
pub fn order_parameter_samples(runs: &[RunResult], burn_in: u64, mode: SampleMode) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for run in runs {
        let traj = run.trajectory.as_ref().ok_or_else(|| {
            Error::parameter("trajectory", format!("run with seed {} kept no trajectory", run.seed))
        })?;
        let n = run.n_agents as f64;
        let start = usize::try_from(burn_in).unwrap_or(usize::MAX);
        let post = traj.imbalances.get(start..).unwrap_or(&[]);
        if post.is_empty() {
            continue;
        }
        match mode {
            SampleMode::PerStep => out.extend(post.iter().map(|&a| a as f64 / n)),
            SampleMode::PerRunMean => {
                let sum: i64 = post.iter().sum();
                out.push(sum as f64 / (n * post.len() as f64));
            }
        }
    }
    Ok(out)
}
