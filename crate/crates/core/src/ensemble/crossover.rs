// SPDX-License-Identifier: Apache-2.0

use super::summary::EnsembleSummary;
use crate::error::{Error, Result};

/// Temperature at which the piecewise-linear interpolation of
/// `(T, f_spec)` crosses 1/2.
///
/// Points are sorted by `T`; points sharing a temperature are averaged. The
/// first crossing in increasing `T` is returned.
pub fn estimate_crossover(points: &[(f64, f64)]) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(t, f)| t.is_finite() && f.is_finite())
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    let mut k = 0;
    while k < pts.len() {
        let t = pts[k].0;
        let group: Vec<f64> = pts[k..].iter().take_while(|p| p.0 == t).map(|p| p.1).collect();
        k += group.len();
        merged.push((t, group.iter().sum::<f64>() / group.len() as f64));
    }
    if merged.len() < 2 {
        return Err(Error::NotIdentifiable(format!(
            "need at least two distinct temperatures, got {}",
            merged.len()
        )));
    }
    for w in merged.windows(2) {
        let ((t0, f0), (t1, f1)) = (w[0], w[1]);
        if f0 == 0.5 {
            return Ok(t0);
        }
        if (f0 - 0.5) * (f1 - 0.5) <= 0.0 {
            return Ok(t0 + (0.5 - f0) * (t1 - t0) / (f1 - f0));
        }
    }
    Err(Error::NotIdentifiable(
        "speculative fraction never crosses 1/2".into(),
    ))
}

/// [`estimate_crossover`] over ensemble summaries.
pub fn estimate_crossover_from(summaries: &[EnsembleSummary]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = summaries
        .iter()
        .map(|s| (s.temperature.value(), s.f_spec))
        .collect();
    estimate_crossover(&pts)
}
