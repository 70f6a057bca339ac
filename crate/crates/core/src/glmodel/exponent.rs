// SPDX-License-Identifier: Apache-2.0

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Iteration bound of [`exponent_fit`].
pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub t_c: f64,
    pub exponent: f64,
    pub amplitude: f64,
    pub iterations: usize,
    /// Residual sum of squares at the solution.
    pub rss: f64,
}

/// Fits `|o| = A·(T_c − T)^β` to the pairs with `|o| > 0` by
/// Levenberg–Marquardt.
///
/// The start point uses `T_c_guess` (moved above the largest fitted `T` if
/// needed) and a log-log regression for `A` and `β`. `T_c` is kept above
/// every fitted temperature throughout.
pub fn exponent_fit(pairs: &[(f64, f64)], t_c_guess: f64) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(t, o)| t.is_finite() && o.is_finite() && o > 0.0)
        .collect();
    if pts.len() < 4 {
        return Err(Error::FitFailed {
            iterations: 0,
            reason: format!("need at least 4 points with |o| > 0, got {}", pts.len()),
        });
    }
    let t_max = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let t_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let span = (t_max - t_min).max(f64::EPSILON * t_max.abs().max(1.0));
    let t_c0 = if t_c_guess > t_max { t_c_guess } else { t_max + 0.05 * span };
    let (amp0, beta0) = log_log_start(&pts, t_c0);

    let rss = |p: &Vector3<f64>| -> Option<f64> {
        if !(p[1] > t_max && p[0] > 0.0) {
            return None;
        }
        let s: f64 = pts.iter().map(|&(t, o)| (o - p[0] * (p[1] - t).powf(p[2])).powi(2)).sum();
        s.is_finite().then_some(s)
    };

    let mut p = Vector3::new(amp0, t_c0, beta0);
    let mut cost = rss(&p).ok_or_else(|| Error::FitFailed {
        iterations: 0,
        reason: format!("invalid start point A={amp0}, T_c={t_c0}, beta={beta0}"),
    })?;
    let mut mu = 1e-3;
    for it in 1..=MAX_ITERATIONS {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for &(t, o) in &pts {
            let x = p[1] - t;
            let pow = x.powf(p[2]);
            let model = p[0] * pow;
            let j = Vector3::new(pow, p[0] * p[2] * pow / x, model * x.ln());
            jtj += j * j.transpose();
            jtr += j * (o - model);
        }
        if jtr.amax() <= 1e-15 * (1.0 + cost) || cost == 0.0 {
            return Ok(ExponentFit { t_c: p[1], exponent: p[2], amplitude: p[0], iterations: it, rss: cost });
        }
        let mut accepted = false;
        while mu < 1e12 {
            let mut damped = jtj;
            for k in 0..3 {
                damped[(k, k)] += mu * jtj[(k, k)].max(1e-300);
            }
            let step = match damped.lu().solve(&jtr) {
                Some(s) => s,
                None => {
                    mu *= 10.0;
                    continue;
                }
            };
            let trial = p + step;
            match rss(&trial) {
                Some(c) if c < cost => {
                    let small = step.iter().zip(p.iter()).all(|(d, v)| d.abs() <= 1e-14 * (1.0 + v.abs()));
                    let stalled = cost - c <= 1e-15 * cost;
                    p = trial;
                    cost = c;
                    mu = (mu / 10.0).max(1e-12);
                    accepted = true;
                    if small || stalled {
                        return Ok(ExponentFit { t_c: p[1], exponent: p[2], amplitude: p[0], iterations: it, rss: cost });
                    }
                    break;
                }
                _ => mu *= 10.0,
            }
        }
        if !accepted {
            // No downhill step at any damping: a local minimum to working
            // precision.
            return Ok(ExponentFit { t_c: p[1], exponent: p[2], amplitude: p[0], iterations: it, rss: cost });
        }
    }
    Err(Error::FitFailed {
        iterations: MAX_ITERATIONS,
        reason: format!(
            "no convergence; last estimate A={}, T_c={}, beta={}, rss={cost}",
            p[0], p[1], p[2]
        ),
    })
}

/// Regression of `ln|o|` on `ln(T_c − T)` at fixed `T_c`.
fn log_log_start(pts: &[(f64, f64)], t_c: f64) -> (f64, f64) {
    let xs: Vec<f64> = pts.iter().map(|&(t, _)| (t_c - t).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, o)| o.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let beta = if sxx > 0.0 { sxy / sxx } else { 0.5 };
    let beta = if beta.is_finite() && beta > 0.0 { beta } else { 0.5 };
    ((my - beta * mx).exp(), beta)
}
